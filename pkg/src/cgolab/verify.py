"""Randomized comparison of the counted-storage algebra against the brute-force oracle.

Each check returns the largest relative error seen; the denominator is the
larger of the reference magnitude and the product of the input max-norms, so
identities whose right side vanishes are still measured on a sensible scale.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from . import multiindex as mi
from . import oracle
from . import symtensor as st
from .symtensor import DenseArray, SymTensor


def _rel(lib, ref, scale=1.0) -> float:
    lib = np.asarray(lib, dtype=complex)
    ref = np.asarray(ref, dtype=complex)
    den = max(float(np.max(np.abs(ref), initial=0.0)), float(scale), np.finfo(float).tiny)
    return float(np.max(np.abs(lib - ref), initial=0.0)) / den


def _iso(d, rng):
    q, _ = np.linalg.qr(rng.standard_normal((d, 2)))
    return q[:, 0] + 1j * q[:, 1]


def _cvec(d, rng):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


def _dense_of(T: SymTensor) -> np.ndarray:
    return np.asarray(T.dense()).reshape((T.d,) * T.k) if T.k else np.asarray(T.components[0])


def check_contract_symmetrize(d, k, j, rng):
    A = SymTensor.random(d, k, rng)
    B = rng.standard_normal(d**j) + 1j * rng.standard_normal(d**j)
    lib = st.contract(A, st.symmetrize(DenseArray(d, j, B)))
    ref = oracle.contract(_dense_of(A), B.reshape((d,) * j))
    return _rel(_dense_of(lib), ref, A.max_norm() * np.max(np.abs(B)))


def check_tensor_product(d, j, k, rng):
    A, B = SymTensor.random(d, j, rng), SymTensor.random(d, k, rng)
    lib = st.tensor_product(A, B)
    ref = oracle.tensor_product(_dense_of(A), _dense_of(B))
    return max(_rel(_dense_of(lib), ref), _rel(lib.components, st.tensor_product(B, A).components))


def check_triple(d, s, k, rng):
    A, B, C = SymTensor.random(d, k, rng), SymTensor.random(d, s, rng), SymTensor.random(d, k - s, rng)
    lib = st.dot(st.tensor_product(B, C), A)
    # sum over alpha', alpha'' of B C A, done by contracting the trailing slots first
    ref = oracle.contract(oracle.contract(_dense_of(A), _dense_of(C)), _dense_of(B))
    return _rel(lib, ref, A.max_norm() * B.max_norm() * C.max_norm())


def check_subset_sum(d, k, s, rng):
    eta = [_cvec(d, rng) for _ in range(k)]
    ref = sum(oracle.outer(a, b) for a, b in oracle.subset_products(eta, s))
    lib = math.comb(k, s) * _dense_of(st.multi_product(eta))
    return _rel(lib, ref)


def check_tproduct(d, k, s, rng):
    eta = [_cvec(d, rng) for _ in range(k)]
    B, C = SymTensor.random(d, s, rng), SymTensor.random(d, k - s, rng)
    lib = math.comb(k, s) * st.dot(st.tensor_product(B, C), st.multi_product(eta))
    ref = 0j
    for J in combinations(range(k), s):
        Jc = [i for i in range(k) if i not in J]
        ref += complex(oracle.contract(_dense_of(B), oracle.outer(*[eta[i] for i in J]))) * complex(
            oracle.contract(_dense_of(C), oracle.outer(*[eta[i] for i in Jc]))
        )
    return _rel(lib, ref, B.max_norm() * C.max_norm() * math.prod(np.max(np.abs(e)) for e in eta))


def check_id1(d, k, j, rng):
    A, B = SymTensor.random(d, k, rng), SymTensor.random(d, j, rng)
    z = _cvec(d, rng)
    lib = st.dot(st.tensor_product(A, B), st.tensor_power(z, k + j))
    ref = complex(oracle.contract(_dense_of(A), oracle.power(z, k))) * complex(oracle.contract(_dense_of(B), oracle.power(z, j)))
    return _rel(lib, ref, A.max_norm() * B.max_norm() * np.max(np.abs(z)) ** (k + j))


def check_id2(d, k, n, j, rng):
    A = SymTensor.random(d, k, rng)
    z, w = _iso(d, rng), _cvec(d, rng)
    lhs = st.dot(st.tensor_product(A, st.identity_power(d, n)), st.tensor_product(st.tensor_power(z, k + 2 * n - j), st.tensor_power(w, j)))
    return _rel(lhs, 0.0, A.max_norm() * np.max(np.abs(w)) ** j)


def check_id3(d, k, n, rng):
    A = SymTensor.random(d, k, rng)
    z, w = _iso(d, rng), _cvec(d, rng)
    lhs = st.dot(st.tensor_product(A, st.identity_power(d, n)), st.tensor_product(st.tensor_power(z, k + n), st.tensor_power(w, n)))
    ref = st.id3_constant(k, n) * complex(np.dot(w, z)) ** n * complex(oracle.contract(_dense_of(A), oracle.power(z, k)))
    return _rel(lhs, ref, A.max_norm() * np.max(np.abs(w)) ** n)


def check_rotation(d, j, k, rng):
    R, _ = np.linalg.qr(rng.standard_normal((d, d)))
    A, B = SymTensor.random(d, j, rng), SymTensor.random(d, k, rng)
    e1 = _rel(_dense_of(st.rotate(R, st.tensor_product(A, B))), oracle.rotate(R, oracle.tensor_product(_dense_of(A), _dense_of(B))))
    e2 = _rel(_dense_of(st.tensor_product(st.rotate(R, A), st.rotate(R, B))), oracle.rotate(R, oracle.tensor_product(_dense_of(A), _dense_of(B))))
    return max(e1, e2)


def id3_table(max_total=6):
    """Oracle-measured ``c(k, n)`` for ``n >= 1`` and ``k + 2n <= max_total``, with the matching closed form."""
    table = {}
    for n in range(1, max_total // 2 + 1):
        for k in range(0, max_total - 2 * n + 1):
            table[(k, n)] = st.id3_constant(k, n)
    names = st.id3_candidates(1, 1).keys()
    matches = [
        name for name in names
        if all(abs(st.id3_candidates(k, n)[name] - c) <= 1e-12 * c for (k, n), c in table.items())
    ]
    return table, matches


def appendix_suite(seed=0, n_draws=50, dmax=4, max_total=6):
    """Run every identity over ``d <= dmax``, total order ``<= max_total``; returns a report dict."""
    rng = np.random.default_rng(seed)
    errs: dict[str, list] = {}

    def record(name, value):
        errs.setdefault(name, []).append(value)

    for d in range(1, dmax + 1):
        for _ in range(n_draws):
            for k in range(max_total + 1):
                for j in range(k + 1):
                    record("contract_symmetrize", check_contract_symmetrize(d, k, j, rng))
                    if 1 <= j < k:
                        record("triple_contraction", check_triple(d, j, k, rng))
                        record("subset_contraction", check_tproduct(d, k, j, rng))
            for total in range(max_total + 1):
                for j in range(total + 1):
                    record("tensor_product_oracle", check_tensor_product(d, j, total - j, rng))
                    record("id1_product_power", check_id1(d, j, total - j, rng))
            for k in range(2, max_total + 1):
                for s in range(1, k):
                    record("subset_sum", check_subset_sum(d, k, s, rng))
            if d >= 2:
                for n in range(1, max_total // 2 + 1):
                    for k in range(0, max_total - 2 * n + 1):
                        for j in range(n):
                            record("id2_vanishing", check_id2(d, k, n, j, rng))
                        if k + n + n <= max_total:
                            record("id3_constant", check_id3(d, k, n, rng))
            for total in range(1, 4):
                for j in range(total + 1):
                    record("rotation_oracle", check_rotation(d, j, total - j, rng))
    table, matches = id3_table(max_total)
    return {
        "seed": int(seed),
        "draws": int(n_draws),
        "dmax": int(dmax),
        "max_total_order": int(max_total),
        "identities": {
            name: {"cases": len(v), "max_rel_error": float(max(v))} for name, v in sorted(errs.items())
        },
        "id3_table": [{"k": k, "n": n, "c": c} for (k, n), c in sorted(table.items())],
        "id3_closed_form": matches,
    }


def dimension_report(d, kmax):
    """Exact integer identities for ``k <= kmax`` in dimension ``d``."""
    rows = []
    for k in range(kmax + 1):
        sd = mi.sym_dim(d, k)
        pd = mi.poly_dim_le(d, k)
        lhs = sd - (mi.sym_dim(d, k - 2) if k >= 2 else 0)
        rhs = (mi.sym_dim(d - 1, k) if d >= 2 else 0) + (mi.sym_dim(d - 1, k - 1) if d >= 2 and k >= 1 else 0)
        rows.append(
            {
                "k": k,
                "sym_dim": sd,
                "sym_dim_binomial": math.comb(k + d - 1, d - 1),
                "poly_dim_le": pd,
                "poly_dim_le_binomial": math.comb(k + d, d),
                "codim_lhs": lhs,
                "codim_rhs": rhs,
            }
        )
    return rows
