"""Brute-force tensor algebra on full ``(d,)*k`` arrays.

Everything here works on plain numpy arrays indexed by ordered indices and
sums literally over permutations.  Nothing is shared with the counted-index
kernels in :mod:`cgolab.symtensor`; the two are compared in the tests.
Costs grow like ``k! * d**k``, so keep ``k <= 6``.
"""
from __future__ import annotations

import math
from itertools import combinations, permutations

import numpy as np


def symmetrize(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    k = a.ndim
    if k < 2:
        return a.copy()
    total = np.zeros_like(a)
    for perm in permutations(range(k)):
        total += np.transpose(a, perm)
    return total / math.factorial(k)


def outer(*arrays) -> np.ndarray:
    out = np.ones((), dtype=complex)
    for a in arrays:
        out = np.multiply.outer(out, np.asarray(a, dtype=complex))
    return out


def tensor_product(a, b) -> np.ndarray:
    return symmetrize(outer(a, b))


def power(v, k: int) -> np.ndarray:
    return outer(*([v] * k))


def multi_product(vectors) -> np.ndarray:
    return symmetrize(outer(*vectors))


def identity2(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def identity_power(d: int, n: int) -> np.ndarray:
    """Symmetrized n-fold product of the identity matrix."""
    return symmetrize(outer(*([np.eye(d)] * n)))


def contract(a, b) -> np.ndarray:
    """(a . b)_alpha = sum_beta a_{alpha beta} b_beta over the trailing axes of a."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    j = b.ndim
    k = a.ndim
    if j > k:
        raise ValueError("cannot contract by a higher-order array")
    return np.tensordot(a, b, axes=(list(range(k - j, k)), list(range(j))))


def rotate(R, a) -> np.ndarray:
    out = np.asarray(a, dtype=complex)
    R = np.asarray(R)
    for axis in range(out.ndim):
        out = np.moveaxis(np.tensordot(R, out, axes=([1], [axis])), 0, axis)
    return out


def subset_products(vectors, s: int):
    """Yield (eta^J, eta^{J^c}) for every subset J of size s."""
    k = len(vectors)
    for J in combinations(range(k), s):
        Jc = [i for i in range(k) if i not in J]
        yield multi_product([vectors[i] for i in J]), multi_product([vectors[i] for i in Jc])


def id3_ratio(A, zeta, omega, n: int) -> complex:
    """(A (x) I2^n) . (zeta^{k+n} (x) omega^n) divided by (omega.zeta)^n (A . zeta^k)."""
    A = np.asarray(A, dtype=complex)
    k = A.ndim
    d = len(zeta)
    lhs_tensor = tensor_product(A, identity_power(d, n)) if n else A
    rhs_array = outer(*([zeta] * (k + n) + [omega] * n))
    lhs = complex(contract(lhs_tensor, rhs_array))
    base = complex(contract(A, power(zeta, k))) * complex(np.dot(omega, zeta)) ** n
    return lhs / base
