"""Symmetric complex tensors stored over counted indices.

A :class:`SymTensor` of order ``k`` over ``C^d`` keeps one complex number per
counted index of degree ``k``, in the rank order of :mod:`cgolab.multiindex`.
Reading an ordered index goes through its counted image, so symmetry holds
by construction.

Contractions sum over counted indices weighted by multiplicity, which avoids
the ``d**k`` blow-up of ordered storage.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache

import numpy as np

from . import multiindex as mi

__all__ = [
    "SymTensor",
    "DenseArray",
    "symmetrize",
    "tensor_product",
    "tensor_power",
    "contract",
    "dot",
    "multi_product",
    "rotate",
    "identity2",
    "identity_power",
    "slice_counted",
    "restrict",
    "extend",
    "id3_constant",
    "id3_candidates",
    "scalar",
]


class SymTensor:
    """Order-``k`` symmetric tensor over ``C^d``.

    Parameters
    ----------
    d, k : int
        Dimension and order.
    components : array_like, optional
        One complex value per counted index, in rank order.  Zero if omitted.
    """

    __slots__ = ("d", "k", "_c")

    def __init__(self, d: int, k: int, components=None):
        if d < 1 or k < 0:
            raise ValueError("need d >= 1 and k >= 0")
        n = mi.sym_dim(d, k)
        if components is None:
            c = np.zeros(n, dtype=complex)
        else:
            c = np.array(components, dtype=complex).reshape(-1)
            if c.shape[0] != n:
                raise ValueError(f"expected {n} components for (d={d}, k={k}), got {c.shape[0]}")
        c.setflags(write=False)
        self.d = int(d)
        self.k = int(k)
        self._c = c

    @property
    def components(self) -> np.ndarray:
        return self._c

    def __repr__(self):
        return f"SymTensor(d={self.d}, k={self.k}, components={self._c!r})"

    def __getitem__(self, index):
        """Value at an ordered index (1-based tuple) or a CountedIndex."""
        if isinstance(index, mi.CountedIndex):
            counts = index
        else:
            counts = mi.ordered_to_counted(index, self.d)
        if counts.d != self.d or counts.degree != self.k:
            raise ValueError("index does not match tensor shape")
        return self._c[mi.rank(counts)]

    def dense(self) -> np.ndarray:
        """Full ``(d,)*k`` array."""
        return self._c[mi.ordered_rank_map(self.d, self.k)]

    def _check_same(self, other):
        if not isinstance(other, SymTensor) or (self.d, self.k) != (other.d, other.k):
            raise ValueError("shape mismatch")

    def __add__(self, other):
        self._check_same(other)
        return SymTensor(self.d, self.k, self._c + other._c)

    def __sub__(self, other):
        self._check_same(other)
        return SymTensor(self.d, self.k, self._c - other._c)

    def __neg__(self):
        return SymTensor(self.d, self.k, -self._c)

    def __mul__(self, s):
        if isinstance(s, SymTensor):
            return NotImplemented
        return SymTensor(self.d, self.k, self._c * complex(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return SymTensor(self.d, self.k, self._c / complex(s))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def frobenius(self) -> float:
        w = mi.multiplicities(self.d, self.k)
        return float(np.sqrt(np.sum(w * np.abs(self._c) ** 2)))

    def conj(self):
        return SymTensor(self.d, self.k, self._c.conj())

    def allclose(self, other, tol=1e-12) -> bool:
        self._check_same(other)
        scale = max(self.max_norm(), other.max_norm(), 1.0)
        return bool(np.max(np.abs(self._c - other._c), initial=0.0) <= tol * scale)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "components": [[float(z.real), float(z.imag)] for z in self._c],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj) -> "SymTensor":
        comps = np.array(obj["components"], dtype=float).reshape(-1, 2)
        return cls(int(obj["d"]), int(obj["k"]), comps[:, 0] + 1j * comps[:, 1])

    @classmethod
    def from_json(cls, text: str) -> "SymTensor":
        return cls.from_dict(json.loads(text))

    @classmethod
    def random(cls, d, k, rng, real=False) -> "SymTensor":
        n = mi.sym_dim(d, k)
        c = rng.standard_normal(n)
        if not real:
            c = c + 1j * rng.standard_normal(n)
        return cls(d, k, c)


class DenseArray:
    """Not necessarily symmetric array indexed by ordered indices."""

    __slots__ = ("d", "k", "values")

    def __init__(self, d: int, k: int, values):
        v = np.array(values, dtype=complex)
        if v.size != d**k:
            raise ValueError(f"expected {d**k} values, got {v.size}")
        v = v.reshape((d,) * k)
        v.setflags(write=False)
        self.d, self.k, self.values = int(d), int(k), v


def scalar(value, d: int) -> SymTensor:
    return SymTensor(d, 0, [value])


def symmetrize(a) -> SymTensor:
    """Average of a dense array over all index permutations."""
    if isinstance(a, SymTensor):
        return a
    if not isinstance(a, DenseArray):
        arr = np.asarray(a, dtype=complex)
        a = DenseArray(arr.shape[0] if arr.ndim else 1, arr.ndim, arr)
    d, k = a.d, a.k
    rmap = mi.ordered_rank_map(d, k).reshape(-1)
    vals = a.values.reshape(-1)
    n = mi.sym_dim(d, k)
    sums = np.bincount(rmap, weights=vals.real, minlength=n) + 1j * np.bincount(
        rmap, weights=vals.imag, minlength=n
    )
    return SymTensor(d, k, sums / mi.multiplicities(d, k))


@lru_cache(maxsize=None)
def _product_plan(d: int, j: int, k: int):
    beta = mi.counted_indices(d, j)
    alpha = mi.counted_indices(d, k)
    gamma = beta[:, None, :] + alpha[None, :, :]
    target = mi.rank_many(gamma).reshape(-1)
    comb = np.vectorize(math.comb, otypes=[float])
    weight = np.prod(comb(gamma, beta[:, None, :]), axis=-1) / math.comb(j + k, j)
    return target, weight.reshape(-1)


def tensor_product(A: SymTensor, B: SymTensor) -> SymTensor:
    """Symmetric tensor product, order ``A.k + B.k``."""
    if A.d != B.d:
        raise ValueError(f"dimension mismatch: {A.d} vs {B.d}")
    d, j, k = A.d, A.k, B.k
    target, weight = _product_plan(d, j, k)
    vals = (np.outer(A.components, B.components).reshape(-1)) * weight
    n = mi.sym_dim(d, j + k)
    out = np.bincount(target, weights=vals.real, minlength=n) + 1j * np.bincount(
        target, weights=vals.imag, minlength=n
    )
    return SymTensor(d, j + k, out)


def tensor_power(v, k: int) -> SymTensor:
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = v.shape[0]
    counts = mi.counted_indices(d, k)
    comps = np.prod(v[None, :] ** counts, axis=1) if k else np.ones(1, dtype=complex)
    return SymTensor(d, k, comps)


@lru_cache(maxsize=None)
def _contract_plan(d: int, k: int, j: int):
    alpha = mi.counted_indices(d, k - j)
    beta = mi.counted_indices(d, j)
    src = mi.rank_many(alpha[:, None, :] + beta[None, :, :])
    return src, mi.multiplicities(d, j)


def contract(A: SymTensor, B) -> SymTensor:
    """Contraction of ``A`` by ``B`` over the trailing indices of ``A``.

    ``B`` may be a :class:`SymTensor` or a general :class:`DenseArray`.  The
    dense case goes through the full array of ``A``.
    """
    if A.d != B.d:
        raise ValueError(f"dimension mismatch: {A.d} vs {B.d}")
    if B.k > A.k:
        raise ValueError(f"cannot contract order {A.k} by order {B.k}")
    d, k, j = A.d, A.k, B.k
    if isinstance(B, DenseArray):
        full = np.tensordot(A.dense(), B.values, axes=(list(range(k - j, k)), list(range(j))))
        if k == j:
            return SymTensor(d, 0, [full])
        return SymTensor(d, k - j, full[mi.representatives(d, k - j)])
    src, mult = _contract_plan(d, k, j)
    return SymTensor(d, k - j, A.components[src] @ (mult * B.components))


def dot(A: SymTensor, B) -> complex:
    """Full contraction of equal-order tensors."""
    if A.k != B.k:
        raise ValueError("dot needs equal orders")
    return complex(contract(A, B).components[0])


def multi_product(vectors) -> SymTensor:
    vectors = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vectors:
        raise ValueError("need at least one vector")
    out = tensor_power(vectors[0], 1)
    for v in vectors[1:]:
        out = tensor_product(out, tensor_power(v, 1))
    return out


def rotate(R, A: SymTensor) -> SymTensor:
    """Apply the matrix ``R`` along every slot of ``A``."""
    R = np.asarray(R)
    if R.shape != (A.d, A.d):
        raise ValueError(f"matrix of shape {R.shape} does not act on dimension {A.d}")
    if A.k == 0:
        return A
    arr = A.dense()
    for axis in range(A.k):
        arr = np.tensordot(R, arr, axes=([1], [axis]))
        arr = np.moveaxis(arr, 0, axis)
    return SymTensor(A.d, A.k, arr[mi.representatives(A.d, A.k)])


def identity2(d: int) -> SymTensor:
    counts = mi.counted_indices(d, 2)
    return SymTensor(d, 2, (counts.max(axis=1) == 2).astype(complex))


def identity_power(d: int, n: int) -> SymTensor:
    out = scalar(1.0, d)
    I2 = identity2(d)
    for _ in range(n):
        out = tensor_product(out, I2)
    return out


def slice_counted(T: SymTensor, beta) -> SymTensor:
    """Tensor of order ``k - |beta|`` with components ``T_{alpha + beta}``."""
    beta = np.asarray(beta, dtype=np.int64)
    s = int(beta.sum())
    if s > T.k:
        raise ValueError("slice order exceeds tensor order")
    alpha = mi.counted_indices(T.d, T.k - s)
    return SymTensor(T.d, T.k - s, T.components[mi.rank_many(alpha + beta[None, :])])


def restrict(T: SymTensor) -> SymTensor:
    """Drop every component that involves the last coordinate (dimension d - 1)."""
    if T.d < 2:
        raise ValueError("cannot restrict a one-dimensional tensor")
    sub = mi.counted_indices(T.d - 1, T.k)
    full = np.concatenate([sub, np.zeros((sub.shape[0], 1), dtype=np.int64)], axis=1)
    return SymTensor(T.d - 1, T.k, T.components[mi.rank_many(full)])


def extend(T: SymTensor) -> SymTensor:
    """Embed a tensor on ``C^(d-1)`` into ``C^d`` by zero."""
    sub = mi.counted_indices(T.d, T.k)
    full = np.concatenate([sub, np.zeros((sub.shape[0], 1), dtype=np.int64)], axis=1)
    out = np.zeros(mi.sym_dim(T.d + 1, T.k), dtype=complex)
    out[mi.rank_many(full)] = T.components
    return SymTensor(T.d + 1, T.k, out)


def id3_candidates(k: int, n: int) -> dict[str, float]:
    """Closed forms that could describe the id3 constant."""
    out = {}
    for fact_name, fact in (("n!", math.factorial(n)), ("n!^2", math.factorial(n) ** 2)):
        for denom_name, denom in (
            ("C(k+2n,n)", math.comb(k + 2 * n, n)),
            ("C(k+2n,2n)", math.comb(k + 2 * n, 2 * n)),
        ):
            value = math.comb(k + n, n) * fact * 2**n / math.factorial(2 * n) / denom
            out[f"C(k+n,n)*{fact_name}*2^n/(2n)!/{denom_name}"] = value
    return out


@lru_cache(maxsize=None)
def id3_constant(k: int, n: int, d: int = 3, seed: int = 0) -> float:
    """Constant ``c`` in ``(A (x) I2^n).(zeta^(k+n) (x) omega^n) = c (omega.zeta)^n (A.zeta^k)``.

    Measured with the ordered-index oracle on random data, never from a
    closed form.  The ratio is checked to be the same real number for
    several draws.
    """
    from . import oracle

    if d < 2:
        raise ValueError("need d >= 2 for an isotropic vector")
    if n == 0:
        return 1.0
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(3):
        q, _ = np.linalg.qr(rng.standard_normal((d, 2)))
        zeta = q[:, 0] + 1j * q[:, 1]
        omega = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        A = SymTensor.random(d, k, rng).dense()
        ratios.append(oracle.id3_ratio(A, zeta, omega, n))
    ratios = np.array(ratios)
    if np.ptp(ratios.real) > 1e-9 * abs(ratios[0]) or np.max(np.abs(ratios.imag)) > 1e-9:
        raise ArithmeticError(f"id3 ratio is not a constant for (k={k}, n={n}): {ratios}")
    return float(ratios[0].real)
