"""Ordered and counted multiindices.

An *ordered* index ``alpha = (alpha_1, ..., alpha_k)`` picks one coordinate
(1-based) per tensor slot.  A *counted* index stores how often each
coordinate occurs, ``counts[j] = #{l : alpha_l = j + 1}``.  Symmetric tensors
only depend on the counted image, so dense symmetric storage is indexed by
the rank of a counted index.

Counted indices of a fixed degree are ordered colexicographically on the
counts vector: the last differing entry decides.  For ``d = 2, k = 2`` this
gives ``(2, 0) < (1, 1) < (0, 2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

INT64_MAX = 2**63 - 1


def _checked(value: int, what: str) -> int:
    if value > INT64_MAX:
        raise OverflowError(f"{what} = {value} does not fit in a signed 64-bit integer")
    return value


def binom(n: int, r: int) -> int:
    """Binomial coefficient, zero outside ``0 <= r <= n``."""
    if n < 0 or r < 0 or r > n:
        return 0
    return math.comb(n, r)


@dataclass(frozen=True)
class OrderedIndex:
    entries: tuple[int, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.d < 1:
            raise ValueError("dimension d must be >= 1")
        for e in self.entries:
            if not 1 <= e <= self.d:
                raise ValueError(f"entry {e} outside [1, {self.d}]")

    def __len__(self):
        return len(self.entries)

    @property
    def order(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CountedIndex:
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) < 1:
            raise ValueError("a counted index needs d >= 1 slots")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @property
    def d(self) -> int:
        return len(self.counts)

    @property
    def degree(self) -> int:
        return sum(self.counts)

    def to_json(self) -> str:
        return json.dumps(list(self.counts))

    @classmethod
    def from_json(cls, text: str) -> "CountedIndex":
        return cls(tuple(json.loads(text)))


def sym_dim(d: int, k: int) -> int:
    """Dimension of S^k(C^d), i.e. C(k + d - 1, d - 1)."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    return _checked(math.comb(k + d - 1, d - 1), f"sym_dim({d}, {k})")


def poly_dim_le(d: int, k: int) -> int:
    """Number of monomials of degree <= k in d variables, C(k + d, d)."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    return _checked(math.comb(k + d, d), f"poly_dim_le({d}, {k})")


def ordered_to_counted(alpha, d: int) -> CountedIndex:
    entries = alpha.entries if isinstance(alpha, OrderedIndex) else tuple(alpha)
    counts = [0] * d
    for e in entries:
        if not 1 <= e <= d:
            raise ValueError(f"entry {e} outside [1, {d}]")
        counts[e - 1] += 1
    return CountedIndex(tuple(counts))


def multiplicity(counts) -> int:
    """Number of ordered indices with the given counted image, k!/prod(c_j!)."""
    c = counts.counts if isinstance(counts, CountedIndex) else tuple(counts)
    value = math.factorial(sum(c))
    for ci in c:
        value //= math.factorial(ci)
    return _checked(value, "multiplicity")


def concat(a: OrderedIndex, b: OrderedIndex) -> OrderedIndex:
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    return OrderedIndex(a.entries + b.entries, a.d)


@lru_cache(maxsize=None)
def _table(d: int, k: int) -> tuple[tuple[tuple[int, ...], ...], dict]:
    items = []
    for combo in combinations_with_replacement(range(d), k):
        counts = [0] * d
        for c in combo:
            counts[c] += 1
        items.append(tuple(counts))
    items.sort(key=lambda c: c[::-1])
    return tuple(items), {c: r for r, c in enumerate(items)}


def counted_indices(d: int, k: int) -> np.ndarray:
    """All counted indices of degree k, shape (sym_dim(d, k), d), in rank order."""
    items, _ = _table(d, k)
    return np.array(items, dtype=np.int64).reshape(len(items), d)


def rank(counts) -> int:
    c = counts.counts if isinstance(counts, CountedIndex) else tuple(int(x) for x in counts)
    _, lookup = _table(len(c), sum(c))
    return lookup[c]


def unrank(d: int, k: int, r: int) -> CountedIndex:
    items, _ = _table(d, k)
    if not 0 <= r < len(items):
        raise IndexError(f"rank {r} outside [0, {len(items)})")
    return CountedIndex(items[r])


@lru_cache(maxsize=None)
def _key_sorter(d: int, k: int):
    weights = (k + 1) ** np.arange(d, dtype=np.int64)
    keys = counted_indices(d, k) @ weights
    order = np.argsort(keys)
    return weights, keys[order], order


def rank_many(counts: np.ndarray) -> np.ndarray:
    """Vectorized :func:`rank` for an integer array whose last axis has length d.

    All rows must share one degree.
    """
    counts = np.asarray(counts, dtype=np.int64)
    d = counts.shape[-1]
    flat = counts.reshape(-1, d)
    if flat.shape[0] == 0:
        return np.zeros(counts.shape[:-1], dtype=np.int64)
    k = int(flat[0].sum())
    weights, sorted_keys, order = _key_sorter(d, k)
    pos = np.searchsorted(sorted_keys, flat @ weights)
    return order[pos].reshape(counts.shape[:-1])


@lru_cache(maxsize=None)
def multiplicities(d: int, k: int) -> np.ndarray:
    """Multiplicity of every counted index of degree k, in rank order."""
    out = np.array([multiplicity(c) for c in _table(d, k)[0]], dtype=np.float64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def ordered_rank_map(d: int, k: int) -> np.ndarray:
    """Array of shape (d,)*k giving the rank of each ordered index's counted image."""
    if k == 0:
        out = np.zeros((), dtype=np.int64)
    else:
        grids = np.indices((d,) * k).reshape(k, -1)
        counts = np.zeros((grids.shape[1], d), dtype=np.int64)
        for axis in range(k):
            np.add.at(counts, (np.arange(grids.shape[1]), grids[axis]), 1)
        out = rank_many(counts).reshape((d,) * k)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def representatives(d: int, k: int) -> tuple[np.ndarray, ...]:
    """One (sorted) ordered index per counted index, as a tuple of k index arrays."""
    idx = counted_indices(d, k)
    rows = [np.repeat(np.arange(d), row) for row in idx]
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), k)
    return tuple(arr[:, axis] for axis in range(k))
