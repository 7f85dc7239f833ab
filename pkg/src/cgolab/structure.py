"""Isotropic vectors, the kernel condition ``A . zeta^k = 0`` and its structure.

``V`` is the set of ``zeta = a + i b`` with ``a, b`` orthonormal real vectors;
``V_xi`` adds ``zeta . xi = 0``.  A symmetric tensor killed by every
``zeta^k`` with ``zeta`` in ``V_xi`` has the form ``I2 (x) B + xi (x) C``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import multiindex as mi
from .symtensor import (
    SymTensor,
    extend,
    identity2,
    restrict,
    rotate,
    tensor_product,
)

RANK_RTOL = 1e-9
GAP_RATIO = 1e3


class RankGapError(RuntimeError):
    """Singular values do not separate cleanly at the rank threshold."""


@dataclass(frozen=True)
class IsotropicVector:
    value: np.ndarray
    xi: np.ndarray | None = None

    def __post_init__(self):
        v = np.array(self.value, dtype=complex).reshape(-1)
        v.setflags(write=False)
        object.__setattr__(self, "value", v)
        if self.xi is not None:
            x = np.array(self.xi, dtype=float).reshape(-1)
            x.setflags(write=False)
            object.__setattr__(self, "xi", x)

    @property
    def d(self) -> int:
        return self.value.shape[0]

    @property
    def re(self) -> np.ndarray:
        return self.value.real

    @property
    def im(self) -> np.ndarray:
        return self.value.imag

    def defects(self) -> dict[str, float]:
        """Violations of the defining constraints (all zero up to rounding)."""
        a, b = self.re, self.im
        out = {
            "re_dot_im": abs(float(a @ b)),
            "re_norm": abs(float(a @ a) - 1.0),
            "im_norm": abs(float(b @ b) - 1.0),
            "zeta_dot_zeta": abs(complex(self.value @ self.value)),
        }
        if self.xi is not None:
            out["zeta_dot_xi"] = abs(complex(self.value @ self.xi))
        return out

    def is_valid(self, tol: float = 1e-14) -> bool:
        return max(self.defects().values()) <= tol


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_V(d: int, seed=None) -> IsotropicVector:
    if d < 2:
        raise ValueError("V needs d >= 2")
    rng = _rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, 2)))
    # random orientation keeps the sample law closed under conjugation
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return IsotropicVector(q[:, 0] + 1j * sign * q[:, 1])


def sample_V_xi(xi, seed=None) -> IsotropicVector:
    xi = np.asarray(xi, dtype=float).reshape(-1)
    d = xi.shape[0]
    norm = np.linalg.norm(xi)
    if norm == 0:
        z = sample_V(d, seed)
        return IsotropicVector(z.value, xi)
    if d < 3:
        raise ValueError("V_xi needs d >= 3 when xi != 0")
    rng = _rng(seed)
    g = np.column_stack([xi / norm, rng.standard_normal((d, 2))])
    q, _ = np.linalg.qr(g)
    a, b = q[:, 1], q[:, 2]
    # remove the rounding-level xi component left by QR
    a = a - (a @ xi) * xi / norm**2
    b = b - (b @ xi) * xi / norm**2
    a /= np.linalg.norm(a)
    b -= (b @ a) * a
    b /= np.linalg.norm(b)
    if rng.random() < 0.5:
        b = -b
    return IsotropicVector(a + 1j * b, xi)


def sample_many(d: int, xi, n: int, seed=None) -> np.ndarray:
    """``n`` isotropic vectors as rows of a complex ``(n, d)`` array."""
    rng = _rng(seed)
    if xi is None:
        return np.array([sample_V(d, rng).value for _ in range(n)])
    return np.array([sample_V_xi(xi, rng).value for _ in range(n)])


def evaluation_matrix(zetas: np.ndarray, k: int) -> np.ndarray:
    """Rows ``mult * zeta^counts`` so that ``M @ A.components = A . zeta^k``."""
    zetas = np.atleast_2d(np.asarray(zetas, dtype=complex))
    d = zetas.shape[1]
    counts = mi.counted_indices(d, k)
    mult = mi.multiplicities(d, k)
    return np.prod(zetas[:, None, :] ** counts[None, :, :], axis=2) * mult


def kernel_test(A: SymTensor, xi=None, n_samples: int | None = None, tol: float = 1e-10, seed=0):
    """Check ``A . zeta^k = 0`` on sampled ``zeta``.

    Returns
    -------
    passed : bool
    deviation : float
        ``max |A . zeta^k|`` over the samples.
    """
    n = n_samples or 2 * mi.sym_dim(A.d, A.k) + 8
    zetas = sample_many(A.d, xi, n, seed)
    dev = float(np.max(np.abs(evaluation_matrix(zetas, A.k) @ A.components)))
    scale = A.max_norm()
    return bool(dev <= tol * max(scale, np.finfo(float).tiny)), dev


@dataclass
class Decomposition:
    B: SymTensor | None
    C: SymTensor | None
    residual: float

    def to_dict(self) -> dict:
        return {
            "B": None if self.B is None else self.B.to_dict(),
            "C": None if self.C is None else self.C.to_dict(),
            "residual": float(self.residual),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def reconstruct(self, xi=None) -> SymTensor:
        parts = []
        if self.B is not None:
            parts.append(tensor_product(identity2(self.B.d), self.B))
        if self.C is not None:
            parts.append(tensor_product(SymTensor(self.C.d, 1, xi), self.C))
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out


@lru_cache(maxsize=None)
def _lift_matrix(d: int, k: int, first: tuple | None):
    """Columns are ``first (x) E_r`` for the basis tensors ``E_r`` of order ``k``.

    ``first`` is ``None`` for ``I2``, otherwise a vector (as a tuple).
    """
    left = identity2(d) if first is None else SymTensor(d, 1, first)
    n = mi.sym_dim(d, k)
    cols = [tensor_product(left, SymTensor(d, k, np.eye(n)[r])).components for r in range(n)]
    return np.array(cols).T


def lstsq_structured(A: SymTensor, matrix: np.ndarray, order: int):
    """Frobenius least squares for ``A ~ matrix @ b``; returns (SymTensor, max-norm residual)."""
    w = np.sqrt(mi.multiplicities(A.d, A.k))
    sol, *_ = np.linalg.lstsq(matrix * w[:, None], A.components * w, rcond=None)
    fitted = matrix @ sol
    return SymTensor(A.d, order, sol), float(np.max(np.abs(A.components - fitted), initial=0.0))


def decompose_V(A: SymTensor) -> Decomposition:
    """Best ``B`` with ``A ~ I2 (x) B``."""
    if A.k < 1:
        raise ValueError("need k >= 1")
    if A.k == 1:
        return Decomposition(None, None, A.max_norm())
    B, res = lstsq_structured(A, _lift_matrix(A.d, A.k - 2, None), A.k - 2)
    return Decomposition(B, None, res)


def householder_to_last(xi_hat: np.ndarray) -> np.ndarray:
    """Orthogonal symmetric ``R`` with ``R xi_hat = e_d`` (so ``R^T e_d = xi_hat``)."""
    d = xi_hat.shape[0]
    e = np.zeros(d)
    e[-1] = 1.0
    v = e - xi_hat
    nv = v @ v
    if nv < 1e-30:
        return np.eye(d)
    return np.eye(d) - 2.0 * np.outer(v, v) / nv


def decompose_V_xi(A: SymTensor, xi) -> Decomposition:
    """Write ``A = I2 (x) B + xi (x) C`` following the rotation construction.

    After rotating ``xi`` to ``e_d`` the part of ``RA`` free of ``e_d`` is
    handled by :func:`decompose_V` one dimension down, and the rest is the
    ``e_d`` slice.  The residual is the max-norm of ``A - I2 (x) B - xi (x) C``.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != A.d:
        raise ValueError("xi has the wrong dimension")
    if A.k < 1:
        raise ValueError("need k >= 1")
    norm = np.linalg.norm(xi)
    if norm == 0:
        return decompose_V(A)
    d, k = A.d, A.k
    R = householder_to_last(xi / norm)
    RA = rotate(R, A)
    if d >= 3:
        sub = decompose_V(restrict(RA))
        B_rot = None if sub.B is None else extend(sub.B)
    else:
        B_rot = None
    Ct = RA if B_rot is None else RA - tensor_product(identity2(d), B_rot)
    # C_gamma = k / (1 + gamma_d) * Ct_{gamma + e_d}
    gam = mi.counted_indices(d, k - 1)
    shifted = gam.copy()
    shifted[:, -1] += 1
    C_rot = SymTensor(d, k - 1, k / (1.0 + gam[:, -1]) * Ct.components[mi.rank_many(shifted)])
    B = None if B_rot is None else rotate(R.T, B_rot)
    C = rotate(R.T, C_rot) / norm
    recon = tensor_product(SymTensor(d, 1, xi), C)
    if B is not None:
        recon = recon + tensor_product(identity2(d), B)
    return Decomposition(B, C, float(np.max(np.abs((A - recon).components))))


def _svd_rank(M: np.ndarray, rtol: float = RANK_RTOL, gap: float = GAP_RATIO):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    r = int(np.sum(s > rtol * s[0]))
    if 0 < r < s.size:
        ratio = s[r - 1] / max(s[r], np.finfo(float).tiny)
        if ratio < gap:
            raise RankGapError(f"no clear gap at rank {r}: ratio {ratio:.3g}")
    return r, s


def constraint_matrix(k: int, d: int, xi=None, n_samples: int | None = None, seed=0) -> np.ndarray:
    n = n_samples or 2 * mi.sym_dim(d, k) + 8
    return evaluation_matrix(sample_many(d, xi, n, seed), k)


def constraint_rank(k: int, d: int, xi=None, n_samples: int | None = None, tol: float = RANK_RTOL, seed=0) -> int:
    """Number of independent conditions ``A . zeta^k = 0`` over sampled ``zeta``."""
    need = 2 * mi.sym_dim(d, k)
    n = n_samples or need + 8
    if n < need:
        raise ValueError(f"need at least {need} samples, got {n}")
    M = constraint_matrix(k, d, xi, n, seed)
    # The sample set is closed under conjugation in law, so real and complex ranks agree.
    r, _ = _svd_rank(np.vstack([M.real, M.imag]), tol)
    return r


def kernel_basis(k: int, d: int, xi=None, n_samples: int | None = None, tol: float = RANK_RTOL, seed=0):
    """Orthonormal basis (columns) of the sampled kernel of ``A -> A . zeta^k``."""
    M = constraint_matrix(k, d, xi, n_samples, seed)
    r, _ = _svd_rank(M, tol)
    _, _, vh = np.linalg.svd(M)
    return vh[r:].conj().T


def structured_dim(k: int, d: int, xi=None) -> int:
    """Dimension of ``{I2 (x) B + xi (x) C}``, read off from the parametrization."""
    cols = []
    if k >= 2:
        cols.append(_lift_matrix(d, k - 2, None))
    if xi is not None and np.linalg.norm(xi) > 0 and k >= 1:
        cols.append(_lift_matrix(d, k - 1, tuple(np.asarray(xi, dtype=float))))
    if not cols:
        return 0
    w = np.sqrt(mi.multiplicities(d, k))
    r, _ = _svd_rank(np.hstack(cols) * w[:, None])
    return r
