"""scikit-learn style wrappers.

Rows of ``X`` are symmetric tensors in counted storage.  The wrappers carry
no learned state beyond what the underlying routines compute, so ``fit`` is
cheap and ``transform`` is the actual work.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import multiindex as mi
from .recovery import jet_nullspace, predicted_value_space, principal_angles
from .structure import Decomposition, decompose_V_xi
from .symtensor import SymTensor


def _as_rows(X, n):
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[1] != n:
        raise ValueError(f"expected shape (n_samples, {n}), got {X.shape}")
    return X


class StructureDecomposer(TransformerMixin, BaseEstimator):
    """Split each row ``A`` into ``I2 (x) B + xi (x) C``.

    ``transform`` returns ``[B | C]`` components per row; ``inverse_transform``
    rebuilds ``A``.  ``residuals_`` holds the max-norm reconstruction error of
    the last call to ``transform``.
    """

    def __init__(self, d=3, k=2, xi=(0.0, 0.0, 1.0)):
        self.d = d
        self.k = k
        self.xi = xi

    def fit(self, X=None, y=None):
        if self.k < 1:
            raise ValueError("need k >= 1")
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape != (self.d,) or not np.linalg.norm(xi) > 0:
            raise ValueError("xi must be a nonzero vector of length d")
        self.xi_ = xi
        self.n_B_ = mi.sym_dim(self.d, self.k - 2) if self.k >= 2 else 0
        self.n_C_ = mi.sym_dim(self.d, self.k - 1)
        self.n_features_in_ = mi.sym_dim(self.d, self.k)
        return self

    def transform(self, X):
        check_is_fitted(self, "xi_")
        X = _as_rows(X, self.n_features_in_)
        out = np.zeros((X.shape[0], self.n_B_ + self.n_C_), dtype=complex)
        res = np.zeros(X.shape[0])
        for i, row in enumerate(X):
            dec = decompose_V_xi(SymTensor(self.d, self.k, row), self.xi_)
            if dec.B is not None:
                out[i, : self.n_B_] = dec.B.components
            out[i, self.n_B_ :] = dec.C.components
            res[i] = dec.residual
        self.residuals_ = res
        return out

    def inverse_transform(self, Z):
        check_is_fitted(self, "xi_")
        Z = _as_rows(Z, self.n_B_ + self.n_C_)
        rows = []
        for z in Z:
            B = SymTensor(self.d, self.k - 2, z[: self.n_B_]) if self.n_B_ else None
            C = SymTensor(self.d, self.k - 1, z[self.n_B_ :])
            rows.append(Decomposition(B, C, 0.0).reconstruct(self.xi_).components)
        return np.array(rows)


class JetValueProjector(TransformerMixin, BaseEstimator):
    """Orthogonal projector onto the value space allowed by the jet constraints.

    ``fit`` solves the constraint system once; ``transform`` projects rows of
    ``X`` (order-``k`` tensors) onto the recovered value space in the
    Frobenius geometry.
    """

    def __init__(self, d=3, k=2, R=1, xi=(0.0, 0.0, 1.0), seed=0):
        self.d = d
        self.k = k
        self.R = R
        self.xi = xi
        self.seed = seed

    def fit(self, X=None, y=None):
        xi = np.asarray(self.xi, dtype=float)
        res = jet_nullspace(self.d, self.k, self.R, xi, seed=self.seed)
        self.value_basis_ = res.value_basis
        self.value_dim_ = res.value_dim
        self.nullity_ = res.nullity
        self.n_features_in_ = mi.sym_dim(self.d, self.k)
        w = np.sqrt(mi.multiplicities(self.d, self.k))
        q, _ = np.linalg.qr(self.value_basis_ * w[:, None]) if self.value_dim_ else (np.zeros((len(w), 0)), None)
        self._weighted_q = q
        self._w = w
        return self

    def transform(self, X):
        check_is_fitted(self, "value_basis_")
        X = _as_rows(X, self.n_features_in_)
        q, w = self._weighted_q, self._w
        return ((X * w) @ q.conj() @ q.T) / w

    def predicted_angles(self):
        """Principal angles to the space ``xi^(s+1) (x) S^(k-s-1)``; ``None`` outside ``R < k <= 2R+1``."""
        check_is_fitted(self, "value_basis_")
        if not self.R < self.k <= 2 * self.R + 1:
            return None
        P = predicted_value_space(self.d, self.k, self.R, np.asarray(self.xi, dtype=float))
        return principal_angles(self.value_basis_, P, self.d, self.k)
