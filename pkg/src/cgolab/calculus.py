"""Exact calculus on amplitudes ``p(x) exp(-i x.xi)``.

``D_j = (1/i) d/dx_j`` throughout, so ``D_j exp(-i x.xi) = -xi_j exp(-i x.xi)``.
The conjugated operator is

    P(hD)^m + h^(2m) sum_k sum_j h^(-j) C(k, j) A^(k) . (zeta^j (x) D^(k-j))

with ``P(hD) = -h^2 Laplace + 2 h zeta.D``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .symtensor import SymTensor, contract, tensor_power

_PRUNE = 0.0


class PolyPlaneWave:
    """Finite sum ``sum_beta c_beta x^beta exp(-i x.xi)``.

    ``terms`` maps exponent tuples (length d) to complex coefficients.  Exact
    zeros are dropped on construction.
    """

    __slots__ = ("xi", "terms")

    def __init__(self, xi, terms=None):
        xi = np.array(xi, dtype=float).reshape(-1)
        xi.setflags(write=False)
        self.xi = xi
        clean = {}
        for key, val in (terms or {}).items():
            key = tuple(int(e) for e in key)
            if len(key) != xi.shape[0] or min(key, default=0) < 0:
                raise ValueError(f"bad exponent {key} for d={xi.shape[0]}")
            val = complex(val)
            if abs(val) > _PRUNE:
                clean[key] = clean.get(key, 0j) + val
        self.terms = {k: v for k, v in clean.items() if abs(v) > _PRUNE}

    @property
    def d(self) -> int:
        return self.xi.shape[0]

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def __repr__(self):
        return f"PolyPlaneWave(xi={self.xi.tolist()}, terms={self.terms})"

    @classmethod
    def constant(cls, xi, value=1.0):
        xi = np.asarray(xi, dtype=float).reshape(-1)
        return cls(xi, {(0,) * xi.shape[0]: value})

    @classmethod
    def linear_power(cls, omega, r: int, xi=None):
        """``(omega.x)^r exp(-i x.xi)``, ``omega`` possibly complex."""
        omega = np.asarray(omega, dtype=complex).reshape(-1)
        d = omega.shape[0]
        xi = np.zeros(d) if xi is None else xi
        counts = mi.counted_indices(d, r)
        mult = mi.multiplicities(d, r)
        coeffs = mult * np.prod(omega[None, :] ** counts, axis=1)
        return cls(xi, {tuple(c): v for c, v in zip(counts, coeffs)})

    def _same_phase(self, other):
        if not np.array_equal(self.xi, other.xi):
            raise ValueError("plane-wave frequencies differ")

    def __add__(self, other):
        self._same_phase(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + v
        return PolyPlaneWave(self.xi, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, s):
        s = complex(s)
        return PolyPlaneWave(self.xi, {k: s * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.terms.values())

    def max_coeff(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def D(self, j: int) -> "PolyPlaneWave":
        """``D_j`` with 0-based coordinate ``j``."""
        out = {}
        xj = self.xi[j]
        for key, c in self.terms.items():
            if key[j] > 0:
                low = list(key)
                low[j] -= 1
                low = tuple(low)
                out[low] = out.get(low, 0j) - 1j * key[j] * c
            if xj != 0.0:
                out[key] = out.get(key, 0j) - xj * c
        return PolyPlaneWave(self.xi, out)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        total = np.zeros(x.shape[0], dtype=complex)
        for key, c in self.terms.items():
            total += c * np.prod(x ** np.array(key), axis=1)
        total *= np.exp(-1j * (x @ self.xi))
        return total[0] if single else total

    def gradient(self, x) -> np.ndarray:
        """Ordinary gradient (not ``D``) at the points ``x``."""
        return np.stack([1j * self.D(j).evaluate(x) for j in range(self.d)], axis=-1)

    def to_dict(self) -> dict:
        items = sorted(self.terms.items())
        return {
            "xi": self.xi.tolist(),
            "terms": [{"exponent": list(k), "coeff": [v.real, v.imag]} for k, v in items],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj):
        return cls(
            obj["xi"],
            {tuple(t["exponent"]): complex(t["coeff"][0], t["coeff"][1]) for t in obj["terms"]},
        )


def zero_like(a: PolyPlaneWave) -> PolyPlaneWave:
    return PolyPlaneWave(a.xi)


def apply_D(a: PolyPlaneWave, alpha) -> PolyPlaneWave:
    """``D^alpha a`` for an ordered index with 1-based entries."""
    entries = alpha.entries if isinstance(alpha, mi.OrderedIndex) else tuple(alpha)
    out = a
    for e in entries:
        if not 1 <= e <= a.d:
            raise ValueError(f"entry {e} outside [1, {a.d}]")
        out = out.D(e - 1)
    return out


def apply_D_counted(a: PolyPlaneWave, counts) -> PolyPlaneWave:
    out = a
    for j, c in enumerate(counts):
        for _ in range(int(c)):
            out = out.D(j)
    return out


def zeta_dot_D(a: PolyPlaneWave, zeta) -> PolyPlaneWave:
    zeta = np.asarray(zeta, dtype=complex)
    out = zero_like(a)
    for j in range(a.d):
        if zeta[j] != 0:
            out = out + zeta[j] * a.D(j)
    return out


def sum_D_squared(a: PolyPlaneWave) -> PolyPlaneWave:
    """``sum_j D_j^2 a = -Laplace a``."""
    out = zero_like(a)
    for j in range(a.d):
        out = out + a.D(j).D(j)
    return out


def transport_residual(a: PolyPlaneWave, zeta, r: int) -> PolyPlaneWave:
    """``(zeta.D)^(r+1) a``."""
    if r < 0:
        raise ValueError("need r >= 0")
    z = getattr(zeta, "value", zeta)
    out = a
    for _ in range(r + 1):
        out = zeta_dot_D(out, z)
    return out


def p_power_expansion(a: PolyPlaneWave, zeta, m: int) -> dict[int, PolyPlaneWave]:
    """``P(hD)^m a`` grouped by powers of ``h``.

    The binomial term with ``k`` factors of ``2 h zeta.D`` carries ``h^(2m-k)``.
    """
    z = getattr(zeta, "value", zeta)
    out = {}
    zd = a
    for k in range(m + 1):
        term = zd
        for _ in range(m - k):
            term = sum_D_squared(term)
        term = (math.comb(m, k) * 2**k) * term
        if not term.is_zero():
            out[2 * m - k] = term
        zd = zeta_dot_D(zd, z)
    return out


def apply_P_power(a: PolyPlaneWave, zeta, h: float, m: int = 1) -> PolyPlaneWave:
    if h <= 0:
        raise ValueError("need h > 0")
    out = zero_like(a)
    for p, term in p_power_expansion(a, zeta, m).items():
        out = out + (h**p) * term
    return out


def derivative_sum(T: SymTensor, a: PolyPlaneWave) -> PolyPlaneWave:
    """``T . D^n a`` for a symmetric order-``n`` tensor ``T``.

    Derivatives commute, so the ordered sum collapses to counted indices
    weighted by multiplicity.
    """
    out = zero_like(a)
    counts = mi.counted_indices(T.d, T.k)
    mult = mi.multiplicities(T.d, T.k)
    for c, w, t in zip(counts, mult, T.components):
        if t != 0:
            out = out + (w * t) * apply_D_counted(a, c)
    return out


def conjugated_term(A: SymTensor, zeta, h: float, j: int, a: PolyPlaneWave, m: int) -> PolyPlaneWave:
    """``h^(2m-j) C(k, j) A . (zeta^j (x) D^(k-j)) a``."""
    k = A.k
    if not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got j={j}, k={k}")
    z = getattr(zeta, "value", zeta)
    T = contract(A, tensor_power(z, j))
    return (h ** (2 * m - j) * math.comb(k, j)) * derivative_sum(T, a)


@dataclass
class OperatorCoefficients:
    """Lower-order coefficients ``A^(0), ..., A^(m)`` of ``(-Laplace)^m + sum A^(k).D^k``.

    Missing orders are ``None`` and mean zero.
    """

    m: int
    coeffs: list = field(default_factory=list)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need m >= 1")
        coeffs = list(self.coeffs) + [None] * (self.m + 1 - len(self.coeffs))
        if len(coeffs) != self.m + 1:
            raise ValueError("more coefficient orders than m + 1")
        for k, A in enumerate(coeffs):
            if A is not None and A.k != k:
                raise ValueError(f"coefficient in slot {k} has order {A.k}")
        self.coeffs = coeffs

    def __getitem__(self, k):
        return self.coeffs[k]

    def present(self):
        return [(k, A) for k, A in enumerate(self.coeffs) if A is not None]


def conjugated_operator(coeffs: OperatorCoefficients, zeta, h: float, a: PolyPlaneWave) -> PolyPlaneWave:
    """``exp(-i x.zeta/h) h^(2m) L (exp(i x.zeta/h) a)`` for constant coefficients."""
    m = coeffs.m
    out = apply_P_power(a, zeta, h, m)
    for k, A in coeffs.present():
        if not isinstance(A, SymTensor):
            raise TypeError("symbolic conjugation needs constant SymTensor coefficients")
        for j in range(k + 1):
            out = out + conjugated_term(A, zeta, h, j, a, m)
    return out


def conjugation_oracle(coeffs: OperatorCoefficients, zeta, h: float, a: PolyPlaneWave, x, dps: int = 40) -> complex:
    """Pointwise conjugated operator from high-precision numerical derivatives.

    Independent of the symbolic expansion: it differentiates the full
    function ``exp(i x.zeta/h) a(x)`` with :func:`mpmath.diff`.
    """
    import mpmath

    z = np.asarray(getattr(zeta, "value", zeta), dtype=complex)
    d = a.d
    m = coeffs.m
    with mpmath.workdps(dps):
        zm = [mpmath.mpc(c.real, c.imag) for c in z]
        xim = [mpmath.mpf(float(v)) for v in a.xi]
        terms = [(tuple(k), mpmath.mpc(v.real, v.imag)) for k, v in a.terms.items()]
        hm = mpmath.mpf(h)

        def u(*xs):
            poly = mpmath.mpf(0)
            for key, c in terms:
                mon = c
                for xv, e in zip(xs, key):
                    mon *= xv**e
                poly += mon
            phase = sum(xs[i] * (zm[i] / hm - xim[i]) for i in range(d))
            return mpmath.exp(1j * phase) * poly

        x0 = [mpmath.mpf(float(v)) for v in x]

        def partial(counts):
            return mpmath.diff(u, x0, tuple(int(c) for c in counts))

        total = mpmath.mpc(0)
        # (-Laplace)^m = (-1)^m sum_{|b|=m} m!/b! d^{2b}
        for c, w in zip(mi.counted_indices(d, m), mi.multiplicities(d, m)):
            total += (-1) ** m * int(w) * partial(2 * c)
        for k, A in coeffs.present():
            for c, w, t in zip(mi.counted_indices(d, k), mi.multiplicities(d, k), A.components):
                if t != 0:
                    total += int(w) * mpmath.mpc(t.real, t.imag) * (-1j) ** k * partial(c)
        total *= mpmath.exp(-1j * sum(x0[i] * zm[i] / hm for i in range(d))) * hm ** (2 * m)
        return complex(total)


def transpose_coefficients(coeffs: OperatorCoefficients) -> OperatorCoefficients:
    """Coefficients of the transposed operator.

    ``At^(k) = sum_{j>=k} (-1)^j C(j, k) D^(j-k) . A^(j)``.  A constant
    :class:`SymTensor` has vanishing derivatives.  Coefficient fields must
    provide ``contract_xi(p)`` (the Fourier-side factor ``. xi^p``), ``+`` and
    scalar ``*``.
    """
    m = coeffs.m
    out = [None] * (m + 1)
    for k in range(m + 1):
        acc = None
        for j in range(k, m + 1):
            A = coeffs[j]
            if A is None:
                continue
            p = j - k
            if isinstance(A, SymTensor):
                if p:
                    continue
                term = A
            else:
                if not hasattr(A, "contract_xi"):
                    raise TypeError(f"coefficient of type {type(A).__name__} cannot be differentiated")
                term = A.contract_xi(p) if p else A
            term = ((-1) ** j * math.comb(j, k)) * term
            if acc is None:
                acc = term
            elif isinstance(acc, SymTensor) != isinstance(term, SymTensor):
                raise TypeError("cannot mix constant and field coefficients in one order")
            else:
                acc = acc + term
        out[k] = acc
    return OperatorCoefficients(m, out)
