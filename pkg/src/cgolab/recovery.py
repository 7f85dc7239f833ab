"""Fourier-side coefficient recovery.

Coefficient differences are modelled by smooth tensor fields on the Fourier
side, ``A_hat(xi) = sum_terms P(xi) exp(-|xi - c|^2 / (2 w^2))`` with ``P`` a
polynomial with :class:`SymTensor` coefficients.  This is a rapidly decaying
stand-in for compact support: the recovery arguments only use smoothness of
``A_hat`` at the point ``xi``.

Pairings follow ``<f, exp(-i x.xi)> = f_hat(xi)`` with
``f_hat(xi) = int f(x) exp(-i x.xi) dx``, hence

    int f(x) (omega.x)^q exp(-i x.xi) dx = i^q (omega.grad)^q f_hat(xi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import subspace_angles

from . import multiindex as mi
from .calculus import PolyPlaneWave, apply_D_counted
from .structure import (
    IsotropicVector,
    decompose_V_xi,
    kernel_test,
    lstsq_structured,
    sample_V_xi,
)
from .symtensor import SymTensor, dot, slice_counted, tensor_power, tensor_product


# --------------------------------------------------------------------------
# tensor-valued polynomials in xi
# --------------------------------------------------------------------------

def _poly_directional(poly: dict, omega: np.ndarray) -> dict:
    """``(omega.grad) P`` for ``P = {exponent: components}``."""
    out = {}
    for key, comp in poly.items():
        for j, e in enumerate(key):
            if e == 0 or omega[j] == 0:
                continue
            low = list(key)
            low[j] -= 1
            low = tuple(low)
            out[low] = out.get(low, 0) + (e * omega[j]) * comp
    return out


def _poly_eval(poly: dict, x: np.ndarray, n: int) -> np.ndarray:
    total = np.zeros(n, dtype=complex)
    for key, comp in poly.items():
        total = total + np.prod(x ** np.array(key)) * comp
    return total


def _gauss_derivative_polys(r: int, q: complex) -> list[np.ndarray]:
    """``p_n(u)`` with ``(omega.grad)^n env = p_n(u) env`` and ``u = omega.(xi - c) / w^2``.

    ``p_0 = 1`` and ``p_(n+1) = q p_n' - u p_n`` where ``q = omega.omega / w^2``.
    """
    polys = [np.array([1.0 + 0j])]
    for _ in range(r):
        p = polys[-1]
        nxt = npoly.polysub(q * npoly.polyder(p), npoly.polymulx(p))
        polys.append(np.atleast_1d(nxt))
    return polys


@dataclass
class GaussianTerm:
    center: np.ndarray
    width: float
    poly: dict  # exponent tuple -> components (length sym_dim(d, k))


@dataclass
class CoefficientField:
    """Order-``k`` tensor field ``xi -> A_hat(xi)`` given in closed form."""

    d: int
    k: int
    terms: list = field(default_factory=list)

    def _n(self):
        return mi.sym_dim(self.d, self.k)

    # -- construction ------------------------------------------------------
    @classmethod
    def zero(cls, d, k):
        return cls(d, k, [])

    @classmethod
    def from_tensor(cls, T: SymTensor, center, width=1.0):
        """``T * exp(-|xi - center|^2 / (2 width^2))``."""
        d = T.d
        return cls(d, T.k, [GaussianTerm(np.asarray(center, float), float(width), {(0,) * d: T.components.copy()})])

    @classmethod
    def xi_power_times(cls, p: int, B: SymTensor, center, width=1.0):
        """``xi^p (x) B`` times a Gaussian envelope."""
        d = B.d
        poly = {}
        for r, delta in enumerate(mi.counted_indices(d, p)):
            e = np.zeros(mi.sym_dim(d, p), dtype=complex)
            e[r] = 1.0
            poly[tuple(int(v) for v in delta)] = tensor_product(SymTensor(d, p, e), B).components
        return cls(d, p + B.k, [GaussianTerm(np.asarray(center, float), float(width), poly)])

    @classmethod
    def random(cls, d, k, rng, n_terms=1, degree=1, center_scale=1.0, width=1.0):
        terms = []
        n = mi.sym_dim(d, k)
        for _ in range(n_terms):
            poly = {}
            for deg in range(degree + 1):
                for c in mi.counted_indices(d, deg):
                    poly[tuple(int(v) for v in c)] = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / (1 + deg)
            center = center_scale * rng.uniform(-1, 1, d)
            terms.append(GaussianTerm(center, width, poly))
        return cls(d, k, terms)

    # -- algebra -----------------------------------------------------------
    def __add__(self, other):
        if (self.d, self.k) != (other.d, other.k):
            raise ValueError("shape mismatch")
        return CoefficientField(self.d, self.k, list(self.terms) + list(other.terms))

    def __mul__(self, s):
        s = complex(s)
        return CoefficientField(
            self.d,
            self.k,
            [GaussianTerm(t.center, t.width, {e: s * c for e, c in t.poly.items()}) for t in self.terms],
        )

    __rmul__ = __mul__

    def contract_xi(self, p: int) -> "CoefficientField":
        """Field ``xi -> A_hat(xi) . xi^p`` of order ``k - p``."""
        if p > self.k:
            raise ValueError("contraction order exceeds field order")
        betas = mi.counted_indices(self.d, p)
        mult = mi.multiplicities(self.d, p)
        terms = []
        for t in self.terms:
            poly = {}
            for key, comp in t.poly.items():
                T = SymTensor(self.d, self.k, comp)
                for beta, w in zip(betas, mult):
                    new = tuple(int(a + b) for a, b in zip(key, beta))
                    poly[new] = poly.get(new, 0) + w * slice_counted(T, beta).components
            terms.append(GaussianTerm(t.center, t.width, poly))
        return CoefficientField(self.d, self.k - p, terms)

    def scalar_field(self, T: SymTensor) -> "CoefficientField":
        """Order-0 field ``A_hat . T``."""
        if T.k != self.k:
            raise ValueError("order mismatch")
        terms = []
        for t in self.terms:
            poly = {e: np.array([dot(SymTensor(self.d, self.k, c), T)]) for e, c in t.poly.items()}
            terms.append(GaussianTerm(t.center, t.width, poly))
        return CoefficientField(self.d, 0, terms)

    # -- evaluation --------------------------------------------------------
    def directional(self, xi, omega, r: int = 0) -> SymTensor:
        """``(omega.grad)^r A_hat(xi)``, exact (``omega`` may be complex)."""
        if r < 0:
            raise ValueError("need r >= 0")
        xi = np.asarray(xi, dtype=float)
        omega = np.asarray(omega, dtype=complex)
        n = self._n()
        total = np.zeros(n, dtype=complex)
        for t in self.terms:
            w2 = t.width**2
            y = xi - t.center
            env = math.exp(-float(y @ y) / (2 * w2))
            u = complex(omega @ y) / w2
            q = complex(omega @ omega) / w2
            gp = _gauss_derivative_polys(r, q)
            dpoly = t.poly
            for i in range(r + 1):
                if i:
                    dpoly = _poly_directional(dpoly, omega)
                if not dpoly:
                    break
                val = _poly_eval(dpoly, xi, n)
                total += math.comb(r, i) * npoly.polyval(u, gp[r - i]) * env * val
        return SymTensor(self.d, self.k, total)

    def value(self, xi) -> SymTensor:
        return self.directional(xi, np.zeros(self.d), 0)

    def grid_values(self, points: np.ndarray) -> np.ndarray:
        """Components at many points, shape ``(npts, sym_dim)``."""
        pts = np.asarray(points, dtype=float)
        out = np.zeros((pts.shape[0], self._n()), dtype=complex)
        for t in self.terms:
            y = pts - t.center
            env = np.exp(-np.sum(y * y, axis=1) / (2 * t.width**2))
            for key, comp in t.poly.items():
                mon = np.prod(pts ** np.array(key), axis=1)
                out += (mon * env)[:, None] * comp[None, :]
        return out


def eval_field(F: CoefficientField, xi, omega, r: int = 0) -> SymTensor:
    return F.directional(xi, omega, r)


# --------------------------------------------------------------------------
# main equation
# --------------------------------------------------------------------------

def _check_zeta(zeta, xi, tol=1e-12) -> np.ndarray:
    z = np.asarray(getattr(zeta, "value", zeta), dtype=complex)
    iv = IsotropicVector(z, xi)
    if not iv.is_valid(tol):
        raise ValueError(f"zeta is not in V_xi: {iv.defects()}")
    return z


def _field_at(coeffs, k):
    if k < len(coeffs):
        return coeffs[k]
    return None


def main_equation_value(coeffs, j, xi, zeta, omega, r1, r2, k0=None) -> complex:
    """``sum_k C(k+j, j) <A^(k+j) . (zeta^j (x) D^k)(omega.x)^r1, (omega.x)^r2 exp(-i x.xi)>``.

    ``coeffs[k]`` is the order-``k`` :class:`CoefficientField` or ``None``.
    """
    xi = np.asarray(xi, dtype=float)
    z = _check_zeta(zeta, xi)
    omega = np.asarray(omega, dtype=complex)
    k0 = len(coeffs) - 1 if k0 is None else k0
    if not 0 <= j <= k0:
        raise ValueError("need 0 <= j <= k0")
    total = 0j
    zj = tensor_power(z, j)
    for k in range(0, min(k0 - j, r1) + 1):
        F = _field_at(coeffs, k + j)
        if F is None:
            continue
        q = r1 - k + r2
        # D^k (omega.x)^r1 = (-i)^k r1!/(r1-k)! (omega.x)^(r1-k) omega^k
        weight = math.comb(k + j, j) * (-1j) ** k * math.factorial(r1) / math.factorial(r1 - k)
        T = tensor_product(zj, tensor_power(omega, k))
        total += weight * (1j) ** q * dot(F.directional(xi, omega, q), T)
    return complex(total)


def _centered_grid(d, N, L):
    x1 = -L / 2 + L * np.arange(N) / N
    eta1 = 2 * np.pi * np.fft.fftfreq(N, d=L / N)
    return x1, eta1


def quadrature_main_equation(coeffs, j, xi, zeta, omega, r1, r2, k0=None, N=72, L=18.0) -> complex:
    """The same pairing computed in physical space on a periodic grid.

    Each coefficient is synthesized by an inverse FFT of its Fourier samples;
    ``D^k a_1`` comes from the symbolic amplitude; the pairing is a plain
    Riemann sum.  No Fourier-duality formula is used.
    """
    xi = np.asarray(xi, dtype=float)
    z = np.asarray(getattr(zeta, "value", zeta), dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    k0 = len(coeffs) - 1 if k0 is None else k0
    d = xi.shape[0]
    x1, eta1 = _centered_grid(d, N, L)
    eta = np.stack(np.meshgrid(*([eta1] * d), indexing="ij"), axis=-1).reshape(-1, d)
    X = np.stack(np.meshgrid(*([x1] * d), indexing="ij"), axis=-1).reshape(-1, d)
    phase = np.exp(-1j * (L / 2) * eta.sum(axis=1))
    deta = 2 * np.pi / L
    dx = L / N
    a1 = PolyPlaneWave.linear_power(omega, r1)
    a2 = PolyPlaneWave.linear_power(omega, r2, xi).evaluate(X)
    total = 0j
    zj = tensor_power(z, j)
    for k in range(0, k0 - j + 1):
        F = _field_at(coeffs, k + j)
        if F is None:
            continue
        # order-k field A_hat . zeta^j, then to physical space
        vals = F.grid_values(eta)
        if j:
            src, mult = _contract_src(d, k + j, j)
            vals = vals[:, src] @ (mult * zj.components)
        vals = vals * phase[:, None]
        phys = np.empty_like(vals)
        for c in range(vals.shape[1]):
            phys[:, c] = np.fft.ifftn(vals[:, c].reshape((N,) * d)).reshape(-1)
        phys *= N**d * (deta / (2 * np.pi)) ** d
        counts = mi.counted_indices(d, k)
        mult_k = mi.multiplicities(d, k)
        integrand = np.zeros(X.shape[0], dtype=complex)
        for c, (beta, w) in enumerate(zip(counts, mult_k)):
            Da = apply_D_counted(a1, beta)
            if Da.is_zero():
                continue
            integrand += w * phys[:, c] * Da.evaluate(X)
        total += math.comb(k + j, j) * np.sum(integrand * a2) * dx**d
    return complex(total)


def _contract_src(d, k, j):
    from .symtensor import _contract_plan

    return _contract_plan(d, k, j)


# --------------------------------------------------------------------------
# pieces (induction on the order)
# --------------------------------------------------------------------------

def piece_direct(F: CoefficientField, j, r, xi, zeta, omega) -> complex:
    """``<A^(l) . (zeta^j (x) omega^(l-j)), (omega.x)^r exp(-i x.xi)>`` for ``l = F.k``."""
    z = np.asarray(getattr(zeta, "value", zeta), dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    T = tensor_product(tensor_power(z, j), tensor_power(omega, F.k - j))
    return complex((1j) ** r * dot(F.directional(xi, omega, r), T))


@dataclass
class PiecesReport:
    values: dict  # (l, j, r) -> complex
    step_discrepancy: float
    scale: float

    def max_abs(self) -> float:
        return max((abs(v) for v in self.values.values()), default=0.0)


def reduce_to_pieces(coeffs, k0, R, xi, zeta, omega) -> PiecesReport:
    """Pieces recovered from main-equation values by induction on the order.

    Base: ``a_1 = 1`` isolates ``l = j``.  Step to ``l = k + 1`` uses
    ``a_1 = (omega.x)^(k+1-j)``; the lower-order pieces are already known and
    the new one is solved for.  Each recovered piece is compared with a
    direct evaluation.
    """
    if R < 0:
        raise ValueError("need R >= 0")
    if k0 > len(coeffs) - 1:
        raise ValueError("k0 exceeds the number of coefficient orders")
    xi = np.asarray(xi, dtype=float)
    _check_zeta(zeta, xi)
    vals = {}
    worst = 0.0
    scale = 0.0

    def direct(l, j, r):
        F = _field_at(coeffs, l)
        return 0j if F is None else piece_direct(F, j, r, xi, zeta, omega)

    for j in range(k0 + 1):
        for r in range(R + 1):
            vals[(j, j, r)] = main_equation_value(coeffs, j, xi, zeta, omega, 0, r, k0)
        for k in range(j, k0):
            top = k + 1
            for r in range(R - (top - j) + 1):
                M = main_equation_value(coeffs, j, xi, zeta, omega, top - j, r, k0)
                rest = 0j
                for l in range(j, top):
                    w = math.comb(l, j) * (-1j) ** (l - j) * math.factorial(top - j) / math.factorial(top - l)
                    rest += w * vals[(l, j, r + top - l)]
                lead = math.comb(top, j) * (-1j) ** (top - j) * math.factorial(top - j)
                vals[(top, j, r)] = (M - rest) / lead
    for key, v in vals.items():
        ref = direct(*key)
        worst = max(worst, abs(v - ref))
        scale = max(scale, abs(ref))
    return PiecesReport(vals, worst, scale)


def main_equation_table(coeffs, k0, R, xi, zeta, omega) -> dict:
    """All main-equation values with ``r1 + r2 <= R``."""
    out = {}
    for j in range(k0 + 1):
        for r1 in range(R + 1):
            for r2 in range(R + 1 - r1):
                out[(j, r1, r2)] = main_equation_value(coeffs, j, xi, zeta, omega, r1, r2, k0)
    return out


# --------------------------------------------------------------------------
# jet constraint system
# --------------------------------------------------------------------------

class RankNotStable(RuntimeError):
    pass


def _monomial_directional(gamma: np.ndarray, y: np.ndarray, omega: np.ndarray, r: int) -> np.ndarray:
    """``(omega.grad)^r y^gamma`` for every row of ``gamma``, evaluated at ``y``."""
    d = y.shape[0]
    out = np.zeros(gamma.shape[0], dtype=complex)
    for delta, w in zip(mi.counted_indices(d, r), mi.multiplicities(d, r)):
        rem = gamma - delta[None, :]
        ok = np.all(rem >= 0, axis=1)
        if not ok.any():
            continue
        falling = np.ones(gamma.shape[0])
        for i in range(d):
            for t in range(int(delta[i])):
                falling *= gamma[:, i] - t
        coeff = w * np.prod(omega**delta)
        val = np.where(ok, falling * np.prod(np.where(ok[:, None], y[None, :] ** np.maximum(rem, 0), 0), axis=1), 0)
        out += coeff * val
    return out


@dataclass
class JetResult:
    d: int
    k: int
    R: int
    degree: int
    value_basis: np.ndarray  # columns, orthonormal, in counted storage
    nullity: int
    n_rows: int
    singular_gap: float

    @property
    def value_dim(self) -> int:
        return self.value_basis.shape[1]


def jet_constraint_matrix(d, k, R, xi, degree, n_points, zetas_per_point, radius, seed, omega_mode="re"):
    """Rows of the conditions ``(omega.grad)^r A(eta) . (zeta^(k-j) (x) omega^j) = 0``, ``r + j <= R``.

    The unknown field is a polynomial of the given degree in ``eta - xi`` with
    coefficients in ``S^k``; it is constrained at ``xi`` and at points near it,
    each with ``zeta`` drawn from ``V_eta``.
    """
    rng = np.random.default_rng(seed)
    xi = np.asarray(xi, dtype=float)
    gammas = np.concatenate([mi.counted_indices(d, p) for p in range(degree + 1)])
    n = mi.sym_dim(d, k)
    mult = mi.multiplicities(d, k)
    rows = []
    for p_idx in range(n_points):
        eta = xi.copy() if p_idx == 0 else xi + radius * rng.standard_normal(d)
        y = eta - xi
        for _ in range(zetas_per_point):
            z = sample_V_xi(eta, rng).value
            omega = z.real.copy() if omega_mode == "re" else rng.standard_normal(d) + 1j * rng.standard_normal(d)
            for r in range(R + 1):
                mono = _monomial_directional(gammas, y, omega, r)
                for jj in range(R - r + 1):
                    if jj > k:
                        break
                    T = tensor_product(tensor_power(z, k - jj), tensor_power(omega, jj))
                    rows.append(np.outer(mono, mult * T.components).reshape(-1))
    return np.array(rows), gammas.shape[0], n


def _null_value_part(M, n_mono, n, rtol):
    # reduced SVD keeps memory linear in the row count; pad rows so vh is square
    if M.shape[0] < M.shape[1]:
        M = np.vstack([M, np.zeros((M.shape[1] - M.shape[0], M.shape[1]), dtype=M.dtype)])
    s, vh = np.linalg.svd(M, full_matrices=False)[1:]
    if s.size == 0:
        rank = 0
    else:
        rank = int(np.sum(s > rtol * s[0]))
    null = vh[rank:].conj().T
    gap = float(s[rank - 1] / s[rank]) if 0 < rank < s.size else float("inf")
    value_block = null[:n, :]  # monomial gamma = 0 comes first
    if value_block.size == 0:
        return np.zeros((n, 0), dtype=complex), null.shape[1], gap
    uu, ss, _ = np.linalg.svd(value_block, full_matrices=False)
    vr = int(np.sum(ss > 1e-8 * max(1.0, ss[0] if ss.size else 0.0)))
    return uu[:, :vr], null.shape[1], gap


def jet_nullspace(d, k, R, xi, n_samples=None, tol=1e-9, degree=None, seed=0, radius=0.5, omega_mode="re") -> JetResult:
    """Value part of the solution space of the jet constraint system.

    The number of constraint points is doubled until the nullity repeats
    twice in a row.  Returns an orthonormal basis (columns, counted storage)
    of the possible values ``A_hat(xi)``.
    """
    xi = np.asarray(xi, dtype=float)
    degree = R + 1 if degree is None else degree
    n_mono = mi.poly_dim_le(d, degree)
    n = mi.sym_dim(d, k)
    n_unknown = n_mono * n
    rows_per_point = sum(min(R - r, k) + 1 for r in range(R + 1))
    zpp = 2
    n_points = n_samples or max(4, int(np.ceil(4 * n_unknown / (rows_per_point * zpp))))
    history = []
    for _ in range(6):
        M, _, _ = jet_constraint_matrix(d, k, R, xi, degree, n_points, zpp, radius, seed, omega_mode)
        basis, nullity, gap = _null_value_part(M, n_mono, n, tol)
        history.append((nullity, basis.shape[1]))
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            return JetResult(d, k, R, degree, basis, nullity, M.shape[0], gap)
        n_points *= 2
    raise RankNotStable(f"nullity did not stabilize: {history}")


def predicted_value_space(d, k, R, xi) -> np.ndarray:
    """Basis of the value space the uniqueness theorem predicts (columns)."""
    n = mi.sym_dim(d, k)
    if k <= R:
        return np.zeros((n, 0), dtype=complex)
    if k > 2 * R + 1:
        raise ValueError("no prediction beyond 2R + 1")
    s = 2 * R + 1 - k
    p = s + 1
    B_order = k - p
    xi_t = tensor_power(np.asarray(xi, dtype=float), p)
    cols = []
    for r in range(mi.sym_dim(d, B_order)):
        e = np.zeros(mi.sym_dim(d, B_order), dtype=complex)
        e[r] = 1
        cols.append(tensor_product(xi_t, SymTensor(d, B_order, e)).components)
    q, _ = np.linalg.qr(np.array(cols).T)
    return q


def principal_angles(U: np.ndarray, V: np.ndarray, d: int, k: int) -> np.ndarray:
    """Angles between subspaces in the Frobenius geometry of ``S^k``."""
    if U.shape[1] != V.shape[1]:
        return np.array([np.pi / 2])
    if U.shape[1] == 0:
        return np.zeros(0)
    w = np.sqrt(mi.multiplicities(d, k))[:, None]
    return subspace_angles(U * w, V * w)


# --------------------------------------------------------------------------
# certification
# --------------------------------------------------------------------------

@dataclass
class Certificate:
    certified: bool
    hypothesis_ok: bool
    hypothesis_deviation: float
    residual: float
    reason: str
    B: SymTensor | None = None
    chain: list = field(default_factory=list)

    def to_dict(self):
        return {
            "certified": self.certified,
            "hypothesis_ok": self.hypothesis_ok,
            "hypothesis_deviation": self.hypothesis_deviation,
            "residual": self.residual,
            "reason": self.reason,
            "B": None if self.B is None else self.B.to_dict(),
            "chain": self.chain,
        }


def condition_values(F: CoefficientField, xi, R, n_samples=8, seed=0):
    """``(omega.grad)^r A_hat(xi) . (zeta^(k-j) (x) omega^j)`` for ``r + j <= R``, ``omega = Re zeta``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_samples):
        z = sample_V_xi(xi, rng).value
        om = z.real.copy()
        for r in range(R + 1):
            Dr = F.directional(xi, om, r)
            for j in range(min(R - r, F.k) + 1):
                T = tensor_product(tensor_power(z, F.k - j), tensor_power(om, j))
                out.append((r, j, dot(Dr, T)))
    return out


def certify_by_induction(F: CoefficientField, xi, R, tol=1e-9, n_samples=8, seed=0) -> Certificate:
    """Run the decomposition chain on the concrete tensor ``A_hat(xi)``.

    Step ``s`` divides ``A_hat(xi)`` by ``xi^s`` (least squares), checks the
    kernel condition on the quotient, and splits it with
    :func:`decompose_V_xi`.  The ``I2`` parts must die before the target
    power of ``xi`` is reached; a negative order means zero.
    """
    xi = np.asarray(xi, dtype=float)
    k = F.k
    A = F.value(xi)
    scale = max(A.max_norm(), _coefficient_scale(F), 1e-300)
    conds = condition_values(F, xi, R, n_samples, seed)
    dev = max((abs(v) for _, _, v in conds), default=0.0)
    hyp_ok = dev <= tol * scale
    if not hyp_ok:
        bad = max(conds, key=lambda c: abs(c[2]))
        return Certificate(False, False, dev, float("nan"), f"hypothesis fails at (r, j) = ({bad[0]}, {bad[1]})")
    if k > 2 * R + 1:
        return Certificate(False, True, dev, float("nan"), "order beyond 2R + 1: no conclusion")
    target = k + 1 if k <= R else 2 * R + 2 - k
    chain = []
    xi_hat_ok = True
    for s in range(target):
        if k - s < 0:
            break
        Q, res = _divide_by_xi_power(A, xi, s)
        step = {"s": s, "quotient_order": k - s, "division_residual": res / scale}
        if k - s >= 1:
            ok, kdev = kernel_test(Q, xi, tol=tol)
            dec = decompose_V_xi(Q, xi)
            step.update(
                kernel_deviation=kdev / scale,
                decomposition_residual=dec.residual / scale,
                i2_part=0.0 if dec.B is None else dec.B.max_norm() / scale,
            )
            xi_hat_ok &= res <= tol * scale and dec.residual <= tol * scale
        else:
            step.update(kernel_deviation=Q.max_norm() / scale)
        chain.append(step)
    if k <= R:
        residual = A.max_norm()
        ok = residual <= tol * scale
        return Certificate(ok and xi_hat_ok, True, dev, residual, "value vanishes" if ok else "value does not vanish", None, chain)
    B, residual = _divide_by_xi_power(A, xi, target)
    ok = residual <= tol * scale
    return Certificate(
        ok and xi_hat_ok, True, dev, residual,
        f"A = xi^{target} (x) B" if ok else "structure fit fails", B, chain,
    )


def _coefficient_scale(F: CoefficientField) -> float:
    return max((float(np.max(np.abs(c))) for t in F.terms for c in t.poly.values()), default=0.0)


def _divide_by_xi_power(A: SymTensor, xi, p: int):
    if p == 0:
        return A, 0.0
    if p > A.k:
        return SymTensor(A.d, 0), A.max_norm()
    M = _xi_power_lift(A.d, A.k - p, p, tuple(float(v) for v in xi))
    return lstsq_structured(A, M, A.k - p)


def _xi_power_lift(d, order, p, xi):
    xi_t = tensor_power(np.array(xi), p)
    n = mi.sym_dim(d, order)
    cols = [tensor_product(xi_t, SymTensor(d, order, np.eye(n)[r])).components for r in range(n)]
    return np.array(cols).T
