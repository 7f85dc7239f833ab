"""Periodic spectral sandbox for the semiclassical estimates.

Fields live on the centred box ``[-L/2, L/2)^d`` with ``N`` points per axis.
Fourier coefficients are normalized, ``c = fftn(u) / N^d``, so a single mode
with unit coefficient has unit L2 norm and every norm below is a weighted
``l2`` sum of ``|c|^2``.  Modes are ``exp(i xi.(x + L/2))``, measured from the
box corner; the phase offset never enters a norm or multiplier.

Weights: ``X^lam`` uses ``(h + |p_zeta(h xi)|)^lam`` with
``p_zeta(xi) = |xi|^2 + 2 zeta.xi``; Sobolev norms use ``(1 + |xi|^2)^(s/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .calculus import PolyPlaneWave, apply_D_counted, apply_P_power
from .symtensor import SymTensor, _contract_plan, tensor_power


class ContractionError(RuntimeError):
    def __init__(self, factor, iterations):
        super().__init__(f"fixed-point map is not contracting: factor {factor:.3g} after {iterations} iterations")
        self.factor = factor
        self.iterations = iterations


# --------------------------------------------------------------------------
# grids and fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    d: int
    N: int
    L: float = 2 * np.pi

    @property
    def shape(self):
        return (self.N,) * self.d

    def axis(self) -> np.ndarray:
        return -self.L / 2 + self.L * np.arange(self.N) / self.N

    def points(self) -> np.ndarray:
        """Physical points, shape ``shape + (d,)``."""
        return np.stack(np.meshgrid(*([self.axis()] * self.d), indexing="ij"), axis=-1)

    def freqs(self) -> np.ndarray:
        """Dual lattice frequencies in FFT order, shape ``shape + (d,)``."""
        k1 = 2 * np.pi * np.fft.fftfreq(self.N, d=self.L / self.N)
        return np.stack(np.meshgrid(*([k1] * self.d), indexing="ij"), axis=-1)

    def mode_index(self) -> np.ndarray:
        k1 = np.fft.fftfreq(self.N, d=1.0 / self.N)
        return np.stack(np.meshgrid(*([k1] * self.d), indexing="ij"), axis=-1)


class GridField:
    """Sampled periodic complex field with cached normalized Fourier coefficients."""

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: Grid, values=None, coeffs=None):
        self.grid = grid
        if (values is None) == (coeffs is None):
            raise ValueError("give exactly one of values or coeffs")
        if values is not None:
            v = np.array(values, dtype=complex).reshape(grid.shape)
            v.setflags(write=False)
            self._values, self._coeffs = v, None
        else:
            c = np.array(coeffs, dtype=complex).reshape(grid.shape)
            c.setflags(write=False)
            self._values, self._coeffs = None, c

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = np.fft.ifftn(self._coeffs) * self.grid.N**self.grid.d
            v.setflags(write=False)
            self._values = v
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            c = np.fft.fftn(self._values) / self.grid.N**self.grid.d
            c.setflags(write=False)
            self._coeffs = c
        return self._coeffs

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def __add__(self, other):
        return GridField(self.grid, coeffs=self.coeffs + other.coeffs)

    def __sub__(self, other):
        return GridField(self.grid, coeffs=self.coeffs - other.coeffs)

    def __mul__(self, s):
        return GridField(self.grid, coeffs=self.coeffs * complex(s))

    __rmul__ = __mul__

    @classmethod
    def from_function(cls, grid: Grid, fn):
        return cls(grid, values=fn(grid.points()))

    @classmethod
    def single_mode(cls, grid: Grid, n, coeff=1.0):
        c = np.zeros(grid.shape, dtype=complex)
        c[tuple(int(i) % grid.N for i in n)] = coeff
        return cls(grid, coeffs=c)


@dataclass(frozen=True)
class SemiclassicalWeight:
    h: float
    zeta: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("need h > 0")
        z = np.array(getattr(self.zeta, "value", self.zeta), dtype=complex).reshape(-1)
        if abs(z @ z) > 1e-12 or abs(np.linalg.norm(z.real) - 1) > 1e-12:
            raise ValueError("zeta must lie in V")
        object.__setattr__(self, "zeta", z)

    def with_lam(self, lam):
        return SemiclassicalWeight(self.h, self.zeta, lam)


def symbol(freqs: np.ndarray, zeta) -> np.ndarray:
    """``p_zeta(xi) = |xi|^2 + 2 zeta.xi`` at the given frequencies."""
    return np.sum(freqs * freqs, axis=-1) + 2 * (freqs @ np.asarray(zeta, dtype=complex))


def semiclassical_symbol(grid: Grid, w: SemiclassicalWeight) -> np.ndarray:
    return symbol(w.h * grid.freqs(), w.zeta)


def x_weight(grid: Grid, w: SemiclassicalWeight, lam=None) -> np.ndarray:
    lam = w.lam if lam is None else lam
    return (w.h + np.abs(semiclassical_symbol(grid, w))) ** lam


def x_norm(u: GridField, w: SemiclassicalWeight) -> float:
    wt = x_weight(u.grid, w)
    return float(np.sqrt(np.sum(wt**2 * np.abs(u.coeffs) ** 2)))


def sobolev_norm(u: GridField, s: float) -> float:
    xi2 = np.sum(u.grid.freqs() ** 2, axis=-1)
    return float(np.sqrt(np.sum((1 + xi2) ** s * np.abs(u.coeffs) ** 2)))


def apply_P(u: GridField, w: SemiclassicalWeight, m: int = 1) -> GridField:
    return GridField(u.grid, coeffs=semiclassical_symbol(u.grid, w) ** m * u.coeffs)


def apply_P_stencil(u: GridField, w: SemiclassicalWeight) -> GridField:
    """``-h^2 Laplace u + 2 h zeta.D u`` built from separate spectral derivatives."""
    grid, h = u.grid, w.h
    xi = grid.freqs()
    out = np.zeros(grid.shape, dtype=complex)
    for j in range(grid.d):
        dj = np.fft.ifftn(xi[..., j] * u.coeffs) * grid.N**grid.d  # D_j u
        djj = np.fft.ifftn(xi[..., j] ** 2 * u.coeffs) * grid.N**grid.d  # D_j^2 u = -d_j^2 u
        out += h**2 * djj + 2 * h * w.zeta[j] * dj
    return GridField(grid, values=out)


def inverse_multiplier(grid: Grid, w: SemiclassicalWeight, eps: float = 1.0) -> np.ndarray:
    p = semiclassical_symbol(grid, w)
    floor = eps * w.h
    q = np.empty_like(p)
    big = np.abs(p) >= floor
    q[big] = 1.0 / p[big]
    q[~big] = np.conj(p[~big]) / (np.abs(p[~big]) ** 2 + floor**2)
    return q


def solve_inverse(f: GridField, w: SemiclassicalWeight, eps: float = 1.0, power: int = 1) -> GridField:
    """Floored Fourier inverse of ``P_zeta(hD)^power``."""
    if not eps > 0:
        raise ValueError("need eps > 0")
    return GridField(f.grid, coeffs=inverse_multiplier(f.grid, w, eps) ** power * f.coeffs)


def inverse_operator_norm(grid: Grid, w: SemiclassicalWeight, eps: float = 1.0) -> float:
    """Exact norm of the floored inverse from ``X^lam`` to ``X^(lam+1)`` on the grid."""
    q = inverse_multiplier(grid, w, eps)
    return float(np.max(np.abs(q) * (w.h + np.abs(semiclassical_symbol(grid, w)))))


def resolved_mask(grid: Grid, w: SemiclassicalWeight, eps: float = 1.0) -> np.ndarray:
    return np.abs(semiclassical_symbol(grid, w)) >= eps * w.h


# --------------------------------------------------------------------------
# cutoff and coefficient fields
# --------------------------------------------------------------------------

def _smooth_step(t):
    """``0`` for ``t <= 0``, ``1`` for ``t >= 1``, ``C^inf`` in between."""
    t = np.asarray(t, dtype=float)
    g = lambda s: np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    a, b = g(t), g(1 - t)
    return a / (a + b)


def cutoff(grid: Grid) -> np.ndarray:
    """Product bump equal to 1 on the middle third of the box, 0 near its edge."""
    L = grid.L
    x = np.abs(grid.axis())
    prof = _smooth_step((L / 3 - x) / (L / 6))
    out = np.ones(grid.shape)
    for j in range(grid.d):
        shape = [1] * grid.d
        shape[j] = grid.N
        out = out * prof.reshape(shape)
    return out


@dataclass
class GridTensorField:
    """Order-``k`` symmetric-tensor valued field, components on the grid."""

    grid: Grid
    k: int
    values: np.ndarray  # (sym_dim, *grid.shape)

    @classmethod
    def bump(cls, grid: Grid, T: SymTensor, amplitude=0.1, sigma=0.35, center=None):
        c = np.zeros(grid.d) if center is None else np.asarray(center, float)
        x = grid.points() - c
        g = amplitude * np.exp(-np.sum(x * x, axis=-1) / (2 * sigma**2))
        return cls(grid, T.k, T.components[:, None] * g.reshape(1, -1))

    def contract_vector_power(self, zeta, j) -> np.ndarray:
        """Pointwise ``A(x) . zeta^j`` as components of order ``k - j``."""
        if j == 0:
            return self.values.reshape((-1,) + self.grid.shape)
        src, mult = _contract_plan(self.grid.d, self.k, j)
        zj = tensor_power(zeta, j).components
        flat = self.values.reshape(self.values.shape[0], -1)
        out = np.tensordot(mult * zj, flat[src.T], axes=([0], [0]))
        return out.reshape((-1,) + self.grid.shape)


# --------------------------------------------------------------------------
# fixed point
# --------------------------------------------------------------------------

def _pad(c: np.ndarray, N: int, M: int) -> np.ndarray:
    """Embed centred spectrum of size N into size M (M >= N)."""
    d = c.ndim
    cs = np.fft.fftshift(c)
    out = np.zeros((M,) * d, dtype=complex)
    lo = (M - N) // 2
    out[(slice(lo, lo + N),) * d] = cs
    return np.fft.ifftshift(out)


def _truncate(c: np.ndarray, N: int) -> np.ndarray:
    M = c.shape[0]
    d = c.ndim
    cs = np.fft.fftshift(c)
    lo = (M - N) // 2
    return np.fft.ifftshift(cs[(slice(lo, lo + N),) * d])


def padded_product(a_vals: np.ndarray, b_coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Fourier coefficients of ``a * b`` with 2x zero padding of ``b``.

    ``a`` is a smooth coefficient given by point values on the fine grid.
    """
    N, d = grid.N, grid.d
    M = 2 * N
    b_fine = np.fft.ifftn(_pad(b_coeffs, N, M)) * M**d
    prod = a_vals * b_fine
    return _truncate(np.fft.fftn(prod) / M**d, N)


@dataclass
class CGOProblem:
    grid: Grid
    m: int
    coeffs: dict  # k -> GridTensorField (evaluated on the 2x grid)

    @classmethod
    def single_bump(cls, d=3, N=48, m=2, amplitude=0.1, sigma=0.35, L=2 * np.pi):
        grid = Grid(d, N, L)
        fine = Grid(d, 2 * N, L)
        A0 = GridTensorField.bump(fine, SymTensor(d, 0, [1.0]), amplitude, sigma)
        return cls(grid, m, {0: A0})

    @classmethod
    def from_bumps(cls, d, N, m, bumps, rng, L=2 * np.pi):
        """Sum of Gaussian bumps; each entry has ``order``, ``amplitude``, ``sigma`` and
        optionally ``center`` and ``tensor`` (random unit max-norm if absent)."""
        grid = Grid(d, N, L)
        fine = Grid(d, 2 * N, L)
        coeffs = {}
        for b in bumps:
            k = int(b.get("order", 0))
            if not 0 <= k <= m - 1:
                raise ValueError("coefficient order must lie in [0, m-1]")
            if "tensor" in b:
                T = SymTensor(d, k, b["tensor"])
            else:
                T = SymTensor.random(d, k, rng, real=True)
                T = T / T.max_norm()
            F = GridTensorField.bump(fine, T, b.get("amplitude", 0.1), b.get("sigma", 0.35), b.get("center"))
            if k in coeffs:
                F = GridTensorField(fine, k, coeffs[k].values + F.values)
            coeffs[k] = F
        return cls(grid, m, coeffs)


def _lower_order_apply(problem: CGOProblem, zeta, h, psi_coeffs: np.ndarray) -> np.ndarray:
    """``h^(2m) sum_k sum_j h^(-j) C(k,j) A^(k).(zeta^j (x) D^(k-j) psi)``, Fourier side."""
    grid, m = problem.grid, problem.m
    xi = grid.freqs()
    out = np.zeros(grid.shape, dtype=complex)
    for k, A in problem.coeffs.items():
        for j in range(k + 1):
            Az = A.contract_vector_power(zeta, j)
            n = k - j
            counts = mi.counted_indices(grid.d, n)
            mult = mi.multiplicities(grid.d, n)
            for c, w, comp in zip(counts, mult, Az):
                Dpsi = psi_coeffs * np.prod(xi ** c, axis=-1) if n else psi_coeffs
                out += (h ** (2 * m - j) * math.comb(k, j) * w) * padded_product(comp, Dpsi, grid)
    return out


def _lower_order_on_amplitude(problem: CGOProblem, zeta, h, a: PolyPlaneWave) -> np.ndarray:
    """Same operator applied to a symbolic amplitude, point values on the grid."""
    grid, m = problem.grid, problem.m
    X = grid.points().reshape(-1, grid.d)
    fine_idx = (slice(None, None, 2),) * grid.d
    out = np.zeros(X.shape[0], dtype=complex)
    for k, A in problem.coeffs.items():
        for j in range(k + 1):
            Az = A.contract_vector_power(zeta, j)
            n = k - j
            for c, w, comp in zip(mi.counted_indices(grid.d, n), mi.multiplicities(grid.d, n), Az):
                Da = apply_D_counted(a, c)
                if Da.is_zero():
                    continue
                out += (h ** (2 * m - j) * math.comb(k, j) * w) * comp[fine_idx].reshape(-1) * Da.evaluate(X)
    return out.reshape(grid.shape)


@dataclass
class CGOResult:
    psi: GridField
    iterations: int
    contraction_factor: float
    x_norm_psi: float
    residual: float
    floored_energy: float
    alias_energy: float
    history: list = field(default_factory=list)


def right_hand_side(problem: CGOProblem, a: PolyPlaneWave, w: SemiclassicalWeight) -> GridField:
    """``f = -phi (P^m a + h^(2m) sum A-terms on a)``."""
    grid = problem.grid
    X = grid.points().reshape(-1, grid.d)
    Pa = apply_P_power(a, w.zeta, w.h, problem.m).evaluate(X).reshape(grid.shape)
    La = Pa + _lower_order_on_amplitude(problem, w.zeta, w.h, a)
    return GridField(grid, values=-cutoff(grid) * La)


def cgo_solve(problem: CGOProblem, a: PolyPlaneWave, w: SemiclassicalWeight, max_iter=30, tol=1e-12, eps=1.0) -> CGOResult:
    """Solve ``psi = I^m f - I^m (lower-order terms on psi)`` by iteration.

    Returns the solution, the iteration count, the largest observed ratio of
    successive update norms, and the equation residual on resolved modes.
    """
    grid, m, h = problem.grid, problem.m, w.h
    wm = w.with_lam(m / 2)
    f = right_hand_side(problem, a, w)
    Im = inverse_multiplier(grid, w, eps) ** m
    rhs = Im * f.coeffs
    psi = rhs.copy()
    wt = x_weight(grid, wm)

    def xn(c):
        return float(np.sqrt(np.sum(wt**2 * np.abs(c) ** 2)))

    first = xn(psi)
    prev_step = None
    factor = 0.0
    history = [first]
    it = 0
    for it in range(1, max_iter + 1):
        new = rhs - Im * _lower_order_apply(problem, w.zeta, h, psi)
        step = xn(new - psi)
        psi = new
        history.append(step)
        if prev_step is not None and prev_step > 0:
            factor = max(factor, step / prev_step)
            if factor >= 1.0:
                raise ContractionError(factor, it)
        prev_step = step
        if step <= tol * max(first, np.finfo(float).tiny):
            break
    else:
        raise RuntimeError(f"no convergence in {max_iter} iterations")
    p = semiclassical_symbol(grid, w)
    res = p**m * psi + _lower_order_apply(problem, w.zeta, h, psi) - f.coeffs
    mask = resolved_mask(grid, w, eps)
    wneg = x_weight(grid, w, -m / 2)
    fn = float(np.sqrt(np.sum(wneg**2 * np.abs(f.coeffs) ** 2)))
    rn = float(np.sqrt(np.sum((wneg**2 * np.abs(res) ** 2)[mask])))
    floored = float(np.sqrt(np.sum((wneg**2 * np.abs(res) ** 2)[~mask])))
    idx = np.abs(grid.mode_index())
    high = np.any(idx > grid.N / 3, axis=-1)
    energy = np.abs(psi) ** 2
    alias = float(energy[high].sum() / max(energy.sum(), np.finfo(float).tiny))
    return CGOResult(
        GridField(grid, coeffs=psi),
        it,
        factor,
        xn(psi),
        rn / fn if fn > 0 else 0.0,
        floored / fn if fn > 0 else 0.0,
        alias,
        history,
    )


def fit_slope(hs, values) -> float:
    """Least-squares slope of ``log2(values)`` against ``log2(h)``."""
    x = np.log2(np.asarray(hs, dtype=float))
    y = np.log2(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


# --------------------------------------------------------------------------
# averaging and embedding constants
# --------------------------------------------------------------------------

def check_window(lam, s, k, sigma):
    if not 0 <= sigma < 1:
        raise ValueError(f"need 0 <= sigma < 1, got {sigma}")
    if not (2 * lam - 2 * sigma) >= s - k - 2 * sigma >= 0:
        raise ValueError(f"parameter window violated: 2lam-2sigma={2*lam-2*sigma}, s-k-2sigma={s-k-2*sigma}")


def _support(f: GridField, rtol=0.0):
    c = f.coeffs.reshape(-1)
    xi = f.grid.freqs().reshape(-1, f.grid.d)
    keep = np.abs(c) > rtol * np.max(np.abs(c))
    return xi[keep], np.abs(c[keep]) ** 2


def avg_estimate_mc(f: GridField, lam, s, k, sigma, h, zeta, n_mc=10_000, seed=0, batch=500):
    """Monte-Carlo ratio of the averaged ``X^-lam`` energy to its predicted bound.

    Returns ``(ratio, stderr)`` where ratio is
    ``2 pi E[|f|^2_{X^-lam, tau zeta(theta)}] / (h^(2(-lam-s+k+sigma)) |f|^2_{W^(k-s)})``
    with ``tau ~ U[h, 2h]`` and ``theta ~ U[0, 2 pi)``.
    """
    check_window(lam, s, k, sigma)
    zeta = np.asarray(getattr(zeta, "value", zeta), dtype=complex)
    xi, e = _support(f)
    xi2 = np.sum(xi * xi, axis=1)
    zx = xi @ zeta
    rng = np.random.default_rng(seed)
    samples = np.empty(n_mc)
    done = 0
    while done < n_mc:
        b = min(batch, n_mc - done)
        tau = rng.uniform(h, 2 * h, b)
        theta = rng.uniform(0, 2 * np.pi, b)
        p = tau[:, None] ** 2 * xi2[None, :] + 2 * tau[:, None] * np.exp(1j * theta)[:, None] * zx[None, :]
        samples[done : done + b] = ((tau[:, None] + np.abs(p)) ** (-2 * lam)) @ e
        done += b
    rhs = h ** (2 * (-lam - s + k + sigma)) * np.sum((1 + xi2) ** (k - s) * e)
    mean = 2 * np.pi * samples.mean() / rhs
    err = 2 * np.pi * samples.std(ddof=1) / np.sqrt(n_mc) / rhs
    return float(mean), float(err)


def avg_exact_single_mode_lam0(h, s, k, sigma, xi):
    """Closed form of the averaged quantity for one unit mode when ``lam = 0``."""
    xi2 = float(np.sum(np.asarray(xi) ** 2))
    return 2 * np.pi / (h ** (2 * (-s + k + sigma)) * (1 + xi2) ** (k - s))


def _mode_sup(f: GridField, ratio_fn):
    xi, _ = _support(f)
    return float(np.max(ratio_fn(xi)))


def xembed_constant(u: GridField, w: SemiclassicalWeight, alpha, lam1, lam2) -> float:
    """Smallest ``C`` in ``|D^alpha v|_{X^lam1} <= C h^(-|alpha|+lam1-lam2) |v|_{X^lam2}`` over ``u``'s modes."""
    counts = np.asarray(alpha, dtype=np.int64)
    if counts.sum() > 2 * (lam2 - lam1) + 1e-12:
        raise ValueError("need |alpha| <= 2 (lam2 - lam1)")
    h = w.h

    def ratio(xi):
        p = np.abs(symbol(h * xi, w.zeta))
        return np.abs(np.prod(xi**counts, axis=1)) * (h + p) ** (lam1 - lam2) * h ** (counts.sum() - lam1 + lam2)

    return _mode_sup(u, ratio)


def xandderiv_constant(u: GridField, w: SemiclassicalWeight, s, lam) -> float:
    """Smallest ``C`` in ``|v|_{W^s} <= C h^(-s-lam) |v|_{X^lam}`` over ``u``'s modes."""
    if not 0 <= s <= 2 * lam:
        raise ValueError("need 0 <= s <= 2 lam")
    h = w.h

    def ratio(xi):
        p = np.abs(symbol(h * xi, w.zeta))
        return (1 + np.sum(xi * xi, axis=1)) ** (s / 2) * h ** (s + lam) / (h + p) ** lam

    return _mode_sup(u, ratio)


def xsob_constant(u: GridField, w: SemiclassicalWeight, s, lam) -> float:
    """Smallest ``C`` in ``|v|_{X^-lam} <= C h^(-s-lam) |v|_{W^-s}`` over ``u``'s modes."""
    if not 0 <= s <= 2 * lam:
        raise ValueError("need 0 <= s <= 2 lam")
    h = w.h

    def ratio(xi):
        p = np.abs(symbol(h * xi, w.zeta))
        return (h + p) ** (-lam) * (1 + np.sum(xi * xi, axis=1)) ** (s / 2) * h ** (s + lam)

    return _mode_sup(u, ratio)


def random_field(grid: Grid, rng, exponent=0.0, kmax=None, kmin=0.0) -> GridField:
    """Random phases with ``|c(xi)| ~ <xi>^exponent`` on ``kmin <= |xi| <= kmax``."""
    xi = grid.freqs()
    r = np.sqrt(np.sum(xi * xi, axis=-1))
    kmax = grid.N * np.pi / grid.L * 0.999 if kmax is None else kmax
    band = (r <= kmax) & (r >= kmin)
    amp = np.where(band, (1 + r**2) ** (exponent / 2), 0.0)
    c = amp * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) / np.sqrt(2)
    return GridField(grid, coeffs=c)


def frequency_split(f: GridField, radius: float):
    """Low and high parts of ``f`` split at ``|xi| = radius``."""
    r = np.sqrt(np.sum(f.grid.freqs() ** 2, axis=-1))
    low = np.where(r <= radius, f.coeffs, 0)
    return GridField(f.grid, coeffs=low), GridField(f.grid, coeffs=f.coeffs - low)


# --------------------------------------------------------------------------
# decay of the truncated right-hand side
# --------------------------------------------------------------------------

def _poly_product(a: PolyPlaneWave, b: PolyPlaneWave) -> PolyPlaneWave:
    out = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            key = tuple(i + j for i, j in zip(ka, kb))
            out[key] = out.get(key, 0j) + va * vb
    return PolyPlaneWave(a.xi + b.xi, out)


def transport_amplitude(zeta, r: int, q: int = 4) -> PolyPlaneWave:
    """``(x.conj(zeta))^r (x.e)^q`` with ``e`` real, unit and orthogonal to ``zeta``.

    It is killed by ``(zeta.grad)^(r+1)``; the transverse factor keeps the
    Laplacian from annihilating it.  Needs ``d >= 3``.
    """
    zeta = np.asarray(getattr(zeta, "value", zeta), dtype=complex)
    if zeta.shape[0] < 3:
        raise ValueError("need d >= 3")
    _, _, vh = np.linalg.svd(np.vstack([zeta.real, zeta.imag]))
    e = vh[2]
    return _poly_product(PolyPlaneWave.linear_power(np.conj(zeta), r), PolyPlaneWave.linear_power(e, q))


def truncated_source_norm(grid: Grid, a: PolyPlaneWave, w: SemiclassicalWeight, m: int) -> float:
    """``|phi P_zeta(hD)^m a|_{X^-lam}`` with ``lam = w.lam``."""
    X = grid.points().reshape(-1, grid.d)
    vals = apply_P_power(a, w.zeta, w.h, m).evaluate(X).reshape(grid.shape)
    return x_norm(GridField(grid, values=cutoff(grid) * vals), w.with_lam(-w.lam))
