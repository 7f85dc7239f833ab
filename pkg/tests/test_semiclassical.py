import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgolab import semiclassical as SC
from cgolab.calculus import PolyPlaneWave
from cgolab.semiclassical import Grid, GridField, SemiclassicalWeight

Z3 = np.array([1.0, 1j, 0.0])
Z2 = np.array([1.0, 1j])


def rand_field(grid, rng):
    return GridField(grid, values=rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


def test_round_trip_and_parseval(rng):
    g = Grid(3, 16)
    u = rand_field(g, rng)
    back = GridField(g, coeffs=u.coeffs)
    assert np.max(np.abs(back.values - u.values)) <= 1e-12 * np.max(np.abs(u.values))
    mean_sq = np.mean(np.abs(u.values) ** 2)
    assert abs(u.l2() ** 2 - mean_sq) <= 1e-12 * mean_sq


def test_field_validation_and_readonly(rng):
    g = Grid(2, 8)
    with pytest.raises(ValueError):
        GridField(g)
    u = rand_field(g, rng)
    with pytest.raises(ValueError):
        u.coeffs[0, 0] = 1


def test_grid_geometry():
    g = Grid(2, 8, L=4.0)
    assert g.axis()[0] == -2.0 and g.points().shape == (8, 8, 2)
    assert np.allclose(g.freqs()[1, 0], [2 * np.pi / 4.0, 0])


def test_single_mode_norms():
    g = Grid(3, 16)
    n = (2, -3, 1)
    u = GridField.single_mode(g, n)
    xi = np.array(n, dtype=float)
    assert u.l2() == pytest.approx(1.0)
    assert SC.sobolev_norm(u, 1.5) == pytest.approx((1 + xi @ xi) ** 0.75)
    w = SemiclassicalWeight(0.1, Z3, lam=-0.5)
    p = abs(SC.symbol(0.1 * xi, Z3))
    assert SC.x_norm(u, w) == pytest.approx((0.1 + p) ** -0.5)
    assert np.allclose(u.values, np.exp(1j * (g.points() + g.L / 2) @ xi))


def test_weight_validation():
    with pytest.raises(ValueError):
        SemiclassicalWeight(0.0, Z3)
    with pytest.raises(ValueError):
        SemiclassicalWeight(0.1, np.array([1.0, 1.0, 0]))
    assert SemiclassicalWeight(0.1, Z3).with_lam(2).lam == 2


def test_apply_P_matches_stencil(rng):
    g = Grid(3, 12)
    u = rand_field(g, rng)
    w = SemiclassicalWeight(0.2, Z3)
    a, b = SC.apply_P(u, w).values, SC.apply_P_stencil(u, w).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))


def test_apply_P_on_plane_wave():
    g = Grid(2, 16)
    n = (3, 1)
    w = SemiclassicalWeight(0.25, Z2)
    u = GridField.single_mode(g, n)
    out = SC.apply_P(u, w, 2)
    expect = SC.symbol(0.25 * np.array(n, float), Z2) ** 2
    assert np.allclose(out.values, expect * u.values)


def test_solve_inverse_on_resolved_modes(rng):
    g = Grid(3, 12)
    w = SemiclassicalWeight(0.1, Z3)
    f = rand_field(g, rng)
    u = SC.solve_inverse(f, w, power=2)
    back = SC.apply_P(u, w, 2)
    mask = SC.resolved_mask(g, w)
    assert np.max(np.abs((back.coeffs - f.coeffs)[mask])) <= 1e-11 * np.max(np.abs(f.coeffs))
    assert not mask.all()
    with pytest.raises(ValueError):
        SC.solve_inverse(f, w, eps=0)


@given(st.floats(0.01, 0.5))
@settings(max_examples=15)
def test_inverse_norm_bounded(h):
    g = Grid(2, 32)
    w = SemiclassicalWeight(h, Z2)
    assert 1.0 <= SC.inverse_operator_norm(g, w) <= 2.0 + 1e-12


def test_cutoff_shape():
    g = Grid(1, 60)
    phi = SC.cutoff(g)
    x = np.abs(g.axis())
    assert np.all(phi[x <= g.L / 6] == 1.0)
    assert np.all(phi[x >= g.L / 3 + 1e-9] == 0.0)
    assert np.all((phi >= 0) & (phi <= 1))


def test_padded_product_is_exact_for_band_limited(rng):
    g = Grid(1, 16)
    fine = Grid(1, 32)
    a = np.cos(fine.axis())
    b = GridField.single_mode(g, (2,))
    out = SC.padded_product(a.astype(complex), b.coeffs, g)
    expect = np.zeros(16, complex)
    # coefficients are relative to the box corner, and cos(x) = -cos(x + pi)
    expect[1] = expect[3] = -0.5
    assert np.allclose(out, expect, atol=1e-14)


def test_cgo_without_coefficients_and_constant_amplitude():
    prob = SC.CGOProblem(Grid(3, 12), 2, {})
    w = SemiclassicalWeight(0.25, Z3)
    res = SC.cgo_solve(prob, PolyPlaneWave.constant(np.zeros(3)), w)
    assert res.x_norm_psi == 0 and res.residual == 0


def test_cgo_converges_small_grid():
    prob = SC.CGOProblem.single_bump(d=3, N=16, m=2)
    w = SemiclassicalWeight(0.125, Z3)
    res = SC.cgo_solve(prob, PolyPlaneWave.constant(np.zeros(3)), w)
    assert res.iterations < 30 and res.contraction_factor < 0.5
    assert res.residual < 1e-8


def test_cgo_raises_when_not_contracting():
    prob = SC.CGOProblem.single_bump(d=3, N=12, m=2, amplitude=1e5)
    w = SemiclassicalWeight(0.5, Z3)
    with pytest.raises((SC.ContractionError, RuntimeError)):
        SC.cgo_solve(prob, PolyPlaneWave.linear_power(np.conj(Z3), 1), w, max_iter=10)


def test_from_bumps_validation(rng):
    with pytest.raises(ValueError):
        SC.CGOProblem.from_bumps(3, 12, 2, [{"order": 2}], rng)
    prob = SC.CGOProblem.from_bumps(3, 12, 3, [{"order": 1}, {"order": 1}], rng)
    assert set(prob.coeffs) == {1}


def test_fit_slope():
    hs = [0.5, 0.25, 0.125]
    assert SC.fit_slope(hs, [h**2.5 for h in hs]) == pytest.approx(2.5)


def test_window():
    SC.check_window(1, 1.2, 0, 0.2)
    with pytest.raises(ValueError):
        SC.check_window(1, 0.1, 0, 0.2)
    with pytest.raises(ValueError):
        SC.check_window(1, 1.2, 0, 1.0)
    with pytest.raises(ValueError):
        SC.check_window(0.5, 1.5, 0, 0.0)


def test_avg_single_mode_lam0():
    g = Grid(3, 16)
    xi = (2, 1, 0)
    u = GridField.single_mode(g, xi, 3.0)
    ratio, err = SC.avg_estimate_mc(u, 0.0, 0.0, 0, 0.0, 0.1, Z3, n_mc=200)
    assert ratio == pytest.approx(SC.avg_exact_single_mode_lam0(0.1, 0.0, 0, 0.0, xi))
    assert err < 1e-12


def test_avg_is_seeded():
    g = Grid(3, 12)
    f = SC.random_field(g, np.random.default_rng(1), kmax=4)
    a = SC.avg_estimate_mc(f, 1, 1.2, 0, 0.2, 0.1, Z3, n_mc=500, seed=3)
    b = SC.avg_estimate_mc(f, 1, 1.2, 0, 0.2, 0.1, Z3, n_mc=500, seed=3)
    assert a == b and a[0] > 0


def test_embedding_constants_match_norm_ratio():
    g = Grid(2, 32)
    w = SemiclassicalWeight(0.1, Z2)
    n = (5, -2)
    u = GridField.single_mode(g, n)
    xi = np.array(n, float)
    h = 0.1
    c = SC.xsob_constant(u, w, 1.2, 1.0)
    lhs = SC.x_norm(u, w.with_lam(-1.0))
    rhs = h ** (-2.2) * SC.sobolev_norm(u, -1.2)
    assert c == pytest.approx(lhs / rhs)
    c = SC.xandderiv_constant(u, w, 1.5, 1.0)
    assert c == pytest.approx(SC.sobolev_norm(u, 1.5) / (h ** -2.5 * SC.x_norm(u, w.with_lam(1.0))))
    c = SC.xembed_constant(u, w, (2, 0), 0.0, 1.0)
    Du = GridField(g, coeffs=u.coeffs * xi[0] ** 2)
    assert c == pytest.approx(SC.x_norm(Du, w) / (h ** (-2 - 1) * SC.x_norm(u, w.with_lam(1.0))))
    with pytest.raises(ValueError):
        SC.xembed_constant(u, w, (2, 1), 0.0, 1.0)
    with pytest.raises(ValueError):
        SC.xsob_constant(u, w, 3.0, 1.0)


def test_sobolev_monotone(rng):
    g = Grid(2, 16)
    u = rand_field(g, rng)
    vals = [SC.sobolev_norm(u, s) for s in (-1, 0, 0.5, 2)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_frequency_split(rng):
    g = Grid(2, 16)
    u = rand_field(g, rng)
    lo, hi = SC.frequency_split(u, 3.0)
    assert np.allclose((lo + hi).coeffs, u.coeffs)
    assert lo.l2() ** 2 + hi.l2() ** 2 == pytest.approx(u.l2() ** 2)


def test_random_field_band(rng):
    g = Grid(2, 32)
    f = SC.random_field(g, rng, kmax=5, kmin=2)
    r = np.linalg.norm(g.freqs(), axis=-1)
    assert np.all(f.coeffs[(r > 5) | (r < 2)] == 0)


def test_transport_amplitude_is_killed(rng):
    from cgolab.calculus import transport_residual

    z = Z3
    for r in range(3):
        a = SC.transport_amplitude(z, r)
        assert transport_residual(a, z, r).is_zero(1e-12)
        assert not transport_residual(a, z, r - 1).is_zero(1e-6) if r else True
    with pytest.raises(ValueError):
        SC.transport_amplitude(Z2, 1)


def test_truncated_source_decay():
    g = Grid(3, 24)
    hs = [2.0**-3, 2.0**-4, 2.0**-5]
    for r, expect in [(0, 3.0), (1, 2.0)]:
        a = SC.transport_amplitude(Z3, r)
        vals = [SC.truncated_source_norm(g, a, SemiclassicalWeight(h, Z3, 1.0), 2) for h in hs]
        assert SC.fit_slope(hs, vals) == pytest.approx(expect, abs=0.15)
