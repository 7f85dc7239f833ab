import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgolab import calculus as C
from cgolab.calculus import PolyPlaneWave
from cgolab.recovery import CoefficientField
from cgolab.structure import sample_V_xi
from cgolab.symtensor import SymTensor, dot, tensor_power

XI = np.array([0.4, -0.7, 1.1])


def random_poly(d, degree, rng, xi=None):
    terms = {}
    for _ in range(6):
        e = rng.integers(0, degree + 1, d)
        if e.sum() <= degree:
            terms[tuple(e)] = rng.standard_normal() + 1j * rng.standard_normal()
    return PolyPlaneWave(np.zeros(d) if xi is None else xi, terms)


def test_zero_terms_dropped():
    a = PolyPlaneWave([0, 0], {(1, 0): 0.0, (0, 1): 2.0})
    assert list(a.terms) == [(0, 1)]
    with pytest.raises(ValueError):
        PolyPlaneWave([0, 0], {(1,): 1})


def test_D_examples():
    a = PolyPlaneWave([0.0], {(1,): 1.0})
    assert C.apply_D(a, (1,)).terms == {(0,): -1j}
    e = PolyPlaneWave.constant(XI)
    out = C.apply_D(e, (1, 3, 3))
    assert out.terms[(0, 0, 0)] == pytest.approx(-XI[0] * XI[2] ** 2)
    with pytest.raises(ValueError):
        C.apply_D(e, (4,))


def test_D_mixed_term(rng):
    w = np.array([0.5, 1.0, -2.0])
    a = PolyPlaneWave.linear_power(w, 2, XI)
    expect = 2 * w[0] / 1j * PolyPlaneWave.linear_power(w, 1, XI) - XI[0] * a
    assert (a.D(0) - expect).is_zero(1e-14)


def test_gradient_matches_finite_differences(rng):
    a = random_poly(3, 4, rng, XI)
    x = rng.uniform(-1, 1, (20, 3))
    g = a.gradient(x)
    step = 1e-5
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        fd = (a.evaluate(x + e) - a.evaluate(x - e)) / (2 * step)
        assert np.max(np.abs(fd - g[:, j])) <= 1e-8 * max(1.0, np.max(np.abs(g)))


def test_transport_examples(rng):
    z = sample_V_xi(XI, rng)
    w = rng.standard_normal(3)
    for r in range(4):
        assert C.transport_residual(PolyPlaneWave.linear_power(w, r), z, r).is_zero(1e-13)
    assert C.transport_residual(PolyPlaneWave.constant(XI), z, 0).is_zero(1e-13)
    a = PolyPlaneWave.linear_power(w, 2, XI)
    assert C.transport_residual(a, z, 2).is_zero(1e-12)
    assert not C.transport_residual(a, z, 1).is_zero(1e-6)
    with pytest.raises(ValueError):
        C.transport_residual(a, z, -1)


def test_P_examples(rng):
    z = sample_V_xi(XI, rng).value
    assert C.apply_P_power(PolyPlaneWave.constant(np.zeros(3)), z, 0.3).is_zero()
    h = 0.3
    out = C.apply_P_power(PolyPlaneWave.constant(XI), z, h)
    assert out.terms[(0, 0, 0)] == pytest.approx(h**2 * XI @ XI - 2 * h * (z @ XI), abs=1e-14)
    # with zeta free, the plane-wave eigenvalue is p_zeta(-h xi)
    z2 = np.array([1, 1j, 0])
    out = C.apply_P_power(PolyPlaneWave.constant(XI), z2, h)
    assert out.terms[(0, 0, 0)] == pytest.approx(h**2 * XI @ XI - 2 * h * (z2 @ XI))
    with pytest.raises(ValueError):
        C.apply_P_power(PolyPlaneWave.constant(XI), z, 0.0)


def test_minimal_h_power_linear_amplitude(rng):
    z = sample_V_xi(XI, rng).value
    w = np.array([1.0, 0.5, 0.0])
    assert abs(z @ w) > 1e-3
    powers = C.p_power_expansion(PolyPlaneWave.linear_power(w, 1, XI), z, 2)
    assert min(p for p, t in powers.items() if not t.is_zero(1e-12)) == 3


@given(st.integers(0, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_transport_implies_h_power(r, m, seed):
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(3)
    z = sample_V_xi(xi, rng).value
    a = PolyPlaneWave.linear_power(rng.standard_normal(3), r, xi)
    powers = C.p_power_expansion(a, z, m)
    assert all(p >= 2 * m - r for p, t in powers.items() if not t.is_zero(1e-10 * max(1, a.max_coeff())))


def test_conjugated_term_examples(rng):
    z = sample_V_xi(XI, rng).value
    A = SymTensor.random(3, 2, rng)
    a = random_poly(3, 2, rng, XI)
    out = C.conjugated_term(A, z, 0.5, 2, a, 2)
    assert (out - (0.5**2 * dot(A, tensor_power(z, 2))) * a).is_zero(1e-13)
    A1 = SymTensor.random(3, 1, rng)
    w = rng.standard_normal(3)
    out = C.conjugated_term(A1, z, 1.0, 0, PolyPlaneWave.linear_power(w, 1), 1)
    assert out.terms == pytest.approx({(0, 0, 0): dot(A1, SymTensor(3, 1, w)) / 1j})
    with pytest.raises(ValueError):
        C.conjugated_term(A1, z, 1.0, 2, a, 1)


@pytest.mark.parametrize("m", [1, 2])
def test_conjugation_matches_oracle(m):
    rng = np.random.default_rng(7 + m)
    d = 2
    z = np.array([1.0, 1j])
    coeffs = C.OperatorCoefficients(m, [SymTensor.random(d, k, rng) for k in range(m + 1)])
    a = random_poly(d, 2, rng, np.array([0.3, -0.2]))
    h = 0.25
    sym = C.conjugated_operator(coeffs, z, h, a)
    for x in rng.uniform(-1, 1, (20, d)):
        ref = C.conjugation_oracle(coeffs, z, h, a, x)
        got = sym.evaluate(x)
        assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))


def test_operator_coefficients_validation(rng):
    with pytest.raises(ValueError):
        C.OperatorCoefficients(0)
    with pytest.raises(ValueError):
        C.OperatorCoefficients(2, [SymTensor.random(3, 1, rng)])


def test_transpose_constant_zeroth_order(rng):
    A0 = SymTensor.random(3, 0, rng)
    out = C.transpose_coefficients(C.OperatorCoefficients(2, [A0]))
    assert out[0].allclose(A0) and out[1] is None


def _fields_close(F, G, pts, tol=1e-12):
    a, b = F.grid_values(pts), G.grid_values(pts)
    return np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b)))


def test_transpose_first_order_field(rng):
    F = CoefficientField.random(3, 1, rng, degree=1)
    out = C.transpose_coefficients(C.OperatorCoefficients(1, [None, F]))
    pts = rng.standard_normal((10, 3))
    assert _fields_close(out[1], -1 * F, pts)
    xi_dot = np.array([[F.grid_values(p[None])[0] @ p] for p in pts])
    assert np.allclose(out[0].grid_values(pts), -xi_dot)


def test_transpose_round_trip(rng):
    m = 3
    coeffs = [None] * (m + 1)
    coeffs[1] = CoefficientField.random(3, 1, rng, degree=1)
    coeffs[3] = CoefficientField.random(3, 3, rng, degree=1)
    orig = C.OperatorCoefficients(m, coeffs)
    back = C.transpose_coefficients(C.transpose_coefficients(orig))
    pts = rng.standard_normal((10, 3))
    for k in range(m + 1):
        if orig[k] is None:
            assert back[k] is None or np.allclose(back[k].grid_values(pts), 0, atol=1e-10)
        else:
            assert _fields_close(back[k], orig[k], pts, 1e-10)


def test_transpose_rejects_opaque(rng):
    class Opaque:
        k = 1

    with pytest.raises(TypeError):
        C.transpose_coefficients(C.OperatorCoefficients(1, [None, Opaque()]))


def test_json_round_trip(rng):
    a = random_poly(3, 3, rng, XI)
    b = PolyPlaneWave.from_dict(json.loads(a.to_json()))
    assert b.terms == a.terms and np.array_equal(b.xi, a.xi)


def test_linear_power_evaluates(rng):
    w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    x = rng.standard_normal((5, 3))
    a = PolyPlaneWave.linear_power(w, 3, XI)
    assert np.allclose(a.evaluate(x), (x @ w) ** 3 * np.exp(-1j * x @ XI))
    assert a.degree == 3 and math.isclose(PolyPlaneWave(XI).degree, -1)
