import numpy as np
import pytest
from sklearn.base import clone

from cgolab import multiindex as mi
from cgolab.estimators import JetValueProjector, StructureDecomposer
from cgolab.symtensor import SymTensor, identity2, tensor_product


def structured_rows(n, xi, rng, d=3, k=3):
    rows = []
    for _ in range(n):
        A = tensor_product(SymTensor(d, 1, xi), SymTensor.random(d, k - 1, rng))
        A = A + tensor_product(identity2(d), SymTensor.random(d, k - 2, rng))
        rows.append(A.components)
    return np.array(rows)


def test_decomposer_round_trip(rng):
    xi = (1.0, 2.0, -1.0)
    X = structured_rows(5, np.array(xi), rng)
    est = StructureDecomposer(d=3, k=3, xi=xi).fit(X)
    Z = est.transform(X)
    assert Z.shape == (5, mi.sym_dim(3, 1) + mi.sym_dim(3, 2))
    assert np.max(est.residuals_) < 1e-10
    assert np.allclose(est.inverse_transform(Z), X, atol=1e-10)


def test_decomposer_params_and_validation(rng):
    est = StructureDecomposer(d=3, k=2)
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(ValueError):
        StructureDecomposer(d=3, k=2, xi=(1.0, 0.0)).fit()
    with pytest.raises(ValueError):
        StructureDecomposer(k=0).fit()
    with pytest.raises(ValueError):
        est.fit().transform(np.zeros((2, 5)))


def test_decomposer_not_fitted():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        StructureDecomposer().transform(np.zeros((1, 6)))


def test_projector_k2():
    xi = np.array([0.0, 0.0, 1.0])
    proj = JetValueProjector(d=3, k=2, R=1).fit()
    assert proj.value_dim_ == 1
    xi2 = tensor_product(SymTensor(3, 1, xi), SymTensor(3, 1, xi)).components
    X = np.vstack([xi2, identity2(3).components])
    Y = proj.transform(X)
    assert np.allclose(Y[0], xi2)
    assert np.allclose(Y[1], xi2)  # I2 projects onto its e3 e3 part
    assert np.max(proj.predicted_angles()) < 1e-8


def test_projector_idempotent(rng):
    proj = JetValueProjector(d=3, k=3, R=1).fit()
    X = rng.standard_normal((4, mi.sym_dim(3, 3)))
    Y = proj.transform(X)
    assert np.allclose(proj.transform(Y), Y, atol=1e-12)
    assert proj.value_dim_ == 4


def test_projector_outside_window():
    proj = JetValueProjector(d=3, k=1, R=1).fit()
    assert proj.value_dim_ == 0 and proj.predicted_angles() is None
    assert np.allclose(proj.transform(np.ones((1, 3))), 0)
