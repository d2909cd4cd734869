import numpy as np
import pytest

from app.models.FieldFunctionModel import DiracMethod
from app.services.FunctionsService import (
    catalog,
    cauchy_pullback,
    conj_dirac_apply,
    dirac_apply,
    dirac_image,
    function_from_spec,
    fueter,
    is_monogenic_at,
    laplacian_apply,
    laplacian_via_dirac,
    poly_x0_sq,
    right_dirac_apply,
    right_module_residual,
)
from app.utils.exceptions import ConfigurationError, IndexRangeError


@pytest.fixture
def points(rng):
    return rng.uniform(-0.8, 0.8, size=(6, 4))


def test_fueter_variable_is_monogenic(hcj, points):
    f = fueter(hcj, 2, 1, 1)
    ok, residual = is_monogenic_at(hcj, f, points, method=DiracMethod.FD)
    assert ok, residual


def test_cauchy_pullback_is_monogenic_away_from_its_pole(hcj, points):
    f = cauchy_pullback(hcj, 2, 1, [2.5, 0.0])
    ok, residual = is_monogenic_at(hcj, f, points, tol=1e-6, method=DiracMethod.FD)
    assert ok, residual


def test_fueter_with_octonion_coefficient_is_monogenic(ofull, rng):
    a = rng.standard_normal(8)
    f = fueter(ofull, 1, 1, 3, a)
    ok, residual = is_monogenic_at(ofull, f, rng.uniform(-0.5, 0.5, size=(4, 8)), method=DiracMethod.FD)
    assert ok, residual


def test_analytic_and_fd_dirac_agree(hcj, points):
    f = poly_x0_sq(hcj, 2, 1)
    analytic = dirac_apply(hcj, f, 1, points).value
    fd = dirac_apply(hcj, f, 1, points, method=DiracMethod.FD).value
    np.testing.assert_allclose(fd, analytic, atol=1e-8)
    # dbar_1 x_{1,0}^2 = 2 x_{1,0}
    np.testing.assert_allclose(analytic[:, 0], 2.0 * points[:, 0], atol=1e-12)


def test_fueter_variable_is_harmonic(hcj, points):
    f = fueter(hcj, 2, 2, 1)
    laplacian = laplacian_apply(hcj, f, 2, points).value
    assert np.max(np.abs(laplacian)) < 1e-5


def test_right_module_in_associative_algebra(hfull, rng):
    f = fueter(hfull, 1, 1, 2)
    a = rng.standard_normal(4)
    assert right_module_residual(hfull, f, a, rng.uniform(-0.5, 0.5, size=(3, 4))) < 1e-7


def test_right_module_fails_for_octonions(ofull, rng):
    # f = x_1 b - x_0 (e_1 b); dbar_1 (f a) is the associator [e_1, b, a] up to sign
    f = fueter(ofull, 1, 1, 1, a=rng.standard_normal(8))
    a = rng.standard_normal(8)
    assert right_module_residual(ofull, f, a, rng.uniform(-0.5, 0.5, size=(3, 8))) > 1e-2


def test_dirac_image_keeps_support(hcj):
    F = function_from_spec(hcj, 2, "bump:0,0,0,0;0.5;1")
    g = dirac_image(hcj, F, 2)
    assert g.support is not None
    np.testing.assert_array_equal(g(np.array([0.9, 0.0, 0.0, 0.0])), np.zeros(4))


def test_function_specs(hcj):
    S = hcj
    f = function_from_spec(S, 2, "constant:1,2,0,0")
    np.testing.assert_array_equal(f(np.zeros(4)), [1.0, 2.0, 0.0, 0.0])
    with pytest.raises(ConfigurationError):
        function_from_spec(S, 2, "sine:1")
    with pytest.raises(ConfigurationError):
        function_from_spec(S, 2, "fueter:1,0")
    with pytest.raises(IndexRangeError):
        function_from_spec(S, 2, "fueter:3,1")


def test_laplacian_two_ways(hcj, points):
    f = poly_x0_sq(hcj, 2, 1)
    direct = laplacian_apply(hcj, f, 1, points).value
    factored = laplacian_via_dirac(hcj, f, 1, points).value
    np.testing.assert_allclose(direct[:, 0], 2.0, atol=1e-5)
    np.testing.assert_allclose(factored, direct, atol=1e-5)


def test_catalog_lookup(hcj):
    f = catalog(hcj, "coordinate", 2, j=2, s=1)
    np.testing.assert_array_equal(f(np.array([0.0, 0.0, 0.0, 3.0])), [3.0, 0.0, 0.0, 0.0])
    with pytest.raises(ConfigurationError):
        catalog(hcj, "sine", 2)
    with pytest.raises(ConfigurationError):
        catalog(hcj, "coordinate", 2, j=1)


def test_conjugate_and_right_operators_on_a_coordinate(hcj, points):
    f = catalog(hcj, "coordinate", 2, j=1, s=1)
    v1 = hcj.basis_vectors[1]
    np.testing.assert_allclose(conj_dirac_apply(hcj, f, 1, points).value, np.broadcast_to(-v1, (6, 4)), atol=1e-8)
    np.testing.assert_allclose(right_dirac_apply(hcj, f, 1, points).value, np.broadcast_to(v1, (6, 4)), atol=1e-8)
    np.testing.assert_allclose(conj_dirac_apply(hcj, f, 2, points).value, 0.0, atol=1e-8)
