import numpy as np
import pytest

from app.models.DomainModel import DomainSpec
from app.models.FieldFunctionModel import FieldFunction
from app.models.QuadratureConfigModel import QuadratureConfig, RuleSpec
from app.services.FunctionsService import dirac_image, function_from_spec
from app.services.InhomogeneousService import (
    check_compatibility,
    cutoff,
    hartogs_extend,
    hartogs_quadrature,
    hartogs_report,
    smooth_step,
    solve_inhomogeneous,
)
from app.utils.exceptions import ConfigurationError, DimensionMismatchError, DomainError

BUMP = "bump:0,0,0,0;0.5;1"


@pytest.fixture
def bump_system(hcj):
    F = function_from_spec(hcj, 2, BUMP)
    return F, [dirac_image(hcj, F, j) for j in (1, 2)]


@pytest.fixture
def volume_quad():
    return QuadratureConfig(volume=RuleSpec(q=16, panels=4))


def test_solution_recovers_bump(ctx2, bump_system, volume_quad):
    F, g = bump_system
    x = np.array([0.1, -0.05, 0.05, 0.1])
    assert np.allclose(solve_inhomogeneous(ctx2, g, x, volume_quad), F(x), atol=1e-3)


def test_solution_vanishes_off_support_projection(ctx2, bump_system, volume_quad):
    _, g = bump_system
    value = solve_inhomogeneous(ctx2, g, np.array([0.1, 0.0, 0.8, 0.0]), volume_quad)
    assert np.array_equal(value, np.zeros(4))


def test_system_shape_errors(hcj, ctx2, ctx_h1, bump_system):
    _, g = bump_system
    with pytest.raises(ConfigurationError):
        solve_inhomogeneous(ctx_h1, g[:1], np.zeros(4))
    with pytest.raises(DimensionMismatchError):
        solve_inhomogeneous(ctx2, g[:1], np.zeros(4))
    with pytest.raises(DimensionMismatchError):
        solve_inhomogeneous(ctx2, g, np.zeros(3))
    fueter = function_from_spec(hcj, 2, "fueter:1,1")
    with pytest.raises(ConfigurationError):
        solve_inhomogeneous(ctx2, [fueter, fueter], np.zeros(4))


def test_compatible_data(ctx2, bump_system):
    _, g = bump_system
    points = np.array([[0.1, 0.05, -0.1, 0.05], [-0.05, 0.1, 0.0, -0.1]])
    report = check_compatibility(ctx2, g, points)
    assert report.residual < 1e-5
    assert report.samples == 2


def test_incompatible_data(ctx2, bump_system):
    _, g = bump_system
    doubled = FieldFunction(eval=lambda y: 2.0 * g[1](y), label="2g2", n=2)
    report = check_compatibility(ctx2, [g[0], doubled], np.array([[0.1, 0.05, -0.1, 0.05]]))
    assert report.residual > 1e-3
    assert not report.passes(1e-5)


def test_smooth_step():
    values, slopes = smooth_step(np.array([-1.0, 0.0, 0.5, 1.0, 2.0]))
    assert np.allclose(values, [0.0, 0.0, 0.5, 1.0, 1.0])
    assert slopes[0] == 0.0 and slopes[-1] == 0.0
    assert slopes[2] > 0


def test_cutoff_plateau_and_decay():
    K = DomainSpec.cube(4, 0.3)
    value, gradient = cutoff(K, np.zeros(4))
    assert value == pytest.approx(1.0)
    assert np.allclose(gradient, 0.0)
    value, gradient = cutoff(K, np.array([0.9, 0.0, 0.0, 0.0]))
    assert value == 0.0
    assert np.allclose(gradient, 0.0)


def test_hartogs_rejects_bad_compact_set(hcj, ctx2, ctx_h1):
    f = function_from_spec(hcj, 2, "fueter:1,1")
    Omega = DomainSpec.cube(4, 1.0)
    with pytest.raises(DomainError):
        hartogs_extend(ctx2, Omega, DomainSpec.cube(4, 1.5), f)
    with pytest.raises(DomainError):
        hartogs_extend(ctx2, Omega, DomainSpec.cube(4, 0.9), f)
    with pytest.raises(ConfigurationError):
        hartogs_extend(ctx_h1, DomainSpec.cube(4, 1.0), DomainSpec.cube(4, 0.3), f)


def test_hartogs_extension_of_monogenic_polynomial(hcj, ctx2):
    f = function_from_spec(hcj, 2, "fueter:1,1")
    report = hartogs_report(ctx2, DomainSpec.cube(4, 1.0), DomainSpec.cube(4, 0.3), f,
                            count=3, Q=hartogs_quadrature())
    assert report.points_inside == 3 and report.points_outside == 3
    assert report.worst < 1e-2
