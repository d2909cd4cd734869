import numpy as np
import pytest

from app.models.DomainModel import DomainSpec, NodeBatch
from app.models.QuadratureConfigModel import QuadratureConfig, RuleSpec
from app.services.QuadratureService import (
    boundary_nodes,
    integrate_batches,
    integrate_boundary,
    integrate_volume,
    near_boundary_nodes,
    target_boundary_nodes,
    total_weight,
    volume_nodes,
    volume_nodes_around,
)
from app.utils.exceptions import QuadratureError, SingularityError


def small(q=4, **extra):
    return QuadratureConfig(boundary=RuleSpec(q=q, **extra), volume=RuleSpec(q=q, **extra))


def test_box_rules_measure_area_and_volume(cube4):
    assert total_weight(boundary_nodes(cube4, small())) == pytest.approx(64.0, rel=1e-13)
    assert total_weight(volume_nodes(cube4, small())) == pytest.approx(16.0, rel=1e-13)


@pytest.mark.parametrize("dim, area, volume", [(3, 4.0 * np.pi, 4.0 * np.pi / 3.0),
                                               (4, 2.0 * np.pi ** 2, np.pi ** 2 / 2.0)])
def test_ball_rules_measure_area_and_volume(dim, area, volume):
    ball = DomainSpec.ball(np.zeros(dim), 1.0)
    assert total_weight(boundary_nodes(ball, small(8))) == pytest.approx(area, rel=1e-12)
    assert total_weight(volume_nodes(ball, small(8))) == pytest.approx(volume, rel=1e-12)


def test_monte_carlo_weights_add_up_to_the_area(cube4):
    Q = QuadratureConfig(boundary=RuleSpec(rule="mc", samples=5000))
    assert total_weight(boundary_nodes(cube4, Q)) == pytest.approx(64.0, rel=1e-12)


def test_polynomial_volume_integral_is_exact(cube4):
    value = integrate_volume(cube4, small(), lambda batch: batch.points[:, 0] ** 2)
    assert value[0] == pytest.approx(16.0 / 3.0, rel=1e-13)


def test_exclusion_at_a_face_center_removes_a_ball(cube4):
    x = np.array([1.0, 0.0, 0.0, 0.0])
    eps = 0.2
    weight = total_weight(near_boundary_nodes(cube4, small(12), x, exclusion=eps))
    assert weight == pytest.approx(64.0 - 4.0 / 3.0 * np.pi * eps ** 3, abs=1e-9)


def test_exclusion_at_a_corner_removes_four_octants(cube4):
    x = np.ones(4)
    eps = 0.3
    weight = total_weight(near_boundary_nodes(cube4, small(12), x, exclusion=eps))
    assert weight == pytest.approx(64.0 - 4.0 * (1.0 / 8.0) * 4.0 / 3.0 * np.pi * eps ** 3, abs=1e-9)


def test_exclusion_may_not_reach_other_faces(cube4):
    x = np.array([1.0, 0.9, 0.0, 0.0])
    with pytest.raises(QuadratureError):
        total_weight(near_boundary_nodes(cube4, small(), x, exclusion=0.2))


def test_boundary_targets_need_a_principal_value(cube4):
    with pytest.raises(SingularityError):
        target_boundary_nodes(cube4, small(), np.array([1.0, 0.0, 0.0, 0.0]))


def test_near_rule_integrates_smooth_functions(cube4):
    x = np.array([0.95, 0.1, -0.2, 0.0])
    Q = small(12)
    near = integrate_batches(near_boundary_nodes(cube4, Q, x), lambda batch: batch.points[:, 1] ** 2).value
    plain = integrate_boundary(cube4, Q, lambda batch: batch.points[:, 1] ** 2)
    np.testing.assert_allclose(near, plain, rtol=1e-10)


def test_star_rule_about_an_interior_apex(cube4):
    apex = np.array([0.3, -0.2, 0.5, 0.1])
    assert total_weight(volume_nodes_around(cube4, small(), apex)) == pytest.approx(16.0, rel=1e-13)
    ball = DomainSpec.ball(np.zeros(4), 1.0)
    assert total_weight(volume_nodes_around(ball, small(12), apex * 0.5)) == pytest.approx(np.pi ** 2 / 2.0,
                                                                                           rel=1e-6)


def test_reduction_does_not_depend_on_threads(cube4):
    Q = small(16)
    g = lambda batch: np.sin(batch.points[:, :2]).sum(axis=-1)
    single = integrate_batches(boundary_nodes(cube4, Q), g, threads=1).value
    pooled = integrate_batches(boundary_nodes(cube4, Q), g, threads=4).value
    np.testing.assert_array_equal(single, pooled)


def test_non_finite_integrand_names_the_node():
    batch = NodeBatch(points=np.zeros((3, 2)), weights=np.ones(3), normals=None, offset=10)
    with pytest.raises(QuadratureError) as error:
        integrate_batches([batch], lambda b: np.array([1.0, np.nan, 1.0]))
    assert error.value.context["node"] == 11
