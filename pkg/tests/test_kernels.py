import numpy as np
import pytest

from app.services.KernelService import (
    associator_lemma_residual,
    bm_component,
    bm_divergence,
    bm_pair,
    build_kernel_context,
    cauchy_kernel,
    divergence_fd_residual,
    divergence_residual,
    fundamental_solution,
    gradient_relation_residual,
    harmonic_residual,
    kernel_subspace_residual,
    right_divergence_residual,
)
from app.services.TheoremService import shell_points
from app.utils.exceptions import ConfigurationError, SingularityError


def test_divergence_cancels_in_closed_form(ctx2, ofull):
    assert divergence_residual(ctx2, shell_points(4, 500, 1)) < 1e-13
    ctx = build_kernel_context(ofull, 2)
    assert divergence_residual(ctx, shell_points(16, 500, 2)) < 1e-13


def test_divergence_matches_finite_differences(ctx2):
    points = shell_points(4, 20, 3)
    assert divergence_fd_residual(ctx2, points) < 1e-7
    assert right_divergence_residual(ctx2, points) < 1e-7


def test_kernels_are_harmonic_gradients_of_the_fundamental_solution(ctx2):
    points = shell_points(4, 20, 4)
    assert harmonic_residual(ctx2, points) < 1e-5
    assert gradient_relation_residual(ctx2, points) < 1e-7


def test_associator_lemma_for_octonions(ofull, rng):
    ctx = build_kernel_context(ofull, 1)
    a = rng.standard_normal(8)
    assert associator_lemma_residual(ctx, 1, shell_points(8, 50, 5), a) < 1e-10


def test_kernel_values_stay_in_the_subspace(ctx2):
    assert kernel_subspace_residual(ctx2, shell_points(4, 50, 6)) < 1e-14


def test_fundamental_solution_in_four_dimensions(ctx2):
    value = fundamental_solution(ctx2, np.array([1.0, 0.0, 0.0, 0.0]))
    assert value == pytest.approx(-1.0 / (4.0 * np.pi ** 2), rel=1e-12)


def test_cauchy_kernel_of_quaternions(ctx_h1):
    value = cauchy_kernel(ctx_h1, np.array([2.0, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(value, [1.0 / (2.0 * np.pi ** 2 * 8.0), 0.0, 0.0, 0.0], rtol=1e-12)


def test_kernels_reject_the_origin_and_bad_contexts(ctx2):
    with pytest.raises(SingularityError):
        bm_component(ctx2, 1, np.zeros(4))
    with pytest.raises(ConfigurationError):
        cauchy_kernel(ctx2, np.ones(2))


def test_divergence_terms_on_a_coordinate_axis(ctx2):
    total, per_j = bm_divergence(ctx2, np.array([1.0, 0.0, 0.0, 0.0]))
    np.testing.assert_allclose(per_j[:, 0], [-1.0 / np.pi ** 2, 1.0 / np.pi ** 2], rtol=1e-12)
    np.testing.assert_allclose(total, 0.0, atol=1e-15)


def test_pair_for_a_single_node(ctx2):
    y = np.array([[2.0, 0.0, 0.0, 0.0]])
    value = bm_pair(ctx2, np.zeros(4), y, np.array([[1.0, 0.0, 0.0, 0.0]]), np.array([[1.0, 0.0, 0.0, 0.0]]),
                    np.array([1.0]))
    np.testing.assert_allclose(value[0], bm_component(ctx2, 1, y[0]), rtol=1e-12)
    assert value[0, 0] == pytest.approx(1.0 / (16.0 * np.pi ** 2))
    with pytest.raises(SingularityError):
        bm_pair(ctx2, y[0], y, np.ones((1, 4)), np.ones((1, 4)), np.array([1.0]))
