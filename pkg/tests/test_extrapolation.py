import numpy as np
import pytest

from app.utils.exceptions import ConfigurationError
from app.utils.extrapolation import extrapolate_to_zero

STEPS = np.array([0.4, 0.2, 0.1, 0.05])


def test_linear_ladder():
    result = extrapolate_to_zero(STEPS, 3.0 + 2.0 * STEPS)
    assert result.value[0] == pytest.approx(3.0, abs=1e-8)
    assert result.rate == pytest.approx(1.0, abs=1e-4)


def test_quadratic_ladder_with_vector_values():
    values = np.stack([1.0 + STEPS ** 2, -2.0 + 0.5 * STEPS ** 2], axis=-1)
    result = extrapolate_to_zero(STEPS, values)
    np.testing.assert_allclose(result.value, [1.0, -2.0], atol=1e-8)
    assert result.rate == pytest.approx(2.0, abs=1e-4)


def test_flat_ladder_returns_the_last_value():
    result = extrapolate_to_zero(STEPS, np.full(4, 0.5))
    assert result.value[0] == 0.5
    assert result.est_error == 0.0


def test_without_extrapolation_the_finest_value_is_used():
    result = extrapolate_to_zero(STEPS, 3.0 + STEPS, extrapolate=False)
    assert result.value[0] == pytest.approx(3.05)
    assert result.est_error == pytest.approx(0.05)


@pytest.mark.parametrize("steps", [[0.1, 0.2, 0.4], [0.4, -0.2, 0.1], []])
def test_bad_steps(steps):
    with pytest.raises(ConfigurationError):
        extrapolate_to_zero(steps, np.ones(len(steps)))
