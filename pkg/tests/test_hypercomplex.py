import numpy as np
import pytest

from app.services.HypercomplexService import (
    anticommutation_residual,
    blocks,
    build_subspace,
    embed,
    embed_all,
    subspace_preset,
    trace_inner_product_residual,
    validate_basis,
)
from app.utils.constants import SUBSPACE_PRESETS
from app.utils.exceptions import ConfigurationError, DimensionMismatchError, IndexRangeError


@pytest.mark.parametrize("name", SUBSPACE_PRESETS)
def test_presets_satisfy_the_basis_conditions(name):
    S = subspace_preset(name)
    assert validate_basis(S).is_valid
    assert anticommutation_residual(S) < 1e-14
    assert trace_inner_product_residual(S, samples=50) < 1e-12


def test_unknown_preset():
    with pytest.raises(ConfigurationError):
        subspace_preset("H-half")


def test_embedding_picks_the_requested_block(hcj):
    coords = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(embed(hcj, 1, coords, n=2), [1.0, 2.0, 0.0, 0.0])
    np.testing.assert_array_equal(embed(hcj, 2, coords, n=2), [3.0, 4.0, 0.0, 0.0])
    assert embed_all(hcj, 2, np.zeros((5, 4))).shape == (5, 2, 4)


def test_embedding_checks_indices_and_shapes(hcj):
    with pytest.raises(IndexRangeError):
        embed(hcj, 3, np.zeros(4), n=2)
    with pytest.raises(DimensionMismatchError):
        blocks(hcj, 2, np.zeros(5))


def test_custom_subspace_validation(hfull):
    A = hfull.algebra
    r = 1.0 / np.sqrt(2.0)
    assert validate_basis(build_subspace(A, [[1, 0, 0, 0], [0, r, r, 0]])).is_valid
    report = validate_basis(build_subspace(A, [[1, 0, 0, 0], [r, r, 0, 0]]))
    assert not report.is_valid
    assert "trace_zero" in [violation["condition"] for violation in report.violations]
