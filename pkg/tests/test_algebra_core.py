import numpy as np
import orjson
import pytest

from app.services.AlgebraCoreService import (
    algebra_law_residuals,
    associator,
    basis_labels,
    build_algebra,
    commutator,
    conj,
    is_imaginary_unit,
    load_algebra,
    mul,
    nonassociative_triples,
    norm_bound_constant,
    qnorm,
    quadratic_cone_contains,
    table_rows,
    trace,
    validate_algebra,
)
from app.services.HypercomplexService import subspace_preset
from app.utils.exceptions import AlgebraValidationError, ConfigurationError, DimensionMismatchError

COMPLEX_STRUCTURE = [[0, 0, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, -1]]


def test_quaternion_table_has_ij_equals_k():
    A = build_algebra("quaternions")
    rows = table_rows(A)
    assert "i*j = k" in rows
    assert "j*i = -k" in rows
    assert "i*i = -1" in rows
    np.testing.assert_array_equal(mul(A, A.basis(1), A.basis(2)), A.basis(3))


@pytest.mark.parametrize("kind, dim", [("complex", 2), ("quaternions", 4), ("octonions", 8),
                                       ("clifford(2)", 4), ("clifford(3)", 8)])
def test_builtin_algebras_are_alternative_star_algebras(kind, dim):
    A = build_algebra(kind)
    assert A.dim == dim
    assert validate_algebra(A).is_valid


def test_octonions_are_not_associative_but_quaternions_are():
    assert nonassociative_triples(build_algebra("octonions"), limit=1)
    assert not nonassociative_triples(build_algebra("quaternions"))


def test_octonion_laws_hold_on_random_elements():
    laws = algebra_law_residuals(build_algebra("octonions"), samples=500, seed=3)
    assert max(laws.values()) < 1e-12


def test_octonion_norm_is_multiplicative(rng):
    A = build_algebra("octonions")
    x, y = rng.standard_normal((2, 50, 8))
    lhs = np.linalg.norm(mul(A, x, y), axis=-1)
    np.testing.assert_allclose(lhs, np.linalg.norm(x, axis=-1) * np.linalg.norm(y, axis=-1), rtol=1e-12)
    np.testing.assert_allclose(qnorm(A, x)[:, 0], np.sum(x ** 2, axis=-1), rtol=1e-12)


def test_conjugation_reverses_products(rng):
    A = build_algebra("octonions")
    x, y = rng.standard_normal((2, 20, 8))
    np.testing.assert_allclose(conj(A, mul(A, x, y)), mul(A, conj(A, y), conj(A, x)), atol=1e-12)


def test_associator_vanishes_with_a_real_argument(rng):
    A = build_algebra("octonions")
    x, y = rng.standard_normal((2, 8))
    assert np.max(np.abs(associator(A, 2.5 * A.unit(), x, y))) < 1e-13


def test_mul_rejects_wrong_coefficient_count():
    A = build_algebra("quaternions")
    with pytest.raises(DimensionMismatchError):
        mul(A, [1.0, 0.0], A.unit())


def test_unknown_kind_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        build_algebra("sedenions")


def test_load_algebra_accepts_a_valid_file(tmp_path):
    path = tmp_path / "complex.json"
    path.write_bytes(orjson.dumps({"dim": 2, "name": "C", "structure": COMPLEX_STRUCTURE,
                                   "involution": [[0, 0, 1], [1, 1, -1]]}))
    A = load_algebra(str(path))
    assert A.name == "C"
    np.testing.assert_array_equal(mul(A, A.basis(1), A.basis(1)), -A.unit())


def test_load_algebra_names_the_violated_invariant(tmp_path):
    path = tmp_path / "broken.json"
    path.write_bytes(orjson.dumps({"dim": 2, "structure": COMPLEX_STRUCTURE,
                                   "involution": [[0, 0, -1], [1, 1, -1]]}))
    with pytest.raises(AlgebraValidationError) as error:
        load_algebra(str(path))
    assert error.value.invariant == "involution_fixes_unit"


def test_load_algebra_rejects_missing_fields(tmp_path):
    path = tmp_path / "partial.json"
    path.write_bytes(orjson.dumps({"dim": 2, "structure": COMPLEX_STRUCTURE}))
    with pytest.raises(AlgebraValidationError):
        load_algebra(str(path))


def test_norm_bound_is_one_for_quaternions():
    M = subspace_preset("H-full")
    estimate, used = norm_bound_constant(M.algebra, M, samples=200, seed=1)
    assert used == 200
    assert abs(estimate - 1.0) < 1e-9


def test_norm_bound_rejects_foreign_subspace():
    with pytest.raises(DimensionMismatchError):
        norm_bound_constant(build_algebra("complex"), subspace_preset("H-CJ"), samples=10)


def test_commutator_of_quaternion_units():
    A = build_algebra("quaternions")
    np.testing.assert_array_equal(commutator(A, A.basis(1), A.basis(2)), 2.0 * A.basis(3))


def test_imaginary_units_and_quadratic_cone():
    A = build_algebra("quaternions")
    assert is_imaginary_unit(A, A.basis(1))
    assert not is_imaginary_unit(A, np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2.0))
    assert quadratic_cone_contains(A, np.array([1.0, 1.0, 0.0, 0.0]))
    assert quadratic_cone_contains(A, np.array([3.0, 0.0, 0.0, 0.0]))


def test_file_dict_reloads_the_same_table(tmp_path):
    A = build_algebra("octonions")
    path = tmp_path / "octonions.json"
    path.write_bytes(orjson.dumps(A.to_file_dict()))
    B = load_algebra(str(path))
    np.testing.assert_array_equal(B.table, A.table)
    assert validate_algebra(B).is_valid


def test_trace_and_labels():
    A = build_algebra("quaternions")
    assert basis_labels(A) == ["1", "i", "j", "k"]
    np.testing.assert_allclose(trace(A, np.array([1.0, 2.0, 3.0, -1.0])), [2.0, 0.0, 0.0, 0.0])
