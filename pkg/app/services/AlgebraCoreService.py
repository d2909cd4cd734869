"""Arithmetic in finite-dimensional real alternative *-algebras.

Elements are coefficient arrays of shape ``(..., dim)``; every operation here
broadcasts over leading axes so quadrature code can multiply whole node
batches at once.
"""
import itertools
import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import orjson
from scipy.optimize import minimize

from app.models.AlgebraModel import AlgebraReport, AlgebraSpec
from app.models.SubspaceModel import SubspaceSpec
from app.utils.constants import SCALAR_TOL, TABLE_TOL
from app.utils.exceptions import AlgebraValidationError, AlternaException, ConfigurationError, DimensionMismatchError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[float]]


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _cd_conj(x: np.ndarray) -> np.ndarray:
    if x.shape[-1] == 1:
        return x.copy()
    half = x.shape[-1] // 2
    return np.concatenate([_cd_conj(x[:half]), -x[half:]])


def _cd_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # (a,b)(c,d) = (ac - d^c b, da + b c^c)
    if x.shape[-1] == 1:
        return x * y
    half = x.shape[-1] // 2
    a, b = x[:half], x[half:]
    c, d = y[:half], y[half:]
    return np.concatenate([
        _cd_mul(a, c) - _cd_mul(_cd_conj(d), b),
        _cd_mul(d, a) + _cd_mul(b, _cd_conj(c)),
    ])


def _cayley_dickson(levels: int, name: str, labels: Sequence[str]) -> AlgebraSpec:
    dim = 2 ** levels
    structure = []
    for s, t in itertools.product(range(dim), repeat=2):
        product = _cd_mul(np.eye(dim)[s], np.eye(dim)[t])
        for u in np.flatnonzero(product):
            structure.append((s, t, int(u), int(round(product[u]))))
    involution = tuple((s, 1 if s == 0 else -1) for s in range(dim))
    return AlgebraSpec(dim=dim, name=name, structure=tuple(structure), involution=involution, labels=tuple(labels))


def clifford_blades(m: int) -> List[Tuple[int, ...]]:
    """Blades of Cl(0,m) ordered by (grade, lexicographic)."""
    return [blade for grade in range(m + 1) for blade in itertools.combinations(range(1, m + 1), grade)]


def _blade_product(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    # bubble-sort the concatenated indices counting swaps, then cancel e_i e_i = -1
    word = list(a) + list(b)
    sign = 1
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                word[j], word[j + 1] = word[j + 1], word[j]
                sign = -sign
    result = []
    for index in word:
        if result and result[-1] == index:
            result.pop()
            sign = -sign
        else:
            result.append(index)
    return sign, tuple(result)


def _clifford(m: int) -> AlgebraSpec:
    if m < 1:
        raise ConfigurationError(f"clifford(m) requires m >= 1, got {m}")
    blades = clifford_blades(m)
    index = {blade: i for i, blade in enumerate(blades)}
    structure = []
    for (s, a), (t, b) in itertools.product(enumerate(blades), repeat=2):
        sign, blade = _blade_product(a, b)
        structure.append((s, t, index[blade], sign))
    # Clifford conjugation: grade k picks up (-1)^{k(k+1)/2}
    involution = tuple((s, -1 if (len(blade) * (len(blade) + 1) // 2) % 2 else 1) for s, blade in enumerate(blades))
    labels = ["1"] + ["e" + "".join(str(i) for i in blade) for blade in blades[1:]]
    return AlgebraSpec(dim=len(blades), name=f"clifford({m})", structure=tuple(structure),
                       involution=involution, labels=tuple(labels))


@lru_cache(maxsize=16)
def _builtin(kind: str, m: Optional[int] = None) -> AlgebraSpec:
    if kind == "complex":
        return _cayley_dickson(1, "complex", ["1", "i"])
    if kind == "quaternions":
        return _cayley_dickson(2, "quaternions", ["1", "i", "j", "k"])
    if kind == "octonions":
        return _cayley_dickson(3, "octonions", ["1"] + [f"e{s}" for s in range(1, 8)])
    if kind == "clifford":
        return _clifford(int(m))
    raise ConfigurationError(f"Unknown algebra kind: {kind}")


def parse_kind(kind: str) -> Tuple[str, Optional[int]]:
    """Accept ``quaternions``, ``clifford(3)``, ``clifford:3`` and ``cl3``."""
    text = kind.strip().lower()
    aliases = {"c": "complex", "h": "quaternions", "o": "octonions", "quaternion": "quaternions",
               "octonion": "octonions"}
    text = aliases.get(text, text)
    if text.startswith("clifford"):
        digits = "".join(ch for ch in text[len("clifford"):] if ch.isdigit())
        if not digits:
            raise ConfigurationError(f"clifford algebra needs m, e.g. clifford(3): {kind}")
        return "clifford", int(digits)
    if text.startswith("cl") and text[2:].isdigit():
        return "clifford", int(text[2:])
    return text, None


def build_algebra(kind: str, path: Optional[str] = None) -> AlgebraSpec:
    try:
        if kind == "from_file" or path is not None:
            return load_algebra(path)
        name, m = parse_kind(kind)
        algebra = _builtin(name, m)
        report = validate_algebra(algebra)
        if not report.is_valid:
            first = report.errors[0]
            raise AlgebraValidationError(first["detail"], invariant=first["invariant"])
        logger.debug(f"Built algebra {algebra.name} (dim {algebra.dim})")
        return algebra
    except AlternaException:
        raise
    except Exception as e:
        raise ConfigurationError(f"Failed to build algebra {kind}: {str(e)}")


def load_algebra(path: Optional[str]) -> AlgebraSpec:
    if not path:
        raise ConfigurationError("from_file requires a path")
    try:
        raw = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError:
        raise ConfigurationError(f"Algebra file not found: {path}")
    except orjson.JSONDecodeError as e:
        raise AlgebraValidationError(f"Algebra file is not valid JSON: {str(e)}", invariant="format")
    return algebra_from_dict(raw)


def algebra_from_dict(raw: Dict) -> AlgebraSpec:
    for key in ("dim", "structure", "involution"):
        if key not in raw:
            raise AlgebraValidationError(f"Missing field '{key}'", invariant="format")
    dim = int(raw["dim"])
    if dim < 1:
        raise AlgebraValidationError(f"dim must be positive, got {dim}", invariant="format")
    structure = []
    for entry in raw["structure"]:
        if len(entry) != 4:
            raise AlgebraValidationError(f"Structure entry {entry} is not [s,t,u,value]", invariant="format")
        s, t, u, value = int(entry[0]), int(entry[1]), int(entry[2]), float(entry[3])
        if not all(0 <= i < dim for i in (s, t, u)):
            raise AlgebraValidationError(f"Structure entry {entry} indexes outside dim {dim}", invariant="format")
        structure.append((s, t, u, value))
    involution = [None] * dim
    for entry in raw["involution"]:
        s, target, sign = int(entry[0]), int(entry[1]), int(entry[2])
        if not (0 <= s < dim and 0 <= target < dim) or sign not in (1, -1):
            raise AlgebraValidationError(f"Involution entry {entry} is not a signed permutation entry",
                                         invariant="involution_signed_permutation")
        involution[s] = (target, sign)
    if any(entry is None for entry in involution):
        missing = [s for s, entry in enumerate(involution) if entry is None]
        raise AlgebraValidationError(f"Involution missing basis indices {missing}",
                                     invariant="involution_signed_permutation")
    algebra = AlgebraSpec(dim=dim, name=str(raw.get("name", "loaded")), structure=tuple(structure),
                          involution=tuple(involution))
    report = validate_algebra(algebra)
    if not report.is_valid:
        first = report.errors[0]
        raise AlgebraValidationError(first["detail"], invariant=first["invariant"], violations=report.errors)
    return algebra


def validate_algebra(A: AlgebraSpec) -> AlgebraReport:
    errors = []
    C = A.table
    eye = np.eye(A.dim)

    # 1. Two-sided unit
    unit_left = np.max(np.abs(C[0] - eye))
    unit_right = np.max(np.abs(C[:, 0, :] - eye))
    if max(unit_left, unit_right) > TABLE_TOL:
        errors.append({"invariant": "unit", "residual": float(max(unit_left, unit_right)),
                       "detail": "v0 is not a two-sided unit"})

    # 2. Involution fixes v0 and is an involution
    P = A.conj_matrix
    if abs(P[0, 0] - 1.0) > TABLE_TOL:
        errors.append({"invariant": "involution_fixes_unit", "residual": float(abs(P[0, 0] - 1.0)),
                       "detail": "involution does not fix v0"})
    square = np.max(np.abs(P @ P - eye))
    if square > TABLE_TOL:
        errors.append({"invariant": "involution_square", "residual": float(square),
                       "detail": "involution does not square to the identity"})

    # 3. (v_s v_t)^c = v_t^c v_s^c on basis pairs
    lhs = np.einsum('stu,vu->stv', C, P)
    rhs = np.einsum('at,bs,abu->stu', P, P, C)
    anti = np.max(np.abs(lhs - rhs))
    if anti > TABLE_TOL:
        s, t, _ = np.unravel_index(np.argmax(np.abs(lhs - rhs)), lhs.shape)
        errors.append({"invariant": "anti_homomorphism", "residual": float(anti), "indices": [int(s), int(t)],
                       "detail": f"(v{s} v{t})^c != v{t}^c v{s}^c"})

    # 4. Alternativity on the basis
    left_alt = alt_residuals(A, left=True)
    right_alt = alt_residuals(A, left=False)
    if max(left_alt, right_alt) > TABLE_TOL:
        errors.append({"invariant": "alternativity", "residual": float(max(left_alt, right_alt)),
                       "detail": "[v_s, v_s, v_t] or [v_s, v_t, v_t] does not vanish"})

    for error in errors:
        logger.warning(f"❌ Algebra {A.name}: {error['detail']} (residual {error['residual']:.3e})")
    return AlgebraReport(is_valid=not errors, errors=errors)


def alt_residuals(A: AlgebraSpec, left: bool = True) -> float:
    worst = 0.0
    for s, t in itertools.product(range(A.dim), repeat=2):
        x, y = A.basis(s), A.basis(t)
        value = associator(A, x, x, y) if left else associator(A, x, y, y)
        worst = max(worst, float(np.max(np.abs(value))))
    return worst


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

def mul(A: AlgebraSpec, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    x = A.check(x, "x")
    y = A.check(y, "y")
    # L_x[t, u] = sum_s x_s c[s][t][u]
    left = np.tensordot(x, A.table, axes=([-1], [0]))
    return np.einsum('...t,...tu->...u', y, left)


def left_matrix(A: AlgebraSpec, x: ArrayLike) -> np.ndarray:
    """Matrix of y -> x y acting on coefficient column vectors."""
    x = A.check(x, "x")
    return np.swapaxes(np.tensordot(x, A.table, axes=([-1], [0])), -1, -2)


def conj(A: AlgebraSpec, x: ArrayLike) -> np.ndarray:
    x = A.check(x, "x")
    return x @ A.conj_matrix.T


def trace(A: AlgebraSpec, x: ArrayLike) -> np.ndarray:
    x = A.check(x, "x")
    return x + conj(A, x)


def qnorm(A: AlgebraSpec, x: ArrayLike) -> np.ndarray:
    return mul(A, x, conj(A, x))


def associator(A: AlgebraSpec, x: ArrayLike, y: ArrayLike, z: ArrayLike) -> np.ndarray:
    return mul(A, mul(A, x, y), z) - mul(A, x, mul(A, y, z))


def commutator(A: AlgebraSpec, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    return mul(A, x, y) - mul(A, y, x)


def is_real_scalar(A: AlgebraSpec, x: ArrayLike, tol: float = SCALAR_TOL) -> bool:
    x = A.check(x)
    return bool(np.all(np.abs(np.delete(x, A.unit_index, axis=-1)) <= tol))


def is_imaginary_unit(A: AlgebraSpec, x: ArrayLike, tol: float = SCALAR_TOL) -> bool:
    t = trace(A, x)
    n = qnorm(A, x)
    return (is_real_scalar(A, t, tol) and abs(t[A.unit_index]) <= tol
            and is_real_scalar(A, n, tol) and abs(n[A.unit_index] - 1.0) <= tol)


def quadratic_cone_contains(A: AlgebraSpec, x: ArrayLike, tol: float = SCALAR_TOL) -> bool:
    x = A.check(x)
    if is_real_scalar(A, x, tol):
        return True
    t = trace(A, x)
    n = qnorm(A, x)
    if not (is_real_scalar(A, t, tol) and is_real_scalar(A, n, tol)):
        return False
    return bool(4.0 * n[A.unit_index] > t[A.unit_index] ** 2)


def basis_labels(A: AlgebraSpec) -> List[str]:
    return list(A.labels)


def table_rows(A: AlgebraSpec) -> List[str]:
    """Rows such as ``i*j = k`` for every basis pair."""
    rows = []
    labels = basis_labels(A)
    for s, t in itertools.product(range(A.dim), repeat=2):
        product = A.table[s, t]
        terms = []
        for u in np.flatnonzero(np.abs(product) > TABLE_TOL):
            value = product[u]
            if value == 1.0:
                terms.append(labels[u])
            elif value == -1.0:
                terms.append(f"-{labels[u]}")
            else:
                terms.append(f"{value:g}{labels[u]}")
        rows.append(f"{labels[s]}*{labels[t]} = {' + '.join(terms) if terms else '0'}")
    return rows


def nonassociative_triples(A: AlgebraSpec, limit: Optional[int] = None) -> List[Tuple[int, int, int]]:
    found = []
    for s, t, u in itertools.product(range(A.dim), repeat=3):
        if np.max(np.abs(associator(A, A.basis(s), A.basis(t), A.basis(u)))) > TABLE_TOL:
            found.append((s, t, u))
            if limit is not None and len(found) >= limit:
                break
    return found


def algebra_law_residuals(A: AlgebraSpec, samples: int = 10000, seed: int = 42) -> Dict[str, float]:
    """Sampled alternating laws, Artin consequence, flexibility and the exact involution law."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, A.dim))
    y = rng.standard_normal((samples, A.dim))
    r = rng.integers(-9, 10, size=(samples, 1)) / rng.integers(1, 10, size=(samples, 1))
    scale = np.linalg.norm(x, axis=-1) ** 2 * np.linalg.norm(y, axis=-1)
    scale_y = np.linalg.norm(x, axis=-1) * np.linalg.norm(y, axis=-1) ** 2
    real_r = r * A.unit()

    report = validate_algebra(A)
    anti = next((e["residual"] for e in report.errors if e["invariant"] == "anti_homomorphism"), 0.0)
    return {
        "involution_anti_homomorphism": float(anti),
        "left_alternative": float(np.max(np.linalg.norm(associator(A, x, x, y), axis=-1) / scale)),
        "right_alternative": float(np.max(np.linalg.norm(associator(A, x, y, y), axis=-1) / scale_y)),
        "flexible": float(np.max(np.linalg.norm(associator(A, x, y, x), axis=-1) / scale)),
        "artin_real": float(np.max(np.abs(associator(A, real_r, x, y)))),
        "conjugate_alternative": float(np.max(np.linalg.norm(associator(A, conj(A, x), x, y), axis=-1) / scale)),
    }


def norm_bound_constant(A: AlgebraSpec, M: SubspaceSpec, samples: int = 2000, seed: int = 42,
                        refine: int = 8) -> Tuple[float, int]:
    """Sampled estimate of the smallest C with |xy| <= C|x||y| for x in M and y in A.

    Returns ``(C_hat, samples_used)``.
    """
    if M.algebra.dim != A.dim:
        raise DimensionMismatchError(f"Subspace {M.name} lives in dimension {M.algebra.dim}, algebra {A.name} in {A.dim}")
    basis_vectors = M.basis_vectors
    rng = np.random.default_rng(seed)

    def op_norm(c: np.ndarray) -> float:
        x = c @ basis_vectors
        size = np.linalg.norm(x)
        if size == 0.0:
            return 0.0
        return float(np.linalg.norm(left_matrix(A, x / size), ord=2))

    coeffs = rng.standard_normal((samples, basis_vectors.shape[0]))
    coeffs[0] = 0.0
    coeffs[0, 0] = 1.0
    x = coeffs @ basis_vectors
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    norms = np.linalg.norm(left_matrix(A, x), ord=2, axis=(-2, -1))
    best = float(np.max(norms))

    for start in coeffs[np.argsort(norms)[::-1][:refine]]:
        result = minimize(lambda c: -op_norm(c), start, method="Nelder-Mead",
                          options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
        best = max(best, -float(result.fun))

    estimate = max(best, 1.0)
    logger.info(f"Norm bound for {A.name}: C_hat = {estimate:.12f} from {samples} samples")
    return estimate, samples
