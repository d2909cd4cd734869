import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from app.models.FieldFunctionModel import DiracMethod, DiracResult, FieldFunction, Smoothness
from app.models.SubspaceModel import MultiPoint, SubspaceSpec
from app.services.AlgebraCoreService import conj, mul
from app.utils.exceptions import AlternaException, ConfigurationError, DimensionMismatchError, IndexRangeError
from app.utils.finite_difference import partial_derivatives, second_derivatives
from app.utils.helper_functions import parse_element, parse_float_list, parse_int_list, parse_spec_string

logger = logging.getLogger(__name__)

CATALOG = ("constant", "coordinate", "fueter", "cauchy_pullback", "poly_x0_sq", "bump")


def _coords(p) -> np.ndarray:
    return p.coords if isinstance(p, MultiPoint) else np.asarray(p, dtype=float)


def _index(S: SubspaceSpec, j: int, s: int) -> int:
    return (j - 1) * S.block + s


def _check_variable(S: SubspaceSpec, n: int, j: int, s: Optional[int] = None) -> None:
    if not 1 <= j <= n:
        raise IndexRangeError(f"Variable index j={j} outside 1..{n}")
    if s is not None and not 0 <= s <= S.m:
        raise IndexRangeError(f"Component index s={s} outside 0..{S.m}")


def pointwise(func: Callable[[np.ndarray], np.ndarray], dim: int) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a single-point evaluator to arbitrary leading axes."""
    def evaluate(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            return np.asarray(func(coords), dtype=float)
        flat = coords.reshape(-1, coords.shape[-1])
        out = np.empty((flat.shape[0], dim))
        for i, point in enumerate(flat):
            out[i] = func(point)
        return out.reshape(coords.shape[:-1] + (dim,))
    return evaluate


def dbar_from_gradient(S: SubspaceSpec, gradient: Callable[[np.ndarray], np.ndarray],
                       conjugate: bool = False, right: bool = False) -> Callable[[int, np.ndarray], np.ndarray]:
    def dbar(j: int, coords: np.ndarray) -> np.ndarray:
        grad = gradient(coords)
        return combine_partials(S, grad[..., _index(S, j, 0):_index(S, j, 0) + S.block, :], conjugate, right)
    return dbar


def combine_partials(S: SubspaceSpec, partials: np.ndarray, conjugate: bool = False, right: bool = False) -> np.ndarray:
    """sum_s v_s * d_s f  (or v_s^c on the left, or v_s on the right) for partials ``(..., m+1, dim)``."""
    A = S.algebra
    vectors = conj(A, S.basis_vectors) if conjugate else S.basis_vectors
    total = np.zeros(partials.shape[:-2] + (A.dim,))
    for s in range(S.block):
        if right:
            total = total + mul(A, partials[..., s, :], vectors[s])
        else:
            total = total + mul(A, vectors[s], partials[..., s, :])
    return total


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def constant(S: SubspaceSpec, n: int, a) -> FieldFunction:
    A = S.algebra
    a = parse_element(a, A.dim) if not isinstance(a, np.ndarray) else A.check(a)
    D = S.ambient_dim(n)

    def evaluate(x):
        return np.broadcast_to(a, np.shape(x)[:-1] + (A.dim,)).copy()

    def gradient(x):
        return np.zeros(np.shape(x)[:-1] + (D, A.dim))

    return FieldFunction(eval=evaluate, label="constant", n=n, gradient=gradient,
                         analytic_dbar=lambda j, x: np.zeros(np.shape(x)[:-1] + (A.dim,)))


def coordinate(S: SubspaceSpec, n: int, j: int, s: int) -> FieldFunction:
    _check_variable(S, n, j, s)
    A = S.algebra
    k = _index(S, j, s)
    D = S.ambient_dim(n)
    one = A.unit()

    def evaluate(x):
        return np.asarray(x)[..., k, None] * one

    def gradient(x):
        grad = np.zeros(np.shape(x)[:-1] + (D, A.dim))
        grad[..., k, :] = one
        return grad

    return FieldFunction(eval=evaluate, label=f"coordinate({j},{s})", n=n, gradient=gradient,
                         analytic_dbar=dbar_from_gradient(S, gradient))


def fueter(S: SubspaceSpec, n: int, j: int, s: int, a=None) -> FieldFunction:
    """x_{j,s} a - x_{j,0} (v_s a); a defaults to 1."""
    _check_variable(S, n, j, s)
    if s == 0:
        raise ConfigurationError("fueter(j, s) needs s >= 1")
    A = S.algebra
    a = A.unit() if a is None else (parse_element(a, A.dim) if not isinstance(a, np.ndarray) else A.check(a))
    va = mul(A, S.basis_vectors[s], a)
    ks, k0 = _index(S, j, s), _index(S, j, 0)
    D = S.ambient_dim(n)

    def evaluate(x):
        x = np.asarray(x)
        return x[..., ks, None] * a - x[..., k0, None] * va

    def gradient(x):
        grad = np.zeros(np.shape(x)[:-1] + (D, A.dim))
        grad[..., ks, :] = a
        grad[..., k0, :] = -va
        return grad

    label = f"fueter({j},{s})" if np.allclose(a, A.unit()) else f"fueter({j},{s};a)"
    return FieldFunction(eval=evaluate, label=label, n=n, gradient=gradient,
                         analytic_dbar=lambda jj, x: np.zeros(np.shape(x)[:-1] + (A.dim,)))


def cauchy_pullback(S: SubspaceSpec, n: int, j: int, a: Sequence[float]) -> FieldFunction:
    """y -> E(y_j - a) with the one-variable Cauchy kernel of M."""
    from app.services.KernelService import build_kernel_context, cauchy_kernel_gradient, cauchy_kernel_values

    _check_variable(S, n, j)
    a = np.asarray(a, dtype=float)
    if a.shape != (S.block,):
        raise DimensionMismatchError(f"cauchy_pullback pole needs {S.block} coordinates, got {a.shape}")
    ctx = build_kernel_context(S, 1)
    A = S.algebra
    D = S.ambient_dim(n)
    k0 = _index(S, j, 0)

    def evaluate(x):
        return cauchy_kernel_values(ctx, np.asarray(x)[..., k0:k0 + S.block] - a)

    def gradient(x):
        grad = np.zeros(np.shape(x)[:-1] + (D, A.dim))
        grad[..., k0:k0 + S.block, :] = cauchy_kernel_gradient(ctx, np.asarray(x)[..., k0:k0 + S.block] - a)
        return grad

    return FieldFunction(eval=evaluate, label=f"cauchy_pullback({j})", n=n, gradient=gradient,
                         analytic_dbar=lambda jj, x: np.zeros(np.shape(x)[:-1] + (A.dim,)))


def poly_x0_sq(S: SubspaceSpec, n: int, j: int) -> FieldFunction:
    _check_variable(S, n, j)
    A = S.algebra
    k0 = _index(S, j, 0)
    D = S.ambient_dim(n)
    one = A.unit()

    def evaluate(x):
        return np.asarray(x)[..., k0, None] ** 2 * one

    def gradient(x):
        grad = np.zeros(np.shape(x)[:-1] + (D, A.dim))
        grad[..., k0, :] = 2.0 * np.asarray(x)[..., k0, None] * one
        return grad

    return FieldFunction(eval=evaluate, label=f"poly_x0_sq({j})", n=n, gradient=gradient,
                         analytic_dbar=dbar_from_gradient(S, gradient))


def bump(S: SubspaceSpec, n: int, center: Sequence[float], radius: float, a) -> FieldFunction:
    """a * exp(-1/(1-t^2)), t = |x - center| / radius, zero for t >= 1."""
    A = S.algebra
    D = S.ambient_dim(n)
    center = np.asarray(center, dtype=float)
    if center.shape != (D,):
        raise DimensionMismatchError(f"bump center needs {D} coordinates, got {center.shape}")
    if radius <= 0:
        raise ConfigurationError(f"bump radius must be positive, got {radius}")
    a = parse_element(a, A.dim) if not isinstance(a, np.ndarray) else A.check(a)

    def profile(x):
        offset = np.asarray(x) - center
        t2 = np.sum(offset ** 2, axis=-1) / radius ** 2
        inside = t2 < 1.0
        gap = np.where(inside, 1.0 - t2, 1.0)
        value = np.where(inside, np.exp(-1.0 / gap), 0.0)
        return offset, gap, value

    def evaluate(x):
        _, _, value = profile(x)
        return value[..., None] * a

    def gradient(x):
        offset, gap, value = profile(x)
        scalar = value[..., None] * (-2.0 * offset) / (radius ** 2 * gap[..., None] ** 2)
        return scalar[..., :, None] * a

    support = (center - radius, center + radius)
    return FieldFunction(eval=evaluate, label="bump", n=n, smoothness=Smoothness.C_INFINITY, gradient=gradient,
                         analytic_dbar=dbar_from_gradient(S, gradient), support=support)


def catalog(S: SubspaceSpec, name: str, n: int, **params) -> FieldFunction:
    builders = {
        "constant": constant,
        "coordinate": coordinate,
        "fueter": fueter,
        "cauchy_pullback": cauchy_pullback,
        "poly_x0_sq": poly_x0_sq,
        "bump": bump,
    }
    if name not in builders:
        raise ConfigurationError(f"Unknown catalog function '{name}', expected one of {', '.join(CATALOG)}")
    try:
        return builders[name](S, n, **params)
    except AlternaException:
        raise
    except TypeError as e:
        raise ConfigurationError(f"Bad parameters for catalog function '{name}': {str(e)}")


def function_from_spec(S: SubspaceSpec, n: int, text: str) -> FieldFunction:
    """Build a catalog function from a CLI string such as ``fueter:1,1`` or ``bump:0,0,0,0;0.5;1``."""
    name, groups = parse_spec_string(text)
    dim = S.algebra.dim
    if name == "constant":
        return constant(S, n, groups[0] if groups else "1")
    if name == "coordinate":
        j, s = parse_int_list(groups[0])
        return coordinate(S, n, j, s)
    if name == "fueter":
        j, s = parse_int_list(groups[0])
        return fueter(S, n, j, s, parse_element(groups[1], dim) if len(groups) > 1 else None)
    if name == "cauchy_pullback":
        return cauchy_pullback(S, n, parse_int_list(groups[0])[0], parse_float_list(groups[1]))
    if name == "poly_x0_sq":
        return poly_x0_sq(S, n, parse_int_list(groups[0])[0] if groups else 1)
    if name == "bump":
        if len(groups) < 2:
            raise ConfigurationError("bump needs center;radius[;a]")
        return bump(S, n, parse_float_list(groups[0]), float(groups[1]), groups[2] if len(groups) > 2 else "1")
    raise ConfigurationError(f"Unknown catalog function '{name}', expected one of {', '.join(CATALOG)}")


def dirac_image(S: SubspaceSpec, F: FieldFunction, j: int) -> FieldFunction:
    """The function x -> dbar_j F(x), keeping F's support."""
    if F.analytic_dbar is None:
        def evaluate(x):
            return dirac_apply(S, F, j, x, method=DiracMethod.FD).value
    else:
        def evaluate(x):
            return F.analytic_dbar(j, np.asarray(x, dtype=float))
    return FieldFunction(eval=evaluate, label=f"dbar{j}({F.label})", n=F.n, smoothness=F.smoothness,
                         support=F.support)


# ---------------------------------------------------------------------------
# Dirac operators
# ---------------------------------------------------------------------------

def _dirac(S: SubspaceSpec, f: FieldFunction, j: int, x, h: Optional[float], method: Optional[DiracMethod],
           conjugate: bool, right: bool) -> DiracResult:
    x = _coords(x)
    _check_variable(S, f.n, j)
    if x.shape[-1] != S.ambient_dim(f.n):
        raise DimensionMismatchError(
            f"Point has {x.shape[-1]} coordinates, expected (m+1)n = {S.ambient_dim(f.n)}")
    use_analytic = method != DiracMethod.FD
    if use_analytic and not conjugate and not right and f.analytic_dbar is not None:
        return DiracResult(value=f.analytic_dbar(j, x), method=DiracMethod.ANALYTIC, est_error=0.0)
    if use_analytic and f.gradient is not None:
        k0 = _index(S, j, 0)
        partials = f.gradient(x)[..., k0:k0 + S.block, :]
        return DiracResult(value=combine_partials(S, partials, conjugate, right), method=DiracMethod.ANALYTIC)
    indices = [_index(S, j, s) for s in range(S.block)]
    partials, errors = partial_derivatives(f.eval, x, indices, h)
    value = combine_partials(S, partials, conjugate, right)
    if not np.all(np.isfinite(value)):
        raise AlternaException(f"Non-finite Dirac derivative of {f.label}")
    return DiracResult(value=value, method=DiracMethod.FD, est_error=float(np.max(np.sum(errors, axis=-1))))


def dirac_apply(S: SubspaceSpec, f: FieldFunction, j: int, x, h: Optional[float] = None,
                method: Optional[DiracMethod] = None) -> DiracResult:
    return _dirac(S, f, j, x, h, method, conjugate=False, right=False)


def conj_dirac_apply(S: SubspaceSpec, f: FieldFunction, j: int, x, h: Optional[float] = None,
                     method: Optional[DiracMethod] = None) -> DiracResult:
    return _dirac(S, f, j, x, h, method, conjugate=True, right=False)


def right_dirac_apply(S: SubspaceSpec, f: FieldFunction, j: int, x, h: Optional[float] = None,
                      method: Optional[DiracMethod] = None) -> DiracResult:
    return _dirac(S, f, j, x, h, method, conjugate=False, right=True)


def is_monogenic_at(S: SubspaceSpec, f: FieldFunction, x, tol: float = 1e-8, h: Optional[float] = None,
                    method: Optional[DiracMethod] = None, right: bool = False) -> Tuple[bool, float]:
    apply = right_dirac_apply if right else dirac_apply
    residual = 0.0
    for j in range(1, f.n + 1):
        value = apply(S, f, j, x, h=h, method=method).value
        residual = max(residual, float(np.max(np.linalg.norm(value, axis=-1))))
    return residual < tol, residual


def laplacian_apply(S: SubspaceSpec, f: FieldFunction, j: int, x, h: Optional[float] = None) -> DiracResult:
    """Delta_j f as the trace of FD second derivatives in variable j."""
    x = _coords(x)
    _check_variable(S, f.n, j)
    indices = [_index(S, j, s) for s in range(S.block)]
    seconds, errors = second_derivatives(f.eval, x, indices, h)
    return DiracResult(value=np.sum(seconds, axis=-2), method=DiracMethod.FD,
                       est_error=float(np.max(np.sum(errors, axis=-1))))


def laplacian_via_dirac(S: SubspaceSpec, f: FieldFunction, j: int, x, h: Optional[float] = None) -> DiracResult:
    """partial_j (dbar_j f), the inner derivative analytic when available."""
    inner = FieldFunction(eval=lambda y: dirac_apply(S, f, j, y, h=h).value, label=f"dbar{j}({f.label})", n=f.n)
    return conj_dirac_apply(S, inner, j, x, h=h, method=DiracMethod.FD)


def right_module_residual(S: SubspaceSpec, f: FieldFunction, a: np.ndarray, x, j: int = 1) -> float:
    """|dbar_j (f a)| at x, zero for monogenic f in associative algebras."""
    A = S.algebra
    scaled = FieldFunction(eval=lambda y: mul(A, f.eval(y), a), label=f"{f.label}*a", n=f.n)
    return float(np.max(np.linalg.norm(dirac_apply(S, scaled, j, x, method=DiracMethod.FD).value, axis=-1)))
