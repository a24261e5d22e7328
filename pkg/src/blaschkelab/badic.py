"""Wold-type layer decomposition f = sum_k h_k B^k with h_k in K_B.

Multiplication by a finite Blaschke product B splits the Hardy space into
the mutually orthogonal layers B^k K_B.  Peeling the layers off a truncated
series is a projection/division loop:

    r_0 = f,   h_j = P_{K_B}(r_j),   r_{j+1} = (r_j - h_j) / B,

and the layers give equivalent norms on the weighted Dirichlet-type scale:
``b_norm`` is sqrt(sum_k (k+1)^alpha ||h_k||_{H^2}^2), which for B = z is
exactly the diagonal (n+1)^alpha norm.

All computations run at the guarded working degree from
:func:`blaschkelab.model_space.guard_degree`; layers are reported at that
degree.  The loop stops after ``depth`` layers or once the residual norm
falls below ``residual_tol``.  A residual still above tolerance at depth
raises :class:`DepthExhausted`, which carries the partial result.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr, solve_triangular

from .blaschke import BlaschkeProduct, multiplication_matrix
from .model_space import guard_degree, tm_basis
from .series import (
    DEFAULT_ORDER_TOL,
    DEFAULT_RESIDUAL_TOL,
    ComplexSeries,
    PowerLawWeights,
    WeightSequence,
    _divide_coeffs,
)

__all__ = [
    "BAdicCoefficients",
    "DepthExhausted",
    "RegimeWarning",
    "b_norm",
    "decompose",
    "default_depth",
    "layer_inner_product",
    "norm_equivalence_estimate",
    "reconstruct",
]


# Quotient-degree margin for the least-squares division path: the top band
# keeps the tall multiplication matrix near-isometric.
DIVISION_GUARD = 8


class RegimeWarning(UserWarning):
    """Layer-norm comparisons are only backed for alpha in [-1, 1]."""


class DepthExhausted(RuntimeError):
    """Residual above tolerance after the allowed number of layers.

    Attributes
    ----------
    partial : BAdicCoefficients
        The layers computed so far.
    residual_norm : float
        H^2 norm of the remaining residual.
    """

    def __init__(self, message: str, partial: "BAdicCoefficients", residual_norm: float) -> None:
        super().__init__(message)
        self.partial = partial
        self.residual_norm = residual_norm


@dataclass(frozen=True, eq=False)
class BAdicCoefficients:
    """Layers (h_0, ..., h_m) of a truncated series with respect to B."""

    blaschke: BlaschkeProduct
    layers: tuple
    source_degree: int
    residual_norm: float

    @property
    def depth_used(self) -> int:
        return len(self.layers)

    def layer_h2_norms(self) -> np.ndarray:
        return np.array([float(np.linalg.norm(h.coeffs)) for h in self.layers])


def default_depth(
    source_degree: int,
    b: BlaschkeProduct,
    residual_tol: float | None = None,
) -> int:
    """Layer budget before DepthExhausted; the loop stops early on residual.

    For B = z^k the bound ceil((N+1)/k) + 2 is exact.  Zeros away from the
    origin spread degree-N data over about (N/degree(B)) * (1+rho)/(1-rho)
    layers (rho = max|a_i|, the slowest boundary rotation speed of B),
    followed by a geometric tail at rate rho; the budget covers both with
    headroom, which costs nothing when convergence arrives sooner.
    """
    if b.degree < 1:
        raise ValueError("B must have at least one zero")
    rt = DEFAULT_RESIDUAL_TOL if residual_tol is None else residual_tol
    depth = math.ceil((source_degree + 1) / b.degree) + 2
    rho = max((abs(z) for z in b.zeros), default=0.0)
    if rho > 0.0:
        spread = 1.6 * (source_degree + 1) / b.degree * (1.0 + rho) / (1.0 - rho)
        tail = 0.0
        if rt < 1.0:
            tail = math.log(rt) / math.log(rho)
        depth = max(depth, math.ceil(spread + tail) + 16)
    return depth


def decompose(
    f: ComplexSeries,
    b: BlaschkeProduct,
    depth: int | None = None,
    residual_tol: float | None = None,
) -> BAdicCoefficients:
    """Layer coefficients of f with respect to B.

    Raises DepthExhausted (carrying the partial result) if the residual is
    still above ``residual_tol`` after ``depth`` layers.
    """
    if b.degree < 1:
        raise ValueError("B must have at least one zero")
    rt = DEFAULT_RESIDUAL_TOL if residual_tol is None else residual_tol
    if depth is None:
        depth = default_depth(f.truncation_degree, b, rt)
    if depth < 1:
        raise ValueError("depth must be positive")

    n_work = guard_degree(b, f.truncation_degree)
    basis = tm_basis(b, n_work).matrix()

    if all(z == 0 for z in b.zeros):
        # B = e^{i theta} z^d: division is an exact coefficient shift.
        b_coeffs = b.taylor(n_work).coeffs

        def divide(v: np.ndarray) -> np.ndarray:
            return _divide_coeffs(v, b_coeffs, n_work, DEFAULT_ORDER_TOL, max(rt, 1e-7))

    else:
        # Triangular deconvolution by B is exponentially ill-conditioned
        # (1/B has poles inside the disc), so divide by least squares
        # against the tall multiplication matrix instead: near-isometric
        # columns, and the non-divisible roundoff component is dropped
        # rather than amplified.
        quotient_degree = n_work - b.degree - DIVISION_GUARD
        tall = multiplication_matrix(b, quotient_degree, n_work)
        q_fact, r_fact = qr(tall, mode="economic")

        def divide(v: np.ndarray) -> np.ndarray:
            q = solve_triangular(r_fact, q_fact.conj().T @ v)
            out = np.zeros(n_work + 1, dtype=complex)
            out[: quotient_degree + 1] = q
            return out

    r = f.resized(n_work).coeffs.copy()
    layers = []
    for _ in range(depth):
        if np.linalg.norm(r) <= rt:
            break
        h = basis @ (basis.conj().T @ r)
        layers.append(ComplexSeries(h))
        r = divide(r - h)

    residual = float(np.linalg.norm(r))
    result = BAdicCoefficients(b, tuple(layers), f.truncation_degree, residual)
    if residual > rt:
        raise DepthExhausted(
            f"residual norm {residual:.3e} above tolerance {rt:.1e} after {depth} layers",
            result,
            residual,
        )
    return result


def reconstruct(coefficients: BAdicCoefficients, degree: int) -> ComplexSeries:
    """sum_k h_k B^k truncated at ``degree``."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    b_t = coefficients.blaschke.taylor(degree).coeffs
    out = np.zeros(degree + 1, dtype=complex)
    power = np.zeros(degree + 1, dtype=complex)
    power[0] = 1.0
    for h in coefficients.layers:
        out += np.convolve(h.coeffs, power)[: degree + 1]
        power = np.convolve(power, b_t)[: degree + 1]
    return ComplexSeries(out)


def _check_regime(alpha: float) -> None:
    if not -1.0 <= alpha <= 1.0:
        warnings.warn(
            f"alpha = {alpha} outside [-1, 1]: layer norms are computed but the "
            "norm equivalence is not backed in this regime",
            RegimeWarning,
            stacklevel=3,
        )


def b_norm(
    f: ComplexSeries,
    b: BlaschkeProduct,
    alpha: float,
    depth: int | None = None,
) -> float:
    """Equivalent layer norm sqrt(sum_k (k+1)^alpha ||h_k||_{H^2}^2).

    For B = z this equals the diagonal (n+1)^alpha coefficient norm exactly.
    DepthExhausted from the decomposition propagates.
    """
    _check_regime(alpha)
    c = decompose(f, b, depth)
    norms = c.layer_h2_norms()
    k = np.arange(1.0, norms.size + 1.0)
    return float(np.sqrt(np.sum(k**alpha * norms**2)))


def layer_inner_product(
    f: ComplexSeries,
    g: ComplexSeries,
    b: BlaschkeProduct,
    weights: WeightSequence,
    depth: int | None = None,
) -> complex:
    """sum_k weights(k) <h_k(f), h_k(g)>_{H^2}; missing layers count as zero."""
    if isinstance(weights, PowerLawWeights):
        _check_regime(weights.alpha)
    cf = decompose(f, b, depth)
    cg = decompose(g, b, depth)
    n = min(len(cf.layers), len(cg.layers))
    if n == 0:
        return 0j
    w = weights.values(n)
    total = 0j
    for k in range(n):
        total += w[k] * np.vdot(cg.layers[k].coeffs, cf.layers[k].coeffs)
    return complex(total)


def norm_equivalence_estimate(
    b: BlaschkeProduct,
    alpha: float,
    degree: int,
    trials: int,
    seed: int,
) -> tuple:
    """Empirical (min, max) of b_norm over random unit-alpha-norm polynomials.

    Each trial draws independent standard complex-Gaussian coefficients from
    its own child stream of ``seed`` and normalizes in the diagonal
    (n+1)^alpha norm, so the returned ratios bracket the equivalence
    constants seen on the sample.  The layer depth starts at the default and
    doubles (a few times) when a trial needs more layers to converge.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    _check_regime(alpha)
    w = PowerLawWeights(alpha).values(degree + 1)
    streams = np.random.SeedSequence(seed).spawn(trials)
    base_depth = default_depth(degree, b)
    lo, hi = np.inf, -np.inf
    for stream in streams:
        rng = np.random.default_rng(stream)
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        c /= np.sqrt(np.sum(np.abs(c) ** 2 * w))
        f = ComplexSeries(c)
        depth = base_depth
        for attempt in range(4):
            try:
                coeffs = decompose(f, b, depth)
                break
            except DepthExhausted:
                if attempt == 3:
                    raise
                depth *= 2
        norms = coeffs.layer_h2_norms()
        k = np.arange(1.0, norms.size + 1.0)
        val = float(np.sqrt(np.sum(k**alpha * norms**2)))
        lo = min(lo, val)
        hi = max(hi, val)
    return (lo, hi)
