"""Sufficiency checks for the wandering subspace property of weighted shifts.

Shimorin's sufficient condition for an operator T reads

    ||x + T y||^2 <= 2 (||T x||^2 + ||y||^2),

and for the k-step coefficient shift on a diagonal norm with weights
omega(n) it reduces to explicit weight inequalities, scanned here over a
finite index range:

    (a)  omega(s) <= 2 omega(s + k)            for s = s0 .. s0 + k - 1,
    (b)  1/omega(s) + 1/omega(s + 2k) <= 2/omega(s + k)   for s = s0 .. n_max.

The concave variant (for increasing weights) checks

    omega(n + 2k) - 2 omega(n + k) + omega(n) <= 0.

A scan over a finite range cannot certify the tail, so a report also carries
a heuristic tail certificate: the violation margin of (b),
g(s) = 1/omega(s) - 1/omega(s + k), must be nondecreasing near the end of
the scanned range.  ``holds`` is true only when the scan is clean and the
certificate passes; it is a numerical verdict, not a proof.

``operator_check`` verifies the same inequality directly as positive
semidefiniteness of the quadratic form on a truncation, for any lower
triangular multiplication matrix and diagonal norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .series import ExplicitWeights, PowerLawWeights, WeightSequence

__all__ = [
    "Z2_ALPHA_BOUND",
    "CriterionReport",
    "DegenerateDenominator",
    "DimensionMismatch",
    "EmptyWindow",
    "OperatorCheckResult",
    "Violation",
    "concavity_criterion",
    "head_weight_window",
    "monomial_threshold",
    "operator_check",
    "steep_head_weights",
    "weight_criterion",
    "z2_adjusted_weights",
]

# Relative comparison tolerance for the weight inequalities.
REL_TOL = 1e-12

# Monomial z^2 keeps the wandering subspace property under a power-law norm
# with an adjusted head weight down to this exponent (head window below).
Z2_ALPHA_BOUND = math.log(2.0 / 3.0) / math.log(5.0 / 3.0)


class DegenerateDenominator(ArithmeticError):
    """Head-window denominator 2*3^(-alpha) - 5^(-alpha) is numerically zero."""


class EmptyWindow(ValueError):
    """No admissible head weight exists at this exponent."""


class DimensionMismatch(ValueError):
    """Operator matrix and norm weights have incompatible shapes."""


class Violation(NamedTuple):
    condition: str
    index: int
    lhs: float
    rhs: float


@dataclass
class CriterionReport:
    """Outcome of a finite weight-inequality scan.

    ``holds`` is true iff no violation was found in the scanned range and
    the heuristic tail certificate applies.
    """

    holds: bool
    violations: list
    scanned_range: tuple
    tail_certificate: str | None

    def first_violation_index(self) -> int | None:
        if not self.violations:
            return None
        return min(v.index for v in self.violations)


def _tail_margin_certificate(w: np.ndarray, step: int, start: int, n_max: int) -> str | None:
    """Check g(s) = 1/w(s) - 1/w(s+step) nondecreasing near the scan end."""
    lo = max(start, n_max - 10 * step - 5)
    s = np.arange(lo, n_max + 1)
    recip = 1.0 / w
    g = recip[s] - recip[s + step]
    if g.size >= 2:
        # The margin is a difference of reciprocals; near-constant margins
        # carry cancellation noise on the order of eps * max(1/w), so the
        # monotonicity tolerance must include that floor.
        scale = np.max(np.abs(g)) + 1e-300
        noise = 64.0 * np.finfo(float).eps * np.max(recip[lo : n_max + step + 1])
        if np.any(np.diff(g) < -(REL_TOL * scale + noise)):
            return None
    return (
        f"margin 1/w(s) - 1/w(s+{step}) nondecreasing for s in [{lo}, {n_max}]; "
        "heuristic tail extrapolation, not a proof"
    )


def weight_criterion(
    weights: WeightSequence,
    step: int,
    start: int = 0,
    n_max: int = 100_000,
) -> CriterionReport:
    """Scan the k-step shift inequalities (a) and (b) over [start, n_max].

    ``step`` is the shift stride k and ``start`` the first index s0 covered
    by the inequalities; start = k corresponds to restricting the shift to
    the subspace of series vanishing to order k.
    """
    if step < 1:
        raise ValueError("step must be positive")
    if start < 0:
        raise ValueError("start must be nonnegative")
    if n_max < start:
        raise ValueError("n_max must be at least start")
    w = weights.values(n_max + 2 * step + 1)
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be positive and finite")

    violations = []
    for s in range(start, start + step):
        lhs, rhs = float(w[s]), float(2.0 * w[s + step])
        if lhs > rhs + REL_TOL * max(lhs, rhs):
            violations.append(Violation("a", s, lhs, rhs))

    s = np.arange(start, n_max + 1)
    lhs_b = 1.0 / w[s] + 1.0 / w[s + 2 * step]
    rhs_b = 2.0 / w[s + step]
    bad = lhs_b > rhs_b + REL_TOL * np.maximum(lhs_b, rhs_b)
    for i in np.nonzero(bad)[0]:
        violations.append(Violation("b", int(s[i]), float(lhs_b[i]), float(rhs_b[i])))

    certificate = _tail_margin_certificate(w, step, start, n_max)
    holds = not violations and certificate is not None
    return CriterionReport(holds, violations, (start, n_max), certificate)


def concavity_criterion(
    weights: WeightSequence,
    step: int,
    n_max: int = 100_000,
) -> CriterionReport:
    """Scan omega(n + 2k) - 2 omega(n + k) + omega(n) <= 0 over [0, n_max].

    This is the route for increasing weight families; the tail certificate
    checks that the stride increment omega(n + k) - omega(n) is nonincreasing
    near the end of the range.
    """
    if step < 1:
        raise ValueError("step must be positive")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    w = weights.values(n_max + 2 * step + 1)
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be positive and finite")

    n = np.arange(0, n_max + 1)
    lhs = w[n + 2 * step] + w[n]
    rhs = 2.0 * w[n + step]
    bad = lhs > rhs + REL_TOL * np.maximum(lhs, rhs)
    violations = [
        Violation("concavity", int(n[i]), float(lhs[i]), float(rhs[i]))
        for i in np.nonzero(bad)[0]
    ]

    lo = max(0, n_max - 10 * step - 5)
    t = np.arange(lo, n_max + 1)
    inc = w[t + step] - w[t]
    certificate: str | None
    scale = np.max(np.abs(inc)) + 1e-300
    if inc.size >= 2 and np.any(np.diff(inc) > REL_TOL * scale):
        certificate = None
    else:
        certificate = (
            f"increment w(n+{step}) - w(n) nonincreasing for n in [{lo}, {n_max}]; "
            "heuristic tail extrapolation, not a proof"
        )
    holds = not violations and certificate is not None
    return CriterionReport(holds, violations, (0, n_max), certificate)


def monomial_threshold(step: int) -> float:
    """log 2 / log(k + 1): the power-law exponent range |alpha| for which
    the k-step shift keeps the wandering subspace property under the plain
    diagonal norm."""
    if step < 1:
        raise ValueError("step must be positive")
    return math.log(2.0) / math.log(step + 1.0)


def head_weight_window(alpha: float) -> tuple:
    """Admissible window [lo, hi] for the 0th weight in the z^2 adjustment.

    lo = 1 / (2*3^(-alpha) - 5^(-alpha)) and hi = 2*3^alpha; the window is
    nonempty iff alpha >= Z2_ALPHA_BOUND.
    """
    den = 2.0 * 3.0 ** (-alpha) - 5.0 ** (-alpha)
    if den <= 1e-14:
        raise DegenerateDenominator(f"window denominator {den:.3e} at alpha={alpha}")
    return (1.0 / den, 2.0 * 3.0**alpha)


def z2_adjusted_weights(alpha: float) -> ExplicitWeights:
    """Power-law weights with the head entry moved into the z^2 window.

    omega(0) is the window midpoint and omega(n) = (n+1)^alpha for n >= 1;
    the 2-step criterion then holds for alpha in [Z2_ALPHA_BOUND, 0].
    """
    if alpha > 0.0:
        raise ValueError("head adjustment applies to alpha <= 0 only")
    lo, hi = head_weight_window(alpha)
    if lo > hi * (1.0 + 1e-12):
        raise EmptyWindow(f"window [{lo:.12g}, {hi:.12g}] empty at alpha={alpha}")
    return ExplicitWeights(((lo + hi) / 2.0,), PowerLawWeights(alpha))


def steep_head_weights() -> ExplicitWeights:
    """Weights (t+1)^(-16) for t <= 21 with a Bergman (n+1)^(-1) tail.

    A steeply decaying head on top of the Bergman tail; the k = 6 shift
    inequalities fail for this family even though the Bergman tail alone
    satisfies them, which makes it a useful negative control.
    """
    head = tuple(float(t + 1) ** (-16.0) for t in range(22))
    return ExplicitWeights(head, PowerLawWeights(-1.0))


class OperatorCheckResult(NamedTuple):
    min_eig: float
    holds: bool


def operator_check(matrix: np.ndarray, gram: np.ndarray, in_degree: int) -> OperatorCheckResult:
    """Positive semidefiniteness of 2||Tx||^2 + 2||y||^2 - ||x + Ty||^2.

    ``matrix`` maps degrees <= in_degree into a strictly larger degree space
    (no truncation loss) and ``gram`` holds the diagonal norm weights of the
    output space.  The quadratic form in (x, y) is assembled as a Hermitian
    block matrix and its minimum eigenvalue is reported; the inequality
    holds when min_eig >= -1e-9.
    """
    t = np.asarray(matrix, dtype=complex)
    g = np.asarray(gram, dtype=float)
    n = in_degree + 1
    if t.ndim != 2 or g.ndim != 1:
        raise DimensionMismatch("matrix must be 2-d and gram 1-d")
    if t.shape[1] != n:
        raise DimensionMismatch(f"matrix has {t.shape[1]} columns, expected {n}")
    if t.shape[0] != g.size:
        raise DimensionMismatch(f"matrix has {t.shape[0]} rows but gram has {g.size} weights")
    if t.shape[0] <= n:
        raise DimensionMismatch("output space must be strictly larger than the input space")
    if np.any(g <= 0.0) or not np.all(np.isfinite(g)):
        raise ValueError("gram weights must be positive and finite")

    gt = g[:, None] * t
    tgt = t.conj().T @ gt
    jgj = np.diag(g[:n])
    jgt = gt[:n, :]
    top = np.hstack([2.0 * tgt - jgj, -jgt])
    bottom = np.hstack([-jgt.conj().T, 2.0 * jgj - tgt])
    block = np.vstack([top, bottom])
    block = (block + block.conj().T) / 2.0
    min_eig = float(np.linalg.eigvalsh(block)[0])
    return OperatorCheckResult(min_eig, min_eig >= -1e-9)
