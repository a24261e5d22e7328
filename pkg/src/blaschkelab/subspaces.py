"""Truncated invariant subspaces and wandering-defect experiments.

The lab works inside the space of polynomials of degree <= N, equipped with
a configurable inner product:

* ``TaylorInnerProduct(weights)`` -- diagonal coefficient pairing,
* ``ShiftedInnerProduct(k, alpha)`` -- the diagonal norm of the k-shifted
  series, i.e. weights (n + k + 1)^alpha,
* ``BAdicInnerProduct(B, weights, depth)`` -- the layer inner product of
  :mod:`blaschkelab.badic`, materialized (and cached) as a dense Gram matrix
  on the monomial basis.

``span_invariant`` builds the truncated B-invariant subspace generated by a
list of series: the orbit candidates B^j g are kept while
j * degree(B) + order(g) <= N and orthonormalized by modified Gram-Schmidt
with reorthogonalization.  ``wandering_part`` computes M ominus B M inside
the guard band of degrees <= N - degree(B).  ``wsp_defect`` regenerates an
invariant subspace from its wandering part and reports the largest
principal-angle sine between M restricted to degrees <= N_compare and the
regenerated span: the worst ip-distance from a unit vector of the restricted
M to the regenerated subspace.

A defect near zero supports the wandering subspace property at this
truncation; a large defect only ever means "no convergence observed at this
truncation", never a disproof of the infinite-dimensional claim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import badic
from .blaschke import BlaschkeProduct, multiplication_matrix
from .series import (
    ComplexSeries,
    PowerLawWeights,
    ShiftedWeights,
    WeightSequence,
)

__all__ = [
    "BAdicInnerProduct",
    "EmptySpan",
    "InnerProduct",
    "ShiftedInnerProduct",
    "SubspaceBasis",
    "TaylorInnerProduct",
    "WspReport",
    "restrict_to_degree",
    "span_invariant",
    "stride_merge",
    "stride_split",
    "subspace_defect",
    "two_step_wandering_defect",
    "wandering_part",
    "wsp_defect",
    "wsp_report",
]

# Relative drop threshold for Gram-Schmidt rank decisions.
RANK_TOL = 1e-10

# Relative singular-value threshold for nullspace extraction.
NULLSPACE_RTOL = 1e-8


class EmptySpan(ValueError):
    """No generator contributes a nonzero candidate."""


class InnerProduct:
    """Positive-definite sesquilinear form on truncated coefficient vectors."""

    def gram(self, degree: int) -> np.ndarray:
        """Dense Hermitian Gram matrix on the monomial basis.

        Entry G[i, j] = <z^j, z^i>, so <f, g> = (g coeffs)^H G (f coeffs).
        """
        raise NotImplementedError


@dataclass(frozen=True)
class TaylorInnerProduct(InnerProduct):
    """<f, g> = sum_n f_n conj(g_n) omega(n)."""

    weights: WeightSequence

    def gram(self, degree: int) -> np.ndarray:
        w = self.weights.values(degree + 1)
        if np.any(w <= 0.0):
            raise ValueError("inner-product weights must be positive")
        return np.diag(w.astype(complex))


@dataclass(frozen=True)
class ShiftedInnerProduct(InnerProduct):
    """Diagonal norm of the k-shifted series: weights (n + k + 1)^alpha."""

    shift: int
    alpha: float

    def __post_init__(self) -> None:
        if self.shift < 0:
            raise ValueError("shift must be nonnegative")

    def gram(self, degree: int) -> np.ndarray:
        w = ShiftedWeights(PowerLawWeights(self.alpha), self.shift).values(degree + 1)
        return np.diag(w.astype(complex))


@dataclass(frozen=True)
class BAdicInnerProduct(InnerProduct):
    """Layer inner product sum_k weights(k) <h_k(f), h_k(g)>_{H^2}.

    The Gram matrix on the monomial basis is assembled by decomposing every
    monomial once and cached per (B, weights, depth, degree).  Size ``depth``
    as in :func:`blaschkelab.badic.default_depth`: zeros away from the origin
    spread degree-n data over about (n/degree(B)) * (1+rho)/(1-rho) layers
    (DepthExhausted propagates).
    """

    blaschke: BlaschkeProduct
    weights: WeightSequence
    depth: int

    def gram(self, degree: int) -> np.ndarray:
        key = (self, degree)
        cached = _BADIC_GRAM_CACHE.get(key)
        if cached is not None:
            return cached
        blocks = []
        layer_counts = []
        for j in range(degree + 1):
            c = badic.decompose(ComplexSeries.monomial(j, 1.0, degree), self.blaschke, self.depth)
            blocks.append(c.layers)
            layer_counts.append(len(c.layers))
        k_max = max(layer_counts)
        w = self.weights.values(max(k_max, 1))
        if np.any(w <= 0.0):
            raise ValueError("layer weights must be positive")
        width = len(blocks[0][0].coeffs) if blocks[0] else degree + 1
        a = np.zeros((k_max * width, degree + 1), dtype=complex)
        for j, layers in enumerate(blocks):
            for k, h in enumerate(layers):
                a[k * width : (k + 1) * width, j] = np.sqrt(w[k]) * h.coeffs
        g = a.conj().T @ a
        g = (g + g.conj().T) / 2.0
        g.setflags(write=False)
        _BADIC_GRAM_CACHE[key] = g
        return g


_BADIC_GRAM_CACHE: dict = {}


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis columns of a subspace of degree <= N polynomials."""

    columns: np.ndarray
    ambient_degree: int
    ip: InnerProduct

    @property
    def dimension(self) -> int:
        return self.columns.shape[1]

    def series(self) -> list:
        return [ComplexSeries(self.columns[:, j]) for j in range(self.dimension)]


def _ip_norm(v: np.ndarray, g: np.ndarray) -> float:
    return float(np.sqrt(max(np.real(np.vdot(v, g @ v)), 0.0)))


def _orthonormalize(candidates: list, g: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Candidates whose residual norm falls below RANK_TOL times the largest
    candidate norm are dropped as dependent.
    """
    n = g.shape[0]
    if not candidates:
        return np.zeros((n, 0), dtype=complex)
    ref = max(_ip_norm(v, g) for v in candidates)
    if ref <= 0.0:
        return np.zeros((n, 0), dtype=complex)
    kept: list = []
    for v in candidates:
        w = v.astype(complex).copy()
        for _ in range(2):
            for q in kept:
                w -= q * np.vdot(q, g @ w)
        nrm = _ip_norm(w, g)
        if nrm > RANK_TOL * ref:
            kept.append(w / nrm)
    if not kept:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(kept)


def _nullspace(a: np.ndarray, rtol: float = NULLSPACE_RTOL) -> np.ndarray:
    """Orthonormal basis of the (numerical) nullspace of a."""
    cols = a.shape[1]
    if a.shape[0] == 0 or cols == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    cutoff = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return vh[rank:].conj().T


def span_invariant(
    generators: list,
    b: BlaschkeProduct,
    ip: InnerProduct,
    degree: int,
) -> SubspaceBasis:
    """Truncated B-invariant span of the generators.

    Orbit candidates B^j g enter in order of increasing j while
    j * degree(B) + order(g) <= degree, where order(g) is the trimmed order
    of vanishing at 0; for B = z^k this reproduces the exact polynomial
    grading.  Raises EmptySpan when nothing survives.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    gens = []
    for gen in generators:
        if gen.is_zero():
            continue
        gens.append(gen.resized(degree))
    if not gens:
        raise EmptySpan("all generators are zero")

    deg_b = b.degree
    if deg_b == 0:
        orbit_lengths = [1 for _ in gens]
    else:
        orbit_lengths = [
            max(0, (degree - gen.trimmed_order()) // deg_b) + 1 for gen in gens
        ]
    b_t = b.taylor(degree).coeffs
    candidates = []
    powers = [gen.coeffs.copy() for gen in gens]
    for j in range(max(orbit_lengths)):
        for i, gen in enumerate(gens):
            if j < orbit_lengths[i]:
                candidates.append(powers[i])
                powers[i] = np.convolve(powers[i], b_t)[: degree + 1]
    g = ip.gram(degree)
    cols = _orthonormalize(candidates, g)
    if cols.shape[1] == 0:
        raise EmptySpan("generators span nothing at this truncation")
    return SubspaceBasis(cols, degree, ip)


def restrict_to_degree(m: SubspaceBasis, max_degree: int) -> SubspaceBasis:
    """Subspace of M supported on degrees <= max_degree.

    Found as the nullspace of the top coefficient rows in M coordinates; the
    returned columns stay inside M.
    """
    n = m.ambient_degree
    if max_degree >= n:
        return m
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    c0 = _nullspace(m.columns[max_degree + 1 :, :])
    return SubspaceBasis(m.columns @ c0, n, m.ip)


def wandering_part(m: SubspaceBasis, b: BlaschkeProduct) -> SubspaceBasis:
    """M ominus B M, computed inside the band of degrees <= N - degree(B).

    The band keeps the comparison honest: products B * (top-degree elements)
    lose coefficients to the truncation, so the complement is taken within
    the part of M whose B-image is fully represented.
    """
    n = m.ambient_degree
    if b.degree > n:
        raise ValueError("ambient degree below degree(B)")
    g = m.ip.gram(n)
    restricted = restrict_to_degree(m, n - b.degree)
    if restricted.dimension == 0:
        return SubspaceBasis(np.zeros((n + 1, 0), dtype=complex), n, m.ip)
    bm = multiplication_matrix(b, n, n) @ m.columns
    cross = bm.conj().T @ (g @ restricted.columns)
    d = _nullspace(cross)
    return SubspaceBasis(restricted.columns @ d, n, m.ip)


def subspace_defect(target: SubspaceBasis, cover: SubspaceBasis, compare_degree: int) -> float:
    """Largest principal-angle sine between target|degrees<=compare and cover.

    Equals the worst ip-distance from a unit vector of the restricted target
    to the cover subspace; 0 means containment, 1 means some direction of
    the restricted target is orthogonal to the cover.  Computed from the
    residual (I - P_cover) on the restricted basis, which stays accurate
    near zero where the cross-Gram cosines would lose half the digits.
    """
    restricted = restrict_to_degree(target, compare_degree)
    if restricted.dimension == 0:
        return 0.0
    g = target.ip.gram(target.ambient_degree)
    u = restricted.columns
    if cover.dimension:
        u = u - cover.columns @ (cover.columns.conj().T @ (g @ u))
    h = u.conj().T @ (g @ u)
    top = float(np.max(np.linalg.eigvalsh((h + h.conj().T) / 2.0)))
    return float(np.sqrt(min(max(top, 0.0), 1.0)))


@dataclass(frozen=True)
class WspReport:
    """Wandering-defect experiment summary."""

    defect: float
    dim_invariant: int
    dim_wandering: int
    dim_regenerated: int
    ambient_degree: int
    compare_degree: int


def wsp_report(
    generators: list,
    b: BlaschkeProduct,
    ip: InnerProduct,
    degree: int,
    compare_degree: int,
    guard: int = 8,
) -> WspReport:
    """Build M, its wandering part W, regenerate [W]_B, and measure the defect.

    ``compare_degree`` must leave room for the guard band:
    compare_degree <= degree - 2*degree(B) - guard.
    """
    if compare_degree < 0:
        raise ValueError("compare_degree must be nonnegative")
    if compare_degree > degree - 2 * b.degree - guard:
        raise ValueError(
            f"compare_degree {compare_degree} too close to the truncation; "
            f"need <= {degree - 2 * b.degree - guard}"
        )
    m = span_invariant(generators, b, ip, degree)
    w = wandering_part(m, b)
    if w.dimension == 0:
        regenerated = SubspaceBasis(np.zeros((degree + 1, 0), dtype=complex), degree, ip)
    else:
        regenerated = span_invariant(w.series(), b, ip, degree)
    defect = subspace_defect(m, regenerated, compare_degree)
    return WspReport(
        defect=defect,
        dim_invariant=m.dimension,
        dim_wandering=w.dimension,
        dim_regenerated=regenerated.dimension,
        ambient_degree=degree,
        compare_degree=compare_degree,
    )


def wsp_defect(
    generators: list,
    b: BlaschkeProduct,
    ip: InnerProduct,
    degree: int,
    compare_degree: int,
    guard: int = 8,
) -> float:
    return wsp_report(generators, b, ip, degree, compare_degree, guard).defect


def stride_split(f: ComplexSeries, k: int) -> list:
    """Components f_j with f(z) = sum_j z^j f_j(z^k); coefficientwise
    f_j[n] = f[k n + j]."""
    if k < 1:
        raise ValueError("stride must be positive")
    parts = []
    for j in range(k):
        chunk = f.coeffs[j::k]
        parts.append(ComplexSeries(chunk if chunk.size else [0j]))
    return parts


def stride_merge(parts: list, k: int, degree: int | None = None) -> ComplexSeries:
    """Inverse of stride_split: assemble sum_j z^j f_j(z^k)."""
    if k < 1:
        raise ValueError("stride must be positive")
    if len(parts) != k:
        raise ValueError(f"expected {k} components, got {len(parts)}")
    if degree is None:
        degree = max(k * p.truncation_degree + j for j, p in enumerate(parts))
    out = np.zeros(degree + 1, dtype=complex)
    for j, p in enumerate(parts):
        strided = out[j::k]
        n = min(strided.size, len(p))
        strided[:n] = p.coeffs[:n]
    return ComplexSeries(out)


def two_step_wandering_defect(
    generators: list,
    k: int,
    alpha: float,
    degree: int,
    compare_degree: int,
    guard: int = 8,
) -> float:
    """Defect of regenerating M from M ominus z^(2k) M under z^k.

    M is the z^k-invariant span of the generators in the diagonal
    (n+1)^alpha norm, the wandering part is taken with respect to z^(2k),
    and the regeneration runs under z^k; alpha in [-1, 0].
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not -1.0 <= alpha <= 0.0:
        raise ValueError("alpha must lie in [-1, 0]")
    if compare_degree > degree - 4 * k - guard:
        raise ValueError(
            f"compare_degree {compare_degree} too close to the truncation; "
            f"need <= {degree - 4 * k - guard}"
        )
    ip = TaylorInnerProduct(PowerLawWeights(alpha))
    b_k = BlaschkeProduct((0j,) * k)
    b_2k = BlaschkeProduct((0j,) * (2 * k))
    m = span_invariant(generators, b_k, ip, degree)
    w = wandering_part(m, b_2k)
    if w.dimension == 0:
        regenerated = SubspaceBasis(np.zeros((degree + 1, 0), dtype=complex), degree, ip)
    else:
        regenerated = span_invariant(w.series(), b_k, ip, degree)
    return subspace_defect(m, regenerated, compare_degree)
