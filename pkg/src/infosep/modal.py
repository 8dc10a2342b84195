"""Spectral decomposition of joint dependence and sufficiency-based reduction.

The dependence of a joint pmf P(x, y) is captured by the centered density
ratio B[x, y] = P(x, y) / (P_X(x) P_Y(y)) - 1.  Weighting it by the square
roots of the marginals gives M[x, y] = sqrt(P_X(x)) B[x, y] sqrt(P_Y(y)),
whose SVD yields orthonormal feature tables under marginal weights:

    B[x, y] = sum_i  sigma_i f_i(x) g_i(y),      1 >= sigma_1 >= ... > 0

with E[f_i f_j] = E[g_i g_j] = delta_ij and E[f_i] = E[g_i] = 0.  The
constant (unit) mode of the unweighted ratio matrix never appears here:
subtracting the product of the marginals removes it exactly, which keeps
the decomposition stable even when further singular values equal 1 (the
degenerate case that matters for common-part extraction).

Sufficiency of a pair of symbol maps (s, t) is equivalent to the density
ratio being constant on the preimage blocks of (s, t); the minimal
sufficient pair groups symbols with identical conditional rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._grouping import group_rows
from .dist import (
    ConditionalKernel,
    DeterministicMap,
    JointDistribution,
    conditional_kernel,
    conditional_mutual_information,
    marginals,
    pushforward,
)
from .errors import (
    DimensionError,
    InconsistentDecomposition,
    InsufficientStatistic,
    NumericalError,
)

#: singular values at or below this are treated as numerically zero rank
RANK_TOL = 1e-10
#: singular values may exceed 1 by at most this much before being an error
UNIT_SLACK = 1e-9
#: conditional rows closer than this in sup norm describe the same symbol
ROW_GROUP_TOL = 1e-10
#: default sufficiency verdict tolerance on the density-ratio gap
SUFFICIENCY_TOL = 1e-9


@dataclass(frozen=True)
class CdkMatrix:
    """Centered density ratio ``b[x, y] = p(x, y) / (p_x(x) p_y(y)) - 1``."""

    b: np.ndarray
    px: np.ndarray
    py: np.ndarray

    def __post_init__(self):
        for name in ("b", "px", "py"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.b.shape != (self.px.size, self.py.size):
            raise DimensionError("ratio matrix does not match marginal sizes")


def cdk_matrix(j: JointDistribution) -> CdkMatrix:
    """Centered density-ratio matrix of a joint pmf.

    Satisfies sum_x p_x(x) b[x, y] = 0 for every y (and symmetrically in x),
    and vanishes identically iff the coordinates are independent.
    """
    px, py = marginals(j)
    b = j.p / np.outer(px, py) - 1.0
    return CdkMatrix(b=b, px=px, py=py)


@dataclass(frozen=True)
class ModalDecomposition:
    """Dependence spectrum and feature tables of a joint pmf.

    ``F`` (nx, rank) and ``G`` (ny, rank) hold the feature values; column i
    is the pair (f_i, g_i) attached to ``sigmas[i]``.  Columns are
    orthonormal under the respective marginal weight and are sign-fixed so
    the first significantly nonzero entry of each f column is positive.
    """

    rank: int
    sigmas: np.ndarray
    F: np.ndarray
    G: np.ndarray
    px: np.ndarray
    py: np.ndarray

    def __post_init__(self):
        for name in ("sigmas", "F", "G", "px", "py"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.sigmas.shape != (self.rank,):
            raise DimensionError("sigma vector does not match rank")
        if self.F.shape != (self.px.size, self.rank):
            raise DimensionError("F table does not match (nx, rank)")
        if self.G.shape != (self.py.size, self.rank):
            raise DimensionError("G table does not match (ny, rank)")


def modal_decompose(j: JointDistribution, rank_tol: float = RANK_TOL) -> ModalDecomposition:
    """Decompose the dependence of a joint pmf into orthonormal modes.

    Works on the marginally weighted centered ratio matrix, so the trivial
    constant mode is removed exactly before the SVD; this stays well defined
    when nontrivial singular values equal 1 (perfectly correlated parts).
    Singular values are sorted descending, clipped to at most 1, and
    truncated at ``rank_tol``; the rank never exceeds min(nx, ny) - 1.
    """
    px, py = marginals(j)
    weight = np.sqrt(np.outer(px, py))
    m = (j.p - np.outer(px, py)) / weight
    try:
        u, sig, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed to converge: {exc}") from exc
    keep = sig > rank_tol
    keep[min(j.nx, j.ny) - 1:] = False  # weighted centered ratio has deficient rank
    sig = sig[keep]
    u = u[:, keep]
    vt = vt[keep]
    if sig.size and sig[0] > 1.0 + UNIT_SLACK:
        raise NumericalError(f"leading singular value {sig[0]!r} exceeds 1")
    sig = np.minimum(sig, 1.0)
    f = u / np.sqrt(px)[:, None]
    g = vt.T / np.sqrt(py)[:, None]
    for i in range(sig.size):
        col = f[:, i]
        nz = np.nonzero(np.abs(col) > 1e-9 * np.abs(col).max())[0]
        if col[nz[0]] < 0.0:
            f[:, i] = -f[:, i]
            g[:, i] = -g[:, i]
    return ModalDecomposition(rank=int(sig.size), sigmas=sig, F=f, G=g, px=px, py=py)


def reconstruct_joint(md: ModalDecomposition) -> JointDistribution:
    """Rebuild the joint pmf from a modal decomposition.

    Entries below -1e-9 mean the decomposition is not internally consistent
    and raise; smaller negative excursions are floating-point noise and are
    clipped to zero.
    """
    base = np.outer(md.px, md.py)
    p = base * (1.0 + (md.F * md.sigmas) @ md.G.T)
    if p.size and p.min() < -1e-9:
        raise InconsistentDecomposition(
            f"reconstruction produced entry {p.min():.3e} below -1e-9")
    return JointDistribution(np.clip(p, 0.0, None))


def maximal_correlation(j: JointDistribution) -> float:
    """Largest dependence singular value; 0 for independent coordinates."""
    md = modal_decompose(j)
    return float(md.sigmas[0]) if md.rank else 0.0


def minimal_sufficient_maps(j: JointDistribution,
                            tol: float = ROW_GROUP_TOL):
    """Coarsest per-coordinate maps that preserve the dependence exactly.

    Groups x symbols whose conditional rows P(y | x) coincide within `tol`
    in sup norm (transitively), and y symbols by their P(x | y) columns.
    Class indices follow first occurrence, so repeated calls agree.
    """
    rows_x = conditional_kernel(j, "y|x").k
    rows_y = conditional_kernel(j, "x|y").k
    s = DeterministicMap(group_rows(rows_x, tol))
    t = DeterministicMap(group_rows(rows_y, tol))
    return s, t


@dataclass(frozen=True)
class SufficiencyVerdict:
    """Outcome of a sufficiency test for a pair of symbol maps."""

    sufficient: bool
    max_ratio_gap: float
    cmi_s: float
    cmi_t: float
    tol: float


def check_sufficiency(j: JointDistribution, s: DeterministicMap,
                      t: DeterministicMap, tol: float = SUFFICIENCY_TOL) -> SufficiencyVerdict:
    """Test whether (s, t) preserve the dependence structure of ``j``.

    The criterion is equality of density ratios: the pair is sufficient iff
    P(x,y) / (P_X P_Y) equals the reduced ratio at (s(x), t(y)) for every
    cell.  ``cmi_s`` and ``cmi_t`` report I(X;Y|s(X)) and I(X;Y|t(Y)) in
    bits as corroborating diagnostics (both vanish for sufficient maps).
    """
    if s.domain_size != j.nx or t.domain_size != j.ny:
        raise DimensionError(
            f"maps cover ({s.domain_size}, {t.domain_size}) symbols, "
            f"joint has ({j.nx}, {j.ny})")
    red = pushforward(j, s, t)
    px, py = marginals(j)
    ps, pt = marginals(red)
    ratio = j.p / np.outer(px, py)
    ratio_red = (red.p / np.outer(ps, pt))[np.ix_(s.assignment, t.assignment)]
    gap = float(np.max(np.abs(ratio - ratio_red)))

    def cond_mi(mapping, axis):
        cube = np.zeros((j.nx, j.ny, mapping.image_size))
        if axis == 0:
            cube[np.arange(j.nx)[:, None], np.arange(j.ny)[None, :],
                 mapping.assignment[:, None]] = j.p
        else:
            cube[np.arange(j.nx)[:, None], np.arange(j.ny)[None, :],
                 mapping.assignment[None, :]] = j.p
        return conditional_mutual_information(cube, unit="bits").value

    return SufficiencyVerdict(
        sufficient=gap <= tol,
        max_ratio_gap=gap,
        cmi_s=cond_mi(s, 0),
        cmi_t=cond_mi(t, 1),
        tol=float(tol),
    )


def reduce_joint(j: JointDistribution, s: DeterministicMap, t: DeterministicMap,
                 strict: bool = False, tol: float = SUFFICIENCY_TOL) -> JointDistribution:
    """Aggregate ``j`` through (s, t); with ``strict`` require sufficiency."""
    if strict:
        verdict = check_sufficiency(j, s, t, tol)
        if not verdict.sufficient:
            raise InsufficientStatistic(
                f"density-ratio gap {verdict.max_ratio_gap:.3e} exceeds {tol:g}")
    return pushforward(j, s, t)
