"""Test-bed generators and the separability verification harness.

Refinement is the controlled way to build joints whose dependence lives on
a smaller alphabet: every base symbol is split into weighted copies,

    P(x, y) = P_ST(s(x), t(y)) * w_x * w_y,

so the block maps (s, t) are sufficient by construction and every
dependence measure must survive the reduction back to the base.
`verify_separability` runs a configurable battery of such comparisons and
reports per-measure gaps; `simulate_and_estimate` does the same on sampled
data, where reduction happens by aggregating counts.

Sampling uses the counter-based Philox generator, so identical seeds give
identical draws across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common_info import gacs_korner, wyner_solve
from .dist import (
    DeterministicMap,
    InfoValue,
    JointDistribution,
    mutual_information,
    pushforward,
    validate_and_trim,
)
from .errors import DimensionError, InsufficientStatistic, InvalidDistribution
from .finfo import f_information, get_generator
from .ib import ib_curve, theta_of_R
from .modal import check_sufficiency


def dsbs(flip: float) -> JointDistribution:
    """Doubly symmetric binary pair: uniform X, Y = X flipped with this rate."""
    if not 0.0 <= flip <= 1.0:
        raise InvalidDistribution("flip probability must lie in [0, 1]")
    same = (1.0 - flip) / 2.0
    diff = flip / 2.0
    return validate_and_trim([[same, diff], [diff, same]])


def random_joint(nx: int, ny: int, alpha: float = 1.0,
                 seed: int = 0) -> JointDistribution:
    """Joint pmf drawn from a flat Dirichlet over the nx*ny cells."""
    if nx < 1 or ny < 1:
        raise DimensionError("alphabet sizes must be positive")
    if alpha <= 0.0:
        raise ValueError("Dirichlet concentration must be positive")
    rng = np.random.default_rng(seed)
    cells = rng.dirichlet(np.full(nx * ny, alpha)).reshape(nx, ny)
    return validate_and_trim(cells)


@dataclass(frozen=True)
class RefinementSpec:
    """Recipe for splitting base symbols into weighted copies.

    ``split_x[s]`` holds the weight vector of the copies of base symbol s
    (nonnegative, summing to 1); likewise ``split_y``.  ``seed`` records
    the generator seed when the recipe was drawn randomly.
    """

    base: JointDistribution
    split_x: tuple
    split_y: tuple
    seed: int | None = None

    def __post_init__(self):
        for attr, n in (("split_x", self.base.nx), ("split_y", self.base.ny)):
            splits = tuple(tuple(float(w) for w in ws) for ws in getattr(self, attr))
            if len(splits) != n:
                raise DimensionError(
                    f"{attr} has {len(splits)} blocks for {n} base symbols")
            for ws in splits:
                if len(ws) == 0 or any(w < 0.0 for w in ws):
                    raise InvalidDistribution(
                        f"{attr} blocks need nonnegative, nonempty weights")
                if abs(sum(ws) - 1.0) > 1e-9:
                    raise InvalidDistribution(
                        f"{attr} block weights must sum to 1")
            object.__setattr__(self, attr, splits)


def random_refinement(base: JointDistribution, nx: int, ny: int,
                      seed: int = 0, alpha: float = 1.0) -> RefinementSpec:
    """Draw a random refinement of ``base`` to alphabet sizes (nx, ny)."""
    if nx < base.nx or ny < base.ny:
        raise DimensionError(
            "refined alphabets cannot be smaller than the base alphabets")
    rng = np.random.default_rng(seed)

    def blocks(n_base, n_total):
        sizes = np.ones(n_base, dtype=np.int64)
        for _ in range(n_total - n_base):
            sizes[rng.integers(n_base)] += 1
        return tuple(tuple(rng.dirichlet(np.full(sz, alpha))) for sz in sizes)

    return RefinementSpec(base=base, split_x=blocks(base.nx, nx),
                          split_y=blocks(base.ny, ny), seed=seed)


def refine_embedding(spec: RefinementSpec):
    """Materialize a refinement: returns (joint, s, t) with sufficient maps.

    Copies with weight exactly 0 would be dead symbols; they are dropped
    and the maps reindexed, so the returned joint is always valid.
    """
    base = spec.base

    def expand(splits, labels):
        block = np.concatenate([np.full(len(ws), i, dtype=np.int64)
                                for i, ws in enumerate(splits)])
        weights = np.concatenate([np.asarray(ws, dtype=float) for ws in splits])
        keep = weights > 0.0
        new_labels = None
        if labels is not None:
            new_labels = []
            for i, ws in enumerate(splits):
                new_labels.extend(f"{labels[i]}#{c}" for c in range(len(ws)))
            new_labels = tuple(lab for lab, k in zip(new_labels, keep) if k)
        return block[keep], weights[keep], new_labels

    sx, wx, labx = expand(spec.split_x, base.x_labels)
    ty, wy, laby = expand(spec.split_y, base.y_labels)
    p = base.p[np.ix_(sx, ty)] * np.outer(wx, wy)
    j = JointDistribution(p, x_labels=labx, y_labels=laby)
    return j, DeterministicMap(sx, base.nx), DeterministicMap(ty, base.ny)


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings shared by the verification battery."""

    seed: int = 0
    restarts: int = 10
    unit: str = "bits"
    wyner_card: int | None = None
    wyner_max_iters: int = 1000
    wyner_residual_tol: float = 1e-6
    ib_card: int | None = None
    ib_betas: tuple = (1.5, 2.0, 5.0)
    ib_conv_tol: float = 1e-10
    ib_max_iters: int = 2000
    theta_points: int = 11
    exact_tol: float = 1e-9
    solver_tol: float = 5e-3


#: measure battery run when none is requested explicitly
DEFAULT_MEASURES = ("mi", "f:kl", "f:reverse-kl", "f:chi2", "f:tv",
                    "f:hellinger2", "gk", "wyner", "ib", "theta")


@dataclass(frozen=True)
class MeasureRow:
    measure: str
    value_raw: float
    value_reduced: float
    gap: float
    tol: float
    passed: bool


@dataclass(frozen=True)
class SeparabilityReport:
    """Per-measure agreement between a joint and its reduction."""

    rows: tuple
    s: DeterministicMap
    t: DeterministicMap
    sufficient: bool
    sufficiency_gap: float
    overall: bool
    unit: str

    def to_dict(self) -> dict:
        return {
            "sufficient": self.sufficient,
            "sufficiency_gap": self.sufficiency_gap,
            "overall": self.overall,
            "unit": self.unit,
            "s": [int(v) for v in self.s.assignment],
            "t": [int(v) for v in self.t.assignment],
            "rows": [
                {
                    "measure": r.measure,
                    "value_raw": r.value_raw,
                    "value_reduced": r.value_reduced,
                    "gap": r.gap,
                    "tol": r.tol,
                    "pass": r.passed,
                }
                for r in self.rows
            ],
        }


def _gap(a: float, b: float) -> float:
    if a == b:
        return 0.0  # covers matching infinities
    return abs(a - b)


def verify_separability(j: JointDistribution, s: DeterministicMap,
                        t: DeterministicMap, measures=None, tols=None,
                        config: SolverConfig | None = None,
                        strict: bool = False) -> SeparabilityReport:
    """Compare dependence measures of ``j`` and its reduction through (s, t).

    With ``strict`` the maps must pass the sufficiency test, otherwise the
    report records the gap and proceeds (measure rows will then expose the
    mismatch).  Exact measures default to the ``exact_tol`` of the config,
    solver-based ones to ``solver_tol``.
    """
    cfg = config or SolverConfig()
    measures = tuple(measures) if measures is not None else DEFAULT_MEASURES
    tols = dict(tols) if tols else {}
    verdict = check_sufficiency(j, s, t, cfg.exact_tol)
    if strict and not verdict.sufficient:
        raise InsufficientStatistic(
            f"maps are not sufficient: ratio gap {verdict.max_ratio_gap:.3e}")
    red = pushforward(j, s, t)
    unit = cfg.unit

    rows = []

    def add(measure, raw, reduced, tol):
        gap = _gap(raw, reduced)
        rows.append(MeasureRow(measure=measure, value_raw=raw,
                               value_reduced=reduced, gap=gap, tol=tol,
                               passed=bool(gap <= tol)))

    need_curves = any(m in ("ib", "theta") for m in measures)
    curves = None
    if need_curves:
        curves = tuple(
            ib_curve(side, cfg.ib_betas, card_u=cfg.ib_card,
                     restarts=cfg.restarts, conv_tol=cfg.ib_conv_tol,
                     max_iters=cfg.ib_max_iters, seed=cfg.seed, unit=unit)
            for side in (j, red))

    for m in measures:
        if m == "mi":
            add("mi", mutual_information(j, unit).value,
                mutual_information(red, unit).value,
                tols.get(m, cfg.exact_tol))
        elif m.startswith("f:"):
            gen = get_generator(m[2:])
            add(m, f_information(j, gen, unit).value,
                f_information(red, gen, unit).value,
                tols.get(m, cfg.exact_tol))
        elif m == "gk":
            add("gk", gacs_korner(j, unit=unit).value.value,
                gacs_korner(red, unit=unit).value.value,
                tols.get(m, cfg.exact_tol))
        elif m == "wyner":
            raw = wyner_solve(j, card_w=cfg.wyner_card, restarts=cfg.restarts,
                              max_iters=cfg.wyner_max_iters,
                              residual_tol=cfg.wyner_residual_tol,
                              seed=cfg.seed, unit=unit)
            reduced = wyner_solve(red, card_w=cfg.wyner_card,
                                  restarts=cfg.restarts,
                                  max_iters=cfg.wyner_max_iters,
                                  residual_tol=cfg.wyner_residual_tol,
                                  seed=cfg.seed, unit=unit)
            add("wyner", raw.value.value, reduced.value.value,
                tols.get(m, cfg.solver_tol))
        elif m == "ib":
            for b, sol_raw, sol_red in zip(cfg.ib_betas,
                                           curves[0].solutions,
                                           curves[1].solutions):
                add(f"ib[beta={b:g}]", sol_raw.lagrangian.value,
                    sol_red.lagrangian.value, tols.get(m, cfg.solver_tol))
        elif m == "theta":
            r_max = curves[0].saturation_rate
            for r in np.linspace(0.0, r_max, cfg.theta_points):
                add(f"theta[R={r:.6g}]", theta_of_R(curves[0], r).value,
                    theta_of_R(curves[1], r).value,
                    tols.get(m, cfg.solver_tol))
        else:
            raise ValueError(f"unknown measure {m!r}")

    return SeparabilityReport(
        rows=tuple(rows), s=s, t=t,
        sufficient=verdict.sufficient,
        sufficiency_gap=verdict.max_ratio_gap,
        overall=all(r.passed for r in rows),
        unit=unit,
    )


@dataclass(frozen=True)
class SimulationResult:
    """Plug-in estimates from sampled data, raw and reduced."""

    mi_true: InfoValue
    mi_plugin_raw: InfoValue
    mi_plugin_reduced: InfoValue
    counts_raw: np.ndarray
    counts_reduced: np.ndarray


def simulate_and_estimate(j: JointDistribution, s: DeterministicMap,
                          t: DeterministicMap, n: int, seed: int = 0,
                          unit: str = "bits") -> SimulationResult:
    """Draw n iid pairs, estimate mutual information raw and reduced.

    The reduced estimate aggregates the raw count table through (s, t)
    before the plug-in, so the two estimates use exactly the same draws;
    the aggregation identity (reduced counts are the pushforward of the
    raw counts) holds by construction.
    """
    if s.domain_size != j.nx or t.domain_size != j.ny:
        raise DimensionError("maps do not match the joint alphabets")
    if n < 1:
        raise ValueError("sample size must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    cdf = np.cumsum(j.p.ravel())
    cdf[-1] = 1.0
    draws = rng.random(int(n))
    idx = np.searchsorted(cdf, draws, side="right")
    counts = np.bincount(idx, minlength=j.nx * j.ny).reshape(j.nx, j.ny)
    reduced = np.zeros((s.image_size, t.image_size), dtype=np.int64)
    np.add.at(reduced, (s.assignment[:, None], t.assignment[None, :]), counts)
    return SimulationResult(
        mi_true=mutual_information(j, unit),
        mi_plugin_raw=mutual_information(validate_and_trim(counts), unit),
        mi_plugin_reduced=mutual_information(validate_and_trim(reduced), unit),
        counts_raw=counts,
        counts_reduced=reduced,
    )
