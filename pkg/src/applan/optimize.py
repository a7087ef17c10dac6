"""Bi-objective placement search: deployment cost versus weighted coverage.

A placement decision is scored on two axes: total cost of the assigned
equipment (installation plus hardware, to minimize) and the weighted sum
of per-receiver link rates (to maximize).  Small instances can be solved
exactly by enumeration; larger ones use a per-site probability-vector
search swept over a grid of cost budgets, whose pooled per-cost best
samples approximate the Pareto front.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .grid import GridScheme, PlacementDecision
from .propagation import link_budget

__all__ = [
    "InstanceTooLargeError",
    "ObjectiveVector",
    "ParetoResult",
    "SearchParams",
    "brute_force_pareto",
    "dominates",
    "evaluate",
    "pareto_filter",
    "variant_probability_search",
]

# Brute-force enumeration refuses instances with more decisions than this.
BRUTE_FORCE_LIMIT = 2**20


class InstanceTooLargeError(ValueError):
    """The instance's decision space is too large to enumerate exactly."""


@dataclass(frozen=True)
class ObjectiveVector:
    """Both objectives of one decision plus its feasibility.

    ``weighted_coverage`` is the sum over receivers of ``weight * rate``;
    ``feasible`` means every receiver meets its minimum rate.
    """

    total_cost: float
    weighted_coverage: float
    feasible: bool
    per_receiver_rates: Mapping[str, float]


@dataclass(frozen=True)
class SearchParams:
    """Tuning knobs of the probability-vector search."""

    seed: int = 0
    population: int = 48
    generations: int = 60
    elite_fraction: float = 0.125
    learning_rate: float = 0.3
    prob_floor: float = 0.02
    budget_levels: int = 16

    def __post_init__(self) -> None:
        if self.population < 1:
            raise ValueError("population must be at least 1")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if not 0.0 < self.elite_fraction <= 1.0:
            raise ValueError("elite_fraction must be in (0, 1]")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0.0 <= self.prob_floor < 1.0:
            raise ValueError("prob_floor must be in [0, 1)")
        if self.budget_levels < 1:
            raise ValueError("budget_levels must be at least 1")


@dataclass(frozen=True)
class ParetoResult:
    """A mutually nondominated set of decisions, sorted by ascending cost.

    ``wall_time_s`` is informational only and excluded from equality so
    repeated runs with the same seed compare equal.
    """

    points: tuple[tuple[PlacementDecision, ObjectiveVector], ...]
    seed: int | None
    evaluations: int
    wall_time_s: float = field(compare=False, default=0.0)


class _SchemeEvaluator:
    """Precomputed link table for fast repeated decision scoring.

    Per (site, option, receiver) the link rate is decision-independent,
    so the whole objective reduces to table lookups.  Option index 0 is
    "no equipment"; options 1..n are the site's allowed equipment sorted
    by id, which makes option-tuple order agree with the lexicographic
    order of the decisions they encode.
    """

    def __init__(self, scheme: GridScheme) -> None:
        self.scheme = scheme
        self.sites = sorted(scheme.sites, key=lambda s: s.id)
        self.receivers = scheme.receivers
        self.site_options: list[tuple[str | None, ...]] = []
        for site in self.sites:
            allowed = sorted(scheme.allowed_equipment_ids(site))
            self.site_options.append((None, *allowed))

        n_sites = len(self.sites)
        n_rx = len(self.receivers)
        max_options = max((len(o) for o in self.site_options), default=1)

        self.cost = np.zeros((n_sites, max_options))
        self.rates = np.zeros((n_sites, max_options, n_rx))
        self.option_count = np.array([len(o) for o in self.site_options], dtype=np.int64)

        for i, site in enumerate(self.sites):
            for k, equipment_id in enumerate(self.site_options[i]):
                if equipment_id is None:
                    continue
                equip = scheme.equipment_by_id(equipment_id)
                self.cost[i, k] = site.infra_cost + equip.cost
                for j, rx in enumerate(self.receivers):
                    budget = link_budget(
                        scheme,
                        site,
                        equip,
                        rx.cell,
                        rx_gain_dBi=rx.rx_gain_dBi,
                        noise_dBm=rx.noise_dBm,
                        rx_id=rx.id,
                    )
                    if budget is not None:
                        self.rates[i, k, j] = budget.rate_mbps

        self.weights = np.array([rx.weight for rx in self.receivers])
        self.min_rates = np.array([rx.min_bitrate_mbps for rx in self.receivers])
        max_rate = max((r for _t, r in scheme.bitrate_table.steps), default=0.0)
        self.coverage_bound = float(self.weights.sum() * max_rate) if n_rx else 0.0

    def score_batch(
        self, options: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cost, weighted coverage and feasibility for a batch of decisions.

        ``options`` has shape (batch, n_sites) holding option indices.
        """
        n_sites = len(self.sites)
        batch = options.shape[0]
        costs = self.cost[np.arange(n_sites), options].sum(axis=1) if n_sites else np.zeros(batch)
        if len(self.receivers) == 0:
            return costs, np.zeros(batch), np.ones(batch, dtype=bool)
        if n_sites == 0:
            per_rx = np.zeros((batch, len(self.receivers)))
        else:
            per_rx = self.rates[np.arange(n_sites)[None, :], options, :].max(axis=1)
        coverage = per_rx @ self.weights
        feasible = (per_rx >= self.min_rates[None, :]).all(axis=1)
        return costs, coverage, feasible

    def objective(self, options: Sequence[int]) -> ObjectiveVector:
        row = np.asarray([options], dtype=np.int64)
        costs, coverage, feasible = self.score_batch(row)
        if len(self.receivers) == 0 or len(self.sites) == 0:
            rates = {rx.id: 0.0 for rx in self.receivers}
        else:
            n_sites = len(self.sites)
            per_rx = self.rates[np.arange(n_sites), list(options), :].max(axis=0)
            rates = {rx.id: float(r) for rx, r in zip(self.receivers, per_rx)}
        return ObjectiveVector(
            total_cost=float(costs[0]),
            weighted_coverage=float(coverage[0]),
            feasible=bool(feasible[0]),
            per_receiver_rates=rates,
        )

    def decision_from_options(self, options: Sequence[int]) -> PlacementDecision:
        pairs = []
        for site, site_options, k in zip(self.sites, self.site_options, options):
            equipment_id = site_options[k]
            if equipment_id is not None:
                pairs.append((site.id, equipment_id))
        return PlacementDecision(tuple(pairs))

    def options_from_decision(self, decision: PlacementDecision) -> list[int]:
        known = {site.id for site in self.sites}
        for site_id, _ in decision.assignments:
            if site_id not in known:
                raise ValueError(f"decision names unknown site {site_id!r}")
        options = []
        for site, site_options in zip(self.sites, self.site_options):
            equipment_id = decision.equipment_at(site.id)
            try:
                options.append(site_options.index(equipment_id))
            except ValueError:
                raise ValueError(
                    f"equipment {equipment_id!r} is not allowed at site {site.id!r}"
                ) from None
        return options


@lru_cache(maxsize=8)
def _evaluator(scheme: GridScheme) -> _SchemeEvaluator:
    return _SchemeEvaluator(scheme)


def evaluate(scheme: GridScheme, decision: PlacementDecision) -> ObjectiveVector:
    """Score one placement decision on cost, coverage and feasibility."""
    evaluator = _evaluator(scheme)
    return evaluator.objective(evaluator.options_from_decision(decision))


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Pareto dominance: no worse on both axes, strictly better on one.

    Only defined between feasible objective vectors.
    """
    if not (a.feasible and b.feasible):
        raise ValueError("dominance is only defined between feasible objectives")
    if a.total_cost > b.total_cost or a.weighted_coverage < b.weighted_coverage:
        return False
    return a.total_cost < b.total_cost or a.weighted_coverage > b.weighted_coverage


def _decision_key(decision: PlacementDecision) -> tuple[tuple[str, str], ...]:
    return decision.assignments


def pareto_filter(
    points: Sequence[tuple[PlacementDecision, ObjectiveVector]],
) -> list[tuple[PlacementDecision, ObjectiveVector]]:
    """Keep the nondominated subset, sorted by ascending cost.

    Objective duplicates collapse to the lexicographically smallest
    decision.  All inputs must be feasible.
    """
    for _decision, objective in points:
        if not objective.feasible:
            raise ValueError("pareto_filter only accepts feasible points")

    best_by_objective: dict[tuple[float, float], tuple[PlacementDecision, ObjectiveVector]] = {}
    for decision, objective in points:
        key = (objective.total_cost, objective.weighted_coverage)
        kept = best_by_objective.get(key)
        if kept is None or _decision_key(decision) < _decision_key(kept[0]):
            best_by_objective[key] = (decision, objective)

    unique = list(best_by_objective.values())
    kept_points = []
    for decision, objective in unique:
        if any(dominates(other, objective) for _d, other in unique if other is not objective):
            continue
        kept_points.append((decision, objective))
    kept_points.sort(key=lambda point: point[1].total_cost)
    return kept_points


def brute_force_pareto(scheme: GridScheme, *, limit: int = BRUTE_FORCE_LIMIT) -> ParetoResult:
    """Exact Pareto front by full enumeration of the decision space.

    Refuses instances whose decision count exceeds ``limit`` rather than
    silently running forever.
    """
    evaluator = _evaluator(scheme)
    space = 1
    for count in evaluator.option_count:
        space *= int(count)
        if space > limit:
            raise InstanceTooLargeError(
                f"decision space exceeds {limit} decisions; use "
                "variant_probability_search instead"
            )

    started = time.perf_counter()
    feasible_points = []
    evaluations = 0
    option_ranges = [range(int(count)) for count in evaluator.option_count]
    for options in itertools.product(*option_ranges):
        objective = evaluator.objective(options)
        evaluations += 1
        if objective.feasible:
            feasible_points.append((evaluator.decision_from_options(options), objective))

    points = tuple(pareto_filter(feasible_points))
    return ParetoResult(
        points=points,
        seed=None,
        evaluations=evaluations,
        wall_time_s=time.perf_counter() - started,
    )


def _budget_grid(evaluator: _SchemeEvaluator, levels: int) -> list[float]:
    """Evenly spaced cost budgets plus every single-assignment cost."""
    max_cost = float(sum(site_costs.max() for site_costs in evaluator.cost))
    budgets = {float(b) for b in np.linspace(0.0, max_cost, levels)}
    for i in range(len(evaluator.sites)):
        for k in range(1, int(evaluator.option_count[i])):
            budgets.add(float(evaluator.cost[i, k]))
    return sorted(budgets)


def _run_budget(
    evaluator: _SchemeEvaluator,
    budget: float,
    params: SearchParams,
    rng: np.random.Generator,
) -> tuple[list[tuple[int, ...]], int]:
    """One probability-vector search restricted to ``cost <= budget``.

    Returns the within-budget feasible decisions worth keeping -- for each
    distinct sampled cost, the best-coverage decision seen (ties broken
    toward the lexicographically smallest option tuple) -- plus the number
    of sampled decisions.  Harvesting per-cost bests rather than a single
    winner makes the budget sweep far less sensitive to any one run
    converging onto a local optimum.
    """
    n_sites = len(evaluator.sites)
    max_options = evaluator.cost.shape[1]
    penalty = evaluator.coverage_bound + 1.0

    # Uniform start over each site's valid options; invalid slots stay 0.
    probs = np.zeros((n_sites, max_options))
    for i, count in enumerate(evaluator.option_count):
        probs[i, : int(count)] = 1.0 / int(count)

    valid = np.zeros_like(probs, dtype=bool)
    for i, count in enumerate(evaluator.option_count):
        valid[i, : int(count)] = True

    # cost -> (-coverage, option tuple); min() of the value is the winner
    best_by_cost: dict[float, tuple[float, tuple[int, ...]]] = {}
    sampled = 0
    for _generation in range(params.generations):
        uniforms = rng.random((params.population, n_sites))
        options = np.empty((params.population, n_sites), dtype=np.int64)
        for i in range(n_sites):
            cumulative = np.cumsum(probs[i])
            cumulative[-1] = 1.0  # guard against float drift at the top end
            options[:, i] = np.searchsorted(cumulative, uniforms[:, i], side="right")
        sampled += params.population

        costs, coverage, feasible = evaluator.score_batch(options)
        keep = costs <= budget + 1e-9
        if not keep.any():
            continue

        kept_options = options[keep]
        kept_costs = costs[keep]
        kept_coverage = coverage[keep]
        kept_feasible = feasible[keep]

        for row_index in np.flatnonzero(kept_feasible):
            cost = float(kept_costs[row_index])
            candidate = (
                -float(kept_coverage[row_index]),
                tuple(int(v) for v in kept_options[row_index]),
            )
            kept = best_by_cost.get(cost)
            if kept is None or candidate < kept:
                best_by_cost[cost] = candidate

        scores = kept_coverage - np.where(kept_feasible, 0.0, penalty)
        order = sorted(
            range(len(scores)),
            key=lambda r: (-scores[r], tuple(int(v) for v in kept_options[r])),
        )
        n_elite = max(1, int(params.elite_fraction * len(order)))
        elite = kept_options[order[:n_elite]]

        frequencies = np.zeros_like(probs)
        for i in range(n_sites):
            counts = np.bincount(elite[:, i], minlength=max_options)
            frequencies[i] = counts / len(elite)

        probs = (1.0 - params.learning_rate) * probs + params.learning_rate * frequencies
        probs = np.where(valid, np.maximum(probs, params.prob_floor), 0.0)
        probs /= probs.sum(axis=1, keepdims=True)

    return [options for _neg_cov, options in best_by_cost.values()], sampled


def variant_probability_search(scheme: GridScheme, params: SearchParams) -> ParetoResult:
    """Approximate the cost/coverage Pareto front with budgeted searches.

    Sweeps a grid of cost budgets; for each budget an independent
    probability-vector search maximizes weighted coverage among decisions
    within budget (infeasible decisions score below every feasible one)
    and harvests its best sample at every distinct cost.  The harvested
    decisions, the empty decision and all single-assignment decisions are
    then jointly Pareto-filtered.  Fully deterministic for a given seed.
    """
    evaluator = _evaluator(scheme)
    started = time.perf_counter()

    budgets = _budget_grid(evaluator, params.budget_levels)
    seeds = np.random.SeedSequence(params.seed).spawn(len(budgets))

    # The empty decision and every single-assignment decision are always
    # candidates: they are cheap to score and anchor the low-cost end of
    # the front regardless of how any stochastic run converges.
    candidates: set[tuple[int, ...]] = {(0,) * len(evaluator.sites)}
    for i in range(len(evaluator.sites)):
        for k in range(1, int(evaluator.option_count[i])):
            single = [0] * len(evaluator.sites)
            single[i] = k
            candidates.add(tuple(single))

    evaluations = 0
    for budget, seed in zip(budgets, seeds):
        winners, sampled = _run_budget(evaluator, budget, params, np.random.default_rng(seed))
        evaluations += sampled
        candidates.update(winners)

    feasible_points = []
    for options in sorted(candidates):
        objective = evaluator.objective(options)
        if objective.feasible:
            feasible_points.append((evaluator.decision_from_options(options), objective))

    points = tuple(pareto_filter(feasible_points))
    return ParetoResult(
        points=points,
        seed=params.seed,
        evaluations=evaluations,
        wall_time_s=time.perf_counter() - started,
    )
