"""Search for a syndrome-weight step function with the smallest worst case.

Candidates are compared on one shared set of keys and error patterns
(common random numbers) with the lexicographic objective
``(failures, max iterations, mean iterations)``. The search is coordinate
descent over the thresholds of a fixed grid of syndrome-weight bins.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .decoder import DecoderConfig, IterationTrace, StepFunction, SyndromeWeightStep, decode_syndrome
from .qc_mdpc import Params, PrivateKey, keygen, sample_support, syndrome_array
from .seeds import error_rng, key_rng

log = logging.getLogger(__name__)


class Objective(NamedTuple):
    failures: int
    max_iterations: int
    mean_iterations: float


@dataclass(frozen=True)
class TuningConfig:
    params: Params
    codes: int = 2
    trials_per_code: int = 1000
    # lower bounds of the syndrome-weight bins; None picks an even grid
    bounds: tuple[int, ...] | None = None
    threshold_range: tuple[int, int] | None = None
    start: StepFunction | None = None
    max_iterations: int = 20
    syndrome_update: str = "per_iteration"
    max_sweeps: int = 5
    moves: tuple[int, ...] = (-2, -1, 1, 2)
    # keep thresholds non-decreasing in the syndrome weight; rarely visited bins
    # otherwise drift to whatever shaves the mean on the tuning sample
    monotone: bool = True
    # optional second stage: re-rank the best few on a larger fresh sample
    finalists: int = 0
    final_trials_per_code: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.codes < 1 or self.trials_per_code < 1:
            raise ValueError("codes and trials_per_code must be at least 1")

    @property
    def grid(self) -> tuple[int, ...]:
        if self.bounds is not None:
            return tuple(self.bounds)
        return default_bounds(self.params)

    @property
    def thresholds(self) -> tuple[int, int]:
        if self.threshold_range is not None:
            return self.threshold_range
        return math.ceil(self.params.w / 4), self.params.w // 2


def default_bounds(params: Params, bins: int = 48) -> tuple[int, ...]:
    width = max(1, round(params.r / bins))
    return tuple(range(0, params.r // 2 + 1, width))


def seed_step(params: Params, bounds: tuple[int, ...], lo: int | None = None, hi: int | None = None) -> StepFunction:
    """Starting point: the floor ceil(w/4) plus an offset that grows with the syndrome weight."""
    d = params.block_weight
    lo = math.ceil(params.w / 4) if lo is None else lo
    hi = d if hi is None else hi
    bps = []
    for b in bounds:
        rho = b / params.r
        t = lo + max(0, math.floor(0.7 * d * (rho - 0.2)))
        bps.append((b, min(hi, max(lo, t))))
    return StepFunction(tuple(bps), params.r, params.w)


# instance sets ------------------------------------------------------------

@dataclass
class InstanceSet:
    """Keys plus the syndromes of their error patterns, shared by all candidates."""

    params: Params
    keys: list[PrivateKey]
    syndromes: list[list[np.ndarray]]
    errors: list[list[np.ndarray]]

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.syndromes)

    @classmethod
    def build(cls, params: Params, codes: int, trials: int, seed: int, stream: int = 0) -> "InstanceSet":
        keys, syns, errs = [], [], []
        for c in range(codes):
            code = stream * 1_000_000 + c
            priv, _ = keygen(params, key_rng(seed, code))
            keys.append(priv)
            row_s, row_e = [], []
            for k in range(trials):
                e = sample_support(params.n, params.t, error_rng(seed, code, k)).as_array()
                row_e.append(e)
                row_s.append(syndrome_array(priv, e))
            syns.append(row_s)
            errs.append(row_e)
        return cls(params, keys, syns, errs)


@dataclass
class CandidateSummary:
    step: StepFunction
    failures: int
    max_iterations: int
    mean_iterations: float
    histogram: dict
    visited_bins: frozenset = field(default_factory=frozenset, repr=False)

    @property
    def objective(self) -> Objective:
        return Objective(self.failures, self.max_iterations, self.mean_iterations)


def evaluate(step: StepFunction, instances: InstanceSet, max_iterations: int = 20,
             syndrome_update: str = "per_iteration") -> CandidateSummary:
    """Decode every shared instance with ``step`` and summarise the iteration counts."""
    cfg = DecoderConfig(SyndromeWeightStep(step), max_iterations=max_iterations,
                        syndrome_update=syndrome_update, trace=True)
    bounds = [b for b, _ in step.breakpoints]
    hist: Counter = Counter()
    visited = set()
    for priv, syns, errs in zip(instances.keys, instances.syndromes, instances.errors):
        for s, e in zip(syns, errs):
            flipped, trace = decode_syndrome(priv, s, cfg)
            for rec in trace.records:
                visited.add(bounds[np.searchsorted(bounds, rec.syndrome_weight_before, side="right") - 1])
            ok = trace.decoded and np.array_equal(np.flatnonzero(flipped), e)
            hist[trace.iterations if ok else "inf"] += 1
    failures = hist.get("inf", 0)
    done = {k: v for k, v in hist.items() if k != "inf"}
    n_done = sum(done.values())
    if n_done:
        worst = max(done)
        mean = sum(k * v for k, v in done.items()) / n_done
    else:
        worst, mean = max_iterations, float(max_iterations)
    return CandidateSummary(step, failures, worst, mean, dict(hist), frozenset(visited))


@dataclass
class TuningReport:
    best: StepFunction
    best_summary: CandidateSummary
    evaluated: list[CandidateSummary]
    instances: int
    final_instances: int = 0
    finalists: list[CandidateSummary] = field(default_factory=list)
    all_failing: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["candidate", "stage", "instances", "failures", "max_iterations",
                      "mean_iterations", "histogram", "step"])
        rows = [("screen", self.instances, c) for c in self.evaluated]
        rows += [("final", self.final_instances, c) for c in self.finalists]
        for i, (stage, size, c) in enumerate(rows):
            hist = ";".join(f"{k}:{v}" for k, v in sorted(c.histogram.items(), key=lambda kv: _hist_key(kv[0])))
            step = ";".join(f"{b}:{t}" for b, t in c.step.breakpoints)
            out.writerow([i, stage, size, c.failures, c.max_iterations, f"{c.mean_iterations:.6f}", hist, step])
        return buf.getvalue()


def _hist_key(k):
    return math.inf if k == "inf" else k


def _with_threshold(step: StepFunction, index: int, value: int, monotone: bool = False) -> StepFunction:
    """Set one bin; with ``monotone`` the neighbours are dragged along to stay non-decreasing."""
    bps = list(step.breakpoints)
    bps[index] = (bps[index][0], value)
    if monotone:
        for j in range(index + 1, len(bps)):
            bps[j] = (bps[j][0], max(bps[j][1], value))
        for j in range(index):
            bps[j] = (bps[j][0], min(bps[j][1], value))
    return StepFunction(tuple(bps), step.r, step.w)


def _align(step: StepFunction, bounds: tuple[int, ...]) -> StepFunction:
    """Resample ``step`` onto the given bin bounds."""
    return StepFunction(tuple((b, step(b)) for b in bounds), step.r, step.w)


def tune_step_function(cfg: TuningConfig) -> TuningReport:
    p = cfg.params
    lo, hi = cfg.thresholds
    bounds = cfg.grid
    instances = InstanceSet.build(p, cfg.codes, cfg.trials_per_code, cfg.seed)
    current = _align(cfg.start, bounds) if cfg.start is not None else seed_step(p, bounds, lo, hi)
    if cfg.monotone:
        vals = [t for _, t in current.breakpoints]
        if vals != sorted(vals):
            raise ValueError("monotone tuning needs a non-decreasing starting step function")

    cache: dict[tuple, CandidateSummary] = {}
    evaluated: list[CandidateSummary] = []

    def score(step: StepFunction) -> CandidateSummary:
        key = step.breakpoints
        if key not in cache:
            cache[key] = evaluate(step, instances, cfg.max_iterations, cfg.syndrome_update)
            evaluated.append(cache[key])
            log.info("candidate %d: %s", len(evaluated), cache[key].objective)
        return cache[key]

    best = score(current)
    for sweep in range(cfg.max_sweeps):
        improved = False
        for i, (b, t) in enumerate(best.step.breakpoints):
            if b not in best.visited_bins:
                # no decode ever queried this bin, so changing it changes nothing
                continue
            trial_best = best
            for mv in cfg.moves:
                v = t + mv
                if not lo <= v <= hi:
                    continue
                cand = score(_with_threshold(best.step, i, v, cfg.monotone))
                if cand.objective < trial_best.objective:
                    trial_best = cand
            if trial_best is not best:
                best = trial_best
                improved = True
        log.info("sweep %d done: %s", sweep, best.objective)
        if not improved:
            break

    report = TuningReport(best.step, best, evaluated, instances.size)
    if cfg.finalists and cfg.final_trials_per_code:
        ranked = sorted(evaluated, key=lambda c: c.objective)[: cfg.finalists]
        final_set = InstanceSet.build(p, cfg.codes, cfg.final_trials_per_code, cfg.seed, stream=1)
        report.finalists = [evaluate(c.step, final_set, cfg.max_iterations, cfg.syndrome_update) for c in ranked]
        report.final_instances = final_set.size
        winner = min(report.finalists, key=lambda c: c.objective)
        report.best, report.best_summary = winner.step, winner
    pool = report.final_instances if report.finalists else report.instances
    report.all_failing = report.best_summary.failures == pool
    if report.all_failing:
        log.warning("every candidate fails on every instance; returning the least-bad one")
    return report


def collect_traces(params: Params, decoder_cfg: DecoderConfig, n_codes: int, n_trials: int,
                   seed: int) -> list[tuple[str, IterationTrace]]:
    """Traced decodes of fresh instances, with ground-truth residual error weights."""
    cfg = replace(decoder_cfg, trace=True)
    out = []
    for c in range(n_codes):
        priv, _ = keygen(params, key_rng(seed, c))
        for k in range(n_trials):
            e_pos = sample_support(params.n, params.t, error_rng(seed, c, k)).as_array()
            e = np.zeros(params.n, dtype=np.uint8)
            e[e_pos] = 1
            _, trace = decode_syndrome(priv, syndrome_array(priv, e_pos), cfg, e)
            out.append((f"{c}:{k}", trace))
    return out
