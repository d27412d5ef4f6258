"""Monte-Carlo experiments over random keys and error patterns.

Each experiment draws ``n_codes`` keys and ``n_trials_per_code`` error
patterns per key, decodes them, and tallies how many effective iterations
were needed. Instances are seeded individually (see ``seeds``), so the
tallies do not depend on how the work is split across worker processes.
"""

from __future__ import annotations

import csv
import io
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .decoder import TRACE_COLUMNS, DecoderConfig, decode_syndrome, trace_rows
from .qc_mdpc import Params, PrivateKey, keygen, sample_support, syndrome_array
from .seeds import error_rng, key_rng

INF = "inf"


@dataclass(frozen=True)
class ExperimentConfig:
    params: Params
    decoder: DecoderConfig
    n_codes: int = 10
    n_trials_per_code: int = 10_000
    seed: int = 0
    # weight of the planted errors; defaults to params.t
    error_weight: int | None = None
    workers: int = 1
    trace_path: Path | None = None
    label: str = ""

    def __post_init__(self):
        if self.n_codes < 1 or self.n_trials_per_code < 1:
            raise ValueError("n_codes and n_trials_per_code must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def weight(self) -> int:
        return self.params.t if self.error_weight is None else self.error_weight


@dataclass
class ExperimentReport:
    counts: dict[int, int]
    failures: int = 0
    # zero syndrome reached, but not on the planted error; included in failures
    wrong_decodes: int = 0
    executed_sweeps: dict[int, int] = field(default_factory=dict)
    wall_clock: float = 0.0
    label: str = ""

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.failures

    @property
    def max_iterations(self) -> int | None:
        return max(self.counts) if self.counts else None

    @property
    def mean_iterations(self) -> float:
        n = sum(self.counts.values())
        return sum(k * v for k, v in self.counts.items()) / n if n else math.nan

    def rows(self) -> list[tuple[int | str, int]]:
        top = self.max_iterations
        out = [(k, self.counts.get(k, 0)) for k in range(top + 1)] if top is not None else []
        out.append((INF, self.failures))
        return out

    def proportions(self) -> dict:
        total = self.total
        return {k: v / total for k, v in self.rows()}

    def decoded_within(self, k: int) -> float:
        return sum(v for it, v in self.counts.items() if it <= k) / self.total

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["iterations", "count", "proportion"])
        total = self.total
        for k, v in self.rows():
            out.writerow([k, v, format(v / total, ".12g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "ExperimentReport":
        counts, failures = {}, 0
        for row in csv.DictReader(io.StringIO(text)):
            if row["iterations"] == INF:
                failures = int(row["count"])
            elif int(row["count"]):
                counts[int(row["iterations"])] = int(row["count"])
        return cls(counts, failures, label=label)

    def merge(self, other: "ExperimentReport") -> "ExperimentReport":
        c = Counter(self.counts) + Counter(other.counts)
        sw = Counter(self.executed_sweeps) + Counter(other.executed_sweeps)
        return ExperimentReport(dict(c), self.failures + other.failures,
                                self.wrong_decodes + other.wrong_decodes, dict(sw),
                                self.wall_clock + other.wall_clock, self.label)


@lru_cache(maxsize=8)
def _key(params: Params, seed: int, code: int) -> PrivateKey:
    return keygen(params, key_rng(seed, code))[0]


def instance_error(cfg: ExperimentConfig, code: int, trial: int) -> np.ndarray:
    return sample_support(cfg.params.n, cfg.weight, error_rng(cfg.seed, code, trial)).as_array()


def _run_chunk(cfg: ExperimentConfig, code: int, start: int, stop: int):
    priv = _key(cfg.params, cfg.seed, code)
    want_trace = cfg.trace_path is not None
    dcfg = cfg.decoder
    counts: Counter = Counter()
    sweeps: Counter = Counter()
    failures = wrong = 0
    rows = []
    for k in range(start, stop):
        e_pos = instance_error(cfg, code, k)
        e = np.zeros(cfg.params.n, dtype=np.uint8)
        e[e_pos] = 1
        flipped, trace = decode_syndrome(priv, syndrome_array(priv, e_pos), dcfg, e if dcfg.trace else None)
        sweeps[trace.executed_sweeps] += 1
        if not trace.decoded:
            failures += 1
        elif not np.array_equal(flipped, e):
            failures += 1
            wrong += 1
        else:
            counts[trace.iterations] += 1
        if want_trace:
            rows.extend(trace_rows(f"{code}:{k}", trace))
    return counts, failures, wrong, sweeps, rows


def _chunks(cfg: ExperimentConfig) -> list[tuple[int, int, int]]:
    pieces = max(1, cfg.workers * 4 // cfg.n_codes) if cfg.workers > 1 else 1
    size = math.ceil(cfg.n_trials_per_code / pieces)
    return [(c, s, min(s + size, cfg.n_trials_per_code))
            for c in range(cfg.n_codes) for s in range(0, cfg.n_trials_per_code, size)]


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.trace_path is not None and not cfg.decoder.trace:
        cfg = replace(cfg, decoder=replace(cfg.decoder, trace=True))
    cfg.decoder.rule.validate(cfg.params)
    t0 = time.perf_counter()
    jobs = _chunks(cfg)
    if cfg.workers == 1:
        results = [_run_chunk(cfg, *job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map preserves job order, so traces come back in (code, trial) order
            results = list(pool.map(_run_chunk, [cfg] * len(jobs), *zip(*jobs)))
    counts: Counter = Counter()
    sweeps: Counter = Counter()
    failures = wrong = 0
    all_rows = []
    for c, f, wgt, sw, rows in results:
        counts.update(c)
        sweeps.update(sw)
        failures += f
        wrong += wgt
        all_rows.extend(rows)
    if cfg.trace_path is not None:
        with open(cfg.trace_path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(TRACE_COLUMNS)
            out.writerows(all_rows)
    return ExperimentReport(dict(counts), failures, wrong, dict(sweeps),
                            time.perf_counter() - t0, cfg.label)


def replay_instance(cfg: ExperimentConfig, code: int, trial: int):
    """Decode one instance of an experiment again; returns (found planted error, trace)."""
    priv = _key(cfg.params, cfg.seed, code)
    e_pos = instance_error(cfg, code, trial)
    flipped, trace = decode_syndrome(priv, syndrome_array(priv, e_pos), cfg.decoder)
    return bool(trace.decoded and np.array_equal(np.flatnonzero(flipped), e_pos)), trace


def _fmt(p: float) -> str:
    if p == 0:
        return "0"
    if p >= 0.01:
        return f"{p:.3f}"
    return f"{p:.3e}"


def report_table(reports: Sequence[ExperimentReport], labels: Sequence[str] | None = None) -> tuple[str, str]:
    """Side-by-side iteration distribution (text, CSV); one proportion column per report."""
    labels = list(labels) if labels else [r.label or f"run{i}" for i, r in enumerate(reports)]
    tops = [r.max_iterations for r in reports if r.max_iterations is not None]
    keys: list = list(range(max(tops) + 1)) if tops else []
    keys.append(INF)
    props = [r.proportions() for r in reports]

    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["iterations", *labels])
    for k in keys:
        out.writerow([k, *(format(p.get(k, 0.0), ".12g") for p in props)])

    width = max(10, *(len(lb) for lb in labels))
    lines = [f"{'iteration':>9}  " + "  ".join(f"{lb:>{width}}" for lb in labels)]
    for k in keys:
        cells = [_fmt(p.get(k, 0.0)) for p in props]
        if k != INF and all(c == "0" for c in cells):
            continue
        lines.append(f"{str(k):>9}  " + "  ".join(f"{c:>{width}}" for c in cells))
    lines.append("")
    for lb, r in zip(labels, reports):
        mx = r.max_iterations
        lines.append(f"{lb}: {r.total} instances, {r.failures} failures, max {mx}, "
                     f"mean {r.mean_iterations:.3f}")
    smallest = min(r.total for r in reports) if reports else 0
    if smallest:
        lines.append(f"note: proportions below ~{1 / smallest:.0e} are not resolvable at this sample size")
    return "\n".join(lines) + "\n", buf.getvalue()
