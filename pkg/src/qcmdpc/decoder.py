"""Bit flipping decoder for two-block QC-MDPC codes.

The engine runs on the syndrome: it never touches the codeword itself, only
the set of positions it has flipped so far. One *sweep* computes the
unsatisfied-parity-check counters of every position, picks a threshold from
the configured rule and flips every position whose counter reaches it.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence, Union

import numpy as np

from .gf2_ring import DimensionError
from .qc_mdpc import Params, PrivateKey, column_indices, syndrome, syndrome_array


# threshold rules ----------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant map from syndrome weight to flipping threshold.

    ``breakpoints`` holds ``(lower_bound, threshold)`` pairs; the first bound
    is 0, so the function is total on ``[0, r]``.
    """

    breakpoints: tuple[tuple[int, int], ...]
    r: int
    w: int

    def __post_init__(self):
        bps = tuple((int(b), int(t)) for b, t in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if not bps or bps[0][0] != 0:
            raise ValueError("first breakpoint must have lower bound 0")
        bounds = [b for b, _ in bps]
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise ValueError("breakpoint bounds must be strictly increasing")
        if bounds[-1] > self.r:
            raise ValueError("breakpoint bound exceeds r")
        lo, hi = math.ceil(self.w / 4), self.w // 2
        for _, t in bps:
            if not lo <= t <= hi:
                raise ValueError(f"threshold {t} outside [{lo}, {hi}]")

    def __call__(self, syndrome_weight: int) -> int:
        i = bisect.bisect_right(self._bounds, syndrome_weight) - 1
        return self.breakpoints[i][1]

    @property
    def _bounds(self) -> list[int]:
        return [b for b, _ in self.breakpoints]

    def simplified(self) -> "StepFunction":
        """Merge neighbouring steps that share a threshold."""
        out = [self.breakpoints[0]]
        for b, t in self.breakpoints[1:]:
            if t != out[-1][1]:
                out.append((b, t))
        return StepFunction(tuple(out), self.r, self.w)

    def dumps(self) -> str:
        lines = [f"qcmdpc-stepfn {self.r} {self.w}"]
        lines += [f"{b} {t}" for b, t in self.breakpoints]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "StepFunction":
        lines = [ln for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
        head = lines[0].split()
        if len(head) != 3 or head[0] != "qcmdpc-stepfn":
            raise ValueError(f"not a step function file (header {lines[0]!r})")
        r, w = int(head[1]), int(head[2])
        bps = tuple(tuple(int(v) for v in ln.split()) for ln in lines[1:])
        return cls(bps, r, w)

    @classmethod
    def load(cls, path: str | Path) -> "StepFunction":
        return cls.loads(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


@dataclass(frozen=True)
class FixedPerIteration:
    """One precomputed threshold per iteration; the last one is reused."""

    thresholds: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(int(t) for t in self.thresholds))
        if not self.thresholds:
            raise ValueError("need at least one threshold")

    def validate(self, params: Params) -> None:
        if any(not 1 <= t <= params.block_weight for t in self.thresholds):
            raise ValueError(f"thresholds must lie in [1, {params.block_weight}]")

    def threshold(self, iteration: int, syndrome_weight: int, max_counter: int, params: Params) -> int:
        return self.thresholds[min(iteration, len(self.thresholds)) - 1]

    stateless = False


@dataclass(frozen=True)
class MaxMinusDelta:
    """Flip positions within ``delta`` of the largest counter."""

    delta: int = 0
    floor: bool = True

    def validate(self, params: Params) -> None:
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    def threshold(self, iteration: int, syndrome_weight: int, max_counter: int, params: Params) -> int:
        b = max_counter - self.delta
        if self.floor:
            b = max(b, math.ceil(params.w / 4))
        return max(b, 1)

    stateless = True


@dataclass(frozen=True)
class SyndromeWeightStep:
    """Threshold chosen from the syndrome weight alone, whatever the iteration."""

    step: StepFunction

    def validate(self, params: Params) -> None:
        if (self.step.r, self.step.w) != (params.r, params.w):
            raise ValueError(
                f"step function is for r={self.step.r}, w={self.step.w}; code has r={params.r}, w={params.w}"
            )

    def threshold(self, iteration: int, syndrome_weight: int, max_counter: int, params: Params) -> int:
        return self.step(syndrome_weight)

    stateless = True


ThresholdRule = Union[FixedPerIteration, MaxMinusDelta, SyndromeWeightStep]


@dataclass(frozen=True)
class DecoderConfig:
    rule: ThresholdRule
    max_iterations: int = 9
    syndrome_update: Literal["per_iteration", "per_flip"] = "per_iteration"
    constant_time: bool = False
    trace: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.syndrome_update not in ("per_iteration", "per_flip"):
            raise ValueError(f"unknown syndrome update mode {self.syndrome_update!r}")


# traces -------------------------------------------------------------------

@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    syndrome_weight_before: int
    threshold: int
    flips: int
    syndrome_weight_after: int
    residual_error_weight: int | None = None


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    decoded: bool = False
    iterations: int = 0  # effective iterations (sweeps until zero syndrome)
    executed_sweeps: int = 0

    @property
    def outcome(self) -> str:
        return f"decoded({self.iterations})" if self.decoded else "failed"


@dataclass
class DecodeResult:
    word: np.ndarray | None  # corrected word, None on failure
    flipped: np.ndarray  # positions flipped by the decoder (the estimated error)
    trace: IterationTrace

    @property
    def decoded(self) -> bool:
        return self.trace.decoded

    @property
    def iterations(self) -> int:
        return self.trace.iterations


TRACE_COLUMNS = [
    "instance_id", "iter", "syndrome_weight_before", "threshold", "flips",
    "syndrome_weight_after", "residual_error_weight", "outcome",
]


def trace_rows(instance_id, trace: IterationTrace) -> list[list]:
    rows = []
    for rec in trace.records:
        rows.append([
            instance_id, rec.iteration, rec.syndrome_weight_before, rec.threshold, rec.flips,
            rec.syndrome_weight_after,
            "" if rec.residual_error_weight is None else rec.residual_error_weight,
            trace.outcome,
        ])
    return rows


def write_trace_csv(path: str | Path, traces: Sequence[tuple[object, IterationTrace]]) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(TRACE_COLUMNS)
        for instance_id, trace in traces:
            out.writerows(trace_rows(instance_id, trace))


# kernels ------------------------------------------------------------------

def counters(priv: PrivateKey, s) -> np.ndarray:
    """Number of unsatisfied checks touching each of the n positions."""
    r = priv.params.r
    s = np.asarray(s.to_array() if hasattr(s, "to_array") else s)
    if s.shape != (r,):
        raise DimensionError(f"syndrome must have length {r}")
    s2 = np.concatenate([s, s]).astype(np.int16)
    out = np.zeros(2 * r, dtype=np.int16)
    left, right = out[:r], out[r:]
    # sigma_j = sum over k in h of s[j - k]
    for k in priv.h0_arr:
        left += s2[r - k : 2 * r - k]
    for k in priv.h1_arr:
        right += s2[r - k : 2 * r - k]
    return out


def flip_and_update(s, priv: PrivateKey, i: int) -> np.ndarray:
    """Syndrome after flipping position ``i``: s XOR column i."""
    if not 0 <= i < priv.params.n:
        raise IndexError(i)
    s = np.array(s.to_array() if hasattr(s, "to_array") else s, dtype=np.uint8)
    s[column_indices(priv, np.array([i]))] ^= 1
    return s


def _sweep_per_iteration(priv, s, sigma, b):
    flips = np.flatnonzero(sigma >= b)
    if flips.size:
        s ^= (np.bincount(column_indices(priv, flips), minlength=s.size) & 1).astype(np.uint8)
    return flips


def _sweep_per_flip(priv, s, sigma, b):
    """Visit positions 0..n-1 in order, updating s and the counters after every flip."""
    r = priv.params.r
    n = priv.params.n
    sigma = sigma.astype(np.int32)
    h0, h1 = priv.h0_arr, priv.h1_arr
    flips = []
    pos = 0
    while pos < n:
        hit = sigma[pos:] >= b
        j = int(np.argmax(hit))
        if not hit[j]:
            break
        i = pos + j
        flips.append(i)
        checks = column_indices(priv, np.array([i]))
        s[checks] ^= 1
        delta = 2 * s[checks].astype(np.int32) - 1
        # positions involved in each toggled check: block 0 at c + h0, block 1 at r + c + h1
        rows0 = (checks[:, None] + h0[None, :]) % r
        rows1 = (checks[:, None] + h1[None, :]) % r + r
        np.add.at(sigma, rows0.ravel(), np.repeat(delta, h0.size))
        np.add.at(sigma, rows1.ravel(), np.repeat(delta, h1.size))
        pos = i + 1
    return np.asarray(flips, dtype=np.int64)


def decode_syndrome(
    priv: PrivateKey,
    s: np.ndarray,
    cfg: DecoderConfig,
    error: np.ndarray | None = None,
    *,
    word: np.ndarray | None = None,
) -> tuple[np.ndarray, IterationTrace]:
    """Core loop. Returns the flipped-position indicator and the trace.

    ``error`` is the ground-truth error indicator (length n) used only for
    residual weights in the trace. ``word`` enables the from-scratch
    syndrome cross-check in trace mode.
    """
    params = priv.params
    cfg.rule.validate(params)
    s = np.array(s, dtype=np.uint8)
    flipped = np.zeros(params.n, dtype=np.uint8)
    trace = IterationTrace()
    sweep = _sweep_per_flip if cfg.syndrome_update == "per_flip" else _sweep_per_iteration
    weight = int(s.sum())
    done_at = 0 if weight == 0 else None
    stalled = False

    for it in range(1, cfg.max_iterations + 1):
        if done_at is not None or stalled:
            if not cfg.constant_time:
                break
            # fake sweep: same counter work on a copy, nothing flipped
            counters(priv, s.copy())
            trace.executed_sweeps += 1
            continue
        sigma = counters(priv, s)
        b = cfg.rule.threshold(it, weight, int(sigma.max()), params)
        flips = sweep(priv, s, sigma, b)
        flipped[flips] ^= 1
        trace.executed_sweeps += 1
        new_weight = int(s.sum())
        if cfg.trace:
            residual = None if error is None else int(np.count_nonzero(flipped != error))
            trace.records.append(IterationRecord(it, weight, b, int(flips.size), new_weight, residual))
            if word is not None:
                fresh = syndrome(priv, np.asarray(word, dtype=np.uint8) ^ flipped).to_array()
                if not np.array_equal(fresh, s):
                    raise RuntimeError(f"syndrome drift at iteration {it}")
        weight = new_weight
        if weight == 0:
            done_at = it
        elif flips.size == 0 and cfg.rule.stateless:
            # the rule only sees the (unchanged) state: every later sweep is identical
            stalled = True

    trace.decoded = done_at is not None
    trace.iterations = done_at if done_at is not None else cfg.max_iterations
    return flipped, trace


def bit_flip_decode(
    priv: PrivateKey,
    x,
    cfg: DecoderConfig,
    error=None,
) -> DecodeResult:
    """Decode a length-n received word ``x``.

    On success ``result.word`` is a codeword (zero syndrome); on failure it is
    None. ``error`` (optional, length-n indicator) only feeds the trace.
    """
    params = priv.params
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (params.n,):
        raise DimensionError(f"expected a word of length {params.n}, got shape {x.shape}")
    s = syndrome(priv, x).to_array()
    err = None if error is None else np.asarray(error, dtype=np.uint8)
    flipped, trace = decode_syndrome(priv, s, cfg, err, word=x if cfg.trace else None)
    word = (x ^ flipped) if trace.decoded else None
    return DecodeResult(word, flipped, trace)


def constant_time_decode(priv: PrivateKey, x, cfg: DecoderConfig, error=None) -> DecodeResult:
    if not cfg.constant_time:
        raise ValueError("constant_time_decode needs cfg.constant_time=True")
    return bit_flip_decode(priv, x, cfg, error)


def decode_error(priv: PrivateKey, support: np.ndarray, cfg: DecoderConfig):
    """Decode the pure error pattern with the given support (the lab's fast path).

    Returns ``(found_error_exactly, trace)``.
    """
    support = np.asarray(support, dtype=np.int64)
    s = syndrome_array(priv, support)
    e = np.zeros(priv.params.n, dtype=np.uint8)
    e[support] = 1
    flipped, trace = decode_syndrome(priv, s, cfg, e if cfg.trace else None)
    return bool(trace.decoded and np.array_equal(flipped, e)), trace


# bundled rules ------------------------------------------------------------

def bundled_step(params: Params) -> StepFunction | None:
    """Tuned step function shipped with the package for these (r, w), if any."""
    from importlib.resources import files

    for entry in files("qcmdpc.data").iterdir():
        if entry.name.startswith("step_") and entry.name.endswith(".txt"):
            step = StepFunction.loads(entry.read_text())
            if (step.r, step.w) == (params.r, params.w):
                return step
    return None


def default_config(params: Params, **overrides) -> DecoderConfig:
    """Syndrome-weight step decoder with the bundled rule and a 9-iteration budget."""
    step = bundled_step(params)
    if step is None:
        raise LookupError(f"no bundled step function for r={params.r}, w={params.w}; tune one first")
    return DecoderConfig(SyndromeWeightStep(step), **overrides)
