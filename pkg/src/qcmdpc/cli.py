"""Command line interface: ``qcmdpc {keygen,encrypt,decrypt,simulate,tune,report}``.

Exit status: 0 on success, 1 on a runtime error (bad file, bad parameters),
2 on a usage error, 3 when ``decrypt`` hits a decoding failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .decoder import (
    DecoderConfig,
    FixedPerIteration,
    MaxMinusDelta,
    StepFunction,
    SyndromeWeightStep,
    bundled_step,
)
from .gf2_ring import RingElement
from .mceliece import Ciphertext, DecryptFailure, decrypt, encrypt, sample_error
from .qc_mdpc import Params, keygen, load_private, load_public, write_keypair
from .seeds import key_rng, error_rng, message_rng
from .sim_lab import ExperimentConfig, ExperimentReport, report_table, run_experiment
from .threshold_tuner import TuningConfig, tune_step_function

EXIT_ERROR = 1
EXIT_DECODE_FAILURE = 3


class CliError(Exception):
    pass


def _params(args) -> Params:
    if args.params:
        return Params.parse(args.params)
    return Params.preset(args.preset)


def _add_params(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", default="80", help="80, 128 or toy (default 80)")
    g.add_argument("--params", metavar="n,r,w,t", help="custom parameters")


def _add_decoder(p):
    p.add_argument("--variant", choices=["fixed", "maxdelta", "step"], default="step")
    p.add_argument("--rule", type=Path, help="step function file (variant step)")
    p.add_argument("--thresholds", help="comma separated per-iteration thresholds (variant fixed)")
    p.add_argument("--delta", type=int, default=3, help="distance below the maximum counter (variant maxdelta)")
    p.add_argument("--update", choices=["sweep", "flip"], default="sweep",
                   help="update the syndrome after each sweep or after each flip")
    p.add_argument("--max-iters", type=int, default=9)
    p.add_argument("--constant-time", action="store_true")


def decoder_from_args(args, params: Params, trace: bool = False) -> DecoderConfig:
    if args.variant == "step":
        step = StepFunction.load(args.rule) if args.rule else bundled_step(params)
        if step is None:
            raise CliError(f"no bundled step function for {params}; pass --rule")
        rule = SyndromeWeightStep(step)
    elif args.variant == "fixed":
        if not args.thresholds:
            raise CliError("variant fixed needs --thresholds")
        rule = FixedPerIteration(tuple(int(v) for v in args.thresholds.split(",")))
    else:
        rule = MaxMinusDelta(args.delta)
    rule.validate(params)
    return DecoderConfig(
        rule,
        max_iterations=args.max_iters,
        syndrome_update="per_flip" if args.update == "flip" else "per_iteration",
        constant_time=args.constant_time,
        trace=trace,
    )


def _write_or_print(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


# subcommands ------------------------------------------------------------

def cmd_keygen(args) -> int:
    params = _params(args)
    priv, pub = keygen(params, key_rng(args.seed, 0))
    priv_path, pub_path = write_keypair(priv, pub, args.out)
    print(f"wrote {priv_path} and {pub_path}")
    return 0


def cmd_encrypt(args) -> int:
    pub = load_public(Path(args.key).read_text())
    r = pub.params.r
    if args.message:
        m = RingElement.from_hex(args.message, r)
    elif args.message_file:
        m = RingElement.from_hex(Path(args.message_file).read_text(), r)
    else:
        m = RingElement.random(r, message_rng(args.seed, 0, 0))
        if args.message_out:
            Path(args.message_out).write_text(m.hex() + "\n")
    e = sample_error(pub.params, error_rng(args.seed, 0, 0), weight=args.error_weight)
    _write_or_print(encrypt(pub, m, e).dumps(), args.out)
    return 0


def cmd_decrypt(args) -> int:
    priv = load_private(Path(args.key).read_text())
    c = Ciphertext.loads(Path(args.input).read_text())
    out = decrypt(priv, c, decoder_from_args(args, priv.params))
    if isinstance(out, DecryptFailure):
        print(f"decryption failed after {out.trace.executed_sweeps} sweeps", file=sys.stderr)
        return EXIT_DECODE_FAILURE
    _write_or_print(out.hex() + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    params = _params(args)
    cfg = ExperimentConfig(
        params,
        decoder_from_args(args, params, trace=args.trace is not None),
        n_codes=args.codes,
        n_trials_per_code=args.trials,
        seed=args.seed,
        error_weight=args.error_weight,
        workers=args.workers,
        trace_path=args.trace,
        label=args.label or args.variant,
    )
    report = run_experiment(cfg)
    text, _ = report_table([report])
    if args.out:
        args.out.write_text(report.to_csv())
    sys.stdout.write(text)
    sweeps = sorted(report.executed_sweeps)
    print(f"executed sweeps per instance: {sweeps[0]}..{sweeps[-1]}; wall clock {report.wall_clock:.1f}s")
    return 0


def cmd_tune(args) -> int:
    params = _params(args)
    cfg = TuningConfig(
        params,
        codes=args.codes,
        trials_per_code=args.trials,
        max_sweeps=args.sweeps,
        finalists=args.finalists,
        final_trials_per_code=args.final_trials,
        start=StepFunction.load(args.start) if args.start else None,
        seed=args.seed,
    )
    report = tune_step_function(cfg)
    report.best.simplified().save(args.out)
    if args.report:
        args.report.write_text(report.to_csv())
    best = report.best_summary
    flag = " (every candidate failed everywhere)" if report.all_failing else ""
    print(f"best after {len(report.evaluated)} candidates: failures={best.failures} "
          f"max={best.max_iterations} mean={best.mean_iterations:.3f}{flag}")
    return 0


def cmd_report(args) -> int:
    reports, labels = [], []
    for i, path in enumerate(args.input):
        path = Path(path)
        labels.append(args.label[i] if args.label and i < len(args.label) else path.stem)
        reports.append(ExperimentReport.from_csv(path.read_text(), labels[-1]))
    text, merged = report_table(reports, labels)
    sys.stdout.write(text)
    if args.out:
        args.out.write_text(merged)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcmdpc", description="QC-MDPC McEliece and bit flipping decoder lab")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    _add_params(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output stem; writes STEM.priv and STEM.pub")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a message under a public key")
    p.add_argument("--key", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--message", help="plaintext as hex (packed little-endian, r bits)")
    g.add_argument("--message-file")
    p.add_argument("--message-out", help="where to store a randomly drawn message")
    p.add_argument("--error-weight", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", type=Path)
    _add_decoder(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("simulate", help="iteration distribution over random keys and errors")
    _add_params(p)
    _add_decoder(p)
    p.add_argument("--codes", type=int, default=10)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--error-weight", type=int)
    p.add_argument("--trace", type=Path, help="per-iteration trace CSV")
    p.add_argument("--label")
    p.add_argument("--out", type=Path, help="report CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tune", help="tune a syndrome-weight step function")
    _add_params(p)
    p.add_argument("--codes", type=int, default=2)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--sweeps", type=int, default=4)
    p.add_argument("--finalists", type=int, default=0)
    p.add_argument("--final-trials", type=int, default=0)
    p.add_argument("--start", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--report", type=Path)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("report", help="merge report CSVs into one comparison table")
    p.add_argument("--in", dest="input", action="append", required=True)
    p.add_argument("--label", action="append")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (CliError, ValueError, LookupError, OSError) as exc:
        print(f"qcmdpc {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
