"""Iteration distributions of the tuned step rule next to a per-flip fixed-threshold decoder.

Desk scale by default (2 codes x 5000 trials per variant). Observing the
rare divergences of the per-flip decoder needs >= 1e6 instances:

    python scripts/compare_variants.py --codes 10 --trials 100000 --workers 8
"""

import argparse
from pathlib import Path

from qcmdpc.decoder import DecoderConfig, FixedPerIteration, default_config
from qcmdpc.qc_mdpc import Params
from qcmdpc.sim_lab import ExperimentConfig, report_table, run_experiment

# locally chosen; they give the per-flip decoder a low mean iteration count at preset 80
FIXED_80 = (28, 26, 25, 24)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--codes", type=int, default=2)
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", type=Path, default=Path("runs"))
    args = ap.parse_args()

    params = Params.preset(80)
    variants = {
        "step": default_config(params, max_iterations=20),
        "fixed-flip": DecoderConfig(FixedPerIteration(FIXED_80), max_iterations=20, syndrome_update="per_flip"),
    }
    args.outdir.mkdir(parents=True, exist_ok=True)
    reports = []
    for label, dcfg in variants.items():
        cfg = ExperimentConfig(params, dcfg, n_codes=args.codes, n_trials_per_code=args.trials,
                               seed=args.seed, workers=args.workers, label=label)
        rep = run_experiment(cfg)
        (args.outdir / f"{label}.csv").write_text(rep.to_csv())
        print(f"{label}: {rep.wall_clock:.0f}s")
        reports.append(rep)
    text, merged = report_table(reports)
    (args.outdir / "comparison.csv").write_text(merged)
    print(text)


if __name__ == "__main__":
    main()
