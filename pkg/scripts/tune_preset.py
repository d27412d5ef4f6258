"""Tune a syndrome-weight step function for a parameter preset.

    python scripts/tune_preset.py --preset 80 --codes 4 --trials 2000 \
        --finalists 5 --final-trials 5000 --out src/qcmdpc/data/step_80.txt
"""

import argparse
import logging
import time
from pathlib import Path

from qcmdpc.decoder import StepFunction
from qcmdpc.qc_mdpc import Params
from qcmdpc.threshold_tuner import TuningConfig, tune_step_function


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--preset", default="80")
    ap.add_argument("--codes", type=int, default=4)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--sweeps", type=int, default=4)
    ap.add_argument("--finalists", type=int, default=5)
    ap.add_argument("--final-trials", type=int, default=5000)
    ap.add_argument("--start", type=Path, help="step function file to start the descent from")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--report", type=Path)
    args = ap.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    params = Params.preset(args.preset)
    cfg = TuningConfig(
        params, codes=args.codes, trials_per_code=args.trials, max_sweeps=args.sweeps,
        finalists=args.finalists, final_trials_per_code=args.final_trials, seed=args.seed,
        start=StepFunction.load(args.start) if args.start else None,
    )
    t0 = time.time()
    report = tune_step_function(cfg)
    best = report.best_summary
    print(f"{len(report.evaluated)} candidates in {time.time() - t0:.0f}s; best {best.objective}")
    print("histogram:", dict(sorted(best.histogram.items(), key=lambda kv: str(kv[0]))))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    report.best.simplified().save(args.out)
    if args.report:
        args.report.write_text(report.to_csv())


if __name__ == "__main__":
    main()
