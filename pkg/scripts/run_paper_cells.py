#!/usr/bin/env python3
"""Run the bundled simulation-study cells and write their reports.

Each scenario file reproduces one cell of the burn-in / thinning study at
desk scale.  Replications and parallelism can be overridden to trade
fidelity for speed, e.g.

    python3 scripts/run_paper_cells.py --reps 10 --parallel 4 --out /tmp/cells
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rjgarma.harness import (load_scenario, run_scenario, write_report_csv,
                             write_report_text)

SCENARIOS = ("table1_gar1_burnin", "table2_gar2", "table4_gma2")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=None,
                        help="override replication count for every scenario")
    parser.add_argument("--parallel", type=int, default=1)
    parser.add_argument("--out", default="reports")
    parser.add_argument("--only", choices=SCENARIOS, default=None)
    args = parser.parse_args()

    scenario_dir = Path(__file__).resolve().parents[1] / "scenarios"
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    names = [args.only] if args.only else list(SCENARIOS)
    for name in names:
        scenario = load_scenario(scenario_dir / f"{name}.scenario")
        if args.reps is not None:
            scenario = replace(scenario, replications=args.reps)
        t0 = time.time()
        report = run_scenario(scenario, parallelism=args.parallel)
        elapsed = time.time() - t0
        with open(out_dir / f"{name}.csv", "w", newline="") as fh:
            write_report_csv(report, fh)
        with open(out_dir / f"{name}.txt", "w") as fh:
            write_report_text(report, fh)
        print(f"{name}: {scenario.replications} replications in "
              f"{elapsed / 60:.1f} min -> {out_dir / name}.{{csv,txt}}",
              file=sys.stderr)
        write_report_text(report, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
