"""Write the data behind every standard figure into one directory per scenario.

Usage: python3 scripts/reproduce_figures.py [OUTDIR] [--seed N]
"""

import argparse
import sys
from pathlib import Path

from eitbleach.cli import COPROPAGATING_SERIES, EXIT_OK, execute

SCENARIOS = {
    "spectra": {"command": "spectrum"},
    "bleach_curves": {"command": "bleach_curve"},
    "decay_uniform": {"command": "propagate"},
    "transmittance_uniform": {"command": "transmittance"},
    "transmittance_copropagating": {"command": "transmittance",
                                    "params": {"arrangement": "copropagating",
                                               "series": COPROPAGATING_SERIES}},
    "mb_filter_a": {"command": "mb_filter", "params": {"case": "a"}},
    "mb_filter_c": {"command": "mb_filter", "params": {"case": "c"}},
    "design_nv": {"command": "design", "params": {"preset": "nv"}},
    "design_nv_copropagating": {"command": "design",
                                "params": {"preset": "nv", "arrangement": "copropagating",
                                           "pump_ratio": 1}},
    "design_rb": {"command": "design", "params": {"preset": "rb"}},
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figure_data")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)
    worst = EXIT_OK
    for name, scenario in SCENARIOS.items():
        scenario = dict(scenario)
        if args.seed is not None:
            scenario["seed"] = args.seed
        code = execute(scenario, Path(args.outdir) / name)
        if code != EXIT_OK:
            print(f"{name}: exit {code}", file=sys.stderr)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
