"""Command-line entry point for batch scenario runs."""

import argparse
import os
import sys

from .config import RunConfig, SCENARIOS
from .errors import ValidationError
from .scenarios import EXIT_VALIDATION, run_scenario


def build_parser():
    parser = argparse.ArgumentParser(
        prog="halfspace-ns",
        description="Stationary supersonic outflow past a perturbed wall: "
                    "profile construction, steady-state marching, and "
                    "stability measurements.",
    )
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--scenario", choices=SCENARIOS)
    parser.add_argument("--dim", type=int, choices=(2, 3))
    parser.add_argument("--resolution", type=int,
                        help="normal-axis node count (tangential axes use half)")
    parser.add_argument("--tol", type=float, help="steady-state tolerance")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--set", dest="sets", action="append", default=[],
                        metavar="KEY=VALUE",
                        help="override a config entry by dotted path")
    return parser


def main(argv=None) -> int:
    threads = os.environ.get("HALFSPACE_NS_THREADS")
    if threads:
        # cap the BLAS pools; results are bit-identical at any setting
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config)
        sets = []
        for item in args.sets:
            if "=" not in item:
                raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
            sets.append(tuple(item.split("=", 1)))
        cfg.apply_overrides(scenario=args.scenario, dim=args.dim,
                            resolution=args.resolution, tol=args.tol,
                            out=args.out, sets=sets)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return run_scenario(cfg, echo=lambda msg: print(msg, file=sys.stderr))


if __name__ == "__main__":
    sys.exit(main())
