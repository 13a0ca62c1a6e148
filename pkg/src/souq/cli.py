"""Command line entry point.

    souq <measure|arc|ood|axioms|simulate> --family <ent|lent|var> --input <path>
         [--labels <path>] [--ood <path>] [--grid <f0:f1:step>] [--seed <int>]
         --out <path> --format <csv|json>

Exit status: 0 on success (an expected axiom violation included), 1 on
validation or I/O errors, 2 when a claimed axiom is violated.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .commands import RUNNERS, RunConfig, Task
from .errors import SouqError
from .evaluation import DEFAULT_GRID, parse_grid

log = logging.getLogger("souq")

EXIT_OK, EXIT_ERROR, EXIT_AXIOM = 0, 1, 2


def _alpha(text: str):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha vector {text!r}") from None


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors (status 1); 2 is reserved for axiom violations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--family", choices=["ent", "lent", "var"],
                        help="measure family (default: var for measure/axioms, all three for arc/ood)")
    common.add_argument("--input", help="predictions CSV (in-distribution file for ood)")
    common.add_argument("--labels", help="labels CSV (arc)")
    common.add_argument("--ood", help="out-of-distribution predictions CSV (ood)")
    common.add_argument("--grid", type=parse_grid, default=DEFAULT_GRID,
                        help="rejection fractions as start:stop:step, stop inclusive (default 0:0.95:0.05)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", required=True, help="output file")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="souq", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="task", required=True, parser_class=_Parser)
    sub.add_parser("measure", parents=[common], help="per-instance TU/AU/EU report")
    sub.add_parser("arc", parents=[common], help="accuracy-rejection curves")
    sub.add_parser("ood", parents=[common], help="OoD detection AUROC per EU variant")
    ax = sub.add_parser("axioms", parents=[common], help="randomized axiom suite")
    ax.add_argument("--cases", type=int, default=500, dest="n_cases")
    sim = sub.add_parser("simulate", parents=[common], help="write Dirichlet-simulated ensemble predictions")
    sim.add_argument("--alpha0", type=float, help="concentration; each instance gets a random center")
    sim.add_argument("--alpha", type=_alpha, help="fixed comma-separated Dirichlet parameters for every instance")
    sim.add_argument("--instances", type=int, default=100)
    sim.add_argument("--members", type=int, default=5)
    sim.add_argument("--classes", type=int, default=10)
    sim.add_argument("--prefix", default="x", help="instance id prefix")
    sim.add_argument("--labels-out", help="also write sampled true labels here")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(ns).items() if k != "verbose"}
    fields["grid"] = tuple(fields["grid"])
    return RunConfig(**fields)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = config_from_args(ns)
        result = RUNNERS[config.task](config)
    except (SouqError, OSError) as exc:
        print(f"souq {ns.task}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if config.task is Task.axioms:
        _, results = result
        bad = [r for r in results if r.unexpected_violation]
        for r in results:
            log.info("%s %s: %s", r.family.value, r.axiom.value, r.verdict.value)
        if bad:
            print("souq axioms: claimed axioms violated: " + ", ".join(r.axiom.value for r in bad), file=sys.stderr)
            return EXIT_AXIOM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
