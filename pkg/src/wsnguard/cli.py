"""Command-line front end: train the neural predictor, run scenarios,
validate scenario files.

Exit codes: 0 success, 2 configuration error, 3 training failure,
4 runtime/IO failure. Log verbosity via the WSNGUARD_LOG environment
variable (DEBUG, INFO, WARNING, ...).
"""

import argparse
import logging
import os
import sys

from .errors import (ConfigurationError, FormatError, TrainingError,
                     WsnGuardError)
from .nn import NeuralNetPredictor
from .report import summary_text, write_report
from .scenario import BUILTIN_SCENARIOS, load_scenario
from .sim import run_simulation, train_network

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRAINING = 3
EXIT_RUNTIME = 4

log = logging.getLogger("wsnguard")


def _setup_logging():
    level = os.environ.get("WSNGUARD_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_valid_scenario(path):
    scenario = load_scenario(path)
    problems = scenario.validate()
    if problems:
        raise ConfigurationError("; ".join(problems))
    return scenario


def cmd_train(args):
    scenario = _load_valid_scenario(args.scenario)
    log.info("generating attack-free training data for %s", scenario.name)
    try:
        net = train_network(scenario, max_epochs=args.max_epochs,
                            mu_init=args.mu_init, seed=args.seed)
    except TrainingError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(f"  epochs: {exc.report.epochs}, loss: {exc.report.final_loss}",
                  file=sys.stderr)
        return EXIT_TRAINING
    try:
        net.save(args.out)
    except OSError as exc:
        print(f"cannot write net file: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    r = net.report_
    sizes = "-".join(str(s) for s in net.layer_sizes_)
    print(f"trained {sizes} net: {r.epochs} epochs, "
          f"rmse {r.rmse:.4f} degC, stop: {r.stop_reason}")
    if r.epochs == 0:
        print("warning: zero training epochs, net holds initial weights")
    print(f"net written to {args.out}")
    return EXIT_OK


def cmd_run(args):
    scenario = _load_valid_scenario(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
    net = NeuralNetPredictor.load(args.net)
    report = run_simulation(scenario, net)
    try:
        paths = write_report(report, args.out)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    log.info("wrote %d files to %s", len(paths), args.out)
    print(summary_text(report))
    return EXIT_OK


def cmd_validate(args):
    scenario = load_scenario(args.scenario)
    problems = scenario.validate()
    for problem in problems:
        print(f"violation: {problem}")
    if problems:
        return EXIT_CONFIG
    print(f"scenario {scenario.name!r} is valid")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wsnguard",
        description="Star-topology WSN simulator with dual-predictor "
                    "malicious node detection and self-destruction.",
        epilog=f"built-in scenarios: {', '.join(BUILTIN_SCENARIOS)}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the neural predictor offline")
    p_train.add_argument("--scenario", required=True,
                         help="scenario file path or built-in name")
    p_train.add_argument("--out", required=True, help="output net file")
    p_train.add_argument("--max-epochs", type=int, default=None)
    p_train.add_argument("--mu-init", type=float, default=None)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.set_defaults(func=cmd_train)

    p_run = sub.add_parser("run", help="run a scenario with a trained net")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--net", required=True, help="trained net file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--scenario", required=True)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, FormatError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingError as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except (WsnGuardError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
