import argparse
import logging
import sys
import time

from shlrkit import config, version
from shlrkit.commands import CommandFactory, run_command
from shlrkit.dsl import build_model, parse_model
from shlrkit.errors import ComputationError, ShlrError
from shlrkit.utils import (
    degree_window,
    nonnegative_int,
    positive_int,
    setup_logging,
    valid_file,
    write_report,
)


def main(args: argparse.Namespace) -> int:
    """Run one command on a model file and emit its report.

    Returns:
        0 if every verdict passed, 1 otherwise.

    Raises:
        ShlrError: On model, argument or window problems.
    """
    setup_logging(args.verbose)
    start = time.perf_counter()

    with open(args.model, "r", encoding="utf-8") as fh:
        model = parse_model(fh.read())

    flags = {
        "weight_cutoff": args.weight_cutoff,
        "degree_window": args.degree_window,
        "seed": args.seed,
        "output": args.output,
        "base_length": args.base_length,
        "max_solve_dim": args.max_solve_dim,
    }
    settings = config.resolve_settings(flags, model.config)
    logging.debug(f"Effective settings: {settings}")

    objects = build_model(model, settings)
    report = run_command(args.command, model, objects, args.names, args.progress)
    rendered = report.render(settings.output)

    if args.output_file:
        write_report(rendered, args.output_file)
    else:
        sys.stdout.write(rendered)
        sys.stdout.flush()

    logging.info(f"{args.command} finished in {time.perf_counter() - start:.2f}s with exit code {report.exit_code}")
    return report.exit_code


def create_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Chevalley-Eilenberg complexes of SHLR pairs and their homotopy theory."
    )
    parser.add_argument("command", choices=CommandFactory.names(), help="Command to run.")
    parser.add_argument("model", type=valid_file, help="Model file (.shlr).")
    parser.add_argument(
        "names",
        nargs="*",
        help="Objects to act on. Without names the last suitable declarations are used.",
    )
    parser.add_argument(
        "--weight-cutoff",
        type=nonnegative_int,
        default=None,
        help=f"Weight cutoff W. Defaults to {config.DEFAULT_WEIGHT_CUTOFF}.",
    )
    parser.add_argument(
        "--degree-window",
        type=degree_window,
        default=None,
        help="Degree window LO:HI for cohomology. Defaults to %s:%s." % config.DEFAULT_DEGREE_WINDOW,
    )
    parser.add_argument(
        "--seed",
        type=nonnegative_int,
        default=None,
        help=f"Seed for sampled checks. Defaults to {config.DEFAULT_SEED}.",
    )
    parser.add_argument(
        "--output",
        choices=config.OUTPUT_FORMATS,
        default=None,
        help=f"Report format. Defaults to {config.DEFAULT_OUTPUT}.",
    )
    parser.add_argument("--output-file", type=str, default=None, help="Write the report here instead of stdout.")
    parser.add_argument(
        "--base-length",
        type=nonnegative_int,
        default=None,
        help=f"Base filtration cutoff. Defaults to {config.DEFAULT_BASE_LENGTH}.",
    )
    parser.add_argument(
        "--max-solve-dim",
        type=positive_int,
        default=None,
        help=f"Largest number of unknowns in one exact solve. Defaults to {config.DEFAULT_MAX_SOLVE_DIM}.",
    )
    parser.add_argument("--verbose", action="store_true", help="Print detailed messages.")
    parser.add_argument("--progress", action="store_true", help="Show progress bar.")
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {version.__version__}",
    )
    return parser


def cli():
    arg_parser = create_arg_parser()
    args = arg_parser.parse_args()
    try:
        code = main(args)
    except ShlrError as e:
        logging.error(str(e))
        code = e.exit_code
    except Exception as e:
        logging.debug("unexpected failure", exc_info=True)
        logging.error(f"{type(e).__name__}: {e}")
        code = ComputationError.exit_code
    sys.exit(code)


if __name__ == "__main__":
    cli()
