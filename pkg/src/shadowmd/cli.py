"""Command-line front end.

Subcommands::

    shadowmd run --preset <name> [--config <path>] [--seed <u64>] [--out <dir>]
    shadowmd validate --table <path>

Exit codes: 0 success, 1 configuration error, 2 fixture/table error,
3 trajectory abort (outputs for completed parts are still written).
``QCPMD_THREADS`` caps trial-level parallelism (0 or unset runs trials
sequentially); results are merged by trial index, so the thread count never
changes the outputs.
"""

import argparse
import sys

from .errors import BondRangeError, ConfigurationError, ConvergenceError, TableError
from .hamiltonian import load_table
from .presets import PRESETS, build_run_config, run_preset

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TABLE = 2
EXIT_ABORT = 3


class _Parser(argparse.ArgumentParser):
    """Argument errors map to the config-error exit code instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    def __init__(self, message):
        self.message = message
        super().__init__(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="shadowmd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="execute an experiment preset")
    run.add_argument("--preset", required=True, choices=PRESETS)
    run.add_argument("--config", default=None, help="flat key = value file")
    run.add_argument("--seed", type=int, default=None, help="master RNG seed")
    run.add_argument("--out", default=None, help="output directory")

    validate = sub.add_parser("validate", help="lint a coefficient table")
    validate.add_argument("--table", required=True)
    return parser


def _cmd_run(args) -> int:
    run_config = build_run_config(args.preset, args.config, args.seed, args.out)
    outcome = run_preset(run_config)
    for path in outcome.files:
        print(f"wrote {path}")
    if outcome.aborted:
        print("warning: at least one trajectory left the tabulated bond range",
              file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def _cmd_validate(args) -> int:
    table = load_table(args.table)
    non_identity = table.n_nonidentity_terms()
    print(f"table ok: {table.grid.shape[0]} grid points, "
          f"{len(table.words)} Pauli words ({non_identity} non-identity), "
          f"{table.n} qubits, R in [{table.r_min:g}, {table.r_max:g}] A")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_validate(args)
    except SystemExit2 as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TableError as exc:
        print(f"table error: {exc}", file=sys.stderr)
        return EXIT_TABLE
    except BondRangeError as exc:
        print(f"trajectory abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except ConvergenceError as exc:
        print(f"optimizer failure: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
