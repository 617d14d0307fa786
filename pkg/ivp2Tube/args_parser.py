import argparse
import sys

from ivp2Tube.utils.verify_suites import SUITES

USAGE_EXIT_CODE = 3


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT_CODE, f"{self.prog}: error: {message}\n")


def _solver_arguments():
    parent = argparse.ArgumentParser(add_help=False)
    solver_group = parent.add_argument_group('Solver Arguments')
    solver_group.add_argument("--grid-depth", dest="grid_depth", type=int, help="Grid depth L, tubes get 2^L + 1 nodes (default 8)")
    solver_group.add_argument("--refine-rounds", dest="refine_rounds", type=int, help="Picard contraction rounds per branch (default 30)")
    solver_group.add_argument("--max-bisections", dest="max_bisections", type=int, help="Bisection budget of branch and prune (default 64)")
    solver_group.add_argument("--precision", type=int, help="Endpoint precision in bits (default 53)")
    solver_group.add_argument("--workers", type=int, help="Branches refined concurrently (default 1)")
    return parent


def _output_arguments():
    parent = argparse.ArgumentParser(add_help=False)
    output_group = parent.add_argument_group('Output Arguments')
    output_group.add_argument("-o", "--out", type=str, help="Output directory (default $IVP2TUBE_OUT_DIR or [Output] out_dir)")
    output_group.add_argument("-f", "--format", choices=("csv", "structured"), help="Only write CSV tube dumps or only structured documents")
    return parent


def get_parser():
    parser = CliParser(prog="ivp2Tube", description="Rigorous enclosures of every solution of y' = f(x, y), y(x0) = y0.")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    solver, output = _solver_arguments(), _output_arguments()

    solve = commands.add_parser("solve", parents=[solver, output], help="Enclose the local solution funnel at (x0, y0)")
    solve.add_argument("instance", type=str, help="Instance file (JSON)")

    extend = commands.add_parser("extend", parents=[solver, output], help="Grow the enclosure toward the maximal interval")
    extend.add_argument("instance", type=str, help="Instance file (JSON)")
    extend.add_argument("-r", "--rounds", type=int, required=True, help="Number of extension rounds (at least 1)")

    gadget = commands.add_parser("gadget", help="Write a parallel gadget instance file")
    gadget_group = gadget.add_argument_group('Gadget Arguments')
    gadget_group.add_argument("-s", "--streams", type=str, required=True, help="Streams over {0,1,2}, e.g. '0,2;1;2,2,0'")
    gadget_group.add_argument("-b", "--cell-budget", dest="cell_budget", type=int, default=5, help="Cells represented explicitly (default 5)")
    gadget_group.add_argument("-o", "--out", type=str, help="Instance file to write (stdout when omitted)")

    decode = commands.add_parser("decode", parents=[solver], help="Read LLPO bits off a solve result or an extension")
    decode.add_argument("result", type=str, help="Document written by 'solve' or 'extend'")
    decode.add_argument("instance", type=str, help="Gadget instance file the result was solved from")
    decode.add_argument("-k", "--bits", type=int, help="Decode streams 0..k-1 (default: every stream)")

    verify = commands.add_parser("verify", parents=[solver], help="Run an oracle comparison suite")
    verify.add_argument("--suite", type=str, required=True, help=f"One of {', '.join(SUITES)}")
    verify.add_argument("--samples", type=int, default=100_000, help="Sample count of the interval suite")

    return parser
