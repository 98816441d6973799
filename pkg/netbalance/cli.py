#!/usr/bin/env python3
"""
netbalance command line: generate scenarios, solve them, report results.
"""

import argparse
import logging
import sys

import numpy as np

from netbalance.core.config import settings
from netbalance.core.errors import DispatchError, NetBalanceError, exit_code_for, format_error_for_user
from netbalance.core.log import setup_logging
from netbalance.models.instance import BlockInstance
from netbalance.models.scenario import Scenario
from netbalance.services import scenario_io
from netbalance.services.bilevel import as_general, solve_general, solve_single, solve_single_major
from netbalance.services.generator import GeneratorParams, generate
from netbalance.services.objectives import NegatedSquares
from netbalance.services.report import write_report
from netbalance.services.satisfaction import ProviderObjective

logger = logging.getLogger(__name__)

MODES = ("auto", "single", "major", "general")
OBJECTIVES = ("satisfaction", "balance")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def resolve_mode(scenario: Scenario, mode: str) -> str:
    """auto -> major iff one block without forbidden slots, single for one block, else general"""
    single_block = scenario.A == 1 and scenario.B == 1
    if mode == "auto":
        if not single_block:
            return "general"
        instance = BlockInstance.from_scenario(scenario, 0, 0)
        return "single" if instance.has_forbidden_slots() else "major"
    if mode in ("single", "major") and not single_block:
        raise DispatchError(f"mode '{mode}' needs one application and one contract "
                            f"(scenario has A={scenario.A}, B={scenario.B})")
    return mode


def block_objective(scenario: Scenario, name: str):
    if name == "balance":
        return NegatedSquares.capacity_limited(scenario.slot_capacities(), scenario.total_demand())
    provider = ProviderObjective(scenario)
    return provider.block_view(np.zeros((scenario.A, scenario.B, scenario.n), dtype=np.int64), 0, 0)


def run_solve(args) -> int:
    scenario = scenario_io.load(args.scenario)
    mode = resolve_mode(scenario, args.mode)
    print(f"🔧 Solving {args.scenario} (mode: {mode}, objective: {args.objective})")

    if mode == "general":
        if args.objective != "satisfaction":
            raise DispatchError("general mode optimizes the satisfaction objective only")
        if args.start is not None:
            raise DispatchError("--start applies to single-block modes only")
        result = solve_general(scenario, source=args.source)
    else:
        instance = BlockInstance.from_scenario(scenario, 0, 0)
        objective = block_objective(scenario, args.objective)
        solver = solve_single_major if mode == "major" else solve_single
        block = solver(instance, objective, source=args.source, start=args.start)
        result = as_general(block, objective, capacities=scenario.slot_capacities())

    scenario_io.save_result(args.out, scenario, result, mode=mode, objective=args.objective)

    print("=" * 60)
    print("📊 SOLVE SUMMARY")
    print("=" * 60)
    print(f"  Objective: {result.baseline_value:.6g} at zero prices -> {result.value:.6g}")
    print(f"  Rounds: {result.rounds}")
    for (a, b), block in sorted(result.blocks.items()):
        moved = int(np.abs(block.counts - block.baseline_counts).sum()) // 2
        print(f"  Block ({a}, {b}): {moved} request(s) moved, "
              f"max discount {block.nonnegative_prices.max(initial=0.0):.6g}")
    print(f"  Result written to {args.out}")

    if not result.within_capacity:
        print("⚠️  No assignment respects every cell capacity; the result is the best penalized point.")
        return 3
    print("✅ Done")
    return 0


def run_generate(args) -> int:
    params = GeneratorParams(
        seed=args.seed,
        T=args.T,
        L=args.L,
        K=args.K,
        premium_share=args.premium_share if args.premium_share is not None else settings.PREMIUM_SHARE,
        peak_hours=args.peak_hours if args.peak_hours is not None else list(settings.PEAK_HOURS),
    )
    scenario = generate(params)
    scenario_io.save_scenario(args.out, scenario)
    print(f"✅ Scenario with {scenario.K} customers written to {args.out}")
    return 0


def run_report(args) -> int:
    doc = scenario_io.load_result(args.result)
    written = write_report(doc, args.out_dir, svg=args.svg or settings.WRITE_SVG)
    print(f"✅ {len(written)} report file(s) written to {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netbalance",
        description="Incentive pricing for load balancing in cellular networks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  netbalance generate --seed 0 --T 24 --L 10 --K 300 --out city.yaml
  netbalance solve --scenario city.yaml --out result.yaml
  netbalance solve --scenario example.yaml --mode major --objective balance --out r.yaml
  netbalance report --result result.yaml --out-dir report/ --svg

Exit codes: 0 success, 2 invalid input, 3 infeasible, 4 internal error
        """
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Show debug logging')
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Write a seeded synthetic scenario")
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--T', type=int, default=24, help='Time slots per day (default: 24)')
    gen.add_argument('--L', type=int, default=43, help='Number of cells (default: 43)')
    gen.add_argument('--K', type=int, default=2500, help='Number of customers (default: 2500)')
    gen.add_argument('--premium-share', type=float, default=None,
                     help=f'Share of premium customers (default: {settings.PREMIUM_SHARE})')
    gen.add_argument('--peak-hours', type=_int_list, default=None,
                     help='Comma-separated peak hours (default: %s)' % ",".join(map(str, settings.PEAK_HOURS)))
    gen.add_argument('--out', required=True)
    gen.set_defaults(handler=run_generate)

    solve = sub.add_parser("solve", help="Compute optimal traffic and supporting prices")
    solve.add_argument('--scenario', required=True)
    solve.add_argument('--mode', choices=MODES, default=settings.DEFAULT_MODE)
    solve.add_argument('--objective', choices=OBJECTIVES, default=settings.DEFAULT_OBJECTIVE)
    solve.add_argument('--source', type=int, default=settings.PRICE_SOURCE_SLOT,
                       help='Slot whose price is pinned to 0 (default: %(default)s)')
    solve.add_argument('--start', type=_int_list, default=None,
                       help='Starting traffic vector, comma-separated (single-block modes)')
    solve.add_argument('--out', required=True)
    solve.set_defaults(handler=run_solve)

    report = sub.add_parser("report", help="Write satisfaction grids and traffic tables")
    report.add_argument('--result', required=True)
    report.add_argument('--out-dir', required=True)
    report.add_argument('--svg', action='store_true', help='Also render SVG figures')
    report.set_defaults(handler=run_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level="DEBUG" if args.verbose else None)

    try:
        return args.handler(args)
    except KeyboardInterrupt:
        logger.warning("Cancelled by user")
        print("\n⛔ Cancelled by user")
        return 1
    except NetBalanceError as e:
        logger.error(str(e))
        print(f"❌ {format_error_for_user(e)}", file=sys.stderr)
        if args.verbose:
            logger.debug("Full error details:", exc_info=True)
        return exit_code_for(e)
    except FileNotFoundError as e:
        print(f"❌ {format_error_for_user(e)}", file=sys.stderr)
        return 2
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        print(f"❌ {format_error_for_user(e)}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
