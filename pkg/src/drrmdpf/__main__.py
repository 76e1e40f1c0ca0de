"""
Command line entry point for drrmdpf

    drrmdpf run --scenario s.cfg --seed 42 --out r.csv
    drrmdpf sweep --scenario s.cfg --param rate --strategies drr-mdpf,random --out sweep.csv
    drrmdpf compare --scenario s.cfg --strategies drr-mdpf,best-route,saf-like --out cmp.csv
    drrmdpf gen-topology --nodes 40 --links 122 --seed 7 --out random40.topo
"""
import argparse
import asyncio
import dataclasses
import logging
import logging.handlers
import os
import sys
import tempfile

from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

from .consts import SWEEP_DEFAULTS, SWEEP_PARAMS, TOPOLOGY_LINKS, TOPOLOGY_NODES
from .errors import (
    EXIT_OK,
    EXIT_RUNTIME,
    ConfigurationError,
    DrrMdpfException,
    UsageError,
    get_exit_code,
)
from .metrics import FORMAT_CSV, REPORT_FORMATS, MetricsReport, write_report
from .scenario import STRATEGIES, Scenario, apply_overrides, coerce_value, parse_scenario
from .simulation import run_scenario
from .topology import dump_topology, generate_topology

LOGGER = logging.getLogger(__name__)


def setup_logger(*, debug=False) -> None:
    """
    Function for setting up the logging
    """
    root = logging.getLogger()
    formatter = logging.Formatter(
        "%(asctime)s %(process)d %(processName)-10s %(name)-8s %(funcName)-8s %(levelname)-8s %(message)s"
    )

    if debug:
        max_bytes = 3 * 10**9
        backup_count = 10
        file_handler = logging.handlers.RotatingFileHandler(
            "drrmdpf.log", "a", max_bytes, backup_count
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)

    root.setLevel(logging.DEBUG if debug else logging.INFO)


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    """
    Parser for all sub commands
    """
    parser = ArgumentParser(prog="drrmdpf", description="DRR-MDPF NDN forwarding simulator")
    parser.add_argument("-D", "--debug", action="store_true")

    commands = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    commands.required = True

    def scenario_args(sub):
        sub.add_argument("--scenario", type=str, required=True)
        sub.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--out", type=str, default=None)
        sub.add_argument("--format", choices=REPORT_FORMATS, default=FORMAT_CSV)

    run = commands.add_parser("run", help="run one scenario")
    scenario_args(run)

    sweep = commands.add_parser("sweep", help="sweep one parameter")
    scenario_args(sweep)
    sweep.add_argument("--param", choices=sorted(SWEEP_PARAMS), required=True)
    sweep.add_argument("--values", type=str, default=None)
    sweep.add_argument("--strategies", type=str, default=None)
    sweep.add_argument("--replicas", type=int, default=1)
    sweep.add_argument("--jobs", type=int, default=1)

    compare = commands.add_parser("compare", help="run one scenario per strategy")
    scenario_args(compare)
    compare.add_argument("--strategies", type=str, required=True)
    compare.add_argument("--replicas", type=int, default=1)
    compare.add_argument("--jobs", type=int, default=1)

    gen = commands.add_parser("gen-topology", help="write a random connected topology")
    gen.add_argument("--nodes", type=int, default=TOPOLOGY_NODES)
    gen.add_argument("--links", type=int, default=TOPOLOGY_LINKS)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--consumers", type=int, default=2)
    gen.add_argument("--producers", type=int, default=1)
    gen.add_argument("--out", type=str, default=None)

    return parser


def load_scenario(path: str, overrides: Sequence[str], seed: Optional[int]) -> Scenario:
    """
    Read, parse and override a scenario file
    """
    if not path:
        raise UsageError("--scenario must not be empty")

    try:
        with open(path, "r", encoding="utf-8") as stream:
            text = stream.read()
    except OSError as err:
        raise ConfigurationError(f"cannot read scenario {path!r}: {err}") from err

    scenario = apply_overrides(parse_scenario(text), overrides)

    if seed is not None:
        scenario = dataclasses.replace(scenario, seed=coerce_value("seed", str(seed)))

    return scenario


def parse_strategies(text: Optional[str], default: str) -> List[str]:
    """
    Comma separated strategy names, validated
    """
    if not text:
        return [default]

    strategies = [item.strip() for item in text.split(",") if item.strip()]

    for strategy in strategies:
        if strategy not in STRATEGIES:
            raise UsageError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")

    if len(set(strategies)) != len(strategies):
        raise UsageError(f"duplicate strategies in {text!r}")

    return strategies


def parse_values(param: str, text: Optional[str]) -> List[float]:
    """
    Sweep values, the default axis when omitted
    """
    if not text:
        return list(SWEEP_DEFAULTS[param])

    values = [
        coerce_value(SWEEP_PARAMS[param], item) for item in text.split(",") if item.strip()
    ]

    if not values:
        raise UsageError("--values is empty")

    if len(set(values)) != len(values):
        raise UsageError(f"duplicate sweep values in {text!r}")

    return values


def write_output(data: bytes, out: Optional[str]) -> None:
    """
    Atomic write to out, stdout without out
    """
    if not out:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return

    directory = os.path.dirname(os.path.abspath(out))
    handle, tmp_path = tempfile.mkstemp(prefix=".drrmdpf-", dir=directory)

    try:
        with os.fdopen(handle, "wb") as stream:
            stream.write(data)
        os.replace(tmp_path, out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise

    LOGGER.info(f"Wrote {len(data)} bytes to {out}")


def _run_point(scenario: Scenario, base_dir: Optional[str]) -> MetricsReport:
    return run_scenario(scenario, base_dir=base_dir)


async def run_points(
    scenarios: Sequence[Scenario], *, base_dir: Optional[str], jobs: int
) -> List[MetricsReport]:
    """
    Run independent scenarios, in worker processes when jobs > 1
    """
    if jobs <= 1 or len(scenarios) <= 1:
        return [_run_point(scenario, base_dir) for scenario in scenarios]

    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            loop.run_in_executor(pool, _run_point, scenario, base_dir) for scenario in scenarios
        ]
        return list(await asyncio.gather(*futures))


def sweep_scenarios(
    base: Scenario,
    *,
    param: Optional[str],
    values: Sequence[float],
    strategies: Sequence[str],
    replicas: int,
) -> List[Scenario]:
    """
    Cartesian product strategy x value x seed
    """
    if replicas < 1:
        raise UsageError(f"--replicas must be >= 1, got {replicas}")

    scenarios = []
    for strategy in strategies:
        for value in values:
            for seed in range(base.seed, base.seed + replicas):
                changes = {"strategy": strategy, "seed": seed}
                if param is not None:
                    changes[SWEEP_PARAMS[param]] = value
                scenarios.append(dataclasses.replace(base, **changes))

    return scenarios


def sort_reports(reports: Sequence[MetricsReport], param: Optional[str]) -> List[MetricsReport]:
    """
    Order by (strategy, swept value, seed), duplicates are an error
    """
    column = param or "rate"

    def key(report: MetricsReport) -> Tuple[str, float, int]:
        return (report.strategy, getattr(report, column), report.seed)

    ordered = sorted(reports, key=key)
    keys = [key(report) for report in ordered]
    if len(set(keys)) != len(keys):
        raise UsageError("sweep produced duplicate (strategy, value, seed) rows")

    return ordered


def execute(argv: Sequence[str], *, configure_logging: bool = False) -> int:
    """
    Run one CLI invocation, returns the exit code
    """
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as err:
        LOGGER.error(f"{err}")
        return get_exit_code(err)

    if configure_logging:
        setup_logger(debug=args.debug)

    LOGGER.debug(f"Arguments: {vars(args)}")

    try:
        if args.command == "gen-topology":
            topology = generate_topology(
                args.nodes,
                args.links,
                seed=args.seed,
                consumers=args.consumers,
                producers=args.producers,
            )
            write_output(dump_topology(topology).encode("utf-8"), args.out)
            return EXIT_OK

        base = load_scenario(args.scenario, args.override, args.seed)
        base_dir = os.path.dirname(os.path.abspath(args.scenario))

        if args.command == "run":
            reports = [run_scenario(base, base_dir=base_dir)]
            param = None

        elif args.command == "sweep":
            param = args.param
            scenarios = sweep_scenarios(
                base,
                param=param,
                values=parse_values(param, args.values),
                strategies=parse_strategies(args.strategies, base.strategy),
                replicas=args.replicas,
            )
            reports = asyncio.run(run_points(scenarios, base_dir=base_dir, jobs=args.jobs))

        else:
            param = None
            scenarios = sweep_scenarios(
                base,
                param=None,
                values=[base.interest_rate],
                strategies=parse_strategies(args.strategies, base.strategy),
                replicas=args.replicas,
            )
            reports = asyncio.run(run_points(scenarios, base_dir=base_dir, jobs=args.jobs))

        write_output(write_report(sort_reports(reports, param), args.format), args.out)

    except DrrMdpfException as err:
        LOGGER.error(f"{type(err).__name__}: {err}")
        return get_exit_code(err)

    except OSError as err:
        LOGGER.error(f"Cannot write output: {err}")
        return EXIT_RUNTIME

    return EXIT_OK


def main() -> None:
    """Main function."""
    sys.exit(execute(sys.argv[1:], configure_logging=True))


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        pass
