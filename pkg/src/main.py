"""Command-line interface for the PA random join lab."""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.core.config import ExperimentConfig
from src.core.exceptions import CodingFailure, InvalidInputError, LabError
from src.core.operations import LabOperations
from src.core.report_service import ReportService
from src.partition.partition_system import PartitionSystem
from src.schedule.level_schedule import SCHEDULE_KINDS, LevelSchedule
from src.trees.finite_tree import MAX_TOP_LEVEL, FiniteTree

# Setup logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CODING_FAILURE = 2


class LabArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1 like every other invalid input."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _str_list(text: str) -> Tuple[str, ...]:
    return tuple(part.strip() for part in text.split(","))


def _seed(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a decimal seed, got '{text}'")
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed {value} is not a 64-bit unsigned integer")
    return value


# ----------------------------------------------------------------------
# Inputs shared by several commands


def _schedule(operations: LabOperations, config: ExperimentConfig) -> LevelSchedule:
    return operations.build_schedule(
        kind=config.schedule,
        n_max=config.n_max,
        levels=config.levels,
        densities=config.densities,
        scale=config.scale,
    )


def _tree(
    operations: LabOperations, config: ExperimentConfig, schedule: LevelSchedule
) -> FiniteTree:
    return operations.load_tree(
        schedule,
        path=config.tree,
        budget=config.tree_budget,
        seed=config.effective_tree_seed,
        prune=config.prune,
    )


def _has_tree_source(config: ExperimentConfig, schedule: LevelSchedule) -> bool:
    return bool(config.tree or config.tree_budget) or schedule.top_level <= MAX_TOP_LEVEL


def _system(
    operations: LabOperations, config: ExperimentConfig, schedule: LevelSchedule
) -> PartitionSystem:
    return operations.load_system(
        schedule,
        height=config.height,
        path=config.system,
        name=config.name,
        seed=config.system_seed,
    )


def _required(config: ExperimentConfig, field: str, flag: str) -> Any:
    value = getattr(config, field)
    if value is None:
        raise InvalidInputError(f"'{config.command}' needs {flag}")
    return value


def _coding_inputs(
    operations: LabOperations, config: ExperimentConfig, schedule: LevelSchedule
) -> Dict[str, Any]:
    """Tree, system and start point for the coding commands."""
    tree = _tree(operations, config, schedule)
    if config.codec == "kg":
        return {"system": None, "tree": tree, "sigma0": "", "tau0": ""}
    system = _system(operations, config, schedule)
    start = operations.resolve_start(
        system, tree, config.sigma0, config.tau0, auto_start=config.auto_start
    )
    return {"system": system, "tree": tree, **start}


# ----------------------------------------------------------------------
# Command handlers


def schedule_report(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Convergence report of a schedule."""
    return operations.schedule_report(_schedule(operations, config))


def oracle_use(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Use bounds of the reduction."""
    return operations.oracle_use(_schedule(operations, config))


def tree_gen(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Generate a complement tree with a measure budget."""
    schedule = _schedule(operations, config)
    budget = _required(config, "tree_budget", "--tree-budget")
    return operations.tree_gen(schedule, budget, config.effective_tree_seed, save=config.save)


def tree_prune(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Prune a tree to density."""
    schedule = _schedule(operations, config)
    tree = operations.load_tree(
        schedule, path=config.tree, budget=config.tree_budget, seed=config.effective_tree_seed
    )
    return operations.tree_prune(tree, schedule, save=config.save)


def ps_sample(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Sample a partition system uniformly."""
    schedule = _schedule(operations, config)
    height = schedule.n_max if config.height is None else config.height
    return operations.ps_sample(schedule, height, config.effective_system_seed, save=config.save)


def ps_name(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Materialize the system a name denotes."""
    schedule = _schedule(operations, config)
    name = _required(config, "name", "--name")
    return operations.ps_name(schedule, name, height=config.height, save=config.save)


def encode(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Encode a payload into a tree path."""
    schedule = _schedule(operations, config)
    z_bits = _required(config, "z", "--z")
    inputs = _coding_inputs(operations, config, schedule)
    return operations.encode(config.codec, z_bits, schedule=schedule, **inputs)


def decode(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Decode a path prefix back to the payload."""
    schedule = _schedule(operations, config)
    y_prefix = _required(config, "y", "--y")
    if config.codec == "kg":
        tree = _tree(operations, config, schedule)
        return operations.decode("kg", y_prefix, None, tree, schedule)
    system = _system(operations, config, schedule)
    return operations.decode(
        "partition", y_prefix, system, None, schedule, config.sigma0, config.tau0
    )


def roundtrip(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Encode then decode a payload."""
    schedule = _schedule(operations, config)
    z_bits = _required(config, "z", "--z")
    inputs = _coding_inputs(operations, config, schedule)
    return operations.roundtrip(config.codec, z_bits, schedule=schedule, **inputs)


def bounds_table(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Threshold, exact and sampled failure bounds per level."""
    schedule = _schedule(operations, config)
    tree = _tree(operations, config, schedule) if _has_tree_source(config, schedule) else None
    if tree is None:
        logger.info(f"No tree within l_N <= {MAX_TOP_LEVEL}; tree columns stay empty")
    return operations.bounds_table(
        schedule, tree, trials=config.effective_trials, seed=config.seed, csv_path=config.csv
    )


def mc(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Monte Carlo failure estimate at one level."""
    schedule = _schedule(operations, config)
    tree = _tree(operations, config, schedule)
    return operations.mc(tree, schedule, config.level, config.effective_trials, config.seed)


def find_n0(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Failure horizon of a named system on a tree."""
    schedule = _schedule(operations, config)
    tree = _tree(operations, config, schedule)
    return operations.find_n0(tree, schedule, name=config.name, z_bits=config.z)


def parity_demo(operations: LabOperations, config: ExperimentConfig) -> Dict[str, Any]:
    """Failure exhibit of the parity system."""
    schedule = _schedule(operations, config)
    height = min(2, schedule.n_max) if config.height is None else config.height
    return operations.parity_demo(schedule, height)


HANDLERS: Dict[str, Callable[[LabOperations, ExperimentConfig], Dict[str, Any]]] = {
    "schedule-report": schedule_report,
    "tree-gen": tree_gen,
    "tree-prune": tree_prune,
    "ps-sample": ps_sample,
    "ps-name": ps_name,
    "encode": encode,
    "decode": decode,
    "roundtrip": roundtrip,
    "bounds-table": bounds_table,
    "mc": mc,
    "find-n0": find_n0,
    "parity-demo": parity_demo,
    "oracle-use": oracle_use,
}


def run(config: ExperimentConfig, output_dir: str = "reports", echo: bool = True) -> int:
    """Run one configured command and write its report.

    Args:
        config: The run configuration
        output_dir: Directory for reports when --out is not given
        echo: Also print the report to stdout

    Returns:
        Exit status: 0 on success, 2 on a coding failure, 1 on invalid input
    """
    operations = LabOperations(
        output_dir=output_dir,
        naming_slack=config.naming_slack,
        workers=config.workers,
        progress=config.verbose,
    )
    reports = ReportService(output_dir=output_dir)
    status = EXIT_OK
    try:
        result = HANDLERS[config.command](operations, config)
    except CodingFailure as e:
        logger.error(f"Coding failure: {str(e)}")
        result = {"failure": e.to_dict()}
        status = EXIT_CODING_FAILURE
    except (LabError, OSError) as e:
        logger.error(f"Error running {config.command}: {str(e)}")
        return EXIT_INVALID

    report = reports.build_report(config.command, config.to_dict(), result)
    try:
        reports.write(report, config.out)
    except OSError as e:
        logger.error(f"Could not write report: {str(e)}")
        return EXIT_INVALID
    if echo:
        sys.stdout.write(reports.render(report))
    return status


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags every subcommand accepts; defaults are None so a --config file can fill them."""
    parser.add_argument("--config", help="JSON configuration file to start from")
    parser.add_argument("--out", help="Report path (default: reports/<command>.json)")
    parser.add_argument("--seed", type=_seed, help="Global 64-bit seed", default=None)
    parser.add_argument("--workers", type=int, help="Monte Carlo worker processes")
    parser.add_argument(
        "--verbose", help="Debug logging and progress bars", action="store_true", default=None
    )

    schedule = parser.add_argument_group("schedule")
    schedule.add_argument("--schedule", choices=SCHEDULE_KINDS, help="Schedule kind")
    schedule.add_argument("--n-max", dest="n_max", type=int, help="Index N of the last level")
    schedule.add_argument("--levels", type=_int_list, help="Custom levels, e.g. 0,2,4")
    schedule.add_argument("--densities", type=_str_list, help="Custom densities, e.g. 1/2,1/4,1/4")
    schedule.add_argument("--scale", type=int, help="Constant c of scaled_nlogn")
    schedule.add_argument(
        "--naming-slack", dest="naming_slack", type=int, help="Extra naming bits per level"
    )


def _add_tree_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("tree source")
    group.add_argument("--tree", help="Tree file")
    group.add_argument("--tree-budget", dest="tree_budget", help="Removal budget, e.g. 1/4")
    group.add_argument("--tree-seed", dest="tree_seed", type=_seed, help="Tree generator seed")
    group.add_argument(
        "--prune", help="Prune the tree to density first", action="store_true", default=None
    )


def _add_system_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("system source")
    group.add_argument("--system", help="Partition system file")
    group.add_argument("--name", help="Name bits of the system")
    group.add_argument(
        "--system-seed", dest="system_seed", type=_seed, help="Uniform sampler seed"
    )
    group.add_argument("--height", type=int, help="System height")


def _add_coding_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--codec", choices=["partition", "kg"], help="Codec (default: partition)")
    parser.add_argument("--sigma0", help="Start class")
    parser.add_argument("--tau0", help="Start node")
    parser.add_argument(
        "--auto-start",
        dest="auto_start",
        help="Start at the failure horizon of the system on the tree",
        action="store_true",
        default=None,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(
        description="Desk-scale lab for coding into effectively closed classes."
    )

    # Create subparsers
    subparsers = parser.add_subparsers(dest="command", help="Commands")
    subparsers.required = True

    def add(name: str, help_text: str, *extras: Callable) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        _add_common_arguments(sub)
        for extra in extras:
            extra(sub)
        sub.set_defaults(func=HANDLERS[name])
        return sub

    add("schedule-report", "Convergence report of a schedule")
    add("oracle-use", "Use bounds of the reduction")

    gen = add("tree-gen", "Generate a complement tree", _add_tree_arguments)
    gen.add_argument("--save", help="Write the tree file here")

    prune = add("tree-prune", "Prune a tree to density", _add_tree_arguments)
    prune.add_argument("--save", help="Write the pruned tree file here")

    sample = add("ps-sample", "Sample a partition system uniformly", _add_system_arguments)
    sample.add_argument("--save", help="Write the system file here")

    named = add("ps-name", "Materialize the system a name denotes", _add_system_arguments)
    named.add_argument("--save", help="Write the system file here")

    for name, help_text in (("encode", "Encode a payload"), ("roundtrip", "Encode then decode")):
        sub = add(
            name, help_text, _add_tree_arguments, _add_system_arguments, _add_coding_arguments
        )
        sub.add_argument("--z", help="Payload bits")

    dec = add(
        "decode",
        "Decode a path prefix",
        _add_tree_arguments,
        _add_system_arguments,
        _add_coding_arguments,
    )
    dec.add_argument("--y", help="Path prefix bits")

    table = add("bounds-table", "Failure bounds per level", _add_tree_arguments)
    table.add_argument("--trials", type=int, help="Monte Carlo trials per level (default: no sampling)")
    table.add_argument("--csv", help="Also write the table as CSV")

    estimate = add("mc", "Monte Carlo failure estimate", _add_tree_arguments)
    estimate.add_argument("--level", type=int, help="Level index n")
    estimate.add_argument("--trials", type=int, help="Number of sampled systems (default: 1000)")

    horizon = add("find-n0", "Failure horizon of a named system", _add_tree_arguments)
    horizon.add_argument("--name", help="Name bits (default: all zeros)")
    horizon.add_argument("--z", help="Also encode this payload from the horizon")

    parity = add("parity-demo", "Failure exhibit of the parity system")
    parity.add_argument("--height", type=int, help="System height (default: 2)")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the CLI application."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = ExperimentConfig.from_args(args)
    except (InvalidInputError, OSError) as e:
        logger.error(f"Invalid configuration: {str(e)}")
        return EXIT_INVALID
    if config.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
