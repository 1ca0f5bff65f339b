from mcp.server.fastmcp import FastMCP, Context
import logging
from typing import Dict, List, Any, Optional
from src.core.exceptions import CodingFailure
from src.core.operations import LabOperations

# Setup logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[logging.FileHandler("lab_mcp_server.log"), logging.StreamHandler()],
)
logger = logging.getLogger(__name__)

# Create an MCP server instance
mcp = FastMCP("PARandomJoinLab")

# Initialize operations
operations = LabOperations()


def _schedule(
    kind: str, n_max: int, levels: Optional[List[int]], densities: Optional[List[str]]
):
    return operations.build_schedule(kind=kind, n_max=n_max, levels=levels, densities=densities)


@mcp.tool()
def schedule_report(
    kind: str = "exponential",
    n_max: int = 4,
    levels: Optional[List[int]] = None,
    densities: Optional[List[str]] = None,
    ctx: Context = None,
) -> Dict[str, Any]:
    """
    Evaluate the convergence conditions of a level schedule.

    Args:
        kind: Schedule kind (exponential, nlogn, scaled_nlogn, custom)
        n_max: Index N of the last level
        levels: Custom levels; overrides kind and n_max
        densities: Custom densities as "p/q" strings
        ctx: MCP context for progress reporting

    Returns:
        Per-level partial sums and threshold conditions
    """
    logger.info(f"Received schedule report request - kind: {kind}, n_max: {n_max}")
    try:
        return operations.schedule_report(_schedule(kind, n_max, levels, densities))
    except Exception as e:
        error_msg = f"Error during schedule report: {str(e)}"
        logger.error(error_msg)
        if ctx:
            ctx.error(error_msg)
        raise


@mcp.tool()
def bounds_table(
    kind: str = "exponential",
    n_max: int = 8,
    levels: Optional[List[int]] = None,
    densities: Optional[List[str]] = None,
    tree_budget: Optional[str] = None,
    trials: int = 0,
    seed: int = 0,
    ctx: Context = None,
) -> Dict[str, Any]:
    """
    Build the per-level failure bound table.

    Args:
        kind: Schedule kind
        n_max: Index N of the last level
        levels: Custom levels; overrides kind and n_max
        densities: Custom densities as "p/q" strings
        tree_budget: Generate a complement tree with this removal budget
        trials: Monte Carlo trials per level (0 skips sampling)
        seed: 64-bit seed for the tree generator and the sampler
        ctx: MCP context for progress reporting

    Returns:
        Table rows with the threshold, exact sums and estimates
    """
    logger.info(f"Received bounds table request - kind: {kind}, trials: {trials}")
    if ctx:
        ctx.info(f"Building bounds table for {kind}")
    try:
        schedule = _schedule(kind, n_max, levels, densities)
        tree = None
        if tree_budget is not None:
            tree = operations.load_tree(schedule, budget=tree_budget, seed=seed)
        return operations.bounds_table(schedule, tree, trials=trials, seed=seed)
    except Exception as e:
        error_msg = f"Error during bounds table: {str(e)}"
        logger.error(error_msg)
        if ctx:
            ctx.error(error_msg)
        raise


@mcp.tool()
def roundtrip(
    z: str,
    levels: List[int],
    name: Optional[str] = None,
    codec: str = "partition",
    ctx: Context = None,
) -> Dict[str, Any]:
    """
    Encode a payload on the full tree and decode it again.

    Args:
        z: Payload bits
        levels: Custom levels of the schedule
        name: Name bits of the partition system (default: all zeros)
        codec: partition or kg
        ctx: MCP context for progress reporting

    Returns:
        The path prefix, the recovered payload and the coding trace; a coding
        failure is returned as {"failure": ...}
    """
    logger.info(f"Received roundtrip request - z: {z}, codec: {codec}")
    try:
        schedule = _schedule("custom", len(levels) - 1, levels, None)
        tree = operations.load_tree(schedule)
        system = None
        if codec == "partition":
            system = operations.load_system(schedule, height=len(z), name=name)
        return operations.roundtrip(codec, z, system, tree, schedule)
    except CodingFailure as e:
        logger.info(f"Roundtrip hit a coding failure: {str(e)}")
        if ctx:
            ctx.info(str(e))
        return {"failure": e.to_dict()}
    except Exception as e:
        error_msg = f"Error during roundtrip: {str(e)}"
        logger.error(error_msg)
        if ctx:
            ctx.error(error_msg)
        raise


@mcp.tool()
def find_n0(
    levels: List[int],
    densities: Optional[List[str]] = None,
    name: Optional[str] = None,
    tree_budget: Optional[str] = None,
    seed: int = 0,
    prune: bool = True,
    ctx: Context = None,
) -> Dict[str, Any]:
    """
    Locate the failure horizon of a named system on a generated tree.

    Args:
        levels: Custom levels of the schedule
        densities: Custom densities as "p/q" strings
        name: Name bits (default: all zeros)
        tree_budget: Removal budget of the generated tree (default: full tree)
        seed: Tree generator seed
        prune: Prune the tree to density first
        ctx: MCP context for progress reporting

    Returns:
        The horizon n0, the failing levels and the start point
    """
    logger.info(f"Received find_n0 request - levels: {levels}")
    try:
        schedule = _schedule("custom", len(levels) - 1, levels, densities)
        tree = operations.load_tree(schedule, budget=tree_budget, seed=seed, prune=prune)
        result = operations.find_n0(tree, schedule, name=name)
        if ctx:
            ctx.info(f"Failure horizon n0={result['horizon']['n0']}")
        return result
    except Exception as e:
        error_msg = f"Error during find_n0: {str(e)}"
        logger.error(error_msg)
        if ctx:
            ctx.error(error_msg)
        raise


if __name__ == "__main__":
    logger.info("Starting PA random join lab MCP Server...")
    try:
        mcp.run()
    except Exception as e:
        logger.error(f"Failed to start MCP server: {str(e)}")
        raise
