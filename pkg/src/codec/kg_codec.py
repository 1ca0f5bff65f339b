"""Classic Kucera-Gacs coding: leftmost extension for 0, rightmost for 1."""

import logging
from typing import Tuple

from src.codec.base_codec import BaseCodec
from src.codec.trace import CodecStep, CodecTrace, OracleUse
from src.core.exceptions import InvalidInputError, NotBoundary
from src.core.rationals import check_bits
from src.schedule.level_schedule import LevelSchedule
from src.trees.finite_tree import FiniteTree
from src.trees.pruning import check_two_extension

logger = logging.getLogger(__name__)


def kg_encode(z_bits: str, tree: FiniteTree, schedule: LevelSchedule) -> Tuple[str, CodecTrace]:
    """Follow the leftmost (z(n)=0) or rightmost (z(n)=1) extension at each level.

    Args:
        z_bits: Payload bits
        tree: Tree with the two-extension property up to level l_{|z|}
        schedule: Schedule supplying the levels

    Returns:
        Tuple of y = y restricted to l_{|z|}, and the trace
    """
    check_bits(z_bits, "payload")
    r = len(z_bits)
    if r > schedule.n_max or schedule.levels[r] > tree.top_level:
        raise InvalidInputError(
            f"Encoding {r} bits needs level l_{r}, beyond the schedule or the tree"
        )
    if tree.is_empty:
        raise InvalidInputError("Cannot encode into the empty tree")
    two_extension = check_two_extension(tree, schedule, depth=r)
    if not two_extension:
        raise InvalidInputError(
            f"Two-extension property fails at level {two_extension.level_index}: node "
            f"'{two_extension.witness}' has {two_extension.extension_count} extension(s)"
        )

    trace = CodecTrace("kg", "", "")
    tau = ""
    for n, bit in enumerate(z_bits):
        found = tree.extensions(tau, schedule.levels[n + 1])
        tau = found[0] if bit == "0" else found[-1]
        trace.steps.append(CodecStep(n + 1, z_bits[: n + 1], tau, int(bit), len(found)))
    trace.oracle_use = OracleUse(name_bits=0, payload_bits=schedule.levels[r])
    logger.debug(f"Kucera-Gacs encoded {r} bits to '{tau}'")
    return tau, trace


def kg_decode(y_prefix: str, tree: FiniteTree, schedule: LevelSchedule) -> str:
    """Read z(n) off whether y takes the leftmost or rightmost extension at l_{n+1}.

    Raises:
        NotBoundary: y takes an interior extension at some level
    """
    check_bits(y_prefix, "output prefix")
    index = schedule.level_index(len(y_prefix))
    if index is None:
        raise InvalidInputError(
            f"Output prefix has length {len(y_prefix)}, which is not a schedule level"
        )
    if not tree.contains(y_prefix):
        raise InvalidInputError(f"'{y_prefix}' is not a node of the tree")

    recovered = []
    for n in range(index):
        parent = y_prefix[: schedule.levels[n]]
        node = y_prefix[: schedule.levels[n + 1]]
        found = tree.extensions(parent, schedule.levels[n + 1])
        if node == found[0]:
            recovered.append("0")
        elif node == found[-1]:
            recovered.append("1")
        else:
            raise NotBoundary(n, node)
    return "".join(recovered)


class KuceraGacsCodec(BaseCodec):
    """kg_encode/kg_decode bound to one tree and schedule."""

    def __init__(self, tree: FiniteTree, schedule: LevelSchedule):
        self.tree = tree
        self.schedule = schedule

    def encode(self, z_bits: str) -> Tuple[str, CodecTrace]:
        return kg_encode(z_bits, self.tree, self.schedule)

    def decode(self, y_prefix: str) -> str:
        return kg_decode(y_prefix, self.tree, self.schedule)

    def get_codec_name(self) -> str:
        return "kg"
