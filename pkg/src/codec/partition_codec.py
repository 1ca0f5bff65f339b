"""Coding through a partition system: z picks the class, the tree supplies survivors."""

import logging
from typing import Tuple

from src.codec.base_codec import BaseCodec
from src.codec.trace import CodecStep, CodecTrace, OracleUse
from src.core.exceptions import CodingFailure, InvalidInputError
from src.core.rationals import check_bits
from src.partition.partition_system import PartitionSystem
from src.trees.finite_tree import FiniteTree

logger = logging.getLogger(__name__)


def _check_start(system: PartitionSystem, sigma0: str, tau0: str) -> int:
    check_bits(sigma0, "start class")
    check_bits(tau0, "start node")
    n0 = len(sigma0)
    schedule = system.schedule
    if n0 > system.height:
        raise InvalidInputError(
            f"Start class '{sigma0}' is longer than the system height {system.height}"
        )
    if len(tau0) != schedule.levels[n0]:
        raise InvalidInputError(
            f"Start node '{tau0}' must have length l_{n0}={schedule.levels[n0]}"
        )
    if tau0 not in system.members(sigma0):
        raise InvalidInputError(f"Start node '{tau0}' is not in D_{sigma0 or 'epsilon'}")
    return n0


def encode(
    z_bits: str,
    system: PartitionSystem,
    tree: FiniteTree,
    sigma0: str = "",
    tau0: str = "",
) -> Tuple[str, CodecTrace]:
    """Choose tau_{k+1} in [tau_k] & tree & D_{sigma_k * z(k)}, leftmost first.

    Args:
        z_bits: Payload bits z
        system: Partition system of height >= |sigma0| + |z|
        tree: Finite tree reaching level l_{|sigma0| + |z|}
        sigma0: Start class
        tau0: Start node, a tree node in D_{sigma0}

    Returns:
        Tuple of y_prefix (the final tau) and the trace

    Raises:
        CodingFailure: When the requested class has no survivor below tau_k
    """
    check_bits(z_bits, "payload")
    schedule = system.schedule
    n0 = _check_start(system, sigma0, tau0)
    r = len(z_bits)
    if n0 + r > system.height:
        raise InvalidInputError(
            f"Encoding {r} bits from height {n0} needs a system of height {n0 + r}, "
            f"got {system.height}"
        )
    if schedule.levels[n0 + r] > tree.top_level:
        raise InvalidInputError(
            f"Encoding needs level l_{n0 + r}={schedule.levels[n0 + r]}, beyond the "
            f"tree's top level {tree.top_level}"
        )
    if not tree.contains(tau0):
        raise InvalidInputError(f"Start node '{tau0}' is not a node of the tree")

    trace = CodecTrace("partition", sigma0, tau0)
    sigma, tau = sigma0, tau0
    for k, bit in enumerate(z_bits):
        n = n0 + k
        target = system.members(sigma + bit)
        candidates = [
            node for node in tree.extensions(tau, schedule.levels[n + 1]) if node in target
        ]
        if not candidates:
            raise CodingFailure(k, int(bit), sigma=sigma, tau=tau, level=n)
        sigma, tau = sigma + bit, candidates[0]
        trace.steps.append(CodecStep(k + 1, sigma, tau, int(bit), len(candidates)))

    trace.oracle_use = OracleUse(
        name_bits=schedule.naming_length_or_none(n0 + r),
        payload_bits=schedule.levels[n0 + r],
    )
    logger.debug(f"Encoded {r} bits from height {n0} to '{tau}'")
    return tau, trace


def decode(system: PartitionSystem, y_prefix: str, sigma0: str = "", tau0: str = "") -> str:
    """Recover z(k) as the unique i with y restricted to l_{n+1} in D_{sigma_k * i}.

    Reads only the system and y; the tree plays no part.
    """
    check_bits(y_prefix, "output prefix")
    schedule = system.schedule
    n0 = _check_start(system, sigma0, tau0)
    if not y_prefix.startswith(tau0):
        raise InvalidInputError(f"'{y_prefix}' does not extend the start node '{tau0}'")
    index = schedule.level_index(len(y_prefix))
    if index is None or index < n0 or index > system.height:
        expected = list(schedule.levels[n0: system.height + 1])
        raise InvalidInputError(
            f"Output prefix has length {len(y_prefix)}; expected a level in {expected}"
        )

    sigma = sigma0
    recovered = []
    for n in range(n0, index):
        prefix = y_prefix[: schedule.levels[n + 1]]
        matches = [bit for bit in "01" if prefix in system.members(sigma + bit)]
        assert len(matches) == 1, f"'{prefix}' lies in {len(matches)} children of D_{sigma}"
        recovered.append(matches[0])
        sigma += matches[0]
    return "".join(recovered)


class PartitionCodec(BaseCodec):
    """encode/decode bound to one system, tree and start point."""

    def __init__(
        self,
        system: PartitionSystem,
        tree: FiniteTree,
        sigma0: str = "",
        tau0: str = "",
    ):
        self.system = system
        self.tree = tree
        self.sigma0 = sigma0
        self.tau0 = tau0

    def encode(self, z_bits: str) -> Tuple[str, CodecTrace]:
        return encode(z_bits, self.system, self.tree, self.sigma0, self.tau0)

    def decode(self, y_prefix: str) -> str:
        return decode(self.system, y_prefix, self.sigma0, self.tau0)
