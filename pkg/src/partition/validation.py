"""Clause-by-clause validation of l-partition systems."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from src.core.rationals import all_strings
from src.partition.partition_system import PartitionSystem

logger = logging.getLogger(__name__)

# Checked in this order; the first violation is reported.
CLAUSES = (
    "root",
    "level-shape",
    "disjoint",
    "prefix",
    "cover",
    "equal-split",
    "level-partition",
)


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    clause: Optional[str] = None
    sigma: Optional[str] = None
    tau: Optional[str] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.valid

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "clause": self.clause,
            "sigma": self.sigma,
            "tau": self.tau,
            "detail": self.detail,
        }


def _violation(clause: str, sigma: Optional[str], tau: Optional[str], detail: str):
    logger.debug(f"Partition system violates {clause}: {detail}")
    return ValidationResult(False, clause, sigma, tau, detail)


def validate(system: PartitionSystem) -> ValidationResult:
    """Check every defining clause of an l-partition system.

    Args:
        system: The system to examine; its class map may be arbitrary

    Returns:
        ValidationResult, with the first violated clause and a witness (sigma, tau)
    """
    schedule = system.schedule
    height = system.height
    classes = system.classes

    if classes.get("") != frozenset([""]):
        return _violation("root", "", None, "D_epsilon must be exactly {epsilon}")

    for sigma, members in classes.items():
        if len(sigma) > height:
            return _violation(
                "level-shape", sigma, None, f"class index longer than height {height}"
            )
        level = schedule.levels[len(sigma)]
        for tau in members:
            if len(tau) != level or set(tau) - {"0", "1"}:
                return _violation(
                    "level-shape", sigma, tau, f"member is not a string of length {level}"
                )
    for n in range(height + 1):
        for sigma in all_strings(n):
            if sigma not in classes:
                return _violation("level-shape", sigma, None, "class is missing")

    for n in range(height):
        level = schedule.levels[n]
        half = 1 << (schedule.gap(n) - 1)
        for sigma in all_strings(n):
            zero = classes[sigma + "0"]
            one = classes[sigma + "1"]
            common = zero & one
            if common:
                return _violation(
                    "disjoint", sigma, min(common), "string lies in both child classes"
                )
            parents = classes[sigma]
            for tau in sorted(zero | one):
                if tau[:level] not in parents:
                    return _violation(
                        "prefix", sigma, tau, f"prefix '{tau[:level]}' is not in D_{sigma}"
                    )
            for tau in sorted(parents):
                for word in all_strings(schedule.gap(n)):
                    if tau + word not in zero and tau + word not in one:
                        return _violation(
                            "cover", sigma, tau, f"extension '{tau + word}' is in neither child"
                        )
            for tau in sorted(parents):
                zero_count = sum(1 for member in zero if member.startswith(tau))
                one_count = sum(1 for member in one if member.startswith(tau))
                if zero_count != half or one_count != half:
                    return _violation(
                        "equal-split",
                        sigma,
                        tau,
                        f"split sizes {zero_count} and {one_count}, expected {half} each",
                    )

    for n in range(height + 1):
        seen: Dict[str, str] = {}
        for sigma in all_strings(n):
            for tau in classes[sigma]:
                if tau in seen:
                    return _violation(
                        "level-partition", sigma, tau, f"also in D_{seen[tau]}"
                    )
                seen[tau] = sigma
        level = schedule.levels[n]
        if len(seen) != 1 << level:
            missing = next(tau for tau in all_strings(level) if tau not in seen)
            return _violation(
                "level-partition", None, missing, f"string of length {level} lies in no class"
            )

    return ValidationResult(True)
