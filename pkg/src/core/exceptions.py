"""Exception hierarchy shared by every lab module."""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for all errors raised by the lab."""


class InvalidInputError(LabError, ValueError):
    """A precondition or file-format violation in caller-supplied data."""


class CodingFailure(LabError):
    """No extension of the current node lies in the class the payload asks for.

    This is the empty-class event ``G_n(0) = {} or G_n(1) = {}``. It is a
    result worth reporting, so it carries enough context to reproduce it.
    """

    def __init__(
        self,
        step: int,
        class_bit: int,
        sigma: str = "",
        tau: str = "",
        level: Optional[int] = None,
    ):
        self.step = step
        self.class_bit = class_bit
        self.sigma = sigma
        self.tau = tau
        self.level = level
        super().__init__(
            f"CodingFailure(step={step}, class_bit={class_bit}): "
            f"no extension of tau='{tau}' in class sigma='{sigma}{class_bit}'"
        )

    def to_dict(self) -> Dict[str, Any]:
        """Serialize the failure for embedding in a report."""
        return {
            "step": self.step,
            "class_bit": self.class_bit,
            "sigma": self.sigma,
            "tau": self.tau,
            "level": self.level,
        }


class NotBoundary(LabError):
    """A decoded path takes an interior extension at some level."""

    def __init__(self, level: int, node: str = ""):
        self.level = level
        self.node = node
        super().__init__(
            f"NotBoundary(level={level}): '{node}' is neither the leftmost "
            f"nor the rightmost surviving extension"
        )


class PreconditionOutOfRegime(LabError):
    """A node's conditional density is not above the schedule threshold."""

    def __init__(self, node: str, density: Any, threshold: Any):
        self.node = node
        self.density = density
        self.threshold = threshold
        super().__init__(
            f"Node '{node}' has density {density}, not above threshold {threshold}"
        )
