"""Per-step records and oracle-use accounting for codec runs."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass(frozen=True)
class CodecStep:
    """One output level: sigma_k, tau_k, the bit z(k-1) and the candidates seen."""

    k: int
    sigma: str
    tau: str
    class_bit: int
    candidate_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "sigma": self.sigma,
            "tau": self.tau,
            "class_bit": self.class_bit,
            "candidate_count": self.candidate_count,
        }


@dataclass(frozen=True)
class OracleUse:
    """Bits of the name x and of the output y needed to recover the payload.

    name_bits is None when the height lies beyond the schedule's naming horizon.
    """

    name_bits: Optional[int]
    payload_bits: int

    def to_dict(self) -> Dict[str, Any]:
        return {"name_bits": self.name_bits, "payload_bits": self.payload_bits}


@dataclass
class CodecTrace:
    codec: str
    start_sigma: str
    start_tau: str
    steps: List[CodecStep] = field(default_factory=list)
    oracle_use: Optional[OracleUse] = None

    @property
    def output(self) -> str:
        """Final tau, or the start node when nothing was encoded."""
        return self.steps[-1].tau if self.steps else self.start_tau

    def to_dict(self) -> Dict[str, Any]:
        return {
            "codec": self.codec,
            "start": {"sigma": self.start_sigma, "tau": self.start_tau},
            "steps": [step.to_dict() for step in self.steps],
            "oracle_use": self.oracle_use.to_dict() if self.oracle_use else None,
        }
