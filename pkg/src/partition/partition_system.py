"""l-partition systems: the classes D_sigma, their construction and file format."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Mapping, Tuple

from src.core.exceptions import InvalidInputError
from src.core.rationals import all_strings, check_bits
from src.schedule.level_schedule import LevelSchedule

logger = logging.getLogger(__name__)

# tau -> the extensions of tau (one level down) that go to class sigma_tau * 0
Splits = Mapping[str, FrozenSet[str]]


@dataclass(frozen=True)
class PartitionSystem:
    """The map sigma -> D_sigma for every binary sigma with |sigma| <= height.

    Instances built by the constructors in this package are valid; arbitrary
    class maps are accepted too so that `validate` can examine them.
    """

    schedule: LevelSchedule
    height: int
    classes: Mapping[str, FrozenSet[str]]
    _owner: Dict[str, str] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.height <= self.schedule.n_max:
            raise InvalidInputError(
                f"Height {self.height} is outside 0..N={self.schedule.n_max}"
            )
        frozen = {sigma: frozenset(members) for sigma, members in self.classes.items()}
        object.__setattr__(self, "classes", frozen)
        for sigma in frozen:
            check_bits(sigma, "class index")

    def __hash__(self) -> int:
        return hash((self.schedule, self.height, self.fingerprint()))

    def members(self, sigma: str) -> FrozenSet[str]:
        """D_sigma (empty if the map has no entry for sigma)."""
        return self.classes.get(sigma, frozenset())

    def fingerprint(self) -> Tuple[Tuple[str, Tuple[str, ...]], ...]:
        """Canonical, hashable description of the class map."""
        return tuple(
            (sigma, tuple(sorted(self.classes[sigma])))
            for sigma in sorted(self.classes, key=lambda s: (len(s), s))
        )

    def class_of(self, tau: str) -> str:
        """The unique sigma of length n with tau in D_sigma, where |tau| = l_n."""
        check_bits(tau, "string")
        n = self.schedule.level_index(len(tau))
        if n is None or n > self.height:
            raise InvalidInputError(
                f"Length {len(tau)} of '{tau}' is not a schedule level within height "
                f"{self.height} (levels {list(self.schedule.levels[: self.height + 1])})"
            )
        if not self._owner:
            for sigma, members in self.classes.items():
                for member in members:
                    self._owner.setdefault(member, sigma)
        sigma = self._owner.get(tau)
        if sigma is None:
            raise InvalidInputError(f"'{tau}' lies in no class of this system")
        return sigma

    def top_classes(self) -> List[Tuple[str, FrozenSet[str]]]:
        return [(sigma, self.members(sigma)) for sigma in all_strings(self.height)]

    def restrict(self, height: int) -> "PartitionSystem":
        """The same system cut down to a lower height."""
        if not 0 <= height <= self.height:
            raise InvalidInputError(f"Cannot restrict height {self.height} to {height}")
        return PartitionSystem(
            self.schedule,
            height,
            {sigma: members for sigma, members in self.classes.items() if len(sigma) <= height},
        )

    def extends(self, other: "PartitionSystem") -> bool:
        """True iff `other` is this system restricted to other's height."""
        if other.schedule != self.schedule or other.height > self.height:
            return False
        return self.restrict(other.height).fingerprint() == other.fingerprint()

    def split_at(self, tau: str) -> FrozenSet[str]:
        """Extensions of tau (at the next level) lying in class sigma_tau * 0."""
        sigma = self.class_of(tau)
        return frozenset(
            member for member in self.members(sigma + "0") if member.startswith(tau)
        )

    def extend(self, splits: Splits) -> "PartitionSystem":
        """Add one level, distributing each top-level tau's extensions by `splits`."""
        n = self.height
        if n >= self.schedule.n_max:
            raise InvalidInputError(f"Cannot extend beyond N={self.schedule.n_max}")
        gap = self.schedule.gap(n)
        classes = dict(self.classes)
        for sigma in all_strings(n):
            zero: set = set()
            one: set = set()
            for tau in sorted(self.members(sigma)):
                if tau not in splits:
                    raise InvalidInputError(f"No split given for '{tau}'")
                chosen = splits[tau]
                for word in all_strings(gap):
                    extension = tau + word
                    (zero if extension in chosen else one).add(extension)
            classes[sigma + "0"] = frozenset(zero)
            classes[sigma + "1"] = frozenset(one)
        return PartitionSystem(self.schedule, n + 1, classes)

    def to_text(self) -> str:
        """System file: header, then "sigma:tau1,tau2,..." for every |sigma| = height."""
        lines = [f"h={self.height};schedule={self.schedule.schedule_id}"]
        for sigma, members in self.top_classes():
            lines.append(f"{sigma}:{','.join(sorted(members))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, schedule: LevelSchedule) -> "PartitionSystem":
        body = text[:-1] if text.endswith("\n") else text
        lines = body.split("\n")
        header = lines[0].strip()
        try:
            height_part, schedule_part = header.split(";", 1)
            if not height_part.startswith("h=") or not schedule_part.startswith("schedule="):
                raise ValueError(header)
            height = int(height_part[2:])
            schedule_id = schedule_part[len("schedule="):]
        except ValueError:
            raise InvalidInputError(
                f"System header must read 'h=<height>;schedule=<id>', got '{header}'"
            )
        if schedule_id != schedule.schedule_id:
            raise InvalidInputError(
                f"System was written for schedule '{schedule_id}', not '{schedule.schedule_id}'"
            )
        if not 0 <= height <= schedule.n_max:
            raise InvalidInputError(f"Height {height} is outside 0..N={schedule.n_max}")

        top: Dict[str, FrozenSet[str]] = {}
        for line in lines[1:]:
            if ":" not in line:
                raise InvalidInputError(f"Malformed system line '{line}'")
            sigma, rest = line.split(":", 1)
            if schedule.levels[height] == 0:
                members = [""]
            else:
                members = rest.split(",") if rest else []
            top[sigma] = frozenset(members)
        if sorted(top) != list(all_strings(height)):
            raise InvalidInputError(f"System file must list every sigma of length {height}")

        classes: Dict[str, FrozenSet[str]] = dict(top)
        for n in range(height - 1, -1, -1):
            level = schedule.levels[n]
            for sigma in all_strings(n):
                classes[sigma] = frozenset(
                    tau[:level]
                    for child in (sigma + "0", sigma + "1")
                    for tau in classes[child]
                )
        return cls(schedule, height, classes)


def trivial_system(schedule: LevelSchedule) -> PartitionSystem:
    """The unique height-0 system: D_epsilon = {epsilon}."""
    return PartitionSystem(schedule, 0, {"": frozenset([""])})


def system_from_splits(
    schedule: LevelSchedule, level_splits: List[Splits]
) -> PartitionSystem:
    """Build a system of height len(level_splits), one split map per level."""
    system = trivial_system(schedule)
    for splits in level_splits:
        system = system.extend(splits)
    return system


def parity_splits(tau: str, gap: int) -> FrozenSet[str]:
    """Extensions of tau whose new segment has an even number of ones."""
    return frozenset(
        tau + word for word in all_strings(gap) if word.count("1") % 2 == 0
    )


def parity_system(schedule: LevelSchedule, height: int) -> PartitionSystem:
    """The naive effective partition: parity of each new segment picks the class."""
    if not 0 <= height <= schedule.n_max:
        raise InvalidInputError(f"Height {height} is outside 0..N={schedule.n_max}")
    level_splits = []
    for n in range(height):
        gap = schedule.gap(n)
        level_splits.append(
            {tau: parity_splits(tau, gap) for tau in all_strings(schedule.levels[n])}
        )
    return system_from_splits(schedule, level_splits)


def read_system(path: str, schedule: LevelSchedule) -> PartitionSystem:
    with open(path, "r", encoding="utf-8") as f:
        system = PartitionSystem.from_text(f.read(), schedule)
    logger.info(f"Loaded height-{system.height} partition system from {path}")
    return system


def write_system(system: PartitionSystem, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(system.to_text())
    logger.info(f"Saved height-{system.height} partition system to {path}")


def system_summary(system: PartitionSystem) -> Dict[str, Any]:
    """Report form of a system: height, schedule id and the top-level classes."""
    return {
        "height": system.height,
        "schedule": system.schedule.schedule_id,
        "classes": {sigma: sorted(members) for sigma, members in system.top_classes()},
    }
