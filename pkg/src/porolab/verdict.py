"""Three-valued answers to asymptotic questions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(enum.Enum):
    CERTIFIED_TRUE = "CertifiedTrue"
    CERTIFIED_FALSE = "CertifiedFalse"
    EMPIRICAL_TRUE = "EmpiricalTrue"
    EMPIRICAL_FALSE = "EmpiricalFalse"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TailVerdict:
    """Answer to a claim about the tail of a sequence.

    ``depth`` is the truncation depth the answer was derived at; certified
    answers still carry it so reports never hide how far data was checked.
    """

    status: Status
    depth: int | None = None
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def certified(self) -> bool:
        return self.status in (Status.CERTIFIED_TRUE, Status.CERTIFIED_FALSE)

    @property
    def truthy(self) -> bool:
        return self.status in (Status.CERTIFIED_TRUE, Status.EMPIRICAL_TRUE)

    @property
    def falsy(self) -> bool:
        return self.status in (Status.CERTIFIED_FALSE, Status.EMPIRICAL_FALSE)

    def __bool__(self):
        return self.truthy

    def negate(self) -> "TailVerdict":
        flip = {
            Status.CERTIFIED_TRUE: Status.CERTIFIED_FALSE,
            Status.CERTIFIED_FALSE: Status.CERTIFIED_TRUE,
            Status.EMPIRICAL_TRUE: Status.EMPIRICAL_FALSE,
            Status.EMPIRICAL_FALSE: Status.EMPIRICAL_TRUE,
            Status.INCONCLUSIVE: Status.INCONCLUSIVE,
        }
        return TailVerdict(flip[self.status], self.depth, self.witness)

    def label(self) -> str:
        if self.status in (Status.EMPIRICAL_TRUE, Status.EMPIRICAL_FALSE):
            return f"{self.status.value}({self.depth})"
        return self.status.value


def certified(value: bool, depth=None, **witness: Any) -> TailVerdict:
    return TailVerdict(Status.CERTIFIED_TRUE if value else Status.CERTIFIED_FALSE, depth, witness)


def empirical(value: bool, depth, **witness: Any) -> TailVerdict:
    return TailVerdict(Status.EMPIRICAL_TRUE if value else Status.EMPIRICAL_FALSE, depth, witness)


def inconclusive(depth=None, **witness: Any) -> TailVerdict:
    return TailVerdict(Status.INCONCLUSIVE, depth, witness)


def conjoin(verdicts, depth=None) -> TailVerdict:
    """Logical and; certified only if every part is certified or a certified part is false."""
    verdicts = list(verdicts)
    if any(v.status is Status.CERTIFIED_FALSE for v in verdicts):
        return TailVerdict(Status.CERTIFIED_FALSE, depth)
    if all(v.status is Status.CERTIFIED_TRUE for v in verdicts):
        return TailVerdict(Status.CERTIFIED_TRUE, depth)
    if any(v.status is Status.INCONCLUSIVE for v in verdicts):
        return TailVerdict(Status.INCONCLUSIVE, depth)
    if any(v.falsy for v in verdicts):
        return TailVerdict(Status.EMPIRICAL_FALSE, depth)
    return TailVerdict(Status.EMPIRICAL_TRUE, depth)
