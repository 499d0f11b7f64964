"""Uniform pass/fail certificate records for the hypothesis checks."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["Certificate", "all_passed", "failed_names"]


@dataclass(frozen=True)
class Certificate:
    """Outcome of one numeric hypothesis check.

    value is the measured quantity, bound the threshold it must not
    exceed, so margin = bound - value is nonnegative exactly when the
    check passes.  details carries witnesses and auxiliary constants.
    """

    name: str
    passed: bool
    value: float
    bound: float
    description: str = ""
    details: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.bound - self.value

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": float(self.value),
            "bound": float(self.bound),
            "margin": float(self.margin),
            "description": self.description,
            "details": dict(self.details),
        }


def all_passed(certificates) -> bool:
    return all(c.passed for c in certificates)


def failed_names(certificates) -> list:
    return [c.name for c in certificates if not c.passed]
