"""Finite windows onto countably infinite constructions."""

from __future__ import annotations

from dataclasses import dataclass


class BudgetExceededError(RuntimeError):
    """A construction grew past its configured node or vertex cap."""


@dataclass(frozen=True)
class TruncationSpec:
    """How much of an infinite object to materialize.

    fan_width: explicit members kept per countable fan (>= 2);
    limit_width: summands kept per limit stage (>= 1);
    depth_budget: optional cap on recursion depth (None = unbounded).
    Truncation never drops any node of a fully finite construction.
    """

    fan_width: int = 3
    limit_width: int = 3
    depth_budget: int | None = None

    def __post_init__(self):
        if self.fan_width < 2:
            raise ValueError("fan_width must be at least 2")
        if self.limit_width < 1:
            raise ValueError("limit_width must be at least 1")
        if self.depth_budget is not None and self.depth_budget < 0:
            raise ValueError("depth_budget must be nonnegative")

    def to_dict(self) -> dict:
        d = {"fan_width": self.fan_width, "limit_width": self.limit_width}
        if self.depth_budget is not None:
            d["depth_budget"] = self.depth_budget
        return d

    @staticmethod
    def from_dict(d: dict) -> "TruncationSpec":
        return TruncationSpec(
            fan_width=d.get("fan_width", 3),
            limit_width=d.get("limit_width", 3),
            depth_budget=d.get("depth_budget"),
        )


DEFAULT_TRUNC = TruncationSpec()
