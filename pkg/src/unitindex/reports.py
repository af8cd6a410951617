"""Containers for randomized verification suites."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckItem:
    name: str
    max_residual: float
    passed: bool
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "max_residual": self.max_residual, "pass": self.passed, "witness": self.witness}


@dataclass
class SuiteReport:
    items: dict[str, CheckItem] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items.values())

    def __getitem__(self, key: str) -> CheckItem:
        return self.items[key]

    def record(self, key: str, residual: float, tol: float, witness=None):
        it = self.items.get(key)
        if it is None:
            it = self.items[key] = CheckItem(key, 0.0, True)
        if residual > it.max_residual:
            it.max_residual = float(residual)
            if residual > tol:
                it.witness = witness
        it.passed = it.max_residual <= tol

    def to_dict(self) -> dict:
        return {"pass": self.passed, "items": [it.to_dict() for it in self.items.values()]}
