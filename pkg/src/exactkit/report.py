"""Structured pass/fail reports carrying minimal witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    label: str
    failures: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def count(self, n: int = 1) -> None:
        self.checked += n

    def fail(self, kind: str, **witness) -> None:
        self.failures.append({"kind": kind, **witness})

    def merge(self, other: "CheckReport") -> None:
        self.failures.extend(other.failures)
        self.checked += other.checked

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "ok": self.ok,
            "checked": self.checked,
            "failures": self.failures[:20],
            "failure_count": len(self.failures),
        }
