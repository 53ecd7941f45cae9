"""Violation reporting shared by the structural verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    """One failed check instance.

    kind: short machine-readable tag (e.g. "associativity", "left-invariance")
    where: the indices involved (morphisms, objects, transformations)
    message: human-readable description
    magnitude: numeric defect, when the check compares values
    """

    kind: str
    where: tuple
    message: str
    magnitude: float | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "where": list(self.where), "message": self.message}
        if self.magnitude is not None:
            d["magnitude"] = float(self.magnitude)
        return d


@dataclass
class ViolationReport:
    """Outcome of an exhaustive check: empty `violations` means the check passed."""

    checks: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, where: tuple, message: str, magnitude=None) -> None:
        if magnitude is not None:
            magnitude = float(magnitude)
        self.violations.append(Violation(kind, where, message, magnitude))

    def to_dict(self) -> dict:
        return {
            "checks": self.checks,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
        }

    def __str__(self) -> str:
        head = f"{len(self.violations)} violations / {self.checks} checks"
        if self.ok:
            return head
        lines = [head]
        for v in self.violations[:10]:
            lines.append(f"  [{v.kind}] {v.message}")
        if len(self.violations) > 10:
            lines.append(f"  ... and {len(self.violations) - 10} more")
        return "\n".join(lines)
