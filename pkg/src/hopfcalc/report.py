"""Check reports: per-identity pass/fail entries with optional witnesses."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
WINDOWED = "window-verified"
SAMPLED = "sampled"

_STATUSES = {PASS, FAIL, WINDOWED, SAMPLED}


@dataclass
class Check:
    identity: str
    status: str
    witness: str | None = None

    def as_dict(self):
        return {"identity": self.identity, "status": self.status, "witness": self.witness}


@dataclass
class CheckReport:
    example: str = ""
    suite: str = ""
    checks: list[Check] = field(default_factory=list)

    def add(self, identity: str, status: str, witness: str | None = None) -> Check:
        if status not in _STATUSES:
            raise ValueError(f"unknown status {status!r}")
        check = Check(identity, status, witness)
        self.checks.append(check)
        return check

    def record(self, identity: str, ok: bool, witness: str | None = None, windowed: bool = False, sampled: bool = False):
        if not ok:
            return self.add(identity, FAIL, witness)
        if sampled:
            return self.add(identity, SAMPLED, witness)
        return self.add(identity, WINDOWED if windowed else PASS, witness)

    def sweep(self, identity: str, items, test, windowed: bool = False, sampled: bool = False):
        """Run test over items; first failure becomes the witness."""
        for item in items:
            ok, witness = test(item)
            if not ok:
                return self.add(identity, FAIL, witness)
        return self.record(identity, True, windowed=windowed, sampled=sampled)

    def extend(self, other: "CheckReport", prefix: str = ""):
        for check in other.checks:
            name = f"{prefix}{check.identity}" if prefix else check.identity
            self.checks.append(Check(name, check.status, check.witness))

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failed

    def get(self, identity: str) -> Check:
        for c in self.checks:
            if c.identity == identity:
                return c
        raise KeyError(identity)

    def as_dict(self):
        return {
            "example": self.example,
            "suite": self.suite,
            "checks": [c.as_dict() for c in self.checks],
        }

    def summary(self) -> dict:
        out = {}
        for c in self.checks:
            out[c.status] = out.get(c.status, 0) + 1
        return out


def render_json(payload: dict) -> str:
    """Canonical JSON: sorted keys, tight separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
