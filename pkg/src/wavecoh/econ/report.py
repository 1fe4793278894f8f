"""Uniform result record for the econometric tests."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

REJECT = "reject"
FAIL_TO_REJECT = "fail_to_reject"


def _clean(value):
    if isinstance(value, float):
        return float(value)
    if hasattr(value, "item"):
        return value.item()
    return value


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # not a pytest class

    name: str
    statistic: float
    p_value: float | None = None
    critical_values: dict = field(default_factory=dict)
    lags: int = 0
    decision: str = FAIL_TO_REJECT
    level: float = 0.05
    nobs: int = 0
    notes: str = ""

    @property
    def rejected(self) -> bool:
        return self.decision == REJECT

    def as_dict(self) -> dict:
        d = asdict(self)
        d["statistic"] = _clean(self.statistic)
        d["p_value"] = None if self.p_value is None else _clean(self.p_value)
        d["critical_values"] = {k: _clean(v) for k, v in self.critical_values.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    def to_keyvalue(self) -> str:
        lines = []
        for key, value in self.as_dict().items():
            if key == "critical_values":
                for lvl, cv in value.items():
                    lines.append(f"critical_value[{lvl}]={cv!r}")
            else:
                lines.append(f"{key}={value!r}" if not isinstance(value, str) else f"{key}={value}")
        return "\n".join(lines) + "\n"


def level_key(level: float) -> str:
    return f"{100 * level:g}%"
