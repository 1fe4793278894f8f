"""Run configuration and its ``key = value`` text format.

One setting per line. Values are JSON literals (strings quoted, ``null``
for unset, lists in brackets); ``#`` starts a comment line. Unknown keys are
an error. Writing a config and reading it back gives an equal object.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError


# Where results go and whether images are drawn do not affect any value.
_PRESENTATION = ("output_dir", "render", "arrow_step")


@dataclass
class RunConfig:
    # inputs
    sunspots: str | None = None
    sunspots_format: str = "SIDC_sunspots"
    temp_global: str | None = None
    temp_north: str | None = None
    temp_south: str | None = None
    temp_format: str = "GISS_temperature"
    co2: str | None = None
    co2_format: str = "CDIAC_co2"
    inputs: list = field(default_factory=list)
    input_format: str = "generic_csv"
    fill: str = "none"
    # scale grid
    s0: float | None = None
    dj: float = 1 / 12
    max_period_monthly: float = 512.0
    max_period_annual: float = 64.0
    omega0: float = 6.0
    # smoothing and arrows
    time_factor: float = 1.0
    scale_width: float = 0.6
    arrow_threshold: float = 0.5
    arrow_step: int = 0
    # significance
    level: float = 0.05
    n_surrogates: int = 300
    seed: int = 0
    # CO2 correction
    correct: bool = False
    # Granger
    max_lag: int = 8
    p: int = 11
    band_period: float = 16.0
    n_bootstrap: int = 1000
    # output
    output_dir: str = "out"
    render: bool = True

    def __post_init__(self):
        if self.n_surrogates < 100:
            raise ConfigurationError("n_surrogates must be at least 100")
        if not 0 < self.level < 1:
            raise ConfigurationError("level must lie in (0, 1)")
        if self.fill not in ("none", "linear"):
            raise ConfigurationError(f"unknown fill mode {self.fill!r}")

    def to_text(self) -> str:
        lines = ["# wavecoh run configuration"]
        for f in dataclasses.fields(self):
            lines.append(f"{f.name} = {json.dumps(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"config line {lineno}: expected key = value")
            key, _, value = (part.strip() for part in line.partition("="))
            if key not in known:
                raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
            try:
                values[key] = json.loads(value)
            except json.JSONDecodeError:
                raise ConfigurationError(f"config line {lineno}: bad value {value!r}") from None
        return cls(**values)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    def digest(self) -> str:
        """Hash of every setting that can change a number in the outputs."""
        text = "\n".join(line for line in self.to_text().splitlines()
                         if line.split(" =")[0] not in _PRESENTATION)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def temperatures(self) -> dict:
        named = {"global": self.temp_global, "northern": self.temp_north,
                 "southern": self.temp_south}
        return {k: v for k, v in named.items() if v}
