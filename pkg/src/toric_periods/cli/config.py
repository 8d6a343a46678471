"""Run configuration: defaults, JSON config files, command-line overrides."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..errors import DomainError
from ..quadratic import is_fundamental_discriminant

MODULE = "cli"


@dataclass
class RunConfig:
    command: str = "verify"
    level: int | None = None
    disc: int | None = None
    cond: int = 1
    char: str = "trivial"
    precision_bits: int = 128
    terms: int | None = None
    tolerance: float = 1e-4
    cache_dir: str | None = None
    degree4_afe: bool = False
    output: str | None = None
    format: str = "json"
    ramified: list[int] = field(default_factory=list)
    prime: int | None = None
    grid: bool = False
    kv_type: str | None = None
    n: int | None = None
    c: int | None = None
    deterministic: bool = False

    @property
    def digits(self) -> int:
        return max(15, int(self.precision_bits * math.log10(2)) - 10)

    def validate(self) -> None:
        if self.precision_bits < 64:
            raise DomainError("precision must be at least 64 bits", MODULE)
        if self.command == "verify":
            if self.level is None or self.disc is None:
                raise DomainError("verify needs --level and --disc", MODULE)
            if self.level < 1:
                raise DomainError("level must be positive", MODULE)
            if self.disc >= 0 or not is_fundamental_discriminant(self.disc):
                raise DomainError(f"{self.disc} is not a negative fundamental discriminant", MODULE)
            if self.cond < 1:
                raise DomainError("conductor must be positive", MODULE)
        if self.format not in ("json", "text"):
            raise DomainError("format must be json or text", MODULE)

    def to_json(self) -> dict:
        return asdict(self)


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Defaults, then the config file, then every override that is not None."""
    data: dict = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise DomainError(f"cannot read config {path}: {exc}", MODULE) from exc
        if not isinstance(data, dict):
            raise DomainError("config file must hold a JSON object", MODULE)
    names = {f.name for f in fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise DomainError(f"unknown config keys {sorted(unknown)}", MODULE)
    data.update({k: v for k, v in overrides.items() if v is not None and k in names})
    cfg = RunConfig(**data)
    cfg.validate()
    return cfg
