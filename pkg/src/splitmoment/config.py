"""Run configuration: one declarative JSON file plus command-line overrides."""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .arith import is_squarefree
from .errors import DomainError
from .lcentral import ENGINES
from .specfun import WeightSpec

__all__ = ["RunConfig", "load_config", "default_cache_path", "CACHE_ENV"]

CACHE_ENV = "SPLITMOMENT_CACHE_DIR"


@dataclass(frozen=True)
class RunConfig:
    field_d: int = 5
    Q_ladder: tuple[float, ...] = (1e3, 1e4, 1e5)
    X: int = 100_000
    weight: dict = field(default_factory=lambda: WeightSpec().to_dict())
    engine: str = "afe"
    eps_tail: float = 1e-12
    threshold: float = 1e-6
    prime_cutoff: int = 100_000
    k_max: int = 40
    d_max: int = 1000
    l_norm_max: int = 1000
    m_max: int = 10_000
    cache_path: str | None = None
    output_path: str = "out"
    worker_count: int = 1

    def __post_init__(self):
        if self.field_d in (0, 1) or not is_squarefree(self.field_d):
            raise DomainError(f"field_d={self.field_d} must be squarefree and not 0 or 1")
        if not self.Q_ladder or any(q <= 0 for q in self.Q_ladder):
            raise DomainError("Q values must be positive")
        if self.engine not in ENGINES:
            raise DomainError(f"engine must be one of {ENGINES}")
        if not 1e-14 < self.eps_tail < 1e-2:
            raise DomainError("eps_tail must lie in (1e-14, 1e-2)")
        if self.prime_cutoff < 1000:
            raise DomainError("prime_cutoff must be >= 1000")
        if self.worker_count < 1:
            raise DomainError("worker_count must be >= 1")
        if self.X < 1:
            raise DomainError("X must be positive")
        WeightSpec(**self.weight)
        object.__setattr__(self, "Q_ladder", tuple(float(q) for q in self.Q_ladder))

    def weight_spec(self) -> WeightSpec:
        return WeightSpec(**self.weight)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["Q_ladder"] = list(self.Q_ladder)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "Q_ladder" in data:
            data["Q_ladder"] = tuple(data["Q_ladder"])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return RunConfig.from_dict(json.load(fh))


def default_cache_path(cfg: RunConfig) -> Path:
    if cfg.cache_path:
        return Path(cfg.cache_path)
    base = Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "splitmoment"))
    return base / f"lcache_d{cfg.field_d}_{cfg.engine}_{cfg.eps_tail!r}.csv"
