"""Pipeline configuration: TOML sections mirroring each stage's parameters.

Seed priority, highest first: --seed flag, config file, A2Z_SEED
environment variable, then 0.
"""

from __future__ import annotations

import os

try:
    import tomllib
except ModuleNotFoundError:            # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, fields

from .annotate import SphConfig
from .errors import ConfigError
from .scan import ScanParams
from .sketch import SketchConfig, LineJitterParams, ArcJitterParams

ENV_SEED = "A2Z_SEED"


@dataclass
class EvalParams:
    dihedral_threshold_deg: float = 30.0
    semivariogram_bins: int = 20
    pair_cap: int = 2000
    n_centroids: int = 8
    tolerance: float | None = None


@dataclass
class PipelineConfig:
    global_seed: int | None = None
    workers: int = 1
    out_dir: str = "out"
    ply_format: str = "ply-binary"
    sketch_skill: int = 3
    annot_pitch_divisor: float = 40.0
    scan: ScanParams = field(default_factory=ScanParams)
    annot: SphConfig = field(default_factory=SphConfig)
    sketch: SketchConfig = field(default_factory=SketchConfig)
    eval: EvalParams = field(default_factory=EvalParams)

    def resolved_seed(self, flag_seed: int | None = None) -> int:
        if flag_seed is not None:
            return flag_seed
        if self.global_seed is not None:
            return self.global_seed
        env = os.environ.get(ENV_SEED)
        if env is not None:
            try:
                return int(env)
            except ValueError:
                raise ConfigError(f"{ENV_SEED} must be an integer, got {env!r}")
        return 0

    def validate(self) -> None:
        if self.ply_format not in ("ply-binary", "ply-ascii"):
            raise ConfigError(f"unknown format {self.ply_format!r}")
        if not 1 <= self.sketch_skill <= 5:
            raise ConfigError("sketch_skill must be in 1..5")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.annot.validate()


def _fill_dataclass(cls, data: dict, where: str):
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in [{where}]")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    return cls(**kwargs)


_SECTION_TYPES = {
    "scan": ScanParams,
    "annot": SphConfig,
    "eval": EvalParams,
}


def config_from_dict(doc: dict) -> PipelineConfig:
    cfg = PipelineConfig()
    for key, value in doc.items():
        if key in _SECTION_TYPES:
            setattr(cfg, key, _fill_dataclass(_SECTION_TYPES[key], value, key))
        elif key == "sketch":
            sk = dict(value)
            line = sk.pop("line", None)
            arc = sk.pop("arc", None)
            sketch = _fill_dataclass(SketchConfig, sk, "sketch")
            if line is not None:
                sketch.line = _fill_dataclass(LineJitterParams, line, "sketch.line")
            if arc is not None:
                sketch.arc = _fill_dataclass(ArcJitterParams, arc, "sketch.arc")
            cfg.sketch = sketch
        elif hasattr(cfg, key) and key not in ("scan", "annot", "sketch", "eval"):
            setattr(cfg, key, value)
        else:
            raise ConfigError(f"unknown top-level config key {key!r}")
    cfg.validate()
    return cfg


def load_config(path) -> PipelineConfig:
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad config {path}: {exc}") from exc
    return config_from_dict(doc)
