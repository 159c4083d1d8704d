"""Experiment configuration: JSON in, validated objects out.

Configs carry the map family, sampling weights, and the parameters of the
zoom and gallery experiments. Rational values may be written as ratio
strings ("1/10"), decimal strings ("0.1"), or plain numbers; weights are
kept exact. The parsed JSON dict is retained verbatim so manifests can hash
exactly what the user supplied.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import ValidationError
from .ifs import SelfAffineSystem, as_fraction
from .measure import ProbVector


@dataclass(frozen=True)
class ZoomParams:
    t0: float = 0.1
    rho: Optional[float] = None
    count: int = 6
    K: int = 3
    grid: int = 512
    samples: int = 50
    seed: int = 0
    prefix_len: int = 64
    deviation_pass_fraction: float = 0.9


@dataclass(frozen=True)
class GalleryParams:
    t0: float = 0.1
    rho: Optional[float] = None
    count: int = 8
    grid: int = 512
    seeds: tuple[int, ...] = (1, 2)
    prefix_len: int = 10_000


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    system: SelfAffineSystem
    weights: ProbVector
    zoom: ZoomParams
    gallery: GalleryParams
    raw: dict

    def to_json(self) -> str:
        """Serialized form; parsing it again reproduces this config."""
        return json.dumps(self.raw, sort_keys=True, indent=2) + "\n"


def _as_float(value, default) -> float:
    if value is None:
        return default
    return float(as_fraction(value))


def _as_int(value, default, minimum, what) -> int:
    if value is None:
        return default
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"{what} must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(f"{what} must be at least {minimum}, got {value}")
    return value


def _opt_rho(value) -> Optional[float]:
    if value is None:
        return None
    rho = float(as_fraction(value))
    if not (0.0 < rho < 1.0):
        raise ValidationError(f"rho must be in (0, 1), got {value!r}")
    return rho


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    system = SelfAffineSystem.from_dict(data)
    name = data.get("name", "unnamed")
    if not isinstance(name, str):
        raise ValidationError(f"name must be a string, got {name!r}")

    raw_w = data.get("weights")
    if raw_w is None:
        weights = ProbVector.uniform(system.m)
    else:
        weights = ProbVector.of(raw_w)
        if len(weights) != system.m:
            raise ValidationError(
                f"got {len(weights)} weights for {system.m} maps"
            )

    z = data.get("zoom", {})
    if not isinstance(z, dict):
        raise ValidationError("zoom section must be an object")
    zoom = ZoomParams(
        t0=_as_float(z.get("t0"), 0.1),
        rho=_opt_rho(z.get("rho")),
        count=_as_int(z.get("count"), 6, 1, "zoom count"),
        K=_as_int(z.get("K"), 3, 0, "zoom K"),
        grid=_as_int(z.get("grid"), 512, 64, "zoom grid"),
        samples=_as_int(z.get("samples"), 50, 1, "zoom samples"),
        seed=_as_int(z.get("seed"), 0, 0, "zoom seed"),
        prefix_len=_as_int(z.get("prefix_len"), 64, 1, "zoom prefix_len"),
        deviation_pass_fraction=_as_float(z.get("deviation_pass_fraction"), 0.9),
    )

    g = data.get("gallery", {})
    if not isinstance(g, dict):
        raise ValidationError("gallery section must be an object")
    seeds = g.get("seeds", [1, 2])
    if (
        not isinstance(seeds, list)
        or not seeds
        or any(not isinstance(s, int) or isinstance(s, bool) or s < 0 for s in seeds)
    ):
        raise ValidationError("gallery seeds must be a nonempty list of ints >= 0")
    gallery = GalleryParams(
        t0=_as_float(g.get("t0"), 0.1),
        rho=_opt_rho(g.get("rho")),
        count=_as_int(g.get("count"), 8, 1, "gallery count"),
        grid=_as_int(g.get("grid"), 512, 64, "gallery grid"),
        seeds=tuple(seeds),
        prefix_len=_as_int(g.get("prefix_len"), 10_000, 1, "gallery prefix_len"),
    )
    return ExperimentConfig(
        name=name, system=system, weights=weights, zoom=zoom, gallery=gallery, raw=data
    )


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def builtin_config(name: str = "e6") -> ExperimentConfig:
    """Load a packaged reference configuration by name."""
    ref = resources.files("tangentlab").joinpath(f"fixtures/{name}.json")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ValidationError(f"no builtin config named {name!r}") from exc
    return config_from_dict(json.loads(text))


def config_digest(cfg: ExperimentConfig) -> str:
    """Hash of the exact config content, for run manifests."""
    canon = json.dumps(cfg.raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
