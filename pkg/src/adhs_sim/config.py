"""Simulation config: YAML/JSON files layered over presets, with ``key=value`` overrides.

Layering order (later wins): built-in defaults, preset, config file, overrides.
Override keys are either dotted paths (``adhs.t_threshold``) or a leaf name
that is unique across sections (``t_threshold``).
"""

from __future__ import annotations

import copy
import json
import math
import os
import re
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from adhs_sim.adhs import AdhsParams
from adhs_sim.energy import EnergyParams

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


DEFAULTS: Dict[str, Any] = {
    "schema_version": SCHEMA_VERSION,
    "preset": None,
    "rounds": 100,
    "seed": 0,
    "battery_j": math.inf,
    "deployment": {
        "kind": "uniform",
        "n": 50,
        "area": 100.0,
        "rows": None,
        "cols": None,
        "spacing": None,
        "positions": None,
        "bs_position": None,
    },
    "hierarchy": {"k": 4, "comm_range": 30.0},
    "adhs": {
        "t_threshold": None,
        "l_limit": None,
        "literal_mode": False,
        "quiet_transmit": "stale",
        "variance_kind": "population",
    },
    "energy": {
        "e_elec": 5e-8,
        "e_p": 5e-9,
        "eps_fs": 1e-10,
        "alpha": 1.0,
        "bits_per_message": 1.0,
    },
    "field": {
        "default_value": 0.0,
        "regions": [],
        "random_regions": 0,
        "random_values": [10.0, 20.0, 30.0],
    },
}

SECTIONS = [k for k, v in DEFAULTS.items() if isinstance(v, dict)]


def _leaf_index() -> Dict[str, List[str]]:
    index: Dict[str, List[str]] = {}
    for key, val in DEFAULTS.items():
        if isinstance(val, dict):
            for leaf in val:
                index.setdefault(leaf, []).append(f"{key}.{leaf}")
        else:
            index.setdefault(key, []).append(key)
    return index


LEAVES = _leaf_index()


@dataclass(frozen=True)
class Deployment:
    kind: str
    n: Optional[int]
    area: float
    rows: Optional[int]
    cols: Optional[int]
    spacing: Optional[float]
    positions: Optional[Tuple[Tuple[float, float], ...]]
    bs_position: Optional[Tuple[float, float]]


@dataclass(frozen=True)
class HierarchyParams:
    k: int
    comm_range: float


@dataclass(frozen=True)
class FieldSpec:
    default_value: float
    regions: Tuple[dict, ...]
    random_regions: int
    random_values: Tuple[float, ...]


@dataclass(frozen=True)
class SimConfig:
    schema_version: int
    preset: Optional[str]
    rounds: int
    seed: int
    battery_j: float
    deployment: Deployment
    hierarchy: HierarchyParams
    adhs: AdhsParams
    energy: EnergyParams
    field: FieldSpec
    raw: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        """Fully resolved config, suitable for a manifest (preset already applied)."""
        d = _finite(copy.deepcopy(self.raw))
        d["preset"] = None
        d["resolved_from_preset"] = self.preset
        return d


def _finite(obj):
    """Replace infinities by the string "inf" so the dict serialises to strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


ALIASES = {"T": "adhs.t_threshold", "L": "adhs.l_limit"}


def resolve_key(key: str) -> Tuple[str, ...]:
    key = ALIASES.get(key, key)
    if "." in key:
        parts = tuple(key.split("."))
        if len(parts) != 2 or parts[0] not in SECTIONS or parts[1] not in DEFAULTS[parts[0]]:
            raise ConfigError(f"unknown config key '{key}'")
        return parts
    paths = LEAVES.get(key)
    if not paths:
        raise ConfigError(f"unknown config key '{key}'")
    if len(paths) > 1:
        raise ConfigError(f"ambiguous config key '{key}': use one of {', '.join(paths)}")
    return tuple(paths[0].split("."))


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot (``5e-08``)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def _yaml(text):
    return yaml.load(text, Loader=_Loader)


def parse_value(text: str) -> Any:
    try:
        val = _yaml(text)
    except yaml.YAMLError:
        return text
    if isinstance(val, str):
        low = val.strip().lower()
        if low in ("inf", "+inf", "infinity"):
            return math.inf
        try:
            return float(val)
        except ValueError:
            return val
    return val


def _merge(base: Dict[str, Any], layer: Dict[str, Any], where: str):
    for key, val in layer.items():
        if key == "resolved_from_preset":
            continue
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key '{key}' in {where}")
        if isinstance(DEFAULTS[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key '{key}' in {where} must be a mapping")
            for sub, subval in val.items():
                if sub not in DEFAULTS[key]:
                    raise ConfigError(f"unknown config key '{key}.{sub}' in {where}")
                base[key][sub] = copy.deepcopy(subval)
        else:
            base[key] = copy.deepcopy(val)


def _read_file(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            text = fh.read()
        data = json.loads(text) if path.endswith(".json") else _yaml(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping at top level")
    return data


def _as_float(x):
    if isinstance(x, str) and x.strip().lower() in ("inf", "+inf", ".inf", "infinity"):
        return math.inf
    return float(x)


def _build(raw: Dict[str, Any]) -> SimConfig:
    def need(path):
        sec, key = path.split(".")
        if raw[sec][key] is None:
            raise ConfigError(f"missing required config key '{path}'")
        return raw[sec][key]

    def check(ok, path, msg):
        if not ok:
            raise ConfigError(f"invalid value for '{path}': {msg}")

    try:
        if raw["schema_version"] != SCHEMA_VERSION:
            raise ConfigError(f"invalid value for 'schema_version': expected {SCHEMA_VERSION}, got {raw['schema_version']}")
        rounds = int(raw["rounds"])
        check(rounds >= 1, "rounds", f"must be >= 1, got {rounds}")
        battery = _as_float(raw["battery_j"])
        check(battery > 0, "battery_j", f"must be > 0 or inf, got {battery}")

        d = raw["deployment"]
        kind = d["kind"]
        check(kind in ("uniform", "grid", "explicit"), "deployment.kind", f"unknown kind {kind!r}")
        if kind == "uniform":
            check(d["n"] is not None and int(d["n"]) >= 2, "deployment.n", f"must be >= 2, got {d['n']}")
            check(float(d["area"]) > 0, "deployment.area", f"must be > 0, got {d['area']}")
        elif kind == "grid":
            for key in ("rows", "cols"):
                check(d[key] is not None and int(d[key]) >= 1, f"deployment.{key}", f"must be >= 1, got {d[key]}")
            check(d["spacing"] is not None and float(d["spacing"]) > 0, "deployment.spacing", "must be > 0")
            check(int(d["rows"]) * int(d["cols"]) >= 2, "deployment.rows", "grid needs at least 2 nodes")
        else:
            check(d["positions"] is not None and len(d["positions"]) >= 2, "deployment.positions", "need >= 2 positions")
        deployment = Deployment(
            kind,
            None if d["n"] is None else int(d["n"]),
            float(d["area"]),
            None if d["rows"] is None else int(d["rows"]),
            None if d["cols"] is None else int(d["cols"]),
            None if d["spacing"] is None else float(d["spacing"]),
            None if d["positions"] is None else tuple((float(x), float(y)) for x, y in d["positions"]),
            None if d["bs_position"] is None else tuple(float(v) for v in d["bs_position"]),
        )

        h = raw["hierarchy"]
        check(int(h["k"]) >= 1, "hierarchy.k", f"must be >= 1, got {h['k']}")
        check(float(h["comm_range"]) > 0, "hierarchy.comm_range", f"must be > 0, got {h['comm_range']}")
        hierarchy = HierarchyParams(int(h["k"]), float(h["comm_range"]))

        a = raw["adhs"]
        t = _as_float(need("adhs.t_threshold"))
        check(t >= 0, "adhs.t_threshold", f"must be >= 0, got {t}")
        lim = _as_float(need("adhs.l_limit"))
        check(lim >= 1 and (lim == math.inf or lim == int(lim)), "adhs.l_limit", f"must be an integer >= 1 or inf, got {lim}")
        check(a["quiet_transmit"] in ("stale", "suppress"), "adhs.quiet_transmit", f"got {a['quiet_transmit']!r}")
        check(a["variance_kind"] in ("population", "sample"), "adhs.variance_kind", f"got {a['variance_kind']!r}")
        adhs = AdhsParams(t, lim if lim == math.inf else int(lim), bool(a["literal_mode"]), a["quiet_transmit"], a["variance_kind"])

        e = raw["energy"]
        vals = {key: float(e[key]) for key in DEFAULTS["energy"]}
        for key, val in vals.items():
            check(val > 0, f"energy.{key}", f"must be > 0, got {val}")
        check(vals["alpha"] <= 1, "energy.alpha", f"must be in (0, 1], got {vals['alpha']}")
        energy = EnergyParams(**vals)

        f = raw["field"]
        check(int(f["random_regions"]) >= 0, "field.random_regions", "must be >= 0")
        fspec = FieldSpec(
            float(f["default_value"]),
            tuple(f["regions"] or ()),
            int(f["random_regions"]),
            tuple(float(v) for v in f["random_values"]),
        )
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid config: {exc}") from None

    return SimConfig(
        SCHEMA_VERSION, raw.get("preset"), rounds, int(raw["seed"]), battery,
        deployment, hierarchy, adhs, energy, fspec, raw,
    )


def load_config(
    path: Optional[str] = None,
    overrides: Sequence[str] = (),
    preset: Optional[str] = None,
    seed: Optional[int] = None,
) -> SimConfig:
    """Resolve a SimConfig from a file (optional), a preset and ``key=value`` overrides."""
    from adhs_sim.scenarios import PRESETS

    file_data = _read_file(path) if path else {}
    parsed = []
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, text = item.split("=", 1)
        parsed.append((resolve_key(key.strip()), parse_value(text.strip())))

    chosen = preset or file_data.get("preset")
    for parts, val in parsed:
        if parts == ("preset",):
            chosen = val

    raw = copy.deepcopy(DEFAULTS)
    if chosen is not None:
        if chosen not in PRESETS:
            raise ConfigError(f"invalid value for 'preset': unknown preset {chosen!r} (known: {', '.join(sorted(PRESETS))})")
        _merge(raw, PRESETS[chosen], f"preset {chosen}")
    _merge(raw, file_data, path or "config")
    for parts, val in parsed:
        if len(parts) == 1:
            raw[parts[0]] = val
        else:
            raw[parts[0]][parts[1]] = val
    if seed is not None:
        raw["seed"] = seed
    raw["preset"] = chosen
    cfg = _build(raw)
    if chosen is None and file_data.get("resolved_from_preset"):
        # a manifest: the preset is already folded in, keep it only as a label
        cfg = replace(cfg, preset=file_data["resolved_from_preset"])
    return cfg


def config_from_dict(data: Dict[str, Any], preset: Optional[str] = None) -> SimConfig:
    """Like load_config, from an in-memory mapping."""
    from adhs_sim.scenarios import PRESETS

    chosen = preset or data.get("preset")
    raw = copy.deepcopy(DEFAULTS)
    if chosen is not None:
        if chosen not in PRESETS:
            raise ConfigError(f"invalid value for 'preset': unknown preset {chosen!r}")
        _merge(raw, PRESETS[chosen], f"preset {chosen}")
    _merge(raw, data, "dict")
    raw["preset"] = chosen
    cfg = _build(raw)
    if chosen is None and data.get("resolved_from_preset"):
        # a manifest: the preset is already folded in, keep it only as a label
        cfg = replace(cfg, preset=data["resolved_from_preset"])
    return cfg
