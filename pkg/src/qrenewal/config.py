"""JSON experiment configuration.

A config is a JSON object. Missing optional keys take the defaults below::

    {
      "channel":   {"kind": "x-ad", "gamma": 0.3},
      "generator": {"lambdas": [0.9, 0.9, 0.9]},
      "wtds": {"modified": [{"kind": "exp", "mu": 10}],
               "stationary": {"kind": "exp", "mu": 1}},
      "pair": [0, 1, 0],            # direction n of (+n, -n), {"plus":..,"minus":..}, or "optimize"
      "T": 5.0, "dt_out": 0.01, "N": 100000, "seed": 0,
      "delta": null, "max_jumps": 10000, "method": "auto",
      "variants": [{"label": "g0", "set": {"channel.gamma": 0.0}}],
      "sweep": {"axes": [{"param": "wtds.modified.0.mu", "values": [2, 4]}]},
      "dump_trajectories": 0
    }
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field

from .bloch import BlochVector, StatePair, channel_from_config
from .dephasing import generator_from_config
from .errors import ParameterError
from .trajectory import DEFAULT_MAX_JUMPS, RenewalModel
from .wtd import sequence_from_config

KNOWN_KEYS = {
    "channel", "generator", "wtds", "pair", "T", "dt_out", "N", "seed", "delta",
    "max_jumps", "method", "variants", "sweep", "dump_trajectories", "description",
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    model: RenewalModel
    pair: StatePair | None
    T: float
    dt_out: float | None
    N: int
    seed: int
    delta: float | None
    max_jumps: int
    method: str
    raw: dict = field(repr=False)

    @property
    def optimize(self) -> bool:
        return self.pair is None

    @property
    def hash(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _pair_from_spec(spec) -> StatePair | None:
    if spec == "optimize":
        return None
    if isinstance(spec, dict):
        try:
            return StatePair(BlochVector.from_array(spec["plus"]), BlochVector.from_array(spec["minus"]))
        except KeyError:
            raise ParameterError("explicit pair needs 'plus' and 'minus'") from None
    if isinstance(spec, (list, tuple)) and len(spec) == 3:
        return StatePair.antipodal(spec)
    raise ParameterError(f"pair must be a direction [x, y, z], {{'plus','minus'}} or 'optimize', got {spec!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ParameterError("config must be a JSON object")
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    for key in ("channel", "wtds"):
        if key not in raw:
            raise ParameterError(f"config is missing required key {key!r}")
    model = RenewalModel(
        channel_from_config(raw["channel"]),
        generator_from_config(raw.get("generator")),
        sequence_from_config(raw["wtds"]),
    )
    N = int(raw.get("N", 100_000))
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    delta = raw.get("delta")
    if delta is not None and not float(delta) > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    method = raw.get("method", "auto")
    if method not in ("auto", "mc", "analytic"):
        raise ParameterError(f"method must be auto, mc or analytic, got {method!r}")
    return ExperimentConfig(
        model=model,
        pair=_pair_from_spec(raw.get("pair", [0, 1, 0])),
        T=float(raw.get("T", 3.0)),
        dt_out=None if raw.get("dt_out") is None else float(raw["dt_out"]),
        N=N,
        seed=int(raw.get("seed", 0)),
        delta=None if delta is None else float(delta),
        max_jumps=int(raw.get("max_jumps", DEFAULT_MAX_JUMPS)),
        method=method,
        raw=raw,
    )


def set_path(raw: dict, path: str, value) -> dict:
    """Copy of ``raw`` with the dotted ``path`` (list indices as integers) set to ``value``."""
    out = copy.deepcopy(raw)
    keys = path.split(".")
    node = out
    try:
        for k in keys[:-1]:
            node = node[int(k)] if isinstance(node, list) else node[k]
        last = keys[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    except (KeyError, IndexError, ValueError, TypeError):
        raise ParameterError(f"config path {path!r} does not exist") from None
    return out


def variants(raw: dict) -> list[tuple[str, dict]]:
    """``(label, raw config)`` for each entry of ``variants``, or the config itself."""
    base = {k: v for k, v in raw.items() if k != "variants"}
    specs = raw.get("variants")
    if not specs:
        return [("main", base)]
    out = []
    for i, spec in enumerate(specs):
        label = str(spec.get("label", f"v{i}"))
        cfg = base
        for path, value in spec.get("set", {}).items():
            cfg = set_path(cfg, path, value)
        out.append((label, cfg))
    return out


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc.strerror}") from None
