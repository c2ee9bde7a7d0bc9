"""Job configuration and versioned JSON serialization.

Series files carry a tower reference (enough to rebuild the tower), the
ring level, the degree cap, coordinates and per-coefficient precision.
Reading a file rebuilds the tower through a small cache so that series read
from the same reference share rings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from .errors import SerializationError, TowerError
from .localring import TowerSpec, tower_build
from .series import BiSeries, FracSeries, Series

FORMAT_VERSION = 1

PRESETS = {
    "C1": {"p": 3, "g_L": None, "g_K": None},
    "C3": {"p": 3, "g_L": [-3, 0, 1], "g_K": [[0, -1], 0, 1]},
}


class ConfigError(SerializationError):
    """Schema violation in a job configuration; ``path`` names the key."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def working_precision(D: int, N: int, q: int, slack: int = 0) -> int:
    """Internal precision W for output precision N at degree D.

    De-substitution through [pi_K] costs one unit per degree and the
    torsion-algebra root sums cost D/(q - 1) more.
    """
    return N + D + math.ceil(D / (q - 1)) + slack


# ------------------------------------------------------------------ towers
@dataclass(frozen=True)
class TowerRef:
    """Serializable description of a tower."""

    p: int
    g_L: Any = None
    g_K: Any = None
    prec: int = 64

    def key(self):
        return json.dumps([self.p, self.g_L, self.g_K, self.prec])

    def to_dict(self):
        return {"p": self.p, "g_L": self.g_L, "g_K": self.g_K, "prec": self.prec}


_TOWERS: Dict[str, TowerSpec] = {}


def build_tower(ref: TowerRef) -> TowerSpec:
    k = ref.key()
    t = _TOWERS.get(k)
    if t is None:
        t = tower_build(ref.p, ref.g_L, ref.g_K, default_prec=ref.prec)
        t.extra["ref"] = ref
        _TOWERS[k] = t
    return t


def tower_ref_of(tower: TowerSpec) -> TowerRef:
    ref = tower.extra.get("ref")
    if ref is None:
        ref = TowerRef(tower.p, tower.g_L, tower.g_K, tower.prec)
        tower.extra["ref"] = ref
        _TOWERS.setdefault(ref.key(), tower)
    return ref


# ------------------------------------------------------------------ config
_TOP_KEYS = {"tower", "D", "N", "prec", "command", "inputs", "output", "seed",
             "alpha"}
_TOWER_KEYS = {"preset", "p", "g_L", "g_K"}


@dataclass
class JobConfig:
    tower: TowerRef
    D: int = 32
    N: int = 16
    command: List[str] = field(default_factory=list)
    inputs: List[str] = field(default_factory=list)
    output: Optional[str] = None
    seed: int = 0
    alpha: Optional[str] = None

    def build_tower(self) -> TowerSpec:
        return build_tower(self.tower)

    @property
    def e_KL(self) -> int:
        return self.build_tower().e_KL


def _posint(v, path, allow_zero=False):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError("expected an integer", path)
    if v < 0 or (v == 0 and not allow_zero):
        raise ConfigError(f"must be {'non-negative' if allow_zero else 'positive'}",
                          path)
    return v


def _tower_from(obj, path="tower") -> dict:
    if isinstance(obj, str):
        if obj not in PRESETS:
            raise ConfigError(f"unknown preset {obj!r}", path)
        return dict(PRESETS[obj])
    if not isinstance(obj, dict):
        raise ConfigError("expected a mapping or preset name", path)
    unknown = set(obj) - _TOWER_KEYS
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r}", path)
    base = dict(PRESETS[obj["preset"]]) if "preset" in obj else {}
    if "preset" in obj and obj["preset"] not in PRESETS:
        raise ConfigError(f"unknown preset {obj['preset']!r}", f"{path}.preset")
    for k in ("p", "g_L", "g_K"):
        if k in obj:
            base[k] = obj[k]
    if "p" not in base:
        raise ConfigError("missing key 'p'", path)
    _posint(base["p"], f"{path}.p")
    return base


def parse_config(text: str) -> JobConfig:
    """Parse YAML or JSON text into a validated JobConfig."""
    try:
        obj = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    if obj is None:
        obj = {}
    if not isinstance(obj, dict):
        raise ConfigError("top level must be a mapping")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r}",
                          sorted(unknown)[0])
    D = _posint(obj.get("D", 32), "D")
    N = _posint(obj.get("N", 16), "N")
    tw = _tower_from(obj.get("tower", "C1"))
    try:
        trial = tower_build(tw["p"], tw.get("g_L"), tw.get("g_K"), default_prec=8)
    except TowerError as exc:
        raise ConfigError(str(exc), "tower") from None
    prec = obj.get("prec")
    if prec is None:
        prec = working_precision(D, N, trial.q_K)
    _posint(prec, "prec")
    cmd = obj.get("command", [])
    if isinstance(cmd, str):
        cmd = cmd.split()
    if not isinstance(cmd, list) or not all(isinstance(c, str) for c in cmd):
        raise ConfigError("expected a list of strings", "command")
    inputs = obj.get("inputs", [])
    if not isinstance(inputs, list) or not all(isinstance(c, str) for c in inputs):
        raise ConfigError("expected a list of paths", "inputs")
    out = obj.get("output")
    if out is not None and not isinstance(out, str):
        raise ConfigError("expected a path", "output")
    seed = _posint(obj.get("seed", 0), "seed", allow_zero=True)
    alpha = obj.get("alpha")
    if alpha is not None:
        alpha = str(alpha)
    ref = TowerRef(tw["p"], tw.get("g_L"), tw.get("g_K"), prec)
    try:
        build_tower(ref)
    except TowerError as exc:
        raise ConfigError(str(exc), "tower") from None
    return JobConfig(ref, D, N, cmd, inputs, out, seed, alpha)


# ----------------------------------------------------------- serialization
def _level(tower: TowerSpec, ring) -> str:
    if ring is tower.O_K:
        return "K"
    if ring is tower.O_L:
        return "L"
    raise SerializationError("series ring is not a level of the tower")


def _coords_list(c):
    return [[int(x) for x in row] for row in np.asarray(c).reshape(-1, c.shape[-1])]


def series_to_dict(f: Series, tower: TowerSpec) -> dict:
    return {"version": FORMAT_VERSION, "type": "series",
            "tower-ref": tower_ref_of(tower).to_dict(),
            "level": _level(tower, f.ring), "D": int(f.D), "poly": bool(f.poly),
            "coeffs": _coords_list(f.c), "prec": [int(x) for x in f.p]}


def biseries_to_dict(F: BiSeries, tower: TowerSpec) -> dict:
    D = F.D
    terms = []
    for i in range(D + 1):
        for j in range(D + 1 - i):
            terms.append([i, j, [int(x) for x in F.c[i, j]], int(F.p[i, j])])
    return {"version": FORMAT_VERSION, "type": "biseries",
            "tower-ref": tower_ref_of(tower).to_dict(),
            "level": _level(tower, F.ring), "D": int(D), "poly": bool(F.poly),
            "terms": terms}


def serialize(obj, tower: Optional[TowerSpec] = None) -> str:
    """Canonical JSON text for a Series, BiSeries, report or list of series."""
    return json.dumps(to_doc(obj, tower), sort_keys=True, indent=1) + "\n"


def to_doc(obj, tower: Optional[TowerSpec] = None):
    from .eigen import MembershipReport
    if isinstance(obj, Series):
        return series_to_dict(obj, tower)
    if isinstance(obj, BiSeries):
        return biseries_to_dict(obj, tower)
    if isinstance(obj, FracSeries):
        return {"version": FORMAT_VERSION, "type": "fracseries",
                "shift": int(obj.shift), "num": series_to_dict(obj.num, tower)}
    if isinstance(obj, MembershipReport):
        d = obj.to_dict()
        d.update({"version": FORMAT_VERSION, "type": "report"})
        return d
    if isinstance(obj, (list, tuple)):
        return {"version": FORMAT_VERSION, "type": "list",
                "items": [to_doc(x, tower) for x in obj]}
    raise SerializationError(f"cannot serialize {type(obj).__name__}")


def result_doc(result, meta: dict, tower: Optional[TowerSpec] = None) -> dict:
    """Envelope holding a command's output object and its metadata block."""
    doc = {"version": FORMAT_VERSION, "type": "result", "meta": meta}
    if result is not None:
        doc["result"] = to_doc(result, tower)
    return doc


def _need(d, key, typ, path):
    if key not in d:
        raise SerializationError(f"{path}: missing field {key!r}")
    v = d[key]
    if not isinstance(v, typ) or isinstance(v, bool) and typ is not bool:
        raise SerializationError(f"{path}.{key}: wrong type")
    return v


def from_doc(d, path="$"):
    from .eigen import MembershipReport
    if not isinstance(d, dict):
        raise SerializationError(f"{path}: expected an object")
    ver = d.get("version")
    if ver != FORMAT_VERSION:
        raise SerializationError(f"{path}: unsupported version {ver!r} "
                                 f"(expected {FORMAT_VERSION})")
    typ = _need(d, "type", str, path)
    if typ == "list":
        return [from_doc(x, f"{path}.items[{k}]")
                for k, x in enumerate(_need(d, "items", list, path))]
    if typ == "result":
        return from_doc(_need(d, "result", dict, path), f"{path}.result")
    if typ == "fracseries":
        num = from_doc(_need(d, "num", dict, path), f"{path}.num")
        if not isinstance(num, Series):
            raise SerializationError(f"{path}.num: expected a series")
        return FracSeries(num, _need(d, "shift", int, path))
    if typ == "report":
        return MembershipReport(_need(d, "verdict", str, path),
                                _need(d, "checked_precision", int, path),
                                _need(d, "checked_degree", int, path),
                                d.get("witness"), d.get("kind", ""),
                                d.get("detail", ""))
    tr = _need(d, "tower-ref", dict, path)
    try:
        ref = TowerRef(tr["p"], tr.get("g_L"), tr.get("g_K"), tr["prec"])
        tower = build_tower(ref)
    except (KeyError, TypeError, TowerError) as exc:
        raise SerializationError(f"{path}.tower-ref: {exc}") from None
    level = _need(d, "level", str, path)
    if level not in ("K", "L"):
        raise SerializationError(f"{path}.level: expected 'K' or 'L'")
    ring = tower.O_K if level == "K" else tower.O_L
    D = _need(d, "D", int, path)
    poly = bool(d.get("poly", False))
    try:
        if typ == "series":
            coeffs = _need(d, "coeffs", list, path)
            prec = _need(d, "prec", list, path)
            if len(coeffs) != D + 1 or len(prec) != D + 1:
                raise SerializationError(f"{path}.coeffs: length != D + 1")
            c = np.empty((D + 1, ring.n), dtype=object)
            for i, row in enumerate(coeffs):
                if len(row) != ring.n:
                    raise SerializationError(f"{path}.coeffs[{i}]: expected "
                                             f"{ring.n} coordinates")
                c[i] = [int(x) for x in row]
            p = np.array([int(x) for x in prec], dtype=np.int64)
            return Series(ring, c, p, poly=poly, canonical=False)
        if typ == "biseries":
            F = BiSeries.zero(ring, D)
            for t in _need(d, "terms", list, path):
                i, j, co, pr = t
                F.c[i, j] = [int(x) for x in co]
                F.p[i, j] = int(pr)
            F.c = ring.reduce(F.c, F.p)
            F.poly = poly
            return F
    except (ValueError, TypeError, IndexError) as exc:
        raise SerializationError(f"{path}: malformed data ({exc})") from None
    raise SerializationError(f"{path}.type: unknown type {typ!r}")


def deserialize(text: str):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"not valid JSON: line {exc.lineno} column "
                                 f"{exc.colno}: {exc.msg}") from None
    return from_doc(d)


def tower_of(obj) -> TowerSpec:
    """The tower a deserialized series lives in."""
    for t in _TOWERS.values():
        if obj.ring is t.O_K or obj.ring is t.O_L:
            return t
    raise SerializationError("object does not belong to a cached tower")


def read(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize(fh.read())


def write(path: str, obj, tower: Optional[TowerSpec] = None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj, tower))
