"""Scenario configuration: TOML text to a validated ScenarioConfig.

Grammar (all polynomial coefficient lists are constant term first)::

    precision = 24            # optional, working p-adic digits
    degree_cap = 12           # optional, formal-group truncation degree
    seed = 0                  # optional, for sampled checks
    budget = 1000000          # optional, enumeration budget
    output = "report.json"    # optional
    tasks = ["ramification", "cohomology"]

    [tower]
    p = 2
    u = [0, 1]
    e_poly = [2, 2, 1]        # entries are ints or ω-coefficient lists
    hints = [{omega = [[0]], pi = [[-2], [-1]]}]   # optional

    [[laws]]
    kind = "units"            # units | additive | multiplicative | lubin-tate | elliptic
    [[laws]]
    kind = "lubin-tate"
    pi = 2
    f = [0, 2, 1]

    [levels]
    n = [1, 2, 3]
    truncation = 9            # optional upper level m of the quotients
    norm_truncation = 6       # optional m_K for norm images

    [curve]                   # required by elliptic tasks and elliptic laws without "a"
    a = [0, 0, 0, 1, 1]
    minimal = true
    component_order = 1

    [hazewinkel]
    samples = 100
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .errors import ParseError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

TASKS = (
    "ramification",
    "cohomology",
    "norm-levels",
    "invariant-levels",
    "formal-axioms",
    "hazewinkel",
    "unit-index",
    "elliptic-certificates",
)
LAW_KINDS = ("units", "additive", "multiplicative", "lubin-tate", "elliptic")

DEFAULT_PRECISION = 24
DEFAULT_DEGREE_CAP = 12
DEFAULT_NORM_TRUNCATION = 6
DEFAULT_BUDGET = 10**6


@dataclass
class TowerSpec:
    p: int
    u: list
    e_poly: list
    hints: list | None = None


@dataclass
class LawSpec:
    kind: str
    pi: int | None = None
    f: list | None = None
    a: list | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass
class CurveSpec:
    a: list
    minimal: bool = True
    component_order: int | None = None


@dataclass
class ScenarioConfig:
    tower: TowerSpec | None
    laws: list = field(default_factory=lambda: [LawSpec("units")])
    levels: list = field(default_factory=lambda: [1, 2, 3])
    tasks: list = field(default_factory=list)
    precision: int = DEFAULT_PRECISION
    degree_cap: int = DEFAULT_DEGREE_CAP
    truncation: int | None = None
    norm_truncation: int = DEFAULT_NORM_TRUNCATION
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    curve: CurveSpec | None = None
    hazewinkel_samples: int = 100
    output: str | None = None


def _check_keys(table: dict, allowed, where: str):
    for k in table:
        if k not in allowed:
            raise ParseError(f"unknown key {k!r}", location=f"{where}.{k}" if where else k)


def _int(v, where: str, positive: bool = False) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, got {v!r}", location=where)
    if positive and v < 1:
        raise ParseError(f"expected a positive integer, got {v}", location=where)
    return v


def _int_list(v, where: str) -> list:
    if not isinstance(v, list) or not v:
        raise ParseError("expected a non-empty integer list", location=where)
    return [_int(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _poly_entry_list(v, where: str) -> list:
    if not isinstance(v, list) or not v:
        raise ParseError("expected a non-empty coefficient list", location=where)
    out = []
    for i, x in enumerate(v):
        out.append(_int_list(x, f"{where}[{i}]") if isinstance(x, list) else _int(x, f"{where}[{i}]"))
    return out


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ParseError(f"missing required field {key!r}", location=f"{where}.{key}" if where else key)
    return table[key]


def _block_list(v, where: str) -> list:
    if not isinstance(v, list) or not v:
        raise ParseError("expected a list of ω-coefficient lists", location=where)
    return [_int_list(b, f"{where}[{j}]") if isinstance(b, list) else [_int(b, f"{where}[{j}]")] for j, b in enumerate(v)]


def _parse_tower(t, where="tower") -> TowerSpec:
    if not isinstance(t, dict):
        raise ParseError("expected a table", location=where)
    _check_keys(t, ("p", "u", "e_poly", "hints"), where)
    p = _int(_require(t, "p", where), f"{where}.p", positive=True)
    if p < 2:
        raise ParseError("p must be a prime", location=f"{where}.p")
    u = _int_list(_require(t, "u", where), f"{where}.u")
    e_poly = _poly_entry_list(_require(t, "e_poly", where), f"{where}.e_poly")
    hints = None
    if "hints" in t:
        if not isinstance(t["hints"], list):
            raise ParseError("expected a list of tables", location=f"{where}.hints")
        hints = []
        for i, h in enumerate(t["hints"]):
            hw = f"{where}.hints[{i}]"
            if not isinstance(h, dict):
                raise ParseError("expected a table", location=hw)
            _check_keys(h, ("omega", "pi"), hw)
            hints.append((_block_list(_require(h, "omega", hw), f"{hw}.omega"), _block_list(_require(h, "pi", hw), f"{hw}.pi")))
    return TowerSpec(p, u, e_poly, hints)


def _parse_law(d, where: str) -> LawSpec:
    if not isinstance(d, dict):
        raise ParseError("expected a table", location=where)
    _check_keys(d, ("kind", "pi", "f", "a"), where)
    kind = _require(d, "kind", where)
    if kind not in LAW_KINDS:
        raise ParseError(f"unknown law kind {kind!r}", location=f"{where}.kind")
    law = LawSpec(kind)
    if kind == "lubin-tate":
        law.pi = _int(_require(d, "pi", where), f"{where}.pi")
        law.f = _int_list(_require(d, "f", where), f"{where}.f")
    elif kind == "elliptic":
        if "a" in d:
            law.a = _int_list(d["a"], f"{where}.a")
            if len(law.a) != 5:
                raise ParseError("need [a1, a2, a3, a4, a6]", location=f"{where}.a")
    else:
        for k in ("pi", "f", "a"):
            if k in d:
                raise ParseError(f"key {k!r} does not apply to kind {kind!r}", location=f"{where}.{k}")
    return law


def validate_config(data: dict) -> ScenarioConfig:
    top = ("precision", "degree_cap", "seed", "budget", "output", "tasks", "tower", "laws", "levels", "curve", "hazewinkel")
    _check_keys(data, top, "")
    cfg = ScenarioConfig(tower=None)
    if "precision" in data:
        cfg.precision = _int(data["precision"], "precision", positive=True)
    if "degree_cap" in data:
        cfg.degree_cap = _int(data["degree_cap"], "degree_cap", positive=True)
    if "seed" in data:
        cfg.seed = _int(data["seed"], "seed")
    if "budget" in data:
        cfg.budget = _int(data["budget"], "budget", positive=True)
    if "output" in data:
        if not isinstance(data["output"], str):
            raise ParseError("expected a string", location="output")
        cfg.output = data["output"]
    tasks = data.get("tasks", [])
    if not isinstance(tasks, list):
        raise ParseError("expected a list of task names", location="tasks")
    for i, t in enumerate(tasks):
        if t not in TASKS:
            raise ParseError(f"unknown task {t!r}", location=f"tasks[{i}]")
    cfg.tasks = list(tasks)
    if "tower" in data:
        cfg.tower = _parse_tower(data["tower"])
    if "laws" in data:
        if not isinstance(data["laws"], list):
            raise ParseError("expected an array of tables", location="laws")
        cfg.laws = [_parse_law(d, f"laws[{i}]") for i, d in enumerate(data["laws"])]
    if "levels" in data:
        lv = data["levels"]
        if not isinstance(lv, dict):
            raise ParseError("expected a table", location="levels")
        _check_keys(lv, ("n", "truncation", "norm_truncation"), "levels")
        cfg.levels = _int_list(_require(lv, "n", "levels"), "levels.n")
        for i, n in enumerate(cfg.levels):
            if n < 1:
                raise ParseError("levels must be >= 1", location=f"levels.n[{i}]")
        if "truncation" in lv:
            cfg.truncation = _int(lv["truncation"], "levels.truncation", positive=True)
        if "norm_truncation" in lv:
            cfg.norm_truncation = _int(lv["norm_truncation"], "levels.norm_truncation", positive=True)
    if "curve" in data:
        c = data["curve"]
        if not isinstance(c, dict):
            raise ParseError("expected a table", location="curve")
        _check_keys(c, ("a", "minimal", "component_order"), "curve")
        a = _int_list(_require(c, "a", "curve"), "curve.a")
        if len(a) != 5:
            raise ParseError("need [a1, a2, a3, a4, a6]", location="curve.a")
        minimal = c.get("minimal", True)
        if not isinstance(minimal, bool):
            raise ParseError("expected a boolean", location="curve.minimal")
        co = c.get("component_order")
        if co is not None:
            co = _int(co, "curve.component_order", positive=True)
        cfg.curve = CurveSpec(a, minimal, co)
    if "hazewinkel" in data:
        hz = data["hazewinkel"]
        if not isinstance(hz, dict):
            raise ParseError("expected a table", location="hazewinkel")
        _check_keys(hz, ("samples",), "hazewinkel")
        if "samples" in hz:
            cfg.hazewinkel_samples = _int(hz["samples"], "hazewinkel.samples", positive=True)
    # cross-field requirements
    if cfg.tasks and cfg.tower is None:
        raise ParseError("tasks need a [tower] section", location="tower")
    for i, law in enumerate(cfg.laws):
        if law.kind == "elliptic" and law.a is None:
            if cfg.curve is None:
                raise ParseError("elliptic law needs 'a' or a [curve] section", location=f"laws[{i}].a")
            law.a = list(cfg.curve.a)
    if "elliptic-certificates" in cfg.tasks and cfg.curve is None:
        raise ParseError("elliptic-certificates task needs a [curve] section", location="curve")
    return cfg


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"malformed TOML: {exc}", location=str(exc)) from None
    return validate_config(data)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc}", location=str(path)) from None
    return parse_config(text)
