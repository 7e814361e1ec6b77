"""Run configuration: TOML input checked against a JSON schema."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import tomli

from .errors import ConfigError
from .field import FieldSpec, is_irreducible
from .local import LocalRing

TASKS = ("witt-check", "jet-check", "characters", "crystal", "sweep", "selftest")

_ELEMENT = {
    "oneOf": [
        {"type": "integer"},
        {"type": "array", "items": {"oneOf": [
            {"type": "string", "pattern": "^[0-9]*$"},
            {"type": "array", "items": {"type": "string", "pattern": "^[0-9]*$"}},
        ]}},
        {"type": "object", "required": ["c"], "additionalProperties": False, "properties": {
            "v": {"type": "integer"},
            "c": {"type": "array", "items": {"type": "string", "pattern": "^[0-9]*$"}},
            "prec": {"type": ["integer", "null"]},
        }},
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "task": {"enum": list(TASKS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "field": {
            "type": "object",
            "additionalProperties": False,
            "required": ["p"],
            "properties": {
                "p": {"type": "integer", "minimum": 2},
                "h": {"type": "integer", "minimum": 1},
                "f": {"type": "integer", "minimum": 1},
                "s": {"type": "integer", "minimum": 1},
                "modulus": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            },
        },
        "precision": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer", "minimum": 4},
                "pad": {"type": "integer", "minimum": 0},
                "degree_bound": {"type": "integer", "minimum": 1},
                "max_order": {"type": "integer", "minimum": 1, "maximum": 8},
            },
        },
        "module": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a"],
            "properties": {
                "a": {"type": "array", "minItems": 1, "items": _ELEMENT},
                "t": {"type": "array", "items": {"type": "string", "pattern": "^[0-9]+$"}},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "rank": {"type": "integer", "minimum": 1, "maximum": 6},
                "a1": {"enum": ["any", "unit", "nonunit"]},
                "jobs": {"type": "integer", "minimum": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "csv": {"type": "string"},
            },
        },
    },
}

DEFAULTS = {
    "task": "crystal",
    "seed": 0,
    "field": {"p": 3, "h": 1, "f": 1, "s": 1},
    "precision": {"N": 16, "pad": 8},
    "module": {"a": [1, 1]},
    "sweep": {"count": 20, "rank": 2, "a1": "any", "jobs": 1},
    "output": {},
}


@dataclass
class RunConfig:
    spec: FieldSpec
    precision: int
    pad: int
    degree_bound: int
    max_order: int | None
    task: str
    module: list
    base_poly: tuple | None
    sweep: dict
    out: str | None
    csv: str | None
    seed: int
    raw: dict = field(default_factory=dict)

    @property
    def cap(self) -> int:
        return self.precision + self.pad

    def ring(self) -> LocalRing:
        return LocalRing(self.spec, self.cap)

    def module_elements(self, ring: LocalRing | None = None) -> list:
        ring = ring or self.ring()
        out = []
        for item in self.module:
            if isinstance(item, int):
                out.append(ring.constant(ring.field.from_int(item)))
            else:
                out.append(ring.decode(item))
        return out

    def summary(self) -> dict:
        """The parts of the input that determine the output."""
        sp = self.spec
        return {"p": sp.p, "h": sp.h, "f": sp.f, "s": sp.s, "modulus": list(sp.modulus),
                "N": self.precision, "pad": self.pad, "degree_bound": self.degree_bound,
                "seed": self.seed}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _where(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    return path or "<top level>"


def validate(doc: dict, source: str = "config") -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = [f"{source}: field {_where(e)}: {e.message}" for e in errors]
        raise ConfigError("\n".join(lines))


def parse_toml(text: str, source: str = "config") -> dict:
    try:
        return tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Read, validate and normalize a config; ``overrides`` come from the command line."""
    doc: dict = {}
    source = "defaults"
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        source = path
        doc = parse_toml(text, source)
    validate(doc, source)
    merged = _merge(DEFAULTS, doc)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, name = key.rpartition(".")
        target = merged.setdefault(section, {}) if section else merged
        target[name] = value
    validate(merged, source)
    return build(merged, source)


def build(doc: dict, source: str = "config") -> RunConfig:
    fd = doc["field"]
    try:
        if "modulus" in fd:
            spec = FieldSpec(fd["p"], fd.get("h", 1), fd.get("f", 1), fd.get("s", 1), tuple(fd["modulus"]))
        else:
            spec = FieldSpec.standard(fd["p"], fd.get("h", 1), fd.get("f", 1), fd.get("s", 1))
    except ConfigError as exc:
        raise ConfigError(f"{source}: field: {exc}") from exc
    prec = doc["precision"]
    module = doc["module"]["a"]
    rank = len(module) if doc["task"] != "sweep" else doc["sweep"]["rank"]
    bound = prec.get("degree_bound", 4 * rank)
    if bound < 4 * rank:
        raise ConfigError(f"{source}: field precision.degree_bound: must be at least 4·r = {4 * rank}")
    max_order = prec.get("max_order")
    if max_order is not None and max_order < rank:
        raise ConfigError(f"{source}: field precision.max_order: must be at least the rank {rank}")
    base_poly = None
    if "t" in doc["module"]:
        base_poly = _check_base_poly(spec, doc["module"]["t"], source)
    cfg = RunConfig(
        spec=spec, precision=prec["N"], pad=prec["pad"], degree_bound=bound,
        max_order=max_order, task=doc["task"], module=module, base_poly=base_poly,
        sweep=doc["sweep"], out=doc["output"].get("path"), csv=doc["output"].get("csv"),
        seed=doc["seed"], raw=doc,
    )
    if cfg.task != "sweep":
        ring = cfg.ring()
        try:
            elems = cfg.module_elements(ring)
        except ConfigError as exc:
            raise ConfigError(f"{source}: field module.a: {exc}") from exc
        if not elems[-1].is_unit():
            raise ConfigError(f"{source}: field module.a: leading coefficient must be a unit")
    return cfg


def _check_base_poly(spec: FieldSpec, digits: list, source: str) -> tuple:
    """t as a monic polynomial of degree f over F_q, coefficients low degree first."""
    if len(digits) != spec.f + 1:
        raise ConfigError(f"{source}: field module.t: degree must equal f = {spec.f}")
    coeffs = []
    for d in digits:
        if len(d) > spec.h or any(int(ch) >= spec.p for ch in d):
            raise ConfigError(f"{source}: field module.t: {d!r} is not an element of F_q")
        coeffs.append(d)
    if coeffs[-1].rstrip("0") != "1":
        raise ConfigError(f"{source}: field module.t: polynomial must be monic")
    if spec.h == 1 and not is_irreducible([int(d or "0") for d in coeffs], spec.p):
        raise ConfigError(f"{source}: field module.t: polynomial is reducible")
    return tuple(coeffs)
