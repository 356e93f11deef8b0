"""JSON manifest ingestion for framed manifolds and defining one-forms.

A manifest declares the frame, structure constants (or a coordinate
frame), metric, orientation, the one-form under test, and every parameter
and abstract function with its assumptions.  Scalar entries are
expression literals in the grammar of :mod:`econtact.scalar`.  Parsing is
lossless: the normalized data dict serializes back to an equivalent
manifest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import sympy as sp

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from . import scalar as sc
from .frames import FrameError, FrameManifold, TensorField, one_form
from .scalar import Assumptions, FuncFacts, ParamFacts, Range, ScalarError

SCHEMA_ID = "econtact-manifest/1"
_SCHEMA_PATH = Path(__file__).parent / "schemas" / "manifest.schema.json"


class ManifestError(ValueError):
    """Parse or validation diagnostic; carries line/column when known."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


@dataclass
class Manifest:
    data: dict
    manifold: FrameManifold
    alpha: TensorField
    name: str

    def serialize(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"

    def __eq__(self, other) -> bool:
        return isinstance(other, Manifest) and self.data == other.data


def _schema() -> Optional[dict]:
    if jsonschema is None or not _SCHEMA_PATH.exists():
        return None
    return json.loads(_SCHEMA_PATH.read_text())


def _rational(text, what: str) -> sp.Rational:
    try:
        return sp.Rational(str(text))
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{what}: {text!r} is not a rational") from exc


def _parse_range(obj: dict, what: str) -> Range:
    return Range(
        None if obj.get("lo") is None else _rational(obj["lo"], what),
        None if obj.get("hi") is None else _rational(obj["hi"], what),
        bool(obj.get("lo_open", False)),
        bool(obj.get("hi_open", False)))


def parse_assumptions(data: dict) -> tuple[Assumptions, list[str], list[str]]:
    """Assumptions plus declared parameter and function names."""
    assumptions = Assumptions()
    params = []
    for p in data.get("parameters", []):
        name = p["name"]
        params.append(name)
        facts = ParamFacts(nonzero=bool(p.get("nonzero", False)),
                           positive=bool(p.get("positive", False)))
        rng = p.get("range")
        if rng is not None:
            parsed = _parse_range(rng, f"parameter {name} range")
            if rng.get("of", "value") == "square":
                facts.square_range = parsed
            else:
                facts.range = parsed
        assumptions.params[sc.parameter(name)] = facts
    funcs = []
    for f in data.get("functions", []):
        funcs.append(f["name"])
        assumptions.funcs[f["name"]] = FuncFacts(
            nowhere_zero=bool(f.get("nowhere_zero", False)))
    return assumptions, params, funcs


def parse_manifest(text: str, name: str = "<manifest>",
                   substitutions: Optional[dict] = None) -> Manifest:
    """Parse and fully validate manifest text.

    ``substitutions`` maps parameter names to rationals applied to every
    scalar (values are checked against the declared assumptions).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"JSON syntax error: {exc.msg}",
                            exc.lineno, exc.colno) from exc
    schema = _schema()
    if schema is not None:
        try:
            jsonschema.validate(data, schema)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ManifestError(f"schema violation at {path}: {exc.message}") \
                from exc
    if data.get("schema") != SCHEMA_ID:
        raise ManifestError(f"unsupported schema {data.get('schema')!r}; "
                            f"expected {SCHEMA_ID!r}")
    assumptions, params, funcs = parse_assumptions(data)

    subs = {}
    for pname, value in (substitutions or {}).items():
        if pname not in params:
            raise ManifestError(f"substitution for undeclared parameter {pname!r}")
        value = _rational(value, f"substitution {pname}")
        facts = assumptions.params[sc.parameter(pname)]
        if not facts.admits(value):
            raise ManifestError(
                f"substitution {pname} = {value} violates the declared "
                "assumptions")
        subs[sc.parameter(pname)] = value
    for psym in subs:
        del assumptions.params[psym]

    man = data["manifold"]
    dim = man["dim"]
    frame = man["frame"]
    if len(frame) != dim or len(set(frame)) != dim:
        raise ManifestError("frame must list dim distinct labels")
    coords_decl = man.get("coordinates")
    coords = None
    coord_names: list[str] = []
    if coords_decl is not None:
        if len(coords_decl) != dim:
            raise ManifestError("coordinates must align with the frame")
        coord_names = list(coords_decl)
        coords = tuple(sc.coordinate(c) for c in coords_decl)

    def scalar_of(textval, what: str) -> sp.Expr:
        try:
            e = sc.parse_scalar(str(textval), params=params,
                                coords=coord_names, funcs=funcs)
        except ScalarError as exc:
            raise ManifestError(f"{what}: {exc}") from exc
        return sc.simplify(e.subs(subs, simultaneous=True)) if subs else e

    index = {lbl: i for i, lbl in enumerate(frame)}
    c = [[[sp.S.Zero] * dim for _ in range(dim)] for _ in range(dim)]
    for rule in man.get("structure", []):
        try:
            i, j = (index[l] for l in rule["bracket"])
        except KeyError as exc:
            raise ManifestError(f"structure rule uses unknown label {exc}") \
                from exc
        if i == j:
            raise ManifestError(f"bracket [{frame[i]}, {frame[i]}] is zero")
        for lbl, val in rule["coefficients"].items():
            if lbl not in index:
                raise ManifestError(f"structure rule targets unknown label "
                                    f"{lbl!r}")
            k = index[lbl]
            e = scalar_of(val, f"structure coefficient [{rule['bracket']}]")
            c[k][i][j] = e
            c[k][j][i] = -e
    metric = [[scalar_of(v, f"metric entry ({i},{j})")
               for j, v in enumerate(row)]
              for i, row in enumerate(man["metric"])]
    orientation = int(man.get("orientation", 1))
    signature = int(man["signature"])
    try:
        manifold = FrameManifold(frame, c, metric, orientation, signature,
                                 coords=coords, assumptions=assumptions,
                                 name=data.get("name", name))
    except FrameError as exc:
        raise ManifestError(str(exc)) from exc
    alpha_comp = [scalar_of(v, f"form component {i}")
                  for i, v in enumerate(data["form"])]
    if len(alpha_comp) != dim:
        raise ManifestError("form must have one component per frame direction")
    alpha = one_form(manifold, alpha_comp)
    return Manifest(data, manifold, alpha, data.get("name", name))


def load_manifest(path: str | Path,
                  substitutions: Optional[dict] = None) -> Manifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ManifestError(f"cannot read {path}: {exc}") from exc
    return parse_manifest(text, name=path.stem, substitutions=substitutions)
