"""Versioned JSON documents for DGAs, complexes, counts, scripts and bound inputs.

Every document is an object ``{"kind": ..., "version": 1, ...}``. Exact
values are strings: rationals as reduced ``"n/d"``, infinities as ``"inf"``
and ``"-inf"``; pi-linear values ``q*pi + r`` are objects
``{"pi": "q", "const": "r"}``. Canonical output sorts keys and generator
names, so ``dumps(loads(text)) == text`` for canonical text.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import FLAVORS, FilteredDGA, Generator, format_element, parse_element
from .barcode import EVENT_KINDS, Barcode, event_kind
from .complexes import FilteredComplex
from .errors import DomainError, ParseError
from .pwc import OscillationProfile, PLFunction, PWCScript
from .rabinowitz import BananaCounts, LinkDGA
from .scalars import INF, NEG_INF, PiLinear, pi_linear

VERSION = 1
KINDS = ("dga", "link_dga", "complex", "counts", "pwc_script", "osc_profile", "bounds_input")
_RATIONAL_RE = re.compile(r"(-?\d+)(?:/(\d+))?")


@dataclass(frozen=True)
class Document:
    """A parsed document: ``kind``, ``version`` and the in-memory payload."""

    kind: str
    version: int
    payload: Any
    extra: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# scalars

def parse_rational(value, path: str) -> Fraction:
    if not isinstance(value, str):
        raise ParseError(path, f"rational must be a string 'n/d', got {type(value).__name__}")
    m = _RATIONAL_RE.fullmatch(value.strip())
    if not m:
        raise ParseError(path, f"malformed rational {value!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    den = int(m.group(2))
    if den == 0:
        raise ParseError(path, f"zero denominator in {value!r}")
    q = Fraction(num, den)
    if q.numerator != num or q.denominator != den:
        raise ParseError(path, f"rational {value!r} is not reduced (expected '{q.numerator}/{q.denominator}')")
    return q


def parse_scalar(value, path: str, infinite: bool = False):
    """Rational, pi-linear object or (when ``infinite``) ``"inf"``/``"-inf"``."""
    if isinstance(value, dict):
        keys = set(value)
        if keys != {"pi", "const"}:
            raise ParseError(path, f"pi-linear value needs keys 'pi' and 'const', got {sorted(keys)}")
        return pi_linear(parse_rational(value["pi"], f"{path}.pi"),
                         parse_rational(value["const"], f"{path}.const"))
    if value in ("inf", "-inf"):
        if not infinite:
            raise ParseError(path, "infinite value not allowed here")
        return INF if value == "inf" else NEG_INF
    return parse_rational(value, path)


def dump_scalar(x):
    if isinstance(x, float):
        if x == INF:
            return "inf"
        if x == NEG_INF:
            return "-inf"
        raise DomainError("finite floats are not exact values")
    if isinstance(x, PiLinear):
        return {"const": _q(x.r), "pi": _q(x.q)}
    return _q(Fraction(x))


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(path, "expected an integer")
    if minimum is not None and value < minimum:
        raise ParseError(path, f"expected an integer >= {minimum}")
    return value


def _obj(value, path: str, required=(), optional=()) -> dict:
    if not isinstance(value, dict):
        raise ParseError(path, "expected an object")
    missing = [k for k in required if k not in value]
    if missing:
        raise ParseError(f"{path}.{missing[0]}", "missing field")
    unknown = sorted(set(value) - set(required) - set(optional))
    if unknown:
        raise ParseError(f"{path}.{unknown[0]}", "unknown field")
    return value


def _map(value, path: str) -> dict:
    """An object with free keys (names)."""
    if not isinstance(value, dict):
        raise ParseError(path, "expected an object")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError(path, "expected a list")
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ParseError(path, "expected a string")
    return value


def _wrap(path: str, fn, *args):
    """Run a constructor, relabelling its domain errors with ``path``."""
    try:
        return fn(*args)
    except ParseError:
        raise
    except (DomainError, ValueError) as exc:
        raise ParseError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# payload readers

def _read_generators(items, path: str, p: int) -> list[Generator]:
    gens = []
    seen = set()
    for i, g in enumerate(_list(items, path)):
        gp = f"{path}[{i}]"
        _obj(g, gp, ("name", "degree", "action"), ("flavor",))
        name = _str(g["name"], f"{gp}.name")
        if name in seen:
            raise ParseError(f"{gp}.name", f"duplicate generator name {name!r}")
        seen.add(name)
        flavor = _str(g.get("flavor", "pure"), f"{gp}.flavor")
        if flavor not in FLAVORS:
            raise ParseError(f"{gp}.flavor", f"unknown flavor {flavor!r}")
        gens.append(_wrap(gp, Generator, name, _int(g["degree"], f"{gp}.degree"),
                          parse_scalar(g["action"], f"{gp}.action"), flavor))
    return gens


def _read_dga(doc: dict, path: str) -> FilteredDGA:
    _obj(doc, path, ("generators",), ("p", "grading_modulus", "action_level", "differential",
                                       "kind", "version"))
    p = _int(doc.get("p", 2), f"{path}.p", 2)
    gens = _read_generators(doc["generators"], f"{path}.generators", p)
    names = [g.name for g in gens]
    diff = {}
    for key, text in _map(doc.get("differential", {}), f"{path}.differential").items():
        dp = f"{path}.differential.{key}"
        if key not in names:
            raise ParseError(dp, f"unknown generator {key!r}")
        diff[key] = _wrap(dp, parse_element, _str(text, dp), p, names)
    level = parse_scalar(doc.get("action_level", "inf"), f"{path}.action_level", infinite=True)
    modulus = _int(doc.get("grading_modulus", 0), f"{path}.grading_modulus", 0)
    return _wrap(path, FilteredDGA, gens, diff, p, modulus, level)


def _read_complex(doc: dict, path: str) -> FilteredComplex:
    _obj(doc, path, ("basis",), ("p", "grading_modulus", "window", "d", "d_degree", "kind", "version"))
    p = _int(doc.get("p", 2), f"{path}.p", 2)
    basis = []
    seen = set()
    for i, b in enumerate(_list(doc["basis"], f"{path}.basis")):
        bp = f"{path}.basis[{i}]"
        _obj(b, bp, ("name", "degree", "action"))
        name = _str(b["name"], f"{bp}.name")
        if name in seen:
            raise ParseError(f"{bp}.name", f"duplicate generator name {name!r}")
        seen.add(name)
        basis.append((name, _int(b["degree"], f"{bp}.degree"), parse_scalar(b["action"], f"{bp}.action")))
    index = {b[0]: i for i, b in enumerate(basis)}
    d = np.zeros((len(basis), len(basis)), dtype=np.int64)
    for col, entries in _map(doc.get("d", {}), f"{path}.d").items():
        cp = f"{path}.d.{col}"
        if col not in index:
            raise ParseError(cp, f"unknown generator {col!r}")
        for row, c in _map(entries, cp).items():
            if row not in index:
                raise ParseError(f"{cp}.{row}", f"unknown generator {row!r}")
            d[index[row], index[col]] = _int(c, f"{cp}.{row}") % p
    window = _read_window(doc.get("window", ["-inf", "inf"]), f"{path}.window")
    d_degree = _int(doc.get("d_degree", -1), f"{path}.d_degree")
    if d_degree not in (-1, 1):
        raise ParseError(f"{path}.d_degree", "must be -1 or 1")
    modulus = _int(doc.get("grading_modulus", 0), f"{path}.grading_modulus", 0)
    return _wrap(path, lambda: FilteredComplex(basis, d, p, modulus, window, d_degree))


def _read_window(value, path: str) -> tuple:
    w = _list(value, path)
    if len(w) != 2:
        raise ParseError(path, "window must be a pair [a, b]")
    return (parse_scalar(w[0], f"{path}[0]", True), parse_scalar(w[1], f"{path}[1]", True))


def _read_counts(doc: dict, path: str) -> BananaCounts:
    _obj(doc, path, ("entries",), ("kind", "version"))
    entries = {}
    for i, e in enumerate(_list(doc["entries"], f"{path}.entries")):
        ep = f"{path}.entries[{i}]"
        _obj(e, ep, ("x01", "y10", "count"))
        key = (_str(e["x01"], f"{ep}.x01"), _str(e["y10"], f"{ep}.y10"))
        if key in entries:
            raise ParseError(ep, f"duplicate entry {key}")
        entries[key] = _int(e["count"], f"{ep}.count")
    return BananaCounts(entries)


def _read_pl(value, path: str) -> PLFunction:
    pts = []
    for i, pt in enumerate(_list(value, path)):
        pp = f"{path}[{i}]"
        if not isinstance(pt, list) or len(pt) != 2:
            raise ParseError(pp, "expected a pair [t, value]")
        pts.append((parse_rational(pt[0], f"{pp}[0]"), parse_scalar(pt[1], f"{pp}[1]")))
    return _wrap(path, PLFunction, tuple(pts))


def _read_event(value, path: str):
    _obj(value, path, ("t", "type"), ("upper", "lower", "upper_degree", "upper_action",
                                      "lower_action", "k", "target", "source", "name",
                                      "degree", "action", "row", "column"))
    t = parse_rational(value["t"], f"{path}.t")
    kind = _str(value["type"], f"{path}.type")
    cls = EVENT_KINDS.get(kind)
    if cls is None:
        raise ParseError(f"{path}.type", f"unknown event type {kind!r}")
    kw = {}
    for key, raw in value.items():
        if key in ("t", "type"):
            continue
        kp = f"{path}.{key}"
        if key in _EVENT_SCALARS:
            kw[key] = parse_scalar(raw, kp)
        elif key in ("upper_degree", "degree", "k"):
            kw[key] = _int(raw, kp)
        elif key in ("row", "column"):
            kw[key] = {_str(n, kp): _int(c, f"{kp}.{n}") for n, c in _map(raw, kp).items()}
        elif key == "source" and raw is None:
            kw[key] = None
        else:
            kw[key] = _str(raw, kp)
    return t, _wrap(path, lambda: cls(**kw))


def _read_script(doc: dict, path: str) -> PWCScript:
    _obj(doc, path, ("t_range", "initial"), ("trajectories", "window", "events", "kind", "version"))
    tr = _list(doc["t_range"], f"{path}.t_range")
    if len(tr) != 2:
        raise ParseError(f"{path}.t_range", "expected [t0, t1]")
    t_range = (parse_rational(tr[0], f"{path}.t_range[0]"), parse_rational(tr[1], f"{path}.t_range[1]"))
    initial = _read_complex(doc["initial"], f"{path}.initial")
    trajs = {name: _read_pl(pts, f"{path}.trajectories.{name}")
             for name, pts in _map(doc.get("trajectories", {}), f"{path}.trajectories").items()}
    window = doc.get("window")
    if window is not None:
        _obj(window, f"{path}.window", ("lower", "upper"))
        window = (_read_pl(window["lower"], f"{path}.window.lower"),
                  _read_pl(window["upper"], f"{path}.window.upper"))
    events = [_read_event(e, f"{path}.events[{i}]")
              for i, e in enumerate(_list(doc.get("events", []), f"{path}.events"))]
    return _wrap(path, lambda: PWCScript(t_range, initial, trajs, window, tuple(events)))


def _read_osc(doc: dict, path: str) -> OscillationProfile:
    _obj(doc, path, ("points",), ("t0", "kind", "version"))
    t0 = parse_rational(doc.get("t0", "0/1"), f"{path}.t0")
    return _wrap(path, OscillationProfile, _read_pl(doc["points"], f"{path}.points"), t0)


_BOUNDS_FIELDS = {
    "main_theorem": (("betti", "k", "osc", "lengths"), ("hbar", "l")),
    "scf": (("critical_values", "eps"), ()),
    "growth": (("pairs", "delta"), ("exp_lower", "exp_upper")),
    "trace": (("f_min", "f_max", "eps"), ()),
}


def _read_bounds(doc: dict, path: str) -> dict:
    _obj(doc, path, (), tuple(_BOUNDS_FIELDS) + ("kind", "version"))
    out = {}
    for section, (req, opt) in _BOUNDS_FIELDS.items():
        if section not in doc:
            continue
        sp = f"{path}.{section}"
        sec = _obj(doc[section], sp, req, opt)
        vals = {}
        for key, raw in sec.items():
            kp = f"{sp}.{key}"
            if key == "betti":
                vals[key] = [_int(b, f"{kp}[{i}]", 0) for i, b in enumerate(_list(raw, kp))]
            elif key == "k":
                vals[key] = _int(raw, kp, 1)
            elif key in ("lengths", "critical_values"):
                vals[key] = [parse_scalar(v, f"{kp}[{i}]") for i, v in enumerate(_list(raw, kp))]
            elif key == "pairs":
                pairs = []
                for i, pr in enumerate(_list(raw, kp)):
                    if not isinstance(pr, list) or len(pr) != 2:
                        raise ParseError(f"{kp}[{i}]", "expected [input, output]")
                    pairs.append((parse_rational(pr[0], f"{kp}[{i}][0]"),
                                  parse_rational(pr[1], f"{kp}[{i}][1]")))
                vals[key] = pairs
            else:
                vals[key] = parse_scalar(raw, kp, infinite=key in ("hbar", "l"))
        out[section] = vals
    return out


_READERS = {
    "dga": _read_dga,
    "link_dga": lambda d, p: _wrap(p, LinkDGA, _read_dga(d, p)),
    "complex": _read_complex,
    "counts": _read_counts,
    "pwc_script": _read_script,
    "osc_profile": _read_osc,
    "bounds_input": _read_bounds,
}


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError("$", f"duplicate key {k!r}")
        out[k] = v
    return out


def loads(text: str, expect: str | None = None) -> Document:
    """Parse and validate a document; errors carry the offending field path."""
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    _obj(raw, "$", ("kind", "version"), tuple(k for k in raw) if isinstance(raw, dict) else ())
    kind = _str(raw["kind"], "$.kind")
    if kind not in KINDS:
        raise ParseError("$.kind", f"unknown kind {kind!r}")
    if expect is not None and kind != expect:
        raise ParseError("$.kind", f"expected a {expect!r} document, got {kind!r}")
    version = _int(raw["version"], "$.version")
    if version != VERSION:
        raise ParseError("$.version", f"unsupported version {version}")
    return Document(kind, version, _READERS[kind](raw, "$"))


def load(path: str, expect: str | None = None) -> Document:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), expect)


# ---------------------------------------------------------------------------
# writers

def _dga_body(dga: FilteredDGA) -> dict:
    gens = sorted(dga.generators, key=lambda g: g.name)
    body = {
        "p": dga.p,
        "grading_modulus": dga.grading_modulus,
        "action_level": dump_scalar(dga.action_level),
        "generators": [{"name": g.name, "degree": g.degree, "action": dump_scalar(g.action),
                        "flavor": g.flavor} for g in gens],
        "differential": {n: format_element(dga.differential[n]) for n in sorted(dga.names)
                         if dga.differential[n]},
    }
    return body


def _complex_body(C: FilteredComplex) -> dict:
    order = sorted(range(len(C)), key=lambda i: C.basis[i].name)
    d = {}
    for c in order:
        col = {C.basis[r].name: int(C.d[r, c]) for r in order if C.d[r, c]}
        if col:
            d[C.basis[c].name] = col
    return {
        "p": C.p,
        "grading_modulus": C.grading_modulus,
        "d_degree": C.d_degree,
        "window": [dump_scalar(C.window[0]), dump_scalar(C.window[1])],
        "basis": [{"name": C.basis[i].name, "degree": C.basis[i].degree,
                   "action": dump_scalar(C.basis[i].action)} for i in order],
        "d": d,
    }


def _pl_body(f: PLFunction) -> list:
    return [[_q(Fraction(t)), dump_scalar(v)] for t, v in f.points]


_EVENT_SCALARS = ("upper_action", "lower_action", "action")


def event_body(t, ev) -> dict:
    body = {"t": _q(Fraction(t)), "type": event_kind(ev)}
    for key, val in vars(ev).items():
        if key in ("row", "column"):
            body[key] = {n: int(c) for n, c in val}
        elif key in _EVENT_SCALARS:
            body[key] = dump_scalar(val)
        else:
            body[key] = val
    return body


def _script_body(s: PWCScript) -> dict:
    body = {
        "t_range": [_q(s.t_range[0]), _q(s.t_range[1])],
        "initial": _complex_body(s.initial),
        "trajectories": {n: _pl_body(f) for n, f in sorted(s.trajectories.items())},
        "events": [event_body(t, e) for t, e in s.events],
    }
    if s.window is not None:
        body["window"] = {"lower": _pl_body(s.window[0]), "upper": _pl_body(s.window[1])}
    return body


def _bounds_body(b: dict) -> dict:
    out = {}
    for section, vals in b.items():
        sec = {}
        for key, v in vals.items():
            if key in ("betti", "k"):
                sec[key] = v
            elif key in ("lengths", "critical_values"):
                sec[key] = [dump_scalar(x) for x in v]
            elif key == "pairs":
                sec[key] = [[dump_scalar(a), dump_scalar(c)] for a, c in v]
            else:
                sec[key] = dump_scalar(v)
        out[section] = sec
    return out


def to_document(kind: str, payload) -> dict:
    """JSON-ready canonical dictionary for an in-memory payload."""
    if kind == "dga":
        body = _dga_body(payload)
    elif kind == "link_dga":
        body = _dga_body(payload.dga if isinstance(payload, LinkDGA) else payload)
    elif kind == "complex":
        body = _complex_body(payload)
    elif kind == "counts":
        body = {"entries": [{"x01": x, "y10": y, "count": int(c)}
                            for (x, y), c in sorted(dict(payload.entries).items())]}
    elif kind == "pwc_script":
        body = _script_body(payload)
    elif kind == "osc_profile":
        body = {"t0": _q(payload.t0), "points": _pl_body(payload.osc)}
    elif kind == "bounds_input":
        body = _bounds_body(payload)
    else:
        raise DomainError(f"unknown document kind {kind!r}")
    return {"kind": kind, "version": VERSION, **body}


def canonical_json(obj) -> str:
    """Sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dumps(kind_or_doc, payload=None) -> str:
    if isinstance(kind_or_doc, Document):
        return canonical_json(to_document(kind_or_doc.kind, kind_or_doc.payload))
    return canonical_json(to_document(kind_or_doc, payload))


def barcode_body(bc: Barcode) -> dict:
    return {
        "window": [dump_scalar(bc.window[0]), dump_scalar(bc.window[1])],
        "bars": [{"degree": b.degree, "start": dump_scalar(b.start), "end": dump_scalar(b.end)}
                 for b in bc.bars],
    }
