"""Command-line interface: ``legpersist <subcommand> [options]``.

Exit status is 0 on success, 1 on a domain error (invalid input, failed
validation) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import bounds as qb
from . import docio, grading
from .barcode import EVENT_KINDS, Barcode, apply_event, compute_barcode, event_kind, rank_oracle_barcode
from .complexes import window_subquotient
from .errors import DomainError
from .pwc import evolve
from .rabinowitz import build_rfc, rfc_acyclicity
from .scalars import INF, NEG_INF, PiLinear, format_scalar
from .svg import barcode_svg, frames_svg
from .tame import Augmentation, augmentation_violations, find_augmentations, linearize, transport_along


class UsageError(Exception):
    """Bad flags or flag values; exit status 2."""


# ---------------------------------------------------------------------------
# flag parsing

def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _scalar(text: str):
    t = text.strip()
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return NEG_INF
    return _rational(t)


def _window(text: str | None):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--window expects a,b; got {text!r}")
    a, b = _scalar(parts[0]), _scalar(parts[1])
    if not a < b:
        raise UsageError("--window needs a < b")
    return (a, b)


def _rationals(text: str) -> list[Fraction]:
    return [_rational(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _load(path: str, args, expect=None) -> docio.Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    doc = docio.loads(text, expect)
    p = getattr(doc.payload, "p", None)
    if args.field is not None and p is not None and p != args.field:
        raise DomainError(f"document characteristic {p} conflicts with --field {args.field}")
    return doc


# ---------------------------------------------------------------------------
# output

def _emit(args, text: str, data: dict, svg: str | None = None) -> None:
    if args.format == "json":
        sys.stdout.write(docio.canonical_json(data))
    elif args.format == "svg":
        if svg is None:
            raise UsageError(f"--format svg is not available for '{args.command}'")
        sys.stdout.write(svg)
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _barcode_text(bc: Barcode) -> str:
    rows = [("degree", "start", "end")]
    rows += [(str(b.degree), format_scalar(b.start), format_scalar(b.end)) for b in bc.bars]
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) if bc.bars else "(empty barcode)"


def _complex_text(C) -> str:
    lines = [f"{b.name}  degree {b.degree}  action {format_scalar(b.action)}" for b in C.basis]
    for j, b in enumerate(C.basis):
        terms = [f"{int(C.d[i, j])}*{C.basis[i].name}" if C.d[i, j] != 1 else C.basis[i].name
                 for i in range(len(C)) if C.d[i, j]]
        if terms:
            lines.append(f"d {b.name} = " + " + ".join(terms))
    return "\n".join(lines) or "(zero complex)"


def _homology_text(hom: dict) -> str:
    return ", ".join(f"H_{k} = {v}" for k, v in sorted(hom.items())) or "H = 0"


def _aug_from(args, dga, mixed_zero: bool = False) -> Augmentation:
    if args.aug is not None:
        vals = {}
        for item in args.aug.split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise UsageError(f"--aug expects name=value pairs, got {item!r}")
            k, v = item.split("=", 1)
            vals[k.strip()] = int(v)
        missing = [n for n in dga.names if n not in vals]
        for n in missing:
            vals[n] = 0
        eps = Augmentation(vals, dga.p)
        bad = augmentation_violations(dga, eps)
        if bad:
            raise DomainError("not an augmentation: " + "; ".join(bad))
        return eps
    augs = find_augmentations(dga)
    if mixed_zero:
        augs = [a for a in augs if not any(a(g.name) for g in dga.generators
                                           if g.flavor in ("mixed01", "mixed10"))]
    if not augs:
        raise DomainError("the DGA has no augmentation")
    if not 0 <= args.aug_index < len(augs):
        raise UsageError(f"--aug-index must lie in [0, {len(augs)})")
    return augs[args.aug_index]


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    if args.suite:
        return _run_suite(args)
    if not args.file:
        raise UsageError("validate needs a FILE or --suite")
    doc = _load(args.file, args)
    if doc.kind in ("dga", "link_dga"):
        dga = doc.payload.dga if doc.kind == "link_dga" else doc.payload
        report = dga.validate()
        ok = report.ok
        msgs = report.messages()
    elif doc.kind == "pwc_script":
        frames = evolve(doc.payload)
        ok, msgs = True, [f"{len(frames)} frames, {len(doc.payload.events)} events replayed"]
    else:
        ok, msgs = True, []
    status = "valid" if ok else "invalid"
    _emit(args, "\n".join([f"{doc.kind}: {status}"] + msgs),
          {"kind": doc.kind, "valid": ok, "messages": msgs})
    return 0 if ok else 1


def _run_suite(args) -> int:
    from . import randgen
    seed, count = args.seed, args.count
    failures = []
    for i in range(count):
        s = [seed, i]
        if args.suite == "barcode":
            C = randgen.random_complex(s, p=(2, 3)[i % 2], ties=i % 3 == 0)
            if compute_barcode(C).bars != rank_oracle_barcode(C).bars:
                failures.append(i)
        elif args.suite == "events":
            C = randgen.random_complex(s, p=(2, 3)[i % 2])
            kind = sorted(EVENT_KINDS)[i % len(EVENT_KINDS)]
            ev = randgen.random_event(s, C, kind)
            if ev is not None:
                try:
                    apply_event(compute_barcode(C), C, ev)
                except AssertionError:
                    failures.append(i)
                except DomainError:
                    pass
        elif args.suite == "sti":
            dga = randgen.random_dga(s)
            augs = find_augmentations(dga)
            if not augs:
                continue
            sti, _ = randgen.random_sti(s, dga, 1 + i % 10)
            new, eps = transport_along(dga, sti, augs[0])
            if linearize(dga, augs[0]).homology_dims() != linearize(new, eps).homology_dims():
                failures.append(i)
    ok = not failures
    text = f"suite {args.suite}: {count - len(failures)}/{count} passed (seed {seed})"
    _emit(args, text, {"suite": args.suite, "seed": seed, "count": count, "failures": failures})
    return 0 if ok else 1


def cmd_augment(args) -> int:
    dga = _load(args.file, args, "dga").payload
    augs = find_augmentations(dga)
    rows = [{n: a.values[n] for n in dga.names} for a in augs]
    text = [f"{len(augs)} augmentation(s)"]
    text += [", ".join(f"{n}={v}" for n, v in r.items()) for r in rows]
    _emit(args, "\n".join(text), {"count": len(augs), "augmentations": rows})
    return 0


def cmd_linearize(args) -> int:
    dga = _load(args.file, args, "dga").payload
    eps = _aug_from(args, dga)
    C = linearize(dga, eps)
    hom = C.homology_dims()
    data = {"complex": docio.to_document("complex", C),
            "homology": {str(k): v for k, v in sorted(hom.items())}}
    _emit(args, _complex_text(C) + "\n" + _homology_text(hom), data)
    return 0


def _rfc_report(args, C, extra: dict) -> int:
    bc = compute_barcode(C)
    acyc = rfc_acyclicity(C)
    data = {"complex": docio.to_document("complex", C), "barcode": docio.barcode_body(bc),
            "acyclic": acyc.acyclic,
            "homology": {str(k): v for k, v in sorted(acyc.homology.items())}, **extra}
    text = "\n".join([_complex_text(C), "", _barcode_text(bc), "", str(acyc)])
    _emit(args, text, data, barcode_svg(bc))
    return 0


def cmd_cone(args) -> int:
    link = _load(args.link, args, "link_dga").payload
    counts = _load(args.counts, args, "counts").payload if args.counts else None
    eps = _aug_from(args, link.dga, mixed_zero=True)
    window = _window(args.window) or (NEG_INF, INF)
    rfc = build_rfc(link, eps, counts, window, args.n)
    return _rfc_report(args, rfc.complex, {})


def cmd_barcode(args) -> int:
    C = _load(args.file, args, "complex").payload
    w = _window(args.window)
    if w is not None:
        C = window_subquotient(C, *w)
    bc = compute_barcode(C)
    _emit(args, _barcode_text(bc), docio.barcode_body(bc), barcode_svg(bc))
    return 0


def cmd_evolve(args) -> int:
    script = _load(args.file, args, "pwc_script").payload
    samples = _rationals(args.samples) if args.samples else []
    frames = evolve(script, samples)
    out, text = [], []
    for f in frames:
        ev = None if f.event is None else event_kind(f.event)
        out.append({"t": docio.dump_scalar(f.t), "event": ev,
                    "barcode": docio.barcode_body(f.barcode)})
        text.append(f"t = {format_scalar(f.t)}" + (f"  ({ev})" if ev else ""))
        text.append(_barcode_text(f.barcode))
        text.append("")
    _emit(args, "\n".join(text), {"frames": out}, frames_svg(frames))
    return 0


def cmd_grade(args) -> int:
    n, top = args.n, args.max
    if n < 1 or top < 1:
        raise UsageError("--n and --max must be positive")
    if args.plane:
        vals = _ints(args.plane)
        if len(vals) not in (2, 4):
            raise UsageError("--plane expects mu_cz,c1rel[,bott_dim,morse_index]")
        d = grading.plane_index(grading.OrbitIndexInput(n, *vals))
        _emit(args, str(d), {"plane_index": d})
        return 0
    if args.halfplane:
        vals = _ints(args.halfplane)
        if len(vals) not in (2, 4):
            raise UsageError("--halfplane expects cz,maslov[,bott_dim,morse_index]")
        d = grading.halfplane_index(grading.ChordIndexInput(*vals))
        _emit(args, str(d), {"halfplane_index": d})
        return 0
    orbits = [{"m": m, "degree": grading.rpn_orbit_degree(n, m),
               "perturbed": [grading.rpn_orbit_degree(n, m, i) for i in range(2 * n + 1)]}
              for m in range(1, top + 1)]
    chords = [{"k": k, "degree": grading.rpn_pure_chord_degree(n, k),
               "perturbed": [grading.rpn_pure_chord_degree(n, k, i) for i in range(n + 1)]}
              for k in range(1, top + 1)]
    data = {"n": n, "orbits": orbits, "chords": chords,
            "min_orbit_degree": grading.min_perturbed_orbit_degree(n, top),
            "min_chord_degree": grading.min_perturbed_chord_degree(n, top)}
    text = [f"Hopf orbits in RP^{2 * n + 1}", "m  degree  perturbed"]
    text += [f"{o['m']}  {o['degree']}  {o['perturbed'][0]}..{o['perturbed'][-1]}" for o in orbits]
    text += ["", f"pure chords of RP^{n}", "k  degree  perturbed"]
    text += [f"{c['k']}  {c['degree']}  {c['perturbed'][0]}..{c['perturbed'][-1]}" for c in chords]
    text += ["", f"minimal perturbed orbit degree: {data['min_orbit_degree']}",
             f"minimal perturbed chord degree: {data['min_chord_degree']}"]
    _emit(args, "\n".join(text), data)
    return 0


def cmd_rpn(args) -> int:
    window = _window(args.window)
    if window is None:
        raise UsageError("rpn needs --window a,b")
    eps = None if args.epsilon is None else PiLinear(_rational(args.epsilon))
    rfc = grading.rpn_generate_rfc(args.n, window, eps)
    labels = grading._labels_in_window(args.n, window[0], window[1], eps)
    chords = []
    for lab in labels:
        ch = grading.rpn_mixed_chord(lab)
        chords.append({"name": grading.chord_name(lab.j, lab.k), "j": lab.j, "k": lab.k,
                       "degree": ch.degree, "action": docio.dump_scalar(ch.action)})
    return _rfc_report(args, rfc.complex, {"n": args.n, "chords": chords})


def cmd_bounds(args) -> int:
    if args.input:
        sections = _load(args.input, args, "bounds_input").payload
    else:
        sections = {args.which.replace("-", "_"): _bounds_flags(args)}
    results = {}
    lines = []
    for name, vals in sections.items():
        res = _bounds_section(name, vals, args)
        results[name] = res
        lines.append(f"{name}: {res['text']}")
    _emit(args, "\n".join(lines), {k: {kk: vv for kk, vv in v.items() if kk != "text"}
                                  for k, v in results.items()})
    return 0


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


def _bounds_flags(args) -> dict:
    w = args.which
    if w in ("main-theorem", "simulate"):
        _need(args, "betti", "k", "osc", "lengths")
        vals = {"betti": _ints(args.betti), "k": args.k, "osc": _rational(args.osc),
                "lengths": _rationals(args.lengths)}
        if args.l is not None:
            vals["l"] = _scalar(args.l)
        if w == "simulate":
            vals["steps"] = args.steps
        return vals
    if w == "scf":
        _need(args, "values", "eps")
        return {"critical_values": _rationals(args.values), "eps": _rational(args.eps)}
    if w == "growth":
        _need(args, "pairs", "delta")
        pairs = []
        for item in args.pairs.split(","):
            if ":" not in item:
                raise UsageError("--pairs expects in:out,in:out,...")
            a, b = item.split(":", 1)
            pairs.append((_rational(a), _rational(b)))
        vals = {"pairs": pairs, "delta": _rational(args.delta)}
        if args.exp_upper is not None:
            vals["exp_upper"] = _rational(args.exp_upper)
        if args.exp_lower is not None:
            vals["exp_lower"] = _rational(args.exp_lower)
        return vals
    _need(args, "f_min", "f_max", "eps")
    return {"f_min": _rational(args.f_min), "f_max": _rational(args.f_max), "eps": _rational(args.eps)}


def _bounds_section(name: str, v: dict, args) -> dict:
    if name == "main_theorem":
        chords = qb.ChordSpectrum(tuple(v["lengths"]), v.get("hbar", INF), v.get("l"))
        r = qb.main_theorem_bound(v["betti"], v["k"], v["osc"], chords)
        return {"admissible": r.admissible, "value": r.value, "reason": r.reason, "text": str(r)}
    if name == "simulate":
        r = qb.adversarial_min_survivors(v["betti"], v["lengths"], v["osc"], v.get("steps", 8),
                                         v["k"], v.get("l", INF))
        return {"min_survivors": r.min_survivors, "bound": r.bound.value,
                "admissible": r.bound.admissible, "holds": r.holds,
                "speed_law_ok": r.speed_law_ok, "states": r.states_explored,
                "text": f"min survivors {r.min_survivors}; bound {r.bound}; "
                        f"{'holds' if r.holds else 'VIOLATED'}"}
    if name == "scf":
        c = qb.scf_energy_constant(v["critical_values"], v["eps"])
        return {"value": docio.dump_scalar(c), "text": format_scalar(c)}
    if name == "growth":
        verdict = qb.action_growth_check(v["pairs"], v["delta"], v.get("exp_lower"), v.get("exp_upper"))
        return {"status": verdict.status, "messages": list(verdict.messages), "text": str(verdict)}
    if name == "trace":
        t = qb.trace_lengths(qb.ConformalProfile(v["f_min"], v["f_max"], v["eps"]))
        out = {}
        for key in ("len01", "len10", "c0"):
            e = getattr(t, key)
            out[key] = {"coef": docio.dump_scalar(e.coef), "exponent": docio.dump_scalar(e.exponent),
                        "decimal": e.decimal()}
        out["text"] = ", ".join(f"{k} = {getattr(t, k)} ≈ {out[k]['decimal']}"
                                for k in ("len01", "len10", "c0"))
        return out
    raise UsageError(f"unknown bounds section {name!r}")


def cmd_destab(args) -> int:
    from .tame import destabilize_pair
    dga = _load(args.file, args, "dga").payload
    if "," not in args.pair:
        raise UsageError("--pair expects upper,lower")
    x, y = (s.strip() for s in args.pair.split(",", 1))
    sti, out = destabilize_pair(dga, x, y)
    moves = [_move_body(m) for m in sti]
    doc = docio.to_document("dga", out)
    text = [f"{len(moves)} move(s):"] + [f"  {_move_text(m)}" for m in moves]
    text += ["", docio.canonical_json(doc).rstrip()]
    _emit(args, "\n".join(text), {"moves": moves, "dga": doc})
    return 0


def _move_body(m) -> dict:
    from .algebra import format_element
    body = {"move": type(m).__name__.lower()}
    for k, v in vars(m).items():
        if k == "w":
            body[k] = "0" if v is None else (v if isinstance(v, str) else format_element(v))
        elif isinstance(v, (Fraction, float)) or type(v).__name__ == "PiLinear":
            body[k] = docio.dump_scalar(v)
        elif isinstance(v, dict):
            body[k] = {kk: (vv if isinstance(vv, str) else docio.dump_scalar(vv)) for kk, vv in v.items()}
        else:
            body[k] = v
    return body


def _move_text(body: dict) -> str:
    args = ", ".join(f"{k}={v}" for k, v in body.items() if k != "move")
    return f"{body['move']}({args})"


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "svg"), default="text")
    common.add_argument("--field", type=int, default=None, metavar="P",
                        help="require documents over F_P")
    common.add_argument("--window", default=None, metavar="A,B",
                        help="action window, e.g. 0,10 or -inf,5/2")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="legpersist",
                                     description="Filtered DGAs, barcodes and Rabinowitz cones.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a document or run a random suite")
    p.add_argument("file", nargs="?")
    p.add_argument("--suite", choices=("barcode", "events", "sti"))
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("augment", parents=[common], help="enumerate augmentations of a DGA")
    p.add_argument("file")
    p.set_defaults(func=cmd_augment)

    for name, func, help_ in (("linearize", cmd_linearize, "linearized complex of a DGA"),
                              ("cone", cmd_cone, "windowed Rabinowitz cone of a link DGA")):
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "linearize":
            p.add_argument("file")
        else:
            p.add_argument("link")
            p.add_argument("--counts", default=None)
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--aug", default=None, metavar="NAME=V,...",
                       help="augmentation values (unlisted generators map to 0)")
        p.add_argument("--aug-index", type=int, default=0,
                       help="pick the i-th enumerated augmentation")
        p.set_defaults(func=func)

    p = sub.add_parser("barcode", parents=[common], help="persistence barcode of a complex")
    p.add_argument("file")
    p.set_defaults(func=cmd_barcode)

    p = sub.add_parser("evolve", parents=[common], help="barcode frames of a script")
    p.add_argument("file")
    p.add_argument("--samples", default=None, metavar="T1,T2,...")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("grade", parents=[common], help="index tables for RP^n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max", type=int, default=6)
    p.add_argument("--plane", default=None, metavar="MU,C1[,BOTT,MORSE]")
    p.add_argument("--halfplane", default=None, metavar="CZ,MASLOV[,BOTT,MORSE]")
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("rpn", parents=[common], help="Rabinowitz cone of RP^n and its push-off")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", default=None, metavar="Q", help="perturbation Q*pi")
    p.set_defaults(func=cmd_rpn)

    p = sub.add_parser("bounds", parents=[common], help="quantitative bounds")
    p.add_argument("which", nargs="?", default="main-theorem",
                   choices=("main-theorem", "scf", "growth", "trace", "simulate"))
    p.add_argument("--input", default=None, help="bounds_input document")
    for flag in ("betti", "osc", "lengths", "l", "values", "eps", "pairs", "delta",
                 "exp-upper", "exp-lower", "f-min", "f-max"):
        p.add_argument(f"--{flag}", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--steps", type=int, default=8)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("destab", parents=[common], help="cancel a pair d x = k y + w")
    p.add_argument("file")
    p.add_argument("--pair", required=True, metavar="X,Y")
    p.set_defaults(func=cmd_destab)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
