"""Piecewise-continuous families of filtered complexes.

A script fixes an initial complex, piecewise-linear action trajectories, an
optional piecewise-linear window and a list of simple bifurcations at
distinct rational times. Removal events (death, exits) are applied just
before their time and insertions (birth, entries) just after, so the frame
at an event time shows the state with the event's generators absent.
"""
from __future__ import annotations

import bisect
from math import isqrt
import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .barcode import (Barcode, Birth, Death, EntryAbove, EntryBelow, Event, ExitAbove,
                      ExitBelow, HandleSlide, apply_event, compute_barcode, event_kind)
from .complexes import (BasisElement, FilteredComplex, HomotopyCertificate, DegreeEpsMap,
                        Verdict, check_birth_death_shape, check_simple_equivalence)
from .errors import DomainError, HypothesisViolation, IllegalMoveError
from .linalg import inv_mod, inverse
from .scalars import INF, NEG_INF, PiLinear, Scalar, as_action, format_scalar, to_fraction


# ---------------------------------------------------------------------------
# piecewise-linear functions

@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise-linear function through ``(t, value)`` breakpoints,
    constant outside the first and last breakpoint."""

    points: tuple

    def __post_init__(self):
        pts = tuple((Fraction(t), as_action(v)) for t, v in self.points)
        if not pts:
            raise DomainError("a piecewise-linear function needs at least one breakpoint")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise DomainError("breakpoint times must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def constant(cls, v) -> "PLFunction":
        return cls(((0, v),))

    @classmethod
    def linear(cls, t0, v0, t1, v1) -> "PLFunction":
        return cls(((t0, v0), (t1, v1)))

    @property
    def times(self) -> list[Fraction]:
        return [t for t, _ in self.points]

    def __call__(self, t):
        t = Fraction(t)
        pts = self.points
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        i = bisect.bisect_right(self.times, t) - 1
        (t0, v0), (t1, v1) = pts[i], pts[i + 1]
        return v0 + (v1 - v0) * ((t - t0) / (t1 - t0))

    def slope(self, t0, t1):
        """Slope on ``[t0, t1]``, which must lie inside one linear piece."""
        t0, t1 = Fraction(t0), Fraction(t1)
        return (self(t1) - self(t0)) / (t1 - t0)

    def reflect(self, lo, hi) -> "PLFunction":
        """``t -> f(lo + hi - t)``."""
        lo, hi = Fraction(lo), Fraction(hi)
        return PLFunction(tuple((lo + hi - t, v) for t, v in reversed(self.points)))

    def then(self, t, v) -> "PLFunction":
        """Extend with a new breakpoint after the last one."""
        return PLFunction(self.points + ((t, v),))


def _as_pl(f) -> PLFunction:
    if isinstance(f, PLFunction):
        return f
    if isinstance(f, (list, tuple)):
        return PLFunction(tuple(f))
    return PLFunction.constant(f)


# ---------------------------------------------------------------------------
# scripts

@dataclass(frozen=True, eq=False)
class PWCScript:
    """A piecewise-continuous family on ``[t0, t1]``.

    Args:
        t_range: ``(t0, t1)`` rationals.
        initial: complex at ``t0`` (its actions are overridden by trajectories).
        trajectories: name -> :class:`PLFunction`; absent names keep their action.
        window: ``(a_t, b_t)`` pair of PL functions, or ``None`` for the full line.
        events: ``(t, event)`` pairs at distinct times strictly inside the range.
    """

    t_range: tuple
    initial: FilteredComplex
    trajectories: dict = field(default_factory=dict)
    window: tuple | None = None
    events: tuple = ()

    def __post_init__(self):
        t0, t1 = Fraction(self.t_range[0]), Fraction(self.t_range[1])
        if not t0 < t1:
            raise DomainError("empty time range")
        object.__setattr__(self, "t_range", (t0, t1))
        object.__setattr__(self, "trajectories",
                           {k: _as_pl(v) for k, v in dict(self.trajectories).items()})
        if self.window is not None:
            object.__setattr__(self, "window", (_as_pl(self.window[0]), _as_pl(self.window[1])))
        evs = tuple(sorted(((Fraction(t), e) for t, e in self.events), key=lambda te: te[0]))
        times = [t for t, _ in evs]
        if len(set(times)) != len(times):
            raise DomainError("simultaneous events are not allowed")
        if any(not t0 < t < t1 for t in times):
            raise DomainError("event times must lie strictly inside the time range")
        object.__setattr__(self, "events", evs)

    def window_at(self, t) -> tuple:
        if self.window is None:
            return (NEG_INF, INF)
        return (self.window[0](t), self.window[1](t))

    def action(self, name: str, default, t):
        traj = self.trajectories.get(name)
        return default if traj is None else traj(t)


@dataclass(frozen=True, eq=False)
class Frame:
    t: Fraction
    complex: FilteredComplex
    barcode: Barcode
    event: Event | None = None


_REMOVALS = (Death, ExitBelow, ExitAbove)
_INSERTIONS = (Birth, EntryBelow, EntryAbove)


def _at(script: PWCScript, C: FilteredComplex, t, base: dict) -> FilteredComplex:
    acts = {b.name: script.action(b.name, base[b.name], t) for b in C.basis}
    try:
        return C.with_actions(acts, window=script.window_at(t))
    except DomainError as exc:
        raise IllegalMoveError(f"state invalid at t = {t}: {exc}") from None


def _with_trajectory_actions(script: PWCScript, ev: Event, t) -> Event:
    if isinstance(ev, Birth):
        return dataclasses.replace(ev, upper_action=script.action(ev.upper, ev.upper_action, t),
                                   lower_action=script.action(ev.lower, ev.lower_action, t))
    if isinstance(ev, (EntryBelow, EntryAbove)):
        return dataclasses.replace(ev, action=script.action(ev.name, ev.action, t))
    return ev


@dataclass(frozen=True, eq=False)
class EvolveRecord:
    """Frames plus the data needed to reverse each event."""

    frames: list
    inverses: list


def _run(script: PWCScript, samples: Iterable = ()) -> EvolveRecord:
    t0, t1 = script.t_range
    ev_at = dict(script.events)
    times = sorted({t0, t1} | set(ev_at) | {Fraction(s) for s in samples if t0 <= Fraction(s) <= t1})
    base = {b.name: b.action for b in script.initial.basis}
    C = _at(script, script.initial, t0, base)
    frames, inverses = [], []
    for i, t in enumerate(times):
        ev = ev_at.get(t)
        if ev is not None:
            if isinstance(ev, _REMOVALS):
                tm = (times[i - 1] + t) / 2
            elif isinstance(ev, _INSERTIONS):
                tm = (t + times[i + 1]) / 2
            else:
                tm = t
            state = _at(script, C, tm, base)
            ev_here = _with_trajectory_actions(script, ev, tm)
            inverses.append((t, _inverse_event(state, ev_here)))
            try:
                _, after = apply_event(compute_barcode(state), state, ev_here,
                                       window=script.window_at(tm))
            except IllegalMoveError as exc:
                raise IllegalMoveError(f"event {event_kind(ev)} illegal at t = {t}: {exc}") from None
            for b in after.basis:
                base.setdefault(b.name, b.action)
            C = after
        if ev is None or not isinstance(ev, _INSERTIONS):
            C = _at(script, C, t, base)
            frames.append(Frame(t, C, compute_barcode(C), ev))
        else:
            # frame shows the pre-insertion state at t
            pre = _drop_names(C, _inserted_names(ev))
            pre = _at(script, pre, t, base)
            frames.append(Frame(t, pre, compute_barcode(pre), ev))
    return EvolveRecord(frames, inverses)


def _inserted_names(ev) -> set[str]:
    if isinstance(ev, Birth):
        return {ev.upper, ev.lower}
    return {ev.name}


def _drop_names(C: FilteredComplex, names: set[str]) -> FilteredComplex:
    keep = [i for i, b in enumerate(C.basis) if b.name not in names]
    return FilteredComplex([C.basis[i] for i in keep], C.submatrix(keep), C.p,
                           C.grading_modulus, C.window, C.d_degree, check=False)


def evolve(script: PWCScript, samples: Iterable = ()) -> list[Frame]:
    """Frames at ``t0``, every event time, every requested sample time and ``t1``."""
    return _run(script, samples).frames


def final_complex(script: PWCScript) -> FilteredComplex:
    return evolve(script)[-1].complex


def _inverse_event(C: FilteredComplex, ev: Event) -> Event:
    p = C.p
    if isinstance(ev, HandleSlide):
        if ev.source is None:
            return HandleSlide(ev.target, None, inv_mod(ev.k, p))
        return HandleSlide(ev.target, ev.source, (-ev.k) % p)
    if isinstance(ev, Birth):
        return Death(ev.upper, ev.lower)
    if isinstance(ev, Death):
        x, y = C.element(ev.upper), C.element(ev.lower)
        k = int(C.d[C.index(ev.lower), C.index(ev.upper)])
        return Birth(x.name, y.name, x.degree, x.action, y.action, k)
    if isinstance(ev, EntryBelow):
        return ExitBelow(ev.name)
    if isinstance(ev, EntryAbove):
        return ExitAbove(ev.name)
    if isinstance(ev, ExitBelow):
        g = C.element(ev.name)
        row = C.d[C.index(ev.name)]
        return EntryBelow(g.name, g.degree, g.action,
                          {C.basis[j].name: int(c) for j, c in enumerate(row) if c})
    if isinstance(ev, ExitAbove):
        g = C.element(ev.name)
        col = C.d[:, C.index(ev.name)]
        return EntryAbove(g.name, g.degree, g.action,
                          {C.basis[j].name: int(c) for j, c in enumerate(col) if c})
    raise DomainError(f"unknown event {ev!r}")


def reverse_script(script: PWCScript) -> PWCScript:
    """The time-reversed script, starting from the final state of ``script``."""
    rec = _run(script)
    t0, t1 = script.t_range
    final = rec.frames[-1].complex
    events = tuple((t0 + t1 - t, inv) for t, inv in rec.inverses)
    trajs = {k: f.reflect(t0, t1) for k, f in script.trajectories.items()}
    window = None if script.window is None else tuple(f.reflect(t0, t1) for f in script.window)
    return PWCScript((t0, t1), final, trajs, window, events)


def alive_intervals(script: PWCScript) -> dict[str, tuple]:
    """For each generator name, the time interval on which it is present."""
    t0, t1 = script.t_range
    out = {n: [t0, t1] for n in script.initial.names}
    for t, ev in script.events:
        if isinstance(ev, Death):
            out[ev.upper][1] = t
            out[ev.lower][1] = t
        elif isinstance(ev, (ExitBelow, ExitAbove)):
            out[ev.name][1] = t
        elif isinstance(ev, Birth):
            out[ev.upper] = [t, t1]
            out[ev.lower] = [t, t1]
        elif isinstance(ev, (EntryBelow, EntryAbove)):
            out[ev.name] = [t, t1]
    return {k: tuple(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# oscillation and admissibility

@dataclass(frozen=True)
class OscillationProfile:
    """``osc(t) = max H_t - min H_t`` as a nonnegative PL function of time."""

    osc: PLFunction
    t0: Fraction = Fraction(0)

    def __post_init__(self):
        f = _as_pl(self.osc)
        pts = tuple((t, to_fraction(v)) for t, v in f.points)
        if any(v < 0 for _, v in pts):
            raise DomainError("oscillation must be nonnegative")
        object.__setattr__(self, "osc", PLFunction(pts))
        object.__setattr__(self, "t0", Fraction(self.t0))

    @classmethod
    def constant(cls, rate, t0=0) -> "OscillationProfile":
        return cls(PLFunction.constant(rate), t0)

    def breaks(self) -> list[Fraction]:
        return self.osc.times

    def integral(self, u, v) -> Fraction:
        """Exact integral of ``osc`` over ``[u, v]``."""
        u, v = Fraction(u), Fraction(v)
        if v < u:
            return -self.integral(v, u)
        cuts = [u] + [t for t in self.breaks() if u < t < v] + [v]
        return sum(((b - a) * (self.osc(a) + self.osc(b)) / 2 for a, b in zip(cuts, cuts[1:])),
                   Fraction(0))

    def l(self, t) -> Fraction:
        """Accumulated oscillation from ``t0`` to ``t``."""
        return self.integral(self.t0, t)


def _refine(lo, hi, *funcs) -> list[Fraction]:
    cuts = {lo, hi}
    for f in funcs:
        cuts |= {t for t in f.times if lo < t < hi}
    return sorted(cuts)


def _exactify(x):
    try:
        return to_fraction(x), True
    except (TypeError, ValueError, DomainError):
        return mpmath.mpf(float(x)) if not isinstance(x, PiLinear) else \
            mpmath.mpf(x.q) * mpmath.pi + mpmath.mpf(x.r), False


def _sqrt_exact(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def _first_nonpositive(c0, c1, c2, length, exact):
    """Smallest tau in [0, length] with c0 + c1 tau + c2 tau^2 <= 0, or None."""
    if c0 <= 0:
        return 0, exact
    roots = []
    if c2 == 0:
        if c1 != 0:
            roots.append((-c0 / c1, exact))
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc >= 0:
            root = _sqrt_exact(disc) if exact else None
            if root is not None:
                roots += [((-c1 - root) / (2 * c2), True), ((-c1 + root) / (2 * c2), True)]
            else:
                with mpmath.workdps(40):
                    s = mpmath.sqrt(mpmath.mpf(disc.numerator) / disc.denominator
                                    if isinstance(disc, Fraction) else disc)
                    for sg in (-1, 1):
                        num = -c1 + sg * s
                        roots.append((num / (2 * c2), False))
    good = [(r, e) for r, e in roots if 0 <= r <= length]
    return min(good, key=lambda re: re[0]) if good else None


def check_window_admissibility(script_or_window, osc: OscillationProfile, l) -> Verdict:
    """Check ``0 < b_t - a_t < l - l(t)`` on the whole time range.

    ``script_or_window`` is a :class:`PWCScript` or a tuple ``(a_t, b_t, t0, t1)``.
    Exact whenever all data are rational; otherwise the first violation time is
    a high-precision float and ``data["exact"]`` is False.
    """
    if isinstance(script_or_window, PWCScript):
        if script_or_window.window is None:
            return Verdict("hypothesis-violation", ("script has no finite window",))
        a, b = script_or_window.window
        lo, hi = script_or_window.t_range
    else:
        a, b, lo, hi = script_or_window
        a, b, lo, hi = _as_pl(a), _as_pl(b), Fraction(lo), Fraction(hi)
    l = as_action(l)
    cuts = _refine(lo, hi, a, b, osc.osc)
    for u, v in zip(cuts, cuts[1:]):
        L_u = osc.l(u)
        o_u = osc.osc(u)
        s = osc.osc.slope(u, v)
        w_u = b(u) - a(u)
        sigma = (b(v) - a(v) - w_u) / (v - u)
        exact = True
        vals = []
        for x in (l - L_u - w_u, -(o_u + sigma), -s / 2, w_u, sigma):
            xv, ok = _exactify(x)
            exact &= ok
            vals.append(xv)
        f0, f1, f2, w0, w1 = vals
        length = v - u if exact else mpmath.mpf(v - u)
        hit_f = _first_nonpositive(f0, f1, f2, length, exact)
        hit_w = _first_nonpositive(w0, w1, 0, length, exact)
        hits = [(h, "width not positive") for h in (hit_w,) if h is not None]
        hits += [(h, "width reaches l - l(t)") for h in (hit_f,) if h is not None]
        if hits:
            (tau, ok), why = min(hits, key=lambda h: h[0][0])
            t = u + tau if ok else mpmath.mpf(u) + tau
            shown = t if ok else mpmath.nstr(t, 15)
            return Verdict("fail", (f"window constraint fails at t = {shown}: {why}",),
                           {"first_violation": t, "exact": ok})
    return Verdict("pass", ("admissible on the whole time range",), {"exact": True})


def check_speed_law(script: PWCScript, osc: OscillationProfile, pure: Iterable[str] | None = None
                    ) -> Verdict:
    """Chord-speed law: pairwise drift rates bounded by the oscillation rate.

    For every pair of generators alive on a common interval, the relative slope
    ``|l_c' - l_d'|`` must be at most ``osc(t)`` on each linear piece (this is
    equivalent to the integral bound on every subinterval). For each name in
    ``pure`` (default: generators alive on the whole range) the total drift
    ``|l(c(t1)) - l(c(t0))|`` must be at most the total oscillation.
    """
    alive = alive_intervals(script)
    base = {b.name: b.action for b in script.initial.basis}
    for t, ev in script.events:
        if isinstance(ev, Birth):
            base[ev.upper], base[ev.lower] = as_action(ev.upper_action), as_action(ev.lower_action)
        elif isinstance(ev, (EntryBelow, EntryAbove)):
            base[ev.name] = as_action(ev.action)
    traj = {n: script.trajectories.get(n, PLFunction.constant(base[n])) for n in alive}
    msgs = []
    names = sorted(alive)
    for i, c in enumerate(names):
        for d in names[i + 1:]:
            lo = max(alive[c][0], alive[d][0])
            hi = min(alive[c][1], alive[d][1])
            if not lo < hi:
                continue
            cuts = _refine(lo, hi, traj[c], traj[d], osc.osc)
            for u, v in zip(cuts, cuts[1:]):
                rel = abs(traj[c].slope(u, v) - traj[d].slope(u, v))
                if rel > osc.osc(u) or rel > osc.osc(v):
                    msgs.append(f"relative drift of {c} and {d} on [{u}, {v}] exceeds the "
                                f"oscillation rate")
    t0, t1 = script.t_range
    total = osc.integral(t0, t1)
    if pure is None:
        pure = [n for n in names if alive[n] == (t0, t1)]
    for c in pure:
        drift = abs(traj[c](alive[c][1]) - traj[c](alive[c][0]))
        if drift > osc.integral(*alive[c]):
            msgs.append(f"drift of {c} is {format_scalar(drift)} > total oscillation "
                        f"{format_scalar(osc.integral(*alive[c]))}")
    if msgs:
        return Verdict("fail", tuple(msgs))
    return Verdict("pass", (f"speed law holds (total oscillation {format_scalar(total)})",))


# ---------------------------------------------------------------------------
# assembly from grid certificates

@dataclass(frozen=True, eq=False)
class SimpleStep:
    """Certificates for a small-degree equivalence between consecutive grid complexes."""

    phi: DegreeEpsMap
    psi: DegreeEpsMap
    homotopies: HomotopyCertificate | None
    delta: Scalar


@dataclass(frozen=True, eq=False)
class BirthDeathStep:
    """A cancelling pair in ``[a, a + 4 delta)`` appears or disappears."""

    a: Scalar
    delta: Scalar
    phi: DegreeEpsMap | None = None
    psi: DegreeEpsMap | None = None
    homotopies: HomotopyCertificate | None = None


def filtered_slide_factorization(C: FilteredComplex, P) -> list[HandleSlide]:
    """Write a filtered invertible degree-preserving ``P`` as handle-slides.

    Applying the returned slides in order changes the basis of ``C`` by ``P``
    (new basis vector ``j`` = column ``j`` of ``P``).
    """
    p = C.p
    P = np.array(P, dtype=np.int64) % p
    n = len(C)
    acts = C.actions
    names = C.names
    ops: list[tuple] = []  # column operations reducing P to I

    def col_add(s, t, k):  # column t += k * column s
        P[:, t] = (P[:, t] + k * P[:, s]) % p
        ops.append(("add", s, t, k % p))

    def col_scale(t, k):
        P[:, t] = (P[:, t] * k) % p
        ops.append(("scale", t, k % p))

    for level in sorted(set(acts)):
        block = [i for i in range(n) if acts[i] == level]
        for pos, i in enumerate(block):
            if not P[i, i]:
                donor = next((j for j in block[pos + 1:] if P[i, j]), None)
                if donor is None:
                    raise DomainError("matrix is not filtered-invertible")
                col_add(donor, i, 1)
            col_scale(i, inv_mod(int(P[i, i]), p))
            for j in block:
                if j != i and P[i, j]:
                    col_add(i, j, -int(P[i, j]))
    order = sorted(range(n), key=lambda i: (acts[i], i), reverse=True)
    for c in range(n):
        for r in order:
            if r != c and P[r, c]:
                if not acts[r] < acts[c]:
                    raise DomainError("matrix is not filtered")
                col_add(r, c, -int(P[r, c]))
    assert np.array_equal(P, np.eye(n, dtype=np.int64))
    slides = []
    for op in reversed(ops):
        if op[0] == "add":
            _, s, t, k = op
            slides.append(HandleSlide(names[t], names[s], (-k) % p))
        else:
            _, t, k = op
            slides.append(HandleSlide(names[t], None, inv_mod(k, p)))
    return slides


def _split_pair_slides(C: FilteredComplex, x: str, y: str) -> list[HandleSlide]:
    """Handle-slides making the pair ``d x = k y + (lower terms)`` a direct summand."""
    p = C.p
    xi, yi = C.index(x), C.index(y)
    k = int(C.d[yi, xi])
    kinv = inv_mod(k, p)
    slides = []
    for r in np.nonzero(C.d[:, xi])[0]:
        r = int(r)
        if r != yi:
            slides.append(HandleSlide(y, C.basis[r].name, (int(C.d[r, xi]) * kinv) % p))
    D = C
    for s in slides:
        D = _slide(D, s)
    more = []
    for z in np.nonzero(D.d[yi])[0]:
        z = int(z)
        if z != xi:
            more.append(HandleSlide(D.basis[z].name, x, (-int(D.d[yi, z]) * kinv) % p))
    return slides + more


def _slide(C: FilteredComplex, s: HandleSlide) -> FilteredComplex:
    from .barcode import transform_complex
    return transform_complex(C, s)


def assemble_pwc_from_equivalences(grid: Sequence[FilteredComplex], steps: Sequence,
                                   times: Sequence | None = None) -> PWCScript:
    """Build a script through the grid complexes from step certificates.

    Simple steps need the same basis names, in the same order, on both sides;
    the script factors the inverse of phi into handle-slides in the first half
    of the step and interpolates actions linearly in the second half. Birth
    and death steps split the cancelling pair off by handle-slides, move its
    two actions together and cancel it; the remaining generators must match the
    other grid complex by name. Each step is verified first, and a failing step
    raises :class:`HypothesisViolation` (gate) or :class:`IllegalMoveError`.
    """
    if len(steps) != len(grid) - 1:
        raise DomainError("need exactly one step certificate between consecutive grid complexes")
    times = [Fraction(i) for i in range(len(grid))] if times is None else [Fraction(t) for t in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise DomainError("grid times must increase")
    trajs: dict[str, list] = {n: [(times[0], b.action)] for n, b in zip(grid[0].names, grid[0].basis)}
    events: list = []

    def move(name, t, v):
        pts = trajs.setdefault(name, [])
        if pts and pts[-1][0] == t:
            pts[-1] = (t, v)
        else:
            pts.append((t, v))

    for i, step in enumerate(steps):
        C, D = grid[i], grid[i + 1]
        t_a, t_b = times[i], times[i + 1]
        h = t_b - t_a
        if isinstance(step, SimpleStep):
            verdict = check_simple_equivalence(step.phi, step.psi, step.homotopies, step.delta)
            _gate(verdict, i)
            if C.names != D.names:
                raise DomainError(f"step {i}: simple steps need identical basis names")
            slides = filtered_slide_factorization(C, verdict.data["inverse"])
            mid = t_a + h / 2
            for j, s in enumerate(slides):
                events.append((t_a + (j + 1) * (h / 2) / (len(slides) + 1), s))
            for b in C.basis:
                move(b.name, mid, b.action)
            for b in D.basis:
                move(b.name, t_b, b.action)
        elif isinstance(step, BirthDeathStep):
            if len(D) == len(C) - 2:
                big, small, dying = C, D, True
            elif len(D) == len(C) + 2:
                big, small, dying = D, C, False
            else:
                raise DomainError(f"step {i}: birth/death steps change the size by two")
            verdict = check_birth_death_shape(big, small, step.a, step.delta,
                                              step.phi, step.psi, step.homotopies)
            _gate(verdict, i)
            x, y = verdict.data["x"], verdict.data["y"]
            slides = _split_pair_slides(big, x, y)
            split = big
            for s in slides:
                split = _slide(split, s)
            rest = _drop_names(split, {x, y})
            if set(rest.names) != set(small.names):
                raise IllegalMoveError(f"step {i}: remaining generators do not match")
            if rest.with_actions({b.name: b.action for b in small.basis},
                                 check=False).as_named() != small.as_named():
                raise IllegalMoveError(f"step {i}: complement of the pair does not match "
                                       "the other grid complex")
            gx, gy = big.element(x), big.element(y)
            meet = (gx.action + gy.action) / 2
            q = h / 4
            if dying:
                for j, s in enumerate(slides):
                    events.append((t_a + (j + 1) * q / (len(slides) + 1), s))
                for b in big.basis:
                    move(b.name, t_a + q, b.action)
                move(x, t_a + 2 * q, meet)
                move(y, t_a + 2 * q, meet)
                k = int(split.d[split.index(y), split.index(x)])
                events.append((t_a + 2 * q, Death(x, y)))
                for b in small.basis:
                    move(b.name, t_a + 2 * q, big.element(b.name).action)
                    move(b.name, t_b, b.action)
            else:
                for b in small.basis:
                    move(b.name, t_a + q, b.action)
                    move(b.name, t_a + 2 * q, big.element(b.name).action)
                k = int(split.d[split.index(y), split.index(x)])
                events.append((t_a + 2 * q, Birth(x, y, gx.degree, meet, meet, k)))
                trajs[x] = [(t_a + 2 * q, meet), (t_a + 3 * q, gx.action)]
                trajs[y] = [(t_a + 2 * q, meet), (t_a + 3 * q, gy.action)]
                inv = [HandleSlide(s.target, s.source,
                                   (-s.k) % big.p if s.source is not None else inv_mod(s.k, big.p))
                       for s in reversed(slides)]
                for j, s in enumerate(inv):
                    events.append((t_a + 3 * q + (j + 1) * q / (len(inv) + 1), s))
                for b in big.basis:
                    move(b.name, t_b, b.action)
        else:
            raise DomainError(f"step {i}: unknown certificate type")
    initial = FilteredComplex(grid[0].basis, grid[0].d, grid[0].p, grid[0].grading_modulus,
                              (NEG_INF, INF), grid[0].d_degree)
    return PWCScript((times[0], times[-1]), initial,
                     {n: PLFunction(tuple(pts)) for n, pts in trajs.items()}, None, tuple(events))


def _gate(verdict: Verdict, i: int) -> None:
    if verdict.status == "hypothesis-violation":
        raise HypothesisViolation(f"step {i}: " + "; ".join(verdict.messages))
    if not verdict.ok:
        raise IllegalMoveError(f"step {i}: " + "; ".join(verdict.messages))
