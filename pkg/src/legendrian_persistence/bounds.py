"""Closed-form quantitative bounds and an adversarial check of the chord-count bound."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .complexes import FilteredComplex, Verdict
from .errors import DomainError
from .scalars import INF, Scalar, as_action, format_scalar, to_fraction


# ---------------------------------------------------------------------------
# chord-count bound

@dataclass(frozen=True)
class ChordSpectrum:
    """Strictly increasing positive chord lengths with levels ``l <= hbar``."""

    lengths: tuple
    hbar: Scalar = INF
    l: Scalar | None = None

    def __post_init__(self):
        lengths = tuple(as_action(x) for x in self.lengths)
        if any(not x > 0 for x in lengths):
            raise DomainError("chord lengths must be positive")
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise DomainError("chord lengths must be strictly increasing")
        hbar = as_action(self.hbar)
        l = hbar if self.l is None else as_action(self.l)
        if not l <= hbar:
            raise DomainError("action level l must not exceed hbar")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "hbar", hbar)
        object.__setattr__(self, "l", l)


@dataclass(frozen=True)
class BoundResult:
    admissible: bool
    value: int | None
    reason: str

    def __str__(self):
        return str(self.value) if self.admissible else f"inadmissible: {self.reason}"


def main_theorem_bound(betti: Sequence[int], k: int, osc, spectrum: ChordSpectrum) -> BoundResult:
    """Lower bound ``sum(betti) - 2(k-1)`` on chords, valid when ``osc < min(l, l(c_k))``."""
    if k < 1 or k > len(spectrum.lengths):
        raise DomainError("need 1 <= k <= number of chord lengths")
    if any(b < 0 for b in betti):
        raise DomainError("Betti numbers are nonnegative")
    osc = as_action(osc)
    if osc < 0:
        raise DomainError("oscillation is nonnegative")
    ck = spectrum.lengths[k - 1]
    gate = min(spectrum.l, ck)
    if not osc < gate:
        which = "l(c_k)" if ck <= spectrum.l else "the action level l"
        return BoundResult(False, None, f"oscillation {format_scalar(osc)} is not below {which} "
                                        f"= {format_scalar(gate)}")
    return BoundResult(True, sum(betti) - 2 * (k - 1), "gate satisfied")


# ---------------------------------------------------------------------------
# energy constant

def scf_energy_constant(critical_values: Sequence, eps) -> Fraction:
    """``min(eps^2 (2 m_1 - m_q), eps^2 (m_{i+1} - m_i))`` for sorted critical values.

    Requires ``2 m_1 > m_q > 0`` and strictly increasing values.
    """
    vals = [to_fraction(v) for v in critical_values]
    eps = to_fraction(eps)
    if not vals:
        raise DomainError("need at least one critical value")
    if eps <= 0:
        raise DomainError("eps must be positive")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise DomainError("critical values must be distinct and increasing")
    if not 2 * vals[0] > vals[-1] > 0:
        raise DomainError("normalization 2 m_1 > m_q > 0 violated")
    terms = [eps * eps * (2 * vals[0] - vals[-1])]
    terms += [eps * eps * (b - a) for a, b in zip(vals, vals[1:])]
    c = min(terms)
    assert c > 0
    return c


# ---------------------------------------------------------------------------
# exponential enclosures

def exp_enclosure(x, prec: int = 64) -> tuple[Fraction, Fraction]:
    """Rational ``lo <= e^x <= hi`` from interval arithmetic at ``prec`` bits."""
    x = to_fraction(x)
    ctx = mpmath.iv
    saved = ctx.prec
    # the interval context keeps its own precision
    ctx.prec = prec
    try:
        return _bounds(ctx.exp(ctx.mpf(x.numerator) / x.denominator))
    finally:
        ctx.prec = saved


def _bounds(iv) -> tuple[Fraction, Fraction]:
    # exact conversion of the raw endpoints; going through mpf would round them
    lo, hi = iv._mpi_
    return (Fraction(*mpmath.libmp.to_rational(lo)), Fraction(*mpmath.libmp.to_rational(hi)))


def _compare_exp(ratio: Fraction, x: Fraction, max_prec: int = 4096) -> int | None:
    """Sign of ``ratio - e^x`` decided by refining enclosures, or None."""
    prec = 53
    while prec <= max_prec:
        lo, hi = exp_enclosure(x, prec)
        if ratio < lo:
            return -1
        if ratio > hi:
            return 1
        prec *= 2
    return None


def certify_exp_bound(bound, x, upper: bool) -> bool:
    """Whether ``bound >= e^x`` (``upper``) or ``bound <= e^x`` is certified."""
    s = _compare_exp(to_fraction(bound), to_fraction(x))
    return s is not None and (s > 0 if upper else s < 0)


def action_growth_check(pairs: Sequence[tuple], delta, exp_lower=None, exp_upper=None) -> Verdict:
    """Check ``l_out < e^{2 delta} l_in`` for every pair.

    Each comparison is decided by a certified enclosure of ``e^{2 delta}``.
    Optional rational bounds ``exp_lower <= e^{2 delta} <= exp_upper`` are
    certified first and then used directly: ``l_out < exp_lower * l_in``
    proves a pass and ``l_out >= exp_upper * l_in`` proves a violation.
    """
    delta = to_fraction(delta)
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    x = 2 * delta
    for bound, upper in ((exp_lower, False), (exp_upper, True)):
        if bound is not None and not certify_exp_bound(bound, x, upper):
            rel = ">=" if upper else "<="
            raise DomainError(f"supplied bound {bound} is not certified {rel} e^(2 delta)")
    msgs = []
    undecided = []
    for i, (lin, lout) in enumerate(pairs):
        lin, lout = to_fraction(lin), to_fraction(lout)
        if lin <= 0:
            raise DomainError("input actions must be positive")
        ratio = lout / lin
        if delta == 0:
            ok = ratio < 1
        elif exp_lower is not None and ratio < to_fraction(exp_lower):
            ok = True
        elif exp_upper is not None and ratio >= to_fraction(exp_upper):
            ok = False
        else:
            s = _compare_exp(ratio, x)
            if s is None:
                undecided.append(i)
                continue
            ok = s < 0
        if not ok:
            msgs.append(f"pair {i}: output action {format_scalar(lout)} is not below "
                        f"e^(2·{format_scalar(delta)})·{format_scalar(lin)}")
    if msgs:
        return Verdict("fail", tuple(msgs))
    if undecided:
        return Verdict("fail", tuple(f"pair {i}: comparison undecided at maximal precision"
                                     for i in undecided))
    return Verdict("pass", (f"all {len(pairs)} outputs below the growth bound",))


# ---------------------------------------------------------------------------
# trace cobordism lengths

@dataclass(frozen=True)
class ExpScaled:
    """The real number ``coef * e^exponent`` with rational data."""

    coef: Fraction
    exponent: Fraction

    def enclosure(self, prec: int = 64) -> tuple[Fraction, Fraction]:
        lo, hi = exp_enclosure(self.exponent, prec)
        a, b = self.coef * lo, self.coef * hi
        return (min(a, b), max(a, b))

    def decimal(self, digits: int = 15) -> str:
        lo, hi = self.enclosure(4 * digits + 16)
        with mpmath.workdps(digits + 5):
            mid = mpmath.mpf(lo.numerator) / lo.denominator
            return mpmath.nstr(mid, digits)

    def __add__(self, other: "ExpScaled") -> "ExpScaled":
        if self.exponent != other.exponent:
            raise DomainError("can only add values with a common exponent")
        return ExpScaled(self.coef + other.coef, self.exponent)

    def __str__(self):
        return f"{format_scalar(self.coef)}*e^({format_scalar(self.exponent)})"


@dataclass(frozen=True)
class ConformalProfile:
    f_min: Fraction
    f_max: Fraction
    eps: Fraction

    def __post_init__(self):
        for name in ("f_min", "f_max", "eps"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.f_min > self.f_max:
            raise DomainError("f_min must not exceed f_max")
        if self.eps <= 0:
            raise DomainError("eps must be positive")


@dataclass(frozen=True)
class TraceLengths:
    len01: ExpScaled
    len10: ExpScaled
    c0: ExpScaled


def trace_lengths(profile: ConformalProfile) -> TraceLengths:
    """Lengths ``-e^{1+eps} f_min``, ``e^{1+eps} f_max`` (clamped at 0) and
    ``c0 = e^{1+eps} (f_max - f_min)``."""
    e = 1 + profile.eps
    return TraceLengths(ExpScaled(max(-profile.f_min, Fraction(0)), e),
                        ExpScaled(max(profile.f_max, Fraction(0)), e),
                        ExpScaled(profile.f_max - profile.f_min, e))


# ---------------------------------------------------------------------------
# oscillation variants

@dataclass(frozen=True)
class OscillationVariants:
    l: Fraction
    l1: Fraction
    l2: Fraction
    l1_dominates: bool
    l2_dominates: bool


def oscillation_variants(h_max, h_min, g_absmax, t0=0, t1=1) -> OscillationVariants:
    """Accumulated oscillation ``l`` and the alternatives ``l1 = int max H`` and
    ``l2 = l + max|g|`` over ``[t0, t1]``; ``h_max``, ``h_min`` are PL functions."""
    from .pwc import OscillationProfile, PLFunction, _as_pl

    h_max, h_min = _as_pl(h_max), _as_pl(h_min)
    t0, t1 = Fraction(t0), Fraction(t1)
    cuts = sorted({t0, t1} | {t for t in h_max.times + h_min.times if t0 < t < t1})
    spread = tuple((t, to_fraction(h_max(t) - h_min(t))) for t in cuts)
    if any(v < 0 for _, v in spread):
        raise DomainError("max H must dominate min H")
    l = OscillationProfile(PLFunction(spread), t0).integral(t0, t1)
    l1 = sum(((b - a) * (to_fraction(h_max(a)) + to_fraction(h_max(b))) / 2
              for a, b in zip(cuts, cuts[1:])), Fraction(0))
    l2 = l + abs(to_fraction(g_absmax))
    return OscillationVariants(l, l1, l2, l1 >= l, l2 >= l)


# ---------------------------------------------------------------------------
# adversarial persistence simulation

@dataclass(frozen=True)
class SimulationResult:
    min_survivors: int
    bound: BoundResult
    states_explored: int
    witness: tuple
    speed_law_ok: bool

    @property
    def holds(self) -> bool:
        return (not self.bound.admissible) or self.min_survivors >= self.bound.value


def adversarial_min_survivors(betti: Sequence[int], lengths: Sequence, osc, steps: int = 8,
                              k: int = 1, l=INF) -> SimulationResult:
    """Exhaustive worst case of Morse bars surviving at ``t = 1``.

    Model: one Morse generator per Betti class at action 0 and two mixed
    generators per chord, at ``+l_j`` and ``-l_j``. Time runs over ``steps``
    equal grid steps; in each step at most one generator moves, by
    ``osc / steps``, so every pairwise drift rate stays within ``osc``. At a
    grid time a Morse generator may cancel against a mixed generator with the
    same action, one cancellation per grid time. The adversary minimises the
    Morse generators left at ``t = 1``; the optimal schedule is replayed as a
    script and checked against the speed law.
    """
    if steps < 1:
        raise DomainError("need at least one time step")
    osc = to_fraction(osc)
    lens = [to_fraction(x) for x in lengths]
    spectrum = ChordSpectrum(tuple(lens), l=None if l == INF else l)
    bound = main_theorem_bound(betti, k, osc, spectrum)
    n_morse = sum(betti)
    if osc == 0:
        return SimulationResult(n_morse, bound, 1, (), True)
    unit = osc / steps
    # positions in units of osc/steps; only integer positions can ever meet 0
    mixed = tuple(sorted(sign * x / unit for x in lens for sign in (1, -1)))
    start = (tuple([Fraction(0)] * n_morse), mixed)
    explored = 0

    def prune(morse, mix, left):
        keep = tuple(x for x in mix if x.denominator == 1 and
                     any(abs(x - m) <= left for m in morse))
        return morse, keep

    @lru_cache(maxsize=None)
    def best(state, t):
        nonlocal explored
        explored += 1
        morse, mix = state
        if t == steps or not mix:
            return len(morse), ()
        result = None
        moves = [None] + [(c, pos, s) for c, group in (("m", morse), ("x", mix))
                          for pos in sorted(set(group)) for s in (1, -1)]
        for mv in moves:
            m2, x2 = list(morse), list(mix)
            if mv is not None:
                c, pos, s = mv
                group = m2 if c == "m" else x2
                group[group.index(pos)] = pos + s
            nexts = [(tuple(sorted(m2)), tuple(sorted(x2)), None)]
            for pos in sorted(set(m2) & set(x2)):
                a, b = list(m2), list(x2)
                a.remove(pos)
                b.remove(pos)
                nexts.append((tuple(a), tuple(b), pos))
            for nm, nx, kill in nexts:
                val, path = best(prune(nm, nx, steps - t - 1), t + 1)
                if result is None or val < result[0]:
                    result = (val, ((t + 1, mv, kill),) + path)
        return result

    value, path = best(prune(*start, steps), 0)
    ok = _replay_speed_law(n_morse, mixed, path, steps, osc, unit)
    return SimulationResult(value, bound, explored, path, ok)


def _replay_speed_law(n_morse, mixed, path, steps, osc, unit) -> bool:
    """Rebuild named trajectories for a schedule and check the speed law."""
    from .barcode import Death
    from .complexes import FilteredComplex
    from .pwc import OscillationProfile, PLFunction, PWCScript, check_speed_law

    names = [f"m{i}" for i in range(n_morse)] + [f"x{i}" for i in range(len(mixed))]
    pos = {nm: Fraction(0) for nm in names[:n_morse]}
    pos.update({f"x{i}": v for i, v in enumerate(mixed)})
    alive = set(names)
    hist = {nm: [(Fraction(0), v * unit)] for nm, v in pos.items()}
    events = []
    horizon = Fraction(steps + 1, steps)
    for t, mv, kill in path:
        tt = Fraction(t, steps)
        if mv is not None:
            c, p0, s = mv
            who = next(nm for nm in sorted(alive) if nm[0] == c and pos[nm] == p0)
            pos[who] = p0 + s
        for nm in alive:
            hist[nm].append((tt, pos[nm] * unit))
        if kill is not None:
            m = next(nm for nm in sorted(alive) if nm.startswith("m") and pos[nm] == kill)
            x = next(nm for nm in sorted(alive) if nm.startswith("x") and pos[nm] == kill)
            alive -= {m, x}
            events.append((tt if tt < horizon else horizon, Death(m, x)))
    basis = [(nm, 0, hist[nm][0][1]) for nm in names]
    C = FilteredComplex(basis, None, 2, check=False)
    trajs = {nm: PLFunction(tuple(pts)) for nm, pts in hist.items()}
    script = PWCScript((0, horizon), C, trajs, None, tuple(events))
    return check_speed_law(script, OscillationProfile.constant(osc), pure=()).ok
