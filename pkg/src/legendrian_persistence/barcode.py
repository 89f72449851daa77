"""Persistence barcodes of filtered complexes and the simple-bifurcation rules."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

from .complexes import BasisElement, FilteredComplex
from .errors import DomainError, IllegalMoveError
from .linalg import as_matrix, inv_mod, inverse, matmul, nullspace, rank, solve
from .scalars import INF, Scalar, as_action, format_scalar


@dataclass(frozen=True, order=True)
class Bar:
    """Half-open interval ``[start, end)`` in homological degree ``degree``."""

    degree: int
    start: Scalar
    end: Scalar

    def __post_init__(self):
        object.__setattr__(self, "start", as_action(self.start))
        object.__setattr__(self, "end", as_action(self.end))
        if not self.start < self.end:
            raise DomainError(f"empty bar [{self.start}, {self.end})")

    @property
    def infinite(self) -> bool:
        return self.end == INF

    @property
    def length(self):
        return self.end - self.start

    def __str__(self):
        return f"[{format_scalar(self.start)}, {format_scalar(self.end)}) in degree {self.degree}"


@dataclass(frozen=True)
class Barcode:
    """Sorted multiset of bars together with the action window they live in."""

    bars: tuple[Bar, ...]
    window: tuple = (-INF, INF)

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(sorted(self.bars)))
        object.__setattr__(self, "window", (as_action(self.window[0]), as_action(self.window[1])))

    def __len__(self):
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def infinite(self, degree: int | None = None) -> list[Bar]:
        return [b for b in self.bars if b.infinite and (degree is None or b.degree == degree)]

    def finite(self) -> list[Bar]:
        return [b for b in self.bars if not b.infinite]

    def degrees(self) -> list[int]:
        return sorted({b.degree for b in self.bars})

    def replace_bars(self, bars: Iterable[Bar], window=None) -> "Barcode":
        return Barcode(tuple(bars), self.window if window is None else window)

    def __str__(self):
        return "\n".join(str(b) for b in self.bars) or "(empty barcode)"


# ---------------------------------------------------------------------------
# computation by column reduction

def filtration_order(C: FilteredComplex) -> list[int]:
    """Basis indices sorted by (action, index)."""
    return sorted(range(len(C)), key=lambda i: (C.basis[i].action, i))


def reduce_boundary(C: FilteredComplex) -> tuple[list[int], dict[int, int], np.ndarray]:
    """Standard persistence reduction in filtration order.

    Returns the order, the pairing ``column -> low row`` (indices into the
    order) and the reduced matrix in that order.
    """
    order = filtration_order(C)
    p = C.p
    R = C.d[np.ix_(order, order)].copy()
    n = len(order)
    low_of: dict[int, int] = {}
    owner: dict[int, int] = {}
    for j in range(n):
        while True:
            nz = np.nonzero(R[:, j])[0]
            if nz.size == 0:
                break
            low = int(nz[-1])
            other = owner.get(low)
            if other is None:
                owner[low] = j
                low_of[j] = low
                break
            factor = (R[low, j] * inv_mod(int(R[low, other]), p)) % p
            R[:, j] = (R[:, j] - factor * R[:, other]) % p
    return order, low_of, R


def compute_barcode(C: FilteredComplex) -> Barcode:
    """Barcode of ``C``: paired columns give finite bars, unpaired cycles infinite ones."""
    order, low_of, _ = reduce_boundary(C)
    lows = set(low_of.values())
    bars = []
    for j, idx in enumerate(order):
        e = C.basis[idx]
        if j in low_of:
            y = C.basis[order[low_of[j]]]
            bars.append(Bar(C.degree_class(y.degree), y.action, e.action))
        elif j not in lows:
            bars.append(Bar(C.degree_class(e.degree), e.action, INF))
    return Barcode(tuple(bars), C.window)


# ---------------------------------------------------------------------------
# rank characterization (independent oracle)

class _Ranks:
    """Ranks of maps H(C^{<c0}) -> H(C^{<c1}) in a single degree class."""

    def __init__(self, C: FilteredComplex, k: int):
        self.C = C
        self.k = k
        cls = C.degree_class
        self.deg_k = [i for i, b in enumerate(C.basis) if cls(b.degree) == k]
        self.deg_up = [i for i, b in enumerate(C.basis) if cls(b.degree) == cls(k - C.d_degree)]
        self.deg_down = [i for i, b in enumerate(C.basis) if cls(b.degree) == cls(k + C.d_degree)]

    def _below(self, idx, c):
        return [i for i in idx if self.C.basis[i].action < c]

    def cycles(self, c) -> np.ndarray:
        """Cycles of C^{<c} in degree k, as columns in the degree-k coordinates."""
        C, p = self.C, self.C.p
        cols = self._below(self.deg_k, c)
        pos = {i: r for r, i in enumerate(self.deg_k)}
        if not cols:
            return np.zeros((len(self.deg_k), 0), dtype=np.int64)
        if self.deg_down:
            ker = nullspace(C.d[np.ix_(self.deg_down, cols)], p)
        else:
            ker = np.eye(len(cols), dtype=np.int64)
        out = np.zeros((len(self.deg_k), ker.shape[1]), dtype=np.int64)
        for r, i in enumerate(cols):
            out[pos[i]] = ker[r]
        return out

    def boundaries(self, c) -> np.ndarray:
        cols = self._below(self.deg_up, c)
        if not cols:
            return np.zeros((len(self.deg_k), 0), dtype=np.int64)
        return self.C.d[np.ix_(self.deg_k, cols)]

    def rank_map(self, c0, c1) -> int:
        p = self.C.p
        Z = self.cycles(c0)
        B = self.boundaries(c1)
        dz = rank(Z, p) if Z.size else 0
        db = rank(B, p) if B.size else 0
        both = np.hstack([Z, B])
        dsum = rank(both, p) if both.size else 0
        return dz - (dz + db - dsum)

    def homology(self, c) -> int:
        return self.rank_map(c, c)


def rank_oracle_barcode(C: FilteredComplex) -> Barcode:
    """Barcode reconstructed purely from ranks of inclusion-induced maps.

    Bars starting at s count ``dim coker(H(C^{<s}) -> H(C^{<s+eps}))``; those
    starting at s and surviving past level l count
    ``rank phi_{s+eps, l+eps} - rank phi_{s, l+eps}``. eps is half the
    minimal gap between distinct action values.
    """
    values = sorted(set(b.action for b in C.basis))
    if not values:
        return Barcode((), C.window)
    gaps = [b - a for a, b in zip(values, values[1:])]
    eps = min(gaps) / 2 if gaps else Fraction(1)
    bars = []
    for k in sorted({C.degree_class(b.degree) for b in C.basis}):
        R = _Ranks(C, k)

        def persist(s, l):
            return R.rank_map(s + eps, l + eps) - R.rank_map(s, l + eps)

        for i, s in enumerate(values):
            starts = R.homology(s + eps) - R.rank_map(s, s + eps)
            if not starts:
                continue
            prev = persist(s, s)
            assert prev == starts
            for e in values[i + 1:]:
                cur = persist(s, e)
                bars += [Bar(k, s, e)] * (prev - cur)
                prev = cur
            bars += [Bar(k, s, INF)] * prev
    return Barcode(tuple(bars), C.window)


# ---------------------------------------------------------------------------
# simple bifurcations

@dataclass(frozen=True)
class HandleSlide:
    """Basis change ``target <- target + k*source`` (or ``target <- k*target`` when
    ``source`` is None). Requires equal degrees and ``l(source) <= l(target)``."""

    target: str
    source: str | None = None
    k: int = 1


@dataclass(frozen=True)
class Birth:
    """A cancelling pair ``d upper = k * lower`` appears as a direct summand."""

    upper: str
    lower: str
    upper_degree: int
    upper_action: Scalar
    lower_action: Scalar
    k: int = 1


@dataclass(frozen=True)
class Death:
    """A direct-summand pair ``d upper = k * lower`` disappears."""

    upper: str
    lower: str


@dataclass(frozen=True)
class ExitBelow:
    """The generator of minimal action leaves through the bottom of the window."""

    name: str


@dataclass(frozen=True)
class ExitAbove:
    """The generator of maximal action leaves through the top of the window."""

    name: str


@dataclass(frozen=True)
class EntryBelow:
    """A generator enters below every other one; ``row`` gives its coefficient
    in the differential of each existing generator."""

    name: str
    degree: int
    action: Scalar
    row: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "row", _freeze(self.row))


@dataclass(frozen=True)
class EntryAbove:
    """A generator enters above every other one with differential ``column``."""

    name: str
    degree: int
    action: Scalar
    column: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "column", _freeze(self.column))


def _freeze(m) -> tuple:
    items = m.items() if isinstance(m, dict) else m
    return tuple(sorted((str(k), int(v)) for k, v in items))


Event = Union[HandleSlide, Birth, Death, ExitBelow, ExitAbove, EntryBelow, EntryAbove]
EVENT_KINDS = {
    "handle_slide": HandleSlide, "birth": Birth, "death": Death, "exit_below": ExitBelow,
    "exit_above": ExitAbove, "entry_below": EntryBelow, "entry_above": EntryAbove,
}


def event_kind(event: Event) -> str:
    for k, cls in EVENT_KINDS.items():
        if isinstance(event, cls):
            return k
    raise DomainError(f"unknown event {event!r}")


def _take(bars: list[Bar], bar: Bar) -> None:
    try:
        bars.remove(bar)
    except ValueError:
        raise IllegalMoveError(f"expected bar {bar} is missing") from None


def _drop(C: FilteredComplex, names: set[str], window=None) -> FilteredComplex:
    keep = [i for i, b in enumerate(C.basis) if b.name not in names]
    return FilteredComplex([C.basis[i] for i in keep], C.submatrix(keep), C.p,
                           C.grading_modulus, C.window if window is None else window, C.d_degree)


def _extended(C: FilteredComplex, elem: BasisElement, col, row, window) -> FilteredComplex:
    n = len(C)
    d = np.zeros((n + 1, n + 1), dtype=np.int64)
    d[:n, :n] = C.d
    d[:n, n] = col
    d[n, :n] = row
    return FilteredComplex(list(C.basis) + [elem], d, C.p, C.grading_modulus, window, C.d_degree)


def _vector(C: FilteredComplex, mapping) -> np.ndarray:
    v = np.zeros(len(C), dtype=np.int64)
    for name, c in mapping:
        v[C.index(name)] = c
    return v % C.p


def _distinct_action(C: FilteredComplex, a, what: str) -> None:
    if any(b.action == a for b in C.basis):
        raise IllegalMoveError(f"{what}: action {format_scalar(a)} collides with an existing action")


def _min_level(C: FilteredComplex, target: np.ndarray, allowed) -> Scalar | None:
    """Smallest action value v with ``target`` in the span of columns ``allowed(v)``."""
    for v in sorted(set(b.action for b in C.basis)):
        cols = allowed(v)
        if cols.shape[1] and solve(cols, target, C.p) is not None:
            return v
        if not cols.shape[1] and not np.any(target):
            return v
    return None


def transform_complex(C: FilteredComplex, event: Event, window=None) -> FilteredComplex:
    """The complex after ``event`` (no barcode bookkeeping)."""
    return _apply(C, event, window)[0]


def _apply(C: FilteredComplex, ev: Event, window) -> tuple[FilteredComplex, callable]:
    p = C.p
    a, b = C.window
    if isinstance(ev, HandleSlide):
        t = C.index(ev.target)
        E = np.eye(len(C), dtype=np.int64)
        k = ev.k % p
        if ev.source is None:
            if k == 0:
                raise IllegalMoveError("rescaling by zero")
            E[t, t] = k
        else:
            s = C.index(ev.source)
            if s == t:
                raise IllegalMoveError("handle-slide of a generator onto itself")
            if C.basis[s].degree != C.basis[t].degree:
                raise IllegalMoveError("handle-slide between different degrees")
            if not C.basis[s].action <= C.basis[t].action:
                raise IllegalMoveError("handle-slide would raise action")
            E[s, t] = k
        d = matmul(matmul(inverse(E, p), C.d, p), E, p)
        new = C.replace(d=d, window=window or C.window)
        return new, lambda bars: bars

    if isinstance(ev, Birth):
        for nm in (ev.upper, ev.lower):
            if nm in C._index:
                raise IllegalMoveError(f"birth: name {nm!r} already present")
        ua, la = as_action(ev.upper_action), as_action(ev.lower_action)
        if not la < ua:
            raise IllegalMoveError("birth: lower action must be below upper action")
        if ev.k % p == 0:
            raise IllegalMoveError("birth: coefficient must be a unit")
        _distinct_action(C, ua, "birth")
        _distinct_action(C, la, "birth")
        x = BasisElement(ev.upper, ev.upper_degree, ua)
        y = BasisElement(ev.lower, ev.upper_degree + C.d_degree, la)
        n = len(C)
        d = np.zeros((n + 2, n + 2), dtype=np.int64)
        d[:n, :n] = C.d
        d[n + 1, n] = ev.k % p
        new = FilteredComplex(list(C.basis) + [x, y], d, p, C.grading_modulus,
                              window or C.window, C.d_degree)
        bar = Bar(C.degree_class(y.degree), la, ua)
        return new, lambda bars: bars + [bar]

    if isinstance(ev, Death):
        xi, yi = C.index(ev.upper), C.index(ev.lower)
        col = C.d[:, xi].copy()
        k = int(col[yi])
        col[yi] = 0
        if not k or np.any(col) or np.any(C.d[:, yi]) or np.any(C.d[xi]) or \
                np.count_nonzero(C.d[yi]) != 1:
            raise IllegalMoveError("death: pair is not a cancelling direct summand")
        x, y = C.basis[xi], C.basis[yi]
        new = _drop(C, {x.name, y.name}, window)
        bar = Bar(C.degree_class(y.degree), y.action, x.action)

        def rule(bars):
            _take(bars, bar)
            return bars
        return new, rule

    if isinstance(ev, ExitBelow):
        gi = C.index(ev.name)
        g = C.basis[gi]
        if any(o.action <= g.action for i, o in enumerate(C.basis) if i != gi):
            raise IllegalMoveError("exit below: generator is not the unique minimum")
        rest = [o.action for i, o in enumerate(C.basis) if i != gi]
        new = _drop(C, {g.name}, window or (min(rest) if rest else b, b))
        k = C.degree_class(g.degree)

        def rule(bars):
            mine = [x for x in bars if x.degree == k and x.start == g.action]
            if len(mine) != 1:
                raise IllegalMoveError("exit below: no unique bar starts at the generator")
            bars.remove(mine[0])
            if not mine[0].infinite:
                bars.append(Bar(C.degree_class(g.degree - C.d_degree), mine[0].end, INF))
            return bars
        return new, rule

    if isinstance(ev, ExitAbove):
        gi = C.index(ev.name)
        g = C.basis[gi]
        if any(o.action >= g.action for i, o in enumerate(C.basis) if i != gi):
            raise IllegalMoveError("exit above: generator is not the unique maximum")
        new = _drop(C, {g.name}, window or (a, g.action))

        def rule(bars):
            ending = [x for x in bars if x.end == g.action]
            if ending:
                bars.remove(ending[0])
                bars.append(Bar(ending[0].degree, ending[0].start, INF))
            else:
                _take(bars, Bar(C.degree_class(g.degree), g.action, INF))
            return bars
        return new, rule

    if isinstance(ev, EntryBelow):
        ga = as_action(ev.action)
        if ev.name in C._index:
            raise IllegalMoveError(f"entry: name {ev.name!r} already present")
        if any(o.action <= ga for o in C.basis):
            raise IllegalMoveError("entry below: action must be below every existing action")
        row = _vector(C, ev.row)
        if np.any(matmul(row.reshape(1, -1), C.d, p)):
            raise IllegalMoveError("entry below: row does not satisfy r d = 0")
        elem = BasisElement(ev.name, ev.degree, ga)
        new = _extended(C, elem, np.zeros(len(C), dtype=np.int64), row,
                        window or (min(a, ga), b))
        gi = len(C)
        target = np.zeros(len(new), dtype=np.int64)
        target[gi] = 1

        def allowed(v):
            cols = [i for i, o in enumerate(new.basis) if o.action <= v]
            return new.d[:, cols]

        e = _min_level(new, target, allowed)
        k = C.degree_class(ev.degree)

        def rule(bars):
            if e is None:
                return bars + [Bar(k, ga, INF)]
            _take(bars, Bar(C.degree_class(ev.degree - C.d_degree), e, INF))
            return bars + [Bar(k, ga, e)]
        return new, rule

    if isinstance(ev, EntryAbove):
        ga = as_action(ev.action)
        if ev.name in C._index:
            raise IllegalMoveError(f"entry: name {ev.name!r} already present")
        if any(o.action >= ga for o in C.basis):
            raise IllegalMoveError("entry above: action must be above every existing action")
        col = _vector(C, ev.column)
        if np.any(matmul(C.d, col.reshape(-1, 1), p)):
            raise IllegalMoveError("entry above: column is not a cycle")
        elem = BasisElement(ev.name, ev.degree, ga)
        if window is None:
            window = (a, b if ga < b else ga + 1)
        new = _extended(C, elem, col, np.zeros(len(C), dtype=np.int64), window)
        k = C.degree_class(ev.degree)
        is_boundary = len(C) and solve(C.d, col, p) is not None

        def allowed(v):
            cols = [i for i, o in enumerate(C.basis) if o.action <= v]
            return np.hstack([np.eye(len(C), dtype=np.int64)[:, cols], C.d])

        def rule(bars):
            if not np.any(col) or is_boundary:
                return bars + [Bar(k, ga, INF)]
            s = _min_level(C, col, allowed)
            _take(bars, Bar(C.degree_class(ev.degree + C.d_degree), s, INF))
            return bars + [Bar(C.degree_class(ev.degree + C.d_degree), s, ga)]
        return new, rule

    raise DomainError(f"unknown event {ev!r}")


def apply_event(bc: Barcode, C: FilteredComplex, event: Event, window=None,
                verify: bool = True) -> tuple[Barcode, FilteredComplex]:
    """Apply a simple bifurcation to ``C`` and transform ``bc`` by its rule.

    ``bc`` must be the barcode of ``C``. The rule-transformed barcode is
    cross-checked against recomputation on the new complex when ``verify``.
    """
    if verify and bc.bars != compute_barcode(C).bars:
        raise DomainError("barcode does not belong to the given complex")
    new, rule = _apply(C, event, window)
    out = Barcode(tuple(rule(list(bc.bars))), new.window)
    if verify:
        direct = compute_barcode(new)
        if direct.bars != out.bars:
            raise AssertionError(f"event rule disagrees with recomputation for {event!r}")
    return out, new
