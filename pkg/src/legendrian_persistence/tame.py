"""Augmentations, tame moves, stable tame isomorphisms, linearization and destabilization."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .algebra import (UNIT, FilteredDGA, FreeElement, Generator, Word, degree_equal)
from .errors import (DomainError, IllegalMoveError, SearchSpaceError,
                     UndefinedAugmentationError)
from .linalg import inv_mod
from .scalars import Scalar, as_action


# ---------------------------------------------------------------------------
# augmentations

@dataclass(frozen=True, eq=False)
class Augmentation:
    """A unital map from generators to F_p.

    The domain is exactly the set of keys of ``values``; evaluating on a word
    that contains any other generator raises ``UndefinedAugmentationError``.
    """

    values: Mapping[str, int]
    p: int = 2

    def __post_init__(self):
        object.__setattr__(self, "values", {k: int(v) % self.p for k, v in dict(self.values).items()})

    def __call__(self, name: str) -> int:
        try:
            return self.values[name]
        except KeyError:
            raise UndefinedAugmentationError(f"augmentation undefined on {name!r}") from None

    def defined_on(self, name: str) -> bool:
        return name in self.values

    def word(self, word: Word) -> int:
        out = 1
        for g in word:
            out = (out * self(g)) % self.p
            if out == 0:
                break
        return out

    def evaluate(self, e: FreeElement) -> int:
        total = 0
        for w, c in e.items():
            total += c * self.word(w)
        return total % self.p

    def support(self) -> dict[str, int]:
        return {k: v for k, v in self.values.items() if v}

    def __eq__(self, other):
        if not isinstance(other, Augmentation):
            return NotImplemented
        return self.p == other.p and self.values == other.values

    def __hash__(self):
        return hash((self.p, frozenset(self.values.items())))

    def __repr__(self):
        return f"Augmentation({self.support()}, p={self.p})"


def zero_augmentation(dga: FilteredDGA) -> Augmentation:
    return Augmentation({n: 0 for n in dga.names}, dga.p)


def augmentation_violations(dga: FilteredDGA, eps: Augmentation) -> list[str]:
    """Reasons why ``eps`` is not an augmentation of ``dga`` (empty when valid)."""
    out = []
    if eps.p != dga.p:
        out.append(f"augmentation over F_{eps.p} for DGA over F_{dga.p}")
        return out
    for name, v in eps.values.items():
        if not dga.has(name):
            out.append(f"augmentation assigns unknown generator {name!r}")
        elif v and not degree_equal(dga.gen(name).degree, 0, dga.grading_modulus):
            out.append(f"augmentation nonzero on {name} of degree {dga.gen(name).degree}")
    for name in dga.names:
        if not eps.defined_on(name):
            continue
        dx = dga.differential[name]
        if not dx.letters() <= set(eps.values):
            continue
        if eps.evaluate(dx):
            out.append(f"ε(∂{name}) ≠ 0")
    return out


def is_augmentation(dga: FilteredDGA, eps: Augmentation) -> bool:
    return not augmentation_violations(dga, eps)


def find_augmentations(dga: FilteredDGA, max_candidates: int = 1 << 16) -> list[Augmentation]:
    """All graded augmentations by exhaustive search over degree-0 generators.

    Raises:
        SearchSpaceError: if ``p ** (#degree-0 generators)`` exceeds ``max_candidates``.
    """
    zero_deg = [g.name for g in dga.generators
                if degree_equal(g.degree, 0, dga.grading_modulus)]
    count = dga.p ** len(zero_deg)
    if count > max_candidates:
        raise SearchSpaceError(
            f"{count} candidate augmentations exceed the cap {max_candidates}")
    base = {n: 0 for n in dga.names}
    found = []
    for vals in itertools.product(range(dga.p), repeat=len(zero_deg)):
        cand = dict(base)
        cand.update(zip(zero_deg, vals))
        eps = Augmentation(cand, dga.p)
        if all(eps.evaluate(dga.differential[n]) == 0 for n in dga.names):
            found.append(eps)
    return found


def psi(dga: FilteredDGA, eps: Augmentation, inverse: bool = False) -> dict[str, FreeElement]:
    """Generator images of the conjugating automorphism g -> g - eps(g) (or its inverse)."""
    sign = 1 if inverse else -1
    images = {}
    for n in dga.names:
        v = eps.values.get(n, 0)
        img = dga.element(n)
        if v:
            img = img + FreeElement.one(dga.p, dga.context) * (sign * v)
        images[n] = img
    return images


def conjugate_by_augmentation(dga: FilteredDGA, eps: Augmentation) -> FilteredDGA:
    """The DGA with differential Psi_eps o d o Psi_eps^{-1}."""
    bad = augmentation_violations(dga, eps)
    if bad:
        raise DomainError("invalid augmentation: " + "; ".join(bad))
    fwd = psi(dga, eps)
    new = {}
    for n in dga.names:
        # Psi^{-1}(n) = n + const and d(const) = 0, so only Psi acts on d(n).
        new[n] = dga.differential[n].substitute(fwd)
    return dga.replace(differential=new)


# ---------------------------------------------------------------------------
# tame moves

@dataclass(frozen=True)
class Elementary:
    """Tame automorphism x -> k x + w with w free of x and action(w) < action(x)."""

    x: str
    k: int = 1
    w: FreeElement | str | None = None


@dataclass(frozen=True)
class Stabilize:
    """Add generators ``lower`` and ``upper`` with d(upper) = lower."""

    lower: str
    upper: str
    lower_degree: int = 0
    lower_action: Scalar = 1
    upper_action: Scalar = 2
    flavor: str = "pure"


@dataclass(frozen=True)
class Destabilize:
    """Remove a split pair with d(upper) = lower."""

    lower: str
    upper: str


@dataclass(frozen=True)
class Identify:
    """Rename generators (any bijection) and optionally reassign actions."""

    renaming: Mapping[str, str] = field(default_factory=dict)
    actions: Mapping[str, Scalar] = field(default_factory=dict)

    def __hash__(self):
        return hash((frozenset(self.renaming.items()), frozenset(self.actions.items())))


TameMove = Union[Elementary, Stabilize, Destabilize, Identify]


@dataclass(frozen=True)
class STI:
    """An ordered list of tame moves."""

    moves: tuple = ()

    def __iter__(self):
        return iter(self.moves)

    def __len__(self):
        return len(self.moves)

    def then(self, other: "STI") -> "STI":
        return STI(tuple(self.moves) + tuple(other.moves))


def _elementary_images(dga: FilteredDGA, move: Elementary) -> tuple[dict, dict]:
    g = dga.gen(move.x)
    p = dga.p
    k = move.k % p
    if k == 0:
        raise IllegalMoveError(f"scaling factor {move.k} is not a unit in F_{p}")
    w = dga.element(move.w) if move.w is not None else FreeElement.zero(p, dga.context)
    if move.x in w.letters():
        raise IllegalMoveError(f"w must not involve {move.x}")
    if w and not dga.action(w) < g.action:
        raise IllegalMoveError(f"illegal action bound: ℓ(w) ≥ ℓ({move.x})")
    if any(not degree_equal(dga.word_degree(word), g.degree, dga.grading_modulus) for word in w.words()):
        raise IllegalMoveError(f"w is not homogeneous of degree |{move.x}|")
    x = dga.element(move.x)
    fwd = {move.x: x * k + w}
    kinv = inv_mod(k, p)
    bwd = {move.x: (x - w) * kinv}
    return fwd, bwd


def apply_tame(dga: FilteredDGA, move: TameMove) -> FilteredDGA:
    """Apply one move; the result is validated and returned.

    Elementary moves conjugate the differential to Phi^{-1} o d o Phi.
    """
    if isinstance(move, Elementary):
        fwd, bwd = _elementary_images(dga, move)
        new = {}
        for n in dga.names:
            img = fwd.get(n)
            dimg = dga.apply_differential(img) if img is not None else dga.differential[n]
            new[n] = dimg.substitute(bwd)
        out = dga.replace(differential=new)
    elif isinstance(move, Stabilize):
        for n in (move.lower, move.upper):
            if dga.has(n):
                raise IllegalMoveError(f"name collision: {n} already exists")
        if move.lower == move.upper:
            raise IllegalMoveError("stabilization needs two distinct names")
        la, ua = as_action(move.lower_action), as_action(move.upper_action)
        if not la < ua:
            raise IllegalMoveError("stabilization requires ℓ(lower) < ℓ(upper)")
        lo = Generator(move.lower, move.lower_degree, la, move.flavor)
        up = Generator(move.upper, move.lower_degree + 1, ua, move.flavor)
        diff = dict(dga.differential)
        diff[move.upper] = FreeElement.gen(move.lower, dga.p)
        diff[move.lower] = FreeElement.zero(dga.p)
        out = dga.replace(generators=dga.generators + (lo, up), differential=diff)
    elif isinstance(move, Destabilize):
        _check_destabilizable(dga, move.lower, move.upper)
        keep = tuple(g for g in dga.generators if g.name not in (move.lower, move.upper))
        diff = {g.name: dga.differential[g.name] for g in keep}
        out = dga.replace(generators=keep, differential=diff)
    elif isinstance(move, Identify):
        ren = dict(move.renaming)
        for a in ren:
            dga.gen(a)
        mapping = {n: ren.get(n, n) for n in dga.names}
        if len(set(mapping.values())) != len(mapping):
            raise IllegalMoveError("identification is not a bijection on generator names")
        acts = dict(move.actions)
        gens = []
        for g in dga.generators:
            new_name = mapping[g.name]
            gens.append(Generator(new_name, g.degree, acts.get(new_name, g.action), g.flavor))
        images = {n: FreeElement.gen(m, dga.p) for n, m in mapping.items()}
        diff = {mapping[n]: FreeElement(dga.differential[n].substitute(images).terms, dga.p)
                for n in dga.names}
        out = FilteredDGA(tuple(gens), diff, dga.p, dga.grading_modulus, dga.action_level)
    else:
        raise IllegalMoveError(f"unknown move {move!r}")
    report = out.validate()
    if not report.ok:
        raise IllegalMoveError(f"move {move!r} produced an invalid DGA: {report}")
    return out


def _check_destabilizable(dga: FilteredDGA, lower: str, upper: str):
    dga.gen(lower)
    dga.gen(upper)
    if dga.differential[upper] != FreeElement.gen(lower, dga.p):
        raise IllegalMoveError(f"destabilize target not of form ∂{upper} = {lower} exactly")
    if dga.differential[lower]:
        raise IllegalMoveError(f"∂{lower} must vanish to destabilize")
    for n in dga.names:
        if n in (lower, upper):
            continue
        if {lower, upper} & dga.differential[n].letters():
            raise IllegalMoveError(f"∂{n} still involves the pair ({upper}, {lower})")


def apply_sti(dga: FilteredDGA, sti: STI | Sequence[TameMove]) -> FilteredDGA:
    for move in sti:
        dga = apply_tame(dga, move)
    return dga


def invert_move(dga: FilteredDGA, move: TameMove) -> TameMove:
    """The move undoing ``move`` when applied to ``apply_tame(dga, move)``."""
    if isinstance(move, Elementary):
        p = dga.p
        kinv = inv_mod(move.k % p, p)
        w = dga.element(move.w) if move.w is not None else FreeElement.zero(p)
        return Elementary(move.x, kinv, FreeElement((-w * kinv).terms, p))
    if isinstance(move, Stabilize):
        return Destabilize(move.lower, move.upper)
    if isinstance(move, Destabilize):
        lo, up = dga.gen(move.lower), dga.gen(move.upper)
        return Stabilize(move.lower, move.upper, lo.degree, lo.action, up.action, lo.flavor)
    if isinstance(move, Identify):
        ren = {n: move.renaming.get(n, n) for n in dga.names}
        back = {v: k for k, v in ren.items() if k != v}
        actions = {g.name: g.action for g in dga.generators
                   if ren[g.name] in move.actions}
        return Identify(back, actions)
    raise IllegalMoveError(f"unknown move {move!r}")


def invert_sti(dga: FilteredDGA, sti: STI | Sequence[TameMove]) -> STI:
    """Inverse STI of ``sti`` started at ``dga``."""
    inv = []
    for move in sti:
        inv.append(invert_move(dga, move))
        dga = apply_tame(dga, move)
    return STI(tuple(reversed(inv)))


def transport_augmentation(dga: FilteredDGA, move: TameMove, eps: Augmentation) -> Augmentation:
    """Augmentation of ``apply_tame(dga, move)`` obtained by pulling back ``eps``."""
    if isinstance(move, Elementary):
        fwd, _ = _elementary_images(dga, move)
        vals = dict(eps.values)
        vals[move.x] = eps.evaluate(fwd[move.x])
        return Augmentation(vals, eps.p)
    if isinstance(move, Stabilize):
        vals = dict(eps.values)
        vals[move.lower] = 0
        vals[move.upper] = 0
        return Augmentation(vals, eps.p)
    if isinstance(move, Destabilize):
        return Augmentation({k: v for k, v in eps.values.items()
                             if k not in (move.lower, move.upper)}, eps.p)
    if isinstance(move, Identify):
        return Augmentation({move.renaming.get(k, k): v for k, v in eps.values.items()}, eps.p)
    raise IllegalMoveError(f"unknown move {move!r}")


def transport_along(dga: FilteredDGA, sti, eps: Augmentation) -> tuple[FilteredDGA, Augmentation]:
    for move in sti:
        eps = transport_augmentation(dga, move, eps)
        dga = apply_tame(dga, move)
    return dga, eps


# ---------------------------------------------------------------------------
# linearization

def linearize(dga: FilteredDGA, eps: Augmentation):
    """Complex on the generators with differential the word-length-1 part of d^eps."""
    from .complexes import FilteredComplex

    conj = conjugate_by_augmentation(dga, eps)
    names = dga.names
    index = {n: i for i, n in enumerate(names)}
    mat = np.zeros((len(names), len(names)), dtype=np.int64)
    for n in names:
        for w, c in conj.differential[n].homogeneous_part(1).items():
            mat[index[w[0]], index[n]] = c
    basis = [(g.name, g.degree, g.action) for g in dga.generators]
    return FilteredComplex(basis, mat, p=dga.p, grading_modulus=dga.grading_modulus)


# ---------------------------------------------------------------------------
# Chekanov destabilization

def destabilize_pair(dga: FilteredDGA, x: str, y: str) -> tuple[STI, FilteredDGA]:
    """Cancel the pair (x, y) where d x = k y + w with every word of w below ℓ(y).

    Returns the STI (scaling, normalising elementary move, eliminations of x
    and y from other differentials in increasing (action, index) order, destabilization) and
    the resulting DGA.
    """
    gx, gy = dga.gen(x), dga.gen(y)
    p = dga.p
    dx = dga.differential[x]
    k = dx.coefficient((y,))
    if k == 0:
        raise IllegalMoveError(f"{y} is not a leading term of ∂{x}")
    rest = dx - FreeElement.gen(y, p, dga.context) * k
    if y in rest.letters() or x in rest.letters():
        raise IllegalMoveError(f"∂{x} must be k·{y} + w with w free of {x} and {y}")
    if rest and not dga.action(rest) < gy.action:
        raise IllegalMoveError(f"words of w must have action below ℓ({y})")
    moves: list[TameMove] = []
    cur = dga
    if k != 1:
        mv = Elementary(y, k)
        moves.append(mv)
        cur = apply_tame(cur, mv)
    w = cur.differential[x] - cur.element(y)
    if w:
        mv = Elementary(y, 1, FreeElement(w.terms, p))
        moves.append(mv)
        cur = apply_tame(cur, mv)
    assert cur.differential[x] == cur.element(y)
    # Induction on action: lower generators are already free of x and y.
    order = sorted(range(len(cur.names)), key=lambda i: (cur.generators[i].action, i))
    for n in (cur.names[i] for i in order):
        if n in (x, y):
            continue
        dn = cur.differential[n]
        if not ({x, y} & dn.letters()):
            continue
        h = _homotopy(cur, dn, x, y)
        mv = Elementary(n, 1, FreeElement((-h).terms, p))
        try:
            cur = apply_tame(cur, mv)
        except IllegalMoveError as exc:
            raise IllegalMoveError(f"cannot eliminate the pair from ∂{n} by a filtered move: {exc}") from None
        moves.append(mv)
        if {x, y} & cur.differential[n].letters():
            raise IllegalMoveError(f"could not eliminate the pair from ∂{n}")
    mv = Destabilize(y, x)
    moves.append(mv)
    cur = apply_tame(cur, mv)
    return STI(tuple(moves)), cur


def _homotopy(dga: FilteredDGA, e: FreeElement, x: str, y: str) -> FreeElement:
    """Chekanov's homotopy for the pair with d x = y.

    On a word, look at the first letter equal to x or y: if it is y, that is
    ``u y v``, return ``(-1)^{|u|} u x v``; otherwise return 0. On the sub-DGA
    where all other letters have x,y-free differentials, dH + Hd = id - pi
    with pi killing every word that contains x or y.
    """
    p = dga.p
    acc: dict[Word, int] = {}
    for word, c in e.items():
        for i, g in enumerate(word):
            if g == x:
                break
            if g == y:
                sign = dga._sign(dga.word_degree(word[:i]))
                key = word[:i] + (x,) + word[i + 1:]
                acc[key] = acc.get(key, 0) + sign * c
                break
    return FreeElement(acc, p, dga.context)


# ---------------------------------------------------------------------------
# GL(2, Z)

UPPER = ((1, 1), (0, 1))
LOWER = ((1, 0), (1, 1))
UPPER_INV = ((1, -1), (0, 1))
LOWER_INV = ((1, 0), (-1, 1))
REFLECT = ((-1, 0), (0, 1))


def _mul2(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def multiply_factors(factors) -> tuple:
    out = ((1, 0), (0, 1))
    for f in factors:
        out = _mul2(out, f)
    return out


def decompose_gl2z(m) -> list[tuple]:
    """Write an integer matrix of determinant ±1 as a product of shears.

    Factors are the shears [[1,1],[0,1]], [[1,0],[1,1]] and their inverses,
    preceded by one reflection [[-1,0],[0,1]] when the determinant is -1.
    """
    m = tuple(tuple(int(v) for v in row) for row in m)
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if abs(det) != 1:
        raise DomainError(f"determinant {det} is not ±1")
    prefix = []
    cur = m
    if det == -1:
        prefix = [REFLECT]
        cur = _mul2(REFLECT, m)
    # Left-multiply by shears until the identity is reached (Euclid on the first column).
    ops = []

    def push(op, times=1):
        nonlocal cur
        for _ in range(times):
            cur = _mul2(op, cur)
            ops.append(op)

    while cur[1][0] != 0:
        a, c = cur[0][0], cur[1][0]
        if a == 0:
            push(UPPER)
        elif abs(a) > abs(c):
            q = int(a / c)
            push(UPPER_INV if q > 0 else UPPER, abs(q))
        else:
            q = int(c / a)
            push(LOWER_INV if q > 0 else LOWER, abs(q))
    if cur[0][0] == -1:
        # -I = (U L^-1 U)^2
        for op in (UPPER, LOWER_INV, UPPER, UPPER, LOWER_INV, UPPER):
            push(op)
    b = cur[0][1]
    push(UPPER_INV if b > 0 else UPPER, abs(b))
    assert cur == ((1, 0), (0, 1)), cur
    inverse_of = {UPPER: UPPER_INV, UPPER_INV: UPPER, LOWER: LOWER_INV, LOWER_INV: LOWER}
    out = _simplify(prefix + [inverse_of[op] for op in ops])
    assert multiply_factors(out) == m
    return out


def _simplify(factors: list[tuple]) -> list[tuple]:
    inverse_of = {UPPER: UPPER_INV, UPPER_INV: UPPER, LOWER: LOWER_INV, LOWER_INV: LOWER}
    out: list[tuple] = []
    for f in factors:
        if out and inverse_of.get(out[-1]) == f:
            out.pop()
        else:
            out.append(f)
    return out
