"""Free noncommutative filtered graded algebras over F_p and filtered DGAs on them."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ContextError, DomainError
from .linalg import is_prime
from .scalars import INF, NEG_INF, Scalar, as_action, format_scalar

Word = tuple[str, ...]
UNIT: Word = ()
FLAVORS = ("pure", "mixed01", "mixed10", "orbit")


@dataclass(frozen=True)
class Generator:
    """A graded generator with an exact action and a chord flavor."""

    name: str
    degree: int
    action: Scalar
    flavor: str = "pure"

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME_RE.fullmatch(self.name):
            raise DomainError(f"invalid generator name {self.name!r}")
        if self.flavor not in FLAVORS:
            raise DomainError(f"unknown flavor {self.flavor!r} for {self.name}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "action", as_action(self.action))


class FreeElement:
    """An F_p-linear combination of words in named generators.

    Args:
        terms: mapping (or iterable of pairs) from words to integer coefficients.
            Coefficients are reduced mod ``p`` and zero terms are dropped.
        p: characteristic of the ground field.
        context: optional frozenset of admissible generator names. Products of
            elements with different non-empty contexts raise ``ContextError``.
    """

    __slots__ = ("_terms", "p", "context", "_hash")

    def __init__(self, terms=(), p: int = 2, context: frozenset | None = None):
        acc: dict[Word, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, c in items:
            word = tuple(word)
            acc[word] = (acc.get(word, 0) + int(c)) % p
        self._terms = {w: c for w, c in acc.items() if c}
        self.p = p
        self.context = context
        self._hash = None

    @classmethod
    def zero(cls, p: int = 2, context=None) -> "FreeElement":
        return cls((), p, context)

    @classmethod
    def one(cls, p: int = 2, context=None) -> "FreeElement":
        return cls({UNIT: 1}, p, context)

    @classmethod
    def gen(cls, name: str, p: int = 2, context=None) -> "FreeElement":
        return cls({(name,): 1}, p, context)

    # access ---------------------------------------------------------------
    @property
    def terms(self) -> dict[Word, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Word, int]]:
        return iter(sorted(self._terms.items()))

    def words(self) -> list[Word]:
        return sorted(self._terms)

    def coefficient(self, word: Word) -> int:
        return self._terms.get(tuple(word), 0)

    def letters(self) -> set[str]:
        return {g for w in self._terms for g in w}

    def homogeneous_part(self, length: int) -> "FreeElement":
        """Part of word length exactly ``length``."""
        return FreeElement({w: c for w, c in self._terms.items() if len(w) == length},
                           self.p, self.context)

    def constant_term(self) -> int:
        return self._terms.get(UNIT, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "FreeElement"):
        if other.p != self.p:
            raise ContextError(f"characteristics differ: {self.p} vs {other.p}")
        if self.context is not None and other.context is not None and self.context != other.context:
            raise ContextError("generator-name mismatch between contexts")

    def _ctx(self, other: "FreeElement"):
        return self.context if self.context is not None else other.context

    def __add__(self, other):
        if isinstance(other, int):
            other = FreeElement.one(self.p, self.context) * other
        if not isinstance(other, FreeElement):
            return NotImplemented
        self._check(other)
        acc = dict(self._terms)
        for w, c in other._terms.items():
            acc[w] = acc.get(w, 0) + c
        return FreeElement(acc, self.p, self._ctx(other))

    __radd__ = __add__

    def __neg__(self):
        return FreeElement({w: -c for w, c in self._terms.items()}, self.p, self.context)

    def __sub__(self, other):
        if isinstance(other, int):
            other = FreeElement.one(self.p, self.context) * other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return FreeElement({w: c * other for w, c in self._terms.items()}, self.p, self.context)
        if not isinstance(other, FreeElement):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        out = FreeElement.one(self.p, self.context)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            return self == FreeElement.one(self.p) * other
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.p == other.p and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, frozenset(self._terms.items())))
        return self._hash

    def substitute(self, images: Mapping[str, "FreeElement"]) -> "FreeElement":
        """Apply the unital algebra map sending each listed generator to its image."""
        out: dict[Word, int] = {}
        for word, c in self._terms.items():
            prod = {UNIT: c}
            for g in word:
                img = images.get(g)
                img_terms = img._terms if img is not None else {(g,): 1}
                nxt: dict[Word, int] = {}
                for w1, c1 in prod.items():
                    for w2, c2 in img_terms.items():
                        w = w1 + w2
                        nxt[w] = (nxt.get(w, 0) + c1 * c2) % self.p
                prod = {w: v for w, v in nxt.items() if v}
            for w, v in prod.items():
                out[w] = out.get(w, 0) + v
        return FreeElement(out, self.p, self.context)

    def __repr__(self):
        return f"FreeElement({format_element(self)!r}, p={self.p})"

    def __str__(self):
        return format_element(self)


def multiply(a: FreeElement, b: FreeElement) -> FreeElement:
    """Concatenation product, bilinear over F_p; the unit word is neutral."""
    a._check(b)
    acc: dict[Word, int] = {}
    for w1, c1 in a._terms.items():
        for w2, c2 in b._terms.items():
            w = w1 + w2
            acc[w] = acc.get(w, 0) + c1 * c2
    return FreeElement(acc, a.p, a._ctx(b))


def format_element(e: FreeElement) -> str:
    """Canonical text form, e.g. ``b*c + 2*d + 1``; zero prints as ``0``."""
    if not e._terms:
        return "0"
    parts = []
    for word, c in sorted(e._terms.items(), key=lambda t: (len(t[0]) == 0, t[0])):
        body = "*".join(word) if word else "1"
        if c == 1:
            parts.append(body)
        elif word:
            parts.append(f"{c}*{body}")
        else:
            parts.append(str(c))
    return " + ".join(parts)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[+\-*]))")


def parse_element(text: str, p: int = 2, names: Iterable[str] | None = None,
                  context: frozenset | None = None) -> FreeElement:
    """Parse ``"b*c + 2*d - x y + 1"`` into a FreeElement.

    Juxtaposition and ``*`` both denote the product; a bare integer is a
    multiple of the unit.
    """
    allowed = set(names) if names is not None else None
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse element at {text[pos:]!r}")
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
    acc: dict[Word, int] = {}
    sign = 1
    coeff = None
    word: list[str] = []
    started = False

    def flush():
        nonlocal coeff, word, started, sign
        if started:
            c = (1 if coeff is None else coeff) * sign
            key = tuple(word)
            acc[key] = acc.get(key, 0) + c
        coeff, word, started, sign = None, [], False, 1

    for kind, val in tokens:
        if kind == "op" and val in "+-":
            if started:
                flush()
            if val == "-":
                sign = -sign
        elif kind == "op":
            continue
        elif kind == "num":
            coeff = (1 if coeff is None else coeff) * int(val)
            started = True
        else:
            if allowed is not None and val not in allowed:
                raise DomainError(f"unknown generator {val!r}")
            word.append(val)
            started = True
    flush()
    return FreeElement(acc, p, context)


def degree_equal(a: int, b: int, modulus: int) -> bool:
    if modulus == 0:
        return a == b
    return (a - b) % modulus == 0


@dataclass(frozen=True)
class Violation:
    kind: str
    generator: str | None
    message: str

    def __str__(self):
        where = f"[{self.generator}] " if self.generator else ""
        return f"{where}{self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]

    def __str__(self):
        if self.ok:
            return "pass"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True, eq=False)
class FilteredDGA:
    """Semifree unital DGA over F_p with an action filtration.

    Args:
        generators: ordered generators; names must be unique.
        differential: generator name to its differential; missing names map to 0.
        p: field characteristic.
        grading_modulus: 0 for Z-grading, 1 for ungraded, m for Z/m.
        action_level: action ceiling ``l`` (may be infinite).
    """

    generators: tuple[Generator, ...]
    differential: Mapping[str, FreeElement] = field(default_factory=dict)
    p: int = 2
    grading_modulus: int = 0
    action_level: Scalar = INF

    def __post_init__(self):
        if not is_prime(int(self.p)):
            raise DomainError(f"characteristic {self.p} is not prime")
        if self.grading_modulus < 0:
            raise DomainError("grading modulus must be nonnegative")
        gens = tuple(self.generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise DomainError(f"duplicate generator names: {dup}")
        ctx = frozenset(names)
        diff = {}
        for key, val in dict(self.differential).items():
            if key not in ctx:
                raise DomainError(f"differential given for unknown generator {key!r}")
            if isinstance(val, str):
                val = parse_element(val, self.p, names)
            if val.p != self.p:
                raise ContextError(f"differential of {key} has characteristic {val.p}")
            diff[key] = FreeElement(val.terms, self.p, ctx)
        for n in names:
            diff.setdefault(n, FreeElement.zero(self.p, ctx))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "differential", diff)
        object.__setattr__(self, "action_level", as_action(self.action_level))
        object.__setattr__(self, "_by_name", {g.name: g for g in gens})
        object.__setattr__(self, "_context", ctx)

    # lookup ---------------------------------------------------------------
    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    @property
    def context(self) -> frozenset:
        return self._context

    def gen(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise DomainError(f"unknown generator {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self._by_name

    def element(self, text_or_name) -> FreeElement:
        """Element of this DGA from a generator name or an element string."""
        if isinstance(text_or_name, FreeElement):
            return FreeElement(text_or_name.terms, self.p, self._context)
        return parse_element(text_or_name, self.p, self.names, self._context)

    def d(self, name: str) -> FreeElement:
        self.gen(name)
        return self.differential[name]

    def word_degree(self, word: Word) -> int:
        return sum(self._by_name[g].degree for g in word)

    def word_action(self, word: Word):
        total = Fraction(0)
        for g in word:
            total = total + self._by_name[g].action
        return total

    def action(self, e: FreeElement):
        """Maximal word action of ``e``; ``-inf`` for zero."""
        if e.is_zero():
            return NEG_INF
        return max(self.word_action(w) for w in e.words())

    def __eq__(self, other):
        if not isinstance(other, FilteredDGA):
            return NotImplemented
        return (self.p == other.p and self.grading_modulus == other.grading_modulus
                and self.action_level == other.action_level
                and self.generators == other.generators
                and all(self.differential[n] == other.differential[n] for n in self.names))

    def same_up_to_order(self, other: "FilteredDGA") -> bool:
        """Equality ignoring generator order."""
        return (self.p == other.p and self.grading_modulus == other.grading_modulus
                and set(self.generators) == set(other.generators)
                and all(self.differential[n] == other.differential[n] for n in self.names))

    # differential ---------------------------------------------------------
    def _sign(self, degree: int) -> int:
        return -1 if (self.p != 2 and degree % 2) else 1

    def apply_differential(self, e: FreeElement) -> FreeElement:
        return apply_differential(self, e)

    def validate(self) -> ValidationReport:
        return validate_dga(self)

    def replace(self, **changes) -> "FilteredDGA":
        kw = dict(generators=self.generators, differential=self.differential, p=self.p,
                  grading_modulus=self.grading_modulus, action_level=self.action_level)
        kw.update(changes)
        return FilteredDGA(**kw)

    def __repr__(self):
        body = ", ".join(f"d{n} = {self.differential[n]}" for n in self.names)
        return f"FilteredDGA(p={self.p}, [{body}])"


def apply_differential(dga: FilteredDGA, e: FreeElement) -> FreeElement:
    """Leibniz extension: d(ab) = d(a) b + (-1)^{|a|} a d(b)."""
    if e.context is not None and e.context != dga.context and not e.letters() <= dga.context:
        raise ContextError("element does not belong to this DGA")
    if e.p != dga.p:
        raise ContextError("characteristic mismatch")
    acc: dict[Word, int] = {}
    p = dga.p
    for word, c in e.items():
        prefix_deg = 0
        for i, g in enumerate(word):
            if g not in dga._by_name:
                raise ContextError(f"generator {g!r} is not in this DGA")
            sign = dga._sign(prefix_deg)
            head, tail = word[:i], word[i + 1:]
            for w, cw in dga.differential[g].items():
                key = head + w + tail
                acc[key] = (acc.get(key, 0) + sign * c * cw) % p
            prefix_deg += dga._by_name[g].degree
    return FreeElement(acc, p, dga.context)


def validate_dga(dga: FilteredDGA) -> ValidationReport:
    """Check degree, strict action decrease, d^2 = 0 and the action ceiling."""
    out: list[Violation] = []
    m = dga.grading_modulus
    if dga.p != 2 and m % 2 == 1:
        out.append(Violation("signs", None,
                             "Koszul signs undefined: odd characteristic with odd grading modulus"))
    for g in dga.generators:
        if not g.action < dga.action_level:
            out.append(Violation("ceiling", g.name,
                                 f"action ceiling exceeded: {format_scalar(g.action)} >= "
                                 f"{format_scalar(dga.action_level)}"))
    for g in dga.generators:
        dx = dga.differential[g.name]
        unknown = dx.letters() - dga.context
        if unknown:
            out.append(Violation("unknown", g.name, f"unknown generators {sorted(unknown)}"))
            continue
        if any(not degree_equal(dga.word_degree(w), g.degree - 1, m) for w in dx.words()):
            out.append(Violation("degree", g.name, "degree of ∂ is not −1"))
        if dx and not dga.action(dx) < g.action:
            out.append(Violation("filtration", g.name, "filtration not strictly decreased"))
    if not any(v.kind == "unknown" for v in out):
        for g in dga.generators:
            if apply_differential(dga, dga.differential[g.name]):
                out.append(Violation("d_squared", g.name, "∂² ≠ 0"))
    return ValidationReport(tuple(out))
