"""Rabinowitz Floer mapping cones assembled from two-component link DGAs.

Mixed chords from component 0 to 1 (flavor ``mixed01``) carry signed action
``+length`` and span ``C01``; chords from 1 to 0 (``mixed10``) carry
``-length`` and span the co-complex ``C10``, regraded by ``n - deg - 2`` in
the cone. The two-positive-puncture counts ``B: C01 -> C10`` are input data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .algebra import FilteredDGA, Generator
from .complexes import (BasisElement, ConeData, FilteredComplex, build_cone, cone_violations,
                        window_subquotient)
from .errors import ChainMapError, DomainError
from .linalg import matmul
from .scalars import INF, NEG_INF, as_action, format_scalar
from .tame import Augmentation

MIXED = ("mixed01", "mixed10")


class LinkDGA:
    """A filtered DGA of a two-component link with flavored generators.

    Actions stored in the DGA are positive chord lengths. Pure generators must
    have pure differentials (the pure sub-DGA is closed under the differential).
    """

    def __init__(self, dga: FilteredDGA):
        report = dga.validate()
        if not report.ok:
            raise DomainError(f"invalid link DGA: {report}")
        for g in dga.generators:
            if g.flavor == "orbit":
                raise DomainError(f"link DGAs have no orbit generators ({g.name})")
            if not g.action > 0:
                raise DomainError(f"chord {g.name} must have positive length")
        flav = {g.name: g.flavor for g in dga.generators}
        for g in dga.generators:
            if g.flavor == "pure":
                for word in dga.differential[g.name].words():
                    if any(flav[c] in MIXED for c in word):
                        raise DomainError(f"differential of pure chord {g.name} has a mixed letter")
        self.dga = dga
        self.flavor = flav

    @property
    def p(self) -> int:
        return self.dga.p

    def chords(self, flavor: str) -> list[Generator]:
        return [g for g in self.dga.generators if g.flavor == flavor]


def signed_action(g: Generator):
    """``+length`` for mixed01, ``-length`` for mixed10 chords."""
    return -g.action if g.flavor == "mixed10" else g.action


def _linear_part(link: LinkDGA, eps: Augmentation, flavor: str) -> np.ndarray:
    """``L[y, x]`` = coefficient of the mixed letter ``y`` in the eps-linearized ``d x``."""
    gens = link.chords(flavor)
    pos = {g.name: i for i, g in enumerate(gens)}
    L = np.zeros((len(gens), len(gens)), dtype=np.int64)
    p = link.p
    for g in gens:
        for word, c in link.dga.differential[g.name].items():
            mixed = [i for i, letter in enumerate(word) if link.flavor[letter] in MIXED]
            if len(mixed) >= 2:
                raise DomainError(f"word {' '.join(word)} in ∂{g.name} has two mixed letters")
            if not mixed:
                continue
            letter = word[mixed[0]]
            if link.flavor[letter] != flavor:
                continue
            val = c
            for i, z in enumerate(word):
                if i != mixed[0]:
                    val = val * eps(z) % p
            L[pos[letter], pos[g.name]] = (L[pos[letter], pos[g.name]] + val) % p
    return L


@dataclass(frozen=True, eq=False)
class LinearizedBlocks:
    """``C01`` (chain complex, actions +length) and ``C10`` (cochain complex,
    actions -length, DGA degrees) with their differentials."""

    C01: FilteredComplex
    C10: FilteredComplex

    @property
    def d01(self) -> np.ndarray:
        return self.C01.d

    @property
    def d10(self) -> np.ndarray:
        return self.C10.d


def derive_linearized_blocks(link: LinkDGA, eps: Augmentation) -> LinearizedBlocks:
    """Linearize the mixed parts of the link DGA with respect to ``eps``.

    ``d01`` collects words of ``∂x01`` with exactly one mixed01 letter, pure
    letters evaluated by ``eps``. ``d10`` is the co-differential
    ``d10(x) = sum_y m(y, x) y`` on mixed10 chords, i.e. the transpose of the
    linearized mixed10 differential.
    """
    p = link.p
    g01, g10 = link.chords("mixed01"), link.chords("mixed10")
    L01 = _linear_part(link, eps, "mixed01")
    L10 = _linear_part(link, eps, "mixed10")
    C01 = FilteredComplex([(g.name, g.degree, g.action) for g in g01], L01, p,
                          link.dga.grading_modulus)
    C10 = FilteredComplex([(g.name, g.degree, -g.action) for g in g10], L10.T % p, p,
                          link.dga.grading_modulus, d_degree=+1)
    return LinearizedBlocks(C01, C10)


@dataclass(frozen=True)
class BananaCounts:
    """Augmentation-weighted counts ``m(x01, y10)`` of disks with two positive punctures."""

    entries: Mapping = field(default_factory=dict)

    def matrix(self, blocks: LinearizedBlocks, p: int) -> np.ndarray:
        B = np.zeros((len(blocks.C10), len(blocks.C01)), dtype=np.int64)
        for (x, y), c in dict(self.entries).items():
            B[blocks.C10.index(y), blocks.C01.index(x)] = int(c) % p
        return B


@dataclass(frozen=True, eq=False)
class RFCComplex:
    """Windowed Rabinowitz cone with its construction data."""

    complex: FilteredComplex
    cone: ConeData
    augmentation: Augmentation | None
    window: tuple
    n: int
    graded: bool = True

    @property
    def basis(self):
        return self.complex.basis


def build_rfc(link: LinkDGA, eps: Augmentation, counts: BananaCounts | None, window, n: int
              ) -> RFCComplex:
    """Assemble the windowed cone ``C10[n-*-2] + C01`` with differential
    ``[[-d10, B], [0, d01]]``.

    Raises :class:`ChainMapError` naming every pair ``(x01, z10)`` at which
    ``B d01 = d10 B`` fails.
    """
    blocks = derive_linearized_blocks(link, eps)
    p = link.p
    B = (counts or BananaCounts()).matrix(blocks, p)
    data = ConeData(blocks.C01, blocks.C10, B, c10_cochain=True, n=n)
    defect = (matmul(B, blocks.d01, p) - matmul(blocks.d10, B, p)) % p
    pairs = [(blocks.C01.basis[c].name, blocks.C10.basis[r].name) for r, c in zip(*np.nonzero(defect))]
    if pairs:
        shown = ", ".join(f"({x}, {z})" for x, z in pairs)
        raise ChainMapError(f"B d01 ≠ d10 B at pairs {shown}", pairs)
    bad = cone_violations(data)
    if bad:
        raise DomainError("; ".join(bad))
    cone = build_cone(data)
    a, b = as_action(window[0]), as_action(window[1])
    windowed = window_subquotient(cone, a, b)
    return RFCComplex(windowed, data, eps, (a, b), n, link.dga.grading_modulus == 0)


@dataclass(frozen=True)
class AcyclicityReport:
    acyclic: bool
    homology: dict
    pairable: bool
    pairing: tuple | None
    pairable_positive: bool

    def __str__(self):
        dims = ", ".join(f"H_{k} = {v}" for k, v in sorted(self.homology.items())) or "H = 0"
        return (f"{'acyclic' if self.acyclic else 'not acyclic'} ({dims}); "
                f"generators {'can' if self.pairable else 'cannot'} be paired")


def chord_pairing(basis, positive_only: bool = False) -> tuple | None:
    """A partition into pairs ``(c, d)`` with ``|d| = |c| + 1`` and ``a(d) > a(c)``, or None.

    Computed as a bipartite perfect matching between even and odd degrees.
    """
    elems = [b for b in basis if not positive_only or b.action > 0]
    if len(elems) % 2:
        return None
    even = [b for b in elems if b.degree % 2 == 0]
    odd = [b for b in elems if b.degree % 2]
    if len(even) != len(odd):
        return None

    def compatible(u, v):
        c, d = (u, v) if u.degree < v.degree else (v, u)
        return d.degree == c.degree + 1 and d.action > c.action

    match: dict[int, int] = {}

    def augment(i, seen):
        for j, v in enumerate(odd):
            if j in seen or not compatible(even[i], v):
                continue
            seen.add(j)
            if j not in match or augment(match[j], seen):
                match[j] = i
                return True
        return False

    for i in range(len(even)):
        if not augment(i, set()):
            return None
    pairs = []
    for j, i in sorted(match.items()):
        u, v = even[i], odd[j]
        c, d = (u, v) if u.degree < v.degree else (v, u)
        pairs.append((c.name, d.name))
    return tuple(sorted(pairs))


def rfc_acyclicity(rfc: RFCComplex | FilteredComplex) -> AcyclicityReport:
    """Homology of the windowed cone and the pairing obstruction.

    If the generators admit no pairing, the complex cannot be acyclic.
    """
    C = rfc.complex if isinstance(rfc, RFCComplex) else rfc
    hom = C.homology_dims()
    pairing = chord_pairing(C.basis)
    return AcyclicityReport(not hom, hom, pairing is not None, pairing,
                            chord_pairing(C.basis, positive_only=True) is not None)
