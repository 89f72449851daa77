"""Seeded random instances: filtered complexes, DGAs and tame-move sequences."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .algebra import FilteredDGA, FreeElement, Generator, degree_equal
from .complexes import FilteredComplex
from .errors import IllegalMoveError
from .linalg import inverse, matmul
from .tame import STI, Destabilize, Elementary, Identify, Stabilize, apply_tame


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_actions(rng, n: int, ties: bool = False, scale: int = 4) -> list[Fraction]:
    """``n`` positive rationals; distinct unless ``ties``."""
    pool = max(scale * n, 2)
    if ties:
        return [Fraction(int(v), 2) for v in rng.integers(1, pool, size=n)]
    return [Fraction(int(v), 2) for v in rng.choice(np.arange(1, pool + 1), size=n, replace=False)]


def random_complex(seed, n_max: int = 12, p: int = 2, ties: bool = False,
                   degrees: int = 3, n_min: int = 1, actions=None) -> FilteredComplex:
    """A random filtered complex: a random standard form conjugated by a
    random filtered change of basis."""
    rng = rng_from(seed)
    n = len(actions) if actions is not None else int(rng.integers(n_min, n_max + 1))
    acts = list(actions) if actions is not None else random_actions(rng, n, ties)
    degs = [int(d) for d in rng.integers(0, degrees, size=n)]
    basis = [(f"g{i}", degs[i], acts[i]) for i in range(n)]
    D0 = np.zeros((n, n), dtype=np.int64)
    free = set(range(n))
    for c in rng.permutation(n):
        c = int(c)
        if c not in free or rng.random() < 0.3:
            continue
        cands = [r for r in free if r != c and degs[r] == degs[c] - 1 and acts[r] < acts[c]]
        if cands:
            r = cands[int(rng.integers(len(cands)))]
            D0[r, c] = int(rng.integers(1, p))
            free -= {r, c}
    order = sorted(range(n), key=lambda i: (acts[i], i))
    pos = {i: k for k, i in enumerate(order)}
    E = np.zeros((n, n), dtype=np.int64)
    for r in range(n):
        E[r, r] = int(rng.integers(1, p))
        for c in range(n):
            if r != c and degs[r] == degs[c] and pos[r] < pos[c] and rng.random() < 0.4:
                E[r, c] = int(rng.integers(0, p))
    d = matmul(matmul(E, D0, p), inverse(E, p), p)
    return FilteredComplex(basis, d, p)


def random_filtered_automorphism(seed, C: FilteredComplex, density: float = 0.4) -> np.ndarray:
    """Random chain automorphism ``I + dK + Kd`` with ``K`` not raising action.

    ``dK + Kd`` strictly lowers action, so the result is unipotent with respect
    to the filtration and its inverse is filtered as well.
    """
    rng = rng_from(seed)
    K = random_homotopy(rng, C, 0, density)
    p = C.p
    m = (np.eye(len(C), dtype=np.int64) + matmul(C.d, K, p) + matmul(K, C.d, p)) % p
    return m


def random_homotopy(seed, C: FilteredComplex, eps, density: float = 0.4,
                    target: FilteredComplex | None = None) -> np.ndarray:
    """Random degree +1 map ``C -> target`` raising action by at most ``eps``."""
    rng = rng_from(seed)
    D = C if target is None else target
    K = np.zeros((len(D), len(C)), dtype=np.int64)
    for c, s in enumerate(C.basis):
        for r, t in enumerate(D.basis):
            if degree_equal(t.degree, s.degree + 1, C.grading_modulus) and \
                    t.action <= s.action + eps and rng.random() < density:
                K[r, c] = int(rng.integers(0, C.p))
    return K


# ---------------------------------------------------------------------------
# DGAs

def trefoil_dga(p: int = 2) -> FilteredDGA:
    """Chekanov's DGA of the max-tb right-handed trefoil (five augmentations over F_2)."""
    gens = [Generator("b1", 0, 1), Generator("b2", 0, 1), Generator("b3", 0, 1),
            Generator("a1", 1, 4), Generator("a2", 1, 4)]
    diff = {"a1": "1 + b1 + b3 + b1 b2 b3", "a2": "1 + b1 + b3 + b3 b2 b1"}
    return FilteredDGA(gens, diff, p=p)


def _fresh(dga: FilteredDGA, rng, taken: set[str]) -> str:
    while True:
        name = f"s{int(rng.integers(10 ** 6))}"
        if name not in taken and not dga.has(name):
            taken.add(name)
            return name


def candidate_words(dga: FilteredDGA, x: str, max_len: int = 2) -> list[tuple]:
    """Words free of ``x`` with the degree of ``x`` and action below ``l(x)``."""
    g = dga.gen(x)
    others = [h for h in dga.generators if h.name != x]
    out = []
    if degree_equal(g.degree, 0, dga.grading_modulus) and 0 < g.action:
        out.append(())
    for length in range(1, max_len + 1):
        for combo in itertools.product(others, repeat=length):
            deg = sum(h.degree for h in combo)
            act = sum(h.action for h in combo)
            if degree_equal(deg, g.degree, dga.grading_modulus) and act < g.action:
                out.append(tuple(h.name for h in combo))
    return out


def random_tame_move(seed, dga: FilteredDGA, kinds=("elementary", "stabilize", "destabilize",
                                                      "identify"), max_gens: int = 8):
    """A random legal tame move for ``dga``."""
    rng = rng_from(seed)
    p = dga.p
    kinds = list(kinds)
    if len(dga.generators) + 2 > max_gens and "stabilize" in kinds:
        kinds.remove("stabilize")
    for _ in range(50):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "elementary" and dga.generators:
            x = dga.names[int(rng.integers(len(dga.names)))]
            k = int(rng.integers(1, p))
            words = candidate_words(dga, x)
            terms = {w: int(rng.integers(1, p)) for w in words if rng.random() < 0.5}
            return Elementary(x, k, FreeElement(terms, p) if terms else None)
        if kind == "stabilize":
            taken: set[str] = set()
            lo, hi = sorted(random_actions(rng, 2, scale=6))
            return Stabilize(_fresh(dga, rng, taken), _fresh(dga, rng, taken),
                             int(rng.integers(-1, 2)), lo, hi)
        if kind == "destabilize":
            pairs = _split_pairs(dga)
            if pairs:
                lower, upper = pairs[int(rng.integers(len(pairs)))]
                return Destabilize(lower, upper)
        if kind == "identify" and dga.generators:
            taken = set()
            victim = dga.names[int(rng.integers(len(dga.names)))]
            return Identify({victim: _fresh(dga, rng, taken)})
    return Identify({})


def _split_pairs(dga: FilteredDGA) -> list[tuple[str, str]]:
    out = []
    for upper in dga.names:
        dx = dga.differential[upper]
        words = dx.words()
        if len(words) == 1 and len(words[0]) == 1 and dx.coefficient(words[0]) == 1:
            lower = words[0][0]
            if dga.differential[lower]:
                continue
            if any({lower, upper} & dga.differential[n].letters()
                   for n in dga.names if n != upper):
                continue
            out.append((lower, upper))
    return out


def random_sti(seed, dga: FilteredDGA, length: int, max_gens: int = 8) -> tuple[STI, FilteredDGA]:
    """Random STI of ``length`` moves and the resulting DGA."""
    rng = rng_from(seed)
    moves = []
    cur = dga
    while len(moves) < length:
        mv = random_tame_move(rng, cur, max_gens=max_gens)
        try:
            nxt = apply_tame(cur, mv)
        except IllegalMoveError:
            continue
        moves.append(mv)
        cur = nxt
    return STI(tuple(moves)), cur


def random_dga(seed, n_gens: int = 6, p: int = 2, scramble: int = 6) -> FilteredDGA:
    """Random DGA: stabilized copies of the trefoil or free generators, scrambled."""
    rng = rng_from(seed)
    if rng.random() < 0.5:
        base = trefoil_dga(p)
    else:
        k = int(rng.integers(1, max(2, n_gens - 2)))
        acts = random_actions(rng, k)
        base = FilteredDGA([Generator(f"c{i}", int(rng.integers(0, 2)), acts[i]) for i in range(k)],
                           {}, p=p)
    return random_sti(rng, base, scramble, max_gens=n_gens)[1]


# ---------------------------------------------------------------------------
# simple bifurcations

def random_event(seed, C: FilteredComplex, kind: str):
    """A random legal event of the given kind for ``C``, or ``None`` if impossible."""
    from .barcode import (Birth, Death, EntryAbove, EntryBelow, ExitAbove, ExitBelow,
                          HandleSlide)
    from .linalg import nullspace

    rng = rng_from(seed)
    p = C.p
    acts = C.actions
    names = C.names
    n = len(C)
    fresh = lambda tag: f"{tag}{len(C)}_{int(rng.integers(10 ** 6))}"

    def new_action():
        taken = set(acts)
        while True:
            v = Fraction(int(rng.integers(1, 40)), 4)
            if v not in taken:
                return v

    if kind == "handle_slide":
        pairs = [(s, t) for s in range(n) for t in range(n)
                 if s != t and C.basis[s].degree == C.basis[t].degree and acts[s] <= acts[t]]
        if pairs and rng.random() < 0.8:
            s, t = pairs[int(rng.integers(len(pairs)))]
            return HandleSlide(names[t], names[s], int(rng.integers(1, p)))
        if not n:
            return None
        return HandleSlide(names[int(rng.integers(n))], None, int(rng.integers(1, p)))
    if kind == "birth":
        lo = new_action()
        hi = lo + Fraction(int(rng.integers(1, 12)), 4)
        if hi in set(acts):
            return None
        return Birth(fresh("u"), fresh("l"), int(rng.integers(0, 3)), hi, lo, int(rng.integers(1, p)))
    if kind == "death":
        opts = []
        for c in range(n):
            col = np.nonzero(C.d[:, c])[0]
            if len(col) == 1:
                r = int(col[0])
                if not np.any(C.d[:, r]) and not np.any(C.d[c]) and np.count_nonzero(C.d[r]) == 1:
                    opts.append(Death(names[c], names[r]))
        return opts[int(rng.integers(len(opts)))] if opts else None
    if kind in ("exit_below", "exit_above"):
        if not n:
            return None
        target = min(acts) if kind == "exit_below" else max(acts)
        idx = [i for i in range(n) if acts[i] == target]
        if len(idx) != 1:
            return None
        return (ExitBelow if kind == "exit_below" else ExitAbove)(names[idx[0]])
    if kind in ("entry_below", "entry_above"):
        deg = int(rng.integers(0, 3))
        if kind == "entry_below":
            act = (min(acts) if n else Fraction(0)) - Fraction(int(rng.integers(1, 12)), 4)
            S = [i for i in range(n) if C.basis[i].degree == deg + 1]
            vec = {}
            if S:
                ker = nullspace(C.d[S, :].T, p)
                coeffs = rng.integers(0, p, size=ker.shape[1])
                v = (ker @ coeffs) % p
                vec = {names[S[j]]: int(v[j]) for j in range(len(S)) if v[j]}
            return EntryBelow(fresh("e"), deg, act, vec)
        act = (max(acts) if n else Fraction(0)) + Fraction(int(rng.integers(1, 12)), 4)
        S = [i for i in range(n) if C.basis[i].degree == deg - 1]
        vec = {}
        if S:
            ker = nullspace(C.d[:, S], p)
            coeffs = rng.integers(0, p, size=ker.shape[1])
            v = (ker @ coeffs) % p
            vec = {names[S[j]]: int(v[j]) for j in range(len(S)) if v[j]}
        return EntryAbove(fresh("e"), deg, act, vec)
    raise ValueError(f"unknown event kind {kind!r}")


# ---------------------------------------------------------------------------
# certified equivalences

def random_filtered_basis_change(seed, C: FilteredComplex) -> np.ndarray:
    """Invertible degree-0 matrix, triangular in action order with unit diagonal."""
    rng = rng_from(seed)
    p, n = C.p, len(C)
    acts = C.actions
    P = np.eye(n, dtype=np.int64)
    for r in range(n):
        for c in range(n):
            if r != c and C.basis[r].degree == C.basis[c].degree and acts[r] < acts[c] \
                    and rng.random() < 0.5:
                P[r, c] = int(rng.integers(0, p))
    return P


def random_equivalence(seed, p: int = 2, n_max: int = 8, eps=Fraction(1, 4), delta=None):
    """A certified degree-eps equivalence ``phi: C -> D``, ``psi: D -> C``.

    ``C`` is ``delta``-gapped (actions are multiples of ``delta``, default
    ``4 eps + 1``); ``D`` has basis actions moved by at most ``eps / 2`` and
    differential ``P d P^{-1}`` for a filtered basis change ``P = phi``. With
    ``psi = phi^{-1} + d h + h d'`` the homotopies are ``K = h phi`` and
    ``K' = phi h``. Returns ``(phi, psi, certificate, delta)``.
    """
    from .complexes import DegreeEpsMap, HomotopyCertificate

    rng = rng_from(seed)
    eps = Fraction(eps)
    delta = 4 * eps + 1 if delta is None else Fraction(delta)
    n = int(rng.integers(1, n_max + 1))
    acts = [delta * int(v) for v in rng.choice(np.arange(1, 4 * n + 1), size=n, replace=False)]
    C = random_complex(rng, p=p, actions=acts)
    P = random_filtered_basis_change(rng, C)
    Pinv = inverse(P, p)
    shifts = [Fraction(int(v), 8) * eps for v in rng.integers(-4, 5, size=n)]
    D = FilteredComplex([(f"{b.name}_", b.degree, b.action + s) for b, s in zip(C.basis, shifts)],
                        matmul(matmul(P, C.d, p), Pinv, p), p)
    h = np.zeros((n, n), dtype=np.int64)
    for r in range(n):
        for c in range(n):
            if C.basis[r].degree == D.basis[c].degree + 1 and C.basis[r].action <= D.basis[c].action \
                    and rng.random() < 0.4:
                h[r, c] = int(rng.integers(0, p))
    psi_m = (Pinv + matmul(C.d, h, p) + matmul(h, D.d, p)) % p
    phi = DegreeEpsMap(C, D, P, eps)
    psi = DegreeEpsMap(D, C, psi_m, eps)
    cert = HomotopyCertificate(matmul(h, P, p), matmul(P, h, p))
    return phi, psi, cert, delta


def random_chain_map(seed, d_src: np.ndarray, d_tgt: np.ndarray, allowed: np.ndarray, p: int,
                     sign: int = 1) -> np.ndarray:
    """Random ``B`` supported on ``allowed`` with ``B d_src = sign * d_tgt B``.

    Solves the linear constraints on the free entries and returns a random
    element of the solution space.
    """
    from .linalg import nullspace

    rng = rng_from(seed)
    rows, cols = np.nonzero(allowed)
    m, n = allowed.shape
    if not len(rows):
        return np.zeros((m, n), dtype=np.int64)
    ops = []
    for r, c in zip(rows, cols):
        E = np.zeros((m, n), dtype=np.int64)
        E[r, c] = 1
        ops.append(((E @ d_src) - sign * (d_tgt @ E)).flatten() % p)
    A = np.array(ops, dtype=np.int64).T % p
    ker = nullspace(A, p)
    B = np.zeros((m, n), dtype=np.int64)
    if ker.shape[1]:
        coeffs = rng.integers(0, p, size=ker.shape[1])
        vals = (ker @ coeffs) % p
        B[rows, cols] = vals
    return B


def random_script(seed, n_events: int = 6, p: int = 2, n_max: int = 8):
    """A random script with constant trajectories and ``n_events`` legal events.

    Every event kind is tried in a random order at each step; the first one
    that is possible and legal is kept.
    """
    from .barcode import EVENT_KINDS, transform_complex
    from .errors import DomainError, IllegalMoveError
    from .pwc import PWCScript

    rng = rng_from(seed)
    C0 = random_complex(rng, n_max=n_max, p=p)
    C, events = C0, []
    kinds = sorted(EVENT_KINDS)
    for i in range(n_events):
        for j in rng.permutation(len(kinds)):
            ev = random_event(rng, C, kinds[int(j)])
            if ev is None:
                continue
            try:
                C = transform_complex(C, ev)
            except (IllegalMoveError, DomainError):
                continue
            events.append((Fraction(i + 1, n_events + 1), ev))
            break
    return PWCScript((0, 1), C0, {}, None, tuple(events))


def random_link_dga(seed, p: int = 2, n_pure: int = 2, n_max: int = 6, scramble: int = 6):
    """A random two-component link DGA with an augmentation.

    Pure chords are degree-0 cycles with random augmentation values. Each mixed
    flavor starts as a random filtered complex (one mixed letter per word) and
    the whole DGA is scrambled by elementary moves ``x -> x + c z y`` (or
    ``y z``) with ``y`` mixed of the same flavor and ``z`` pure, which keeps
    exactly one mixed letter per word.
    """
    from .rabinowitz import LinkDGA
    from .tame import Augmentation

    rng = rng_from(seed)
    pure = [Generator(f"z{i}", 0, Fraction(int(rng.integers(1, 4)), 8)) for i in range(n_pure)]
    gens, diff = list(pure), {}
    for flavor, tag in (("mixed01", "a"), ("mixed10", "b")):
        C = random_complex(rng, n_max=n_max, p=p, degrees=2, n_min=2)
        for b in C.basis:
            gens.append(Generator(f"{tag}{b.name[1:]}", b.degree, b.action, flavor))
        for c, b in enumerate(C.basis):
            terms = {(f"{tag}{C.basis[r].name[1:]}",): int(C.d[r, c]) for r in np.nonzero(C.d[:, c])[0]}
            diff[f"{tag}{b.name[1:]}"] = FreeElement(terms, p)
    dga = FilteredDGA(gens, diff, p=p)
    mixed = [g for g in gens if g.flavor != "pure"]
    below = {x.name: [(z, y) for y in mixed for z in pure
                      if y.flavor == x.flavor and y.degree == x.degree
                      and z.action + y.action < x.action] for x in mixed}
    movable = [x for x in mixed if below[x.name]]
    for _ in range(scramble if movable else 0):
        x = movable[int(rng.integers(len(movable)))]
        terms = {}
        for z, y in below[x.name]:
            if rng.random() < 0.6:
                word = (z.name, y.name) if rng.random() < 0.5 else (y.name, z.name)
                terms[word] = int(rng.integers(1, p))
        if terms:
            dga = apply_tame(dga, Elementary(x.name, int(rng.integers(1, p)), FreeElement(terms, p)))
    eps = Augmentation({z.name: int(rng.integers(0, p)) for z in pure}, p)
    return LinkDGA(dga), eps


def random_rfc_input(seed, p: int = 2):
    """Random ``(link, eps, counts, n)`` whose counts satisfy ``B d01 = d10 B``.

    Counts are drawn from the solution space of the chain-map identity,
    supported on pairs whose degrees match in the cone.
    """
    from .rabinowitz import BananaCounts, derive_linearized_blocks

    rng = rng_from(seed)
    link, eps = random_link_dga(rng, p=p)
    blocks = derive_linearized_blocks(link, eps)
    n = int(rng.integers(1, 4))
    C01, C10 = blocks.C01, blocks.C10
    allowed = np.array([[n - z.degree - 2 == x.degree - 1 for x in C01.basis] for z in C10.basis],
                       dtype=bool).reshape(len(C10), len(C01))
    B = random_chain_map(rng, C01.d, C10.d, allowed, p)
    counts = {(C01.basis[c].name, C10.basis[r].name): int(B[r, c]) for r, c in zip(*np.nonzero(B))}
    return link, eps, BananaCounts(counts), n
