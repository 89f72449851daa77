"""Action-filtered chain complexes, degree-eps maps, mapping cones and equivalence checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .algebra import ValidationReport, Violation, degree_equal
from .errors import DomainError
from .linalg import as_matrix, inverse, is_prime, matmul, nullspace, rank
from .scalars import INF, NEG_INF, Scalar, as_action, format_scalar, to_fraction


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    action: Scalar

    def __post_init__(self):
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "action", as_action(self.action))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a report-style check.

    ``status`` is ``"pass"``, ``"fail"`` or ``"hypothesis-violation"``.
    """

    status: str
    messages: tuple[str, ...] = ()
    data: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def __bool__(self):
        return self.ok

    def __str__(self):
        if not self.messages:
            return self.status
        return self.status + ": " + "; ".join(self.messages)


def _basis(items) -> tuple[BasisElement, ...]:
    out = []
    for b in items:
        if isinstance(b, BasisElement):
            out.append(b)
        elif isinstance(b, dict):
            out.append(BasisElement(b["name"], b["degree"], b["action"]))
        else:
            out.append(BasisElement(*b))
    return tuple(out)


class FilteredComplex:
    """Finite complex over F_p with a compatible basis and an action window.

    Args:
        basis: sequence of ``(name, degree, action)`` or :class:`BasisElement`.
        d: square matrix; column ``j`` is the differential of basis element ``j``.
        p: field characteristic.
        grading_modulus: 0 for Z-grading.
        window: ``(a, b)`` with every basis action in ``[a, b)``.
        d_degree: homological degree of ``d`` (-1 for chain, +1 for cochain complexes).
        check: validate on construction and raise ``DomainError`` on failure.
    """

    __slots__ = ("basis", "d", "p", "grading_modulus", "window", "d_degree", "_index")

    def __init__(self, basis, d=None, p: int = 2, grading_modulus: int = 0,
                 window=(NEG_INF, INF), d_degree: int = -1, check: bool = True):
        self.basis = _basis(basis)
        n = len(self.basis)
        if not is_prime(int(p)):
            raise DomainError(f"characteristic {p} is not prime")
        self.p = int(p)
        self.d = as_matrix(np.zeros((n, n)) if d is None else d, self.p, (n, n))
        self.d.setflags(write=False)
        self.grading_modulus = grading_modulus
        self.window = (as_action(window[0]), as_action(window[1]))
        self.d_degree = d_degree
        names = [b.name for b in self.basis]
        if len(set(names)) != n:
            raise DomainError("duplicate basis names")
        self._index = {nm: i for i, nm in enumerate(names)}
        if check:
            report = self.validate()
            if not report.ok:
                raise DomainError(f"invalid filtered complex: {report}")

    # basic access -----------------------------------------------------------
    def __len__(self):
        return len(self.basis)

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.basis]

    @property
    def degrees(self) -> list[int]:
        return [b.degree for b in self.basis]

    @property
    def actions(self) -> list:
        return [b.action for b in self.basis]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"unknown basis element {name!r}") from None

    def element(self, name: str) -> BasisElement:
        return self.basis[self.index(name)]

    def boundary(self, name: str) -> dict[str, int]:
        col = self.d[:, self.index(name)]
        return {self.basis[i].name: int(c) for i, c in enumerate(col) if c}

    def degree_class(self, deg: int) -> int:
        return deg % self.grading_modulus if self.grading_modulus else deg

    def replace(self, **kw) -> "FilteredComplex":
        args = dict(basis=self.basis, d=self.d, p=self.p, grading_modulus=self.grading_modulus,
                    window=self.window, d_degree=self.d_degree)
        args.update(kw)
        return FilteredComplex(**args)

    def with_actions(self, actions: dict, window=None, check: bool = True) -> "FilteredComplex":
        basis = [BasisElement(b.name, b.degree, actions.get(b.name, b.action)) for b in self.basis]
        return FilteredComplex(basis, self.d, self.p, self.grading_modulus,
                               self.window if window is None else window, self.d_degree, check)

    # validation -------------------------------------------------------------
    def validate(self) -> ValidationReport:
        out = []
        a, b = self.window
        for e in self.basis:
            if not (a <= e.action < b):
                out.append(Violation("window", e.name,
                                     f"action {format_scalar(e.action)} outside window "
                                     f"[{format_scalar(a)}, {format_scalar(b)})"))
        rows, cols = np.nonzero(self.d)
        for r, c in zip(rows, cols):
            src, tgt = self.basis[c], self.basis[r]
            if not degree_equal(tgt.degree, src.degree + self.d_degree, self.grading_modulus):
                out.append(Violation("degree", src.name,
                                     f"differential from {src.name} to {tgt.name} has wrong degree"))
            if not tgt.action < src.action:
                out.append(Violation("filtration", src.name,
                                     f"filtration not strictly decreased ({src.name} -> {tgt.name})"))
        if np.any(matmul(self.d, self.d, self.p)):
            out.append(Violation("d_squared", None, "∂² ≠ 0"))
        return ValidationReport(tuple(out))

    # comparisons -------------------------------------------------------------
    def as_named(self) -> tuple:
        """Order-independent description: basis set and differential entries by name."""
        rows, cols = np.nonzero(self.d)
        entries = frozenset((self.basis[c].name, self.basis[r].name, int(self.d[r, c]))
                            for r, c in zip(rows, cols))
        return (self.p, frozenset(self.basis), entries)

    def same_as(self, other: "FilteredComplex") -> bool:
        return self.as_named() == other.as_named()

    def __eq__(self, other):
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return (self.basis == other.basis and self.p == other.p
                and self.grading_modulus == other.grading_modulus
                and self.window == other.window and np.array_equal(self.d, other.d))

    def __hash__(self):
        return hash((self.basis, self.p, self.d.tobytes()))

    def __repr__(self):
        gens = ", ".join(f"{b.name}:{b.degree}@{format_scalar(b.action)}" for b in self.basis)
        return f"FilteredComplex(p={self.p}, [{gens}], nnz={int(np.count_nonzero(self.d))})"

    # homology -----------------------------------------------------------------
    def homology_dims(self) -> dict[int, int]:
        """Dimension of homology per degree class (nonzero entries only)."""
        classes: dict[int, list[int]] = {}
        for i, b in enumerate(self.basis):
            classes.setdefault(self.degree_class(b.degree), []).append(i)
        out = {}
        for k, idx in classes.items():
            tgt = self._class_indices(classes, k + self.d_degree)
            src = self._class_indices(classes, k - self.d_degree)
            r_out = rank(self.d[np.ix_(tgt, idx)], self.p) if tgt else 0
            r_in = rank(self.d[np.ix_(idx, src)], self.p) if src else 0
            dim = len(idx) - r_out - r_in
            if dim:
                out[k] = dim
        return out

    def _class_indices(self, classes, k):
        return classes.get(self.degree_class(k), [])

    def total_homology(self) -> int:
        return sum(self.homology_dims().values())

    def is_acyclic(self) -> bool:
        return self.total_homology() == 0

    def submatrix(self, indices: Sequence[int]) -> np.ndarray:
        return self.d[np.ix_(indices, indices)]


def zero_complex(p: int = 2, window=(NEG_INF, INF)) -> FilteredComplex:
    return FilteredComplex([], None, p, 0, window)


def window_subquotient(C: FilteredComplex, a, b) -> FilteredComplex:
    """The subquotient C^{<b} / C^{<a} on basis elements with action in [a, b)."""
    a, b = as_action(a), as_action(b)
    if not a <= b:
        raise DomainError("window requires a <= b")
    lo = max(C.window[0], a)
    hi = min(C.window[1], b)
    if not lo < hi:
        return FilteredComplex([], None, C.p, C.grading_modulus, (lo, lo), C.d_degree)
    keep = [i for i, e in enumerate(C.basis) if lo <= e.action < hi]
    return FilteredComplex([C.basis[i] for i in keep], C.submatrix(keep), C.p,
                           C.grading_modulus, (lo, hi), C.d_degree)


# ---------------------------------------------------------------------------
# maps

@dataclass(frozen=True, eq=False)
class DegreeEpsMap:
    """A linear map between filtered complexes raising action by at most ``eps``.

    ``matrix`` has one row per target basis element and one column per source
    basis element. ``shift`` is the homological degree of the map (0 for chain
    maps, +1 for homotopies).
    """

    source: FilteredComplex
    target: FilteredComplex
    matrix: Any
    eps: Scalar = 0
    shift: int = 0

    def __post_init__(self):
        m = as_matrix(self.matrix, self.source.p, (len(self.target), len(self.source)))
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eps", as_action(self.eps))

    def violations(self, chain: bool = True) -> list[str]:
        return map_violations(self.source, self.target, self.matrix, self.eps, self.shift, chain)

    def is_chain_map(self) -> bool:
        return not np.any((matmul(self.target.d, self.matrix, self.source.p)
                           - matmul(self.matrix, self.source.d, self.source.p)) % self.source.p)

    def compose(self, other: "DegreeEpsMap") -> "DegreeEpsMap":
        """``self o other``."""
        return DegreeEpsMap(other.source, self.target,
                            matmul(self.matrix, other.matrix, self.source.p),
                            self.eps + other.eps, self.shift + other.shift)


def map_violations(source: FilteredComplex, target: FilteredComplex, m, eps, shift: int = 0,
                   chain: bool = False) -> list[str]:
    """Action bound, degree and (optionally) chain-map violations of a matrix."""
    out = []
    p = source.p
    m = as_matrix(m, p, (len(target), len(source)))
    eps = as_action(eps)
    mod = source.grading_modulus
    rows, cols = np.nonzero(m)
    for r, c in zip(rows, cols):
        s, t = source.basis[c], target.basis[r]
        if not t.action <= s.action + eps:
            out.append(f"entry {s.name} -> {t.name} raises action by more than {format_scalar(eps)}")
        if not degree_equal(t.degree, s.degree + shift, mod):
            out.append(f"entry {s.name} -> {t.name} has wrong degree")
    if chain:
        diff = (matmul(target.d, m, p) - matmul(m, source.d, p)) % p
        if np.any(diff):
            out.append("not a chain map")
    return out


def is_filtered_automorphism(C: FilteredComplex, m) -> bool:
    """Invertible chain map of degree 0 whose inverse is also of degree 0."""
    if map_violations(C, C, m, 0, 0, chain=True):
        return False
    try:
        inv = inverse(m, C.p)
    except ValueError:
        return False
    return not map_violations(C, C, inv, 0, 0, chain=False)


def solve_homotopy(C: FilteredComplex, D: FilteredComplex, g) -> np.ndarray | None:
    """Some ``h: C -> D`` with ``d_D h + h d_C = g``, or ``None`` if none exists.

    No action constraint is imposed on ``h``; callers check degrees separately.
    """
    from .linalg import solve

    p = C.p
    g = as_matrix(g, p, (len(D), len(C)))
    n, m = len(D), len(C)
    if n * m == 0:
        return np.zeros((n, m), dtype=np.int64)
    # vec(A h + h B) = (I (x) A + B^T (x) I) vec(h), column-major vec.
    op = (np.kron(np.eye(m, dtype=np.int64), D.d) + np.kron(C.d.T, np.eye(n, dtype=np.int64))) % p
    sol = solve(op, g.flatten(order="F"), p)
    if sol is None:
        return None
    return sol.reshape((n, m), order="F") % p


# ---------------------------------------------------------------------------
# mapping cones

@dataclass(frozen=True, eq=False)
class ConeData:
    """Data of a filtered mapping cone of ``B: C01 -> C10``.

    When ``c10_cochain`` is set, ``C10`` is a cochain complex (``d_degree = +1``)
    and its degrees are regraded to ``n - deg - 2`` inside the cone.
    """

    C01: FilteredComplex
    C10: FilteredComplex
    B: Any
    c10_cochain: bool = False
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "B", as_matrix(self.B, self.C01.p, (len(self.C10), len(self.C01))))


def cone_violations(data: ConeData) -> list[str]:
    """Chain-map and separation failures of cone data (empty if valid)."""
    out = []
    C01, C10, B, p = data.C01, data.C10, data.B, data.C01.p
    if C01.p != C10.p:
        out.append("complexes over different fields")
        return out
    if len(C01) and len(C10):
        if not min(C01.actions) > max(C10.actions):
            out.append("action separation violated: some C10 action is not below every C01 action")
    defect = (matmul(B, C01.d, p) - matmul(C10.d, B, p)) % p
    for r, c in zip(*np.nonzero(defect)):
        out.append(f"B is not a chain map at pair ({C01.basis[c].name}, {C10.basis[r].name})")
    shifted = _cone_c10_basis(data)
    for r, c in zip(*np.nonzero(B)):
        x, z = C01.basis[c], shifted[r]
        if not degree_equal(z.degree, x.degree - 1, C01.grading_modulus):
            out.append(f"B entry ({x.name}, {z.name}) has wrong degree")
    return out


def _cone_c10_basis(data: ConeData) -> list[BasisElement]:
    if not data.c10_cochain:
        return list(data.C10.basis)
    if data.n is None:
        raise DomainError("cochain C10 side needs the ambient dimension n for regrading")
    return [BasisElement(b.name, data.n - b.degree - 2, b.action) for b in data.C10.basis]


def build_cone(data: ConeData) -> FilteredComplex:
    """The complex C10 + C01 with differential [[-d10, B], [0, d01]]."""
    bad = cone_violations(data)
    if bad:
        raise DomainError("; ".join(bad))
    C01, C10, p = data.C01, data.C10, data.C01.p
    n10, n01 = len(C10), len(C01)
    d = np.zeros((n10 + n01, n10 + n01), dtype=np.int64)
    d[:n10, :n10] = (-C10.d) % p
    d[:n10, n10:] = data.B
    d[n10:, n10:] = C01.d
    basis = _cone_c10_basis(data) + list(C01.basis)
    lo = min(C10.window[0], C01.window[0])
    hi = max(C10.window[1], C01.window[1])
    return FilteredComplex(basis, d, p, C01.grading_modulus, (lo, hi))


def cone_map(f01: DegreeEpsMap, f10: DegreeEpsMap, h, source: ConeData,
             target: ConeData) -> DegreeEpsMap:
    """Block map [[f10, h], [0, f01]] between cones, checked to be a chain map."""
    cone_s, cone_t = build_cone(source), build_cone(target)
    p = cone_s.p
    n10, n01 = len(source.C10), len(source.C01)
    m10, m01 = len(target.C10), len(target.C01)
    h = as_matrix(h, p, (m10, n01))
    block = np.zeros((m10 + m01, n10 + n01), dtype=np.int64)
    block[:m10, :n10] = f10.matrix
    block[:m10, n10:] = h
    block[m10:, n10:] = f01.matrix
    eps = max(f01.eps, f10.eps)
    bad = map_violations(cone_s, cone_t, block, eps, 0, chain=True)
    if bad:
        raise DomainError("cone map invalid (homotopy identity fails): " + "; ".join(sorted(set(bad))))
    return DegreeEpsMap(cone_s, cone_t, block, eps)


# ---------------------------------------------------------------------------
# invariance checks

def is_delta_gapped(C: FilteredComplex, delta) -> bool:
    vals = sorted(set(C.actions))
    return all(b - a >= delta for a, b in zip(vals, vals[1:]))


@dataclass(frozen=True, eq=False)
class HomotopyCertificate:
    """Homotopies ``K`` on the source and ``K2`` on the target of a pair of maps.

    They certify ``psi phi = Phi + d K + K d`` and ``phi psi = Phi' + d K2 + K2 d``
    with ``Phi``, ``Phi'`` filtered automorphisms.
    """

    K: Any
    K2: Any


def _certificate_failures(phi: DegreeEpsMap, psi: DegreeEpsMap,
                          cert: HomotopyCertificate | None, eps) -> list[str]:
    C, D = phi.source, phi.target
    p = C.p
    out = []
    for label, mp in (("phi", phi), ("psi", psi)):
        out += [f"{label}: {m}" for m in map_violations(mp.source, mp.target, mp.matrix, eps, 0, True)]
    if psi.source is not D and not psi.source.same_as(D):
        out.append("psi must map the target of phi back to its source")
    if cert is None:
        out.append("homotopy certificates missing")
        return out
    for label, X, K, first, second in (("K", C, cert.K, phi, psi), ("K2", D, cert.K2, psi, phi)):
        K = as_matrix(K, p, (len(X), len(X)))
        out += [f"{label}: {m}" for m in map_violations(X, X, K, eps, 1, False)]
        comp = matmul(second.matrix, first.matrix, p)
        Phi = (comp - matmul(X.d, K, p) - matmul(K, X.d, p)) % p
        if not is_filtered_automorphism(X, Phi):
            out.append(f"composite minus (d{label} + {label}d) is not a filtered automorphism")
    return out


def check_simple_equivalence(phi: DegreeEpsMap, psi: DegreeEpsMap,
                             homotopies: HomotopyCertificate | None, delta) -> Verdict:
    """Check the small-degree equivalence criterion for a chain isomorphism.

    Hypotheses: ``C`` is delta-gapped, delta > 4 eps > 0, the bases correspond
    by position with ``l(x) - l'(x') <= eps``, and the homotopy certificates
    hold. On success ``data`` holds ``inverse`` (exact inverse of phi),
    ``psi_is_inverse``, ``triangular`` and ``unit_diagonal``.
    """
    C, D = phi.source, phi.target
    eps = max(phi.eps, psi.eps)
    delta = as_action(delta)
    hyp = []
    if not eps > 0:
        hyp.append("eps must be positive")
    if not delta > 4 * eps:
        hyp.append(f"gap hypothesis fails: delta = {format_scalar(delta)} is not > 4 eps = "
                   f"{format_scalar(4 * eps)}")
    if not is_delta_gapped(C, delta):
        hyp.append("source complex is not delta-gapped")
    if len(C) != len(D):
        hyp.append("bases are not in bijection")
    else:
        for x, y in zip(C.basis, D.basis):
            if not x.action - y.action <= eps:
                hyp.append(f"actions of {x.name} and {y.name} differ by more than eps")
    if hyp:
        return Verdict("hypothesis-violation", tuple(hyp))
    cert = _certificate_failures(phi, psi, homotopies, eps)
    if cert:
        return Verdict("fail", tuple(cert))
    p = C.p
    try:
        inv = inverse(phi.matrix, p)
    except ValueError:
        return Verdict("fail", ("phi is not invertible",))
    psi_inv = bool(np.array_equal(inv, psi.matrix % p))
    acts = C.actions
    n = len(C)
    triangular = all(not phi.matrix[r, c] or acts[r] <= acts[c] for r in range(n) for c in range(n))
    distinct = len(set(acts)) == n
    if distinct:
        unit_diag = all(phi.matrix[i, i] for i in range(n))
    else:
        unit_diag = True
        for level in set(acts):
            idx = [i for i in range(n) if acts[i] == level]
            if rank(phi.matrix[np.ix_(idx, idx)], p) != len(idx):
                unit_diag = False
    if not (triangular and unit_diag):
        return Verdict("fail", ("phi is not action-triangular with invertible diagonal",),
                       {"inverse": inv})
    msg = ("isomorphism, upper-triangular with unit diagonal" if distinct else
           "isomorphism, block upper-triangular with invertible diagonal blocks")
    return Verdict("pass", (msg,), {"inverse": inv, "psi_is_inverse": psi_inv,
                                     "triangular": triangular, "unit_diagonal": unit_diag,
                                     "distinct_actions": distinct})


def check_birth_death_shape(C: FilteredComplex, C2: FilteredComplex, a, delta,
                            phi: DegreeEpsMap | None = None, psi: DegreeEpsMap | None = None,
                            homotopies: HomotopyCertificate | None = None) -> Verdict:
    """Check that the two-dimensional window of ``C`` is a cancelling pair.

    Requires C^{[a+delta, a+3delta)} = C^{[a, a+4delta)} of dimension two and
    C2^{[a, a+4delta)} = 0. When maps are supplied, delta > eps and the
    homotopy certificates are checked too. On success ``data`` has ``x``, ``y``
    and the unit ``k`` with d x = k y.
    """
    a, delta = as_action(a), as_action(delta)
    outer = window_subquotient(C, a, a + 4 * delta)
    inner = window_subquotient(C, a + delta, a + 3 * delta)
    hyp = []
    if len(outer) != 2 or outer.names != inner.names:
        hyp.append(f"window dimension mismatch: [a, a+4δ) has {len(outer)} generators, "
                   f"[a+δ, a+3δ) has {len(inner)}")
    if len(window_subquotient(C2, a, a + 4 * delta)):
        hyp.append("second complex is nonzero in the window")
    if phi is not None or psi is not None:
        if phi is None or psi is None:
            hyp.append("both phi and psi are required")
        else:
            eps = max(phi.eps, psi.eps)
            if not delta > eps > 0:
                hyp.append("need delta > eps > 0")
    if hyp:
        return Verdict("hypothesis-violation", tuple(hyp))
    if phi is not None:
        cert = _certificate_failures(phi, psi, homotopies, max(phi.eps, psi.eps))
        if cert:
            return Verdict("fail", tuple(cert))
    d = outer.d
    for c in range(2):
        r = 1 - c
        if d[r, c]:
            x, y = outer.basis[c], outer.basis[r]
            return Verdict("pass", (f"∂{x.name} = {int(d[r, c])}·{y.name}",),
                           {"x": x.name, "y": y.name, "k": int(d[r, c])})
    return Verdict("fail", ("window complex not acyclic",))
