"""Index formulas for planes and half-planes, and the RP^n mixed-chord complex."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import FilteredDGA, Generator
from .errors import DomainError
from .pwc import PLFunction, PWCScript
from .rabinowitz import LinkDGA, RFCComplex, build_rfc
from .scalars import PiLinear, Scalar, approx, as_action, pi_linear
from .tame import Augmentation


@dataclass(frozen=True)
class OrbitIndexInput:
    """Integer data of a Reeb orbit capped by a plane.

    ``bott_dim`` and ``morse_index`` describe a Morse perturbation of a Bott
    family (both zero when nondegenerate).
    """

    n: int
    mu_cz: int
    c1rel: int
    bott_dim: int = 0
    morse_index: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be at least 1")
        _check_bott(self.bott_dim, self.morse_index)


@dataclass(frozen=True)
class ChordIndexInput:
    """Integer data of a Reeb chord capped by a half-plane."""

    cz: int
    maslov: int
    bott_dim: int = 0
    morse_index: int = 0

    def __post_init__(self):
        _check_bott(self.bott_dim, self.morse_index)


def _check_bott(bott_dim: int, morse_index: int) -> None:
    if not 0 <= morse_index <= bott_dim:
        raise DomainError("need 0 <= morse_index <= bott_dim")


def plane_index(inp: OrbitIndexInput) -> int:
    """``(n+1) - 3 + mu_cz + 2 c1rel``, shifted by ``morse_index - bott_dim``."""
    return (inp.n + 1) - 3 + inp.mu_cz + 2 * inp.c1rel + inp.morse_index - inp.bott_dim


def halfplane_index(inp: ChordIndexInput) -> int:
    """``(cz - 1) + maslov``, shifted by ``morse_index - bott_dim``."""
    return (inp.cz - 1) + inp.maslov + inp.morse_index - inp.bott_dim


def rpn_orbit_degree(n: int, m: int, morse_index: int | None = None) -> int:
    """Degree of the m-fold Hopf orbit family in RP^{2n+1}, optionally perturbed.

    The family has Bott dimension 2n, ``mu_cz = n`` and ``c1rel = m(n+1)``.
    """
    if morse_index is None:
        return plane_index(OrbitIndexInput(n, n, m * (n + 1)))
    return plane_index(OrbitIndexInput(n, n, m * (n + 1), 2 * n, morse_index))


def rpn_pure_chord_degree(n: int, k: int, morse_index: int | None = None) -> int:
    """Degree of the k-th pure chord family of RP^n, optionally perturbed (Bott dimension n)."""
    if morse_index is None:
        return halfplane_index(ChordIndexInput(n, k * (n + 1)))
    return halfplane_index(ChordIndexInput(n, k * (n + 1), n, morse_index))


def min_perturbed_orbit_degree(n: int, m_max: int = 6) -> int:
    """Minimum over ``1 <= m <= m_max`` and all Morse indices in ``[0, 2n]``."""
    return min(rpn_orbit_degree(n, m, i) for m in range(1, m_max + 1) for i in range(2 * n + 1))


def min_perturbed_chord_degree(n: int, k_max: int = 6) -> int:
    """Minimum over ``1 <= k <= k_max`` and all Morse indices in ``[0, n]``."""
    return min(rpn_pure_chord_degree(n, k, i) for k in range(1, k_max + 1) for i in range(n + 1))


# ---------------------------------------------------------------------------
# mixed chords of RP^n and its push-off

def default_epsilon(n: int) -> PiLinear:
    """1/100 of the minimal action gap ``pi / (2(n+1))``."""
    return PiLinear(Fraction(1, 200 * (n + 1)))


@dataclass(frozen=True)
class RPnChordLabel:
    """Mixed chord ``c^k_j`` with ``1 <= j <= n+1`` and ``k`` any integer."""

    n: int
    j: int
    k: int
    epsilon: Scalar | None = None

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.j <= self.n + 1:
            raise DomainError("need n >= 1 and 1 <= j <= n+1")
        eps = default_epsilon(self.n) if self.epsilon is None else as_action(self.epsilon)
        if not (0 < eps < PiLinear(Fraction(1, self.n + 1))):
            raise DomainError("epsilon must lie in (0, pi/(n+1))")
        object.__setattr__(self, "epsilon", eps)


@dataclass(frozen=True)
class MixedChord:
    degree: int
    action: Scalar
    direction: str

    @property
    def flavor(self) -> str:
        return "mixed01" if self.direction == "0->1" else "mixed10"


def rpn_mixed_chord(label: RPnChordLabel) -> MixedChord:
    """Degree ``j + k(n+1) - 1`` and signed action ``(pi (j/(n+1) + k) - eps) / 2``.

    The same expression is negative exactly when ``k < 0``; those chords run
    from component 1 to component 0.
    """
    n, j, k = label.n, label.j, label.k
    degree = j + k * (n + 1) - 1
    action = (pi_linear(Fraction(j, n + 1) + k) - label.epsilon) / 2
    return MixedChord(degree, action, "0->1" if k >= 0 else "1->0")


def chord_name(j: int, k: int) -> str:
    return f"c{j}_k{k}" if k >= 0 else f"c{j}_km{-k}"


def _labels_in_window(n: int, a, b, eps) -> list[RPnChordLabel]:
    """All labels whose action lies in ``[a, b)``, ordered by action."""
    a, b = as_action(a), as_action(b)
    if not a < b:
        return []
    lo = math.floor(2 * approx(a) / math.pi) - 2
    hi = math.ceil(2 * approx(b) / math.pi) + 2
    out = []
    for k in range(lo, hi + 1):
        for j in range(1, n + 2):
            lab = RPnChordLabel(n, j, k, eps)
            if a <= rpn_mixed_chord(lab).action < b:
                out.append(lab)
    return out


def rpn_link_dga(n: int, window, epsilon=None) -> LinkDGA:
    """Link DGA of the mixed chords with action in the window; zero differential."""
    gens = []
    for lab in _labels_in_window(n, window[0], window[1], epsilon):
        ch = rpn_mixed_chord(lab)
        name = chord_name(lab.j, lab.k)
        if ch.direction == "0->1":
            gens.append(Generator(name, ch.degree, ch.action, "mixed01"))
        else:
            gens.append(Generator(name, n - 2 - ch.degree, -ch.action, "mixed10"))
    return LinkDGA(FilteredDGA(gens, {}, p=2))


def rpn_generate_rfc(n: int, window, epsilon=None) -> RFCComplex:
    """The windowed Rabinowitz cone of RP^n and its push-off: one generator per
    chord in the window, vanishing differential."""
    link = rpn_link_dga(n, window, epsilon)
    return build_rfc(link, Augmentation({}, 2), None, window, n)


def rpn_shift(n: int) -> PiLinear:
    """Action gap between consecutive chords, ``pi / (2(n+1))``."""
    return PiLinear(Fraction(1, 2 * (n + 1)))


def next_label(label: RPnChordLabel) -> RPnChordLabel:
    """``c^k_j -> c^k_{j+1}``, and ``c^k_{n+1} -> c^{k+1}_1``."""
    if label.j <= label.n:
        return RPnChordLabel(label.n, label.j + 1, label.k, label.epsilon)
    return RPnChordLabel(label.n, 1, label.k + 1, label.epsilon)


def rpn_action_shift_script(n: int, window, epsilon=None) -> PWCScript:
    """Script over ``t in [0, 1]`` carrying every chord to the next one.

    All actions and both window ends rise by ``pi/(2(n+1))``; nothing crosses
    the window, so there are no births, deaths, entries or exits.
    """
    rfc = rpn_generate_rfc(n, window, epsilon)
    C = rfc.complex
    step = rpn_shift(n)
    trajs = {b.name: PLFunction(((0, b.action), (1, b.action + step))) for b in C.basis}
    a, b = as_action(window[0]), as_action(window[1])
    win = (PLFunction(((0, a), (1, a + step))), PLFunction(((0, b), (1, b + step))))
    return PWCScript((0, 1), C.replace(window=(a, b)), trajs, win, ())
