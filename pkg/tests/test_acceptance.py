"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import json
import re
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from legendrian_persistence.barcode import (EVENT_KINDS, apply_event, compute_barcode, event_kind,
                                            rank_oracle_barcode)
from legendrian_persistence.bounds import (ChordSpectrum, ConformalProfile, ExpScaled,
                                           adversarial_min_survivors, main_theorem_bound,
                                           scf_energy_constant, trace_lengths)
from legendrian_persistence.cli import main
from legendrian_persistence.complexes import check_simple_equivalence
from legendrian_persistence.errors import ChainMapError
from legendrian_persistence.grading import (ChordIndexInput, OrbitIndexInput, RPnChordLabel,
                                            halfplane_index, min_perturbed_chord_degree,
                                            min_perturbed_orbit_degree, plane_index,
                                            rpn_generate_rfc, rpn_mixed_chord)
from legendrian_persistence.linalg import matmul
from legendrian_persistence.rabinowitz import BananaCounts, build_rfc, derive_linearized_blocks
from legendrian_persistence.randgen import (random_complex, random_dga, random_equivalence,
                                            random_rfc_input, random_script, random_sti)
from legendrian_persistence.scalars import INF, NEG_INF, approx
from legendrian_persistence.tame import find_augmentations, linearize, transport_along

F = Fraction


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


# 1 ---------------------------------------------------------------------------

_NAME = re.compile(r"c(\d+)_k(m?)(\d+)")


def _label(n, name):
    j, neg, k = _NAME.fullmatch(name).groups()
    return RPnChordLabel(n, int(j), -int(k) if neg else int(k))


def test_rpn_regression(report, capsys):
    start = time.perf_counter()
    problems, sizes = [], []
    for n in (1, 2, 3):
        code = main(["rpn", "--n", str(n), "--window=-6,6", "--format", "json"])
        body = json.loads(capsys.readouterr().out)
        rfc = rpn_generate_rfc(n, (-6, 6))
        C = rfc.complex
        sizes.append(len(C))
        degs = sorted(b["degree"] for b in body["complex"]["basis"])
        if code != 0 or len(C) < 12:
            problems.append(f"n={n}: exit {code}, {len(C)} chords")
        if degs != list(range(degs[0], degs[0] + len(degs))):
            problems.append(f"n={n}: degrees not consecutive")
        if C.d.any() or body["complex"]["d"]:
            problems.append(f"n={n}: nonzero differential")
        if any(b["end"] != "inf" for b in body["barcode"]["bars"]) or \
                len(body["barcode"]["bars"]) != len(C):
            problems.append(f"n={n}: finite bars")
        for b in C.basis:
            lab = _label(n, b.name)
            ch = rpn_mixed_chord(lab)
            if b.degree != lab.j + lab.k * (n + 1) - 1 or b.action != ch.action:
                problems.append(f"n={n}: {b.name} has wrong degree or action")
        by_action = [b.name for b in sorted(C.basis, key=lambda b: b.action)]
        by_label = [b.name for b in sorted(C.basis, key=lambda b: (_label(n, b.name).k, _label(n, b.name).j))]
        if by_action != by_label:
            problems.append(f"n={n}: action order is not lexicographic")
    elapsed = time.perf_counter() - start
    if elapsed >= 1:
        problems.append(f"runtime {elapsed:.3f} s")
    report(1, not problems, f"RP^n regression, chords per n = {sizes}, {elapsed:.3f} s"
           + (f"; {problems}" if problems else ""))


# 2 ---------------------------------------------------------------------------

def test_index_tables(report):
    bad = []
    for n, m in itertools.product(range(1, 7), repeat=2):
        if plane_index(OrbitIndexInput(n, n, m * (n + 1))) != (2 * m + 2) * (n + 1) - 4:
            bad.append(("plane", n, m))
        if halfplane_index(ChordIndexInput(n, m * (n + 1))) != (1 + m) * (n + 1) - 2:
            bad.append(("halfplane", n, m))
    for n in range(1, 7):
        if min_perturbed_orbit_degree(n) != 2 * n:
            bad.append(("orbit min", n))
        if min_perturbed_chord_degree(n) != n:
            bad.append(("chord min", n))
    report(2, not bad, f"index tables for 1 <= n, m, k <= 6, mismatches: {bad}")


# 3 ---------------------------------------------------------------------------

def test_barcode_oracle(report):
    count, mismatches = 0, []
    for p in (2, 3):
        for seed in range(260):
            C = random_complex([p, seed], n_max=12, p=p, ties=seed % 3 == 0)
            assert len(C) <= 12
            count += 1
            if compute_barcode(C).bars != rank_oracle_barcode(C).bars:
                mismatches.append((p, seed))
    report(3, count >= 500 and not mismatches,
           f"{count} complexes over F_2 and F_3, oracle mismatches: {mismatches}")


# 4 ---------------------------------------------------------------------------

def test_event_evolution(report):
    kinds, mismatches, scripts = Counter(), [], 0
    for seed in range(220):
        script = random_script(seed, n_events=6, p=(2, 3)[seed % 2])
        scripts += 1
        C = script.initial
        for t, ev in script.events:
            out, C = apply_event(compute_barcode(C), C, ev, verify=False)
            kinds[event_kind(ev)] += 1
            if out.bars != compute_barcode(C).bars:
                mismatches.append((seed, str(t), event_kind(ev)))
    missing = sorted(set(EVENT_KINDS) - set(kinds))
    ok = scripts >= 200 and not mismatches and not missing
    report(4, ok, f"{scripts} scripts, events per kind {dict(sorted(kinds.items()))}, "
                  f"mismatches: {mismatches}, untested kinds: {missing}")


# 5 ---------------------------------------------------------------------------

def test_simple_equivalence_suite(report):
    expected = "isomorphism, upper-triangular with unit diagonal"
    false_rejects, false_accepts, n = [], [], 0
    for seed in range(220):
        p = (2, 3)[seed % 2]
        phi, psi, cert, delta = random_equivalence(seed, p=p)
        eps = max(phi.eps, psi.eps)
        assert 4 * eps < delta
        v = check_simple_equivalence(phi, psi, cert, delta)
        if v.status != "pass" or v.messages != (expected,):
            false_rejects.append((seed, v.status, v.messages))
        bad_phi, bad_psi, bad_cert, bad_delta = random_equivalence(seed, p=p, delta=4 * eps)
        w = check_simple_equivalence(bad_phi, bad_psi, bad_cert, bad_delta)
        if w.status != "hypothesis-violation":
            false_accepts.append((seed, w.status))
        n += 1
    report(5, n >= 200 and not false_rejects and not false_accepts,
           f"{n} gapped instances and {n} gap violations, false rejects {len(false_rejects)}, "
           f"false accepts {len(false_accepts)}")


# 6 ---------------------------------------------------------------------------

def test_sti_invariance(report):
    tested, changed, seed = 0, [], 0
    while tested < 110 and seed < 2000:
        seed += 1
        p = (2, 3)[seed % 2]
        dga = random_dga(seed, n_gens=6, p=p)
        augs = find_augmentations(dga)
        if not augs or len(dga.generators) > 8:
            continue
        eps = augs[seed % len(augs)]
        length = 1 + seed % 10
        sti, out = random_sti(seed + 1, dga, length, max_gens=8)
        assert len(sti) <= 10 and len(out.generators) <= 8
        out, eps2 = transport_along(dga, sti, eps)
        if linearize(dga, eps).homology_dims() != linearize(out, eps2).homology_dims():
            changed.append(seed)
        tested += 1
    report(6, tested >= 100 and not changed,
           f"{tested} STI sequences (length <= 10, <= 8 generators), homology changed: {changed}")


# 7 ---------------------------------------------------------------------------

def test_cone_identity(report):
    valid, nonzero_sq, caught, wrong_pairs, n_bad = 0, [], 0, [], 0
    for seed in range(220):
        p = (2, 3)[seed % 2]
        link, eps, counts, n = random_rfc_input(seed, p)
        rfc = build_rfc(link, eps, counts, (NEG_INF, INF), n)
        if matmul(rfc.complex.d, rfc.complex.d, p).any():
            nonzero_sq.append(seed)
        valid += 1
        blocks = derive_linearized_blocks(link, eps)
        rng = np.random.default_rng(seed)
        for _ in range(5):
            x = blocks.C01.names[int(rng.integers(len(blocks.C01)))]
            z = blocks.C10.names[int(rng.integers(len(blocks.C10)))]
            bad = dict(counts.entries)
            bad[(x, z)] = (bad.get((x, z), 0) + 1) % p
            B = BananaCounts(bad).matrix(blocks, p)
            defect = (matmul(B, blocks.d01, p) - matmul(blocks.d10, B, p)) % p
            if not defect.any():
                continue
            n_bad += 1
            expected = sorted((blocks.C01.basis[c].name, blocks.C10.basis[r].name)
                              for r, c in zip(*np.nonzero(defect)))
            try:
                build_rfc(link, eps, BananaCounts(bad), (NEG_INF, INF), n)
            except ChainMapError as exc:
                caught += 1
                if sorted(exc.pairs) != expected or not all(f"({a}, {b})" in str(exc) for a, b in expected):
                    wrong_pairs.append(seed)
            break
    ok = valid >= 200 and not nonzero_sq and caught == n_bad and n_bad > 0 and not wrong_pairs
    report(7, ok, f"{valid} valid cones with d^2 = 0 (failures {nonzero_sq}), "
                  f"{caught}/{n_bad} violations rejected naming the pair (misnamed {wrong_pairs})")


# 8 ---------------------------------------------------------------------------

def test_quantitative_formulas(report):
    checks = {}
    chords = ChordSpectrum((F(1, 2), 1))
    checks["circle bound 2"] = main_theorem_bound((1, 1), 1, F(1, 10), chords).value == 2
    checks["RP^n bound n+1"] = all(main_theorem_bound((1,) * (n + 1), 1, F(1, 10), chords).value == n + 1
                                   for n in range(1, 7))
    checks["gate"] = not main_theorem_bound((1, 1), 1, F(1, 2), chords).admissible
    checks["scf 1/500"] = scf_energy_constant([F(3, 5), F(4, 5), 1], F(1, 10)) == F(1, 500)
    tl = trace_lengths(ConformalProfile(F(-1, 10), F(1, 5), F(1, 100)))
    checks["len01"] = tl.len01 == ExpScaled(F(1, 10), F(101, 100))
    checks["c0"] = tl.c0 == ExpScaled(F(3, 10), F(101, 100))
    lo, hi = tl.c0.enclosure(128)
    checks["c0 enclosure"] = hi - lo < F(1, 10 ** 30) and tl.c0.decimal().startswith("0.82368030450507")
    zero = trace_lengths(ConformalProfile(0, 0, F(1, 100)))
    checks["f = 0"] = zero.len01.coef == zero.len10.coef == zero.c0.coef == 0
    additive = True
    for a, b, e in itertools.product(range(-10, 1), range(0, 11), (1, 7, 50)):
        t = trace_lengths(ConformalProfile(F(a, 10), F(b, 10), F(e, 100)))
        additive &= t.len01 + t.len10 == t.c0
    checks["additivity"] = additive
    failed = [k for k, v in checks.items() if not v]
    report(8, not failed, f"{len(checks)} closed-form checks, failed: {failed}")


# 9 ---------------------------------------------------------------------------

def test_adversarial_persistence(report):
    start = time.perf_counter()
    grid = [F(1, 4), F(1, 2), F(3, 4), F(1)]
    runs, violations, speed = 0, [], []
    for m in range(1, 5):
        for lengths in itertools.combinations(grid, m):
            for betti in ((1, 1), (1, 1, 1), (1, 1, 1, 1), (2, 1, 1)):
                for k in range(1, m + 1):
                    gate = lengths[k - 1]
                    for osc in sorted({gate / 2, gate * 7 / 8}):
                        for steps in (4, 8):
                            res = adversarial_min_survivors(betti, lengths, osc, steps=steps, k=k)
                            runs += 1
                            if not res.bound.admissible or not res.holds:
                                violations.append((betti, lengths, str(osc), steps, k))
                            if not res.speed_law_ok:
                                speed.append((betti, lengths, str(osc), steps, k))
    elapsed = time.perf_counter() - start
    ok = not violations and not speed and elapsed < 60
    report(9, ok, f"{runs} exhaustive searches (<= 4 chords, <= 8 steps) in {elapsed:.1f} s, "
                  f"bound violations {violations}, speed-law failures {speed}")
