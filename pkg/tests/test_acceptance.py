"""Acceptance criteria, each run at its stated tolerance.

Every test records one pass/fail line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""
import time

import numpy as np
import pytest

from helpers import (cluster_means, draw_two_mode, multiset_mismatch, random_equal_detuning,
                     random_model, random_three_mode)
from quadstab.core import check_symplectic, eom_matrix
from quadstab.dynamics import GaussianState, Propagator, envelope_rate, occupation_series
from quadstab.normal_forms import JordanTypeSpec, build_normal_form, geometric_split
from quadstab.optomech2 import (CASE_TABLE, TwoModeParams, appendix_b_closed_forms, boundary_distance,
                                build_two_mode, case_label, stability_condition_eq17, steady_state_map)
from quadstab.optomech3 import (ThreeModeParams, appendix_c_classify, build_three_mode,
                                interface_sign_changes, reduce_equal_detuning, three_mode_sweep)
from quadstab.spectral import ModeKind, boundedness_oracle, is_dynamically_stable, min_axis_distance

OMEGA = 1.0
BAND = 1e-6 * OMEGA


@pytest.fixture(scope="module")
def case_grid():
    """Spectral verdicts on the 301 x 201 grid, timed single-threaded."""
    deltas = np.linspace(-3, 3, 301) * OMEGA
    kappas = np.linspace(0, 2, 201) * OMEGA
    t0 = time.perf_counter()
    points = []
    for D in deltas:
        for k in kappas:
            p = TwoModeParams(D, OMEGA, k)
            label = case_label(D, OMEGA, k)
            verdict = is_dynamically_stable(eom_matrix(build_two_mode(p)))
            points.append((p, label, verdict))
    elapsed = time.perf_counter() - t0
    return points, elapsed


def test_criterion_1_case_table(case_grid, acceptance):
    points, elapsed = case_grid
    bad = []
    n_off = 0
    for p, label, verdict in points:
        if boundary_distance(p) <= BAND:
            continue
        n_off += 1
        kinds, stable = CASE_TABLE[label]
        spec_kinds = sorted(k.value for k in verdict.mode_kinds)
        if stable != verdict.stable or sorted(k.value for k in kinds) != spec_kinds:
            bad.append((p, label, spec_kinds))
    ok = not bad and elapsed < 30.0
    acceptance(1, ok, f"{len(points)} points, {n_off} off-band, {len(bad)} disagreements, {elapsed:.1f} s")
    assert not bad, bad[:5]
    assert elapsed < 30.0


def _inequality_boundary_distance(p):
    """Distance to the set where the left inequality turns into an equality,
    ``(Delta^2 - Omega^2)^2 + 16 Omega Delta |kappa|^2 = 0``; for ``Delta > 0``
    this is the single point ``Delta = Omega``, ``kappa = 0``."""
    disc = (p.Delta**2 - p.Omega**2) ** 2 + 16 * p.Omega * p.Delta * abs(p.kappa) ** 2
    return np.sqrt(abs(disc)) / (2 * p.Omega)


def test_criterion_2_inequality(case_grid, acceptance):
    points, _ = case_grid
    bad = []
    on_own_boundary = 0
    for p, _, v in points:
        if boundary_distance(p) <= BAND:
            continue
        if _inequality_boundary_distance(p) <= BAND:
            on_own_boundary += 1
            continue
        if stability_condition_eq17(p) != v.stable:
            bad.append(p)
    acceptance(2, not bad, f"{len(bad)} off-band disagreements between the inequality and the spectrum "
                           f"({on_own_boundary} points on the inequality's own equality set excluded)")
    assert not bad


def test_criterion_3_growth_rate(acceptance):
    t = np.linspace(0, 50 / OMEGA, 2001)
    red = build_two_mode(TwoModeParams(1.5, OMEGA, 0.9))
    A = eom_matrix(red).A
    lam = np.linalg.eigvals(A).real.max()
    series = occupation_series(red, t)
    rate = envelope_rate(t, series.n, t_min=10 / OMEGA)
    rel = abs(rate - 2 * lam) / (2 * lam)

    blue = build_two_mode(TwoModeParams(-1.5, OMEGA, 0.2))
    eb = np.linalg.eigvals(eom_matrix(blue).A)
    period = 2 * np.pi / np.abs(eb.imag).min()
    sb = occupation_series(blue, t)
    first = sb.n[t <= period].max()
    ratio = sb.n.max() / first
    ok = rel < 0.05 and ratio < 10
    acceptance(3, ok, f"rate error {rel:.2e}, bounded run max/first-period max {ratio:.2f}")
    assert rel < 0.05
    assert ratio < 10


def test_criterion_4_closed_forms(acceptance):
    rng = np.random.default_rng(4)
    worst = {"symp": 0.0, "modal": 0.0, "eig": 0.0}
    fallbacks = {}
    for label in "abcdefg":
        for i in range(50):
            p = draw_two_mode(label, rng)
            V = build_two_mode(p).V
            r = appendix_b_closed_forms(p, rng=i)
            assert r.label == label
            if r.source != "printed":
                fallbacks[label] = fallbacks.get(label, 0) + 1
                assert r.discrepancy
            ok_s, symp = check_symplectic(r.S, tol=1e-8)
            assert ok_s
            worst["symp"] = max(worst["symp"], symp)
            worst["modal"] = max(worst["modal"], r.modal_residual / np.linalg.norm(V))
            ev = cluster_means(np.linalg.eigvals(eom_matrix(build_two_mode(p)).A))
            worst["eig"] = max(worst["eig"], multiset_mismatch(r.eigenvalues, ev))
    ok = worst["symp"] <= 1e-8 and worst["modal"] <= 1e-7 and worst["eig"] <= 1e-9
    fb = ", ".join(f"({k}) {v}/50" for k, v in sorted(fallbacks.items())) or "none"
    acceptance(4, ok, f"symplectic {worst['symp']:.1e}, modal {worst['modal']:.1e}, "
                      f"eigenvalues {worst['eig']:.1e}; numeric fallback used for {fb}")
    assert ok


def test_criterion_5_equal_detuning(acceptance):
    rng = np.random.default_rng(5)
    bad = []
    checked = 0
    for _ in range(500):
        p = random_equal_detuning(rng)
        red = reduce_equal_detuning(p)
        assert red.reduced is not None
        sub = TwoModeParams(red.reduced.epsilon * p.Delta1, p.Omega, red.reduced.kappa_s)
        if boundary_distance(sub) <= 1e-6 * p.Omega:
            continue
        checked += 1
        ac = appendix_c_classify(p)
        spectral = is_dynamically_stable(eom_matrix(build_three_mode(p))).stable
        reduced_case = red.case.label in ("a", "e")
        if not (red.stable == ac.stable == spectral == red.reduced_condition == reduced_case):
            bad.append(p)
    co_detuned = reduce_equal_detuning(ThreeModeParams(1.5, 1.5, 1.0, 1.0, 0.6))
    counter_detuned = reduce_equal_detuning(ThreeModeParams(1.5, -1.5, 1.0, 0.15, 0.25))
    examples_ok = (not co_detuned.stable and co_detuned.case.label == "c" and counter_detuned.stable and counter_detuned.case.label == "e")
    ok = not bad and examples_ok
    acceptance(5, ok, f"{checked} off-band draws, {len(bad)} disagreements; "
                      f"co-detuned example case ({co_detuned.case.label}) unstable, counter-detuned example case ({counter_detuned.case.label}) stable")
    assert not bad, bad[:3]
    assert examples_ok


def test_criterion_6_cubic_classification(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    inconsistent = []
    for _ in range(500):
        p = random_three_mode(rng)
        r = appendix_c_classify(p)
        ev = np.linalg.eigvals(eom_matrix(build_three_mode(p)).A)
        lam = np.concatenate([np.sqrt(np.asarray(r.roots, dtype=complex)),
                              -np.sqrt(np.asarray(r.roots, dtype=complex))])
        worst = max(worst, multiset_mismatch(lam, ev))
        n_hyp = sum(k is not ModeKind.CIRCULAR for k in r.spectral_kinds)
        n_table = sum(k is not ModeKind.CIRCULAR for k in r.mode_kinds)
        if not r.consistent or n_hyp != n_table:
            inconsistent.append(p)
    ok = worst <= 1e-8 and not inconsistent
    acceptance(6, ok, f"root mismatch {worst:.1e}, {len(inconsistent)} case/kind inconsistencies")
    assert worst <= 1e-8
    assert not inconsistent


INTERFACE_PANELS = {"a": (1.5, 0.5), "b": (-1.5, -0.5), "c": (-1.5, 0.5)}


@pytest.fixture(scope="module")
def interface_sweeps():
    g = np.linspace(0, 1, 201)
    return {k: three_mode_sweep(D1, D2, OMEGA, g, g) for k, (D1, D2) in INTERFACE_PANELS.items()}


def _column_changes(sw):
    """Sign changes of the stable flag along |kappa2| for every |kappa1|
    column that contains a stable point."""
    return {float(sw.k1[i]): interface_sign_changes(sw.stable[i, :])
            for i in range(len(sw.k1)) if sw.stable[i, :].any()}


def test_criterion_7_interfaces(interface_sweeps, acceptance):
    details = []
    ok = True
    for name, sw in interface_sweeps.items():
        changes = _column_changes(sw)
        extra = [k for k, c in changes.items() if c != 1]
        has_origin = bool(sw.stable[0, 0])
        ok &= has_origin and not extra
        span = f" at |kappa1| in [{min(extra):.3f}, {max(extra):.3f}]" if extra else ""
        details.append(f"({name}) {len(extra)}/{len(changes)} columns without a single crossing{span}")
    sw = interface_sweeps["c"]
    K1, K2 = np.meshgrid(sw.k1, sw.k2, indexing="ij")
    blue_stronger = int(np.sum(sw.stable & (K1 > K2)))
    ok &= blue_stronger > 0
    details.append(f"(c) {blue_stronger} stable points with |kappa_blue| > |kappa_red|")
    acceptance(7, ok, "; ".join(details))
    assert blue_stronger > 0
    for name, sw in interface_sweeps.items():
        assert sw.stable[0, 0]
        bad = {k: c for k, c in _column_changes(sw).items() if c != 1}
        assert not bad, f"panel ({name}): columns with {sorted(set(bad.values()))} crossings at {sorted(bad)[:3]}..."


def test_criterion_8_oracle(acceptance):
    rng = np.random.default_rng(8)
    off = 0
    exempt = 0
    for _ in range(1000):
        m = random_model(rng)
        A = eom_matrix(m).A
        nA = max(np.linalg.norm(A, 2), 1.0)
        verdict = is_dynamically_stable(A).stable
        oracle = boundedness_oracle(A, t_max=1e8 / nA).bounded
        if verdict != oracle:
            if min_axis_distance(A) < 1e-7 * nA:
                exempt += 1
            else:
                off += 1
    worst = np.inf
    for _ in range(100):
        m = random_model(rng)
        prop = Propagator(m)
        state = GaussianState.vacuum(m.n_modes)
        for t in np.linspace(0, 5, 11):
            E = prop(t)
            s = E @ state.covariance @ E.T
            s = (s + s.T) / 2
            margin = GaussianState(E @ state.mean, s).uncertainty_margin()
            worst = min(worst, margin / max(1.0, np.linalg.norm(s)))
    ok = off == 0 and worst >= -1e-9
    acceptance(8, ok, f"{off} disagreements off the near-axis set ({exempt} exempt); "
                      f"worst uncertainty margin {worst:.1e}")
    assert off == 0
    assert worst >= -1e-9


def _specs():
    out = []
    for t in ("I", "II"):
        out += [(t, D) for D in range(1, 7)]
    out += [("III", D) for D in (1, 3, 5)] + [("IV", D) for D in (2, 4, 6)]
    out += [("V", D) for D in (1, 3, 5)] + [("VI", D) for D in (2, 4, 6)]
    return out


def test_criterion_9_normal_forms(acceptance):
    failures = []
    stable = []
    n = 0
    for t, D in _specs():
        lams = [1 + 0.5j] if t == "II" else [0.7, 1.0]
        sigmas = (1, -1) if t in ("III", "IV", "VI") else (1,)
        for lam in lams:
            for sg in sigmas:
                spec = JordanTypeSpec(t, D, lam if t in ("I", "II", "III", "IV") else 0.0, sg)
                n += 1
                try:
                    split = geometric_split(spec)
                except Exception as exc:
                    failures.append((t, D, sg, str(exc)))
                    continue
                r = split.residuals
                scale = max(1.0, np.linalg.norm(split.V))
                if r["symplectic"] > 1e-8 * max(1.0, np.linalg.norm(split.S) ** 2) or r["spectrum"] > 1e-8:
                    failures.append((t, D, sg, r))
                if r["congruence"] > 1e-9 * scale * max(1.0, np.linalg.norm(split.S) ** 2):
                    failures.append((t, D, sg, r))
                if is_dynamically_stable(eom_matrix(build_normal_form(spec))).stable:
                    stable.append((t, D))
    unique = set(stable) == {("III", 1)}
    ok = not failures and unique
    acceptance(9, ok, f"{n} normal forms, {len(failures)} invariant failures, stable types {sorted(set(stable))}")
    assert not failures, failures[:3]
    assert unique


def test_criterion_10_multistability(acceptance):
    dp = np.linspace(-3, 3, 61)
    g = np.linspace(0, 2, 41)
    m = steady_state_map(dp, g, OMEGA)
    a = m["n_a"] > 0
    e = m["n_e"] > 0
    overlap = int(np.sum(a & e))
    two = int(np.sum(m["n_stable"] >= 2))
    ok = a.any() and e.any() and overlap > 0 and two > 0
    acceptance(10, ok, f"case (a) region {a.sum()} points, case (e) region {e.sum()}, "
                       f"overlap {overlap}, points with two stable branches {two}")
    assert ok
