"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with  pytest tests/test_acceptance.py -v -s  to see the per-criterion
lines; every tolerance is pinned here, none deferred.
"""

import time

import numpy as np
import pytest

from chainsweep import (correlators as co, densemat as dm, gates,
                        macroscopicity as mac, oracle, squeezing as sq,
                        transfer)
from chainsweep.transfer import (ChainSpec, LocalObservable, SIGMA_Z,
                                 build_transfer, check_isometry, extract_kraus,
                                 transfer_E)


def _report(number: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number:2d} [{status}] {name}{suffix}")


def _family_gates():
    rz = np.diag([np.exp(-0.3j), np.exp(0.3j)])
    macro = gates.macroscopic_family(0.5, 0.3, 1.1, seed=7)
    return [
        ("identity", gates.identity_gate()),
        ("weyl", gates.weyl_gate(0.6, 1.2, 0.4)),
        ("weyl-degenerate", gates.weyl_gate(0.8, np.pi / 2, np.pi / 2)),
        ("cnot", gates.controlled_rotation(np.pi)),
        ("controlled-rotation", gates.controlled_rotation(np.pi - 0.3)),
        ("squeezing", gates.squeezing_gate(0.5)),
        ("macroscopic-family", macro),
        ("conjugated", gates.conjugated_gate(macro, rz, rz)),
    ]


def _random_chain(rng, n):
    c0 = complex(rng.standard_normal(), rng.standard_normal())
    c1 = complex(rng.standard_normal(), rng.standard_normal())
    norm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
    return ChainSpec(n, c0 / norm, c1 / norm)


def _multiset_dev(got, want) -> float:
    """Best-match distance between two small complex multisets."""
    from itertools import permutations
    return float(min(max(abs(g - w) for g, w in zip(got, perm))
                     for perm in permutations(list(want))))


def test_criterion_1_oracle_equivalence_master():
    """One-/two-point, collective mean and variance match the state-vector
    oracle within 1e-8 for 200 seeded random gates and every family."""
    tol = 1e-8
    rng = np.random.default_rng(2024)
    t0 = time.time()
    worst = 0.0
    cases = [gates.random_gate(seed) for seed in range(200)]
    cases += [g for _, g in _family_gates()]
    for gate in cases:
        direction = rng.standard_normal(3)
        obs = LocalObservable.from_bloch(direction / np.linalg.norm(direction))
        amps = _random_chain(rng, 4)
        for n in range(4, 11):
            chain = ChainSpec(n, amps.c0, amps.c1)
            ts = build_transfer(gate, chain)
            state = oracle.sweep(gate, chain)
            for m in range(1, n + 1):
                worst = max(worst, abs(co.one_point(ts, obs, m, n)
                                       - oracle.expect_local(state, obs, m)))
            for m in range(1, n + 1):
                for k in range(m + 1, n + 1):
                    worst = max(worst, abs(co.two_point(ts, obs, m, k, n)
                                           - oracle.expect_pair(state, obs, m, k)))
            worst = max(worst, abs(co.collective_mean(ts, obs, n)
                                   - oracle.collective_mean(state, obs)))
            worst = max(worst, abs(
                co.additive_variance_exact(ts, obs, n, with_asymptotics=False).total
                - oracle.collective_variance(state, obs)))
    elapsed = time.time() - t0
    ok = worst < tol and elapsed < 60.0
    _report(1, "oracle equivalence", ok,
            f"{len(cases)} gates x N=4..10, max dev {worst:.2e}, {elapsed:.1f} s")
    assert worst < tol
    assert elapsed < 60.0


def test_criterion_2_isometry_thousand_gates():
    """Kraus extraction satisfies the unitarity constraint to 1e-12."""
    worst = max(check_isometry(extract_kraus(gates.random_gate(seed)))
                for seed in range(1000))
    _report(2, "Kraus isometry on 1000 random gates", worst <= 1e-12,
            f"max dev {worst:.2e}")
    assert worst <= 1e-12


def test_criterion_3_weyl_eigenvalue_formula():
    """Spectrum of E matches the closed form for 100 random angle triples."""
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(100):
        a, b, c = rng.uniform(0, 2 * np.pi, size=3)
        e = transfer_E(extract_kraus(gates.weyl_gate(a, b, c)))
        got = dm.eig_general(e).values
        sa, sb, sc = np.sin(a), np.sin(b), np.sin(c)
        disc = np.sqrt(complex(sc ** 2 * (sa + sb) ** 2 - 4 * sa * sb))
        want = [1, sa * sb, 0.5 * sc * (sa + sb) + 0.5 * disc,
                0.5 * sc * (sa + sb) - 0.5 * disc]
        worst = max(worst, _multiset_dev(got, want))
    _report(3, "transfer eigenvalue closed form", worst < 1e-9,
            f"max multiset dev {worst:.2e}")
    assert worst < 1e-9


def test_criterion_4_effective_size_closed_forms():
    """neff equals cos^2 of the free angle and the optimizer finds the axis."""
    rng = np.random.default_rng(4)
    angles = rng.uniform(0.05, np.pi / 2 - 0.05, size=50)
    worst_val = 0.0
    worst_dir = 0.0
    for alpha in angles:
        g = gates.weyl_gate(alpha, np.pi / 2, np.pi / 2)
        worst_val = max(worst_val, abs(mac.neff(g, ChainSpec(4), [0, 1, 0])
                                       - np.cos(alpha) ** 2))
        report = mac.neff_optimize(g, ChainSpec(4))
        worst_dir = max(worst_dir, float(np.arccos(
            np.clip(abs(report.best_direction[1]), -1.0, 1.0))))
    for beta in angles:
        g = gates.weyl_gate(np.pi / 2, beta, np.pi / 2)
        worst_val = max(worst_val, abs(mac.neff(g, ChainSpec(4), [1, 0, 0])
                                       - np.cos(beta) ** 2))
        report = mac.neff_optimize(g, ChainSpec(4))
        worst_dir = max(worst_dir, float(np.arccos(
            np.clip(abs(report.best_direction[0]), -1.0, 1.0))))
    ok = worst_val < 1e-8 and worst_dir < 1e-4
    _report(4, "effective size cos^2 and optimizer axis", ok,
            f"value dev {worst_val:.2e}, direction dev {worst_dir:.2e} rad")
    assert worst_val < 1e-8
    assert worst_dir < 1e-4


def test_criterion_5_variance_scaling_reproduction():
    """Perfect flip gives exactly N^2; detuned flips decay below slope 1.2."""
    plus = (1 / np.sqrt(2), 1 / np.sqrt(2))
    worst_rel = 0.0
    for n in (10, 100, 1000, 10 ** 4):
        ts = build_transfer(gates.controlled_rotation(np.pi), ChainSpec.plus_state(n))
        total = co.additive_variance_exact(ts, SIGMA_Z, n,
                                           with_asymptotics=False).total
        worst_rel = max(worst_rel, abs(total - float(n) ** 2) / float(n) ** 2)
    slopes_small = []
    slopes_large = []
    for da in (0.1, 0.2, 0.3, 0.4):
        rows = mac.variance_sweep(gates.controlled_rotation(np.pi - da), plus,
                                  SIGMA_Z, [4, 6, 8, 10, 500, 1000])
        by_n = {r["n"]: r["slope"] for r in rows}
        slopes_small.extend([by_n[6], by_n[8], by_n[10]])
        slopes_large.append(by_n[1000])
    ok = (worst_rel <= 1e-9 and all(1.7 < s <= 2.0 + 1e-9 for s in slopes_small)
          and all(s < 1.2 for s in slopes_large))
    _report(5, "variance scaling (quadratic -> sub-quadratic)", ok,
            f"N^2 rel dev {worst_rel:.2e}, small-N slopes "
            f"[{min(slopes_small):.3f}, {max(slopes_small):.3f}], "
            f"slope at N=1e3 max {max(slopes_large):.3f}")
    assert worst_rel <= 1e-9
    assert all(1.7 < s <= 2.0 + 1e-9 for s in slopes_small)
    assert all(s < 1.2 for s in slopes_large)


def test_criterion_6_linear_coefficient_fits():
    """a+bN fits of exact mean/variance at N in {100..800} vs closed forms.

    Known defect near chi_t = pi/2: the spectral gap 1 - sin(chi_t) closes,
    transients |lambda_2|^N survive past N = 800, and the two-parameter fit
    cannot recover b to 1e-4 (see the decisions ledger).  The criterion is
    asserted as stated and fails honestly at those grid points.
    """
    ns = np.array([100, 200, 400, 800])
    design = np.vstack([np.ones(4), ns]).T
    failures = []
    worst = 0.0
    for k in range(1, 16):
        chi_t = round(0.1 * k, 10)
        s = np.sin(chi_t)
        bracket = 1 - 2 * np.sin(2 * chi_t) * np.cos(chi_t) / ((1 + s ** 2) * (1 + s))
        mean_coeff = (1 - 3 * s ** 2) / (1 + s ** 2)
        var_vals = np.array([sq.transverse_variance(chi_t, np.pi / 4, int(n),
                                                    mode="exact") for n in ns])
        mean_vals = np.array([sq.mean_z(chi_t, int(n), mode="exact") for n in ns])
        b_var = np.linalg.lstsq(design, var_vals, rcond=None)[0][1]
        b_mean = np.linalg.lstsq(design, mean_vals, rcond=None)[0][1]
        dev = max(abs(b_var - bracket), abs(b_mean - mean_coeff))
        worst = max(worst, dev)
        if dev >= 1e-4:
            failures.append((chi_t, dev))
    ok = not failures
    _report(6, "mean/variance linear-coefficient fits", ok,
            f"worst dev {worst:.2e}" + (
                f"; failing chi_t {[f'{c}:{d:.1e}' for c, d in failures]}"
                if failures else ""))
    assert not failures, (
        "a+bN fit misses the closed-form coefficient by >= 1e-4 at "
        f"{failures}; the N window 100..800 is shorter than the correlation "
        "length 1/(1 - sin chi_t) at these points, so the O(1) remainder has "
        "not converged and the fit absorbs the drift into b")


def test_criterion_7_squeezing_exists():
    """xi^2 < 1 at chi_t = 0.2; optimal angle is pi/4 across the grid."""
    xi2 = sq.xi_squared(0.2, mode="asymptotic")
    worst_theta = 0.0
    for k in range(1, 16):
        theta, degenerate = sq.optimal_theta(0.1 * k)
        assert not degenerate
        worst_theta = max(worst_theta, abs(theta - np.pi / 4))
    ok = xi2 < 1.0 and worst_theta < 1e-6
    _report(7, "squeezing existence and optimal angle", ok,
            f"xi^2(0.2) = {xi2:.6f}, max |theta - pi/4| = {worst_theta:.2e}")
    assert xi2 < 1.0
    assert worst_theta < 1e-6


def test_criterion_8_entanglement_depth_witness():
    """Separable bound is m^2; the squeezing trajectory beats the pairwise
    bound at some chi_t with m > 0.5; the curve stays inside the axes."""
    grid = np.linspace(0.0, 1.0, 41)
    half = sq.sm_bound(0.5, grid)
    worst_half = max(abs(v - m * m) for m, v in half.samples)
    rows = sq.fig4_curve(np.round(np.arange(0.05, 1.50, 0.05), 10))
    hits = [r for r in rows if r["below_pairwise"] and r["m"] > 0.5]
    in_axes = all(r["v"] >= 0.0 and abs(r["m"]) <= 1.0 for r in rows)
    ok = worst_half < 1e-8 and bool(hits) and in_axes
    detail = (f"separable dev {worst_half:.2e}, pairwise violations at chi_t "
              f"{[round(r['chi_t'], 2) for r in hits]}")
    _report(8, "entanglement-depth witness", ok, detail)
    assert worst_half < 1e-8
    assert hits
    assert in_axes


def test_criterion_9_macroscopicity_theorem_executable():
    """Structural Kraus test agrees with spectral unit degeneracy everywhere."""
    disagreements = 0
    checked = 0
    for name, gate in _family_gates():
        cls = mac.classify_macroscopic(gate, tol=1e-8)
        disagreements += cls.is_macroscopic != (cls.unit_dimension >= 2)
        checked += 1
    for seed in range(100):
        cls = mac.classify_macroscopic(gates.random_gate(seed), tol=1e-8)
        disagreements += cls.is_macroscopic != (cls.unit_dimension >= 2)
        checked += 1
    _report(9, "classification theorem vs spectrum", disagreements == 0,
            f"{checked} gates, {disagreements} disagreements")
    assert disagreements == 0


def test_criterion_10_density_recursion_vs_oracle():
    """Eq.-(41)-style recursion reproduces oracle partial traces to 1e-10."""
    worst = 0.0
    for name, gate in _family_gates():
        for n in (4, 7, 10):
            chain = ChainSpec(n, 0.6, 0.8j)
            kraus = extract_kraus(gate)
            rho = np.array([[abs(chain.c0) ** 2, chain.c0 * np.conj(chain.c1)],
                            [chain.c1 * np.conj(chain.c0), abs(chain.c1) ** 2]])
            for m in range(1, n + 1):
                prefix = oracle.sweep(gate, chain, upto=m - 1)
                ref = oracle.reduced_density(prefix, m)
                worst = max(worst, float(np.max(np.abs(rho - ref))))
                rho = transfer.site_density_recursion(kraus, rho)
    _report(10, "single-site density recursion", worst < 1e-10,
            f"max dev {worst:.2e}")
    assert worst < 1e-10
