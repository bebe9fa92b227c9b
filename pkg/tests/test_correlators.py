import numpy as np
import pytest

from chainsweep import correlators as co, gates, oracle, transfer
from chainsweep.errors import InputError
from chainsweep.transfer import ChainSpec, LocalObservable, SIGMA_Z, build_transfer


def _random_bloch(rng):
    v = rng.standard_normal(3)
    return LocalObservable.from_bloch(v / np.linalg.norm(v))


def _random_chain(rng, n):
    c0 = complex(rng.standard_normal(), rng.standard_normal())
    c1 = complex(rng.standard_normal(), rng.standard_normal())
    norm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
    return ChainSpec(n, c0 / norm, c1 / norm)


def test_one_point_identity_gate():
    ts = build_transfer(gates.identity_gate(), ChainSpec(6))
    for m in range(1, 7):
        assert abs(co.one_point(ts, SIGMA_Z, m, 6) - 1.0) < 1e-14


def test_one_point_squeezing_bulk_limit():
    chi_t = 0.6
    n = 60
    ts = build_transfer(gates.squeezing_gate(chi_t), ChainSpec(n))
    s2 = np.sin(chi_t) ** 2
    bulk = (1 - 3 * s2) / (1 + s2)
    devs = [abs(co.one_point(ts, SIGMA_Z, m, n) - bulk) for m in (15, 25, 40)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-9


def test_one_point_bulk_decay_at_spectral_gap_rate():
    # successive bulk values approach the limit no slower than |lambda_2|^m
    chi_t = 0.9
    n = 30
    ts = build_transfer(gates.squeezing_gate(chi_t), ChainSpec(n))
    lam2 = np.sin(chi_t)
    s2 = lam2 ** 2
    bulk = (1 - 3 * s2) / (1 + s2)
    for m in (5, 10, 15):
        dev = abs(co.one_point(ts, SIGMA_Z, m, n) - bulk)
        assert dev <= 5.0 * lam2 ** (m - 1)


def test_one_point_rejects_bad_site():
    ts = build_transfer(gates.identity_gate(), ChainSpec(4))
    with pytest.raises(InputError):
        co.one_point(ts, SIGMA_Z, 5, 4)


def test_two_point_identity_and_ghz():
    ts = build_transfer(gates.identity_gate(), ChainSpec(5))
    assert abs(co.two_point(ts, SIGMA_Z, 2, 4, 5) - 1.0) < 1e-14
    ghz = build_transfer(gates.controlled_rotation(np.pi), ChainSpec.plus_state(8))
    for m, n in [(1, 2), (3, 7), (1, 8), (5, 8)]:
        assert abs(co.two_point(ghz, SIGMA_Z, m, n, 8) - 1.0) < 1e-12


def test_two_point_rejects_bad_order():
    ts = build_transfer(gates.identity_gate(), ChainSpec(4))
    with pytest.raises(InputError):
        co.two_point(ts, SIGMA_Z, 3, 3, 4)


def test_points_match_oracle_random():
    rng = np.random.default_rng(10)
    for seed in range(6):
        g = gates.random_gate(seed)
        obs = _random_bloch(rng)
        chain = _random_chain(rng, 8)
        ts = build_transfer(g, chain)
        state = oracle.sweep(g, chain)
        for m in range(1, 9):
            assert abs(co.one_point(ts, obs, m, 8)
                       - oracle.expect_local(state, obs, m)) < 1e-10
        for m in range(1, 9):
            for n in range(m + 1, 9):
                assert abs(co.two_point(ts, obs, m, n, 8)
                           - oracle.expect_pair(state, obs, m, n)) < 1e-10


def test_variance_identity_zero():
    ts = build_transfer(gates.identity_gate(), ChainSpec(6))
    assert abs(co.additive_variance_exact(ts, SIGMA_Z, 6).total) < 1e-12


def test_variance_ghz_quadratic():
    ts = build_transfer(gates.controlled_rotation(np.pi), ChainSpec.plus_state(4))
    for n in (4, 10, 50):
        vb = co.additive_variance_exact(ts, SIGMA_Z, n)
        assert abs(vb.total - n ** 2) < 1e-9 * n ** 2
        assert abs(vb.quadratic_coeff - 1.0) < 1e-10
        assert abs(vb.linear_coeff) < 1e-10
        assert abs(vb.boundary_remainder) < 1e-8


def test_variance_matches_oracle_and_naive():
    rng = np.random.default_rng(11)
    for seed in range(5):
        g = gates.random_gate(seed + 40)
        obs = _random_bloch(rng)
        chain = _random_chain(rng, 10)
        ts = build_transfer(g, chain)
        state = oracle.sweep(g, chain)
        sweep_val = co.additive_variance_exact(ts, obs, 10,
                                               with_asymptotics=False).total
        naive_val = co.additive_variance_exact(ts, obs, 10, method="naive",
                                               with_asymptotics=False).total
        ref = oracle.collective_variance(state, obs)
        assert abs(sweep_val - ref) < 1e-8
        assert abs(sweep_val - naive_val) < 1e-9


def test_variance_general_hermitian_observable():
    # non-unit-eigenvalue observable: the diagonal term uses <A^2> exactly
    rng = np.random.default_rng(12)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    obs = LocalObservable(0.5 * (a + a.conj().T))
    g = gates.random_gate(77)
    chain = ChainSpec(8, 0.8, 0.6)
    ts = build_transfer(g, chain)
    state = oracle.sweep(g, chain)
    got = co.additive_variance_exact(ts, obs, 8, with_asymptotics=False).total
    acc = np.zeros_like(state.amplitudes)
    for m in range(1, 9):
        acc += oracle._apply_local(state.amplitudes, 8, obs.matrix, m)
    ref = float(np.real(acc.conj() @ acc)) - float(np.real(state.amplitudes.conj() @ acc)) ** 2
    assert abs(got - ref) < 1e-9


def test_collective_mean_matches_oracle():
    rng = np.random.default_rng(13)
    g = gates.random_gate(3)
    obs = _random_bloch(rng)
    chain = _random_chain(rng, 9)
    ts = build_transfer(g, chain)
    state = oracle.sweep(g, chain)
    assert abs(co.collective_mean(ts, obs, 9)
               - oracle.collective_mean(state, obs)) < 1e-10


# ---------------------------------------------------------------------------
# geometric sums
# ---------------------------------------------------------------------------

def _brute_f(li, lj, n):
    return sum(li ** (m - 1) * lj ** (k - m - 1)
               for k in range(2, n) for m in range(1, k))


def test_geometric_f_smallest_case():
    assert co.geometric_sum_f(0.0, 0.0, 5) == 1.0  # only the (m,n) = (1,2) term


def test_geometric_f_unit_scaling():
    n = 10 ** 6
    val = co.geometric_sum_f(1.0, 0.5, n)
    assert abs(val.real / n - 2.0) < 1e-4
    assert abs(co.geometric_sum_f(1.0, 1.0, n) - (n - 1) * (n - 2) / 2) == 0


def test_geometric_f_random_vs_brute():
    rng = np.random.default_rng(14)
    for _ in range(120):
        li = 0.8 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        lj = 0.8 * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        n = int(rng.integers(3, 50))
        assert abs(co.geometric_sum_f(li, lj, n) - _brute_f(li, lj, n)) < 1e-12


@pytest.mark.parametrize("pair", [
    (1.0 - 1e-5, 0.5), (1.0, 0.5 + 1e-5), (0.3 + 1e-5, 0.3), (0.3, 0.3),
    (1.0, 1.0 - 1e-5), (1.0 - 1e-5, 1.0 - 2e-5),
])
def test_geometric_f_branch_consistency(pair):
    # probes at 1e-5 offsets around each branch point agree with the literal
    # double sum to 1e-10 relative accuracy
    li, lj = pair
    for n in (3, 10, 40):
        got = co.geometric_sum_f(li, lj, n)
        ref = _brute_f(complex(li), complex(lj), n)
        assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------

def test_asymptotic_weyl_quadratic():
    for alpha in (0.25, 0.8, 1.3):
        ts = build_transfer(gates.weyl_gate(alpha, np.pi / 2, np.pi / 2), ChainSpec(4))
        asym = co.asymptotic_variance(ts, transfer.SIGMA_Y)
        assert abs(asym.quadratic_coeff - np.cos(alpha) ** 2) < 1e-10


def test_asymptotic_squeezing_linear():
    for chi_t in (0.2, 0.7, 1.2):
        ts = build_transfer(gates.squeezing_gate(chi_t), ChainSpec(4))
        obs = LocalObservable.from_bloch([np.cos(np.pi / 4), np.sin(np.pi / 4), 0.0])
        asym = co.asymptotic_variance(ts, obs)
        s = np.sin(chi_t)
        bracket = 1 - 2 * np.sin(2 * chi_t) * np.cos(chi_t) / ((1 + s ** 2) * (1 + s))
        assert abs(asym.quadratic_coeff) < 1e-10
        assert abs(asym.linear_coeff - bracket) < 1e-10


def test_asymptotic_identity_zero():
    ts = build_transfer(gates.identity_gate(), ChainSpec(4))
    asym = co.asymptotic_variance(ts, SIGMA_Z)
    assert abs(asym.quadratic_coeff) < 1e-12
    assert abs(asym.linear_coeff) < 1e-12


def test_exact_minus_asymptotic_remainder_bounded():
    rng = np.random.default_rng(15)
    for seed in (3, 8, 21):
        g = gates.random_gate(seed)
        obs = _random_bloch(rng)
        ts = build_transfer(g, ChainSpec(4))
        asym = co.asymptotic_variance(ts, obs)
        rems = []
        for n in (50, 100, 200, 400):
            total = co.additive_variance_exact(ts, obs, n,
                                               with_asymptotics=False).total
            rems.append(total - asym.quadratic_coeff * n ** 2
                        - asym.linear_coeff * n)
        diffs = [abs(b - a) for a, b in zip(rems, rems[1:])]
        assert diffs[-1] < 1e-6
        # transients shrink until the remainder tail hits rounding noise
        if diffs[0] > 1e-8:
            assert diffs[-1] < diffs[0]


def test_asymptotic_flags_oscillatory_spectrum():
    # weyl(pi/2, -pi/2, g): sin a sin b = -1 is a doubly degenerate
    # unimodular eigenvalue; the linear term oscillates with N
    ts = build_transfer(gates.weyl_gate(np.pi / 2, -np.pi / 2, 0.4), ChainSpec(4))
    asym = co.asymptotic_variance(ts, SIGMA_Z)
    assert asym.oscillatory


def test_variance_breakdown_fields():
    ts = build_transfer(gates.squeezing_gate(0.5), ChainSpec(4))
    obs = LocalObservable.from_bloch([np.cos(np.pi / 4), np.sin(np.pi / 4), 0.0])
    vb = co.additive_variance_exact(ts, obs, 200)
    assert vb.quadratic_coeff is not None
    recon = (vb.quadratic_coeff * 200 ** 2 + vb.linear_coeff * 200
             + vb.boundary_remainder)
    assert abs(recon - vb.total) < 1e-9
