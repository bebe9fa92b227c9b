"""Exact finite-N and asymptotic expectation values along the chain.

All formulas contract the rank-1 boundary through the row vector <v|
(X = |I><v|), so chain-length sweeps cost O(N) 4-vector updates and no
power of the transfer matrix is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import densemat as dm
from .errors import InputError, ToleranceError
from .transfer import (LocalObservable, SpectralData, TransferSet,
                       VEC_IDENTITY, spectral)

IMAG_TOL = 1e-10

# Eigenvalue pairs closer than this are routed to the analytic limit branches
# of the double geometric sum.
F_BRANCH_TOL = 1e-7


def _real(value: complex, scale: float = 1.0) -> float:
    """Drop a numerically-zero imaginary part, loudly if it is not."""
    bound = IMAG_TOL * max(1.0, abs(scale))
    if abs(value.imag) > bound:
        raise ToleranceError(
            f"expected a real quantity, got imaginary residue {value.imag:.3e}")
    return float(value.real)


def _vec(obs: LocalObservable) -> np.ndarray:
    # vec(A) with the 2i+j index convention
    return obs.matrix.reshape(-1)


def one_point(ts: TransferSet, obs: LocalObservable, m: int, n_sites: int) -> float:
    """<A_m> = tr(E^{m-1} E_A X), with the boundary form at m = N."""
    if not 1 <= m <= n_sites:
        raise InputError(f"site {m} outside 1..{n_sites}")
    if m < n_sites:
        val = ts.vrow @ dm.matpow(ts.e, m - 1) @ ts.dressed(obs) @ VEC_IDENTITY
    else:
        val = ts.vrow @ dm.matpow(ts.e, n_sites - 1) @ _vec(obs)
    return _real(complex(val))


def two_point(ts: TransferSet, obs: LocalObservable, m: int, n: int,
              n_sites: int) -> float:
    """<A_m A_n> for m < n, boundary form when n = N."""
    if not 1 <= m <= n_sites or not 1 <= n <= n_sites:
        raise InputError(f"sites ({m},{n}) outside 1..{n_sites}")
    if m >= n:
        raise InputError(f"two_point needs m < n, got ({m},{n})")
    ea = ts.dressed(obs)
    head = ts.vrow @ dm.matpow(ts.e, m - 1) @ ea
    if n < n_sites:
        val = head @ dm.matpow(ts.e, n - m - 1) @ ea @ VEC_IDENTITY
    else:
        val = head @ dm.matpow(ts.e, n_sites - m - 1) @ _vec(obs)
    return _real(complex(val))


def collective_mean(ts: TransferSet, obs: LocalObservable, n_sites: int) -> float:
    """sum_m <A_m> through one O(N) left-to-right sweep."""
    ea_i = ts.dressed(obs) @ VEC_IDENTITY
    a = _vec(obs)
    row = ts.vrow.copy()
    acc = 0.0 + 0.0j
    for _ in range(n_sites - 1):
        acc += row @ ea_i
        row = row @ ts.e
    acc += row @ a
    return _real(complex(acc), scale=n_sites)


@dataclass
class VarianceBreakdown:
    """Exact variance of an additive observable plus its large-N split.

    ``quadratic_coeff``/``linear_coeff`` restate the asymptotic expansion
    q N^2 + l N + O(1) when the transfer matrix is diagonalizable (else they
    are None and only ``total`` is meaningful); ``boundary_remainder`` is the
    O(1) part total - q N^2 - l N at this N.
    """

    total: float
    quadratic_coeff: float | None
    linear_coeff: float | None
    boundary_remainder: float | None


@dataclass
class AsymptoticVariance:
    """Coefficients of the N^2 and N terms of an additive variance.

    ``oscillatory`` marks spectra with coinciding unimodular non-unit
    eigenvalues, whose variance carries a bounded-amplitude oscillating
    linear term that a fixed coefficient cannot represent.
    """

    quadratic_coeff: float
    linear_coeff: float
    oscillatory: bool = False


def additive_variance_exact(ts: TransferSet, obs: LocalObservable, n_sites: int,
                            method: str = "sweep",
                            with_asymptotics: bool = True) -> VarianceBreakdown:
    """Variance of sum_m A_m over the full chain, all boundary terms included.

    ``method='sweep'`` runs the O(N) cached-prefix contraction; ``'naive'``
    is the O(N^2) literal double sum kept as a cross-check path.
    """
    if not obs.is_hermitian:
        raise InputError("variance needs a Hermitian observable")
    if n_sites < 2:
        raise InputError("chain needs at least 2 sites")
    if method == "sweep":
        total = _variance_sweep(ts, obs, n_sites)
    elif method == "naive":
        total = _variance_naive(ts, obs, n_sites)
    else:
        raise InputError(f"unknown variance method {method!r}")

    quad = lin = rem = None
    if with_asymptotics:
        try:
            asym = asymptotic_variance(ts, obs)
        except InputError:
            asym = None
        if asym is not None and not asym.oscillatory:
            quad = asym.quadratic_coeff
            lin = asym.linear_coeff
            rem = total - quad * n_sites ** 2 - lin * n_sites
    return VarianceBreakdown(total=total, quadratic_coeff=quad,
                             linear_coeff=lin, boundary_remainder=rem)


def _variance_sweep(ts: TransferSet, obs: LocalObservable, n: int) -> float:
    e = ts.e
    ea = ts.dressed(obs)
    sq = LocalObservable(obs.squared())
    ea2_i = ts.dressed(sq) @ VEC_IDENTITY
    a = _vec(obs)
    a2 = _vec(sq)
    ea_i = ea @ VEC_IDENTITY

    # rows[m-1] = <v| E^{m-1}, m = 1..N
    rows = np.empty((n, 4), dtype=np.complex128)
    rows[0] = ts.vrow
    for m in range(1, n):
        rows[m] = rows[m - 1] @ e

    mean_sum = complex(np.sum(rows[:n - 1] @ ea_i)) + complex(rows[n - 1] @ a)
    diag_sum = complex(np.sum(rows[:n - 1] @ ea2_i)) + complex(rows[n - 1] @ a2)

    # bulk pairs m < n' <= N-1: sum_m <v|E^{m-1} E_A g_{N-1-m},
    # g_j = sum_{k<j} E^k (E_A |I>)
    pair_sum = 0.0 + 0.0j
    if n >= 3:
        g = np.empty((n - 1, 4), dtype=np.complex128)  # g[j] for j = 1..n-2
        g[1] = ea_i
        for j in range(2, n - 1):
            g[j] = ea_i + e @ g[j - 1]
        for m in range(1, n - 1):
            pair_sum += rows[m - 1] @ ea @ g[n - 1 - m]
    # boundary pairs (m, N): <v|E^{m-1} E_A E^{N-m-1} vec(A)
    h = np.empty((n - 1, 4), dtype=np.complex128)  # h[k] = E^k vec(A), k = 0..n-2
    h[0] = a
    for k in range(1, n - 1):
        h[k] = e @ h[k - 1]
    for m in range(1, n):
        pair_sum += rows[m - 1] @ ea @ h[n - 1 - m]

    total = diag_sum + 2.0 * pair_sum - mean_sum ** 2
    return _real(complex(total), scale=float(n) ** 2)


def _variance_naive(ts: TransferSet, obs: LocalObservable, n: int) -> float:
    sq = LocalObservable(obs.squared())
    means = [one_point(ts, obs, m, n) for m in range(1, n + 1)]
    total = 0.0
    for m in range(1, n + 1):
        total += one_point(ts, sq, m, n) - means[m - 1] ** 2
    for m in range(1, n + 1):
        for k in range(m + 1, n + 1):
            total += 2.0 * (two_point(ts, obs, m, k, n) - means[m - 1] * means[k - 1])
    return total


# Proximity below which the closed form has lost too many digits to cancel-
# ation but the limit branches do not apply yet; the exact O(N) recursion
# covers the gap for any realistic N.
_F_ILL_COND = 1e-4
_F_RECURSION_CAP = 200_000


def _f_recursion(li: complex, lj: complex, n: int) -> complex:
    # T_k = sum_{m=1}^{k-1} li^{m-1} lj^{k-m-1} obeys T_k = lj T_{k-1} + li^{k-2}
    total = 0.0 + 0.0j
    t = 0.0 + 0.0j
    li_pow = 1.0 + 0.0j
    for _ in range(2, n):
        t = lj * t + li_pow
        li_pow *= li
        total += t
    return total


def geometric_sum_f(lam_i: complex, lam_j: complex, n_sites: int) -> complex:
    """sum_{n=2}^{N-1} sum_{m=1}^{n-1} lam_i^{m-1} lam_j^{n-m-1}.

    Uses the closed form away from the lam_i = lam_j and lam = 1 branch
    points, the analytically differentiated limits at them, and an exact
    linear-time recursion in the narrow window where the closed form is
    cancellation-limited.
    """
    li, lj = complex(lam_i), complex(lam_j)
    n = int(n_sites)
    if n < 3:
        return 0.0 + 0.0j
    near_one_i = abs(1.0 - li) <= F_BRANCH_TOL
    near_one_j = abs(1.0 - lj) <= F_BRANCH_TOL
    near_equal = abs(li - lj) <= F_BRANCH_TOL
    if near_one_i and near_one_j:
        return complex((n - 1) * (n - 2) / 2.0)
    if near_one_i or near_one_j:
        lam = lj if near_one_i else li
        if abs(1.0 - lam) < _F_ILL_COND and n <= _F_RECURSION_CAP:
            one = 1.0 + 0.0j
            return _f_recursion(one if near_one_i else li,
                                lj if near_one_i else one, n)
        # f(1, lam, N) = [(N-2) - lam (1 - lam^{N-2}) / (1 - lam)] / (1 - lam)
        return ((n - 2) - lam * (1.0 - lam ** (n - 2)) / (1.0 - lam)) / (1.0 - lam)
    if near_equal:
        lam = 0.5 * (li + lj)
        if abs(1.0 - lam) < _F_ILL_COND and n <= _F_RECURSION_CAP:
            return _f_recursion(li, lj, n)
        # d/dlam [ (lam - lam^{N-1}) / (1 - lam) ]
        one = 1.0 - lam
        return ((1.0 - (n - 1) * lam ** (n - 2)) * one + (lam - lam ** (n - 1))) / one ** 2
    if (min(abs(li - lj), abs(1.0 - li), abs(1.0 - lj)) < _F_ILL_COND
            and n <= _F_RECURSION_CAP):
        return _f_recursion(li, lj, n)
    num = (li - lj) - li ** (n - 1) * (1.0 - lj) + (1.0 - li) * lj ** (n - 1)
    return num / ((li - lj) * (1.0 - li) * (1.0 - lj))


def asymptotic_variance(ts: TransferSet, obs: LocalObservable,
                        spec: SpectralData | None = None) -> AsymptoticVariance:
    """Large-N coefficients of the additive variance, q N^2 + l N + O(1).

    q comes from unit-eigenspace projections only; l collects the single-site
    term, the decaying-mode geometric sums, the boundary-site pairs, and the
    mean-square correction.  For a zero-mean observable it reduces to
    1 + 2 sum_j (E_A)_{1j} (E_A)_{j1} / (1 - lambda_j).  Requires a
    diagonalizable transfer matrix.
    """
    if not obs.is_hermitian:
        raise InputError("variance needs a Hermitian observable")
    if spec is None:
        spec = spectral(ts.e)
    if spec.jordan_warning:
        raise InputError("unit eigenspace of E is defective: asymptotics "
                         "unavailable, use the exact finite-N path")
    ea = ts.dressed(obs)
    ea2_i = ts.dressed(LocalObservable(obs.squared())) @ VEC_IDENTITY
    a = _vec(obs)
    v = ts.vrow
    pi = spec.unit_projector()
    s_res = spec.reduced_resolvent(ts.e)

    # Oscillatory diagnostics: coinciding non-unit eigenvalues on the circle
    # feed an N * lambda^N term that no fixed linear coefficient captures.
    oscillatory = False
    decay_vals = [lam for lam in spec.values if abs(lam - 1.0) >= F_BRANCH_TOL]
    for i in range(len(decay_vals)):
        for j in range(i + 1, len(decay_vals)):
            if (abs(decay_vals[i] - decay_vals[j]) <= F_BRANCH_TOL
                    and abs(abs(decay_vals[i]) - 1.0) <= F_BRANCH_TOL):
                oscillatory = True

    v_pi = v @ pi
    mean_inf = complex(v_pi @ ea @ VEC_IDENTITY)
    kappa = complex(v_pi @ ea @ pi @ ea @ VEC_IDENTITY)
    quad = _real(kappa - mean_inf ** 2)

    s_inf = complex(v_pi @ ea2_i)
    cross = complex(v_pi @ ea @ s_res @ ea @ VEC_IDENTITY)
    cross += complex(v @ s_res @ ea @ pi @ ea @ VEC_IDENTITY)
    boundary = complex(v_pi @ ea @ pi @ a)
    nu_inf = complex(v_pi @ a)
    c_mean = -mean_inf + complex(v @ s_res @ ea @ VEC_IDENTITY) + nu_inf
    lin = _real(s_inf - 3.0 * kappa + 2.0 * cross + 2.0 * boundary
                - 2.0 * mean_inf * c_mean, scale=10.0)
    return AsymptoticVariance(quadratic_coeff=quad, linear_coeff=lin,
                              oscillatory=oscillatory)
