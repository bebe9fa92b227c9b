"""Spin squeezing generated by the sequential two-axis-twisting gate.

Collective operators use the plain Pauli-sum normalization A_mu = sum sigma_mu
throughout: the mean and variance closed forms and the squeezing parameter
xi^2 = N (Delta A_theta)^2 / <A_z>^2 all cohere in these units, and xi^2 is
invariant under the uniform J = A/2 rescaling.  In these axes the separable
bound of the entanglement-depth plot is the parabola v = m^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import correlators, densemat as dm
from .errors import InputError
from .gates import squeezing_gate
from .transfer import ChainSpec, LocalObservable, SIGMA_Z, build_transfer, spectral

THETA_DEGENERATE_SPAN = 1e-9


def _transfer_for(chi_t: float, n_sites: int = 2):
    return build_transfer(squeezing_gate(chi_t), ChainSpec(max(n_sites, 2)))


def mean_z_asymptotic_coeff(chi_t: float) -> float:
    """<A_z>/N in the bulk: (1 - 3 sin^2) / (1 + sin^2)."""
    s = np.sin(chi_t) ** 2
    return (1.0 - 3.0 * s) / (1.0 + s)


def variance_asymptotic_coeff(chi_t: float, theta: float) -> float:
    """Linear coefficient of the transverse variance (Delta A_theta)^2."""
    ts = _transfer_for(chi_t)
    obs = _transverse_obs(theta)
    return correlators.asymptotic_variance(ts, obs).linear_coeff


def _transverse_obs(theta: float) -> LocalObservable:
    return LocalObservable.from_bloch([np.cos(theta), np.sin(theta), 0.0])


def mean_z(chi_t: float, n_sites: int, mode: str = "exact") -> float:
    """Collective <A_z> after the sweep from |0...0>."""
    if mode == "asymptotic":
        return n_sites * mean_z_asymptotic_coeff(chi_t)
    if mode != "exact":
        raise InputError(f"unknown mode {mode!r}")
    if n_sites < 2:
        raise InputError("exact mode needs N >= 2")
    ts = _transfer_for(chi_t, n_sites)
    return correlators.collective_mean(ts, SIGMA_Z, n_sites)


def transverse_variance(chi_t: float, theta: float, n_sites: int,
                        mode: str = "exact") -> float:
    """(Delta A_theta)^2 for A_theta = sum (cos t sigma_x + sin t sigma_y)."""
    if mode == "asymptotic":
        return n_sites * variance_asymptotic_coeff(chi_t, theta)
    if mode != "exact":
        raise InputError(f"unknown mode {mode!r}")
    ts = _transfer_for(chi_t, n_sites)
    return correlators.additive_variance_exact(
        ts, _transverse_obs(theta), n_sites, with_asymptotics=False).total


def optimal_theta(chi_t: float, tol: float = 1e-9) -> tuple[float, bool]:
    """Minimize the asymptotic transverse-variance coefficient over theta.

    Returns (theta, degenerate); a flat landscape (chi_t -> 0) is flagged
    degenerate and any grid angle qualifies.
    """
    ts = _transfer_for(chi_t)
    spec = spectral(ts.e)

    def coeff(theta: float) -> float:
        return correlators.asymptotic_variance(ts, _transverse_obs(theta),
                                               spec=spec).linear_coeff

    grid = np.linspace(0.0, np.pi, 65, endpoint=False)
    vals = np.array([coeff(t) for t in grid])
    if vals.max() - vals.min() < THETA_DEGENERATE_SPAN:
        return float(grid[int(np.argmin(vals))]), True
    best = int(np.argmin(vals))
    lo = grid[best] - np.pi / 64
    hi = grid[best] + np.pi / 64
    inv_golden = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_golden * (b - a)
    d = a + inv_golden * (b - a)
    fc, fd = coeff(c), coeff(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_golden * (b - a)
            fc = coeff(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_golden * (b - a)
            fd = coeff(d)
    theta = 0.5 * (a + b) % np.pi
    return float(theta), False


def xi_squared(chi_t: float, n_sites: int | None = None,
               mode: str = "exact") -> float:
    """Squeezing parameter N (Delta A_theta*)^2 / <A_z>^2 at the optimal
    transverse angle; < 1 witnesses entanglement."""
    theta, _ = optimal_theta(chi_t)
    if mode == "asymptotic":
        mean_coeff = mean_z_asymptotic_coeff(chi_t)
        if abs(mean_coeff) < 1e-9:
            raise InputError("squeezing parameter undefined: <A_z> vanishes")
        return variance_asymptotic_coeff(chi_t, theta) / mean_coeff ** 2
    if mode != "exact":
        raise InputError(f"unknown mode {mode!r}")
    if n_sites is None:
        raise InputError("exact mode needs a chain length")
    mean = mean_z(chi_t, n_sites, mode="exact")
    if abs(mean) < 1e-9 * n_sites:
        raise InputError("squeezing parameter undefined: <A_z> vanishes")
    var = transverse_variance(chi_t, theta, n_sites, mode="exact")
    return n_sites * var / mean ** 2


# ---------------------------------------------------------------------------
# Entanglement-depth bounds (separable and pairwise ensembles)
# ---------------------------------------------------------------------------

@dataclass
class BoundCurve:
    """Minimum normalized transverse variance F_j(m) at fixed normalized
    mean spin m, for ensembles of spin-j blocks, in the (m = <A_z>/N,
    v = (Delta A)^2/N) axes."""

    j: float
    samples: list[tuple[float, float]]

    def interpolate(self, m: float) -> float:
        ms = np.array([p[0] for p in self.samples])
        vs = np.array([p[1] for p in self.samples])
        if m < ms[0] - 1e-9 or m > ms[-1] + 1e-9:
            raise InputError(f"m = {m} outside tabulated range [{ms[0]}, {ms[-1]}]")
        return float(np.interp(m, ms, vs))


def _spin_matrices(j: float) -> tuple[np.ndarray, np.ndarray]:
    dim = int(round(2 * j + 1))
    mz = j - np.arange(dim)
    jz = np.diag(mz.astype(np.complex128))
    jp = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(1, dim):
        m = mz[k]
        jp[k - 1, k] = np.sqrt(j * (j + 1) - m * (m + 1))
    jx = 0.5 * (jp + jp.conj().T)
    return jx, jz


def _pairwise_ground(jx2: np.ndarray, jz: np.ndarray, mu: float,
                     j: float) -> tuple[float, float]:
    """(m, F) of the ground state of J_x^2 - mu J_z in the spin-j irrep."""
    h = jx2 - mu * jz
    evals, evecs = dm.hermitian_eig(h)
    ground = evecs[:, 0]
    m = float(np.real(ground.conj() @ jz @ ground)) / j
    jx2_val = float(np.real(ground.conj() @ jx2 @ ground))
    # Ground states of this family have <J_x> = 0 (pi-rotation symmetry
    # about z), so the variance is <J_x^2> itself.
    return m, 2.0 * jx2_val / j


def _convex_lower(samples: list[tuple[float, float]]) -> list[tuple[float, float]]:
    pts = sorted(samples)
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        if hull and abs(p[0] - hull[-1][0]) < 1e-12:
            continue
        hull.append(p)
    return hull


def sm_bound(j: float, m_grid) -> BoundCurve:
    """Minimum transverse variance at fixed mean spin for spin-j ensembles.

    j = 1/2 (separable): the Bloch-sphere minimum is v = m^2 exactly; the
    Lagrangian scan cannot see it because the single-qubit optimum rides on
    <J_x> != 0.  j = 1 (pairwise entangled): scan ground states of
    J_x^2 - mu J_z over mu, refine by bisection at each requested m, then
    take the lower convex envelope.
    """
    m_grid = [float(m) for m in m_grid]
    if any(m < 0.0 or m > 1.0 for m in m_grid):
        raise InputError("m grid must lie in [0, 1]")
    if abs(j - 0.5) < 1e-12:
        return BoundCurve(j=0.5, samples=[(m, m * m) for m in sorted(m_grid)])
    if abs(j - 1.0) > 1e-12:
        raise InputError("only j = 1/2 and j = 1 are supported")

    jx, jz = _spin_matrices(1.0)
    jx2 = jx @ jx
    mu_grid = np.linspace(0.0, 20.0, 2001)
    scan = [_pairwise_ground(jx2, jz, mu, 1.0) for mu in mu_grid]

    samples: list[tuple[float, float]] = []
    for m_target in sorted(m_grid):
        samples.append(_pairwise_point(jx2, jz, scan, mu_grid, m_target))
    hull = _convex_lower(scan + samples)
    out = []
    ms = np.array([p[0] for p in hull])
    vs = np.array([p[1] for p in hull])
    for m_target in sorted(m_grid):
        out.append((m_target, float(np.interp(m_target, ms, vs))))
    return BoundCurve(j=1.0, samples=out)


def _pairwise_point(jx2, jz, scan, mu_grid, m_target: float) -> tuple[float, float]:
    if m_target >= 1.0 - 1e-12:
        return (1.0, 1.0)  # stretched state is forced at m = 1
    ms = [p[0] for p in scan]
    idx = int(np.searchsorted(ms, m_target))
    if idx == 0:
        return (m_target, scan[0][1])
    lo, hi = mu_grid[idx - 1], mu_grid[min(idx, len(mu_grid) - 1)]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        m_mid, _ = _pairwise_ground(jx2, jz, mid, 1.0)
        if m_mid < m_target:
            lo = mid
        else:
            hi = mid
    m_val, v_val = _pairwise_ground(jx2, jz, 0.5 * (lo + hi), 1.0)
    return (m_target, v_val)


def fig4_curve(chi_t_grid, pairwise_curve: BoundCurve | None = None,
               theta: float | None = None) -> list[dict]:
    """Large-N squeezing trajectory (m, v) per chi_t with entanglement-depth
    flags from the separable (v = m^2) and pairwise bounds.

    ``theta`` fixes the transverse direction; default minimizes it per point.
    """
    rows = []
    grid = [float(c) for c in chi_t_grid]
    if any(not 0.0 < c < np.pi / 2 for c in grid):
        raise InputError("chi_t grid must lie in (0, pi/2)")
    if pairwise_curve is None:
        pairwise_curve = sm_bound(1.0, np.linspace(0.0, 1.0, 201))
    for chi_t in grid:
        m = mean_z_asymptotic_coeff(chi_t)
        point_theta = theta if theta is not None else optimal_theta(chi_t)[0]
        v = variance_asymptotic_coeff(chi_t, point_theta)
        f_half = m * m
        f_one = pairwise_curve.interpolate(abs(m)) if abs(m) <= 1.0 else None
        rows.append({
            "chi_t": chi_t,
            "m": m,
            "v": v,
            "f_half": f_half,
            "f_one": f_one,
            "below_separable": bool(v < f_half - 1e-12),
            "below_pairwise": bool(f_one is not None and v < f_one - 1e-12),
        })
    return rows
