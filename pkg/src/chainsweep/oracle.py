"""Brute-force state-vector simulation of the sequential sweep.

Ground truth for the transfer-matrix formulas at small N.  Site 1 is the
most significant bit of the amplitude index; the sweep applies the gate to
the ordered pairs (1,2), (2,3), ..., (N-1,N) exactly once each.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .gates import Gate
from .transfer import ChainSpec, LocalObservable

DEFAULT_CAP = 16


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n,):
            raise InputError(f"expected {2 ** self.n} amplitudes, got {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise InputError(f"state not normalized: sum |amp|^2 = {norm}")
        self.amplitudes = amps

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())


def _check_site(n: int, m: int) -> None:
    if not 1 <= m <= n:
        raise InputError(f"site index {m} outside 1..{n}")


def initial_state(chain: ChainSpec) -> StateVector:
    amps = np.zeros(2 ** chain.n, dtype=np.complex128)
    amps[0] = chain.c0
    amps[1 << (chain.n - 1)] = chain.c1  # site 1 = most significant bit
    return StateVector(chain.n, amps)


def apply_two_site(state: StateVector, gate_matrix: np.ndarray, m: int) -> StateVector:
    """Apply a 4x4 gate to sites (m, m+1) in place of dense 2^N operators:
    reshape so the pair forms one axis and contract."""
    n = state.n
    _check_site(n, m)
    _check_site(n, m + 1)
    left = 2 ** (m - 1)
    right = 2 ** (n - m - 1)
    psi = state.amplitudes.reshape(left, 4, right)
    out = np.einsum("ij,ajb->aib", gate_matrix, psi)
    return StateVector(n, out.reshape(-1))


def sweep(gate: Gate, chain: ChainSpec, cap: int = DEFAULT_CAP,
          upto: int | None = None) -> StateVector:
    """One left-to-right sweep of the gate over the nearest-neighbor pairs
    (1,2), (2,3), ..., (N-1,N), in that order.

    ``upto`` truncates the sweep after that many bond gates (the prefix
    state); default applies all N-1.
    """
    if chain.n > cap:
        mem = 2 ** chain.n * 16 / 1e6
        raise InputError(
            f"N = {chain.n} exceeds the state-vector cap {cap} "
            f"(would need ~{mem:.0f} MB of amplitudes)")
    last = chain.n - 1 if upto is None else upto
    if not 0 <= last <= chain.n - 1:
        raise InputError(f"prefix length {last} outside 0..{chain.n - 1}")
    state = initial_state(chain)
    for m in range(1, last + 1):
        state = apply_two_site(state, gate.matrix, m)
    return state


def _apply_local(amps: np.ndarray, n: int, op: np.ndarray, m: int) -> np.ndarray:
    left = 2 ** (m - 1)
    right = 2 ** (n - m)
    psi = amps.reshape(left, 2, right)
    return np.einsum("ij,ajb->aib", op, psi).reshape(-1)


def expect_local(state: StateVector, obs: LocalObservable, m: int) -> float:
    _check_site(state.n, m)
    val = complex(state.amplitudes.conj()
                  @ _apply_local(state.amplitudes, state.n, obs.matrix, m))
    return val.real


def expect_pair(state: StateVector, obs: LocalObservable, m: int, n: int) -> float:
    _check_site(state.n, m)
    _check_site(state.n, n)
    if m == n:
        raise InputError("expect_pair needs two distinct sites")
    tmp = _apply_local(state.amplitudes, state.n, obs.matrix, n)
    tmp = _apply_local(tmp, state.n, obs.matrix, m)
    return complex(state.amplitudes.conj() @ tmp).real


def collective_mean(state: StateVector, obs: LocalObservable) -> float:
    acc = np.zeros_like(state.amplitudes)
    for m in range(1, state.n + 1):
        acc += _apply_local(state.amplitudes, state.n, obs.matrix, m)
    return complex(state.amplitudes.conj() @ acc).real


def collective_variance(state: StateVector, obs: LocalObservable) -> float:
    """Variance of the additive observable sum_m A_m over all sites."""
    acc = np.zeros_like(state.amplitudes)
    for m in range(1, state.n + 1):
        acc += _apply_local(state.amplitudes, state.n, obs.matrix, m)
    mean = complex(state.amplitudes.conj() @ acc).real
    second = float(np.real(acc.conj() @ acc))
    return second - mean ** 2


def reduced_density(state: StateVector, m: int) -> np.ndarray:
    """Exact single-site reduced density matrix."""
    _check_site(state.n, m)
    left = 2 ** (m - 1)
    right = 2 ** (state.n - m)
    psi = state.amplitudes.reshape(left, 2, right)
    return np.einsum("aib,ajb->ij", psi, psi.conj())
