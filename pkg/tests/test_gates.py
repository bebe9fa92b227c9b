import json

import numpy as np
import pytest

from chainsweep import gates
from chainsweep.errors import InputError

SX = gates.PAULI_X
SY = gates.PAULI_Y
SZ = gates.PAULI_Z


def expm_oracle(h: np.ndarray) -> np.ndarray:
    """exp(h) by scaling and squaring with a long Taylor tail; independent of
    the constructors under test."""
    norm = np.max(np.abs(h))
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-30)))) + 4)
    small = h / (2 ** squarings)
    out = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, 24):
        term = term @ small / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def test_weyl_identity():
    g = gates.weyl_gate(0.0, 0.0, 0.0)
    assert np.max(np.abs(g.matrix - np.eye(4))) < 1e-15


def test_weyl_entries_at_right_angles():
    x, y, z, w = gates.weyl_params(np.pi / 2, np.pi / 2, np.pi / 2)
    assert abs(x - np.exp(-1j * np.pi / 4)) < 1e-15
    assert abs(y - (-1j) * np.exp(1j * np.pi / 4)) < 1e-15
    assert abs(z) < 1e-15 and abs(w) < 1e-15


@pytest.mark.parametrize("angles", [(0.3, 1.1, -0.4), (1.2, 0.2, 2.0), (-0.7, 0.9, 0.5)])
def test_weyl_matches_matrix_exponential(angles):
    a, b, c = angles
    h = -0.5j * (a * np.kron(SX, SX) + b * np.kron(SY, SY) + c * np.kron(SZ, SZ))
    ref = expm_oracle(h)
    assert np.max(np.abs(gates.weyl_gate(a, b, c).matrix - ref)) < 1e-12


def test_weyl_sparsity_pattern():
    g = gates.weyl_gate(0.47, 1.3, -0.9)
    zero_positions = [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)]
    for i, j in zero_positions:
        assert abs(g.matrix[i, j]) < 1e-14


def test_controlled_rotation_cases():
    assert np.max(np.abs(gates.controlled_rotation(0.0).matrix - np.eye(4))) < 1e-15
    flip = gates.controlled_rotation(np.pi).matrix
    assert np.allclose(flip[2:, 2:], [[0, -1], [1, 0]], atol=1e-15)
    half = gates.controlled_rotation(np.pi / 2).matrix
    c = np.cos(np.pi / 4)
    assert np.allclose(half[2:, 2:], [[c, -c], [c, c]], atol=1e-15)


def test_squeezing_gate_equals_weyl():
    for chi_t in (0.0, 0.3, 1.2):
        a = gates.squeezing_gate(chi_t).matrix
        b = gates.weyl_gate(chi_t, -chi_t, 0.0).matrix
        assert np.max(np.abs(a - b)) < 1e-15


def test_squeezing_gate_quarter_turn():
    x, y, z, w = gates.weyl_params(np.pi / 4, -np.pi / 4, 0.0)
    r = np.sqrt(2) / 2
    assert abs(x - r) < 1e-15 and abs(y) < 1e-15
    assert abs(z - 1.0) < 1e-15 and abs(w + 1j * r) < 1e-15


@pytest.mark.parametrize("chi_t", [0.2, 0.9])
def test_squeezing_matches_exponential(chi_t):
    h = -0.5j * chi_t * (np.kron(SX, SX) - np.kron(SY, SY))
    assert np.max(np.abs(gates.squeezing_gate(chi_t).matrix - expm_oracle(h))) < 1e-12


def test_all_constructors_unitary():
    candidates = [
        gates.weyl_gate(0.3, 1.0, -0.5),
        gates.controlled_rotation(2.2),
        gates.squeezing_gate(0.7),
        gates.macroscopic_family(0.5, 0.3, 1.1, seed=1),
        gates.conjugated_gate(gates.controlled_rotation(np.pi - 0.4),
                              gates.x_rotation(0.3), gates.x_rotation(-0.8)),
        gates.random_gate(123),
    ]
    for g in candidates:
        assert gates.unitarity_deviation(g.matrix) < 1e-12


def test_macroscopic_family_rejects_bad_probability():
    with pytest.raises(InputError):
        gates.macroscopic_family(1.5, 0.1, 0.2, seed=0)


def test_macroscopic_family_fixed_columns_orthonormal():
    g = gates.macroscopic_family(0.37, 0.6, 1.4, seed=9)
    cols = g.matrix[:, [0, 2]]
    assert np.max(np.abs(cols.conj().T @ cols - np.eye(2))) < 1e-12


def test_macroscopic_family_deterministic():
    a = gates.macroscopic_family(0.4, 0.2, 0.9, seed=7).matrix
    b = gates.macroscopic_family(0.4, 0.2, 0.9, seed=7).matrix
    assert np.array_equal(a, b)


def test_conjugated_identity_rotations_noop():
    g = gates.weyl_gate(0.4, 0.8, 0.1)
    gc = gates.conjugated_gate(g, np.eye(2), np.eye(2))
    assert np.max(np.abs(gc.matrix - g.matrix)) < 1e-15


def test_conjugated_rejects_non_unitary():
    with pytest.raises(InputError):
        gates.conjugated_gate(gates.identity_gate(), np.eye(2) * 2.0, np.eye(2))


def test_conjugated_z_rotation_preserves_transfer_spectrum():
    # diagonal rotations commute with the fresh |0> inputs, so the transfer
    # matrix is similarity-transformed and its spectrum survives
    from chainsweep import densemat as dm, transfer
    rz = np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)])
    g = gates.weyl_gate(0.0, np.pi / 2, np.pi / 2)
    gc = gates.conjugated_gate(g, rz, rz)
    before = dm.eig_general(transfer.transfer_E(transfer.extract_kraus(g))).values
    after = dm.eig_general(transfer.transfer_E(transfer.extract_kraus(gc))).values
    from itertools import permutations
    dev = min(max(abs(x - y) for x, y in zip(before, perm))
              for perm in permutations(after))
    assert dev < 1e-10


def test_random_gate_deterministic_and_unitary():
    a = gates.random_gate(42).matrix
    b = gates.random_gate(42).matrix
    assert np.array_equal(a, b)
    for seed in range(10):
        assert gates.unitarity_deviation(gates.random_gate(seed).matrix) < 1e-12


def test_gate_rejects_non_unitary_matrix():
    with pytest.raises(InputError):
        gates.Gate(np.eye(4) * 1.001)


def test_gate_file_roundtrip_family(tmp_path):
    path = tmp_path / "gate.json"
    g = gates.weyl_gate(0.3, 0.6, 0.9)
    gates.save_gate(g, path)
    loaded = gates.load_gate(path)
    assert loaded.family == "weyl"
    assert np.max(np.abs(loaded.matrix - g.matrix)) < 1e-15


def test_gate_file_roundtrip_matrix(tmp_path):
    path = tmp_path / "gate.json"
    g = gates.random_gate(5)
    gates.save_gate(g, path)
    loaded = gates.load_gate(path)
    assert np.max(np.abs(loaded.matrix - g.matrix)) < 1e-15


def test_gate_file_rejects_non_unitary_with_deviation(tmp_path):
    path = tmp_path / "bad.json"
    payload = {"matrix": [[[1.1 if i == j else 0.0, 0.0] for j in range(4)]
                          for i in range(4)]}
    path.write_text(json.dumps(payload))
    with pytest.raises(InputError, match="deviation"):
        gates.load_gate(path)


def test_gate_file_rejects_garbage(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("not json at all")
    with pytest.raises(InputError):
        gates.load_gate(path)


def test_gate_file_loosened_unitarity_tolerance(tmp_path):
    # a matrix 1e-9 off unitary is rejected by default but loadable with an
    # explicitly loosened tolerance
    path = tmp_path / "dirty.json"
    m = gates.random_gate(3).matrix.copy()
    m[0, 0] += 1e-9
    gates.save_gate(gates.Gate(m, tol=1e-6), path)
    with pytest.raises(InputError):
        gates.load_gate(path)
    loaded = gates.load_gate(path, unitarity_tol=1e-6)
    assert np.max(np.abs(loaded.matrix - m)) < 1e-15
