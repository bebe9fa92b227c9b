"""Two-qubit gate constructors, validation, and gate-file I/O.

All gates are 4x4 unitaries in the basis |00>, |01>, |10>, |11>, with the
first tensor factor the left/control qubit of each chain bond.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import densemat as dm
from .errors import InputError

UNITARITY_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

FAMILIES = ("weyl", "controlled_rotation", "squeezing", "macroscopic_family",
            "conjugated", "custom")


@dataclass(frozen=True)
class Gate:
    """A validated two-qubit unitary with its construction metadata.

    ``tol`` is the unitarity-validation tolerance; every in-package
    constructor uses the 1e-12 default, a looser value can be passed
    explicitly when accepting matrices from outside.
    """

    matrix: np.ndarray
    family: str = "custom"
    params: tuple[float, ...] = field(default_factory=tuple)
    tol: float = UNITARITY_TOL

    def __post_init__(self):
        m = dm.as_matrix(self.matrix)
        if m.shape != (4, 4):
            raise InputError(f"gate must be 4x4, got {m.shape}")
        dev = unitarity_deviation(m)
        if dev > self.tol:
            raise InputError(f"gate is not unitary: max deviation {dev:.3e}")
        if self.family not in FAMILIES:
            raise InputError(f"unknown gate family {self.family!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))


def unitarity_deviation(m: np.ndarray) -> float:
    m = dm.as_matrix(m)
    return dm.max_abs(m.conj().T @ m - np.eye(m.shape[0]))


def weyl_params(alpha: float, beta: float, gamma: float) -> tuple[complex, complex, complex, complex]:
    """The four matrix entries (x, y, z, w) generated by the XX+YY+ZZ
    interaction angles; exposed separately so tests can pin them."""
    x = np.exp(-0.5j * gamma) * np.cos(0.5 * (alpha - beta))
    y = -1j * np.exp(0.5j * gamma) * np.sin(0.5 * (alpha + beta))
    z = np.exp(0.5j * gamma) * np.cos(0.5 * (alpha + beta))
    w = -1j * np.exp(-0.5j * gamma) * np.sin(0.5 * (alpha - beta))
    return complex(x), complex(y), complex(z), complex(w)


def weyl_gate(alpha: float, beta: float, gamma: float, family: str = "weyl") -> Gate:
    """exp(-i/2 (alpha XX + beta YY + gamma ZZ)) on a qubit pair."""
    x, y, z, w = weyl_params(alpha, beta, gamma)
    m = np.array([
        [x, 0, 0, w],
        [0, z, y, 0],
        [0, y, z, 0],
        [w, 0, 0, x],
    ], dtype=np.complex128)
    return Gate(m, family=family, params=(alpha, beta, gamma))


def controlled_rotation(a: float) -> Gate:
    """|0><0| x I + |1><1| x R(a) with R a real rotation by angle a/2."""
    c, s = np.cos(0.5 * a), np.sin(0.5 * a)
    m = np.array([
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, c, -s],
        [0, 0, s, c],
    ], dtype=np.complex128)
    return Gate(m, family="controlled_rotation", params=(a,))


def squeezing_gate(chi_t: float) -> Gate:
    """exp(-i t H) for H = (chi/2)(XX - YY): the two-axis-twisting bond gate.

    Identical matrix to weyl_gate(chi_t, -chi_t, 0)."""
    g = weyl_gate(chi_t, -chi_t, 0.0, family="squeezing")
    return Gate(g.matrix, family="squeezing", params=(chi_t,))


def x_rotation(theta: float) -> np.ndarray:
    """exp(i theta X) = [[cos, i sin], [i sin, cos]]."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


def macroscopic_family(p: float, theta: float, theta_p: float, seed: int = 0) -> Gate:
    """A gate whose extracted Kraus pair is sqrt(1-p) and sqrt(p) times two
    x-axis rotations (angles theta, theta_p), the structure that makes the
    transfer spectrum doubly degenerate at 1.

    Columns 0 and 2 of the unitary are fixed by the Kraus pair; the free
    columns are filled by seeded orthonormal completion.
    """
    if not 0.0 <= p <= 1.0:
        raise InputError(f"probability p must lie in [0, 1], got {p}")
    v0 = np.sqrt(1.0 - p) * x_rotation(theta)
    v1 = np.sqrt(p) * x_rotation(theta_p)
    # Column (j, 0) of U holds row j of the Kraus matrices: U[2i+k, 2j] = (V_i)[j, k].
    col0 = np.array([v0[0, 0], v0[0, 1], v1[0, 0], v1[0, 1]])
    col2 = np.array([v0[1, 0], v0[1, 1], v1[1, 0], v1[1, 1]])
    fixed = np.column_stack([col0, col2])
    completed = dm.orthonormal_complete(fixed, seed=seed)
    m = np.empty((4, 4), dtype=np.complex128)
    m[:, 0] = completed[:, 0]
    m[:, 2] = completed[:, 1]
    m[:, 1] = completed[:, 2]
    m[:, 3] = completed[:, 3]
    return Gate(m, family="macroscopic_family", params=(p, theta, theta_p, seed))


def conjugated_gate(g: Gate, r1: np.ndarray, r2: np.ndarray) -> Gate:
    """(r1 x r2) g (r1† x r2†) for single-qubit unitaries r1, r2."""
    r1, r2 = dm.as_matrix(r1), dm.as_matrix(r2)
    for r in (r1, r2):
        if r.shape != (2, 2):
            raise InputError("rotations must be 2x2")
        dev = unitarity_deviation(r)
        if dev > UNITARITY_TOL:
            raise InputError(f"rotation is not unitary: max deviation {dev:.3e}")
    outer = np.kron(r1, r2)
    m = outer @ g.matrix @ outer.conj().T
    return Gate(m, family="conjugated", params=g.params)


def random_gate(seed: int) -> Gate:
    """Haar-like unitary from a seeded complex Gaussian, deterministic per seed."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    return Gate(dm.mgs_orthonormalize(raw), family="custom", params=(seed,))


def identity_gate() -> Gate:
    return Gate(np.eye(4, dtype=np.complex128), family="custom")


_FAMILY_BUILDERS = {
    "weyl": (3, lambda p: weyl_gate(*p)),
    "controlled_rotation": (1, lambda p: controlled_rotation(*p)),
    "squeezing": (1, lambda p: squeezing_gate(*p)),
    "macroscopic_family": (4, lambda p: macroscopic_family(p[0], p[1], p[2], int(p[3]))),
}


def gate_from_family(family: str, params) -> Gate:
    if family not in _FAMILY_BUILDERS:
        raise InputError(f"cannot build family {family!r} from parameters; "
                         f"choose one of {sorted(_FAMILY_BUILDERS)}")
    want, builder = _FAMILY_BUILDERS[family]
    params = list(params)
    if len(params) != want:
        raise InputError(f"family {family!r} takes {want} parameters, got {len(params)}")
    return builder(params)


def save_gate(gate: Gate, path) -> None:
    """Write a gate file: either the family+params form or the explicit
    row-major [re, im] matrix form."""
    if gate.family in _FAMILY_BUILDERS:
        payload = {"family": gate.family, "params": list(gate.params)}
    else:
        payload = {"matrix": [[[float(z.real), float(z.imag)] for z in row]
                              for row in np.asarray(gate.matrix)]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_gate(path, unitarity_tol: float = UNITARITY_TOL) -> Gate:
    """Read a gate file, validating unitarity; rejects with the offending
    maximum deviation in the message."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read gate file {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError("gate file must hold a single JSON object")
    if "family" in payload:
        return gate_from_family(payload["family"], payload.get("params", []))
    if "matrix" in payload:
        rows = payload["matrix"]
        try:
            m = np.array([[complex(entry[0], entry[1]) for entry in row] for row in rows],
                         dtype=np.complex128)
        except (TypeError, IndexError, ValueError) as exc:
            raise InputError(f"malformed matrix entries in gate file: {exc}") from exc
        if m.shape != (4, 4):
            raise InputError(f"gate matrix must be 4x4, got {m.shape}")
        dev = unitarity_deviation(m)
        if dev > unitarity_tol:
            raise InputError(f"gate file matrix is not unitary: max deviation {dev:.3e}")
        return Gate(m, family="custom", tol=unitarity_tol)
    raise InputError("gate file needs a 'family' or 'matrix' key")
