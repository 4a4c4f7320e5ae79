"""Truncated four-mode Fock space for polarization-entangled photon pairs.

Modes are ordered (1h, 2v, 1v, 2h): the first two form the signal pair A,
the last two the conjugate pair B. A ket is written |n1 n2 . n3 n4> in that
order, so |11.00> is one photon in mode 1h and one in mode 2v.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

# Absolute per-amplitude tolerance for state comparisons.
STATE_TOL = 1e-10

# JSON export drops amplitudes below this magnitude.
JSON_AMP_CUTOFF = 1e-14

# A cutoff above this bound would allocate a basis too large to be useful
# on a workstation, so make_basis refuses it.
CUTOFF_SAFETY_BOUND = 12


class ModeId(Enum):
    """The four field modes, in basis axis order."""

    M1H = 0
    M2V = 1
    M1V = 2
    M2H = 3

    @property
    def pair(self) -> str:
        """Which squeezed pair the mode belongs to ("A" or "B")."""
        return "A" if self in (ModeId.M1H, ModeId.M2V) else "B"

    @property
    def beam(self) -> int:
        """Spatial beam index, 1 or 2."""
        return 1 if self in (ModeId.M1H, ModeId.M1V) else 2

    @property
    def polarization(self) -> str:
        return "h" if self in (ModeId.M1H, ModeId.M2H) else "v"


# Occupancy 4-tuple in (1h, 2v, 1v, 2h) order.
FockState = tuple[int, int, int, int]


class ResourceError(ValueError):
    """Requested basis exceeds the configured safety bound."""


class TruncationError(RuntimeError):
    """Evolution or transform pushed weight past the occupancy cutoff."""


@dataclass(frozen=True)
class FockBasis:
    """Lexicographically ordered occupancy basis with per-mode cutoff."""

    cutoff: int

    @property
    def dim_per_mode(self) -> int:
        return self.cutoff + 1

    @property
    def size(self) -> int:
        return self.dim_per_mode**4

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.dim_per_mode,) * 4

    def index_of(self, state: FockState) -> int:
        d = self.dim_per_mode
        n1, n2, n3, n4 = state
        for n in state:
            if not 0 <= n <= self.cutoff:
                raise ValueError(f"occupancy {state} outside cutoff {self.cutoff}")
        return ((n1 * d + n2) * d + n3) * d + n4

    def state_at(self, index: int) -> FockState:
        d = self.dim_per_mode
        n4 = index % d
        index //= d
        n3 = index % d
        index //= d
        n2 = index % d
        n1 = index // d
        return (n1, n2, n3, n4)

    def states(self) -> Iterable[FockState]:
        d = self.dim_per_mode
        for n1 in range(d):
            for n2 in range(d):
                for n3 in range(d):
                    for n4 in range(d):
                        yield (n1, n2, n3, n4)

    def occupancy_grid(self, mode: ModeId) -> np.ndarray:
        """Occupancy of ``mode`` for every basis state, as a flat int array."""
        d = self.dim_per_mode
        grid = np.arange(d)
        shape = [1, 1, 1, 1]
        shape[mode.value] = d
        return np.broadcast_to(grid.reshape(shape), self.shape).reshape(-1)

    def total_occupancy(self) -> np.ndarray:
        return sum(self.occupancy_grid(m) for m in ModeId)


def make_basis(cutoff: int) -> FockBasis:
    """Build the four-mode basis with the given per-mode occupancy cutoff.

    cutoff = 0 is legal and yields the one-state vacuum basis; operations
    that need photons (pair_state, the amplifier) enforce their own floor.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    if cutoff > CUTOFF_SAFETY_BOUND:
        raise ResourceError(
            f"cutoff {cutoff} exceeds safety bound {CUTOFF_SAFETY_BOUND}"
        )
    return FockBasis(cutoff)


@dataclass
class StateVector:
    """Complex amplitudes over a FockBasis."""

    basis: FockBasis
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.basis.size,):
            raise ValueError(
                f"amplitude vector has shape {self.amps.shape}, "
                f"expected ({self.basis.size},)"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amps.copy())

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per mode."""
        return self.amps.reshape(self.basis.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amps / n)

    def amplitude(self, state: FockState) -> complex:
        return complex(self.amps[self.basis.index_of(state)])

    def probability(self, state: FockState) -> float:
        return float(abs(self.amplitude(state)) ** 2)

    def inner(self, other: "StateVector") -> complex:
        _check_same_basis(self, other)
        return complex(np.vdot(self.amps, other.amps))


def _check_same_basis(a: StateVector, b: StateVector) -> None:
    if a.basis.cutoff != b.basis.cutoff:
        raise ValueError("states live on different bases")


def zero_state(basis: FockBasis) -> StateVector:
    return StateVector(basis, np.zeros(basis.size, dtype=np.complex128))


def basis_state(basis: FockBasis, state: FockState) -> StateVector:
    s = zero_state(basis)
    s.amps[basis.index_of(state)] = 1.0
    return s


def vacuum_state(basis: FockBasis) -> StateVector:
    return basis_state(basis, (0, 0, 0, 0))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>| for normalized inputs; insensitive to global phase."""
    return float(abs(a.inner(b)))


def ladder_matrix(op: str, mode: ModeId, basis: FockBasis) -> sparse.csr_matrix:
    """Sparse creation or annihilation matrix for one mode.

    Creation out of the top occupancy level has no destination inside the
    truncated space and the component is dropped.
    """
    if op not in ("create", "annihilate"):
        raise ValueError(f"unknown ladder op {op!r}")
    d = basis.dim_per_mode
    occ = basis.occupancy_grid(mode)
    idx = np.arange(basis.size)
    stride = d ** (3 - mode.value)
    if op == "create":
        keep = occ < basis.cutoff
        rows = idx[keep] + stride
        cols = idx[keep]
        vals = np.sqrt(occ[keep] + 1.0)
    else:
        keep = occ > 0
        rows = idx[keep] - stride
        cols = idx[keep]
        vals = np.sqrt(occ[keep].astype(float))
    return sparse.csr_matrix(
        (vals, (rows, cols)), shape=(basis.size, basis.size), dtype=np.complex128
    )


def apply_ladder(op: str, mode: ModeId, s: StateVector) -> StateVector:
    """Apply a single creation or annihilation operator to a state."""
    mat = ladder_matrix(op, mode, s.basis)
    return StateVector(s.basis, mat @ s.amps)


def pair_state(phi: float, basis: FockBasis) -> StateVector:
    """Polarization-entangled photon pair (|11.00> + e^{i phi}|00.11>)/sqrt(2).

    phi = 0 gives the triplet-like combination, phi = pi the singlet.
    """
    if basis.cutoff < 1:
        raise ValueError("pair_state needs a basis with cutoff >= 1")
    s = zero_state(basis)
    s.amps[basis.index_of((1, 1, 0, 0))] = 1.0 / math.sqrt(2.0)
    s.amps[basis.index_of((0, 0, 1, 1))] = np.exp(1j * phi) / math.sqrt(2.0)
    return s


def quarter_wave_flip(phi: float) -> float:
    """Internal phase after a quarter-wave plate pass, reduced to (-pi, pi].

    The plate advances the superposition phase by pi; the reduction keeps
    repeated flips involutive up to the branch cut.
    """
    flipped = math.remainder(phi + math.pi, 2.0 * math.pi)
    if flipped <= -math.pi:
        flipped = math.pi
    return flipped


def swap_pairs(s: StateVector) -> StateVector:
    """Exchange pair A and pair B occupancies: (n1,n2,n3,n4) -> (n3,n4,n1,n2)."""
    t = s.tensor().transpose(2, 3, 0, 1)
    return StateVector(s.basis, np.ascontiguousarray(t).reshape(-1))


def swap_parity(s: StateVector, tol: float = STATE_TOL) -> str:
    """Classify a normalized state under the pair-swap exchange.

    Returns "even" when swapping pairs reproduces the state, "odd" when it
    flips the sign, "mixed" otherwise.
    """
    if abs(s.norm() - 1.0) > 1e-8:
        raise ValueError("swap_parity expects a normalized state")
    swapped = swap_pairs(s)
    if np.max(np.abs(swapped.amps - s.amps)) <= tol:
        return "even"
    if np.max(np.abs(swapped.amps + s.amps)) <= tol:
        return "odd"
    return "mixed"


def parity_operator_diagonal(basis: FockBasis) -> np.ndarray:
    """Diagonal of the photon-number parity operator (-1)^N as a flat array."""
    return np.where(basis.total_occupancy() % 2 == 0, 1.0, -1.0)


def to_json(s: StateVector) -> str:
    """Serialize a state as a JSON array of amplitude records.

    Each record is {"occupancies": [n1, n2, n3, n4], "re": x, "im": y};
    amplitudes with magnitude below 1e-14 are omitted. Record order follows
    the lexicographic basis order, so output is stable for golden tests.
    """
    records = []
    for i in np.flatnonzero(np.abs(s.amps) >= JSON_AMP_CUTOFF):
        amp = s.amps[i]
        records.append(
            {
                "occupancies": list(s.basis.state_at(int(i))),
                "re": float(amp.real),
                "im": float(amp.imag),
            }
        )
    return json.dumps(records)


def from_json(text: str, basis: FockBasis) -> StateVector:
    s = zero_state(basis)
    for rec in json.loads(text):
        occ = tuple(int(n) for n in rec["occupancies"])
        if len(occ) != 4:
            raise ValueError(f"bad occupancy record {rec['occupancies']}")
        s.amps[basis.index_of(occ)] = rec["re"] + 1j * rec["im"]
    return s


def boundary_weight(s: StateVector) -> float:
    """Probability weight sitting at the occupancy cutoff in any mode.

    Used as the truncation-loss proxy: unitary evolution on the truncated
    space preserves norm exactly, so weight piled against the cutoff is the
    observable symptom of an undersized basis.
    """
    mask = np.zeros(s.basis.size, dtype=bool)
    for m in ModeId:
        mask |= s.basis.occupancy_grid(m) == s.basis.cutoff
    return float(np.sum(np.abs(s.amps[mask]) ** 2))
