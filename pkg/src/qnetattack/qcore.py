"""Dense statevector engine.

Basis index ``b`` encodes the bit string ``q_{n-1} ... q_1 q_0`` so qubit 0 is
the least significant bit.  Bit strings are printed most-significant first,
which for the two-qubit protocol reads ``q1 q0`` (Bob, then Alice).

Sampling uses numpy's PCG64 bit generator seeded from a 64-bit integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

UNITARY_TOL = 1e-12
STATE_TOL = 1e-10
MAX_QUBITS = 20
RNG_ALGORITHM = "numpy.random.PCG64"


class SimulationError(ValueError):
    """Raised when a simulation precondition is violated."""


def bitstring(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def basis_index(bits: str) -> int:
    if not bits or any(c not in "01" for c in bits):
        raise SimulationError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def all_bitstrings(n_qubits: int) -> list[str]:
    return [bitstring(b, n_qubits) for b in range(2**n_qubits)]


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Gate:
    """A named unitary acting on ``n_qubits`` qubits.

    For multi-qubit gates the first target passed to :func:`apply_gate` is the
    most significant index of the matrix, so ``CNOT`` with targets
    ``(control, target)`` has the textbook matrix.
    """

    name: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise SimulationError(f"gate {self.name}: matrix must be square, got {m.shape}")
        k = int(round(math.log2(m.shape[0])))
        if 2**k != m.shape[0]:
            raise SimulationError(f"gate {self.name}: dimension {m.shape[0]} is not a power of two")
        if not np.all(np.isfinite(m)):
            raise SimulationError(f"gate {self.name}: non-finite entries")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err > UNITARY_TOL:
            raise SimulationError(f"gate {self.name}: not unitary (max deviation {err:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.matrix.shape[0])))

    def scaled(self, phase: complex) -> "Gate":
        """The same gate multiplied by a unit scalar (a U(1) relative)."""
        if abs(abs(phase) - 1) > UNITARY_TOL:
            raise SimulationError(f"phase must have modulus 1, got {abs(phase)}")
        return Gate(self.name, phase * self.matrix)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.name, self.matrix.tobytes()))


_s2 = 1 / math.sqrt(2)

I = Gate("I", np.eye(2))
X = Gate("X", [[0, 1], [1, 0]])
Y = Gate("Y", [[0, -1j], [1j, 0]])
Z = Gate("Z", [[1, 0], [0, -1]])
S = Gate("S", [[1, 0], [0, 1j]])
Sdg = Gate("Sdg", [[1, 0], [0, -1j]])
H = Gate("H", [[_s2, _s2], [_s2, -_s2]])
SX = Gate("SX", 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]))
SXdg = Gate("SXdg", 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]]))
CNOT = Gate("CNOT", [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])

GATES: dict[str, Gate] = {g.name: g for g in (I, X, Y, Z, S, Sdg, H, SX, SXdg, CNOT)}
SINGLE_QUBIT_GATES: tuple[Gate, ...] = (I, X, Y, Z, S, Sdg, H, SX, SXdg)

_ALIASES = {
    "ID": "I",
    "SDAG": "Sdg",
    "SQRTX": "SX",
    "√X": "SX",
    "SQRTXDG": "SXdg",
    "SXDAG": "SXdg",
    "CX": "CNOT",
}
_BY_UPPER = {name.upper(): name for name in GATES}


def gate_by_name(name: str) -> Gate:
    """Look up a standard gate, case-insensitively (``sx``, ``sqrtx`` and ``√X`` all work)."""
    key = name.strip().upper()
    canonical = _ALIASES.get(key) or _BY_UPPER.get(key)
    if canonical is None:
        raise SimulationError(f"unknown gate {name!r}; known: {', '.join(GATES)}")
    return GATES[canonical]


def kron(*mats) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m.matrix if isinstance(m, Gate) else m)
    return out


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        n = int(round(math.log2(a.size))) if a.size else -1
        if a.size < 2 or 2**n != a.size:
            raise SimulationError(f"state length {a.size} is not 2**n for n >= 1")
        if n > MAX_QUBITS:
            raise SimulationError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
        if not np.all(np.isfinite(a)):
            raise SimulationError("state has non-finite amplitudes")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1) > STATE_TOL:
            raise SimulationError(f"state is not normalized (norm {norm:.12g})")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        a = np.zeros(2 ** len(bits), dtype=complex)
        a[basis_index(bits)] = 1
        return cls(a)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis("0" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.amps.size)))

    def __getitem__(self, bits: str) -> complex:
        return complex(self.amps[basis_index(bits)])

    def __len__(self):
        return self.amps.size

    def as_dict(self, tol: float = 0.0) -> dict[str, complex]:
        n = self.n_qubits
        return {bitstring(b, n): complex(v) for b, v in enumerate(self.amps) if abs(v) > tol}

    def __repr__(self):
        terms = " + ".join(f"({v.real:.4g}{v.imag:+.4g}j)|{k}>" for k, v in self.as_dict(1e-12).items())
        return f"StateVector({terms})"


def _as_state(state) -> StateVector:
    return state if isinstance(state, StateVector) else StateVector(state)


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    """Return ``U|state>`` with ``gate`` acting on ``targets``."""
    state = _as_state(state)
    n = state.n_qubits
    targets = tuple(int(t) for t in targets)
    k = gate.n_qubits
    if len(targets) != k:
        raise SimulationError(f"gate {gate.name} acts on {k} qubit(s) but {len(targets)} target(s) given")
    if len(set(targets)) != k:
        raise SimulationError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise SimulationError(f"target qubit {t} out of range for {n}-qubit state")
    psi = state.amps.reshape((2,) * n)
    # axis 0 of psi is the most significant qubit
    axes = [n - 1 - t for t in targets]
    u = gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return StateVector(out.reshape(-1))


def apply_circuit(state: StateVector, ops: Iterable) -> StateVector:
    """Apply a sequence of ``(gate, targets)`` pairs (or objects with those attributes)."""
    for op in ops:
        gate, targets = (op.gate, op.targets) if hasattr(op, "gate") else op
        state = apply_gate(state, gate, targets)
    return state


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = STATE_TOL) -> bool:
    a, b = _as_state(a), _as_state(b)
    if a.amps.size != b.amps.size:
        raise SimulationError(f"dimension mismatch: {a.amps.size} vs {b.amps.size}")
    overlap = np.vdot(b.amps, a.amps)
    # the unit scalar minimizing ||a - c b|| aligns c b with a
    c = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return bool(np.linalg.norm(a.amps - c * b.amps) <= tol)


def fidelity(a: StateVector, b: StateVector) -> float:
    a, b = _as_state(a), _as_state(b)
    if a.amps.size != b.amps.size:
        raise SimulationError(f"dimension mismatch: {a.amps.size} vs {b.amps.size}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probabilities over computational basis strings."""

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).reshape(-1)
        n = int(round(math.log2(p.size))) if p.size else -1
        if p.size < 2 or 2**n != p.size:
            raise SimulationError(f"distribution length {p.size} is not 2**n")
        if np.any(p < -STATE_TOL) or np.any(p > 1 + STATE_TOL) or abs(p.sum() - 1) > STATE_TOL:
            raise SimulationError(f"not a probability distribution (sum {p.sum():.12g})")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_mapping(cls, probs: Mapping[str, float], normalize: bool = False) -> "Distribution":
        """Build from ``{bitstring: weight}``; ``normalize`` rescales e.g. percentages or counts."""
        if not probs:
            raise SimulationError("empty distribution")
        n = len(next(iter(probs)))
        p = np.zeros(2**n)
        for k, v in probs.items():
            if len(k) != n:
                raise SimulationError(f"mixed key lengths in distribution: {k!r}")
            p[basis_index(k)] += float(v)
        if normalize:
            total = p.sum()
            if total <= 0:
                raise SimulationError("distribution weights sum to zero")
            p = p / total
        return cls(p)

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.probs.size)))

    def __getitem__(self, bits: str) -> float:
        return float(self.probs[basis_index(bits)])

    def as_dict(self, drop_zeros: bool = False) -> dict[str, float]:
        n = self.n_qubits
        return {bitstring(b, n): float(p) for b, p in enumerate(self.probs) if not drop_zeros or p > 0}

    def __repr__(self):
        return f"Distribution({self.as_dict(drop_zeros=True)})"


@dataclass(frozen=True, eq=False)
class Counts:
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.counts).reshape(-1)
        if not np.issubdtype(c.dtype, np.integer) or np.any(c < 0):
            raise SimulationError("counts must be non-negative integers")
        n = int(round(math.log2(c.size))) if c.size else -1
        if c.size < 2 or 2**n != c.size:
            raise SimulationError(f"counts length {c.size} is not 2**n")
        if c.sum() < 1:
            raise SimulationError("counts must contain at least one shot")
        c = c.astype(np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_mapping(cls, counts: Mapping[str, int]) -> "Counts":
        if not counts:
            raise SimulationError("empty counts")
        n = len(next(iter(counts)))
        c = np.zeros(2**n, dtype=np.int64)
        for k, v in counts.items():
            if len(k) != n:
                raise SimulationError(f"mixed key lengths in counts: {k!r}")
            c[basis_index(k)] += int(v)
        return cls(c)

    @property
    def shots(self) -> int:
        return int(self.counts.sum())

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.counts.size)))

    def __getitem__(self, bits: str) -> int:
        return int(self.counts[basis_index(bits)])

    def __eq__(self, other):
        if not isinstance(other, Counts):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    def as_dict(self, drop_zeros: bool = False) -> dict[str, int]:
        n = self.n_qubits
        return {bitstring(b, n): int(c) for b, c in enumerate(self.counts) if not drop_zeros or c > 0}

    def frequencies(self) -> Distribution:
        return Distribution(self.counts / self.shots)

    def __repr__(self):
        return f"Counts({self.as_dict(drop_zeros=True)})"


def measure_probs(state: StateVector) -> Distribution:
    state = _as_state(state)
    p = np.abs(state.amps) ** 2
    # exact rescale removes rounding drift below STATE_TOL
    return Distribution(p / p.sum())


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise SimulationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def sample_outcomes(dist: Distribution, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` i.i.d. basis indices from ``dist``."""
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.minimum(idx, dist.probs.size - 1)


def counts_from_outcomes(outcomes: np.ndarray, n_qubits: int) -> Counts:
    return Counts(np.bincount(outcomes, minlength=2**n_qubits))


def sample(state: StateVector, shots: int, seed: int) -> Counts:
    """Born-rule shot sampling, deterministic in ``(state, shots, seed)``."""
    state = _as_state(state)
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    outcomes = sample_outcomes(measure_probs(state), shots, make_rng(seed))
    return counts_from_outcomes(outcomes, state.n_qubits)
