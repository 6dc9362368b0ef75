"""Gate-insertion malware: injection, classification and quarantine."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import qcore
from .protocol import (
    ALL_MESSAGES,
    BOB_QUBIT,
    ALICE_QUBIT,
    CircuitOp,
    Message,
    Node,
    ProtocolCircuit,
    build_protocol,
)
from .qcore import Gate, SimulationError, StateVector

BASIS_TOL = 1e-8


class Position(enum.Enum):
    BEGIN = "begin"
    END = "end"

    @classmethod
    def parse(cls, text: str) -> "Position":
        key = text.strip().lower()
        key = {"beginofchain": "begin", "start": "begin", "endofchain": "end"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise SimulationError(f"unknown position {text!r}; expected begin or end") from None


@dataclass(frozen=True)
class AttackSpec:
    """One malware insertion: ``gate`` on qubit ``target`` at one end of ``node``'s chain."""

    node: Node
    position: Position
    gate: Gate
    target: int

    def __post_init__(self):
        if self.gate.n_qubits != 1:
            raise SimulationError(f"attack gates must be single-qubit, got {self.gate.name}")
        if self.target not in (ALICE_QUBIT, BOB_QUBIT):
            raise SimulationError(f"attack target must be qubit 0 or 1, got {self.target}")

    @classmethod
    def parse(cls, text: str) -> "AttackSpec":
        """Parse ``node:position:gate:qubit``, e.g. ``alice:end:X:0``."""
        parts = text.strip().split(":")
        if len(parts) != 4:
            raise SimulationError(f"attack must look like node:position:gate:qubit, got {text!r}")
        node, pos, gate, qubit = parts
        try:
            target = int(qubit)
        except ValueError:
            raise SimulationError(f"attack qubit must be an integer, got {qubit!r}") from None
        return cls(Node.parse(node), Position.parse(pos), qcore.gate_by_name(gate), target)

    def __str__(self):
        return f"{self.node.value}:{self.position.value}:{self.gate.name}:{self.target}"

    def op(self) -> CircuitOp:
        return CircuitOp(self.gate, (self.target,))


def parse_attacks(texts: Iterable[str]) -> list[AttackSpec]:
    return [AttackSpec.parse(t) for t in texts if t and t.strip()]


def inject(circuit: ProtocolCircuit, attacks: Sequence[AttackSpec]) -> ProtocolCircuit:
    """Return the hacked circuit; insertions are applied in list order."""
    for spec in attacks:
        if isinstance(spec, str):
            spec = AttackSpec.parse(spec)
        if not isinstance(spec, AttackSpec):
            raise SimulationError(f"not an attack: {spec!r}")
        chain = circuit.chain(spec.node)
        chain = chain.prepend(spec.op()) if spec.position is Position.BEGIN else chain.append(spec.op())
        circuit = circuit.with_chain(chain)
    return circuit


def with_correction(circuit: ProtocolCircuit, correction: Gate) -> ProtocolCircuit:
    """Append a two-qubit correction to Bob's chain (targets ``(q1, q0)`` so the matrix index is the basis index)."""
    return circuit.with_chain(circuit.bob.append(CircuitOp(correction, (BOB_QUBIT, ALICE_QUBIT))))


def hacked_final_states(
    attacks: Sequence[AttackSpec] = (), correction: Optional[Gate] = None
) -> dict[Message, StateVector]:
    out = {}
    for m in ALL_MESSAGES:
        circuit = inject(build_protocol(m), attacks)
        if correction is not None:
            circuit = with_correction(circuit, correction)
        out[m] = circuit.final_state()
    return out


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Clean:
    """Every message arrives intact (per-message phases are unobservable)."""

    phases: dict[str, complex] = field(default_factory=dict)

    kind = "clean"

    def __eq__(self, other):
        return isinstance(other, Clean)

    def __hash__(self):
        return hash(self.kind)

    def to_dict(self) -> dict:
        return {"type": self.kind}


@dataclass(frozen=True)
class Bijection:
    f: dict[str, str]
    phases: dict[str, complex]

    kind = "bijection"

    def __post_init__(self):
        if sorted(self.f) != sorted(self.f.values()):
            raise SimulationError(f"f is not a permutation: {self.f}")
        for m, ph in self.phases.items():
            if abs(abs(ph) - 1) > 1e-10:
                raise SimulationError(f"phase for {m} is not unit modulus: {ph}")

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in self.f.items())

    def __eq__(self, other):
        # phases are unobservable; only the remapping matters
        if not isinstance(other, Bijection):
            return NotImplemented
        return self.f == other.f

    def __hash__(self):
        return hash(tuple(sorted(self.f.items())))

    def to_dict(self) -> dict:
        return {
            "type": self.kind,
            "f": dict(self.f),
            "phases": {m: [ph.real, ph.imag] for m, ph in self.phases.items()},
        }


@dataclass(frozen=True, eq=False)
class Scrambling:
    amplitudes: np.ndarray  # row = intended message, column = outcome basis index

    kind = "scrambling"

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if not np.allclose((np.abs(a) ** 2).sum(axis=1), 1.0, atol=1e-10):
            raise SimulationError("scrambling rows must be normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def psi(self, message: "Message | str", outcome: str) -> complex:
        row = qcore.basis_index(str(Message.parse(message)))
        return complex(self.amplitudes[row, qcore.basis_index(outcome)])

    @property
    def success_prob(self) -> dict[str, float]:
        return {str(m): float(abs(self.amplitudes[i, i]) ** 2) for i, m in enumerate(ALL_MESSAGES)}

    def to_dict(self) -> dict:
        return {
            "type": self.kind,
            "success_prob": {k: round(v, 12) for k, v in self.success_prob.items()},
            "amplitudes": {
                str(m): {qcore.bitstring(b, 2): [a.real, a.imag] for b, a in enumerate(self.amplitudes[i])}
                for i, m in enumerate(ALL_MESSAGES)
            },
        }


AttackClassification = Union[Clean, Bijection, Scrambling]


def classify_states(states: dict[Message, StateVector], tol: float = BASIS_TOL) -> AttackClassification:
    f, phases = {}, {}
    for m in ALL_MESSAGES:
        amps = states[m].amps
        b = int(np.argmax(np.abs(amps)))
        if abs(amps[b]) ** 2 < 1 - tol:
            return Scrambling(np.array([states[k].amps for k in ALL_MESSAGES]))
        f[str(m)] = qcore.bitstring(b, 2)
        phases[str(m)] = complex(amps[b] / abs(amps[b]))
    if len(set(f.values())) != len(f):
        # a unitary hacked chain cannot merge two basis states; guard anyway
        raise SimulationError(f"basis mapping is not one-to-one: {f}")
    if all(k == v for k, v in f.items()):
        return Clean(phases)
    return Bijection(f, phases)


def classify(
    attacks: Sequence[AttackSpec] = (), correction: Optional[Gate] = None, tol: float = BASIS_TOL
) -> AttackClassification:
    """Run the hacked protocol noiselessly for all four messages and classify it."""
    return classify_states(hacked_final_states(attacks, correction), tol)


def quarantine_correction(bij: "Bijection | Clean") -> Gate:
    """Permutation unitary ``P`` with ``P|f(xy)> = |xy>``, to be appended at Bob's end."""
    if isinstance(bij, Clean):
        return Gate("QUARANTINE", np.eye(4))
    p = np.zeros((4, 4))
    for xy, fxy in bij.f.items():
        p[qcore.basis_index(xy), qcore.basis_index(fxy)] = 1.0
    return Gate("QUARANTINE", p)
