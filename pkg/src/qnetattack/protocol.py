"""The automated superdense-coding pipeline as three node chains.

Qubit 0 is Alice's (the transmitted qubit), qubit 1 is Bob's.  A message
``xy`` is delivered when Bob reads ``q1 = x`` and ``q0 = y``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence

from . import qcore
from .qcore import CNOT, Counts, Distribution, Gate, H, StateVector, X, Z

N_QUBITS = 2
ALICE_QUBIT = 0
BOB_QUBIT = 1


class Node(enum.Enum):
    SOURCE = "source"
    ALICE = "alice"
    BOB = "bob"

    @classmethod
    def parse(cls, text: str) -> "Node":
        key = text.strip().lower()
        aliases = {"entanglementsource": "source", "ent": "source", "src": "source"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise qcore.SimulationError(f"unknown node {text!r}; expected source, alice or bob") from None


NODE_ORDER = (Node.SOURCE, Node.ALICE, Node.BOB)


@dataclass(frozen=True, order=True)
class Message:
    x: int
    y: int

    def __post_init__(self):
        if self.x not in (0, 1) or self.y not in (0, 1):
            raise qcore.SimulationError(f"message bits must be 0 or 1, got {self.x}{self.y}")

    @classmethod
    def parse(cls, text: "str | Message") -> "Message":
        if isinstance(text, Message):
            return text
        text = str(text).strip()
        if len(text) != 2 or any(c not in "01" for c in text):
            raise qcore.SimulationError(f"message must be a two-bit string, got {text!r}")
        return cls(int(text[0]), int(text[1]))

    def __str__(self):
        return f"{self.x}{self.y}"


ALL_MESSAGES: tuple[Message, ...] = tuple(Message(x, y) for x in (0, 1) for y in (0, 1))


@dataclass(frozen=True)
class CircuitOp:
    gate: Gate
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != self.gate.n_qubits:
            raise qcore.SimulationError(
                f"{self.gate.name} needs {self.gate.n_qubits} target(s), got {self.targets}"
            )

    def __str__(self):
        return f"{self.gate.name}{list(self.targets)}"


@dataclass(frozen=True)
class NodeChain:
    node: Node
    ops: tuple[CircuitOp, ...] = ()

    def prepend(self, op: CircuitOp) -> "NodeChain":
        return replace(self, ops=(op,) + self.ops)

    def append(self, op: CircuitOp) -> "NodeChain":
        return replace(self, ops=self.ops + (op,))


@dataclass(frozen=True)
class ProtocolCircuit:
    message: Message
    source: NodeChain
    alice: NodeChain
    bob: NodeChain

    def chain(self, node: Node) -> NodeChain:
        return {Node.SOURCE: self.source, Node.ALICE: self.alice, Node.BOB: self.bob}[node]

    def with_chain(self, chain: NodeChain) -> "ProtocolCircuit":
        return replace(self, **{chain.node.value: chain})

    def ops(self) -> Iterator[CircuitOp]:
        for node in NODE_ORDER:
            yield from self.chain(node).ops

    def final_state(self) -> StateVector:
        """Run every chain, in order, on ``|00>``."""
        return qcore.apply_circuit(StateVector.zero(N_QUBITS), self.ops())


def source_chain() -> NodeChain:
    return NodeChain(Node.SOURCE, (CircuitOp(H, (ALICE_QUBIT,)), CircuitOp(CNOT, (ALICE_QUBIT, BOB_QUBIT))))


def bob_chain() -> NodeChain:
    return NodeChain(Node.BOB, (CircuitOp(CNOT, (ALICE_QUBIT, BOB_QUBIT)), CircuitOp(H, (ALICE_QUBIT,))))


def alice_chain(message: Message) -> NodeChain:
    # X first (when x = 1), then Z (when y = 1)
    ops = []
    if message.x:
        ops.append(CircuitOp(X, (ALICE_QUBIT,)))
    if message.y:
        ops.append(CircuitOp(Z, (ALICE_QUBIT,)))
    return NodeChain(Node.ALICE, tuple(ops))


def build_protocol(message: "Message | str") -> ProtocolCircuit:
    message = Message.parse(message)
    return ProtocolCircuit(message, source_chain(), alice_chain(message), bob_chain())


def source_state() -> StateVector:
    """The Bell pair ``(|00> + |11>)/sqrt(2)`` leaving the entanglement source."""
    return qcore.apply_circuit(StateVector.zero(N_QUBITS), source_chain().ops)


@dataclass(frozen=True)
class RunResult:
    message: Message
    final_state: StateVector
    ideal: Distribution
    counts: Counts
    shots: int
    seed: int
    noisy: Optional[Distribution] = field(default=None)


def run_protocol(
    circuit: ProtocolCircuit,
    attacks: Sequence = (),
    noise=None,
    shots: int = 1000,
    seed: int = 0,
) -> RunResult:
    """Simulate one message end to end.

    ``attacks`` are injected before running.  With a noise model the sampled
    bits pass through the readout flip channel; ``final_state`` and ``ideal``
    are always noiseless.
    """
    from .attack import inject  # attack depends on this module

    if shots < 1:
        raise qcore.SimulationError(f"shots must be >= 1, got {shots}")
    hacked = inject(circuit, attacks) if attacks else circuit
    final = hacked.final_state()
    ideal = qcore.measure_probs(final)
    rng = qcore.make_rng(seed)
    outcomes = qcore.sample_outcomes(ideal, shots, rng)
    noisy = None
    if noise is not None:
        outcomes = noise.flip_outcomes(outcomes, rng)
        noisy = noise.apply(ideal)
    counts = qcore.counts_from_outcomes(outcomes, N_QUBITS)
    return RunResult(circuit.message, final, ideal, counts, shots, int(seed), noisy)
