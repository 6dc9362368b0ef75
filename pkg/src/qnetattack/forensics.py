"""Forensic analysis of hacked runs.

Per-qubit error rates against the intended strings, brute-force grouping of
attacks that leave identical fingerprints, and ranking of attack hypotheses
against observed frequencies.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import qcore
from .attack import AttackSpec, Position, hacked_final_states
from .noise import NoiseModel
from .protocol import ALICE_QUBIT, ALL_MESSAGES, BOB_QUBIT, NODE_ORDER, Message
from .qcore import Counts, Distribution, Gate, SimulationError, StateVector

FINGERPRINT_TOL = 1e-8
TIE_TOL = 1e-9


class Granularity(enum.Enum):
    VECTOR = "vector"  # per-message final vectors up to global phase
    DISTRIBUTION = "distribution"

    @classmethod
    def parse(cls, text: "str | Granularity") -> "Granularity":
        if isinstance(text, Granularity):
            return text
        key = text.strip().lower()
        key = {"vectoruptophase": "vector", "dist": "distribution"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise SimulationError(f"unknown granularity {text!r}; expected vector or distribution") from None


def _as_distribution(obs) -> Distribution:
    if isinstance(obs, Distribution):
        return obs
    if isinstance(obs, Counts):
        return obs.frequencies()
    if isinstance(obs, Mapping):
        return Distribution.from_mapping(obs, normalize=True)
    raise SimulationError(f"cannot interpret {type(obs).__name__} as observed frequencies")


# ---------------------------------------------------------------------------
# Error rates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorRates:
    alice_error: float
    bob_error: float


def error_rates(counts_per_message: Mapping) -> dict[str, ErrorRates]:
    """Per-message probability that Alice's (q0) or Bob's (q1) bit is wrong.

    Values may be :class:`Counts`, :class:`Distribution` or plain
    ``{bitstring: weight}`` maps (percentages are fine; rows are normalized).
    """
    if not counts_per_message:
        raise SimulationError("error_rates needs at least one message")
    report = {}
    for key, obs in counts_per_message.items():
        m = Message.parse(key)
        p = _as_distribution(obs).as_dict()
        alice = sum(v for s, v in p.items() if int(s[1]) != m.y)
        bob = sum(v for s, v in p.items() if int(s[0]) != m.x)
        report[str(m)] = ErrorRates(float(alice), float(bob))
    return report


def tv_distance(a, b) -> float:
    a, b = _as_distribution(a), _as_distribution(b)
    if a.probs.size != b.probs.size:
        raise SimulationError(f"outcome spaces differ: {a.probs.size} vs {b.probs.size}")
    return float(0.5 * np.abs(a.probs - b.probs).sum())


# ---------------------------------------------------------------------------
# Fingerprints and equivalence classes
# ---------------------------------------------------------------------------


def canonical_phase(state: StateVector, tol: float = FINGERPRINT_TOL) -> np.ndarray:
    """Rotate so the largest-magnitude amplitude (lowest index on ties) is real positive."""
    amps = state.amps
    mags = np.abs(amps)
    b = int(np.flatnonzero(mags >= mags.max() - tol)[0])
    return amps * (abs(amps[b]) / amps[b])


def fingerprint(states: Mapping[Message, StateVector], granularity: Granularity) -> np.ndarray:
    granularity = Granularity.parse(granularity)
    if granularity is Granularity.VECTOR:
        return np.array([canonical_phase(states[m]) for m in ALL_MESSAGES])
    return np.array([qcore.measure_probs(states[m]).probs for m in ALL_MESSAGES], dtype=complex)


def _fingerprint_key(fp: np.ndarray) -> list:
    # + 0.0 folds -0.0 into 0.0
    rounded = np.round(fp, 8) + 0.0
    if np.all(rounded.imag == 0):
        return rounded.real.tolist()
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in rounded]


@dataclass(frozen=True)
class EquivalenceClass:
    key: list  # rounded canonical fingerprint, one row per message 00, 01, 10, 11
    members: tuple[tuple[AttackSpec, ...], ...]

    def member_strings(self) -> list[str]:
        return [" + ".join(str(a) for a in hyp) or "clean" for hyp in self.members]

    def __contains__(self, hypothesis) -> bool:
        hyp = tuple(hypothesis) if not isinstance(hypothesis, AttackSpec) else (hypothesis,)
        return hyp in self.members

    def to_dict(self) -> dict:
        return {"members": self.member_strings(), "key": self.key}


def attack_grid(gate_set: Sequence[Gate]) -> list[AttackSpec]:
    """Every single insertion in ``gate_set x nodes x positions x qubits``, in canonical order."""
    grid = []
    for gate, node, pos, q in itertools.product(
        gate_set, NODE_ORDER, (Position.BEGIN, Position.END), (ALICE_QUBIT, BOB_QUBIT)
    ):
        grid.append(AttackSpec(node, pos, gate, q))
    return grid


def group_by_fingerprint(
    hypotheses: Sequence[Sequence[AttackSpec]],
    granularity: "Granularity | str" = Granularity.VECTOR,
    workers: Optional[int] = None,
    tol: float = FINGERPRINT_TOL,
) -> list[EquivalenceClass]:
    """Group attack lists whose hacked protocols share a fingerprint.

    Classes keep the order of their first member; members keep input order.
    """
    granularity = Granularity.parse(granularity)
    hyps = [tuple(h) for h in hypotheses]

    def fp(h):
        return fingerprint(hacked_final_states(h), granularity)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fps = list(pool.map(fp, hyps))
    else:
        fps = [fp(h) for h in hyps]

    reps: list[np.ndarray] = []
    groups: list[list[int]] = []
    for i, f in enumerate(fps):
        for rep, members in zip(reps, groups):
            if np.max(np.abs(rep - f)) <= tol:
                members.append(i)
                break
        else:
            reps.append(f)
            groups.append([i])
    return [
        EquivalenceClass(_fingerprint_key(rep), tuple(hyps[i] for i in members))
        for rep, members in zip(reps, groups)
    ]


def enumerate_equivalences(
    gate_set: Sequence[Gate],
    granularity: "Granularity | str" = Granularity.VECTOR,
    workers: Optional[int] = None,
) -> list[EquivalenceClass]:
    """Exhaustively simulate every single-gate insertion and group by fingerprint."""
    for g in gate_set:
        if g.n_qubits != 1:
            raise SimulationError(f"enumeration uses single-qubit gates only, got {g.name}")
    return group_by_fingerprint([(a,) for a in attack_grid(gate_set)], granularity, workers)


# ---------------------------------------------------------------------------
# Hypothesis ranking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Match:
    hypothesis: tuple[AttackSpec, ...]
    distance: float  # mean TV distance over the observed messages
    rank: int  # 1-based; tied hypotheses share a rank
    per_message: dict[str, float]

    @property
    def label(self) -> str:
        return " + ".join(str(a) for a in self.hypothesis) or "clean"

    def to_dict(self) -> dict:
        return {
            "hypothesis": [str(a) for a in self.hypothesis],
            "distance": self.distance,
            "rank": self.rank,
            "per_message": self.per_message,
        }


def predicted_distributions(
    hypothesis: Sequence[AttackSpec], noise: Optional[NoiseModel] = None
) -> dict[str, Distribution]:
    states = hacked_final_states(tuple(hypothesis))
    out = {}
    for m, st in states.items():
        d = qcore.measure_probs(st)
        out[str(m)] = noise.apply(d) if noise is not None else d
    return out


def signature_match(
    observed: Mapping,
    hypotheses: Sequence[Sequence[AttackSpec]],
    noise: Optional[NoiseModel] = None,
    tie_tol: float = TIE_TOL,
) -> list[Match]:
    """Rank attack hypotheses by mean TV distance to the observed frequencies.

    ``observed`` maps message strings to counts or frequencies; only the
    messages present are compared.  Hypotheses within ``tie_tol`` of each
    other share a rank and are ordered by their string form.
    """
    if not observed:
        raise SimulationError("signature_match needs observed frequencies for at least one message")
    obs = {str(Message.parse(k)): _as_distribution(v) for k, v in observed.items()}
    scored = []
    for hyp in hypotheses:
        hyp = tuple(AttackSpec.parse(a) if isinstance(a, str) else a for a in hyp)
        pred = predicted_distributions(hyp, noise)
        per = {m: tv_distance(obs[m], pred[m]) for m in sorted(obs)}
        scored.append((float(np.mean(list(per.values()))), hyp, per))

    scored.sort(key=lambda s: s[0])
    # cluster near-equal distances, then order each cluster canonically
    clusters: list[list] = []
    for s in scored:
        if clusters and s[0] - clusters[-1][0][0] <= tie_tol:
            clusters[-1].append(s)
        else:
            clusters.append([s])
    out, rank = [], 1
    for cluster in clusters:
        cluster.sort(key=lambda s: [str(a) for a in s[1]])
        for dist, hyp, per in cluster:
            out.append(Match(hyp, dist, rank, per))
        rank += len(cluster)
    return out
