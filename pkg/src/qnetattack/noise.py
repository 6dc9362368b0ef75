"""Readout bit-flip noise.

Each measured qubit ``q`` is flipped independently with probability
``flip_probs[q]``.  Noise acts only on measured bits, never on amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .qcore import Distribution, SimulationError, basis_index, bitstring


@dataclass(frozen=True)
class NoiseModel:
    flip_probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(e) for e in self.flip_probs)
        for q, e in enumerate(probs):
            if not 0.0 <= e < 0.5:
                raise SimulationError(f"flip probability for qubit {q} must lie in [0, 0.5), got {e}")
        object.__setattr__(self, "flip_probs", probs)

    @classmethod
    def from_pair(cls, eps0: float, eps1: float) -> "NoiseModel":
        return cls((eps0, eps1))

    @classmethod
    def parse(cls, text: str) -> "NoiseModel":
        """Parse ``"e0,e1"``."""
        try:
            parts = [float(p) for p in text.split(",")]
        except ValueError:
            raise SimulationError(f"noise must be comma-separated probabilities, got {text!r}") from None
        return cls(tuple(parts))

    @property
    def n_qubits(self) -> int:
        return len(self.flip_probs)

    def apply(self, dist: Distribution) -> Distribution:
        return apply_noise(dist, self)

    def flip_outcomes(self, outcomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Flip bits of sampled basis indices in place of a fresh draw."""
        outcomes = np.asarray(outcomes, dtype=np.int64)
        flips = np.zeros_like(outcomes)
        for q, eps in enumerate(self.flip_probs):
            flips |= (rng.random(outcomes.size) < eps).astype(np.int64) << q
        return outcomes ^ flips

    def to_list(self) -> list[float]:
        return list(self.flip_probs)


def apply_noise(dist: Distribution, model: NoiseModel) -> Distribution:
    n = dist.n_qubits
    if model.n_qubits != n:
        raise SimulationError(f"noise model covers {model.n_qubits} qubits, distribution has {n}")
    p = dist.probs.reshape((2,) * n)
    for q, eps in enumerate(model.flip_probs):
        axis = n - 1 - q
        p = (1 - eps) * p + eps * np.flip(p, axis=axis)
    p = p.reshape(-1)
    return Distribution(p / p.sum())


@dataclass(frozen=True)
class Calibration:
    model: NoiseModel
    predicted_diag: dict[str, float]
    target_diag: dict[str, float]
    residual: float  # RMS of predicted - target over the diagonal


def _predicted_table(eps: Sequence[float], messages: Sequence[str]) -> np.ndarray:
    model = NoiseModel(tuple(eps))
    rows = []
    for m in messages:
        ideal = np.zeros(4)
        ideal[basis_index(m)] = 1.0
        rows.append(apply_noise(Distribution(ideal), model).probs)
    return np.array(rows)


def calibrate(
    target_diag: Mapping[str, float],
    table: Optional[Mapping[str, Mapping[str, float]]] = None,
) -> Calibration:
    """Fit ``(eps0, eps1)`` to the clean protocol's observed success rates.

    The diagonal alone fixes only ``(1 - eps0)(1 - eps1)``, so without
    ``table`` the symmetric solution ``eps0 = eps1`` is returned.  When the
    full observed table ``{intended: {observed: freq}}`` is given, both rates
    are fitted by least squares over every entry.
    """
    if not target_diag:
        raise SimulationError("calibrate needs at least one target frequency")
    targets = {str(k): float(v) for k, v in target_diag.items()}
    messages = list(targets)
    d = np.array([targets[m] for m in messages])
    if np.any(d <= 0.5) or np.any(d > 1.0):
        raise SimulationError(f"target frequencies must lie in (0.5, 1], got {d.tolist()}")

    if table is None:
        # least-squares optimum of (1-e)^2 against the targets is their mean
        eps = 1.0 - np.sqrt(d.mean())
        eps_pair = (max(eps, 0.0), max(eps, 0.0))
    else:
        cols = [str(m) for m in table]
        observed = np.array(
            [[float(row.get(bitstring(b, 2), 0.0)) for b in range(4)] for row in table.values()]
        )
        observed = observed / observed.sum(axis=1, keepdims=True)

        def resid(e):
            return (_predicted_table(e, cols) - observed).ravel()

        fit = least_squares(resid, x0=[0.05, 0.05], bounds=([0.0, 0.0], [0.4999, 0.4999]))
        eps_pair = (float(fit.x[0]), float(fit.x[1]))

    model = NoiseModel(eps_pair)
    pred = _predicted_table(eps_pair, messages)
    predicted = {m: float(pred[i, basis_index(m)]) for i, m in enumerate(messages)}
    residual = float(np.sqrt(np.mean([(predicted[m] - targets[m]) ** 2 for m in messages])))
    return Calibration(model, predicted, targets, residual)
