"""JSON/CSV report writers and the scenario file format."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from . import __version__
from .attack import AttackSpec, parse_attacks
from .noise import NoiseModel
from .protocol import ALL_MESSAGES, Message
from .qcore import RNG_ALGORITHM, SimulationError, StateVector, all_bitstrings

SCENARIO_SCHEMA = "qnetattack.scenario/1"
REPORT_SCHEMA = "qnetattack.report/1"


class ConfigError(ValueError):
    """A scenario or command line could not be parsed."""


@dataclass(frozen=True)
class Scenario:
    messages: tuple[str, ...] = tuple(str(m) for m in ALL_MESSAGES)
    attacks: tuple[str, ...] = ()
    noise: Optional[tuple[float, float]] = None
    shots: int = 1000
    seed: int = 0
    out: Optional[str] = None
    format: str = "both"

    def __post_init__(self):
        try:
            msgs = tuple(str(Message.parse(m)) for m in self.messages)
            attacks = tuple(str(a) for a in parse_attacks(self.attacks))
            noise = tuple(NoiseModel(tuple(self.noise)).flip_probs) if self.noise is not None else None
        except SimulationError as exc:
            raise ConfigError(str(exc)) from exc
        if not msgs:
            raise ConfigError("scenario needs at least one message")
        if noise is not None and len(noise) != 2:
            raise ConfigError(f"noise needs two flip probabilities, got {len(noise)}")
        if int(self.shots) < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.format not in ("json", "csv", "both"):
            raise ConfigError(f"format must be json, csv or both, got {self.format!r}")
        object.__setattr__(self, "messages", msgs)
        object.__setattr__(self, "attacks", attacks)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "seed", int(self.seed))

    def attack_specs(self) -> list[AttackSpec]:
        return parse_attacks(self.attacks)

    def noise_model(self) -> Optional[NoiseModel]:
        return NoiseModel(self.noise) if self.noise is not None else None

    def to_dict(self) -> dict:
        return {
            "schema": SCENARIO_SCHEMA,
            "messages": list(self.messages),
            "attacks": list(self.attacks),
            "noise": list(self.noise) if self.noise is not None else None,
            "shots": self.shots,
            "seed": self.seed,
            "out": self.out,
            "format": self.format,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Scenario":
        data = dict(data)
        schema = data.pop("schema", SCENARIO_SCHEMA)
        if schema != SCENARIO_SCHEMA:
            raise ConfigError(f"unsupported scenario schema {schema!r}")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        for key in ("messages", "attacks"):
            if key in data:
                data[key] = tuple(data[key])
        if data.get("noise") is not None:
            data["noise"] = tuple(data["noise"])
        return cls(**data)

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("scenario file must hold a JSON object")
        return cls.from_dict(data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)) + 0.0, float(np.imag(z)) + 0.0]


def state_to_json(state: StateVector) -> dict[str, list[float]]:
    return {k: complex_pair(v) for k, v in state.as_dict().items()}


def report_header(kind: str, seed: Optional[int] = None, scenario: Optional[Scenario] = None) -> dict:
    head = {"schema": REPORT_SCHEMA, "kind": kind, "tool": "qnetattack", "version": __version__}
    if seed is not None:
        head["seed"] = seed
        head["rng"] = RNG_ALGORITHM
    if scenario is not None:
        head["scenario"] = scenario.to_dict()
    return head


def dumps_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def frequency_table_csv(freqs: Mapping[str, Mapping[str, float]]) -> str:
    """Rows are observed strings, columns intended strings (percentages)."""
    intended = list(freqs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["observed"] + intended)
    for obs in all_bitstrings(2):
        w.writerow([obs] + [f"{100 * freqs[m].get(obs, 0.0):.1f}" for m in intended])
    return buf.getvalue()


def error_rate_csv(rates: Mapping) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["intended", "alice_error_pct", "bob_error_pct"])
    for m, r in rates.items():
        w.writerow([m, f"{100 * r.alice_error:.1f}", f"{100 * r.bob_error:.1f}"])
    return buf.getvalue()


def read_frequency_table_csv(text: str) -> dict[str, dict[str, float]]:
    """Inverse of :func:`frequency_table_csv` (returns fractions)."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    out: dict[str, dict[str, float]] = {m: {} for m in header[1:]}
    for row in body:
        for m, v in zip(header[1:], row[1:]):
            out[m][row[0]] = float(v) / 100
    return out
