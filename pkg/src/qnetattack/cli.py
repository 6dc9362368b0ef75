"""Command line scenario runner.

    qnetattack run --attack alice:begin:S:0 --noise 0.062,0.062 --out reports/
    qnetattack classify --attack alice:end:X:0
    qnetattack enumerate --gates X,S,H --granularity distribution
    qnetattack calibrate --diag 00=0.917 --diag 01=0.846 --diag 10=0.897 --diag 11=0.862
    qnetattack match --observed table5.json --hypothesis alice:begin:S:0 --hypothesis source:end:S:1

Exit status is 0 on success, 2 when the configuration cannot be parsed and 3
when a simulation precondition fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, forensics, qcore
from .attack import AttackSpec, classify, parse_attacks, quarantine_correction
from .noise import NoiseModel, calibrate
from .protocol import Message, build_protocol, run_protocol
from .qcore import SimulationError
from .reports import (
    ConfigError,
    Scenario,
    atomic_write,
    dumps_json,
    error_rate_csv,
    frequency_table_csv,
    report_header,
    state_to_json,
)

EXIT_OK, EXIT_CONFIG, EXIT_SIMULATION = 0, 2, 3


def message_seed(seed: int, message: Message) -> int:
    """Independent 64-bit stream seed for one message of a scenario."""
    ss = np.random.SeedSequence(seed, spawn_key=(qcore.basis_index(str(message)),))
    return int(ss.generate_state(1, np.uint64)[0])


def run_scenario(scenario: Scenario) -> dict:
    """Run every message of ``scenario`` and build the JSON report."""
    attacks = scenario.attack_specs()
    noise = scenario.noise_model()
    messages, freqs, counts = {}, {}, {}
    for text in scenario.messages:
        m = Message.parse(text)
        seed = message_seed(scenario.seed, m)
        res = run_protocol(build_protocol(m), attacks, noise, scenario.shots, seed)
        counts[str(m)] = res.counts
        freqs[str(m)] = res.counts.frequencies().as_dict()
        messages[str(m)] = {
            "seed": seed,
            "final_state": state_to_json(res.final_state),
            "ideal": res.ideal.as_dict(),
            "counts": res.counts.as_dict(),
            "frequencies": freqs[str(m)],
        }
        if res.noisy is not None:
            messages[str(m)]["noisy_expected"] = res.noisy.as_dict()
    rates = forensics.error_rates(counts)
    for m, r in rates.items():
        messages[m]["error_rates"] = {"alice": r.alice_error, "bob": r.bob_error}
    report = report_header("run", scenario.seed, scenario)
    report["classification"] = classify(attacks).to_dict()
    report["messages"] = messages
    report["frequency_table"] = freqs
    return report


def _emit(report: dict, out: Optional[str], stem: str, fmt: str, csv_tables: dict[str, str]) -> None:
    if out is None:
        sys.stdout.write(dumps_json(report))
        return
    out_dir = Path(out)
    if fmt in ("json", "both"):
        atomic_write(out_dir / f"{stem}.json", dumps_json(report))
    if fmt in ("csv", "both"):
        for name, text in csv_tables.items():
            atomic_write(out_dir / f"{name}.csv", text)
    if fmt == "csv" and not csv_tables:
        atomic_write(out_dir / f"{stem}.json", dumps_json(report))


def _parse_noise(text: Optional[str]) -> Optional[tuple[float, float]]:
    if text is None:
        return None
    path = Path(text)
    if "," not in text and path.exists():
        data = json.loads(path.read_text())
        return tuple(data["noise"])
    return NoiseModel.parse(text).flip_probs


def _parse_hypothesis(text: str) -> tuple[AttackSpec, ...]:
    if text.strip().lower() in ("", "clean", "none"):
        return ()
    return tuple(parse_attacks(text.split("+")))


def _load_observed(path: str) -> dict:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "frequency_table" in data:
        data = data["frequency_table"]
    if not isinstance(data, dict) or not data:
        raise ConfigError(f"{path}: expected {{message: {{bitstring: count}}}}")
    return data


def cmd_run(args) -> int:
    try:
        if args.scenario:
            scenario = Scenario.load(args.scenario)
            overrides = {}
            if args.message:
                overrides["messages"] = tuple(args.message)
            if args.attack:
                overrides["attacks"] = tuple(args.attack)
            for key in ("shots", "seed", "out", "format"):
                if getattr(args, key) is not None:
                    overrides[key] = getattr(args, key)
            if args.noise is not None:
                overrides["noise"] = _parse_noise(args.noise)
            scenario = Scenario.from_dict({**scenario.to_dict(), **overrides})
        else:
            scenario = Scenario(
                messages=tuple(args.message) if args.message else Scenario.messages,
                attacks=tuple(args.attack or ()),
                noise=_parse_noise(args.noise),
                shots=args.shots if args.shots is not None else 1000,
                seed=args.seed if args.seed is not None else 0,
                out=args.out,
                format=args.format or "both",
            )
    except (ConfigError, SimulationError, KeyError, ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc

    report = run_scenario(scenario)
    tables = {
        "frequencies": frequency_table_csv(report["frequency_table"]),
        "error_rates": error_rate_csv(
            {m: forensics.ErrorRates(v["error_rates"]["alice"], v["error_rates"]["bob"])
             for m, v in report["messages"].items()}
        ),
    }
    if scenario.out is not None:
        atomic_write(Path(scenario.out) / "scenario.json", scenario.dumps() + "\n")
    _emit(report, scenario.out, "report", scenario.format, tables)
    return EXIT_OK


def cmd_classify(args) -> int:
    try:
        attacks = parse_attacks(args.attack or ())
    except SimulationError as exc:
        raise ConfigError(str(exc)) from exc
    result = classify(attacks)
    report = report_header("classify")
    report["attacks"] = [str(a) for a in attacks]
    report["classification"] = result.to_dict()
    if result.kind == "bijection":
        p = quarantine_correction(result)
        report["quarantine_correction"] = np.real(p.matrix).astype(int).tolist()
    _emit(report, args.out, "classification", args.format or "json", {})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    try:
        names = [g for spec in (args.gates or ["I"]) for g in spec.split(",") if g.strip()]
        gate_set = [qcore.gate_by_name(g) for g in names]
        granularity = forensics.Granularity.parse(args.granularity)
    except SimulationError as exc:
        raise ConfigError(str(exc)) from exc
    classes = forensics.enumerate_equivalences(gate_set, granularity, workers=args.workers)
    report = report_header("enumerate")
    report["gate_set"] = [g.name for g in gate_set]
    report["granularity"] = granularity.value
    report["classes"] = [c.to_dict() for c in classes]
    _emit(report, args.out, "equivalences", args.format or "json", {})
    return EXIT_OK


def cmd_calibrate(args) -> int:
    try:
        table = None
        if args.table:
            table = json.loads(Path(args.table).read_text())
            diag = {m: float(row[m]) / sum(row.values()) for m, row in table.items()}
        else:
            diag = {}
            for item in args.diag or ():
                m, v = item.split("=")
                diag[str(Message.parse(m))] = float(v)
        if not diag:
            raise ConfigError("calibrate needs --diag MESSAGE=FREQ entries or --table FILE")
        cal = calibrate(diag, table)
    except (SimulationError, KeyError, ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    report = report_header("calibrate")
    report["noise"] = list(cal.model.flip_probs)
    report["target_diag"] = cal.target_diag
    report["predicted_diag"] = cal.predicted_diag
    report["residual"] = cal.residual
    _emit(report, args.out, "calibration", args.format or "json", {})
    return EXIT_OK


def cmd_match(args) -> int:
    try:
        observed = _load_observed(args.observed)
        hyps = [_parse_hypothesis(h) for h in (args.hypothesis or ["clean"])]
        noise = _parse_noise(args.noise)
        noise = NoiseModel(noise) if noise is not None else None
    except (SimulationError, KeyError, ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    matches = forensics.signature_match(observed, hyps, noise)
    report = report_header("match")
    report["noise"] = list(noise.flip_probs) if noise is not None else None
    report["ranking"] = [m.to_dict() for m in matches]
    _emit(report, args.out, "match", args.format or "json", {})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnetattack", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--out", help="directory for report files (default: JSON on stdout)")
        p.add_argument("--format", choices=("json", "csv", "both"))
        if seed:
            p.add_argument("--seed", type=int, help="64-bit RNG seed (default 0)")

    p = sub.add_parser("run", help="simulate messages under attacks and noise")
    p.add_argument("--scenario", help="scenario JSON file; flags override its fields")
    p.add_argument("--message", action="append", help="two-bit message (repeatable; default all four)")
    p.add_argument("--attack", action="append", help="node:position:gate:qubit (repeatable)")
    p.add_argument("--shots", type=int)
    p.add_argument("--noise", help="e0,e1 flip probabilities or a calibration JSON file")
    common(p, seed=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("classify", help="classify a hacked protocol")
    p.add_argument("--attack", action="append")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("enumerate", help="group single-gate attacks into equivalence classes")
    p.add_argument("--gates", action="append", help="comma-separated gate names (repeatable)")
    p.add_argument("--granularity", default="vector", help="vector or distribution")
    p.add_argument("--workers", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("calibrate", help="fit readout flip probabilities")
    p.add_argument("--diag", action="append", help="MESSAGE=FREQ (repeatable)")
    p.add_argument("--table", help="JSON {intended: {observed: freq}} clean-protocol table")
    common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("match", help="rank attack hypotheses against observed frequencies")
    p.add_argument("--observed", required=True, help="JSON {message: {bitstring: count}} or a run report")
    p.add_argument("--hypothesis", action="append", help="attacks joined by '+', or 'clean' (repeatable)")
    p.add_argument("--noise", help="e0,e1 flip probabilities or a calibration JSON file")
    common(p)
    p.set_defaults(func=cmd_match)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qnetattack: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"qnetattack: simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
