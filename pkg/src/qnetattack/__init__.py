"""Simulate and analyse gate-insertion malware on automated superdense coding."""

__version__ = "0.1.0"

from .qcore import (  # noqa: E402
    GATES,
    Counts,
    Distribution,
    Gate,
    SimulationError,
    StateVector,
    apply_gate,
    equal_up_to_global_phase,
    gate_by_name,
    measure_probs,
    sample,
)
from .protocol import (  # noqa: E402
    ALL_MESSAGES,
    Message,
    Node,
    ProtocolCircuit,
    build_protocol,
    run_protocol,
    source_state,
)
from .attack import (  # noqa: E402
    AttackSpec,
    Bijection,
    Clean,
    Position,
    Scrambling,
    classify,
    inject,
    quarantine_correction,
)
from .noise import NoiseModel, apply_noise, calibrate  # noqa: E402
from .forensics import (  # noqa: E402
    Granularity,
    enumerate_equivalences,
    error_rates,
    signature_match,
    tv_distance,
)
