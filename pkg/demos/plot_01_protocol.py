"""
Superdense coding, end to end
=============================

Alice and Bob share a Bell pair.  Alice encodes two classical bits by
applying X and/or Z to her half, then sends it to Bob, who disentangles
with CNOT + H and reads both bits.

This script walks through the clean protocol, shows the intermediate
states and samples it with and without readout noise.
"""

from qnetattack import ALL_MESSAGES, NoiseModel, build_protocol, run_protocol, source_state

###############################################################################
# The source prepares (|00> + |11>)/sqrt(2).

print("source state:", {k: round(abs(v) ** 2, 3) for k, v in source_state().as_dict().items()})

###############################################################################
# Each message is delivered with certainty.

for m in ALL_MESSAGES:
    res = run_protocol(build_protocol(m), shots=1000, seed=1)
    print(f"sent {m} -> counts {res.counts.as_dict()}")

###############################################################################
# A symmetric 5% readout flip on each qubit smears the diagonal.

noise = NoiseModel.from_pair(0.05, 0.05)
for i, m in enumerate(ALL_MESSAGES):
    res = run_protocol(build_protocol(m), noise=noise, shots=1000, seed=10 + i)
    print(f"sent {m} (noisy) -> {res.counts.frequencies().as_dict()}")
