"""
Bijection attacks and quarantine
================================

A single X or Z slipped into Alice's node does not destroy information:
it relabels messages.  Bob can detect the permutation and undo it by
appending a fixed correction.
"""

from qnetattack.attack import AttackSpec, classify, inject, quarantine_correction, with_correction
from qnetattack.protocol import ALL_MESSAGES, build_protocol
from qnetattack.qcore import measure_probs

for text in ("alice:end:X:0", "alice:end:Z:0", "source:end:X:1"):
    attack = AttackSpec.parse(text)
    result = classify([attack])
    print(f"{text}: {result.kind}, f = {result.f}")

    ###########################################################################
    # Apply the quarantine permutation after Bob's decoder.
    fix = quarantine_correction(result)
    for m in ALL_MESSAGES:
        circuit = with_correction(inject(build_protocol(m), [attack]), fix)
        print(f"   {m} -> P({m}) = {measure_probs(circuit.final_state())[str(m)]:.3f}")
