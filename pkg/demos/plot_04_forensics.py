"""
Forensics: which attack was it?
===============================

Different attacks can produce identical output.  Enumerating all single
gate insertions shows which ones collapse into the same class, and
signature matching ranks hypotheses against observed frequencies --
reporting ties when the data cannot tell them apart.
"""

from qnetattack import GATES, NoiseModel, enumerate_equivalences, signature_match
from qnetattack.attack import AttackSpec
from qnetattack.protocol import ALL_MESSAGES, build_protocol, run_protocol

gates = [GATES["X"], GATES["S"], GATES["H"]]
for gran in ("vector", "distribution"):
    classes = enumerate_equivalences(gates, gran)
    print(f"{gran}: {len(classes)} classes")
    for c in classes:
        if len(c.members) > 1:
            print("   ", ", ".join(c.member_strings()))

###############################################################################
# Simulate a noisy S attack on the source and rank a few suspects.

noise = NoiseModel.from_pair(0.06, 0.06)
culprit = [AttackSpec.parse("source:end:S:1")]
observed = {
    str(m): run_protocol(build_protocol(m), culprit, noise, shots=1000, seed=i).counts
    for i, m in enumerate(ALL_MESSAGES)
}
suspects = [["alice:begin:S:0"], ["source:end:S:1"], ["bob:begin:S:1"], ["alice:end:X:0"], []]
for match in signature_match(observed, suspects, noise):
    print(f"rank {match.rank}: {match.label:<18} distance {match.distance:.4f}")
