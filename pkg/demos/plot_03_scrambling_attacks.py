"""
Scrambling attacks
==================

Phase-type gates such as S leave Bob with a superposition: one of the two
bits becomes a coin toss.  A sqrt(X) on the source followed by S at Alice
spreads message 00 uniformly over all four outcomes.
"""

from qnetattack import AttackSpec, build_protocol, classify, error_rates, run_protocol
from qnetattack.protocol import ALL_MESSAGES

s_attack = [AttackSpec.parse("alice:begin:S:0")]
print("S at the start of Alice:", classify(s_attack).kind)
counts = {str(m): run_protocol(build_protocol(m), s_attack, shots=1000, seed=3).counts for m in ALL_MESSAGES}
for m, r in error_rates(counts).items():
    print(f"   {m}: alice error {r.alice_error:.1%}, bob error {r.bob_error:.1%}")

###############################################################################
# Two-node attack.

two = [AttackSpec.parse("source:end:SX:1"), AttackSpec.parse("alice:end:S:0")]
res = run_protocol(build_protocol("00"), two, shots=1000, seed=3)
print("sqrt(X)+S on 00 ideal:", res.ideal.as_dict())
print("sqrt(X)+S on 00 sampled:", res.counts.frequencies().as_dict())
