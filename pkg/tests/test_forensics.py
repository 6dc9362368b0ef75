import numpy as np
import pytest

from qnetattack import forensics
from qnetattack.attack import AttackSpec, hacked_final_states
from qnetattack.forensics import (
    Granularity,
    attack_grid,
    canonical_phase,
    enumerate_equivalences,
    error_rates,
    signature_match,
    tv_distance,
)
from qnetattack.noise import NoiseModel
from qnetattack.protocol import ALL_MESSAGES, build_protocol, run_protocol
from qnetattack.qcore import GATES, SINGLE_QUBIT_GATES, CNOT, Counts, Distribution, SimulationError, StateVector, measure_probs

import reference_data as ref

A = AttackSpec.parse
S_FAMILY = ["alice:begin:S:0", "source:end:S:1", "bob:begin:S:1"]


def class_of(classes, attack):
    hits = [c for c in classes if (A(attack),) in c.members]
    assert len(hits) == 1
    return hits[0]


class TestErrorRates:
    @pytest.mark.parametrize("freqs,rates", [
        (ref.S_BEGIN_ALICE_IBMQX2, ref.S_BEGIN_ALICE_ERROR_RATES),
        (ref.S_END_SOURCE_Q1_IBMQX2, ref.S_END_SOURCE_Q1_ERROR_RATES),
    ])
    def test_reproduces_published_tables(self, freqs, rates):
        report = error_rates(freqs)
        for m, (alice, bob) in rates.items():
            assert 100 * report[m].alice_error == pytest.approx(alice, abs=0.1)
            assert 100 * report[m].bob_error == pytest.approx(bob, abs=0.1)

    def test_perfect_counts(self):
        report = error_rates({m: Counts.from_mapping({m: 1000}) for m in ("00", "01", "10", "11")})
        assert all(r.alice_error == 0 and r.bob_error == 0 for r in report.values())

    def test_accepts_distributions(self):
        r = error_rates({"11": Distribution.from_mapping({"00": 0.25, "01": 0.25, "10": 0.25, "11": 0.25})})
        assert r["11"].alice_error == pytest.approx(0.5)

    def test_empty(self):
        with pytest.raises(SimulationError):
            error_rates({})


class TestTVDistance:
    def test_identical(self):
        d = Distribution([0.1, 0.2, 0.3, 0.4])
        assert tv_distance(d, d) == 0

    def test_disjoint(self):
        assert tv_distance({"00": 1}, {"10": 1}) == 1

    def test_mismatched_space(self):
        with pytest.raises(SimulationError):
            tv_distance(Distribution([1, 0]), Distribution([1, 0, 0, 0]))

    def test_s_and_h_attacks_share_distributions(self):
        s = hacked_final_states([A("alice:begin:S:0")])
        h = hacked_final_states([A("bob:end:H:0")])
        for m in ALL_MESSAGES:
            assert tv_distance(measure_probs(s[m]), measure_probs(h[m])) == pytest.approx(0, abs=1e-12)


class TestCanonicalPhase:
    def test_largest_amplitude_made_real(self):
        v = StateVector(np.array([0.6j, 0.8j]))
        np.testing.assert_allclose(canonical_phase(v), [0.6, 0.8], atol=1e-15)

    def test_tie_uses_lowest_index(self):
        v = StateVector(np.array([1j, -1]) / np.sqrt(2))
        np.testing.assert_allclose(canonical_phase(v), np.array([1, 1j]) / np.sqrt(2), atol=1e-15)


class TestEnumerate:
    def test_x_classes(self):
        classes = enumerate_equivalences([GATES["X"]], "vector")
        a = class_of(classes, "alice:begin:X:0")
        for member in ("source:end:X:0", "source:end:X:1"):
            assert (A(member),) in a.members
        b = class_of(classes, "alice:end:X:0")
        assert (A("bob:begin:X:0"),) in b.members
        # begin/end X differ by per-message phases only, so both land together
        assert a is b

    def test_s_family(self):
        classes = enumerate_equivalences([GATES["S"]], Granularity.VECTOR)
        c = class_of(classes, S_FAMILY[0])
        for member in S_FAMILY:
            assert (A(member),) in c.members

    def test_identity_is_single_clean_class(self):
        classes = enumerate_equivalences([GATES["I"]], "distribution")
        assert len(classes) == 1
        assert len(classes[0].members) == 12
        assert classes[0].key == np.eye(4).tolist()

    def test_h_joins_s_family_only_by_distribution(self):
        gates = [GATES["S"], GATES["H"]]
        vec = enumerate_equivalences(gates, "vector")
        dist = enumerate_equivalences(gates, "distribution")
        assert (A("bob:end:H:0"),) not in class_of(vec, S_FAMILY[0]).members
        assert (A("bob:end:H:0"),) in class_of(dist, S_FAMILY[0]).members

    def test_distribution_classes_coarsen_vector_classes(self):
        vec = enumerate_equivalences(SINGLE_QUBIT_GATES, "vector")
        dist = enumerate_equivalences(SINGLE_QUBIT_GATES, "distribution")
        for vc in vec:
            owners = [dc for dc in dist if set(vc.members) <= set(dc.members)]
            assert len(owners) == 1
        assert sum(len(c.members) for c in vec) == len(attack_grid(SINGLE_QUBIT_GATES))

    def test_members_match_within_tolerance(self):
        for gran in Granularity:
            for c in enumerate_equivalences(SINGLE_QUBIT_GATES, gran):
                fps = [forensics.fingerprint(hacked_final_states(m), gran) for m in c.members]
                for f in fps[1:]:
                    assert np.max(np.abs(f - fps[0])) <= 1e-8

    def test_deterministic_and_parallel_safe(self):
        serial = enumerate_equivalences(SINGLE_QUBIT_GATES, "vector")
        again = enumerate_equivalences(SINGLE_QUBIT_GATES, "vector")
        parallel = enumerate_equivalences(SINGLE_QUBIT_GATES, "vector", workers=8)
        dump = lambda cs: [c.to_dict() for c in cs]  # noqa: E731
        assert dump(serial) == dump(again) == dump(parallel)

    def test_rejects_two_qubit_gates(self):
        with pytest.raises(SimulationError):
            enumerate_equivalences([CNOT])


class TestSignatureMatch:
    def test_clean_ranked_first(self):
        observed = {str(m): run_protocol(build_protocol(m), shots=1000, seed=1).counts for m in ALL_MESSAGES}
        ranking = signature_match(observed, [[A("alice:end:X:0")], [], [A("alice:begin:S:0")]])
        assert ranking[0].hypothesis == ()
        assert ranking[0].distance == pytest.approx(0, abs=1e-12)
        assert ranking[0].rank == 1
        assert [m.rank for m in ranking] == [1, 2, 3]

    def test_s_family_tie_on_published_frequencies(self):
        hyps = [[A(h)] for h in reversed(S_FAMILY)]
        ranking = signature_match(ref.S_BEGIN_ALICE_IBMQX2, hyps)
        assert [m.rank for m in ranking] == [1, 1, 1]
        assert len({round(m.distance, 12) for m in ranking}) == 1
        # ties are ordered by the hypothesis text
        assert [m.label for m in ranking] == sorted(S_FAMILY)

    def test_tie_with_noise_model(self):
        ranking = signature_match(
            ref.S_END_SOURCE_Q1_IBMQX2, [[A(h)] for h in S_FAMILY] + [[A("alice:end:X:0")]], NoiseModel((0.06, 0.06))
        )
        assert [m.rank for m in ranking] == [1, 1, 1, 4]

    def test_sqrt_x_plus_s_two_node_attack(self):
        hyp = [A("source:end:SX:1"), A("alice:end:S:0")]
        for table in (ref.SX_S_QASM, ref.SX_S_IBMQX2):
            (best,) = signature_match(table, [hyp])
            assert best.distance <= 0.05

    def test_string_hypotheses(self):
        ranking = signature_match({"00": {"10": 1}}, [["alice:end:X:0"]])
        assert ranking[0].distance == pytest.approx(0)

    def test_empty_observed(self):
        with pytest.raises(SimulationError):
            signature_match({}, [[]])
