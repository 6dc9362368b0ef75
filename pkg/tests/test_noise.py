import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnetattack.noise import NoiseModel, apply_noise, calibrate
from qnetattack.qcore import Distribution, SimulationError, make_rng, sample_outcomes

from reference_data import CLEAN_IBMQX2


def brute_force_channel(p, eps):
    """Sum over every flip pattern explicitly."""
    n = len(eps)
    out = np.zeros_like(p)
    for b, pb in enumerate(p):
        for flips in itertools.product((0, 1), repeat=n):
            w = 1.0
            mask = 0
            for q, f in enumerate(flips):
                w *= eps[q] if f else 1 - eps[q]
                mask |= f << q
            out[b ^ mask] += pb * w
    return out


probs = st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3)
eps_st = st.floats(0, 0.499)


class TestApplyNoise:
    def test_identity_channel(self):
        d = Distribution([1, 0, 0, 0])
        np.testing.assert_array_equal(apply_noise(d, NoiseModel((0, 0))).probs, d.probs)

    def test_worked_example(self):
        out = apply_noise(Distribution([1, 0, 0, 0]), NoiseModel((0.05, 0.03))).as_dict()
        assert out == pytest.approx({"00": 0.9215, "01": 0.0485, "10": 0.0285, "11": 0.0015}, abs=1e-12)

    def test_uniform_is_fixed_point(self):
        out = apply_noise(Distribution(np.full(4, 0.25)), NoiseModel((0.2, 0.37)))
        np.testing.assert_allclose(out.probs, 0.25, atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(p=probs, e0=eps_st, e1=eps_st)
    def test_matches_brute_force(self, p, e0, e1):
        p = np.array(p) / sum(p)
        out = apply_noise(Distribution(p), NoiseModel((e0, e1)))
        np.testing.assert_allclose(out.probs, brute_force_channel(p, (e0, e1)), atol=1e-12)
        assert abs(out.probs.sum() - 1) <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(b=st.integers(0, 3), e0=eps_st, e1=eps_st, d0=st.floats(0, 0.2), d1=st.floats(0, 0.2))
    def test_monotone_in_flip_probability(self, b, e0, e1, d0, d1):
        ideal = np.zeros(4)
        ideal[b] = 1
        lo = apply_noise(Distribution(ideal), NoiseModel((e0, e1))).probs[b]
        hi_model = NoiseModel((min(e0 + d0, 0.499), min(e1 + d1, 0.499)))
        hi = apply_noise(Distribution(ideal), hi_model).probs[b]
        assert hi <= lo + 1e-12

    def test_three_qubits(self):
        p = np.random.default_rng(1).dirichlet(np.ones(8))
        eps = (0.1, 0.2, 0.3)
        np.testing.assert_allclose(apply_noise(Distribution(p), NoiseModel(eps)).probs, brute_force_channel(p, eps), atol=1e-12)

    def test_qubit_count_mismatch(self):
        with pytest.raises(SimulationError):
            apply_noise(Distribution([1, 0]), NoiseModel((0.1, 0.1)))


class TestNoiseModel:
    @pytest.mark.parametrize("bad", [(-0.1, 0), (0.5, 0), (0, 1.0)])
    def test_range(self, bad):
        with pytest.raises(SimulationError):
            NoiseModel(bad)

    def test_parse(self):
        assert NoiseModel.parse("0.05, 0.03").flip_probs == (0.05, 0.03)
        with pytest.raises(SimulationError):
            NoiseModel.parse("a,b")

    def test_sampled_flips_match_channel(self):
        model = NoiseModel((0.1, 0.3))
        rng = make_rng(11)
        ideal = Distribution([0, 0, 1, 0])
        shots = 200_000
        out = model.flip_outcomes(sample_outcomes(ideal, shots, rng), rng)
        freq = np.bincount(out, minlength=4) / shots
        expected = apply_noise(ideal, model).probs
        sigma = np.sqrt(expected * (1 - expected) / shots)
        assert np.all(np.abs(freq - expected) <= 4 * sigma + 1e-12)


class TestCalibrate:
    def test_perfect(self):
        cal = calibrate({m: 1.0 for m in ("00", "01", "10", "11")})
        assert cal.model.flip_probs == (0.0, 0.0)
        assert cal.residual == 0

    @pytest.mark.parametrize("d", [0.6, 0.81, 0.95])
    def test_symmetric_closed_form(self, d):
        cal = calibrate({m: d for m in ("00", "01", "10", "11")})
        e = 1 - np.sqrt(d)
        assert cal.model.flip_probs == pytest.approx((e, e), abs=1e-12)
        assert cal.residual == pytest.approx(0, abs=1e-12)

    def test_observed_diagonal(self):
        diag = {m: CLEAN_IBMQX2[m][m] / 100 for m in CLEAN_IBMQX2}
        cal = calibrate(diag)
        for m, target in diag.items():
            assert abs(cal.predicted_diag[m] - target) <= 0.05

    def test_full_table_fit(self):
        diag = {m: CLEAN_IBMQX2[m][m] / 100 for m in CLEAN_IBMQX2}
        cal = calibrate(diag, CLEAN_IBMQX2)
        e0, e1 = cal.model.flip_probs
        assert 0.03 < e0 < 0.1 and 0.03 < e1 < 0.1
        for m, target in diag.items():
            assert abs(cal.predicted_diag[m] - target) <= 0.05

    def test_full_table_recovers_known_model(self):
        truth = NoiseModel((0.04, 0.09))
        table = {}
        for b, m in enumerate(("00", "01", "10", "11")):
            ideal = np.zeros(4)
            ideal[b] = 1
            table[m] = apply_noise(Distribution(ideal), truth).as_dict()
        cal = calibrate({m: table[m][m] for m in table}, table)
        assert cal.model.flip_probs == pytest.approx((0.04, 0.09), abs=1e-6)

    @pytest.mark.parametrize("bad", [0.5, 0.3, 1.2])
    def test_infeasible(self, bad):
        with pytest.raises(SimulationError):
            calibrate({"00": bad})
