import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossqam.detection import SnrSpec, add_awgn, detect_ml, detect_ml_labels, llr, snr_to_n0
from crossqam.exceptions import InvalidParameterError
from crossqam.graymap import bits_from_int


def direct_llr(r, table, n0, k):
    """Unstabilized probability sums; fine at moderate SNR."""
    w = np.exp(-((r[:, None, :] - table[None]) ** 2).sum(-1) / n0)
    bits = bits_from_int(np.arange(len(table)), k).astype(bool)
    return np.stack(
        [np.log(w[:, ~bits[:, i]].sum(1) / w[:, bits[:, i]].sum(1)) for i in range(k)], axis=1
    )


class TestSnr:
    def test_examples(self):
        assert snr_to_n0(SnrSpec(0.0, 7)) == pytest.approx(2 / 7)
        assert snr_to_n0(SnrSpec(0.0, 11)) == pytest.approx(2 / 11)
        assert snr_to_n0(SnrSpec(10.0, 7)) == pytest.approx(2 / 70)

    def test_es2d_scales(self):
        assert SnrSpec(3.0, 7, es2d=2.0).n0 == pytest.approx(2 * SnrSpec(3.0, 7).n0)


class TestAwgn:
    def test_zero_noise(self, rng):
        v = np.arange(8.0).reshape(2, 4)
        np.testing.assert_array_equal(add_awgn(v, 0.0, rng), v)

    def test_variance(self):
        n0 = 0.3
        noise = add_awgn(np.zeros((250_000, 4)), n0, np.random.default_rng(1))
        assert noise.var(axis=0) == pytest.approx(np.full(4, n0 / 2), rel=0.01)

    def test_seeded(self):
        a = add_awgn(np.zeros((10, 4)), 1.0, np.random.default_rng(7))
        b = add_awgn(np.zeros((10, 4)), 1.0, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_negative_n0(self, rng):
        with pytest.raises(InvalidParameterError):
            add_awgn(np.zeros(4), -1.0, rng)


class TestDetectMl:
    def test_exact_point(self, gray12):
        table = gray12.normalized()
        assert detect_ml(table[77], gray12).tolist() == bits_from_int(77, 7).tolist()

    def test_noiseless_loopback(self, gray48):
        labels = detect_ml_labels(gray48.normalized(), gray48.normalized())
        np.testing.assert_array_equal(labels, np.arange(2048))

    def test_midpoint_tie_lexicographic(self, gray12):
        s = gray12.scale
        a = np.array([1, 3, 1, 3]) * s
        b = np.array([1, 1, 1, 3]) * s
        bits = detect_ml((a + b) / 2, gray12)
        # (1, 1, 1, 3) < (1, 3, 1, 3) lexicographically
        assert gray12.inverse((1, 1, 1, 3)).tolist() == bits.tolist()

    def test_fast_path_agrees(self, gray12, rng):
        table = gray12.normalized()
        r = add_awgn(table[rng.integers(128, size=5000)], 0.2, rng)
        np.testing.assert_array_equal(
            detect_ml_labels(r, table), detect_ml_labels(r, table, exact_ties=False)
        )

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1e-3, 10.0), st.integers(0, 2**32 - 1))
    def test_ml_is_argmax_likelihood(self, n0, seed):
        from crossqam.graymap import gray_labeling

        lab = gray_labeling(1)
        table = lab.normalized()
        rng = np.random.default_rng(seed)
        r = add_awgn(table[rng.integers(128, size=50)], 0.5, rng)
        like = -((r[:, None, :] - table[None]) ** 2).sum(-1) / n0
        np.testing.assert_array_equal(detect_ml_labels(r, table), like.argmax(1))


class TestLlr:
    def test_against_direct_sum(self, gray12, rng):
        n0 = snr_to_n0(SnrSpec(4.0, 7))
        table = gray12.normalized()
        r = add_awgn(table[rng.integers(128, size=500)], n0, rng)
        np.testing.assert_allclose(llr(r, gray12, n0), direct_llr(r, table, n0, 7), rtol=1e-9, atol=1e-9)

    def test_sign_matches_ml_at_high_snr(self, gray12, rng):
        table = gray12.normalized()
        r = add_awgn(table[rng.integers(128, size=2000)], 0.02, rng)
        hard = detect_ml(r, gray12)
        for mode in ("exact", "maxlog"):
            soft = llr(r, gray12, 1e-4, mode=mode)
            np.testing.assert_array_equal((soft < 0).astype(np.uint8), hard)

    def test_maxlog_midpoint_zero(self, gray12):
        # (1,3,1,3) and (1,3,1,-3) differ only in b_0; (1,3,1,0) is equidistant
        r = np.array([1, 3, 1, 0]) * gray12.scale
        assert llr(r, gray12, 0.1, mode="maxlog")[0] == pytest.approx(0.0, abs=1e-12)

    def test_no_underflow_at_30db(self, gray12, rng):
        n0 = snr_to_n0(SnrSpec(30.0, 7))
        r = add_awgn(gray12.normalized()[rng.integers(128, size=200)], n0, rng)
        assert np.isfinite(llr(r, gray12, n0)).all()

    def test_exact_vs_maxlog(self, gray12):
        rng = np.random.default_rng(3)
        n0 = snr_to_n0(SnrSpec(10.0, 7))
        r = add_awgn(gray12.normalized()[rng.integers(128, size=10_000)], n0, rng)
        diff = np.abs(llr(r, gray12, n0) - llr(r, gray12, n0, mode="maxlog"))
        assert diff.mean() <= 0.3
        # each side sums 64 terms, so the gap can never exceed log(64)
        assert diff.max() <= np.log(64)

    def test_sign_bit_symmetry(self, gray12, rng):
        n0 = 0.1
        r = add_awgn(gray12.normalized()[rng.integers(128, size=300)], n0, rng)
        base = llr(r, gray12, n0)
        # b_0 negates y2, b_3 negates x1
        for bit, coord in ((0, 3), (1, 2), (2, 1), (3, 0)):
            mirrored = r.copy()
            mirrored[:, coord] *= -1
            out = llr(mirrored, gray12, n0)
            np.testing.assert_allclose(out[:, bit], -base[:, bit], atol=1e-9)
            others = [i for i in range(7) if i != bit]
            np.testing.assert_allclose(out[:, others], base[:, others], atol=1e-9)

    def test_bad_args(self, gray12):
        with pytest.raises(InvalidParameterError):
            llr(np.zeros(4), gray12, 0.0)
        with pytest.raises(InvalidParameterError):
            llr(np.zeros(4), gray12, 1.0, mode="minsum")
