import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from crossqam.constellation import build_dicyclic, build_square_qam
from crossqam.exceptions import InvalidParameterError
from crossqam.ofdm import (
    WaveformConfig,
    ccdf,
    dfts_ofdm_symbol,
    papr_at_probability,
    papr_db,
    random_symbols,
    simulate_papr,
)


def direct_dfts(syms, cfg):
    """Explicit DFT and inverse-DFT sums, no FFT."""
    M, L = cfg.m_used, cfg.fft_size
    k = np.arange(M)
    spread = np.exp(-2j * np.pi * np.outer(k, k) / M) @ syms / np.sqrt(M)
    bins = cfg.mapping_start + k
    n = np.arange(L)
    x = np.exp(2j * np.pi * np.outer(n, bins) / L) @ spread / np.sqrt(L)
    return x * np.sqrt(M / cfg.n_total)


class TestSymbol:
    @pytest.mark.parametrize("cfg", [WaveformConfig(12, 64, 1), WaveformConfig(12, 64, 4), WaveformConfig(6, 32, 2, 5)])
    def test_matches_direct_sums(self, cfg, rng):
        syms = rng.normal(size=cfg.m_used) + 1j * rng.normal(size=cfg.m_used)
        np.testing.assert_allclose(dfts_ofdm_symbol(syms, cfg), direct_dfts(syms, cfg), atol=1e-12)

    def test_single_carrier_passthrough(self, rng):
        cfg = WaveformConfig(256, 256, 1)
        syms = rng.normal(size=256) + 1j * rng.normal(size=256)
        np.testing.assert_allclose(dfts_ofdm_symbol(syms, cfg), syms, atol=1e-12)

    def test_constant_input(self):
        cfg = WaveformConfig(64, 64, 1)
        assert papr_db(dfts_ofdm_symbol(np.full(64, 1 + 1j), cfg)) == pytest.approx(0.0, abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 16), st.integers(0, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_parseval(self, m_used, extra, oversample, seed):
        rng = np.random.default_rng(seed)
        cfg = WaveformConfig(m_used, m_used + 4 * extra, oversample)
        syms = rng.normal(size=m_used) + 1j * rng.normal(size=m_used)
        x = dfts_ofdm_symbol(syms, cfg)
        assert len(x) == cfg.fft_size
        expected = m_used / cfg.n_total * np.sum(np.abs(syms) ** 2)
        assert np.sum(np.abs(x) ** 2) == pytest.approx(expected, rel=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(InvalidParameterError):
            dfts_ofdm_symbol(np.ones(5), WaveformConfig(6, 32))

    def test_bad_config(self):
        with pytest.raises(InvalidParameterError):
            WaveformConfig(40, 32)
        with pytest.raises(InvalidParameterError):
            WaveformConfig(4, 32, 0)


class TestPapr:
    def test_constant_modulus(self):
        assert papr_db(np.exp(1j * np.linspace(0, 6, 50))) == pytest.approx(0.0, abs=1e-12)

    def test_single_spike(self):
        x = np.zeros(64)
        x[5] = 3.0
        assert papr_db(x) == pytest.approx(10 * np.log10(64))

    def test_all_zero(self):
        with pytest.raises(InvalidParameterError):
            papr_db(np.zeros(8))

    def test_dicyclic_single_carrier(self):
        cfg = WaveformConfig(2048, 2048, 1)
        paprs = simulate_papr(build_dicyclic(128), cfg, 20, np.random.default_rng(0))
        np.testing.assert_allclose(paprs, 10 * np.log10(2), atol=1e-9)

    def test_oversampling_never_lowers_papr(self, gray12, rng):
        syms = random_symbols(gray12, 12 * 50, rng).reshape(50, 12)
        p1 = papr_db(dfts_ofdm_symbol(syms, WaveformConfig(12, 64, 1)))
        p4 = papr_db(dfts_ofdm_symbol(syms, WaveformConfig(12, 64, 4)))
        assert (p4 >= p1 - 1e-12).all()

    def test_single_carrier_equals_symbol_papr(self, gray12, rng):
        cfg = WaveformConfig(256, 256, 1)
        syms = random_symbols(gray12, 256 * 20, rng).reshape(20, 256)
        np.testing.assert_allclose(papr_db(dfts_ofdm_symbol(syms, cfg)), papr_db(syms), atol=1e-9)


class TestCcdf:
    def test_constant_samples(self):
        curve = ccdf(np.full(10, 3.0), [2.9, 3.0, 3.1])
        assert curve.prob.tolist() == [1.0, 0.0, 0.0]

    def test_monotone(self, rng):
        curve = ccdf(rng.normal(size=1000), np.linspace(-4, 4, 81))
        assert (np.diff(curve.prob) <= 0).all() and curve.prob[0] <= 1

    def test_dkw_against_exponential(self):
        n = 100_000
        samples = np.random.default_rng(11).exponential(size=n)
        grid = np.linspace(0, 8, 401)
        curve = ccdf(samples, grid)
        eps = np.sqrt(np.log(2 / 0.01) / (2 * n))
        assert np.max(np.abs(curve.prob - stats.expon.sf(grid))) <= eps

    def test_quantile(self):
        s = np.arange(1000.0)
        t = papr_at_probability(s, 1e-2)
        assert np.mean(s > t) <= 1e-2
        assert np.mean(s >= t) > 1e-2

    def test_csv(self, tmp_path):
        path = tmp_path / "c.csv"
        ccdf([1.0, 2.0], [0.0, 1.5]).to_csv(path)
        assert path.read_text().splitlines()[0] == "threshold_db,probability"

    def test_deterministic(self, gray12):
        cfg = WaveformConfig(12, 256, 2)
        a = simulate_papr(gray12, cfg, 200, np.random.default_rng(5))
        b = simulate_papr(gray12, cfg, 200, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)


class TestSources:
    def test_unit_energy(self, gray12, class1_trim, rng):
        for src in (gray12, class1_trim, build_square_qam(16)):
            s = random_symbols(src, 200_000, rng)
            assert np.mean(np.abs(s) ** 2) == pytest.approx(1.0, rel=0.02)

    def test_odd_count_for_4d(self, gray12, rng):
        with pytest.raises(InvalidParameterError):
            random_symbols(gray12, 3, rng)
