"""DFT-spread OFDM synthesis and PAPR statistics."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft

from .constellation import Constellation2D, Constellation4D
from .exceptions import InvalidParameterError
from .graymap import Labeling4D

__all__ = [
    "WaveformConfig",
    "CcdfCurve",
    "dfts_ofdm_symbol",
    "papr_db",
    "ccdf",
    "papr_at_probability",
    "random_symbols",
    "simulate_papr",
]


@dataclass(frozen=True)
class WaveformConfig:
    """Localized DFT-s-OFDM: ``m_used`` contiguous bins of ``n_total * oversample``."""

    m_used: int
    n_total: int = 2048
    oversample: int = 4
    mapping_start: int = 0

    def __post_init__(self):
        if not 1 <= self.m_used <= self.n_total:
            raise InvalidParameterError("need 1 <= m_used <= n_total")
        if self.oversample < 1:
            raise InvalidParameterError("oversample must be >= 1")
        if not 0 <= self.mapping_start <= self.fft_size - self.m_used:
            raise InvalidParameterError("used bins run past the end of the spectrum")

    @property
    def fft_size(self) -> int:
        return self.n_total * self.oversample


@dataclass(frozen=True, eq=False)
class CcdfCurve:
    thresholds_db: np.ndarray
    prob: np.ndarray

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold_db", "probability"])
            for t, p in zip(self.thresholds_db.tolist(), self.prob.tolist()):
                writer.writerow([f"{t:.6f}", repr(p)])


def dfts_ofdm_symbol(syms, cfg: WaveformConfig) -> np.ndarray:
    """Time samples of one (or a batch of) DFT-s-OFDM symbols.

    ``syms`` has trailing length ``cfg.m_used``. Scaling is chosen so that
    ``sum|x|**2 == (m_used / n_total) * sum|syms|**2``; with every bin used
    and no oversampling the output equals the input.
    """
    syms = np.asarray(syms, dtype=complex)
    if syms.shape[-1] != cfg.m_used:
        raise InvalidParameterError(f"expected {cfg.m_used} symbols, got {syms.shape[-1]}")
    spread = scipy.fft.fft(syms, axis=-1, norm="ortho")
    spectrum = np.zeros(syms.shape[:-1] + (cfg.fft_size,), dtype=complex)
    spectrum[..., cfg.mapping_start : cfg.mapping_start + cfg.m_used] = spread
    x = scipy.fft.ifft(spectrum, axis=-1, norm="ortho")
    return x * np.sqrt(cfg.m_used / cfg.n_total)


def papr_db(samples) -> np.ndarray | float:
    """``10 log10(max|x|^2 / mean|x|^2)`` along the last axis."""
    p = np.abs(np.asarray(samples)) ** 2
    if p.size == 0:
        raise InvalidParameterError("empty sample block")
    mean = p.mean(axis=-1)
    if np.any(mean == 0):
        raise InvalidParameterError("all-zero sample block has no PAPR")
    out = 10 * np.log10(p.max(axis=-1) / mean)
    return float(out) if np.ndim(out) == 0 else out


def ccdf(papr_samples, grid_db) -> CcdfCurve:
    """Fraction of PAPR samples strictly above each threshold."""
    s = np.sort(np.asarray(papr_samples, dtype=float).ravel())
    if s.size == 0:
        raise InvalidParameterError("need at least one PAPR sample")
    grid = np.sort(np.asarray(grid_db, dtype=float))
    above = s.size - np.searchsorted(s, grid, side="right")
    return CcdfCurve(grid, above / s.size)


def papr_at_probability(papr_samples, prob: float) -> float:
    """Smallest threshold whose empirical CCDF is at most ``prob``."""
    s = np.sort(np.asarray(papr_samples, dtype=float).ravel())
    # at most floor(prob * n) samples may lie strictly above the threshold
    idx = s.size - 1 - int(np.floor(prob * s.size))
    return float(s[max(idx, 0)])


def random_symbols(source, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` unit-energy complex symbols drawn through ``source``.

    4D sources (labelings, 4D constellations) emit two symbols per uniformly
    drawn vector, so ``count`` must be even for them.
    """
    if isinstance(source, Labeling4D):
        table = source.normalized()
    elif isinstance(source, Constellation4D):
        table = source.normalized()
    elif isinstance(source, Constellation2D):
        pts = source.points.astype(float)
        pts = pts / np.sqrt(np.mean(np.sum(pts**2, axis=1)))
        idx = rng.integers(len(pts), size=count)
        return pts[idx, 0] + 1j * pts[idx, 1]
    else:
        raise InvalidParameterError(f"unsupported symbol source {type(source).__name__}")
    if count % 2:
        raise InvalidParameterError("4D sources need an even symbol count")
    idx = rng.integers(len(table), size=count // 2)
    v = table[idx]
    return (v[:, 0::2] + 1j * v[:, 1::2]).ravel()


def simulate_papr(
    source,
    cfg: WaveformConfig,
    n_symbols: int,
    rng: np.random.Generator,
    batch: int = 256,
) -> np.ndarray:
    """PAPR (dB) of ``n_symbols`` independent DFT-s-OFDM symbols."""
    if cfg.m_used % 2 and not isinstance(source, Constellation2D):
        raise InvalidParameterError("4D sources need an even number of used subcarriers")
    out = np.empty(n_symbols)
    batch = max(1, min(batch, (1 << 21) // cfg.fft_size))
    for start in range(0, n_symbols, batch):
        n = min(batch, n_symbols - start)
        syms = random_symbols(source, n * cfg.m_used, rng).reshape(n, cfg.m_used)
        out[start : start + n] = papr_db(dfts_ofdm_symbol(syms, cfg))
    return out
