"""Monte-Carlo BER over AWGN, uncoded and LDPC-coded."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binomtest

from .detection import SnrSpec, add_awgn, detect_ml_labels, llr
from .graymap import Labeling4D, bits_from_int, int_from_bits
from .ldpc import ParityCheckMatrix, decode_bp, encode

__all__ = ["BerPoint", "wilson_half_width", "ber_uncoded", "ber_coded", "point_rngs"]


@dataclass
class BerPoint:
    ebn0_db: float
    bits: int
    errors: int
    frames: int
    per_bit_errors: list = field(default_factory=list)

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else float("nan")

    @property
    def half_width(self) -> float:
        return wilson_half_width(self.errors, self.bits)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ber"] = self.ber
        d["half_width"] = self.half_width
        return d


def wilson_half_width(errors: int, trials: int, confidence: float = 0.95) -> float:
    if trials == 0:
        return float("nan")
    ci = binomtest(int(errors), int(trials)).proportion_ci(confidence, method="wilson")
    return (ci.high - ci.low) / 2


def point_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators, one per SNR point, derived from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _peak_scale(labeling: Labeling4D) -> float:
    t = labeling.table.astype(float)
    peak = np.max(np.maximum(t[:, 0] ** 2 + t[:, 1] ** 2, t[:, 2] ** 2 + t[:, 3] ** 2))
    return 1.0 / np.sqrt(peak)


def _reference(labeling: Labeling4D, normalization: str) -> tuple[np.ndarray, float]:
    """Transmit table and the symbol energy the noise level is referenced to.

    ``"average"`` gives unit average 2D energy. ``"peak"`` gives unit peak
    2D power and references Eb/N0 to that peak instead of the mean.
    """
    if normalization == "average":
        return labeling.normalized(), 1.0
    if normalization == "peak":
        return labeling.table * _peak_scale(labeling), 1.0
    raise ValueError(f"unknown normalization {normalization!r}")


def ber_uncoded(
    labeling: Labeling4D,
    ebn0_db: float,
    rng: np.random.Generator,
    max_bits: int = 10_000_000,
    min_errors: int = 100,
    batch: int = 100_000,
    normalization: str = "average",
) -> BerPoint:
    """Hard-decision ML BER; stops at ``min_errors`` bit errors or ``max_bits``."""
    table, es = _reference(labeling, normalization)
    k = labeling.k
    n0 = SnrSpec(ebn0_db, k, es).n0
    errors = bits = vecs = 0
    per_bit = np.zeros(k, dtype=np.int64)
    while errors < min_errors and bits < max_bits:
        n = int(min(batch, -(-(max_bits - bits) // k)))
        labels = rng.integers(len(table), size=n)
        r = add_awgn(table[labels], n0, rng)
        wrong = bits_from_int(labels ^ detect_ml_labels(r, table, exact_ties=False), k)
        per_bit += wrong.sum(axis=0, dtype=np.int64)
        errors += int(wrong.sum(dtype=np.int64))
        bits += n * k
        vecs += n
    return BerPoint(ebn0_db, bits, errors, vecs, per_bit.tolist())


def ber_coded(
    labeling: Labeling4D,
    h: ParityCheckMatrix,
    ebn0_db: float,
    rng: np.random.Generator,
    max_frames: int = 200,
    min_errors: int = 100,
    batch: int = 25,
    max_iter: int = 50,
    mode: str = "exact",
) -> BerPoint:
    """Information-bit BER of LDPC-coded modulation with soft demapping.

    Codeword bits fill consecutive 4D vectors, bit ``b_i`` of vector ``j``
    being codeword bit ``j * k + i``. When ``k`` does not divide the block
    length the last vector is topped up with random filler bits whose LLRs
    are discarded. Eb counts information bits only.
    """
    k = labeling.k
    table = labeling.normalized()
    n_vec = -(-h.n // k)
    pad = n_vec * k - h.n
    n0 = SnrSpec(ebn0_db, h.k / n_vec).n0
    errors = bits = frames = 0
    while errors < min_errors and frames < max_frames:
        f = min(batch, max_frames - frames)
        info = rng.integers(0, 2, size=(f, h.k), dtype=np.uint8)
        cw = encode(info, h)
        filler = rng.integers(0, 2, size=(f, pad), dtype=np.uint8)
        labels = int_from_bits(np.concatenate([cw, filler], axis=1).reshape(f, n_vec, k))
        r = add_awgn(table[labels.ravel()], n0, rng)
        soft = llr(r, labeling, n0, mode=mode).reshape(f, n_vec * k)[:, : h.n]
        res = decode_bp(soft, h, max_iter=max_iter)
        errors += int((res.bits[:, h.info_positions] != info).sum())
        bits += f * h.k
        frames += f
    return BerPoint(ebn0_db, bits, errors, frames)
