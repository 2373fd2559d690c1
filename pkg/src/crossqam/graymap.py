"""Gray bits-to-signal mapping for the 4D cross constellation.

Bit conventions
---------------
A bit sequence of length ``k`` is an array ``b`` with ``b[i] = b_i``. The
same sequence as an integer label is ``sum(b_i << i)``, so ``b_{k-1}`` is the
most significant bit, and printed bit strings read ``b_{k-1} ... b_0``.

For ``k = 3 + 4m`` the top three bits ``(b_{k-1}, b_{k-2}, b_{k-3})`` pick a
row of the base table, the next four ``(b_{k-4}, ..., b_{k-7})`` are the sign
bits of ``(x1, y1, x2, y2)``, bits ``b_{2m-2} .. b_{4m-5}`` pick a point in
the first cluster and ``b_0 .. b_{2m-3}`` a point in the second.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .constellation import (
    Constellation4D,
    gray_code,
    gray_decode,
    is_cross_point,
    min_distance_pairs,
)
from .exceptions import InvalidParameterError, NotACodewordError

__all__ = [
    "BASIC_MAP",
    "TABLE1_ORDER",
    "bits_per_vector",
    "bits_from_int",
    "int_from_bits",
    "basic_map_f",
    "sign_apply_D",
    "map12",
    "InnerGray",
    "inner_gray",
    "cluster_point_s",
    "map_general",
    "map_labels",
    "demap_hard",
    "demap_labels",
    "enumerate_used",
    "Labeling4D",
    "gray_labeling",
    "progressive_labeling",
    "GrayReport",
    "verify_gray",
    "per_bit_reliability",
]

# keyed by the bit string b_{k-1} b_{k-2} b_{k-3}
BASIC_MAP = {
    "000": (1, 3, 1, 3),
    "001": (1, 3, 1, 1),
    "011": (1, 3, 3, 1),
    "010": (1, 1, 3, 1),
    "110": (3, 1, 3, 1),
    "111": (3, 1, 1, 1),
    "101": (3, 1, 1, 3),
    "100": (1, 1, 1, 3),
}
TABLE1_ORDER = ("000", "001", "011", "010", "110", "111", "101", "100")

# row index = integer value of b_{k-1} b_{k-2} b_{k-3}
_F_ROWS = np.array([BASIC_MAP[format(i, "03b")] for i in range(8)], dtype=np.int64)
_F_INVERSE = {tuple(row): i for i, row in enumerate(_F_ROWS.tolist())}


def bits_per_vector(m: int) -> int:
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"m must be an integer >= 1, got {m!r}")
    return 3 + 4 * int(m)


def bits_from_int(n, k: int) -> np.ndarray:
    """``(..., k)`` array with ``out[..., i] = b_i``."""
    n = np.asarray(n, dtype=np.int64)
    return ((n[..., None] >> np.arange(k)) & 1).astype(np.uint8)


def int_from_bits(b) -> np.ndarray:
    b = np.asarray(b, dtype=np.int64)
    return (b << np.arange(b.shape[-1])).sum(axis=-1)


def _as_written_bits(bits, n: int) -> tuple[int, ...]:
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    bits = tuple(int(b) for b in bits)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise InvalidParameterError(f"expected {n} bits, got {bits!r}")
    return bits


def basic_map_f(bits) -> tuple[int, int, int, int]:
    """Base table lookup; ``bits`` is written ``(b_{k-1}, b_{k-2}, b_{k-3})``."""
    key = "".join(map(str, _as_written_bits(bits, 3)))
    return BASIC_MAP[key]


def sign_apply_D(t: Sequence[int], bits) -> tuple[int, int, int, int]:
    """Apply ``diag((-1)**b_3, (-1)**b_2, (-1)**b_1, (-1)**b_0)`` to ``t``.

    ``bits`` is written ``(b_3, b_2, b_1, b_0)``, so ``bits[j]`` negates
    coordinate ``j`` of ``(x1, y1, x2, y2)``.
    """
    signs = _as_written_bits(bits, 4)
    return tuple(int(c) * (-1) ** s for c, s in zip(t, signs))


def map12(b) -> tuple[int, int, int, int]:
    """Map 7 bits (``b[i] = b_i``) to a 12-QAM 4D vector."""
    b = np.asarray(b)
    if b.shape != (7,):
        raise InvalidParameterError("map12 takes exactly 7 bits")
    t = basic_map_f((b[6], b[5], b[4]))
    return sign_apply_D(t, (b[3], b[2], b[1], b[0]))


@dataclass(frozen=True, eq=False)
class InnerGray:
    """Gray-labeled grid for the implicit ``4**(m-1)``-QAM inside a cluster.

    ``grid[r, c]`` is the label of the point in row ``r`` (row 0 on top) and
    column ``c`` (column 0 on the left). The point coordinates are odd
    integers centred on the origin.
    """

    m: int
    grid: np.ndarray = field(repr=False)

    @property
    def side(self) -> int:
        return self.grid.shape[0]

    @property
    def nbits(self) -> int:
        return 2 * (self.m - 1)

    def coords(self, r, c):
        r = np.asarray(r)
        c = np.asarray(c)
        return 2 * c - (self.side - 1), (self.side - 1) - 2 * r

    def flipped(self, vertical: int, horizontal: int) -> np.ndarray:
        """The grid ``U**vertical @ G @ U**horizontal``."""
        g = self.grid
        if vertical:
            g = g[::-1, :]
        if horizontal:
            g = g[:, ::-1]
        return g

    def locate(self, labels):
        """Row and column of each label in the unflipped grid."""
        labels = np.asarray(labels, dtype=np.int64)
        half = self.m - 1
        row_code = labels >> half
        col_code = labels & ((1 << half) - 1)
        return gray_decode(row_code), gray_decode(col_code)


def inner_gray(m: int) -> InnerGray:
    """Reflected-binary product labeling: row Gray bits followed by column Gray bits."""
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"m must be an integer >= 1, got {m!r}")
    m = int(m)
    side = 2 ** (m - 1)
    half = m - 1
    grid = np.array(
        [[(gray_code(r) << half) | gray_code(c) for c in range(side)] for r in range(side)],
        dtype=np.int64,
    )
    grid.setflags(write=False)
    return InnerGray(m=m, grid=grid)


def _flip_exponent(t):
    # mod_2(|t - 1| / 2) for t in {±1, ±3}
    return (np.abs(np.asarray(t) - 1) // 2) % 2


def _cluster_offsets(xt, yt, labels, g: InnerGray):
    r0, c0 = g.locate(labels)
    last = g.side - 1
    r = np.where(_flip_exponent(yt) == 1, last - r0, r0)
    c = np.where(_flip_exponent(xt) == 1, last - c0, c0)
    return g.coords(r, c)


def cluster_point_s(xt: int, yt: int, bits, g: InnerGray) -> tuple[int, int]:
    """Offset of the point selected by ``bits`` inside the flipped cluster grid.

    ``bits`` is either an integer label or a bit sequence with ``bits[0]``
    as the least significant bit.
    """
    if g.m == 1:
        return (0, 0)
    label = int(bits) if np.isscalar(bits) else int(int_from_bits(bits))
    if not 0 <= label < 1 << g.nbits:
        raise InvalidParameterError(f"cluster label {label} out of range")
    flipped = g.flipped(int(_flip_exponent(yt)), int(_flip_exponent(xt)))
    hits = np.argwhere(flipped == label)
    assert len(hits) == 1, "cluster labels must be a bijection"
    r, c = hits[0]
    x, y = g.coords(r, c)
    return int(x), int(y)


def map_labels(labels, m: int) -> np.ndarray:
    """Vectorized mapping of integer labels to 4D vectors, shape ``(n, 4)``."""
    k = bits_per_vector(m)
    labels = np.asarray(labels, dtype=np.int64)
    if np.any((labels < 0) | (labels >= 1 << k)):
        raise InvalidParameterError(f"labels must lie in [0, 2**{k})")
    top = labels >> (k - 3)
    signs = bits_from_int(labels >> (k - 7), 4)[..., ::-1]  # b_{k-4}, ..., b_{k-7}
    t = _F_ROWS[top] * (1 - 2 * signs.astype(np.int64))
    if m == 1:
        return t
    g = inner_gray(m)
    nb = g.nbits
    mask = (1 << nb) - 1
    x1, y1 = _cluster_offsets(t[..., 0], t[..., 1], (labels >> nb) & mask, g)
    x2, y2 = _cluster_offsets(t[..., 2], t[..., 3], labels & mask, g)
    return (2 ** (m - 1)) * t + np.stack([x1, y1, x2, y2], axis=-1)


def map_general(b, m: int) -> tuple[int, int, int, int]:
    """Map ``k = 3 + 4m`` bits (``b[i] = b_i``) to a ``(3*4**m)``-QAM 4D vector."""
    k = bits_per_vector(m)
    b = np.asarray(b)
    if b.shape != (k,):
        raise InvalidParameterError(f"m={m} needs exactly {k} bits, got shape {b.shape}")
    return tuple(int(c) for c in map_labels(int_from_bits(b), m))


def demap_labels(vectors, m: int) -> np.ndarray:
    """Exact inverse of :func:`map_labels` for noiseless vectors.

    Raises
    ------
    NotACodewordError
        If any vector is not in the image of the mapping.
    """
    k = bits_per_vector(m)
    v = np.asarray(vectors)
    if v.shape[-1] != 4:
        raise InvalidParameterError("vectors must have trailing dimension 4")
    vi = np.rint(v).astype(np.int64)
    if not np.array_equal(vi, v):
        raise NotACodewordError("vector coordinates must be integers")
    ok = is_cross_point(vi[..., 0], vi[..., 1], m) & is_cross_point(vi[..., 2], vi[..., 3], m)
    if not np.all(ok):
        raise NotACodewordError("vector is not a pair of cross-QAM points")
    scale = 2 ** (m - 1)
    t = 2 * np.floor_divide(vi, 2 * scale) + 1 if m > 1 else vi
    signs = (t < 0).astype(np.int64)
    mag = np.abs(t)
    # row index of the base table from |t|
    key = mag[..., 0] * 64 + mag[..., 1] * 16 + mag[..., 2] * 4 + mag[..., 3]
    lut = np.full(256, -1, dtype=np.int64)
    for row, idx in _F_INVERSE.items():
        lut[row[0] * 64 + row[1] * 16 + row[2] * 4 + row[3]] = idx
    top = lut[key]
    if np.any(top < 0):
        raise NotACodewordError("both symbols lie in the inner ring; vector is unused")
    sign_val = (signs[..., 0] << 3) | (signs[..., 1] << 2) | (signs[..., 2] << 1) | signs[..., 3]
    labels = (top << (k - 3)) | (sign_val << (k - 7))
    if m > 1:
        g = inner_gray(m)
        off = vi - scale * t
        last = g.side - 1
        c_idx = (off[..., 0::2] + last) // 2
        r_idx = (last - off[..., 1::2]) // 2
        r0 = np.where(_flip_exponent(t[..., 1::2]) == 1, last - r_idx, r_idx)
        c0 = np.where(_flip_exponent(t[..., 0::2]) == 1, last - c_idx, c_idx)
        cl = g.grid[r0, c0]
        labels = labels | (cl[..., 0] << g.nbits) | cl[..., 1]
    return labels


def demap_hard(v, m: int) -> np.ndarray:
    """Bits (``out[i] = b_i``) of a noiseless 4D vector."""
    k = bits_per_vector(m)
    v = np.asarray(v)
    if v.shape != (4,):
        raise InvalidParameterError("demap_hard takes one 4D vector")
    return bits_from_int(demap_labels(v, m), k)


def enumerate_used(m: int) -> np.ndarray:
    """All ``2**(3+4m)`` used vectors, row ``n`` being the image of label ``n``."""
    k = bits_per_vector(m)
    return map_labels(np.arange(1 << k), m)


@dataclass(frozen=True, eq=False)
class Labeling4D:
    """Bijection between ``k``-bit labels and 4D vectors.

    ``table[n]`` is the vector carrying label ``n``. ``m`` is set for cross-QAM
    labelings built by :func:`gray_labeling`.
    """

    table: np.ndarray = field(repr=False)
    name: str
    m: Optional[int] = None
    _inverse: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = np.array(self.table)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        n = len(t)
        if t.ndim != 2 or t.shape[1] != 4 or n < 2 or n & (n - 1):
            raise InvalidParameterError("table must have shape (2**k, 4) with k >= 1")
        inverse = {tuple(row): i for i, row in enumerate(t.tolist())}
        if len(inverse) != n:
            raise InvalidParameterError(f"{self.name}: labeling is not injective")
        object.__setattr__(self, "_inverse", inverse)

    @property
    def k(self) -> int:
        return int(len(self.table)).bit_length() - 1

    @property
    def es2d(self) -> float:
        """Average 2D-symbol energy under uniformly random bits."""
        return float(np.mean(np.sum(self.table.astype(float) ** 2, axis=1))) / 2.0

    @property
    def scale(self) -> float:
        return 1.0 / np.sqrt(self.es2d)

    def normalized(self) -> np.ndarray:
        return self.table * self.scale

    def forward(self, b) -> np.ndarray:
        return self.table[int_from_bits(b)]

    def inverse(self, v) -> np.ndarray:
        key = tuple(np.asarray(v).tolist())
        if key not in self._inverse:
            raise NotACodewordError(f"{key} is not used by {self.name}")
        return bits_from_int(self._inverse[key], self.k)

    def constellation(self) -> Constellation4D:
        return Constellation4D(self.table, name=self.name)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bits", "x1", "y1", "x2", "y2"])
            for n, row in enumerate(self.table.tolist()):
                vals = [repr(c) if isinstance(c, float) else c for c in row]
                writer.writerow([format(n, f"0{self.k}b")] + vals)


def gray_labeling(m: int) -> Labeling4D:
    return Labeling4D(enumerate_used(m), name=f"cross-qam-{3 * 4**m}-gray", m=int(m))


def progressive_labeling(c, k: int) -> Labeling4D:
    """Assign label ``n`` to the ``n``-th vector in lexicographic order."""
    if isinstance(c, Constellation4D):
        vectors, name = np.asarray(c.vectors), c.name
    elif isinstance(c, Labeling4D):
        vectors, name = c.table, c.name.removesuffix("-gray")
    else:
        vectors, name = np.asarray(c), "custom"
    if len(vectors) != 1 << k:
        raise InvalidParameterError(f"{len(vectors)} vectors cannot carry exactly {k} bits")
    order = np.lexsort(vectors.T[::-1])
    return Labeling4D(vectors[order], name=f"{name}-progressive")


@dataclass
class GrayReport:
    min_distance: float
    pairs_checked: int
    violating_pairs: list = field(default_factory=list)

    @property
    def is_gray(self) -> bool:
        return not self.violating_pairs

    def to_dict(self) -> dict:
        return {
            "min_distance": self.min_distance,
            "pairs_checked": self.pairs_checked,
            "violations": len(self.violating_pairs),
            "violating_pairs": [
                {"label_a": a, "label_b": b, "hamming": h} for a, b, h in self.violating_pairs
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def __str__(self) -> str:
        return (
            f"violations: {len(self.violating_pairs)}, "
            f"min_distance: {self.min_distance:g}, pairs_checked: {self.pairs_checked}"
        )


def _min_distance_label_pairs(labeling: Labeling4D):
    dmin, pairs = min_distance_pairs(labeling.table)
    hd = np.bitwise_count(pairs[:, 0] ^ pairs[:, 1])
    return dmin, pairs, hd


def verify_gray(labeling: Labeling4D) -> GrayReport:
    """Check every minimum-distance pair for a single-bit label difference."""
    dmin, pairs, hd = _min_distance_label_pairs(labeling)
    bad = np.flatnonzero(hd != 1)
    violations = [(int(pairs[i, 0]), int(pairs[i, 1]), int(hd[i])) for i in bad]
    return GrayReport(min_distance=dmin, pairs_checked=len(pairs), violating_pairs=violations)


def per_bit_reliability(labeling: Labeling4D) -> np.ndarray:
    """Fraction of minimum-distance pairs whose labels differ in each bit ``b_i``.

    A proxy for how exposed each bit position is to nearest-neighbour errors.
    """
    _, pairs, _ = _min_distance_label_pairs(labeling)
    diff = bits_from_int(pairs[:, 0] ^ pairs[:, 1], labeling.k)
    return diff.sum(axis=0) / len(pairs)
