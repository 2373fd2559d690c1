"""2D and 4D constellations and their geometric metrics.

Lattice-based constellations keep integer coordinates in natural lattice
units; only the dicyclic constellation is real-valued. Normalization to unit
average 2D-symbol energy is exposed as a scale factor, never baked into the
stored coordinates.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import InvalidParameterError

__all__ = [
    "Constellation2D",
    "Constellation4D",
    "NeighborStats",
    "build_cross_qam",
    "build_square_qam",
    "build_welti_class1",
    "trim_high_power",
    "build_dicyclic",
    "symbol_powers",
    "constellation_papr",
    "min_distance_pairs",
    "neighbor_stats",
    "is_cross_point",
]

_RTOL = 1e-9


def _frozen(a, dtype=None) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def gray_code(n: int) -> int:
    return n ^ (n >> 1)


def gray_decode(g: np.ndarray | int):
    g = np.asarray(g)
    n = g.copy()
    shift = g >> 1
    while np.any(shift):
        n = n ^ shift
        shift = shift >> 1
    return n


@dataclass(frozen=True, eq=False)
class Constellation2D:
    """A finite set of points in the complex plane.

    ``points`` has shape ``(n, 2)`` holding ``(x, y)`` pairs. ``labels`` is
    an optional integer label per point (bit ``i`` of the label is ``b_i``).
    """

    points: np.ndarray
    name: str
    scale_m: Optional[int] = None
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen(self.labels, dtype=np.int64))
        if len({tuple(p) for p in self.points.tolist()}) != len(self.points):
            raise InvalidParameterError(f"{self.name}: duplicate points")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def bits_per_symbol(self) -> Optional[int]:
        if self.labels is None:
            return None
        return int(np.log2(len(self.points)))

    def as_complex(self) -> np.ndarray:
        return self.points[:, 0] + 1j * self.points[:, 1]

    def to_csv(self, path) -> None:
        _write_points_csv(path, self.points, ("x", "y"), self.labels, self.bits_per_symbol)


@dataclass(frozen=True, eq=False)
class Constellation4D:
    """An ordered set of 4D vectors ``(x1, y1, x2, y2)``.

    ``normalization`` is the factor that scales the vectors to unit average
    2D-symbol energy when every vector is equally likely.
    """

    vectors: np.ndarray
    name: str
    normalization: float = field(init=False)

    def __post_init__(self):
        v = _frozen(self.vectors)
        if v.ndim != 2 or v.shape[1] != 4:
            raise InvalidParameterError(f"{self.name}: vectors must have shape (n, 4)")
        if len({tuple(p) for p in v.tolist()}) != len(v):
            raise InvalidParameterError(f"{self.name}: duplicate vectors")
        object.__setattr__(self, "vectors", v)
        es2d = float(np.mean(np.sum(v.astype(float) ** 2, axis=1))) / 2.0
        if es2d <= 0:
            raise InvalidParameterError(f"{self.name}: zero-energy constellation")
        object.__setattr__(self, "normalization", 1.0 / np.sqrt(es2d))

    def __len__(self) -> int:
        return len(self.vectors)

    def normalized(self) -> np.ndarray:
        return self.vectors * self.normalization

    def to_csv(self, path) -> None:
        _write_points_csv(path, self.vectors, ("x1", "y1", "x2", "y2"))


@dataclass(frozen=True, eq=False)
class NeighborStats:
    min_distance: float
    per_point_counts: np.ndarray
    avg: float
    max: int

    def histogram(self) -> dict[int, int]:
        values, counts = np.unique(self.per_point_counts, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}


def _write_points_csv(path, points, columns, labels=None, nbits=None) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(columns) + (["bits"] if labels is not None else []))
        for i, p in enumerate(points.tolist()):
            row = [repr(c) if isinstance(c, float) else c for c in p]
            if labels is not None:
                row.append(format(int(labels[i]), f"0{nbits}b"))
            writer.writerow(row)


def is_cross_point(x, y, m: int):
    """Whether ``(x, y)`` lies on the ``3 * 4**m`` cross-QAM grid."""
    x = np.asarray(x)
    y = np.asarray(y)
    lim = 2 ** (m + 1) - 1
    half = 2**m
    odd = (np.mod(x, 2) == 1) & (np.mod(y, 2) == 1)
    inside = (np.abs(x) <= lim) & (np.abs(y) <= lim)
    corner = (np.abs(x) > half) & (np.abs(y) > half)
    return odd & inside & ~corner


def build_cross_qam(m: int) -> Constellation2D:
    """Cross QAM with ``3 * 4**m`` points, cut from ``4**(m+1)``-QAM.

    Points are odd-integer pairs in lexicographic ``(x, y)`` order.
    """
    if int(m) != m or m < 1:
        raise InvalidParameterError(f"cross QAM needs integer m >= 1, got {m!r}")
    m = int(m)
    axis = np.arange(-(2 ** (m + 1)) + 1, 2 ** (m + 1), 2)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    xx, yy = xx.ravel(), yy.ravel()
    keep = is_cross_point(xx, yy, m)
    pts = np.stack([xx[keep], yy[keep]], axis=1)
    return Constellation2D(pts, name=f"cross-qam-{3 * 4**m}", scale_m=m)


def build_square_qam(order: int) -> Constellation2D:
    """Square QAM on the odd-integer grid with a binary-reflected Gray labeling.

    The upper half of each label is the Gray code of the in-phase level index,
    the lower half the Gray code of the quadrature level index.
    """
    if order not in (4, 16, 64, 256):
        raise InvalidParameterError(f"square QAM order must be 4, 16, 64 or 256, got {order!r}")
    side = int(round(np.sqrt(order)))
    half_bits = int(np.log2(side))
    axis = np.arange(-side + 1, side, 2)
    pts, labels = [], []
    for i, x in enumerate(axis):
        for j, y in enumerate(axis):
            pts.append((x, y))
            labels.append((gray_code(i) << half_bits) | gray_code(j))
    return Constellation2D(np.array(pts), name=f"square-qam-{order}", labels=np.array(labels))


def build_welti_class1() -> Constellation4D:
    """The 145-point D4 lattice ball of squared radius 6."""
    pts = [
        p
        for p in itertools.product(range(-2, 3), repeat=4)
        if sum(p) % 2 == 0 and sum(c * c for c in p) <= 6
    ]
    pts.sort(key=lambda p: (sum(c * c for c in p), p))
    return Constellation4D(np.array(pts, dtype=np.int64), name="class1")


def symbol_powers(vectors) -> np.ndarray:
    """Per-2D-symbol powers, shape ``(n, 2)`` for 4D input."""
    v = np.asarray(vectors)
    return v[:, 0::2] ** 2 + v[:, 1::2] ** 2


def trim_high_power(c: Constellation4D, target: int) -> Constellation4D:
    """Drop vectors with the largest per-symbol peak power until ``target`` remain.

    Ties are broken by removing the lexicographically largest vectors first.
    Survivors keep their original order.
    """
    n = len(c)
    if target > n or target < 1:
        raise InvalidParameterError(f"cannot trim {n} vectors to {target}")
    peak = symbol_powers(c.vectors).max(axis=1)
    keys = [(peak[i], tuple(c.vectors[i].tolist())) for i in range(n)]
    order = sorted(range(n), key=keys.__getitem__, reverse=True)
    removed = set(order[: n - target])
    keep = [i for i in range(n) if i not in removed]
    name = c.name if target == n else f"{c.name}-trim{target}"
    return Constellation4D(c.vectors[keep], name=name)


def build_dicyclic(size: int = 128) -> Constellation4D:
    """Two orthogonal PSK rings, one per 2D symbol, at unit average 2D energy."""
    if size < 2 or size % 2:
        raise InvalidParameterError(f"dicyclic size must be even and >= 2, got {size!r}")
    half = size // 2
    # all energy sits in one of the two symbols: rho**2 / 2 == 1
    rho = np.sqrt(2.0)
    ang = 2 * np.pi * np.arange(half) / half
    ring = np.stack([rho * np.cos(ang), rho * np.sin(ang)], axis=1)
    zeros = np.zeros_like(ring)
    vecs = np.concatenate([np.hstack([ring, zeros]), np.hstack([zeros, ring])])
    return Constellation4D(vecs, name=f"dicyclic-{size}")


def constellation_papr(vectors, probabilities=None) -> float:
    """PAPR in dB of the 2D symbols emitted by a constellation.

    ``vectors`` holds one point per row with an even number of real
    coordinates (2 for plain QAM, 4 for 4D vectors). ``probabilities`` is the
    distribution over rows; uniform when omitted. The peak is taken over
    symbols with nonzero probability.
    """
    v = np.asarray(vectors, dtype=float)
    if v.size == 0:
        raise InvalidParameterError("empty distribution")
    if v.ndim != 2 or v.shape[1] % 2:
        raise InvalidParameterError("vectors must have shape (n, 2k)")
    if probabilities is None:
        p = np.full(len(v), 1.0 / len(v))
    else:
        p = np.asarray(probabilities, dtype=float)
        if p.shape != (len(v),) or np.any(p < 0):
            raise InvalidParameterError("probabilities must be a nonnegative vector matching vectors")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvalidParameterError(f"probabilities sum to {p.sum()!r}, not 1")
    pw = v[:, 0::2] ** 2 + v[:, 1::2] ** 2
    avg = float(p @ pw.mean(axis=1))
    peak = float(pw[p > 0].max())
    return 10 * np.log10(peak / avg)


def min_distance_pairs(vectors, rtol: float = _RTOL) -> tuple[float, np.ndarray]:
    """Exact minimum distance and every unordered index pair achieving it.

    Uses a k-d tree, so large lattice subsets (tens of thousands of points)
    stay fast. Pairs come back sorted, shape ``(p, 2)`` with ``i < j``.
    """
    v = np.asarray(vectors, dtype=float)
    if len(v) < 2:
        raise InvalidParameterError("need at least two points")
    tree = cKDTree(v)
    dist, _ = tree.query(v, k=2)
    dmin = float(dist[:, 1].min())
    if dmin == 0:
        raise InvalidParameterError("duplicate points")
    pairs = tree.query_pairs(dmin * (1 + rtol), output_type="ndarray")
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    return dmin, pairs


def neighbor_stats(c) -> NeighborStats:
    vectors = c.vectors if isinstance(c, Constellation4D) else np.asarray(c)
    dmin, pairs = min_distance_pairs(vectors)
    counts = np.bincount(pairs.ravel(), minlength=len(vectors))
    return NeighborStats(
        min_distance=dmin,
        per_point_counts=_frozen(counts),
        avg=float(counts.mean()),
        max=int(counts.max()),
    )
