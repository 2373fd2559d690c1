"""Regular (3, 6) LDPC code: construction, systematic encoding, sum-product decoding."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .exceptions import ConstructionFailedError, InvalidParameterError

__all__ = [
    "ParityCheckMatrix",
    "DecodeResult",
    "build_h",
    "encode",
    "syndrome",
    "decode_bp",
]

BLOCK_LENGTH = 2394
LLR_CLIP = 30.0


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Sparse regular parity-check matrix stored as per-row column indices.

    ``rows[r]`` lists the (sorted) columns of check ``r``.
    """

    n: int
    rows: np.ndarray = field(repr=False)
    seed: int | None = None

    def __post_init__(self):
        rows = np.sort(np.asarray(self.rows, dtype=np.int64), axis=1)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def m_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def row_weight(self) -> int:
        return self.rows.shape[1]

    @cached_property
    def column_weights(self) -> np.ndarray:
        return np.bincount(self.rows.ravel(), minlength=self.n)

    @property
    def column_weight(self) -> int:
        w = self.column_weights
        if not np.all(w == w[0]):
            raise InvalidParameterError("matrix is not column-regular")
        return int(w[0])

    @cached_property
    def sparse(self) -> sp.csr_matrix:
        m, d = self.rows.shape
        data = np.ones(m * d, dtype=np.int64)
        return sp.csr_matrix((data, (np.repeat(np.arange(m), d), self.rows.ravel())), shape=(m, self.n))

    def dense(self) -> np.ndarray:
        return self.sparse.toarray().astype(np.uint8)

    def four_cycles(self) -> int:
        """Number of row pairs sharing two or more columns."""
        return len(_overlapping_row_pairs(self.sparse))

    @cached_property
    def _systematic(self):
        return _row_reduce(self.dense().astype(bool))

    @property
    def rank(self) -> int:
        return len(self._systematic[0])

    @property
    def k(self) -> int:
        """Information length after removing dependent checks."""
        return self.n - self.rank

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def info_positions(self) -> np.ndarray:
        return self._systematic[1]

    @cached_property
    def _edges_by_column(self) -> np.ndarray:
        # edge e = r * row_weight + j; for each column, its edge ids
        order = np.argsort(self.rows.ravel(), kind="stable")
        return order.reshape(self.n, -1)

    def to_alist(self, path) -> None:
        cols = [[] for _ in range(self.n)]
        for r, row in enumerate(self.rows.tolist()):
            for c in row:
                cols[c].append(r)
        lines = [
            f"{self.n} {self.m_rows}",
            f"{max(len(c) for c in cols)} {self.row_weight}",
            " ".join(str(len(c)) for c in cols),
            " ".join(str(self.row_weight) for _ in range(self.m_rows)),
        ]
        lines += [" ".join(str(r + 1) for r in c) for c in cols]
        lines += [" ".join(str(c + 1) for c in row) for row in self.rows.tolist()]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_alist(cls, path) -> "ParityCheckMatrix":
        tokens = Path(path).read_text().split()
        it = iter(int(t) for t in tokens)
        n, m = next(it), next(it)
        _, _ = next(it), next(it)
        col_w = [next(it) for _ in range(n)]
        row_w = [next(it) for _ in range(m)]
        for w in col_w:
            for _ in range(w):
                next(it)
        rows = [[next(it) - 1 for _ in range(w)] for w in row_w]
        if len(set(row_w)) != 1:
            raise InvalidParameterError("only row-regular matrices are supported")
        return cls(n=n, rows=np.array(rows))


@dataclass
class DecodeResult:
    bits: np.ndarray
    converged: np.ndarray
    iters: np.ndarray


def _overlapping_row_pairs(h: sp.csr_matrix) -> np.ndarray:
    overlap = sp.triu(h @ h.T, k=1).tocoo()
    bad = overlap.data >= 2
    return np.stack([overlap.row[bad], overlap.col[bad]], axis=1)


def _has_duplicates(row: np.ndarray) -> bool:
    return len(np.unique(row)) != len(row)


def build_h(
    seed: int = 0,
    n: int = BLOCK_LENGTH,
    column_weight: int = 3,
    row_weight: int = 6,
    max_rounds: int = 200,
) -> ParityCheckMatrix:
    """Seeded (column_weight, row_weight)-regular matrix without 4-cycles.

    Edges are dealt by a random socket permutation; parallel edges and
    4-cycles are then removed by swapping the column ends of random edge
    pairs, which keeps every row and column weight fixed.
    """
    if (n * column_weight) % row_weight:
        raise InvalidParameterError("n * column_weight must be divisible by row_weight")
    m = n * column_weight // row_weight
    rng = np.random.default_rng(seed)
    rows = rng.permutation(np.repeat(np.arange(n), column_weight)).reshape(m, row_weight)

    def swap_out(r: int, j: int) -> None:
        for _ in range(1000):
            r2 = int(rng.integers(m))
            j2 = int(rng.integers(row_weight))
            if r2 == r:
                continue
            c, c2 = rows[r, j], rows[r2, j2]
            if c2 in rows[r] or c in rows[r2]:
                continue
            rows[r, j], rows[r2, j2] = c2, c
            return

    for _ in range(max_rounds):
        dup_rows = [r for r in range(m) if _has_duplicates(rows[r])]
        for r in dup_rows:
            _, first = np.unique(rows[r], return_index=True)
            for j in sorted(set(range(row_weight)) - set(first.tolist())):
                swap_out(r, j)
        if dup_rows:
            continue
        h = ParityCheckMatrix(n=n, rows=rows.copy(), seed=seed)
        pairs = _overlapping_row_pairs(h.sparse)
        if len(pairs) == 0:
            return h
        for r1, r2 in pairs:
            shared = np.intersect1d(rows[r1], rows[r2])
            if len(shared) >= 2:
                j = int(np.flatnonzero(rows[r1] == shared[0])[0])
                swap_out(int(r1), j)
    raise ConstructionFailedError(f"seed {seed}: 4-cycles remain after {max_rounds} rounds")


def _row_reduce(h: np.ndarray):
    """Reduced row echelon form over GF(2).

    Returns ``(pivot_cols, free_cols, parity_map)`` where the parity bit on
    ``pivot_cols[i]`` equals ``parity_map[i] @ info`` (mod 2) for info bits on
    ``free_cols``.
    """
    a = h.copy()
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    pivots = np.array(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(ncols), pivots)
    parity_map = a[: len(pivots)][:, free].astype(np.uint8)
    return pivots, free, parity_map


def encode(info, h: ParityCheckMatrix) -> np.ndarray:
    """Systematic codeword(s) for ``h.k`` information bits per row.

    Info bits land on ``h.info_positions`` in order.
    """
    info = np.asarray(info, dtype=np.uint8)
    single = info.ndim == 1
    info = np.atleast_2d(info)
    if info.shape[1] != h.k:
        raise InvalidParameterError(f"expected {h.k} info bits, got {info.shape[1]}")
    pivots, free, parity_map = h._systematic
    cw = np.zeros((info.shape[0], h.n), dtype=np.uint8)
    cw[:, free] = info
    cw[:, pivots] = (info.astype(np.int64) @ parity_map.T.astype(np.int64)) & 1
    return cw[0] if single else cw


def syndrome(bits, h: ParityCheckMatrix) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    return bits[..., h.rows].sum(axis=-1) & 1


def _exclusive_products(t: np.ndarray) -> np.ndarray:
    """Product over the last axis leaving out each position in turn."""
    pre = np.cumprod(t, axis=-1)
    suf = np.cumprod(t[..., ::-1], axis=-1)[..., ::-1]
    out = np.ones_like(t)
    out[..., 1:] *= pre[..., :-1]
    out[..., :-1] *= suf[..., 1:]
    return out


def decode_bp(llrs, h: ParityCheckMatrix, max_iter: int = 50) -> DecodeResult:
    """Flooding sum-product decoding.

    ``llrs`` are channel LLRs, positive favouring bit 0, shape ``(n,)`` or
    ``(frames, n)``. Frames stop individually once their syndrome is zero.
    """
    if max_iter < 1:
        raise InvalidParameterError("max_iter must be >= 1")
    llrs = np.asarray(llrs, dtype=float)
    single = llrs.ndim == 1
    llrs = np.clip(np.atleast_2d(llrs), -LLR_CLIP, LLR_CLIP)
    if llrs.shape[1] != h.n:
        raise InvalidParameterError(f"expected {h.n} LLRs per frame")
    frames = llrs.shape[0]
    edge_col = h.rows.ravel()
    by_col = h._edges_by_column
    m, d = h.rows.shape

    bits = (llrs < 0).astype(np.uint8)
    converged = np.zeros(frames, dtype=bool)
    iters = np.zeros(frames, dtype=np.int64)

    active = np.arange(frames)
    chan = llrs
    q = chan[:, edge_col]
    for it in range(1, max_iter + 1):
        t = np.tanh(q.reshape(-1, m, d) / 2)
        prod = np.clip(_exclusive_products(t), -1 + 1e-15, 1 - 1e-15)
        r = np.clip(2 * np.arctanh(prod), -LLR_CLIP, LLR_CLIP).reshape(len(active), -1)
        total = chan + r[:, by_col].sum(axis=2)
        hard = (total < 0).astype(np.uint8)
        done = ~syndrome(hard, h).any(axis=1)
        bits[active] = hard
        iters[active] = it
        converged[active[done]] = True
        keep = ~done
        if not keep.any():
            break
        active, chan, total, r = active[keep], chan[keep], total[keep], r[keep]
        q = total[:, edge_col] - r
    if single:
        return DecodeResult(bits[0], converged[0], iters[0])
    return DecodeResult(bits, converged, iters)
