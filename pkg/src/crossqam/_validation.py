"""Input checks shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidParameterError


def check_bits(X, k: int) -> np.ndarray:
    """Bits as a ``(n, k)`` uint8 array with ``X[:, i] = b_i``.

    A flat stream is cut into consecutive ``k``-bit groups, the first bit of
    each group being ``b_0``.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        if X.size % k:
            raise InvalidParameterError(f"stream of {X.size} bits is not a multiple of {k}")
        X = X.reshape(-1, k)
    X = check_array(X, dtype=None, ensure_min_samples=1)
    if X.shape[1] != k:
        raise InvalidParameterError(f"expected {k} bits per row, got {X.shape[1]}")
    if not np.isin(X, (0, 1)).all():
        raise InvalidParameterError("bit arrays may only contain 0 and 1")
    return X.astype(np.uint8)


def check_vectors(X) -> np.ndarray:
    """Finite received vectors as a float ``(n, 4)`` array."""
    X = check_array(np.atleast_2d(np.asarray(X, dtype=float)), dtype=np.float64)
    if X.shape[1] != 4:
        raise InvalidParameterError(f"4D vectors need 4 columns, got {X.shape[1]}")
    return X
