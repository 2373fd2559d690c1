"""scikit-learn compatible modulator and detector.

``Modulator4D`` is a transformer from bit rows to normalized 4D vectors and
back (hard ML detection). ``SoftDemapper`` turns received vectors into
per-bit LLRs and label predictions. Both expose ``get_params``/``set_params``
so they drop into pipelines and grid searches.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_bits, check_vectors
from .detection import detect_ml_labels, llr
from .exceptions import InvalidParameterError
from .graymap import bits_from_int, int_from_bits
from .harness import ExperimentConfig, build_source


def _labeling(constellation: str, m: int, order: int, labeling: str):
    cfg = ExperimentConfig(constellation=constellation, m=m, order=order, labeling=labeling)
    cfg.validate()
    return build_source(cfg)


class Modulator4D(TransformerMixin, BaseEstimator):
    """Map ``k``-bit rows onto a 4D constellation.

    Parameters
    ----------
    constellation : {"cross-qam", "class1-trim", "dicyclic", "square-qam"}
    m : int
        Cross-QAM size parameter; the constellation has ``3 * 4**m`` points
        per 2D symbol and ``k = 3 + 4m``.
    order : int
        Square-QAM order when ``constellation="square-qam"``.
    labeling : {"gray", "progressive"}
    """

    def __init__(self, constellation="cross-qam", m=1, order=16, labeling="gray"):
        self.constellation = constellation
        self.m = m
        self.order = order
        self.labeling = labeling

    def fit(self, X=None, y=None):
        self.labeling_ = _labeling(self.constellation, self.m, self.order, self.labeling)
        self.k_ = self.labeling_.k
        self.table_ = self.labeling_.normalized()
        self.n_features_in_ = self.k_
        return self

    def transform(self, X):
        """Rows of bits (or a flat bit stream) to unit-energy 4D vectors."""
        check_is_fitted(self, "table_")
        return self.table_[int_from_bits(check_bits(X, self.k_))]

    def inverse_transform(self, X):
        """Nearest-vector (ML) bits for received vectors, shape ``(n, k)``."""
        check_is_fitted(self, "table_")
        return bits_from_int(detect_ml_labels(check_vectors(X), self.table_), self.k_)


class SoftDemapper(ClassifierMixin, BaseEstimator):
    """ML label decisions and bit LLRs for a 4D labeling over AWGN.

    ``n0`` is the noise spectral density in normalized units (variance
    ``n0 / 2`` per real dimension). ``predict`` returns integer labels;
    :meth:`llr` returns ``(n, k)`` soft bits, positive favouring 0.
    """

    def __init__(self, constellation="cross-qam", m=1, order=16, labeling="gray", n0=0.1, mode="exact"):
        self.constellation = constellation
        self.m = m
        self.order = order
        self.labeling = labeling
        self.n0 = n0
        self.mode = mode

    def fit(self, X=None, y=None):
        if self.n0 <= 0:
            raise InvalidParameterError("n0 must be positive")
        self.labeling_ = _labeling(self.constellation, self.m, self.order, self.labeling)
        self.k_ = self.labeling_.k
        self.classes_ = np.arange(1 << self.k_)
        self.n_features_in_ = 4
        return self

    def predict(self, X):
        check_is_fitted(self, "labeling_")
        return detect_ml_labels(check_vectors(X), self.labeling_.normalized())

    def predict_log_proba(self, X):
        check_is_fitted(self, "labeling_")
        X = check_vectors(X)
        table = self.labeling_.normalized()
        metric = -np.sum((X[:, None, :] - table[None]) ** 2, axis=2) / self.n0
        return metric - np.logaddexp.reduce(metric, axis=1, keepdims=True)

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))

    def llr(self, X):
        check_is_fitted(self, "labeling_")
        return llr(check_vectors(X), self.labeling_, self.n0, mode=self.mode)

    def score(self, X, y, sample_weight=None):
        """Fraction of correctly detected labels; ``y`` may be labels or bit rows."""
        y = np.asarray(y)
        if y.ndim == 2:
            y = int_from_bits(check_bits(y, self.k_))
        return super().score(X, y, sample_weight)
