import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from crossqam.detection import add_awgn
from crossqam.estimators import Modulator4D, SoftDemapper
from crossqam.exceptions import ConfigurationError, InvalidParameterError
from crossqam.graymap import bits_from_int


class TestModulator:
    def test_params(self):
        mod = Modulator4D(m=2)
        assert mod.get_params() == {"constellation": "cross-qam", "m": 2, "order": 16, "labeling": "gray"}
        assert clone(mod).set_params(m=1).m == 1

    def test_round_trip(self, rng):
        mod = Modulator4D(m=2).fit()
        bits = rng.integers(0, 2, size=(500, 11))
        v = mod.transform(bits)
        assert v.shape == (500, 4)
        np.testing.assert_array_equal(mod.inverse_transform(v), bits)

    def test_stream_input(self):
        mod = Modulator4D().fit()
        stream = bits_from_int(np.array([0, 5]), 7).ravel()
        np.testing.assert_allclose(mod.transform(stream)[0], np.array([1, 3, 1, 3]) / np.sqrt(8))

    def test_unit_energy(self):
        mod = Modulator4D(constellation="class1-trim", labeling="progressive").fit()
        v = mod.transform(bits_from_int(np.arange(128), 7))
        assert np.mean(np.sum(v**2, 1)) / 2 == pytest.approx(1.0)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            Modulator4D().transform(np.zeros((1, 7)))

    def test_bad_bits(self):
        mod = Modulator4D().fit()
        with pytest.raises(InvalidParameterError):
            mod.transform(np.full((1, 7), 2))
        with pytest.raises(InvalidParameterError):
            mod.transform(np.zeros(10))

    def test_bad_combo(self):
        with pytest.raises(ConfigurationError):
            Modulator4D(constellation="dicyclic").fit()

    def test_pipeline_with_channel(self, rng):
        channel = FunctionTransformer(lambda v: add_awgn(v, 1e-4, np.random.default_rng(0)))
        bits = rng.integers(0, 2, size=(64, 7))
        pipe = make_pipeline(Modulator4D(), channel).fit(bits)
        rx = pipe.transform(bits)
        np.testing.assert_array_equal(pipe[0].inverse_transform(rx), bits)


class TestSoftDemapper:
    def test_predict_and_score(self, rng):
        det = SoftDemapper(n0=0.01).fit()
        table = det.labeling_.normalized()
        labels = rng.integers(128, size=200)
        r = add_awgn(table[labels], 1e-4, rng)
        np.testing.assert_array_equal(det.predict(r), labels)
        assert det.score(r, labels) == 1.0
        assert det.score(r, bits_from_int(labels, 7)) == 1.0

    def test_proba_and_llr_consistent(self, rng):
        det = SoftDemapper(n0=0.2).fit()
        r = rng.normal(size=(20, 4)) * 0.7
        proba = det.predict_proba(r)
        np.testing.assert_allclose(proba.sum(1), 1.0)
        bits = bits_from_int(det.classes_, 7).astype(bool)
        for i in range(7):
            expected = np.log(proba[:, ~bits[:, i]].sum(1) / proba[:, bits[:, i]].sum(1))
            np.testing.assert_allclose(det.llr(r)[:, i], expected, rtol=1e-8, atol=1e-10)

    def test_bad_n0(self):
        with pytest.raises(InvalidParameterError):
            SoftDemapper(n0=0.0).fit()

    def test_bad_vectors(self):
        det = SoftDemapper().fit()
        with pytest.raises(InvalidParameterError):
            det.predict(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            det.predict(np.array([[np.nan, 0, 0, 0]]))
