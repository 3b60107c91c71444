import numpy as np
import pytest

from grclab.errors import DimensionMismatch, NotAProbabilitySpectrum
from grclab.model import make_spectrum
from grclab.sampler import (
    TASK1_DESIGN,
    TASK1_NOISE,
    TASK2_DESIGN,
    TASK2_NOISE,
    dump_dataset,
    sample_gaussian_design,
    sample_labels,
    sample_one_hot_design,
    stream_seed,
)


class TestOneHotDesign:
    def test_deterministic_atom(self):
        s = make_spectrum([1.0], one_hot=True)
        x = sample_one_hot_design(s, 5, seed=0)
        np.testing.assert_array_equal(x, np.ones((5, 1)))

    def test_rows_are_basis_vectors(self):
        s = make_spectrum([0.2, 0.5, 0.3], one_hot=True)
        x = sample_one_hot_design(s, 1000, seed=1)
        assert np.all((x == 0.0) | (x == 1.0))
        np.testing.assert_array_equal(x.sum(axis=1), np.ones(1000))

    def test_law_of_large_numbers(self):
        # 5 sigma for a fair coin at n = 1e5 is ~0.008, inside the 0.01 gate
        s = make_spectrum([0.5, 0.5], one_hot=True)
        x = sample_one_hot_design(s, 10**5, seed=2)
        freq = x.mean(axis=0)
        np.testing.assert_allclose(freq, [0.5, 0.5], atol=0.01)

    def test_determinism_and_seed_sensitivity(self):
        s = make_spectrum([0.3, 0.7], one_hot=True)
        a = sample_one_hot_design(s, 50, seed=42)
        b = sample_one_hot_design(s, 50, seed=42)
        c = sample_one_hot_design(s, 50, seed=43)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_rejects_non_probability_spectrum(self):
        with pytest.raises(NotAProbabilitySpectrum):
            sample_one_hot_design(make_spectrum([0.5, 0.2]), 10, seed=0)


class TestGaussianDesign:
    def test_zero_covariance(self):
        s = make_spectrum([0.0, 0.0, 0.0])
        np.testing.assert_array_equal(sample_gaussian_design(s, 3, seed=0), np.zeros((3, 3)))

    def test_column_variances(self):
        s = make_spectrum([1.0, 4.0])
        x = sample_gaussian_design(s, 10**5, seed=3)
        np.testing.assert_allclose(x.var(axis=0), [1.0, 4.0], rtol=0.02)

    def test_determinism(self):
        s = make_spectrum([1.0])
        a = sample_gaussian_design(s, 2, seed=9)
        b = sample_gaussian_design(s, 2, seed=9)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (2, 1)


class TestLabels:
    def test_null_model(self):
        x = np.ones((4, 2))
        y = sample_labels(x, np.zeros(2), 0.0, seed=0)
        np.testing.assert_array_equal(y, np.zeros(4))

    def test_identity_design(self):
        y = sample_labels(np.eye(3), np.array([1.0, 2.0, 3.0]), 0.0, seed=0)
        np.testing.assert_array_equal(y, [1.0, 2.0, 3.0])

    def test_noise_variance(self):
        x = np.ones((10**5, 1))
        y = sample_labels(x, np.zeros(1), 4.0, seed=4)
        assert y.var() == pytest.approx(4.0, rel=0.02)

    def test_residual_independent_of_design(self):
        # empirical correlation between residuals and a fixed functional of X
        # is O(n^-1/2); 5 sigma gate
        rng = np.random.default_rng(0)
        n = 10**5
        x = rng.standard_normal((n, 3))
        w = np.array([1.0, -2.0, 0.5])
        y = sample_labels(x, w, 1.0, seed=5)
        resid = y - x @ w
        functional = x @ np.array([0.3, 0.3, 0.4])
        corr = np.corrcoef(resid, functional)[0, 1]
        assert abs(corr) < 5.0 / np.sqrt(n)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sample_labels(np.ones((3, 2)), np.zeros(3), 1.0, seed=0)


class TestStreams:
    def test_streams_are_distinct(self):
        tags = [TASK1_DESIGN, TASK1_NOISE, TASK2_DESIGN, TASK2_NOISE]
        seeds = {stream_seed(7, rep, tag) for rep in range(20) for tag in tags}
        assert len(seeds) == 80

    def test_stream_seed_stable(self):
        assert stream_seed(1, 2, 3) == stream_seed(1, 2, 3)


def test_dump_dataset(tmp_path):
    x = np.array([[1.0, 0.0], [0.0, 1.0]])
    y = np.array([0.5, -0.5])
    path = tmp_path / "data.tsv"
    dump_dataset(path, x, y)
    loaded = np.loadtxt(path, delimiter="\t")
    np.testing.assert_allclose(loaded[:, :2], x)
    np.testing.assert_allclose(loaded[:, 2], y)


class TestDataset:
    def test_row_count_invariant(self):
        from grclab.sampler import Dataset

        with pytest.raises(DimensionMismatch):
            Dataset(x=np.ones((3, 2)), y=np.ones(2), seed=0)

    def test_one_hot_query_and_dump(self, tmp_path):
        from grclab.sampler import Dataset

        s = make_spectrum([0.4, 0.6], one_hot=True)
        x = sample_one_hot_design(s, 6, seed=12)
        y = sample_labels(x, np.array([1.0, -1.0]), 0.5, seed=13)
        ds = Dataset(x=x, y=y, seed=12)
        assert ds.is_one_hot()
        assert not Dataset(x=np.full((2, 2), 0.5), y=np.zeros(2), seed=0).is_one_hot()
        path = tmp_path / "ds.tsv"
        ds.dump(path)
        loaded = np.loadtxt(path, delimiter="\t")
        np.testing.assert_allclose(loaded[:, -1], y)
