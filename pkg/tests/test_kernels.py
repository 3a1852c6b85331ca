import numpy as np

from mgpx import _kernels


def _oracle_energy_sums(x, y):
    sxy = np.sqrt(((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2)).sum()
    sxx = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2)).sum()
    syy = np.sqrt(((y[:, None, :] - y[None, :, :]) ** 2).sum(axis=2)).sum()
    return sxy, sxx, syy


def test_energy_sums_match_dense_oracle():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(73, 3))
    y = rng.normal(size=(41, 3)) + 0.5
    got = _kernels.energy_sums(x, y)
    want = _oracle_energy_sums(x, y)
    assert np.allclose(got, want, rtol=1e-12)


def test_energy_sums_active_equals_reference():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(50, 2))
    y = rng.normal(size=(60, 2))
    a = _kernels.energy_sums(x, y)
    b = _kernels.energy_sums_reference(x, y)
    assert np.allclose(a, b, rtol=1e-12)


def test_energy_reference_chunking_consistent():
    # large enough that the numpy fallback must cross chunk boundaries
    rng = np.random.default_rng(3)
    x = rng.normal(size=(3000, 2))
    y = rng.normal(size=(2900, 2))
    got = _kernels.energy_sums_reference(x, y)
    small = _kernels.energy_sums_reference(x[:100], y[:100])
    dense = _oracle_energy_sums(x[:100], y[:100])
    assert np.allclose(small, dense, rtol=1e-12)
    assert np.all(np.isfinite(got))
    assert got[0] > 0 and got[1] > 0 and got[2] > 0


def test_pairwise_matrix():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(37, 2))
    got = _kernels.pairwise_matrix(x)
    want = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2))
    assert np.allclose(got, want, rtol=1e-12)
    assert np.allclose(got, _kernels.pairwise_matrix_reference(x), rtol=1e-12)
    assert np.allclose(got, got.T)
    assert np.all(np.diag(got) == 0)


def test_exceed_counts_blocks():
    rng = np.random.default_rng(5)
    reps, per = 7, 40
    z = rng.normal(size=(reps * per, 2))
    u = np.array([0.3, 0.6])
    got = _kernels.exceed_counts(z, u, reps)
    want = np.array(
        [np.sum(np.any(z[r * per : (r + 1) * per] > u, axis=1)) for r in range(reps)]
    )
    assert np.array_equal(got, want)
    assert np.array_equal(got, _kernels.exceed_counts_reference(z, u, reps))


def test_exceed_counts_neg_inf_rows():
    z = np.array([[-np.inf, 1.0], [-np.inf, -1.0], [0.5, -np.inf], [-np.inf, -np.inf]])
    got = _kernels.exceed_counts(z, np.zeros(2), 1)
    assert got.tolist() == [2]


def test_exceed_counts_infinite_threshold():
    z = np.array([[5.0, 1.0], [0.5, -1.0]])
    got = _kernels.exceed_counts(z, np.array([1.0, np.inf]), 1)
    assert got.tolist() == [1]
