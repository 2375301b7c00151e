import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccitest.synthetic import CI, NOT_CI, PnlConfig, gen_pnl, sample_unit_vector


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 80), seed=st.integers(0, 2**32 - 1))
def test_unit_vectors(d, seed):
    v = sample_unit_vector(d, seed)
    assert v.shape == (d,)
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dz=st.integers(1, 30), dep=st.booleans())
def test_draw_is_valid(seed, dz, dep):
    cfg = PnlConfig.draw(50, dz, dep, seed=seed)
    assert (cfg.c == 0.0) == (not dep)
    assert 0.0 <= cfg.c <= 2.0
    assert cfg.ground_truth == (NOT_CI if dep else CI)
    ds, truth = gen_pnl(cfg)
    assert truth == cfg.ground_truth
    assert ds.rows.shape == (50, dz + 2)
    assert np.all(np.abs(ds.x) <= 1.0) and np.all(np.abs(ds.y) <= 1.0)


def test_config_validation():
    a = np.array([1.0, 0.0])
    with pytest.raises(ValueError):
        PnlConfig(10, 2, False, a, np.array([1.0, 1.0]), 0.0, 0)
    with pytest.raises(ValueError):
        PnlConfig(10, 2, True, a, a, 0.0, 0)
    with pytest.raises(ValueError):
        PnlConfig(10, 2, False, a, a, 0.5, 0)
    with pytest.raises(ValueError):
        PnlConfig(10, 2, True, a, a, 2.5, 0)
    with pytest.raises(ValueError):
        PnlConfig(10, 2, False, a, a, 0.0, 0, var_eta=0.0)


def test_noiseless_identity():
    cfg = PnlConfig.draw(200, 4, True, seed=9)
    ds, _ = gen_pnl(cfg, _noiseless=True)
    z = ds.z
    x = np.cos(z @ cfg.a)
    np.testing.assert_allclose(ds.x[:, 0], x, atol=1e-12)
    np.testing.assert_allclose(ds.y[:, 0], np.cos(z @ cfg.b + cfg.c * x), atol=1e-12)


def test_deterministic_per_seed():
    a, _ = gen_pnl(PnlConfig.draw(100, 3, True, seed=5))
    b, _ = gen_pnl(PnlConfig.draw(100, 3, True, seed=5))
    c, _ = gen_pnl(PnlConfig.draw(100, 3, True, seed=6))
    np.testing.assert_array_equal(a.rows, b.rows)
    assert not np.array_equal(a.rows, c.rows)


def test_moments_large_sample():
    cfg = PnlConfig.draw(100_000, 1, False, seed=2)
    ds, _ = gen_pnl(cfg)
    z = ds.z[:, 0]
    assert abs(z.mean() - 1.0) < 0.02
    assert abs(z.var() - 1.0) < 0.02
    # E cos(W) = cos(mu) exp(-s2 / 2) for W ~ N(mu, s2); here mu = a, s2 = 1 + 0.25
    mu = cfg.a[0] * 1.0
    want = np.cos(mu) * np.exp(-(1.0 + 0.25) / 2)
    assert abs(ds.x[:, 0].mean() - want) < 0.01


def test_ci_data_has_no_partial_dependence():
    cfg = PnlConfig.draw(50_000, 1, False, seed=7)
    ds, _ = gen_pnl(cfg)
    band = np.abs(ds.z[:, 0] - 1.0) < 0.05
    r = np.corrcoef(ds.x[band, 0], ds.y[band, 0])[0, 1]
    assert abs(r) < 0.06
