import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covuniv.ensembles import EnsembleConfig, sample_matrix
from covuniv.linalg import eig_sym, sample_covariance, trace_power
from covuniv.rescaling import (
    gamma_inf_normalizers,
    rescale,
    rescale_adjusted,
    rescale_basic,
    rescale_companion,
    rescale_gamma_inf,
    u_plus,
)

dims = st.tuples(st.integers(1, 5000), st.integers(0, 5000)).map(lambda t: (t[0], t[0] + t[1]))


def test_basic_centering_and_pinned():
    assert rescale_basic(2.0 * (1 + np.sqrt(3)) ** 2, 10, 30, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert rescale_basic(4.1, 100, 100, 1.0) == pytest.approx(0.8549879733383485, rel=1e-13)


@given(dims, st.floats(0.1, 10), st.floats(0, 50))
@settings(max_examples=1000, deadline=None)
def test_adjusted_zero_shift_is_basic(nd, sigma2, lam):
    N, p = nd
    a = rescale_adjusted(lam, N, p, sigma2, 0.0, 0.0)
    b = rescale_basic(lam, N, p, sigma2)
    # closed form shared by both
    c = (N * p) ** (1 / 6) * (N * lam - sigma2 * (np.sqrt(N) + np.sqrt(p)) ** 2) / (sigma2 * (np.sqrt(N) + np.sqrt(p)) ** (4 / 3))
    scale = max(abs(b), (N * p) ** (1 / 6) * sigma2 * (np.sqrt(N) + np.sqrt(p)) ** (2 / 3) / sigma2)
    assert abs(a - b) <= 1e-12 * scale
    assert abs(c - b) <= 1e-12 * scale


def test_adjusted_centering_and_pinned():
    N, p, a = 50, 200, -0.5
    centre = (np.sqrt(N + a) + np.sqrt(p + a)) ** 2 / N
    assert rescale_adjusted(centre, N, p, 1.0, a, a) == pytest.approx(0.0, abs=1e-12)
    assert rescale_adjusted(u_plus(N, p), N, p, 1.0, a, a) == pytest.approx(0.17817937980502867, rel=1e-12)
    with pytest.raises(ValueError):
        rescale_adjusted(1.0, 1, 10, 1.0, -1.0, 0.0)


@given(dims, st.floats(0.1, 10), st.floats(-2, 2), st.floats(0, 20), st.floats(1e-3, 5))
@settings(max_examples=300, deadline=None)
def test_monotone(nd, sigma2, a, lam, dl):
    N, p = nd
    assert rescale_basic(lam + dl, N, p, sigma2) > rescale_basic(lam, N, p, sigma2)
    assert rescale_companion(lam + dl, N, p, sigma2) > rescale_companion(lam, N, p, sigma2)
    if N + a > 0:
        assert rescale_adjusted(lam + dl, N, p, sigma2, a, a) > rescale_adjusted(lam, N, p, sigma2, a, a)


def test_companion():
    assert rescale_companion(2 * (1 + np.sqrt(0.25)) ** 2, 10, 40, 2.0) == pytest.approx(0.0, abs=1e-12)
    for lam in (3.0, 4.0, 4.7):
        assert rescale_companion(lam, 60, 60, 1.3) == pytest.approx(rescale_basic(lam, 60, 60, 1.3), rel=1e-13)
    x = np.array([[1, 2, 0, -1, 3], [0, 1, 1, 2, -1], [2, -1, 1, 0, 1]], float)
    lam = eig_sym(sample_covariance(x.T, 5.0)).largest
    assert lam == pytest.approx(3.4, rel=1e-14)
    assert rescale_companion(lam, 3, 5, 1.0) == pytest.approx(0.3134811244364468, rel=1e-12)
    with pytest.raises(ValueError):
        rescale_companion(1.0, 5, 3)


def test_gamma_inf():
    v, s = gamma_inf_normalizers(50, 50, 1.7)
    assert v == pytest.approx(u_plus(50, 50, 1.7))
    v, s = gamma_inf_normalizers(50, 5000, 1.0)
    assert v == pytest.approx(1.21, rel=1e-14)
    assert s == pytest.approx(10 * 50 ** (2 / 3))
    with pytest.raises(ValueError):
        gamma_inf_normalizers(10, 5)


def test_pathwise_trace_identity():
    cfg = EnsembleConfig(20, 300, dist="mix", master_seed=1)
    x = sample_matrix(cfg, 0)
    s = 25
    gamma = cfg.p / cfg.N
    lhs = trace_power(eig_sym(sample_covariance(x, "p")), s)
    rhs = gamma ** (-s) * trace_power(eig_sym(sample_covariance(x, "N")), s)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_dispatch():
    assert rescale(5.0, 10, 20, 1.0, "basic") == rescale_basic(5.0, 10, 20, 1.0)
    assert rescale(5.0, 10, 20, 1.0, "adjusted", -0.5, -0.5) == rescale_adjusted(5.0, 10, 20, 1.0, -0.5, -0.5)
    assert rescale(2.5, 10, 20, 1.0, "gammainf") == pytest.approx(rescale_basic(5.0, 10, 20, 1.0))
    assert rescale_gamma_inf(2.5, 10, 20) == pytest.approx(rescale_basic(5.0, 10, 20))
    with pytest.raises(ValueError):
        rescale(1.0, 1, 1, 1.0, "other")


def test_array_input():
    out = rescale_basic(np.array([3.0, 4.0]), 10, 10)
    assert out.shape == (2,) and out[0] < out[1]
