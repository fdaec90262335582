import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import jacobi_eigenvalues

from covuniv.linalg import EigenSolverError, Spectrum, eig_sym, sample_covariance, trace_power
from covuniv.linalg import _tridiagonal_ql


def test_small_examples():
    assert np.allclose(eig_sym([[2, 1], [1, 2]]).eigenvalues, [3, 1], atol=1e-15)
    assert np.allclose(eig_sym(np.eye(5)).eigenvalues, np.ones(5))
    assert eig_sym([[7.0]]).largest == 7.0


def test_against_jacobi_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.standard_normal((6, 6))
        a = a + a.T
        assert np.allclose(eig_sym(a, method="native").eigenvalues, jacobi_eigenvalues(a), atol=1e-10, rtol=0)


@pytest.mark.parametrize("n", [1, 2, 3, 17, 64, 300])
@pytest.mark.parametrize("cplx", [False, True])
def test_native_against_lapack(n, cplx):
    rng = np.random.default_rng(n)
    x = rng.standard_normal((n, 2 * n)) + (1j * rng.standard_normal((n, 2 * n)) if cplx else 0)
    m = sample_covariance(x)
    ours = eig_sym(m, method="native").eigenvalues
    ref = np.linalg.eigvalsh(m)[::-1]
    assert np.max(np.abs(ours - ref)) <= 1e-12 * max(1.0, ref[0])


def test_hermitian_reduction_complex_example():
    h = np.array([[2, 1j], [-1j, 2]])
    assert np.allclose(eig_sym(h).eigenvalues, [3, 1])


def test_degenerate_and_diagonal():
    d = np.diag([3.0, -1.0, 3.0, 0.0])
    assert np.allclose(eig_sym(d, method="native").eigenvalues, [3, 3, 0, -1])
    z = np.zeros((4, 4))
    assert np.all(eig_sym(z, method="native").eigenvalues == 0)


@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_trace_and_frobenius_conservation(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) * rng.uniform(0.01, 100)
    a = a + a.T
    ev = eig_sym(a, method="native").eigenvalues
    fro = np.linalg.norm(a)
    assert abs(ev.sum() - np.trace(a)) <= n * 1e-12 * fro
    assert abs((ev**2).sum() - fro**2) <= n * 1e-12 * fro**2
    assert np.all(np.diff(ev) <= 0)


def test_psd_floor():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((30, 10))
    m = sample_covariance(x, 30.0)  # rank 10, twenty zero eigenvalues
    ev = eig_sym(m).eigenvalues
    assert ev[-1] >= -1e-10 * np.linalg.norm(m)


def test_errors():
    with pytest.raises(ValueError):
        eig_sym(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eig_sym(np.eye(5), cap=4)
    with pytest.raises(ValueError):
        eig_sym([[np.nan]])
    with pytest.raises(ValueError):
        eig_sym(np.eye(2), method="qr")


def test_ql_iteration_cap():
    d = np.array([1.0, 2.0, 3.0])
    e = np.array([1.0, 1.0, 0.0])
    assert not _tridiagonal_ql(d, e, 0)


def test_conservation_check_raises():
    from covuniv.linalg import _check_conservation

    with pytest.raises(EigenSolverError):
        _check_conservation(np.eye(3), np.array([1.0, 1.0, 0.5]))


def test_spectrum_invariants():
    with pytest.raises(ValueError):
        Spectrum(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        Spectrum(np.array([np.inf]))


def test_sample_covariance():
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(sample_covariance(x, 2.0), x @ x.T / 2)
    rng = np.random.default_rng(2)
    x = rng.standard_normal((4, 9))
    m = sample_covariance(x)
    assert np.trace(m) == pytest.approx((x**2).sum() / 4, rel=1e-14)
    assert np.array_equal(m, m.T)
    z = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    mz = sample_covariance(z)
    assert np.array_equal(mz, mz.conj().T)
    with pytest.raises(ValueError):
        sample_covariance(rng.standard_normal((5, 3)))
    with pytest.raises(ValueError):
        sample_covariance(np.ones(3))
    with pytest.raises(ValueError):
        sample_covariance(x, -1.0)


def test_companion_spectrum():
    rng = np.random.default_rng(9)
    for trial in range(20):
        n, p = rng.integers(2, 8), rng.integers(8, 15)
        x = rng.standard_normal((n, p))
        a = eig_sym(sample_covariance(x, 3.0)).eigenvalues
        b = eig_sym(sample_covariance(x.T, 3.0)).eigenvalues[:n]
        assert np.allclose(a, b, rtol=1e-9, atol=1e-9 * a[0])


def test_trace_power():
    spec = eig_sym([[2, 1], [1, 2]])
    assert trace_power(spec, 1) == pytest.approx(4.0)
    assert trace_power(spec, 3) == 28.0
    rng = np.random.default_rng(4)
    a = rng.standard_normal((4, 4))
    a = a + a.T
    assert trace_power(eig_sym(a), 5) == pytest.approx(np.trace(np.linalg.matrix_power(a, 5)), rel=1e-9)


def test_trace_power_large_s():
    ev = Spectrum(np.array([4.0, 3.9, 1.0, 0.0, -1e-14]))
    s = 400
    val = trace_power(ev, s, scale=4.0)
    assert val == pytest.approx(1 + 0.975**s, rel=1e-12)
    assert trace_power(Spectrum(np.array([1e3, 1.0])), 200) == np.inf
    with pytest.raises(ValueError):
        trace_power(ev, 0)
    with pytest.raises(ValueError):
        trace_power(ev, 2, scale=0.0)
