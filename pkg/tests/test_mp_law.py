import numpy as np
import pytest

from oracles import mp_cdf_gamma_one

from covuniv.combinatorics import narayana
from covuniv.mp_law import (
    MPDistribution,
    mp_cdf,
    mp_cdf_array,
    mp_density,
    mp_moment_narayana,
    mp_moment_numeric,
    mp_quantile,
    mp_total_mass,
)


def test_edges():
    d = MPDistribution(4.0, 2.0)
    assert d.u_minus == pytest.approx(2.0)
    assert d.u_plus == pytest.approx(18.0)
    with pytest.raises(ValueError):
        MPDistribution(0.5)
    with pytest.raises(ValueError):
        MPDistribution(2.0, 0.0)


def test_density_support():
    d = MPDistribution(2.0)
    assert mp_density(d, d.u_minus - 0.01) == 0.0
    assert mp_density(d, d.u_plus) == 0.0
    assert mp_density(d, 3.0) > 0
    assert np.all(mp_density(d, np.linspace(-1, 8, 50)) >= 0)


@pytest.mark.parametrize("gamma", [1.0, 2.0, 4.0, 50.0])
def test_total_mass(gamma):
    assert mp_total_mass(MPDistribution(gamma)) == pytest.approx(1.0, abs=1e-10)


def test_moment_examples():
    assert mp_moment_numeric(MPDistribution(2.0), 1) == pytest.approx(2.0, rel=1e-12)
    assert mp_moment_narayana(1, 2) == 2.0
    assert mp_moment_numeric(MPDistribution(1.0), 2) == pytest.approx(2.0, rel=1e-12)
    assert mp_moment_narayana(2, 1) == 2.0
    exact = sum(4**k * narayana(6, k) for k in range(1, 7))
    assert mp_moment_narayana(6, 4) == exact
    assert mp_moment_numeric(MPDistribution(4.0), 6) == pytest.approx(exact, rel=1e-7)


def test_moment_sigma_scaling():
    d = MPDistribution(3.0, 1.7)
    assert mp_moment_numeric(d, 5) == pytest.approx(mp_moment_narayana(5, 3.0, 1.7), rel=1e-10)


def test_moment_range():
    with pytest.raises(ValueError):
        mp_moment_numeric(MPDistribution(2.0), 61)
    with pytest.raises(ValueError):
        mp_moment_narayana(0, 2)


def test_cdf_limits_and_monotone():
    d = MPDistribution(2.0)
    assert mp_cdf(d, d.u_minus) == 0.0
    assert mp_cdf(d, d.u_plus) == pytest.approx(1.0, abs=1e-9)
    grid = np.linspace(d.u_minus - 0.1, d.u_plus + 0.1, 1000)
    assert np.all(np.diff(mp_cdf_array(d, grid)) >= 0)


def test_cdf_against_closed_form():
    d = MPDistribution(1.0)
    for x in (0.01, 0.3, 1.0, 2.5, 3.9):
        assert mp_cdf(d, x) == pytest.approx(mp_cdf_gamma_one(x), abs=1e-12)


def test_median_regression():
    med = mp_quantile(MPDistribution(1.0), 0.5)
    assert med == pytest.approx(0.6527759416335357, abs=1e-10)
    assert mp_cdf_gamma_one(med) == pytest.approx(0.5, abs=1e-11)


def test_quantile_domain():
    with pytest.raises(ValueError):
        mp_quantile(MPDistribution(1.0), 1.0)
