import math

import numpy as np
import pytest

import flattop


def test_cumulant_examples():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert flattop.central_moment(x, [1]) == pytest.approx(0.3125)
    assert flattop.joint_cumulant(x, [0]) == pytest.approx(1.25)
    assert flattop.normalized_cumulant(x, [1]) == pytest.approx(0.25)
    assert flattop.central_moment(x, [10]) == 0.0


def test_windows():
    rpf = flattop.window("rpf:c=0.5")
    assert rpf(0.75, 0.0) == pytest.approx(0.5)
    assert flattop.window("parzen")(0.5) == pytest.approx(0.25)
    assert flattop.validate_flat_top("rpf", b=0.51, principal_sector=True).passed
    assert not flattop.validate_flat_top("opt", b=0.05).passed
    with pytest.raises(ValueError):
        flattop.window("hann")


def test_bispectrum_symmetry_and_lex_points():
    x = flattop.generate("iid", 500, seed=3)
    a, b = flattop.bispectrum(x, "rpf", 3.0, [(0.4, 1.1), (1.1, 0.4)])
    assert abs(a - b) < 1e-10
    assert tuple(flattop.lex_point(4)) == (3, 2)
    d12 = flattop.bispectrum_partial(x, "rpf", 3.0, (0.5, 0.2), 1, 2)
    d21 = flattop.bispectrum_partial(x, "rpf", 3.0, (0.5, 0.2), 2, 1)
    assert d12 == d21


def test_spectrum_and_bandwidth():
    x = flattop.generate("arma11", 2000, seed=5)
    (f,) = flattop.spectrum(x, "trapezoid", 2.0, [1.0])
    assert abs(f.imag) < 1e-12
    assert f.real == pytest.approx(1.0 / (2.0 * math.pi), rel=0.3)
    sel = flattop.select_bandwidth_general(x, k=2.0)
    assert sel.m_hat >= 1
    assert sel.M_hat == pytest.approx(sel.m_hat / 0.51)
    k = flattop.bootstrap_threshold(x, replicates=100)
    assert k > 0.0
    r = flattop.plugin_bandwidth(x, (2.0, 1.0), pilot="second-order")
    assert r["bandwidth"] >= 1


def test_models_and_errors():
    assert flattop.true_spectrum("iid", 0.0) == pytest.approx(2.0 / (2.0 * math.pi))
    assert abs(flattop.reference_bispectrum("iid", (2.0, 1.0)) - 0.202642) < 1e-6
    with pytest.raises(LookupError):
        flattop.reference_bispectrum("bilinear", (0.0, 0.0))
    with pytest.raises(ArithmeticError):
        flattop.normalized_cumulant(np.ones(20), [1])
    assert np.array_equal(flattop.generate("garch11", 100, seed=1), flattop.generate("garch11", 100, seed=1))


def test_grid_and_study():
    grid = flattop.composite_grid(5)
    assert len(grid) == 6
    assert grid[0][0] == pytest.approx(4 * math.pi / 15)
    assert flattop.parse_frequency("2pi/3") == pytest.approx(2 * math.pi / 3)
    csv = flattop.run_mse_study(["iid"], ["rpf"], [200], 2)
    assert "abs@origin" in csv
