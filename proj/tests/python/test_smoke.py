import math

import numpy as np
import pytest

import mfilm


def test_critical_point():
    c = mfilm.critical_point(12.0, 0.1865184573)
    assert c["regime"] == "monotonic"
    assert abs(c["M_star"] - 8.5144749311) < 1e-8
    assert abs(c["k_star"] - 1.2843299054) < 1e-8
    a0, _ = mfilm.dispersion_coeffs(c["k_star"], 12.0, 0.1865184573, c["M_star"])
    assert abs(a0) < 1e-8
    lp, lm = mfilm.growth_rates(0.0, 12.0, 0.1865184573, 3.0)
    assert abs(lp) < 1e-15
    assert lm.real == pytest.approx(-0.1865184573)


def test_coefficients():
    sq = mfilm.coefficients("square", 12.0, 0.1865184573)
    assert sq["K0"] == pytest.approx(-1.242999, rel=1e-5)
    assert sq["K1"] == pytest.approx(-12.771712, rel=1e-5)
    assert sq["kappa"] == pytest.approx(mfilm.kappa(12.0, 0.1865184573))
    hx = mfilm.coefficients("hex", 12.0, mfilm.beta_on_curve(12.0))
    assert abs(hx["N"]) < 1e-9
    assert hx["K0"] == pytest.approx(sq["K0"], rel=1e-6)


def test_reduced_orbit():
    rp = mfilm.square_regime("b")
    labels = {fp["label"] for fp in mfilm.fixed_points(rp)}
    assert {"T", "R", "S"} <= labels
    orbit = mfilm.heteroclinic(rp, "S", "R")
    s = orbit["samples"]
    assert s.shape[1] == 3
    assert np.all(np.diff(s[:, 0]) > 0)
    assert orbit["gap"] < 1e-5
    end = orbit["target"]["position"]
    assert np.hypot(s[-1, 1] - end[0], s[-1, 2] - end[1]) < 1e-5
    with pytest.raises(mfilm.ConnectionNotFound):
        mfilm.heteroclinic(rp, "T", "T")


def test_pattern_and_simulation():
    pf = mfilm.pattern_field("roll", 12.0, 0.1865184573, 1e-3, 1.0, nx=16, ny=4)
    h, th = pf["h"], pf["theta"]
    assert h.shape == (16, 4)
    assert np.allclose(h[:, 0], h[:, 1])
    assert pf["metadata"]["branch"] == "roll"
    M = 8.5144749313 + 1e-3
    out = mfilm.simulate(h, th, pf["Lx"], pf["Ly"], 12.0, 0.1865184573, M, dt=0.1, t_end=2.0, output_every=5)
    assert len(out["t"]) == 5
    assert np.max(np.abs(out["mean_h"] - out["mean_h"][0])) < 1e-12
    flat = np.ones((8, 8))
    res = mfilm.simulate(flat, flat, 5.0, 5.0, 12.0, 0.2, 9.0, dt=1.0, t_end=3.0)
    assert np.all(res["h"] == 1.0)


def test_errors():
    with pytest.raises(mfilm.DomainError):
        mfilm.critical_point(-1.0, 0.2)
    with pytest.raises(mfilm.UsageError):
        mfilm.coefficients("triangle", 12.0, 0.2)
    with pytest.raises(ValueError):
        mfilm.coefficients("square", 12.0, 0.2, norm="x")
    assert len(mfilm.acceptance_ids()) >= 10
    assert math.isfinite(mfilm.kappa(12.0, 0.2))
