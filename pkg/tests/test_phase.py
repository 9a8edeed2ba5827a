import csv
import io
import math

import mpmath
import numpy as np
import pytest

from sixvertex.phase import (
    SCAN_COLUMNS,
    F_C,
    OutsideParameterization,
    PhasePoint,
    coords_to_gamma_t,
    f1_closed,
    f1_printed,
    f_AF,
    f_D,
    free_energy,
    free_energy_AF,
    free_energy_AF_reg,
    free_energy_AF_sing,
    free_energy_D,
    free_energy_FD,
    free_energy_ferroelectric,
    gamma_t_to_coords,
    g_AF,
    g_D,
    nome,
    phase_scan,
    scan_to_csv,
    small_y_law,
    taylor_match,
    theta1,
    theta1_prime0,
    theta4,
)
from sixvertex.asymptotics import free_energy_F


def _mp_theta(n, z, q):
    with mpmath.workdps(40):
        return mpmath.jtheta(n, z, q)


# --- phase points ---------------------------------------------------------------


def test_phase_point_tags():
    assert PhasePoint(0.2, 0.0).tag == "critical"
    assert PhasePoint(0.2, 0.01).tag == "D"
    assert PhasePoint(0.2, -0.01).tag == "AF"
    p = PhasePoint(0.3, 0.02)
    assert p.a_over_c == pytest.approx(0.37) and p.b_over_c == pytest.approx(0.67)
    assert PhasePoint(0.3, 0.0).delta == pytest.approx(-1, abs=1e-15)


# --- coordinates ----------------------------------------------------------------


def test_critical_line_limit():
    gt = coords_to_gamma_t(0.4, 0.0)
    assert (gt.gamma, gt.t, gt.phase) == (0.0, 0.0, "critical")
    gt = coords_to_gamma_t(0.4, 1e-14)
    assert gt.gamma < 1e-6 and abs(gt.t) < 1e-6


def test_x0_disordered():
    y = 0.03
    gt = coords_to_gamma_t(0.0, y)
    assert gt.t == 0
    assert math.sin(gt.gamma) == pytest.approx(2 * math.sqrt(y * (1 + y)) / (1 + 2 * y), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, 0.5, -0.8])
def test_defining_relations(x):
    d = coords_to_gamma_t(x, 0.02)
    assert math.sin(d.t) == pytest.approx(x * math.sin(d.gamma), abs=1e-15)
    a = coords_to_gamma_t(x, -0.02)
    assert math.sinh(a.t) == pytest.approx(x * math.sinh(a.gamma), abs=1e-15)
    assert abs(d.t) < d.gamma and abs(a.t) < a.gamma


@pytest.mark.parametrize("x", [0.0, 0.3, -0.6, 0.85])
@pytest.mark.parametrize("y", [1e-6, 1e-3, 0.04, -1e-6, -1e-3, -0.04])
def test_round_trip(x, y):
    gt = coords_to_gamma_t(x, y)
    xx, yy = gamma_t_to_coords(gt.gamma, gt.t, gt.phase)
    assert abs(xx - x) < 1e-12 and abs(yy - y) < 1e-12


@pytest.mark.parametrize("x", [0.0, 0.4, -0.7])
def test_small_y_law(x):
    for y in (1e-4, -1e-4):
        gt = coords_to_gamma_t(x, y)
        g0, t0 = small_y_law(x, y)
        assert abs(gt.gamma / g0 - 1) < 5e-4
        if x:
            assert abs(gt.t / t0 - 1) < 5e-4
    # the relative error of the leading law shrinks linearly in y
    e1 = abs(coords_to_gamma_t(x, 1e-3).gamma / small_y_law(x, 1e-3)[0] - 1)
    e2 = abs(coords_to_gamma_t(x, 1e-4).gamma / small_y_law(x, 1e-4)[0] - 1)
    assert 5 < e1 / e2 < 20


def test_parity_relations():
    for x in (0.0, 0.35, -0.6):
        for k in (0.05, 0.12):
            assert abs(f_D(x, -k) + f_D(x, k)) < 1e-15
            assert abs(f_AF(x, k) + 1j * f_D(x, 1j * k)) < 1e-14
            assert abs(g_AF(x, k) + 1j * g_D(x, 1j * k)) < 1e-14


def test_outside_parameterization():
    with pytest.raises(OutsideParameterization):
        coords_to_gamma_t(0.0, -0.6)
    with pytest.raises(OutsideParameterization):
        coords_to_gamma_t(0.5, -0.3)
    with pytest.raises(ValueError):
        gamma_t_to_coords(0.1, 0.0, "F")


# --- theta functions ------------------------------------------------------------


@pytest.mark.parametrize("q", [1e-4, 0.05, 0.3, 0.5])
@pytest.mark.parametrize("z", [0.2, 1.1, 2.9])
def test_theta_against_mpmath(q, z):
    assert theta1(z, q) == pytest.approx(float(_mp_theta(1, z, q)), rel=1e-13, abs=1e-15)
    assert theta4(z, q) == pytest.approx(float(_mp_theta(4, z, q)), rel=1e-13)


def test_theta_parity_and_zero():
    q = 0.2
    assert theta1(0.0, q) == 0
    assert theta1(-0.7, q) == -theta1(0.7, q)
    assert theta4(-0.7, q) == theta4(0.7, q)
    assert abs(theta4(0.9, 1e-12) - 1) < 1e-11


def test_theta1_prime0():
    for q in (1e-3, 0.1, 0.4):
        with mpmath.workdps(40):
            ref = float(mpmath.jtheta(1, 0, q, derivative=1))
        assert theta1_prime0(q) == pytest.approx(ref, rel=1e-13)
    q = 1e-4
    dev = abs(theta1_prime0(q) / (2 * q**0.25) - 1)
    # the first correction is exactly -3 q^2
    assert dev < 3 * q**2 * 1.001 and dev > 3 * q**2 * 0.999


def test_theta_small_q_law():
    for q in (1e-2, 5e-2, 9e-2):
        for z in (0.3, 1.4, 2.5):
            assert abs(theta1(z, q) - 2 * q**0.25 * math.sin(z)) <= 2 * q**2.25


@pytest.mark.parametrize("q", [0.01, 0.2, 0.5])
def test_theta_truncation(q):
    for f, args in ((theta1, (0.8, q)), (theta4, (0.8, q)), (theta1_prime0, (q,))):
        assert abs(f(*args, extra_terms=2) - f(*args)) < 1e-25


def test_theta_domain():
    with pytest.raises(ValueError):
        theta1(0.1, 1.0)


# --- free energies --------------------------------------------------------------


def test_F_C_examples():
    assert F_C(0.0) == pytest.approx(math.pi / 4, rel=1e-15)
    for x in (0.0, 0.3, -0.77):
        assert F_C(x) == pytest.approx(free_energy_F(x) / 2, rel=1e-15)
    assert free_energy(0.3, 0.0) == F_C(0.3)


@pytest.mark.parametrize("x", [0.0, 0.5, -0.3])
def test_continuity_at_critical_line(x):
    for y in (1e-8, 1e-7):
        assert abs(free_energy_D(x, y) - F_C(x)) < 2 * abs(f1_closed(x)) * y
        assert abs(free_energy_AF_reg(x, -y) - F_C(x)) < 2 * abs(f1_closed(x)) * y
    # slope of the approach is f1
    y = 1e-6
    assert (free_energy_D(x, y) - F_C(x)) / y == pytest.approx(f1_closed(x), rel=1e-4)


def test_D_even_in_x():
    assert free_energy_D(0.4, 0.01) == pytest.approx(free_energy_D(-0.4, 0.01), rel=1e-15)


def test_wrong_side():
    with pytest.raises(ValueError):
        free_energy_D(0.1, -0.01)
    with pytest.raises(ValueError):
        free_energy_AF_reg(0.1, 0.01)
    with pytest.raises(ValueError):
        free_energy_AF_sing(0.1, 0.01)


def _y_for_gamma(gamma, x=0.0):
    t = math.asinh(x * math.sinh(gamma))
    return gamma_t_to_coords(gamma, t, "AF")[1]


def test_F_sing_example():
    y = _y_for_gamma(0.5)
    s = free_energy_AF_sing(0.0, y)
    assert s.gamma == pytest.approx(0.5, rel=1e-12)
    assert abs(s.value) < 10 * math.exp(-2 * math.pi**2)


@pytest.mark.parametrize("x", [0.0, 0.3])
def test_F_sing_decay_bound(x):
    bounds = []
    for g in np.linspace(0.2, 1.0, 9):
        s = free_energy_AF_sing(x, _y_for_gamma(g, x))
        bounds.append(math.log(abs(s.value)) + math.pi**2 / s.gamma)
    assert max(bounds) < 2.0


def test_F_sing_matches_direct_difference():
    y = _y_for_gamma(1.0)
    direct = free_energy_AF(0.0, y) - free_energy_AF_reg(0.0, y)
    s = free_energy_AF_sing(0.0, y).value
    assert direct == pytest.approx(s, rel=1e-3)


def test_F_sing_faster_than_any_power():
    ys = [-1e-2, -3e-3, -1e-3]
    vals = [abs(free_energy_AF_sing(0.0, y).value) for y in ys]
    # |F_sing| / |y|^k still decreases for k = 10
    r = [v / abs(y) ** 10 for v, y in zip(vals, ys)]
    assert r[0] > r[1] > r[2]


def test_F_sing_underflow():
    s = free_energy_AF_sing(0.0, -1e-6)
    assert s.underflow and s.value == 0.0


def test_theta_ratio_law():
    y = _y_for_gamma(0.8, 0.2)
    gt = coords_to_gamma_t(0.2, y)
    q = nome(gt.gamma)
    omega = math.pi / 2 * (1 + gt.t / gt.gamma)
    excess = theta1_prime0(q) / theta1(omega, q) - 1 / math.cos(math.pi * gt.t / (2 * gt.gamma))
    assert abs(excess) < 10 * q**2


# --- Taylor matching -----------------------------------------------------------------


@pytest.mark.parametrize("x", [0.0, 1 / 3, 0.6, -0.6])
def test_taylor_match_corrected(x):
    tm = taylor_match(x)
    assert tm.f0_error < 1e-8
    assert tm.f1_error < 1e-6
    assert tm.side_mismatch < 1e-6


def test_f1_by_hand_at_zero():
    assert f1_closed(0.0) == pytest.approx(math.pi / 3, rel=1e-15)
    assert f1_printed(0.0) - f1_closed(0.0) == pytest.approx(math.pi / 3, rel=1e-15)


def test_f1_closed_vs_mpmath_derivative():
    # derivative of F_D at y = 0+ by high-precision extrapolation-free differencing
    x = 0.45
    with mpmath.workdps(50):

        def FD(y):
            y = mpmath.mpf(y)
            s = 2 * mpmath.sqrt(y * (1 + y) / ((1 + 2 * y) ** 2 - x * x))
            g = mpmath.asin(s)
            t = mpmath.asin(x * s)
            return mpmath.pi * ((0.5 + y) ** 2 - x * x / 4) * mpmath.sin(2 * g) / (2 * g * mpmath.cos(mpmath.pi * t / (2 * g)))

        h = mpmath.mpf(10) ** -20
        d = (FD(h) - mpmath.pi * (1 - x * x) / (4 * mpmath.cos(mpmath.pi * x / 2))) / h
    assert f1_closed(x) == pytest.approx(float(d), rel=1e-12)


def test_taylor_match_domain():
    with pytest.raises(ValueError):
        taylor_match(0.95)


# --- prior-work evaluators and scans ----------------------------------------------------


def test_formula_evaluators():
    r = free_energy_ferroelectric(0.2, 0.5)
    assert r["F"] == pytest.approx(math.sinh(0.7))
    r = free_energy_FD(2.0)
    assert r["F"] == 1.5 and 0 < r["G"] < 1
    with pytest.raises(ValueError):
        free_energy_FD(0.5)


def test_phase_scan_csv():
    rows = phase_scan([0.0, 0.5], [-0.01, 0.0, 0.01])
    assert len(rows) == 6
    text = scan_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == SCAN_COLUMNS
    assert [r[-1] for r in parsed[1:4]] == ["AF", "critical", "D"]
    for r in rows:
        assert r[5] == pytest.approx(r[6] + r[7])
