import cmath
import math

import mpmath
import numpy as np
import pytest

from sixvertex import equilibrium as eq
from sixvertex.rhp import (
    ARH_SECTOR_FACTORS,
    LEFT_RAY_JUMPS,
    RIGHT_RAY_JUMPS,
    EdgeMap,
    ModelSolution,
    airy,
    airy_A0,
    airy_ARH,
    airy_ARH_left,
    arh_asymptotic_residual,
    arh_left_asymptotic_residual,
    delta,
    edge_map,
    matching_scaling,
    model_M,
    parametrix_match,
    ray_jump_residual,
    wronskian_A0,
)

JUMP = np.array([[0, 1], [-1, 0]])

# --- model solution -----------------------------------------------------------


@pytest.mark.parametrize("x", [0.0, 0.4, -0.75])
@pytest.mark.parametrize("z", [2 + 1j, -3 - 0.5j, 27.5, -31.0, 0.3j])
def test_det_M(x, z):
    assert abs(np.linalg.det(model_M(z, x)) - 1) < 1e-12


def test_det_M_at_twice_beta():
    x = 0.2
    assert abs(np.linalg.det(model_M(2 * eq.endpoints(x).beta, x)) - 1) < 1e-12


def test_M_at_infinity():
    for z in (1e8, 1e8j, -1e8 + 1j):
        assert np.abs(model_M(z, 0.3) - np.eye(2)).max() < 1e-7


@pytest.mark.parametrize("x", [0.0, 0.5, -0.3])
@pytest.mark.parametrize("frac", [0.05, 0.3, 0.5, 0.77, 0.98])
def test_M_jump_on_cut(x, frac):
    e = eq.endpoints(x)
    z = e.alpha + frac * e.width
    Mp, Mm = model_M(z, x, "+"), model_M(z, x, "-")
    assert np.abs(Mp - Mm @ JUMP).max() < 1e-10


def test_M_on_cut_requires_side():
    with pytest.raises(ValueError):
        model_M(0.5, 0.0)


def test_delta_limits():
    x = 0.1
    assert abs(delta(1e9, x) - 1) < 2e-9
    assert ModelSolution(x).delta(3 + 2j) == delta(3 + 2j, x)
    np.testing.assert_allclose(ModelSolution(x).M(3 + 2j), model_M(3 + 2j, x))


# --- Airy functions -------------------------------------------------------------

AIRY_POINTS = [
    0.0, 1.0, -1.0, 2.5, -4.0, 1j, 3 + 4j, -3 - 4j, 5 * cmath.exp(2j),
    10.0, -10.0, 10j, 7 - 7j, -12 + 5j, 20 * cmath.exp(0.5j), 25 * cmath.exp(2.2j),
    30.0, -30.0, 30 * cmath.exp(-1j), 28 * cmath.exp(2.9j),
]


@pytest.mark.parametrize("z", AIRY_POINTS)
def test_airy_against_mpmath(z):
    with mpmath.workdps(30):
        ref = complex(mpmath.airyai(mpmath.mpc(z)))
        refp = complex(mpmath.airyai(mpmath.mpc(z), derivative=1))
    ai, aip = airy(z)
    assert abs(ai - ref) <= 1e-12 * abs(ref)
    assert abs(aip - refp) <= 1e-12 * abs(refp)


def test_airy_connection_identity():
    w = cmath.exp(2j * math.pi / 3)
    for z in (0.7 + 0.2j, -2 + 1j, 3.5j):
        s = airy(z)[0] + w * airy(w * z)[0] + w.conjugate() * airy(w.conjugate() * z)[0]
        assert abs(s) < 1e-14


def test_wronskian_constant():
    with mpmath.workdps(30):
        a0, a1 = mpmath.airyai(0), mpmath.airyai(0, derivative=1)
    c, W = cmath.exp(1j * math.pi / 3), cmath.exp(-2j * math.pi / 3)
    ref = complex(a1) * c * complex(a0) - complex(a0) * c * W * complex(a1)
    assert abs(ref + 1j / (2 * math.pi)) < 1e-15
    for z in (0.5, -1 + 2j, 3j, -4.0, 2 - 2j, 1 + 1j, -0.3 - 0.1j, 4.0, -2 - 3j, 0.1j):
        assert abs(wronskian_A0(z) - ref) < 1e-9


def test_det_ARH_constant_across_sectors():
    dets = [np.linalg.det(airy_ARH(3 * cmath.exp(1j * t))) for t in (0.5, 1.5, 2.5, -0.5, -1.5, -2.5)]
    assert max(abs(d - dets[0]) for d in dets) < 1e-9


def test_sector_factor_consistency():
    z = 1.7 * cmath.exp(0.4j)
    assert np.abs(airy_ARH(z) - airy_A0(z)).max() < 1e-14
    assert len(ARH_SECTOR_FACTORS) == 4


@pytest.mark.parametrize("which,jumps", [("right", RIGHT_RAY_JUMPS), ("left", LEFT_RAY_JUMPS)])
@pytest.mark.parametrize("radius", [0.5, 1.3, 2.7, 5.0])
def test_ray_jumps(which, jumps, radius):
    for angle in jumps:
        assert ray_jump_residual(which, angle, radius) < 1e-8


def test_jump_on_negative_axis_matrix():
    assert np.array_equal(RIGHT_RAY_JUMPS[math.pi], np.array([[0, -1], [1, 0]]))


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5, 3.0, -0.3, -1.0, -2.5, -3.0])
def test_ARH_asymptotics(t):
    z = 20 * cmath.exp(1j * t)
    assert arh_asymptotic_residual(z) < 10 * 20.0**-3


@pytest.mark.parametrize("t", [0.5, 1.5, 3.5, 5.5, 2.5, 4.5])
def test_ARH_left_asymptotics(t):
    z = 20 * cmath.exp(1j * t)
    assert arh_left_asymptotic_residual(z) < 10 * 20.0**-3


def test_asymptotic_residual_decays():
    r1 = arh_asymptotic_residual(10 * cmath.exp(1.1j))
    r2 = arh_asymptotic_residual(40 * cmath.exp(1.1j))
    assert r2 < r1 / 30  # O(zeta^{-3})


def test_left_on_ray_rejected():
    with pytest.raises(ValueError):
        airy_ARH_left(2.0)


# --- edge maps ------------------------------------------------------------------


def test_edge_map_vanishes_at_edge():
    assert edge_map("right", eq.endpoints(0.0).beta, 10, 0.0) == 0
    assert edge_map("left", eq.endpoints(0.3).alpha, 10, 0.3) == 0


def test_linear_coefficient_x0():
    m = EdgeMap("right", 10, 0.0)
    assert m.linear_coefficient == pytest.approx((20 / (math.pi * math.sqrt(2 * math.pi))) ** (2 / 3), rel=1e-14)


@pytest.mark.parametrize("side", ["right", "left"])
@pytest.mark.parametrize("x", [0.0, 0.4, -0.6])
def test_edge_map_conformal(side, x):
    m = EdgeMap(side, 12, x)
    d = cmath.exp(0.7j)

    def ratio(t):
        return edge_map(side, m.edge + t * d, 12, x) / (t * d)

    # Richardson removes the O(t) term
    est = 2 * ratio(1e-4) - ratio(2e-4)
    assert abs(est - m.linear_coefficient) < 1e-6 * m.linear_coefficient


def test_edge_map_real_positive_right_of_beta():
    x = 0.2
    b = eq.endpoints(x).beta
    for t in (0.05, 0.2, 0.4):
        zeta = edge_map("right", complex(b + t, 1e-13), 8, x)
        assert zeta.real > 0 and abs(zeta.imag) < 1e-9 * zeta.real


def test_edge_map_real_negative_left_of_alpha():
    a = eq.endpoints(0.0).alpha
    zeta = edge_map("left", complex(a - 0.2, 1e-13), 8, 0.0)
    assert zeta.real < 0 and abs(zeta.imag) < 1e-9 * abs(zeta.real)


def test_edge_map_domain():
    b = eq.endpoints(0.0).beta
    with pytest.raises(ValueError):
        edge_map("right", b + 1.0j, 10, 0.0)
    with pytest.raises(ValueError):
        edge_map("middle", b, 10, 0.0)


# --- parametrix matching ---------------------------------------------------------


@pytest.fixture(scope="module")
def scaling_x0():
    return {s: matching_scaling(s, 0.0) for s in ("right", "left")}


def test_matching_halves(scaling_x0):
    for reps in scaling_x0.values():
        for rep in reps[1:]:
            assert 0.4 <= rep.scaling_ratio <= 0.6


def test_matching_structure(scaling_x0):
    for reps in scaling_x0.values():
        assert reps[-1].N == 80
        assert reps[-1].max_structure_error < 0.2


def test_matching_left_right_symmetric(scaling_x0):
    for r, l in zip(scaling_x0["right"], scaling_x0["left"]):
        assert l.max_residual == pytest.approx(r.max_residual, rel=1e-8)


def test_matching_report_json():
    rep = parametrix_match("right", 20, 0.3)
    d = rep.to_dict()
    assert set(d) >= {"side", "N", "x", "radius", "max_residual", "scaling_ratio"}


def test_matching_radius_bound():
    with pytest.raises(ValueError):
        parametrix_match("right", 20, 0.0, circle_radius=0.6)
