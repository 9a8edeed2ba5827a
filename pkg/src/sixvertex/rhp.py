"""Model Riemann-Hilbert objects: outer solution, Airy parametrices, edge maps.

These are evaluators only.  They exist so the jump and matching relations the
steepest-descent analysis relies on can be checked numerically at double
precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import equilibrium as eq

I2 = np.eye(2, dtype=complex)
SIGMA3 = np.diag([1.0, -1.0]).astype(complex)
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)
JUMP_CUT = np.array([[0, 1], [-1, 0]], dtype=complex)
_P = np.array([[-1j, 1j], [1, 1]], dtype=complex)
_ASY = np.array([[-1, 1j], [1, 1j]], dtype=complex)
_ASY_LEFT = np.array([[1, -1j], [1, 1j]], dtype=complex)
_W = cmath.exp(-2j * math.pi / 3)


def _diag_pow(base: complex, power: float) -> np.ndarray:
    v = base**power
    return np.diag([v, 1 / v])


def airy(z: complex) -> tuple[complex, complex]:
    """``(Ai(z), Ai'(z))`` for complex ``z`` (AMOS, via scipy)."""
    ai, aip, _, _ = special.airy(complex(z))
    return complex(ai), complex(aip)


# ---------------------------------------------------------------------------
# outer model solution
# ---------------------------------------------------------------------------


def delta(z: complex, x: float, side: str | None = None) -> complex:
    """``((z - alpha)/(z - beta))^{1/4}``, cut on ``[alpha, beta]``, -> 1 at infinity."""
    e = eq.endpoints(x)
    z = complex(z)
    if side is not None:
        z = complex(z.real, eq.EPS_BOUNDARY if side == "+" else -eq.EPS_BOUNDARY)
    elif z.imag == 0.0 and e.alpha <= z.real <= e.beta:
        raise ValueError("z on [alpha, beta]: request side='+' or side='-'")
    # product of principal fourth roots has its cut exactly on [alpha, beta]
    return (z - e.alpha) ** 0.25 / (z - e.beta) ** 0.25


def model_M(z: complex, x: float, side: str | None = None) -> np.ndarray:
    d = delta(z, x, side)
    s, t = (d + 1 / d) / 2, (d - 1 / d) / 2
    return np.array([[s, 1j * t], [-1j * t, s]], dtype=complex)


@dataclass(frozen=True)
class ModelSolution:
    x: float

    def M(self, z: complex, side: str | None = None) -> np.ndarray:
        return model_M(z, self.x, side)

    def delta(self, z: complex, side: str | None = None) -> complex:
        return delta(z, self.x, side)


# ---------------------------------------------------------------------------
# Airy model problems
# ---------------------------------------------------------------------------


def airy_A0(zeta: complex) -> np.ndarray:
    zeta = complex(zeta)
    ai, aip = airy(zeta)
    bi, bip = airy(_W * zeta)
    c = cmath.exp(1j * math.pi / 3)
    return np.array([[aip, c * _W * bip], [ai, c * bi]], dtype=complex)


_OMEGA = cmath.exp(2j * math.pi / 3)
_C = cmath.exp(1j * math.pi / 3)

# Columns of A^RH sector by sector as ``coef * (r Ai'(r zeta), Ai(r zeta))``.
# These equal A0 times the constant sector factors below, rewritten with
# Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0 so that no column is formed as a
# difference of exponentially large terms.
_ARH_COLUMNS = (
    # (arg lower, arg upper, (coef, r) col 1, (coef, r) col 2)
    (0.0, 2 * math.pi / 3, (1, 1), (_C, _W)),
    (2 * math.pi / 3, math.pi + 1e-15, (-_OMEGA, _OMEGA), (_C, _W)),
    (-2 * math.pi / 3, 0.0, (1, 1), (_OMEGA, _OMEGA)),
    (-math.pi, -2 * math.pi / 3, (_C, _W), (_OMEGA, _OMEGA)),
)

ARH_SECTOR_FACTORS = (
    # right factor F with A^RH = A0 F on each sector (reference form)
    (0.0, 2 * math.pi / 3, I2),
    (2 * math.pi / 3, math.pi, np.array([[1, 0], [-1, 1]], dtype=complex)),
    (-2 * math.pi / 3, 0.0, np.array([[1, -1], [0, 1]], dtype=complex)),
    (-math.pi, -2 * math.pi / 3, np.array([[0, -1], [1, 1]], dtype=complex)),
)


def _column(zeta: complex, coef: complex, r: complex) -> tuple[complex, complex]:
    ai, aip = airy(r * zeta)
    return coef * r * aip, coef * ai


def airy_ARH(zeta: complex) -> np.ndarray:
    """Right-edge Airy model solution, sector by sector in ``arg zeta``."""
    zeta = complex(zeta)
    th = cmath.phase(zeta)
    for lo, hi, c1, c2 in _ARH_COLUMNS:
        if lo < th < hi:
            a, b = _column(zeta, *c1), _column(zeta, *c2)
            return np.array([[a[0], b[0]], [a[1], b[1]]], dtype=complex)
    raise ValueError(f"zeta={zeta} lies on a jump ray of A^RH")


def airy_A0_left(zeta: complex) -> np.ndarray:
    zeta = complex(zeta)
    return -SWAP @ SIGMA3 @ airy_A0(cmath.exp(-1j * math.pi) * zeta) @ SIGMA3


LEFT_SECTOR_FACTORS = (
    # args measured in (0, 2 pi); left model = A0_left F
    (0.0, math.pi / 3, np.array([[0, 1], [-1, 1]], dtype=complex)),
    (math.pi / 3, math.pi, np.array([[1, 1], [0, 1]], dtype=complex)),
    (math.pi, 5 * math.pi / 3, I2),
    (5 * math.pi / 3, 2 * math.pi, np.array([[1, 0], [1, 1]], dtype=complex)),
)


def _arg_0_2pi(zeta: complex) -> float:
    th = cmath.phase(zeta)
    return th + 2 * math.pi if th < 0 else th


def airy_ARH_left(zeta: complex) -> np.ndarray:
    """Left-edge Airy model solution; sectors use ``arg zeta`` in ``(0, 2 pi)``.

    Equal to ``-(swap) sigma3 A^RH(e^{-i pi} zeta) sigma3``, which reproduces
    the sector factors in :data:`LEFT_SECTOR_FACTORS` applied to
    :func:`airy_A0_left`.
    """
    zeta = complex(zeta)
    th = _arg_0_2pi(zeta)
    if th in (0.0, math.pi / 3, math.pi, 5 * math.pi / 3):
        raise ValueError(f"zeta={zeta} lies on a jump ray of the left model problem")
    s = abs(zeta) * cmath.exp(1j * (th - math.pi))
    return -SWAP @ SIGMA3 @ airy_ARH(s) @ SIGMA3


RIGHT_RAY_JUMPS = {
    # ray angle -> jump matrix J with A_+ = A_- J, rays oriented away from 0
    2 * math.pi / 3: np.array([[1, 0], [-1, 1]], dtype=complex),
    0.0: np.array([[1, 1], [0, 1]], dtype=complex),
    -2 * math.pi / 3: np.array([[1, 0], [-1, 1]], dtype=complex),
    math.pi: np.array([[0, -1], [1, 0]], dtype=complex),
}

LEFT_RAY_JUMPS = {
    0.0: np.array([[0, 1], [-1, 0]], dtype=complex),
    math.pi / 3: np.array([[1, 0], [1, 1]], dtype=complex),
    5 * math.pi / 3: np.array([[1, 0], [1, 1]], dtype=complex),
    math.pi: np.array([[1, 1], [0, 1]], dtype=complex),
}


def ray_jump_residual(which: str, angle: float, radius: float, eps: float = 1e-12) -> float:
    """``max |A_-^{-1} A_+ - J|`` at one point of a ray (relative to ``|A|``).

    The ``+`` side is on the left of the outward-oriented ray (counter-
    clockwise), except on the left problem's ``arg = pi`` ray, which points
    into the origin.
    """
    if which == "right":
        fn, jumps = airy_ARH, RIGHT_RAY_JUMPS
    elif which == "left":
        fn, jumps = airy_ARH_left, LEFT_RAY_JUMPS
    else:
        raise ValueError("which must be 'right' or 'left'")
    J = jumps[angle]
    ccw = radius * cmath.exp(1j * (angle + eps))
    cw = radius * cmath.exp(1j * (angle - eps))
    plus, minus = fn(ccw), fn(cw)
    if which == "left" and angle == math.pi:
        plus, minus = minus, plus
    # A_- J should equal A_+; compare after normalising by the size of A
    diff = minus @ J - plus
    scale = max(np.abs(plus).max(), np.abs(minus).max())
    return float(np.abs(diff).max() / scale)


def arh_asymptotic_residual(zeta: complex) -> float:
    """Distance of ``A^RH e^{(2/3) zeta^{3/2} sigma3}`` from its two-term expansion.

    Both sides are left-multiplied by the inverse of the common prefactor
    ``zeta^{sigma3/4} (-1 i; 1 i) / (2 sqrt(pi))`` so the error is measured on
    the bracket ``I + (1/48) zeta^{-3/2} (1 6i; 6i -1) + ...``.
    """
    zeta = complex(zeta)
    z32 = zeta**1.5
    lhs = airy_ARH(zeta) @ np.diag([cmath.exp(2 / 3 * z32), cmath.exp(-2 / 3 * z32)])
    pref = _diag_pow(zeta, 0.25) @ _ASY / (2 * math.sqrt(math.pi))
    bracket = np.linalg.solve(pref, lhs)
    approx = I2 + np.array([[1, 6j], [6j, -1]]) / (48 * z32)
    return float(np.abs(bracket - approx).max())


def arh_left_asymptotic_residual(zeta: complex) -> float:
    """Same as :func:`arh_asymptotic_residual` for the left model problem."""
    zeta = complex(zeta)
    th = _arg_0_2pi(zeta)
    r = abs(zeta)
    z32 = r**1.5 * cmath.exp(1.5j * th)
    rot = r * cmath.exp(1j * (th - math.pi))  # e^{-i pi} zeta, arg in (-pi, pi)
    lhs = airy_ARH_left(zeta) @ np.diag([cmath.exp(2j / 3 * z32), cmath.exp(-2j / 3 * z32)])
    pref = _diag_pow(rot, -0.25) @ _ASY_LEFT / (2 * math.sqrt(math.pi))
    bracket = np.linalg.solve(pref, lhs)
    approx = I2 + 1j * np.array([[-1, 6j], [6j, 1]]) / (48 * z32)
    return float(np.abs(bracket - approx).max())


def wronskian_A0(zeta: complex) -> complex:
    return complex(np.linalg.det(airy_A0(zeta)))


# ---------------------------------------------------------------------------
# edge maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeMap:
    side: str
    N: int
    x: float

    @property
    def edge(self) -> float:
        e = eq.endpoints(self.x)
        return e.beta if self.side == "right" else e.alpha

    @property
    def linear_coefficient(self) -> float:
        e = eq.endpoints(self.x)
        w = math.sqrt(e.width)
        if self.side == "right":
            return (2 * self.N / (e.beta * w)) ** (2 / 3)
        return (2 * self.N / (-e.alpha * w)) ** (2 / 3)

    @property
    def max_radius(self) -> float:
        e = eq.endpoints(self.x)
        return min(0.5, -e.alpha / 2, e.beta / 2)

    def __call__(self, z: complex) -> complex:
        return edge_map(self.side, z, self.N, self.x)


def _edge_phase_function(side: str, z: complex, x: float) -> complex:
    """``-2g + V + l`` (right) or ``-2g + V + l + 2 pi i sgn(Im z)`` (left)."""
    l = eq.lagrange_multiplier(x)
    g = eq.g_eval(z, x)
    if side == "right":
        return -2 * g + z * (1 - x) + l
    sgn = 1.0 if z.imag > 0 else -1.0
    return -2 * g - z * (1 + x) + l + 2j * math.pi * sgn


def edge_map(side: str, z: complex, N: int, x: float) -> complex:
    """Conformal coordinate ``zeta(z)`` near ``beta`` (right) or ``alpha`` (left).

    ``zeta^3`` is single valued: ``(3N/4)^2 phi(z)^2`` on the right and
    ``-(3N/4)^2 phi(z)^2`` on the left, where ``phi`` is the phase function in
    :func:`_edge_phase_function`.  Of its three cube roots the one tangent to
    the local linear behaviour ``c (z - edge)`` is returned, which is the
    branch fixed by ``zeta > 0`` for real ``z > beta`` (right) and
    ``zeta < 0`` for real ``z < alpha`` (left).
    """
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    m = EdgeMap(side, N, x)
    z = complex(z)
    if abs(z - m.edge) >= m.max_radius:
        raise ValueError(f"|z - edge| must be below {m.max_radius}")
    if z == m.edge:
        return 0j
    if z.imag == 0.0:
        raise ValueError("real z inside the disc: evaluate at z +/- i0 explicitly")
    phi = _edge_phase_function(side, z, x)
    cube = (0.75 * N) ** 2 * phi * phi
    if side == "left":
        cube = -cube
    lin = m.linear_coefficient * (z - m.edge)
    root = cube ** (1 / 3)
    cands = [root * cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    return min(cands, key=lambda c: abs(c - lin))


# ---------------------------------------------------------------------------
# parametrices and matching
# ---------------------------------------------------------------------------


def parametrix_right(z: complex, N: int, x: float) -> np.ndarray:
    e = eq.endpoints(x)
    z = complex(z)
    zeta = edge_map("right", z, N, x)
    ratio = zeta * (z - e.alpha) / (z - e.beta)
    B = _P @ _diag_pow(ratio, -0.25)
    z32 = zeta**1.5
    tail = np.diag([cmath.exp(2 / 3 * z32), cmath.exp(-2 / 3 * z32)])
    return B @ (-1j * math.sqrt(math.pi) * airy_ARH(zeta)) @ tail


def parametrix_left(z: complex, N: int, x: float) -> np.ndarray:
    e = eq.endpoints(x)
    z = complex(z)
    zeta = edge_map("left", z, N, x)
    th = _arg_0_2pi(zeta)
    r = abs(zeta)
    z32 = r**1.5 * cmath.exp(1.5j * th)
    rot = r * cmath.exp(1j * (th - math.pi))
    B = _P @ _diag_pow(rot * (z - e.beta) / (z - e.alpha), 0.25)
    tail = np.diag([cmath.exp(2j / 3 * z32), cmath.exp(-2j / 3 * z32)])
    return B @ (1j * math.sqrt(math.pi) * SIGMA3 @ airy_ARH_left(zeta)) @ tail


def matching_leading_term(side: str, z: complex, N: int, x: float) -> np.ndarray:
    """First correction in ``U M^{-1} = I + ...`` (or ``V M^{-1}``)."""
    z = complex(z)
    zeta = edge_map(side, z, N, x)
    d = delta(z, x)
    dm2, dp2 = d**-2, d**2
    if side == "right":
        u, v = 7 * dm2 - 5 * dp2, 7 * dm2 + 5 * dp2
        return np.array([[u, 1j * v], [1j * v, -u]]) / (96 * zeta**1.5)
    th = _arg_0_2pi(zeta)
    z32 = abs(zeta) ** 1.5 * cmath.exp(1.5j * th)
    u, v = 5 * dm2 - 7 * dp2, 5 * dm2 + 7 * dp2
    return 1j * np.array([[u, 1j * v], [1j * v, -u]]) / (96 * z32)


def _circle(center: float, radius: float, n: int) -> np.ndarray:
    # offset by half a step so no sample sits on the real axis
    t = (np.arange(n) + 0.5) * 2 * np.pi / n
    return center + radius * np.exp(1j * t)


@dataclass(frozen=True)
class MatchReport:
    side: str
    N: int
    x: float
    radius: float
    max_residual: float
    max_structure_error: float
    scaling_ratio: float | None = None

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "N": self.N,
            "x": self.x,
            "radius": self.radius,
            "max_residual": self.max_residual,
            "max_structure_error": self.max_structure_error,
            "scaling_ratio": self.scaling_ratio,
        }


def parametrix_match(side: str, N: int, x: float, circle_radius: float | None = None, samples: int = 64) -> MatchReport:
    """Sample ``U M^{-1} - I`` (right) or ``V M^{-1} - I`` (left) on a circle.

    ``max_structure_error`` is the largest relative deviation of that residual
    from the leading ``zeta^{-3/2}`` correction matrix.
    """
    m = EdgeMap(side, N, x)
    r = 0.9 * m.max_radius if circle_radius is None else circle_radius
    if not 0 < r < m.max_radius:
        raise ValueError(f"radius must lie in (0, {m.max_radius})")
    para = parametrix_right if side == "right" else parametrix_left
    worst, worst_struct = 0.0, 0.0
    for z in _circle(m.edge, r, samples):
        R = para(z, N, x) @ np.linalg.inv(model_M(z, x)) - I2
        lead = matching_leading_term(side, z, N, x)
        worst = max(worst, float(np.abs(R).max()))
        worst_struct = max(worst_struct, float(np.abs(R - lead).max() / np.abs(lead).max()))
    return MatchReport(side, N, x, r, worst, worst_struct)


def matching_scaling(side: str, x: float, Ns=(20, 40, 80), circle_radius: float | None = None) -> list[MatchReport]:
    """Residual reports for successive N with the ratio to the previous N."""
    out = []
    prev = None
    for N in Ns:
        rep = parametrix_match(side, N, x, circle_radius)
        if prev is not None:
            rep = MatchReport(**{**rep.__dict__, "scaling_ratio": rep.max_residual / prev.max_residual})
        out.append(rep)
        prev = rep
    return out
