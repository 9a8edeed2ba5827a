"""Free energies on both sides of the D/AF critical line, in ``(x, y)`` coordinates.

Weights normalized by ``c``: ``a/c = (1-x)/2 + y``, ``b/c = (1+x)/2 + y``.
``y > 0`` is disordered (D), ``y < 0`` antiferroelectric (AF) and ``y = 0``
the critical line ``Delta = -1``.

Coordinate relations used throughout: ``sin t = x sin(gamma)`` (D) and
``sinh t = x sinh(gamma)`` (AF), which is what the weight parameterizations
force; the small-y law that follows is ``t ~ 2 x sqrt(|y|/(1-x^2))``.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

THETA_TOL = 1e-30


def _check_x(x: float) -> float:
    x = float(x)
    if not -1.0 < x < 1.0:
        raise ValueError(f"|x| must be < 1, got {x}")
    return x


class OutsideParameterization(ValueError):
    """``(x, y)`` is outside the neighbourhood covered by the phase parameterization."""


# ---------------------------------------------------------------------------
# phase points and coordinates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float

    @property
    def a_over_c(self) -> float:
        return (1 - self.x) / 2 + self.y

    @property
    def b_over_c(self) -> float:
        return (1 + self.x) / 2 + self.y

    @property
    def delta(self) -> float:
        a, b = self.a_over_c, self.b_over_c
        return (a * a + b * b - 1) / (2 * a * b)

    @property
    def tag(self) -> str:
        if self.y == 0:
            return "critical"
        d = self.delta
        if -1 < d < 1:
            return "D"
        if d < -1:
            return "AF"
        return "F"


@dataclass(frozen=True)
class GammaT:
    gamma: float
    t: float
    phase: str  # "D", "AF" or "critical"


def f_D(x, k):
    """``gamma`` on the D side as a function of ``k = sqrt(y)``; complex ``k`` allowed."""
    k = complex(k)
    return cmath.asin(2 * k * cmath.sqrt((1 + k * k) / ((1 + 2 * k * k) ** 2 - x * x)))


def f_AF(x, k):
    """``gamma`` on the AF side as a function of ``k = sqrt(-y)``; complex ``k`` allowed."""
    k = complex(k)
    return cmath.asinh(2 * k * cmath.sqrt((1 - k * k) / ((1 - 2 * k * k) ** 2 - x * x)))


def g_D(x, k):
    return cmath.asin(x * cmath.sin(f_D(x, k)))


def g_AF(x, k):
    return cmath.asinh(x * cmath.sinh(f_AF(x, k)))


def coords_to_gamma_t(x: float, y: float) -> GammaT:
    x = _check_x(x)
    y = float(y)
    if y == 0:
        return GammaT(0.0, 0.0, "critical")
    if y > 0:
        den = (1 + 2 * y) ** 2 - x * x
        s = 2 * math.sqrt(y * (1 + y) / den)
        if s >= 1:
            raise OutsideParameterization(f"y={y} too large for the disordered parameterization at x={x}")
        g = math.asin(s)
        return GammaT(g, math.asin(x * s), "D")
    if 1 + y <= 0 or (1 + 2 * y) ** 2 - x * x <= 0 or min((1 - x) / 2 + y, (1 + x) / 2 + y) <= 0:
        raise OutsideParameterization(f"y={y} outside the antiferroelectric parameterization at x={x}")
    s = 2 * math.sqrt(-y * (1 + y) / ((1 + 2 * y) ** 2 - x * x))
    g = math.asinh(s)
    return GammaT(g, math.asinh(x * s), "AF")


def gamma_t_to_coords(gamma: float, t: float, phase: str) -> tuple[float, float]:
    """Inverse map through the weight parameterizations."""
    if phase == "D":
        c = math.sin(2 * gamma)
        a, b = math.sin(gamma - t) / c, math.sin(gamma + t) / c
    elif phase == "AF":
        c = math.sinh(2 * gamma)
        a, b = math.sinh(gamma - t) / c, math.sinh(gamma + t) / c
    else:
        raise ValueError("phase must be 'D' or 'AF'")
    return b - a, (a + b - 1) / 2


def small_y_law(x: float, y: float) -> tuple[float, float]:
    """Leading small-``y`` behaviour ``(gamma, t)`` implied by the coordinate relations."""
    x = _check_x(x)
    g = 2 * math.sqrt(abs(y) / (1 - x * x))
    return g, x * g


# ---------------------------------------------------------------------------
# theta functions
# ---------------------------------------------------------------------------


def _check_q(q: float) -> float:
    q = float(q)
    if not 0 < q < 1:
        raise ValueError("nome must satisfy 0 < q < 1")
    return q


def _terms(q: float, extra: int = 0):
    """Yield ``n`` until ``q^{(n+1/2)^2}`` drops below the tolerance, plus ``extra`` more."""
    lq = math.log(q)
    n = 0
    left = extra
    while True:
        yield n
        if (n + 0.5) ** 2 * lq < math.log(THETA_TOL):
            if left == 0:
                return
            left -= 1
        n += 1


def theta1(z: float, q: float, extra_terms: int = 0) -> float:
    q = _check_q(q)
    lq = math.log(q)
    return 2 * math.fsum(
        (-1) ** n * math.exp((n + 0.5) ** 2 * lq) * math.sin((2 * n + 1) * z) for n in _terms(q, extra_terms)
    )


def theta1_prime0(q: float, extra_terms: int = 0) -> float:
    q = _check_q(q)
    lq = math.log(q)
    return 2 * math.fsum((-1) ** n * (2 * n + 1) * math.exp((n + 0.5) ** 2 * lq) for n in _terms(q, extra_terms))


def theta4(z: float, q: float, extra_terms: int = 0) -> float:
    q = _check_q(q)
    lq = math.log(q)
    return 1 + 2 * math.fsum(
        (-1) ** n * math.exp(n * n * lq) * math.cos(2 * n * z) for n in _terms(q, extra_terms) if n > 0
    )


def nome(gamma: float) -> float:
    return math.exp(-math.pi**2 / (2 * gamma))


# ---------------------------------------------------------------------------
# free energies
# ---------------------------------------------------------------------------


def F_C(x: float) -> float:
    """Critical-line free energy ``pi (1 - x^2) / (4 cos(pi x / 2))``."""
    x = _check_x(x)
    return math.pi * (1 - x * x) / (4 * math.cos(math.pi * x / 2))


def _prefactor(x: float, y: float) -> float:
    # pi (a/c)(b/c)
    return math.pi * ((0.5 + y) ** 2 - x * x / 4)


def free_energy_D(x: float, y: float) -> float:
    x = _check_x(x)
    if y <= 0:
        raise ValueError("free_energy_D needs y > 0")
    gt = coords_to_gamma_t(x, y)
    g, t = gt.gamma, gt.t
    return _prefactor(x, y) * math.sin(2 * g) / (2 * g * math.cos(math.pi * t / (2 * g)))


def free_energy_AF_reg(x: float, y: float) -> float:
    x = _check_x(x)
    if y >= 0:
        raise ValueError("free_energy_AF_reg needs y < 0")
    gt = coords_to_gamma_t(x, y)
    g, t = gt.gamma, gt.t
    return _prefactor(x, y) * math.sinh(2 * g) / (2 * g * math.cos(math.pi * t / (2 * g)))


@dataclass(frozen=True)
class SingularPart:
    value: float
    gamma: float
    q: float
    underflow: bool = False


def _theta_ratio_excess(omega: float, q: float) -> float:
    """``theta1'(0)/theta1(omega) - 1/sin(omega)`` without cancellation.

    With ``A = sum (-1)^n (2n+1) q^{n(n+1)}`` and
    ``B = sum (-1)^n q^{n(n+1)} sin((2n+1) omega)`` the excess is
    ``(A sin(omega) - B) / (B sin(omega))``; the ``n = 0`` terms of the
    numerator cancel identically and are dropped.
    """
    lq = math.log(q)
    s = math.sin(omega)
    num, B = [], [s]
    n = 1
    while True:
        w = math.exp(n * (n + 1) * lq)
        num.append((-1) ** n * w * ((2 * n + 1) * s - math.sin((2 * n + 1) * omega)))
        B.append((-1) ** n * w * math.sin((2 * n + 1) * omega))
        if w < THETA_TOL * 1e-300 or n * (n + 1) * lq < math.log(THETA_TOL) - 5:
            break
        n += 1
    return math.fsum(num) / (math.fsum(B) * s)


def free_energy_AF_sing(x: float, y: float) -> SingularPart:
    """Part of the AF free energy beyond the analytic continuation of the D side."""
    x = _check_x(x)
    if y >= 0:
        raise ValueError("free_energy_AF_sing needs y < 0")
    gt = coords_to_gamma_t(x, y)
    g, t = gt.gamma, gt.t
    lq = -math.pi**2 / (2 * g)
    if 2 * lq < math.log(np.finfo(float).tiny):
        return SingularPart(0.0, g, 0.0, underflow=True)
    q = math.exp(lq)
    omega = math.pi / 2 * (1 + t / g)
    pref = _prefactor(x, y) * math.sinh(2 * g) / (2 * g)
    return SingularPart(pref * _theta_ratio_excess(omega, q), g, q)


def free_energy_AF(x: float, y: float) -> float:
    """Full AF free energy ``F_reg + F_sing``, computed directly from theta functions."""
    x = _check_x(x)
    if y >= 0:
        raise ValueError("free_energy_AF needs y < 0")
    gt = coords_to_gamma_t(x, y)
    g, t = gt.gamma, gt.t
    q = nome(g)
    omega = math.pi / 2 * (1 + t / g)
    pref = _prefactor(x, y) * math.sinh(2 * g) / (2 * g)
    if q == 0.0:
        return pref / math.sin(omega)
    return pref * theta1_prime0(q) / theta1(omega, q)


def free_energy(x: float, y: float) -> float:
    """Free energy on either side of (or on) the critical line."""
    if y > 0:
        return free_energy_D(x, y)
    if y < 0:
        return free_energy_AF(x, y)
    return F_C(x)


def free_energy_ferroelectric(gamma: float, t: float) -> dict:
    """Ferroelectric-phase constants ``F``, ``G``, ``C`` (formula evaluator only)."""
    if not 0 < abs(gamma) < t:
        raise ValueError("need 0 < |gamma| < t")
    return {"F": math.sinh(gamma + t), "G": math.exp(gamma - t), "C": 1 - math.exp(-4 * gamma)}


def free_energy_FD(t: float) -> dict:
    """F-D critical-line constants ``F``, ``G`` (formula evaluator only), ``t > 1``."""
    if t <= 1:
        raise ValueError("need t > 1")
    return {"F": (t + 1) / 2, "G": math.exp(-special.zeta(1.5) * math.sqrt((t - 1) / (2 * math.pi)))}


# ---------------------------------------------------------------------------
# Taylor coefficients across y = 0
# ---------------------------------------------------------------------------


def f0_closed(x: float) -> float:
    return F_C(x)


def f1_closed(x: float) -> float:
    """First-order coefficient of the two-sided expansion in ``y``.

    ``pi (pi x^3 sin(pi x/2) - pi x sin(pi x/2) + 4 cos(pi x/2)) / (12 cos^2(pi x/2))``,
    from expanding ``pi (a/c)(b/c) sin(2 gamma)/(2 gamma cos(pi t/(2 gamma)))``
    with ``gamma^2 = 4y/(1-x^2) + O(y^2)`` and ``t/gamma = x - 2xy/3 + O(y^2)``.
    """
    x = _check_x(x)
    s, c = math.sin(math.pi * x / 2), math.cos(math.pi * x / 2)
    return math.pi * (math.pi * x**3 * s - math.pi * x * s + 4 * c) / (12 * c * c)


def f1_printed(x: float) -> float:
    """The same coefficient as printed, with ``8 cos`` in place of ``4 cos``."""
    x = _check_x(x)
    s, c = math.sin(math.pi * x / 2), math.cos(math.pi * x / 2)
    return math.pi * (math.pi * x**3 * s - math.pi * x * s + 8 * c) / (12 * c * c)


@dataclass(frozen=True)
class TaylorMatch:
    x: float
    delta: float
    points: int
    degree: int
    two_sided: tuple  # fitted coefficients f_0..f_degree from both sides together
    d_side: tuple
    af_side: tuple
    f0_closed: float
    f1_closed: float
    f1_printed: float

    @property
    def side_mismatch(self) -> float:
        return max(abs(self.d_side[0] - self.af_side[0]), abs(self.d_side[1] - self.af_side[1]))

    @property
    def f0_error(self) -> float:
        return abs(self.two_sided[0] - self.f0_closed)

    @property
    def f1_error(self) -> float:
        return abs(self.two_sided[1] - self.f1_closed)

    @property
    def f1_printed_error(self) -> float:
        return abs(self.two_sided[1] - self.f1_printed)


def _polyfit(ys: np.ndarray, Fs: np.ndarray, degree: int, scale: float) -> tuple:
    # fit in the scaled variable y/scale to keep the Vandermonde well conditioned
    u = ys / scale
    V = np.vander(u, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, Fs, rcond=None)
    if np.linalg.cond(V) > 1e10:
        raise np.linalg.LinAlgError("ill-conditioned Taylor fit; reduce the stencil")
    return tuple(float(c) / scale**j for j, c in enumerate(coef))


def taylor_match(x: float, delta: float = 1e-3, points: int = 8, degree: int = 4) -> TaylorMatch:
    """Fit polynomials in ``y`` to ``F_D`` (``y = +delta j``) and ``F_AF^reg`` (``y = -delta j``)."""
    x = _check_x(x)
    if abs(x) > 0.9:
        raise ValueError("taylor_match supports |x| <= 0.9")
    j = np.arange(1, points + 1)
    yd = delta * j
    ya = -delta * j
    Fd = np.array([free_energy_D(x, y) for y in yd])
    Fa = np.array([free_energy_AF_reg(x, y) for y in ya])
    scale = delta * points
    both = _polyfit(np.concatenate([ya, yd]), np.concatenate([Fa, Fd]), degree, scale)
    d_side = _polyfit(yd, Fd, min(degree, points - 1), scale)
    af_side = _polyfit(ya, Fa, min(degree, points - 1), scale)
    return TaylorMatch(
        x=x,
        delta=delta,
        points=points,
        degree=degree,
        two_sided=both,
        d_side=d_side,
        af_side=af_side,
        f0_closed=f0_closed(x),
        f1_closed=f1_closed(x),
        f1_printed=f1_printed(x),
    )


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

SCAN_COLUMNS = ("x", "y", "gamma", "t", "Delta", "F", "F_reg", "F_sing", "phase")


def phase_scan(xs, ys) -> list[tuple]:
    rows = []
    for x in xs:
        for y in ys:
            p = PhasePoint(float(x), float(y))
            gt = coords_to_gamma_t(p.x, p.y)
            if p.y > 0:
                F = free_energy_D(p.x, p.y)
                reg, sing = F, 0.0
            elif p.y < 0:
                reg = free_energy_AF_reg(p.x, p.y)
                sing = free_energy_AF_sing(p.x, p.y).value
                F = reg + sing
            else:
                F = reg = F_C(p.x)
                sing = 0.0
            rows.append((p.x, p.y, gt.gamma, gt.t, p.delta, F, reg, sing, p.tag))
    return rows


def scan_to_csv(rows, digits: int = 17) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(SCAN_COLUMNS)
    for r in rows:
        w.writerow([f"{v:.{digits}g}" for v in r[:-1]] + [r[-1]])
    return buf.getvalue()
