"""Equilibrium measure for the potential ``V(s) = |s| - x s``.

Closed forms for the support ``[alpha, beta]``, the density, the g-function
and its derivative, the Lagrange multiplier and the auxiliary exponents that
appear on the vertical jump segment through the origin.  All square roots
and logarithms use principal branches; boundary values on the real axis are
taken at ``z +/- 1e-30 i``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

EPS_BOUNDARY = 1e-30
LN2 = math.log(2.0)


def _check_x(x: float) -> float:
    x = float(x)
    if not -1.0 < x < 1.0:
        raise ValueError(f"|x| < 1 required, got {x}")
    return x


@dataclass(frozen=True)
class SupportEndpoints:
    x: float
    alpha: float
    beta: float

    @property
    def width(self) -> float:
        return self.beta - self.alpha


def endpoints(x: float) -> SupportEndpoints:
    """``alpha = -pi tan(pi(1-x)/4)``, ``beta = pi tan(pi(1+x)/4)``."""
    x = _check_x(x)
    alpha = -math.pi * math.tan(math.pi * (1 - x) / 4)
    beta = math.pi * math.tan(math.pi * (1 + x) / 4)
    return SupportEndpoints(x, alpha, beta)


def lagrange_multiplier(x: float) -> float:
    e = endpoints(x)
    return 2 * math.log(e.width) - 2 * (1 + 2 * LN2)


def potential(z, x: float):
    """``V(z)`` on the real line, or its half-plane continuation for complex ``z``.

    For complex arguments the right half-plane uses ``z(1-x)`` and the left
    ``-z(1+x)``; the continuation is two-valued on the imaginary axis.
    """
    if isinstance(z, complex):
        return z * (1 - x) if z.real > 0 else -z * (1 + x)
    return abs(z) - x * z


@dataclass(frozen=True)
class EquilibriumData:
    endpoints: SupportEndpoints
    l: float

    @property
    def x(self) -> float:
        return self.endpoints.x

    def rho(self, z: float) -> float:
        return density(z, self.x)

    def g(self, z: complex, side: str | None = None) -> complex:
        return g_eval(z, self.x, side)

    def g_prime(self, z: complex, side: str | None = None) -> complex:
        return g_prime(z, self.x, side)

    def G(self, z: complex, side: str | None = None) -> complex:
        return G_eval(z, self.x, side)


def equilibrium(x: float) -> EquilibriumData:
    return EquilibriumData(endpoints(x), lagrange_multiplier(x))


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


def density(z: float, x: float) -> float:
    """Equilibrium density on ``(alpha, beta)``; logarithmically singular at 0."""
    e = endpoints(x)
    a, b = e.alpha, e.beta
    z = float(z)
    if not a < z < b:
        raise ValueError(f"z={z} outside the support ({a}, {b})")
    if z == 0.0:
        raise ZeroDivisionError("density has a logarithmic singularity at z = 0")
    num = math.sqrt(b * (z - a)) + math.sqrt(-a * (b - z))
    return 2 / math.pi**2 * math.log(num / math.sqrt(abs(z) * e.width))


def _rho(z: float, a: float, b: float) -> float:
    num = math.sqrt(b * (z - a)) + math.sqrt(-a * (b - z))
    return 2 / math.pi**2 * math.log(num / math.sqrt(abs(z) * (b - a)))


def _rho_times_abs_z(u: float, sign: float, a: float, b: float) -> float:
    """``rho(z) |z|`` at ``z = sign * exp(-u)``, evaluated without underflow."""
    t = math.exp(-u)
    z = sign * t
    num = math.sqrt(b * (z - a)) + math.sqrt(-a * (b - z))
    return 2 / math.pi**2 * (math.log(num) + 0.5 * u - 0.5 * math.log(b - a)) * t


class QuadratureError(RuntimeError):
    pass


def _quad(f, lo, hi, tol=1e-13):
    val, err = integrate.quad(f, lo, hi, epsabs=tol, epsrel=tol, limit=400)
    if not np.isfinite(val) or err > 1e-9:
        raise QuadratureError(f"quadrature did not converge on [{lo}, {hi}]: estimate {val}, error {err}")
    return val


def _half_mass(r0: float, r1: float, sign: float, a: float, b: float) -> float:
    """Mass of ``rho`` on ``sign * [r0, r1]`` (``0 <= r0 < r1 <= |edge|``).

    The logarithmic singularity at 0 is removed by ``|z| = exp(-u)``, the
    square-root edge by ``|z| = |edge| - s^2``; the split is at half the edge.
    """
    edge = b if sign > 0 else -a
    mid = edge / 2
    total = 0.0
    lo, hi = r0, min(r1, mid)
    if hi > lo:
        top = math.inf if lo == 0.0 else -math.log(lo)
        total += _quad(lambda u: _rho_times_abs_z(u, sign, a, b), -math.log(hi), top)
    lo, hi = max(r0, mid), r1
    if hi > lo:
        s_lo, s_hi = math.sqrt(max(edge - hi, 0.0)), math.sqrt(edge - lo)
        total += _quad(lambda s: 2 * s * _rho(sign * (edge - s * s), a, b) if s > 0 else 0.0, s_lo, s_hi)
    return total


def mass_between(lo: float, hi: float, x: float) -> float:
    """``int_lo^hi rho(w) dw`` for ``alpha <= lo <= hi <= beta``."""
    e = endpoints(x)
    a, b = e.alpha, e.beta
    lo, hi = max(lo, a), min(hi, b)
    if lo >= hi:
        return 0.0
    total = 0.0
    if lo < 0:
        total += _half_mass(max(-hi, 0.0), -lo, -1.0, a, b)
    if hi > 0:
        total += _half_mass(max(lo, 0.0), hi, 1.0, a, b)
    return total


def density_normalization(x: float) -> float:
    """``int rho`` over the support; equals 1 for the equilibrium measure."""
    e = endpoints(x)
    return mass_between(e.alpha, e.beta, x)


# ---------------------------------------------------------------------------
# g-function
# ---------------------------------------------------------------------------


def _offset(z, side):
    z = complex(z)
    if side is None:
        return z
    if side == "+":
        return complex(z.real, EPS_BOUNDARY)
    if side == "-":
        return complex(z.real, -EPS_BOUNDARY)
    raise ValueError("side must be '+', '-' or None")


def _on_cut(z: complex, lo: float, hi: float) -> bool:
    return z.imag == 0.0 and lo <= z.real <= hi


def g_prime(z: complex, x: float, side: str | None = None) -> complex:
    """Resolvent ``g'(z) = int rho(w) / (z - w) dw`` off ``[alpha, beta]``."""
    e = endpoints(x)
    a, b = e.alpha, e.beta
    z = _offset(z, side)
    if _on_cut(z, a, b):
        raise ValueError("z on [alpha, beta]: request side='+' or side='-'")
    num = cmath.sqrt(b * (z - a)) - 1j * cmath.sqrt(-a * (z - b))
    return (1 - x) / 2 + 2 / (math.pi * 1j) * cmath.log(num / cmath.sqrt(z * e.width))


def g_eval(z: complex, x: float, side: str | None = None) -> complex:
    """``g(z) = int log(z - w) rho(w) dw`` with the cut on ``(-inf, beta]``."""
    e = endpoints(x)
    a, b = e.alpha, e.beta
    z = _offset(z, side)
    if _on_cut(z, -math.inf, b):
        raise ValueError("z on the cut (-inf, beta]: request side='+' or side='-'")
    gp = g_prime(z, x)
    return z * gp + 2 * cmath.log(cmath.sqrt(z - a) + cmath.sqrt(z - b)) - (1 + 2 * LN2)


def g_quadrature(z: complex, x: float) -> complex:
    """``int log(z - w) rho(w) dw`` by direct quadrature (reference only)."""
    e = endpoints(x)
    z = complex(z)

    def piece(part):
        def f(w):
            return part(cmath.log(z - w)) * density(w, x)

        # split at 0 (log singularity of rho) and near Re z
        pts = sorted({0.0, min(max(z.real, e.alpha), e.beta)})
        nodes = [e.alpha] + [p for p in pts if e.alpha < p < e.beta] + [e.beta]
        tot = 0.0
        for lo, hi in zip(nodes[:-1], nodes[1:]):
            if hi > lo:
                tot += integrate.quad(f, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-13)[0]
        return tot

    return complex(piece(lambda v: v.real), piece(lambda v: v.imag))


def variational_residual(z: float, x: float) -> float:
    """``g_+(z) + g_-(z) - V(z) - l`` at a real point."""
    z = float(z)
    l = lagrange_multiplier(x)
    s = g_eval(z, x, "+") + g_eval(z, x, "-")
    return s.real - potential(z, x) - l


@dataclass(frozen=True)
class VariationalReport:
    x: float
    max_equality_residual: float
    max_outside_value: float

    @property
    def ok(self) -> bool:
        return self.max_outside_value < 0


def _guarded_grid(lo: float, hi: float, n: int, guard: float, avoid=()) -> np.ndarray:
    pts = np.linspace(lo + guard, hi - guard, n)
    for p in avoid:
        pts = pts[np.abs(pts - p) > guard]
    return pts


def variational_check(x: float, grid_size: int = 200) -> VariationalReport:
    """Equality on the support, strict negativity on five units either side."""
    e = endpoints(x)
    guard = 1e-6 * e.width
    inside = _guarded_grid(e.alpha, e.beta, grid_size, guard, avoid=(0.0,))
    eq = max(abs(variational_residual(z, x)) for z in inside)
    left = _guarded_grid(e.alpha - 5, e.alpha, grid_size, guard)
    right = _guarded_grid(e.beta, e.beta + 5, grid_size, guard)
    out = max(variational_residual(z, x) for z in np.concatenate([left, right]))
    return VariationalReport(x=x, max_equality_residual=eq, max_outside_value=out)


# ---------------------------------------------------------------------------
# G(z) = g_+ - g_-
# ---------------------------------------------------------------------------


def G_eval(z: complex, x: float, side: str | None = None) -> complex:
    """Local continuation of ``g_+ - g_-`` off ``[alpha, beta]``.

    Upper half-plane: ``2g - V - l``; lower: ``-2g + V + l``.  On the real
    segment pass ``side``; ``'+'`` gives ``g_+ - g_-``.
    """
    l = lagrange_multiplier(x)
    zc = complex(z)
    if zc.imag == 0.0:
        if side is None:
            raise ValueError("real z: request side='+' or side='-'")
        e = endpoints(x)
        if zc.real >= e.beta:
            return 0j
        gp, gm = g_eval(zc, x, "+"), g_eval(zc, x, "-")
        return gp - gm if side == "+" else -(gm - gp)
    v = potential(zc, x)
    if zc.imag > 0:
        return 2 * g_eval(zc, x) - v - l
    return -2 * g_eval(zc, x) + v + l


def G_vs_integral(z: float, x: float) -> complex:
    """Difference between ``g_+ - g_-`` and ``2 pi i int_z^beta rho``."""
    e = endpoints(x)
    z = float(z)
    analytic = G_eval(z, x, "+")
    quad = 2j * math.pi * mass_between(z, e.beta, x)
    return analytic - quad


# ---------------------------------------------------------------------------
# exponents on the vertical segment through the origin
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuxValues:
    h1: complex
    h2: complex
    h3: complex
    h4: complex


@dataclass(frozen=True)
class AuxConstants:
    h1_0: float
    h2_0: complex
    h2_prime_0: float
    h4_0: complex


def aux_h_functions(y: float, x: float) -> AuxValues:
    e = endpoints(x)
    a, b = e.alpha, e.beta
    sw = math.sqrt(e.width)
    iy = 1j * y
    h1 = 4 / math.pi * cmath.log((cmath.sqrt(b * (iy - a)) + cmath.sqrt(-a * (b - iy))) / sw)
    h2 = 4 * cmath.log((cmath.sqrt(iy - a) + 1j * cmath.sqrt(b - iy)) / sw)
    h3 = 4 / math.pi * cmath.log((cmath.sqrt(b * (-iy - a)) + cmath.sqrt(-a * (b + iy))) / sw)
    h4 = -4 * cmath.log((cmath.sqrt(-iy - a) + 1j * cmath.sqrt(b + iy)) / sw)
    return AuxValues(h1, h2, h3, h4)


def aux_constants(x: float) -> AuxConstants:
    e = endpoints(x)
    a, b = e.alpha, e.beta
    ab = -a * b
    arg = cmath.phase((math.sqrt(-a) + 1j * math.sqrt(b)) / math.sqrt(e.width))
    return AuxConstants(
        h1_0=4 / math.pi * math.log(2 * math.sqrt(ab) / math.sqrt(e.width)),
        h2_0=4j * arg,
        h2_prime_0=2 / math.sqrt(ab),
        h4_0=-4j * arg,
    )


def jump_exponent_upper(z: complex, x: float) -> complex:
    """Exponent ``f_1`` of the jump on ``(0, i eps)``."""
    e = endpoints(x)
    a, b = e.alpha, e.beta
    sw = math.sqrt(e.width)
    z = complex(z)
    t1 = 4 * z / (math.pi * 1j) * cmath.log((cmath.sqrt(b * (z - a)) + cmath.sqrt(-a * (b - z))) / sw)
    t2 = -4 * cmath.log((cmath.sqrt(z - a) - 1j * cmath.sqrt(b - z)) / sw)
    return t1 + t2 + z - 2 * z / (math.pi * 1j) * cmath.log(z)


def jump_exponent_lower(z: complex, x: float) -> complex:
    """Exponent ``f_2`` of the jump on ``(-i eps, 0)``."""
    e = endpoints(x)
    a, b = e.alpha, e.beta
    sw = math.sqrt(e.width)
    z = complex(z)
    t1 = 4 * (-z) / (math.pi * 1j) * cmath.log((cmath.sqrt(b * (z - a)) + cmath.sqrt(-a * (b - z))) / sw)
    t2 = 4 * cmath.log((cmath.sqrt(z - a) - 1j * cmath.sqrt(b - z)) / sw)
    return t1 + t2 - z - 2 * (-z) / (math.pi * 1j) * cmath.log(-z)


def sample_table(x: float, n: int = 201) -> list[tuple[float, float, float, float]]:
    """Rows ``(z, rho, Re g_+, Im g_+)`` on a guarded grid of the support."""
    e = endpoints(x)
    guard = 1e-6 * e.width
    rows = []
    for z in _guarded_grid(e.alpha, e.beta, n, guard, avoid=(0.0,)):
        g = g_eval(z, x, "+")
        rows.append((float(z), density(z, x), g.real, g.imag))
    return rows
