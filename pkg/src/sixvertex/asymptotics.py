"""Large-N formulas for ``h_N`` and ``Z_N`` and their comparison with exact data.

The exact side always comes from :mod:`sixvertex.exact` (rational chain,
converted to ``mpmath`` floats at a chosen precision); the factorials are
exact, so the asymptotic formulas under test are the only approximation.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import numpy as np
from scipy import integrate

from . import equilibrium as eq
from .exact import _norms_mpq, _param

# Euler-Mascheroni constant, 50 digits
EULER_GAMMA = "0.57721566490153286060651209008240243104215933593992"
EULER_GAMMA_F = float(EULER_GAMMA)

# below this N the nested logarithm ln ln N is < 1 and the expansions are meaningless
MIN_ASYMPTOTIC_N = 16


def _check_x(x: float) -> float:
    x = float(x)
    if not -1.0 < x < 1.0:
        raise ValueError(f"|x| must be < 1, got {x}")
    return x


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def free_energy_F(x: float) -> float:
    """``F = pi (1 - x^2) / (2 cos(pi x / 2))``; tends to 2 as ``|x| -> 1``."""
    x = _check_x(x)
    c = math.cos(math.pi * x / 2)
    if abs(x) > 1 - 1e-6:
        # cancellation-free form near the edge: cos(pi x/2) = sin(pi (1-|x|)/2)
        e = 1 - abs(x)
        return math.pi * e * (1 + abs(x)) / (2 * math.sin(math.pi * e / 2))
    return math.pi * (1 - x * x) / (2 * c)


def c0_constant(x: float) -> float:
    """``1 - 2 gamma - 4 ln 2 - 2 ln cos(pi x/2)``."""
    x = _check_x(x)
    return 1 - 2 * EULER_GAMMA_F - 4 * math.log(2) - 2 * math.log(math.cos(math.pi * x / 2))


def _loglog_bracket(N: int, const: float) -> float:
    L = math.log(N)
    return 1 - 2 * math.log(L) / L + const / L


def epsilon_predicted(N: int, x: float) -> float:
    """Oscillating ``1/(N ln^2 N)`` correction to ``h_N/(N!)^2``."""
    x = _check_x(x)
    if N < 3:
        raise ValueError("N >= 3 required for ln ln N")
    osc = (-1) ** N * math.cos(math.pi * x * (N + 0.5))
    return osc / (2 * N * math.log(N) ** 2) * _loglog_bracket(N, c0_constant(x))


@dataclass(frozen=True)
class Theorem1Terms:
    N: int
    x: float
    leading: float
    correction: float
    epsilon: float
    asymptotic_regime: bool = True

    @property
    def factor(self) -> float:
        return 1 + self.correction + self.epsilon

    @property
    def prediction(self) -> float:
        return self.leading * self.factor

    @property
    def log_prediction(self) -> float:
        return (2 * self.N + 1) * math.log(math.pi / (2 * math.cos(math.pi * self.x / 2))) + math.log(self.factor)


def hN_ratio_predicted(N: int, x: float) -> Theorem1Terms:
    """Predicted ``h_N/(N!)^2``; flagged (not refused) below ``N = 16``."""
    x = _check_x(x)
    if N < 3:
        raise ValueError("N >= 3 required")
    base = math.pi / (2 * math.cos(math.pi * x / 2))
    leading = base ** (2 * N + 1) if (2 * N + 1) * math.log(base) < 700 else math.inf
    return Theorem1Terms(
        N=N,
        x=x,
        leading=leading,
        correction=1 / (12 * N),
        epsilon=epsilon_predicted(N, x),
        asymptotic_regime=N >= MIN_ASYMPTOTIC_N,
    )


@dataclass(frozen=True)
class CorrectionA:
    N: int
    x: float
    value: float
    h1_0: float
    h2_prime_0: float
    c0: float


def A_correction(N: int, x: float) -> CorrectionA:
    """Leading behaviour of the vertical-segment integral ``A(N)``."""
    x = _check_x(x)
    if N < MIN_ASYMPTOTIC_N:
        raise ValueError(f"N >= {MIN_ASYMPTOTIC_N} required")
    k = eq.aux_constants(x)
    const = 3 - 2 * EULER_GAMMA_F - 2 * math.log(2 / math.pi) - math.pi * (k.h1_0 + k.h2_prime_0)
    L = math.log(N)
    return CorrectionA(
        N=N,
        x=x,
        value=_loglog_bracket(N, const) / (N * L * L),
        h1_0=k.h1_0,
        h2_prime_0=k.h2_prime_0,
        c0=const,
    )


def A_quadrature(N: int, x: float, eps: float = 0.5) -> float:
    """``A(N)`` from its defining integral along ``(0, i eps)``, by adaptive quadrature.

    ``(4/pi^2) int_0^eps exp(-N(-(2/pi) y ln y + y h1(y) + h2(y) - h2(0))) sin(N y) dy``.
    The exponent is real to O(y^2) away from ``x = 0``; the (tiny) imaginary
    part of the integral is discarded.  Independent of the large-N expansion
    in :func:`A_correction`, so it measures how far that expansion is from
    the quantity it approximates at a given N.
    """
    x = _check_x(x)
    if N < 1:
        raise ValueError("N >= 1 required")
    h2_0 = eq.aux_constants(x).h2_0

    def integrand(y: float) -> float:
        h = eq.aux_h_functions(y, x)
        ex = -2 / math.pi * y * math.log(y) + y * h.h1 + h.h2 - h2_0
        return (cmath.exp(-N * ex) * math.sin(N * y)).real

    val, _ = integrate.quad(integrand, 0.0, eps, limit=400, points=[1.0 / N, 10.0 / N])
    return 4 / math.pi**2 * val


def epsilon_from_A(N: int, x: float, A: float) -> float:
    """Oscillating term ``(-1)^N cos(pi x (N + 1/2)) A / 2`` of the ``h_N`` expansion."""
    return (-1) ** N * math.cos(math.pi * x * (N + 0.5)) * A / 2


@dataclass(frozen=True)
class PhaseIdentity:
    N: int
    x: float
    arg_form: float
    closed_form: float

    @property
    def difference(self) -> float:
        return abs(self.arg_form - self.closed_form)


def phi_N_phase(N: int, x: float) -> PhaseIdentity:
    """``4N arg((sqrt(-alpha) + i sqrt(beta))/sqrt(beta - alpha))`` vs ``pi N (1 + x)``."""
    x = _check_x(x)
    e = eq.endpoints(x)
    w = complex(math.sqrt(-e.alpha), math.sqrt(e.beta)) / math.sqrt(e.width)
    return PhaseIdentity(N, x, 4 * N * math.atan2(w.imag, w.real), math.pi * N * (1 + x))


def zN_asymptotic(N: int, x: float, C0: float) -> float:
    """``ln(C F^{N^2} N^{1/12})`` with ``C = C0 cos(pi x/2)^{1/12}``."""
    x = _check_x(x)
    if N < 2:
        raise ValueError("N >= 2 required")
    if C0 <= 0:
        raise ValueError("C0 must be positive")
    return (
        N * N * math.log(free_energy_F(x))
        + math.log(N) / 12
        + math.log(math.cos(math.pi * x / 2)) / 12
        + math.log(C0)
    )


@dataclass(frozen=True)
class Theorem2Terms:
    N: int
    x: float
    F: float
    C0: float
    exponent: float = 1 / 12

    @property
    def log_prediction(self) -> float:
        return zN_asymptotic(self.N, self.x, self.C0)


# ---------------------------------------------------------------------------
# exact inputs at working precision
# ---------------------------------------------------------------------------

_CACHE: dict[tuple[Fraction, int], tuple] = {}
_CACHE_LOCK = threading.Lock()


def exact_log_norms(N_max: int, x, bits: int = 256) -> tuple:
    """``(ln h_0, ..., ln h_{N_max-1})`` from the exact chain, at ``bits`` precision.

    Chains are cached per ``(x, bits)``; a cache miss at least doubles the
    cached length so that loops over increasing N stay linear overall.
    """
    x = _param(x)
    key = (x.value, bits)
    with _CACHE_LOCK:
        have = _CACHE.get(key, ())
    if len(have) >= N_max:
        return have[:N_max]
    h = _norms_mpq(max(N_max, 2 * len(have)), x)
    with mpmath.workprec(bits):
        logs = tuple(
            mpmath.log(mpmath.mpf(int(v.numerator))) - mpmath.log(mpmath.mpf(int(v.denominator))) for v in h
        )
    with _CACHE_LOCK:
        _CACHE[key] = logs
    return logs[:N_max]


def exact_log_hN_ratio(N: int, x, bits: int = 256):
    """``ln(h_N / (N!)^2)`` (exact inputs, ``bits``-bit rounding)."""
    logs = exact_log_norms(N + 1, x, bits)
    with mpmath.workprec(bits):
        return logs[N] - 2 * mpmath.loggamma(N + 1)


def exact_log_Z_sequence(N_max: int, x, bits: int = 256) -> dict[int, mpmath.mpf]:
    """``{N: ln Z_N}`` for ``N = 1..N_max``."""
    xp = _param(x)
    logs = exact_log_norms(N_max, xp, bits)
    out = {}
    with mpmath.workprec(bits):
        xf = mpmath.mpf(xp.p) / xp.q
        lw = mpmath.log(1 - xf * xf)
        acc = mpmath.mpf(0)
        for k, lh in enumerate(logs):
            acc += lh - 2 * mpmath.loggamma(k + 1)
            n = k + 1
            out[n] = n * n * lw + acc
    return out


class InsufficientPrecision(ValueError):
    pass


def epsilon_measured(N: int, x, precision_bits: int = 256) -> float:
    """``(h_N/(N!)^2) / (pi/(2 cos(pi x/2)))^{2N+1} - 1 - 1/(12N)`` from exact data."""
    xp = _param(x)
    if N < MIN_ASYMPTOTIC_N:
        raise ValueError(f"N >= {MIN_ASYMPTOTIC_N} required")
    # the quantity is ~ 1/(N ln^2 N); ask for 40 bits beyond its size
    needed = int(math.log2(2 * N * math.log(N) ** 2)) + 40
    if precision_bits < needed:
        raise InsufficientPrecision(f"precision_bits={precision_bits} cannot resolve eps_N; use >= {needed}")
    lr = exact_log_hN_ratio(N, xp, precision_bits)
    with mpmath.workprec(precision_bits):
        xf = mpmath.mpf(xp.p) / xp.q
        lead = (2 * N + 1) * mpmath.log(mpmath.pi / (2 * mpmath.cos(mpmath.pi * xf / 2)))
        r = mpmath.exp(lr - lead) - 1 - mpmath.mpf(1) / (12 * N)
        return float(r)


# ---------------------------------------------------------------------------
# fits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class C0Fit:
    x: float
    N: tuple
    ln_C0: float
    stderr: float
    slope: float  # coefficient d of d/N
    residuals: tuple
    regime_reached: bool

    @property
    def C0(self) -> float:
        return math.exp(self.ln_C0)

    @property
    def flag(self) -> str | None:
        return None if self.regime_reached else "asymptotic regime not reached"


def _free_energy_mp(x: float):
    return mpmath.pi * (1 - mpmath.mpf(x) ** 2) / (2 * mpmath.cos(mpmath.pi * mpmath.mpf(x) / 2))


def fit_C0(x: float, log_Z: Mapping[int, object]) -> C0Fit:
    """Least-squares ``c + d/N`` fit of ``ln Z_N - N^2 ln F - (1/12) ln N - (1/12) ln cos(pi x/2)``.

    ``c`` estimates ``ln C0``; the quoted error is the ordinary least-squares
    standard error.  The regime flag is raised when the successive changes
    in the detrended sequence do not decrease from the first to the second
    half of the range.
    """
    x = _check_x(x)
    if len(log_Z) < 10:
        raise ValueError("need at least 10 values of N")
    Ns = np.array(sorted(log_Z), dtype=float)
    with mpmath.workprec(256):
        lF = mpmath.log(_free_energy_mp(x))
        ys = np.array([float(mpmath.mpf(log_Z[int(n)]) - int(n) ** 2 * lF) for n in Ns])
    ys = ys - np.log(Ns) / 12 - math.log(math.cos(math.pi * x / 2)) / 12
    A = np.column_stack([np.ones_like(Ns), 1 / Ns])
    coef, _, _, _ = np.linalg.lstsq(A, ys, rcond=None)
    res = ys - A @ coef
    dof = max(len(Ns) - 2, 1)
    s2 = float(res @ res) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    steps = np.abs(np.diff(ys))
    half = len(steps) // 2
    regime = bool(steps[half:].mean() < steps[:half].mean())
    return C0Fit(
        x=x,
        N=tuple(int(n) for n in Ns),
        ln_C0=float(coef[0]),
        stderr=float(math.sqrt(cov[0, 0])),
        slope=float(coef[1]),
        residuals=tuple(float(r) for r in res),
        regime_reached=regime,
    )


@dataclass(frozen=True)
class ExponentFit:
    x: float
    N_min: int
    N_max: int
    slope: float
    intercept: float


def exponent_fit(x: float, log_Z: Mapping[int, object], N_min: int = 40, N_max: int = 120) -> ExponentFit:
    """Slope of ``ln Z_N - N^2 ln F`` against ``ln N`` over ``[N_min, N_max]``."""
    x = _check_x(x)
    Ns = np.array([n for n in sorted(log_Z) if N_min <= n <= N_max], dtype=float)
    if len(Ns) < 3:
        raise ValueError("range too short")
    with mpmath.workprec(256):
        lF = mpmath.log(_free_energy_mp(x))
        ys = np.array([float(mpmath.mpf(log_Z[int(n)]) - int(n) ** 2 * lF) for n in Ns])
    slope, intercept = np.polyfit(np.log(Ns), ys, 1)
    return ExponentFit(x, N_min, N_max, float(slope), float(intercept))


def second_difference_error(x: float, log_Z: Mapping[int, object], N: int) -> float:
    """``ln Z_{N+1} - 2 ln Z_N + ln Z_{N-1} - 2 ln F``."""
    x = _check_x(x)
    with mpmath.workprec(256):
        d2 = mpmath.mpf(log_Z[N + 1]) - 2 * mpmath.mpf(log_Z[N]) + mpmath.mpf(log_Z[N - 1])
        return float(d2 - 2 * mpmath.log(_free_energy_mp(x)))


# ---------------------------------------------------------------------------
# comparison tables
# ---------------------------------------------------------------------------

TABLE_COLUMNS = ("N", "x", "exact", "predicted", "ratio", "measured_eps", "predicted_eps")


@dataclass(frozen=True)
class ComparisonRow:
    N: int
    x: str
    exact: float  # h_N/(N!)^2 divided by the leading power, i.e. 1 + 1/(12N) + eps
    predicted: float
    ratio: float
    measured_eps: float
    predicted_eps: float

    def as_tuple(self) -> tuple:
        return (self.N, self.x, self.exact, self.predicted, self.ratio, self.measured_eps, self.predicted_eps)


def comparison_table(x, N_values: Sequence[int], precision_bits: int = 256) -> list[ComparisonRow]:
    """Exact vs predicted ``h_N/(N!)^2``, both normalized by the leading power.

    Normalizing keeps the columns O(1) for any N while ``ratio`` is still the
    ratio of the unnormalized quantities.
    """
    xp = _param(x)
    xf = float(xp)
    rows = []
    for N in N_values:
        t = hN_ratio_predicted(N, xf)
        meas = epsilon_measured(N, xp, precision_bits)
        exact_norm = 1 + t.correction + meas
        rows.append(
            ComparisonRow(
                N=N,
                x=str(xp),
                exact=exact_norm,
                predicted=t.factor,
                ratio=t.factor / exact_norm,
                measured_eps=meas,
                predicted_eps=t.epsilon,
            )
        )
    return rows


def table_to_csv(rows: Sequence[ComparisonRow], digits: int = 17) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow([r.N, r.x] + [f"{v:.{digits}g}" for v in r.as_tuple()[2:]])
    return buf.getvalue()
