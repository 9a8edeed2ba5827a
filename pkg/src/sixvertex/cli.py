"""Command-line front end.

Every command prints a short human-readable summary to stdout.  With
``--out PATH`` it also writes its data (``--format csv|json``) to PATH and a
manifest ``PATH.manifest.json`` (inputs, versions, timing) beside it.  Data
files contain no timestamps, so re-running a command reproduces them byte for
byte.

Exit status: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import metadata, resources
from pathlib import Path

import mpmath

SCHEMA_VERSION = 1


class NumericFailure(RuntimeError):
    pass


def load_defaults() -> dict:
    return json.loads(resources.files("sixvertex").joinpath("defaults.json").read_text())


DEFAULTS = load_defaults()


# ---------------------------------------------------------------------------
# argument types
# ---------------------------------------------------------------------------


def rational_x(text: str):
    from .exact import RationalParameter

    try:
        if "." in text or "e" in text.lower():
            raise ValueError("x must be given as p/q")
        return RationalParameter.parse(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"invalid x {text!r}: {exc}") from None


def positive_rational(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid rational {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("weights must be positive")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _fr(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _dec(v, digits: int) -> str:
    """Decimal rendering of an exact rational (presentation only)."""
    with mpmath.workdps(digits + 10):
        f = Fraction(v)
        return mpmath.nstr(mpmath.mpf(f.numerator) / f.denominator, digits)


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2, sort_keys=True) + "\n"


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "mpmath", "gmpy2"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def emit(args, payload: dict, header, rows, started: float) -> None:
    """Write the data file and its manifest when ``--out`` is given."""
    if args.out is None:
        return
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = _csv_text(header, rows) if args.format == "csv" else _json_text(payload)
    path.write_bytes(text.encode("utf-8"))
    inputs = {k: (str(v) if not isinstance(v, (int, float, bool, type(None))) else v) for k, v in vars(args).items() if k != "func"}
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": inputs,
        "versions": _versions(),
        "data_file": path.name,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": round(time.perf_counter() - started, 6),
    }
    Path(str(path) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _pmap(fn, items, threads):
    """Order-preserving map, in worker processes when ``threads > 1``."""
    items = list(items)
    n = threads or os.cpu_count() or 1
    if n <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))


def _n_range(args) -> range:
    if args.n_min > args.n_max:
        raise argparse.ArgumentTypeError(f"empty N range [{args.n_min}, {args.n_max}]")
    return range(args.n_min, args.n_max + 1)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_exact(args) -> int:
    from .exact import hankel_chain, partition_exact

    t0 = time.perf_counter()
    chain = hankel_chain(args.n, args.x)
    Z = partition_exact(args.n, args.x).Z
    print(f"x = {args.x}  N = {args.n}")
    print(f"Z_{args.n} = {_fr(Z) if Z.denominator != 1 else Z.numerator}  (~{_dec(Z, args.digits)})")
    for k, h in enumerate(chain.h):
        print(f"h_{k} = {_fr(h) if h.denominator != 1 else h.numerator}")
    payload = {**chain.to_dict(), "Z": _fr(Z)}
    rows = [(k, _dec(h, args.digits), _dec(t, args.digits)) for k, (h, t) in enumerate(zip(chain.h, chain.tau))]
    emit(args, payload, ("k", "h_k", "tau_k+1"), rows, t0)
    return 0


def cmd_oracle(args) -> int:
    from .oracle import enumerate_configs, partition_bruteforce

    t0 = time.perf_counter()
    if args.x is not None:
        a, b, c = 1 - args.x.value, 1 + args.x.value, Fraction(2)
    else:
        a, b, c = args.a, args.b, args.c
    cfgs = enumerate_configs(args.n)
    Z = partition_bruteforce(args.n, a, b, c)
    print(f"N = {args.n}  a = {_fr(a)}  b = {_fr(b)}  c = {_fr(c)}")
    print(f"configurations: {len(cfgs)}")
    print(f"Z = {Z.numerator if Z.denominator == 1 else _fr(Z)}")
    payload = {"N": args.n, "a": _fr(a), "b": _fr(b), "c": _fr(c), "count": len(cfgs), "Z": _fr(Z)}
    if args.dump_configs:
        payload["configurations"] = [cfg.to_dict() for cfg in cfgs]
    rows = [(i, *cfg.counts) for i, cfg in enumerate(cfgs)]
    emit(args, payload, ("index", "n1", "n2", "n3", "n4", "n5", "n6"), rows, t0)
    return 0


def _toda_residual(item):
    from .exact import toda_check

    N, x = item
    return toda_check(N, x).residual


def cmd_toda(args) -> int:
    t0 = time.perf_counter()
    Ns = list(range(1, args.n_max + 1))
    res = _pmap(_toda_residual, [(N, args.x) for N in Ns], args.threads)
    bad = [N for N, r in zip(Ns, res) if r != 0]
    if bad:
        print(f"nonzero residual at N = {bad}")
    else:
        print(f"x = {args.x}: residual 0 for all N <= {args.n_max}")
    payload = {"x": str(args.x), "residuals": {str(N): _fr(Fraction(r)) for N, r in zip(Ns, res)}}
    emit(args, payload, ("N", "residual"), [(N, _fr(Fraction(r))) for N, r in zip(Ns, res)], t0)
    if bad:
        raise NumericFailure("Toda identity violated")
    return 0


def cmd_asym(args) -> int:
    from .asymptotics import TABLE_COLUMNS, comparison_table

    t0 = time.perf_counter()
    Ns = [N for N in _n_range(args) if N >= 16]
    if not Ns:
        raise argparse.ArgumentTypeError("asymptotic comparison needs N >= 16")
    rows = comparison_table(args.x, Ns, args.prec)
    for r in rows:
        print(f"N={r.N:4d}  ratio-1={r.ratio - 1:+.3e}  eps_meas={r.measured_eps:+.4e}  eps_pred={r.predicted_eps:+.4e}")
    data = [r.as_tuple() for r in rows]
    payload = {"x": str(args.x), "columns": list(TABLE_COLUMNS), "rows": [list(t) for t in data]}
    emit(args, payload, TABLE_COLUMNS, [(t[0], t[1], *(repr(v) for v in t[2:])) for t in data], t0)
    return 0


def _fit_bundle(args):
    from .asymptotics import exact_log_Z_sequence, fit_C0

    Ns = _n_range(args)
    if len(Ns) < 10:
        raise argparse.ArgumentTypeError("fit needs at least 10 values of N")
    seq = exact_log_Z_sequence(args.n_max + 1, args.x, args.prec)
    fit = fit_C0(float(args.x), {n: seq[n] for n in Ns})
    return seq, fit


def cmd_fit(args) -> int:
    from .asymptotics import exponent_fit, second_difference_error

    t0 = time.perf_counter()
    seq, fit = _fit_bundle(args)
    xf = float(args.x)
    exp = exponent_fit(xf, seq, args.n_min, args.n_max)
    d2 = second_difference_error(xf, seq, args.n_max)
    print(f"x = {args.x}  N in [{args.n_min}, {args.n_max}]")
    print(f"ln C0 = {fit.ln_C0:.8f} +/- {fit.stderr:.2e}   (C0 = {fit.C0:.8f})")
    print(f"ln N exponent = {exp.slope:.6f}   (1/12 = {1 / 12:.6f})")
    print(f"second difference - 2 ln F at N={args.n_max}: {d2:+.3e}")
    if fit.flag:
        print(f"warning: {fit.flag}")
    payload = {
        "x": str(args.x),
        "N_min": args.n_min,
        "N_max": args.n_max,
        "ln_C0": fit.ln_C0,
        "ln_C0_stderr": fit.stderr,
        "d_over_N": fit.slope,
        "regime_reached": fit.regime_reached,
        "exponent": exp.slope,
        "second_difference_error": d2,
    }
    rows = [(n, repr(r)) for n, r in zip(fit.N, fit.residuals)]
    emit(args, payload, ("N", "fit_residual"), rows, t0)
    return 0


def cmd_compare(args) -> int:
    from .asymptotics import comparison_table, zN_asymptotic

    t0 = time.perf_counter()
    if args.n_min > args.n_max:
        raise argparse.ArgumentTypeError("empty N range")
    lo = max(args.n_min, 16)
    if lo > args.n_max or args.n_max - lo + 1 < 10:
        raise argparse.ArgumentTypeError("compare needs at least 10 values of N >= 16")
    args.n_min = lo
    seq, fit = _fit_bundle(args)
    xf = float(args.x)
    if abs(xf) > 0.8:
        print(f"note: |x| = {abs(xf):.3g} is close to the boundary; convergence is slower and tolerances should be widened")
    table = comparison_table(args.x, list(_n_range(args)), args.prec)
    header = ("N", "x", "exact_h_ratio", "predicted_h_ratio", "ratio", "measured_eps", "predicted_eps", "lnZ_residual")
    rows = []
    for r in table:
        resid = float(mpmath.mpf(seq[r.N]) - zN_asymptotic(r.N, xf, fit.C0)) if r.N >= 2 else float("nan")
        rows.append((r.N, r.x, r.exact, r.predicted, r.ratio, r.measured_eps, r.predicted_eps, resid))
        print(f"N={r.N:4d}  ratio-1={r.ratio - 1:+.3e}  eps={r.measured_eps:+.3e}  lnZ resid={resid:+.3e}")
    payload = {"x": str(args.x), "ln_C0": fit.ln_C0, "columns": list(header), "rows": [list(t) for t in rows]}
    emit(args, payload, header, [(t[0], t[1], *(repr(v) for v in t[2:])) for t in rows], t0)
    return 0


def cmd_eqm(args) -> int:
    from . import equilibrium as eq

    t0 = time.perf_counter()
    xf = float(args.x)
    e = eq.endpoints(xf)
    norm = eq.density_normalization(xf)
    var = eq.variational_check(xf)
    print(f"x = {args.x}: alpha = {e.alpha:.15g}, beta = {e.beta:.15g}, l = {eq.lagrange_multiplier(xf):.15g}")
    print(f"integral of rho - 1 = {norm - 1:+.3e}")
    print(f"variational: equality residual {var.max_equality_residual:.3e}, max outside {var.max_outside_value:+.3e}")
    table = eq.sample_table(xf, args.grid)
    payload = {
        "x": str(args.x),
        "alpha": e.alpha,
        "beta": e.beta,
        "l": eq.lagrange_multiplier(xf),
        "normalization": norm,
        "equality_residual": var.max_equality_residual,
        "max_outside": var.max_outside_value,
        "samples": [list(r) for r in table],
    }
    emit(args, payload, ("z", "rho", "re_g", "im_g"), [tuple(repr(v) for v in r) for r in table], t0)
    if not var.ok:
        raise NumericFailure("variational conditions not met")
    return 0


def cmd_rhp(args) -> int:
    from .rhp import matching_scaling

    t0 = time.perf_counter()
    xf = float(args.x)
    Ns = (args.n, 2 * args.n, 4 * args.n)
    reports = matching_scaling(args.side, xf, Ns, args.radius)
    for r in reports:
        ratio = "" if r.scaling_ratio is None else f"  ratio {r.scaling_ratio:.3f}"
        print(f"{r.side} N={r.N:4d} radius={r.radius:.4g}  max|UM^-1 - I| = {r.max_residual:.4e}{ratio}")
    fields = ("side", "N", "x", "radius", "max_residual", "scaling_ratio")
    data = [{k: r.to_dict()[k] for k in fields} for r in reports]
    emit(args, {"reports": data}, fields, [tuple(d[k] for k in fields) for d in data], t0)
    return 0


def cmd_phase(args) -> int:
    import numpy as np

    from .phase import F_C, SCAN_COLUMNS, phase_scan, taylor_match

    t0 = time.perf_counter()
    xf = float(args.x)
    ys = np.linspace(args.y_max / args.y_count, args.y_max, args.y_count)
    sweep = {"D": list(ys), "AF": list(-ys[::-1]), "critical": [0.0]}
    if args.sweep == "all":
        yv = sweep["AF"] + sweep["critical"] + sweep["D"]
    else:
        yv = sweep[args.sweep]
    rows = phase_scan([xf], yv)
    tm = taylor_match(xf) if abs(xf) <= 0.9 else None
    print(f"x = {args.x}: F_C = {F_C(xf):.15g}")
    if tm:
        print(f"fitted f0 = {tm.two_sided[0]:.12g}  f1 = {tm.two_sided[1]:.12g}")
        print(f"closed  f0 = {tm.f0_closed:.12g}  f1 = {tm.f1_closed:.12g}  (printed form: {tm.f1_printed:.12g})")
    payload = {"x": str(args.x), "columns": list(SCAN_COLUMNS), "rows": [list(r) for r in rows]}
    if tm:
        payload["taylor"] = {"two_sided": list(tm.two_sided), "f0_closed": tm.f0_closed, "f1_closed": tm.f1_closed}
    emit(args, payload, SCAN_COLUMNS, [tuple(repr(v) if isinstance(v, float) else v for v in r) for r in rows], t0)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    d = DEFAULTS
    p = argparse.ArgumentParser(
        prog="sixvertex",
        description="Exact and asymptotic computations for the six-vertex model with DWBC on the a+b=c critical line.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, x=True, n=False, rng=False, prec=False):
        if x:
            sp.add_argument("--x", type=rational_x, default=rational_x(d["x"]), help="model parameter as p/q")
        if n:
            sp.add_argument("--n", type=positive_int, default=d["n"], help="lattice size N")
        if rng:
            sp.add_argument("--n-min", type=positive_int, default=d["n_min"], help="smallest N")
            sp.add_argument("--n-max", type=positive_int, default=d["n_max"], help="largest N")
        if prec:
            sp.add_argument("--prec", type=positive_int, default=d["prec"], help="working precision in bits")
        sp.add_argument("--out", default=None, help="data file path (manifest written beside it)")
        sp.add_argument("--format", choices=("csv", "json"), default=d["format"], help="data file format")
        sp.add_argument("--threads", type=positive_int, default=d["threads"], help="worker processes (default: logical cores)")
        sp.add_argument("--tol", type=float, default=d["tol"], help="tolerance override")
        sp.add_argument("--digits", type=positive_int, default=d["digits"], help="decimal digits in CSV renderings")
        return sp

    s = common(sub.add_parser("exact", help="exact Hankel chain and Z_N"), n=True)
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("oracle", help="brute-force DWBC enumeration")
    s.add_argument("--x", type=rational_x, default=None, help="use a=1-x, b=1+x, c=2 instead of --a/--b/--c")
    s.add_argument("--a", type=positive_rational, default=positive_rational(d["a"]))
    s.add_argument("--b", type=positive_rational, default=positive_rational(d["b"]))
    s.add_argument("--c", type=positive_rational, default=positive_rational(d["c"]))
    s.add_argument("--dump-configs", action="store_true", help="include edge matrices in JSON output")
    common(s, x=False, n=True)
    s.set_defaults(func=cmd_oracle)

    s = common(sub.add_parser("toda", help="exact Toda identity for N = 1..n-max"))
    s.add_argument("--n-max", type=positive_int, default=20, help="largest N")
    s.set_defaults(func=cmd_toda)

    s = common(sub.add_parser("asym", help="h_N/(N!)^2 vs its large-N expansion"), rng=True, prec=True)
    s.set_defaults(func=cmd_asym)

    s = common(sub.add_parser("fit", help="C0, exponent and free-energy fits from exact ln Z_N"), rng=True, prec=True)
    s.set_defaults(func=cmd_fit)

    s = common(sub.add_parser("compare", help="combined h_N / Z_N comparison report"), rng=True, prec=True)
    s.set_defaults(func=cmd_compare)

    s = common(sub.add_parser("eqm", help="equilibrium-measure checks and samples"))
    s.add_argument("--grid", type=positive_int, default=d["grid"], help="number of sample points")
    s.set_defaults(func=cmd_eqm)

    s = common(sub.add_parser("rhp", help="parametrix matching residuals at N, 2N, 4N"), n=True)
    s.add_argument("--side", choices=("right", "left"), default=d["side"])
    s.add_argument("--radius", type=float, default=d["radius"], help="circle radius (default 0.9 x the allowed maximum)")
    s.set_defaults(func=cmd_rhp)

    s = common(sub.add_parser("phase", help="free-energy scan across the critical line"))
    s.add_argument("--y-max", type=float, default=d["y_max"])
    s.add_argument("--y-count", type=positive_int, default=d["y_count"])
    s.add_argument("--sweep", choices=("D", "AF", "critical", "all"), default=d["sweep"])
    s.set_defaults(func=cmd_phase)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))  # exits 2
    except Exception as exc:
        # plain ValueError = bad input; its subclasses and everything else are numeric
        if type(exc) is ValueError:
            print(f"usage error: {exc}", file=sys.stderr)
            return 2
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
