"""Batch command-line front end.

Every subcommand wraps one library operation, embeds its fully resolved
configuration in the output header, and emits the same numeric payload as
JSON (schema 1) or CSV.  Optional SVG line charts are drawn from the same
series as the table.  Numbers are serialized with 15 significant digits;
complex values split into re/im fields.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from math import inf

import numpy as np

from .arcs import ArcSystem, convergents, dirichlet_approx, major_arc_membership
from .errors import InputError, NumericError, UndefinedMeasureError
from .expsums import GSumQuery, count_vinogradov_system, g_sum, g_via_lemma
from .ergodic import (
    TorusSystem,
    TrigPolynomial,
    discrepancy,
    ergodic_average,
    orbit_points,
    weyl_decay_scan,
)
from .maxops import GridFunction, convolve, delta_scaling_probe, lp_norm, maximal
from .numtheory import int_kth_root, sieve_primes
from .oscint import SurfaceQuery, surface_transform
from .surface import (
    ApproxParams,
    ProblemInstance,
    enumerate_prime_points,
    error_term,
    gamma_member_mask,
    gamma_membership,
    hua_ratio,
    omega_hat,
    rep_count_array,
    singular_series,
    _mu_infinity,
)

SCHEMA_VERSION = 1


def _r15(x: float) -> float:
    return float(f"{float(x):.15g}")


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.15g}"
    return str(x)


def _round_payload(obj):
    if isinstance(obj, float):
        return _r15(obj)
    if isinstance(obj, dict):
        return {k: _round_payload(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_payload(v) for v in obj]
    return obj


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise InputError(f"could not parse float list {text!r}") from exc


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise InputError(f"could not parse integer list {text!r}") from exc


def _emit_json(config, scalars, table) -> str:
    payload = {
        "schema": SCHEMA_VERSION,
        "config": config,
        "scalars": scalars,
        "table": {"columns": table[0], "rows": table[1]},
    }
    return json.dumps(_round_payload(payload), sort_keys=True, separators=(",", ":")) + "\n"


def _emit_csv(config, scalars, table) -> str:
    lines = [f"# schema={SCHEMA_VERSION}"]
    lines.append("# config=" + json.dumps(_round_payload(config), sort_keys=True, separators=(",", ":")))
    for name in sorted(scalars):
        lines.append(f"# scalar,{name},{_fmt(scalars[name])}")
    columns, rows = table
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit_svg(table, title: str) -> str:
    """Static polyline chart of every numeric column against the first one."""
    columns, rows = table
    width, height, margin = 640, 400, 50
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
    ]
    if rows and len(columns) >= 2:
        xs = [float(r[0]) for r in rows]
        xmin, xmax = min(xs), max(xs)
        xspan = (xmax - xmin) or 1.0
        palette = ["steelblue", "firebrick", "seagreen", "darkorange", "purple"]
        for ci in range(1, len(columns)):
            ys = [float(r[ci]) for r in rows]
            ymin, ymax = min(ys), max(ys)
            yspan = (ymax - ymin) or 1.0
            pts = []
            for x, y in zip(xs, ys):
                px = margin + (x - xmin) / xspan * (width - 2 * margin)
                py = height - margin - (y - ymin) / yspan * (height - 2 * margin)
                pts.append(f"{px:.2f},{py:.2f}")
            color = palette[(ci - 1) % len(palette)]
            parts.append(
                f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}"/>'
            )
            parts.append(
                f'<text x="{width - margin}" y="{margin + 15 * ci}" text-anchor="end" '
                f'font-size="11" fill="{color}">{columns[ci]}</text>'
            )
        parts.append(
            f'<text x="{margin}" y="{height - margin + 20}" font-size="11">{columns[0]}: '
            f"{_fmt(_r15(xmin))} .. {_fmt(_r15(xmax))}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _complex_scalars(prefix: str, z: complex) -> dict:
    return {f"{prefix}_re": float(z.real), f"{prefix}_im": float(z.imag), f"{prefix}_abs": abs(z)}


def _cache_dir(args) -> str | None:
    if args.cache_dir:
        return args.cache_dir
    return os.environ.get("WG_CACHE_DIR") or None


# --- subcommand implementations -------------------------------------------


def _cmd_points(args):
    inst = ProblemInstance(k=args.k, n=args.n, lam=args.lam)
    table = sieve_primes(max(2, int_kth_root(inst.lam, inst.k)))
    measure = enumerate_prime_points(inst, table, cache_dir=_cache_dir(args))
    scalars = {"r": measure.r, "R": measure.R, "gamma": gamma_membership(inst).label()}
    columns = [f"x{i + 1}" for i in range(inst.n)]
    rows = [[int(v) for v in row] for row in measure.representations]
    return scalars, (columns, rows)


def _cmd_fourier(args):
    inst = ProblemInstance(k=args.k, n=args.n, lam=args.lam)
    xi = _parse_floats(args.xi)
    if len(xi) != inst.n:
        raise InputError("--xi must have n entries")
    table = sieve_primes(max(2, int_kth_root(inst.lam, inst.k)))
    measure = enumerate_prime_points(inst, table, cache_dir=_cache_dir(args))
    value = omega_hat(measure, xi)
    scalars = {"r": measure.r, "R": measure.R, **_complex_scalars("omega_hat", value)}
    return scalars, (["field", "value"], [])


def _cmd_gsum(args):
    query = GSumQuery(a=args.a, q=args.q, b=args.b, r=args.r, k=args.k)
    value = g_via_lemma(query) if args.via_lemma else g_sum(query)
    return _complex_scalars("g", value), (["value_re", "value_im"], [[value.real, value.imag]])


def _cmd_singular(args):
    inst = ProblemInstance(k=args.k, n=args.n, lam=args.lam)
    avec = _parse_ints(args.avec) if args.avec else [0] * inst.n
    qvec = _parse_ints(args.qvec) if args.qvec else [1] * inst.n
    res = singular_series(inst, avec, qvec, args.qsing)
    scalars = {**_complex_scalars("series", res.value), "tail_estimate": res.tail_estimate}
    return scalars, (["q", "unused"], [])


def _cmd_surface(args):
    eta = _parse_floats(args.eta)
    res = surface_transform(SurfaceQuery(n=args.n, k=args.k, lam0=args.lam0, eta=tuple(eta)))
    scalars = {
        **_complex_scalars("value", res.value),
        "quad_error": res.quad_error,
        "tail_estimate": res.tail_estimate,
        "tail_warning": int(res.tail_warning),
        "theta_max": res.theta_max,
    }
    return scalars, (["field", "value"], [])


def _cmd_arcs(args):
    system = ArcSystem(X=args.X, Q=args.Q)
    center = major_arc_membership(args.theta, system)
    approx = dirichlet_approx(args.theta, args.Q)
    convs = convergents(args.theta % 1.0, args.count)
    scalars = {
        "major": int(center is not None),
        "center_a": center.a if center else -1,
        "center_q": center.q if center else -1,
        "dirichlet_a": approx.a,
        "dirichlet_q": approx.q,
        "dirichlet_err": abs(
            approx.q * (args.theta % 1.0) - round(approx.q * (args.theta % 1.0))
        ),
    }
    rows = [
        [i, c.a, c.q, abs(c.q * (args.theta % 1.0) - c.a)] for i, c in enumerate(convs)
    ]
    return scalars, (["index", "a", "q", "abs_err"], rows)


def _sample_lams(k, n, lo, hi, count, table):
    """Evenly spaced admissible lam in [lo, hi) with at least one solution."""
    counts = rep_count_array(k, n, hi - 1, table)
    lams = np.arange(lo, hi)
    ok = lams[(counts[lo:hi] > 0) & gamma_member_mask(k, n, lams)]
    if len(ok) == 0:
        return []
    idx = np.unique(np.linspace(0, len(ok) - 1, min(count, len(ok))).round().astype(int))
    return [int(v) for v in ok[idx]]


def _cmd_approx(args):
    rng = np.random.default_rng(args.seed)
    xi_sample = rng.random((args.xi_count, args.n))
    lam_top = args.lam_min * 2**args.blocks
    table = sieve_primes(max(2, int_kth_root(lam_top, args.k)))
    cache = _cache_dir(args)

    def block_stats(j):
        lo, hi = args.lam_min * 2**j, args.lam_min * 2 ** (j + 1)
        lams = _sample_lams(args.k, args.n, lo, hi, args.per_block, table)
        errs, zeros = [], []
        for lam in lams:
            inst = ProblemInstance(k=args.k, n=args.n, lam=lam)
            measure = enumerate_prime_points(inst, table, cache_dir=cache)
            params = ApproxParams.for_instance(inst, C=args.C, B=args.B, Qsing=args.qsing)
            for xi in xi_sample:
                errs.append(abs(error_term(measure, params, xi)))
            zeros.append(abs(error_term(measure, params, np.zeros(args.n))))
        med = float(np.median(errs)) if errs else 0.0
        mx = float(max(errs)) if errs else 0.0
        z = float(max(zeros)) if zeros else 0.0
        return [lo, hi, len(lams), med, mx, z]

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        rows = list(pool.map(block_stats, range(args.blocks)))
    medians = [row[3] for row in rows]
    scalars = {
        "medians_non_increasing": int(
            all(medians[i + 1] <= medians[i] for i in range(len(medians) - 1))
        ),
        "max_err_at_zero": max((row[5] for row in rows), default=0.0),
    }
    columns = ["lam_lo", "lam_hi", "n_lams", "median_abs_err", "max_abs_err", "max_err_zero"]
    return scalars, (columns, rows)


def _cmd_hua(args):
    table = sieve_primes(max(2, int_kth_root(args.hi, args.k)))
    lams = _sample_lams(args.k, args.n, args.lo, args.hi, args.samples, table)
    cache = _cache_dir(args)

    def one(lam):
        inst = ProblemInstance(k=args.k, n=args.n, lam=lam)
        measure = enumerate_prime_points(inst, table, cache_dir=cache)
        series = singular_series(inst, [0] * args.n, [1] * args.n, args.qsing)
        ratio = hua_ratio(measure, Qsing=args.qsing)
        return [lam, measure.r, measure.R, series.value.real, ratio]

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        rows = list(pool.map(one, lams))
    ratios = [row[4] for row in rows]
    in_band = [r for r in ratios if 0.7 <= r <= 1.3]
    scalars = {
        "mu_inf": _mu_infinity(args.n, args.k),
        "n_samples": len(rows),
        "band_fraction": len(in_band) / len(ratios) if ratios else 0.0,
        "median_ratio": float(np.median(ratios)) if ratios else 0.0,
    }
    return scalars, (["lambda", "r", "R", "series_re", "ratio"], rows)


def _cmd_maximal(args):
    lams = _parse_ints(args.lams)
    ps = [inf if v in ("inf", "Inf") else float(v) for v in args.p.split(",")]
    table = sieve_primes(max(2, int_kth_root(max(lams), args.k)))
    measures = [
        enumerate_prime_points(
            ProblemInstance(k=args.k, n=args.n, lam=lam), table, cache_dir=_cache_dir(args)
        )
        for lam in lams
    ]
    measures = [m for m in measures if m.R > 0]
    if not measures:
        raise UndefinedMeasureError("no lam in the list has prime solutions")
    if args.input == "delta":
        f = GridFunction.delta(args.n, args.K)
    else:
        rng = np.random.default_rng(args.seed)
        f = GridFunction(
            K=args.K, values=rng.standard_normal((2 * args.K + 1,) * args.n) + 0j
        )
    sup = maximal(f, measures)
    scalars = {}
    for p in ps:
        scalars[f"maximal_norm_p{p:g}"] = lp_norm(sup, p)
    rows = []
    for m in measures:
        row = [m.instance.lam, m.r]
        for p in ps:
            row.append(lp_norm(convolve(f, m), p))
        rows.append(row)
    columns = ["lambda", "r"] + [f"norm_p{p:g}" for p in ps]
    return scalars, (columns, rows)


def _cmd_delta_probe(args):
    lam_values = [2**e for e in range(args.exp_lo, args.exp_hi + 1)]
    table = sieve_primes(max(2, int_kth_root(max(lam_values), args.k)))
    p = inf if args.p in ("inf", "Inf") else float(args.p)
    report = delta_scaling_probe(args.k, args.n, p, lam_values, table)
    scalars = {"slope": report.slope if report.slope is not None else 0.0, "p": float(p)}
    rows = [[lam, norm] for lam, norm in zip(report.lam_values, report.norms)]
    return scalars, (["lambda_max", "norm"], rows)


def _cmd_ergodic(args):
    inst = ProblemInstance(k=args.k, n=args.n, lam=args.lam)
    alpha = _parse_floats(args.alpha)
    m = _parse_ints(args.m)
    x = _parse_floats(args.x)
    if not len(alpha) == len(m) == len(x) == inst.n:
        raise InputError("--alpha, --m, --x must each have n entries")
    table = sieve_primes(max(2, int_kth_root(inst.lam, inst.k)))
    measure = enumerate_prime_points(inst, table, cache_dir=_cache_dir(args))
    system = TorusSystem(alpha=tuple(alpha))
    f = TrigPolynomial.harmonic(m)
    value = ergodic_average(system, f, measure, x)
    freq = [mi * ai for mi, ai in zip(m, alpha)]
    scalars = {
        **_complex_scalars("average", value),
        "transform_abs": abs(omega_hat(measure, freq)),
        "r": measure.r,
    }
    return scalars, (["field", "value"], [])


def _cmd_weyl(args):
    xi = _parse_floats(args.xi)
    lam_top = args.lam_min * 2**args.blocks
    table = sieve_primes(max(2, int_kth_root(lam_top, args.k)))
    blocks = weyl_decay_scan(args.k, args.n, xi, args.lam_min, args.blocks, table)
    rows = [[b.lam_lo, b.lam_hi, b.count, b.max_abs, b.argmax_lam] for b in blocks]
    maxima = [b.max_abs for b in blocks]
    scalars = {
        "non_increasing": int(all(maxima[i + 1] <= maxima[i] for i in range(len(maxima) - 1))),
        "final_max": maxima[-1] if maxima else 0.0,
    }
    return scalars, (["lam_lo", "lam_hi", "count", "max_abs", "argmax_lam"], rows)


def _cmd_equidist(args):
    inst = ProblemInstance(k=args.k, n=args.n, lam=args.lam)
    alpha = _parse_floats(args.alpha)
    if len(alpha) != inst.n:
        raise InputError("--alpha must have n entries")
    table = sieve_primes(max(2, int_kth_root(inst.lam, inst.k)))
    measure = enumerate_prime_points(inst, table, cache_dir=_cache_dir(args))
    if measure.r == 0:
        raise UndefinedMeasureError("no solutions; nothing to equidistribute")
    pts = orbit_points(measure, alpha)
    est = discrepancy(pts, num_boxes=args.boxes, seed=args.seed)
    return {"discrepancy": est, "n_points": measure.r}, (["field", "value"], [])


def _cmd_meanvalue(args):
    count = count_vinogradov_system(args.N, args.s, args.k)
    return {"count": count}, (["field", "value"], [])


_COMMANDS = {
    "points": (_cmd_points, "enumerate prime solutions; columns x1..xn"),
    "fourier": (_cmd_fourier, "transform of the solution measure at --xi"),
    "gsum": (_cmd_gsum, "complete unit-group exponential sum g(a,q;b,r)"),
    "singular": (_cmd_singular, "truncated singular series at a center"),
    "surface": (_cmd_surface, "surface transform at --eta, with error/tail report"),
    "arcs": (_cmd_arcs, "arc membership, best rational, convergents; columns index,a,q,abs_err"),
    "approx": (_cmd_approx, "error-term block sweep; columns lam_lo,lam_hi,n_lams,median_abs_err,max_abs_err,max_err_zero"),
    "hua": (_cmd_hua, "count/prediction ratio sweep; columns lambda,r,R,series_re,ratio"),
    "maximal": (_cmd_maximal, "maximal function norms; columns lambda,r,norm_p*"),
    "delta-probe": (_cmd_delta_probe, "norm growth of the delta maximal probe; columns lambda_max,norm"),
    "ergodic": (_cmd_ergodic, "torus rotation average of one harmonic"),
    "weyl": (_cmd_weyl, "dyadic block maxima of |transform|; columns lam_lo,lam_hi,count,max_abs,argmax_lam"),
    "equidist": (_cmd_equidist, "star-discrepancy estimate of the scaled solution set"),
    "meanvalue": (_cmd_meanvalue, "brute-force power-sum system count"),
}


def _add_common(sub):
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--output", default=None, help="write payload to this path instead of stdout")
    sub.add_argument("--plot", action="store_true", help="also write an SVG chart next to --output")
    sub.add_argument("--cache-dir", default=None, help="enumeration cache (WG_CACHE_DIR overrides default)")
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--seed", type=int, default=7)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wg",
        description="Batch runner for the prime-point surface laboratory.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        sub = subs.add_parser(name, help=help_text, description=help_text)
        _add_common(sub)
        if name in ("points", "fourier", "singular", "ergodic", "equidist"):
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--lambda", dest="lam", type=int, required=True)
        if name == "fourier":
            sub.add_argument("--xi", required=True, help="comma-separated, n entries")
        if name == "gsum":
            sub.add_argument("--a", type=int, required=True)
            sub.add_argument("--q", type=int, required=True)
            sub.add_argument("--b", type=int, required=True)
            sub.add_argument("--r", type=int, required=True)
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--via-lemma", action="store_true")
        if name == "singular":
            sub.add_argument("--qsing", type=int, default=100)
            sub.add_argument("--avec", default=None, help="comma-separated numerators")
            sub.add_argument("--qvec", default=None, help="comma-separated denominators")
        if name == "surface":
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--lambda0", dest="lam0", type=float, default=1.0)
            sub.add_argument("--eta", required=True, help="comma-separated, n entries")
        if name == "arcs":
            sub.add_argument("--theta", type=float, required=True)
            sub.add_argument("--X", type=float, required=True)
            sub.add_argument("--Q", type=float, required=True)
            sub.add_argument("--count", type=int, default=8)
        if name == "approx":
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--lambda-min", dest="lam_min", type=int, default=4096)
            sub.add_argument("--blocks", type=int, default=5)
            sub.add_argument("--per-block", dest="per_block", type=int, default=6)
            sub.add_argument("--xi-count", dest="xi_count", type=int, default=32)
            sub.add_argument("--C", type=float, default=2.0)
            sub.add_argument("--B", type=float, default=1.0)
            sub.add_argument("--qsing", type=int, default=100)
        if name == "hua":
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--lo", type=int, default=10_000)
            sub.add_argument("--hi", type=int, default=100_000)
            sub.add_argument("--samples", type=int, default=50)
            sub.add_argument("--qsing", type=int, default=100)
        if name == "maximal":
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--lams", required=True, help="comma-separated lam list")
            sub.add_argument("--K", type=int, default=4)
            sub.add_argument("--p", default="2,inf", help="comma-separated exponents")
            sub.add_argument("--input", choices=["delta", "random"], default="delta")
        if name == "delta-probe":
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--p", default="1.2")
            sub.add_argument("--exp-lo", dest="exp_lo", type=int, default=12)
            sub.add_argument("--exp-hi", dest="exp_hi", type=int, default=16)
        if name == "ergodic":
            sub.add_argument("--alpha", required=True, help="rotation vector, n entries")
            sub.add_argument("--m", required=True, help="harmonic frequency, n integers")
            sub.add_argument("--x", required=True, help="base point, n entries")
        if name == "weyl":
            sub.add_argument("--k", type=int, required=True)
            sub.add_argument("--n", type=int, required=True)
            sub.add_argument("--xi", required=True, help="comma-separated, n entries")
            sub.add_argument("--lambda-min", dest="lam_min", type=int, default=1000)
            sub.add_argument("--blocks", type=int, default=7)
        if name == "equidist":
            sub.add_argument("--alpha", required=True, help="scaling vector, n entries")
            sub.add_argument("--boxes", type=int, default=10_000)
        if name == "meanvalue":
            sub.add_argument("--N", type=int, required=True)
            sub.add_argument("--s", type=int, required=True)
            sub.add_argument("--k", type=int, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler, _ = _COMMANDS[args.command]
    config = {k: v for k, v in sorted(vars(args).items())}
    try:
        scalars, table = handler(args)
    except InputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, UndefinedMeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = (
        _emit_json(config, scalars, table)
        if args.format == "json"
        else _emit_csv(config, scalars, table)
    )
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        if args.plot:
            base, _ = os.path.splitext(args.output)
            with open(base + ".svg", "w") as fh:
                fh.write(_emit_svg(table, args.command))
    else:
        sys.stdout.write(text)
        if args.plot:
            print("note: --plot needs --output; skipped", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
