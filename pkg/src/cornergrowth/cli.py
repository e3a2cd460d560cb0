"""Command-line front end.

Subcommands: simulate, shape, dist, fluct, tw, trace.  Every run writes a
``config.json`` with all resolved settings into the output directory;
re-running with ``--config config.json`` reproduces the outputs byte for
byte (numbers are serialized with shortest round-trip floats and no
timestamps are emitted anywhere).

Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import airy, descent, exactdist, lpp, model, shape
from ._svg import SvgPlot

__all__ = [
    "main",
    "run_simulate",
    "run_shape",
    "run_dist",
    "run_fluct",
    "run_tw",
    "run_trace",
    "FluctReport",
]


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _check_keys(cfg, allowed, where):
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ValueError(f"unknown {where} config keys: {sorted(unknown)}")


def _emit_config(cfg, outdir):
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "config.json"), "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# simulate


def run_simulate(cfg: dict, outdir: str):
    _check_keys(
        cfg,
        {"subcommand", "model", "times", "size", "emit_weights", "emit_gfield", "svg", "rays"},
        "simulate",
    )
    spec = model.spec_from_config(cfg["model"])
    times = [float(t) for t in cfg.get("times", [100.0])]
    _emit_config(cfg, outdir)
    rows = []
    if cfg.get("size"):
        m, n = (int(v) for v in cfg["size"])
        a, b = model.sample_sequences(spec, m, n)
        W = model.sample_weights(spec, a, b)
        fld = lpp.lpp_dp(W)
        if cfg.get("emit_weights"):
            _write_csv(
                os.path.join(outdir, "weights.csv"),
                ["i", "j", "w"],
                [(i + 1, j + 1, W.w[i, j]) for i in range(m) for j in range(n)],
            )
        if cfg.get("emit_gfield", True):
            _write_csv(
                os.path.join(outdir, "gfield.csv"),
                ["i", "j", "g"],
                [(i + 1, j + 1, fld.G[i + 1, j + 1]) for i in range(m) for j in range(n)],
            )
        for t in times:
            verts = lpp.staircase_boundary(fld, t)
            rows.extend((t, k, x, y) for k, (x, y) in enumerate(verts))
    else:
        for t in times:
            profile = lpp.growth_boundary_profile(spec, t)
            verts = lpp._staircase_from_profile(profile)
            rows.extend((t, k, x, y) for k, (x, y) in enumerate(verts))
    _write_csv(os.path.join(outdir, "boundary.csv"), ["t", "vertex_index", "x", "y"], rows)
    if cfg.get("svg"):
        plot = SvgPlot()
        thetas = np.linspace(1e-3, math.pi / 2 - 1e-3, 200)
        radii = shape.level_curve_radius(spec.kind, spec.alpha, spec.beta, thetas)
        plot.polyline(radii * np.cos(thetas), radii * np.sin(thetas), color="#000000", width=2.0)
        for t in times:
            sel = [(x / t, y / t) for (tt, _, x, y) in rows if tt == t]
            plot.polyline([p[0] for p in sel], [p[1] for p in sel], color="#d62728")
        plot.write(os.path.join(outdir, "growth.svg"))


# ---------------------------------------------------------------------------
# shape


def run_shape(cfg: dict, outdir: str):
    _check_keys(cfg, {"subcommand", "model", "ratios", "level_curve_points", "svg"}, "shape")
    doc = cfg["model"]
    kind = doc["kind"]
    alpha = model.law_from_config(doc["alpha"])
    beta = model.law_from_config(doc["beta"])
    shape_fn = shape.shape_exponential if kind == model.EXPONENTIAL else shape.shape_geometric
    _emit_config(cfg, outdir)
    rows = []
    for r in cfg.get("ratios", [1.0]):
        ev = shape_fn(alpha, beta, float(r), 1.0)
        rows.append(
            (r, 1.0, ev.g, math.nan if ev.zeta is None else ev.zeta, ev.regime.value,
             math.nan if ev.sigma is None else ev.sigma, ev.c1, ev.c2)
        )
    _write_csv(
        os.path.join(outdir, "shape.csv"),
        ["s", "t", "g", "zeta", "regime", "sigma", "c1", "c2"],
        rows,
    )
    npts = int(cfg.get("level_curve_points", 0))
    if npts:
        thetas = np.linspace(1e-3, math.pi / 2 - 1e-3, npts)
        radii = shape.level_curve_radius(kind, alpha, beta, thetas)
        lc = [(th, r * math.cos(th), r * math.sin(th)) for th, r in zip(thetas, radii)]
        _write_csv(os.path.join(outdir, "level_curve.csv"), ["theta", "s", "t"], lc)
        if cfg.get("svg"):
            plot = SvgPlot()
            plot.polyline([p[1] for p in lc], [p[2] for p in lc], color="#000000", width=2.0)
            ev = shape_fn(alpha, beta, 1.0, 1.0)
            rmax = max(p[1] for p in lc)
            for c in (ev.c1, ev.c2):
                if 0 < c < math.inf:
                    th = math.atan2(1.0, c)
                    rr = 1.2 * rmax
                    plot.polyline([0, rr * math.cos(th)], [0, rr * math.sin(th)], dash="4,3")
            plot.write(os.path.join(outdir, "shape.svg"))


# ---------------------------------------------------------------------------
# dist


def _resolve_params(cfg):
    if cfg.get("a") is not None:
        return np.asarray(cfg["a"], dtype=float), np.asarray(cfg["b"], dtype=float)
    spec = model.spec_from_config(cfg["model"])
    if spec.kind != model.GEOMETRIC:
        raise ValueError("exact distributions are available for the geometric model")
    m, n = (int(v) for v in cfg["size"])
    return model.sample_sequences(spec, m, n)


def run_dist(cfg: dict, outdir: str):
    _check_keys(
        cfg, {"subcommand", "model", "a", "b", "size", "k_min", "k_max", "method", "mc_reps", "mc_seed"},
        "dist",
    )
    a, b = _resolve_params(cfg)
    k_min = int(cfg.get("k_min", 0))
    k_max = int(cfg["k_max"])
    method = cfg.get("method", "det")
    rows = []
    _emit_config(cfg, outdir)
    if method == "series":
        ctx = exactdist.KernelContext(a, b)
        for k in range(k_min, k_max + 1):
            p, err = exactdist.cdf_fredholm_series(ctx, k, return_error=True)
            rows.append((k, p, "series", err))
    elif method == "det":
        for k in range(k_min, k_max + 1):
            rows.append((k, exactdist.cdf_det_form(a, b, k), "det", 0.0))
    elif method == "mc":
        reps = int(cfg.get("mc_reps", 100000))
        ks = np.arange(k_min, k_max + 1)
        cdf, stderr = exactdist.cdf_monte_carlo(a, b, ks, reps, seed=int(cfg.get("mc_seed", 0)))
        rows.extend((int(k), c, "mc", e) for k, c, e in zip(ks, cdf, stderr))
    else:
        raise ValueError(f"unknown method {method!r}")
    _write_csv(os.path.join(outdir, "dist.csv"), ["k", "cdf", "method", "est_error"], rows)


# ---------------------------------------------------------------------------
# fluct


@dataclass
class FluctReport:
    table: list  # rows (n, s, k, cdf, f_gue, abs_diff)
    sup_distance: list  # rows (n, sup |cdf - F_GUE|)
    tail: list  # rows (s, log_p, rate)
    tail_fit: tuple  # (slope, intercept, r2)


def run_fluct(cfg: dict, outdir: str) -> FluctReport:
    _check_keys(
        cfg,
        {"subcommand", "model", "r", "n_list", "s_grid", "tail_n", "tail_s", "mc_reps"},
        "fluct",
    )
    spec = model.spec_from_config(cfg["model"])
    if spec.kind != model.GEOMETRIC:
        raise ValueError("fluctuation pipeline runs on the geometric model")
    r = float(cfg.get("r", 1.0))
    ev = shape.shape_geometric(spec.alpha, spec.beta, r, 1.0)
    if not (ev.c1 < r < ev.c2):
        raise ValueError(
            f"direction r={r} outside the strictly concave cone (c1={ev.c1}, c2={ev.c2})"
        )
    n_list = [int(n) for n in cfg.get("n_list", [16, 32])]
    s_grid = [float(s) for s in cfg.get("s_grid", list(np.arange(-4.0, 2.01, 0.5)))]
    _emit_config(cfg, outdir)

    fgue = {s: airy.tw_gue_fredholm(s).F for s in s_grid}
    table, sup_rows = [], []
    for n in n_list:
        m = int(math.floor(n * r))
        a, b = model.sample_sequences(spec, m, n)
        es = shape.empirical_shape(a, b)
        sup = 0.0
        for s in s_grid:
            k = shape.scaling_index(es, s)
            if k < 0:
                cdf = 0.0
            else:
                cdf = exactdist.cdf_det_form(a, b, k)
            diff = abs(cdf - fgue[s])
            sup = max(sup, diff)
            table.append((n, s, k, cdf, fgue[s], diff))
        sup_rows.append((n, sup))

    # right-tail exceedance fit at a fixed size
    tail_n = int(cfg.get("tail_n", 64))
    reps = int(cfg.get("mc_reps", 100000))
    tail_s = [float(s) for s in cfg.get("tail_s", list(np.arange(0.05, 0.8001, 0.05)))]
    m = int(math.floor(tail_n * r))
    a, b = model.sample_sequences(spec, m, tail_n)
    es = shape.empirical_shape(a, b)
    g = lpp.last_passage_ensemble_params(a, b, model.GEOMETRIC, reps, spec.seed)
    tail_rows = []
    xs, ys = [], []
    for s in tail_s:
        thr = tail_n * es.gamma_mn + tail_n * s
        p = float(np.mean(g >= thr))
        if p > 0:
            rate = tail_n * min(s**1.5, s)
            tail_rows.append((s, math.log(p), rate))
            xs.append(rate)
            ys.append(math.log(p))
    slope, intercept, r2 = _linfit(xs, ys)
    _write_csv(
        os.path.join(outdir, "fluct.csv"),
        ["n", "s", "k", "cdf_exact", "f_gue", "abs_diff"],
        table,
    )
    _write_csv(os.path.join(outdir, "fluct_summary.csv"), ["n", "sup_distance"], sup_rows)
    _write_csv(os.path.join(outdir, "tail.csv"), ["s", "log_p", "rate"], tail_rows)
    _write_csv(
        os.path.join(outdir, "tail_fit.csv"),
        ["slope", "intercept", "r_squared"],
        [(slope, intercept, r2)],
    )
    return FluctReport(table, sup_rows, tail_rows, (slope, intercept, r2))


def _linfit(xs, ys):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) < 2:
        return math.nan, math.nan, math.nan
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(res[0]) if len(res) else float(np.sum((A @ [slope, intercept] - y) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else math.nan
    return float(slope), float(intercept), r2


# ---------------------------------------------------------------------------
# tw


def run_tw(cfg: dict, outdir: str):
    _check_keys(cfg, {"subcommand", "s_min", "s_max", "s_step", "method"}, "tw")
    s_min = float(cfg.get("s_min", -5.0))
    s_max = float(cfg.get("s_max", 2.0))
    s_step = float(cfg.get("s_step", 0.5))
    method = cfg.get("method", "both")
    _emit_config(cfg, outdir)
    rows = []
    s = s_min
    while s <= s_max + 1e-12:
        if method in ("fredholm", "both"):
            ev = airy.tw_gue_fredholm(s)
            rows.append((s, ev.F, "fredholm", ev.est_error))
        if method in ("painleve", "both"):
            ev = airy.tw_gue_painleve(s)
            rows.append((s, ev.F, "painleve", ev.est_error))
        s += s_step
    _write_csv(os.path.join(outdir, "tw.csv"), ["s", "F", "method", "est_error"], rows)


# ---------------------------------------------------------------------------
# trace


def run_trace(cfg: dict, outdir: str):
    _check_keys(cfg, {"subcommand", "model", "a", "b", "size", "svg", "delta"}, "trace")
    a, b = _resolve_params(cfg)
    af = descent.ActionFunction(a, b)
    phi = descent.trace_phi(af)
    _emit_config(cfg, outdir)
    rows = [
        (t, z.real, z.imag, float(af.u(np.asarray([z]))[0]), float(af.v(np.asarray([z]))[0]))
        for t, z in zip(phi.arclen, phi.points)
    ]
    _write_csv(os.path.join(outdir, "trace.csv"), ["t", "re", "im", "u", "v"], rows)
    if cfg.get("svg"):
        plot = SvgPlot()
        gam = descent.build_gamma(phi)
        plot.polyline(gam.real, gam.imag, color="#1f77b4", width=2.0)
        poles = af.poles()
        plot.points(poles, np.zeros_like(poles), color="#d62728")
        zs = descent.locate_zeros(af)
        plot.points(zs, np.zeros(len(zs)), color="#000000")
        plot.write(os.path.join(outdir, "trace.svg"))


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text):
    return [float(v) for v in text.split(",") if v]


def _add_model_args(p):
    p.add_argument("--kind", choices=[model.EXPONENTIAL, model.GEOMETRIC])
    p.add_argument("--alpha", help='law JSON, e.g. \'{"uniform":[0.5,1.5]}\'')
    p.add_argument("--beta", help="law JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z", type=float, default=None)


def _model_doc(args):
    if not (args.kind and args.alpha and args.beta):
        raise ValueError("need --kind, --alpha and --beta (or --config)")
    return {
        "kind": args.kind,
        "alpha": json.loads(args.alpha),
        "beta": json.loads(args.beta),
        "seed": args.seed,
        "z": args.z,
    }


def _build_parser():
    ap = argparse.ArgumentParser(prog="cornergrowth")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="full run-config JSON file")
        p.add_argument("--outdir", required=True)

    p = sub.add_parser("simulate", help="sample one growth realization")
    common(p)
    _add_model_args(p)
    p.add_argument("--times", default="100")
    p.add_argument("--size", default=None, help="m,n for explicit grids")
    p.add_argument("--emit-weights", action="store_true")
    p.add_argument("--no-gfield", action="store_true")
    p.add_argument("--svg", action="store_true")

    p = sub.add_parser("shape", help="limit-shape values and level curve")
    common(p)
    _add_model_args(p)
    p.add_argument("--grid", default="1", help="comma list of direction ratios s/t")
    p.add_argument("--level-curve", type=int, default=0)
    p.add_argument("--svg", action="store_true")

    p = sub.add_parser("dist", help="exact CDF of G")
    common(p)
    _add_model_args(p)
    p.add_argument("--a", default=None, help="comma list of row parameters")
    p.add_argument("--b", default=None, help="comma list of column parameters")
    p.add_argument("--size", default=None)
    p.add_argument("--k-range", default="0:10")
    p.add_argument("--method", choices=["series", "det", "mc"], default="det")
    p.add_argument("--mc-reps", type=int, default=100000)

    p = sub.add_parser("fluct", help="Tracy-Widom comparison sweep")
    common(p)
    _add_model_args(p)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--n-list", default="16,32")
    p.add_argument("--s-grid", default=None, help="comma list of scaled levels")
    p.add_argument("--tail-n", type=int, default=64)
    p.add_argument("--mc-reps", type=int, default=100000)

    p = sub.add_parser("tw", help="Tracy-Widom GUE CDF table")
    common(p)
    p.add_argument("--s-range", default="-5:2:0.5", help="min:max:step")
    p.add_argument("--method", choices=["fredholm", "painleve", "both"], default="both")

    p = sub.add_parser("trace", help="steepest-descent contour")
    common(p)
    _add_model_args(p)
    p.add_argument("--a", default=None)
    p.add_argument("--b", default=None)
    p.add_argument("--size", default=None)
    p.add_argument("--svg", action="store_true")
    return ap


def _config_from_args(args):
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if cfg.get("subcommand") != args.subcommand:
            raise ValueError("config subcommand does not match the CLI subcommand")
        return cfg
    sc = args.subcommand
    if sc == "simulate":
        cfg = {
            "subcommand": sc,
            "model": _model_doc(args),
            "times": _floats(args.times),
            "emit_weights": bool(args.emit_weights),
            "emit_gfield": not args.no_gfield,
            "svg": bool(args.svg),
        }
        if args.size:
            cfg["size"] = [int(v) for v in args.size.split(",")]
        return cfg
    if sc == "shape":
        return {
            "subcommand": sc,
            "model": _model_doc(args),
            "ratios": _floats(args.grid),
            "level_curve_points": args.level_curve,
            "svg": bool(args.svg),
        }
    if sc == "dist":
        lo, hi = args.k_range.split(":")
        cfg = {
            "subcommand": sc,
            "k_min": int(lo),
            "k_max": int(hi),
            "method": args.method,
            "mc_reps": args.mc_reps,
        }
        if args.a:
            cfg["a"] = _floats(args.a)
            cfg["b"] = _floats(args.b)
        else:
            cfg["model"] = _model_doc(args)
            cfg["size"] = [int(v) for v in args.size.split(",")]
        return cfg
    if sc == "fluct":
        cfg = {
            "subcommand": sc,
            "model": _model_doc(args),
            "r": args.r,
            "n_list": [int(v) for v in args.n_list.split(",")],
            "tail_n": args.tail_n,
            "mc_reps": args.mc_reps,
        }
        if args.s_grid:
            cfg["s_grid"] = _floats(args.s_grid)
        return cfg
    if sc == "tw":
        lo, hi, step = args.s_range.split(":")
        return {
            "subcommand": sc,
            "s_min": float(lo),
            "s_max": float(hi),
            "s_step": float(step),
            "method": args.method,
        }
    if sc == "trace":
        cfg = {"subcommand": sc, "svg": bool(args.svg)}
        if args.a:
            cfg["a"] = _floats(args.a)
            cfg["b"] = _floats(args.b)
        else:
            cfg["model"] = _model_doc(args)
            cfg["size"] = [int(v) for v in args.size.split(",")]
        return cfg
    raise ValueError(f"unknown subcommand {sc!r}")


_RUNNERS = {
    "simulate": run_simulate,
    "shape": run_shape,
    "dist": run_dist,
    "fluct": run_fluct,
    "tw": run_tw,
    "trace": run_trace,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        _RUNNERS[args.subcommand](cfg, args.outdir)
    except (ValueError, KeyError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
