"""Batch front door: run experiment configs, emit CSV/JSON reports and SVG plots.

Subcommands::

    pdlab run --config cfg.json [--seed N] [--out DIR] [--jobs K]
    pdlab sweep --param theta|dim|p --from A --to B --steps N --config cfg.json ...
    pdlab slow --rates rates.csv --out DIR

Exit codes: 0 all checks passed, 1 usage/config error, 2 a mathematical
check failed (the failing analyses are named on stderr). ``PDLAB_SEED``
overrides the config seed; the --seed flag wins over both.
"""

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, _kernels, lab, spectral
from .linalg import spectral_norm
from .operators import convex_combination, dr_generalized, dr_operator, \
    map_operator
from .projections import lp_partition_projection, orth_projection
from .spaces import LpSpace, Subspace, random_subspace
from .svgplot import line_chart

ANALYSES = ("dichotomy", "numrange", "resolvent", "ritt", "stolz",
            "kspectral", "halperin", "dr-rate", "slow", "superpoly")

KNOB_DEFAULTS = {
    "iterations": 400,
    "theta_count": 200,
    "hull_angles": 720,
    "numrange_samples": 1000,
    "halperin_samples": 10000,
    "superpoly_kmax": 3,
    "superpoly_n": 100,
    "dr_rate_n": 50,
    "kspectral_n": 200,
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _complex_entry(pair, where):
    if (not isinstance(pair, (list, tuple))) or len(pair) != 2:
        raise ConfigError(f"{where}: complex entries are [re, im] pairs")
    return complex(float(pair[0]), float(pair[1]))


def _parse_vector(v, where):
    return np.array([_complex_entry(e, where) for e in v], dtype=np.complex128)


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return validate_config(cfg)


def validate_config(cfg):
    space = cfg.get("space", {"kind": "hilbert", "dim": 4})
    kind = space.get("kind")
    if kind not in ("hilbert", "lp"):
        raise ConfigError("space.kind must be 'hilbert' or 'lp'")
    dim = space.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise ConfigError("space.dim must be a positive integer")
    if kind == "lp":
        p = space.get("p")
        if not isinstance(p, (int, float)) or not (1.0 < float(p) < np.inf):
            raise ConfigError("space.p must lie in (1, inf)")
    analyses = cfg.get("analyses", [])
    for name in analyses:
        if name not in ANALYSES:
            raise ConfigError(f"unknown analysis {name!r} (know {', '.join(ANALYSES)})")
    op = cfg.get("operator", {"kind": "map"})
    if op.get("kind", "map") not in ("map", "dr", "dr-generalized", "convex"):
        raise ConfigError("operator.kind must be map | dr | dr-generalized | convex")
    if op.get("kind") == "convex":
        weights = [t.get("weight") for t in op.get("terms", [])]
        if not weights:
            raise ConfigError("operator.terms must be a nonempty list")
        total = sum(float(w) for w in weights)
        if abs(total - 1.0) > 1e-12:
            raise ConfigError(
                f"operator.terms weights sum to {total!r}, expected 1"
            )
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    if "slow" in analyses:
        rates = cfg.get("slow_rates")
        if not rates:
            raise ConfigError("analysis 'slow' needs a nonempty slow_rates list")
    return cfg


def build_space(cfg):
    space = cfg.get("space", {"kind": "hilbert", "dim": 4})
    if space["kind"] == "lp":
        return LpSpace(dim=space["dim"], p=float(space["p"]))
    return None  # Hilbert: plain 2-norm geometry on C^dim


def build_subspaces(cfg, rng):
    dim = cfg.get("space", {}).get("dim", 4)
    spec = cfg.get("subspaces")
    if spec is None:
        return []
    if isinstance(spec, dict) and "random" in spec:
        rnd = spec["random"]
        count = rnd.get("count", 2)
        dims = rnd.get("dims")
        if dims is None:
            dims = [max(1, dim // 2)] * count
        if len(dims) != count:
            raise ConfigError("subspaces.random.dims must have 'count' entries")
        real = bool(rnd.get("real", False))
        return [random_subspace(dim, min(r, dim), rng, real=real) for r in dims]
    out = []
    for i, vectors in enumerate(spec):
        vs = [_parse_vector(v, f"subspaces[{i}]") for v in vectors]
        if any(v.size != dim for v in vs):
            raise ConfigError(f"subspaces[{i}]: vectors must have length {dim}")
        out.append(Subspace.from_spanning(vs, dim=dim))
    return out


def build_lp_projections(cfg, space):
    out = []
    for i, ps in enumerate(cfg.get("lp_projections", [])):
        blocks = ps.get("blocks")
        vectors = ps.get("vectors")
        if not blocks or not vectors:
            raise ConfigError(f"lp_projections[{i}] needs blocks and vectors")
        units = []
        for block, v in zip(blocks, vectors):
            vec = _parse_vector(v, f"lp_projections[{i}]")
            if vec.size == len(block):  # block-local coordinates: embed
                full = np.zeros(space.dim, dtype=np.complex128)
                full[list(block)] = vec
                vec = full
            nrm = (np.abs(vec) ** space.p).sum() ** (1.0 / space.p)
            if nrm == 0:
                raise ConfigError(f"lp_projections[{i}]: zero block vector")
            units.append(vec / nrm)
        out.append(lp_partition_projection(space, blocks, units))
    return out


def build_operator(cfg, subspaces, lp_projs):
    op = cfg.get("operator", {"kind": "map"})
    kind = op.get("kind", "map")
    if lp_projs:
        factors = [p.as_projection_op() for p in lp_projs]
    else:
        factors = [orth_projection(s) for s in subspaces]
    if not factors:
        raise ConfigError("no subspaces / lp_projections to build an operator from")
    if kind == "map":
        return map_operator(factors)
    if kind == "dr":
        if len(factors) != 2:
            raise ConfigError("operator.kind 'dr' needs exactly 2 subspaces")
        return dr_operator(factors[0], factors[1])
    if kind == "dr-generalized":
        k, l = op.get("indices", [1, 2])
        try:
            return dr_generalized(factors[k - 1], factors[l - 1],
                                  names=(f"P{k}", f"P{l}"))
        except IndexError as exc:
            raise ConfigError(f"operator.indices out of range: {exc}") from exc
    # convex combination of products; factors may be projections {"p": i}
    # or Douglas-Rachford pairs {"t": [k, l]}
    table = {f"P{i + 1}": factors[i].matrix for i in range(len(factors))}
    terms = []
    for term in op["terms"]:
        names = []
        for f in term.get("product", []):
            if isinstance(f, dict) and "t" in f:
                k, l = f["t"]
                name = f"T{k}{l}"
                if name not in table:
                    table[name] = dr_generalized(
                        factors[k - 1], factors[l - 1]).matrix
            elif isinstance(f, dict) and "p" in f:
                name = f"P{f['p']}"
            elif isinstance(f, int):
                name = f"P{f}"
            else:
                raise ConfigError(f"bad convex factor {f!r}")
            if name not in table:
                raise ConfigError(f"factor {name} refers to a missing projection")
            names.append(name)
        terms.append((float(term["weight"]), tuple(names)))
    return convex_combination(table, terms)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def fmt_float(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_float(v) if isinstance(v, (float, np.floating))
                        else v for v in row])


def _complex_rows(vectors):
    rows = []
    for i, v in enumerate(np.atleast_2d(vectors)):
        row = [i]
        for z in v:
            row.extend([float(np.real(z)), float(np.imag(z))])
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# analyses
# ---------------------------------------------------------------------------

def _knob(cfg, name):
    return cfg.get(name, KNOB_DEFAULTS[name])


class RunContext:
    def __init__(self, cfg, seed, outdir):
        self.cfg = cfg
        self.seed = seed
        self.outdir = Path(outdir)
        self.rng = np.random.default_rng(seed)
        self.space = build_space(cfg)
        self.subspaces = build_subspaces(cfg, self.rng)
        self.lp_projs = (build_lp_projections(cfg, self.space)
                         if self.space is not None else [])
        self.operator = build_operator(cfg, self.subspaces, self.lp_projs)
        self._rotation_sample = None

    def rotation_sample(self):
        if self._rotation_sample is None:
            self._rotation_sample = spectral.numerical_range_hilbert(
                self.operator.matrix, m=_knob(self.cfg, "hull_angles"))
        return self._rotation_sample

    def numrange_sample(self):
        if self.space is None:
            return self.rotation_sample()
        return spectral.numerical_range_lp(
            self.operator.matrix, self.space,
            count=_knob(self.cfg, "numrange_samples"), seed=self.seed)


def an_dichotomy(ctx):
    rep = lab.dichotomy_report(ctx.operator.matrix, n=_knob(ctx.cfg, "iterations"))
    rows = [(n, float(g)) for n, g in enumerate(rep.gaps)]
    scalars = {"regime": rep.regime, "r_fit": rep.r_fit, "c_fit": rep.c_fit,
               "restriction_spectral_radius": rep.restriction_spectral_radius,
               "fix_dim": rep.split.fix.dim}
    files = {"dichotomy.csv": (("n", "gap"), rows)}
    plots = {"dichotomy.svg": ([("gap", [r[0] for r in rows if r[1] > 0],
                                 [r[1] for r in rows if r[1] > 0])],
                               dict(title="power-norm gap", xlabel="n",
                                    ylabel="gap", ylog=True))}
    return scalars, files, plots, rep.rates_agree


def an_numrange(ctx):
    sample = ctx.numrange_sample()
    pts = sample.points
    rows = [(i, float(z.real), float(z.imag)) for i, z in enumerate(pts)]
    hull_rows = [(i, float(z.real), float(z.imag))
                 for i, z in enumerate(sample.hull)]
    ok = True
    if spectral_norm(ctx.operator.matrix) <= 1.0 + 1e-10:
        ok = bool(np.abs(pts).max() <= 1.0 + 1e-8)
    scalars = {"method": sample.method, "hull_vertices": len(sample.hull),
               "max_modulus": float(np.abs(pts).max())}
    files = {"numrange.csv": (("index", "re", "im"), rows),
             "numrange_hull.csv": (("index", "re", "im"), hull_rows)}
    plots = {"numrange.svg": ([("W(T) samples", [z.real for z in pts],
                                [z.imag for z in pts])],
                              dict(title="numerical range", xlabel="Re",
                                   ylabel="Im"))}
    return scalars, files, plots, ok


def an_resolvent(ctx):
    prof = spectral.resolvent_profile(ctx.operator.matrix,
                                      n_points=_knob(ctx.cfg, "theta_count"))
    rows = [(float(th), float(nm)) for th, nm in zip(prof.thetas, prof.norms)]
    scalars = {"alpha_hat": prof.alpha_hat, "c_hat": prof.c_hat,
               "r_squared": prof.r_squared, "touches_one": prof.touches_one,
               "skipped": len(prof.skipped)}
    ok = prof.alpha_hat >= 0.9 if prof.touches_one else True
    files = {"resolvent.csv": (("theta", "norm"), rows)}
    plots = {"resolvent.svg": ([("||R||", list(prof.thetas), list(prof.norms))],
                               dict(title="resolvent profile", xlabel="theta",
                                    ylabel="norm", xlog=True, ylog=True))}
    return scalars, files, plots, ok


def an_ritt(ctx):
    rep = spectral.ritt_diagnostic(ctx.operator.matrix,
                                   n=_knob(ctx.cfg, "iterations"))
    rows = [(n + 1, float(v)) for n, v in enumerate(rep.values)]
    scalars = {"sup": rep.sup, "consistent": rep.consistent}
    files = {"ritt.csv": (("n", "value"), rows)}
    plots = {"ritt.svg": ([("n||T^n(I-T)||", [r[0] for r in rows],
                            [r[1] for r in rows])],
                          dict(title="Ritt diagnostic", xlabel="n",
                               ylabel="value", xlog=True))}
    return scalars, files, plots, rep.consistent


def an_stolz(ctx):
    fit = spectral.stolz_fit(ctx.numrange_sample())
    scalars = {"alpha": fit.alpha, "c": fit.c, "eps": fit.eps,
               "status": fit.status}
    if fit.witness is not None:
        scalars["witness_re"] = float(fit.witness.real)
        scalars["witness_im"] = float(fit.witness.imag)
    rows = [(a, c) for a, c, _ in fit.per_alpha]
    files = {"stolz.csv": (("alpha", "c"), rows)}
    return scalars, files, {}, fit.status != "failed"


def an_kspectral(ctx):
    rep = spectral.k_spectral_check(ctx.operator.matrix, ctx.rotation_sample(),
                                    n=_knob(ctx.cfg, "kspectral_n"))
    rows = [(n + 1, float(l), float(rep.k * s + 1e-8))
            for n, (l, s) in enumerate(zip(rep.lhs, rep.s))]
    scalars = {"k": rep.k, "max_excess": rep.max_excess,
               "beta_hat": rep.beta_hat, "first_failure": rep.first_failure}
    files = {"kspectral.csv": (("n", "lhs", "bound"), rows)}
    plots = {"kspectral.svg": ([("lhs", [r[0] for r in rows], [r[1] for r in rows]),
                                ("bound", [r[0] for r in rows], [r[2] for r in rows])],
                               dict(title="K-spectral bound", xlabel="n",
                                    ylabel="value", xlog=True, ylog=True))}
    return scalars, files, plots, rep.passed


def an_halperin(ctx):
    samples = _knob(ctx.cfg, "halperin_samples")
    if ctx.space is None:
        factors = [orth_projection(s) for s in ctx.subspaces]
        mode, space = "hilbert", None
    else:
        factors = [p.as_projection_op() for p in ctx.lp_projs]
        mode, space = "lp", ctx.space
    est = lab.halperin_inequality_check(factors, mode=mode, samples=samples,
                                        seed=ctx.seed, space=space)
    est2 = lab.halperin_inequality_check(factors, mode=mode, samples=2 * samples,
                                         seed=ctx.seed, space=space)
    if est.c_hat == 0.0:
        change = 0.0 if est2.c_hat == 0.0 else np.inf
    else:
        change = abs(est2.c_hat - est.c_hat) / est.c_hat
    ok = bool(np.isfinite(est2.c_hat) and change < 0.2)
    scalars = {"c_hat": est.c_hat, "c_hat_doubled": est2.c_hat,
               "stability_change": float(change), "q": est.q,
               "exponent": est.exponent, "used": est.used,
               "skipped": est.skipped}
    files = {"halperin.csv": (("samples", "c_hat"),
                              [(samples, est.c_hat),
                               (2 * samples, est2.c_hat)])}
    return scalars, files, {}, ok


def an_dr_rate(ctx):
    if len(ctx.subspaces) != 2:
        raise ConfigError("dr-rate needs exactly 2 subspaces")
    rep = lab.dr_rate_check(ctx.subspaces[0], ctx.subspaces[1],
                            n=_knob(ctx.cfg, "dr_rate_n"))
    rows = [(n, float(g), float(rep.c ** n if n else 1.0))
            for n, g in enumerate(rep.gaps)]
    scalars = {"c": rep.c, "max_excess": rep.max_excess,
               "first_violation": rep.first_violation}
    files = {"dr_rate.csv": (("n", "gap", "bound"), rows)}
    plots = {"dr_rate.svg": ([("gap", [r[0] for r in rows if r[1] > 0],
                               [r[1] for r in rows if r[1] > 0]),
                              ("bound", [r[0] for r in rows if r[2] > 0],
                               [r[2] for r in rows if r[2] > 0])],
                             dict(title="DR rate", xlabel="n", ylabel="gap",
                                  ylog=True))}
    return scalars, files, plots, rep.passed


def an_slow(ctx):
    rates = np.asarray(ctx.cfg["slow_rates"], dtype=np.float64)
    try:
        inst = lab.slow_instance(rates)
    except RuntimeError as exc:
        return {"error": str(exc)}, {}, {}, False
    rows = [(n, float(r), float(inst.rates[n]))
            for n, r in enumerate(inst.residuals)]
    scalars = {"kappa": inst.kappa, "dim": inst.dim,
               "blocks": int(inst.rates.size)}
    files = {"slow_certificate.csv": (("n", "residual", "rate"), rows),
             "slow_m1.csv": ((_complex_header(inst.dim)), _complex_rows(inst.m1.basis.T)),
             "slow_m2.csv": ((_complex_header(inst.dim)), _complex_rows(inst.m2.basis.T)),
             "slow_x.csv": ((_complex_header(inst.dim)), _complex_rows(inst.x))}
    plots = {"slow.svg": ([("residual", [r[0] + 1 for r in rows],
                            [r[1] for r in rows]),
                           ("rate", [r[0] + 1 for r in rows],
                            [r[2] for r in rows])],
                          dict(title="certified slow instance", xlabel="n",
                               ylabel="value", xlog=True, ylog=True))}
    return scalars, files, plots, True


def _complex_header(dim):
    head = ["row"]
    for i in range(dim):
        head.extend([f"c{i}_re", f"c{i}_im"])
    return head


def an_superpoly(ctx):
    rep = lab.superpoly_vectors(ctx.operator.matrix,
                                k_max=_knob(ctx.cfg, "superpoly_kmax"),
                                n=_knob(ctx.cfg, "superpoly_n"),
                                seed=ctx.seed)
    ks = rep.ks
    rows = [(n, *(float(rep.curves[k][n]) for k in ks))
            for n in range(len(rep.curves[ks[0]]))]
    scalars = {f"slope_k{k}": rep.slopes[k] for k in ks}
    scalars["ordered"] = rep.ordered
    files = {"superpoly.csv": (("n", *(f"k{k}" for k in ks)), rows)}
    plots = {"superpoly.svg": ([(f"k={k}",
                                 [r[0] for r in rows if r[0] >= 1],
                                 [float(rep.curves[k][r[0]]) for r in rows if r[0] >= 1])
                                for k in ks],
                               dict(title="range-power decay", xlabel="n",
                                    ylabel="residual", xlog=True, ylog=True))}
    return scalars, files, plots, rep.ordered


ANALYSIS_FUNCS = {
    "dichotomy": an_dichotomy,
    "numrange": an_numrange,
    "resolvent": an_resolvent,
    "ritt": an_ritt,
    "stolz": an_stolz,
    "kspectral": an_kspectral,
    "halperin": an_halperin,
    "dr-rate": an_dr_rate,
    "slow": an_slow,
    "superpoly": an_superpoly,
}


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def resolve_seed(cfg, flag_seed):
    if flag_seed is not None:
        return int(flag_seed)
    env = os.environ.get("PDLAB_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"PDLAB_SEED is not an integer: {env!r}") from exc
    return int(cfg.get("seed", 0))


def run_config(cfg, seed, outdir):
    """Execute the configured analyses; returns (report dict, ok flag)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(cfg, seed, outdir)
    output_cfg = cfg.get("output", {})
    want_csv = output_cfg.get("csv", True)
    want_svg = output_cfg.get("svg", False)
    report = {
        "tool": "pdlab",
        "version": __version__,
        "backend": _kernels.BACKEND,
        "seed": seed,
        "config": cfg,
        "analyses": {},
        "flags": {},
    }
    if want_csv:  # the materialized operator closes the audit trail:
        # every flag is recomputable from the emitted files alone
        write_csv(outdir / "operator.csv",
                  _complex_header(ctx.operator.dim),
                  _complex_rows(ctx.operator.matrix))
    failed = []
    for name in cfg.get("analyses", []):
        func = ANALYSIS_FUNCS[name]
        try:
            scalars, files, plots, ok = func(ctx)
        except ConfigError:
            raise
        except Exception as exc:  # record and fail the analysis, keep going
            report["analyses"][name] = {"error": f"{type(exc).__name__}: {exc}"}
            report["flags"][name] = False
            failed.append(name)
            continue
        report["analyses"][name] = scalars
        report["flags"][name] = bool(ok)
        if not ok:
            failed.append(name)
        if want_csv:
            for fname, (header, rows) in files.items():
                write_csv(outdir / fname, header, rows)
        if want_svg:
            for fname, (series, opts) in plots.items():
                line_chart(outdir / fname, series, **opts)
    report["passed"] = not failed
    report["failed_analyses"] = failed
    with open(outdir / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return report, not failed


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_instance_config(base, param, value):
    cfg = json.loads(json.dumps(base))  # deep copy
    if param == "theta":
        cfg["space"] = {"kind": "hilbert", "dim": 2}
        cfg["subspaces"] = [
            [[[1.0, 0.0], [0.0, 0.0]]],
            [[[float(np.cos(value)), 0.0], [float(np.sin(value)), 0.0]]],
        ]
    elif param == "dim":
        d = int(round(value))
        cfg.setdefault("space", {"kind": "hilbert", "dim": d})["dim"] = d
        sub = cfg.get("subspaces")
        if isinstance(sub, dict) and "random" in sub:
            dims = sub["random"].get("dims")
            if dims:
                sub["random"]["dims"] = [max(1, min(int(r), d - 1)) for r in dims]
            else:
                sub["random"]["dims"] = [max(1, d // 2)] * sub["random"].get("count", 2)
    elif param == "p":
        space = cfg.setdefault("space", {"kind": "lp", "dim": 4})
        space["kind"] = "lp"
        space["p"] = float(value)
    else:
        raise ConfigError(f"unknown sweep parameter {param!r}")
    return validate_config(cfg)


HEADLINE = (("c_friedrichs", "dr-rate", "c"),
            ("r_fit", "dichotomy", "r_fit"),
            ("alpha_hat", "resolvent", "alpha_hat"),
            ("beta_hat", "kspectral", "beta_hat"),
            ("c_hat", "halperin", "c_hat"))


def run_sweep(base_cfg, param, lo, hi, steps, seed, outdir, jobs):
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    if hi < lo:
        raise ConfigError("sweep range must be non-decreasing")
    values = np.linspace(lo, hi, steps)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    def one(idx_value):
        idx, value = idx_value
        cfg = _sweep_instance_config(base_cfg, param, value)
        inst_seed = seed ^ idx
        inst_dir = outdir / f"instance_{idx:03d}"
        report, ok = run_config(cfg, inst_seed, inst_dir)
        row = [float(value)]
        for _, analysis, key in HEADLINE:
            val = report["analyses"].get(analysis, {}).get(key)
            row.append(float(val) if isinstance(val, (int, float)) else float("nan"))
        return idx, row, ok

    tasks = list(enumerate(values))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    rows = [r[1] for r in results]
    all_ok = all(r[2] for r in results)
    write_csv(outdir / "sweep.csv",
              (param, *(h for h, _, _ in HEADLINE)), rows)
    return rows, all_ok


# ---------------------------------------------------------------------------
# slow bundle
# ---------------------------------------------------------------------------

def read_rates_csv(path):
    rates = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rates.append(float(line.split(",")[0]))
                except ValueError:
                    if not rates:  # tolerate one header line
                        continue
                    raise ConfigError(f"bad rate line: {line!r}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read rates: {exc}") from exc
    if not rates:
        raise ConfigError("rates file is empty")
    return np.asarray(rates, dtype=np.float64)


def run_slow(rates_path, outdir):
    rates = read_rates_csv(rates_path)
    try:
        inst = lab.slow_instance(rates)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    except RuntimeError as exc:
        print(f"slow: certificate failure: {exc}", file=sys.stderr)
        return 2
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = [(n, float(r), float(inst.rates[n]))
            for n, r in enumerate(inst.residuals)]
    write_csv(outdir / "certificate.csv", ("n", "residual", "rate"), rows)
    write_csv(outdir / "m1_basis.csv", _complex_header(inst.dim),
              _complex_rows(inst.m1.basis.T))
    write_csv(outdir / "m2_basis.csv", _complex_header(inst.dim),
              _complex_rows(inst.m2.basis.T))
    write_csv(outdir / "x.csv", _complex_header(inst.dim), _complex_rows(inst.x))
    meta = {"tool": "pdlab", "version": __version__, "kappa": inst.kappa,
            "dim": inst.dim, "blocks": int(inst.rates.size)}
    with open(outdir / "instance.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="pdlab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the analyses in a config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default="pdlab-out")
    p_run.add_argument("--jobs", type=int, default=1)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    p_sweep.add_argument("--param", required=True, choices=("theta", "dim", "p"))
    p_sweep.add_argument("--from", dest="lo", type=float, required=True)
    p_sweep.add_argument("--to", dest="hi", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--out", default="pdlab-sweep")
    p_sweep.add_argument("--jobs", type=int, default=1)

    p_slow = sub.add_parser("slow", help="build a certified slow instance")
    p_slow.add_argument("--rates", required=True)
    p_slow.add_argument("--out", default="pdlab-slow")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            cfg = load_config(args.config)
            seed = resolve_seed(cfg, args.seed)
            report, ok = run_config(cfg, seed, args.out)
            if not ok:
                print("failed analyses: " + ", ".join(report["failed_analyses"]),
                      file=sys.stderr)
                return 2
            return 0
        if args.command == "sweep":
            cfg = load_config(args.config)
            seed = resolve_seed(cfg, args.seed)
            _, ok = run_sweep(cfg, args.param, args.lo, args.hi, args.steps,
                              seed, args.out, args.jobs)
            return 0 if ok else 2
        if args.command == "slow":
            return run_slow(args.rates, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"pdlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
