"""Batch front door: run simulations, convergence studies, spectra, benchmarks.

Configuration comes from an INI-style file (section ``[run]`` plus optional
``[convergence]`` / ``[spectrum]`` sections); command-line ``--set key=value``
pairs override file values, and every testcase provides defaults, so minimal
configs are one line.  CSV outputs carry a schema-version header comment.

Exit codes: 0 ok, 2 configuration error, 3 divergence (crash time in the
report), 4 size error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    EntropyRecorder,
    PositivityRecorder,
    SchemeUsageRecorder,
    SizeError,
    convergence_orders,
    flux_cost_report,
    jacobian_fd,
    l2_linf_errors,
    spectrum_max_real,
    total_entropy,
)
from .backend import BACKEND, kernels
from .equations import FLUX_CODES, ConfigurationError, FluxKind, equation, primitive_to_conserved
from .indicators import IndicatorConfig
from .semidiscretization import SemidiscretizationConfig, save_snapshot
from .testcases import available_testcases, build_config, initial_state
from .testcases import testcase as get_testcase
from .time_integration import StepController, integrate, rk_method
from .volume import VolumeSchemeMode

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_SIZE = 4

OUTPUT_DIR_ENV = "DGADAPT_OUTPUT_DIR"


class CLIConfigError(ConfigurationError):
    pass


def _parse_cells(text, ndims):
    parts = [p for p in text.replace("x", ",").split(",") if p.strip()]
    cells = tuple(int(p) for p in parts)
    if len(cells) == 1 and ndims == 2:
        cells = (cells[0], cells[0])
    if len(cells) != ndims:
        raise CLIConfigError(f"cells {text!r} does not match {ndims}D")
    return cells


def _parse_flux(name):
    for kind in FluxKind:
        if kind.value == name.lower() or kind.name.lower() == name.lower():
            return kind
    raise CLIConfigError(f"unknown flux kind {name!r}")


def _parse_mode(name):
    for mode in VolumeSchemeMode:
        if mode.value == name.lower():
            return mode
    raise CLIConfigError(f"unknown volume mode {name!r}; options: "
                         f"{[m.value for m in VolumeSchemeMode]}")


def _load_settings(args):
    """Merge config file [run] section with --set overrides."""
    settings = {}
    if args.config:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(args.config) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise CLIConfigError(f"cannot read config file: {exc}")
        except configparser.Error as exc:
            raise CLIConfigError(f"config parse error: {exc}")
        if parser.has_section("run"):
            settings.update(dict(parser.items("run")))
        settings["_sections"] = {
            name: dict(parser.items(name)) for name in parser.sections()
        }
    for item in args.set or []:
        if "=" not in item:
            raise CLIConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        settings[key.strip()] = value.strip()
    if args.testcase:
        settings["testcase"] = args.testcase
    if getattr(args, "threads", None):
        settings["threads"] = str(args.threads)
    if getattr(args, "deterministic", False):
        settings["threads"] = "1"
    return settings


def _build_problem(settings):
    """Testcase + overrides -> (tc, config, controller, method, extras)."""
    if "testcase" not in settings:
        raise CLIConfigError("no testcase given (config [run] section or "
                             "--testcase)")
    try:
        tc = get_testcase(settings["testcase"])
    except KeyError as exc:
        raise CLIConfigError(str(exc))
    ndims = tc.eq.ndims
    cells = _parse_cells(settings["cells"], ndims) if "cells" in settings else None
    p = int(settings["p"]) if "p" in settings else None
    surface = _parse_flux(settings["surface_flux"]) \
        if "surface_flux" in settings else None
    volume = _parse_flux(settings["volume_flux"]) \
        if "volume_flux" in settings else None
    mode = _parse_mode(settings["volume_mode"]) \
        if "volume_mode" in settings else None
    fv = _parse_flux(settings["fv_flux"]) if "fv_flux" in settings else None
    ind = tc.indicator
    ind_kw = dict(sigma=ind.sigma, indicator_variable=ind.indicator_variable,
                  beta_min=ind.beta_min, beta_max=ind.beta_max,
                  sc_default=ind.sc_default)
    if "sigma" in settings:
        ind_kw["sigma"] = float(settings["sigma"])
    if "indicator_variable" in settings:
        ind_kw["indicator_variable"] = settings["indicator_variable"]
    if "beta_min" in settings:
        ind_kw["beta_min"] = float(settings["beta_min"])
    if "beta_max" in settings:
        ind_kw["beta_max"] = float(settings["beta_max"])
    if "sc_default" in settings:
        ind_kw["sc_default"] = settings["sc_default"].upper()
    indicator = IndicatorConfig(**ind_kw)
    threads = int(settings.get("threads", "1"))
    try:
        config = build_config(tc, cells=cells, p=p, surface_kind=surface,
                              volume_flux=volume, volume_mode=mode,
                              fv_kind=fv, indicator=indicator, threads=threads)
    except ConfigurationError as exc:
        raise CLIConfigError(str(exc))
    t_final = float(settings.get("t_final", tc.t_final))
    max_steps = int(settings.get("max_steps", 10_000_000))
    if "dt" in settings:
        controller = StepController(t_final=t_final,
                                    dt=float(settings["dt"]),
                                    max_steps=max_steps)
    elif "cfl" in settings:
        controller = StepController(t_final=t_final,
                                    cfl=float(settings["cfl"]),
                                    max_steps=max_steps)
    elif tc.dt is not None:
        controller = StepController(t_final=t_final, dt=tc.dt,
                                    max_steps=max_steps)
    else:
        controller = StepController(t_final=t_final, cfl=tc.cfl,
                                    max_steps=max_steps)
    method = rk_method(settings.get("method", tc.method))
    return tc, config, controller, method


def _output_dir(args, settings):
    out = os.environ.get(OUTPUT_DIR_ENV) or args.output_dir \
        or settings.get("output_dir") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path, schema, header, rows):
    with open(path, "w") as fh:
        fh.write(f"# schema=dgadapt.{schema}.v1\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


# -- subcommands ------------------------------------------------------------------

def cmd_list(args):
    for tc_id in available_testcases():
        tc = get_testcase(tc_id)
        cells = "x".join(str(c) for c in tc.cells)
        print(f"{tc_id:22s} {tc.eq.id:9s} p={tc.p} cells={cells:9s} "
              f"t_final={tc.t_final:g} mode={tc.volume_mode.value}")
    return EXIT_OK


def cmd_run(args):
    settings = _load_settings(args)
    tc, config, controller, method = _build_problem(settings)
    out = _output_dir(args, settings)
    state = initial_state(tc, config)

    entropy = EntropyRecorder(config)
    positivity = PositivityRecorder(config)
    usage = SchemeUsageRecorder()
    counts = []

    def count_cb(step, t, field, reports):
        counts.append((t, sum(r.n_wf for r in reports),
                       sum(r.n_fd for r in reports)))

    print(f"run {tc.id}: {config.mesh.cells} cells, p={config.p}, "
          f"mode={config.volume_mode.value}, backend={BACKEND}")
    result = integrate(state, config, method, controller,
                       callbacks=[entropy, positivity, usage, count_cb])

    rows = []
    s0 = entropy.entropy[0]
    for i, t in enumerate(entropy.times):
        n_wf, n_fd = (counts[i - 1][1], counts[i - 1][2]) if i > 0 else (0, 0)
        rows.append((t, entropy.entropy[i], entropy.entropy[i] - s0,
                     positivity.min_rho[i], positivity.min_p[i], n_wf, n_fd))
    _write_csv(out / "timeseries.csv", "timeseries",
               ["t", "total_entropy", "entropy_drift", "min_rho", "min_p",
                "n_wf", "n_fd"], rows)
    _write_csv(out / "stages.csv", "stages",
               ["stage", "n_wf", "n_fd", "n_blend", "mean_beta",
                "total_entropy_rate_volume"], usage.rows)
    cost = flux_cost_report(result.counters)
    _write_csv(out / "cost.csv", "cost",
               ["n_stages", "analytical_evals", "two_point_evals", "fv_evals",
                "surface_evals", "n_wf", "n_fd", "n_blend", "time_surface",
                "time_volume"],
               [(cost.n_stages, cost.analytical_evals, cost.two_point_evals,
                 cost.fv_evals, cost.surface_evals, cost.n_wf, cost.n_fd,
                 cost.n_blend, cost.time_surface, cost.time_volume)])
    save_snapshot(out / "solution_final.npz", result.state, config)

    report = {
        "testcase": tc.id,
        "status": result.status,
        "t_end": result.state.t,
        "t_crash": result.t_crash,
        "n_steps": result.n_steps,
        "wall_time": result.wall_time,
        "backend": BACKEND,
        "version": __version__,
        "message": result.message,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"  status={result.status} t_end={result.state.t:.6g} "
          f"steps={result.n_steps} wall={result.wall_time:.2f}s")
    if result.status == "diverged":
        print(f"  crashed at t={result.t_crash:.6g}: {result.message}")
        return EXIT_DIVERGED
    if result.status != "completed":
        print(f"  {result.message}")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_convergence(args):
    settings = _load_settings(args)
    section = settings.get("_sections", {}).get("convergence", {})
    tc, config, controller, method = _build_problem(settings)
    if tc.exact is None:
        raise CLIConfigError(f"testcase {tc.id} has no exact solution")
    out = _output_dir(args, settings)
    grids_text = settings.get("grids", section.get("grids", "16,32,64"))
    grids = [int(g) for g in grids_text.split(",")]
    rows = []
    l2s, linfs = [], []
    for n in grids:
        cells = (n,) * tc.eq.ndims
        cfg = SemidiscretizationConfig(
            eq=config.eq, mesh=tc.mesh(cells), p=config.p,
            surface_kind=config.surface_kind, volume_mode=config.volume_mode,
            volume_flux=config.volume_flux, fv_kind=config.fv_kind,
            indicator=config.indicator, dirichlet=config.dirichlet,
            threads=config.threads)
        state = initial_state(tc, cfg)
        result = integrate(state, cfg, method, controller)
        if not result.completed:
            print(f"  grid {n}: {result.status} at t={result.state.t:.4g}")
            return EXIT_DIVERGED
        rep = l2_linf_errors(result.state, tc.exact, cfg,
                             mode=cfg.volume_mode.value)
        l2s.append(rep.l2[0])
        linfs.append(rep.linf[0])
        o2 = math.log2(l2s[-2] / l2s[-1]) if len(l2s) > 1 else float("nan")
        oi = math.log2(linfs[-2] / linfs[-1]) if len(linfs) > 1 else float("nan")
        rows.append((n, rep.l2[0], rep.linf[0], o2, oi))
        print(f"  grid {n:4d}: L2={rep.l2[0]:.4e} (order {o2:5.2f})  "
              f"Linf={rep.linf[0]:.4e} (order {oi:5.2f})")
    _write_csv(out / "errors.csv", "errors",
               ["grid", "l2", "linf", "order_l2", "order_linf"], rows)
    return EXIT_OK


def cmd_spectrum(args):
    settings = _load_settings(args)
    section = settings.get("_sections", {}).get("spectrum", {})
    modes_text = settings.get("modes", section.get(
        "modes", "wf,fd,adaptive_rigorous"))
    out = _output_dir(args, settings)
    eps = float(settings.get("eps", section.get("eps", "1e-6")))
    summary = {}
    for mode_name in modes_text.split(","):
        mode = _parse_mode(mode_name.strip())
        settings["volume_mode"] = mode.value
        tc, config, controller, method = _build_problem(settings)
        state = initial_state(tc, config)
        try:
            jac = jacobian_fd(config, state, eps_scale=eps)
        except SizeError as exc:
            print(f"size error: {exc}")
            return EXIT_SIZE
        rep = spectrum_max_real(jac)
        summary[mode.value] = rep.r
        _write_csv(out / f"spectrum_{mode.value}.csv", "spectrum",
                   ["re", "im"],
                   [(z.real, z.imag) for z in rep.eigenvalues])
        print(f"  mode={mode.value:18s} dim={rep.dim} r={rep.r:.6g}")
    with open(out / "spectrum_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return EXIT_OK


def cmd_bench_flux(args):
    if args.n < 1:
        raise CLIConfigError("bench-flux needs n >= 1")
    out = Path(os.environ.get(OUTPUT_DIR_ENV) or args.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    rng = np.random.default_rng(args.seed)
    for eq_id in ("euler1d", "euler2d"):
        eq = equation(eq_id)
        n_states = min(args.n, 100_000)
        repeats = max(1, args.n // n_states)
        # blast-like pairs: large pressure jump, zero velocity, unit density
        prim_l = np.zeros((n_states, eq.nvars))
        prim_r = np.zeros((n_states, eq.nvars))
        jitter = 1.0 + 1e-3 * rng.standard_normal((2, n_states))
        prim_l[:, 0] = jitter[0] ** 2
        prim_r[:, 0] = jitter[1] ** 2
        prim_l[:, -1] = 1e4 * jitter[0] ** 2
        prim_r[:, -1] = 1.0 * jitter[1] ** 2
        ul = np.ascontiguousarray(primitive_to_conserved(eq, prim_l))
        ur = np.ascontiguousarray(primitive_to_conserved(eq, prim_r))
        results = {}
        for label, code in (("analytical", -1),
                            ("ec_chandrashekar",
                             FLUX_CODES[FluxKind.EC_Chandrashekar]),
                            ("ec_ranocha", FLUX_CODES[FluxKind.EC_Ranocha])):
            per_dir = []
            for direction in range(eq.ndims):
                elapsed, nevals = kernels.bench_flux(
                    eq.eq_code, eq.gamma, code, ul, ur, direction, repeats)
                per_dir.append(1e9 * elapsed / nevals)
            results[label] = float(np.mean(per_dir))
            rows.append((eq_id, label, results[label]))
        print(f"  {eq_id}: analytical {results['analytical']:.2f} ns/eval, "
              f"chandrashekar {results['ec_chandrashekar']:.2f}, "
              f"ranocha {results['ec_ranocha']:.2f} "
              f"(backend={BACKEND})")
    _write_csv(out / "bench_flux.csv", "bench",
               ["equation", "flux", "ns_per_eval"], rows)
    return EXIT_OK


def make_parser():
    parser = argparse.ArgumentParser(
        prog="dgadapt",
        description="adaptive-volume-term DG solver")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list available testcases")

    def add_common(p):
        p.add_argument("config", nargs="?", default=None,
                       help="INI config file with a [run] section")
        p.add_argument("--testcase", help="testcase id (overrides config)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a [run] setting")
        p.add_argument("--output-dir", help=f"output directory "
                       f"(or ${OUTPUT_DIR_ENV})")
        p.add_argument("--threads", type=int, help="volume-pass threads")
        p.add_argument("--deterministic", action="store_true",
                       help="single-threaded, fixed reduction order")

    add_common(sub.add_parser("run", help="run a simulation"))
    add_common(sub.add_parser("convergence", help="grid refinement study"))
    add_common(sub.add_parser("spectrum", help="linearization spectra"))

    bench = sub.add_parser("bench-flux", help="flux evaluation microbenchmark")
    bench.add_argument("--n", type=int, default=10_000_000,
                       help="number of evaluations")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--output-dir", default=None)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    handlers = {
        "list": cmd_list,
        "run": cmd_run,
        "convergence": cmd_convergence,
        "spectrum": cmd_spectrum,
        "bench-flux": cmd_bench_flux,
    }
    try:
        return handlers[args.command](args)
    except CLIConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SizeError as exc:
        print(f"size error: {exc}", file=sys.stderr)
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())
