"""Command-line entry point: ``trusstube {uniform,tube,converge,phase,figures}``.

Exit codes: 0 success, 2 domain or config error, 3 kinematic lock (partial
output written), 4 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import ConvergenceConfig, compare, convergence_sweep, figure_data
from .cell import build_cell, solve_closure
from .continuum import (ElasticaState, integrate_elastica, pendulum_period, phase_diagram,
                        phase_invariant, reconstruct_profile)
from .discrete import TubeSpec, extract_gamma_profile, solve_tube
from .errors import ConfigError, DomainError, LockError, TrussTubeError
from .export import fmt, write_csv, write_manifest, write_obj
from .uniform import compatible_rotations, generate_uniform_mesh

EXIT_OK, EXIT_DOMAIN, EXIT_LOCK, EXIT_NUMERIC = 0, 2, 3, 4
FIGURES = ("curvature-vs-phi", "phase-diagram", "tube-profiles", "convergence")


class _Run:
    """Collects outputs and writes the manifest at the end of a subcommand."""

    def __init__(self, name: str, out: Path, params: dict):
        self.name, self.out, self.params = name, Path(out), params
        self.outputs: list[str] = []
        self.results: dict = {}
        self.t0 = time.perf_counter()
        self.started = datetime.now(timezone.utc).isoformat()
        self.out.mkdir(parents=True, exist_ok=True)

    def path(self, filename: str) -> Path:
        self.outputs.append(filename)
        return self.out / filename

    def finish(self, status: str = "ok") -> None:
        write_manifest(self.out / "manifest.json", {
            "subcommand": self.name,
            "parameters": self.params,
            "version": __version__,
            "outputs": self.outputs,
            "results": self.results,
            "status": status,
            "started_at": self.started,
            "duration_s": time.perf_counter() - self.t0,
        })


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


# ---------------------------------------------------------------- uniform

def cmd_uniform(args) -> int:
    angles = solve_closure(math.radians(args.theta))
    cell = build_cell(args.r, angles)
    folding = compatible_rotations(cell, math.radians(args.phi))
    run = _Run("uniform", args.out, {"theta_deg": args.theta, "phi_deg": args.phi, "r": args.r,
                                     "n1": args.n1, "n2": args.n2})
    mesh = generate_uniform_mesh(folding, args.n1, args.n2)
    write_obj(run.path("uniform.obj"), mesh)
    run.results = {"rho": folding.rho, "alpha_deg": math.degrees(folding.alpha),
                   "beta_deg": math.degrees(folding.beta)}
    print(f"rho = {fmt(folding.rho)}")
    print(f"rho_over_r = {fmt(folding.rho / args.r)}")
    print(f"alpha_deg = {fmt(math.degrees(folding.alpha))}")
    print(f"beta_deg = {fmt(math.degrees(folding.beta))}")
    run.finish()
    return EXIT_OK


# ---------------------------------------------------------------- tube

def cmd_tube(args) -> int:
    spec = TubeSpec(N=args.N, r=args.r, theta0=math.radians(args.theta0),
                    omega0=math.radians(args.omega0))
    if args.n_rings < 3:
        raise DomainError("n-rings must be at least 3")
    geom = spec.geometry()
    L = geom.Lscale
    init = (spec.omega0, (math.pi / 2.0 - spec.theta0) / geom.gamma_scale())
    span = args.span if args.span is not None else (args.n_rings - 2) * spec.pitch / L
    if span <= 0:
        raise DomainError("span must be positive")
    run = _Run("tube", args.out, {"mode": args.mode, "N": args.N, "r": args.r,
                                  "theta0_deg": args.theta0, "omega0_deg": args.omega0,
                                  "n_rings": args.n_rings, "span": span, "step": args.step,
                                  "resample": args.resample})
    run.results = {"W": spec.W, "Lscale": L, "omega_hat0": init[0], "omega_hat0_prime": init[1]}
    status = EXIT_OK

    if args.mode in ("ode", "both"):
        traj = integrate_elastica(ElasticaState(*init), span, args.step)
        prof = reconstruct_profile(traj, geom)
        write_csv(run.path("ode_profile.csv"), {
            "xi2": prof.xi2, "s": traj.s, "omega_hat": traj.omega,
            "omega_hat_prime": traj.omega_prime, "rho": prof.rho, "z": prof.z,
            "gamma": prof.gamma, "b11": prof.b11, "b22": prof.b22})

    if args.mode in ("discrete", "both"):
        tube = solve_tube(spec, args.n_rings)
        write_obj(run.path("tube.obj"), tube.to_mesh())
        gp = extract_gamma_profile(tube)
        write_csv(run.path("discrete_profile.csv"), {
            "ring": gp.index, "xi2": gp.xi2, "s": gp.s, "radius": tube.radii(),
            "z": tube.heights(), "theta": tube.thetas(), "gamma": gp.gamma,
            "gamma_hat": gp.gamma_hat})
        run.results["bar_error_max"] = tube.audit()
        run.results["rings_built"] = tube.n_rings
        if tube.lock is not None:
            print(f"warning: {tube.lock}; partial tube written", file=sys.stderr)
            run.results["lock"] = str(tube.lock)
            status = EXIT_LOCK

    if args.mode == "both" and status == EXIT_OK:
        grid = np.linspace(0.0, min(span, gp.s[-1]), args.resample)
        write_csv(run.path("overlay.csv"), {
            "s": grid, "gamma_hat_ode": np.interp(grid, traj.s, traj.omega_prime),
            "gamma_hat_discrete": np.interp(grid, gp.s, gp.gamma_hat)})
        level = phase_invariant(ElasticaState(*init))
        T = args.T if args.T is not None else (
            pendulum_period(ElasticaState(*init)) if -1.0 < level < 1.0 else span)
        c = compare(spec.N, spec.W, init, T, args.resample, args.step)
        run.results.update({"T": T, "e": c.e})
        print(f"e = {fmt(c.e)}  (T = {fmt(T)})")

    run.finish("lock" if status == EXIT_LOCK else "ok")
    return status


# ---------------------------------------------------------------- converge

CONFIG_KEYS = {"W", "r_over_W", "r_values", "omega0_deg", "omega0_prime", "T", "resample", "step"}


def read_config(path: Path) -> tuple[dict, dict]:
    """Parse flat ``key = value`` text; returns values and their line numbers."""
    values, lines = {}, {}
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", no)
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", no)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", no)
        try:
            values[key] = _float_list(value) if key in ("r_over_W", "r_values") else float(value)
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {value!r}", no) from None
        lines[key] = no
    return values, lines


def build_convergence_config(values: dict, lines: dict, overrides: dict) -> tuple[ConvergenceConfig, float]:
    values = {**values, **{k: v for k, v in overrides.items() if v is not None}}
    W = values.get("W", 1.0)
    if W <= 0:
        raise ConfigError("W must be positive", lines.get("W"))
    if ("r_over_W" in values) == ("r_values" in values):
        raise ConfigError("give exactly one of r_over_W or r_values")
    key = "r_over_W" if "r_over_W" in values else "r_values"
    rs = [W * x for x in values[key]] if key == "r_over_W" else list(values[key])
    if len(rs) < 4:
        raise ConfigError(f"{key} needs at least 4 values, got {len(rs)}", lines.get(key))
    for name in ("resample",):
        if name in values and values[name] != int(values[name]):
            raise ConfigError(f"{name} must be an integer", lines.get(name))
    try:
        cfg = ConvergenceConfig(
            r_values=sorted(rs, reverse=True),
            init=(math.radians(values.get("omega0_deg", 90.0)), values.get("omega0_prime", 0.0)),
            T=values.get("T"),
            resample=int(values.get("resample", 4001)),
            step=values.get("step", 1e-3))
        cfg.admissible(W)
        cfg.span()
    except DomainError as err:
        raise ConfigError(str(err), lines.get(key)) from None
    return cfg, W


def cmd_converge(args) -> int:
    values, lines = read_config(args.config)
    cfg, W = build_convergence_config(values, lines, {"T": args.T, "resample": args.resample})
    run = _Run("converge", args.out, {"config": str(args.config), "W": W,
                                      "r_values": cfg.r_values, "init": list(cfg.init),
                                      "T": cfg.span(), "resample": cfg.resample, "step": cfg.step})
    rep = convergence_sweep(cfg, W, args.workers)
    write_csv(run.path("convergence.csv"), {
        "r": np.array([p.r for p in rep.points]),
        "r_over_W": np.array([p.r / W for p in rep.points]),
        "N": np.array([p.N for p in rep.points]),
        "e": np.array([p.e for p in rep.points]),
        "used": np.array([int(p.status == "ok") for p in rep.points])})
    run.results = {"slope": rep.slope, "intercept": rep.intercept, "residual": rep.residual,
                   "flagged": {fmt(p.r): p.status for p in rep.points if p.status != "ok"}}
    for p in rep.points:
        flag = "" if p.status == "ok" else f"  [{p.status}]"
        print(f"r/W = {fmt(p.r / W)}  N = {p.N}  e = {fmt(p.e)}{flag}")
    print(f"slope = {fmt(rep.slope)}  residual = {fmt(rep.residual)}")
    run.finish()
    return EXIT_OK


# ---------------------------------------------------------------- phase / figures

def cmd_phase(args) -> int:
    contours = phase_diagram(args.levels, args.resolution)
    run = _Run("phase", args.out, {"levels": args.levels, "resolution": args.resolution})
    table = figure_data("phase-diagram", levels=args.levels, resolution=args.resolution)
    write_csv(run.path("phase.csv"), table)
    run.results = {"branches": {fmt(k): len(v) for k, v in contours.items()}}
    run.finish()
    return EXIT_OK


def cmd_figures(args) -> int:
    names = FIGURES if args.figure == "all" else (args.figure,)
    run = _Run("figures", args.out, {"figures": list(names)})
    for name in names:
        write_csv(run.path(f"fig_{name.replace('-', '_')}.csv"), figure_data(name))
    run.finish()
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trusstube", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    u = sub.add_parser("uniform", help="uniformly folded cylinder mesh")
    u.add_argument("--theta", type=float, required=True, help="cell fold angle [deg]")
    u.add_argument("--phi", type=float, default=0.0, help="axis angle [deg]")
    u.add_argument("--r", type=float, default=1.0, help="bar length")
    u.add_argument("--n1", type=_positive_int, default=10)
    u.add_argument("--n2", type=_positive_int, default=3)
    u.add_argument("--out", type=Path, default=Path("out"))
    u.set_defaults(func=cmd_uniform)

    t = sub.add_parser("tube", help="axisymmetric tube: elastica, discrete or both")
    t.add_argument("--mode", choices=("ode", "discrete", "both"), default="both")
    t.add_argument("--N", type=int, required=True, help="cells around the circumference")
    t.add_argument("--r", type=float, default=1.0, help="bar length")
    t.add_argument("--theta0", type=float, default=90.0, help="seed fold angle [deg]")
    t.add_argument("--omega0", type=float, default=90.0, help="seed tilt [deg]")
    t.add_argument("--n-rings", type=int, default=60, help="node rings to build")
    t.add_argument("--span", type=float, default=None, help="ODE range in xi2/L")
    t.add_argument("--T", type=float, default=None, help="error range in xi2/L")
    t.add_argument("--step", type=float, default=1e-3)
    t.add_argument("--resample", type=_positive_int, default=4001)
    t.add_argument("--out", type=Path, default=Path("out"))
    t.set_defaults(func=cmd_tube)

    c = sub.add_parser("converge", help="discrete-to-continuum convergence sweep")
    c.add_argument("--config", type=Path, required=True, help="flat key = value file")
    c.add_argument("--T", type=float, default=None)
    c.add_argument("--resample", type=_positive_int, default=None)
    c.add_argument("--workers", type=_positive_int, default=None)
    c.add_argument("--out", type=Path, default=Path("out"))
    c.set_defaults(func=cmd_converge)

    ph = sub.add_parser("phase", help="iso-contours of the pendulum invariant")
    ph.add_argument("--levels", type=_float_list, default=[-0.75, 0.0, 0.75, 1.0, 1.5])
    ph.add_argument("--resolution", type=int, default=256)
    ph.add_argument("--out", type=Path, default=Path("out"))
    ph.set_defaults(func=cmd_phase)

    f = sub.add_parser("figures", help="CSV datasets for the reference plots")
    f.add_argument("--figure", choices=("all",) + FIGURES, default="all")
    f.add_argument("--out", type=Path, default=Path("out"))
    f.set_defaults(func=cmd_figures)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LockError as err:
        print(f"error: kinematic lock: {err}", file=sys.stderr)
        return EXIT_LOCK
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (TrussTubeError, ArithmeticError, np.linalg.LinAlgError) as err:
        print(f"error: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
