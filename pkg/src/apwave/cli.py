"""Command-line experiment runner.

Subcommands: run (single simulation with diagnostics time series), eoc and
aoc (convergence tables), vortex (kinetic-energy histories across epsilon),
ap (defect histories plus field dumps).  Options may also come from a flat
key=value config file; explicit flags win.  Exit codes: 0 success, 2 on
validation errors, 3 on solver failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import harness
from .diagnostics import defect_report
from .errors import ConfigurationError, NumericalBlowup, SolverFailure
from .grid import dump_csv, dump_matrix
from .problems import make_problem
from .stepper import run as run_simulation
from .tableau import builtin_tableau

# Mesh sequences used by the published convergence studies, per epsilon.
COSINE_TABLE_MESHES = {
    1.0: (25, 50, 100, 200),
    1e-1: (50, 100, 200, 400),
    1e-2: (800, 1600, 3200, 6400),
    1e-3: (3200, 6400, 12800, 25600),
}
AOC_MESHES = (20, 40, 80, 160)


def default_cosine_meshes(epsilon: float) -> tuple[int, ...]:
    for eps, meshes in COSINE_TABLE_MESHES.items():
        if abs(epsilon - eps) <= 1e-12 * max(1.0, eps):
            return meshes
    return COSINE_TABLE_MESHES[1.0]


def parse_mesh(text: str) -> tuple[int, ...]:
    """'40' -> (40,), '256x64' -> (256, 64)."""
    try:
        parts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ConfigurationError(f"cannot parse mesh {text!r}")
    if not parts or any(p <= 0 for p in parts):
        raise ConfigurationError(f"cannot parse mesh {text!r}")
    return parts


def parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ConfigurationError(f"cannot parse integer list {text!r}")


def parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigurationError(f"cannot parse float list {text!r}")


def load_config_file(path: str) -> dict[str, str]:
    """Flat key=value text; blank lines and '#' comments ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


_CONFIG_PARSERS = {
    "problem": str,
    "epsilon": float,
    "epsilons": parse_float_list,
    "tableau": str,
    "cfl": float,
    "mesh": parse_mesh,
    "meshes": parse_int_list,
    "t_final": float,
    "solver_tol": float,
    "observe_every": int,
    "out": str,
    "advection_on": lambda s: s.lower() in ("1", "true", "yes", "on"),
}


def merge_options(args: argparse.Namespace) -> dict:
    """Config-file values overridden by explicit command-line flags."""
    merged: dict = {}
    if getattr(args, "config", None):
        for key, raw in load_config_file(args.config).items():
            if key not in _CONFIG_PARSERS:
                raise ConfigurationError(f"unknown config key {key!r}")
            merged[key] = _CONFIG_PARSERS[key](raw)
    for key in _CONFIG_PARSERS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _out_dir(options: dict) -> Path:
    out = Path(options.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump_fields(state, prefix: str, out: Path) -> None:
    fields = {"varrho": state.varrho}
    for m in range(state.grid.dim):
        fields[f"u{m + 1}"] = state.vel[m]
    for name, data in fields.items():
        dump_matrix(data, out / f"{prefix}_{name}.txt")
        dump_csv(data, state.grid, out / f"{prefix}_{name}.csv")


def cmd_run(options: dict) -> int:
    spec = make_problem(options.get("problem", "cosine_wave"), options.get("epsilon", 1.0))
    params = spec.params
    if "advection_on" in options:
        params = dataclasses.replace(params, advection_on=options["advection_on"])
    grid = spec.make_grid(options.get("mesh"))
    tab = builtin_tableau(options.get("tableau", "ARS222"))
    t_final = options.get("t_final", spec.t_final)
    initial = spec.initial_state(grid)
    report0 = defect_report(initial)

    observers = {
        "energy": lambda s: defect_report(s).energy,
        "kinetic": lambda s: defect_report(s).kinetic,
        "grad_rho_L2": lambda s: defect_report(s).grad_rho_norm,
        "div_u_L2": lambda s: defect_report(s).div_u_norm,
        "dist_E": lambda s: defect_report(s).dist_E,
    }
    result = run_simulation(initial, params, tab, options.get("cfl", spec.cfl), t_final,
                            observers=observers,
                            observe_every=options.get("observe_every", 1),
                            solver_tol=options.get("solver_tol", 1e-12))
    out = _out_dir(options)
    names = ["energy", "kinetic", "grad_rho_L2", "div_u_L2", "dist_E"]
    rows = [[0.0, report0.energy, report0.kinetic, report0.grad_rho_norm,
             report0.div_u_norm, report0.dist_E]]
    rows += [[t] + [result.series[n][i] for n in names] for i, t in enumerate(result.times)]
    harness.write_csv(out / "timeseries.csv", ["t"] + names, rows)
    _dump_fields(result.state, "final", out)
    print(f"{spec.name}: advanced {result.n_steps} steps to t={result.t:g} "
          f"on {'x'.join(str(n) for n in grid.n_cells)} cells")
    print(f"wrote {out / 'timeseries.csv'}")
    return 0


def cmd_eoc(options: dict) -> int:
    problem = options.get("problem", "cosine_wave")
    epsilon = options.get("epsilon", 1.0)
    meshes = options.get("meshes")
    if not meshes and problem == "cosine_wave":
        meshes = default_cosine_meshes(epsilon)
    config = harness.RunConfig(
        problem=problem, epsilon=epsilon,
        tableau=options.get("tableau", "ARS222"),
        cfl=options.get("cfl", 0.45),
        meshes=tuple(meshes or ()),
        t_final=options.get("t_final"),
        solver_tol=options.get("solver_tol", 1e-12),
    )
    table = harness.run_eoc(config)
    out = _out_dir(options)
    stem = f"eoc_{problem}_eps{epsilon:g}"
    harness.emit(table, "csv", out / f"{stem}.csv")
    harness.emit(table, "table", out / f"{stem}.txt")
    sys.stdout.write(harness.format_eoc_table(table))
    print(f"wrote {out / (stem + '.csv')}")
    return 0


def cmd_aoc(options: dict) -> int:
    epsilon = options.get("epsilon", 1e-3)
    config = harness.RunConfig(
        problem="schneider_vortex", epsilon=epsilon,
        tableau=options.get("tableau", "ARS222"),
        cfl=options.get("cfl", 0.45),
        meshes=tuple(options.get("meshes") or AOC_MESHES),
        t_final=options.get("t_final"),
        solver_tol=options.get("solver_tol", 1e-12),
    )
    table = harness.run_aoc(config)
    out = _out_dir(options)
    stem = f"aoc_eps{epsilon:g}"
    harness.emit(table, "csv", out / f"{stem}.csv")
    harness.emit(table, "table", out / f"{stem}.txt")
    sys.stdout.write(harness.format_eoc_table(table))
    print(f"max scaled-density drift: {table.max_density_drift:.3e}")
    print(f"wrote {out / (stem + '.csv')}")
    return 0


def cmd_vortex(options: dict) -> int:
    config = harness.RunConfig(
        problem="travelling_vortex",
        tableau=options.get("tableau", "ARS222"),
        cfl=options.get("cfl", 0.45),
        mesh=options.get("mesh"),
        t_final=options.get("t_final"),
        solver_tol=options.get("solver_tol", 1e-12),
        observe_every=options.get("observe_every", 1),
        epsilons=tuple(options.get("epsilons") or (1.0, 1e-1, 1e-2, 1e-3)),
    )
    result = harness.run_vortex(config)
    out = _out_dir(options)
    for eps in result.epsilons:
        rows = list(zip(result.times, result.relative_ke[eps]))
        harness.write_csv(out / f"ke_eps{eps:g}.csv", ["t", "relative_ke"], rows)
    summary = [[eps, result.final_ratio[eps]] for eps in result.epsilons]
    harness.write_csv(out / "ke_summary.csv", ["epsilon", "ke_final_over_ke0"], summary)
    print(f"max relative-KE spread across epsilon: {result.max_spread:.3e}")
    for eps in result.epsilons:
        print(f"  eps={eps:g}: KE(T)/KE(0) = {result.final_ratio[eps]:.6f}")
    return 0


def cmd_ap(options: dict) -> int:
    config = harness.RunConfig(
        problem="well_prepared_2d",
        epsilon=options.get("epsilon", 1e-4),
        tableau=options.get("tableau", "ARS222"),
        cfl=options.get("cfl", 0.45),
        mesh=options.get("mesh"),
        t_final=options.get("t_final"),
        solver_tol=options.get("solver_tol", 1e-12),
        observe_every=options.get("observe_every", 1),
    )
    result = harness.run_ap(config)
    out = _out_dir(options)
    rows = list(zip(result.times, result.grad_rho, result.div_u))
    harness.write_csv(out / "defects.csv", ["t", "grad_rho_L2", "div_u_L2"], rows)
    _dump_fields(result.initial_state, "initial", out)
    _dump_fields(result.final_state, "final", out)
    print(f"grad_rho_L2: {result.grad_rho[0]:.3e} -> {result.grad_rho[-1]:.3e}")
    print(f"div_u_L2:    {result.div_u[0]:.3e} -> {result.div_u[-1]:.3e}")
    print(f"wrote {out / 'defects.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apwave",
        description="Finite volume experiments for the scaled wave equation system")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--epsilon", type=float, help="Mach-like scaling parameter")
        p.add_argument("--tableau", choices=("ARS222", "EULER111"), help="time integrator")
        p.add_argument("--cfl", type=float, help="advective CFL number in (0, 1)")
        p.add_argument("--t-final", dest="t_final", type=float, help="final time override")
        p.add_argument("--solver-tol", dest="solver_tol", type=float,
                       help="stage solve residual tolerance")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--config", help="flat key=value config file")

    p_run = sub.add_parser("run", help="single simulation with diagnostics time series")
    add_common(p_run)
    p_run.add_argument("--problem", help="problem name")
    p_run.add_argument("--mesh", type=parse_mesh, help="cells per axis, e.g. 64 or 256x64")
    p_run.add_argument("--observe-every", dest="observe_every", type=int)
    p_run.add_argument("--no-advection", dest="advection_on", action="store_false",
                       default=None, help="disable the advective terms")

    p_eoc = sub.add_parser("eoc", help="convergence table against the exact solution")
    add_common(p_eoc)
    p_eoc.add_argument("--problem", help="problem name (default cosine_wave)")
    p_eoc.add_argument("--meshes", type=parse_int_list,
                       help="comma-separated per-axis sizes, e.g. 25,50,100,200")

    p_aoc = sub.add_parser("aoc", help="convergence table against the incompressible limit")
    add_common(p_aoc)
    p_aoc.add_argument("--meshes", type=parse_int_list)

    p_vortex = sub.add_parser("vortex", help="vortex kinetic-energy histories across epsilon")
    add_common(p_vortex)
    p_vortex.add_argument("--epsilons", type=parse_float_list,
                          help="comma-separated sweep values")
    p_vortex.add_argument("--mesh", type=parse_mesh)
    p_vortex.add_argument("--observe-every", dest="observe_every", type=int)

    p_ap = sub.add_parser("ap", help="well-prepared defect history and field dumps")
    add_common(p_ap)
    p_ap.add_argument("--mesh", type=parse_mesh)
    p_ap.add_argument("--observe-every", dest="observe_every", type=int)

    return parser


_COMMANDS = {"run": cmd_run, "eoc": cmd_eoc, "aoc": cmd_aoc,
             "vortex": cmd_vortex, "ap": cmd_ap}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = merge_options(args)
        return _COMMANDS[args.command](options)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverFailure, NumericalBlowup) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
