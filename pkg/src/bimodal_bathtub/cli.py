"""Command-line front end.

Commands: solve, solve-pc, verify, sweep, regime-map, profiles, tables.
Exit codes: 0 success, 1 validation error, 2 solver failure, 3 oracle
threshold failure (verify only). All state flows through flags and files;
profile CSVs also get a rendered PNG next to them unless --no-figures.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments, figures
from .equilibrium_pc import solve_pc
from .equilibrium_ue import SolverError, solve_ue
from .oracle import _cost_arrays, solution_breakpoints, verify
from .profiles import knot_grid
from .rootfind import BracketError
from .scenario import ScenarioError, derive_params, load_scenario

PROFILE_HEADER = "t_abs,t_rel,n_c,v_c,v_F,O_F,G_c,G_Fp,q,T_b,C_c,C_F"
MAP_HEADER = ("x,y,c_star,ue_regime,c_pstar,pc_regime,"
              "theta_le_1,theta_le_2,max_residual,error")
DEFAULT_SAMPLE_STEP = 1e-3
DEFAULT_ORACLE_STEP = 1e-4


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def sample_profiles(sol, p, d, step: float) -> dict:
    """Knot-aligned sample of every profile column of the CSV schema."""
    grid = knot_grid(solution_breakpoints(sol), step)
    n_c, o_f, cost_car, cost_frt, wait, v_c, v_f = _cost_arrays(sol, p, d, grid)
    zero = np.zeros_like(grid)
    q = sol.q(grid) if hasattr(sol, "q") else zero
    return {
        "t_abs": grid,
        "t_rel": grid - p.t_star,
        "n_c": n_c,
        "v_c": v_c,
        "v_F": v_f,
        "O_F": o_f,
        "G_c": sol.g_car(grid),
        "G_Fp": sol.g_frt(grid),
        "q": q,
        "T_b": wait,
        "C_c": cost_car,
        "C_F": cost_frt,
    }


def write_profile_csv(path, table: dict) -> None:
    cols = PROFILE_HEADER.split(",")
    lines = [PROFILE_HEADER]
    n = len(table["t_abs"])
    for i in range(n):
        lines.append(",".join(_fmt(table[c][i]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sweep_csv(path, rows) -> None:
    lines = [experiments.SweepRow.CSV_HEADER]
    lines.extend(row.as_csv_row() for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_map_csv(path, cells) -> None:
    lines = [MAP_HEADER]
    for c in cells:
        lines.append(",".join([
            _fmt(c.x), _fmt(c.y), _fmt(c.c_star), c.ue_regime, _fmt(c.c_p_star),
            c.pc_regime, str(int(c.theta_le_1)), str(int(c.theta_le_2)),
            _fmt(c.max_residual), c.error.replace(",", ";"),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _print_solution(sol, kind: str) -> None:
    print(f"{kind} regime: {sol.regime.value}")
    if kind == "gated":
        print(f"c_p_star = {_fmt(sol.c_p_star)}")
        print(f"theta_p = {_fmt(sol.theta_p)}")
    else:
        print(f"c_star = {_fmt(sol.c_star)}")
        print(f"theta = {_fmt(sol.theta)}")
    print(f"n_car = {_fmt(sol.n_car)}")
    print(f"n_frt = {_fmt(sol.n_frt)}")
    events = ("t_s_f", "t_s_c", "t_ee_f", "t_s_p", "t_sp_f", "t_ep_f",
              "t_e_p", "t_sl_f", "t_e_c", "t_e_f")
    for name in events:
        value = getattr(sol, name, None)
        if value is not None:
            print(f"{name} = {_fmt(value)}")


def _grid_values(spec: str):
    """Parse a grid flag: either a comma list or lo:hi:count."""
    if ":" in spec:
        lo, hi, count = spec.split(":")
        return list(np.linspace(float(lo), float(hi), int(count)))
    return [float(v) for v in spec.split(",") if v.strip()]


def _solve_command(args, gated: bool) -> int:
    p = load_scenario(args.scenario)
    d = derive_params(p)
    sol = solve_pc(p, d) if gated else solve_ue(p, d)
    _print_solution(sol, "gated" if gated else "no-control")
    if args.out:
        step = args.step or DEFAULT_SAMPLE_STEP
        table = sample_profiles(sol, p, d, step)
        write_profile_csv(args.out, table)
        print(f"profiles written to {args.out}")
        if not args.no_figures:
            png = Path(args.out).with_suffix(".png")
            figures.profile_figure(table, f"{'gated' if gated else 'no-control'} equilibrium", png)
            print(f"figure written to {png}")
    return 0


def _verify_command(args) -> int:
    p = load_scenario(args.scenario)
    d = derive_params(p)
    step = args.step or DEFAULT_ORACLE_STEP
    pc = solve_pc(p, d)
    reports = {"ue": verify(pc.ue, p, d, step)}
    if pc.regime.value != "inactive":
        reports["pc"] = verify(pc, p, d, step)
    text = []
    for tag, report in reports.items():
        text.append(f"[{tag}]")
        text.append(report.as_text().rstrip())
    body = "\n".join(text) + "\n"
    print(body, end="")
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    if any(not r.passes() for r in reports.values()):
        for tag, report in reports.items():
            for failure in report.failures():
                print(f"threshold failure [{tag}]: {failure}", file=sys.stderr)
        return 3
    return 0


def _sweep_command(args) -> int:
    p = load_scenario(args.scenario)
    values = _grid_values(args.values)
    rows = experiments.sweep(p, args.key, values, args.step or DEFAULT_ORACLE_STEP)
    write_sweep_csv(args.out, rows)
    print(f"sweep written to {args.out}")
    if not args.no_figures:
        png = Path(args.out).with_suffix(".png")
        figures.sweep_figure(rows, args.key, png)
        print(f"figure written to {png}")
    return 0


def _map_command(args) -> int:
    p = load_scenario(args.scenario)
    xs = _grid_values(args.x_grid)
    ys = _grid_values(args.y_grid)
    cells = experiments.regime_map(p, args.x_key, xs, args.y_key, ys,
                                   args.step or DEFAULT_ORACLE_STEP)
    write_map_csv(args.out, cells)
    print(f"regime map written to {args.out}")
    if not args.no_figures:
        png = Path(args.out).with_suffix(".png")
        boundaries = None
        if args.x_key == "n_f_cbd" and args.y_key == "f_f":
            bx = np.linspace(min(xs), max(xs), 60)
            boundaries = [
                (bx, [experiments.boundary_f_f(p, x, 1.0) for x in bx], "df = a*dtf"),
                (bx, [experiments.boundary_f_f(p, x, 2.0) for x in bx], "df = 2*a*dtf"),
            ]
        figures.regime_map_figure(cells, args.x_key, args.y_key, png, boundaries)
        print(f"figure written to {png}")
    return 0


def _profiles_command(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = experiments.base_case_profiles(args.case, args.step or DEFAULT_ORACLE_STEP)
    p = result["params"]
    d = derive_params(p)
    step = DEFAULT_SAMPLE_STEP if args.step is None else args.step
    label = args.case.replace("-", "_")
    for tag, sol in (("ue", result["ue"]), ("pc", result["pc"])):
        table = sample_profiles(sol, p, d, step)
        csv_path = out_dir / f"profiles_{label}_{tag}.csv"
        write_profile_csv(csv_path, table)
        print(f"profiles written to {csv_path}")
        if not args.no_figures:
            png = csv_path.with_suffix(".png")
            figures.profile_figure(table, f"{args.case} {tag}", png)
            print(f"figure written to {png}")
    return 0


def _tables_command(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = experiments.fleet_and_cost_tables(args.step or DEFAULT_ORACLE_STEP)
    for stem, rows in tables.items():
        csv_path = out_dir / f"{stem}.csv"
        write_sweep_csv(csv_path, rows)
        print(f"table written to {csv_path}")
        if not args.no_figures:
            label = "n_f_cbd" if stem.startswith("table1") else "f_f"
            figures.sweep_figure(rows, label, csv_path.with_suffix(".png"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bimodal-bathtub",
        description="Bimodal bathtub commute equilibria, with and without perimeter gating.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True, out_required=False):
        if scenario:
            sp.add_argument("--scenario", required=True, help="scenario key=value file")
        sp.add_argument("--out", required=out_required, help="output path")
        sp.add_argument("--step", type=float, default=None, help="grid/sampling step [h]")
        sp.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    common(sub.add_parser("solve", help="no-control equilibrium"))
    common(sub.add_parser("solve-pc", help="equilibrium under perimeter gating"))
    common(sub.add_parser("verify", help="solve and run the numeric verifier"))

    sp = sub.add_parser("sweep", help="one-parameter sensitivity sweep")
    common(sp, out_required=True)
    sp.add_argument("--key", required=True, help="scenario key to sweep")
    sp.add_argument("--values", required=True, help="comma list or lo:hi:count")

    sp = sub.add_parser("regime-map", help="two-parameter regime map")
    common(sp, out_required=True)
    sp.add_argument("--x-key", required=True)
    sp.add_argument("--x-grid", required=True, help="comma list or lo:hi:count")
    sp.add_argument("--y-key", required=True)
    sp.add_argument("--y-grid", required=True, help="comma list or lo:hi:count")

    sp = sub.add_parser("profiles", help="bundled demonstration cases")
    common(sp, scenario=False, out_required=True)
    sp.add_argument("--case", required=True, choices=sorted(experiments.CASE_LABELS))

    sp = sub.add_parser("tables", help="bundled sensitivity tables")
    common(sp, scenario=False, out_required=True)
    return parser


_COMMANDS = {
    "solve": lambda args: _solve_command(args, gated=False),
    "solve-pc": lambda args: _solve_command(args, gated=True),
    "verify": _verify_command,
    "sweep": _sweep_command,
    "regime-map": _map_command,
    "profiles": _profiles_command,
    "tables": _tables_command,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioError, FileNotFoundError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, BracketError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
