"""Command-line interface: verification suites and table generators.

Each command computes one table, writes it as a self-describing JSON or CSV
artifact (schema id, full resolved config, then rows), and returns a process
exit code: 0 ok, 1 bad config, 2 accuracy check failed, 3 size cap exceeded.
Floats are printed with 15 significant digits and summation order is fixed,
so identical configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .chain import AnisotropyParams, BoundarySpec, build_hamiltonian, spin_current
from .drude import (
    current_expansion,
    drude_bound_DK,
    finite_n_mazur,
    fredholm_residual,
    lens_domain,
    mazur_bound_functional,
    monomial_integrals_Ik,
    time_average,
)
from .errors import AccuracyError, ConfigError, SizeCapError
from .lindblad import (
    CASES,
    LindbladSetup,
    defining_relation_residual,
    lindblad_apply,
    steady_state,
)
from .reduced import contraction_certificate, density_norm_sq, kernel_closed_form
from .transfer import build_transfer, load_transfer, save_transfer

SCHEMA_VERSION = 1

COMMANDS = (
    "conserve",
    "quasiloc",
    "kernel",
    "drude",
    "susceptibility",
    "lindblad",
    "current-avg",
)

# residual threshold a command must meet to exit 0, when --tol is not given
_DEFAULT_TOL = {
    "conserve": 1e-10,
    "quasiloc": 0.0,
    "kernel": 0.0,
    "drude": 1e-5,
    "susceptibility": 1e-9,
    "lindblad": 1e-9,
    "current-avg": 0.0,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on error; surface a config error instead
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="xxzql", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--l", type=int, default=1)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--phi-re", type=float, default=None)
        p.add_argument("--phi-im", type=float, default=0.0)
        p.add_argument("--flux", type=float, default=None)
        p.add_argument("--epsilon", type=float, default=1.0)
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--output", type=str, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="csv")
        p.add_argument("--cache", type=str, default=None)
    return parser


def _fmt(x: float) -> str:
    v = float(x)
    if v == 0.0:
        v = 0.0  # strip the sign of negative zero
    return format(v, ".15g")


def _resolved_config(args, params: AnisotropyParams) -> dict:
    phi = args.phi_re if args.phi_re is not None else np.pi / 2
    return {
        "command": args.command,
        "l": params.l,
        "m": params.m,
        "n": args.n,
        "phi_re": float(phi),
        "phi_im": float(args.phi_im),
        "flux": args.flux,
        "epsilon": float(args.epsilon),
        "grid": args.grid,
        "tol": args.tol if args.tol is not None else _DEFAULT_TOL[args.command],
        "schema_version": SCHEMA_VERSION,
    }


def _render_csv(schema: str, config: dict, columns: list, rows: list) -> str:
    lines = [f"# schema={schema}"]
    for key in sorted(config):
        lines.append(f"# config {key}={config[key]}")
    names = []
    for name, kind in columns:
        names.extend([f"{name}_re", f"{name}_im"] if kind == "complex" else [name])
    lines.append(",".join(names))
    for row in rows:
        cells = []
        for name, kind in columns:
            val = row[name]
            if kind == "complex":
                val = complex(val)
                cells.extend([_fmt(val.real), _fmt(val.imag)])
            elif kind == "float":
                cells.append(_fmt(val))
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_json(schema: str, config: dict, columns: list, rows: list) -> str:
    out_rows = []
    for row in rows:
        item = {}
        for name, kind in columns:
            val = row[name]
            if kind == "complex":
                val = complex(val)
                item[name] = {"re": val.real, "im": val.imag}
            elif kind == "float":
                item[name] = float(val)
            else:
                item[name] = val
        out_rows.append(item)
    doc = {"schema": schema, "schema_version": SCHEMA_VERSION, "config": config, "rows": out_rows}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _emit(args, config: dict, columns: list, rows: list) -> None:
    schema = f"xxzql.{args.command}/{SCHEMA_VERSION}"
    render = _render_json if args.format == "json" else _render_csv
    text = render(schema, config, columns, rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _cached_transfer(args, kind, params, phi, n, flux=None):
    if args.cache is None:
        return build_transfer(kind, params, phi, n, flux=flux)
    root = Path(args.cache)
    root.mkdir(parents=True, exist_ok=True)
    key = (f"{kind}_l{params.l}_m{params.m}_n{n}"
           f"_pr{phi.real:.17g}_pi{phi.imag:.17g}_f{'x' if flux is None else format(flux, '.17g')}")
    path = root / f"{key}.bin"
    if path.exists():
        return load_transfer(str(path))
    op = build_transfer(kind, params, phi, n, flux=flux)
    save_transfer(op, str(path))
    return op


def _phi_grid(args, params: AnisotropyParams, count: int) -> np.ndarray:
    if args.phi_re is not None:
        return np.array([complex(args.phi_re, args.phi_im)])
    half = np.pi / (2 * params.m)
    return np.pi / 2 + 0.8 * half * np.linspace(-1.0, 1.0, count) + 0.0j


def _run_conserve(args, params, config, tol):
    n = args.n if args.n is not None else 4
    grid = _phi_grid(args, params, args.grid if args.grid is not None else 9)
    fluxes = [args.flux] if args.flux is not None else [0.7, np.pi / 2]
    columns = [("phi", "complex"), ("variant", "str"), ("flux", "float"), ("residual", "float")]
    rows = []
    worst = 0.0
    h_pbc = build_hamiltonian(params, n, "periodic")
    for phi in grid:
        y = _cached_transfer(args, "Y", params, phi, n).matrix
        res = np.linalg.norm(h_pbc @ y - y @ h_pbc) / np.linalg.norm(y)
        rows.append({"phi": phi, "variant": "Y", "flux": 0.0, "residual": res})
        worst = max(worst, res)
        for flux in fluxes:
            h_tw = build_hamiltonian(params, n, BoundarySpec("twisted", flux))
            yt = _cached_transfer(args, "Y_twisted", params, phi, n, flux=flux).matrix
            res = np.linalg.norm(h_tw @ yt - yt @ h_tw) / np.linalg.norm(yt)
            rows.append({"phi": phi, "variant": "Y_twisted", "flux": flux, "residual": res})
            worst = max(worst, res)
    _emit(args, config, columns, rows)
    return worst <= tol


def _run_quasiloc(args, params, config, tol):
    phi = complex(args.phi_re if args.phi_re is not None else np.pi / 2, args.phi_im)
    r_max = args.grid if args.grid is not None else 10
    cert = contraction_certificate(params, phi)
    columns = [("kind", "str"), ("r", "int"), ("phi", "complex"), ("value", "float")]
    rows = [{"kind": "q_norm_sq", "r": r, "phi": phi, "value": density_norm_sq(params, phi, r)}
            for r in range(2, r_max + 1)]
    rows.append({"kind": "tau1", "r": 0, "phi": phi, "value": cert.tau1})
    rows.append({"kind": "xi", "r": 0, "phi": phi, "value": cert.xi})
    # sweep past the strip edge so the tau1 = 1 boundary shows up in heatmaps
    half = np.pi / (2 * params.m)
    for re in np.pi / 2 + 1.2 * half * np.linspace(-1.0, 1.0, 21):
        for im in np.linspace(-0.6, 0.6, 9):
            p = complex(re, im)
            rows.append({"kind": "tau1_grid", "r": 0, "phi": p,
                         "value": contraction_certificate(params, p).tau1})
    _emit(args, config, columns, rows)
    return True


def _run_kernel(args, params, config, tol):
    count = args.grid if args.grid is not None else 5
    half = np.pi / (2 * params.m)
    line = np.pi / 2 + 0.8 * half * np.linspace(-1.0, 1.0, count)
    columns = [("phi", "complex"), ("phi_prime", "complex"), ("K", "complex")]
    rows = [{"phi": a, "phi_prime": b, "K": kernel_closed_form(params, a, b)}
            for a in line for b in line]
    _emit(args, config, columns, rows)
    return True


def _run_drude(args, params, config, tol):
    dk = drude_bound_DK(params)
    res = fredholm_residual(params)
    func = mazur_bound_functional(params)
    lens = lens_domain(params)
    columns = [("l", "int"), ("m", "int"), ("D_K", "float"),
               ("fredholm_residual", "float"), ("functional", "float"), ("deviation", "float"),
               ("lens_center", "float"), ("lens_radius", "float"), ("lens_area", "float")]
    rows = [{
        "l": params.l, "m": params.m, "D_K": dk,
        "fredholm_residual": res,
        "functional": func.functional,
        "deviation": abs(func.functional - dk / 4.0),
        "lens_center": lens.centers[1],
        "lens_radius": lens.radius,
        "lens_area": lens.area(),
    }]
    _emit(args, config, columns, rows)
    return res <= tol and abs(func.functional - dk / 4.0) <= tol


def _vertical_grid(level: int) -> list:
    offsets = [[0.0], [0.0, 0.6, -0.6], [0.0, 0.6, -0.6, 0.3, -0.3],
               [0.0, 0.6, -0.6, 0.3, -0.3, 0.9, -0.9]][min(level, 3)]
    return [np.pi / 2 + 1j * v for v in offsets]


def _run_susceptibility(args, params, config, tol):
    n_top = args.n if args.n is not None else 8
    level = args.grid if args.grid is not None else 3
    grid = _vertical_grid(level)
    columns = [("n", "int"), ("D_n", "float"), ("mazur_bound", "float"), ("slack", "float")]
    rows = []
    ok = True
    for n in range(4, n_top + 1, 2):
        current = spin_current(n)
        d_n = time_average(build_hamiltonian(params, n, "periodic"), current).susceptibility
        bound = finite_n_mazur(params, n, grid, current).bound
        rows.append({"n": n, "D_n": d_n, "mazur_bound": bound, "slack": d_n - bound})
        ok = ok and bound <= d_n + tol
    _emit(args, config, columns, rows)
    return ok


def _run_lindblad(args, params, config, tol):
    n = args.n if args.n is not None else 3
    setup = LindbladSetup(params, n, args.epsilon)
    columns = [("case", "str"), ("s", "complex"), ("defining_residual", "float"),
               ("fixed_point_residual", "float"), ("rho_min_eig", "float")]
    rows = []
    ok = True
    for case in CASES:
        fac = steady_state(setup, case)
        res_def = defining_relation_residual(setup, case)
        res_fix = float(np.linalg.norm(lindblad_apply(setup, fac.rho)))
        rows.append({
            "case": case, "s": fac.s,
            "defining_residual": res_def,
            "fixed_point_residual": res_fix,
            "rho_min_eig": float(np.linalg.eigvalsh(fac.rho).min()),
        })
        ok = ok and res_def <= tol and res_fix <= tol
    _emit(args, config, columns, rows)
    return ok


def _run_current_avg(args, params, config, tol):
    r_max = args.grid if args.grid is not None else 6
    expansion = current_expansion(params, r_max)
    ik = monomial_integrals_Ik(params, max((r_max - 2) // 2, 0))
    columns = [("kind", "str"), ("index", "int"), ("letters", "str"), ("value", "complex")]
    rows = [{"kind": "Ik", "index": k, "letters": "", "value": ik[k]} for k in range(len(ik))]
    for (r, letters), val in sorted(expansion.coefficients.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        rows.append({"kind": "a", "index": r, "letters": "".join(letters), "value": val})
    _emit(args, config, columns, rows)
    return True


_RUNNERS = {
    "conserve": _run_conserve,
    "quasiloc": _run_quasiloc,
    "kernel": _run_kernel,
    "drude": _run_drude,
    "susceptibility": _run_susceptibility,
    "lindblad": _run_lindblad,
    "current-avg": _run_current_avg,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        params = AnisotropyParams(args.l, args.m)
        config = _resolved_config(args, params)
        tol = args.tol if args.tol is not None else _DEFAULT_TOL[args.command]
        ok = _RUNNERS[args.command](args, params, config, tol)
    except SizeCapError as exc:
        print(f"xxzql: size cap: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"xxzql: invalid config: {exc}", file=sys.stderr)
        return 1
    except AccuracyError as exc:
        print(f"xxzql: accuracy: {exc}", file=sys.stderr)
        return 2
    if not ok:
        print("xxzql: accuracy: residuals exceed tolerance", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
