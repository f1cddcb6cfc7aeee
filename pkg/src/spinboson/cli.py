"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, IoError, NonHermitianOrdering, SpinBosonError
from .model import ModelKind, ModelParams, is_zero_t, parse_family, validate_params

log = logging.getLogger("spinboson")

PARAM_FLAGS = {
    "omega": "omega",
    "omega0": "omega0",
    "g": "g",
    "g1": "g1",
    "g2": "g2",
    "n_atoms": "n_atoms",
    "beta": "beta",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="flat key=value file; flags override it")
    p.add_argument("--out", default=d, help="write the result here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=d)
    p.add_argument("--threads", type=int, default=d)
    p.add_argument("--seed", type=int, default=d, help="reserved; nothing is stochastic")
    p.add_argument("--verbose", action="store_true", default=d)


def _model_flags(p):
    p.add_argument("--model", help="sigma_z | generalized_dicke | intensity_dependent")
    p.add_argument("--coupling-mode", dest="coupling_mode", help="rwa_only | counter_only | general")
    p.add_argument("--omega", help="two-level gap Omega")
    p.add_argument("--omega0", help="boson frequency")
    p.add_argument("--g", help="sigma-z coupling")
    p.add_argument("--g1", help="rotating coupling")
    p.add_argument("--g2", help="counter-rotating coupling")
    p.add_argument("--n-atoms", dest="n_atoms")
    p.add_argument("--beta", help="inverse temperature or zero_t")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinboson", description="Spin-boson thermodynamics and finite-N checks.")
    parser.add_argument("--version", action="version", version=f"spinboson {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    p = add("thermo", "ln Z, E, S from the closed forms")
    _model_flags(p)
    p.add_argument("--policy", choices=("keep", "drop"), default="keep", help="zero-mode policy (sigma_z)")

    p = add("betac", "critical inverse temperature")
    _model_flags(p)

    p = add("ratio", "Z/Z0 from the Matsubara product")
    _model_flags(p)
    p.add_argument("--M", type=int, default=10_000, help="bosonic cutoff")
    p.add_argument("--bound", action="store_true", help="also evaluate the convergence bound")
    p.add_argument("--bound-M", type=int, default=400)

    p = add("spectrum", "roots of the excitation equation")
    _model_flags(p)
    p.add_argument("--e-max", type=float)
    p.add_argument("--grid", "--grid-n", dest="grid_n", type=int, default=2000, help="scan cells")

    p = add("exactdiag", "finite-N exact diagonalization")
    _model_flags(p)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--observables",
                   help="comma list of thermo, ground, spectrum, matrix, large_n (default thermo; "
                        "matrix with --nonhermitian-as-printed)")
    p.add_argument("--levels", type=int, default=20, help="eigenvalues listed by 'spectrum'")
    p.add_argument("--nonhermitian-as-printed", action="store_true",
                   help="intensity model with the non-adjoint ordering; prints the matrix only")

    p = add("sweep-ed", "ground-state order parameter across a coupling grid")
    _model_flags(p)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--coupling", help="g, g1, g2 or g1=g2")
    p.add_argument("--gmin", type=float, required=True)
    p.add_argument("--gmax", type=float, required=True)
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--check", choices=("all", "extremes", "none"), default="extremes")

    p = add("sweep", "phase-diagram sweep driven by a config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--cache", help="cache file for evaluated points")

    p = add("matsubara-check", "fermionic sums against their closed forms")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--M", type=int, default=100_000)
    p.add_argument("--nfreq", type=int, default=5, help="nonzero bosonic frequencies for the cancellation check")
    return parser


# ---------------------------------------------------------------- helpers

def _load_config(args) -> dict:
    if getattr(args, "config", None):
        from .sweep import read_config_file

        return read_config_file(args.config)
    return {}


def _model_from(args, cfg: dict, default_model="generalized_dicke"):
    cfg = dict(cfg)
    model = args.model or cfg.pop("model", default_model)
    cfg.pop("model", None)
    mode = args.coupling_mode or cfg.pop("coupling_mode", None)
    cfg.pop("coupling_mode", None)
    family = parse_family(model)
    try:
        kind = ModelKind(family, mode) if mode else ModelKind(family)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raw = {k: v for k, v in cfg.items() if k in PARAM_FLAGS}
    for key in PARAM_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    params = validate_params(kind, ModelParams.from_dict(raw))
    return kind, params


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if is_zero_t(obj):
        return "zero_t"
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _render(payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"
    rows = payload if isinstance(payload, list) else [payload]
    rows = [{k: (json.dumps(v, default=_json_default) if isinstance(v, (dict, list)) else v)
             for k, v in r.items()} for r in rows]
    cols = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else (repr(r[c]) if isinstance(r.get(c), float) else r[c]) for c in cols])
    return buf.getvalue()


def _emit(args, payload):
    fmt = getattr(args, "format", None) or "json"
    text = _render(payload, fmt)
    out = getattr(args, "out", None)
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"{out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_thermo(args):
    from .analytic import intensity_zero_t_ratio, ratio_product, thermo_sigma_z
    from .model import Family

    kind, params = _model_from(args, _load_config(args), "sigma_z")
    if kind.family is Family.SIGMA_Z:
        rep = thermo_sigma_z(params, args.policy)
        payload = rep.to_dict()
    elif kind.family is Family.GENERALIZED_DICKE:
        res = ratio_product(params)
        payload = {"ln_z_ratio": res.ln_value, "source": "analytic", **res.to_dict()}
    else:
        res = intensity_zero_t_ratio(params)
        payload = {"ln_z_ratio": res.ln_value, "source": "analytic", **res.to_dict()}
    payload["params"] = params.to_dict()
    return payload


def cmd_betac(args):
    from .analytic import critical_beta

    _, params = _model_from(args, _load_config(args))
    return {**critical_beta(params).to_dict(), "params": params.to_dict()}


def cmd_ratio(args):
    from .analytic import intensity_zero_t_ratio, ratio_product, ratio_upper_bound
    from .model import Family

    kind, params = _model_from(args, _load_config(args))
    if kind.family is Family.INTENSITY_DEPENDENT:
        return {**intensity_zero_t_ratio(params, M=args.M).to_dict(), "params": params.to_dict()}
    if kind.family is not Family.GENERALIZED_DICKE:
        raise ConfigError("ratio needs generalized_dicke or intensity_dependent")
    payload = {"product": ratio_product(params, M=args.M).to_dict()}
    if args.bound:
        payload["bound"] = ratio_upper_bound(params, M=args.bound_M).to_dict()
    payload["params"] = params.to_dict()
    return payload


def cmd_spectrum(args):
    from .spectrum import e2_closed_form, solve_spectrum

    cfg = _load_config(args)
    beta = args.beta or cfg.get("beta")
    critical = isinstance(beta, str) and beta.strip().lower() == "critical"
    if critical:
        args.beta = None
        cfg.pop("beta", None)
    _, params = _model_from(args, cfg)
    res = solve_spectrum(params, "critical" if critical else None, e_max=args.e_max, grid_n=args.grid_n)
    rows = [{"E": r.E, "residual": r.residual, "bracket_lo": r.bracket[0], "bracket_hi": r.bracket[1],
             "multiplicity": r.multiplicity} for r in res.roots]
    if getattr(args, "format", None) is None:
        args.format = "csv"
    if args.format == "csv":
        return rows
    payload = {"beta": res.beta, "roots": rows, "poles_excluded": res.poles_excluded,
               "search_window": list(res.search_window)}
    if critical and params.g1 + params.g2 > 0:
        payload["e2_closed_form"] = e2_closed_form(params)
    return payload


def cmd_exactdiag(args):
    from .exact import (AS_PRINTED, BasisSpec, build_hamiltonian, default_spin_rep, diagonalize, exact_thermo,
                        ground_state, sigma_z_analytic_finite_n, sigma_z_large_n_report)
    from .model import Family

    kind, params = _model_from(args, _load_config(args))
    default_obs = "matrix" if args.nonhermitian_as_printed else "thermo"
    wanted = [o.strip() for o in (args.observables or default_obs).split(",") if o.strip()]
    if args.nonhermitian_as_printed:
        if kind.family is not Family.INTENSITY_DEPENDENT:
            raise ConfigError("--nonhermitian-as-printed applies to the intensity_dependent model")
        if wanted != ["matrix"]:
            raise NonHermitianOrdering("the as-printed ordering is not Hermitian; only 'matrix' can be printed")
        h = build_hamiltonian(kind, params, BasisSpec(args.n_max, params.n_atoms), ordering=AS_PRINTED)
        dense = h.dense()
        return {"ordering": AS_PRINTED, "dimension": h.dimension, "hermitian": h.hermitian,
                "max_asymmetry": float(np.max(np.abs(dense - dense.T))), "matrix": dense.tolist()}

    payload = {"params": params.to_dict(), "n_max": args.n_max}
    for obs in wanted:
        if obs == "thermo":
            rep = exact_thermo(kind, params, args.n_max)
            payload["thermo"] = rep.to_dict()
            if kind.family is Family.SIGMA_Z:
                payload["sigma_z_finite_n"] = sigma_z_analytic_finite_n(params).to_dict()
        elif obs == "ground":
            e0, op = ground_state(kind, params, BasisSpec(args.n_max, params.n_atoms))
            payload["ground"] = {"energy": e0, "order_parameter": op}
        elif obs == "spectrum":
            h = build_hamiltonian(kind, params, BasisSpec(args.n_max, params.n_atoms, default_spin_rep(kind)))
            spec = diagonalize(h)
            payload["spectrum"] = {"eigenvalues": spec.eigenvalues[:args.levels].tolist(),
                                   "degeneracies": spec.degeneracies[:args.levels].tolist(),
                                   "max_residual": spec.max_residual}
        elif obs == "matrix":
            h = build_hamiltonian(kind, params, BasisSpec(args.n_max, params.n_atoms))
            payload["matrix"] = h.dense().tolist()
        elif obs == "large_n":
            payload["large_n"] = sigma_z_large_n_report(params)
        else:
            raise ConfigError(f"unknown observable {obs!r}")
    return payload


def cmd_sweep_ed(args):
    from .exact import BasisSpec, order_parameter_sweep

    kind, params = _model_from(args, _load_config(args))
    if args.steps < 3:
        raise ConfigError("--steps must be >= 3")
    grid = np.linspace(args.gmin, args.gmax, args.steps)
    res = order_parameter_sweep(kind, params, grid, BasisSpec(args.n_max, params.n_atoms), args.coupling,
                                check=args.check)
    rows = [{"g": g, "order_parameter": op, "susceptibility": chi, "converged_flag": ok}
            for g, op, chi, ok in res.rows()]
    if getattr(args, "format", None) is None:
        args.format = "csv"
    if args.format == "csv":
        return rows
    return {"coupling": res.coupling, "argmax": res.argmax, "rows": rows, **res.metadata}


def cmd_sweep(args):
    from .sweep import config_from_mapping, render_csv, render_json, run_sweep, write_outputs

    raw = _load_config(args)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    if getattr(args, "out", None):
        raw["output"] = args.out
    if getattr(args, "format", None):
        raw["format"] = args.format
    if getattr(args, "threads", None):
        raw["threads"] = str(args.threads)
    if args.cache:
        raw["cache"] = args.cache
    cfg = config_from_mapping(raw)
    result = run_sweep(cfg)
    if cfg.output_path:
        write_outputs(result, cfg.output_path, cfg.format)
        summary = result.summary()
        log.info("wrote %d points to %s", summary["n_points"], cfg.output_path)
        sys.stderr.write(json.dumps({k: summary[k] for k in ("n_points", "phase_counts", "critical_line")},
                                    default=_json_default) + "\n")
        return None
    sys.stdout.write(render_csv(result) if cfg.format == "csv" else render_json(result) + "\n")
    return None


def cmd_matsubara_check(args):
    from .matsubara import (cancellation_closed_form, cancellation_kernel_sum, lorentzian_closed_form,
                            lorentzian_fermi_sum)

    if getattr(args, "format", None) is None:
        args.format = "csv"
    lor = lorentzian_fermi_sum(args.omega, args.beta, args.M)
    exact = lorentzian_closed_form(args.omega, args.beta)
    rows = [{"check": "lorentzian", "omega": None, "big_omega": args.omega, "beta": args.beta, "sum": lor.value,
             "closed_form": exact, "abs_err": abs(lor.value - exact)}]
    for k in range(0, args.nfreq + 1):
        w = 2 * math.pi * k / args.beta
        s = cancellation_kernel_sum(w, args.omega, args.beta, args.M)
        ref = cancellation_closed_form(w, args.omega, args.beta)
        rows.append({"check": "cancellation", "omega": w, "big_omega": args.omega, "beta": args.beta,
                     "sum": s.value, "closed_form": ref, "abs_err": abs(s.value - ref)})
    return rows


COMMANDS = {
    "thermo": cmd_thermo,
    "betac": cmd_betac,
    "ratio": cmd_ratio,
    "spectrum": cmd_spectrum,
    "exactdiag": cmd_exactdiag,
    "sweep-ed": cmd_sweep_ed,
    "sweep": cmd_sweep,
    "matsubara-check": cmd_matsubara_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        payload = COMMANDS[args.command](args)
        if payload is not None:
            _emit(args, payload)
    except SpinBosonError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
