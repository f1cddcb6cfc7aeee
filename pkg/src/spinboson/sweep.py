"""Parameter sweeps: flat config files, phase labels, critical lines, CSV/JSON output."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytic.dicke import critical_beta, ratio_product, transition_condition, zero_t_condition
from .analytic.intensity import intensity_zero_t_ratio
from .analytic.sigma_z import lnz_shift_sigma_z
from .errors import ConfigError, IoError, SpinBosonError
from .model import PARAM_FIELDS, Family, ModelKind, ModelParams, parse_family, validate_params

OUTPUTS = ("betac", "condition", "ratio", "spectrum", "order_parameter")
SCALES = ("linear", "log")
DERIVED_AXES = ("g1=g2", "g1+g2")
#: |condition - 1| inside this band gets the boundary label
TIE_BAND = 1e-9
BISECT_XTOL = 1e-13

NORMAL = "normal"
SUPERRADIANT = "superradiant"
NO_TRANSITION = "no_transition"
QUANTUM_CRITICAL = "quantum_critical"
CRITICAL = "critical"


@dataclass(frozen=True)
class Axis:
    param: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.steps)
        return np.linspace(self.min, self.max, self.steps)

    def to_dict(self) -> dict:
        return {"param": self.param, "min": self.min, "max": self.max, "steps": self.steps, "scale": self.scale}


@dataclass
class SweepConfig:
    kind: ModelKind
    template: ModelParams
    axes: list
    outputs: tuple
    output_path: str | None = None
    cache_path: str | None = None
    format: str = "csv"
    threads: int = 1
    ed_n_max: int = 40
    ratio_M: int = 2000
    spectrum_grid_n: int = 2000
    split: float = 0.5

    def validate(self) -> "SweepConfig":
        if not self.outputs:
            raise ConfigError("outputs: at least one output is required")
        unknown = [o for o in self.outputs if o not in OUTPUTS]
        if unknown:
            raise ConfigError(f"outputs: unknown {unknown}; expected a subset of {OUTPUTS}")
        if len(self.axes) > 2:
            raise ConfigError("at most two axes")
        names = [a.param for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError(f"swept parameters must be distinct, got {names}")
        couplings = set(names) & {"g1", "g2", "g1=g2", "g1+g2"}
        if couplings & set(DERIVED_AXES) and len(couplings) > 1:
            raise ConfigError(f"axes {names} set the same coupling twice")
        for a in self.axes:
            if a.param not in PARAM_FIELDS and a.param not in DERIVED_AXES:
                raise ConfigError(f"axis parameter {a.param!r} is not a model parameter")
            if a.param == "n_atoms":
                raise ConfigError("n_atoms cannot be swept")
            if int(a.steps) != a.steps or a.steps < 2:
                raise ConfigError(f"axis {a.param}: steps must be an integer >= 2, got {a.steps}")
            if a.scale not in SCALES:
                raise ConfigError(f"axis {a.param}: scale must be linear or log, got {a.scale!r}")
            if not (math.isfinite(a.min) and math.isfinite(a.max)):
                raise ConfigError(f"axis {a.param}: bounds must be finite")
            if a.scale == "log" and not (a.min > 0 and a.max > 0):
                raise ConfigError(f"axis {a.param}: log scale needs a positive range")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError(f"threads must be a positive integer, got {self.threads}")
        if not 0.0 <= self.split <= 1.0:
            raise ConfigError(f"split must lie in [0, 1], got {self.split}")
        validate_params(self.kind, self.template)
        return self

    def echo(self) -> dict:
        return {
            "kind": self.kind.to_dict(),
            "template": self.template.to_dict(),
            "axes": [a.to_dict() for a in self.axes],
            "outputs": list(self.outputs),
            "ed_n_max": self.ed_n_max,
            "ratio_M": self.ratio_M,
            "spectrum_grid_n": self.spectrum_grid_n,
            "split": self.split,
        }


# ---------------------------------------------------------------- config files

def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def _num(key, value, cast=float):
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot parse {value!r}") from exc


def config_from_mapping(raw: dict) -> SweepConfig:
    """Build a SweepConfig from flat string keys (file values with CLI overrides merged in)."""
    raw = dict(raw)
    family = parse_family(raw.pop("model", "generalized_dicke"))
    mode = raw.pop("coupling_mode", None)
    try:
        kind = ModelKind(family, mode) if mode else ModelKind(family)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    params = {key: raw.pop(key) for key in list(raw) if key in PARAM_FIELDS}
    template = ModelParams.from_dict(params)

    axes = []
    for idx in (1, 2):
        prefix = f"axis{idx}."
        keys = [k for k in raw if k.startswith(prefix)]
        if not keys:
            continue
        spec = {k[len(prefix):]: raw.pop(k) for k in keys}
        extra = set(spec) - {"param", "min", "max", "steps", "scale"}
        if extra:
            raise ConfigError(f"axis{idx}: unknown keys {sorted(extra)}")
        missing = {"param", "min", "max", "steps"} - set(spec)
        if missing:
            raise ConfigError(f"axis{idx}: missing {sorted(missing)}")
        axes.append(Axis(spec["param"], _num(f"{prefix}min", spec["min"]), _num(f"{prefix}max", spec["max"]),
                         _num(f"{prefix}steps", spec["steps"], int), spec.get("scale", "linear")))

    outputs_raw = raw.pop("outputs", "betac,condition")
    outputs = tuple(o.strip() for o in outputs_raw.split(",") if o.strip())
    cfg = SweepConfig(
        kind=kind,
        template=template,
        axes=axes,
        outputs=outputs,
        output_path=raw.pop("output", None),
        cache_path=raw.pop("cache", None),
        format=raw.pop("format", "csv"),
        threads=_num("threads", raw.pop("threads", 1), int),
        ed_n_max=_num("ed.n_max", raw.pop("ed.n_max", 40), int),
        ratio_M=_num("ratio.M", raw.pop("ratio.M", 2000), int),
        spectrum_grid_n=_num("spectrum.grid_n", raw.pop("spectrum.grid_n", 2000), int),
        split=_num("split", raw.pop("split", 0.5)),
    )
    if raw:
        raise ConfigError(f"unknown config keys: {sorted(raw)}")
    return cfg.validate()


# ---------------------------------------------------------------- evaluation

def apply_axis(params: ModelParams, name: str, value: float, split: float = 0.5) -> ModelParams:
    if name == "g1=g2":
        return params.replace(g1=value, g2=value)
    if name == "g1+g2":
        return params.replace(g1=split * value, g2=(1.0 - split) * value)
    return params.replace(**{PARAM_FIELDS[name]: value})


def point_condition(kind: ModelKind, params: ModelParams) -> float | None:
    """Transition condition at the point; None for the sigma-z model, which has none."""
    if kind.family is Family.SIGMA_Z:
        return None
    if kind.family is Family.INTENSITY_DEPENDENT:
        return params.g2**2 / (params.omega_big * params.omega0)
    return transition_condition(params)


def _zero_t_condition(kind, params):
    if kind.family is Family.INTENSITY_DEPENDENT:
        return params.g2**2 / (params.omega_big * params.omega0)
    return zero_t_condition(params)


def phase_label(kind: ModelKind, params: ModelParams) -> str:
    """normal / superradiant / no_transition / quantum_critical / critical.

    Within TIE_BAND of condition = 1 the boundary label wins: quantum_critical
    when the zero-temperature condition sits at 1, critical otherwise.
    """
    cond = point_condition(kind, params)
    if cond is None:
        return NO_TRANSITION
    zt = _zero_t_condition(kind, params)
    if abs(zt - 1.0) <= TIE_BAND:
        return QUANTUM_CRITICAL
    if abs(cond - 1.0) <= TIE_BAND:
        return CRITICAL
    if cond > 1.0:
        return SUPERRADIANT
    if zt < 1.0:
        return NO_TRANSITION
    return NORMAL


@dataclass
class PhasePoint:
    values: dict
    params: ModelParams
    phase: str
    outputs: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "values": dict(self.values),
            "params": self.params.to_dict(),
            "phase": self.phase,
            "outputs": dict(self.outputs),
            "diagnostics": dict(self.diagnostics),
        }


def _error_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _eval_output(name, kind, params, cfg, out, diag):
    fam = kind.family
    if name == "condition":
        out["condition"] = point_condition(kind, params)
    elif name == "betac":
        if fam is not Family.GENERALIZED_DICKE:
            raise ConfigError(f"betac is only defined for generalized_dicke, not {fam.value}")
        cp = critical_beta(params)
        out["beta_c"] = cp.beta_c
        out["betac_status"] = cp.status
    elif name == "ratio":
        if fam is Family.SIGMA_Z:
            ln_r = lnz_shift_sigma_z(params)
        elif fam is Family.INTENSITY_DEPENDENT:
            res = intensity_zero_t_ratio(params, M=cfg.ratio_M)
            ln_r = res.ln_value
            diag["intensity_critical"] = res.critical
        else:
            res = ratio_product(params, M=cfg.ratio_M)
            ln_r = res.ln_value
            if res.near_divergence:
                diag["near_divergence"] = True
        out["ln_ratio"] = ln_r
        out["ratio"] = math.exp(ln_r) if ln_r < 709 else math.inf
    elif name == "spectrum":
        from .spectrum import solve_spectrum

        if fam is not Family.GENERALIZED_DICKE:
            raise ConfigError(f"spectrum is only defined for generalized_dicke, not {fam.value}")
        res = solve_spectrum(params, grid_n=cfg.spectrum_grid_n)
        out["spectrum_roots"] = [r.E for r in res.roots]
    elif name == "order_parameter":
        from .exact.hamiltonian import BasisSpec
        from .exact.qpt import ORDER_TOL, ground_state

        basis = BasisSpec(cfg.ed_n_max, params.n_atoms)
        _, op = ground_state(kind, params, basis)
        _, ref = ground_state(kind, params, BasisSpec(cfg.ed_n_max + 10, params.n_atoms))
        out["order_parameter"] = op
        out["ed_converged"] = abs(ref - op) <= ORDER_TOL
        diag["ed_delta"] = abs(ref - op)


_OUTPUT_KEYS = {
    "betac": ("beta_c", "betac_status"),
    "condition": ("condition",),
    "ratio": ("ratio", "ln_ratio"),
    "spectrum": ("spectrum_roots",),
    "order_parameter": ("order_parameter", "ed_converged"),
}


def evaluate_point(cfg: SweepConfig, values: dict) -> PhasePoint:
    params = cfg.template
    for name, v in values.items():
        params = apply_axis(params, name, v, cfg.split)
    try:
        params = validate_params(cfg.kind, params)
    except SpinBosonError as exc:
        point = PhasePoint(values, params, "invalid", {}, {"params": _error_text(exc)})
        for name in cfg.outputs:
            for key in _OUTPUT_KEYS[name]:
                point.outputs[key] = None
        return point
    point = PhasePoint(values, params, phase_label(cfg.kind, params))
    for name in cfg.outputs:
        out, diag = {}, {}
        try:
            _eval_output(name, cfg.kind, params, cfg, out, diag)
        except (SpinBosonError, ArithmeticError, ValueError) as exc:
            diag[name] = _error_text(exc)
        for key in _OUTPUT_KEYS[name]:
            point.outputs[key] = out.get(key)
        point.diagnostics.update(diag)
    return point


# ---------------------------------------------------------------- cache

def _cache_key(cfg: SweepConfig, values: dict) -> str:
    blob = json.dumps({"version": __version__, "config": cfg.echo(), "values": values}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


class PointCache:
    """JSON file of evaluated points keyed by a hash of config and point; floats round-trip exactly."""

    def __init__(self, path: str | None):
        self.path = path
        self.data = {}
        if path and os.path.exists(path):
            try:
                with open(path, encoding="utf-8") as fh:
                    self.data = json.load(fh)
            except OSError as exc:
                raise IoError(f"{path}: {exc.strerror or exc}") from exc
            except json.JSONDecodeError as exc:
                raise IoError(f"{path}: corrupt cache ({exc})") from exc

    def get(self, key):
        return self.data.get(key)

    def put(self, key, point: PhasePoint):
        self.data[key] = {"phase": point.phase, "outputs": point.outputs, "diagnostics": point.diagnostics}

    def save(self):
        if not self.path:
            return
        _atomic_write(self.path, json.dumps(self.data, sort_keys=True))


# ---------------------------------------------------------------- sweep

@dataclass
class SweepResult:
    config: SweepConfig
    points: list
    shape: tuple
    critical_line: list
    cache_hits: int = 0

    def summary(self) -> dict:
        counts = {}
        for p in self.points:
            counts[p.phase] = counts.get(p.phase, 0) + 1
        return {
            "version": __version__,
            "shape": list(self.shape),
            "n_points": len(self.points),
            "phase_counts": dict(sorted(counts.items())),
            "critical_line": self.critical_line,
            "config": self.config.echo(),
        }


def grid_values(cfg: SweepConfig):
    """Row-major list of {axis: value} dicts; axis2 indexes rows, axis1 columns."""
    if not cfg.axes:
        return [{}], (1,)
    if len(cfg.axes) == 1:
        a = cfg.axes[0]
        return [{a.param: float(v)} for v in a.values()], (a.steps,)
    a1, a2 = cfg.axes
    pts = [{a1.param: float(v1), a2.param: float(v2)} for v2 in a2.values() for v1 in a1.values()]
    return pts, (a2.steps, a1.steps)


def _crossing(cfg, row_values, name, lo, hi):
    """Bisection for condition = 1 along axis ``name`` between ``lo`` and ``hi``."""
    def f(x):
        params = apply_axis(cfg.template, name, x, cfg.split)
        for k, v in row_values.items():
            params = apply_axis(params, k, v, cfg.split)
        return point_condition(cfg.kind, validate_params(cfg.kind, params)) - 1.0

    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(hi - lo) <= BISECT_XTOL * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def extract_critical_line(cfg: SweepConfig, points: list) -> list:
    """Vertices where the transition condition crosses 1, bisected within each bracketing cell of axis 1."""
    if not cfg.axes or cfg.kind.family is Family.SIGMA_Z:
        return []
    a1 = cfg.axes[0]
    row_len = a1.steps
    vertices = []
    for r in range(len(points) // row_len):
        row = points[r * row_len:(r + 1) * row_len]
        others = {k: v for k, v in row[0].values.items() if k != a1.param}
        for left, right in zip(row, row[1:]):
            if left.phase == "invalid" or right.phase == "invalid":
                continue
            cl = point_condition(cfg.kind, left.params)
            cr = point_condition(cfg.kind, right.params)
            if (cl - 1.0) * (cr - 1.0) < 0 or (cl == 1.0) != (cr == 1.0):
                if cl == 1.0:
                    x = left.values[a1.param]
                elif cr == 1.0:
                    x = right.values[a1.param]
                else:
                    try:
                        x = _crossing(cfg, others, a1.param, left.values[a1.param], right.values[a1.param])
                    except SpinBosonError:
                        continue
                vertex = {a1.param: x}
                vertex.update(others)
                # a grid point exactly on the line closes one cell and opens the next
                if not (vertices and vertices[-1] == vertex):
                    vertices.append(vertex)
    return vertices


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> SweepResult:
    """Evaluate every grid point; output order is row-major whatever the thread count."""
    cfg.validate()
    threads = threads or cfg.threads
    values, shape = grid_values(cfg)
    cache = PointCache(cfg.cache_path)
    hits = 0
    todo = []
    points = [None] * len(values)
    for i, v in enumerate(values):
        hit = cache.get(_cache_key(cfg, v)) if cfg.cache_path else None
        if hit is not None:
            params = cfg.template
            for name, x in v.items():
                params = apply_axis(params, name, x, cfg.split)
            points[i] = PhasePoint(v, params, hit["phase"], hit["outputs"], hit["diagnostics"])
            hits += 1
        else:
            todo.append(i)

    def work(i):
        return evaluate_point(cfg, values[i])

    if threads == 1:
        fresh = [work(i) for i in todo]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fresh = list(pool.map(work, todo))
    for i, p in zip(todo, fresh):
        points[i] = p
        if cfg.cache_path:
            cache.put(_cache_key(cfg, values[i]), p)
    if cfg.cache_path:
        cache.save()
    return SweepResult(cfg, points, shape, extract_critical_line(cfg, points), hits)


# ---------------------------------------------------------------- output

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt(v) for v in value)
    return str(value)


def csv_columns(cfg: SweepConfig) -> list:
    cols = [a.param for a in cfg.axes]
    cols += [k for k in ("omega", "omega0", "g1", "g2", "g", "n_atoms", "beta") if k not in cols]
    cols.append("phase")
    for name in OUTPUTS:
        if name in cfg.outputs:
            cols.extend(_OUTPUT_KEYS[name])
    cols.append("diagnostics")
    return cols


def render_csv(result: SweepResult) -> str:
    cols = csv_columns(result.config)
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(cols)
    for p in result.points:
        pd = p.params.to_dict()
        row = []
        for c in cols:
            if c in p.values:
                row.append(_fmt(p.values[c]))
            elif c == "phase":
                row.append(p.phase)
            elif c == "diagnostics":
                row.append(json.dumps(p.diagnostics, sort_keys=True) if p.diagnostics else "")
            elif c in pd:
                v = pd[c]
                row.append(_fmt(float(v) if isinstance(v, int) and c != "n_atoms" else v))
            else:
                row.append(_fmt(p.outputs.get(c)))
        writer.writerow(row)
    return buf.getvalue()


def render_json(result: SweepResult) -> str:
    doc = {"points": [p.to_dict() for p in result.points], "summary": result.summary()}
    return json.dumps(doc, indent=1, sort_keys=True)


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def write_outputs(result: SweepResult, path: str, fmt: str = "csv") -> str:
    """Write the grid as CSV or JSON; returns the path."""
    if fmt == "csv":
        text = render_csv(result)
    elif fmt == "json":
        text = render_json(result)
    else:
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    _atomic_write(path, text)
    return path
