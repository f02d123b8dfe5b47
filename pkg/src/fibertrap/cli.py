"""Batch front end: ``fibertrap {dispersion,field,potential,trap,sweep}``.

Every run is driven by a strict JSON configuration (keys and defaults in
``SCHEMA``); ``--set key=value`` overrides single entries. Outputs are CSV
files with a ``#`` header block (tool version, config hash, metadata) and,
for ``trap``, a JSON report. Floats are written with 9 significant digits so
identical inputs give byte-identical files.

Exit codes: 0 success, 2 configuration or input error, 3 solver failure.
"""

import argparse
import copy
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .arraymode import (FiberPairGeometry, eval_field, normalize_to_power, solve_beta,
                        solve_mode)
from .atom import CESIUM, alpha_imag, alpha_real, load_species
from .constants import C, HBAR, KB, NM
from .errors import (ConvergenceError, DegenerateModeError, DomainError,
                     FiberTrapError, NotATrapError)
from .numerics import QuadratureSpec
from .potentials import SILICA_DIELECTRIC, VdwModel
from .trap import TrapReport, axial_profile, symmetric_grid, trap_metrics

__all__ = ["RunConfig", "ConfigError", "BelowCutoffError", "main", "load_report",
           "cmd_dispersion", "cmd_field", "cmd_potential", "cmd_trap", "cmd_sweep"]

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
BASELINE_INDEX = 1.4537
REQUIRED = object()


class ConfigError(FiberTrapError, ValueError):
    """Invalid configuration; the message names the offending key."""


class BelowCutoffError(FiberTrapError):
    """No guided odd E_z-sine mode at the requested parameters."""


# --- configuration ----------------------------------------------------------

def _number(lo=None, lo_open=False, integer=False, nullable=False):
    def check(key, v):
        if v is None and nullable:
            return None
        ok = isinstance(v, int) if integer else isinstance(v, (int, float))
        if not ok or isinstance(v, bool) or not math.isfinite(v):
            raise ConfigError(f"'{key}' must be a finite {'integer' if integer else 'number'}")
        if lo is not None and (v <= lo if lo_open else v < lo):
            raise ConfigError(f"'{key}' must be {'>' if lo_open else '>='} {lo}")
        return int(v) if integer else float(v)
    return check


def _choice(*options):
    def check(key, v):
        if v not in options:
            raise ConfigError(f"'{key}' must be one of {list(options)}")
        return v
    return check


def _string(key, v):
    if not isinstance(v, str) or not v:
        raise ConfigError(f"'{key}' must be a non-empty string")
    return v


def _index(key, v):
    if v == "sellmeier":
        return v
    return _number(1.0, lo_open=True)(key, v)


def _formats(key, v):
    if not isinstance(v, list) or not v or any(f not in ("csv", "json") for f in v):
        raise ConfigError(f"'{key}' must be a non-empty list drawn from ['csv', 'json']")
    return sorted(set(v))


def _values(key, v):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"'{key}' must be a non-empty list of numbers")
    return [_number(0.0)(f"{key}[{i}]", e) for i, e in enumerate(v)]


def _odd(lo):
    def check(key, v):
        v = _number(lo, integer=True)(key, v)
        if v % 2 == 0:
            raise ConfigError(f"'{key}' must be odd so that the grid contains 0")
        return v
    return check


_pos = _number(0.0, lo_open=True)
SCHEMA = {
    "geometry": {
        "a_nm": (_pos, REQUIRED),
        "d_nm": (_number(0.0), REQUIRED),
        "lambda_nm": (_pos, REQUIRED),
        "n0": (_number(1.0), 1.0),
        "n_fiber": (_index, BASELINE_INDEX),
    },
    "light": {
        "power_mW": (_number(0.0), REQUIRED),
        "mode": (_choice("odd-Ez-sine"), "odd-Ez-sine"),
    },
    "atom": {"species": (_string, "cesium-builtin")},
    "numerics": {
        "n_max": (_number(3, integer=True, nullable=True), None),
        "quad_rel_tol": (_pos, 1e-9),
        "profile_points": (_odd(5), 2001),
        "clearance_nm": (_pos, 10.0),
        "levels": (_number(2, integer=True), 5),
        "vdw_table_points": (_number(8, integer=True), 400),
        "vdw_gap_min_nm": (_pos, 1.0),
    },
    "output": {
        "directory": (_string, "fibertrap-out"),
        "formats": (_formats, ["csv", "json"]),
    },
    "dispersion": {
        "parameter": (_choice("a", "lambda", "d"), "a"),
        "start": (_pos, 120.0),
        "stop": (_pos, 300.0),
        "steps": (_number(1, integer=True), 19),
    },
    "field": {
        "x_half_nm": (_number(0.0, lo_open=True, nullable=True), None),
        "y_half_nm": (_number(0.0, lo_open=True, nullable=True), None),
        "nx": (_odd(3), 121),
        "ny": (_odd(3), 61),
    },
    "potential": {
        "nx": (_odd(3), 101),
        "ny": (_odd(3), 41),
    },
    "sweep": {
        "parameter": (_choice("P", "a", "lambda", "d"), "P"),
        "values": (_values, [50.0, 100.0, 200.0]),
    },
}
REQUIRED_SECTIONS = ("geometry", "light", "atom")
ALIASES = {"P": "light.power_mW", "a": "geometry.a_nm",
           "lambda": "geometry.lambda_nm", "d": "geometry.d_nm"}


class RunConfig:
    """Validated configuration; ``data`` holds every key with defaults filled in."""

    def __init__(self, data):
        self.data = data

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = sorted(set(raw) - set(SCHEMA))
        if unknown:
            raise ConfigError(f"unknown section(s): {', '.join(repr(k) for k in unknown)}")
        for sec in REQUIRED_SECTIONS:
            if sec not in raw:
                raise ConfigError(f"missing required section '{sec}'")
        data = {}
        for sec, keys in SCHEMA.items():
            given = raw.get(sec, {})
            if not isinstance(given, dict):
                raise ConfigError(f"section '{sec}' must be an object")
            unknown = sorted(set(given) - set(keys))
            if unknown:
                raise ConfigError(f"unknown key(s) {', '.join(f'{sec}.{k}' for k in unknown)}")
            block = {}
            for key, (check, default) in keys.items():
                name = f"{sec}.{key}"
                if key in given:
                    block[key] = check(name, given[key])
                elif default is REQUIRED:
                    raise ConfigError(f"missing required key '{name}'")
                else:
                    block[key] = copy.deepcopy(default)
            data[sec] = block
        return cls(data)

    @classmethod
    def load(cls, path, overrides=()):
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config '{path}': {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config '{path}' is not valid JSON: {exc}") from exc
        return cls.from_dict(apply_overrides(raw, overrides))

    def __getitem__(self, section):
        return self.data[section]

    def replace(self, dotted, value):
        """Validated copy with one entry changed."""
        raw = copy.deepcopy(self.data)
        sec, key = _split_key(dotted)
        raw[sec][key] = value
        return RunConfig.from_dict(raw)

    @property
    def hash(self):
        """SHA-256 of the canonical configuration, output block excluded."""
        body = {k: v for k, v in self.data.items() if k != "output"}
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    # physical inputs
    def geometry(self, sellmeier=False):
        g = self["geometry"]
        n_f = None if sellmeier or g["n_fiber"] == "sellmeier" else g["n_fiber"]
        return FiberPairGeometry.from_nm(g["a_nm"], g["d_nm"], g["lambda_nm"],
                                         n_fiber=n_f, n_clad=g["n0"])

    def species(self):
        name = self["atom"]["species"]
        return CESIUM if name == "cesium-builtin" else load_species(name)

    @property
    def power(self):
        return self["light"]["power_mW"] * 1e-3


def _split_key(dotted):
    dotted = ALIASES.get(dotted, dotted)
    parts = dotted.split(".")
    if len(parts) != 2 or parts[0] not in SCHEMA or parts[1] not in SCHEMA[parts[0]]:
        raise ConfigError(f"unknown configuration key '{dotted}'")
    return parts


def apply_overrides(raw, overrides):
    """Apply ``key=value`` strings; values are parsed as JSON, else kept as text."""
    raw = copy.deepcopy(raw) if isinstance(raw, dict) else raw
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, text = item.split("=", 1)
        sec, sub = _split_key(key.strip())
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        raw.setdefault(sec, {})
        if not isinstance(raw[sec], dict):
            raise ConfigError(f"section '{sec}' must be an object")
        raw[sec][sub] = value
    return raw


# --- output -----------------------------------------------------------------

def fmt(v):
    """9 significant digits, lowercase exponent; integers verbatim; None empty."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".9g")


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(format(v, ".9g")) if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


class Writer:
    """Deterministic writer of CSV and JSON artifacts into one directory."""

    def __init__(self, config, command, directory=None):
        self.config = config
        self.command = command
        self.dir = Path(directory or config["output"]["directory"])
        self.formats = config["output"]["formats"]
        self.written = []

    def _header(self, meta):
        lines = [f"# fibertrap {__version__}", f"# command {self.command}",
                 f"# config_sha256 {self.config.hash}"]
        lines += [f"# {k} {fmt(v) if not isinstance(v, list) else ','.join(fmt(e) for e in v)}"
                  for k, v in meta.items()]
        return lines

    def csv(self, name, columns, rows, meta=None):
        if "csv" not in self.formats:
            return None
        self.dir.mkdir(parents=True, exist_ok=True)
        lines = self._header(meta or {}) + [",".join(columns)]
        lines += [",".join(fmt(v) for v in row) for row in rows]
        path = self.dir / name
        path.write_text("\n".join(lines) + "\n")
        self.written.append(path)
        return path

    def json(self, name, payload):
        if "json" not in self.formats:
            return None
        self.dir.mkdir(parents=True, exist_ok=True)
        doc = {"provenance": self.provenance(), **payload}
        path = self.dir / name
        path.write_text(json.dumps(_round(doc), indent=2) + "\n")
        self.written.append(path)
        return path

    def provenance(self):
        return {"tool": "fibertrap", "version": __version__, "command": self.command,
                "config_sha256": self.config.hash,
                "config": {k: v for k, v in self.config.data.items() if k != "output"}}


def load_report(path):
    """Read a trap report JSON and re-validate it; returns (status, TrapReport or None)."""
    doc = json.loads(Path(path).read_text())
    for key in ("provenance", "status", "report"):
        if key not in doc:
            raise DomainError(f"trap report file lacks '{key}'")
    if doc["status"] not in ("trapped", "not-a-trap"):
        raise DomainError(f"unknown report status {doc['status']!r}")
    rep = doc["report"]
    if doc["status"] == "trapped":
        if rep is None:
            raise DomainError("trapped status without a report")
        return doc["status"], TrapReport.from_dict(rep)
    return doc["status"], None


# --- shared pipeline pieces -------------------------------------------------

_VDW_CACHE = {}


def _quad(config):
    return QuadratureSpec(rel_tol=config["numerics"]["quad_rel_tol"])


def guided_mode(config, geometry, power):
    """Solve and normalize the mode to ``power`` watts; P = 0 gives a zero field."""
    n_max = config["numerics"]["n_max"]
    sol = solve_mode(geometry, n_max=n_max)
    if not sol.guided:
        raise BelowCutoffError(f"no guided mode at a = {geometry.radius / NM:.6g} nm, "
                               f"d = {geometry.separation / NM:.6g} nm, "
                               f"lambda = {geometry.wavelength / NM:.6g} nm")
    sol = normalize_to_power(sol, 1.0, _quad(config))
    return sol.scaled(math.sqrt(power))


def vdw_model(config, species, radius, workers=1):
    """Tabulated single-fiber vdW model, cached per (species, radius, table)."""
    num = config["numerics"]
    key = (species, radius, num["vdw_table_points"], num["vdw_gap_min_nm"],
           num["quad_rel_tol"])
    if key not in _VDW_CACHE:
        model = VdwModel(species, SILICA_DIELECTRIC, radius,
                         spec=QuadratureSpec(rel_tol=num["quad_rel_tol"]))
        model.build_table(gap_min=num["vdw_gap_min_nm"] * NM,
                          points=num["vdw_table_points"], workers=workers)
        _VDW_CACHE[key] = model
    return _VDW_CACHE[key]


def _map(func, args, workers):
    """Order-preserving map, in a process pool when ``workers > 1``."""
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(min(workers, len(args))) as pool:
            return list(pool.map(func, args))
    return [func(a) for a in args]


def _geometry_meta(g):
    return {"a_nm": g.radius / NM, "d_nm": g.separation / NM,
            "lambda_nm": g.wavelength / NM, "n_fiber": g.n_fiber, "n0": g.n_clad}


def _vdw_rows(model):
    gaps, vals = model.table
    return [(model.radius / NM + gp / NM, v / KB * 1e3) for gp, v in zip(gaps, vals)]


# --- dispersion -------------------------------------------------------------

_PARAM_KEY = {"a": "a_nm", "lambda": "lambda_nm", "d": "d_nm"}


def _dispersion_point(args):
    config, param, value = args
    cfg = config.replace(f"geometry.{_PARAM_KEY[param]}", value)
    try:
        g = cfg.geometry(sellmeier=param == "lambda")
        sol = solve_beta(g, n_max=cfg["numerics"]["n_max"])
    except FiberTrapError as exc:
        return value, float("nan"), f"failed:{type(exc).__name__}"
    return value, sol.beta_over_k, sol.status


def cmd_dispersion(config, writer, workers=1):
    """beta/k of the array mode along a sweep of a, lambda or d."""
    d = config["dispersion"]
    values = np.linspace(d["start"], d["stop"], d["steps"]).tolist()
    rows = _map(_dispersion_point, [(config, d["parameter"], v) for v in values], workers)
    unit = "nm"
    writer.csv("dispersion.csv", ["param", "beta_over_k", "status"], rows,
               {"parameter": f"{d['parameter']}_{unit}",
                "index_source": "sellmeier" if d["parameter"] == "lambda"
                else config["geometry"]["n_fiber"]})
    return rows


# --- field and potential maps ---------------------------------------------------

FIELD_COLUMNS = ["x_nm", "y_nm"] + [f"{c}_{p}" for c in ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz")
                                    for p in ("re", "im")] + ["intensity"]


def field_grid(config, geometry):
    f = config["field"]
    a, d = geometry.radius, geometry.separation
    xh = f["x_half_nm"] * NM if f["x_half_nm"] else 2 * a + d / 2 + 100 * NM
    yh = f["y_half_nm"] * NM if f["y_half_nm"] else a + 100 * NM
    return symmetric_grid(xh, f["nx"]), symmetric_grid(yh, f["ny"])


def cmd_field(config, writer, workers=1):
    """|E|^2 and all field components on a grid, plus the two axial cuts."""
    g = config.geometry()
    mode = guided_mode(config, g, config.power)
    xs, ys = field_grid(config, g)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    fv = eval_field(mode, X, Y)
    comps = [fv.Ex, fv.Ey, fv.Ez, fv.Hx, fv.Hy, fv.Hz]
    I = fv.intensity
    rows = []
    for i in range(len(xs)):
        for j in range(len(ys)):
            vals = [xs[i] / NM, ys[j] / NM]
            for c in comps:
                vals += [c[i, j].real, c[i, j].imag]
            rows.append(vals + [I[i, j]])
    xc, a = g.center_x, g.radius
    meta = {**_geometry_meta(g), "power_W": config.power, "beta_over_k": mode.beta_over_k,
            "n_max": mode.n_max,
            "fiber_surfaces_x_nm": [(-xc - a) / NM, (-xc + a) / NM, (xc - a) / NM, (xc + a) / NM],
            "fiber_surfaces_y_nm": [-a / NM, a / NM]}
    writer.csv("field_map.csv", FIELD_COLUMNS, rows, meta)
    cy, cx = len(ys) // 2, len(xs) // 2
    writer.csv("field_cut_x.csv", ["x_nm", "intensity"],
               [(xs[i] / NM, I[i, cy]) for i in range(len(xs))], meta)
    writer.csv("field_cut_y.csv", ["y_nm", "intensity"],
               [(ys[j] / NM, I[cx, j]) for j in range(len(ys))], meta)
    return mode, xs, ys, I


POTENTIAL_COLUMNS = ["x_nm", "y_nm", "U_opt_mK", "U_vdW_mK", "U_mK", "Gamma_sc_per_s"]


def cmd_potential(config, writer, workers=1):
    """U_opt, U_vdW, U and Gamma_sc over |x| <= a + d/2, |y| <= a.

    Cells inside a fiber, or closer to a surface than the vdW table's
    smallest gap, are written with empty values.
    """
    g = config.geometry()
    species = config.species()
    mode = guided_mode(config, g, config.power)
    model = vdw_model(config, species, g.radius, workers)
    p = config["potential"]
    xs = symmetric_grid(g.radius + g.separation / 2, p["nx"])
    ys = symmetric_grid(g.radius, p["ny"])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    r1, r2 = np.hypot(X + g.center_x, Y), np.hypot(X - g.center_x, Y)
    valid = np.minimum(r1, r2) - g.radius >= config["numerics"]["vdw_gap_min_nm"] * NM
    omega = 2 * np.pi * C / g.wavelength
    I = eval_field(mode, X[valid], Y[valid]).intensity
    u_opt = -0.25 * alpha_real(species, omega) * I
    u_vdw = model(r1[valid]) + model(r2[valid])
    gam = alpha_imag(species, omega) * I / (4 * HBAR)
    cells = np.full(X.shape + (4,), np.nan)
    cells[valid] = np.stack([u_opt / KB * 1e3, u_vdw / KB * 1e3,
                             (u_opt + u_vdw) / KB * 1e3, gam], axis=-1)
    rows = []
    for i in range(len(xs)):
        for j in range(len(ys)):
            vals = cells[i, j].tolist() if valid[i, j] else [None] * 4
            rows.append([xs[i] / NM, ys[j] / NM] + vals)
    meta = {**_geometry_meta(g), "power_W": config.power, "beta_over_k": mode.beta_over_k}
    writer.csv("potential_map.csv", POTENTIAL_COLUMNS, rows, meta)
    writer.csv("vdw_table.csv", ["r_nm", "V_mK"], _vdw_rows(model), meta)
    return xs, ys, cells, valid


# --- trap -----------------------------------------------------------------------

def _trap_run(config, mode, species, model):
    num = config["numerics"]
    return trap_metrics(mode, species, model, points=num["profile_points"],
                        clearance=num["clearance_nm"] * NM, levels=num["levels"])


def _provenance_block(config, mode):
    num = config["numerics"]
    return {"geometry": _geometry_meta(mode.geometry), "power_W": config.power,
            "wavelength_nm": mode.geometry.wavelength / NM, "beta_over_k": mode.beta_over_k,
            "n_max": mode.n_max, "boundary_residual": mode.diagnostics.get("boundary_residual"),
            "tolerances": {"quad_rel_tol": num["quad_rel_tol"],
                           "profile_points": num["profile_points"],
                           "clearance_nm": num["clearance_nm"],
                           "vdw_table_points": num["vdw_table_points"],
                           "vdw_gap_min_nm": num["vdw_gap_min_nm"]}}


def cmd_trap(config, writer, workers=1):
    """Trap report JSON plus bound-state CSVs for both axes."""
    g = config.geometry()
    species = config.species()
    mode = guided_mode(config, g, config.power)
    model = vdw_model(config, species, g.radius, workers)
    meta = {**_geometry_meta(g), "power_W": config.power, "beta_over_k": mode.beta_over_k}
    writer.csv("vdw_table.csv", ["r_nm", "V_mK"], _vdw_rows(model), meta)
    try:
        report, profiles, states = _trap_run(config, mode, species, model)
    except NotATrapError as exc:
        writer.json("trap_report.json", {"status": "not-a-trap", "reason": str(exc),
                                         "run": _provenance_block(config, mode),
                                         "summary": None, "report": None})
        return "not-a-trap", None
    for ax in ("x", "y"):
        prof, st = profiles[ax], states[ax]
        k = st.wavefunctions.shape[1]
        psi = st.wavefunctions * np.sqrt(NM)
        rows = [[prof.grid[i] / NM] + psi[i].tolist() + [prof.U[i] / KB * 1e3]
                for i in range(len(prof.grid))]
        writer.csv(f"bound_states_{ax}.csv",
                   ["position_nm"] + [f"psi{v}" for v in range(k)] + ["U_mK"], rows,
                   {**meta, "axis": ax, "all_bound": st.all_bound,
                    "energies_uK": [e / KB * 1e6 for e in st.energies]})
    writer.json("trap_report.json", {"status": "trapped", "run": _provenance_block(config, mode),
                                     "summary": report.summary(), "report": report.to_dict()})
    return "trapped", report


# --- sweeps ---------------------------------------------------------------------

SUMMARY_COLUMNS = ["value", "status", "beta_over_k", "U_D_mK", "depth_x_mK", "depth_y_mK",
                   "omega_x_over_2pi_kHz", "omega_y_over_2pi_kHz", "spacing_x_uK",
                   "spacing_y_uK", "gamma_per_s", "tau_coh_s", "tau_trap_h"]
PROFILE_COLUMNS = ["position_nm", "U_mK", "U_opt_mK", "U_vdW_mK", "intensity"]


def _sweep_point(args):
    config, mode, species, model = args
    try:
        report, profiles, _ = _trap_run(config, mode, species, model)
        status = "trapped"
    except NotATrapError:
        num = config["numerics"]
        profiles = {ax: axial_profile(mode, species, model, ax, points=num["profile_points"],
                                      clearance=num["clearance_nm"] * NM) for ax in ("x", "y")}
        report, status = None, "not-a-trap"
    except FiberTrapError as exc:
        return f"failed:{type(exc).__name__}", None, None
    return status, report, profiles


def cmd_sweep(config, writer, workers=1):
    """Trap pipeline per value of P (mW), a, lambda or d (nm)."""
    sw = config["sweep"]
    param = sw["parameter"]
    species = config.species()
    key = "light.power_mW" if param == "P" else f"geometry.{_PARAM_KEY[param]}"
    configs, modes, errors = [], [], []
    base_mode = None
    for v in sw["values"]:
        try:
            cfg = config.replace(key, v)
            g = cfg.geometry(sellmeier=param == "lambda")
            if param == "P":
                # one unit-power mode, scaled, keeps U_opt exactly linear in P
                if base_mode is None:
                    base_mode = guided_mode(cfg, g, 1.0)
                mode = base_mode.scaled(math.sqrt(cfg.power))
            else:
                mode = guided_mode(cfg, g, cfg.power)
            configs.append(cfg)
            modes.append(mode)
            errors.append(None)
        except (FiberTrapError, ConfigError) as exc:
            configs.append(None)
            modes.append(None)
            errors.append(f"failed:{type(exc).__name__}")
    tasks, slots = [], []
    for i, (cfg, mode) in enumerate(zip(configs, modes)):
        if mode is not None:
            model = vdw_model(cfg, species, mode.geometry.radius, workers)
            tasks.append((cfg, mode, species, model))
            slots.append(i)
    results = dict(zip(slots, _map(_sweep_point, tasks, workers)))
    rows = []
    for i, v in enumerate(sw["values"]):
        status, report, profiles = results.get(i, (errors[i], None, None))
        mode = modes[i]
        row = [v, status, mode.beta_over_k if mode is not None else None]
        if report is not None:
            s = report.summary()
            row += [s["U_D_mK"], s["depth_x_mK"], s["depth_y_mK"], s["omega_x_over_2pi_kHz"],
                    s["omega_y_over_2pi_kHz"], s["spacing_x_uK"], s["spacing_y_uK"],
                    s["gamma_per_s"], s["tau_coh_s"], s["tau_trap_h"]]
        else:
            row += [None] * 10
        rows.append(row)
        if profiles is not None:
            meta = {**_geometry_meta(mode.geometry), "power_W": configs[i].power,
                    "parameter": param, "value": v}
            for ax, prof in profiles.items():
                writer.csv(f"profile_{param}_{fmt(v)}_{ax}.csv", PROFILE_COLUMNS,
                           [(prof.grid[j] / NM, prof.U[j] / KB * 1e3, prof.U_opt[j] / KB * 1e3,
                             prof.U_vdW[j] / KB * 1e3, prof.intensity[j])
                            for j in range(len(prof.grid))], meta)
    writer.csv("sweep_summary.csv", SUMMARY_COLUMNS, rows,
               {"parameter": param, "unit": "mW" if param == "P" else "nm"})
    return rows


# --- entry point ------------------------------------------------------------------

COMMANDS = {"dispersion": cmd_dispersion, "field": cmd_field, "potential": cmd_potential,
            "trap": cmd_trap, "sweep": cmd_sweep}


def build_parser():
    p = argparse.ArgumentParser(
        prog="fibertrap",
        description="Two-nanofiber array-mode atom trap: dispersion, fields, potentials, "
                    "trap metrics and parameter sweeps.")
    p.add_argument("--version", action="version", version=f"fibertrap {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        s = sub.add_parser(name, help=func.__doc__.splitlines()[0])
        s.add_argument("--config", required=True, help="JSON run configuration")
        s.add_argument("--out", help="output directory (overrides output.directory)")
        s.add_argument("--workers", type=int, default=1, help="parallel processes (default 1)")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, e.g. geometry.a_nm=250 or P=50")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        config = RunConfig.load(args.config, args.set)
        writer = Writer(config, args.command, args.out)
        result = COMMANDS[args.command](config, writer, args.workers)
    except (ConfigError, DomainError) as exc:
        print(f"fibertrap: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, DegenerateModeError, BelowCutoffError) as exc:
        print(f"fibertrap: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.command == "trap" and result[0] == "not-a-trap":
        print("fibertrap: not a trap (no confining barrier)", file=sys.stderr)
    for path in writer.written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
