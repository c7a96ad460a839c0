"""Command-line front end: scenario configs in, CSV/JSON series out.

Every verb accepts an optional ``--config`` file holding the parameter block
for that command; missing keys fall back to built-in defaults that reproduce
the published figure parameters. ``eitbleach run SCENARIO`` executes a full
scenario file (command, params, seed, format, out).

Exit codes: 0 success, 2 invalid input (nothing written), 3 solver failure.
"""

from __future__ import annotations

import copy
import json
import math
import sys
from importlib import resources
from pathlib import Path

import click
import jsonschema
import numpy as np

from . import maxwell_bloch as mb
from .analytic import alpha_signal_intensity, alpha_two_state_intensity
from .core_model import AtomParams, DomainError, DriveParams, scales_from_ratios
from .output import csv_text, json_text, write_all
from .presets import design_report, get_preset
from .propagation import (PropagationConfig, PropagationError, propagate,
                          transmittance_ode, two_state_transmittance)
from .steady_state import NoUniqueSteadyState, normalized_absorption

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3

DEFAULTS = {
    "spectrum": {
        "base": {"gamma_sp": 1.0, "omega_p": 1.0, "omega_s": 1.0, "delta_one": 0.0},
        "series": [{"label": f"gamma/Gamma={r:g}", "gamma_deph": r} for r in (0.0, 0.5, 1.0, 5.0)],
        "delta_min": -4.0, "delta_max": 4.0, "n_points": 801, "levels": "three",
    },
    "bleach_curve": {
        "series": [{"label": "I_coh=50,I_p=0.1", "i_pump": 0.1, "i_coh": 50.0},
                   {"label": "I_coh=I_p=1", "i_pump": 1.0, "i_coh": 1.0}],
        "i_min": 1e-3, "i_max": 1e4, "n_points": 301, "two_state_i_sat": 1.0,
    },
    "propagate": {"length": 20.0, "i0": 10.0, "ip0": 1.0, "i_sat": 1.0, "i_coh": 1.0,
                  "alpha0": 1.0, "arrangement": "uniform_pump", "n_samples": 401, "rtol": 1e-9},
    "transmittance": {
        "t0": 0.01, "i_sat": 1.0, "i_coh": 1.0, "arrangement": "uniform_pump",
        "series": [{"label": f"I_p={r:g}", "i_pump": r} for r in (0.01, 0.1, 1.0, 10.0)],
        "i0_min": 1e-4, "i0_max": 1e3, "n_points": 141,
    },
    "mb_filter": {"case": "a", "store_every": None},
    "design": {"preset": "nv", "t0": 0.01, "arrangement": "uniform_pump", "pump_ratio": None},
}

COPROPAGATING_SERIES = [{"label": f"I_p={r:g}", "i_pump": r, "optical_depth": od}
                        for r, od in ((0.01, 5.0), (0.1, 7.0), (1.0, 12.0), (10.0, 70.0))]

SOLVER_ERRORS = (PropagationError, mb.MBConvergenceError, NoUniqueSteadyState, DomainError,
                 ValueError, ArithmeticError)


class InputError(Exception):
    def __init__(self, message: str, field: str = ""):
        super().__init__(message)
        self.field = field


def load_schema() -> dict:
    return json.loads(resources.files("eitbleach").joinpath("scenario_schema.json").read_text())


def validate_scenario(scenario) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(scenario), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        path = ".".join(str(p) for p in err.absolute_path)
        raise InputError(err.message, path or "<root>")


def _merge(defaults: dict, params: dict) -> dict:
    out = copy.deepcopy(defaults)
    for k, v in params.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = {**out[k], **v}
        else:
            out[k] = v
    return out


def resolve(scenario: dict) -> dict:
    cmd = scenario["command"]
    params = scenario.get("params", {})
    defaults = DEFAULTS[cmd]
    if cmd == "transmittance" and params.get("arrangement") == "copropagating" and "series" not in params:
        defaults = {**defaults, "series": COPROPAGATING_SERIES}
    if cmd == "design" and params.get("dephasing") and params.get("preset", "nv") != "nv":
        raise InputError("the dephasing option applies to the nv preset only", "params.dephasing")
    if cmd == "design" and params.get("arrangement") == "copropagating" and params.get("pump_ratio") is None:
        raise InputError("a copropagating design needs pump_ratio", "params.pump_ratio")
    return {"command": cmd, "params": _merge(defaults, params),
            "seed": scenario.get("seed"), "format": scenario.get("format", "csv")}


# --- command bodies ------------------------------------------------------------

def _spectrum(p, cfg, fmt):
    deltas = np.linspace(p["delta_min"], p["delta_max"], p["n_points"])
    labels, cols = [], []
    for i, s in enumerate(p["series"]):
        r = {**p["base"], **s}
        atom = AtomParams(gamma_sp=r["gamma_sp"], gamma_deph=r.get("gamma_deph", 0.0))
        labels.append(r.get("label", f"series{i}"))
        # each series in units of its own small-signal coefficient
        a0 = 2.0 / (atom.gamma_sp if p["levels"] == "two" else atom.gamma_total)
        cols.append([normalized_absorption(
            atom, DriveParams(omega_s=r.get("omega_s", 0.0), omega_p=r.get("omega_p", 0.0),
                              delta_one=r.get("delta_one", 0.0), delta_two=float(d)),
            p["levels"]) / a0 for d in deltas])
    if fmt == "json":
        return {"spectrum.json": json_text({"delta": deltas, "alpha_over_alpha0": dict(zip(labels, cols))}, cfg)}
    return {"spectrum.csv": csv_text(["delta"] + labels, zip(deltas, *cols), cfg)}


def _bleach_curve(p, cfg, fmt):
    i = np.logspace(math.log10(p["i_min"]), math.log10(p["i_max"]), p["n_points"])
    labels, cols = [], []
    for k, s in enumerate(p["series"]):
        sc = scales_from_ratios(i_sat=s.get("i_sat", 1.0), i_coh=s["i_coh"], i_pump=s["i_pump"])
        labels.append(s.get("label", f"series{k}"))
        cols.append(np.asarray(alpha_signal_intensity(i, sc, 1.0)))
    labels.append("two_state")
    cols.append(np.asarray(alpha_two_state_intensity(i, p["two_state_i_sat"], 1.0)))
    if fmt == "json":
        return {"bleach_curve.json": json_text({"I": i, "alpha_over_alpha0": dict(zip(labels, cols))}, cfg)}
    return {"bleach_curve.csv": csv_text(["I"] + labels, zip(i, *cols), cfg)}


def _propagate(p, cfg, fmt):
    sc = scales_from_ratios(i_sat=p["i_sat"], i_coh=p["i_coh"], i_pump=p["ip0"])
    conf = PropagationConfig(length_l=p["length"], i0=p["i0"], ip0=p["ip0"],
                             arrangement=p["arrangement"], rtol=p["rtol"],
                             n_samples=p["n_samples"])
    prof = propagate(conf, sc, p["alpha0"])
    if fmt == "json":
        return {"propagate.json": json_text({
            "z": prof.z, "I": prof.intensity, "I_p": prof.pump, "alpha_s": prof.alpha_s,
            "alpha_p": prof.alpha_p, "transmittance": prof.transmittance, "t0": prof.t0,
            "pump_transmittance": prof.pump_transmittance}, cfg)}
    return {"propagate.csv": csv_text(["z", "I", "I_p", "alpha_s", "alpha_p"], prof.samples(), cfg)}


def two_state_reference_i_sat(i_sat: float, i_coh: float) -> float:
    """Two-level saturation intensity implied by the three-state scales.

    From ``I_coh/I_sat = 12 gamma/Gamma`` and ``Gamma' = gamma + 2 Gamma``:
    ``I_sat2 / I_sat = 1.5 Gamma / Gamma'``.
    """
    r = i_coh / i_sat
    return i_sat * 1.5 / (2.0 + r / 12.0)


def _transmittance(p, cfg, fmt):
    i0s = np.logspace(math.log10(p["i0_min"]), math.log10(p["i0_max"]), p["n_points"])
    arr = p["arrangement"]
    labels, cols = [], []
    for k, s in enumerate(p["series"]):
        sc = scales_from_ratios(i_sat=p["i_sat"], i_coh=p["i_coh"], i_pump=s["i_pump"])
        t0 = math.exp(-s["optical_depth"]) if "optical_depth" in s else p["t0"]
        labels.append(s.get("label", f"series{k}"))
        cols.append([transmittance_ode(t0, float(i0), sc, arrangement=arr, ip0=s["i_pump"])
                     for i0 in i0s])
    i_sat2 = p.get("two_state_i_sat") or two_state_reference_i_sat(p["i_sat"], p["i_coh"])
    labels.append("two_state")
    cols.append([two_state_transmittance(p["t0"], float(i0), i_sat2) for i0 in i0s])
    if fmt == "json":
        return {"transmittance.json": json_text({"I0": i0s, "T": dict(zip(labels, cols)),
                                                 "two_state_i_sat": i_sat2}, cfg)}
    return {"transmittance.csv": csv_text(["I0"] + labels, zip(i0s, *cols), cfg)}


def mb_inputs(p: dict, seed: int | None):
    setup = mb.filtration_setup_a if p.get("case", "a") == "a" else mb.filtration_setup_c
    spec, grid, atom, drive, medium = setup()
    atom = AtomParams(gamma_sp=p.get("gamma_sp", atom.gamma_sp),
                      gamma_deph=p.get("gamma_deph", atom.gamma_deph))
    drive = drive.replace(omega_p=p.get("omega_p", drive.omega_p))
    medium = mb.MBMedium(xi=p.get("xi", medium.xi), bulk_index=p.get("bulk_index", medium.bulk_index),
                         amplitude_convention=p.get("amplitude_convention", medium.amplitude_convention))
    g = p.get("grid", {})
    grid = mb.MBGrid(n_time=g.get("n_time", grid.n_time), n_space=g.get("n_space", grid.n_space),
                     duration=g.get("duration", grid.duration), length=g.get("length", grid.length))
    s = p.get("signal", {})
    spec = mb.NoisySignalSpec(peak=s.get("peak", spec.peak), center=s.get("center", spec.center),
                              width=s.get("width", spec.width),
                              noise_rms_fraction=s.get("noise_rms_fraction", spec.noise_rms_fraction),
                              seed=spec.seed if seed is None else seed,
                              noise_modes=s.get("noise_modes", spec.noise_modes))
    return spec, grid, atom, drive, medium


def _mb_filter(p, cfg, fmt, seed):
    spec, grid, atom, drive, medium = mb_inputs(p, seed)
    store = p.get("store_every") or max(1, grid.n_space // 10)
    res = mb.run_filtration(spec, grid, atom, drive, medium, store_every=store)
    summary = res.summary()
    if fmt == "json":
        return {"mb_filter.json": json_text({
            "t": res.t, "z": res.z_stored, "omega": res.omega.T, "freq": res.freq,
            "psd_in": res.psd_in, "psd_out": res.psd_out, "summary": summary}, cfg)}
    field_cols = ["t"] + [f"z={float(z)!r}" for z in res.z_stored]
    return {
        "mb_field.csv": csv_text(field_cols, (np.concatenate(([t], row)) for t, row in zip(res.t, res.omega)), cfg),
        "mb_psd.csv": csv_text(["f_hz", "psd_in", "psd_out"], zip(res.freq, res.psd_in, res.psd_out), cfg),
        "mb_summary.json": json_text({"summary": summary}, cfg),
    }


def _design(p, cfg, fmt):
    preset = get_preset(p["preset"], p.get("dephasing"))
    rep = design_report(preset, t0=p["t0"], arrangement=p["arrangement"], pump_ratio=p["pump_ratio"])
    d = rep.as_dict()
    if preset.xi_stated is not None:
        d["xi_stated"] = preset.xi_stated
    if fmt == "json":
        return {"design.json": json_text({"design": d}, cfg)}
    rows = [(k, str(v), "") for k, v in d.items() if k != "provenance"]
    rows += [(f"provenance.{k}", "", v) for k, v in d["provenance"].items()]
    return {"design.csv": csv_text(["field", "value", "provenance"], rows, cfg)}


def render(resolved: dict) -> dict[str, str]:
    """Compute all output files for a resolved scenario (no I/O)."""
    cmd, p, fmt = resolved["command"], resolved["params"], resolved["format"]
    cfg = resolved
    if cmd == "spectrum":
        return _spectrum(p, cfg, fmt)
    if cmd == "bleach_curve":
        return _bleach_curve(p, cfg, fmt)
    if cmd == "propagate":
        return _propagate(p, cfg, fmt)
    if cmd == "transmittance":
        return _transmittance(p, cfg, fmt)
    if cmd == "mb_filter":
        return _mb_filter(p, cfg, fmt, resolved["seed"])
    if cmd == "design":
        return _design(p, cfg, fmt)
    raise InputError(f"unknown command {cmd!r}", "command")


def _error(kind: str, message: str, field: str = "") -> None:
    click.echo(json.dumps({"status": "error", "kind": kind, "field": field, "message": message}),
               err=True)


def execute(scenario, out: str | Path | None = None) -> int:
    """Validate, compute and write one scenario dict. Returns the exit code."""
    try:
        validate_scenario(scenario)
        resolved = resolve(scenario)
    except InputError as exc:
        _error("schema", str(exc), exc.field)
        return EXIT_INPUT
    try:
        files = render(resolved)
    except SOLVER_ERRORS as exc:
        _error("solver", f"{type(exc).__name__}: {exc}")
        return EXIT_SOLVER
    outdir = Path(out if out is not None else scenario.get("out", "."))
    for path in write_all(outdir, files):
        click.echo(str(path))
    return EXIT_OK


def _read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config: {exc}", str(path)) from None


def run_scenario(path, out=None) -> int:
    try:
        scenario = _read_json(path)
    except InputError as exc:
        _error("schema", str(exc), exc.field)
        return EXIT_INPUT
    return execute(scenario, out)


# --- click wiring -------------------------------------------------------------

def _verb_scenario(command, config, seed, fmt, **extra):
    params = {}
    if config is not None:
        params = _read_json(config)
    if isinstance(params, dict):
        params = {**params, **{k: v for k, v in extra.items() if v is not None}}
    scen = {"command": command, "params": params, "format": fmt}
    if seed is not None:
        scen["seed"] = seed
    return scen


def common_options(f):
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")(f)
    f = click.option("--seed", type=int, default=None, help="RNG seed (noise synthesis).")(f)
    f = click.option("--out", type=click.Path(file_okay=False), default=".", help="Output directory.")(f)
    f = click.option("--config", type=click.Path(dir_okay=False), default=None,
                     help="JSON parameter block for this command.")(f)
    return f


def _dispatch(command, config, out, seed, fmt, **extra):
    try:
        scen = _verb_scenario(command, config, seed, fmt, **extra)
    except InputError as exc:
        _error("schema", str(exc), exc.field)
        sys.exit(EXIT_INPUT)
    sys.exit(execute(scen, out))


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Steady-state optics, propagation and noise filtration of bleaching Lambda media."""


@main.command()
@common_options
def spectrum(config, out, seed, fmt):
    """Absorption spectra versus two-photon detuning (alpha/alpha0 per series)."""
    _dispatch("spectrum", config, out, seed, fmt)


@main.command("bleach-curve")
@common_options
def bleach_curve(config, out, seed, fmt):
    """Normalised absorption versus signal intensity."""
    _dispatch("bleach_curve", config, out, seed, fmt)


@main.command("propagate")
@common_options
@click.option("--arrangement", type=click.Choice(["uniform", "copropagating"]), default=None)
def propagate_cmd(config, out, seed, fmt, arrangement):
    """Intensity profile through the medium."""
    arr = {"uniform": "uniform_pump", "copropagating": "copropagating", None: None}[arrangement]
    _dispatch("propagate", config, out, seed, fmt, arrangement=arr)


@main.command()
@common_options
@click.option("--arrangement", type=click.Choice(["uniform", "copropagating"]), default=None)
def transmittance(config, out, seed, fmt, arrangement):
    """Transmittance S-curves versus input intensity."""
    arr = {"uniform": "uniform_pump", "copropagating": "copropagating", None: None}[arrangement]
    _dispatch("transmittance", config, out, seed, fmt, arrangement=arr)


@main.command("mb-filter")
@common_options
def mb_filter(config, out, seed, fmt):
    """Maxwell-Bloch noise-filtration run: field, spectra and summary."""
    _dispatch("mb_filter", config, out, seed, fmt)


@main.command()
@common_options
@click.option("--preset", type=click.Choice(["nv", "rb"]), default=None)
@click.option("--dephasing", type=click.Choice(["angular", "inverse_lifetime"]), default=None,
              help="NV only: convert the dephasing lifetime as 2 pi/tau or 1/tau.")
def design(config, out, seed, fmt, preset, dephasing):
    """Device constants and required medium length for a material preset."""
    _dispatch("design", config, out, seed, fmt, preset=preset, dephasing=dephasing)


@main.command("run")
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None)
def run_cmd(scenario, out):
    """Execute a full scenario file."""
    sys.exit(run_scenario(scenario, out))


if __name__ == "__main__":
    main()
