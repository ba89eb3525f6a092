"""Command-line entry point: one config, one experiment, one artifact directory.

Configs are sectioned key=value files (configparser syntax).  Unknown
sections or keys are rejected.  Every run writes a manifest echoing the
fully resolved configuration, including defaults, so an artifact directory
is reproducible from its manifest alone.

Exit codes: 0 success, 2 config error, 3 precondition failure,
4 solver non-convergence, 5 internal assertion.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import chargewin, evolve, functionals, minimize, model, vortex
from .gauge import kgm_functionals
from .grid import RadialGrid, RadialProfile

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_NOCONVERGE = 4
EXIT_INTERNAL = 5

COMMANDS = ("validate", "solve-nlkg", "solve-kgm", "solve-vortex", "window",
            "construct", "evolve", "stability")


class ConfigError(ValueError):
    pass


_SCHEMA: dict[str, dict[str, type]] = {
    "run": {"command": str, "seed": int},
    "nonlinearity": {"family": str, "mass": float, "params": str},
    "grid": {"r_max": float, "n": int, "z_max": float, "n_z": int},
    "solver": {"tol": float, "max_iters": int},
    "validate": {"s_max": float, "n_samples": int},
    "window": {"q": float, "s1_values": str, "r_values": str},
    "solve": {"sigma": float, "q": float, "ell": int, "init_s1": float, "init_r": float,
              "torus_r0": float, "torus_width": float, "torus_amplitude": float},
    "construct": {"charge_target": float, "c3": float},
    "evolve": {"sigma": float, "t_final": float, "dt": float, "record_every": int,
               "free": bool, "radius_factor": float},
    "stability": {"sigma": float, "t_final": float, "dt": float, "delta": float,
                  "record_every": int},
}

_DEFAULTS = {
    ("run", "seed"): 0,
    ("nonlinearity", "family"): "double_well",
    ("nonlinearity", "mass"): 1.0,
    ("nonlinearity", "params"): "1.0",
    ("grid", "r_max"): 24.0,
    ("grid", "n"): 2048,
    ("grid", "z_max"): 12.0,
    ("grid", "n_z"): 256,
    ("solver", "tol"): 1e-6,
    ("solver", "max_iters"): 50_000,
    ("validate", "s_max"): 3.0,
    ("validate", "n_samples"): 1000,
    ("window", "q"): 0.0,
    ("window", "s1_values"): "0.8,0.9,1.0,1.1,1.2",
    ("window", "r_values"): "2,3,4,5,6,7,8,10",
    ("solve", "sigma"): 300.0,
    ("solve", "q"): 1.0,
    ("solve", "ell"): 1,
    ("solve", "init_s1"): 1.0,
    ("solve", "init_r"): 5.0,
    ("solve", "torus_r0"): 4.0,
    ("solve", "torus_width"): 1.5,
    ("solve", "torus_amplitude"): 1.0,
    ("construct", "charge_target"): 10.0,
    ("construct", "c3"): chargewin.SOBOLEV_C3,
    ("evolve", "sigma"): 300.0,
    ("evolve", "t_final"): 50.0,
    ("evolve", "dt"): 0.0,          # 0 means h/2
    ("evolve", "record_every"): 0,  # 0 means automatic
    ("evolve", "free"): False,
    ("evolve", "radius_factor"): 2.0,
    ("stability", "sigma"): 300.0,
    ("stability", "t_final"): 50.0,
    ("stability", "dt"): 0.0,
    ("stability", "delta"): 0.01,
    ("stability", "record_every"): 0,
}


@dataclass
class RunConfig:
    command: str
    out_dir: Path
    values: dict[tuple[str, str], object] = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.values[(section, key)]


def _convert(raw: str, typ: type, where: str):
    try:
        if typ is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {where}: {raw!r}") from exc


def parse_config(path: Path, command: str, out_dir: Path, seed: int | None) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    values: dict[tuple[str, str], object] = dict(_DEFAULTS)
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            if (section, key) == ("run", "command"):
                if raw != command:
                    raise ConfigError(f"config names command {raw!r} but {command!r} was requested")
                continue
            values[(section, key)] = _convert(raw, _SCHEMA[section][key], f"[{section}] {key}")
    if seed is not None:
        values[("run", "seed")] = int(seed)

    cfg = RunConfig(command=command, out_dir=out_dir, values=values)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    if cfg.get("grid", "n") <= 0 or cfg.get("grid", "r_max") <= 0:
        raise ConfigError("grid parameters must be positive")
    if cfg.get("grid", "n_z") <= 0 or cfg.get("grid", "z_max") <= 0:
        raise ConfigError("axisymmetric grid parameters must be positive")
    if cfg.get("solver", "tol") <= 0 or cfg.get("solver", "max_iters") <= 0:
        raise ConfigError("solver parameters must be positive")
    if cfg.get("nonlinearity", "mass") <= 0:
        raise ConfigError("mass must be positive")
    try:
        _nonlinearity(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _nonlinearity(cfg: RunConfig) -> model.NonlinearSpec:
    family = cfg.get("nonlinearity", "family")
    params = [float(tok) for tok in str(cfg.get("nonlinearity", "params")).split(",") if tok.strip()]
    return model.NonlinearSpec(family, float(cfg.get("nonlinearity", "mass")), tuple(params))


def _float_list(raw: str) -> list[float]:
    return [float(tok) for tok in str(raw).split(",") if tok.strip()]


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_summary(out_dir: Path, scalars: dict[str, object]) -> None:
    lines = [f"{k} = {_fmt(v)}" for k, v in scalars.items()]
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")


def write_manifest(cfg: RunConfig) -> None:
    lines = [f"command = {cfg.command}"]
    by_section: dict[str, list[str]] = {}
    for (section, key), val in sorted(cfg.values.items()):
        by_section.setdefault(section, []).append(f"{key} = {_fmt(val)}")
    for section in sorted(by_section):
        lines.append(f"[{section}]")
        lines.extend(by_section[section])
    (cfg.out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def write_profile_csv(out_dir: Path, name: str, columns: dict[str, np.ndarray]) -> None:
    keys = list(columns)
    rows = np.column_stack([np.asarray(columns[k], dtype=float) for k in keys])
    with open(out_dir / name, "w") as fh:
        fh.write(",".join(keys) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def _grid(cfg: RunConfig) -> RadialGrid:
    return RadialGrid(float(cfg.get("grid", "r_max")), int(cfg.get("grid", "n")))


def _solver_opts(cfg: RunConfig) -> minimize.SolveOptions:
    return minimize.SolveOptions(tol=float(cfg.get("solver", "tol")),
                                 max_iters=int(cfg.get("solver", "max_iters")))


def _tent_init(cfg: RunConfig, grid: RadialGrid) -> RadialProfile:
    tent = chargewin.TentProfile(float(cfg.get("solve", "init_s1")), float(cfg.get("solve", "init_r")))
    if grid.r_max < tent.r + 1.0:
        raise ValueError("grid truncates inside the initial tent; enlarge r_max")
    return tent.realize(grid)


def _result_scalars(res: minimize.SolitonResult) -> dict[str, object]:
    return {
        "energy": res.energy,
        "sigma": res.charge,
        "electric_charge": res.electric_charge,
        "omega": res.omega,
        "hylomorphy": res.hylomorphy,
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
        "collapsed": res.collapsed,
        "certified": res.certified,
        "note": res.note or "none",
    }


def _run_validate(cfg: RunConfig) -> dict[str, object]:
    spec = _nonlinearity(cfg)
    report = model.validate_assumptions(spec, float(cfg.get("validate", "s_max")),
                                        int(cfg.get("validate", "n_samples")))
    crit = model.classify_charge_criteria(spec)
    out = {
        "mass_normalization": report.mass_normalization,
        "nonnegative": report.nonnegative,
        "binding": report.binding,
        "binding_witness": report.binding_witness if report.binding_witness is not None else "none",
        "growth": report.growth,
        "all_pass": report.all_pass,
        "small_charge_threshold_vanishes": crit.small_charge_threshold_vanishes,
        "small_s_exponent": crit.small_s_exponent,
        "second_vacuum": crit.second_vacuum,
        "second_vacuum_witness": crit.second_vacuum_witness if crit.second_vacuum_witness is not None else "none",
    }
    return out


def _run_window(cfg: RunConfig) -> dict[str, object]:
    spec = _nonlinearity(cfg)
    est = chargewin.estimate_admissible_window(
        spec, float(cfg.get("window", "q")),
        _float_list(cfg.get("window", "s1_values")),
        _float_list(cfg.get("window", "r_values")))
    if est.empty:
        return {"window_found": False}
    rows = {"s1": np.array([t.s1 for t in est.admissible]),
            "r": np.array([t.r for t in est.admissible])}
    write_profile_csv(cfg.out_dir, "window.csv", rows)
    return {
        "window_found": True,
        "sigma_low": est.sigma_low,
        "sigma_high": est.sigma_high,
        "witness_low_s1": est.witness_low.s1,
        "witness_low_r": est.witness_low.r,
        "witness_high_s1": est.witness_high.s1,
        "witness_high_r": est.witness_high.r,
        "n_admissible": len(est.admissible),
    }


def _run_solve_nlkg(cfg: RunConfig) -> dict[str, object]:
    spec = _nonlinearity(cfg)
    grid = _grid(cfg)
    res = minimize.minimize_nlkg(spec, float(cfg.get("solve", "sigma")), _tent_init(cfg, grid),
                                 _solver_opts(cfg))
    write_profile_csv(cfg.out_dir, "profile.csv", {"r": grid.nodes, "u": res.u.values})
    return _result_scalars(res)


def _run_solve_kgm(cfg: RunConfig) -> dict[str, object]:
    spec = _nonlinearity(cfg)
    grid = _grid(cfg)
    res = minimize.minimize_kgm(spec, float(cfg.get("solve", "sigma")), float(cfg.get("solve", "q")),
                                _tent_init(cfg, grid), _solver_opts(cfg))
    write_profile_csv(cfg.out_dir, "profile.csv", {"r": grid.nodes, "u": res.u.values})
    write_profile_csv(cfg.out_dir, "phi.csv", {"r": grid.nodes, "phi": res.phi.values})
    out = _result_scalars(res)
    out["screened_mass"] = kgm_functionals(res.u, res.charge, res.coupling, spec).screened_mass
    return out


def _run_solve_vortex(cfg: RunConfig) -> dict[str, object]:
    spec = _nonlinearity(cfg)
    grid = vortex.AxisymGrid(float(cfg.get("grid", "r_max")), float(cfg.get("grid", "z_max")),
                             int(cfg.get("grid", "n")), int(cfg.get("grid", "n_z")))
    ell = int(cfg.get("solve", "ell"))
    init = vortex.torus_bump(grid, float(cfg.get("solve", "torus_amplitude")),
                             float(cfg.get("solve", "torus_r0")),
                             float(cfg.get("solve", "torus_width")), ell)
    res = vortex.minimize_vortex(spec, float(cfg.get("solve", "sigma")), ell, init, _solver_opts(cfg))
    rr, zz = np.meshgrid(grid.r, grid.z, indexing="ij")
    write_profile_csv(cfg.out_dir, "profile.csv",
                      {"r": rr.ravel(), "z": zz.ravel(), "u": res.u.values.ravel()})
    out = _result_scalars(res)
    charge, l3 = vortex.vortex_observables(res)
    out["angular_momentum"] = l3
    out["winding"] = res.winding
    return out


def _run_construct(cfg: RunConfig) -> dict[str, object]:
    spec = _nonlinearity(cfg)
    plan = chargewin.construct_for_charge(spec, float(cfg.get("construct", "charge_target")),
                                          c3=float(cfg.get("construct", "c3")))
    report = chargewin.verify_tent_witness(spec, plan.s1, plan.r, plan.h, plan.q, c3=plan.sobolev_c3)
    tent = chargewin.TentProfile(plan.s1, plan.r)
    grid = tent.default_grid(resolution=0.05)
    res = minimize.minimize_kgm(spec, plan.sigma, plan.q, tent.realize(grid), _solver_opts(cfg))
    write_profile_csv(cfg.out_dir, "profile.csv", {"r": grid.nodes, "u": res.u.values})
    write_profile_csv(cfg.out_dir, "phi.csv", {"r": grid.nodes, "phi": res.phi.values})
    out = {
        "plan_s1": plan.s1,
        "plan_binding": plan.binding,
        "plan_alpha": plan.alpha,
        "plan_h": plan.h,
        "plan_r": plan.r,
        "plan_q": plan.q,
        "plan_sigma": plan.sigma,
        "plan_charge": plan.charge,
        "plan_predicted_charge_lb": plan.predicted_charge_lb,
        "hypothesis_amplitude": report.amplitude_ok,
        "hypothesis_coupling": report.coupling_ok,
        "hypothesis_defect": report.defect_ok,
        "hypothesis_slope": report.slope_ok,
        "deficiency_negative": report.deficiency_ok,
        "hypotheses_all_pass": report.all_pass,
    }
    out.update({f"solve_{k}": v for k, v in _result_scalars(res).items()})
    return out


def _soliton_for_evolution(cfg: RunConfig, sigma: float):
    spec = _nonlinearity(cfg)
    grid = _grid(cfg)
    opts = minimize.SolveOptions(tol=min(float(cfg.get("solver", "tol")), 1e-8),
                                 max_iters=int(cfg.get("solver", "max_iters")))
    res = minimize.minimize_nlkg(spec, sigma, _tent_init(cfg, grid), opts)
    if not res.converged:
        raise RuntimeError("soliton preparation did not converge; adjust sigma or the grid")
    return spec, grid, res


def _write_ledger(out_dir: Path, name: str, ledger: evolve.EvolutionLedger) -> None:
    arrays = ledger.arrays()
    write_profile_csv(out_dir, name, {
        "t": arrays["t"], "energy": arrays["energy"], "charge": arrays["charge"],
        "localization": arrays["localization"], "distance": arrays["distance"]})


def _run_evolve(cfg: RunConfig) -> dict[str, object]:
    spec, grid, res = _soliton_for_evolution(cfg, float(cfg.get("evolve", "sigma")))
    dt = float(cfg.get("evolve", "dt")) or grid.h / 2.0
    rec = int(cfg.get("evolve", "record_every")) or None
    radius = float(cfg.get("evolve", "radius_factor")) * evolve.mass_radius(res.u)
    state, ledger = evolve.evolve_nlkg(
        evolve.soliton_state(res.u, res.omega), spec, float(cfg.get("evolve", "t_final")), dt,
        record_every=rec, localization_radius=min(radius, grid.r_max),
        reference=(res.u, res.omega), free_field=bool(cfg.get("evolve", "free")))
    _write_ledger(cfg.out_dir, "ledger.csv", ledger)
    write_profile_csv(cfg.out_dir, "profile.csv", {"r": grid.nodes, "u": np.abs(state.psi)})
    arrays = ledger.arrays()
    e0 = arrays["energy"][0]
    c0 = arrays["charge"][0]
    return {
        "t_final": state.t,
        "energy_drift": float(np.max(np.abs(arrays["energy"] - e0)) / abs(e0)),
        "charge_drift": float(np.max(np.abs(arrays["charge"] - c0)) / abs(c0)),
        "final_localization": float(arrays["localization"][-1]),
        "omega": res.omega,
        "sigma": res.charge,
    }


def _run_stability(cfg: RunConfig) -> dict[str, object]:
    spec, grid, res = _soliton_for_evolution(cfg, float(cfg.get("stability", "sigma")))
    dt = float(cfg.get("stability", "dt")) or grid.h / 2.0
    rec = int(cfg.get("stability", "record_every")) or None
    delta = float(cfg.get("stability", "delta"))
    t_final = float(cfg.get("stability", "t_final"))
    radius = min(2.0 * evolve.mass_radius(res.u), grid.r_max)
    ref = (res.u, res.omega)

    runs: dict[str, evolve.EvolutionLedger] = {}
    base = evolve.soliton_state(res.u, res.omega)
    _, runs["ledger"] = evolve.evolve_nlkg(base, spec, t_final, dt, record_every=rec,
                                           localization_radius=radius, reference=ref)

    mult = evolve.EvolutionState(grid, (1.0 + delta) * base.psi, (1.0 + delta) * base.psi_t)
    _, runs["ledger_scaled"] = evolve.evolve_nlkg(mult, spec, t_final, dt, record_every=rec,
                                                  localization_radius=radius, reference=ref)

    r1 = evolve.mass_radius(res.u, 0.5)
    bump = delta * np.exp(-((grid.nodes - r1) ** 2))
    bump[-1] = 0.0
    add = evolve.EvolutionState(grid, base.psi + bump, base.psi_t.copy())
    _, runs["ledger_bump"] = evolve.evolve_nlkg(add, spec, t_final, dt, record_every=rec,
                                                localization_radius=radius, reference=ref)

    _, runs["ledger_free"] = evolve.evolve_nlkg(base, spec, t_final, dt, record_every=rec,
                                                localization_radius=radius, reference=ref,
                                                free_field=True)

    for name, ledger in runs.items():
        _write_ledger(cfg.out_dir, f"{name}.csv", ledger)

    fwd, _ = evolve.evolve_nlkg(base, spec, t_final, dt, record_every=10**9,
                                localization_radius=radius)
    back, _ = evolve.evolve_nlkg(evolve.time_reversed(fwd), spec, t_final, dt,
                                 record_every=10**9, localization_radius=radius)
    reversal = float(np.max(np.abs(back.psi - base.psi)))

    out: dict[str, object] = {"sigma": res.charge, "omega": res.omega, "delta": delta,
                              "localization_radius": radius, "reversal_error": reversal}
    for name, ledger in runs.items():
        arrays = ledger.arrays()
        e0, c0 = arrays["energy"][0], arrays["charge"][0]
        out[f"{name}_energy_drift"] = float(np.max(np.abs(arrays["energy"] - e0)) / abs(e0))
        out[f"{name}_charge_drift"] = float(np.max(np.abs(arrays["charge"] - c0)) / abs(c0))
        out[f"{name}_final_localization"] = float(arrays["localization"][-1])
        if np.isfinite(arrays["distance"]).all():
            d0 = arrays["distance"][0]
            out[f"{name}_distance_ratio"] = float(np.max(arrays["distance"]) / d0) if d0 > 0 else 0.0
    return out


_RUNNERS = {
    "validate": _run_validate,
    "window": _run_window,
    "solve-nlkg": _run_solve_nlkg,
    "solve-kgm": _run_solve_kgm,
    "solve-vortex": _run_solve_vortex,
    "construct": _run_construct,
    "evolve": _run_evolve,
    "stability": _run_stability,
}


def run(cfg: RunConfig) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    scalars = _RUNNERS[cfg.command](cfg)
    write_summary(cfg.out_dir, scalars)
    write_manifest(cfg)
    if scalars.get("converged") is False or scalars.get("solve_converged") is False:
        return EXIT_NOCONVERGE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="hylomorph",
                                     description="charge-constrained soliton laboratory")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    out_dir = args.out if args.out is not None else Path("runs") / args.command
    try:
        cfg = parse_config(args.config, args.command, out_dir, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (RuntimeError, evolve.BlowUpError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NOCONVERGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
