"""Config-driven experiment pipelines.

Each runner takes a validated config and an output directory and writes a
fixed set of artifacts; the full pipeline chains grid construction, steady
solve, certification, rearrangement sampling, supporting-functional checks,
simulation and a summary.  Every artifact embeds the config hash, and nothing
here depends on wall-clock time or unseeded randomness, so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import merge_config, resolved, validate_config
from .energy import supporting_gap
from .errors import ConfigError
from .grid import build_grid, lp_norm
from .kernels import backend_name
from .monotone import (
    DecreasingProfile,
    MonotoneProfile,
    extend_decreasing,
    extend_monotone,
    profile_to_json,
)
from .piecewise import PiecewiseFn
from .rearrange import generate_samples, rearrangement_distance, sample_specs
from .simulate import run, stability_experiment, turnover_time
from .snapshots import config_hash, write_field, write_json, write_ndjson
from .spectral import classify_stability
from .steady import lane_emden_solve, linear_steady, solve_semilinear

log = logging.getLogger("eulerstab")

__all__ = ["run_subcommand", "SUBCOMMANDS"]


def _grid_from(cfg):
    g = cfg["grid"]
    return build_grid(kind=g["kind"], n=g["n"], lx=g.get("lx", 1.0),
                      ly=g.get("ly", 1.0), radius=g.get("radius", 0.5))


def _profile_params(cfg, grid):
    p = cfg["profile"]
    if p["kind"] == "affine":
        alpha = p.get("alpha", 0.5)
        if p.get("alpha_scale", "lambda1") == "lambda1":
            alpha = alpha * grid.lambda1
        return {"kind": "affine", "alpha": alpha, "beta": p.get("beta", 1.0)}
    if p["kind"] == "lane_emden":
        return {"kind": "lane_emden", "p": p.get("p", 3.0)}
    if p["kind"] == "piecewise":
        if "pieces" not in p:
            raise ConfigError("piecewise profile needs a pieces list")
        core = PiecewiseFn.from_jsonable({"pieces": p["pieces"]})
        m = float(p["m"]) if "m" in p else None
        M = float(p["M"]) if "M" in p else None
        if p.get("monotone", "nondecreasing") == "nondecreasing":
            prof = extend_monotone(core, m=m, M=M)
        else:
            prof = extend_decreasing(core, m=m, M=M)
        return {"kind": "piecewise", "profile": prof}
    raise ConfigError(f"unknown profile kind {p['kind']!r}")


def _make_steady(cfg, grid):
    params = _profile_params(cfg, grid)
    method = cfg["steady"].get("method", "linear")
    if params["kind"] == "affine":
        alpha, beta = params["alpha"], params["beta"]
        if method == "linear":
            return linear_steady(alpha, beta, grid)
        if method in ("damped-fixed-point", "newton"):
            if alpha >= 0:
                prof = MonotoneProfile.affine(alpha, beta, -1.0, 1.0)
            else:
                prof = DecreasingProfile.affine(alpha, beta, -1.0, 1.0)
            return solve_semilinear(prof, grid, method=method)
        raise ConfigError(f"method {method!r} incompatible with an affine profile")
    if params["kind"] == "lane_emden":
        if method not in ("lane-emden", "linear"):
            raise ConfigError("lane_emden profiles use the lane-emden method")
        return lane_emden_solve(params["p"], grid)
    if method not in ("damped-fixed-point", "newton"):
        raise ConfigError("piecewise profiles need a semilinear method")
    return solve_semilinear(params["profile"], grid, method=method)


def _samples_for(cfg, steady):
    if cfg.get("perturbations"):
        specs = [dict(p, seed=cfg["seed"], index=k)
                 for k, p in enumerate(cfg["perturbations"])]
    else:
        s = cfg["sampling"]
        specs = sample_specs(steady.grid, s["count"], seed=cfg["seed"],
                             t=s["t"], amplitude=s["amplitude"])
    return generate_samples(steady.omega_bar, specs)


def _sim_time(cfg, steady):
    sim = cfg["simulation"]
    T = sim["T"]
    if sim.get("units", "turnovers") == "turnovers":
        tau = turnover_time(steady)
        if not np.isfinite(tau):
            raise ConfigError("turnover units undefined for a motionless flow")
        T = T * tau
    return T


# ---------------------------------------------------------------------------
# runners; each returns the list of artifact names it wrote
# ---------------------------------------------------------------------------


def run_grid(cfg, outdir: Path, chash: str) -> list[str]:
    grid = _grid_from(cfg)
    write_json(outdir / "grid.json", {
        "config_hash": chash,
        "kind": grid.kind,
        "nx": grid.nx,
        "ny": grid.ny,
        "h": grid.h,
        "n_interior": grid.n_interior,
        "area": grid.domain_area,
    })
    return ["grid.json"]


def _write_steady(steady, outdir: Path, chash: str) -> list[str]:
    write_field(steady.omega_bar, outdir / "steady_omega")
    write_field(steady.psi_bar, outdir / "steady_psi")
    meta = steady.metadata()
    meta["config_hash"] = chash
    meta["profile"] = profile_to_json(steady.profile)
    write_json(outdir / "steady_meta.json", meta)
    return ["steady_omega.f64", "steady_omega.json",
            "steady_psi.f64", "steady_psi.json", "steady_meta.json"]


def run_steady(cfg, outdir: Path, chash: str) -> list[str]:
    steady = _make_steady(cfg, _grid_from(cfg))
    return _write_steady(steady, outdir, chash)


def run_certify(cfg, outdir: Path, chash: str) -> list[str]:
    steady = _make_steady(cfg, _grid_from(cfg))
    cert = classify_stability(steady).to_json_dict()
    cert["config_hash"] = chash
    write_json(outdir / "certificate.json", cert)
    log.info("classification: %s", cert["classification"])
    return ["certificate.json"]


def run_perturb(cfg, outdir: Path, chash: str) -> list[str]:
    steady = _make_steady(cfg, _grid_from(cfg))
    samples = _samples_for(cfg, steady)
    artifacts = []
    manifest_rows = []
    for k, (field, spec) in enumerate(samples):
        stem = outdir / f"sample-{k:03d}"
        write_field(field, stem)
        artifacts += [stem.name + ".f64", stem.name + ".json"]
        manifest_rows.append({
            "index": k,
            "spec": spec,
            "class_distance": rearrangement_distance(steady.omega_bar, field),
            "l2_deviation": lp_norm(field - steady.omega_bar, 2.0),
        })
    write_json(outdir / "perturbations.json",
               {"config_hash": chash, "samples": manifest_rows})
    return artifacts + ["perturbations.json"]


def run_energy(cfg, outdir: Path, chash: str) -> list[str]:
    steady = _make_steady(cfg, _grid_from(cfg))
    samples = _samples_for(cfg, steady)
    report = supporting_gap(steady, samples)
    rows = [{"row": "header", "config_hash": chash, "summary": report.summary}]
    rows += [dict(r, row="sample") for r in report.rows]
    write_ndjson(outdir / "energy.ndjson", rows)
    return ["energy.ndjson"]


def run_simulate(cfg, outdir: Path, chash: str) -> list[str]:
    steady = _make_steady(cfg, _grid_from(cfg))
    sim = cfg["simulation"]
    omega0 = steady.omega_bar
    if cfg.get("perturbations"):
        omega0 = _samples_for(cfg, steady)[0][0]
    diag = run(omega0, _sim_time(cfg, steady), cfl=sim["cfl"], reference=steady,
               record_every=sim["record_every"],
               p_norms=tuple(sim["p_norms"]))
    rows = [{"row": "header", "config_hash": chash}]
    rows += [dict(r, row="diag") for r in diag.to_rows()]
    write_ndjson(outdir / "diagnostics.ndjson", rows)
    return ["diagnostics.ndjson"]


def run_experiment(cfg, outdir: Path, chash: str) -> list[str]:
    grid = _grid_from(cfg)
    artifacts = run_grid(cfg, outdir, chash)
    steady = _make_steady(cfg, grid)
    artifacts += _write_steady(steady, outdir, chash)
    cert = classify_stability(steady).to_json_dict()
    cert["config_hash"] = chash
    write_json(outdir / "certificate.json", cert)
    artifacts.append("certificate.json")
    samples = _samples_for(cfg, steady)
    report = supporting_gap(steady, samples)
    rows = [{"row": "header", "config_hash": chash, "summary": report.summary}]
    rows += [dict(r, row="sample") for r in report.rows]
    write_ndjson(outdir / "energy.ndjson", rows)
    artifacts.append("energy.ndjson")
    sim = cfg["simulation"]
    exp = cfg["experiment"]
    result = stability_experiment(
        steady,
        T_turnovers=sim["T"] if sim.get("units", "turnovers") == "turnovers"
        else sim["T"] / turnover_time(steady),
        amplitudes=tuple(exp["amplitudes"]),
        p=exp["p"],
        cfl=sim["cfl"],
        seed=cfg["seed"],
        record_every=sim["record_every"],
        p_norms=tuple(sim["p_norms"]),
    )
    for k, diag in enumerate(result.diagnostics):
        name = f"diagnostics-{k}.ndjson"
        rows = [{"row": "header", "config_hash": chash,
                 "amplitude": result.rows[k]["amplitude"]}]
        rows += [dict(r, row="diag") for r in diag.to_rows()]
        write_ndjson(outdir / name, rows)
        artifacts.append(name)
    summary_path = outdir / "experiment_summary.csv"
    fieldnames = ["index", "amplitude", "epsilon", "sup_deviation", "ratio",
                  "mass_drift", "energy_drift", "l2_drift", "steps",
                  "classification", "config_hash"]
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for k, row in enumerate(result.rows):
            writer.writerow({
                "index": k,
                "amplitude": row["amplitude"],
                "epsilon": row["epsilon"],
                "sup_deviation": row["sup_deviation"],
                "ratio": row["ratio"],
                "mass_drift": row["mass_drift"],
                "energy_drift": row["energy_drift"],
                "l2_drift": row["l2_drift"],
                "steps": row["steps"],
                "classification": cert["classification"],
                "config_hash": chash,
            })
    artifacts.append("experiment_summary.csv")
    write_json(outdir / "manifest.json", {
        "config_hash": chash,
        "package_version": __version__,
        "kernels_backend": backend_name(),
        "artifacts": sorted(artifacts),
    })
    artifacts.append("manifest.json")
    return artifacts


def run_sweep(cfg, outdir: Path, chash: str, jobs: int = 1) -> list[str]:
    sweep = cfg.get("sweep")
    if not sweep:
        raise ConfigError("sweep subcommand needs a 'sweep' section")
    base = sweep.get("base", {})
    entries = sweep["entries"]
    merged = [validate_config(merge_config(base, entry)) for entry in entries]
    resolved_entries = [resolved(e) for e in merged]

    def _run_entry(k):
        entry_dir = outdir / f"entry-{k:03d}"
        entry_dir.mkdir(parents=True, exist_ok=True)
        entry_hash = config_hash(merged[k])
        names = run_experiment(resolved_entries[k], entry_dir, entry_hash)
        return k, entry_dir, entry_hash, names

    results = [None] * len(entries)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for out in pool.map(_run_entry, range(len(entries))):
                results[out[0]] = out
    else:
        for k in range(len(entries)):
            results[k] = _run_entry(k)
    # merge the per-entry summaries deterministically by entry index
    merged_rows = []
    for k, entry_dir, entry_hash, _ in results:
        with open(entry_dir / "experiment_summary.csv", newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                row["entry"] = str(k)
                row["name"] = merged[k].get("name", f"entry-{k:03d}")
                merged_rows.append(row)
    fieldnames = ["entry", "name", "index", "amplitude", "epsilon", "sup_deviation",
                  "ratio", "mass_drift", "energy_drift", "l2_drift", "steps",
                  "classification", "config_hash"]
    with open(outdir / "sweep_summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in merged_rows:
            writer.writerow(row)
    write_json(outdir / "manifest.json", {
        "config_hash": chash,
        "package_version": __version__,
        "kernels_backend": backend_name(),
        "entries": [f"entry-{k:03d}" for k in range(len(entries))],
    })
    return ["sweep_summary.csv", "manifest.json"]


SUBCOMMANDS = {
    "grid": run_grid,
    "steady": run_steady,
    "certify": run_certify,
    "perturb": run_perturb,
    "energy": run_energy,
    "simulate": run_simulate,
    "experiment": run_experiment,
}


def run_subcommand(name: str, cfg: dict, outdir, jobs: int = 1) -> list[str]:
    """Validate, resolve defaults, create the output dir, run one pipeline."""
    validate_config(cfg)
    chash = config_hash(cfg)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if name == "sweep":
        return run_sweep(cfg, outdir, chash, jobs=jobs)
    if name not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    return SUBCOMMANDS[name](resolved(cfg), outdir, chash)
