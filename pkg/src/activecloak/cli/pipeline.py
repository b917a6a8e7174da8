"""Scenario orchestration behind the command-line subcommands."""

import copy
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from activecloak.cli import formats
from activecloak.cli.config import ConfigError
from activecloak.errors import ActiveCloakError
from activecloak.fields import eval_grid, plane_wave, point_source
from activecloak.geometry import (
    circle_curve,
    equilateral_layout,
    inside_curve,
    kite_curve,
    optimal_effective_radius,
)
from activecloak.interior_cloak import build_densities, default_node_count
from activecloak.metrics import cloak_report, device_radius_estimate
from activecloak.multipole_cloak import green_coefficients, illusion_coefficients, truncation_M
from activecloak.scatter import scattering_suppression, solve_scattering
from activecloak.specfun import WaveContext
from activecloak.svd_cloak import build_system, svd_solve

KITE_UNIT_RADIUS = 2.0656709877955001  # max |(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)|


class Scenario:
    """Physical objects derived from a validated config (lengths converted from wavelengths)."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.ctx = WaveContext(cfg["wave"]["k"])
        self.lam = self.ctx.wavelength
        inc = cfg["incident"]
        if inc["type"] == "plane":
            self.u_i = plane_wave(self.ctx, inc["angle"])
        else:
            self.u_i = point_source(self.ctx, self.lam * np.asarray(inc["position"], dtype=float))
        geo = cfg["geometry"]
        self.delta = geo["delta"] * self.lam
        self.sigma = (geo["sigma"] if geo["sigma"] is not None else geo["delta"] / 2) * self.lam

    def nodes(self, base):
        n = self.cfg["geometry"]["nodes"]
        return default_node_count(self.ctx, 2 * np.pi * self.sigma, base) if n == "auto" else int(n)

    def layout(self):
        geo = self.cfg["geometry"]
        return equilateral_layout(self.delta, self.sigma, self.nodes(384), geo["orientation"])[0]

    def interior_curve(self):
        return circle_curve(self.sigma, n=self.nodes(256))

    def order(self, multiplier=None):
        meth = self.cfg["method"]
        mult = meth["M_multiplier"] if multiplier is None else multiplier
        base = truncation_M(self.ctx, self.delta) if meth["M"] == "auto" else int(meth["M"])
        return base * mult

    def solve(self, method, layout, M):
        if method == "green":
            return green_coefficients(self.u_i, layout, self.ctx, M=M)
        if method == "illusion":
            virt = self.cfg["method"]["virtual"]
            pos = self.lam * np.asarray(virt["position"], dtype=float)
            u_virt = point_source(self.ctx, pos, virt["amplitude"])
            return illusion_coefficients(self.u_i, u_virt, layout, self.ctx, M=M)
        knobs = self.cfg["method"]["svd"]
        alpha = optimal_effective_radius(self.delta) if knobs["alpha"] is None else knobs["alpha"] * self.lam
        gamma = 2 * self.delta if knobs["gamma"] is None else knobs["gamma"] * self.lam
        system = build_system(
            self.u_i, layout, self.ctx, alpha, gamma, M,
            knobs["n_alpha"], knobs["n_gamma"], knobs["weight_ratio"],
        )
        return svd_solve(system, knobs["rel_cutoff"])

    def obstacle(self):
        sc = self.cfg["scatterer"]
        if sc["type"] == "none":
            return None
        reach = sc["size"] * optimal_effective_radius(self.delta)
        center = self.lam * np.asarray(sc["center"], dtype=float)
        if sc["type"] == "kite":
            return kite_curve(reach / KITE_UNIT_RADIUS, center, n=256)
        return circle_curve(reach, center, n=256)


class _Sum:
    def __init__(self, *fields):
        self.fields = fields

    def value(self, x):
        return sum(np.asarray(f.value(x)) for f in self.fields)


class _Masked:
    """Field that is NaN inside an obstacle."""

    def __init__(self, field, obstacle):
        self.field, self.obstacle = field, obstacle

    def value(self, x):
        v = np.array(self.field.value(x), dtype=complex)
        v[inside_curve(x, self.obstacle)] = np.nan
        return v


def _window(scn, grid):
    return tuple(scn.lam * float(w) for w in grid["window"])


def _write_grids(scn, out_dir, tag, fields, files):
    outs = scn.cfg["outputs"]
    for g in outs["grids"]:
        for name in g["fields"]:
            if name not in fields:
                continue
            grid = eval_grid(fields[name], _window(scn, g), g["resolution"])
            base = os.path.join(out_dir, f"{g['name']}_{tag}_{name}" if tag else f"{g['name']}_{name}")
            files += formats.write_grid(base + ".txt", grid, {"field": name, "tag": tag, "grid": g["name"]})
            if outs["image"]:
                files += formats.write_ppm(base + ".ppm", grid)


def _write_records(path, records, files):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    files.append(path)


def _report_record(scn, sol, method):
    betas = scn.cfg["outputs"]["betas"]
    rep = cloak_report(scn.u_i, sol, scn.delta, scn.sigma)
    rec = rep.as_dict()
    rec.update(method=method, delta_wavelengths=scn.delta / scn.lam, k=scn.ctx.k)
    rec["device_radius_over_delta"] = {
        str(b): device_radius_estimate(sol, b, scn.delta) for b in betas
    } or None
    rec.pop("beta")
    return rec


def run_interior(scn, out_dir, files):
    D = scn.interior_curve()
    dens = build_densities(scn.u_i, D, scn.ctx)
    fields = {"incident": scn.u_i, "interior": dens, "device": dens, "total": _Sum(scn.u_i, dens)}
    _write_grids(scn, out_dir, "", fields, files)
    if scn.cfg["outputs"]["metrics"]:
        t = 2 * np.pi * np.arange(256) / 256
        ring = np.stack([np.cos(t), np.sin(t)], axis=-1)
        inner = 0.5 * scn.sigma * ring
        outer = 2.0 * scn.sigma * ring
        rec = {
            "nodes": D.n,
            "sigma_wavelengths": scn.sigma / scn.lam,
            "max_total_inside": float(np.max(np.abs(dens.value(inner) + scn.u_i.value(inner)))),
            "max_device_outside": float(np.max(np.abs(dens.value(outer)))),
        }
        _write_records(os.path.join(out_dir, "metrics.jsonl"), [rec], files)


def _methods(scn, forced):
    if forced is not None:
        return [forced]
    meth = scn.cfg["method"]
    return list(dict.fromkeys([meth["name"]] + list(meth["compare"])))


def run_cloak(scn, out_dir, files, forced=None, with_scatterer=False, grids=True, coefficients=True):
    layout = scn.layout()
    M = scn.order()
    obstacle = scn.obstacle() if with_scatterer else None
    if with_scatterer and obstacle is None:
        raise ConfigError("scatterer.type: the scatter command needs scatterer.type 'kite' or 'circle'")
    records = []
    for method in _methods(scn, forced):
        sol = scn.solve(method, layout, M)
        if coefficients and scn.cfg["outputs"]["coefficients"]:
            files += formats.write_coefficients(os.path.join(out_dir, f"coefficients_{method}.txt"), sol)
        fields = {"incident": scn.u_i, "device": sol, "total": _Sum(scn.u_i, sol)}
        rec = _report_record(scn, sol, method) if scn.cfg["outputs"]["metrics"] else {"method": method}
        if obstacle is not None:
            sc = scn.cfg["scatterer"]
            cloaked = solve_scattering(scn.ctx, obstacle, _Sum(scn.u_i, sol), sc["n_src"], sc["src_shrink"])
            fields["scattered"] = cloaked
            fields["total_scatterer"] = _Masked(_Sum(scn.u_i, sol, cloaked), obstacle)
            rec["suppression"] = scattering_suppression(
                obstacle, scn.u_i, sol, 2 * scn.delta, sc["n_src"], src_shrink=sc["src_shrink"]
            )
            rec["mfs_residual"] = cloaked.residual
        if grids:
            _write_grids(scn, out_dir, method, fields, files)
        records.append(rec)
    if scn.cfg["outputs"]["metrics"] or with_scatterer:
        _write_records(os.path.join(out_dir, "metrics.jsonl"), records, files)


COMMANDS = {
    "interior": lambda s, o, f: run_interior(s, o, f),
    "cloak-green": lambda s, o, f: run_cloak(s, o, f, forced="green"),
    "cloak-svd": lambda s, o, f: run_cloak(s, o, f, forced="svd"),
    "illusion": lambda s, o, f: run_cloak(s, o, f, forced="illusion"),
    "scatter": lambda s, o, f: run_cloak(s, o, f, with_scatterer=True),
    "metrics": lambda s, o, f: run_cloak(s, o, f, grids=False, coefficients=False),
}


def run_scenario(cfg, out_dir, command="cloak-green"):
    """Run one subcommand for a validated config; returns the manifest path."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    os.makedirs(out_dir, exist_ok=True)
    files = []
    COMMANDS[command](Scenario(cfg), out_dir, files)
    return formats.write_manifest(out_dir, files)


def sweep_cells(cfg):
    sw = cfg["sweep"]
    return [
        (d, method, mult)
        for d in sw["deltas"]
        for method in sw["methods"]
        for mult in sw["multipliers"]
    ]


def _run_cell(args):
    index, cfg, (d, method, mult) = args
    rec = {"cell": index, "delta_wavelengths": d, "method": method, "multiplier": mult}
    try:
        cell = copy.deepcopy(cfg)
        cell["geometry"]["delta"] = d
        scn = Scenario(cell)
        M = scn.order(mult)
        sol = scn.solve(method, scn.layout(), M)
        rep = _report_record(scn, sol, method)
        rec.update({k: v for k, v in rep.items() if k not in rec})
    except (ActiveCloakError, ArithmeticError, ValueError) as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec


def run_sweep(cfg, out_dir):
    """One record per (delta, method, multiplier) cell, written in cell order.

    Cell failures are recorded in the log and do not stop the sweep.
    """
    os.makedirs(out_dir, exist_ok=True)
    jobs = [(i, cfg, cell) for i, cell in enumerate(sweep_cells(cfg))]
    workers = cfg["sweep"]["workers"]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_cell, jobs))
    else:
        records = [_run_cell(j) for j in jobs]
    records.sort(key=lambda r: r["cell"])
    log = os.path.join(out_dir, "sweep.jsonl")
    files = []
    _write_records(log, records, files)
    formats.write_manifest(out_dir, files)
    return log
