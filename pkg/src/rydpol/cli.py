"""Command-line front end.

Exit status: 0 on success, 1 when a repro check fails, 2 on configuration
errors, 3 when the requested physics has no solution.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import blockade, eit, optimizer, repro, tomography, units, visibility
from .config import RunConfig, load, reference_config
from .errors import ConfigError, PhysicsError, RydpolError
from .gate import budget as gbudget
from .gate import fidelity
from .gate.states import LAYOUTS, NoiseModel, XiParams, gate_output_density, ideal_output, truth_table

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_PHYSICS = 0, 1, 2, 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _fmt(args, default: str) -> str:
    return args.format or default


def _config(args) -> RunConfig:
    cfg = load(args.config) if args.config else reference_config()
    if args.seed is not None:
        cfg = RunConfig.from_dict({**cfg.data, "seed": args.seed})
    return cfg


def _drive_or_optimum(cfg: RunConfig, medium) -> tuple[eit.Drive, str]:
    if cfg.section("drive"):
        return cfg.drive(), "config"
    return optimizer.analytic_optimum(medium).drive(), "analytic optimum"


def _drive_json(drive: eit.Drive) -> dict:
    return {"omega_c_mhz": units.rad_to_mhz(drive.omega_c),
            "delta_s_mhz": units.rad_to_mhz(drive.delta_s),
            "delta_c_mhz": units.rad_to_mhz(drive.delta_c)}


def cmd_spectrum(args, cfg):
    medium = cfg.medium()
    drive, _ = _drive_or_optimum(cfg, medium)
    grid = np.linspace(args.start, args.stop, args.points)
    sp = eit.spectrum(medium, drive, units.mhz_to_rad(grid))
    header = ["delta_s_mhz", "re_chi", "im_chi", "od", "beta_rad", "transmission"]
    rows = [[f"{x:.10g}", f"{c.real:.10g}", f"{c.imag:.10g}", f"{o:.10g}", f"{b:.10g}", f"{t:.10g}"]
            for x, c, o, b, t in zip(grid, sp["chi"], sp["od"], sp["beta"], sp["transmission"])]
    if _fmt(args, "csv") == "csv":
        return _csv(header, rows)
    return _json([dict(zip(header, map(float, r))) for r in rows])


def cmd_blockade(args, cfg):
    medium = cfg.medium()
    drive, source = _drive_or_optimum(cfg, medium)
    if args.sweep:
        z = np.linspace(0.0, medium.length, args.points)
        rows = [[f"{units.m_to_um(r['z_s']):.10g}", f"{units.m_to_um(r['l_b']):.10g}",
                 f"{r['delta_od']:.10g}", f"{r['delta_beta']:.10g}"]
                for r in blockade.storage_sweep(medium, drive, z)]
        header = ["z_s_um", "l_b_um", "delta_od", "delta_beta_rad"]
        if _fmt(args, "csv") == "csv":
            return _csv(header, rows)
        return _json([dict(zip(header, map(float, r))) for r in rows])
    z_s = None if args.z_s_um is None else units.um_to_m(args.z_s_um)
    res = blockade.conditional_response(medium, drive, z_s=z_s, convention=args.convention)
    out = {
        "drive_source": source,
        "drive": _drive_json(drive),
        "convention": res.convention,
        "r_b_um": units.m_to_um(res.r_b),
        "r_b_im_um": None if res.r_b_im is None else units.m_to_um(res.r_b_im),
        "l_b_um": units.m_to_um(res.l_b),
        "delta_od": res.delta_od,
        "delta_beta_rad": res.delta_beta,
        "od_b": res.od_b,
        "chi_u": [res.chi_u.real, res.chi_u.imag],
        "chi_b": [res.chi_b.real, res.chi_b.imag],
    }
    if _fmt(args, "json") == "csv":
        keys = [k for k, v in out.items() if isinstance(v, (int, float)) or v is None]
        return _csv(keys, [[out[k] for k in keys]])
    return _json(out)


def cmd_optimize(args, cfg):
    medium = cfg.medium()
    if args.sweep == "gamma_rg":
        gammas = np.linspace(args.gmin, args.gmax, args.points)
        rows = []
        for r in optimizer.gamma_rg_sweep(medium, units.per_us_to_per_s(gammas)):
            g = units.per_s_to_per_us(r["gamma_rg"])
            if r["feasible"]:
                rows.append([f"{g:.10g}", f"{r['zeta']:.10g}", f"{units.rad_to_mhz(r['delta_s']):.10g}",
                             f"{units.rad_to_mhz(r['omega_c']):.10g}", f"{r['im_chi_b']:.10g}",
                             f"{r['transmission']:.10g}"])
            else:
                rows.append([f"{g:.10g}", f"{r['zeta']:.10g}", "", "", "", ""])
        header = ["gamma_rg_per_us", "zeta", "delta_s_mhz", "omega_c_mhz", "im_chi_b", "transmission"]
        if _fmt(args, "csv") == "csv":
            return _csv(header, rows)
        return _json([dict(zip(header, (float(x) if x else None for x in r))) for r in rows])
    point = optimizer.brute_force_optimum(medium) if args.brute_force else optimizer.analytic_optimum(medium)
    res = blockade.conditional_response(medium, point.drive(), convention="bulk")
    out = {
        "method": "brute force" if args.brute_force else "analytic",
        "zeta": point.zeta,
        "delta_s_mhz": units.rad_to_mhz(point.delta_s),
        "omega_c_mhz": units.rad_to_mhz(point.omega_c),
        "delta_cu_mhz": units.rad_to_mhz(point.delta_cu),
        "two_photon_detuning_mhz": units.rad_to_mhz(point.two_photon_detuning),
        "im_chi_b": point.im_chi_b,
        "transmission": point.predicted_transmission,
        "feasibility": {
            "od_max": medium.od_max,
            "od_b": res.od_b,
            "r_b_um": units.m_to_um(res.r_b),
            "delta_beta_rad": res.delta_beta,
            "delta_od": res.delta_od,
            "od_b_at_least_2pi": res.od_b >= 2 * math.pi,
        },
    }
    return _json(out)


def cmd_visibility_curve(args, cfg):
    if not (0 < args.lmin <= args.lmax) or args.points < 1:
        raise ConfigError("need 0 < lmin <= lmax and points >= 1")
    points, warnings = visibility.visibility_curve(np.linspace(args.lmin, args.lmax, args.points))
    header = ["l_over_rb", "delta_beta_b_rad", "v_t", "beta_4_rad"]
    rows = [[f"{p.l_over_rb:.10g}", f"{p.delta_beta_b:.10g}", f"{p.v_t:.10g}", f"{p.beta_4:.10g}"]
            for p in points]
    if _fmt(args, "csv") == "csv":
        return _csv(header, rows)
    return _json({"points": [dict(zip(header, map(float, r))) for r in rows], "skipped": warnings})


def _noise(args, cfg) -> NoiseModel:
    n = cfg.section("noise")
    if args.noisy:
        return NoiseModel(v1=n.get("v1", n.get("v_c", 1.0)), v2=n.get("v2", 1.0),
                          v3=n.get("v3", n.get("v_t", 1.0)))
    return NoiseModel(v1=args.v1, v2=args.v2, v3=args.v3)


def cmd_truth_table(args, cfg):
    nm = _noise(args, cfg)
    table = truth_table(nm.to_xi(), args.layout, nm.visibilities)
    rows = table.rows()
    if _fmt(args, "json") == "csv":
        return _csv(["input", "output", "probability"],
                    [[r["input"], r["output"], f"{r['probability']:.10g}"] for r in rows])
    return _json({"layout": args.layout, "visibilities": list(nm.visibilities),
                  "fidelity": table.fidelity, "rows": rows,
                  "desired": {table.inputs[i]: table.outputs[j] for i, j in enumerate(table.desired)}})


def cmd_fidelity_bound(args, cfg):
    n = cfg.section("noise")
    v_c = args.vc if args.vc is not None else n.get("v_c", 1.0)
    v_t = args.vt if args.vt is not None else n.get("v_t", 1.0)
    out = {
        "v_c": v_c, "v_t": v_t,
        "f_e_bound": fidelity.entangling_fidelity_bound(v_c, v_t),
        "entanglement_threshold": 0.5,
    }
    if "eps_r" in n and "eps_l" in n:
        out["f_m"] = fidelity.memory_fidelity(v_c, n["eps_r"], n["eps_l"])
    if args.samples:
        seed = cfg.require_seed(args.seed)
        out["monte_carlo"] = {
            "samples": args.samples, "seed": seed,
            "f_e": fidelity.monte_carlo_entangling_fidelity(v_c, 1.0, v_t, args.samples, seed),
        }
    return _json(out)


def cmd_tomography_sim(args, cfg):
    b = cfg.budget()
    if args.shots is not None:
        b = replace(b, shots=args.shots)
    if args.state == "ideal":
        rho = np.outer(ideal_output(), ideal_output().conj())
    else:
        nm = _noise(argparse.Namespace(noisy=True), cfg)
        rho = gate_output_density(nm.to_xi(), "HH", nm.visibilities)
    if args.mode == "sample":
        records = tomography.simulate_counts(rho, b, seed=cfg.require_seed(args.seed))
    else:
        records = tomography.simulate_counts(rho, b, mode="expected")
    if _fmt(args, "csv") == "csv":
        return tomography.counts_to_csv(records)
    est = tomography.reconstruct_linear(records)
    fid = tomography.fidelity_estimate(est, ideal_output(), seed=cfg.seed or 0)
    out = json.loads(est.to_json())
    out.update({"fidelity": fid.fidelity, "fidelity_stderr": fid.stderr, "entangled": fid.entangled,
                "negative_eigenvalues": est.has_negative_eigenvalues,
                "coincidences": sum(r.total for r in records)})
    return _json(out)


def cmd_hopping_compare(args, cfg):
    h = cfg.section("hopping")
    t_d = args.t_d_us if args.t_d_us is not None else h.get("t_d_us", 1.4)
    tau = args.tau_us if args.tau_us is not None else h.get("tau_us", 4.5)
    rep = gbudget.hopping_comparison(t_d * 1e-6, tau * 1e-6, h.get("eta", 0.049), h.get("t_single", 0.43),
                                     h.get("interaction_factor", 0.82), h.get("c6_over_chi6", 29.0))
    return _json({"t_d_us": t_d, "tau_us": tau, **rep})


def cmd_repro(args, cfg):
    if args.target != "all" and args.target not in repro.TARGETS:
        raise ConfigError(f"unknown repro target {args.target!r}; choose from all, {', '.join(repro.TARGETS)}")
    checks = repro.run(args.target)
    if _fmt(args, "text") == "json":
        text = _json([{"criterion": c.criterion, "name": c.name, "value": c.value,
                       "target": c.target, "passed": c.passed} for c in checks])
    else:
        text = "".join(c.line() + "\n" for c in checks)
        text += f"{sum(c.passed for c in checks)}/{len(checks)} checks passed\n"
    return text, all(c.passed for c in checks)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON run configuration (default: bundled reference set)")
    common.add_argument("--seed", type=int, help="seed for sampling commands")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--echo-config", help="write the resolved configuration as JSON to this path")

    p = _ArgumentParser(prog="rydpol", description="Rydberg-EIT photon-photon gate model")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    s = sub.add_parser("spectrum", parents=[common], help="susceptibility over a signal-detuning grid")
    s.add_argument("--start", type=float, default=-40.0, help="MHz")
    s.add_argument("--stop", type=float, default=40.0, help="MHz")
    s.add_argument("--points", type=int, default=801)
    s.set_defaults(fn=cmd_spectrum)

    s = sub.add_parser("blockade", parents=[common], help="blockade radii and conditional OD/phase")
    s.add_argument("--convention", choices=("position", "bulk"), default="bulk")
    s.add_argument("--z-s-um", type=float, help="storage position (position convention)")
    s.add_argument("--sweep", action="store_true", help="sweep the storage position across the medium")
    s.add_argument("--points", type=int, default=121)
    s.set_defaults(fn=cmd_blockade)

    s = sub.add_parser("optimize", parents=[common], help="operating point with pi phase and zero conditional OD")
    s.add_argument("--brute-force", action="store_true", help="grid search instead of the closed form")
    s.add_argument("--sweep", choices=("gamma_rg",))
    s.add_argument("--gmin", type=float, default=0.1, help="1/us")
    s.add_argument("--gmax", type=float, default=5.0, help="1/us")
    s.add_argument("--points", type=int, default=50)
    s.set_defaults(fn=cmd_optimize)

    s = sub.add_parser("visibility-curve", parents=[common], help="target visibility versus L/r_b")
    s.add_argument("--lmin", type=float, default=0.25)
    s.add_argument("--lmax", type=float, default=10.0)
    s.add_argument("--points", type=int, default=200)
    s.set_defaults(fn=cmd_visibility_curve)

    s = sub.add_parser("truth-table", parents=[common], help="post-selected truth table")
    s.add_argument("--layout", choices=sorted(LAYOUTS), default="hv_control")
    s.add_argument("--v1", type=float, default=1.0)
    s.add_argument("--v2", type=float, default=1.0)
    s.add_argument("--v3", type=float, default=1.0)
    s.add_argument("--noisy", action="store_true", help="use the [noise] visibilities of the config")
    s.set_defaults(fn=cmd_truth_table)

    s = sub.add_parser("fidelity-bound", parents=[common], help="entangling-fidelity bound from visibilities")
    s.add_argument("--vc", type=float)
    s.add_argument("--vt", type=float)
    s.add_argument("--samples", type=int, default=0, help="also average F_beta by Monte Carlo")
    s.set_defaults(fn=cmd_fidelity_bound)

    s = sub.add_parser("tomography-sim", parents=[common], help="simulate counts and reconstruct rho")
    s.add_argument("--state", choices=("ideal", "noisy"), default="noisy")
    s.add_argument("--mode", choices=("sample", "expected"), default="sample")
    s.add_argument("--shots", type=int, help="shots per setting (default: budget.shots)")
    s.set_defaults(fn=cmd_tomography_sim)

    s = sub.add_parser("hopping-compare", parents=[common], help="excitation-hopping efficiency comparison")
    s.add_argument("--t-d-us", type=float)
    s.add_argument("--tau-us", type=float)
    s.set_defaults(fn=cmd_hopping_compare)

    s = sub.add_parser("repro", parents=[common], help="recompute reference numbers")
    s.add_argument("target", nargs="?", default="all")
    s.set_defaults(fn=cmd_repro)
    return p


def run(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        if args.echo_config:
            Path(args.echo_config).write_text(cfg.echo() + "\n", encoding="utf-8", newline="\n")
        result = args.fn(args, cfg)
        if isinstance(result, tuple):
            text, ok = result
            _emit(args, text)
            return EXIT_OK if ok else EXIT_CHECK_FAILED
        _emit(args, result)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except RydpolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
