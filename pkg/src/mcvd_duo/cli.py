"""Command-line front end: ``mcvd-duo <command> --scenario FILE ...``.

Exit codes: 0 success, 2 schema/usage error, 3 geometry error, 4 failed
validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, channel, detection, link
from .exceptions import GeometryError
from .geometry import derive_geometry, geometry_from_positions, validity_report
from .particles import error_map
from .scenario_file import ScenarioError, ScenarioFile, load_scenario
from .validation import run_validation

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_GEOMETRY = 3
EXIT_VALIDATION = 4


class UsageError(ValueError):
    pass


def parse_grid(text: str | None, fallback=None) -> np.ndarray:
    """Parse ``"1,2,5"``, ``"lin:start:stop:n"`` or ``"log:start:stop:n"``."""
    if text is None:
        if fallback is None:
            raise UsageError("no grid given on the command line or in the scenario file")
        values = np.asarray(fallback, dtype=float)
    else:
        text = text.strip()
        try:
            if text.startswith(("lin:", "log:")):
                kind, start, stop, n = text.split(":")
                start, stop, n = float(start), float(stop), int(n)
                values = (np.linspace(start, stop, n) if kind == "lin"
                          else np.geomspace(start, stop, n))
            else:
                values = np.array([float(v) for v in text.split(",") if v.strip()])
        except ValueError as exc:
            raise UsageError(f"cannot parse grid {text!r}") from exc
    if values.size == 0:
        raise UsageError("grid is empty")
    if not np.all(np.isfinite(values)):
        raise UsageError("grid values must be finite")
    return values


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def write_csv(out, header: list[str], rows, seed, sf: ScenarioFile) -> None:
    buf = io.StringIO()
    buf.write(f"# mcvd-duo {__version__} seed={_fmt(seed)} scenario_sha256={sf.sha256}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _report_geometry(geom) -> None:
    for issue in validity_report(geom):
        if issue.level == "error":
            raise GeometryError(issue.message)
        print(f"warning: {issue.message}", file=sys.stderr)


def cmd_hit(args, sf: ScenarioFile) -> int:
    sc = sf.scenario
    geom = derive_geometry(sc)
    _report_geometry(geom)
    t = parse_grid(args.t_grid, sf.sweep.get("t_grid"))
    a, D = sc.far_radius, sc.diffusion_coeff
    cols = [
        t,
        channel.p1_hit(t, a, geom.r1, D),
        channel.p1_hit(t, a, geom.r2, D),
        channel.p2_hit(t, geom, 1, a, D),
        channel.p2_hit(t, geom, 2, a, D),
    ]
    cols.append(cols[3] + cols[4])
    rows = zip(*(np.atleast_1d(c) for c in cols))
    write_csv(args.out, ["t", "p1_far1", "p1_far2", "p2_far1", "p2_far2", "p_total"], rows, None, sf)
    return EXIT_OK


def _mirrored_pair(r1, r2, phi):
    """FAR centres at radii r1, r2 and angle phi, mirrored about the x axis.

    The channel depends on (r1, r2, phi) only; mirroring keeps |pos1| and
    |pos2| bit-identical when r1 == r2, so symmetry holds exactly.
    """
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return (r1 * c, r1 * s, 0.0), (r2 * c, -r2 * s, 0.0)


def cmd_sweep_angle(args, sf: ScenarioFile) -> int:
    sc = sf.scenario
    a, D = sc.far_radius, sc.diffusion_coeff
    phis = parse_grid(args.phi_grid, sf.sweep.get("phi_grid_deg"))
    if np.any(phis < args.phi_min):
        raise UsageError(f"angles below the configured minimum {args.phi_min:g} deg")
    t = args.t
    r1 = float(np.linalg.norm(sc.pos1))
    r2 = float(np.linalg.norm(sc.pos2))
    rows = []
    for phi in phis:
        geom = geometry_from_positions(*_mirrored_pair(r1, r2, math.radians(phi)), a)
        if not geom.overlap_free:
            rows.append([phi, geom.R, None, None, None, "overlap"])
            continue
        p1 = channel.p2_hit(t, geom, 1, a, D)
        p2 = channel.p2_hit(t, geom, 2, a, D)
        rows.append([phi, geom.R, p1, p2, p1 + p2, "ok"])
    write_csv(args.out, ["phi_deg", "R", "p2_far1", "p2_far2", "p_total", "status"], rows, None, sf)
    return EXIT_OK


def cmd_gain(args, sf: ScenarioFile) -> int:
    sc = sf.scenario
    t = parse_grid(args.t_grid, sf.sweep.get("t_grid"))
    res = channel.gain(t, sc.pos1, sc.pos2, sc.far_radius, sc.diffusion_coeff)
    rows = zip(res.t, res.p_single, res.p_two, res.gain, res.small_t_bound,
               np.full(res.t.shape, res.gain_infinity))
    write_csv(args.out, ["t", "p1_single", "p_total_two", "gain", "bound_small_t", "gain_infinity"],
              rows, None, sf)
    return EXIT_OK


def _auc_row(sc, l, modes, trials, seed):
    t1 = channel.channel_taps(sc, 1)
    t2 = channel.channel_taps(sc, 2)
    s1 = link.hypothesis_stats(t1, sc, l)
    s2 = link.hypothesis_stats(t2, sc, l)
    stats = [s1, s2, link.joint_stats(s1, s2)]
    out = []
    if "closed" in modes:
        out += [detection.auc_closed_form(s) for s in stats]
    if "numeric" in modes:
        out += [detection.auc_numeric(s) for s in stats]
    if "mc" in modes:
        def both(sim, *a, s):
            s0 = sim(*a, trials, seed=s, current_bit=0)
            s1_ = sim(*a, trials, seed=s + 1, current_bit=1)
            return link.LinkSamples(np.concatenate([s0.true_bit, s1_.true_bit]),
                                    np.concatenate([s0.y, s1_.y]))
        out += [
            detection.auc_empirical(both(link.simulate_link, t1, sc, l, s=seed)),
            detection.auc_empirical(both(link.simulate_link, t2, sc, l, s=seed + 10)),
            detection.auc_empirical(both(link.simulate_link_joint, t1, t2, sc, l, s=seed + 20)),
        ]
    return out


_MODES = {"closed": ["closed"], "analytic": ["numeric"], "mc": ["mc"], "all": ["closed", "numeric", "mc"]}


def cmd_auc(args, sf: ScenarioFile) -> int:
    sc = sf.scenario
    modes = _MODES[args.mode]
    key = "N_grid" if args.sweep == "N" else "R_grid"
    grid = parse_grid(args.grid, sf.sweep.get(key))
    l = args.slot if args.slot is not None else sc.slots
    header = ["sweep_value"]
    for m in modes:
        header += [f"auc1_{m}", f"auc2_{m}", f"auc_joint_{m}"]
    header.append("status")
    x1 = np.asarray(sc.pos1)
    direction = np.asarray(sc.pos2) - x1
    direction = direction / np.linalg.norm(direction)
    rows = []
    for value in grid:
        if args.sweep == "N":
            if value < 0 or value != int(value):
                raise UsageError("N grid values must be non-negative integers")
            cell = sc.replace(molecules_per_bit=int(value))
            value = int(value)
        else:
            pos2 = x1 + value * direction
            if np.linalg.norm(pos2) == 0 or not geometry_from_positions(x1, pos2, sc.far_radius).overlap_free:
                rows.append([value] + [None] * (3 * len(modes)) + ["overlap"])
                continue
            cell = sc.replace(pos2=tuple(pos2))
        rows.append([value] + _auc_row(cell, l, modes, args.trials, args.seed) + ["ok"])
    write_csv(args.out, header, rows, args.seed if "mc" in modes else None, sf)
    return EXIT_OK


def cmd_validate(args, sf: ScenarioFile) -> int:
    sc = sf.scenario
    _report_geometry(derive_geometry(sc))
    sim = sf.sim_config(n_particles=args.particles, dt=args.dt, t_max=args.t_max, seed=args.seed)
    checks = run_validation(sc, sim, n_trials=args.trials, seed=sim.seed,
                            particle_tol=args.tol, workers=args.workers)
    report = {
        "version": __version__,
        "scenario_sha256": sf.sha256,
        "seed": sim.seed,
        "passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_error_map(args, sf: ScenarioFile) -> int:
    sc = sf.scenario
    sim = sf.sim_config(n_particles=args.particles, dt=args.dt, t_max=args.t_max, seed=args.seed)
    xs = parse_grid(args.xs)
    ys = parse_grid(args.ys)
    t = args.t if args.t is not None else sim.t_max
    if t > sim.t_max:
        raise UsageError("--t must not exceed the simulated t_max")
    em = error_map(sc, xs, ys, sim, t=t, far_index=args.far, workers=args.workers)
    rows = []
    for iy, y in enumerate(em.ys):
        for ix, x in enumerate(em.xs):
            if em.skipped[iy, ix]:
                rows.append([x, y, None, None, None, None, "skipped"])
            else:
                rows.append([x, y, em.analytic[iy, ix], em.empirical[iy, ix],
                             em.abs_error[iy, ix], em.approx_valid[iy, ix], "ok"])
    write_csv(args.out, ["x", "y", "analytic", "empirical", "abs_error", "approx_valid", "status"],
              rows, sim.seed, sf)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcvd-duo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        return p

    def sim_flags(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--particles", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--t-max", type=float, default=None)
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (capped by MCVD_THREADS)")

    p = common(sub.add_parser("hit", help="hitting probability versus time"))
    p.add_argument("--t-grid")
    p.set_defaults(func=cmd_hit)

    p = common(sub.add_parser("sweep-angle", help="hitting probability versus FAR separation angle"))
    p.add_argument("--phi-grid", help="angles in degrees")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--phi-min", type=float, default=20.0)
    p.set_defaults(func=cmd_sweep_angle)

    p = common(sub.add_parser("gain", help="two FARs of radius a/sqrt(2) versus one of radius a"))
    p.add_argument("--t-grid")
    p.set_defaults(func=cmd_gain)

    p = common(sub.add_parser("auc", help="AUC sweeps over N or FAR distance"))
    p.add_argument("--sweep", choices=["N", "R"], required=True)
    p.add_argument("--grid")
    p.add_argument("--mode", choices=list(_MODES), default="all")
    p.add_argument("--slot", type=int, default=None)
    p.add_argument("--trials", type=int, default=100_000, help="Monte-Carlo samples per class")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_auc)

    p = common(sub.add_parser("validate", help="run the analytic-vs-oracle checks"))
    sim_flags(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=0.01, help="particle agreement tolerance")
    p.set_defaults(func=cmd_validate)

    p = common(sub.add_parser("error-map", help="approximation error over FAR2 positions"))
    sim_flags(p)
    p.add_argument("--xs", required=True)
    p.add_argument("--ys", required=True)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--far", type=int, choices=[1, 2], default=1)
    p.set_defaults(func=cmd_error_map)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sf = load_scenario(args.scenario)
        return args.func(args, sf)
    except (ScenarioError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    raise SystemExit(main())
