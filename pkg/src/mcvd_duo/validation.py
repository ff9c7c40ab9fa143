"""Cross-checks of the analytic model against the stochastic oracles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import channel, detection, link
from .channel import DEFAULT_SERIES, SeriesConfig, TapVector
from .geometry import Scenario, derive_geometry
from .particles import SimConfig, empirical_hitting, simulate

__all__ = [
    "Check",
    "moment_errors",
    "check_particle_agreement",
    "check_tap_conservation",
    "check_eventual_identity",
    "check_symmetry",
    "check_link_stats",
    "check_auc_agreement",
    "run_validation",
]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(passed=bool(self.passed), value=float(self.value), tolerance=float(self.tolerance))
        return d


def moment_errors(x: np.ndarray, mean: float, var: float) -> tuple[float, float]:
    """Deviations of the sample mean/variance from targets, in standard errors."""
    n = x.size
    m = x.mean()
    centred = x - m
    s2 = centred.var(ddof=1)
    m4 = np.mean(centred**4)
    se_mean = math.sqrt(s2 / n)
    se_var = math.sqrt(max(m4 - s2 * s2, 0.0) / n)
    z_mean = abs(m - mean) / se_mean if se_mean > 0 else (0.0 if m == mean else math.inf)
    z_var = abs(s2 - var) / se_var if se_var > 0 else (0.0 if s2 == var else math.inf)
    return z_mean, z_var


def _p2_row(t, geom, far, a, D, cfg):
    return np.atleast_1d(channel.p2_hit(t, geom, far, a, D, cfg))


def check_particle_agreement(scenario: Scenario, sim_config: SimConfig, t_grid=None,
                             tol: float = 0.01, workers: int | None = 1,
                             cfg: SeriesConfig = DEFAULT_SERIES) -> Check:
    geom = derive_geometry(scenario)
    if t_grid is None:
        t_grid = sim_config.t_max * np.array([0.25, 0.5, 0.75, 1.0])
    t_grid = np.asarray(t_grid, dtype=float)
    records = simulate(scenario, sim_config, workers=workers)
    emp = empirical_hitting(records, t_grid)
    a, D = scenario.far_radius, scenario.diffusion_coeff
    ana = np.vstack([_p2_row(t_grid, geom, f, a, D, cfg) for f in (1, 2)])
    err = float(np.max(np.abs(ana - emp)))
    return Check("particle_agreement", err <= tol, err, tol,
                 f"{sim_config.n_particles} particles, dt={sim_config.dt:g}")


def check_tap_conservation(taps: TapVector, scenario: Scenario, tol: float = 1e-12,
                           cfg: SeriesConfig = DEFAULT_SERIES) -> Check:
    geom = derive_geometry(scenario)
    edges = scenario.slot_duration * np.arange(1, len(taps) + 1)
    expected = _p2_row(edges, geom, taps.far_index, scenario.far_radius,
                      scenario.diffusion_coeff, cfg)
    err = float(np.max(np.abs(np.cumsum(taps.taps) - expected)))
    return Check(f"tap_conservation_far{taps.far_index}", err <= tol, err, tol)


def check_eventual_identity(scenario: Scenario, tol: float = 1e-12) -> Check:
    geom = derive_geometry(scenario)
    a = scenario.far_radius
    err = max(
        abs(channel.p1_eventual(a, geom.r(f)) - channel.p2_eventual(geom, f, a)
            - channel.reduction_eventual(geom, f, a))
        for f in (1, 2)
    )
    return Check("eventual_identity", err <= tol, err, tol)


def check_symmetry(scenario: Scenario, t_grid, tol: float = 1e-15,
                   cfg: SeriesConfig = DEFAULT_SERIES) -> Check | None:
    """Equal-distance FARs must receive identical fractions; None when r1 != r2."""
    geom = derive_geometry(scenario)
    if geom.r1 != geom.r2:
        return None
    a, D = scenario.far_radius, scenario.diffusion_coeff
    t_grid = np.asarray(t_grid, dtype=float)
    err = float(np.max(np.abs(_p2_row(t_grid, geom, 1, a, D, cfg) - _p2_row(t_grid, geom, 2, a, D, cfg))))
    return Check("symmetry", err <= tol, err, tol)


def check_link_stats(scenario: Scenario, l: int, n_trials: int, seed: int,
                     z_max: float = 3.0, taps: dict | None = None) -> Check:
    """Monte-Carlo moments of Y[l] vs the analytic statistics, both FARs, both bits."""
    worst = 0.0
    for f in (1, 2):
        tv = taps[f] if taps else channel.channel_taps(scenario, f)
        stats = link.hypothesis_stats(tv, scenario, l)
        for bit, (mean, var) in ((0, (stats.mu0, stats.var0)), (1, (stats.mu1, stats.var1))):
            y = link.simulate_link(tv, scenario, l, n_trials, seed=seed + 2 * f + bit,
                                   current_bit=bit).y
            worst = max(worst, *moment_errors(y, mean, var))
    return Check("link_stats", worst <= z_max, worst, z_max,
                 f"{n_trials} trials per class, deviation in standard errors")


def _class_samples(sim, n, seed, *args):
    s0 = sim(*args, n, seed=seed, current_bit=0)
    s1 = sim(*args, n, seed=seed + 1, current_bit=1)
    return link.LinkSamples(np.concatenate([s0.true_bit, s1.true_bit]),
                            np.concatenate([s0.y, s1.y]))


def check_auc_agreement(scenario: Scenario, l: int, n_per_class: int, seed: int,
                        tol: float = 0.01) -> Check:
    t1 = channel.channel_taps(scenario, 1)
    t2 = channel.channel_taps(scenario, 2)
    s1 = link.hypothesis_stats(t1, scenario, l)
    s2 = link.hypothesis_stats(t2, scenario, l)
    cases = {
        "far1": (s1, _class_samples(link.simulate_link, n_per_class, seed, t1, scenario, l)),
        "far2": (s2, _class_samples(link.simulate_link, n_per_class, seed + 10, t2, scenario, l)),
        "joint": (link.joint_stats(s1, s2),
                  _class_samples(link.simulate_link_joint, n_per_class, seed + 20, t1, t2, scenario, l)),
    }
    worst = 0.0
    parts = []
    for name, (stats, samples) in cases.items():
        num = detection.auc_numeric(stats)
        closed = detection.auc_closed_form(stats)
        emp = detection.auc_empirical(samples)
        worst = max(worst, abs(closed - num), abs(num - emp))
        parts.append(f"{name}: closed={closed:.4f} numeric={num:.4f} mc={emp:.4f}")
    return Check("auc_agreement", worst <= tol, worst, tol, "; ".join(parts))


def run_validation(scenario: Scenario, sim_config: SimConfig, *, n_trials: int = 100_000,
                   seed: int = 0, particle_tol: float = 0.01, workers: int | None = 1,
                   taps: dict | None = None) -> list[Check]:
    """Full validation battery.  ``taps`` overrides the computed tap vectors
    (keyed by FAR index) for the conservation and link checks."""
    l = scenario.slots
    tv = taps or {f: channel.channel_taps(scenario, f) for f in (1, 2)}
    checks = [
        check_particle_agreement(scenario, sim_config, tol=particle_tol, workers=workers),
        check_tap_conservation(tv[1], scenario),
        check_tap_conservation(tv[2], scenario),
        check_eventual_identity(scenario),
    ]
    sym = check_symmetry(scenario, sim_config.t_max * np.linspace(0.1, 1.0, 10))
    if sym is not None:
        checks.append(sym)
    if scenario.molecules_per_bit > 0:
        checks.append(check_link_stats(scenario, l, n_trials, seed, taps=tv))
        if scenario.noise_var > 0:
            checks.append(check_auc_agreement(scenario, l, n_trials, seed))
    return checks
