"""Brownian particle oracle with two absorbing spheres.

Every particle starts at the origin and takes Gaussian steps of variance
``2 D dt`` per coordinate.  After each step the position is tested against
both spheres; a particle found inside is absorbed at that step's time.

Far from both spheres the walker advances ``k`` steps at once by drawing the
sum of ``k`` increments directly.  ``k`` is chosen so that leaving the current
ball of clearance ``d`` within those steps has probability below
``12 Q(jump_sigma)`` (about 1e-8 at the default), which is far below any
Monte-Carlo band used here.  ``jump_sigma=None`` disables jumping.

Randomness is drawn per block of ``BLOCK_SIZE`` particles from a Philox stream
keyed by ``(seed, block index)``, so results do not depend on how blocks are
distributed over worker processes.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .channel import DEFAULT_SERIES, SeriesConfig, p2_hit
from .exceptions import GeometryError
from .geometry import Scenario, geometry_from_positions

__all__ = [
    "Outcome",
    "SimConfig",
    "HitRecord",
    "HitRecords",
    "ErrorMap",
    "simulate",
    "empirical_hitting",
    "error_map",
    "worker_count",
]

BLOCK_SIZE = 4096


class Outcome(enum.IntEnum):
    SURVIVED = 0
    FAR1 = 1
    FAR2 = 2


@dataclass(frozen=True)
class SimConfig:
    n_particles: int
    t_max: float
    dt: float = 1e-4
    seed: int = 0
    jump_sigma: float | None = 6.0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if not 0 < self.dt <= self.t_max:
            raise ValueError("need 0 < dt <= t_max")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.jump_sigma is not None and not self.jump_sigma > 0:
            raise ValueError("jump_sigma must be positive or None")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


class HitRecord(NamedTuple):
    outcome: Outcome
    hit_time: float  # nan when survived


@dataclass(frozen=True)
class HitRecords:
    """Column store of per-particle outcomes, indexed by particle id."""

    outcome: np.ndarray  # int8, values of Outcome
    hit_time: np.ndarray  # float64, nan for survivors
    t_max: float

    def __len__(self):
        return len(self.outcome)

    def __getitem__(self, i) -> HitRecord:
        return HitRecord(Outcome(int(self.outcome[i])), float(self.hit_time[i]))

    def __iter__(self) -> Iterator[HitRecord]:
        for i in range(len(self)):
            yield self[i]

    def counts(self) -> dict[Outcome, int]:
        return {o: int(np.count_nonzero(self.outcome == o)) for o in Outcome}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["particle_id", "outcome", "hit_time_s"])
            for i, (o, t) in enumerate(zip(self.outcome, self.hit_time)):
                writer.writerow([i, Outcome(int(o)).name, "" if np.isnan(t) else repr(float(t))])


def worker_count(requested: int | None = None) -> int:
    """Resolve the worker count; ``MCVD_THREADS`` caps it when set."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("MCVD_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_block(args):
    (n, seed, block, centres, a, D, dt, n_steps, jump_sigma) = args
    rng = _block_rng(seed, block)
    outcome = np.zeros(n, dtype=np.int8)
    hit_step = np.full(n, -1, dtype=np.int64)
    sigma = math.sqrt(2.0 * D * dt)
    if sigma == 0.0 or n_steps == 0:
        return outcome, hit_step

    c1, c2 = centres
    pos = np.zeros((n, 3))
    step = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    jump_scale = None if jump_sigma is None else jump_sigma * math.sqrt(3.0) * sigma

    while active.size:
        p = pos[active]
        if jump_scale is None:
            k = np.ones(active.size, dtype=np.int64)
        else:
            clearance = np.minimum(np.linalg.norm(p - c1, axis=1), np.linalg.norm(p - c2, axis=1)) - a
            k = np.floor((clearance / jump_scale) ** 2).astype(np.int64)
            np.clip(k, 1, n_steps - step[active], out=k)
        p = p + rng.standard_normal(p.shape) * (sigma * np.sqrt(k))[:, None]
        step[active] += k
        pos[active] = p

        depth1 = np.linalg.norm(p - c1, axis=1) - a
        depth2 = np.linalg.norm(p - c2, axis=1) - a
        in1 = (depth1 <= 0) & (depth1 <= depth2)
        in2 = (depth2 <= 0) & ~in1
        absorbed = in1 | in2
        outcome[active[in1]] = Outcome.FAR1
        outcome[active[in2]] = Outcome.FAR2
        hit_step[active[absorbed]] = step[active[absorbed]]
        active = active[~absorbed & (step[active] < n_steps)]
    return outcome, hit_step


def simulate(scenario: Scenario, sim_config: SimConfig, workers: int | None = 1) -> HitRecords:
    """Run the particle oracle; output is identical for any ``workers`` value."""
    a = scenario.far_radius
    geom = geometry_from_positions(scenario.pos1, scenario.pos2, a)
    if not geom.overlap_free:
        raise GeometryError("particle simulation needs an overlap-free geometry")
    centres = (np.asarray(scenario.pos1), np.asarray(scenario.pos2))
    n_blocks = -(-sim_config.n_particles // BLOCK_SIZE)
    tasks = []
    for b in range(n_blocks):
        n = min(BLOCK_SIZE, sim_config.n_particles - b * BLOCK_SIZE)
        tasks.append((n, sim_config.seed, b, centres, a, scenario.diffusion_coeff,
                      sim_config.dt, sim_config.n_steps, sim_config.jump_sigma))

    workers = worker_count(workers)
    if workers == 1 or n_blocks == 1:
        parts = [_simulate_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, n_blocks)) as pool:
            parts = list(pool.map(_simulate_block, tasks))

    outcome = np.concatenate([o for o, _ in parts])
    hit_step = np.concatenate([h for _, h in parts])
    hit_time = np.where(hit_step >= 0, hit_step * sim_config.dt, np.nan)
    return HitRecords(outcome=outcome, hit_time=hit_time, t_max=sim_config.n_steps * sim_config.dt)


def empirical_hitting(records: HitRecords, t_grid) -> np.ndarray:
    """Fraction of particles absorbed by each FAR by each time; shape (2, len(t_grid))."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    n = len(records)
    curves = np.empty((2, t_grid.size))
    for row, far in enumerate((Outcome.FAR1, Outcome.FAR2)):
        times = np.sort(records.hit_time[records.outcome == far])
        # Small slack so grid times computed as k*dt by different routes still match.
        curves[row] = np.searchsorted(times, t_grid * (1 + 1e-12), side="right") / n
    return curves


@dataclass(frozen=True)
class ErrorMap:
    xs: np.ndarray
    ys: np.ndarray
    t: float
    far_index: int
    analytic: np.ndarray  # (len(ys), len(xs)); nan where skipped
    empirical: np.ndarray
    abs_error: np.ndarray
    skipped: np.ndarray  # overlapping cells
    approx_valid: np.ndarray


def error_map(scenario: Scenario, xs, ys, sim_config: SimConfig, t: float | None = None,
              far_index: int = 1, z: float = 0.0, cfg: SeriesConfig = DEFAULT_SERIES,
              workers: int | None = 1) -> ErrorMap:
    """|analytic - simulated| hitting probability as FAR 2 moves over an x-y grid.

    FAR 1 stays at ``scenario.pos1``.  Every cell reuses ``sim_config`` (and
    hence its seed).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    t = sim_config.t_max if t is None else float(t)
    shape = (ys.size, xs.size)
    analytic = np.full(shape, np.nan)
    empirical = np.full(shape, np.nan)
    skipped = np.zeros(shape, dtype=bool)
    valid = np.zeros(shape, dtype=bool)
    a = scenario.far_radius
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            pos2 = (x, y, z)
            if np.linalg.norm(pos2) == 0.0:
                skipped[iy, ix] = True
                continue
            geom = geometry_from_positions(scenario.pos1, pos2, a)
            if not geom.overlap_free:
                skipped[iy, ix] = True
                continue
            valid[iy, ix] = geom.approx_valid
            cell = scenario.replace(pos2=pos2)
            analytic[iy, ix] = p2_hit(t, geom, far_index, a, scenario.diffusion_coeff, cfg)
            records = simulate(cell, sim_config, workers=workers)
            empirical[iy, ix] = empirical_hitting(records, [t])[far_index - 1, 0]
    return ErrorMap(xs=xs, ys=ys, t=t, far_index=far_index, analytic=analytic,
                    empirical=empirical, abs_error=np.abs(analytic - empirical),
                    skipped=skipped, approx_valid=valid)
