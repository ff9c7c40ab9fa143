"""Slot-level on-off-keying link: hypothesis statistics and a Monte-Carlo sampler."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .channel import TapVector
from .exceptions import MismatchedSlot
from .geometry import Scenario

__all__ = [
    "JOINT",
    "HypothesisStats",
    "LinkSample",
    "LinkSamples",
    "hypothesis_stats",
    "joint_stats",
    "simulate_link",
    "simulate_link_joint",
]

JOINT = 0
TRIAL_BLOCK = 1 << 16


@dataclass(frozen=True)
class HypothesisStats:
    """Mean and variance of the received count under b[l] = 0 and b[l] = 1."""

    mu0: float
    var0: float
    mu1: float
    var1: float
    slot_index: int
    far_index: int = JOINT

    @property
    def sigma0(self) -> float:
        return float(np.sqrt(self.var0))

    @property
    def sigma1(self) -> float:
        return float(np.sqrt(self.var1))


class LinkSample(NamedTuple):
    true_bit: int
    y: float


@dataclass(frozen=True)
class LinkSamples:
    true_bit: np.ndarray  # int8
    y: np.ndarray

    def __len__(self):
        return len(self.y)

    def __getitem__(self, i) -> LinkSample:
        return LinkSample(int(self.true_bit[i]), float(self.y[i]))

    def __iter__(self) -> Iterator[LinkSample]:
        for i in range(len(self)):
            yield self[i]

    def given(self, bit: int) -> np.ndarray:
        return self.y[self.true_bit == bit]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["true_bit", "y"])
            for b, y in zip(self.true_bit, self.y):
                writer.writerow([int(b), repr(float(y))])


def _check_slot(taps, l: int) -> np.ndarray:
    h = np.asarray(taps.taps if isinstance(taps, TapVector) else taps, dtype=float)
    if l < 1:
        raise ValueError("slot index l must be >= 1")
    if h.size < l:
        raise IndexError(f"need at least {l} taps, got {h.size}")
    return h


def hypothesis_stats(taps: TapVector, scenario: Scenario, l: int) -> HypothesisStats:
    """Statistics of Y[l] averaged over i.i.d. Bernoulli(q1) earlier bits."""
    h = _check_slot(taps, l)
    N = scenario.molecules_per_bit
    q1, q0 = scenario.bit_prior, scenario.bit_prior0
    isi = h[1:l]  # h[l-k] for k = 1..l-1
    mu0 = N * q1 * isi.sum() + scenario.noise_mean
    var0 = N * q1 * np.sum(isi * (1 - isi) + N * q0 * isi**2) + scenario.noise_var
    mu1 = N * h[0] + mu0
    var1 = N * h[0] * (1 - h[0]) + var0
    far = taps.far_index if isinstance(taps, TapVector) else JOINT
    return HypothesisStats(float(mu0), float(var0), float(mu1), float(var1), l, far)


def joint_stats(s1: HypothesisStats, s2: HypothesisStats) -> HypothesisStats:
    """Statistics of Y1[l] + Y2[l], summing means and variances component-wise."""
    if s1.slot_index != s2.slot_index:
        raise MismatchedSlot(f"slot {s1.slot_index} != slot {s2.slot_index}")
    return HypothesisStats(
        mu0=s1.mu0 + s2.mu0,
        var0=s1.var0 + s2.var0,
        mu1=s1.mu1 + s2.mu1,
        var1=s1.var1 + s2.var1,
        slot_index=s1.slot_index,
        far_index=JOINT,
    )


def _trial_blocks(n_trials: int, seed: int):
    for block, start in enumerate(range(0, n_trials, TRIAL_BLOCK)):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
        yield np.random.Generator(np.random.Philox(ss)), min(TRIAL_BLOCK, n_trials - start)


def _draw_bits(rng, n, l, q1, current_bit):
    bits = (rng.random((n, l)) < q1).astype(np.int64)
    if current_bit is not None:
        bits[:, 0] = current_bit
    return bits  # column 0 is b[l], column m >= 1 is b[l-m]


def simulate_link(taps: TapVector, scenario: Scenario, l: int, n_trials: int, seed: int = 0,
                  current_bit: int | None = None) -> LinkSamples:
    """Draw Y[l] with exact binomial arrivals and Gaussian noise.

    ``current_bit`` pins b[l] (useful for a fixed number of samples per class);
    the earlier bits are always random.
    """
    h = _check_slot(taps, l)[:l]
    N = scenario.molecules_per_bit
    noise_sd = np.sqrt(scenario.noise_var)
    out_bits, out_y = [], []
    for rng, n in _trial_blocks(n_trials, seed):
        bits = _draw_bits(rng, n, l, scenario.bit_prior, current_bit)
        counts = rng.binomial(N * bits, h[None, :]).sum(axis=1)
        y = counts + scenario.noise_mean + noise_sd * rng.standard_normal(n)
        out_bits.append(bits[:, 0].astype(np.int8))
        out_y.append(y)
    return LinkSamples(np.concatenate(out_bits), np.concatenate(out_y))


def simulate_link_joint(taps1: TapVector, taps2: TapVector, scenario: Scenario, l: int,
                        n_trials: int, seed: int = 0,
                        current_bit: int | None = None) -> LinkSamples:
    """Draw Y1[l] + Y2[l] for the physical two-FAR link.

    Both FARs see the same bit sequence, and each molecule lands in at most
    one FAR (multinomial split), so the two counts are correlated.  Each FAR
    has its own independent noise term.
    """
    h1 = _check_slot(taps1, l)[:l]
    h2 = _check_slot(taps2, l)[:l]
    N = scenario.molecules_per_bit
    noise_sd = np.sqrt(scenario.noise_var)
    out_bits, out_y = [], []
    for rng, n in _trial_blocks(n_trials, seed):
        bits = _draw_bits(rng, n, l, scenario.bit_prior, current_bit)
        emitted = N * bits
        # Sequential binomial split equals a multinomial over {FAR1, FAR2, elsewhere}.
        c1 = rng.binomial(emitted, h1[None, :])
        rest = np.clip(1.0 - h1, 1e-300, None)
        c2 = rng.binomial(emitted - c1, np.clip(h2 / rest, 0.0, 1.0)[None, :])
        noise = scenario.noise_mean + noise_sd * rng.standard_normal((n, 2))
        y = (c1 + c2).sum(axis=1) + noise.sum(axis=1)
        out_bits.append(bits[:, 0].astype(np.int8))
        out_y.append(y)
    return LinkSamples(np.concatenate(out_bits), np.concatenate(out_y))
