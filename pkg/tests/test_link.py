import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcvd_duo import (
    MismatchedSlot,
    Scenario,
    TapVector,
    channel_taps,
    hypothesis_stats,
    joint_stats,
    simulate_link,
    simulate_link_joint,
)
from mcvd_duo.link import JOINT
from mcvd_duo.validation import moment_errors


def make_taps(values, far=1):
    return TapVector(far, np.asarray(values, dtype=float), 1.0)


def base(**kw):
    opts = dict(molecules_per_bit=100, bit_prior=0.5, noise_mean=2.0, noise_var=3.0)
    opts.update(kw)
    return Scenario(100.0, 5.0, (20, 0, 0), (0, 20, 0), **opts)


def brute_stats(h, sc, l):
    """Moments by enumerating every earlier bit pattern."""
    import itertools
    N, q1 = sc.molecules_per_bit, sc.bit_prior
    means, second = 0.0, 0.0
    for bits in itertools.product((0, 1), repeat=l - 1):
        w = np.prod([q1 if b else 1 - q1 for b in bits])
        m = sum(N * b * h[k + 1] for k, b in enumerate(bits))
        v = sum(N * b * h[k + 1] * (1 - h[k + 1]) for k, b in enumerate(bits))
        means += w * m
        second += w * (v + m * m)
    mu0 = means + sc.noise_mean
    var0 = second - means**2 + sc.noise_var
    return mu0, var0


def test_single_slot_has_no_isi():
    sc = base()
    s = hypothesis_stats(make_taps([0.1, 0.05]), sc, 1)
    assert s.mu0 == sc.noise_mean
    assert s.var0 == sc.noise_var
    assert s.mu1 == pytest.approx(100 * 0.1 + 2.0, rel=1e-15)


def test_all_zero_prior_leaves_noise():
    sc = base(bit_prior=0.0)
    s = hypothesis_stats(make_taps([0.1, 0.05, 0.02]), sc, 3)
    assert (s.mu0, s.var0) == (sc.noise_mean, sc.noise_var)


def test_matches_enumeration():
    h = [0.12, 0.07, 0.03, 0.015, 0.008]
    sc = base(bit_prior=0.3)
    s = hypothesis_stats(make_taps(h), sc, 5)
    mu0, var0 = brute_stats(h, sc, 5)
    assert s.mu0 == pytest.approx(mu0, rel=1e-12)
    assert s.var0 == pytest.approx(var0, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 0.2), min_size=1, max_size=12), st.integers(0, 5000),
       st.floats(0.0, 1.0))
def test_current_bit_increments(h, N, q1):
    sc = base(molecules_per_bit=N, bit_prior=q1)
    s = hypothesis_stats(make_taps(h), sc, len(h))
    assert s.mu1 - s.mu0 == pytest.approx(N * h[0], abs=1e-9 * (1 + N))
    assert s.var1 - s.var0 == pytest.approx(N * h[0] * (1 - h[0]), abs=1e-9 * (1 + N))
    assert s.var0 >= sc.noise_var - 1e-12


def test_too_few_taps():
    with pytest.raises(IndexError):
        hypothesis_stats(make_taps([0.1, 0.1]), base(), 3)
    with pytest.raises(ValueError):
        hypothesis_stats(make_taps([0.1]), base(), 0)


def test_joint_stats_sum():
    sc = base()
    s = hypothesis_stats(make_taps([0.1, 0.05, 0.02]), sc, 3)
    j = joint_stats(s, s)
    assert j.far_index == JOINT
    assert (j.mu0, j.var0, j.mu1, j.var1) == (2 * s.mu0, 2 * s.var0, 2 * s.mu1, 2 * s.var1)
    zero = type(s)(0.0, 0.0, 0.0, 0.0, 3)
    k = joint_stats(s, zero)
    assert (k.mu0, k.var0, k.mu1, k.var1) == (s.mu0, s.var0, s.mu1, s.var1)
    with pytest.raises(MismatchedSlot):
        joint_stats(s, hypothesis_stats(make_taps([0.1, 0.05, 0.02]), sc, 2))


def test_silent_link_is_deterministic():
    sc = base(molecules_per_bit=0, noise_var=0.0)
    out = simulate_link(make_taps([0.3, 0.2]), sc, 2, 100, seed=1)
    assert np.all(out.y == sc.noise_mean)


def test_link_moments(link_setup):
    taps = channel_taps(link_setup, 1)
    s = hypothesis_stats(taps, link_setup, 10)
    n = 50_000
    for bit, mean, var in ((0, s.mu0, s.var0), (1, s.mu1, s.var1)):
        y = simulate_link(taps, link_setup, 10, n, seed=11 + bit, current_bit=bit).y
        assert max(moment_errors(y, mean, var)) < 3.0


def test_random_current_bit_uses_prior():
    sc = base(bit_prior=0.25)
    out = simulate_link(make_taps([0.1, 0.05]), sc, 2, 40_000, seed=3)
    frac = out.true_bit.mean()
    assert abs(frac - 0.25) < 3 * np.sqrt(0.25 * 0.75 / 40_000)
    assert out.given(1).size + out.given(0).size == 40_000


def test_link_seed_determinism():
    sc = base()
    t = make_taps([0.1, 0.05, 0.02])
    a = simulate_link(t, sc, 3, 70_000, seed=5)
    b = simulate_link(t, sc, 3, 70_000, seed=5)
    assert np.array_equal(a.y, b.y) and np.array_equal(a.true_bit, b.true_bit)
    assert not np.array_equal(a.y, simulate_link(t, sc, 3, 70_000, seed=6).y)


def test_joint_link_mean(link_setup):
    t1, t2 = channel_taps(link_setup, 1), channel_taps(link_setup, 2)
    j = joint_stats(hypothesis_stats(t1, link_setup, 10), hypothesis_stats(t2, link_setup, 10))
    y = simulate_link_joint(t1, t2, link_setup, 10, 50_000, seed=4, current_bit=1).y
    # The split correlates the two counts, so only the mean is exact.
    z_mean, _ = moment_errors(y, j.mu1, j.var1)
    assert z_mean < 3.0


def test_samples_csv(tmp_path):
    out = simulate_link(make_taps([0.1]), base(), 1, 5, seed=0)
    path = tmp_path / "y.csv"
    out.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "true_bit,y"
    assert len(lines) == 6
    assert [s.true_bit for s in out] == [int(b) for b in out.true_bit]
