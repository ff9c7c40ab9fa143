"""
Detection performance versus molecules per bit
==============================================

On-off keying with ISI from the previous nine slots.  Three AUC
estimates per receiver: closed form (exponential Q fit), quadrature and
Monte-Carlo ranks.
"""

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mcvd_duo import (
    Scenario,
    auc_closed_form,
    auc_empirical,
    auc_numeric,
    channel_taps,
    hypothesis_stats,
    joint_stats,
    roc,
    simulate_link,
)
from mcvd_duo.link import LinkSamples

base = Scenario(100.0, 5.0, (20, 5, 0), (-25, -10, 0), slot_duration=5.0,
                noise_mean=5.0, noise_var=5.0, slots=10)
l = 10


def two_class(taps, sc, n=20_000, seed=0):
    y0 = simulate_link(taps, sc, l, n, seed=seed, current_bit=0)
    y1 = simulate_link(taps, sc, l, n, seed=seed + 1, current_bit=1)
    return LinkSamples(np.concatenate([y0.true_bit, y1.true_bit]), np.concatenate([y0.y, y1.y]))


# %%
Ns = np.rint(np.linspace(100, 2000, 8)).astype(int)
rows = []
for N in Ns:
    sc = base.replace(molecules_per_bit=int(N))
    t1, t2 = channel_taps(sc, 1), channel_taps(sc, 2)
    s1, s2 = hypothesis_stats(t1, sc, l), hypothesis_stats(t2, sc, l)
    sj = joint_stats(s1, s2)
    rows.append([auc_closed_form(s1), auc_closed_form(s2), auc_closed_form(sj),
                 auc_numeric(s1), auc_empirical(two_class(t1, sc))])
rows = np.array(rows)
print(np.column_stack([Ns, rows]).round(4))

# %%
fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
for k, label in enumerate(["FAR1", "FAR2", "joint"]):
    left.plot(Ns, rows[:, k], "o-", label=label)
left.plot(Ns, rows[:, 4], "kx", label="FAR1 Monte-Carlo")
left.set_xlabel("N")
left.set_ylabel("AUC")
left.legend()
curve = roc(s1)
right.plot(curve.pf, curve.pd)
right.set_xlabel("Pf")
right.set_ylabel("Pd")
right.set_title(f"ROC, FAR1, N = {Ns[-1]}")
fig.savefig("auc.png", dpi=120)
