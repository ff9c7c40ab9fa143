"""
Angular separation of two equidistant receivers
===============================================

Both receivers sit 20 um from the source.  Moving them apart in angle
reduces the shielding and raises the total absorbed fraction.
"""

# %%
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from mcvd_duo import geometry_from_positions, p2_hit

a, D, r, t = 5.0, 100.0, 20.0, 10.0
phis, totals = [], []
for phi in np.arange(20, 181, 2):
    h = math.radians(phi) / 2
    g = geometry_from_positions((r * math.cos(h), r * math.sin(h), 0), (r * math.cos(h), -r * math.sin(h), 0), a)
    if not g.overlap_free:  # spheres intersect at small angles
        continue
    p = p2_hit(t, g, 1, a, D)
    assert p == p2_hit(t, g, 2, a, D)
    phis.append(phi)
    totals.append(2 * p)

# %%
fig, ax = plt.subplots()
ax.plot(phis, totals)
ax.set_xlabel("phi (deg)")
ax.set_ylabel(f"total hitting probability at t = {t:g} s")
fig.savefig("angle_sweep.png", dpi=120)
print("best angle:", phis[int(np.argmax(totals))])
