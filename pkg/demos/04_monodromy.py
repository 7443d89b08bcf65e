"""
Monodromy of the pentagon covering
==================================

Lifting a loop to the covering permutes the sheets.  Around any proper
subset of the terminals the permutation is a single 5-cycle, so every
such loop has a connected preimage; around all of them it is trivial.
"""

import itertools

import numpy as np

from steiner_cover.calib import builtin
from steiner_cover.covering import circle_loop, monodromy
from steiner_cover.geom import Polyline

cov = builtin("pentagon(5)").cov
P = cov.config.points
c = P.mean(axis=0)


def loop_around(subset, n=720):
    # star-shaped loop: far out near the chosen terminals, close in elsewhere
    ang = np.arctan2(*(P - c).T[::-1])
    R = np.hypot(*(P - c).T)
    t = np.linspace(0, 2 * np.pi, n, endpoint=False) + 1e-3
    d = (t[:, None] - ang[None, :] + np.pi) % (2 * np.pi) - np.pi
    near = np.abs(d).argmin(axis=1)
    rad = np.where(np.isin(near, list(subset)), 1.7 * R[near], 0.35 * R[near])
    pts = c + rad[:, None] * np.stack([np.cos(t), np.sin(t)], axis=1)
    return Polyline(np.vstack([pts, pts[:1]]))


for r in range(1, 6):
    for s in itertools.combinations(range(5), r):
        g = monodromy(cov, loop_around(s))
        names = "".join(f"p{k + 1} " for k in s)
        print(f"{names:16s} {g.mapping}  cycles {g.cycles()}")

print("\nfar away:", monodromy(cov, circle_loop((10, 10), 1)).mapping)
