"""
Shortest networks on a few point sets
=====================================

The exact solver enumerates every tree topology on the terminals, puts each
one into its shortest position and keeps all co-minimizers.
"""

import math
from pathlib import Path

import numpy as np

from steiner_cover.covering import PointConfig
from steiner_cover.scene import candidate_strip
from steiner_cover.steiner import enumerate_topologies, minimum_spanning_length, steiner_tree

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

# how fast the search space grows: m = 2..6 terminals
for m in range(2, 7):
    tops = enumerate_topologies(m)
    print(f"m={m}: {len(tops):5d} topologies, {sum(t.is_full for t in tops):4d} full")

# the equilateral triangle: one Steiner point in the middle, 120 degree angles
tri = PointConfig([(math.cos(a), math.sin(a)) for a in np.pi / 2 + 2 * np.pi * np.arange(3) / 3])
res = steiner_tree(tri)
print("\ntriangle", res.length, (res.network.steiner_points.round(12) + 0.0).tolist())

# unit square: two mirror-image minimizers of length 1 + sqrt(3)
sq = PointConfig([(0, 0), (1, 0), (1, 1), (0, 1)])
res = steiner_tree(sq)
print("square  ", res.length, "=", 1 + math.sqrt(3), f"({len(res.minimizers)} minimizers)")
for net in res.minimizers:
    print("   angles ok:", net.check_regularity() == [])

# regular hexagon of unit side: no Steiner point at all, the perimeter minus one side
H = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
res = steiner_tree(PointConfig(H))
print("hexagon ", res.length, f"({len(res.minimizers)} minimizers, {res.n_topologies} topologies tried)")

# the Steiner ratio bound: L >= sqrt(3)/2 * MST
rng = np.random.default_rng(1)
ratios = []
for _ in range(20):
    c = PointConfig(rng.uniform(-1, 1, (5, 2)))
    ratios.append(steiner_tree(c).length / minimum_spanning_length(c.points))
print(f"\nL/MST over 20 random 5-point sets: min {min(ratios):.4f} (bound {math.sqrt(3) / 2:.4f})")

svg = candidate_strip(PointConfig(H), [(f"#{k + 1}", n) for k, n in enumerate(res.minimizers)])
(out / "hexagon-minimizers.svg").write_text(svg)
print("wrote", out / "hexagon-minimizers.svg")
