"""
A calibration certificate for the regular pentagon
==================================================

Steiner trees become perimeter minimizers on an m-sheeted covering of the
plane.  A divergence-free field whose sheet differences stay below 2 and
which saturates on the interfaces of a set E proves that E is minimal.
"""

from pathlib import Path

from steiner_cover.calib import builtin, check_size
from steiner_cover.scene import fixture_scene, write_svg
from steiner_cover.sheets import check_constraints, interfaces, network_to_sheeted_set, perimeter
from steiner_cover.steiner import steiner_tree

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

fx = builtin("pentagon(5)")
config, cov = fx.config, fx.cov
print("terminals\n", config.points.round(6))

# the covering: cuts Sigma_i join consecutive terminals, crossing Sigma_i shifts the sheet by i
print("\nregion shifts", cov.shift_table)

# every minimizer of the Steiner problem lifts to a constrained set with P(E) = 2 L
res = steiner_tree(config)
print(f"\n{len(res.minimizers)} minimizers of length {res.length:.12f}")
E = network_to_sheeted_set(fx.network, cov)
print("constraints:", "ok" if check_constraints(E).ok else check_constraints(E))
print(f"P(E) = {perimeter(E):.12f}")
for I in interfaces(E):
    print(f"   sheets {I.pair}: length {I.length:.6f}")

# the printed field: constants on the hull, carried outward along the edge normals
rep = fx.verify()
print("\n" + str(rep))

# without the family restriction the pairs (2,4), (2,5), (3,5) are too large,
# so the certificate says nothing about competitors outside the family
rep = fx.verify(J=())
print("\nno family:", rep.conclusion())

# the field only matters up to a constant: translations change nothing
same = check_size(fx.field.translated((3.0, -1.0)), fx.J, cov) == check_size(fx.field, fx.J, cov)
print("translated table identical:", same)

write_svg(fixture_scene(fx), out / "pentagon-sheets.svg")
print("wrote", out / "pentagon-sheets.svg")
