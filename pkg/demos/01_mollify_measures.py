"""Mollifying point measures into smooth initial data.

Builds a two-atom measure, smooths it with Gaussian kernels of shrinking
width, and watches the vague distance to the original measure fall while the
discrete mass stays exactly fixed.
"""

import numpy as np

from kslab import RadonMeasure, TestDictionary, build_grid, integrate, mollify, vague_distance

grid = build_grid(2, [1.0, 1.0], [128, 128])
measure = RadonMeasure(
    atoms=[(np.array([0.3, 0.5]), 1.0), (np.array([0.75, 0.6]), 2.0)]
)
dictionary = TestDictionary(grid.lengths, order=4)

print(f"measure: {len(measure.atoms)} atoms, total mass {measure.mass:g}")
print(f"{'eps':>8} {'mass':>20} {'peak':>10} {'vague distance':>15}")
for eps in (0.16, 0.08, 0.04, 0.02, 0.01):
    u0 = mollify(measure, eps, grid)
    print(
        f"{eps:8.3f} {integrate(u0):20.15f} {u0.values.max():10.2f} "
        f"{vague_distance(u0, measure, dictionary):15.6f}"
    )

print("\nmass is renormalized per atom, so it matches the measure to roundoff;")
print("the vague distance decays as the kernels sharpen onto the atoms.")
