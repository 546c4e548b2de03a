"""
Heat maps from the built-in detectors
=====================================

The two geometric detectors score every vertex in [0, 1]; thresholding
a heat map turns the hot region into a face selection.
"""

import numpy as np

from meshmark import heatmap_to_selection, procgen, saliency_map, defect_map

# A sphere with sinusoidal bumps has localized curvature features; the
# saliency detector scores vertices by how much their smoothed
# curvature stands out across scales.
bumpy = procgen.bumpy_sphere(subdivisions=3)
sal = saliency_map(bumpy)
print(f"saliency on {bumpy.name}: min {sal.values.min():.3f} "
      f"mean {sal.values.mean():.3f} max {sal.values.max():.3f}")

# The defect detector reacts to normal disagreement inside one-ring
# neighborhoods, a cheap roughness proxy.
dfc = defect_map(bumpy)
print(f"defect   on {bumpy.name}: min {dfc.values.min():.3f} "
      f"mean {dfc.values.mean():.3f} max {dfc.values.max():.3f}")

# Thresholding keeps the faces whose mean vertex score clears the bar.
# Lower thresholds always select supersets of higher ones.
for threshold in (0.8, 0.5, 0.2):
    picked = heatmap_to_selection(bumpy, sal, threshold)
    print(f"saliency >= {threshold}: {len(picked.faces)} of {bumpy.face_count} faces")

# Featureless geometry maps to all-zero: a flat grid has no curvature
# to stand out and no normal disagreement.
flat = procgen.plane_grid(16, 16)
assert not saliency_map(flat).values.any()
assert not defect_map(flat).values.any()
print(f"flat {flat.face_count}-face grid: both detectors all zero")

# Heat maps are plain per-vertex arrays, so they compose with numpy:
# here, the fraction of the sphere's area covered by the hottest faces.
from meshmark.mesh import face_areas

areas = face_areas(bumpy)
hot = np.asarray(sorted(heatmap_to_selection(bumpy, sal, 0.8).faces), dtype=np.int64)
share = areas[hot].sum() / areas.sum() if hot.size else 0.0
print(f"faces scoring >= 0.8 cover {100 * share:.1f}% of the surface area")
