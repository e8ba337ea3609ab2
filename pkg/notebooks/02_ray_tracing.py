# %% [markdown]
# # Ray tracing the desk-scale street grid
#
# The default scene has one BS at the south edge, twenty rectangular
# buildings and a 30 x 40 user grid. Paths come from the image method with
# up to two reflections.

# %%
from collections import Counter

import numpy as np

from beampredict.scene import default_scene, generate_dataset, trace_paths

scene = default_scene()
print(len(scene.buildings), "buildings,", len(scene.user_spots()), "user spots")

# %%
samples = generate_dataset(scene, seed=0)
n_paths = np.array([len(s.paths) for s in samples])
print("links:", len(samples), " paths per link: mean", n_paths.mean().round(2), "max", n_paths.max())
print("reflection orders:", sorted(Counter(p.reflections for s in samples for p in s.paths).items()))

# %% [markdown]
# One link in detail: the strongest path is usually the line of sight, and
# each reflection costs a fixed loss on top of the longer free-space run.

# %%
user = samples[len(samples) // 2].user_position
for p in trace_paths(scene, scene.bs_sites[0], user):
    print(f"order {p.reflections}  delay {p.delay_s * 1e9:7.1f} ns  rss {p.rss_db:7.1f} dB  "
          f"aoa {np.degrees(p.aoa_rad):6.1f}  aod {np.degrees(p.aod_rad):6.1f}")
