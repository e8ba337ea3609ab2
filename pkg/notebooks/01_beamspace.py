# %% [markdown]
# # Beamspace view of a two-ended channel
#
# A half-wavelength ULA at each end, a DFT codebook per array, and the
# effective channel seen after both ends beamform with their codebooks.

# %%
import math

import numpy as np

from beampredict.beamspace import (ArrayConfig, angle_to_bin, assemble_channel, dft_codebook,
                                   effective_channel)
from beampredict.scene import PathRecord

bs = ArrayConfig.half_wavelength(32)
ms = ArrayConfig.half_wavelength(8)
w_bs, w_ms = dft_codebook(bs), dft_codebook(ms)
print("codebook unitarity error:", np.abs(w_bs.columns.conj().T @ w_bs.columns - np.eye(32)).max())

# %% [markdown]
# A path whose sines land exactly on codebook bins lights up a single entry.

# %%
on_grid = PathRecord(rss_db=-80.0, delay_s=1e-7, aoa_rad=math.asin(2 * 5 / 32),
                     aod_rad=math.asin(2 * 2 / 8), reflections=0)
h = assemble_channel([on_grid], bs, ms, frequency=0.0)
e = effective_channel(h, w_bs, w_ms)
print("entries above 1e-9:", np.argwhere(np.abs(e) > 1e-9).tolist())
print("bins from angle_to_bin:", angle_to_bin(32, on_grid.aoa_rad), angle_to_bin(8, on_grid.aod_rad))

# %% [markdown]
# Off-grid angles leak into neighbouring bins, but the energy is conserved.

# %%
off_grid = PathRecord(-80.0, 1e-7, 0.23, -0.4, 0)
h = assemble_channel([on_grid, off_grid], bs, ms, frequency=28e9)
e = effective_channel(h, w_bs, w_ms)
print("Frobenius norms:", np.linalg.norm(h.matrix), np.linalg.norm(e))
mag = np.abs(e) / np.abs(e).max()
for k in np.argsort(mag, axis=None)[::-1][:5]:
    print(np.unravel_index(k, mag.shape), round(float(mag.flat[k]), 4))
