"""Regenerates sample_library.csv: smooth synthetic reflectance spectra.

Each material is a sloped continuum with a few Gaussian absorption bands.
The output is fixed by the seed below; the CSV in this directory is the
canonical copy used by tests.
"""
import numpy as np

NAMES = ["alunite", "buddingtonite", "calcite", "chalcedony", "jarosite",
         "kaolinite", "montmorillonite", "muscovite", "nontronite", "pyrope"]
BANDS = 188

rng = np.random.default_rng(20240611)
wl = np.linspace(400.0, 2500.0, BANDS)
t = (wl - 400.0) / 2100.0
cols = []
for _ in NAMES:
    base = rng.uniform(0.25, 0.6)
    slope = rng.uniform(-0.15, 0.25)
    curve = rng.uniform(-0.2, 0.2)
    r = base + slope * t + curve * t * (1 - t) * 4
    for _ in range(rng.integers(2, 5)):
        centre = rng.uniform(450.0, 2450.0)
        width = rng.uniform(30.0, 180.0)
        depth = rng.uniform(0.05, 0.3)
        r = r * (1 - depth * np.exp(-0.5 * ((wl - centre) / width) ** 2))
    cols.append(np.clip(r, 0.02, 0.95))
spectra = np.stack(cols, axis=1)

with open("sample_library.csv", "w") as f:
    f.write("wavelength," + ",".join(NAMES) + "\n")
    for b in range(BANDS):
        f.write(f"{wl[b]:.4f}," + ",".join(f"{v:.6f}" for v in spectra[b]) + "\n")
