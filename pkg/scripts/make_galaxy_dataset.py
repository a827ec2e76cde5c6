"""Generate the bundled synthetic galaxy-scaling dataset.

Produces src/eivgibbs/data/galaxy.csv: 46 objects with a log velocity
dispersion predictor (x.1), a log black-hole-mass-like response (y.1),
an intercept column (z.1), and per-object measurement variances for
both (xvar, yvar). The values are synthetic draws at realistic scales,
not real observations; they exist so the full univariate
classical-error pipeline can run end to end out of the box.

Run from the repository root:

    python3 scripts/make_galaxy_dataset.py
"""

from pathlib import Path

import numpy as np

from eivgibbs.io import write_dataset_csv

N = 46
SEED = 20260826

rng = np.random.default_rng(SEED)

# true predictor values: log10 velocity dispersion, centered near 2.3 dex
a_true = rng.normal(2.30, 0.22, size=N)
# linear relation with intrinsic scatter, log10 black-hole-mass scale
y_true = 8.10 + 4.0 * (a_true - 2.30) + rng.normal(0.0, 0.30, size=N)

# heteroscedastic measurement error standard deviations
x_sd = rng.uniform(0.02, 0.06, size=N)
y_sd = rng.uniform(0.10, 0.40, size=N)

x_obs = a_true + rng.normal(0.0, 1.0, size=N) * x_sd
y_obs = y_true + rng.normal(0.0, 1.0, size=N) * y_sd

out = Path(__file__).resolve().parents[1] / "src" / "eivgibbs" / "data" / "galaxy.csv"
out.parent.mkdir(parents=True, exist_ok=True)
write_dataset_csv(
    out,
    Y=y_obs[:, None],
    X=x_obs[:, None],
    Z=np.ones((N, 1)),
    xvar=(x_sd**2)[:, None],
    yvar=(y_sd**2)[:, None],
    provenance={
        "synthetic": True,
        "generator": "scripts/make_galaxy_dataset.py",
        "seed": SEED,
        "note": "synthetic stand-in at realistic scales, not real observations",
    },
)
print(f"wrote {out}")
