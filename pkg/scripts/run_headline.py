"""Launch the two full-cutoff uniform-antiferromagnet runs (cache-backed).

Single-core wall time is a couple of hours per run; progress goes to
stderr.  Results land in the artifact cache and are what the acceptance
suite consumes.
"""

import numpy as np

from kponet.experiments import PRODUCTION_PARAMS, run_uniform_af

if __name__ == "__main__":
    records = run_uniform_af(
        params=PRODUCTION_PARAMS,
        method="split",
        save_final_state=True,
        progress=True,
    )
    for label, rec in records.items():
        print(f"{label}: key={rec.key} P_s={rec.success:.4f} "
              f"E_res={rec.residual:.4f} drift={rec.norm_drift:.2e}")
        print(f"  n={np.round(rec.mean_photons, 3)}")
        print(f"  dist={ {k: round(v, 4) for k, v in rec.distribution.items()} }")
