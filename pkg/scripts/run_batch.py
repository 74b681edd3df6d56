"""Launch the 20-instance benchmark batch (cache-backed, hours of CPU)."""

import json

from kponet.experiments import BATCH_PARAMS, run_batch

if __name__ == "__main__":
    out = run_batch(n_instances=20, params=BATCH_PARAMS, method="split",
                    progress=True)
    print(json.dumps(out["aggregates"], indent=1))
    for row in out["rows"]:
        print(row)
    if out["failures"]:
        print("FAILURES:", out["failures"])
