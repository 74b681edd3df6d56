"""Cutoff- and duration-sensitivity pilot for the benchmark batch.

One seeded instance, both correction settings, at Fock cutoffs 9/10/11
(fixed duration) plus a shorter-ramp variant at the batch cutoff.  If the
success probabilities agree across cutoffs to well below the acceptance
margins, the reduced-cutoff BATCH_PARAMS profile is justified; printed
deltas go into the decisions ledger before the full batch is launched.
"""

import dataclasses

from kponet.experiments import (
    BATCH_PARAMS,
    DEFAULT_BATCH_SETTINGS,
    gen_random_instance,
    run_once,
)

SEED = 2024
VARIANTS = (
    ("d9", dataclasses.replace(BATCH_PARAMS, levels=9)),
    ("d10", BATCH_PARAMS),
    ("d11", dataclasses.replace(BATCH_PARAMS, levels=11)),
    ("d10-T300", dataclasses.replace(BATCH_PARAMS, duration=300.0)),
)

if __name__ == "__main__":
    inst = gen_random_instance(4, SEED)
    for label, corr, c_val, xi in DEFAULT_BATCH_SETTINGS:
        for tag, base in VARIANTS:
            p = dataclasses.replace(
                base, correction=corr, four_body=c_val, coupling=xi
            )
            rec = run_once(inst, p, method="split")
            print(f"seed {SEED} {label:12s} {tag:9s} P_s={rec.success:.4f} "
                  f"drift={rec.norm_drift:.1e} top={rec.max_top_level:.1e} "
                  f"wall={rec.meta.get('wall_time_s', 0):.0f}s", flush=True)
