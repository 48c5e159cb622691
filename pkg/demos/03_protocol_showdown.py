"""Small-scale Monte-Carlo comparison of the decoupling protocols.

Runs every protocol on an N=4 chain with the collective group and
prints the ensemble-averaged entanglement fidelity on a common grid.
Stochastic protocols average 50 realizations; deterministic ones are
exact single traces.  Takes a few seconds.
"""

import numpy as np

from ddchain import ChainSpec, EnsembleTask, run_ensemble
from ddchain.schedules import DETERMINISTIC, ProtocolConfig

N, delta_t, horizon, R, seed = 4, 0.05, 20.0, 50, 4242
n_steps = int(horizon / delta_t)
chain = ChainSpec(N, coupling=1.0, anisotropy=1.0)

protocols = [
    ProtocolConfig("FREE"),
    ProtocolConfig("PDD"),
    ProtocolConfig("SDD"),
    ProtocolConfig("CDD", cdd_level=4),
    ProtocolConfig("NRD", seed=seed),
    ProtocolConfig("pRPD", seed=seed),
    ProtocolConfig("SRPD", seed=seed),
    ProtocolConfig("EMD-G", seed=seed),
    ProtocolConfig("HYBRID", seed=seed, hybrid_switch_level=3),
]

results = {}
for pcfg in protocols:
    task = EnsembleTask(
        chain=chain, protocol=pcfg, delta_t=delta_t, n_steps=n_steps,
        sample_steps=tuple(range(0, n_steps + 1, 40)),
        realizations=1 if pcfg.protocol in DETERMINISTIC else R,
        root_seed=seed, group="collective",
    )
    results[pcfg.protocol] = run_ensemble(task)
    print(f"ran {pcfg.protocol}")

names = list(results)
times = results["FREE"].times
print("\n  t    " + "  ".join(f"{n:>6s}" for n in names))
for i, t in enumerate(times):
    row = "  ".join(f"{results[n].mean[i]:6.3f}" for n in names)
    print(f"{t:5.1f}  {row}")

print("\nDeterministic protocols shine early; the randomized ones decay")
print("linearly instead of quadratically and win at long times.  The")
print("hybrid follows CDD until 64 slots, then rides SRPD.")
