"""A UE joins the network: re-optimize from scratch or start from the old association.

The old matrix gets a zero row for the newcomer and is planted in the
initial population.
"""
from radiostripe import scenario
from radiostripe.experiment import loops_to_fraction, run_adaptability

cfg = scenario.preset("scenario4", seed=0).replace(**{"ga.pop_size": 40, "ga.max_stagnant": 40})
study = run_adaptability(cfg, "add", ["SMRC", "PMRC"], attempts=3)
rec = study.record
print(f"new UE {rec.ue_index + 1} at ({rec.position[0]:.2f}, {rec.position[1]:.2f})\n")

print("strategy  start  final SE  loops to 95%  loops to converge")
for s in ("SMRC", "PMRC"):
    for label, run in (("warm", study.warm), ("cold", study.cold)):
        r = run[s]
        print(f"{s:8s}  {label:5s}  {r.final_mean:8.2f}  {loops_to_fraction(r.mean):12d}  {r.loops_to_convergence:17d}")
