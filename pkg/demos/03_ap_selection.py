"""Genetic AP selection with the four strategies on one small deployment.

Prints final sum SE and how many RA loops each strategy needed. A lighter GA
than the default keeps the run to a few seconds.
"""
import sys

from radiostripe import scenario
from radiostripe.experiment import run_experiment
from radiostripe.optimizer import STRATEGIES

name = sys.argv[1] if len(sys.argv) > 1 else "scenario2"
cfg = scenario.preset(name, seed=0).replace(**{"ga.pop_size": 40, "ga.max_stagnant": 40})
res = run_experiment(cfg, STRATEGIES, attempts=3)

print(f"{name}, {cfg.ga.pop_size} individuals, 3 attempts each\n")
print("strategy  final SE  best   worst  loops  links on")
for s in STRATEGIES:
    r = res[s]
    print(f"{s:8s}  {r.final_mean:8.2f}  {r.best[-1]:5.2f}  {r.worst[-1]:5.2f}  {r.loops_to_convergence:5d}  "
          f"{r.final_D.mean():7.0%}")

print("\nCMRC association of the best attempt (rows UEs, columns antennas):")
print(res["CMRC"].final_D.astype(int))
