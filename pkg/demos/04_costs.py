"""Fronthaul load and computational cost of the strategies across the preset scenarios."""
from radiostripe import metrics, scenario

rows = ("CMRC", "COSLP", "SMRC", "PMRC")
print("fronthaul symbols per coherence block")
print("scenario   " + "  ".join(f"{s:>6}" for s in rows))
for i in range(1, 5):
    cfg = scenario.preset(f"scenario{i}")
    g = cfg.geometry
    f = [metrics.fronthaul_symbols(s, g.n_ues, g.n_antennas, g.n_aps, cfg.radio.tau_c, cfg.radio.tau_p)
         for s in rows]
    print(f"scenario{i}  " + "  ".join(f"{x:6d}" for x in f))

print("\noperations per objective evaluation")
for i in range(1, 5):
    g = scenario.preset(f"scenario{i}").geometry
    K, L, N = g.n_ues, g.n_aps, g.n_antennas
    c = metrics.op_count_per_eval("CMRC", K, L, N)
    o = metrics.op_count_per_eval("COSLP", K, L, N)
    s1 = metrics.op_count_per_eval("SMRC", K, L, N, l=1, first_loop=True)
    s = metrics.op_count_per_eval("SMRC", K, L, N)
    print(f"scenario{i}  CMRC {c:8d}  COSLP {o:8d}  SMRC first AP {s1:7d}  SMRC later {s:8d}")

# total work over a run of the same length
ga = scenario.preset("scenario1").ga
for n_iter in (12, 100, 500):
    tot = {s: metrics.cumulative_op_count(s, 10, 12, 4, n_iter, ga.pop_size, ga.tournament_size) for s in rows}
    print(f"\n{n_iter} loops, scenario1: " + ", ".join(f"{s} {v:.2e}" for s, v in tot.items()))
