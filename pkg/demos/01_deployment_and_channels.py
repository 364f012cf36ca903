"""Lay out a radio stripe, draw its channels and look at the MMSE estimates.

Run: python demos/01_deployment_and_channels.py [scenario] [seed]
"""
import sys

import numpy as np

from radiostripe import channel, scenario
from radiostripe.network import build_network

name = sys.argv[1] if len(sys.argv) > 1 else "scenario1"
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

cfg = scenario.preset(name, seed=seed)
net = build_network(cfg)
dep, real = net.deployment, net.realization

print(f"{name}: K={net.n_ues} UEs, L={dep.n_aps} APs x N={cfg.geometry.n_antennas} antennas, tau_p={real.tau_p}")
print(f"Fraunhofer distance {dep.fraunhofer_m:.3f} m, noise {10 * np.log10(real.noise_power):.1f} dBm")

print("\nAP positions (stripe order):")
for l, p in enumerate(dep.ap_positions):
    print(f"  AP{l + 1:2d}  ({p[0]:5.2f}, {p[1]:5.2f}, {p[2]:.0f})")

# strongest AP per UE and its gain
best = net.beta_db.argmax(axis=1)
print("\nUE  position            pilot  best AP  beta [dB]")
for k, p in enumerate(dep.ue_positions):
    print(f"{k + 1:2d}  ({p[0]:5.2f}, {p[1]:5.2f})   {real.pilots[k]:5d}  {best[k] + 1:7d}  {net.beta_db[k, best[k]]:8.1f}")

# the estimate carries most of the channel power on the strong links
tr = lambda M: np.trace(M, axis1=-2, axis2=-1).real  # noqa: E731
frac = 1 - tr(real.error_cov) / tr(real.R)
print(f"\nfraction of channel power captured by the estimate: "
      f"median {np.median(frac):.3f}, on best links {np.mean(frac[np.arange(net.n_ues), best]):.3f}")
shared = np.bincount(real.pilots).max()
print(f"largest pilot group: {shared} UEs")

# spatial correlation of a single link
R = real.R[0, best[0]]
eig = np.linalg.eigvalsh(R)[::-1]
print(f"UE1 best-link correlation eigenvalues (normalized): {np.round(eig / eig.sum(), 3)}")
print(f"check: db2pow(-86) = {channel.db2pow(-86):.3e} mW")
