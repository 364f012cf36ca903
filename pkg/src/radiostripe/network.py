"""Build a deployment plus one channel realization from a scenario config.

The raw random draws (UE shadow field, AP shadow field, small-scale
innovations, pilot noise) are kept so that a UE can be added or removed
while every other UE keeps its position and its random draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel, geometry
from .channel import ChannelRealization
from .geometry import Deployment
from .scenario import Adaptation, ScenarioConfig

# independent random streams derived from the scenario seed
STREAM_UES, STREAM_SHADOW, STREAM_FADING, STREAM_PILOT_NOISE, STREAM_TRANSFORM = range(5)
STREAM_ADDED_UE = 5


def stream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([seed, *keys])


@dataclass
class Network:
    config: ScenarioConfig
    deployment: Deployment
    ue_shadow: np.ndarray
    ap_shadow: np.ndarray
    innovations: np.ndarray
    pilot_noise: np.ndarray
    pilots: np.ndarray
    beta_db: np.ndarray
    realization: ChannelRealization

    @property
    def n_ues(self) -> int:
        return self.deployment.n_ues


def noise_power_mw(cfg: ScenarioConfig) -> float:
    r = cfg.radio
    return float(channel.db2pow(channel.noise_power_dbm(r.bandwidth_hz, r.noise_figure_db, r.temperature_k)))


def _assemble(cfg, deployment, ue_shadow, ap_shadow, innovations, pilot_noise, pilots) -> Network:
    g, r = cfg.geometry, cfg.radio
    F = channel.combine_shadowing(ue_shadow, ap_shadow, r.shadow_ue_share)
    beta_db = channel.large_scale_fading_db(
        deployment.ue_ap_distances, r.carrier_hz / 1e9, F, r.shadow_threshold_m
    ) if deployment.n_ues else np.zeros((0, deployment.n_aps))
    R = channel.correlation_matrices(
        channel.db2pow(beta_db), deployment.angles(), np.deg2rad(r.angular_std_deg),
        g.n_antennas, g.antenna_spacing_wl,
    )
    h = np.einsum("klab,klb->kla", channel.psd_sqrt(R), innovations)
    powers = np.full(deployment.n_ues, r.max_power_mw)
    real = channel.mmse_estimate(R, h, pilots, powers, r.tau_p, noise_power_mw(cfg), r.tau_c,
                                 pilot_noise=pilot_noise)
    return Network(cfg, deployment, ue_shadow, ap_shadow, innovations, pilot_noise, pilots, beta_db, real)


def build_base_network(cfg: ScenarioConfig) -> Network:
    """The network before any adaptation is applied."""
    g, r = cfg.geometry, cfg.radio
    K = cfg.base_n_ues
    dep = geometry.make_deployment(g.n_aps, K, g.n_antennas, g.side_m, g.ap_height_m, g.ue_height_m,
                                   r.carrier_hz, stream(cfg.seed, STREAM_UES))
    a, b = channel.shadowing_components(dep.ue_positions, dep.ap_positions, r.shadow_variance_db2,
                                        r.decorrelation_m, stream(cfg.seed, STREAM_SHADOW))
    g_ = channel.complex_normal(stream(cfg.seed, STREAM_FADING), (K, g.n_aps, g.n_antennas))
    noise = channel.complex_normal(stream(cfg.seed, STREAM_PILOT_NOISE), (r.tau_p, g.n_aps, g.n_antennas),
                                   noise_power_mw(cfg))
    pilots = channel.assign_pilots(K, r.tau_p)
    return _assemble(cfg, dep, a, b, g_, noise, pilots)


def apply_adaptation(net: Network, adaptation: Adaptation, cfg: ScenarioConfig, step: int = 0) -> Network:
    """Add or remove one UE, keeping all other draws."""
    r = cfg.radio
    dep = net.deployment
    if adaptation.kind == "add":
        pos = np.asarray(adaptation.position, dtype=float)
        rng = stream(cfg.seed, STREAM_ADDED_UE, step)
        a_new = channel.conditional_ue_shadow(dep.ue_positions, net.ue_shadow, pos,
                                              r.shadow_variance_db2, r.decorrelation_m, rng)
        g_new = channel.complex_normal(rng, (1,) + net.innovations.shape[1:])
        idx = adaptation.ue_index
        ues = np.insert(dep.ue_positions, idx, pos, axis=0)
        ue_shadow = np.insert(net.ue_shadow, idx, a_new)
        innovations = np.concatenate([net.innovations[:idx], g_new, net.innovations[idx:]])
        pilots = np.insert(net.pilots, idx, idx % r.tau_p)
    else:
        idx = adaptation.ue_index
        ues = np.delete(dep.ue_positions, idx, axis=0)
        ue_shadow = np.delete(net.ue_shadow, idx)
        innovations = np.delete(net.innovations, idx, axis=0)
        pilots = np.delete(net.pilots, idx)
    return _assemble(cfg, dep.with_ues(ues), ue_shadow, net.ap_shadow, innovations, net.pilot_noise, pilots)


def build_network(cfg: ScenarioConfig) -> Network:
    net = build_base_network(cfg)
    for step, adaptation in enumerate(cfg.adaptations):
        net = apply_adaptation(net, adaptation, cfg, step)
    net.config = cfg
    return net
