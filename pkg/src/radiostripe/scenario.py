"""Scenario configuration: defaults, the four named presets, INI files, and
network-change instances (a UE joins or leaves).

Config files are INI with one section per group::

    [scenario]
    name = scenario1
    seed = 1

    [geometry]
    n_aps = 12
    ...

    [adaptation.0]
    kind = add
    ue_index = 10
    position = 6.67, 0.5, 1.0

Any missing key falls back to the defaults below. Units: metres, Hz, dB,
dB^2 for the shadowing variance, degrees for the angular spread, mW.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import geometry


class ConfigError(ValueError):
    """Invalid or unparsable scenario configuration; the message names the field."""


@dataclass(frozen=True)
class Geometry:
    side_m: float = 20.0
    n_aps: int = 12
    n_antennas: int = 4
    n_ues: int = 10
    ap_height_m: float = 6.0
    ue_height_m: float = 1.0
    antenna_spacing_wl: float = 0.5


@dataclass(frozen=True)
class Radio:
    carrier_hz: float = 2e9
    bandwidth_hz: float = 250e6
    noise_figure_db: float = 4.0
    shadow_variance_db2: float = 2.0
    shadow_ue_share: float = 0.7
    decorrelation_m: float = 9.0
    shadow_threshold_m: float = 13.0
    angular_std_deg: float = 7.5
    temperature_k: float = 290.0
    tau_c: int = 300
    tau_p: int = 8
    max_power_mw: float = 30.0


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 100
    tournament_size: int = 2
    max_generations: int = 1000
    max_stagnant: int = 100
    adapt_after: int = 5
    tolerance: float = 1e-5
    crossover_prob: float = 0.75
    mutation_prob: float = 0.01
    crossover_step: float = 0.1
    mutation_step: float = 0.01
    crossover_max: float = 1.0
    mutation_max: float = 0.1
    attempts: int = 10
    # fraction of ones in a randomly initialised individual
    init_density: float = 0.5
    # "bitwise": every gene flips with probability p_m; "single_gene": each
    # child flips one random gene with probability p_m
    mutation: str = "bitwise"
    # sequential objective in the first loop: sum of the SE at every prefix
    # 1..l instead of the SE at prefix l
    cumulative_first_loop: bool = False


MUTATIONS = ("bitwise", "single_gene")


@dataclass(frozen=True)
class Adaptation:
    """One network change; ``ue_index`` is 0-based in the network it applies to."""

    kind: str
    ue_index: int
    position: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "custom"
    seed: int = 0
    geometry: Geometry = field(default_factory=Geometry)
    radio: Radio = field(default_factory=Radio)
    ga: GaConfig = field(default_factory=GaConfig)
    adaptations: tuple[Adaptation, ...] = ()

    @property
    def base_n_ues(self) -> int:
        delta = sum(1 if a.kind == "add" else -1 for a in self.adaptations)
        return self.geometry.n_ues - delta

    def replace(self, **changes) -> ScenarioConfig:
        """Override fields; dotted keys reach into groups, e.g. ``{"ga.pop_size": 20}``."""
        top, groups = {}, {}
        for key, value in changes.items():
            if "." in key:
                group, name = key.split(".", 1)
                groups.setdefault(group, {})[name] = value
            else:
                top[key] = value
        for group, values in groups.items():
            if group not in ("geometry", "radio", "ga"):
                raise ConfigError(f"unknown config group {group!r}")
            try:
                top[group] = dataclasses.replace(getattr(self, group), **values)
            except TypeError as exc:
                raise ConfigError(f"{group}: {exc}") from None
        return validate(dataclasses.replace(self, **top))


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    g, r, ga = cfg.geometry, cfg.radio, cfg.ga

    def need(cond: bool, name: str, msg: str) -> None:
        if not cond:
            raise ConfigError(f"{name}: {msg}")

    need(g.side_m > 0, "geometry.side_m", "must be positive")
    need(g.n_aps >= 1, "geometry.n_aps", "must be >= 1")
    need(g.n_antennas >= 1, "geometry.n_antennas", "must be >= 1")
    need(g.n_ues >= 0, "geometry.n_ues", "must be >= 0")
    need(cfg.base_n_ues >= 0, "adaptations", "remove more UEs than exist")
    need(g.antenna_spacing_wl > 0, "geometry.antenna_spacing_wl", "must be positive")
    need(r.carrier_hz > 0, "radio.carrier_hz", "must be positive")
    need(r.bandwidth_hz > 0, "radio.bandwidth_hz", "must be positive")
    need(r.shadow_variance_db2 > 0, "radio.shadow_variance_db2", "must be positive")
    need(0.0 <= r.shadow_ue_share <= 1.0, "radio.shadow_ue_share", "must lie in [0, 1]")
    need(r.decorrelation_m > 0, "radio.decorrelation_m", "must be positive")
    need(r.angular_std_deg > 0, "radio.angular_std_deg", "must be positive")
    need(r.tau_p >= 1, "radio.tau_p", "must be >= 1")
    need(r.tau_p < r.tau_c, "radio.tau_p", f"must be < tau_c={r.tau_c}")
    need(r.max_power_mw > 0, "radio.max_power_mw", "must be positive")
    need(ga.pop_size >= 2, "ga.pop_size", "must be >= 2")
    need(1 <= ga.tournament_size <= ga.pop_size, "ga.tournament_size", "must lie in [1, pop_size]")
    need(ga.max_generations >= 1, "ga.max_generations", "must be >= 1")
    need(ga.max_stagnant >= 1, "ga.max_stagnant", "must be >= 1")
    need(ga.tolerance > 0, "ga.tolerance", "must be positive")
    need(ga.attempts >= 1, "ga.attempts", "must be >= 1")
    for name in ("crossover_prob", "mutation_prob", "crossover_step", "mutation_step",
                 "crossover_max", "mutation_max"):
        need(0.0 <= getattr(ga, name) <= 1.0, f"ga.{name}", "must lie in [0, 1]")
    need(0.0 <= ga.init_density <= 1.0, "ga.init_density", "must lie in [0, 1]")
    need(ga.mutation in MUTATIONS, "ga.mutation", f"must be one of {MUTATIONS}")
    for a in cfg.adaptations:
        need(a.kind in ("add", "remove"), "adaptation.kind", f"unknown kind {a.kind!r}")
    return cfg


# name -> (K, N, L, tau_p)
PRESETS = {
    "scenario1": (10, 4, 12, 8),
    "scenario2": (5, 2, 8, 4),
    "scenario3": (5, 4, 12, 4),
    "scenario4": (10, 2, 8, 8),
}

# coordinates of the UE that joins / leaves in each preset's adaptability study
PAPER_ADDED_UE = {
    "scenario1": (6.67, 0.5, 1.0),
    "scenario2": (13.2, 19.5, 1.0),
    "scenario3": (9.55, 11.8, 1.0),
    "scenario4": (8.15, 15.8, 1.0),
}
PAPER_REMOVED_UE = {
    "scenario1": (5.14, 19.4, 1.0),
    "scenario2": (14.3, 12.5, 1.0),
    "scenario3": (19.5, 17.6, 1.0),
    "scenario4": (16.6, 15.0, 1.0),
}


def pilot_count(n_ues: int) -> int:
    """Pilot budget paired with the UE count: 4 for small networks, 8 otherwise."""
    return min(n_ues, 4) if n_ues <= 5 else 8


def preset(name: str, seed: int = 0) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"scenario: unknown preset {name!r}; choose from {sorted(PRESETS)}")
    K, N, L, tau_p = PRESETS[name]
    return validate(ScenarioConfig(
        name=name,
        seed=seed,
        geometry=Geometry(n_aps=L, n_antennas=N, n_ues=K),
        radio=Radio(tau_p=tau_p),
    ))


def _coerce(value: str, typ, name: str):
    try:
        if typ in (bool, "bool"):
            low = value.strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(value)
            return low in ("1", "true", "yes", "on")
        if typ in (int, "int"):
            return int(float(value)) if "e" in value.lower() else int(value)
        if typ in (float, "float"):
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {value!r} as {getattr(typ, '__name__', typ)}") from None


def _section_to(cls, section, prefix: str):
    kwargs = {}
    known = {f.name: f for f in fields(cls)}
    for key, raw in section.items():
        if key not in known:
            raise ConfigError(f"{prefix}.{key}: unknown field")
        kwargs[key] = _coerce(raw, known[key].type, f"{prefix}.{key}")
    return cls(**kwargs)


def loads(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    head = parser["scenario"] if parser.has_section("scenario") else {}
    base = None
    if "preset" in head:
        base = preset(head["preset"])
    name = head.get("name", base.name if base else "custom")
    seed = _coerce(head.get("seed", "0"), int, "scenario.seed")
    geo = _merge(base.geometry if base else Geometry(), parser, "geometry")
    rad = _merge(base.radio if base else Radio(), parser, "radio")
    ga = _merge(GaConfig(), parser, "ga")
    adaptations = []
    for sec in sorted((s for s in parser.sections() if s.startswith("adaptation")),
                      key=lambda s: int(s.split(".")[1]) if "." in s else 0):
        sd = parser[sec]
        pos = sd.get("position")
        adaptations.append(Adaptation(
            kind=sd.get("kind", ""),
            ue_index=_coerce(sd.get("ue_index", "0"), int, f"{sec}.ue_index"),
            position=tuple(_coerce(x, float, f"{sec}.position") for x in pos.split(",")) if pos else None,
        ))
    return validate(ScenarioConfig(name, seed, geo, rad, ga, tuple(adaptations)))


def _merge(default, parser, section: str):
    if not parser.has_section(section):
        return default
    override = _section_to(type(default), parser[section], section)
    explicit = {k: getattr(override, k) for k in parser[section]}
    return dataclasses.replace(default, **explicit)


def _format(value) -> str:
    return value if isinstance(value, str) else repr(value)


def dumps(cfg: ScenarioConfig) -> str:
    parser = configparser.ConfigParser()
    parser["scenario"] = {"name": cfg.name, "seed": str(cfg.seed)}
    for group in ("geometry", "radio", "ga"):
        obj = getattr(cfg, group)
        parser[group] = {f.name: _format(getattr(obj, f.name)) for f in fields(obj)}
    for i, a in enumerate(cfg.adaptations):
        sec = {"kind": a.kind, "ue_index": str(a.ue_index)}
        if a.position is not None:
            sec["position"] = ", ".join(repr(float(x)) for x in a.position)
        parser[f"adaptation.{i}"] = sec
    from io import StringIO

    buf = StringIO()
    parser.write(buf)
    return buf.getvalue()


def load_config(source: str | Path, seed: int | None = None) -> ScenarioConfig:
    """Load a preset by name or an INI file by path."""
    if str(source) in PRESETS:
        cfg = preset(str(source))
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"scenario: no preset or file named {str(source)!r}")
        cfg = loads(path.read_text())
    return cfg if seed is None else cfg.replace(seed=seed)


def save_config(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg))


def instance_transform(cfg: ScenarioConfig, kind: str, rng: np.random.Generator,
                       paper_fidelity: bool = False, ue_positions: np.ndarray | None = None):
    """Add or remove one UE; returns ``(new_config, record)``.

    ``ue_positions`` are the current UE positions (needed only to pick the
    UE nearest to the reference coordinates when removing with
    ``paper_fidelity``). The record is the :class:`Adaptation` appended to
    the config; its ``ue_index`` is where the warm-start matrix gains or
    loses a row.
    """
    g = cfg.geometry
    K = g.n_ues
    if kind == "add":
        if paper_fidelity:
            pos = PAPER_ADDED_UE.get(cfg.name)
            if pos is None:
                raise ConfigError(f"adaptation: no reference position for {cfg.name!r}")
        else:
            aps, _ = geometry.place_aps(g.n_aps, g.side_m, g.ap_height_m)
            d_fd = geometry.fraunhofer_distance(g.n_antennas, cfg.radio.carrier_hz)
            pos = tuple(float(x) for x in geometry.draw_far_field_position(
                g.side_m, g.ue_height_m, aps, d_fd, rng))
        record = Adaptation("add", K, tuple(pos))
        new_k = K + 1
    elif kind == "remove":
        if K < 1:
            raise ConfigError("adaptation: cannot remove a UE from an empty network")
        if paper_fidelity:
            target = PAPER_REMOVED_UE.get(cfg.name)
            if target is None or ue_positions is None:
                raise ConfigError(f"adaptation: no reference position for {cfg.name!r}")
            idx = int(np.argmin(np.linalg.norm(np.asarray(ue_positions) - np.asarray(target), axis=1)))
        else:
            idx = int(rng.integers(K))
        pos = None if ue_positions is None else tuple(float(x) for x in ue_positions[idx])
        record = Adaptation("remove", idx, pos)
        new_k = K - 1
    else:
        raise ConfigError(f"adaptation.kind: unknown kind {kind!r}")
    new_cfg = dataclasses.replace(
        cfg,
        geometry=dataclasses.replace(g, n_ues=new_k),
        adaptations=cfg.adaptations + (record,),
    )
    return validate(new_cfg), record
