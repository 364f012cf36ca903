import numpy as np
import pytest

from radiostripe import scenario
from radiostripe.network import build_network
from radiostripe.scenario import ConfigError


@pytest.mark.parametrize("name, dims", [
    ("scenario1", (10, 4, 12, 8)),
    ("scenario2", (5, 2, 8, 4)),
    ("scenario3", (5, 4, 12, 4)),
    ("scenario4", (10, 2, 8, 8)),
])
def test_presets(name, dims):
    cfg = scenario.preset(name)
    g = cfg.geometry
    assert (g.n_ues, g.n_antennas, g.n_aps, cfg.radio.tau_p) == dims
    assert cfg.radio.tau_p == scenario.pilot_count(g.n_ues)
    assert (g.side_m, g.ap_height_m, g.ue_height_m) == (20, 6, 1)
    assert (cfg.radio.carrier_hz, cfg.radio.bandwidth_hz, cfg.radio.tau_c, cfg.radio.max_power_mw) == (
        2e9, 250e6, 300, 30)
    ga = cfg.ga
    assert (ga.pop_size, ga.tournament_size, ga.max_generations, ga.max_stagnant, ga.adapt_after) == (
        100, 2, 1000, 100, 5)
    assert (ga.crossover_prob, ga.mutation_prob, ga.crossover_max, ga.mutation_max) == (0.75, 0.01, 1.0, 0.1)
    assert ga.attempts == 10


def test_unknown_preset():
    with pytest.raises(ConfigError, match="scenario"):
        scenario.preset("scenario9")
    with pytest.raises(ConfigError):
        scenario.load_config("no/such/file.ini")


def test_tau_p_not_below_tau_c_rejected(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\npreset = scenario2\n[radio]\ntau_p = 300\n")
    with pytest.raises(ConfigError, match="radio.tau_p"):
        scenario.load_config(path)


@pytest.mark.parametrize("text, field", [
    ("[ga]\npop_size = 1\n", "ga.pop_size"),
    ("[ga]\nmutation_prob = 1.5\n", "ga.mutation_prob"),
    ("[ga]\nmutation = sometimes\n", "ga.mutation"),
    ("[radio]\nbogus = 3\n", "radio.bogus"),
    ("[geometry]\nn_aps = many\n", "geometry.n_aps"),
    ("[radio\n", "parse error"),
])
def test_validation_names_field(text, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        scenario.loads(text)


def test_roundtrip(tmp_path):
    cfg = scenario.preset("scenario3", seed=9).replace(**{"ga.pop_size": 40, "ga.init_density": 0.25})
    cfg, _ = scenario.instance_transform(cfg, "add", np.random.default_rng(0))
    path = tmp_path / "cfg.ini"
    scenario.save_config(cfg, path)
    assert scenario.load_config(path) == cfg
    assert scenario.loads(scenario.dumps(cfg)) == cfg


def test_file_overrides_preset(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[scenario]\npreset = scenario4\nseed = 3\n[ga]\npop_size = 12\ncumulative_first_loop = yes\n")
    cfg = scenario.load_config(path)
    assert cfg.geometry.n_ues == 10 and cfg.ga.pop_size == 12 and cfg.ga.cumulative_first_loop
    assert cfg.seed == 3 and scenario.load_config(path, seed=5).seed == 5


def test_paper_fidelity_add():
    cfg = scenario.preset("scenario1")
    new, rec = scenario.instance_transform(cfg, "add", np.random.default_rng(0), paper_fidelity=True)
    assert rec.position == (6.67, 0.5, 1.0)
    assert rec.ue_index == 10 and new.geometry.n_ues == 11


def test_paper_fidelity_remove_picks_nearest_ue():
    cfg = scenario.preset("scenario3", seed=4)
    ues = build_network(cfg).deployment.ue_positions
    new, rec = scenario.instance_transform(cfg, "remove", np.random.default_rng(0), True, ues)
    d = np.linalg.norm(ues - np.array([19.5, 17.6, 1.0]), axis=1)
    assert rec.ue_index == int(np.argmin(d))
    assert new.geometry.n_ues == 4


def test_random_add_is_far_field():
    cfg = scenario.preset("scenario1")
    _, rec = scenario.instance_transform(cfg, "add", np.random.default_rng(3))
    net = build_network(scenario.instance_transform(cfg, "add", np.random.default_rng(3))[0])
    assert np.allclose(net.deployment.ue_positions[-1], rec.position)
    assert net.deployment.ue_ap_distances.min() >= net.deployment.fraunhofer_m


def test_remove_from_empty_rejected():
    cfg = scenario.preset("scenario2").replace(**{"geometry.n_ues": 0})
    with pytest.raises(ConfigError):
        scenario.instance_transform(cfg, "remove", np.random.default_rng(0))
    with pytest.raises(ConfigError):
        scenario.instance_transform(cfg, "move", np.random.default_rng(0))


def test_replace_rejects_unknown():
    with pytest.raises(ConfigError):
        scenario.preset("scenario1").replace(**{"ga.bogus": 1})
    with pytest.raises(ConfigError):
        scenario.preset("scenario1").replace(**{"nope.x": 1})
