import json
import os

import pytest

from qentropy.config.sim_args import SimulationArgs, SweepConfig
from qentropy.config.utils import ConfigurationError, load_flat_config, sweep_config_to_sweep_values


def test_update_from_dict():
    args = SimulationArgs()
    args.update_from_dict({"boost_rounds": 9, "exact_qae": True})
    assert args.boost_rounds == 9
    assert args.exact_qae is True


def test_update_from_dict_rejects_non_dict():
    with pytest.raises(TypeError):
        SimulationArgs().update_from_dict([("boost_rounds", 9)])


def test_save_and_load(tmp_path):
    args = SimulationArgs()
    args.update_from_dict({"cost_constant": 2.5, "not_saved_args": ["process_count"]})
    args.save(str(tmp_path))

    with open(os.path.join(str(tmp_path), "sim_args.json")) as f:
        saved = json.load(f)
    assert "process_count" not in saved

    loaded = SimulationArgs()
    loaded.load(str(tmp_path))
    assert loaded.cost_constant == 2.5


def test_load_flat_config(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(
        "# acceptance cell\n"
        "families = uniform, zipf\n"
        "n_values=8,64\n"
        "eps-values = 0.5,0.25  # two accuracies\n"
        "exact_qae = true\n"
        "trials = 5\n"
        "manual_seed = none\n"
    )
    values = load_flat_config(str(path), SweepConfig)
    assert values == {
        "families": ["uniform", "zipf"],
        "n_values": [8, 64],
        "eps_values": [0.5, 0.25],
        "exact_qae": True,
        "trials": 5,
        "manual_seed": None,
    }


@pytest.mark.parametrize(
    "line",
    ["unknown_key = 3", "trials = many", "exact_qae = maybe", "wandb_kwargs = x", "no equals sign"],
)
def test_load_flat_config_errors(tmp_path, line):
    path = tmp_path / "bad.cfg"
    path.write_text(line + "\n")
    with pytest.raises(ConfigurationError):
        load_flat_config(str(path), SweepConfig)


def test_load_flat_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_flat_config(str(tmp_path / "missing.cfg"))


@pytest.mark.parametrize(
    "values",
    [
        {"trials": 0},
        {"n_values": [1]},
        {"eps_values": [0.0]},
        {"eps_values": [1.5]},
        {"fit_axis": "log_n"},
        {"boost_rounds": 4},
        {"families": []},
    ],
)
def test_sweep_config_validate(values):
    cfg = SweepConfig()
    cfg.update_from_dict(values)
    with pytest.raises(ValueError):
        cfg.validate()


def test_sweep_config_to_sweep_values():
    assert sweep_config_to_sweep_values({"trials": 3, "seed0": 7}) == {"trials": 3, "seed0": 7}
