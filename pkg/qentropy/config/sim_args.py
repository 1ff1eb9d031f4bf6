import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from multiprocessing import cpu_count


def get_default_process_count():
    process_count = cpu_count() - 2 if cpu_count() > 2 else 1
    if sys.platform == "win32":
        process_count = min(process_count, 61)

    return process_count


@dataclass
class SimulationArgs:
    boost_rounds: int = 7
    concentration_constant: float = 4.0
    cost_constant: float = 1.0
    envelope_constant: float = 8.0
    exact_qae: bool = False
    folklore: bool = False
    manual_seed: int = None
    not_saved_args: list = field(default_factory=list)
    output_dir: str = "outputs/"
    process_count: int = field(default_factory=get_default_process_count)
    silent: bool = False
    use_multiprocessing: bool = True
    wandb_kwargs: dict = field(default_factory=dict)
    wandb_project: str = None

    def update_from_dict(self, new_values):
        if isinstance(new_values, dict):
            for key, value in new_values.items():
                setattr(self, key, value)
        else:
            raise (TypeError(f"{new_values} is not a Python dict."))

    def get_args_for_saving(self):
        args_for_saving = {
            key: value
            for key, value in asdict(self).items()
            if key not in self.not_saved_args
        }
        if "settings" in args_for_saving["wandb_kwargs"]:
            del args_for_saving["wandb_kwargs"]["settings"]
        return args_for_saving

    def save(self, output_dir):
        os.makedirs(output_dir, exist_ok=True)
        with open(os.path.join(output_dir, "sim_args.json"), "w") as f:
            json.dump(self.get_args_for_saving(), f)

    def load(self, input_dir):
        if input_dir:
            sim_args_file = os.path.join(input_dir, "sim_args.json")
            if os.path.isfile(sim_args_file):
                with open(sim_args_file, "r") as f:
                    sim_args = json.load(f)

                self.update_from_dict(sim_args)

    @classmethod
    def field_types(cls):
        return {f.name: f.type for f in fields(cls)}


@dataclass
class SweepConfig(SimulationArgs):
    """
    Args for a sweep over (family, n, eps, trial) cells.
    """

    eps_values: list = field(default_factory=lambda: [0.5, 0.25])
    families: list = field(default_factory=lambda: ["uniform"])
    fit_axis: str = "n"
    n_values: list = field(default_factory=lambda: [8])
    output_path: str = None
    seed0: int = 0
    trials: int = 1

    def validate(self):
        if not self.families:
            raise ValueError("families must not be empty.")
        if int(self.trials) < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}.")
        for n in self.n_values:
            if int(n) != n or n < 2:
                raise ValueError(f"every n must be an integer >= 2, got {n}.")
        for eps in self.eps_values:
            if not 0 < eps <= 1:
                raise ValueError(f"every eps must lie in (0, 1], got {eps}.")
        if self.fit_axis not in ("n", "inv_eps"):
            raise ValueError(f"fit_axis must be 'n' or 'inv_eps', got {self.fit_axis}.")
        if self.boost_rounds % 2 != 1:
            raise ValueError(f"boost_rounds must be odd, got {self.boost_rounds}.")
