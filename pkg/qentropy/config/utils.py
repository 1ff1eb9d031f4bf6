import logging

from qentropy.config.sim_args import SimulationArgs

logger = logging.getLogger(__name__)


class ConfigurationError(ValueError):
    pass


def sweep_config_to_sweep_values(sweep_config):
    """
    Converts an instance of wandb.Config to plain values map.

    wandb.Config varies across versions quite significantly,
    so we use the `keys` method that works consistently.
    """

    return {key: sweep_config[key] for key in sweep_config.keys()}


def _coerce(key, raw, field_type):
    type_name = field_type if isinstance(field_type, str) else getattr(field_type, "__name__", "")
    raw = raw.strip()
    try:
        if type_name == "bool":
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if type_name == "int":
            return None if raw.lower() == "none" else int(raw)
        if type_name == "float":
            return float(raw)
        if type_name == "list":
            items = [item.strip() for item in raw.split(",") if item.strip()]
            if key == "n_values":
                return [int(item) for item in items]
            if key == "eps_values":
                return [float(item) for item in items]
            return items
        if type_name == "dict":
            raise ConfigurationError(f"'{key}' cannot be set from a flat config file.")
        return None if raw.lower() == "none" else raw
    except ValueError:
        raise ConfigurationError(f"Invalid value '{raw}' for '{key}' ({type_name}).")


def load_flat_config(path, args_class=SimulationArgs):
    """
    Reads a flat `key=value` config file into a dict of typed values.

    Blank lines and lines starting with '#' are ignored. List values are comma separated.
    Keys must name fields of `args_class`.
    """
    field_types = args_class.field_types()
    values = {}
    try:
        with open(path, "r") as f:
            lines = f.readlines()
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}")

    for line_number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{line_number}: expected key=value, got '{line}'.")
        key, raw = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in field_types:
            raise ConfigurationError(f"{path}:{line_number}: unknown key '{key}'.")
        values[key] = _coerce(key, raw, field_types[key])

    logger.info(" Loaded %d values from %s", len(values), path)
    return values
