import importlib

EXPERIMENT_NAMES = ("grangier", "chsh-operator", "chsh-counts", "threshold", "lhv")


def get_experiment_handler(name):
    """
    Return the handler module for an experiment based on its name.
    Assumes a module exists in entanglement_lab.experiments with the name's
    dashes replaced by underscores.
    """
    module_name = name.lower().strip().replace("-", "_")
    try:
        return importlib.import_module(f"entanglement_lab.experiments.{module_name}")
    except ModuleNotFoundError:
        raise NotImplementedError(f"Experiment '{name}' is not yet supported.")


def _hook(name, attribute):
    handler = get_experiment_handler(name)
    func = getattr(handler, attribute, None)
    if not callable(func):
        raise NotImplementedError(f"Experiment '{name}' does not implement '{attribute}'")
    return func


def get_experiment_description(name):
    return getattr(get_experiment_handler(name), "DESCRIPTION", "")


def get_experiment_section(name):
    return getattr(get_experiment_handler(name), "SECTION", "")


def get_experiment_defaults(name):
    """
    Return the config defaults an experiment applies when the document is silent.
    """
    return dict(getattr(get_experiment_handler(name), "DEFAULTS", {}))


def run_experiment_handler(name, config):
    """
    Run an experiment on a validated config and return its results dict.
    """
    return _hook(name, "run")(config)


def build_csv_rows(name, results):
    """
    Flatten an experiment's results into CSV rows (header first).
    """
    return _hook(name, "csv_rows")(results)


def iter_raw_clicks(name, config):
    """
    Yield the click batches behind an experiment's results, for --raw-clicks.
    """
    return _hook(name, "iter_raw_clicks")(config)


def catalog():
    """(name, section reproduced, description) for every experiment."""
    return [
        (name, get_experiment_section(name), get_experiment_description(name))
        for name in EXPERIMENT_NAMES
    ]


def supports_raw_clicks(name):
    return callable(getattr(get_experiment_handler(name), "iter_raw_clicks", None))
