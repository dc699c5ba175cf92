import logging

import numpy as np

from entanglement_lab.bell import deterministic_strategies, exhaustive_lhv_max, lhv_sweep
from entanglement_lab.experiments import key_value_rows
from entanglement_lab.utils.rng import chunk_layout, stream

logger = logging.getLogger(__name__)

SECTION = "§10"
DESCRIPTION = "local hidden variable ceiling: every deterministic strategy and random mixtures"

DEFAULTS = {"models": 100_000, "mixture_size": 16}

CLASSICAL_BOUND = 1.0
BOUND_ATOL = 1e-12


def run(config):
    models, size, seed = config["models"], config["mixture_size"], config["seed"]
    strategies = deterministic_strategies()
    exhaustive = exhaustive_lhv_max()
    logger.info(f"Exhaustive max over {len(strategies)} deterministic strategies: {exhaustive}")

    sweep_max, sweep_sum, violations = 0.0, 0.0, 0
    for chunk, _, count in chunk_layout(models):
        values = lhv_sweep(count, stream(seed, chunk, "models"), size)
        sweep_max = max(sweep_max, float(values.max()))
        sweep_sum += float(values.sum())
        violations += int(np.count_nonzero(values > CLASSICAL_BOUND + BOUND_ATOL))
    logger.info(f"{models} random mixtures of {size} hidden states: max S = {sweep_max:.6f}")

    return {
        "strategies": int(len(strategies)),
        "exhaustive_max": exhaustive,
        "models": models,
        "mixture_size": size,
        "sweep_max": sweep_max,
        "sweep_mean": sweep_sum / models,
        "violations": violations,
        "max_s": max(exhaustive, sweep_max),
    }


def csv_rows(results):
    return key_value_rows(results)
