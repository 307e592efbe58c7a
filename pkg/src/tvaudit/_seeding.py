import numpy as np


def derive_seed(seed: int, index: int) -> int:
    """Child seed for task ``index``; independent of how tasks are scheduled."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def task_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, index))
