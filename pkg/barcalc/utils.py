import logging
import random
import time
import contextlib

import numpy as np

logger = logging.getLogger("barcalc")


def init_logger(level):
    """
    Initialize the barcalc logger with a single stream handler.
    Args:
        level: Logging level (40 errors only, 10 debug).
    """
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s", "%H:%M:%S"))
        logger.addHandler(handler)
    for handler in logger.handlers:
        handler.setLevel(level)

    return logger


def log_arguments(args):
    """
    Log all parsed commandline arguments at debug level.
    """
    for key, value in args.items():
        logger.debug(f"Argument: {key} = {value}")


def seed(seed):
    """
    Seed the python and numpy random generators.
    """
    random.seed(seed)
    np.random.seed(seed)


def rng(seed):
    """
    Deterministic numpy generator for randomized sweeps.
    """
    return np.random.default_rng(seed)


@contextlib.contextmanager
def timed(timings, name):
    """
    Record wall-clock seconds of the enclosed block in timings[name].
    """
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        timings[name] = timings.get(name, 0.0) + elapsed
        logger.debug(f"{name} took {elapsed:.2f}s")
