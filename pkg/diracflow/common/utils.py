import hashlib
import json
import os
import random
from typing import Any, Dict

import numpy as np

THREADS_ENV = "DIRACFLOW_THREADS"


def set_seeds(seed: int) -> None:
    """
    Sets seeds for reproducibility

    :param seed: Seed Value
    :type seed: int
    """
    random.seed(seed)
    np.random.seed(seed)


def get_n_threads(default: int = 1) -> int:
    """
    Number of worker processes allowed by the DIRACFLOW_THREADS variable

    :param default: Value used when the variable is unset
    :type default: int
    :returns: Positive worker count
    :rtype: int
    """
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == "":
        return default
    try:
        n = int(value)
    except ValueError:
        raise ValueError("{} must be an integer, got {!r}".format(THREADS_ENV, value))
    return max(1, n)


def config_hash(config: Dict[str, Any]) -> str:
    """
    Short SHA-256 digest of a canonical json dump

    :param config: JSON serialisable mapping
    :type config: dict
    :returns: First 16 hex digits
    :rtype: str
    """
    text = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def max_abs(matrix: np.ndarray) -> float:
    """Max-entry norm, 0 for empty arrays"""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix)))


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def anticommutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y + y @ x


def adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(x).T
