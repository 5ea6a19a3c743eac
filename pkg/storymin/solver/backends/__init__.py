# isort: skip_file

from typing import Dict, Optional, Type

from .base import LPMatrices, LPResult, LPStatus, RelaxationBackend, Row
from .simplex import DenseSimplexBackend
from .highs import HighsBackend

BACKENDS: Dict[str, Type[RelaxationBackend]] = {
    DenseSimplexBackend.name: DenseSimplexBackend,
    HighsBackend.name: HighsBackend,
}

_default_backend = DenseSimplexBackend.name


def get_default_backend() -> str:
    return _default_backend


def set_default_backend(name: str):
    global _default_backend
    if name not in BACKENDS:
        raise ValueError(f"unknown LP backend {name}")
    _default_backend = name


def create_backend(name: Optional[str] = None, seed: int = 0) -> RelaxationBackend:
    name = name or _default_backend
    if name not in BACKENDS:
        raise ValueError(f"unknown LP backend {name}")
    return BACKENDS[name](seed=seed)
