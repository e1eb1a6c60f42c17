"""Result record for negative-eigenvalue counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np


@dataclass
class SpectralCount:
    count_negative: int
    eigenvalues_below: List[float]
    threshold: float
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = [float(v) for v in self.eigenvalues_below]
        if any(b < a for a, b in zip(ev, ev[1:])):
            raise ValueError("eigenvalues_below must be sorted ascending")
        if any(v >= self.threshold for v in ev):
            raise ValueError("eigenvalues_below must lie strictly below the threshold")
        if self.count_negative != len(ev):
            raise ValueError("count_negative must equal len(eigenvalues_below)")
        self.eigenvalues_below = ev

    def to_dict(self):
        return {
            "count_negative": int(self.count_negative),
            "eigenvalues_below": list(self.eigenvalues_below),
            "threshold": float(self.threshold),
            "certificate": _jsonable(self.certificate),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj
