"""Data models for detector clicks."""
from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np


class Arm(str, Enum):
    """Detection arm."""
    SIGNAL = "signal"
    IDLER = "idler"


class Origin(str, Enum):
    """What produced a click."""
    PAIR = "pair"
    DARK = "dark"


ORIGIN_CODES = {0: Origin.PAIR, 1: Origin.DARK}


@dataclass
class ClickStream:
    """Time-sorted clicks of one arm; origin codes are 0 (pair) / 1 (dark)."""
    arm: Arm
    time_ps: np.ndarray
    origin: np.ndarray

    def __len__(self) -> int:
        return int(self.time_ps.size)

    @classmethod
    def empty(cls, arm: Arm) -> 'ClickStream':
        return cls(arm=arm, time_ps=np.empty(0, dtype=np.int64), origin=np.empty(0, dtype=np.int8))

    @classmethod
    def concatenate(cls, arm: Arm, parts: List['ClickStream']) -> 'ClickStream':
        """Merge streams and restore time order (stable, so equal inputs merge identically)."""
        if not parts:
            return cls.empty(arm)
        times = np.concatenate([p.time_ps for p in parts])
        origin = np.concatenate([p.origin for p in parts])
        order = np.argsort(times, kind="stable")
        return cls(arm=arm, time_ps=times[order], origin=origin[order])

    def count(self, origin: Origin) -> int:
        code = 0 if origin == Origin.PAIR else 1
        return int(np.count_nonzero(self.origin == code))
