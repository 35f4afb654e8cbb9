"""Job configuration shared by the pipelines and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .reparam import DEFAULT_GRID


def parse_rational(text) -> Fraction:
    """Fraction from '3/4', '0.25', or a number."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, (int, float)):
        return Fraction(text)
    return Fraction(str(text).strip())


def parse_box(text, n: int) -> Tuple[Fraction, ...]:
    parts = text.split(",") if isinstance(text, str) else list(text)
    if len(parts) != n:
        raise ValueError(f"box needs {n} comma-separated bounds, got {len(parts)}")
    vals = tuple(parse_rational(p) for p in parts)
    for lo, hi in zip(vals[::2], vals[1::2]):
        if not lo < hi:
            raise ValueError(f"empty box side [{lo}, {hi}]")
    return vals


@dataclass
class JobConfig:
    f: str
    g: Optional[str]
    box: Tuple[Fraction, ...]
    epsilon: float
    s: Optional[Fraction] = None
    vt_threshold: float = 100.0
    samples_n: int = 19
    tangent_tau: float = 1e-3
    grid: Tuple[Fraction, ...] = DEFAULT_GRID
    vt_cap: Fraction = Fraction(1, 8)
    max_rounds: int = 20

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        self.box = tuple(parse_rational(b) for b in self.box)
        if len(self.box) not in (4, 6):
            raise ValueError("box must have 4 (plane) or 6 (space) bounds")
        for lo, hi in zip(self.box[::2], self.box[1::2]):
            if not lo < hi:
                raise ValueError("box is empty")
        if self.s is not None:
            self.s = parse_rational(self.s)
        self.grid = tuple(parse_rational(v) for v in self.grid)

    @property
    def is_space(self) -> bool:
        return self.g is not None
