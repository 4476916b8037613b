"""Seeded synthetic instances.

Randomness comes from :class:`XorShift64Star`, defined entirely by its
recurrence so any language can regenerate the same instances:

* seeding: the 64-bit seed is passed through one SplitMix64 step
  (``z = seed + 0x9E3779B97F4A7C15``; ``z = (z ^ z>>30) * 0xBF58476D1CE4E5B9``;
  ``z = (z ^ z>>27) * 0x94D049BB133111EB``; ``z ^= z>>31``, all mod 2**64).
  A zero result is replaced by ``0x9E3779B97F4A7C15``.
* step: ``x ^= x>>12; x ^= x<<25 (mod 2**64); x ^= x>>27``;
  output ``x * 0x2545F4914F6CDD1D mod 2**64``.
* uniform in [0, 1): ``(output >> 11) * 2**-53``.
* standard normal: Box-Muller, ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``, one
  pair of uniforms per normal draw.

Draw order: cluster centres (x then y per centre), then for each demand point
x, y (uniform law) or normal-x, normal-y (clustered law), then its weight,
then every site's x and y.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from .model import BudgetMode, DemandPoint, FacilitySite, Instance

_MASK64 = (1 << 64) - 1


class XorShift64Star:
    def __init__(self, seed: int):
        z = (seed + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        self.state = z or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def normal(self) -> float:
        u1, u2 = self.random(), self.random()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)


class Distribution(str, enum.Enum):
    UNIFORM = "uniform"
    CLUSTERED = "clustered"


class GeneratorConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    m: int
    radius: float
    budget: int | None = None
    budget_fraction: float | None = None
    budget_mode: BudgetMode = BudgetMode.AT_MOST
    distribution: Distribution = Distribution.UNIFORM
    cluster_count: int = 3
    cluster_spread: float = 5.0
    weight_range: tuple[float, float] = (1.0, 10.0)
    area: float = 100.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        object.__setattr__(self, "budget_mode", BudgetMode(self.budget_mode))
        object.__setattr__(self, "weight_range", tuple(float(w) for w in self.weight_range))
        if self.n < 1 or self.m < 1:
            raise GeneratorConfigError("n and m must be >= 1")
        if (self.budget is None) == (self.budget_fraction is None):
            raise GeneratorConfigError("give exactly one of budget and budget_fraction")
        if self.budget_fraction is not None and not 0 < self.budget_fraction <= 1:
            raise GeneratorConfigError("budget_fraction must lie in (0, 1]")
        if not 1 <= self.resolved_budget <= self.m:
            raise GeneratorConfigError(f"budget must lie in [1, {self.m}]")
        if not self.radius > 0:
            raise GeneratorConfigError("radius must be positive")
        if self.cluster_count < 1:
            raise GeneratorConfigError("cluster_count must be >= 1")
        if not self.cluster_spread > 0:
            raise GeneratorConfigError("cluster_spread must be positive")
        low, high = self.weight_range
        if not 0 < low <= high:
            raise GeneratorConfigError("weight_range needs 0 < low <= high")
        if not self.area > 0:
            raise GeneratorConfigError("area must be positive")
        if not 0 <= self.seed <= _MASK64:
            raise GeneratorConfigError("seed must be an unsigned 64-bit integer")

    @property
    def resolved_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        # 1e-9 keeps e.g. 0.3 * 10 from ceiling to 4
        return max(1, math.ceil(self.budget_fraction * self.m - 1e-9))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["distribution"] = self.distribution.value
        d["budget_mode"] = self.budget_mode.value
        d["weight_range"] = list(self.weight_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        d = dict(d)
        if "weight_range" in d:
            d["weight_range"] = tuple(d["weight_range"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise GeneratorConfigError(str(exc)) from None


def _clamp(v: float, hi: float) -> float:
    return min(max(v, 0.0), hi)


def generate(config: GeneratorConfig) -> Instance:
    rng = XorShift64Star(config.seed)
    area = config.area
    low, high = config.weight_range
    clustered = config.distribution is Distribution.CLUSTERED

    centres = []
    if clustered:
        for _ in range(config.cluster_count):
            cx = rng.uniform(0.0, area)
            cy = rng.uniform(0.0, area)
            centres.append((cx, cy))

    demand = []
    for i in range(config.n):
        if clustered:
            cx, cy = centres[i % config.cluster_count]
            x = _clamp(cx + config.cluster_spread * rng.normal(), area)
            y = _clamp(cy + config.cluster_spread * rng.normal(), area)
        else:
            x = rng.uniform(0.0, area)
            y = rng.uniform(0.0, area)
        w = min(rng.uniform(low, high), high)
        demand.append(DemandPoint(i, x, y, w))

    sites = []
    for j in range(config.m):
        x = rng.uniform(0.0, area)
        y = rng.uniform(0.0, area)
        sites.append(FacilitySite(j, x, y))

    return Instance(tuple(demand), tuple(sites), float(config.radius),
                    config.resolved_budget, config.budget_mode)
