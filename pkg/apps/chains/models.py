import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from constance import config
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.core.utils import fmt_float, fmt_vector
from apps.geometry.choices import FamilyTag
from apps.geometry.models import PlacedShape, Placement, Shape
from apps.geometry.validators import UnitVectorValidator


class Axis:
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    CHOICES = (HORIZONTAL, VERTICAL)


@dataclass(frozen=True)
class Strip:
    """
    The region between the lines ``<p, n> = d1`` and ``<p, n> = d2`` where
    ``n`` is ``u`` turned a quarter counterclockwise.
    """

    u: tuple = (1.0, 0.0)
    d1: float = 0.0
    d2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(v) for v in self.u))
        object.__setattr__(self, "d1", float(self.d1))
        object.__setattr__(self, "d2", float(self.d2))
        UnitVectorValidator("u")(self.u)
        if not self.d2 > self.d1:
            raise ValidationError(
                _("Strip offsets need d1 < d2, got %(d1)s and %(d2)s."),
                code="empty_strip",
                params={"d1": self.d1, "d2": self.d2},
            )

    @property
    def width(self):
        return self.d2 - self.d1

    @cached_property
    def along(self):
        return np.array(self.u)

    @cached_property
    def normal(self):
        return np.array([-self.u[1], self.u[0]])

    @property
    def angle(self):
        return math.atan2(self.u[1], self.u[0])

    def to_canonical(self) -> Placement:
        """Rigid motion taking this strip onto a horizontal one, same offsets."""
        return Placement(rotation=-self.angle)

    def from_canonical(self) -> Placement:
        return Placement(rotation=self.angle)

    def rotated(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        ux, uy = self.u
        return Strip((c * ux - s * uy, s * ux + c * uy), self.d1, self.d2)

    def spec(self):
        return (
            f"strip u={fmt_vector(self.u)} d1={fmt_float(self.d1)}"
            f" d2={fmt_float(self.d2)}"
        )


@dataclass(frozen=True)
class Chain:
    """
    Copies of one shape, ordered along a strip.

    ``converged`` is False when the optimizer that produced the chain
    stopped without meeting its convergence test.
    """

    shape: Shape
    strip: Strip
    placements: tuple
    family: FamilyTag = FamilyTag.SIM
    converged: bool = True
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))
        object.__setattr__(self, "family", FamilyTag(self.family))

    def __len__(self):
        return len(self.placements)

    @property
    def regions(self):
        return [PlacedShape(self.shape, p) for p in self.placements]

    @property
    def angles(self):
        return np.array([p.rotation for p in self.placements])

    @property
    def reflections(self):
        return np.array([p.reflect for p in self.placements], dtype=bool)

    def moved(self, motion: Placement) -> "Chain":
        """The chain after applying a rigid motion to strip and disks."""
        if motion.scale != 1.0 or motion.reflect:
            raise ValidationError(
                _("Chains move by rotations and translations only."),
                code="not_rigid",
            )
        strip = self.strip.rotated(motion.rotation)
        shift = float(strip.normal @ motion.translation)
        strip = replace(strip, d1=strip.d1 + shift, d2=strip.d2 + shift)
        return replace(
            self,
            strip=strip,
            placements=tuple(p.then(motion) for p in self.placements),
        )


@dataclass(frozen=True)
class ChainReport:
    valid: bool
    strict: bool
    length: float
    violations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))


@dataclass(frozen=True)
class SingleDiskBound:
    """Rigorous upper bound on the length of a one-disk chain."""

    upper: float
    best: float
    angle: float
    padding: float


@dataclass(frozen=True)
class ChainRow:
    n: int
    length: float
    chain: Chain


@dataclass(frozen=True)
class StretchEstimate:
    """
    ``certified_lower`` bounds the stretch from below; ``heuristic`` is the
    best length per disk at the largest tabulated ``n``.
    """

    family: FamilyTag
    rows: tuple
    single: SingleDiskBound
    certified_lower: float
    heuristic: float

    @property
    def lengths(self):
        return {row.n: row.length for row in self.rows}


@dataclass(frozen=True)
class ChainConfig:
    """Optimizer budget of the chain problems."""

    starts: int = 32
    seed: int = 0
    fd_step: float = 1e-5
    scan: int = 10000
    max_iter: int = 200
    penetration: float = 1e-3

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            "starts": config.MULTISTART_COUNT,
            "seed": config.MULTISTART_SEED,
            "fd_step": config.FINITE_DIFFERENCE_STEP,
            "scan": config.SINGLE_DISK_SCAN,
            "penetration": config.STRICT_PENETRATION,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
