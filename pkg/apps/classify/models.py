import math
from dataclasses import dataclass

from constance import config

from apps.chains.models import StretchEstimate
from apps.classify.choices import FitMode, Ordering, Relation
from apps.geometry.models import AffineMap
from apps.geometry.models.transforms import MIRROR
from apps.grids.models import MGrid


@dataclass(frozen=True)
class FitConfig:
    """Budget of the shape fits and the verdict threshold."""

    seeds: int = 8
    directions: int = 256
    max_evaluations: int = 400
    moment_samples: int = 4096
    tau: float = 1e-3

    @classmethod
    def from_settings(cls, **overrides):
        values = {"seeds": config.CLASSIFY_SEEDS, "tau": config.CLASSIFY_TAU}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class FitResult:
    """
    Best map ``f`` found for ``f(A) ~ B``; ``residual`` is the Hausdorff
    distance of ``f(A)`` and ``B`` over the diameter of ``B``.
    """

    transform: AffineMap
    residual: float
    reflect: bool = False
    seed: int = 0
    starts: int = 0
    evaluations: int = 0
    converged: bool = True

    @property
    def scale(self):
        return math.sqrt(abs(self.transform.det))

    @property
    def rotation(self):
        """Rotation angle of the map, after undoing the mirror when ``reflect``."""
        linear = self.transform.linear @ MIRROR if self.reflect else self.transform.linear
        return math.atan2(linear[1, 0], linear[0, 0]) % (2.0 * math.pi)

    def to_grid(self, m) -> MGrid:
        return MGrid.from_affine(self.transform.linear, self.transform.translation, m)

    def spec(self):
        flag = " reflect" if self.reflect else ""
        return f"transform {self.transform.spec()}{flag}"


@dataclass(frozen=True)
class Verdict:
    mode: FitMode
    relation: Relation
    residual: float
    tau: float
    fit: FitResult
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mode", FitMode(self.mode))
        object.__setattr__(self, "relation", Relation(self.relation))


@dataclass(frozen=True)
class StretchComparison:
    a: StretchEstimate
    b: StretchEstimate
    ordering: Ordering

    @property
    def margin(self):
        """How far the winning certified bound clears the other single-disk bound."""
        if self.ordering == Ordering.A_LONGER:
            return self.a.certified_lower - self.b.single.upper
        if self.ordering == Ordering.B_LONGER:
            return self.b.certified_lower - self.a.single.upper
        return max(
            self.a.certified_lower - self.b.single.upper,
            self.b.certified_lower - self.a.single.upper,
        )
