"""
Chains of convex disks in strips.

Chains are optimized in the canonical strip ``0 <= y <= 1`` running along
the x-axis. For rotating families only the disk angles are free: the scale
follows from touching both lines, and horizontal positions are fixed by
pushing each disk as far right as its left neighbour allows.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache, partial

import numpy as np
from constance import config
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from scipy.optimize import minimize

from apps.chains import packing
from apps.chains.models import (
    Axis,
    Chain,
    ChainConfig,
    ChainReport,
    ChainRow,
    SingleDiskBound,
    StretchEstimate,
    Strip,
)
from apps.chains.validators import validate_count
from apps.core.exceptions import ConstructionError
from apps.core.utils import parallel_map
from apps.geometry import services as geometry
from apps.geometry.choices import FamilyTag
from apps.geometry.models import Placement
from apps.geometry.search import golden_minimize
from apps.geometry.validators import validate_smooth

logger = logging.getLogger(__name__)

CANONICAL_STRIP = Strip((1.0, 0.0), 0.0, 1.0)
TWO_PI = 2.0 * math.pi
ROTATION_SNAP = 1e-12
MIN_DELTA = 1e-4


def _config(cfg):
    return cfg if cfg is not None else ChainConfig.from_settings()


def chain_length(chain: Chain) -> float:
    """Projection span of the union onto the strip direction, over the width."""
    u = chain.strip.along
    ends = [float(r.support_values(u)) for r in chain.regions]
    starts = [-float(r.support_values(-u)) for r in chain.regions]
    return (max(ends) - min(starts)) / chain.strip.width


def chain_check(chain: Chain) -> ChainReport:
    if not chain.placements:
        raise ValidationError(_("A chain needs at least one disk."), code="empty_chain")
    tol = config.GEOMETRY_TOLERANCE
    strip = chain.strip
    violations = []
    regions = chain.regions
    for index, region in enumerate(regions):
        top = float(region.support_values(strip.normal))
        bottom = -float(region.support_values(-strip.normal))
        if abs(top - strip.d2) > tol:
            violations.append(f"disk {index} misses line d2 by {top - strip.d2:.3g}")
        if abs(bottom - strip.d1) > tol:
            violations.append(f"disk {index} misses line d1 by {bottom - strip.d1:.3g}")
        if not geometry.family_admits(chain.family, region.placement):
            violations.append(f"disk {index} is not in family {chain.family.value}")
    strict = True
    for index in range(len(regions) - 1):
        gap = geometry.separation(regions[index], regions[index + 1])
        if gap > tol:
            violations.append(f"disks {index} and {index + 1} are {gap:.3g} apart")
        strict = strict and gap < -tol
    valid = not violations
    return ChainReport(
        valid=valid,
        strict=valid and strict,
        length=chain_length(chain),
        violations=violations,
    )


def _canonical_chain(shape, family, lay, row=0, converged=True, seed=None):
    return Chain(
        shape=shape,
        strip=CANONICAL_STRIP,
        placements=lay.placements(row),
        family=family,
        converged=converged,
        seed=seed,
    )


@dataclass(frozen=True)
class _Start:
    seed: int
    angles: np.ndarray
    reflect: np.ndarray


@dataclass(frozen=True)
class _Climb:
    seed: int
    length: float
    angles: np.ndarray
    reflect: np.ndarray
    converged: bool


def _climb(shape, cfg, start: _Start) -> _Climb:
    """Quasi-Newton ascent of the chain length over the disk angles."""
    n = len(start.angles)
    h = cfg.fd_step
    probes = np.vstack([np.zeros(n), h * np.eye(n), -h * np.eye(n)])

    def objective(x):
        lengths = packing.chain_lengths(shape, x[None, :] + probes, start.reflect)
        grad = (lengths[1 : n + 1] - lengths[n + 1 :]) / (2.0 * h)
        return -lengths[0], -grad

    initial, _grad = objective(start.angles)
    result = minimize(
        objective,
        start.angles,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": cfg.max_iter},
    )
    logger.debug(
        _("Chain start %(seed)s: %(initial)s -> %(final)s (%(message)s)"),
        {
            "seed": start.seed,
            "initial": -initial,
            "final": -result.fun,
            "message": result.message,
        },
    )
    if result.fun <= initial:
        angles, length = np.mod(result.x, TWO_PI), -float(result.fun)
    else:
        angles, length = start.angles, -float(initial)
    return _Climb(start.seed, length, angles, start.reflect, bool(result.success))


def _starts(shape, family, n, cfg, warm_starts):
    starts = []
    for index, (angles, reflect) in enumerate(warm_starts):
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (n,):
            continue
        reflect = np.asarray(reflect, dtype=bool) & family.allows_reflection
        starts.append(_Start(-(index + 1), angles, reflect))
    best_angle = single_disk_bound(shape, family, cfg).angle
    starts.append(_Start(0, np.full(n, best_angle), np.zeros(n, dtype=bool)))
    for seed in range(1, cfg.starts):
        rng = np.random.default_rng([cfg.seed, seed])
        angles = rng.uniform(0.0, TWO_PI, n)
        if family.allows_reflection:
            reflect = rng.integers(0, 2, n).astype(bool)
        else:
            reflect = np.zeros(n, dtype=bool)
        starts.append(_Start(seed, angles, reflect))
    return starts


def max_chain(shape, family, n, cfg=None, warm_starts=(), base_rotation=0.0) -> Chain:
    """
    Longest ``n``-chain found in the canonical width-1 strip.

    Homothets are laid out in closed form at ``base_rotation``. Rotating
    families run a deterministic multistart: the best single-disk angle,
    ``cfg.starts - 1`` seeded random angle vectors and any ``warm_starts``
    given as ``(angles, reflect)`` pairs. The winner is the lexicographic
    maximum of ``(length, seed)``.
    """
    validate_count(n, "n")
    validate_smooth(shape)
    family = FamilyTag(family)
    cfg = _config(cfg)
    if not family.allows_rotation:
        lay = packing.layout(shape, np.full((1, n), float(base_rotation)))
        return _canonical_chain(shape, family, lay)

    starts = _starts(shape, family, n, cfg, warm_starts)
    climbs = parallel_map(partial(_climb, shape, cfg), starts)
    best = max(climbs, key=lambda c: (c.length, c.seed))
    if not best.converged:
        logger.warning(
            _("Chain optimizer did not converge for n=%(n)s; keeping best found %(length)s"),
            {"n": n, "length": best.length},
        )
    lay = packing.layout(shape, best.angles[None, :], best.reflect[None, :])
    return _canonical_chain(
        shape, family, lay, converged=best.converged, seed=best.seed
    )


def _to_canonical(chain: Chain) -> Chain:
    moved = chain.moved(chain.strip.to_canonical())
    strip = Strip((1.0, 0.0), moved.strip.d1, moved.strip.d2)
    return replace(moved, strip=strip)


def _reach(shape, a: Placement, b: Placement) -> float:
    def disk(p):
        return ([p.scale], [p.rotation], [p.dy], [p.reflect])

    return float(packing.greedy_steps(shape, disk(a), disk(b))[0])


def concatenate(c1: Chain, c2: Chain) -> Chain:
    """
    ``c1`` followed by ``c2`` slid along the strip as far as it goes while
    its first disk still meets the last disk of ``c1``.
    """
    tol = config.GEOMETRY_TOLERANCE
    if c1.shape != c2.shape or c1.family != c2.family:
        raise ValidationError(
            _("Only chains of the same shape and family concatenate."),
            code="mismatch",
        )
    if abs(c1.strip.width - c2.strip.width) > tol:
        raise ValidationError(
            _("Strip widths differ: %(w1)s and %(w2)s."),
            code="mismatch",
            params={"w1": c1.strip.width, "w2": c2.strip.width},
        )
    for chain in (c1, c2):
        report = chain_check(chain)
        if not report.valid:
            raise ValidationError(
                _("Cannot concatenate an invalid chain: %(violations)s"),
                code="invalid_chain",
                params={"violations": "; ".join(report.violations)},
            )
    a = _to_canonical(c1)
    b = _to_canonical(c2)
    b = b.moved(Placement(dy=a.strip.d1 - b.strip.d1))

    last, first = a.placements[-1], b.placements[0]
    step = _reach(c1.shape, last, first)
    shift = last.dx + step - first.dx
    tail = tuple(p.translated(shift, 0.0) for p in b.placements)
    joined = replace(a, placements=a.placements + tail, converged=c1.converged and c2.converged)
    back = c1.strip.from_canonical()
    return replace(
        joined,
        strip=c1.strip,
        placements=tuple(_snap(p.then(back)) for p in joined.placements),
    )


def _snap(placement: Placement) -> Placement:
    rotation = placement.rotation
    if 0.0 < rotation < ROTATION_SNAP or TWO_PI - rotation < ROTATION_SNAP:
        return replace(placement, rotation=0.0)
    return placement


def _ratio_scan(shape, theta):
    """Width over height of the shape turned by ``theta``, with derivative."""
    c, s = np.cos(theta), np.sin(theta)
    u = np.stack([c, -s], axis=-1)
    du = np.stack([-s, -c], axis=-1)
    v = np.stack([s, c], axis=-1)
    dv = np.stack([c, -s], axis=-1)
    wide = shape.support_values(u) + shape.support_values(-u)
    high = shape.support_values(v) + shape.support_values(-v)
    dwide = np.sum((shape.support_points(u) - shape.support_points(-u)) * du, axis=-1)
    dhigh = np.sum((shape.support_points(v) - shape.support_points(-v)) * dv, axis=-1)
    ratio = wide / high
    return ratio, (dwide * high - wide * dhigh) / high**2


def single_disk_bound(shape, family, cfg=None) -> SingleDiskBound:
    """
    Upper bound on the length of a one-disk chain.

    Homothets have the exact value width/height. Rotating families scan the
    width/height ratio on a uniform grid over half a turn and pad every grid
    cell by a slope bound taken from the analytic derivative at its ends.
    Reflection does not change the range of the ratio.
    """
    validate_smooth(shape)
    return _single_disk_bound(shape, FamilyTag(family), int(_config(cfg).scan))


@lru_cache(maxsize=128)
def _single_disk_bound(shape, family, scan):
    if not family.allows_rotation:
        ratio, _slope = _ratio_scan(shape, np.zeros(1))
        value = float(ratio[0])
        return SingleDiskBound(upper=value, best=value, angle=0.0, padding=0.0)

    count = max(8, scan)
    theta = np.arange(count + 1) * (math.pi / count)
    ratio, slope = _ratio_scan(shape, theta)
    step = math.pi / count
    lipschitz = np.maximum(np.abs(slope[:-1]), np.abs(slope[1:])) + np.abs(
        slope[1:] - slope[:-1]
    )
    cell_bound = 0.5 * (ratio[:-1] + ratio[1:]) + 0.5 * lipschitz * step
    index = int(np.argmax(ratio[:-1]))
    found, value = golden_minimize(
        lambda t: -_ratio_scan(shape, t)[0],
        np.array([theta[index] - step]),
        np.array([theta[index] + step]),
        tol=config.GOLDEN_TOLERANCE,
    )
    angle, best = float(found[0]), float(-value[0])
    if ratio[index] >= best:
        angle, best = float(theta[index]), float(ratio[index])
    upper = max(float(cell_bound.max()), best)
    return SingleDiskBound(
        upper=upper,
        best=best,
        angle=float(np.mod(angle, TWO_PI)),
        padding=upper - best,
    )


def _seed_pair(chain: Chain):
    return chain.angles, chain.reflections


def chain_table(shape, family, n_max, cfg=None):
    """
    Best chains for ``n = 1 .. n_max``; each ``n`` is warm-started from the
    previous chain extended by a copy of its last disk and from every
    concatenation of two shorter table entries.
    """
    validate_count(n_max, "n_max")
    family = FamilyTag(family)
    cfg = _config(cfg)
    rows = []
    best = {}
    for n in range(1, n_max + 1):
        warm = []
        if n - 1 in best:
            angles, reflect = _seed_pair(best[n - 1])
            warm.append((np.append(angles, angles[-1]), np.append(reflect, reflect[-1])))
        for head in range(1, n):
            warm.append(_seed_pair(concatenate(best[head], best[n - head])))
        chain = max_chain(shape, family, n, cfg, warm_starts=warm)
        best[n] = chain
        rows.append(ChainRow(n=n, length=chain_length(chain), chain=chain))
        logger.debug(_("sigma(%(n)s) >= %(length)s"), {"n": n, "length": rows[-1].length})
    return tuple(rows)


def stretch_bounds(shape, n_max, cfg=None, family=FamilyTag.SIM) -> StretchEstimate:
    """
    Certified lower bound ``max_k (sigma(k) - sigma_upper(1)) / k`` and the
    heuristic ``sigma(n_max) / n_max`` on the stretch of ``shape``.
    """
    validate_count(n_max, "n_max", minimum=2)
    family = FamilyTag(family)
    cfg = _config(cfg)
    rows = chain_table(shape, family, n_max, cfg)
    single = single_disk_bound(shape, family, cfg)
    certified = max((row.length - single.upper) / row.n for row in rows)
    heuristic = rows[-1].length / rows[-1].n
    logger.info(
        _("Stretch of %(shape)s: certified %(lower)s, heuristic %(estimate)s"),
        {"shape": shape.spec(), "lower": certified, "estimate": heuristic},
    )
    return StretchEstimate(
        family=family,
        rows=rows,
        single=single,
        certified_lower=certified,
        heuristic=heuristic,
    )


def grid_search_floor(shape, n, angles_per_disk=11, family=FamilyTag.SIM) -> Chain:
    """
    Best chain whose angles come from a uniform grid of ``angles_per_disk``
    values, found by dynamic programming over consecutive pairs.

    The additive score ``left(first) + sum(steps) + right(last)`` never
    exceeds the true length of the chosen chain, so the result is a floor
    for the optimizer.
    """
    validate_count(n, "n")
    validate_count(angles_per_disk, "angles_per_disk")
    family = FamilyTag(family)
    if not family.allows_rotation:
        return max_chain(shape, family, n)
    grid = np.arange(angles_per_disk) * (TWO_PI / angles_per_disk)
    flips = (False, True) if family.allows_reflection else (False,)
    rotation = np.concatenate([grid for _flip in flips])
    reflect = np.concatenate([np.full(angles_per_disk, flip) for flip in flips])
    steps, fit = packing.pair_steps(shape, rotation, reflect)

    score = fit.left.copy()
    back = []
    for _disk in range(1, n):
        totals = score[:, None] + steps
        back.append(np.argmax(totals, axis=0))
        score = totals.max(axis=0)
    state = int(np.argmax(score + fit.right))
    path = [state]
    for choice in reversed(back):
        state = int(choice[state])
        path.append(state)
    path.reverse()
    lay = packing.layout(shape, rotation[path][None, :], reflect[path][None, :])
    return _canonical_chain(shape, family, lay)


def _axis_rotation(family, axis):
    if axis == Axis.VERTICAL and not family.allows_rotation:
        return -math.pi / 2
    return 0.0


def _chain_axis(family, axis):
    # rotating families reuse the horizontal chain turned a quarter
    return axis if not family.allows_rotation else Axis.HORIZONTAL


@lru_cache(maxsize=256)
def _axis_chain(shape, family, k, axis, cfg):
    base = _axis_rotation(family, axis)
    warm_starts = [(np.full(k, base), np.zeros(k, dtype=bool))]
    if k > 1 and family.allows_rotation:
        angles, reflect = _seed_pair(_axis_chain(shape, family, k - 1, axis, cfg))
        warm_starts.append((np.append(angles, angles[-1]), np.append(reflect, reflect[-1])))
    return max_chain(shape, family, k, cfg, warm_starts=warm_starts, base_rotation=base)


def _first_exceeding(shape, family, m, axis, cfg):
    limit = 4 * m + 8
    for k in range(1, limit + 1):
        chain = _axis_chain(shape, family, k, _chain_axis(family, axis), cfg)
        if chain_length(chain) > m + config.GEOMETRY_TOLERANCE:
            return k
    raise ConstructionError(
        _("No chain of at most %(limit)s disks is longer than %(m)s.")
        % {"limit": limit, "m": m},
        k=limit,
    )


def min_k_exceeding(shape, family, m, cfg=None) -> int:
    """Smallest ``k`` with chains longer than ``m`` along both axes."""
    validate_count(m, "m")
    validate_smooth(shape)
    family = FamilyTag(family)
    cfg = _config(cfg)
    return max(_first_exceeding(shape, family, m, axis, cfg) for axis in Axis.CHOICES)


def _span(lay, scale):
    dx = scale * lay.dx[0]
    return float(np.max(dx + lay.right[0]) - np.min(dx - lay.left[0]))


@lru_cache(maxsize=64)
def chain_delta(length, stack, m, k=None):
    """
    Smallest ``delta >= 1e-4 / m`` for which a chain of full length
    ``length`` can be squeezed to span ``m (1 + 2 delta)``. ``stack`` is the
    span with every disk on the same abscissa; when it is already wider, the
    chain spans ``2e-4`` beyond it.
    """
    delta = MIN_DELTA / m
    if stack >= m * (1.0 + 2.0 * delta):
        delta = (stack - m) / (2.0 * m) + MIN_DELTA / m
    if m * (1.0 + 2.0 * delta) >= length:
        raise ConstructionError(
            _("No delta >= %(floor)s fits a chain of length %(length)s over %(m)s cells.")
            % {"floor": MIN_DELTA / m, "length": length, "m": m},
            k=k,
        )
    return delta


def _strict_canonical(shape, family, m, axis, cfg):
    k = min_k_exceeding(shape, family, m, cfg)
    chain = _axis_chain(shape, family, k, _chain_axis(family, axis), cfg)
    if family.allows_rotation:
        # translates are members of every rotating family
        frozen = _axis_chain(shape, FamilyTag.HOM, k, axis, cfg)
        if chain_length(frozen) > m + config.GEOMETRY_TOLERANCE:
            chain = replace(frozen, family=family)
    lay = packing.layout(shape, chain.angles[None, :], chain.reflections[None, :])
    length = float(lay.lengths[0])
    delta = chain_delta(length, _span(lay, 0.0), m, k=k)
    target = m * (1.0 + 2.0 * delta)
    lo, hi = 0.0, 1.0
    for _round in range(200):
        mid = 0.5 * (lo + hi)
        if _span(lay, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16:
            break
    squeeze = hi
    dx = squeeze * lay.dx[0]
    dx = dx - np.min(dx - lay.left[0])
    placements = lay.placements(0, dx=dx)
    strict = replace(chain, placements=placements)

    regions = strict.regions
    penetrations = [
        -geometry.separation(regions[i], regions[i + 1]) for i in range(k - 1)
    ]
    needed = [
        cfg.penetration * min(regions[i].scale, regions[i + 1].scale)
        for i in range(k - 1)
    ]
    short = [(i, p) for i, (p, want) in enumerate(zip(penetrations, needed)) if p < want]
    if short:
        raise ConstructionError(
            _("Chain of %(k)s disks is not strict enough at pairs %(pairs)s.")
            % {"k": k, "pairs": ", ".join(f"{i}:{p:.3g}" for i, p in short)},
            k=k,
            penetrations=penetrations,
        )
    logger.info(
        _("Strict %(axis)s chain: k=%(k)s delta=%(delta)s squeeze=%(squeeze)s"),
        {"axis": axis, "k": k, "delta": delta, "squeeze": squeeze},
    )
    return strict, delta


def strict_chain_with_bbox(shape, family, m, axis, j, cfg=None):
    """
    Strict ``k``-chain filling row (or column) ``j`` of the ``m x m`` grid.

    The union has bounding box ``[-delta, 1 + delta] x [(j-1)/m, j/m]`` for
    a horizontal chain and its transpose for a vertical one. Returns
    ``(chain, delta)``.
    """
    validate_count(m, "m")
    validate_count(j, "j", maximum=m)
    if axis not in Axis.CHOICES:
        raise ValidationError(
            _("Axis must be one of %(choices)s."),
            code="invalid_axis",
            params={"choices": ", ".join(Axis.CHOICES)},
        )
    family = FamilyTag(family)
    cfg = _config(cfg)
    canonical, delta = _strict_canonical(shape, family, m, axis, cfg)
    if axis == Axis.HORIZONTAL:
        motion = Placement(1.0 / m, 0.0, -delta, (j - 1) / m)
        strip = Strip((1.0, 0.0), (j - 1) / m, j / m)
    else:
        motion = Placement(rotation=math.pi / 2).then(
            Placement(1.0 / m, 0.0, j / m, -delta)
        )
        strip = Strip((0.0, 1.0), -j / m, -(j - 1) / m)
    placements = tuple(_snap(p.then(motion)) for p in canonical.placements)
    return replace(canonical, strip=strip, placements=placements), delta
