"""
Deciding whether two convex disks are affine images or similar copies of
each other.

A fit starts from moment matching (centroids and second moments), tries
rotational seeds around it and refines every start by least squares on
support-function samples. The reported residual is the exact Hausdorff
distance of the fitted image to the target, relative to the target's
diameter.
"""

import logging
import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from django.utils.translation import gettext_lazy as _
from scipy.optimize import least_squares

from apps.chains.services import stretch_bounds
from apps.classify.choices import FitMode, Ordering, Relation
from apps.classify.models import FitConfig, FitResult, StretchComparison, Verdict
from apps.core.utils import parallel_map
from apps.geometry import services as geometry
from apps.geometry.choices import FamilyTag
from apps.geometry.models import AffineMap, affine_shape, rotation_matrix
from apps.geometry.models.transforms import MIRROR
from apps.geometry.search import circle_directions, sample_angles
from apps.geometry.validators import PositiveNumberValidator

logger = logging.getLogger(__name__)

DETERMINANT_FLOOR = 1e-12
UNDECIDED_BAND = 10.0
# mirrored fits must win by this much over unmirrored ones
MIRROR_SLACK = 1e-9
LSQ_TOLERANCE = 1e-12

INCOMPARABLE = "classes incomparable"
POSSIBLY_NESTED = "classes distinct, possibly nested"


def _config(cfg):
    return cfg if cfg is not None else FitConfig.from_settings()


@dataclass(frozen=True)
class Moments:
    area: float
    centroid: np.ndarray
    covariance: np.ndarray


def moments(shape, samples=4096) -> Moments:
    """Area, centroid and covariance of the region bounded by ``shape``."""
    pts = geometry.boundary_samples(shape, samples)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    centroid = np.array(
        [((x + xn) * cross).sum() / (6.0 * area), ((y + yn) * cross).sum() / (6.0 * area)]
    )
    sxx = ((x * x + x * xn + xn * xn) * cross).sum() / 12.0
    syy = ((y * y + y * yn + yn * yn) * cross).sum() / 12.0
    sxy = ((x * yn + 2.0 * x * y + 2.0 * xn * yn + xn * y) * cross).sum() / 24.0
    second = np.array([[sxx, sxy], [sxy, syy]]) / area
    return Moments(float(area), centroid, second - np.outer(centroid, centroid))


def _sqrtm(matrix):
    values, vectors = np.linalg.eigh(matrix)
    return vectors @ np.diag(np.sqrt(np.maximum(values, 0.0))) @ vectors.T


@dataclass(frozen=True)
class _Start:
    seed: int
    x0: np.ndarray
    reflect: bool


def _affine_params(x, _reflect):
    return x[:4].reshape(2, 2), x[4:]


def _similarity_params(x, reflect):
    a, b = x[0], x[1]
    linear = np.array([[a, -b], [b, a]])
    return (linear @ MIRROR if reflect else linear), x[2:]


def _relative_hausdorff(a_shape, b_shape, linear, offset, diam):
    if abs(np.linalg.det(linear)) <= DETERMINANT_FLOOR * diam * diam:
        return math.inf
    image = affine_shape(a_shape, linear, offset)
    return geometry.hausdorff(image, b_shape) / diam


def _refine(a_shape, b_shape, unpack, cfg, start: _Start):
    dirs = circle_directions(sample_angles(cfg.directions))
    target = b_shape.support_values(dirs)
    diam = geometry.diameter(b_shape)

    def gaps(x):
        linear, offset = unpack(x, start.reflect)
        return (a_shape.support_values(dirs @ linear) + dirs @ offset - target) / diam

    result = least_squares(
        gaps,
        start.x0,
        ftol=LSQ_TOLERANCE,
        xtol=LSQ_TOLERANCE,
        gtol=LSQ_TOLERANCE,
        max_nfev=cfg.max_evaluations,
    )
    linear, offset = unpack(result.x, start.reflect)
    residual = _relative_hausdorff(a_shape, b_shape, linear, offset, diam)
    logger.debug(
        _("Fit start %(seed)s: residual %(residual)s after %(nfev)s evaluations"),
        {"seed": start.seed, "residual": residual, "nfev": result.nfev},
    )
    return residual, start, result


def _best_fit(a_shape, b_shape, starts, unpack, cfg) -> FitResult:
    runs = parallel_map(partial(_refine, a_shape, b_shape, unpack, cfg), starts)
    residual, start, result = min(
        runs, key=lambda run: (run[0] + (MIRROR_SLACK if run[1].reflect else 0.0), run[1].seed)
    )
    linear, offset = unpack(result.x, start.reflect)
    fit = FitResult(
        transform=AffineMap.from_arrays(linear, offset),
        residual=float(residual),
        reflect=start.reflect,
        seed=start.seed,
        starts=len(starts),
        evaluations=sum(run[2].nfev for run in runs),
        converged=bool(result.success),
    )
    if not fit.converged:
        logger.warning(
            _("Fit of %(a)s onto %(b)s did not converge; keeping best found %(residual)s"),
            {"a": a_shape.spec(), "b": b_shape.spec(), "residual": fit.residual},
        )
    return fit


def _seed_angles(cfg):
    return [2.0 * math.pi * s / cfg.seeds for s in range(cfg.seeds)]


def fit_affine(a_shape, b_shape, cfg=None) -> FitResult:
    """
    Invertible affine map taking ``a_shape`` closest to ``b_shape``.

    Starts send the centroid and covariance of one shape onto the other's,
    ``S_b R S_a^-1``, with ``R`` running over the seed rotations with and
    without the mirror.
    """
    cfg = _config(cfg)
    ma, mb = moments(a_shape, cfg.moment_samples), moments(b_shape, cfg.moment_samples)
    whiten = np.linalg.inv(_sqrtm(ma.covariance))
    colour = _sqrtm(mb.covariance)
    starts = []
    for reflect in (False, True):
        for theta in _seed_angles(cfg):
            turn = rotation_matrix(theta) @ MIRROR if reflect else rotation_matrix(theta)
            linear = colour @ turn @ whiten
            offset = mb.centroid - linear @ ma.centroid
            x0 = np.concatenate([linear.ravel(), offset])
            starts.append(_Start(len(starts), x0, reflect))
    fit = _best_fit(a_shape, b_shape, starts, _affine_params, cfg)
    return FitResult(
        transform=fit.transform,
        residual=fit.residual,
        reflect=fit.transform.det < 0,
        seed=fit.seed,
        starts=fit.starts,
        evaluations=fit.evaluations,
        converged=fit.converged,
    )


def fit_similarity(a_shape, b_shape, allow_reflection=True, cfg=None) -> FitResult:
    """
    Scale, rotation and translation taking ``a_shape`` closest to
    ``b_shape``; with ``allow_reflection`` the mirrored branch
    ``(x, y) -> (-x, y)`` is tried as well and the better branch wins.
    """
    cfg = _config(cfg)
    ma, mb = moments(a_shape, cfg.moment_samples), moments(b_shape, cfg.moment_samples)
    scale = math.sqrt(mb.area / ma.area)
    branches = (False, True) if allow_reflection else (False,)
    starts = []
    for reflect in branches:
        for theta in _seed_angles(cfg):
            a, b = scale * math.cos(theta), scale * math.sin(theta)
            linear, _offset = _similarity_params(np.array([a, b, 0.0, 0.0]), reflect)
            offset = mb.centroid - linear @ ma.centroid
            starts.append(_Start(len(starts), np.array([a, b, *offset]), reflect))
    return _best_fit(a_shape, b_shape, starts, _similarity_params, cfg)


def is_round(shape, tol) -> bool:
    """Whether the support function about the centroid is constant within ``tol``."""
    dirs = circle_directions(sample_angles(256))
    centre = moments(shape).centroid
    values = shape.support_values(dirs) - dirs @ centre
    return float(values.max() - values.min()) <= tol * geometry.diameter(shape)


def _nesting_note(a_shape, b_shape, tau, cfg):
    """
    Similarity classes of a circle and of an ellipse are nested: the
    stretch mapping the circle onto the ellipse carries every realization
    by similar circles to one by homothetic ellipses.
    """
    a_round, b_round = is_round(a_shape, tau), is_round(b_shape, tau)
    if a_round == b_round:
        return POSSIBLY_NESTED
    if fit_affine(a_shape, b_shape, cfg).residual >= tau:
        return POSSIBLY_NESTED
    return "G^sim(A) within G^sim(B)" if a_round else "G^sim(B) within G^sim(A)"


def classify_pair(a_shape, b_shape, mode, tau=None, allow_reflection=True, cfg=None) -> Verdict:
    """
    Verdict from the fit residual: below ``tau`` the classes agree, above
    ``10 tau`` they differ, in between the pair is undecided.
    """
    mode = FitMode(mode)
    cfg = _config(cfg)
    tau = cfg.tau if tau is None else float(tau)
    PositiveNumberValidator("tau")(tau)
    if mode == FitMode.HOM:
        fit = fit_affine(a_shape, b_shape, cfg)
        close, far = Relation.AFFINE_EQUIVALENT, Relation.NOT_AFFINE_EQUIVALENT
    else:
        fit = fit_similarity(a_shape, b_shape, allow_reflection, cfg)
        close = Relation.SIMILAR_TO_REFLECTION if fit.reflect else Relation.SIMILAR
        far = Relation.NOT_SIMILAR

    note = ""
    if fit.residual < tau:
        relation = close
    elif fit.residual > UNDECIDED_BAND * tau:
        relation = far
        if mode == FitMode.HOM:
            note = INCOMPARABLE
        else:
            note = _nesting_note(a_shape, b_shape, tau, cfg)
    else:
        relation = Relation.UNDECIDED
    logger.info(
        _("%(a)s vs %(b)s (%(mode)s): %(relation)s, residual %(residual)s"),
        {
            "a": a_shape.spec(),
            "b": b_shape.spec(),
            "mode": mode.value,
            "relation": relation.value,
            "residual": fit.residual,
        },
    )
    return Verdict(mode, relation, fit.residual, tau, fit, note)


def stretch_compare(
    a_shape, b_shape, n_max, chain_cfg=None, family=FamilyTag.SIM
) -> StretchComparison:
    """
    Orders the stretches of two shapes when one certified lower bound
    clears the other shape's single-disk upper bound; the stretch never
    exceeds the length of a one-disk chain.
    """
    a = stretch_bounds(a_shape, n_max, chain_cfg, family)
    b = stretch_bounds(b_shape, n_max, chain_cfg, family)
    if a.certified_lower > b.single.upper:
        ordering = Ordering.A_LONGER
    elif b.certified_lower > a.single.upper:
        ordering = Ordering.B_LONGER
    else:
        ordering = Ordering.INCONCLUSIVE
    return StretchComparison(a, b, ordering)


def grid_constant(b_shape, n_max, chain_cfg=None) -> float:
    """Regularity constant ``heuristic stretch + single-disk bound + 1`` of ``b_shape``."""
    estimate = stretch_bounds(b_shape, n_max, chain_cfg, FamilyTag.SIM)
    return estimate.heuristic + estimate.single.upper + 1.0
