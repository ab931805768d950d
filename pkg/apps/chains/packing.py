"""
Vectorized layout of chains in the canonical strip ``0 <= y <= width``.

A chain is given by the rotation angle and reflection bit of each disk.
Every disk is scaled to touch both strip lines and then pushed as far
right as it can go while still meeting its left neighbour. The push is the
horizontal reach of the Minkowski difference of the two disks,

    g = min_s h(1, s) = min_phi h(cos phi, sin phi) / cos phi,

which is convex in ``s`` and therefore unimodal in ``phi``.
"""

import math
from dataclasses import dataclass

import numpy as np
from constance import config

from apps.geometry.models import PlacedBatch, Placement
from apps.geometry.search import golden_minimize

AXES = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
EDGE = math.pi / 2 - 1e-9


def _unit_batch(shape, rotation, reflect):
    count = len(rotation)
    return PlacedBatch(shape, np.ones(count), rotation, np.zeros((count, 2)), reflect)


@dataclass
class StripFit:
    """Scale, lift and horizontal extents of disks touching both lines."""

    scale: np.ndarray
    dy: np.ndarray
    left: np.ndarray
    right: np.ndarray


def strip_fit(shape, rotation, reflect, width=1.0) -> StripFit:
    rotation = np.asarray(rotation, dtype=float)
    reflect = np.broadcast_to(np.asarray(reflect, dtype=bool), rotation.shape)
    batch = _unit_batch(shape, rotation.ravel(), reflect.ravel())
    values = batch.support_values(np.broadcast_to(AXES, (len(batch), 4, 2)))
    right, left, up, down = values.T
    scale = width / (up + down)
    shape_ = rotation.shape
    return StripFit(
        scale=scale.reshape(shape_),
        dy=(scale * down).reshape(shape_),
        left=(scale * left).reshape(shape_),
        right=(scale * right).reshape(shape_),
    )


def greedy_steps(shape, first, second, tol=None):
    """
    Largest horizontal shift of ``second`` relative to ``first`` that keeps
    the two disks intersecting.

    ``first`` and ``second`` are ``(scale, rotation, dy, reflect)`` tuples of
    flat arrays; the disks sit at ``dx = 0``.
    """
    tol = config.GOLDEN_TOLERANCE if tol is None else tol
    s1, r1, y1, f1 = (np.asarray(v) for v in first)
    s2, r2, y2, f2 = (np.asarray(v) for v in second)
    a = _unit_batch(shape, r1, f1)
    b = _unit_batch(shape, r2, f2)
    lift = y1 - y2

    def reach(phi):
        u = np.stack([np.cos(phi), np.sin(phi)], axis=-1)[:, None, :]
        total = s1 * a.support_values(u)[:, 0] + s2 * b.support_values(-u)[:, 0]
        return (total + lift * np.sin(phi)) / np.cos(phi)

    count = len(s1)
    _phi, value = golden_minimize(
        reach, np.full(count, -EDGE), np.full(count, EDGE), tol=tol
    )
    return value


@dataclass
class Layout:
    """Chains laid out row by row; arrays are shaped ``(rows, disks)``."""

    rotation: np.ndarray
    reflect: np.ndarray
    scale: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    left: np.ndarray
    right: np.ndarray
    width: float

    @property
    def start(self):
        return np.min(self.dx - self.left, axis=1)

    @property
    def end(self):
        return np.max(self.dx + self.right, axis=1)

    @property
    def lengths(self):
        return (self.end - self.start) / self.width

    def placements(self, row=0, dx=None):
        dx = self.dx[row] if dx is None else dx
        return tuple(
            Placement(
                scale=self.scale[row, i],
                rotation=self.rotation[row, i],
                dx=dx[i],
                dy=self.dy[row, i],
                reflect=bool(self.reflect[row, i]),
            )
            for i in range(self.rotation.shape[1])
        )


def layout(shape, rotation, reflect=False, width=1.0, tol=None) -> Layout:
    rotation = np.atleast_2d(np.asarray(rotation, dtype=float))
    reflect = np.broadcast_to(np.asarray(reflect, dtype=bool), rotation.shape)
    rows, count = rotation.shape
    fit = strip_fit(shape, rotation, reflect, width)
    dx = np.zeros((rows, count))
    if count > 1:
        first = (
            fit.scale[:, :-1].ravel(),
            rotation[:, :-1].ravel(),
            fit.dy[:, :-1].ravel(),
            reflect[:, :-1].ravel(),
        )
        second = (
            fit.scale[:, 1:].ravel(),
            rotation[:, 1:].ravel(),
            fit.dy[:, 1:].ravel(),
            reflect[:, 1:].ravel(),
        )
        steps = greedy_steps(shape, first, second, tol).reshape(rows, count - 1)
        dx[:, 1:] = np.cumsum(steps, axis=1)
    return Layout(
        rotation=rotation,
        reflect=np.array(reflect),
        scale=fit.scale,
        dx=dx,
        dy=fit.dy,
        left=fit.left,
        right=fit.right,
        width=float(width),
    )


def chain_lengths(shape, rotation, reflect=False):
    return layout(shape, rotation, reflect).lengths


def pair_steps(shape, rotation, reflect):
    """Greedy steps between every ordered pair of the given disk states."""
    rotation = np.asarray(rotation, dtype=float)
    reflect = np.asarray(reflect, dtype=bool)
    fit = strip_fit(shape, rotation, reflect)
    count = len(rotation)
    i, j = np.meshgrid(np.arange(count), np.arange(count), indexing="ij")
    i, j = i.ravel(), j.ravel()
    steps = greedy_steps(
        shape,
        (fit.scale[i], rotation[i], fit.dy[i], reflect[i]),
        (fit.scale[j], rotation[j], fit.dy[j], reflect[j]),
    )
    return steps.reshape(count, count), fit
