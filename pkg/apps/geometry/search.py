"""
Vectorized one-dimensional searches.

Every routine works element-wise on arrays of brackets so that thousands of
independent problems (pairs of disks, chain steps, chords) advance together.
"""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TWO_PI = 2.0 * math.pi


def golden_minimize(func, lo, hi, tol=1e-12, max_iter=200):
    """
    Minimize a unimodal function on each bracket ``[lo, hi]``.

    ``func`` receives an array shaped like the broadcast brackets and
    returns values of the same shape. Returns ``(argmin, minimum)``.
    """
    lo, hi = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    )
    lo = lo.copy()
    hi = hi.copy()
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1 = func(x1)
    f2 = func(x2)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        probe = np.where(left, hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo))
        fprobe = func(probe)
        x1, x2 = np.where(left, probe, x2), np.where(left, x1, probe)
        f1, f2 = np.where(left, fprobe, f2), np.where(left, f1, fprobe)
    take_first = f1 <= f2
    return np.where(take_first, x1, x2), np.where(take_first, f1, f2)


def circle_directions(angles):
    angles = np.asarray(angles, dtype=float)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def sample_angles(count):
    return np.arange(count, dtype=float) * (TWO_PI / count)


def refine_periodic_minimum(func, batch, samples, tol=1e-12, candidates=2):
    """
    Global minimum of a periodic function of an angle.

    ``func`` maps angles shaped ``(batch, K)`` to values of the same shape.
    The function is sampled on a uniform grid, and the best ``candidates``
    local minima of the samples are refined by golden-section search inside
    the two adjacent grid cells. Returns ``(angle, value)`` shaped ``(batch,)``.
    """
    grid = sample_angles(samples)
    step = TWO_PI / samples
    values = func(np.broadcast_to(grid, (batch, samples)))

    local = (values <= np.roll(values, 1, axis=1)) & (
        values <= np.roll(values, -1, axis=1)
    )
    picks = []
    masked = np.where(local, values, np.inf)
    for _ in range(candidates):
        index = np.argmin(masked, axis=1)
        empty = ~np.isfinite(masked[np.arange(batch), index])
        if picks:
            index = np.where(empty, picks[0], index)
        else:
            index = np.where(empty, np.argmin(values, axis=1), index)
        picks.append(index)
        distance = np.abs(np.arange(samples)[None, :] - index[:, None])
        distance = np.minimum(distance, samples - distance)
        masked = np.where(distance <= 1, np.inf, masked)

    centers = grid[np.stack(picks, axis=1)]
    best_angle, best_value = golden_minimize(
        func, centers - step, centers + step, tol=tol
    )
    column = np.argmin(best_value, axis=1)
    rows = np.arange(batch)
    angle = np.mod(best_angle[rows, column], TWO_PI)
    return angle, best_value[rows, column]
