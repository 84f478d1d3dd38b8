"""Shared helpers for the test suite."""

import numpy as np

from uosfit import DataSet


def rel_err(a, b, floor=1e-15):
    """Relative disagreement with an absolute cushion for true zeros."""
    a, b = float(a), float(b)
    return abs(a - b) / max(abs(a), abs(b), floor)


def close_rel(a, b, tol, floor=1e-15):
    return abs(float(a) - float(b)) <= tol * max(abs(a), abs(b)) + floor


def random_dataset(rng, m, ambient):
    return DataSet(rng.standard_normal((m, ambient)))


def lines_dataset(rng, directions, points_per_line, noise=0.0):
    """Points on the given unit directions through the origin, plus noise."""
    blocks = []
    for d in directions:
        d = np.asarray(d, dtype=float)
        d = d / np.linalg.norm(d)
        coeffs = rng.standard_normal(points_per_line)
        pts = np.outer(coeffs, d)
        if noise > 0:
            pts = pts + noise * rng.standard_normal(pts.shape)
        blocks.append(pts)
    return DataSet(np.vstack(blocks))


def sis_signals_from_generator(rng, gen, structure, count):
    """Random combinations of circular shifts (by the structure step) of gen."""
    sigs = []
    for _ in range(count):
        coeffs = rng.standard_normal(structure.num_freqs)
        sig = np.zeros_like(np.asarray(gen, dtype=float))
        for t, c in enumerate(coeffs):
            sig = sig + c * np.roll(gen, structure.shift_step * t)
        sigs.append(sig)
    return np.array(sigs)
