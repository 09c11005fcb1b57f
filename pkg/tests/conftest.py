"""Shared helpers: random set instances of every variant through a common
point, plus concrete shifted/scaled counterparts for the projector identities."""

import numpy as np

from aamr import (AffineSubspace, Ball, Box, Halfspace, Hyperplane,
                  LinearSubspace, Translate)

VARIANTS = ("ball", "box", "halfspace", "hyperplane", "subspace", "affine",
            "translate")


def make_variant(kind, rng, n, point):
    """A random set of the given kind that contains ``point``."""
    p = np.asarray(point, dtype=float)
    if kind == "ball":
        center = p + 0.4 * rng.standard_normal(n)
        radius = float(np.linalg.norm(center - p)) + rng.uniform(0.3, 1.5)
        return Ball(center, radius)
    if kind == "box":
        return Box(p - rng.uniform(0.3, 1.5, n), p + rng.uniform(0.3, 1.5, n))
    if kind == "halfspace":
        a = rng.standard_normal(n)
        return Halfspace(a, float(a @ p) + rng.uniform(0.2, 1.0))
    if kind == "hyperplane":
        a = rng.standard_normal(n)
        return Hyperplane(a, float(a @ p))
    if kind == "subspace":
        cols = [rng.standard_normal(n) for _ in range(max(1, n // 2))]
        if np.linalg.norm(p) > 0:
            cols.insert(0, p)
        return LinearSubspace(np.stack(cols, axis=1))
    if kind == "affine":
        d = max(1, n // 2)
        return AffineSubspace(p, rng.standard_normal((n, d)))
    if kind == "translate":
        shift = rng.standard_normal(n)
        inner = make_variant("ball", rng, n, p + shift)
        return Translate(inner, shift)
    raise ValueError(kind)


def shifted_set(s, y):
    """The concrete set ``y + s`` built variant by variant."""
    y = np.asarray(y, dtype=float)
    if isinstance(s, Ball):
        return Ball(s.center + y, s.radius)
    if isinstance(s, Box):
        return Box(s.lower + y, s.upper + y)
    if isinstance(s, Halfspace):
        return Halfspace(s.normal, s.offset + float(s.normal @ y))
    if isinstance(s, Hyperplane):
        return Hyperplane(s.normal, s.offset + float(s.normal @ y))
    if isinstance(s, LinearSubspace):
        return AffineSubspace(y, s.basis)
    if isinstance(s, AffineSubspace):
        return AffineSubspace(s.offset + y, s.direction.basis)
    if isinstance(s, Translate):
        return Translate(s.inner, s.shift - y)
    raise TypeError(type(s))


def scaled_set(s, lam):
    """The concrete set ``lam * s`` (lam != 0) built variant by variant."""
    if isinstance(s, Ball):
        return Ball(lam * s.center, abs(lam) * s.radius)
    if isinstance(s, Box):
        lo, hi = lam * s.lower, lam * s.upper
        return Box(np.minimum(lo, hi), np.maximum(lo, hi))
    if isinstance(s, Halfspace):
        if lam > 0:
            return Halfspace(s.normal, lam * s.offset)
        return Halfspace(-s.normal, -lam * s.offset)
    if isinstance(s, Hyperplane):
        return Hyperplane(s.normal, lam * s.offset)
    if isinstance(s, LinearSubspace):
        return LinearSubspace(s.basis)
    if isinstance(s, AffineSubspace):
        return AffineSubspace(lam * s.offset, s.direction.basis)
    if isinstance(s, Translate):
        return Translate(scaled_set(s.inner, lam), lam * s.shift)
    raise TypeError(type(s))
