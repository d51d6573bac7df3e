"""Points on the unit circle and angle utilities.

Angles live in [0, 2*pi); two circle points are considered equal when their
angles differ by less than ANGLE_TOL modulo 2*pi.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

TWO_PI = 2.0 * math.pi

# Equality tolerance, in radians, for circle points.  Needed to group
# coincident atom locations deterministically.
ANGLE_TOL = 1e-12


def wrap_angle(theta: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        t -= TWO_PI
    return t


def angle_dist(t1: float, t2: float) -> float:
    """Distance between two angles modulo 2*pi."""
    d = abs(wrap_angle(t1) - wrap_angle(t2))
    return min(d, TWO_PI - d)


class CirclePoint:
    """A point exp(i*theta) on the unit circle, stored by its angle."""

    __slots__ = ("angle",)
    __hash__ = None  # tolerant equality is incompatible with hashing

    def __init__(self, angle: float):
        self.angle = wrap_angle(angle)

    @classmethod
    def from_complex(cls, z: complex) -> "CirclePoint":
        if z == 0:
            raise ValueError("cannot place 0 on the unit circle")
        return cls(cmath.phase(complex(z)))

    @property
    def value(self) -> complex:
        return cmath.exp(1j * self.angle)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return angle_dist(self.angle, other.angle) < ANGLE_TOL

    def __repr__(self) -> str:
        return f"CirclePoint({self.angle!r})"


def uniform_angles(count: int) -> np.ndarray:
    """Uniform grid 2*pi*k/count, k = 0..count-1."""
    return TWO_PI * np.arange(count) / count


def angles_avoiding(count: int, excluded, window: float) -> np.ndarray:
    """Uniform grid with angles within `window` of any excluded angle dropped."""
    thetas = uniform_angles(count)
    if not excluded:
        return thetas
    keep = np.ones(count, dtype=bool)
    for s in excluded:
        d = np.abs(thetas - wrap_angle(s))
        d = np.minimum(d, TWO_PI - d)
        keep &= d > window
    return thetas[keep]
