"""Holomorphic maps reconstructed from their boundary measures.

The map is recovered through the circle integral of the kernel
(zeta + lambda)/(zeta - lambda) against the measure, up to the imaginary
constant at the origin.  The real part at radius r is the Poisson extension
of the measure; its radial limit equals the density almost everywhere.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .circle import CirclePoint, angle_dist
from .errors import EvaluationDomainError
from .measures import BoundaryMeasureTuple, total_mass
from .quadrature import integrate_circle

# hard guard; radial limits have their own operation
RADIUS_GUARD = 1e-9


class HerglotzMap:
    """Holomorphic map on the disc with a prescribed boundary measure."""

    def __init__(self, mu: BoundaryMeasureTuple, im0=None):
        self.mu = mu
        self.n = mu.n
        self.im0 = np.zeros(self.n) if im0 is None else np.asarray(im0, dtype=float)
        if self.im0.shape != (self.n,):
            raise EvaluationDomainError("im0 dimension does not match the measure")

    def _check_inside(self, lam):
        lam = complex(lam)
        if abs(lam) > 1.0 - RADIUS_GUARD:
            raise EvaluationDomainError(
                f"|lambda| = {abs(lam):.12f} violates the guard 1 - 1e-9; "
                "use radial_real_limit for boundary data"
            )
        return lam

    def _density_integral(self, lam, kernel, rel_tol):
        ac = self.mu.ac
        if ac.kind == "zero":
            return np.zeros(self.n, dtype=complex)

        def fn(thetas):
            zeta = np.exp(1j * thetas)
            return ac(thetas).astype(complex) * kernel(zeta, lam)[:, None]

        breaks = [cmath.phase(lam)] if abs(lam) > 0.25 else []
        return integrate_circle(
            fn,
            singular_points=ac.singular_points,
            breakpoints=breaks,
            rel_tol=rel_tol,
        )

    def eval(self, lam, rel_tol=1e-9):
        """Value at lam, |lam| <= 1 - 1e-9: atoms contribute exact kernel
        terms, the density an adaptive quadrature at relative tolerance."""
        lam = self._check_inside(lam)
        acc = self._density_integral(
            lam, lambda zeta, l: (zeta + l) / (zeta - l), rel_tol
        )
        for atom in self.mu.atoms:
            zeta = atom.point.value
            acc = acc + atom.weight * ((zeta + lam) / (zeta - lam))
        return acc / (2.0 * math.pi) + 1j * self.im0

    def eval_derivative(self, lam, rel_tol=1e-9):
        """Complex derivative at lam via the kernel derivative 2 zeta/(zeta-lambda)^2."""
        lam = self._check_inside(lam)
        acc = self._density_integral(
            lam, lambda zeta, l: 2.0 * zeta / (zeta - l) ** 2, rel_tol
        )
        for atom in self.mu.atoms:
            zeta = atom.point.value
            acc = acc + atom.weight * (2.0 * zeta / (zeta - lam) ** 2)
        return acc / (2.0 * math.pi)

    def eval_grid(self, lams, rel_tol=1e-9):
        return np.array([self.eval(l, rel_tol) for l in lams])

    def radial_real_limit(self, point: CirclePoint):
        """Boundary value of the real part at a regular circle point.

        Equals the density there; atoms and declared singular points are
        rejected by name since the limit does not exist or is not given by
        the density at those angles.
        """
        for atom in self.mu.atoms:
            if angle_dist(atom.point.angle, point.angle) < 1e-9:
                raise EvaluationDomainError(
                    f"radial limit blocked by an atom at angle {atom.point.angle!r}"
                )
        for s in self.mu.ac.singular_points:
            if angle_dist(s, point.angle) < 1e-9:
                raise EvaluationDomainError(
                    f"radial limit blocked by a declared singular point at {s!r}"
                )
        return self.mu.ac.at(point.angle)

    def radial_convergence(self, point: CirclePoint, radii=(0.9, 0.99, 0.999, 0.9999, 1 - 1e-5)):
        """|Re eval(r lambda0) - density(lambda0)| along a radius sequence."""
        target = self.radial_real_limit(point)
        lam0 = point.value
        return [
            float(np.max(np.abs(self.eval(r * lam0).real - target)))
            for r in radii
        ]

    def mass(self):
        return total_mass(self.mu)


def poincare_distance(sigma1, sigma2):
    """Hyperbolic distance artanh |(s1 - s2)/(1 - conj(s2) s1)| in the disc."""
    s1, s2 = complex(sigma1), complex(sigma2)
    if abs(s1) >= 1.0 or abs(s2) >= 1.0:
        raise EvaluationDomainError("poincare distance needs both points in the open disc")
    num = abs(s1 - s2)
    den = abs(1.0 - s2.conjugate() * s1)
    return math.atanh(num / den)


def fourier_eval_oracle(mu: BoundaryMeasureTuple, im0=None, terms=300, grid=4096):
    """Independent evaluator: truncated Taylor series of the circle integral
    with coefficients from a trapezoidal Fourier transform of the density
    plus exact atom contributions.  Used as a cross-check oracle only."""
    im0 = np.zeros(mu.n) if im0 is None else np.asarray(im0, dtype=float)
    thetas = 2.0 * math.pi * np.arange(grid) / grid
    vals = mu.ac(thetas)  # (grid, n)
    phases = np.exp(-1j * np.outer(np.arange(terms + 1), thetas))  # (terms+1, grid)
    coeffs = (phases @ vals) / grid  # (terms+1, n): (1/2pi) integral g e^{-ik t}
    for atom in mu.atoms:
        zeta = atom.point.value
        for k in range(terms + 1):
            coeffs[k] += atom.weight * zeta ** (-k) / (2.0 * math.pi)

    def evaluate(lam):
        lam = complex(lam)
        powers = lam ** np.arange(terms + 1)
        out = coeffs[0] + 2.0 * (powers[1:] @ coeffs[1:])
        return out + 1j * im0

    return evaluate
