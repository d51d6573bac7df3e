"""Quadratic maps with real circle trace.

These are the entire maps h(lambda) = conj(a) lambda^2 + b lambda + a with
a complex, b real; on the unit circle the trace conj(lambda) h(lambda) is
the real first-harmonic polynomial 2 Re(conj(a) lambda) + b.  Components
with nonnegative trace factor as c (lambda - d)(1 - conj(d) lambda) with
c >= 0 and |d| <= 1, so they have at most one circle zero.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .circle import CirclePoint, angle_dist, uniform_angles
from .errors import DomainInputError

TRACE_IMAG_TOL = 1e-12
RANK_TOL = 1e-10
UNIT_SNAP_TOL = 1e-10


def _snap_cosine(u):
    """Snap a trace-zero cosine to +-1 when rounding left it marginally
    inside: a boundary root of a unimodular factor must stay a single double
    root, not split into a spurious nearby pair (between which the exact
    trace would change sign)."""
    if abs(u - 1.0) <= 1e-12:
        return 1.0
    if abs(u + 1.0) <= 1e-12:
        return -1.0
    return u


class PositiveFactor:
    """Scalar factor c (lambda - d)(1 - conj(d) lambda), trace c|lambda-d|^2 >= 0."""

    __slots__ = ("c", "d")

    def __init__(self, c, d=0j):
        c = float(c)
        d = complex(d)
        if c < 0:
            raise DomainInputError(f"factor scale must be >= 0, got {c}")
        if abs(d) > 1 + 1e-12:
            raise DomainInputError(f"factor root must satisfy |d| <= 1, got {abs(d)}")
        self.c, self.d = c, d

    def coefficients(self):
        """(a, b) of the expanded quadratic: a = -c*d, b = c(1 + |d|^2)."""
        return -self.c * self.d, self.c * (1.0 + abs(self.d) ** 2)

    def trace(self, lam):
        return self.c * abs(lam - self.d) ** 2

    def __repr__(self):
        return f"PositiveFactor(c={self.c!r}, d={self.d!r})"


class TraceQuadratic:
    """Map h(lambda) = conj(a) lambda^2 + b lambda + a, a in C^n, b in R^n."""

    def __init__(self, a, b):
        self.a = np.asarray(a, dtype=complex).reshape(-1)
        self.b = np.asarray(b, dtype=float).reshape(-1)
        if self.a.shape != self.b.shape:
            raise DomainInputError("a and b must have the same length")
        self.n = self.a.size

    @classmethod
    def from_factors(cls, factors, signs=None):
        """Componentwise expansion of positive factors, optionally negated."""
        if signs is None:
            signs = [1] * len(factors)
        a, b = [], []
        for f, s in zip(factors, signs):
            aj, bj = f.coefficients()
            a.append(s * aj)
            b.append(s * bj)
        return cls(a, b)

    @classmethod
    def zero_padded(cls, n, entries):
        """Map with components {j: (a_j, b_j)} and zeros elsewhere."""
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n)
        for j, (aj, bj) in entries.items():
            a[j], b[j] = aj, bj
        return cls(a, b)

    def is_zero(self):
        return bool(np.all(self.a == 0) and np.all(self.b == 0))

    def component_is_zero(self, j):
        return self.a[j] == 0 and self.b[j] == 0

    def __call__(self, lam):
        lam = complex(lam)
        return np.conj(self.a) * lam * lam + self.b * lam + self.a

    def trace(self, lam):
        """Real vector conj(lambda) h(lambda) for |lambda| = 1."""
        lam = complex(lam)
        if abs(abs(lam) - 1.0) > 1e-9:
            raise DomainInputError(f"trace needs |lambda| = 1, got |{lam}| = {abs(lam)}")
        vals = np.conj(lam) * self(lam)
        if float(np.max(np.abs(vals.imag))) >= TRACE_IMAG_TOL:
            raise DomainInputError("circle trace has imaginary residue above tolerance")
        return vals.real

    def trace_grid(self, thetas):
        """Vectorized trace on angles, shape (m, n)."""
        lam = np.exp(1j * np.asarray(thetas, dtype=float))
        return 2.0 * np.real(lam[:, None] * np.conj(self.a)[None, :]) + self.b[None, :]

    def trace_grid_exact(self, thetas):
        """Trace on angles through the product form, free of cancellation.

        Components with circle roots satisfy
        trace = -4|a| sin((beta + beta0)/2) sin((beta - beta0)/2) with
        beta = theta + arg(conj(a)) and cos(beta0) = -b/(2|a|), which keeps
        the sign correct arbitrarily close to the roots; face formulas fed
        by this trace stay on the right branch inside singular windows.
        """
        thetas = np.asarray(thetas, dtype=float)
        out = np.empty((thetas.size, self.n))
        for j in range(self.n):
            aj, bj = complex(self.a[j]), float(self.b[j])
            if aj == 0:
                out[:, j] = bj
                continue
            mod = abs(aj)
            u = _snap_cosine(-bj / (2.0 * mod))
            beta = thetas + cmath.phase(np.conj(aj))
            if abs(u) > 1.0:
                out[:, j] = 2.0 * mod * np.cos(beta) + bj
                continue
            beta0 = math.acos(u)
            out[:, j] = (
                -4.0 * mod * np.sin(0.5 * (beta + beta0)) * np.sin(0.5 * (beta - beta0))
            )
        return out

    def trace_min_exact(self, j):
        """Exact minimum of the j-th trace over the circle: b_j - 2|a_j|."""
        return self.b[j] - 2.0 * abs(self.a[j])

    def circle_roots(self, j):
        """Circle zeros of the j-th component (without multiplicity).

        On the circle the component vanishes exactly where its real trace
        2|a| cos(theta + arg(conj(a))) + b does, so the zeros come from an
        arccos, which stays stable where the companion-matrix roots of the
        quadratic lose half the digits (double roots on the circle).
        """
        aj, bj = complex(self.a[j]), float(self.b[j])
        if aj == 0 and bj == 0:
            raise DomainInputError(f"component {j} is identically zero")
        if aj == 0:
            return []  # h_j = b*lambda has its only zero at the origin
        u = _snap_cosine(-bj / (2.0 * abs(aj)))
        if abs(u) > 1.0:
            return []
        base = math.acos(u)
        phi = cmath.phase(np.conj(aj))
        out = []
        for theta in (base - phi, -base - phi):
            pt = CirclePoint(theta)
            if not any(angle_dist(pt.angle, q.angle) < 1e-9 for q in out):
                out.append(pt)
        return out

    def trace_residual_at(self, j, point: CirclePoint):
        """|trace_j| at a circle point, the functional test for a root."""
        val = 2.0 * (np.conj(self.a[j]) * point.value).real + self.b[j]
        return abs(float(val))

    def nonneg_trace_mask(self, grid=1024, tol=TRACE_IMAG_TOL):
        """Per component: trace >= -tol on a uniform grid."""
        vals = self.trace_grid(uniform_angles(grid))
        return [bool(np.min(vals[:, j]) >= -tol) for j in range(self.n)]

    def is_nonneg_trace(self, grid=1024, tol=TRACE_IMAG_TOL):
        return all(self.nonneg_trace_mask(grid, tol))

    def factor_component(self, j):
        """Recover (c, d) for a nonnegative-trace component.

        Uses the exact trace minimum b - 2|a| as the certificate; the root d
        is snapped to the closed disc within UNIT_SNAP_TOL.
        """
        aj, bj = complex(self.a[j]), float(self.b[j])
        if aj == 0:
            if bj < -TRACE_IMAG_TOL:
                raise DomainInputError(f"component {j} has negative trace")
            return PositiveFactor(max(bj, 0.0), 0j)
        if self.trace_min_exact(j) < -TRACE_IMAG_TOL:
            raise DomainInputError(f"component {j} has sign-changing trace")
        ratio = bj / abs(aj)  # = (1 + |d|^2)/|d| >= 2
        disc = max(ratio * ratio - 4.0, 0.0)
        mod_d = (ratio - math.sqrt(disc)) / 2.0
        if mod_d > 1.0:
            if mod_d > 1.0 + UNIT_SNAP_TOL:
                raise DomainInputError(f"component {j} does not factor with |d| <= 1")
            mod_d = 1.0
        d = mod_d * cmath.exp(1j * cmath.phase(-aj))
        c = abs(aj) / mod_d if mod_d > 0 else max(bj, 0.0)
        return PositiveFactor(c, d)

    def negated(self):
        return TraceQuadratic(-self.a, -self.b)

    def scaled_rows(self):
        """Real 3 x n matrix of rows (Re a, Im a, b)."""
        return np.vstack([self.a.real, self.a.imag, self.b])

    def span_basis(self):
        """Orthonormal basis of span{Re a, Im a, b} via rank-revealing SVD."""
        if self.is_zero():
            raise DomainInputError("span basis of the zero map is undefined")
        rows = self.scaled_rows()
        u, s, vt = np.linalg.svd(rows, full_matrices=False)
        rank = int(np.sum(s > RANK_TOL * max(1.0, s[0])))
        return rank, vt[:rank]

    def components_dependent(self, j, k):
        """Linear dependence of components j, k over R (equivalently C)."""
        mat = np.vstack([self.scaled_rows()[:, j], self.scaled_rows()[:, k]])
        s = np.linalg.svd(mat, compute_uv=False)
        return bool(s[-1] <= RANK_TOL * max(1.0, s[0]))

    def linear_image(self, matrix):
        """Pushforward (V a, V b) under a real matrix V."""
        v = np.asarray(matrix, dtype=float)
        return TraceQuadratic(v @ self.a, v @ self.b)

    def to_json(self):
        return {
            "a": [[z.real, z.imag] for z in self.a],
            "b": self.b.tolist(),
        }

    @classmethod
    def from_json(cls, data):
        if "factors" in data:
            factors, signs = [], []
            for f in data["factors"]:
                d = f.get("d", [0.0, 0.0])
                factors.append(PositiveFactor(f["c"], complex(d[0], d[1])))
                signs.append(int(f.get("sign", 1)))
            return cls.from_factors(factors, signs)
        if "a" not in data or "b" not in data:
            raise DomainInputError("map descriptor needs either 'factors' or 'a'/'b'")
        a = [complex(re, im) for re, im in data["a"]]
        return cls(a, data["b"])
