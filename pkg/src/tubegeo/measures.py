"""Tuples of real Borel measures on the unit circle.

A measure tuple is stored as an absolutely continuous part (an evaluable
density with declared singular angles) plus a finite list of vector-weighted
atoms.  Singular parts are restricted to finite atomic measures; general
singular measures are supported only through atomic approximations chosen by
the caller.

The spherical decomposition splits the tuple as g dL + rho dnu with nu a
positive scalar measure and rho unit-sphere valued: for atoms this means
nu puts mass |w| at each atom location and rho points along w/|w|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import ANGLE_TOL, CirclePoint, angle_dist, angles_avoiding, wrap_angle
from .errors import DomainInputError
from .quadrature import integrate_circle, integrate_norm


class DensityFn:
    """Evaluable density from circle angles to R^n.

    Piecewise continuous with a finite list of declared singular angles where
    it may be unbounded (but integrable) or discontinuous.  The callable takes
    an angle array of shape (m,) and returns values of shape (m, n).
    """

    def __init__(self, n, fn, singular_points=(), kind=None, params=None):
        self.n = int(n)
        self._fn = fn
        self.singular_points = tuple(wrap_angle(s) for s in singular_points)
        self.kind = kind
        self.params = params

    def __call__(self, thetas):
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        out = np.asarray(self._fn(thetas), dtype=float)
        if out.shape != (thetas.size, self.n):
            raise DomainInputError(
                f"density returned shape {out.shape}, expected {(thetas.size, self.n)}"
            )
        return out

    def at(self, theta):
        """Value at a single angle, shape (n,)."""
        return self(np.array([float(theta)]))[0]

    def is_serializable(self):
        return self.kind is not None

    def to_json(self):
        if not self.is_serializable():
            raise DomainInputError("density has no registered kind; cannot serialize")
        return {
            "kind": self.kind,
            "params": self.params or {},
            "singular_points": list(self.singular_points),
        }

    def check_integrable(self, diverge_cap=1e6):
        """Adaptive quadrature of the norm; raises NonIntegrableDensity when
        panel sums diverge near a declared singular point."""
        return integrate_norm(
            self, singular_points=self.singular_points, diverge_cap=diverge_cap
        )


# --- density registry -------------------------------------------------------

DENSITY_BUILDERS = {}


def register_density_kind(kind, builder):
    DENSITY_BUILDERS[kind] = builder


def density_from_json(data):
    kind = data.get("kind")
    if kind not in DENSITY_BUILDERS:
        raise DomainInputError(f"unknown density kind {kind!r}")
    return DENSITY_BUILDERS[kind](
        data.get("params") or {}, tuple(data.get("singular_points") or ())
    )


def zero_density(n):
    return DensityFn(
        n, lambda th: np.zeros((th.size, n)), kind="zero", params={"n": n}
    )


def constant_density(values):
    vals = np.asarray(values, dtype=float)
    return DensityFn(
        vals.size,
        lambda th: np.tile(vals, (th.size, 1)),
        kind="constant",
        params={"values": vals.tolist()},
    )


def trig_density(const=None, cos=None, sin=None, singular_points=()):
    """First-harmonic density g_j(theta) = const_j + cos_j*cos(theta) + sin_j*sin(theta)."""
    parts = [p for p in (const, cos, sin) if p is not None]
    if not parts:
        raise DomainInputError("trig density needs at least one coefficient list")
    n = len(parts[0])
    c0 = np.asarray(const if const is not None else np.zeros(n), dtype=float)
    c1 = np.asarray(cos if cos is not None else np.zeros(n), dtype=float)
    s1 = np.asarray(sin if sin is not None else np.zeros(n), dtype=float)

    def fn(th):
        return (
            c0[None, :]
            + np.cos(th)[:, None] * c1[None, :]
            + np.sin(th)[:, None] * s1[None, :]
        )

    return DensityFn(
        n, fn, singular_points,
        kind="trig",
        params={"const": c0.tolist(), "cos": c1.tolist(), "sin": s1.tolist()},
    )


def linear_image_density(matrix, inner):
    mat = np.asarray(matrix, dtype=float)

    def fn(th):
        return inner(th) @ mat.T

    params = None
    kind = None
    if inner.is_serializable():
        kind = "linear_image"
        params = {"matrix": mat.tolist(), "inner": inner.to_json()}
    return DensityFn(mat.shape[0], fn, inner.singular_points, kind=kind, params=params)


register_density_kind("zero", lambda p, s: zero_density(int(p["n"])))
register_density_kind("constant", lambda p, s: constant_density(p["values"]))
register_density_kind(
    "trig",
    lambda p, s: trig_density(p.get("const"), p.get("cos"), p.get("sin"), s),
)
register_density_kind(
    "linear_image",
    lambda p, s: linear_image_density(p["matrix"], density_from_json(p["inner"])),
)


# --- atoms ------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    point: CirclePoint
    weight: np.ndarray  # shape (n,)


def merge_atoms(raw, n):
    """Sort by angle, merge coincident locations, drop zero weights."""
    items = sorted(
        ((a.point.angle, np.asarray(a.weight, dtype=float)) for a in raw),
        key=lambda t: t[0],
    )
    merged = []
    for ang, w in items:
        if w.shape != (n,):
            raise DomainInputError(f"atom weight has shape {w.shape}, expected ({n},)")
        if merged and angle_dist(ang, merged[-1][0]) < ANGLE_TOL:
            merged[-1] = (merged[-1][0], merged[-1][1] + w)
        else:
            merged.append((ang, w.copy()))
    # wrap-around coincidence between the first and last entries
    if len(merged) > 1 and angle_dist(merged[0][0], merged[-1][0]) < ANGLE_TOL:
        merged[0] = (merged[0][0], merged[0][1] + merged[-1][1])
        merged.pop()
    return tuple(
        Atom(CirclePoint(ang), w)
        for ang, w in merged
        if float(np.linalg.norm(w)) > 0.0
    )


def component_atoms(locations_weights, n):
    """Build atoms from per-component data [(j, point, alpha), ...]."""
    raw = []
    for j, point, alpha in locations_weights:
        w = np.zeros(n)
        w[j] = alpha
        raw.append(Atom(point, w))
    return merge_atoms(raw, n)


# --- measure tuple ----------------------------------------------------------

class BoundaryMeasureTuple:
    """n-tuple of real measures: density part plus finite atomic part."""

    def __init__(self, ac: DensityFn, atoms=()):
        self.ac = ac
        self.n = ac.n
        self.atoms = merge_atoms(atoms, self.n)

    def atom_angles(self):
        return tuple(a.point.angle for a in self.atoms)

    def excluded_angles(self):
        """Angles a density-side grid check must avoid."""
        return tuple(self.ac.singular_points) + self.atom_angles()

    def to_json(self):
        return {
            "n": self.n,
            "ac": self.ac.to_json(),
            "atoms": [
                {"angle": a.point.angle, "weight": a.weight.tolist()}
                for a in self.atoms
            ],
        }

    @classmethod
    def from_json(cls, data):
        ac = density_from_json(data["ac"])
        if ac.n != int(data["n"]):
            raise DomainInputError("density dimension does not match measure n")
        atoms = [
            Atom(CirclePoint(a["angle"]), np.asarray(a["weight"], dtype=float))
            for a in data.get("atoms", [])
        ]
        return cls(ac, atoms)


class SphericalDecomposition:
    """Triple (g, nu, rho): density, positive scalar atom measure, unit directions."""

    def __init__(self, g: DensityFn, nu_points, nu_weights, rho_vectors):
        self.g = g
        self.nu_points = tuple(nu_points)
        self.nu_weights = tuple(float(w) for w in nu_weights)
        self.rho_vectors = tuple(np.asarray(v, dtype=float) for v in rho_vectors)
        for w in self.nu_weights:
            if not w > 0.0:
                raise DomainInputError("nu weights must be strictly positive")
        for v in self.rho_vectors:
            if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
                raise DomainInputError("rho must be unit-norm at every nu atom")

    def rho(self, point: CirclePoint):
        for p, v in zip(self.nu_points, self.rho_vectors):
            if p == point:
                return v
        raise KeyError(f"no nu atom at {point!r}")

    def to_json(self):
        return {
            "g": self.g.to_json(),
            "nu": [
                {"angle": p.angle, "weight": w}
                for p, w in zip(self.nu_points, self.nu_weights)
            ],
            "rho": [v.tolist() for v in self.rho_vectors],
        }


def spherical_decompose(mu: BoundaryMeasureTuple) -> SphericalDecomposition:
    """Split mu as g dL + rho dnu.

    Atoms sharing a location were already merged into one vector weight w;
    nu gets mass |w| there and rho points along w/|w|, which reproduces the
    per-location formulas sqrt(sum of squared component weights).
    """
    points, weights, dirs = [], [], []
    for atom in mu.atoms:
        norm = float(np.linalg.norm(atom.weight))
        if norm == 0.0:
            continue
        points.append(atom.point)
        weights.append(norm)
        dirs.append(atom.weight / norm)
    return SphericalDecomposition(mu.ac, points, weights, dirs)


def recombine(dec: SphericalDecomposition) -> BoundaryMeasureTuple:
    atoms = [
        Atom(p, v * w)
        for p, w, v in zip(dec.nu_points, dec.nu_weights, dec.rho_vectors)
    ]
    return BoundaryMeasureTuple(dec.g, atoms)


def total_mass(mu: BoundaryMeasureTuple, rel_tol=1e-9) -> np.ndarray:
    """(1/2pi) mu(T): density integral plus atom weights."""
    integral = integrate_circle(
        mu.ac, singular_points=mu.ac.singular_points, rel_tol=rel_tol
    )
    acc = np.asarray(integral, dtype=float)
    for atom in mu.atoms:
        acc = acc + atom.weight
    return acc / (2.0 * math.pi)


def measures_allclose(m1, m2, grid=4096, tol=1e-10, atom_tol=1e-12):
    """Test-grade equality: atoms exact to atom_tol, densities agree on a
    uniform grid away from declared singular points."""
    if m1.n != m2.n or len(m1.atoms) != len(m2.atoms):
        return False
    for a, b in zip(m1.atoms, m2.atoms):
        if angle_dist(a.point.angle, b.point.angle) >= ANGLE_TOL:
            return False
        scale = max(1.0, float(np.linalg.norm(a.weight)))
        if float(np.max(np.abs(a.weight - b.weight))) > atom_tol * scale:
            return False
    excluded = set(m1.ac.singular_points) | set(m2.ac.singular_points)
    thetas = angles_avoiding(grid, excluded, window=1e-7)
    diff = np.max(np.abs(m1.ac(thetas) - m2.ac(thetas)))
    return bool(diff <= tol)
