"""Shared builders for the closed-form geodesic candidates used across the
geodesy and acceptance suites, plus their single-fault mutations."""

import math

import numpy as np
import pytest

import tubegeo as tg
from tubegeo import Atom, CirclePoint
from tubegeo.geodesics import construct, construct_dn, construct_halfplane
from tubegeo.measures import BoundaryMeasureTuple, DensityFn
from tubegeo.trace_poly import PositiveFactor, TraceQuadratic


def qc_independent():
    """Quarter-circle base, independent components with circle roots at 1, i
    and nonpositive atoms pinned there."""
    h = TraceQuadratic.from_factors(
        [PositiveFactor(1.0, 1.0), PositiveFactor(1.0, 1j)]
    )
    dom = tg.builtin("quarter-circle")
    return construct_dn(
        h, dom, [(CirclePoint(0.0), -0.5), (CirclePoint(math.pi / 2), -0.25)]
    )


def qc_dependent(gamma=2.0, root_angle=math.pi / 4, alphas=(-0.3, -0.4)):
    """Quarter-circle base, proportional components sharing one root; the two
    atoms sit at the common root."""
    s = PositiveFactor(1.0, np.exp(1j * root_angle))
    a_s, b_s = s.coefficients()
    h = TraceQuadratic([a_s, gamma * a_s], [b_s, gamma * b_s])
    dom = tg.builtin("quarter-circle")
    spec = [(CirclePoint(root_angle), alphas[0]), (CirclePoint(root_angle), alphas[1])]
    return construct_dn(h, dom, spec)


def qc_zero_first(ray_param=0.2, root_angle=math.pi / 3, alpha=-0.7):
    """Quarter-circle base with the first component identically zero: the
    density runs along the horizontal boundary ray at level -(1 + ray_param)."""
    h = TraceQuadratic.zero_padded(
        2, {1: PositiveFactor(1.0, np.exp(1j * root_angle)).coefficients()}
    )
    dom = tg.builtin("quarter-circle")
    return construct_dn(
        h, dom, [None, (CirclePoint(root_angle), alpha)], ray_param=ray_param
    )


def qc_zero_second(ray_param=0.1, root_angle=2.0, alpha=-0.6):
    """Mirror case: second component identically zero."""
    h = TraceQuadratic.zero_padded(
        2, {0: PositiveFactor(1.0, np.exp(1j * root_angle)).coefficients()}
    )
    dom = tg.builtin("quarter-circle")
    return construct_dn(
        h, dom, [(CirclePoint(root_angle), alpha), None], ray_param=ray_param
    )


def hyperbola_independent(d1=0.0, d2=0.5):
    """Hyperbola base, both roots interior, purely absolutely continuous."""
    h = TraceQuadratic.from_factors(
        [PositiveFactor(1.0, d1), PositiveFactor(1.0, d2)]
    )
    return construct(h, tg.builtin("hyperbola"))


def hyperbola_dependent(gamma=2.0, root_angle=2.0, alphas=(-0.2, -0.1)):
    s = PositiveFactor(1.0, np.exp(1j * root_angle))
    a_s, b_s = s.coefficients()
    h = TraceQuadratic([a_s, gamma * a_s], [b_s, gamma * b_s])
    dom = tg.builtin("hyperbola")
    spec = [(CirclePoint(root_angle), alphas[0]), (CirclePoint(root_angle), alphas[1])]
    return construct_dn(h, dom, spec)


def dprime_candidate(alpha=-0.6):
    """Graph-of-negative-inverse-square base: the density is unbounded but
    integrable at angle pi, where the first component has its double root."""
    h = TraceQuadratic([1.0 + 0j, 0j], [2.0, 1.0])
    return construct_dn(
        h, tg.builtin("dprime"), [(CirclePoint(math.pi), alpha), None]
    )


def parabola_independent(alpha=0.4):
    """Half-parabola base: sign-changing first component, nonpositive second
    with root at -1 carrying the nonnegative vertical atom."""
    h = TraceQuadratic([0.5 + 0j, -1.0 + 0j], [0.0, -2.0])
    dom = tg.builtin("half-parabola")
    return construct_halfplane(h, dom, (CirclePoint(math.pi), alpha))


def parabola_dependent(gamma=0.5, root_angle=math.pi / 6, alpha=0.8):
    s = PositiveFactor(1.0, np.exp(1j * root_angle))
    a_s, b_s = s.coefficients()
    k1, k2 = 2.0 * gamma, -1.0
    h = TraceQuadratic([k1 * a_s, k2 * a_s], [k1 * b_s, k2 * b_s])
    dom = tg.builtin("half-parabola")
    return construct_halfplane(h, dom, (CirclePoint(root_angle), alpha))


def halfcone_candidate():
    """Cone base in dimension three: zero density, two unit-mass atoms on the
    upper half-circle along the contact directions."""
    h = TraceQuadratic([0.5 + 0j, 0.5j, 0j], [0.0, 0.0, -1.0])
    r = 1.0 / math.sqrt(2.0)
    atoms = [
        Atom(CirclePoint(0.0), np.array([r, 0.0, r])),
        Atom(CirclePoint(math.pi / 2), np.array([0.0, r, r])),
    ]
    return construct(h, tg.builtin("half-cone"), atoms)


POSITIVE_BUILDERS = {
    "qc-independent": qc_independent,
    "qc-dependent": qc_dependent,
    "qc-zero-first": qc_zero_first,
    "qc-zero-second": qc_zero_second,
    "hyperbola-independent": hyperbola_independent,
    "hyperbola-dependent": hyperbola_dependent,
    "dprime": dprime_candidate,
    "parabola-independent": parabola_independent,
    "parabola-dependent": parabola_dependent,
    "half-cone": halfcone_candidate,
}


# --- single-fault mutations ---------------------------------------------------

def with_extra_atom(cand, angle, weight):
    mu = BoundaryMeasureTuple(
        cand.mu.ac, list(cand.mu.atoms) + [Atom(CirclePoint(angle), np.asarray(weight, float))]
    )
    return tg.GeodesicCandidate(mu, cand.h, cand.domain, cand.im0)


def mutate_atom_outside_cone(cand):
    """Atom direction leaves the recession cone while its trace pairing stays
    nonnegative: exactly condition (iii) among the core conditions.  The
    weight is kept small so the mean stays inside the base."""
    fam = cand.domain.family
    if fam == "halfplaneW":
        return with_extra_atom(cand, 1.3, [0.0, -0.1])
    if cand.domain.n == 3:
        r = 0.1 / math.sqrt(2.0)
        return with_extra_atom(cand, 2.5, [r, 0.0, -r])
    return with_extra_atom(cand, 1.1, [0.1] + [0.0] * (cand.domain.n - 1))


def mutate_atom_negative_pairing(cand):
    """Atom inside the recession cone at a non-root location: exactly (ii)."""
    fam = cand.domain.family
    if fam == "halfplaneW":
        angle = 1.7  # away from the root of the second component
        return with_extra_atom(cand, angle, [0.0, 0.5])
    if cand.domain.n == 3:
        return with_extra_atom(cand, 1.0, [0.0, 0.0, 0.5])
    # negative weights stay inside the recession cone and, by base
    # monotonicity, keep the mean inside
    traces = cand.h.trace_grid(np.array([0.9, 1.9, 2.9, 4.1]))
    for k, angle in enumerate((0.9, 1.9, 2.9, 4.1)):
        j = int(np.argmax(traces[k]))
        if traces[k, j] > 0.05:
            w = np.zeros(cand.domain.n)
            w[j] = -0.5
            return with_extra_atom(cand, angle, w)
    raise AssertionError("no usable non-root angle found")


def mutate_mass_boundary(name, cand):
    """A same-domain construction whose mean lands on the base boundary:
    exactly (iv)."""
    if name.startswith("qc"):
        return qc_dependent(gamma=1.5, root_angle=0.9, alphas=(0.0, 0.0))
    if name.startswith("hyperbola"):
        return hyperbola_dependent(gamma=1.5, root_angle=0.9, alphas=(0.0, 0.0))
    if name == "dprime":
        s = PositiveFactor(1.0, 0.3)
        a_s, b_s = s.coefficients()
        h = TraceQuadratic([a_s, 2.0 * a_s], [b_s, 2.0 * b_s])
        return construct(h, tg.builtin("dprime"))
    if name.startswith("parabola"):
        return parabola_dependent(gamma=0.5, root_angle=1.1, alpha=0.0)
    if name == "half-cone":
        h = TraceQuadratic([0.5 + 0j, 0.5j, 0j], [0.0, 0.0, -1.0])
        r = 1.0 / math.sqrt(2.0)
        atoms = [Atom(CirclePoint(0.0), np.array([r, 0.0, r]))]
        return construct(h, tg.builtin("half-cone"), atoms)
    raise AssertionError(f"no boundary-mass variant for {name}")


def mutate_density_off_face(cand, shift=1e-3):
    """Pull the density toward the interior anchor by `shift`: exactly (i)."""
    anchor = cand.domain.interior_point
    inner = cand.mu.ac

    def fn(thetas):
        vals = inner(thetas)
        d = anchor[None, :] - vals
        norms = np.linalg.norm(d, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return vals + shift * d / norms

    dens = DensityFn(inner.n, fn, inner.singular_points)
    mu = BoundaryMeasureTuple(dens, cand.mu.atoms)
    return tg.GeodesicCandidate(mu, cand.h, cand.domain, cand.im0)


@pytest.fixture(scope="session")
def positive_candidates():
    return {name: builder() for name, builder in POSITIVE_BUILDERS.items()}
