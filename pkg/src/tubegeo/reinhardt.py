"""Complete Reinhardt domains and extremal-map candidates.

A bounded pseudoconvex complete Reinhardt domain is stored through its
modulus membership together with the tube domain over its logarithmic
image.  Geodesic candidates of that tube lift through the exponential
covering, componentwise multiplied by disc automorphisms, to candidates for
extremal maps; the hyperbolic distance between parameters (respectively the
normalized derivative) gives an upper bound for the Lempert function
(respectively the Kobayashi-Royden metric), with extremality reported only
as a necessary-conditions verdict.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .circle import wrap_angle
from .errors import DomainInputError, EvaluationDomainError
from .geodesics import GeodesicCandidate, verify
from .herglotz import poincare_distance
from .measures import (
    BoundaryMeasureTuple,
    DensityFn,
    register_density_kind,
    total_mass,
    zero_density,
)
from .trace_poly import TraceQuadratic
from .tube_geometry import builtin as tube_builtin


class DiscAutomorphism:
    """Either the constant function 1 or eta (lambda - d)/(1 - conj(d) lambda)."""

    def __init__(self, eta=None, d=None):
        if eta is None and d is None:
            self.trivial = True
            self.eta, self.d = None, None
            return
        self.trivial = False
        self.eta = complex(eta if eta is not None else 1.0)
        self.d = complex(d if d is not None else 0.0)
        if abs(abs(self.eta) - 1.0) > 1e-12:
            raise DomainInputError("automorphism rotation must be unimodular")
        if abs(self.d) >= 1.0:
            raise DomainInputError("automorphism center must lie in the open disc")

    @classmethod
    def one(cls):
        return cls()

    @classmethod
    def mobius(cls, d=0.0, eta=1.0):
        return cls(eta=eta, d=d)

    def __call__(self, lam):
        if self.trivial:
            return 1.0 + 0.0j
        lam = complex(lam)
        return self.eta * (lam - self.d) / (1.0 - self.d.conjugate() * lam)

    def derivative(self, lam):
        if self.trivial:
            return 0.0 + 0.0j
        lam = complex(lam)
        return self.eta * (1.0 - abs(self.d) ** 2) / (1.0 - self.d.conjugate() * lam) ** 2

    def inverse_point(self, w):
        """Preimage of w under the Mobius map."""
        if self.trivial:
            raise DomainInputError("constant 1 has no inverse")
        w = complex(w) / self.eta
        return (w + self.d) / (1.0 + self.d.conjugate() * w)

    def to_json(self):
        if self.trivial:
            return {"kind": "one"}
        return {
            "kind": "mobius",
            "eta": [self.eta.real, self.eta.imag],
            "d": [self.d.real, self.d.imag],
        }

    @classmethod
    def from_json(cls, data):
        if data == 1 or data.get("kind") == "one":
            return cls.one()
        eta = data.get("eta", [1.0, 0.0])
        d = data.get("d", [0.0, 0.0])
        return cls(eta=complex(eta[0], eta[1]), d=complex(d[0], d[1]))


class ReinhardtDomain:
    """Bounded pseudoconvex complete Reinhardt domain."""

    def __init__(
        self,
        n,
        modulus_membership,
        log_domain,
        projection_radii,
        log_strictly_convex,
        descriptor,
        bounded=True,
        pseudoconvex=True,
    ):
        self.n = int(n)
        self._modulus_membership = modulus_membership
        self.log_domain = log_domain
        self.projection_radii = tuple(float(r) for r in projection_radii)
        self.log_strictly_convex = bool(log_strictly_convex)
        self.bounded = bool(bounded)
        self.pseudoconvex = bool(pseudoconvex)
        self.descriptor = descriptor

    def modulus_membership(self, moduli):
        m = np.asarray(moduli, dtype=float)
        if m.shape != (self.n,) or np.any(m < 0):
            raise DomainInputError("moduli must be a nonnegative vector of length n")
        return bool(self._modulus_membership(m))

    def modulus_in_closure(self, moduli, tol=1e-9):
        """Completeness makes a strict scale-down land inside the open set."""
        m = np.asarray(moduli, dtype=float)
        return self.modulus_membership(np.maximum(m, 0.0) * (1.0 - tol))

    def to_json(self):
        return self.descriptor


def _gapq(params):
    a, p, q = float(params["a"]), float(params["p"]), float(params["q"])
    log_dom = tube_builtin("gapq-log", a=a, p=p, q=q)

    def member(m):
        return m[0] < 1.0 and m[1] < 1.0 and m[0] ** p * m[1] ** q < a

    return ReinhardtDomain(
        2, member, log_dom, (1.0, 1.0), log_strictly_convex=False,
        descriptor={"builtin": "gapq", "params": {"a": a, "p": p, "q": q}},
    )


def _bidisc(params):
    n = int(params.get("n", 2))
    log_dom = tube_builtin("orthant", n=n)

    def member(m):
        return bool(np.all(m < 1.0))

    return ReinhardtDomain(
        n, member, log_dom, (1.0,) * n, log_strictly_convex=False,
        descriptor={"builtin": "bidisc", "params": {"n": n}},
    )


def _ball(params):
    log_dom = tube_builtin("ball-log")

    def member(m):
        return m[0] ** 2 + m[1] ** 2 < 1.0

    return ReinhardtDomain(
        2, member, log_dom, (1.0, 1.0), log_strictly_convex=True,
        descriptor={"builtin": "ball", "params": {}},
    )


def _log_hyperbola(params):
    log_dom = tube_builtin("hyperbola")

    def member(m):
        if not (m[0] < 1.0 and m[1] < 1.0):
            return False
        if m[0] == 0.0 or m[1] == 0.0:
            return True
        return math.log(m[0]) * math.log(m[1]) > 1.0

    return ReinhardtDomain(
        2, member, log_dom, (1.0, 1.0), log_strictly_convex=True,
        descriptor={"builtin": "log-hyperbola", "params": {}},
    )


REINHARDT_BUILDERS = {
    "gapq": _gapq,
    "bidisc": _bidisc,
    "ball": _ball,
    "log-hyperbola": _log_hyperbola,
}


def reinhardt_builtin(name, **params):
    if name not in REINHARDT_BUILDERS:
        raise DomainInputError(
            f"unknown Reinhardt builtin {name!r}; known: {sorted(REINHARDT_BUILDERS)}"
        )
    return REINHARDT_BUILDERS[name](params)


def reinhardt_from_json(data):
    return reinhardt_builtin(data["builtin"], **(data.get("params") or {}))


def log_image(G: ReinhardtDomain):
    """The registered tube domain over log moduli."""
    return G.log_domain


# --- extremal candidates ------------------------------------------------------

class ExtremalCandidate:
    """Lift data: active coordinates, one automorphism-or-1 per active
    coordinate, and a tube candidate over the projected log image."""

    def __init__(self, G, active, automorphisms, geodesic: GeodesicCandidate):
        self.G = G
        self.active = tuple(int(j) for j in active)
        if not self.active:
            raise DomainInputError("an extremal candidate needs at least one active coordinate")
        self.automorphisms = tuple(automorphisms)
        if len(self.automorphisms) != len(self.active):
            raise DomainInputError("one automorphism per active coordinate required")
        if geodesic.mu.n != len(self.active):
            raise DomainInputError("tube candidate dimension must match the active set")
        self.geodesic = geodesic
        self._herglotz = geodesic.herglotz()

    def lift(self, lam, check=True):
        """f_j(lambda) = B_j(lambda) exp(phi_j(lambda)) on active coordinates."""
        lam = complex(lam)
        phi = self._herglotz.eval(lam)
        out = np.zeros(self.G.n, dtype=complex)
        for slot, j in enumerate(self.active):
            out[j] = self.automorphisms[slot](lam) * cmath.exp(phi[slot])
        if check and not self.G.modulus_in_closure(np.abs(out)):
            raise EvaluationDomainError(
                "lift leaves the closed domain; the candidate is invalid"
            )
        return out

    def lift_derivative(self, lam):
        """Analytic derivative of the lift at lam."""
        lam = complex(lam)
        phi = self._herglotz.eval(lam)
        dphi = self._herglotz.eval_derivative(lam)
        out = np.zeros(self.G.n, dtype=complex)
        for slot, j in enumerate(self.active):
            B = self.automorphisms[slot]
            e = cmath.exp(phi[slot])
            out[j] = B.derivative(lam) * e + B(lam) * dphi[slot] * e
        return out

    def is_constant(self, probes=(0.0, 0.3, -0.2 + 0.4j)):
        vals = [self.lift(l, check=False) for l in probes]
        return all(np.allclose(v, vals[0], atol=1e-12) for v in vals[1:])

    def to_json(self):
        return {
            "reinhardt": self.G.to_json(),
            "active": list(self.active),
            "automorphisms": [b.to_json() for b in self.automorphisms],
            "geodesic": self.geodesic.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            reinhardt_from_json(data["reinhardt"]),
            data["active"],
            [DiscAutomorphism.from_json(b) for b in data["automorphisms"]],
            GeodesicCandidate.from_json(data["geodesic"]),
        )


def coordinate_disc_candidate(G: ReinhardtDomain, j, auto=None):
    """Candidate active in one coordinate: f_j = R_j * automorphism, rest 0."""
    auto = auto or DiscAutomorphism.mobius(d=0.0)
    hi = math.log(G.projection_radii[j])
    mu = BoundaryMeasureTuple(zero_density(1), [])
    dom = tube_builtin("interval", lo=-math.inf, hi=hi)
    h = TraceQuadratic([0j], [1.0])
    geo = GeodesicCandidate(mu, h, dom, np.zeros(1))
    return ExtremalCandidate(G, (j,), (auto,), geo)


# --- the two-exponent family ----------------------------------------------------

def strip_map(lam):
    """Conformal map of the disc onto the strip 0 < Re < 1 fixing 1/2."""
    lam = complex(lam)
    return 0.5 + cmath.log((1.0 + lam) / (1.0 - lam)) / (math.pi * 1j)


def _gapq_arc_density(a, p, q, auto_json, singular_points):
    ell = math.log(a)
    vertex_p = np.array([ell / p, 0.0])
    vertex_q = np.array([0.0, ell / q])
    sigma = DiscAutomorphism.from_json(auto_json)

    def fn(thetas):
        out = np.empty((thetas.size, 2))
        for i, t in enumerate(thetas):
            w = sigma(cmath.exp(1j * t))
            out[i] = vertex_p if w.imag > 0 else vertex_q
        return out

    return DensityFn(
        2, fn, singular_points,
        kind="gapq-arc",
        params={"a": a, "p": p, "q": q, "auto": auto_json},
    )


register_density_kind(
    "gapq-arc",
    lambda params, sing: _gapq_arc_density(
        params["a"], params["p"], params["q"], params["auto"], sing
    ),
)


def gapq_extremal(a, p, q, psi_auto=None, beta=0.0, B1=None, B2=None):
    """Two-exponent family candidate with both components nonconstant in
    modulus: f = (B1 exp(psi log(a)/p), B2 exp((1-psi) log(a)/q + i beta)),
    psi the strip map composed with a disc automorphism."""
    if not (0.0 < a < 1.0) or p <= 0 or q <= 0:
        raise DomainInputError("need a in (0,1) and p, q > 0")
    B1 = B1 or DiscAutomorphism.one()
    B2 = B2 or DiscAutomorphism.one()
    if B1.trivial and B2.trivial:
        raise DomainInputError(
            "both unimodular factors are the constant 1, so the product of the "
            "factors is identically 1 and the lifted moduli sit on the boundary; "
            "make at least one factor a genuine automorphism"
        )
    sigma = psi_auto or DiscAutomorphism.mobius(d=0.0)
    if sigma.trivial:
        raise DomainInputError("the strip-map precomposition must be an automorphism")

    ell = math.log(a)
    G = reinhardt_builtin("gapq", a=a, p=p, q=q)

    # angles where the composed strip map has its boundary jumps
    jumps = sorted(
        wrap_angle(cmath.phase(sigma.inverse_point(w))) for w in (1.0, -1.0)
    )
    density = _gapq_arc_density(a, p, q, sigma.to_json(), jumps)
    mu = BoundaryMeasureTuple(density, [])

    psi0 = strip_map(sigma(0.0))
    im0 = np.array([psi0.imag * ell / p, -psi0.imag * ell / q + beta])
    h = TraceQuadratic([0j, 0j], [p, q])
    dom = tube_builtin("gapq-log", a=a, p=p, q=q)
    geo = GeodesicCandidate(mu, h, dom, im0)
    return ExtremalCandidate(G, (0, 1), (B1, B2), geo)


def gapq_extremal_boundary(a, p, q, aut_coordinate, auto, other_level, other_auto=None):
    """Two-exponent family candidate in the automorphism branch: one
    coordinate is a full disc automorphism, the other a user-chosen constant
    modulus level inside the slice."""
    if not (0.0 < a < 1.0) or p <= 0 or q <= 0:
        raise DomainInputError("need a in (0,1) and p, q > 0")
    j = int(aut_coordinate)
    if j not in (0, 1):
        raise DomainInputError("aut_coordinate must be 0 or 1")
    other = 1 - j
    exponent = (p, q)[other]
    level = float(other_level)
    limit = math.log(a) / exponent
    if level > limit + 1e-12:
        raise DomainInputError(
            f"constant level {level} exceeds the slice bound log(a)/exponent = {limit}"
        )
    other_auto = other_auto or DiscAutomorphism.one()
    if auto is None or auto.trivial:
        raise DomainInputError("the designated coordinate needs a genuine automorphism")

    G = reinhardt_builtin("gapq", a=a, p=p, q=q)
    from .measures import constant_density

    values = np.zeros(2)
    values[other] = level
    mu = BoundaryMeasureTuple(constant_density(values), [])
    direction = np.zeros(2)
    direction[j] = 1.0
    h = TraceQuadratic([0j, 0j], direction)
    dom = tube_builtin("gapq-log", a=a, p=p, q=q)
    geo = GeodesicCandidate(mu, h, dom, np.zeros(2))
    autos = [None, None]
    autos[j] = auto
    autos[other] = other_auto
    return ExtremalCandidate(G, (0, 1), tuple(autos), geo)


# --- invariant-metric values ------------------------------------------------------

def lempert_value(cand: ExtremalCandidate, sigma1, sigma2, verify_kwargs=None):
    """Upper bound for the Lempert function along the candidate.

    The candidate competes in the defining infimum, so the hyperbolic
    distance of the parameters always dominates the Lempert value of the
    lifted pair; equality holds exactly for genuinely extremal maps, which
    the artifact reports through the necessary-conditions verdict only.
    """
    s1, s2 = complex(sigma1), complex(sigma2)
    if s1 == s2:
        raise DomainInputError("lempert bound needs two distinct parameters")
    z = cand.lift(s1)
    w = cand.lift(s2)
    bound = poincare_distance(s1, s2)
    verdict = _necessary_verdict(cand, verify_kwargs)
    record = {
        "z": _cvec(z),
        "w": _cvec(w),
        "bound": bound,
        "degenerate": bool(cand.is_constant()),
        "verdict": verdict,
    }
    return record


def kobayashi_value(cand: ExtremalCandidate, sigma, verify_kwargs=None):
    """Upper bound 1/(1-|sigma|^2) for the Kobayashi-Royden metric at the
    lifted point along the analytic derivative of the lift."""
    s = complex(sigma)
    z = cand.lift(s)
    X = cand.lift_derivative(s)
    bound = 1.0 / (1.0 - abs(s) ** 2)
    verdict = _necessary_verdict(cand, verify_kwargs)
    record = {
        "z": _cvec(z),
        "X": _cvec(X),
        "bound": bound,
        "degenerate": bool(cand.is_constant() or np.allclose(X, 0.0, atol=1e-14)),
        "verdict": verdict,
    }
    return record


def _necessary_verdict(cand, verify_kwargs):
    kwargs = dict(grid_size=256, z_samples=24)
    kwargs.update(verify_kwargs or {})
    report = verify(cand.geodesic, **kwargs)
    mass = total_mass(cand.geodesic.mu)
    boundary_valued = not cand.geodesic.domain.base_membership(mass)
    out = report.to_json()
    out["boundary_valued"] = bool(boundary_valued)
    return out


def classify_proposition(cand: ExtremalCandidate):
    """Which structural branch the candidate instantiates.

    The strictly convex log-image branch is refused when the log image has
    flat boundary pieces; in dimension two the candidate is split between
    the coordinate-automorphism branch and the product form.
    """
    G = cand.G
    if G.log_strictly_convex:
        return {
            "proposition": "strict-log-convex",
            "branch": "projection-product-form",
        }
    if G.n == 2:
        mu = cand.geodesic.mu
        density_peaks = np.max(np.abs(mu.ac(np.linspace(0.05, 6.2, 37))), axis=0)
        aut_coords = []
        for slot, j in enumerate(cand.active):
            # f_j/R_j is an automorphism iff the factor is a genuine Mobius
            # map and the exponential part is identically 1: zero density and
            # no atom mass in that component
            component_silent = density_peaks[slot] < 1e-14 and not any(
                abs(a.weight[slot]) > 0 for a in mu.atoms
            )
            if component_silent and not cand.automorphisms[slot].trivial:
                aut_coords.append(j)
        if aut_coords:
            return {
                "proposition": "dimension-two",
                "branch": "coordinate-automorphism",
                "coordinates": aut_coords,
            }
        return {"proposition": "dimension-two", "branch": "product-form"}
    raise DomainInputError(
        "no applicable branch: the log image is not strictly convex and the "
        "dimension exceeds two"
    )


def _cvec(z):
    return [[c.real, c.imag] for c in np.asarray(z, dtype=complex)]
