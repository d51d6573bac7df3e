"""Convex tube domains described by their bases.

A tube domain is base + i R^n; all geometry lives in the base.  Each domain
carries closed-form membership, support function, exposed faces, and the two
cones: directions of bounded support (wd) and recession directions (sd).
Builtin bases are registered by name; custom polyhedral bases get their
support queries from linear programming and keep an indeterminate flag for
questions (interior of the wd cone) that have no closed form there.

A sampling oracle (rejection sampling plus bisection push to the boundary
and shrinking local refinement) provides the independent cross-check for the
closed-form faces.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainInputError, TubeGeoError, UnsupportedReduction

SNAP = 1e-12  # zero-snapping for closed-form cone tests


class FaceDescription:
    """Exposed face of the base closure in a given direction.

    kind is one of empty, point, segment, ray, unsupported; generators are
    at most two points and an optional ray direction.
    """

    __slots__ = ("kind", "point", "p", "q", "base", "direction")

    def __init__(self, kind, point=None, p=None, q=None, base=None, direction=None):
        self.kind = kind
        self.point = None if point is None else np.asarray(point, dtype=float)
        self.p = None if p is None else np.asarray(p, dtype=float)
        self.q = None if q is None else np.asarray(q, dtype=float)
        self.base = None if base is None else np.asarray(base, dtype=float)
        self.direction = None if direction is None else np.asarray(direction, dtype=float)
        if kind == "point" and self.point is None:
            raise DomainInputError("point face needs a point")
        if kind == "segment" and (self.p is None or self.q is None):
            raise DomainInputError("segment face needs two endpoints")
        if kind == "ray" and (self.base is None or self.direction is None):
            raise DomainInputError("ray face needs base and direction")

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def unsupported(cls):
        return cls("unsupported")

    @classmethod
    def at_point(cls, p):
        return cls("point", point=p)

    @classmethod
    def segment_between(cls, p, q):
        return cls("segment", p=p, q=q)

    @classmethod
    def ray_from(cls, base, direction):
        d = np.asarray(direction, dtype=float)
        nd = float(np.linalg.norm(d))
        if nd == 0.0:
            raise DomainInputError("ray direction must be nonzero")
        return cls("ray", base=base, direction=d / nd)

    def is_empty(self):
        return self.kind == "empty"

    def distance(self, x):
        """Euclidean distance from x to the face set (inf if empty, nan if
        the face kind is unsupported)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "point":
            return float(np.linalg.norm(x - self.point))
        if self.kind == "segment":
            d = self.q - self.p
            denom = float(d @ d)
            t = 0.0 if denom == 0.0 else float((x - self.p) @ d) / denom
            t = min(1.0, max(0.0, t))
            return float(np.linalg.norm(x - (self.p + t * d)))
        if self.kind == "ray":
            t = max(0.0, float((x - self.base) @ self.direction))
            return float(np.linalg.norm(x - (self.base + t * self.direction)))
        if self.kind == "empty":
            return math.inf
        return math.nan

    def select(self, ray_param=0.0, segment_param=0.5):
        """A representative point: the point itself, base + ray_param * dir,
        or p + segment_param * (q - p)."""
        if self.kind == "point":
            return self.point
        if self.kind == "ray":
            if ray_param < 0:
                raise DomainInputError("ray selection parameter must be >= 0")
            return self.base + ray_param * self.direction
        if self.kind == "segment":
            if not 0.0 <= segment_param <= 1.0:
                raise DomainInputError("segment selection parameter must be in [0, 1]")
            return self.p + segment_param * (self.q - self.p)
        raise DomainInputError(f"cannot select a point from a {self.kind} face")

    def sample_points(self, count=5, ray_span=3.0):
        if self.kind == "point":
            return [self.point]
        if self.kind == "segment":
            return [self.p + t * (self.q - self.p) for t in np.linspace(0, 1, count)]
        if self.kind == "ray":
            return [self.base + t * self.direction for t in np.linspace(0, ray_span, count)]
        return []

    def transformed(self, matrix):
        mat = np.asarray(matrix, dtype=float)
        if self.kind == "point":
            return FaceDescription.at_point(mat @ self.point)
        if self.kind == "segment":
            return FaceDescription.segment_between(mat @ self.p, mat @ self.q)
        if self.kind == "ray":
            return FaceDescription.ray_from(mat @ self.base, mat @ self.direction)
        return FaceDescription(self.kind)


class TubeDomain:
    """Convex base with membership, support, faces and cone predicates.

    All callables are pure; instances are immutable after construction and
    safe to share between threads.
    """

    def __init__(
        self,
        n,
        member_many,
        support,
        face,
        in_wd,
        in_wd_closure,
        in_int_wd,
        in_sd,
        family="general",
        strictly_convex=False,
        interior_point=None,
        sample_box=None,
        descriptor=None,
        int_wd_decidable=True,
    ):
        self.n = int(n)
        self._member_many = member_many
        self._support = support
        self._face = face
        self._in_wd = in_wd
        self._in_wd_closure = in_wd_closure
        self._in_int_wd = in_int_wd
        self._in_sd = in_sd
        self.family = family
        self.strictly_convex = bool(strictly_convex)
        self.interior_point = (
            None if interior_point is None else np.asarray(interior_point, dtype=float)
        )
        self.sample_box = sample_box
        self.descriptor = descriptor
        self.int_wd_decidable = bool(int_wd_decidable)

    # membership -------------------------------------------------------
    def membership_array(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        return np.asarray(self._member_many(pts), dtype=bool)

    def base_membership(self, x):
        return bool(self.membership_array(np.asarray(x, dtype=float)[None, :])[0])

    # geometry ---------------------------------------------------------
    def support(self, v):
        return float(self._support(np.asarray(v, dtype=float)))

    def face(self, v):
        return self._face(np.asarray(v, dtype=float))

    def pd(self, v):
        return self.face(v)

    def in_wd(self, v, tol=0.0):
        return bool(self._in_wd(np.asarray(v, dtype=float), float(tol)))

    def in_wd_closure(self, v, tol=0.0):
        return bool(self._in_wd_closure(np.asarray(v, dtype=float), float(tol)))

    def in_int_wd(self, v, tol=0.0):
        """Strict interior of the wd cone; None when indeterminate (custom)."""
        out = self._in_int_wd(np.asarray(v, dtype=float), float(tol))
        return None if out is None else bool(out)

    def in_sd(self, y, tol=0.0):
        return bool(self._in_sd(np.asarray(y, dtype=float), float(tol)))

    # sampling ---------------------------------------------------------
    def sample_base(self, rng, count, max_batches=400):
        lo, hi = self.sample_box
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        out = []
        got = 0
        for _ in range(max_batches):
            draw = rng.uniform(lo, hi, size=(max(64, 2 * count), self.n))
            good = draw[self.membership_array(draw)]
            if good.size:
                out.append(good)
                got += good.shape[0]
            if got >= count:
                break
        if got < count:
            raise TubeGeoError("rejection sampling failed to fill the base sample")
        return np.vstack(out)[:count]

    def boundary_push(self, points, v, iters=48):
        """Push base points to the boundary along +v by bisection."""
        pts = np.asarray(points, dtype=float)
        v = np.asarray(v, dtype=float)
        t_lo = np.zeros(pts.shape[0])
        t_hi = np.full(pts.shape[0], 1e-3)
        for _ in range(80):
            outside = ~self.membership_array(pts + t_hi[:, None] * v[None, :])
            if outside.all():
                break
            t_hi[~outside] *= 2.0
            if np.max(t_hi) > 1e9:
                raise TubeGeoError("ray never exits the base; direction not in wd cone")
        for _ in range(iters):
            mid = 0.5 * (t_lo + t_hi)
            inside = self.membership_array(pts + mid[:, None] * v[None, :])
            t_lo = np.where(inside, mid, t_lo)
            t_hi = np.where(inside, t_hi, mid)
        return pts + t_lo[:, None] * v[None, :]

    # serialization ------------------------------------------------------
    def to_json(self):
        if self.descriptor is None:
            raise DomainInputError("domain has no serializable descriptor")
        return self.descriptor


def _snap(x, tol):
    return 0.0 if abs(x) <= max(tol, SNAP) else x


# --- builtin bases ----------------------------------------------------------

def _orthant_cones(n):
    def in_wd(v, tol):
        return bool(np.all(v >= -max(tol, SNAP)))

    def in_int(v, tol):
        return bool(np.all(v > max(tol, SNAP)))

    def in_sd(y, tol):
        return bool(np.all(y <= max(tol, SNAP)))

    return in_wd, in_wd, in_int, in_sd


def _quarter_circle(params):
    def member(x):
        u = np.maximum(x[:, 0] + 1.0, 0.0)
        w = np.maximum(x[:, 1] + 1.0, 0.0)
        return u * u + w * w < 1.0

    def face(v):
        v1, v2 = v[0], v[1]
        if v1 > 0 and v2 > 0:
            return FaceDescription.at_point(v / np.linalg.norm(v) - 1.0)
        if v1 == 0 and v2 > 0:
            return FaceDescription.ray_from((-1.0, 0.0), (-1.0, 0.0))
        if v1 > 0 and v2 == 0:
            return FaceDescription.ray_from((0.0, -1.0), (0.0, -1.0))
        return FaceDescription.empty()

    def support(v):
        v1, v2 = v[0], v[1]
        if v1 < 0 or v2 < 0:
            return math.inf
        if v1 > 0 and v2 > 0:
            return float(np.linalg.norm(v) - v1 - v2)
        return 0.0

    in_wd, in_wdc, in_int, in_sd = _orthant_cones(2)
    return TubeDomain(
        2, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="Dn", strictly_convex=False,
        interior_point=(-1.0, -1.0), sample_box=((-4.0, -4.0), (0.0, 0.0)),
        descriptor={"builtin": "quarter-circle", "params": {}},
    )


def _hyperbola(params):
    def member(x):
        return (x[:, 0] < 0) & (x[:, 1] < 0) & (x[:, 0] * x[:, 1] > 1.0)

    def face(v):
        v1, v2 = v[0], v[1]
        if v1 > 0 and v2 > 0:
            return FaceDescription.at_point(
                (-math.sqrt(v2 / v1), -math.sqrt(v1 / v2))
            )
        return FaceDescription.empty()

    def support(v):
        v1, v2 = v[0], v[1]
        if v1 < 0 or v2 < 0:
            return math.inf
        if v1 > 0 and v2 > 0:
            return -2.0 * math.sqrt(v1 * v2)
        return 0.0

    in_wd, in_wdc, in_int, in_sd = _orthant_cones(2)
    return TubeDomain(
        2, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="Dn", strictly_convex=True,
        interior_point=(-2.0, -2.0), sample_box=((-8.0, -8.0), (-0.125, -0.125)),
        descriptor={"builtin": "hyperbola", "params": {}},
    )


def _dprime(params):
    def member(x):
        x1 = x[:, 0]
        with np.errstate(divide="ignore"):
            bound = -1.0 / np.where(x1 < 0, x1 * x1, np.nan)
        return (x1 < 0) & (x[:, 1] < bound)

    def face(v):
        v1, v2 = v[0], v[1]
        if v1 > 0 and v2 > 0:
            p1 = -((2.0 * v2 / v1) ** (1.0 / 3.0))
            p2 = -((v1 / (2.0 * v2)) ** (2.0 / 3.0))
            return FaceDescription.at_point((p1, p2))
        return FaceDescription.empty()

    def support(v):
        v1, v2 = v[0], v[1]
        if v1 < 0 or v2 < 0:
            return math.inf
        if v1 > 0 and v2 > 0:
            f = face(v)
            return float(f.point @ v)
        return 0.0

    in_wd, in_wdc, in_int, in_sd = _orthant_cones(2)
    return TubeDomain(
        2, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="Dn", strictly_convex=True,
        interior_point=(-2.0, -2.0), sample_box=((-8.0, -14.0), (-0.35, 0.0)),
        descriptor={"builtin": "dprime", "params": {}},
    )


def _half_parabola(params):
    def member(x):
        return (x[:, 0] > 0) & (x[:, 1] > x[:, 0] ** 2)

    def face(v):
        v1, v2 = v[0], v[1]
        if v2 < 0:
            if v1 > 0:
                p1 = -v1 / (2.0 * v2)
                return FaceDescription.at_point((p1, p1 * p1))
            return FaceDescription.at_point((0.0, 0.0))
        if v2 == 0 and v1 < 0:
            return FaceDescription.ray_from((0.0, 0.0), (0.0, 1.0))
        return FaceDescription.empty()

    def support(v):
        v1, v2 = v[0], v[1]
        if v2 < 0:
            return -v1 * v1 / (4.0 * v2) if v1 > 0 else 0.0
        if v2 == 0 and v1 <= 0:
            return 0.0
        return math.inf

    def in_wd(v, tol):
        t = max(tol, SNAP)
        return bool(v[1] < -t or (abs(v[1]) <= t and v[0] <= t))

    def in_wdc(v, tol):
        return bool(v[1] <= max(tol, SNAP))

    def in_int(v, tol):
        return bool(v[1] < -max(tol, SNAP))

    def in_sd(y, tol):
        t = max(tol, SNAP)
        return bool(abs(y[0]) <= t and y[1] >= -t)

    return TubeDomain(
        2, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="halfplaneW", strictly_convex=False,
        interior_point=(1.0, 2.0), sample_box=((0.0, 0.0), (4.0, 18.0)),
        descriptor={"builtin": "half-parabola", "params": {}},
    )


def _half_cone(params):
    def member(x):
        return (x[:, 1] > 0) & (x[:, 2] > np.hypot(x[:, 0], x[:, 1]))

    def _wd_slack(v):
        """Amount by which v violates the wd-cone inequalities (<= 0 inside)."""
        if v[1] >= 0:
            return v[2] + math.hypot(v[0], v[1])
        return v[2] + abs(v[0])

    def in_wdc(v, tol):
        return bool(_wd_slack(v) <= max(tol, SNAP))

    def in_int(v, tol):
        return bool(_wd_slack(v) < -max(tol, SNAP))

    def in_sd(y, tol):
        t = max(tol, SNAP)
        return bool(y[1] >= -t and y[2] >= math.hypot(y[0], max(y[1], 0.0)) - t)

    def face(v):
        nv = float(np.linalg.norm(v))
        if nv == 0.0 or not in_wdc(v, 0.0):
            return FaceDescription.empty()
        if in_int(v, 0.0):
            return FaceDescription.at_point((0.0, 0.0, 0.0))
        # boundary of the wd cone: contact ray of the base cone
        if v[1] >= -SNAP * nv:
            r = math.hypot(v[0], max(v[1], 0.0))
            if r <= SNAP * nv:
                return FaceDescription.empty()  # v = 0 direction degenerate
            return FaceDescription.ray_from((0.0, 0.0, 0.0), (v[0], max(v[1], 0.0), r))
        if abs(v[0]) > SNAP * nv:
            return FaceDescription.ray_from(
                (0.0, 0.0, 0.0), (math.copysign(1.0, v[0]), 0.0, 1.0)
            )
        # v = (0, v2<0, 0): the contact set is two dimensional
        return FaceDescription.unsupported()

    def support(v):
        return 0.0 if in_wdc(v, 0.0) else math.inf

    return TubeDomain(
        3, member, support, face, in_wdc, in_wdc, in_int, in_sd,
        family="general", strictly_convex=False,
        interior_point=(0.0, 0.5, 2.0),
        sample_box=((-2.0, 0.0, 0.0), (2.0, 2.0, 3.0)),
        descriptor={"builtin": "half-cone", "params": {}},
    )


def _gapq_log(params):
    a = float(params["a"])
    p = float(params["p"])
    q = float(params["q"])
    if not (0.0 < a < 1.0) or p <= 0 or q <= 0:
        raise DomainInputError("gapq-log needs a in (0,1) and p, q > 0")
    ell = math.log(a)
    vertex_p = np.array([ell / p, 0.0])
    vertex_q = np.array([0.0, ell / q])

    def member(x):
        return (x[:, 0] < 0) & (x[:, 1] < 0) & (p * x[:, 0] + q * x[:, 1] < ell)

    def face(v):
        v1, v2 = v[0], v[1]
        if v1 < 0 or v2 < 0 or (v1 == 0 and v2 == 0):
            return FaceDescription.empty()
        if v1 == 0:
            return FaceDescription.ray_from(vertex_p, (-1.0, 0.0))
        if v2 == 0:
            return FaceDescription.ray_from(vertex_q, (0.0, -1.0))
        r1, r2 = v1 / p, v2 / q
        if abs(r1 - r2) <= 1e-9 * max(r1, r2):
            return FaceDescription.segment_between(vertex_p, vertex_q)
        return FaceDescription.at_point(vertex_q if r1 > r2 else vertex_p)

    def support(v):
        v1, v2 = v[0], v[1]
        if v1 < 0 or v2 < 0:
            return math.inf
        return ell * min(v1 / p, v2 / q)

    in_wd, in_wdc, in_int, in_sd = _orthant_cones(2)
    margin = 3.0
    lo = ((ell - margin) / p, (ell - margin) / q)
    s = (ell - 1.0) / (p + q)
    return TubeDomain(
        2, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="Dn", strictly_convex=False,
        interior_point=(s, s), sample_box=(lo, (0.0, 0.0)),
        descriptor={"builtin": "gapq-log", "params": {"a": a, "p": p, "q": q}},
    )


def _orthant(params):
    n = int(params.get("n", 2))

    def member(x):
        return np.all(x < 0, axis=1)

    def face(v):
        vv = np.asarray(v, dtype=float)
        if np.any(vv < 0) or np.all(vv == 0):
            return FaceDescription.empty()
        zero = np.where(vv == 0)[0]
        if zero.size == 0:
            return FaceDescription.at_point(np.zeros(n))
        if zero.size == 1:
            d = np.zeros(n)
            d[zero[0]] = -1.0
            return FaceDescription.ray_from(np.zeros(n), d)
        return FaceDescription.unsupported()

    def support(v):
        return 0.0 if np.all(v >= -SNAP) else math.inf

    in_wd, in_wdc, in_int, in_sd = _orthant_cones(n)
    return TubeDomain(
        n, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="Dn", strictly_convex=False,
        interior_point=-np.ones(n), sample_box=(-4.0 * np.ones(n), np.zeros(n)),
        descriptor={"builtin": "orthant", "params": {"n": n}},
    )


def _ball_log(params):
    def member(x):
        return np.exp(2.0 * x[:, 0]) + np.exp(2.0 * x[:, 1]) < 1.0

    def face(v):
        v1, v2 = v[0], v[1]
        if v1 > 0 and v2 > 0:
            s = v1 + v2
            return FaceDescription.at_point(
                (0.5 * math.log(v1 / s), 0.5 * math.log(v2 / s))
            )
        return FaceDescription.empty()

    def support(v):
        v1, v2 = v[0], v[1]
        if v1 < 0 or v2 < 0:
            return math.inf
        if v1 > 0 and v2 > 0:
            return float(face(v).point @ np.array([v1, v2]))
        return 0.0

    in_wd, in_wdc, in_int, in_sd = _orthant_cones(2)
    return TubeDomain(
        2, member, support, face, in_wd, in_wdc, in_int, in_sd,
        family="Dn", strictly_convex=True,
        interior_point=(-1.0, -1.0), sample_box=((-7.0, -7.0), (0.0, 0.0)),
        descriptor={"builtin": "ball-log", "params": {}},
    )


def _disc(params):
    center = np.asarray(params.get("center", (0.0, 0.0)), dtype=float)
    radius = float(params.get("radius", 1.0))
    if radius <= 0:
        raise DomainInputError("disc radius must be positive")
    n = center.size

    def member(x):
        return np.linalg.norm(x - center[None, :], axis=1) < radius

    def face(v):
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return FaceDescription.empty()
        return FaceDescription.at_point(center + radius * v / nv)

    def support(v):
        return float(center @ v) + radius * float(np.linalg.norm(v))

    def in_wd(v, tol):
        return True

    def in_int(v, tol):
        return True

    def in_sd(y, tol):
        return bool(np.linalg.norm(y) <= max(tol, SNAP))

    return TubeDomain(
        n, member, support, face, in_wd, in_wd, in_int, in_sd,
        family="bounded", strictly_convex=True,
        interior_point=center,
        sample_box=(center - radius, center + radius),
        descriptor={"builtin": "disc", "params": {"center": center.tolist(), "radius": radius}},
    )


def _interval(params):
    lo = float(params.get("lo", -math.inf))
    hi = float(params.get("hi", math.inf))
    if not lo < hi:
        raise DomainInputError("interval needs lo < hi")
    if math.isinf(lo) and math.isinf(hi):
        raise DomainInputError("interval base must not be the whole line")

    def member(x):
        return (x[:, 0] > lo) & (x[:, 0] < hi)

    def face(v):
        v0 = v[0]
        if v0 > 0 and math.isfinite(hi):
            return FaceDescription.at_point((hi,))
        if v0 < 0 and math.isfinite(lo):
            return FaceDescription.at_point((lo,))
        return FaceDescription.empty()

    def support(v):
        v0 = v[0]
        if v0 == 0:
            return 0.0
        if v0 > 0:
            return v0 * hi if math.isfinite(hi) else math.inf
        return v0 * lo if math.isfinite(lo) else math.inf

    both = math.isfinite(lo) and math.isfinite(hi)

    def in_wd(v, tol):
        if both:
            return True
        if math.isfinite(hi):
            return bool(v[0] >= -max(tol, SNAP))
        return bool(v[0] <= max(tol, SNAP))

    def in_int(v, tol):
        if both:
            return True
        if math.isfinite(hi):
            return bool(v[0] > max(tol, SNAP))
        return bool(v[0] < -max(tol, SNAP))

    def in_sd(y, tol):
        t = max(tol, SNAP)
        if both:
            return bool(abs(y[0]) <= t)
        if math.isfinite(hi):
            return bool(y[0] <= t)
        return bool(y[0] >= -t)

    if both:
        family, interior = "bounded", 0.5 * (lo + hi)
        box = (np.array([lo]), np.array([hi]))
    elif math.isfinite(hi):
        family, interior = "Dn", hi - 1.0
        box = (np.array([hi - 6.0]), np.array([hi]))
    else:
        family, interior = "general", lo + 1.0
        box = (np.array([lo]), np.array([lo + 6.0]))

    return TubeDomain(
        1, member, support, face, in_wd, in_wd, in_int, in_sd,
        family=family, strictly_convex=True,
        interior_point=(interior,), sample_box=box,
        descriptor={"builtin": "interval", "params": {"lo": lo, "hi": hi}},
    )


def _custom_polyhedral(spec):
    ineqs = spec.get("inequalities")
    if not ineqs:
        raise DomainInputError("custom domain needs a nonempty inequality list")
    A = np.asarray([row["a"] for row in ineqs], dtype=float)
    b = np.asarray([row["b"] for row in ineqs], dtype=float)
    n = A.shape[1]

    from scipy.optimize import linprog

    def member(x):
        return np.all(x @ A.T < b[None, :] - 0.0, axis=1)

    def _solve(v):
        res = linprog(
            -np.asarray(v, dtype=float), A_ub=A, b_ub=b,
            bounds=[(None, None)] * n, method="highs",
        )
        return res

    def support(v):
        res = _solve(v)
        if res.status == 3:
            return math.inf
        if res.status != 0:
            raise TubeGeoError(f"support LP failed: {res.message}")
        return float(-res.fun)

    def face(v):
        v = np.asarray(v, dtype=float)
        if float(np.linalg.norm(v)) == 0.0:
            return FaceDescription.empty()
        res = _solve(v)
        if res.status == 3:
            return FaceDescription.empty()
        if res.status != 0:
            raise TubeGeoError(f"face LP failed: {res.message}")
        val = float(-res.fun)
        x0 = np.asarray(res.x)
        # probe the optimal face along directions orthogonal to v
        basis = _orthogonal_complement(v)
        A_eq = v[None, :]
        b_eq = np.array([val])
        moves = []
        for t in basis:
            ends = []
            for sgn in (+1.0, -1.0):
                r = linprog(
                    -sgn * t, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq,
                    bounds=[(None, None)] * n, method="highs",
                )
                if r.status == 3:
                    ends.append(None)  # unbounded along sgn * t
                elif r.status == 0:
                    ends.append(np.asarray(r.x))
                else:
                    raise TubeGeoError(f"face probe LP failed: {r.message}")
            moves.append(ends)
        extents = []
        for t, (e_plus, e_minus) in zip(basis, moves):
            span = 0.0
            if e_plus is None or e_minus is None:
                span = math.inf
            else:
                span = abs(float((e_plus - e_minus) @ t))
            extents.append((span, t, e_plus, e_minus))
        active = [e for e in extents if e[0] > 1e-9]
        if not active:
            return FaceDescription.at_point(x0)
        if len(active) > 1:
            return FaceDescription.unsupported()
        span, t, e_plus, e_minus = active[0]
        if math.isinf(span):
            if e_plus is None and e_minus is None:
                return FaceDescription.unsupported()  # a full line: no valid base
            if e_plus is None:
                return FaceDescription.ray_from(e_minus, t)
            return FaceDescription.ray_from(e_plus, -t)
        return FaceDescription.segment_between(e_minus, e_plus)

    def in_wdc(v, tol):
        return support(v) < math.inf

    def in_int(v, tol):
        return None  # indeterminate for custom domains

    def in_sd(y, tol):
        # recession cone of the polyhedron
        return bool(np.all(A @ y <= max(tol, SNAP) * np.maximum(1.0, np.abs(b))))

    # Chebyshev-style interior point; the inscribed radius is capped so the
    # anchor stays near the constraints on unbounded bases
    norms = np.linalg.norm(A, axis=1)
    res = linprog(
        np.concatenate([np.zeros(n), [-1.0]]),
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(-1e3, 1e3)] * n + [(0, 2.0)],
        method="highs",
    )
    if res.status != 0 or res.x[-1] <= 0:
        raise DomainInputError("custom polyhedral base is empty or degenerate")
    radius = max(min(res.x[-1], 2.0), 1e-3)
    # among the points with that margin, take one of minimal 1-norm
    eye = np.eye(n)
    res2 = linprog(
        np.concatenate([np.zeros(n), np.ones(n)]),
        A_ub=np.vstack(
            [
                np.hstack([A, np.zeros((A.shape[0], n))]),
                np.hstack([eye, -eye]),
                np.hstack([-eye, -eye]),
            ]
        ),
        b_ub=np.concatenate([b - 0.99 * radius * norms, np.zeros(2 * n)]),
        bounds=[(None, None)] * n + [(0, None)] * n,
        method="highs",
    )
    center = res2.x[:n] if res2.status == 0 else res.x[:n]
    radius = max(radius, 1.0)

    return TubeDomain(
        n, member, support, face, in_wdc, in_wdc, in_int, in_sd,
        family="general", strictly_convex=False,
        interior_point=center,
        sample_box=(center - 4.0 * radius, center + 4.0 * radius),
        descriptor={"custom": {"inequalities": ineqs}},
        int_wd_decidable=False,
    )


def _orthogonal_complement(v):
    v = np.asarray(v, dtype=float)
    n = v.size
    mat = np.eye(n) - np.outer(v, v) / float(v @ v)
    u, s, vt = np.linalg.svd(mat)
    return [u[:, i] for i in range(n) if s[i] > 1e-9]


BUILTIN_BUILDERS = {
    "quarter-circle": _quarter_circle,
    "hyperbola": _hyperbola,
    "dprime": _dprime,
    "half-parabola": _half_parabola,
    "half-cone": _half_cone,
    "gapq-log": _gapq_log,
    "orthant": _orthant,
    "ball-log": _ball_log,
    "disc": _disc,
    "interval": _interval,
}

#: the closed-form bases exercised by the face-vs-oracle acceptance check
ORACLE_CHECKED_BUILTINS = (
    "quarter-circle", "hyperbola", "dprime", "half-parabola", "half-cone", "gapq-log",
)


def builtin(name, **params):
    if name not in BUILTIN_BUILDERS:
        raise DomainInputError(
            f"unknown builtin domain {name!r}; known: {sorted(BUILTIN_BUILDERS)}"
        )
    return BUILTIN_BUILDERS[name](params)


def domain_from_json(data):
    if "builtin" in data:
        return builtin(data["builtin"], **(data.get("params") or {}))
    if "custom" in data:
        return _custom_polyhedral(data["custom"])
    if "transform" in data:
        inner = domain_from_json(data["transform"]["inner"])
        return rotated_domain(inner, np.asarray(data["transform"]["matrix"], dtype=float))
    raise DomainInputError("domain descriptor needs 'builtin', 'custom' or 'transform'")


# --- pushforwards -----------------------------------------------------------

def rotated_domain(domain, V):
    """Image of the base under a square orthogonal matrix V."""
    V = np.asarray(V, dtype=float)
    if V.shape != (domain.n, domain.n):
        raise UnsupportedReduction("rotation matrix must be square")
    if not np.allclose(V @ V.T, np.eye(domain.n), atol=1e-10):
        raise UnsupportedReduction("matrix is not orthogonal")
    Vt = V.T

    def member(x):
        return domain.membership_array(x @ V)  # rows x -> V^T x

    def face(v):
        return domain.face(Vt @ v).transformed(V)

    descriptor = None
    if domain.descriptor is not None:
        descriptor = {"transform": {"matrix": V.tolist(), "inner": domain.descriptor}}

    lo, hi = domain.sample_box
    corners = np.array(
        [[lo[i] if (k >> i) & 1 == 0 else hi[i] for i in range(domain.n)]
         for k in range(2 ** domain.n)]
    )
    mapped = corners @ V.T
    family = domain.family if np.allclose(V, np.eye(domain.n), atol=1e-12) else "general"

    return TubeDomain(
        domain.n,
        member,
        lambda v: domain.support(Vt @ v),
        face,
        lambda v, tol: domain.in_wd(Vt @ v, tol),
        lambda v, tol: domain.in_wd_closure(Vt @ v, tol),
        lambda v, tol: domain.in_int_wd(Vt @ v, tol),
        lambda y, tol: domain.in_sd(Vt @ y, tol),
        family=family,
        strictly_convex=domain.strictly_convex,
        interior_point=V @ domain.interior_point,
        sample_box=(mapped.min(axis=0), mapped.max(axis=0)),
        descriptor=descriptor,
        int_wd_decidable=domain.int_wd_decidable,
    )


def interval_image(domain, u):
    """Image of the base under x -> <u, x> for a unit row u (m = 1 case)."""
    u = np.asarray(u, dtype=float).reshape(-1)
    hi = domain.support(u)
    lo = -domain.support(-u)
    if math.isinf(hi) and math.isinf(lo):
        raise UnsupportedReduction(
            "projection of the base is the whole line; not a valid tube"
        )
    return builtin("interval", lo=lo, hi=hi)


def coordinate_project(domain, indices):
    """Coordinate projection, available for product-like builtins."""
    desc = domain.descriptor or {}
    name = desc.get("builtin")
    if name == "orthant":
        return builtin("orthant", n=len(indices))
    raise UnsupportedReduction(
        f"no closed-form coordinate projection for domain {desc!r}"
    )


# --- sampling oracle ---------------------------------------------------------

def oracle_support(
    domain, v, seed=0, initial=60000, rounds=14, round_samples=2500, pool=None, top=256
):
    """Brute-force support maximization: rejection samples pushed to the
    boundary along +v, then shrinking local resampling around the incumbent.

    Returns (value, point).  Independent of the closed-form face formulas.
    A pre-drawn sample pool can be shared across directions; only its best
    `top` points (by inner product) are pushed to the boundary.
    """
    rng = np.random.default_rng(seed)
    v = np.asarray(v, dtype=float)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise DomainInputError("oracle direction must be nonzero")
    vn = v / nv

    pts = pool if pool is not None else domain.sample_base(rng, initial)
    scores = pts @ vn
    if pts.shape[0] > top:
        pts = pts[np.argsort(scores)[-top:]]
    pushed = domain.boundary_push(pts, vn)
    vals = pushed @ vn
    best = int(np.argmax(vals))
    best_pt, best_val = pushed[best], float(vals[best])

    lo, hi = domain.sample_box
    scale = float(np.max(np.asarray(hi) - np.asarray(lo)))
    radius = 0.25 * scale
    for _ in range(rounds):
        cloud = best_pt[None, :] + rng.normal(scale=radius, size=(round_samples, domain.n))
        feasible = cloud[domain.membership_array(cloud)]
        if feasible.shape[0]:
            raw = feasible @ vn
            if feasible.shape[0] > 300:
                feasible = feasible[np.argsort(raw)[-300:]]
            pushed = domain.boundary_push(feasible, vn)
            vals = pushed @ vn
            i = int(np.argmax(vals))
            if float(vals[i]) > best_val:
                best_val, best_pt = float(vals[i]), pushed[i]
        # halving (not quartering) keeps the shrink slower than the walk
        # along flat contact rays, where progress per round is O(radius)
        radius /= 2.0
    return best_val * nv, best_pt


def sd_ray_check(domain, y, t_values=(1.0, 10.0, 100.0, 1000.0), points=32, seed=0):
    """Semi-decision for recession directions: a + t*y stays in the base for
    sampled base points a and the given ray parameters."""
    y = np.asarray(y, dtype=float)
    rng = np.random.default_rng(seed)
    pts = domain.sample_base(rng, points)
    for t in t_values:
        if not bool(np.all(domain.membership_array(pts + t * y[None, :]))):
            return False
    return True
