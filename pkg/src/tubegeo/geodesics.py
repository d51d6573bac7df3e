"""Construction and verification of boundary measures of complex geodesics.

A candidate bundles a measure tuple, a nonzero real-trace quadratic map h,
and a tube domain.  The verifier checks the geodesy conditions:

  (i)    the density lies in the exposed face of the trace direction,
  (ii)   the trace pairs nonnegatively with every singular direction,
  (iii)  singular directions lie in the recession cone,
  (iv)   the mean of the measure lies in the open base,
  (v)    singular directions are also orthogonal to the trace,
  (vi)   singular atoms sit where the trace hits the boundary of the
         bounded-support cone,
  (vii)  the trace stays in the closure of that cone,

plus a direct cross-check of the defining measure inequality: against
sampled interior points z the density part <trace, z - g> must be <= 0 and
the atom pairings >= 0; the singular part must pair <= 0 with sampled
directions of bounded support; and the mean must lie in the base.

Construction follows the face recipe: pick the face point of the trace
direction as the density (with explicit selection parameters on ray and
segment faces), then validate the supplied atoms against (ii), (iii), (vi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import ANGLE_TOL, angles_avoiding, wrap_angle
from .errors import (
    ConstructionError,
    DomainInputError,
    InvalidAtomError,
    UnsupportedReduction,
)
from .herglotz import HerglotzMap
from .measures import (
    Atom,
    BoundaryMeasureTuple,
    DensityFn,
    component_atoms,
    density_from_json,
    linear_image_density,
    register_density_kind,
    spherical_decompose,
    total_mass,
)
from .trace_poly import TraceQuadratic
from .tube_geometry import (
    TubeDomain,
    coordinate_project,
    domain_from_json,
    interval_image,
    rotated_domain,
)

GRID_EXCLUSION_WINDOW = 1e-6

DEFAULT_TOL_FACE = 1e-7
DEFAULT_TOL_SIGN = 1e-9


# --- face densities ----------------------------------------------------------

def _face_switch_angles(domain, h):
    """Angles where the face of the trace direction can change kind or blow
    up: circle roots of the components, plus vertex-switch roots for the
    two-vertex polyhedral base."""
    angles = []
    for j in range(h.n):
        if not h.component_is_zero(j):
            angles.extend(pt.angle for pt in h.circle_roots(j))
    desc = domain.descriptor or {}
    if desc.get("builtin") == "gapq-log" and h.n == 2:
        p, q = desc["params"]["p"], desc["params"]["q"]
        combo = TraceQuadratic(
            [q * h.a[0] - p * h.a[1]], [q * h.b[0] - p * h.b[1]]
        )
        if not combo.is_zero():
            angles.extend(pt.angle for pt in combo.circle_roots(0))
    out = []
    for ang in sorted(wrap_angle(a) for a in angles):
        if not out or ang - out[-1] > ANGLE_TOL:
            out.append(ang)
    return tuple(out)


def face_density(domain, h, ray_param=0.0, segment_param=0.5):
    """Density whose value at each angle is a selected point of the exposed
    face in the trace direction (the point itself, or the declared selection
    on ray and segment faces)."""

    def fn(thetas):
        # the product-form trace keeps the face branch correct arbitrarily
        # close to the declared singular angles
        traces = h.trace_grid_exact(thetas)
        out = np.empty((thetas.size, domain.n))
        for i in range(thetas.size):
            face = domain.face(traces[i])
            if face.kind in ("empty", "unsupported"):
                out[i] = np.nan
            else:
                out[i] = face.select(ray_param, segment_param)
        return out

    params = None
    kind = None
    if domain.descriptor is not None:
        kind = "face"
        params = {
            "domain": domain.descriptor,
            "h": h.to_json(),
            "ray_param": ray_param,
            "segment_param": segment_param,
        }
    return DensityFn(
        domain.n, fn, singular_points=_face_switch_angles(domain, h),
        kind=kind, params=params,
    )


def _face_density_from_json(params, singular_points):
    domain = domain_from_json(params["domain"])
    h = TraceQuadratic.from_json(params["h"])
    return face_density(
        domain, h,
        ray_param=float(params.get("ray_param", 0.0)),
        segment_param=float(params.get("segment_param", 0.5)),
    )


register_density_kind("face", _face_density_from_json)


# --- candidate ----------------------------------------------------------------

@dataclass
class GeodesicCandidate:
    mu: BoundaryMeasureTuple
    h: TraceQuadratic
    domain: TubeDomain
    im0: np.ndarray = None

    def __post_init__(self):
        n = self.mu.n
        if self.h.n != n or self.domain.n != n:
            raise DomainInputError("measure, map and domain dimensions disagree")
        if self.h.is_zero():
            raise DomainInputError("the dual map h must not vanish identically")
        self.im0 = (
            np.zeros(n) if self.im0 is None else np.asarray(self.im0, dtype=float)
        )

    def herglotz(self):
        return HerglotzMap(self.mu, self.im0)

    def to_json(self):
        return {
            "n": self.mu.n,
            "domain": self.domain.to_json(),
            "h": self.h.to_json(),
            "measure": self.mu.to_json(),
            "im0": self.im0.tolist(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            mu=BoundaryMeasureTuple.from_json(data["measure"]),
            h=TraceQuadratic.from_json(data["h"]),
            domain=domain_from_json(data["domain"]),
            im0=np.asarray(data.get("im0") or [0.0] * int(data["n"]), dtype=float),
        )


def eval_candidate(cand: GeodesicCandidate, lam, rel_tol=1e-9):
    return cand.herglotz().eval(lam, rel_tol=rel_tol)


# --- verification report -------------------------------------------------------

@dataclass
class ConditionRecord:
    status: str  # pass | fail | inapplicable
    residual: float = 0.0
    witness: dict = None
    sampled: bool = False
    note: str = None

    def failed(self):
        return self.status == "fail"

    def to_json(self):
        out = {"status": self.status, "residual": self.residual}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.sampled:
            out["sampled"] = True
        if self.note:
            out["note"] = self.note
        return out


CORE_CONDITIONS = ("i", "ii", "iii", "iv")
ALL_CONDITIONS = ("i", "ii", "iii", "iv", "v", "vi", "vii", "measure_inequality")


@dataclass
class VerificationReport:
    conditions: dict
    config: dict = field(default_factory=dict)

    @property
    def overall(self):
        return (
            "pass"
            if not any(self.conditions[k].failed() for k in CORE_CONDITIONS)
            else "fail"
        )

    def failing_conditions(self):
        return [k for k in ALL_CONDITIONS if self.conditions[k].failed()]

    def to_json(self):
        return {
            "overall": self.overall,
            "conditions": {k: self.conditions[k].to_json() for k in ALL_CONDITIONS},
            "config": self.config,
        }


# --- z and direction samplers ---------------------------------------------------

def sample_interior_points(domain, count, rng, face_points=()):
    """Interior sample mixing box rejection with points pulled inward from
    supplied boundary face points; the near-face points make the direct
    density inequality sensitive to inward-shifted densities."""
    anchor = domain.interior_point
    out = []
    eps_cycle = (1e-4, 1e-3, 1e-2)
    usable = [p for p in face_points if np.all(np.isfinite(p))]
    for i, p in enumerate(usable):
        if len(out) >= count // 2:
            break
        z = p + eps_cycle[i % 3] * (anchor - p)
        if domain.base_membership(z):
            out.append(z)
    remaining = count - len(out)
    if remaining > 0:
        out.extend(domain.sample_base(rng, remaining))
    return np.asarray(out[:count])


def sample_wd_directions(domain, count, rng):
    """Directions spanning the closure of the bounded-support cone."""
    n = domain.n
    dirs = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if domain.in_wd_closure(e, tol=1e-12):
            dirs.append(e)
        if domain.in_wd_closure(-e, tol=1e-12):
            dirs.append(-e)
    tries = 0
    while len(dirs) < count and tries < 50 * count:
        v = rng.normal(size=n)
        nv = np.linalg.norm(v)
        tries += 1
        if nv == 0:
            continue
        v /= nv
        if domain.in_wd_closure(v, tol=1e-12):
            dirs.append(v)
    return dirs


# --- verify ----------------------------------------------------------------------

def verify(
    cand: GeodesicCandidate,
    grid_size=1024,
    z_samples=100,
    seed=0,
    tol_face=DEFAULT_TOL_FACE,
    tol_sign=DEFAULT_TOL_SIGN,
    threads=None,
) -> VerificationReport:
    """Check the geodesy conditions on a grid and at every singular atom."""
    if grid_size < 256:
        raise DomainInputError("grid_size must be at least 256")
    domain, h, mu = cand.domain, cand.h, cand.mu

    dec = spherical_decompose(mu)
    excluded = mu.excluded_angles()
    thetas = angles_avoiding(grid_size, excluded, window=GRID_EXCLUSION_WINDOW)
    # the product-form trace stays branch- and digit-exact near circle
    # roots, where log-type faces amplify any cancellation in the direction
    traces = h.trace_grid_exact(thetas)
    g_vals = mu.ac(thetas)

    conditions = {}

    # (i) density in the exposed face, sampled on the grid
    faces = _map_faces(domain, traces, threads)
    dists = np.array([f.distance(g_vals[k]) for k, f in enumerate(faces)])
    if np.any(np.isnan(dists)):
        k = int(np.where(np.isnan(dists))[0][0])
        conditions["i"] = ConditionRecord(
            "inapplicable", float("nan"),
            {"angle": float(thetas[k])}, sampled=True,
            note="face kind unsupported on the grid; distance not computable",
        )
    elif dists.size == 0:
        conditions["i"] = ConditionRecord(
            "inapplicable", 0.0, sampled=True,
            note="every grid angle fell into an exclusion window",
        )
    else:
        k = int(np.argmax(dists))
        worst = float(dists[k])
        conditions["i"] = ConditionRecord(
            "pass" if worst < tol_face else "fail",
            worst, {"angle": float(thetas[k])},
            sampled=True,
        )

    # atom-side conditions (ii), (iii), (v), (vi)
    atom_traces = [h.trace(p.value) for p in dec.nu_points]
    pairings = [
        float(t @ r) for t, r in zip(atom_traces, dec.rho_vectors)
    ]
    if not dec.nu_points:
        for key in ("ii", "iii", "v", "vi"):
            conditions[key] = ConditionRecord(
                "inapplicable", 0.0, note="no singular part"
            )
    else:
        k = int(np.argmin(pairings))
        conditions["ii"] = ConditionRecord(
            "pass" if pairings[k] >= -tol_sign else "fail",
            -min(0.0, pairings[k]),
            {"angle": dec.nu_points[k].angle, "pairing": pairings[k]},
        )

        bad = [
            (p, r) for p, r in zip(dec.nu_points, dec.rho_vectors)
            if not domain.in_sd(r, tol=tol_sign)
        ]
        conditions["iii"] = ConditionRecord(
            "pass" if not bad else "fail",
            0.0 if not bad else 1.0,
            None if not bad else {"angle": bad[0][0].angle, "rho": bad[0][1].tolist()},
            note="recession-cone membership; residual is an indicator",
        )

        k = int(np.argmax(np.abs(pairings)))
        ortho_ok = abs(pairings[k]) <= tol_sign and not bad
        conditions["v"] = ConditionRecord(
            "pass" if ortho_ok else "fail",
            abs(pairings[k]),
            {"angle": dec.nu_points[k].angle},
        )

        vi_bad, vi_indet = [], False
        for p, t in zip(dec.nu_points, atom_traces):
            interior = domain.in_int_wd(t, tol=tol_sign)
            if interior is None:
                vi_indet = True
            elif interior or not domain.in_wd_closure(t, tol=tol_sign):
                vi_bad.append(p)
        if vi_indet:
            conditions["vi"] = ConditionRecord(
                "inapplicable", 0.0,
                note="interior of the support cone undecidable for this domain",
            )
        else:
            conditions["vi"] = ConditionRecord(
                "pass" if not vi_bad else "fail",
                0.0 if not vi_bad else 1.0,
                None if not vi_bad else {"angle": vi_bad[0].angle},
                note="trace must sit on the boundary of the support cone",
            )

    # (iv) mean of the measure in the open base
    mass = total_mass(mu)
    in_base = domain.base_membership(mass)
    conditions["iv"] = ConditionRecord(
        "pass" if in_base else "fail",
        0.0 if in_base else 1.0,
        {"mass": mass.tolist()},
        note="open-base membership; residual is an indicator",
    )

    # (vii) trace in the closed support cone over the grid
    bad_vii = [
        k for k in range(thetas.size)
        if not domain.in_wd_closure(traces[k], tol=tol_sign)
    ]
    conditions["vii"] = ConditionRecord(
        "pass" if not bad_vii else "fail",
        0.0 if not bad_vii else 1.0,
        None if not bad_vii else {"angle": float(thetas[bad_vii[0]])},
        sampled=True,
    )

    # direct measure-inequality cross-check
    rng = np.random.default_rng(seed)
    face_pts = [
        f.select() for f in faces[:: max(1, thetas.size // max(z_samples, 1))]
        if f.kind in ("point", "ray", "segment")
    ]
    zs = sample_interior_points(domain, z_samples, rng, face_pts)
    density_scores = zs @ traces.T - np.sum(traces * g_vals, axis=1)[None, :]
    worst_density = float(np.max(density_scores)) if density_scores.size else 0.0
    zi, li = (
        np.unravel_index(int(np.argmax(density_scores)), density_scores.shape)
        if density_scores.size
        else (0, 0)
    )
    atom_terms = [p * w for p, w in zip(pairings, dec.nu_weights)]
    worst_atom = float(min(atom_terms)) if atom_terms else 0.0
    wd_dirs = sample_wd_directions(domain, 64, rng)
    sing_pair = 0.0
    sing_witness = None
    for atom in mu.atoms:
        for d in wd_dirs:
            val = float(atom.weight @ d)
            if val > sing_pair:
                sing_pair = val
                sing_witness = {"angle": atom.point.angle, "direction": d.tolist()}
    t41_ok = (
        worst_density <= tol_sign
        and worst_atom >= -tol_sign
        and sing_pair <= tol_sign
        and in_base
    )
    t41_witness = {
        "density": {"z": zs[zi].tolist(), "angle": float(thetas[li])}
        if density_scores.size else None,
        "worst_density": worst_density,
        "worst_atom_term": worst_atom,
        "worst_singular_pairing": sing_pair,
        "singular_witness": sing_witness,
        "mass_in_base": bool(in_base),
    }
    conditions["measure_inequality"] = ConditionRecord(
        "pass" if t41_ok else "fail",
        max(worst_density, -worst_atom, sing_pair, 0.0),
        t41_witness,
        sampled=True,
    )

    config = {
        "grid_size": grid_size,
        "z_samples": z_samples,
        "seed": seed,
        "tol_face": tol_face,
        "tol_sign": tol_sign,
        "threads": threads,
        "excluded_angles": [float(a) for a in excluded],
    }
    return VerificationReport(conditions, config)


def _map_faces(domain, traces, threads):
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(np.arange(traces.shape[0]), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda idx: [domain.face(traces[k]) for k in idx], chunks)
            )
        return [f for part in parts for f in part]
    return [domain.face(traces[k]) for k in range(traces.shape[0])]


# --- construction -----------------------------------------------------------------

def _validate_atoms(domain, h, atoms, tol=DEFAULT_TOL_SIGN):
    for atom in atoms:
        norm = float(np.linalg.norm(atom.weight))
        if norm == 0.0:
            continue
        rho = atom.weight / norm
        t = h.trace(atom.point.value)
        if float(t @ rho) < -tol:
            raise InvalidAtomError(
                f"atom at angle {atom.point.angle} pairs negatively with the trace",
                condition="ii",
            )
        if not domain.in_sd(rho, tol=tol):
            raise InvalidAtomError(
                f"atom direction {rho.tolist()} leaves the recession cone",
                condition="iii",
            )
        interior = domain.in_int_wd(t, tol=tol)
        if interior:
            raise InvalidAtomError(
                f"atom at angle {atom.point.angle} sits where the trace is "
                "interior to the support cone",
                condition="vi",
            )
    return atoms


def construct(
    h: TraceQuadratic,
    domain: TubeDomain,
    atoms=(),
    im0=None,
    ray_param=0.0,
    segment_param=0.5,
    check_grid=512,
) -> GeodesicCandidate:
    """Build a candidate from the face recipe.

    The density is the face point of the trace direction (with the supplied
    selection parameters on ray/segment faces); atoms are validated against
    the pairing, recession-cone and cone-boundary conditions; the density is
    rejected loudly when faces are empty on a set of positive measure or the
    face values fail to be integrable.
    """
    if h.is_zero():
        raise ConstructionError("the dual map h must not vanish identically")
    if h.n != domain.n:
        raise DomainInputError("map and domain dimensions disagree")

    density = face_density(domain, h, ray_param, segment_param)
    thetas = angles_avoiding(
        check_grid, density.singular_points, window=GRID_EXCLUSION_WINDOW
    )
    traces = h.trace_grid_exact(thetas)
    empty = 0
    for k in range(thetas.size):
        face = domain.face(traces[k])
        if face.kind in ("empty", "unsupported"):
            empty += 1
    if empty > max(2, check_grid // 100):
        raise ConstructionError(
            f"exposed faces are empty or unsupported at {empty} of "
            f"{thetas.size} grid angles; the face recipe does not apply to this map"
        )

    density.check_integrable()

    validated = _validate_atoms(domain, h, tuple(atoms))
    mu = BoundaryMeasureTuple(density, validated)
    return GeodesicCandidate(mu, h, domain, im0)


def construct_dn(
    h: TraceQuadratic,
    domain: TubeDomain,
    atom_spec=(),
    im0=None,
    ray_param=0.0,
    segment_param=0.5,
) -> GeodesicCandidate:
    """Monotone-base specialization: componentwise nonnegative trace and one
    optional nonpositive atom per component, pinned to a circle root of that
    component whenever the component is not identically zero."""
    if domain.family != "Dn":
        raise DomainInputError(
            f"domain family {domain.family!r} is not the monotone-orthant family"
        )
    mask = h.nonneg_trace_mask()
    for j in range(h.n):
        if not h.component_is_zero(j) and not mask[j]:
            raise DomainInputError(
                f"component {j} has sign-changing trace; not admissible here"
            )
    entries = []
    for j, spec in enumerate(atom_spec):
        if spec is None:
            continue
        point, alpha = spec
        alpha = float(alpha)
        if alpha == 0.0:
            continue
        if alpha > 0.0:
            raise InvalidAtomError(
                f"component {j} atom weight must be <= 0, got {alpha}",
                condition="iii",
            )
        if not h.component_is_zero(j):
            scale = max(1.0, 2.0 * abs(h.a[j]) + abs(h.b[j]))
            if h.trace_residual_at(j, point) > 1e-9 * scale:
                raise InvalidAtomError(
                    f"component {j} atom must sit at a circle root of that component",
                    condition="ii",
                )
        entries.append((j, point, alpha))
    atoms = component_atoms(entries, h.n)
    return construct(
        h, domain, atoms, im0, ray_param=ray_param, segment_param=segment_param
    )


def construct_halfplane(
    h: TraceQuadratic,
    domain: TubeDomain,
    atom=None,
    im0=None,
    ray_param=0.0,
    segment_param=0.5,
) -> GeodesicCandidate:
    """Half-plane support-cone specialization in dimension two: the second
    component of h has nonpositive trace and the singular part is a single
    nonnegative atom in the second coordinate, pinned to a circle root of
    that component when it is not identically zero."""
    if domain.family != "halfplaneW":
        raise DomainInputError(
            f"domain family {domain.family!r} is not the half-plane family"
        )
    if h.n != 2:
        raise DomainInputError("half-plane construction lives in dimension two")
    if not h.component_is_zero(1) and not h.negated().nonneg_trace_mask()[1]:
        raise DomainInputError("second component must have nonpositive trace")
    atoms = ()
    if atom is not None:
        point, alpha = atom
        alpha = float(alpha)
        if alpha < 0.0:
            raise InvalidAtomError(
                f"the vertical atom weight must be >= 0, got {alpha}",
                condition="iii",
            )
        if alpha > 0.0:
            if not h.component_is_zero(1):
                scale = max(1.0, 2.0 * abs(h.a[1]) + abs(h.b[1]))
                if h.trace_residual_at(1, point) > 1e-9 * scale:
                    raise InvalidAtomError(
                        "vertical atom must sit at a circle root of the second component",
                        condition="ii",
                    )
            atoms = component_atoms([(1, point, alpha)], 2)
    return construct(
        h, domain, atoms, im0, ray_param=ray_param, segment_param=segment_param
    )


# --- dimension reduction --------------------------------------------------------

def reduce_dimension(cand: GeodesicCandidate):
    """Project the candidate onto the span of the map coefficients.

    Returns (V, reduced candidate) with V an orthonormal row basis of
    span{Re a, Im a, b}.  The pushforward domain is an interval for rank one,
    an orthogonal change of variables for full rank, and a coordinate
    projection for product-like bases; anything else raises.
    """
    m, V = cand.h.span_basis()
    n = cand.domain.n
    if m == n:
        new_domain = rotated_domain(cand.domain, V)
    elif m == 1:
        new_domain = interval_image(cand.domain, V[0])
    else:
        col_norms = np.linalg.norm(V, axis=0)
        keep = np.where(col_norms > 1e-12)[0]
        if keep.size != m:
            raise UnsupportedReduction(
                "pushforward domain has no closed form: the reduction mixes "
                f"{keep.size} coordinates into rank {m}"
            )
        sub = V[:, keep]
        new_domain = rotated_domain(coordinate_project(cand.domain, keep), sub)

    new_h = cand.h.linear_image(V)
    new_density = linear_image_density(V, cand.mu.ac)
    new_atoms = [Atom(a.point, V @ a.weight) for a in cand.mu.atoms]
    new_mu = BoundaryMeasureTuple(new_density, new_atoms)
    reduced = GeodesicCandidate(new_mu, new_h, new_domain, V @ cand.im0)
    return V, reduced
