"""Adaptive quadrature on the unit circle.

Integrands are vector valued functions of the angle, possibly unbounded (but
integrable) at a finite list of declared singular angles.  Around each
declared singularity the angle is reparametrized by the power substitution
theta = s +/- u**POWER, which turns an algebraic singularity
|theta - s|**(-alpha) with alpha < 1 into a power of u; fixed-order
Gauss-Legendre panels are bisected adaptively everywhere.

Two effects specific to evaluating densities in floating point are handled
explicitly.  First, within an angular distance TAIL_DELTA of a singular
point the integrand value inherits the rounding of the angle offset, so
that last slice is not integrated but extrapolated: the transformed
integrand is fitted with a power law at the window edge and the tail added
in closed form (the same idea as endpoint extrapolation in classical
adaptive integrators).  A fitted exponent at or below -1 means the declared
singularity is not integrable and is reported as such.  Second, panels
whose error estimate is already at the noise floor implied by the angular
rounding are accepted rather than bisected forever.
"""

from __future__ import annotations

import math

import numpy as np

from .circle import TWO_PI, wrap_angle
from .errors import NonIntegrableDensity, QuadratureError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)

#: exponent of the substitution used around declared singular angles
POWER = 6

#: angular distance below which the tail is extrapolated instead of sampled
TAIL_DELTA = 1e-9


def _panel_value(fn, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid + half * _GL_NODES
    vals = np.asarray(fn(x))
    return half * np.einsum("m,m...->...", _GL_WEIGHTS, vals)


class _Segment:
    """One u-interval with a map u -> (theta, jacobian), a relative noise
    model, and a flag marking power-transformed singular windows."""

    __slots__ = ("lo", "hi", "theta_of", "jac_of", "rel_noise_of", "is_power")

    def __init__(self, lo, hi, theta_of, jac_of, rel_noise_of=None, is_power=False):
        self.lo, self.hi = lo, hi
        self.theta_of, self.jac_of = theta_of, jac_of
        self.rel_noise_of = rel_noise_of or (lambda u: 0.0)
        self.is_power = is_power


def _identity_segment(a, b):
    return _Segment(a, b, lambda u: u, lambda u: np.ones_like(u))


def _power_segment(s, width, side):
    # maps u in [eps, width**(1/POWER)] to theta = s + side*u**POWER
    top = width ** (1.0 / POWER)
    eps = min(TAIL_DELTA ** (1.0 / POWER), 0.5 * top)

    def theta_of(u):
        return s + side * u**POWER

    def jac_of(u):
        return POWER * u ** (POWER - 1)

    def rel_noise_of(u):
        # the angular offset u**POWER is known only to ~2.5e-16 absolute
        return min(1.0, 2.5e-16 * max(1.0, abs(s)) / u**POWER)

    return _Segment(eps, top, theta_of, jac_of, rel_noise_of, is_power=True)


def _build_segments(singular_points, breakpoints, min_seed):
    """Split [0, 2pi) into power windows around singularities plus plain
    panels, rotating the parametrization so no singularity sits at a seam."""
    sing = []
    for s in sorted(wrap_angle(x) for x in singular_points):
        if not sing or s - sing[-1] > 1e-9:
            sing.append(s)
    if len(sing) > 1 and (TWO_PI - sing[-1]) + sing[0] <= 1e-9:
        sing.pop()  # wrap-around duplicate
    if sing:
        gaps = [
            (wrap_angle(sing[(i + 1) % len(sing)] - sing[i] - 1e-30), i)
            for i in range(len(sing))
        ]
        if len(sing) == 1:
            offset = wrap_angle(sing[0] + math.pi)
            min_gap = TWO_PI
        else:
            widest, i0 = max(gaps)
            offset = wrap_angle(sing[i0] + widest / 2.0)
            min_gap = min(g for g, _ in gaps)
        window = min(0.4, min_gap / 2.5)
    else:
        offset, window = 0.0, 0.0

    def shift(t):
        return wrap_angle(t - offset)

    sing_sh = sorted(shift(s) for s in sing)
    cuts = {0.0, TWO_PI}
    cuts.update(wrap_angle(shift(b)) for b in breakpoints)
    for s in sing_sh:
        cuts.add(s - window)
        cuts.add(s + window)
    cuts = sorted(c for c in cuts if -1e-15 <= c <= TWO_PI + 1e-15)

    segments = []
    for s in sing_sh:
        segments.append(_power_segment(s, window, -1.0))
        segments.append(_power_segment(s, window, +1.0))

    def in_window(a, b):
        mid = 0.5 * (a + b)
        return any(abs(mid - s) < window - 1e-14 for s in sing_sh)

    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-14 or in_window(a, b):
            continue
        pieces = max(1, math.ceil((b - a) / (TWO_PI / min_seed)))
        edges = np.linspace(a, b, pieces + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            segments.append(_identity_segment(lo, hi))
    return offset, segments


def _tail_estimate(eval_at, seg, scale):
    """Closed-form tail of a power window below its lower edge.

    Fits F(u) ~ C u^p componentwise from the values at the edge and twice
    the edge, then integrates the fit over [0, edge].  An exponent at or
    below -1 on a non-negligible component signals a non-integrable
    density.
    """
    u0 = seg.lo
    f1 = np.asarray(eval_at(np.array([u0]), seg))[0]
    f2 = np.asarray(eval_at(np.array([2.0 * u0]), seg))[0]
    tail = np.zeros_like(f1)
    floor = 1e-13 * max(scale, 1.0)
    flat1 = f1.reshape(-1)
    flat2 = f2.reshape(-1)
    out = tail.reshape(-1)
    for j in range(flat1.size):
        a1, a2 = abs(flat1[j]), abs(flat2[j])
        if a1 <= floor or a2 <= floor:
            continue
        p = math.log2(a2 / a1)
        if p <= -0.95:
            raise NonIntegrableDensity(
                "density behaves like |angle offset|^"
                f"{(p + 1.0) / POWER - 1.0:.3f} near a declared singular "
                "point; the integral diverges"
            )
        p = min(p, POWER + 4.0)
        out[j] = flat1[j] * u0 / (p + 1.0)
    return tail


def integrate_circle(
    fn,
    singular_points=(),
    breakpoints=(),
    rel_tol=1e-9,
    max_depth=60,
    diverge_cap=1e6,
    min_seed=8,
):
    """Integrate fn(theta) over [0, 2pi).

    fn maps an angle array of shape (m,) to values of shape (m, ...).
    Returns the integral with the trailing shape of fn's output.  Raises
    QuadratureError when refinement stalls and NonIntegrableDensity when
    the running mass exceeds diverge_cap or a singular tail fits a
    non-integrable exponent.
    """
    offset, segments = _build_segments(singular_points, breakpoints, min_seed)

    def eval_at(u, seg):
        theta = seg.theta_of(np.asarray(u, dtype=float))
        vals = np.asarray(fn(wrap_angle_array(theta + offset)))
        jac = seg.jac_of(np.asarray(u, dtype=float))
        return vals * jac.reshape(jac.shape + (1,) * (vals.ndim - 1))

    first_pass = []
    for seg in segments:
        first_pass.append(_panel_value(lambda u, s=seg: eval_at(u, s), seg.lo, seg.hi))
    rough = np.sum(first_pass, axis=0)
    scale = float(np.max(np.abs(rough))) if np.size(rough) else 0.0
    tol_abs = rel_tol * max(scale, 1e-8)

    total_width = sum(s.hi - s.lo for s in segments)
    result = np.zeros_like(rough)
    abs_accum = 0.0

    for seg, top_value in zip(segments, first_pass):
        f = lambda u, s=seg: eval_at(u, s)
        if seg.is_power:
            result = result + _tail_estimate(eval_at, seg, scale)
        stack = [(seg.lo, seg.hi, top_value, 0)]
        while stack:
            lo, hi, whole, depth = stack.pop()
            mid = 0.5 * (lo + hi)
            left = _panel_value(f, lo, mid)
            right = _panel_value(f, mid, hi)
            if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
                raise QuadratureError(
                    "integrand returned a non-finite value inside u-panel "
                    f"[{lo:.6g}, {hi:.6g}]; declare the offending angle as a "
                    "singular point of the density"
                )
            err = float(np.max(np.abs(whole - (left + right))))
            budget = tol_abs * max((hi - lo) / total_width, 1e-6)
            panel_mass = float(np.max(np.abs(left)) + np.max(np.abs(right)))
            noise_floor = 4.0 * seg.rel_noise_of(mid) * panel_mass
            if err <= budget or err <= noise_floor or err <= 1e-16 * max(scale, 1.0):
                result = result + (left + right)
                abs_accum += panel_mass
                if abs_accum > diverge_cap:
                    raise NonIntegrableDensity(
                        "circle quadrature diverges: accumulated mass "
                        f"{abs_accum:.3e} exceeds {diverge_cap:.1e}"
                    )
                continue
            if depth >= max_depth:
                raise QuadratureError(
                    f"circle quadrature stalled at depth {depth} on "
                    f"u-panel [{lo:.6g}, {hi:.6g}] (error {err:.3e}, "
                    f"budget {budget:.3e})"
                )
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    return result


def wrap_angle_array(theta):
    t = np.mod(theta, TWO_PI)
    t[t >= TWO_PI] -= TWO_PI
    return t


def integrate_norm(fn, singular_points=(), rel_tol=1e-7, diverge_cap=1e6):
    """Integral of the euclidean norm of fn; used as the integrability check."""

    def norm_fn(theta):
        vals = np.asarray(fn(theta), dtype=float)
        return np.sqrt(np.sum(vals * vals, axis=-1, keepdims=True))

    out = integrate_circle(
        norm_fn, singular_points=singular_points, rel_tol=rel_tol,
        diverge_cap=diverge_cap,
    )
    return float(out[0])
