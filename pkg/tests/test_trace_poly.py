"""Quadratic maps with real circle trace: traces, factors, roots, spans."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubegeo.circle import CirclePoint, uniform_angles
from tubegeo.errors import DomainInputError
from tubegeo.trace_poly import PositiveFactor, TraceQuadratic


class TestTrace:
    def test_halfcone_trace(self):
        # h = (1/2)(lam^2+1, -i lam^2 + i, -2 lam) has trace (cos, sin, -1)
        h = TraceQuadratic([0.5, 0.5j, 0.0], [0.0, 0.0, -1.0])
        for theta in (0.0, 0.7, 2.9, 4.4):
            lam = cmath.exp(1j * theta)
            tr = h.trace(lam)
            assert np.allclose(tr, [math.cos(theta), math.sin(theta), -1.0], atol=1e-14)

    def test_factor_trace_constant(self):
        f = PositiveFactor(1.0, 0.0)
        h = TraceQuadratic.from_factors([f])
        assert abs(h.trace(1j)[0] - 1.0) < 1e-15

    def test_factor_trace_value(self):
        f = PositiveFactor(2.0, 1.0)
        assert abs(f.trace(-1.0) - 8.0) < 1e-15
        h = TraceQuadratic.from_factors([f])
        assert abs(h.trace(-1.0)[0] - 8.0) < 1e-14

    def test_nonunit_rejected(self):
        h = TraceQuadratic([1.0], [0.0])
        with pytest.raises(DomainInputError):
            h.trace(0.5)

    @given(
        st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.0, max_value=2.0 * math.pi),
    )
    @settings(max_examples=300, deadline=None)
    def test_trace_always_real(self, a, b, theta):
        h = TraceQuadratic([a], [b])
        lam = cmath.exp(1j * theta)
        val = np.conj(lam) * h(lam)[0]
        assert abs(val.imag) < 1e-12

    def test_exact_grid_matches_plain(self):
        h = TraceQuadratic([0.3 - 0.7j, 1.2], [0.4, 2.5])
        thetas = uniform_angles(257)
        assert np.allclose(h.trace_grid(thetas), h.trace_grid_exact(thetas), atol=1e-12)


class TestFactors:
    def test_expansion_d_one(self):
        h = TraceQuadratic.from_factors([PositiveFactor(1.0, 1.0)])
        assert h.a[0] == -1.0 and h.b[0] == 2.0
        thetas = uniform_angles(64)
        target = np.abs(np.exp(1j * thetas) - 1.0) ** 2
        assert np.allclose(h.trace_grid(thetas)[:, 0], target, atol=1e-12)

    def test_zero_factor(self):
        h = TraceQuadratic.from_factors([PositiveFactor(0.0, 0.3 + 0.1j)])
        assert h.component_is_zero(0)

    def test_expansion_d_i(self):
        h = TraceQuadratic.from_factors([PositiveFactor(1.0, 1j)])
        assert h.a[0] == -1j and h.b[0] == 2.0
        assert abs(h.trace(1j)[0]) < 1e-15

    def test_round_trip_through_factorization(self):
        for c, d in [(1.0, 0.0), (2.0, 0.5 + 0.3j), (0.7, -0.9j), (1.5, 1.0)]:
            h = TraceQuadratic.from_factors([PositiveFactor(c, d)])
            f = h.factor_component(0)
            assert abs(f.c - c) < 1e-9
            assert abs(f.d - d) < 1e-9

    def test_signs(self):
        h = TraceQuadratic.from_factors([PositiveFactor(1.0, 0.2)], signs=[-1])
        assert h.trace(1.0)[0] < 0


class TestCircleRoots:
    def test_double_root(self):
        h = TraceQuadratic([-1.0], [2.0])  # -(lam-1)^2
        roots = h.circle_roots(0)
        assert len(roots) == 1 and roots[0] == CirclePoint(0.0)

    def test_no_roots_for_identity(self):
        h = TraceQuadratic([0.0], [1.0])  # h = lam
        assert h.circle_roots(0) == []

    def test_two_roots(self):
        h = TraceQuadratic([1.0], [0.0])  # lam^2 + 1
        angles = sorted(p.angle for p in h.circle_roots(0))
        assert np.allclose(angles, [math.pi / 2, 3 * math.pi / 2], atol=1e-12)

    def test_zero_component_rejected(self):
        h = TraceQuadratic([0.0], [0.0])
        with pytest.raises(DomainInputError):
            h.circle_roots(0)

    def test_residual_matches_roots(self):
        h = TraceQuadratic.from_factors([PositiveFactor(1.3, cmath.exp(2.2j))])
        (root,) = h.circle_roots(0)
        assert h.trace_residual_at(0, root) < 1e-12
        assert h.trace_residual_at(0, CirclePoint(root.angle + 1.0)) > 0.1


class TestNonnegTrace:
    def test_factor_built_maps(self):
        h = TraceQuadratic.from_factors(
            [PositiveFactor(1.0, 0.3), PositiveFactor(2.0, 1j)]
        )
        assert h.nonneg_trace_mask() == [True, True]

    def test_sign_changing(self):
        h = TraceQuadratic([1.0], [0.0])  # trace = 2 cos
        assert h.nonneg_trace_mask() == [False]

    def test_negated(self):
        h = TraceQuadratic.from_factors([PositiveFactor(1.0, 0.5)], signs=[-1])
        assert h.nonneg_trace_mask() == [False]
        assert h.negated().nonneg_trace_mask() == [True]

    def test_strict_positivity_interior_root(self):
        h = TraceQuadratic.from_factors([PositiveFactor(1.0, 0.5)])
        vals = h.trace_grid(uniform_angles(1024))
        assert np.min(vals) > 0


class TestSpanBasis:
    def test_real_a_plus_b(self):
        h = TraceQuadratic([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        m, basis = h.span_basis()
        assert m == 2
        assert basis.shape == (2, 3)
        assert np.allclose(basis @ basis.T, np.eye(2), atol=1e-12)

    def test_single_direction(self):
        h = TraceQuadratic([0.0, 0.0], [1.0, 0.0])
        m, basis = h.span_basis()
        assert m == 1
        assert np.allclose(np.abs(basis), [[1.0, 0.0]])

    def test_halfcone_full_rank(self):
        h = TraceQuadratic([0.5, 0.5j, 0.0], [0.0, 0.0, -1.0])
        m, _ = h.span_basis()
        # oracle: det of the 3x3 coefficient matrix (Re a, Im a, b)
        rows = np.vstack([h.a.real, h.a.imag, h.b])
        assert abs(np.linalg.det(rows)) > 1e-6
        assert m == 3

    def test_zero_map_rejected(self):
        with pytest.raises(DomainInputError):
            TraceQuadratic([0.0], [0.0]).span_basis()


class TestDependence:
    def test_proportional(self):
        s = PositiveFactor(1.0, 0.4 + 0.2j)
        a, b = s.coefficients()
        h = TraceQuadratic([a, 3.0 * a], [b, 3.0 * b])
        assert h.components_dependent(0, 1)

    def test_independent(self):
        h = TraceQuadratic.from_factors(
            [PositiveFactor(1.0, 0.0), PositiveFactor(1.0, 0.5)]
        )
        assert not h.components_dependent(0, 1)


def test_json_round_trip():
    h = TraceQuadratic([0.2 - 0.4j, 1.0], [0.5, -2.0])
    h2 = TraceQuadratic.from_json(h.to_json())
    assert np.allclose(h.a, h2.a) and np.allclose(h.b, h2.b)
    h3 = TraceQuadratic.from_json(
        {"factors": [{"c": 1.0, "d": [0.5, 0.0]}, {"c": 2.0, "d": [0.0, 0.0], "sign": -1}]}
    )
    assert h3.trace(1.0)[0] > 0 and h3.trace(1.0)[1] < 0
