"""Service operations: the single implementation behind both the HTTP
endpoints and the command line client."""

from __future__ import annotations

import numpy as np

from ..circle import CirclePoint
from ..geodesics import (
    GeodesicCandidate,
    construct,
    construct_dn,
    construct_halfplane,
    reduce_dimension,
    verify,
)
from ..measures import Atom, BoundaryMeasureTuple, spherical_decompose
from ..reinhardt import (
    DiscAutomorphism,
    ExtremalCandidate,
    gapq_extremal,
    kobayashi_value,
    lempert_value,
)
from ..trace_poly import TraceQuadratic
from ..tube_geometry import domain_from_json
from . import schemas as sc


def decompose_op(req: sc.DecomposeRequest) -> sc.DecomposeResponse:
    mu = BoundaryMeasureTuple.from_json(req.measure)
    dec = spherical_decompose(mu)
    data = dec.to_json()
    return sc.DecomposeResponse(g=data["g"], nu=data["nu"], rho=data["rho"])


def _atoms_from_specs(specs):
    return [
        Atom(CirclePoint(a.angle), np.asarray(a.weight, dtype=float)) for a in specs
    ]


def construct_op(req: sc.ConstructRequest) -> sc.CandidateResponse:
    cand = construct(
        TraceQuadratic.from_json(req.h),
        domain_from_json(req.domain),
        atoms=_atoms_from_specs(req.atoms),
        im0=req.im0,
        ray_param=req.ray_param,
        segment_param=req.segment_param,
    )
    return sc.CandidateResponse(candidate=cand.to_json())


def construct_dn_op(req: sc.ConstructDnRequest) -> sc.CandidateResponse:
    spec = [
        None if item is None else (CirclePoint(item.angle), item.alpha)
        for item in req.atom_spec
    ]
    cand = construct_dn(
        TraceQuadratic.from_json(req.h),
        domain_from_json(req.domain),
        atom_spec=spec,
        im0=req.im0,
        ray_param=req.ray_param,
        segment_param=req.segment_param,
    )
    return sc.CandidateResponse(candidate=cand.to_json())


def construct_halfplane_op(req: sc.ConstructHalfplaneRequest) -> sc.CandidateResponse:
    atom = None
    if req.atom is not None:
        atom = (CirclePoint(req.atom.angle), req.atom.alpha)
    cand = construct_halfplane(
        TraceQuadratic.from_json(req.h),
        domain_from_json(req.domain),
        atom=atom,
        im0=req.im0,
        ray_param=req.ray_param,
        segment_param=req.segment_param,
    )
    return sc.CandidateResponse(candidate=cand.to_json())


def verify_op(req: sc.VerifyRequest) -> sc.VerifyResponse:
    cand = GeodesicCandidate.from_json(req.candidate)
    report = verify(cand, **sc.config_kwargs(req.config))
    return sc.VerifyResponse(report=report.to_json())


def _parse_lambda_grid(spec):
    if isinstance(spec, str):
        if not spec.startswith("polar:"):
            raise ValueError(f"unknown lambda grid spec {spec!r}; use polar:RxA")
        radii_s, angles_s = spec[len("polar:"):].split("x")
        n_r, n_a = int(radii_s), int(angles_s)
        radii = 0.95 * (np.arange(n_r) + 1) / n_r
        angles = 2.0 * np.pi * np.arange(n_a) / n_a
        return [
            complex(r * np.cos(t), r * np.sin(t)) for r in radii for t in angles
        ]
    return [complex(re, im) for re, im in spec]


def eval_op(req: sc.EvalRequest) -> sc.EvalResponse:
    cand = GeodesicCandidate.from_json(req.candidate)
    lams = _parse_lambda_grid(req.lambda_grid)
    phi = cand.herglotz()
    n = cand.mu.n
    columns = ["lambda_re", "lambda_im"]
    for j in range(1, n + 1):
        columns += [f"re_phi_{j}", f"im_phi_{j}"]
    rows = []
    for lam in lams:
        vals = phi.eval(lam, rel_tol=req.rel_tol)
        row = [lam.real, lam.imag]
        for v in vals:
            row += [float(v.real), float(v.imag)]
        rows.append(row)
    return sc.EvalResponse(columns=columns, rows=rows)


def reduce_op(req: sc.ReduceRequest) -> sc.ReduceResponse:
    cand = GeodesicCandidate.from_json(req.candidate)
    V, reduced = reduce_dimension(cand)
    return sc.ReduceResponse(
        matrix=V.tolist(), rank=V.shape[0], candidate=reduced.to_json()
    )


def gapq_op(req: sc.GapqRequest) -> sc.ExtremalResponse:
    psi_auto = (
        DiscAutomorphism.from_json(req.psi_auto) if req.psi_auto else None
    )
    b1 = DiscAutomorphism.from_json(req.b1) if req.b1 else None
    b2 = DiscAutomorphism.from_json(req.b2) if req.b2 else None
    cand = gapq_extremal(
        req.a, req.p, req.q, psi_auto=psi_auto, beta=req.beta, B1=b1, B2=b2
    )
    return sc.ExtremalResponse(candidate=cand.to_json())


def lift_op(req: sc.LiftRequest) -> sc.LiftResponse:
    cand = ExtremalCandidate.from_json(req.candidate)
    sigma = complex(req.sigma[0], req.sigma[1])
    vals = cand.lift(sigma)
    return sc.LiftResponse(
        values=[[v.real, v.imag] for v in vals],
        moduli=[float(abs(v)) for v in vals],
    )


def lempert_op(req: sc.LempertRequest) -> sc.MetricResponse:
    cand = ExtremalCandidate.from_json(req.candidate)
    record = lempert_value(
        cand,
        complex(req.sigma1[0], req.sigma1[1]),
        complex(req.sigma2[0], req.sigma2[1]),
        verify_kwargs=sc.config_kwargs(req.config) if req.config else None,
    )
    return sc.MetricResponse(record=record)


def kobayashi_op(req: sc.KobayashiRequest) -> sc.MetricResponse:
    cand = ExtremalCandidate.from_json(req.candidate)
    record = kobayashi_value(
        cand,
        complex(req.sigma[0], req.sigma[1]),
        verify_kwargs=sc.config_kwargs(req.config) if req.config else None,
    )
    return sc.MetricResponse(record=record)
