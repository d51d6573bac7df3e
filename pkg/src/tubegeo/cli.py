"""Command line client for the geodesy service operations.

All subcommands run the same handler functions the HTTP endpoints use, in
process (no network involved), take JSON files in, and write JSON or CSV
out.  Exit codes: 0 success, 1 verification failed (the report is still
written), 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from pydantic import ValidationError

from .errors import TubeGeoError
from .service import handlers
from .service import schemas as sc


class _InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise _InputError(f"{path}: file not found")
    except json.JSONDecodeError as exc:
        raise _InputError(
            f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}"
        )


def _dump(data, path=None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_complex(text):
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise _InputError(f"cannot parse complex number {text!r}")


def _parse_auto(text):
    """Automorphism spec like 'd=0.2' or 'd=0.2+0.1i,eta=1'."""
    if text in ("1", "one"):
        return {"kind": "one"}
    out = {"kind": "mobius"}
    for part in text.split(","):
        if "=" not in part:
            raise _InputError(f"bad automorphism spec {text!r}; use d=...[,eta=...]")
        key, val = part.split("=", 1)
        z = _parse_complex(val)
        if key.strip() not in ("d", "eta"):
            raise _InputError(f"unknown automorphism parameter {key!r}")
        out[key.strip()] = [z.real, z.imag]
    return out


def _config_from_args(args):
    threads = args.threads if args.threads is not None else os.cpu_count()
    return sc.RunConfig(
        grid_size=args.grid,
        z_samples=args.z_samples,
        seed=args.seed,
        tol_face=args.tol_face,
        tol_sign=args.tol_sign,
        threads=threads,
    )


def _add_config_flags(parser):
    parser.add_argument("--grid", type=int, default=1024)
    parser.add_argument("--z-samples", type=int, default=100)
    parser.add_argument("--tol-face", type=float, default=1e-7)
    parser.add_argument("--tol-sign", type=float, default=1e-9)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for grid checks (default: all cores)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tubegeo",
        description="Construct, verify and evaluate complex geodesics of "
        "convex tube domains; lift them to Reinhardt extremal candidates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="spherical decomposition of a measure")
    p.add_argument("measure", help="measure JSON file")
    p.add_argument("--out")

    p = sub.add_parser("construct", help="build a candidate from the face recipe")
    p.add_argument("--domain", required=True)
    p.add_argument("--h", required=True, dest="hmap")
    p.add_argument("--atoms", help="JSON list [{angle, weight}]")
    p.add_argument("--im0", help="JSON list of floats")
    p.add_argument("--ray-param", type=float, default=0.0)
    p.add_argument("--segment-param", type=float, default=0.5)
    p.add_argument("--out")

    p = sub.add_parser("construct-dn", help="monotone-orthant family constructor")
    p.add_argument("--domain", required=True)
    p.add_argument("--h", required=True, dest="hmap")
    p.add_argument("--atoms", help="JSON list [null | {angle, alpha}] per component")
    p.add_argument("--im0")
    p.add_argument("--ray-param", type=float, default=0.0)
    p.add_argument("--segment-param", type=float, default=0.5)
    p.add_argument("--out")

    p = sub.add_parser("construct-halfplane", help="half-plane family constructor")
    p.add_argument("--domain", required=True)
    p.add_argument("--h", required=True, dest="hmap")
    p.add_argument("--atom", help="JSON {angle, alpha}")
    p.add_argument("--im0")
    p.add_argument("--ray-param", type=float, default=0.0)
    p.add_argument("--segment-param", type=float, default=0.5)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check the geodesy conditions")
    p.add_argument("candidate")
    _add_config_flags(p)
    p.add_argument("--report", help="write the report JSON here")

    p = sub.add_parser("eval", help="sample the candidate map on a disc grid")
    p.add_argument("candidate")
    p.add_argument("--lambda-grid", default="polar:16x8")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--csv", help="write a CSV table here")
    p.add_argument("--out", help="write JSON rows here")

    p = sub.add_parser("reduce", help="project onto the span of the dual map")
    p.add_argument("candidate")
    p.add_argument("--out")

    pr = sub.add_parser("reinhardt", help="Reinhardt-domain operations")
    rsub = pr.add_subparsers(dest="reinhardt_command", required=True)

    p = rsub.add_parser("lift", help="evaluate the lifted map")
    p.add_argument("candidate")
    p.add_argument("--sigma", required=True)
    p.add_argument("--out")

    p = rsub.add_parser("lempert", help="Lempert-function upper bound")
    p.add_argument("candidate")
    p.add_argument("--sigma1", required=True)
    p.add_argument("--sigma2", required=True)
    _add_config_flags(p)
    p.add_argument("--report")

    p = rsub.add_parser("kobayashi", help="Kobayashi-Royden upper bound")
    p.add_argument("candidate")
    p.add_argument("--sigma", required=True)
    _add_config_flags(p)
    p.add_argument("--report")

    p = rsub.add_parser("gapq", help="two-exponent family extremal candidate")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--psi-auto", help="strip-map precomposition, e.g. d=0.2")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--b1", help="unimodular factor 1: 'one' or d=...,eta=...")
    p.add_argument("--b2", help="unimodular factor 2")
    p.add_argument("--out")

    return parser


def _run(args):
    cmd = args.command
    if cmd == "decompose":
        req = sc.DecomposeRequest(measure=_load_json(args.measure))
        resp = handlers.decompose_op(req)
        _dump(resp.model_dump(), args.out)
        return 0

    if cmd == "construct":
        req = sc.ConstructRequest(
            domain=_load_json(args.domain),
            h=_load_json(args.hmap),
            atoms=_load_json(args.atoms) if args.atoms else [],
            im0=_load_json(args.im0) if args.im0 else None,
            ray_param=args.ray_param,
            segment_param=args.segment_param,
        )
        _dump(handlers.construct_op(req).candidate, args.out)
        return 0

    if cmd == "construct-dn":
        req = sc.ConstructDnRequest(
            domain=_load_json(args.domain),
            h=_load_json(args.hmap),
            atom_spec=_load_json(args.atoms) if args.atoms else [],
            im0=_load_json(args.im0) if args.im0 else None,
            ray_param=args.ray_param,
            segment_param=args.segment_param,
        )
        _dump(handlers.construct_dn_op(req).candidate, args.out)
        return 0

    if cmd == "construct-halfplane":
        req = sc.ConstructHalfplaneRequest(
            domain=_load_json(args.domain),
            h=_load_json(args.hmap),
            atom=_load_json(args.atom) if args.atom else None,
            im0=_load_json(args.im0) if args.im0 else None,
            ray_param=args.ray_param,
            segment_param=args.segment_param,
        )
        _dump(handlers.construct_halfplane_op(req).candidate, args.out)
        return 0

    if cmd == "verify":
        req = sc.VerifyRequest(
            candidate=_load_json(args.candidate), config=_config_from_args(args)
        )
        resp = handlers.verify_op(req)
        _dump(resp.report, args.report)
        overall = resp.report["overall"]
        if args.report:
            print(f"verification: {overall}")
        return 0 if overall == "pass" else 1

    if cmd == "eval":
        req = sc.EvalRequest(
            candidate=_load_json(args.candidate),
            lambda_grid=args.lambda_grid,
            rel_tol=args.rel_tol,
        )
        resp = handlers.eval_op(req)
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(resp.columns)
                writer.writerows(resp.rows)
        if args.out or not args.csv:
            _dump({"columns": resp.columns, "rows": resp.rows}, args.out)
        return 0

    if cmd == "reduce":
        req = sc.ReduceRequest(candidate=_load_json(args.candidate))
        resp = handlers.reduce_op(req)
        _dump(resp.model_dump(), args.out)
        return 0

    if cmd == "reinhardt":
        return _run_reinhardt(args)

    raise _InputError(f"unknown command {cmd!r}")


def _run_reinhardt(args):
    rcmd = args.reinhardt_command
    if rcmd == "lift":
        s = _parse_complex(args.sigma)
        req = sc.LiftRequest(
            candidate=_load_json(args.candidate), sigma=[s.real, s.imag]
        )
        _dump(handlers.lift_op(req).model_dump(), args.out)
        return 0

    if rcmd == "lempert":
        s1, s2 = _parse_complex(args.sigma1), _parse_complex(args.sigma2)
        req = sc.LempertRequest(
            candidate=_load_json(args.candidate),
            sigma1=[s1.real, s1.imag],
            sigma2=[s2.real, s2.imag],
            config=_config_from_args(args),
        )
        record = handlers.lempert_op(req).record
        _dump(record, args.report)
        return 0

    if rcmd == "kobayashi":
        s = _parse_complex(args.sigma)
        req = sc.KobayashiRequest(
            candidate=_load_json(args.candidate),
            sigma=[s.real, s.imag],
            config=_config_from_args(args),
        )
        _dump(handlers.kobayashi_op(req).record, args.report)
        return 0

    if rcmd == "gapq":
        req = sc.GapqRequest(
            a=args.a,
            p=args.p,
            q=args.q,
            psi_auto=_parse_auto(args.psi_auto) if args.psi_auto else None,
            beta=args.beta,
            b1=_parse_auto(args.b1) if args.b1 else None,
            b2=_parse_auto(args.b2) if args.b2 else None,
        )
        _dump(handlers.gapq_op(req).candidate, args.out)
        return 0

    raise _InputError(f"unknown reinhardt command {rcmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _run(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: invalid request: {exc}", file=sys.stderr)
        return 2
    except TubeGeoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
