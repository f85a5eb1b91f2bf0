"""Command-line front end.

One subcommand per library operation plus a batch mode; every command
reads a JSON problem document (file argument or stdin), dispatches to
the library, and emits either a human-readable report or a
deterministic JSON run report.  Commands that transform a pencil always
append a pfaffian-invariance residual.

Exit codes: 0 all residuals within their declared tolerances, 1 usage,
2 schema, 3 numerical failure, 4 violated precondition.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import jsonio as io
from .bridge import bridge_to_decomposable
from .canonical import (gauge_action, second_canonical_transform, structure_report,
                        to_canonical, to_second_canonical)
from .errors import NumericalError, PfaffrepError, PreconditionError, SchemaError
from .incidence import classify_pair, k_constant, line_through, partner_points, tangent_line
from .pencil import kernel_at, pfaffian_adjoint_at, pfaffian_minor
from .poly import HomPoly, equal_up_to_scale
from .quartic import (aronhold_invariant, bitangent_from_octad, factor_three_lines,
                      identify_theta, integrate_polar, polar_cubic, polar_triangle,
                      scorza_map, scorza_related)
from .tolerances import DEFAULT_POLICY, TolerancePolicy
from .transforms import bundle_maps_check, conint, type1, type2, verify_replay

_PF_TOL = 1e-7
_EXIT_USAGE, _EXIT_SCHEMA, _EXIT_NUMERICAL, _EXIT_PRECONDITION = 1, 2, 3, 4


def _residual(value: float, tol: float) -> dict:
    value = float(value)
    return {"value": value, "tolerance": tol, "ok": bool(value <= tol)}


def _pf_invariance(P_before, P_after) -> dict:
    pf0 = P_before.pfaffian()
    dev = (P_after.pfaffian() - pf0).max_coeff() / max(pf0.max_coeff(), 1e-300)
    return _residual(dev, _PF_TOL)


def _need(payload: dict, key: str):
    if key not in payload:
        raise SchemaError(f"missing payload field {key!r}", f"$.payload.{key}")
    return payload[key]


# -- handlers -------------------------------------------------------------------
# Each handler: (payload, policy, seed) -> (outputs, residuals)

def _h_pf(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    return {"pfaffian": io.enc_poly(P.pfaffian())}, {}


def _h_pf_minor(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    i, j = int(_need(payload, "i")), int(_need(payload, "j"))
    return {"minor": io.enc_poly(pfaffian_minor(P, i, j))}, {}


def _h_adjoint(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    pt = io.dec_point(_need(payload, "point"), "$.payload.point", policy)
    adj = pfaffian_adjoint_at(P, pt)
    A = P(pt)
    dev = np.max(np.abs(adj @ A - P.pfaffian()(pt) * np.eye(P.dim)))
    scale = max(np.max(np.abs(adj)) * np.max(np.abs(A)), 1e-300)
    return ({"adjoint": io.enc_matrix(adj)},
            {"adjoint_identity": _residual(dev / scale, policy.match_tol)})


def _h_kernel(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    pt = io.dec_point(_need(payload, "point"), "$.payload.point", policy)
    kb = kernel_at(P, pt, policy)
    return {"kernel": io.enc_kernel(kb)}, {"kernel_residual": _residual(kb.residual, policy.rank_tol)}


def _h_canon(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    rep = to_canonical(P, policy, seed)
    scale = equal_up_to_scale(P.pfaffian(), rep.pencil.pfaffian(), policy)
    detb = np.linalg.det(rep.basis_change)
    dev = abs(scale - detb) / max(abs(detb), 1e-300) if scale is not None else float("inf")
    return ({"report": io.enc_canonical_report(rep)},
            {"block_residual": _residual(rep.residual, policy.match_tol),
             "pf_scaling": _residual(dev, policy.match_tol)})


def _h_canon2(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    out = to_second_canonical(P, policy)
    detq = float(np.linalg.det(second_canonical_transform(P.half_deg)).real)
    scale = equal_up_to_scale(P.pfaffian(), out.pfaffian(), policy)
    dev = abs(scale - detq) if scale is not None else float("inf")
    return ({"pencil": io.enc_pencil(out), "det_q": detq},
            {"pf_scaling": _residual(dev, policy.match_tol)})


def _h_gauge(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    blocks = [io.dec_matrix(b, f"$.payload.blocks[{i}]")
              for i, b in enumerate(_need(payload, "blocks"))]
    out = gauge_action(P, blocks, policy)
    return {"pencil": io.enc_pencil(out)}, {"pf_invariance": _pf_invariance(P, out)}


def _h_structure(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    return {"report": io.enc_structure(structure_report(P, policy))}, {}


def _h_tangent(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    pt = io.dec_point(_need(payload, "point"), "$.payload.point", policy)
    ell = tangent_line(P, pt, policy)
    dev = abs(ell(pt)) / max(float(np.max(np.abs(ell.coeffs))), 1e-300)
    return ({"line": io.enc_linear_form(ell)},
            {"vanishing_at_point": _residual(dev, policy.match_tol)})


def _h_line(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    mu = io.dec_point(_need(payload, "mu"), "$.payload.mu", policy)
    v = io.dec_vector(_need(payload, "v"), "$.payload.v")
    u = io.dec_vector(_need(payload, "u"), "$.payload.u")
    ell = line_through(P, lam, v, mu, u, policy)
    outputs = {"line": io.enc_linear_form(ell), "is_zero": ell.is_zero(policy)}
    residuals = {}
    if not ell.is_zero(policy):
        scale = max(float(np.max(np.abs(ell.coeffs))), 1e-300)
        residuals["vanishing_at_lambda"] = _residual(abs(ell(lam)) / scale, policy.match_tol)
        residuals["vanishing_at_mu"] = _residual(abs(ell(mu)) / scale, policy.match_tol)
    return outputs, residuals


def _h_classify_pair(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    mu = io.dec_point(_need(payload, "mu"), "$.payload.mu", policy)
    pc = classify_pair(P, lam, mu, seed=seed, policy=policy)
    return {"classification": io.enc_classification(pc)}, {}


def _h_k_const(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    mu = io.dec_point(_need(payload, "mu"), "$.payload.mu", policy)
    v = io.dec_vector(_need(payload, "v"), "$.payload.v")
    u = io.dec_vector(_need(payload, "u"), "$.payload.u")
    t1 = io.dec_complex(_need(payload, "t1"), "$.payload.t1")
    t2 = io.dec_complex(_need(payload, "t2"), "$.payload.t2")
    K = k_constant(P, lam, v, mu, u, t1, t2, policy)
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    K2 = k_constant(P, lam, v, mu, u, s[0], s[1], policy)
    return ({"k": io.enc_complex(K)},
            {"parameter_independence": _residual(abs(K - K2) / (1 + abs(K)), policy.rank_tol)})


def _h_partners(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    v = io.dec_vector(_need(payload, "v"), "$.payload.v")
    u = io.dec_vector(_need(payload, "u"), "$.payload.u")
    pts = partner_points(P, lam, v, u, policy)
    worst = max((p.curve_residual for p in pts), default=0.0)
    return ({"points": [io.enc_point(p.pt) for p in pts]},
            {"curve_residual": _residual(worst, policy.match_tol)})


def _h_type1(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    mu = io.dec_point(_need(payload, "mu"), "$.payload.mu", policy)
    v = io.dec_vector(_need(payload, "v"), "$.payload.v")
    u = io.dec_vector(_need(payload, "u"), "$.payload.u")
    out, rec = type1(P, lam, mu, v, u, seed=seed, policy=policy)
    return ({"pencil": io.enc_pencil(out), "record": io.enc_record(rec)},
            {"pf_invariance": _pf_invariance(P, out)})


def _h_type2(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    v = io.dec_vector(_need(payload, "v"), "$.payload.v")
    rho = io.dec_complex(_need(payload, "rho"), "$.payload.rho")
    out, rec = type2(P, lam, v, rho, policy=policy)
    return ({"pencil": io.enc_pencil(out), "record": io.enc_record(rec)},
            {"pf_invariance": _pf_invariance(P, out)})


def _h_conint(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    pts = [io.dec_point(p, f"$.payload.points[{i}]", policy)
           for i, p in enumerate(_need(payload, "points"))]
    vecs = [io.dec_vector(v, f"$.payload.vectors[{i}]")
            for i, v in enumerate(_need(payload, "vectors"))]
    rhos = [io.dec_complex(r, f"$.payload.rhos[{i}]")
            for i, r in enumerate(_need(payload, "rhos"))]
    out, rec = conint(P, pts, vecs, rhos, seed=seed, policy=policy)
    return ({"pencil": io.enc_pencil(out), "record": io.enc_record(rec)},
            {"pf_invariance": _pf_invariance(P, out)})


def _h_bundle_check(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    rec = io.dec_record(_need(payload, "record"), "$.payload.record", policy)
    samples = [io.dec_point(p, f"$.payload.samples[{i}]", policy)
               for i, p in enumerate(_need(payload, "samples"))]
    curve_samples = [io.dec_point(p, f"$.payload.curve_samples[{i}]", policy)
                     for i, p in enumerate(payload.get("curve_samples", []))]
    rep = bundle_maps_check(P, rec, samples, curve_samples, seed=seed, policy=policy)
    residuals = {"intertwining_identity": _residual(rep.identity_residual, 1e-6),
                 "transport_angle": _residual(rep.transport_angle, 1e-5),
                 "parameter_independence": _residual(rep.parameter_independence, 1e-6)}
    for name, val in rep.zero_patterns.items():
        residuals[f"zero[{name}]"] = _residual(val, 1e-6)
    return {"report": io.enc_bundle_report(rep)}, residuals


def _h_bridge(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    budget = int(payload.get("budget", 50))
    res = bridge_to_decomposable(P, budget=budget, seed=seed, policy=policy)
    target = 0.1 * policy.match_tol * max(P.scale(), 1.0)
    return ({"records": [io.enc_record(r) for r in res.records],
             "pencil": io.enc_pencil(res.pencil),
             "converged": res.converged,
             "off_pattern_norm": res.off_pattern_norm,
             "history": res.history},
            {"off_pattern_norm": _residual(res.off_pattern_norm, target),
             "pf_invariance": _pf_invariance(P, res.pencil)})


def _h_polar_cubic(payload, policy, seed):
    F = io.dec_poly(_need(payload, "quartic"), "$.payload.quartic", policy)
    return {"coeffs": io.enc_cubic_coeffs(polar_cubic(F))}, {}


def _h_aronhold(payload, policy, seed):
    w = io.dec_cubic_coeffs(_need(payload, "coeffs"), "$.payload.coeffs")
    pf = aronhold_invariant(w)
    if isinstance(pf, HomPoly):
        return {"pfaffian": io.enc_poly(pf)}, {}
    return {"pfaffian": io.enc_complex(pf)}, {}


def _h_scorza(payload, policy, seed):
    F = io.dec_poly(_need(payload, "quartic"), "$.payload.quartic", policy)
    S = scorza_map(F)
    outputs = {"scorza": io.enc_poly(S)}
    residuals = {}
    if "expected" in payload:
        expected = io.dec_poly(payload["expected"], "$.payload.expected", policy)
        scale = equal_up_to_scale(S, expected, policy)
        if scale is None:
            residuals["match_up_to_scale"] = _residual(float("inf"), policy.match_tol)
        else:
            outputs["scale_vs_expected"] = io.enc_complex(scale)
            dev = (expected - S.scaled(scale)).max_coeff() / max(expected.max_coeff(), 1e-300)
            residuals["match_up_to_scale"] = _residual(dev, policy.match_tol)
    return outputs, residuals


def _h_integrate_polar(payload, policy, seed):
    w = io.dec_cubic_coeffs(_need(payload, "coeffs"), "$.payload.coeffs")
    F = integrate_polar(w, policy)
    back = polar_cubic(F)
    dev = float(np.max(np.abs(back.flatten() - w.flatten())))
    scale = max(float(np.max(np.abs(w.flatten()))), 1e-300)
    return ({"quartic": io.enc_poly(F)},
            {"round_trip": _residual(dev / scale, policy.match_tol)})


def _h_triangle(payload, policy, seed):
    F = io.dec_poly(_need(payload, "quartic"), "$.payload.quartic", policy)
    pt = io.dec_point(_need(payload, "point"), "$.payload.point", policy)
    tri = polar_triangle(F, pt, seed=seed, policy=policy)
    return ({"triangle": io.enc_triangle(tri)},
            {"three_cube_residual": _residual(tri.residual, policy.match_tol)})


def _h_factor_lines(payload, policy, seed):
    cubic = io.dec_poly(_need(payload, "cubic"), "$.payload.cubic", policy)
    lines = factor_three_lines(cubic, seed=seed, policy=policy)
    prod = lines[0].as_poly() * lines[1].as_poly() * lines[2].as_poly()
    scale = equal_up_to_scale(prod, cubic, policy)
    dev = (float("inf") if scale is None else
           (cubic - prod.scaled(scale)).max_coeff() / max(cubic.max_coeff(), 1e-300))
    return ({"lines": [io.enc_linear_form(l) for l in lines]},
            {"product_residual": _residual(dev, policy.match_tol)})


def _h_related(payload, policy, seed):
    M = io.dec_detrep(_need(payload, "rep"), "$.payload.rep", symmetric=True)
    lam = io.dec_point(_need(payload, "lambda"), "$.payload.lambda", policy)
    mu = io.dec_point(_need(payload, "mu"), "$.payload.mu", policy)
    rel = scorza_related(M, lam, mu, policy)
    return ({"relation": io.enc_relation(rel)},
            {"pairing_residual": _residual(max(rel.residuals),
                                           policy.match_tol if rel.related else float("inf"))})


def _h_identify_theta(payload, policy, seed):
    if "quartic" in payload:
        source = io.dec_poly(payload["quartic"], "$.payload.quartic", policy)
    elif "coeffs" in payload:
        source = io.dec_cubic_coeffs(payload["coeffs"], "$.payload.coeffs")
    else:
        raise SchemaError("need either 'quartic' or 'coeffs'", "$.payload")
    cands = [io.dec_detrep(c, f"$.payload.candidates[{i}]", symmetric=True)
             for i, c in enumerate(_need(payload, "candidates"))]
    samples = int(payload.get("samples", 3))
    ident = identify_theta(source, cands, samples=samples, seed=seed, policy=policy)
    return {"identification": io.enc_theta(ident)}, {}


def _h_bitangent(payload, policy, seed):
    M = io.dec_detrep(_need(payload, "rep"), "$.payload.rep", symmetric=True)
    b_i = io.dec_vector(_need(payload, "b_i"), "$.payload.b_i")
    b_j = io.dec_vector(_need(payload, "b_j"), "$.payload.b_j")
    ell = bitangent_from_octad(M, b_i, b_j, seed=seed, policy=policy)
    return {"line": io.enc_linear_form(ell)}, {}


def _h_verify_replay(payload, policy, seed):
    P = io.dec_pencil(_need(payload, "pencil"), "$.payload.pencil", policy)
    recs = [io.dec_record(r, f"$.payload.records[{i}]", policy)
            for i, r in enumerate(_need(payload, "records"))]
    devs = verify_replay(P, recs, policy)
    return ({"step_residuals": devs},
            {"pf_invariance": _residual(max(devs, default=0.0), _PF_TOL)})


COMMANDS = {
    "pf": _h_pf, "pf-minor": _h_pf_minor, "adjoint": _h_adjoint, "kernel": _h_kernel,
    "canon": _h_canon, "canon2": _h_canon2, "gauge": _h_gauge, "structure": _h_structure,
    "tangent": _h_tangent, "line": _h_line, "classify-pair": _h_classify_pair,
    "k-const": _h_k_const, "partners": _h_partners, "type1": _h_type1,
    "type2": _h_type2, "conint": _h_conint, "bundle-check": _h_bundle_check,
    "bridge": _h_bridge, "polar-cubic": _h_polar_cubic, "aronhold": _h_aronhold,
    "scorza": _h_scorza, "integrate-polar": _h_integrate_polar, "triangle": _h_triangle,
    "factor-lines": _h_factor_lines, "related": _h_related,
    "identify-theta": _h_identify_theta, "bitangent": _h_bitangent,
    "verify-replay": _h_verify_replay,
}


# -- problem files and dispatch ---------------------------------------------------

def parse_problem(doc, path: str = "$") -> dict:
    """Validate the envelope of a problem document."""
    if not isinstance(doc, dict):
        raise SchemaError("problem must be a JSON object", path)
    kind = doc.get("kind")
    if kind not in COMMANDS:
        raise SchemaError(
            f"unknown kind {kind!r}; valid kinds: {', '.join(sorted(COMMANDS))}",
            f"{path}.kind")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise SchemaError("payload must be a JSON object", f"{path}.payload")
    tol = doc.get("tolerances", {})
    if not isinstance(tol, dict) or not set(tol) <= {"zero_tol", "rank_tol", "match_tol"}:
        raise SchemaError("tolerances may override zero_tol, rank_tol, match_tol",
                          f"{path}.tolerances")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise SchemaError("seed must be a nonnegative integer", f"{path}.seed")
    return {"kind": kind, "payload": payload, "tolerances": tol, "seed": seed}


def _policy_from(tol_dict: dict, base: TolerancePolicy) -> TolerancePolicy:
    kw = {"zero_tol": base.zero_tol, "rank_tol": base.rank_tol, "match_tol": base.match_tol}
    kw.update({k: float(v) for k, v in tol_dict.items()})
    try:
        return TolerancePolicy(**kw)
    except ValueError as exc:
        raise SchemaError(str(exc), "$.tolerances")


def dispatch(problem: dict, base_policy: TolerancePolicy = DEFAULT_POLICY) -> dict:
    """Run one validated problem and assemble its run report."""
    policy = _policy_from(problem["tolerances"], base_policy)
    digest = hashlib.sha256(
        json.dumps(problem["payload"], sort_keys=True).encode()).hexdigest()[:16]
    start = time.perf_counter()
    outputs, residuals = COMMANDS[problem["kind"]](problem["payload"], policy,
                                                   problem["seed"])
    elapsed = time.perf_counter() - start
    return {"command": problem["kind"], "inputs_digest": digest,
            "seed": problem["seed"], "outputs": outputs, "residuals": residuals,
            "_wall_time_s": elapsed}


def _format_complex(pair) -> str:
    re, im = pair
    return f"{re:.6g}{im:+.6g}i"


def _render_text(report: dict) -> str:
    lines = [f"command: {report['command']}  (seed {report['seed']}, "
             f"inputs {report['inputs_digest']}, {report['_wall_time_s']:.3f}s)"]
    for name, r in report["residuals"].items():
        flag = "ok" if r["ok"] else "FAIL"
        lines.append(f"  residual {name}: {r['value']:.3e} <= {r['tolerance']:.1e} [{flag}]")
    def brief(val, depth=0):
        if isinstance(val, list) and len(val) == 2 and all(isinstance(x, float) for x in val):
            return _format_complex(val)
        if isinstance(val, list):
            inner = ", ".join(brief(v, depth + 1) for v in val[:6])
            return "[" + inner + (", ..." if len(val) > 6 else "") + "]"
        if isinstance(val, dict):
            if depth >= 2:
                return "{...}"
            return "{" + ", ".join(f"{k}: {brief(v, depth + 1)}" for k, v in val.items()) + "}"
        return str(val)
    for key, val in report["outputs"].items():
        lines.append(f"  {key}: {brief(val)}")
    return "\n".join(lines)


def _json_report(report: dict) -> str:
    clean = {k: v for k, v in report.items() if not k.startswith("_")}
    return json.dumps(clean, sort_keys=True, indent=2)


def _exit_code_for(report: dict) -> int:
    bad = [r for r in report["residuals"].values() if not r["ok"]]
    return _EXIT_NUMERICAL if bad else 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(_EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="pfaffrep",
                     description="pfaffian representations of plane curves")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("problem", nargs="?", default="-",
                       help="problem JSON file ('-' or omitted: stdin)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--tol", default=os.environ.get("PFAFFREP_TOL"),
                       help="zero,rank,match tolerance overrides (comma separated)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the problem seed")

    for name in sorted(COMMANDS):
        add_common(sub.add_parser(name, help=f"run the {name} operation"))
    add_common(sub.add_parser("run", help="run a problem file (kind taken from the file)"))
    add_common(sub.add_parser("batch", help="run a JSON array of problems in parallel"))
    return parser


def _load_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        print(f"pfaffrep: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(_EXIT_USAGE)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", "$")


def _base_policy(tol_arg: str | None) -> TolerancePolicy:
    if not tol_arg:
        return DEFAULT_POLICY
    parts = tol_arg.split(",")
    if len(parts) != 3:
        raise SchemaError("--tol needs three comma-separated values (zero,rank,match)")
    try:
        return TolerancePolicy(*(float(p) for p in parts))
    except ValueError as exc:
        raise SchemaError(f"bad --tol: {exc}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        base_policy = _base_policy(args.tol)
        doc = _load_json(args.problem)
        if args.command == "batch":
            if not isinstance(doc, list):
                raise SchemaError("batch input must be a JSON array", "$")
            problems = [parse_problem(p, f"$[{i}]") for i, p in enumerate(doc)]
            if args.seed is not None:
                problems = [{**p, "seed": args.seed + i} for i, p in enumerate(problems)]
            with ThreadPoolExecutor(max_workers=min(8, max(1, len(problems)))) as pool:
                reports = list(pool.map(lambda p: dispatch(p, base_policy), problems))
            if args.format == "json":
                cleaned = [{k: v for k, v in r.items() if not k.startswith("_")}
                           for r in reports]
                print(json.dumps(cleaned, sort_keys=True, indent=2))
            else:
                print("\n".join(_render_text(r) for r in reports))
            return max((_exit_code_for(r) for r in reports), default=0)

        if args.command != "run":
            if "kind" in doc and doc["kind"] != args.command:
                raise SchemaError(
                    f"file kind {doc['kind']!r} does not match subcommand {args.command!r}",
                    "$.kind")
            doc = {**doc, "kind": args.command}
        problem = parse_problem(doc)
        if args.seed is not None:
            problem["seed"] = args.seed
        report = dispatch(problem, base_policy)
        print(_json_report(report) if args.format == "json" else _render_text(report))
        return _exit_code_for(report)
    except SchemaError as exc:
        print(f"pfaffrep: schema error: {exc}", file=sys.stderr)
        return _EXIT_SCHEMA
    except NumericalError as exc:
        print(f"pfaffrep: numerical error: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL
    except PreconditionError as exc:
        print(f"pfaffrep: precondition violated: {exc}", file=sys.stderr)
        return _EXIT_PRECONDITION
    except PfaffrepError as exc:
        print(f"pfaffrep: error: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL
    except ValueError as exc:
        print(f"pfaffrep: invalid input: {exc}", file=sys.stderr)
        return _EXIT_SCHEMA


if __name__ == "__main__":
    raise SystemExit(main())
