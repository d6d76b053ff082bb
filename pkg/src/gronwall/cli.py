"""Command-line frontend: ``gronwall --spec FILE`` or ``gronwall --suite NAME``.

Exit codes: 0 success, 1 I/O, schema, numeric or oracle failure, 2 a violated
spectral hypothesis (``B rho_K < 1``, ``B < lambda_1``, ``C rho_K < 1``).
Errors go to stderr as one line of JSON with keys
``error``, ``hypothesis``, ``value`` and ``message``.
"""
import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np
import scipy.linalg

from . import discrete, laplacian, semilinear, spectral, suites, volterra
from .errors import AdmissibilityError, GronwallError, ParameterError
from .lattice import Grid, abs_val, sup_norm
from .schema import REPORT_SCHEMA, SPEC_SCHEMA, coefficient

EXIT_OK, EXIT_FAIL, EXIT_ADMISSIBILITY = 0, 1, 2

DEFAULTS = {
    "tol": 1e-10,
    "tail_tol": 1e-10,
    "max_terms": 200,
    "max_iter": 10_000,
    "steps": 2000,
    "laplace_tol": 1e-10,
}
MAX_LAPLACE_STEPS = 100_000


# ---------------------------------------------------------------- helpers


def _plain(obj):
    """Recursively convert numpy values to JSON-native types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def canonical(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def compare(name, x, y, tolerance):
    """Oracle record ``max |x - y| <= tolerance``."""
    gap = sup_norm(np.ravel(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    return {"name": name, "max_abs_gap": gap, "tolerance": float(tolerance), "pass": gap <= tolerance}


def ordering(name, lower, upper, tolerance):
    """Oracle record ``lower <= upper + tolerance`` componentwise."""
    gap = max(0.0, float(np.max(np.asarray(lower) - np.asarray(upper))))
    return {"name": name, "max_abs_gap": gap, "tolerance": float(tolerance), "pass": gap <= tolerance}


def left_endpoint_oracle(name, M, A, y):
    """Compare ``y`` with ``z = (I - M)^{-1} A`` for strictly lower-triangular ``M >= 0``.

    ``(I - M)(y - z) = y - A - M y``, so ``|y - z| <= ||(I - M)^{-1}|| * tau`` with
    ``tau`` the residual of ``y``. The norm is exact: ``(I - M)^{-1} >= 0``, so it
    equals the largest entry of ``(I - M)^{-1} 1``.
    """
    n = M.shape[0]
    I_M = np.eye(n) - M
    z = scipy.linalg.solve_triangular(I_M, A, lower=True)
    stab = sup_norm(scipy.linalg.solve_triangular(I_M, np.ones(n), lower=True))
    tau = sup_norm(y - A - M @ y)
    tol = stab * tau * (1 + 1e-9) + 1e-12 * (1.0 + sup_norm(z)) * stab
    return compare(name, y, z, tol)


def _grid(spec):
    g = spec["grid"]
    return Grid(float(g.get("a", 0.0)), float(g.get("b", 1.0)), int(g["n"]))


def laplace_value(K, s, A, opts):
    """Quadrature value of ``(sI - K)^{-1} A`` with ``dt ||sI - K||_inf <= 0.1`` where affordable."""
    r = spectral.laplace_radius(A, s, K.rho_upper, opts["laplace_tol"])
    M_norm = float(np.max(np.abs(s * np.eye(K.dim) - K.entries).sum(axis=1)))
    steps = min(max(opts["steps"], 2 * math.ceil(5 * r * M_norm)), MAX_LAPLACE_STEPS)
    return spectral.resolvent_laplace(K, s, A, r, steps)


# ---------------------------------------------------------------- handlers
# each returns (results, comparisons, vectors for CSV, csv index column)


def _classic(spec, opts, seed):
    g = _grid(spec)
    A, B = float(spec["data"]["A"]), float(spec["data"]["B"])
    rep = volterra.classic_report(A, B, g)
    M = B * volterra.discretize_kernel(volterra.VolterraKernel.constant(g, 1.0)).entries
    comps = [left_endpoint_oracle("left_endpoint_fixed_point", M, np.full(g.n, A), rep.bound)]
    res = {"bound": rep.to_dict(), "value_at_b": float(rep.bound[-1])}
    return res, comps, {"classic": rep.bound}, g.nodes


def _varcoef(spec, opts, seed):
    g = _grid(spec)
    d = spec["data"]
    c = volterra.CoefficientTriple(g, *(coefficient(d[k], g) for k in ("A", "B", "C")))
    sharp = volterra.varcoef_sharp_bound(c)
    M = np.tril(g.h * np.outer(c.C, c.B), -1)
    comps = [left_endpoint_oracle("left_endpoint_fixed_point", M, c.A, sharp.bound)]
    res = {"sharp": sharp.to_dict()}
    vectors = {"varcoef_sharp": sharp.bound}
    try:
        simple = volterra.varcoef_simple_bound(c)
    except GronwallError as exc:
        res["simple"] = {"skipped": str(exc)}
    else:
        res["simple"] = simple.to_dict()
        vectors["varcoef_simple"] = simple.bound
        comps.append(ordering("sharp_le_simple", sharp.bound, simple.bound,
                              1e-9 * sup_norm(simple.bound)))
    return res, comps, vectors, g.nodes


def _kernel(spec, opts, seed):
    g = _grid(spec)
    d = spec["data"]
    kd = d["kernel"]
    if kd["form"] == "constant":
        k = volterra.VolterraKernel.constant(g, kd["value"])
    elif kd["form"] == "separable":
        k = volterra.VolterraKernel.separable(g, coefficient(kd["C"], g), coefficient(kd["B"], g))
    else:
        k = volterra.VolterraKernel.tabulated(g, kd["table"], kd.get("sup_norm_bound"))
    A = coefficient(d["A"], g)
    rep = volterra.resolvent_kernel_bound(k, A, opts["tail_tol"], opts["max_terms"])
    hat = volterra.hat_majorant_bound(k, A)
    comps = [
        left_endpoint_oracle("left_endpoint_fixed_point", volterra.discretize_kernel(k).entries,
                             A, rep.bound),
        ordering("resolvent_le_hat", rep.bound, hat.bound, 1e-9 * sup_norm(hat.bound)),
    ]
    res = {
        "resolvent_kernel": {**rep.to_dict(), **rep.extras},
        "hat_majorant": hat.to_dict(),
    }
    return res, comps, {"resolvent_kernel": rep.bound, "hat_majorant": hat.bound}, g.nodes


def _bracket_dict(br):
    return {"lower": br.lower, "upper": br.upper, "iterations": br.iterations,
            "converged": br.converged}


def _matrix(spec, opts, seed):
    d = spec["data"]
    K = spectral.NonnegMatrix(d["K"])
    A = np.asarray(d["A"], dtype=float)
    B = float(d["B"])
    res = {"spectral_bound": _bracket_dict(K.bracket)}
    if B == 0:
        res["bound"] = {"bound": A, "method": "matrix_sharp",
                        "admissibility": {"B_times_rho_upper": 0.0, "admissible": True},
                        "sharpness_residual": 0.0}
        return res, [], {"matrix_sharp": A}, None
    rep = discrete.matrix_gronwall(K, A, B)
    res["bound"] = rep.to_dict()
    s = 1.0 / B
    yn, tail = spectral.neumann_resolvent(K, s, A, max_terms=100_000,
                                          tail_tol=opts["tol"], full_output=True)
    comps = [
        compare("neumann_series", yn / B, rep.bound,
                (tail / B) + 1e-9 * (1.0 + sup_norm(rep.bound))),
        compare("laplace_quadrature", laplace_value(K, s, A, opts) / B, rep.bound,
                1e-4 * (1.0 + sup_norm(rep.bound))),
    ]
    return res, comps, {"matrix_sharp": rep.bound}, None


def _discrete(spec, opts, seed):
    d = spec["data"]
    ineq = discrete.DiscreteInequality(d["A"], d["B"], d.get("C"))
    rep = discrete.discrete_bound(ineq)
    brute = discrete.brute_force_discrete(ineq)
    scale = 1e-12 * (1.0 + sup_norm(brute))
    K = discrete.build_proof_matrix(ineq.B, ineq.C)
    via = discrete.matrix_gronwall(K, ineq.A, 1.0).bound
    comps = [
        compare("brute_force_recursion", rep.bound, brute, scale),
        compare("proof_matrix_resolvent", rep.bound, via, scale),
    ]
    return {"bound": rep.to_dict()}, comps, {rep.method: rep.bound}, None


def _maxprin(spec, opts, seed):
    g = spec.get("grid", {})
    if g.get("a", 0.0) != 0.0 or g.get("b", 1.0) != 1.0:
        raise ParameterError("maxprin works on [0, 1]; grid.n counts interior nodes")
    d = spec["data"]
    op = laplacian.build_laplacian(int(g["n"]))
    x = d.get("x", "first_eigenvector")
    x = -op.first_eigenvector if x == "first_eigenvector" else np.asarray(x, dtype=float)
    boundary = tuple(d.get("boundary", (0.0, 0.0)))
    B = float(d["B"])
    tol = opts["tol"]
    out = laplacian.max_principle_check(op, x, boundary, B, tol,
                                        d.get("enforce_admissibility", True))
    t = op.nodes
    G = np.minimum.outer(t, t) * (1.0 - np.maximum.outer(t, t))
    lam_exact = laplacian.discrete_lambda1(op.n)
    comps = [
        compare("lambda1_closed_form", op.lambda1, lam_exact, 1e-10 * lam_exact),
        compare("green_over_h_vs_continuous", op.green.entries / op.h, G, op.h**2),
        ordering("green_nonnegative", [-op.green_min_raw], [0.0], 1e-12),
    ]
    if out.premises_hold:
        ratio = B / op.lambda1_lower
        cond = 1.0 / (1.0 - ratio) if ratio < 1 else None
        if cond is not None:
            comps.append(compare("certificate_identity", x, -out.certificate,
                                 1e-9 * (1.0 + sup_norm(x)) * cond))
            comps.append(ordering("conclusion_x_le_0", x, np.zeros(op.n), tol))
    res = {
        "n_interior": op.n,
        "lambda1": op.lambda1,
        "lambda1_lower": op.lambda1_lower,
        "green_spectral_bound": _bracket_dict(op.mu1),
        "B": B,
        "premises_hold": out.premises_hold,
        "conclusion_holds": out.conclusion_holds,
        "certificate_min": float(out.certificate.min()),
    }
    return res, comps, {"x": x, "certificate": out.certificate}, t


def _semilinear(spec, opts, seed):
    d = spec["data"]
    nl = d["nonlinearity"]
    N = semilinear.make_nonlinearity(nl["name"], **nl.get("params", {}))
    C = float(d["C"])
    if "K" in d:
        p = semilinear.SemilinearProblem(d["K"], d["x0"], N, C)
        nodes = None
    else:
        g = _grid(spec)
        rule = d.get("rule", "left")
        p = semilinear.volterra_ivp(g, N, float(d["x_init"]), C, rule)
        nodes = g.nodes
    semilinear.require_admissible(p)
    tol = opts["tol"]
    sol = semilinear.picard_solve(p, tol, opts["max_iter"])
    start = np.random.default_rng(seed).uniform(-1.0, 1.0, p.K.dim) + p.x0
    alt = semilinear.picard_solve(p, tol, opts["max_iter"], start=start)
    uq = semilinear.uniqueness_certificate(p, sol.x, alt.x, tol)
    res = {
        "solution": sol.x,
        "converged": sol.trace.converged,
        "iterations": sol.trace.iterations,
        "final_residual": sol.trace.final_residual,
        "C_times_rho_upper": p.C_times_rho,
        "uniqueness": {"both_solutions": uq.both_solutions, "coincide": uq.coincide,
                       "distance": uq.distance,
                       "bound": uq.bound if math.isfinite(uq.bound) else None},
    }
    comps = [
        {"name": "picard_residual", "max_abs_gap": sol.trace.final_residual,
         "tolerance": tol, "pass": sol.trace.converged},
    ]
    if uq.both_solutions:
        comps.append({"name": "uniqueness_certificate", "max_abs_gap": uq.distance,
                      "tolerance": uq.bound + 1e-12 * (1.0 + sup_norm(sol.x)),
                      "pass": uq.coincide})
    vectors = {"solution": sol.x}
    if "x0_hat" in d and nodes is not None:
        ph = semilinear.volterra_ivp(_grid(spec), N, float(d["x0_hat"]), C, rule)
        sol_h = semilinear.picard_solve(ph, tol, opts["max_iter"])
        bound = semilinear.continuous_dependence_bound(p, ph.x0)
        # residual slack: (I - CK)^{-1} 1 times the two residuals
        stab = sup_norm(semilinear.continuous_dependence_bound(p, p.x0 - 1.0))
        slack = stab * (sol.trace.final_residual + sol_h.trace.final_residual)
        slack += 1e-12 * (1.0 + sup_norm(bound))
        comps.append(ordering("continuous_dependence", abs_val(sol.x - sol_h.x), bound, slack))
        res["dependence_bound"] = bound
        vectors["perturbed_solution"] = sol_h.x
        vectors["dependence_bound"] = bound
    return res, comps, vectors, nodes


def _resolvent(spec, opts, seed):
    d = spec["data"]
    K = spectral.NonnegMatrix(d["K"])
    A = np.asarray(d["A"], dtype=float)
    s = float(d["s"])
    y, resid = spectral.resolvent_direct(K, s, A, full_output=True)
    yn, tail = spectral.neumann_resolvent(K, s, A, max_terms=100_000,
                                          tail_tol=opts["tol"], full_output=True)
    comps = [
        compare("neumann_series", yn, y, tail + 1e-9 * (1.0 + sup_norm(y))),
        compare("laplace_quadrature", laplace_value(K, s, A, opts), y,
                1e-4 * (1.0 + sup_norm(y))),
    ]
    res = {"resolvent": y, "scaled_residual": resid, "spectral_bound": _bracket_dict(K.bracket)}
    return res, comps, {"resolvent": y}, None


HANDLERS = {
    "classic": _classic,
    "varcoef": _varcoef,
    "kernel": _kernel,
    "matrix": _matrix,
    "discrete": _discrete,
    "maxprin": _maxprin,
    "semilinear": _semilinear,
    "resolvent": _resolvent,
}


# ---------------------------------------------------------------- driver


def build_report(spec, tol=None, seed=0):
    """Validate ``spec``, dispatch it, and return the report dict and CSV columns."""
    jsonschema.validate(spec, SPEC_SCHEMA)
    opts = {**DEFAULTS, **spec.get("options", {})}
    if tol is not None:
        opts["tol"] = float(tol)
    t0 = time.perf_counter()
    results, comps, vectors, index = HANDLERS[spec["kind"]](spec, opts, seed)
    elapsed = 1000.0 * (time.perf_counter() - t0)
    body = _plain({
        "spec_echo": {"kind": spec["kind"], "digest": digest(spec)},
        "results": results,
        "oracle_comparisons": comps,
        "passed": all(c["pass"] for c in comps),
    })
    body["payload_digest"] = digest(body)
    body["timing_ms"] = elapsed
    canonical(body)  # rejects NaN / inf
    jsonschema.validate(body, REPORT_SCHEMA)
    return body, vectors, index


def write_csv(path, vectors, index):
    names = list(vectors)
    n = len(next(iter(vectors.values())))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "t"] + names if index is not None else ["i"] + names)
        for i in range(n):
            row = [i] + ([repr(float(index[i]))] if index is not None else [])
            w.writerow(row + [repr(float(vectors[k][i])) for k in names])


def emit_error(kind, message, hypothesis=None, value=None):
    line = json.dumps({"error": kind, "hypothesis": hypothesis, "value": value,
                       "message": message}, sort_keys=True)
    print(line, file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the admissibility exit code
    def error(self, message):
        emit_error("UsageError", message)
        raise SystemExit(EXIT_FAIL)


def build_parser():
    p = _Parser(prog="gronwall", description="Sharp Gronwall bounds with oracle cross-checks.")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--spec", metavar="PATH", help="JSON problem spec to solve")
    mode.add_argument("--suite", metavar="NAME",
                      help=f"property suite: {', '.join(suites.SUITE_NAMES)}")
    p.add_argument("--seed", type=int, default=0, help="seed for suites and random starts")
    p.add_argument("--tol", type=float, help="override options.tol of the problem file")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--csv", action="store_true", help="also write bound vectors to <out>.csv")
    p.add_argument("--quiet", action="store_true", help="print nothing on stdout")
    return p


def _run_suite(args):
    if args.suite not in suites.SUITE_NAMES:
        emit_error("UnknownSuite", f"unknown suite {args.suite!r}; "
                   f"choose from {', '.join(suites.SUITE_NAMES)}")
        return EXIT_FAIL
    rows = suites.run_suite(args.suite, args.seed)
    ok = all(p == t for _, _, p, t in rows)
    if args.out:
        payload = {"suite": args.suite, "seed": args.seed, "passed": ok,
                   "rows": [{"suite": s, "invariant": n, "passed": p, "total": t}
                            for s, n, p, t in rows]}
        Path(args.out).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if not args.quiet:
        print(suites.format_rows(rows))
    return EXIT_OK if ok else EXIT_FAIL


def _run_spec(args):
    if args.csv and not args.out:
        emit_error("UsageError", "--csv needs --out")
        return EXIT_FAIL
    if args.tol is not None and not args.tol > 0:
        emit_error("UsageError", "--tol must be positive")
        return EXIT_FAIL
    try:
        spec = json.loads(Path(args.spec).read_text())
        report, vectors, index = build_report(spec, args.tol, args.seed)
    except AdmissibilityError as exc:
        value = exc.value if exc.value is None or math.isfinite(exc.value) else None
        emit_error("AdmissibilityError", str(exc), exc.hypothesis, value)
        return EXIT_ADMISSIBILITY
    except OSError as exc:
        emit_error("IOError", str(exc))
        return EXIT_FAIL
    except json.JSONDecodeError as exc:
        emit_error("JSONDecodeError", str(exc))
        return EXIT_FAIL
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        emit_error("SchemaError", f"{where}: {exc.message}")
        return EXIT_FAIL
    except (GronwallError, ValueError, TypeError) as exc:
        emit_error(type(exc).__name__, str(exc))
        return EXIT_FAIL
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    try:
        if args.out:
            Path(args.out).write_text(text)
            if args.csv:
                csv_path = Path(args.out).with_suffix(".csv")
                if csv_path == Path(args.out):
                    csv_path = Path(args.out + ".csv")
                write_csv(csv_path, vectors, index)
        elif not args.quiet:
            sys.stdout.write(text)
    except OSError as exc:
        emit_error("IOError", str(exc))
        return EXIT_FAIL
    if args.out and not args.quiet:
        print(f"{report['spec_echo']['kind']}: {'PASS' if report['passed'] else 'FAIL'} -> {args.out}")
    if not report["passed"]:
        failed = [c["name"] for c in report["oracle_comparisons"] if not c["pass"]]
        emit_error("OracleFailure", f"oracle comparisons failed: {', '.join(failed)}")
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return int(exc.code or 0)
    return _run_suite(args) if args.suite is not None else _run_spec(args)


if __name__ == "__main__":
    sys.exit(main())
