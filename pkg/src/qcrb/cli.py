"""``qcrb`` command line.

Exit codes: 0 success, 1 invalid input, 2 dual did not converge (report still
written), 3 degenerate or invalid model.
"""

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import duallp, io, randcheck, sim
from .errors import QCRBError
from .linalg import eig_hermitian
from .model import fisher
from .randbound import build_plan, limit_membership, limit_membership_2param, random_bound, sld_bound

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_MODEL = 0, 1, 2, 3


def _emit(obj, out):
    out.write(json.dumps(obj, indent=1))
    out.write("\n")


def cmd_info(args, out):
    model = io.load_model(args.model)
    fd = fisher(model)
    _emit({
        "dim": model.dim,
        "n": model.n,
        "names": list(model.names),
        "rho_eigenvalues": model.eig.eigenvalues.tolist(),
        "slds": [io.complex_to_json(L) for L in fd.slds],
        "J": fd.J.tolist(),
        "lambda_min_J": float(np.linalg.eigvalsh(fd.J)[0]),
    }, out)
    return EXIT_OK


def cmd_bound(args, out):
    model = io.load_model(args.model)
    g = io.load_weight(args.weight)
    fd = fisher(model)
    report = {"sld_bound": sld_bound(fd.J, g)}
    code = EXIT_OK
    if args.method in ("random", "both"):
        report["random_bound"] = random_bound(fd.J, g)
        if np.linalg.eigvalsh(g)[0] > 1e-12 * max(1.0, np.abs(g).max()):
            plan = build_plan(model, fd, g)
            report["W"] = plan.W.tolist()
            report["V"] = sim.exact_covariance(plan).tolist()
    if args.method in ("dual", "both"):
        cert = duallp.dual_bound(model, fd, g, eps_feas=args.tol, max_rounds=args.max_rounds,
                                 seed=args.seed)
        report["dual"] = cert.to_dict()
        report["dual_bound"] = cert.spur
        if not cert.converged:
            code = EXIT_NONCONVERGED
    if "random_bound" in report and "dual_bound" in report:
        report["gap"] = report["random_bound"] - report["dual_bound"]
    elif "random_bound" in report:
        report["gap"] = report["random_bound"] - report["sld_bound"]
    else:
        report["gap"] = report["dual_bound"] - report["sld_bound"]

    if args.format == "csv":
        w = csv.writer(out)
        w.writerow(["quantity", "value"])
        for key in ("sld_bound", "random_bound", "dual_bound", "gap"):
            if key in report:
                w.writerow([key, repr(float(report[key]))])
        if "dual" in report:
            for key in ("margin", "rounds", "status"):
                w.writerow([f"dual_{key}", report["dual"][key]])
    else:
        _emit(report, out)
    return code


def cmd_check_random(args, out):
    model = io.load_model(args.model)
    rep = randcheck.check_randomness(model, fisher(model), tol=args.tol)
    _emit(rep.to_dict(), out)
    return EXIT_OK


def cmd_simulate(args, out):
    model = io.load_model(args.model)
    g = io.load_weight(args.weight)
    plan = build_plan(model, fisher(model), g)
    exact = sim.exact_covariance(plan)
    res = sim.sample(plan, N=args.samples, seed=args.seed)
    w = csv.writer(out)
    w.writerow(["component_i", "component_j", "exact", "empirical", "stderr"])
    for i in range(model.n):
        for j in range(model.n):
            w.writerow([model.names[i], model.names[j], repr(float(exact[i, j])),
                        repr(float(res.cov[i, j])), repr(float(res.stderr[i, j]))])
    return EXIT_OK


def cmd_limit(args, out):
    model = io.load_model(args.model)
    V = io.load_covariance(args.cov)
    fd = fisher(model)
    member, W = limit_membership(V, fd.J, tol=args.tol)
    report = {"member": member, "W": W.tolist(), "trace_W": float(np.trace(W))}
    if model.n == 2:
        m2, X = limit_membership_2param(V, fd.J, tol=args.tol)
        report["member_2param"] = m2
        report["X"] = X.tolist()
        report["det_X"] = float(np.linalg.det(X))
    _emit(report, out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="qcrb", description="Attainable Cramer-Rao bounds for quantum models.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", help="state spectrum, SLDs and Fisher matrix")
    s.add_argument("--model", required=True)
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("bound", help="random-measurement, dual and SLD bounds")
    s.add_argument("--model", required=True)
    s.add_argument("--weight", required=True)
    s.add_argument("--method", choices=("random", "dual", "both"), default="both")
    s.add_argument("--tol", type=float, default=duallp.EPS_FEAS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-rounds", type=int, default=200)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("check-random", help="test the randomness condition")
    s.add_argument("--model", required=True)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_check_random)

    s = sub.add_parser("simulate", help="Monte Carlo run of the optimal random measurement")
    s.add_argument("--model", required=True)
    s.add_argument("--weight", required=True)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("limit", help="is a covariance in the random limit set?")
    s.add_argument("--model", required=True)
    s.add_argument("--cov", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_limit)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except QCRBError as exc:
        print(f"qcrb: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
