"""Batch command-line harness.

Subcommands: certify-function, check-entropy, certify-representation,
check-concavity, run-suite.  Every run echoes its seed and tolerances in the
report so results can be replayed exactly.  Exit codes: 0 all checks pass,
1 at least one violation or failed check, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import convexity as cx
from . import entropy as ent
from . import jointconcavity as jc
from . import io as mio
from . import suite as acceptance
from .errors import MatConvexError, ValidationError
from .linalg import SpectrumWindow
from .quadrature import QuadratureConfig
from .rand import RandomSpec, random_in_window_from, random_hermitian_from
from .resolvent import certify_representation, pick_eval_matrix

_PASSING = {"pass", "certified"}


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("MATCONVEX_SEED")
    return int(env) if env else 0


def _parse_window(text: str) -> SpectrumWindow:
    try:
        a, b = (float(x) for x in text.split(","))
        return SpectrumWindow(a, b)
    except ValueError as err:
        raise ValidationError(f"bad window {text!r}: expected 'a,b' ({err})") from err


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.lower().split("x"))
    except ValueError as err:
        raise ValidationError(f"bad dims {text!r}: expected like '2x3x2'") from err
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"bad dims {text!r}")
    return dims


def _verdict_record(name: str, verdict: cx.Verdict, elapsed: float) -> dict:
    rec = {
        "name": name,
        "status": verdict.status,
        "margin": verdict.worst_margin,
        "detail": {"trials": verdict.trials},
        "timing": round(elapsed, 6),
    }
    if verdict.witness is not None:
        rec["witness"] = mio.serialize_witness(verdict.witness)
    return rec


def _slack_record(name: str, slack: float, tol: float, elapsed: float,
                  detail: dict | None = None) -> dict:
    return {
        "name": name,
        "status": "pass" if slack >= -tol else "fail",
        "margin": float(slack + tol),
        "detail": {"slack": float(slack), "tolerance": tol, **(detail or {})},
        "timing": round(elapsed, 6),
    }


def _emit(command: str, config: dict, checks: list[dict], args) -> int:
    bad = [c for c in checks if c["status"] not in _PASSING]
    overall = "pass" if not bad else "fail"
    report = mio.report_to_dict(command, config, checks, overall)
    if args.out:
        mio.save_json(args.out, report)
    if args.format == "json":
        import json

        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for c in checks:
            print(f"{c['status']:12s} {c['name']:32s} margin={c['margin']:+.3e} "
                  f"({c['timing']:.2f}s)")
        print(f"overall: {overall}")
    return 0 if not bad else 1


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_certify_function(args) -> int:
    seed = _default_seed(args.seed)
    f = cx.builtin(args.f)
    window = _parse_window(args.window)
    spec = RandomSpec(seed)
    checks = []

    def run(name, fn):
        start = time.perf_counter()
        checks.append(_verdict_record(name, fn(), time.perf_counter() - start))

    if args.mode in ("all", "convex"):
        run("definition", lambda: cx.definition_test(
            f, window, args.n, args.trials, spec.stream(0)))
        run("jensen", lambda: cx.jensen_test(
            f, window, args.n, 3, args.trials, spec.stream(1)))
        run("second_derivative", lambda: cx.second_derivative_test(
            f, window, args.n, args.trials, spec.stream(2)))
        mid = 0.5 * (window.a + window.b)
        # the secant's value at its base point is an FD derivative
        run("secant_monotonicity", lambda: cx.monotonicity_test(
            cx.secant_transform(f, mid), window, max(args.n, 2),
            args.trials, spec.stream(3),
            tol_cert=cx.TOL_CERT_FD, tol_viol=cx.TOL_VIOL_FD))
    if args.mode in ("all", "monotone"):
        run("loewner_monotonicity", lambda: cx.monotonicity_test(
            f, window, max(args.n, 2), args.trials, spec.stream(4)))
    config = {"f": args.f, "window": [window.a, window.b], "n": args.n,
              "trials": args.trials, "seed": seed, "mode": args.mode}
    return _emit("certify-function", config, checks, args)


def cmd_check_entropy(args) -> int:
    seed = _default_seed(args.seed)
    spec = RandomSpec(seed)
    tol = args.tol
    if args.state:
        states = [mio.load_state(args.state)]
    elif args.random:
        dims = _parse_dims(args.random)
        states = [ent.random_state(dims, spec.stream(t)) for t in range(args.trials)]
    else:
        raise ValidationError("need either --state FILE or --random DIMS")

    checks = []
    want = args.check

    def battery(name, per_state, need_factors):
        start = time.perf_counter()
        worst = math.inf
        detail: dict = {}
        for state in states:
            if len(state.dims) < need_factors:
                raise ValidationError(
                    f"{name} needs {need_factors} tensor factors, "
                    f"state has dims {state.dims}"
                )
            worst = min(worst, per_state(state, detail))
        checks.append(_slack_record(
            name, worst, tol, time.perf_counter() - start,
            {"states": len(states), **detail}))

    if want in ("all", "subadditivity"):
        battery("subadditivity",
                lambda s, d: ent.subadditivity_report(s).min_slack(), 2)
    if want in ("all", "decomposition"):
        def decomposition(s, d):
            rep = ent.mutual_information_decomposition(s)
            d.setdefault("last_values", rep.to_dict()["values_nats"])
            return min(rep.values["quantum_part"], rep.values["classical_part"])
        battery("decomposition", decomposition, 2)
    if want in ("all", "ssa"):
        battery("ssa", lambda s, d: ent.ssa_report(s).slacks["ssa"], 3)
    if want in ("all", "lieb-ruskai"):
        def lieb_ruskai(s, d):
            other = ent.random_state(s.dims, spec.stream(90001))
            return ent.lieb_ruskai_concavity_gap(s, other, 0.5)
        battery("lieb-ruskai", lieb_ruskai, 2)
    if not checks:
        raise ValidationError(f"unknown check {want!r}")

    config = {"seed": seed, "trials": args.trials, "check": want, "tol": tol,
              "state": args.state, "random": args.random}
    return _emit("check-entropy", config, checks, args)


def cmd_certify_representation(args) -> int:
    seed = _default_seed(args.seed)
    rep = mio.load_representation(args.rep)
    spec = RandomSpec(seed)
    checks = []
    start = time.perf_counter()
    verdict = certify_representation(rep, args.n, args.trials, spec)
    checks.append(_verdict_record(
        "exact_second_derivative", verdict, time.perf_counter() - start))
    start = time.perf_counter()
    worst = 0.0
    for t in range(20):
        rng = spec.stream(50_000 + t).rng()
        a = random_in_window_from(args.n, rep.window, rng)
        dev = float(np.linalg.norm(
            pick_eval_matrix(rep, a, via="spectral")
            - pick_eval_matrix(rep, a, via="atoms")
        ))
        worst = max(worst, dev)
    checks.append(_slack_record(
        "spectral_vs_atoms_routes", 1e-8 - worst, 0.0,
        time.perf_counter() - start, {"worst_deviation": worst}))
    config = {"rep": args.rep, "n": args.n, "trials": args.trials, "seed": seed}
    return _emit("certify-representation", config, checks, args)


def cmd_check_concavity(args) -> int:
    seed = _default_seed(args.seed)
    spec = RandomSpec(seed)
    window = SpectrumWindow(0.1, 5.0)
    checks = []
    start = time.perf_counter()

    if args.suite == "parallel-sum":
        worst_eig, worst_proj = -math.inf, 0.0
        for t in range(args.trials):
            rng = spec.stream(t).rng()
            if args.tuple:
                mats = mio.load_tuple(args.tuple)
            else:
                mats = [random_in_window_from(args.n, window, rng)
                        for _ in range(args.k)]
            dirs = jc.normalize_directions(
                [random_hermitian_from(mats[0].shape[0], rng)
                 for _ in range(len(mats))]
            )
            hess = jc.parallel_sum_hessian(mats, dirs)
            worst_eig = max(worst_eig, float(np.linalg.eigvalsh(hess).max()))
            worst_proj = max(worst_proj, *jc.projection_residuals(mats))
        checks.append(_slack_record(
            "parallel_sum_hessian_nsd", -worst_eig, 1e-8,
            time.perf_counter() - start,
            {"max_eigenvalue": worst_eig, "worst_projection_residual": worst_proj}))
    elif args.suite == "tensor-power":
        p = tuple(float(x) for x in args.p.split(","))
        config_q = QuadratureConfig(args.nodes)
        worst = 0.0
        curve = []
        for t in range(args.trials):
            rng = spec.stream(t).rng()
            if args.tuple:
                mats = mio.load_tuple(args.tuple)
            else:
                mats = [random_in_window_from(args.n, window, rng)
                        for _ in range(len(p))]
            direct = jc.tensor_power_direct(mats, p)
            approx = jc.tensor_power_integral(mats, p, config_q)
            err = float(np.linalg.norm(approx - direct) / np.linalg.norm(direct))
            worst = max(worst, err)
            if args.error_curve and t == 0:
                curve = [
                    float(np.linalg.norm(
                        jc.tensor_power_integral(mats, p, QuadratureConfig(n))
                        - direct) / np.linalg.norm(direct))
                    for n in (16, 32, 64, 128)
                ]
        detail = {"worst_relative_error": worst, "nodes": args.nodes}
        if curve:
            detail["error_curve_16_to_128"] = curve
        checks.append(_slack_record(
            "tensor_power_vs_direct", config_q.tolerance - worst, 0.0,
            time.perf_counter() - start, detail))
    elif args.suite == "lieb":
        worst = 0.0
        for t in range(args.trials):
            rng = spec.stream(t).rng()
            pw = float(rng.uniform(0.2, 0.8))
            r = float(rng.uniform(0.05, 1.0 - pw))
            a0, a1, b0, b1 = (
                random_in_window_from(args.n, window, rng) for _ in range(4)
            )
            k = rng.standard_normal((args.n, args.n)) \
                + 1j * rng.standard_normal((args.n, args.n))
            mid = jc.lieb_functional(0.5 * (a0 + a1), 0.5 * (b0 + b1), k, pw, r)
            avg = 0.5 * (jc.lieb_functional(a0, b0, k, pw, r)
                         + jc.lieb_functional(a1, b1, k, pw, r))
            worst = min(worst, (mid - avg) / max(abs(mid), abs(avg), 1.0))
        checks.append(_slack_record(
            "lieb_midpoint_concavity", worst, 1e-8,
            time.perf_counter() - start, {"worst_scaled_gap": worst}))
    elif args.suite == "kubo-ando":
        if not args.rep:
            raise ValidationError("kubo-ando suite needs --rep FILE")
        rep = mio.kubo_ando_from_dict(mio.load_json(args.rep))
        worst = 0.0
        for t in range(args.trials):
            rng = spec.stream(t).rng()
            a0, a1, b0, b1 = (
                random_in_window_from(args.n, window, rng) for _ in range(4)
            )
            mid = jc.kubo_ando_eval(rep, 0.5 * (a0 + a1), 0.5 * (b0 + b1))
            avg = 0.5 * (jc.kubo_ando_eval(rep, a0, b0)
                         + jc.kubo_ando_eval(rep, a1, b1))
            worst = min(worst, float(np.linalg.eigvalsh(mid - avg).min()))
        checks.append(_slack_record(
            "kubo_ando_midpoint_concavity", worst, 1e-8,
            time.perf_counter() - start, {"worst_gap_eigenvalue": worst}))
    else:
        raise ValidationError(f"unknown suite {args.suite!r}")

    config = {"suite": args.suite, "k": args.k, "n": args.n,
              "trials": args.trials, "seed": seed}
    return _emit("check-concavity", config, checks, args)


def cmd_run_suite(args) -> int:
    seed = _default_seed(args.seed)
    checks = acceptance.run_suite(seed, only=args.only)
    config = {"seed": seed, "only": args.only}
    return _emit("run-suite", config, checks, args)


# ---------------------------------------------------------------------------
# Argument parsing.


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matconvex",
        description="Certify matrix-convexity constructions and entropy inequalities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $MATCONVEX_SEED or 0)")
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--format", choices=("json", "text"), default="text")

    p = sub.add_parser("certify-function", help="convexity/monotonicity detectors")
    p.add_argument("--f", required=True, help=f"one of {sorted(cx.BUILTINS)}")
    p.add_argument("--window", required=True, help="spectrum window 'a,b'")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--mode", choices=("all", "convex", "monotone"), default="convex")
    common(p)
    p.set_defaults(func=cmd_certify_function)

    p = sub.add_parser("check-entropy", help="entropy inequality batteries")
    p.add_argument("--state", default=None, help="state file (JSON)")
    p.add_argument("--random", default=None, help="random ensemble dims, e.g. 2x3x2")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--check", default="all",
                   choices=("all", "subadditivity", "decomposition", "ssa",
                            "lieb-ruskai"))
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)
    p.set_defaults(func=cmd_check_entropy)

    p = sub.add_parser("certify-representation",
                       help="exact certification of a resolvent representation")
    p.add_argument("--rep", required=True, help="representation file (JSON)")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--trials", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_certify_representation)

    p = sub.add_parser("check-concavity", help="joint-concavity batteries")
    p.add_argument("--suite", required=True,
                   choices=("parallel-sum", "tensor-power", "lieb", "kubo-ando"))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--p", default="0.5,0.5", help="power vector, e.g. 0.3,0.7")
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--tuple", default=None, help="matrix tuple file (JSON list)")
    p.add_argument("--rep", default=None, help="operator-mean file for kubo-ando")
    p.add_argument("--error-curve", action="store_true")
    common(p)
    p.set_defaults(func=cmd_check_concavity)

    p = sub.add_parser("run-suite", help="full acceptance battery")
    p.add_argument("--only", default=None, help="substring filter on check names")
    common(p)
    p.set_defaults(func=cmd_run_suite)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, KeyError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except MatConvexError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
