"""Batch front end: run manifests, sweep parameters, check identities.

    folchar run <manifest> [--quad N] [--out report.json] [--timing]
    folchar sweep <manifest> --param NAME --range a:b:n [--m M] [--csv out.csv]
    folchar check <manifest> --identity NAME [--q Q] [--trials K]

Exit codes: 0 all tasks pass, 1 task failure, 2 manifest/input error.
Reports are deterministic byte for byte for a fixed manifest, flags and
build; wall-clock timing is therefore kept out of the report file unless
--timing is passed (it is always shown on stdout).  FOLCHAR_SEED fixes
the randomized instances used by identity checks.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import classes, foliation, manifest as manifest_mod, models, numeric, randgen
from .classes import (PROP31_SIGN, bott_rep, dbott_rep, fiber_integrate, flk_rep,
                      s1_twist, verify_prop31)
from .errors import FolcharError, ManifestError, SingularEvaluationError
from .foliation import DTHETA_SIGN, IDENTITY_NAMES
from .manifest import ManifestData, load_manifest, parse_complex
from .numeric import FormIntegrator, QuadratureSpec, builtin, category_constant
from .scalars import Scalar

CSV_COLUMNS = ("lambda_re", "lambda_im", "bott_re", "bott_im",
               "dbott_re", "dbott_im", "flk_fiber_re", "flk_fiber_im", "m")


def _cnum(v: complex) -> dict:
    return {"re": float(v.real), "im": float(v.imag)}


def _close(value: complex, expect: complex, tol: float) -> bool:
    scale = max(1.0, abs(expect))
    return abs(value - expect) <= tol * scale


class TaskFailure(Exception):
    pass


def _resolve_chart(data: ManifestData, task: dict):
    name = task.get("chart", data.default_chart())
    if name not in data.charts:
        raise ManifestError(f"task references unknown chart {name!r}")
    return name, data.charts[name]


def _resolve_deformation(data: ManifestData, task: dict):
    name = task.get("deformation", data.default_deformation())
    if name is None or name not in data.deformations:
        raise ManifestError(f"task references unknown deformation {name!r}")
    return name, data.deformations[name]


def _resolve_manifold(data: ManifestData, task: dict):
    name = task.get("manifold", data.default_manifold())
    if name is None or name not in data.manifolds:
        raise ManifestError(f"task references unknown manifold {name!r}")
    builtin_name, params = data.manifolds[name]
    return name, builtin(builtin_name), dict(params)


def run_class_task(data: ManifestData, task: dict, quad: QuadratureSpec) -> dict:
    kind = task.get("kind")
    if kind not in ("bott", "dbott", "flk"):
        raise ManifestError(f"class task kind must be bott, dbott, or flk, not {kind!r}")
    chart_name, chart = _resolve_chart(data, task)
    m = task.get("m", 0)
    result: dict = {"task": "class", "kind": kind, "chart": chart_name, "m": m}
    if kind == "bott":
        rep = bott_rep(chart)
    else:
        _, deformation = _resolve_deformation(data, task)
        if m:
            twisted = s1_twist(chart, m)
            deformation_t = deformation.on_chart(twisted)
            rep = dbott_rep(twisted, deformation_t) if kind == "dbott" \
                else flk_rep(twisted, deformation_t)
        else:
            rep = dbott_rep(chart, deformation) if kind == "dbott" \
                else flk_rep(chart, deformation)
    fibered = False
    man_name, man, params = _resolve_manifold(data, task)
    if rep.degree is not None and rep.degree == man.dimension + 1 and m:
        rep = classes.fiber_integrate_class(rep)
        fibered = True
    result.update({"manifold": man_name, "degree": rep.degree,
                   "c_power": rep.c_power, "fiber_integrated": fibered})
    value = numeric.class_coefficient(rep, man, quad, params, chart.category)
    result["value"] = _cnum(value)
    if "expect" in task:
        expect = parse_complex(task["expect"])
        tol = float(task.get("tol", 1e-6))
        ok = _close(value, expect, tol)
        result.update({"expect": _cnum(expect), "tol": tol,
                       "status": "pass" if ok else "fail"})
        if not ok:
            result["error"] = f"value {value} differs from expected {expect}"
    else:
        result["status"] = "pass"
    return result


def run_check_task(data: ManifestData, task: dict) -> dict:
    name = task.get("identity")
    if name not in IDENTITY_NAMES:
        raise ManifestError(
            f"unknown identity {name!r}; known: {', '.join(IDENTITY_NAMES)}")
    q = int(task.get("q", 1))
    trials = int(task.get("trials", 1))
    rng = randgen.seeded_rng(task.get("seed"))
    residual_text = "0"
    passed = True
    details: dict = {}
    for _ in range(trials):
        if name == "dtheta-pow":
            chart = randgen.normalized_chart(q, rng)
            rep = foliation.check_dtheta_power(chart)
        elif name == "lemma-LP":
            chart, deformation = randgen.lemma_lp_instance(q, rng)
            rep = foliation.check_lp_lemma(chart, deformation)
        elif name == "prop31-expansion":
            eta, eta_dot, m = randgen.prop31_instance(q, rng)
            rep = foliation.check_prop31_expansion(eta, eta_dot, m, q)
        else:
            chart, cocycle, _ = randgen.lemma21_instance(q, rng)
            rep = foliation.check_lemma21_closed(chart, cocycle)
        details = dict(rep.details)
        if not rep.passed:
            passed = False
            residual_text = str(rep.residual)
            break
    return {"task": "check", "identity": name, "q": q, "trials": trials,
            "residual": residual_text, "details": details,
            "status": "pass" if passed else "fail"}


def run_prop31_task(data: ManifestData, task: dict, quad: QuadratureSpec) -> dict:
    chart_name, chart = _resolve_chart(data, task)
    _, deformation = _resolve_deformation(data, task)
    m = int(task.get("m", 1))
    rep = verify_prop31(chart, deformation, m)
    result = {
        "task": "prop31", "chart": chart_name, "m": m, "sigma": rep.sigma,
        "decomposition_residual": str(rep.decomposition_residual),
        "fiber_residual": str(rep.fiber_residual),
        "status": "pass" if rep.passed else "fail",
    }
    if data.manifolds:
        man_name, man, params = _resolve_manifold(data, task)
        if man.dimension == 2 * chart.q + 1:
            twisted = s1_twist(chart, m) if m else chart
            deformation_t = deformation.on_chart(twisted) if m else deformation
            flk0 = flk_rep(twisted, deformation_t)
            fibered = classes.fiber_integrate_class(flk0)
            flk_val = numeric.class_coefficient(fibered, man, quad, params, chart.category)
            dbott_val = numeric.class_coefficient(
                dbott_rep(chart, deformation), man, quad, params, chart.category)
            target = -rep.sigma * m * dbott_val
            ok = _close(flk_val, target, float(task.get("tol", 1e-6)))
            result.update({
                "manifold": man_name,
                "fiber_value": _cnum(flk_val),
                "minus_m_dbott": _cnum(target),
                "status": result["status"] if ok else "fail",
            })
    return result


def sweep_rows(data: ManifestData, symbol: str, start: complex, stop: complex,
               steps: int, m: int, quad: QuadratureSpec,
               task: dict | None = None) -> list:
    task = task or {}
    chart_name, chart = _resolve_chart(data, task)
    _, deformation = _resolve_deformation(data, task)
    _, man, params = _resolve_manifold(data, task)
    if symbol not in data.universe.parameters():
        raise ManifestError(f"sweep symbol {symbol!r} is not a declared parameter")
    reps = {"bott": bott_rep(chart), "dbott": dbott_rep(chart, deformation)}
    if m:
        twisted = s1_twist(chart, m)
        flk0 = flk_rep(twisted, deformation.on_chart(twisted))
        reps["flk_fiber"] = classes.fiber_integrate_class(flk0)
    integrators = {}
    for key, rep in reps.items():
        if not rep.rep.is_zero:
            integrators[key] = FormIntegrator(rep.rep, man, quad)
    c_num = category_constant(chart.category)
    rows = []
    for k in range(steps):
        frac = 0.0 if steps == 1 else k / (steps - 1)
        lam = start + (stop - start) * frac
        if lam.imag == 0 and lam.real <= 0:
            raise TaskFailure(
                f"sweep value {symbol} = {lam} lies on the closed negative real "
                "axis where the family is singular")
        bindings = dict(params)
        bindings[symbol] = lam
        bindings["c"] = c_num
        values = {}
        for key, rep in reps.items():
            if rep.rep.is_zero:
                values[key] = 0.0 + 0.0j
            else:
                values[key] = (c_num ** rep.c_power) * integrators[key].integrate(bindings)
        rows.append({
            "lambda": lam,
            "bott": values["bott"],
            "dbott": values["dbott"],
            "flk_fiber": values.get("flk_fiber", 0.0 + 0.0j),
            "m": m,
        })
    return rows


def continuity_summary(rows: list) -> dict:
    diffs = [abs(b["flk_fiber"] - a["flk_fiber"]) for a, b in zip(rows, rows[1:])]
    return {
        "points": len(rows),
        "max_successive_difference": max(diffs) if diffs else 0.0,
        "nonconstant": len({round(abs(r["flk_fiber"]), 12) for r in rows}) > 1,
    }


def rows_to_csv(rows: list) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lam, b, db, fk = r["lambda"], r["bott"], r["dbott"], r["flk_fiber"]
        lines.append(",".join([
            repr(float(lam.real)), repr(float(lam.imag)),
            repr(float(b.real)), repr(float(b.imag)),
            repr(float(db.real)), repr(float(db.imag)),
            repr(float(fk.real)), repr(float(fk.imag)),
            str(r["m"]),
        ]))
    return "\n".join(lines) + "\n"


def run_sweep_task(data: ManifestData, task: dict, quad: QuadratureSpec) -> dict:
    symbol = task.get("symbol")
    start = parse_complex(task.get("start", 1))
    stop = parse_complex(task.get("stop", 1))
    steps = int(task.get("steps", 1))
    m = int(task.get("m", 0))
    rows = sweep_rows(data, symbol, start, stop, steps, m, quad, task)
    summary = continuity_summary(rows)
    out = {"task": "sweep", "symbol": symbol, "steps": steps, "m": m,
           "continuity": summary, "status": "pass"}
    if "csv" in task:
        with open(task["csv"], "w", encoding="utf-8") as fh:
            fh.write(rows_to_csv(rows))
        out["csv"] = task["csv"]
    else:
        out["rows"] = [
            {"lambda": _cnum(r["lambda"]), "bott": _cnum(r["bott"]),
             "dbott": _cnum(r["dbott"]), "flk_fiber": _cnum(r["flk_fiber"]),
             "m": r["m"]} for r in rows]
    return out


def execute_tasks(data: ManifestData, quad: QuadratureSpec) -> tuple[list, bool]:
    results = []
    all_pass = True
    for task in data.tasks:
        kind = task["task"]
        t0 = time.perf_counter()
        try:
            if kind == "class":
                res = run_class_task(data, task, quad)
            elif kind == "check":
                res = run_check_task(data, task)
            elif kind == "prop31":
                res = run_prop31_task(data, task, quad)
            else:
                res = run_sweep_task(data, task, quad)
        except (TaskFailure, SingularEvaluationError) as e:
            res = {"task": kind, "status": "fail", "error": str(e)}
        res["_elapsed"] = time.perf_counter() - t0
        all_pass = all_pass and res.get("status") == "pass"
        results.append(res)
    return results, all_pass


def build_report(data: ManifestData, quad: QuadratureSpec, results: list,
                 all_pass: bool, with_timing: bool) -> dict:
    import os

    tasks_out = []
    for r in results:
        r = dict(r)
        elapsed = r.pop("_elapsed", None)
        if with_timing and elapsed is not None:
            r["elapsed_s"] = round(elapsed, 6)
        tasks_out.append(r)
    return {
        "manifest": os.path.basename(data.path),
        "quad": quad.nodes,
        "sigma": PROP31_SIGN,
        "dtheta_sign": DTHETA_SIGN,
        "tasks": tasks_out,
        "passed": all_pass,
    }


def _print_human(results: list, stream) -> None:
    for i, r in enumerate(results, 1):
        status = r.get("status", "fail").upper()
        label = r.get("task")
        extra = ""
        if label == "class":
            v = r.get("value")
            if v:
                extra = f" {r.get('kind')} = {v['re']:.9g}{v['im']:+.9g}i"
        elif label == "check":
            extra = f" {r.get('identity')} q={r.get('q')}"
        elif label == "prop31":
            extra = f" m={r.get('m')} sigma={r.get('sigma')}"
        elif label == "sweep":
            cont = r.get("continuity", {})
            extra = (f" {r.get('symbol')} x{r.get('steps')} max-diff="
                     f"{cont.get('max_successive_difference', 0):.6g}")
        err = f"  ({r['error']})" if "error" in r and status == "FAIL" else ""
        elapsed = r.get("_elapsed")
        t = f" [{elapsed:.2f}s]" if elapsed is not None else ""
        print(f"task {i} [{label}]{extra} {status}{t}{err}", file=stream)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="folchar",
        description="Secondary characteristic classes of foliations: "
                    "symbolic identity checks and numeric class values.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the tasks of a manifest")
    p_run.add_argument("manifest")
    p_run.add_argument("--quad", type=int, default=numeric.REFERENCE_NODES)
    p_run.add_argument("--out", help="write the JSON report here")
    p_run.add_argument("--timing", action="store_true",
                       help="include wall-clock timing in the JSON report")

    p_sweep = sub.add_parser("sweep", help="sweep a parameter and emit CSV")
    p_sweep.add_argument("manifest")
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--range", required=True, metavar="a:b:n")
    p_sweep.add_argument("--m", type=int, default=0)
    p_sweep.add_argument("--csv", help="write CSV here (default stdout)")
    p_sweep.add_argument("--quad", type=int, default=32)

    p_check = sub.add_parser("check", help="verify a named identity")
    p_check.add_argument("manifest")
    p_check.add_argument("--identity", required=True)
    p_check.add_argument("--q", type=int, default=1)
    p_check.add_argument("--trials", type=int, default=1)

    args = parser.parse_args(argv)

    try:
        data = load_manifest(args.manifest)
    except ManifestError as e:
        print(f"manifest error: {e}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            quad = QuadratureSpec(args.quad)
            t0 = time.perf_counter()
            results, all_pass = execute_tasks(data, quad)
            _print_human(results, sys.stdout)
            print(f"total {time.perf_counter() - t0:.2f}s; "
                  f"{'all tasks pass' if all_pass else 'TASK FAILURES'}")
            if args.out:
                report = build_report(data, quad, results, all_pass, args.timing)
                with open(args.out, "w", encoding="utf-8") as fh:
                    json.dump(report, fh, sort_keys=True, indent=2, ensure_ascii=False)
                    fh.write("\n")
            return 0 if all_pass else 1

        if args.command == "sweep":
            try:
                a, b, n = args.range.split(":")
                start, stop, steps = parse_complex(a), parse_complex(b), int(n)
            except (ValueError, ManifestError):
                print(f"bad --range {args.range!r}; expected a:b:n", file=sys.stderr)
                return 2
            quad = QuadratureSpec(args.quad)
            try:
                rows = sweep_rows(data, args.param, start, stop, steps, args.m, quad)
            except TaskFailure as e:
                print(f"sweep failed: {e}", file=sys.stderr)
                return 1
            csv_text = rows_to_csv(rows)
            if args.csv:
                with open(args.csv, "w", encoding="utf-8") as fh:
                    fh.write(csv_text)
            else:
                sys.stdout.write(csv_text)
            summary = continuity_summary(rows)
            print(f"max successive |flk_fiber| difference: "
                  f"{summary['max_successive_difference']:.6g}", file=sys.stderr)
            return 0

        # check
        res = run_check_task(data, {"task": "check", "identity": args.identity,
                                    "q": args.q, "trials": args.trials})
        status = res["status"]
        print(f"{args.identity} q={args.q} trials={args.trials}: {status.upper()}"
              + ("" if status == "pass" else f"  residual: {res['residual']}"))
        return 0 if status == "pass" else 1
    except ManifestError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except SingularEvaluationError as e:
        print(f"singular evaluation: {e}", file=sys.stderr)
        return 1
    except FolcharError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
