"""Command-line interface with reproducible JSON output.

Every invocation reads JSON (from --input), writes exactly one JSON document
to stdout (newline terminated, floats at 17 significant digits), and exits
with 0 on success, 2 on certification failure, 3 when a work limit is
exceeded, and 4 on input errors.  Identical inputs produce byte-identical
output for any --threads value: chunk boundaries are fixed, so the thread
count never changes a result.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import evaluator, hypergraph, ising, maxent, oracle, rounding, zerofree
from .errors import (CertificationError, FactorizationError, InputError,
                     SmoothcountError, SolverError, WorkLimitError)
from .model import PartialAssignment, ProbabilityVector, SparseSystem

EXIT_OK = 0
EXIT_CERTIFICATION = 2
EXIT_WORK_LIMIT = 3
EXIT_INPUT = 4

DEFAULT_EPSILON = 1e-3
DEFAULT_WORK_LIMIT = 1_000_000_000


def _dump(value) -> str:
    """Serialize with a fixed float format so output is byte-stable."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_dump(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _dump(v) for k, v in value.items()) + "}"
    raise TypeError(f"cannot serialize {type(value)!r}")


def _emit(doc) -> None:
    sys.stdout.write(_dump(doc) + "\n")


def _load_doc(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _require(doc, key, path):
    if key not in doc:
        raise InputError(f"{path}: missing required field {key!r}")
    return doc[key]


def _load_system(path) -> tuple[SparseSystem, ProbabilityVector | None]:
    doc = _load_doc(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    m = _require(doc, "m", path)
    n = _require(doc, "n", path)
    if not (isinstance(m, int) and isinstance(n, int)):
        raise InputError(f"{path}: m and n must be integers")
    system = SparseSystem.from_entries(
        m, n, _require(doc, "entries", path),
        _require(doc, "beta", path), _require(doc, "gamma", path),
    )
    p = None
    if doc.get("p") is not None:
        p = ProbabilityVector.of(doc["p"])
        if len(p) != n:
            raise InputError(f"{path}: p has length {len(p)}, expected {n}")
    return system, p


def _need_p(p, path):
    if p is None:
        raise InputError(f"{path}: this command needs the optional field 'p'")
    return p


def _load_hypergraph(path) -> hypergraph.Hypergraph:
    doc = _load_doc(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    return hypergraph.Hypergraph.of(
        _require(doc, "vertices", path), _require(doc, "edges", path))


def _load_ising(path) -> ising.IsingModel:
    doc = _load_doc(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    g_entries = _require(doc, "g", path)
    if "f" in doc and "exp_f" in doc:
        raise InputError(f"{path}: give either 'f' or 'exp_f', not both")
    f = doc.get("f")
    if doc.get("exp_f") is not None:
        f = []
        for v in doc["exp_f"]:
            v = float(v)
            if v <= 0.0:
                raise InputError(f"{path}: exp_f entries must be positive")
            f.append(math.log(v))
    n = doc.get("n")
    if n is None:
        size = len(f) if f is not None else 0
        for k, j, _v in g_entries:
            size = max(size, k + 1, j + 1)
        n = size
    if f is not None and len(f) != n:
        raise InputError(f"{path}: f has length {len(f)}, expected {n}")
    return ising.IsingModel.from_entries(n, g_entries, f)


def _parse_z(text, n):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"--z is not valid JSON: {err}") from None
    if not isinstance(raw, list) or len(raw) != n:
        raise InputError(f"--z must be a JSON array of length {n}")
    out = []
    for item in raw:
        if isinstance(item, (int, float)):
            out.append(complex(float(item), 0.0))
        elif isinstance(item, list) and len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        else:
            raise InputError("--z entries must be numbers or [re, im] pairs")
    return out


def _parse_degree(text):
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        raise InputError(f"--Delta must be an integer or 'inf', got {text!r}") from None


def _parse_fixings(pairs):
    fixed = {}
    for item in pairs or []:
        if "=" not in item:
            raise InputError(f"--fix expects j=0 or j=1, got {item!r}")
        j, _, bit = item.partition("=")
        try:
            fixed[int(j)] = int(bit)
        except ValueError:
            raise InputError(f"--fix expects integer index and bit, got {item!r}") from None
    return PartialAssignment.of(fixed)


def _eval_doc(result: evaluator.EvaluationResult) -> dict:
    return {
        "log_value": result.log_value,
        "value": result.value,
        "epsilon": result.epsilon,
        "delta": result.delta,
        "degree": result.degree,
        "certified": result.certified,
        "tail_bound": result.tail_bound,
        "assumption": result.assumption,
    }


def _instance_doc(system: SparseSystem, p: ProbabilityVector | None) -> dict:
    return {
        "m": system.n_rows,
        "n": system.n_cols,
        "entries": [[i, j, a] for i, j, a in system.entry_list()],
        "beta": list(system.beta),
        "gamma": list(system.gamma),
        "p": list(p.p) if p is not None else None,
    }


def _oracle_cap(args, default):
    if args.work_limit != DEFAULT_WORK_LIMIT:
        return max(int(args.work_limit).bit_length() - 1, 1)
    return default


def _cmd_check(args):
    system, p = _load_system(args.input)
    x = _need_p(p, args.input).evaluation_points
    if args.delta is not None:
        delta = args.delta
    else:
        delta = zerofree.max_delta(system, x)
        if delta is None:
            probe = zerofree.check_polydisc(system, x, delta=0.0)
            doc = {
                "passed": False,
                "delta": None,
                "c": probe.c,
                "lambda": list(probe.lam),
                "violations": [
                    {"kind": v.kind, "index": v.index, "value": v.value, "bound": v.bound}
                    for v in probe.violations
                ],
            }
            return doc, EXIT_CERTIFICATION
    rho = tuple(v / (1.0 - delta) for v in x)
    report = zerofree.check_polydisc(system, rho, delta=delta)
    doc = {
        "passed": report.passed,
        "delta": delta,
        "c": report.c,
        "rho": list(rho),
        "lambda": list(report.lam),
    }
    if report.passed:
        doc["margin"] = report.margin
        doc["violations"] = []
        return doc, EXIT_OK
    doc["margin"] = None
    doc["violations"] = [
        {"kind": v.kind, "index": v.index, "value": v.value, "bound": v.bound}
        for v in report.violations
    ]
    return doc, EXIT_CERTIFICATION


def _cmd_gamma_uniform(args):
    delta = args.delta if args.delta is not None else 1e-6
    degree = _parse_degree(args.Delta)
    gamma = zerofree.max_gamma_uniform(args.k, delta, degree)
    return {
        "k": args.k,
        "Delta": None if degree == math.inf else degree,
        "delta": delta,
        "t_star": gamma * args.k,
        "gamma": gamma,
    }


def _cmd_gamma_matching(args):
    delta = args.delta if args.delta is not None else 1e-6
    degree = _parse_degree(args.Delta)
    if degree == math.inf:
        raise InputError("gamma matching needs a finite --Delta")
    report = zerofree.max_gamma_matching(args.k, degree, args.omega, delta)
    return {
        "k": args.k,
        "Delta": degree,
        "omega": args.omega,
        "delta": delta,
        "gamma": report.gamma,
        "t_star": report.gamma * args.k,
        "target_gamma": report.target_gamma,
        "target_admissible": report.target_admissible,
    }


def _cmd_gamma_sparse(args):
    system, _p = _load_system(args.input)
    result = zerofree.suggest_gamma_sparse(system)
    return {
        "gamma": list(result.gamma),
        "column_sums": list(result.column_sums),
        "condition_ok": result.condition_ok,
    }


def _cmd_eval(args):
    system, p = _load_system(args.input)
    p = _need_p(p, args.input)
    fn = (evaluator.smoothed_expectation_geometric if args.geometric
          else evaluator.smoothed_expectation)
    result = fn(system, p, args.epsilon, delta=args.delta, force=args.force,
                threads=args.threads, work_limit=args.work_limit)
    return _eval_doc(result)


def _cmd_cond(args):
    system, p = _load_system(args.input)
    p = _need_p(p, args.input)
    assignment = _parse_fixings(args.fix)
    result = evaluator.conditional_expectation(
        system, p, assignment, args.epsilon, delta=args.delta, force=args.force,
        threads=args.threads, work_limit=args.work_limit)
    doc = _eval_doc(result)
    doc["fixed"] = {str(j): b for j, b in assignment.fixed}
    return doc


def _cmd_round(args):
    system, p = _load_system(args.input)
    p = _need_p(p, args.input)
    result = rounding.derandomize(
        system, p, args.epsilon,
        threads=args.threads, work_limit=args.work_limit)
    return {
        "x0": list(result.x0),
        "achieved": result.achieved,
        "reference": result.reference,
        "log_achieved": result.log_achieved,
        "log_reference": result.log_reference,
        "epsilon": args.epsilon,
    }


def _cmd_hyper(args):
    graph = _load_hypergraph(args.input)
    delta = args.delta if args.delta is not None else hypergraph.DEFAULT_AUTO_DELTA
    if args.general:
        if args.gamma is None or args.p is None:
            raise InputError("--general needs explicit --gamma and --p")
        system = hypergraph.incidence_system(graph, args.gamma)
        p = ProbabilityVector.uniform(args.p, graph.n_edges)
        doc = _instance_doc(system, p)
        doc["general"] = True
        return doc
    if args.variant == "perfect":
        inst = hypergraph.perfect_matching_instance(graph, args.gamma, delta=delta)
        doc = _instance_doc(inst.system, inst.p)
        doc.update({"k": inst.k, "Delta": inst.degree,
                    "gamma_used": inst.gamma, "delta": inst.delta})
        return doc
    if args.omega is None:
        raise InputError("hyper matching needs --omega")
    inst = hypergraph.matching_instance(graph, args.omega, args.gamma, delta=delta)
    doc = _instance_doc(inst.system, inst.p)
    doc.update({
        "k": inst.k, "Delta": inst.degree, "gamma_used": inst.gamma,
        "delta": inst.delta, "omega": inst.omega,
        "target_gamma": inst.target_gamma,
        "target_admissible": inst.target_admissible,
    })
    return doc


def _cmd_ising_to(args):
    system, p = _load_system(args.input)
    p = _need_p(p, args.input)
    conv = ising.to_ising(system, p)
    n = conv.model.n
    g_entries = [
        [k, j, conv.model.g[k][j]]
        for k in range(n) for j in range(k + 1, n)
        if conv.model.g[k][j] != 0.0
    ]
    return {
        "n": n,
        "g": g_entries,
        "f": list(conv.model.f),
        "log_constant": conv.log_constant,
        "constant": math.exp(conv.log_constant),
    }


def _cmd_ising_from(args):
    model = _load_ising(args.input)
    fact = ising.from_ising(model.matrix)
    doc = _instance_doc(fact.system, None)
    doc["top_eigenvalue"] = fact.top_eigenvalue
    doc["residual"] = fact.residual
    n = fact.system.n_cols
    if n:
        def ok(r):
            return zerofree.check_polydisc(fact.system, (r,) * n).passed
        lo, hi = 0.0, 1.0 - 1e-12
        if ok(hi):
            lo = hi
        else:
            for _ in range(200):
                if hi - lo <= 1e-9:
                    break
                mid = 0.5 * (lo + hi)
                if ok(mid):
                    lo = mid
                else:
                    hi = mid
        if lo > 0.0:
            doc["rho"] = lo
            doc["field_thresholds"] = list(
                ising.field_thresholds(model.matrix, (lo,) * n))
        else:
            doc["rho"] = None
            doc["field_thresholds"] = None
    else:
        doc["rho"] = None
        doc["field_thresholds"] = None
    return doc


def _cmd_ising_check(args):
    model = _load_ising(args.input)
    delta = args.delta if args.delta is not None else 0.5
    report = ising.lipschitz_condition(model, delta)
    doc = {
        "passed": report.passed,
        "delta": report.delta,
        "column_sums": list(report.column_sums),
        "bound": 1.0 - report.delta,
    }
    return doc, EXIT_OK if report.passed else EXIT_CERTIFICATION


def _cmd_ising_bruteforce(args):
    model = _load_ising(args.input)
    part = ising.partition_bruteforce(
        model, cap=_oracle_cap(args, ising.DEFAULT_SPIN_CAP), threads=args.threads)
    return {"log_value": part.log_value, "value": part.value}


def _cmd_maxent(args):
    system, _p = _load_system(args.input)
    solution = maxent.solve_maxent(system, args.tolerance)
    doc = {
        "p": list(solution.p.p),
        "dual": list(solution.dual),
        "entropy": solution.entropy,
        "residual": solution.residual,
        "count_bound": maxent.count_bound(system, solution),
        "log_count_bound": solution.entropy,
    }
    try:
        bound = maxent.smoothed_count_bound(
            system, solution, args.epsilon,
            threads=args.threads, work_limit=args.work_limit)
    except CertificationError as err:
        doc["smoothed_count_bound"] = None
        doc["smoothed_certified"] = False
        doc["certification_failure"] = str(err)
    else:
        doc["smoothed_count_bound"] = bound
        doc["smoothed_certified"] = True
    return doc


def _cmd_oracle_p(args):
    system, p = _load_system(args.input)
    if args.z is not None:
        z = _parse_z(args.z, system.n_cols)
    else:
        z = [complex(v, 0.0) for v in _need_p(p, args.input).evaluation_points]
    value = oracle.brute_force_P(
        system, z, cap=_oracle_cap(args, oracle.DEFAULT_VARIABLE_CAP),
        threads=args.threads)
    return {"re": value.real, "im": value.imag, "abs": abs(value)}


def _cmd_oracle_expect(args):
    system, p = _load_system(args.input)
    value = oracle.brute_force_expectation(
        system, _need_p(p, args.input),
        cap=_oracle_cap(args, oracle.DEFAULT_VARIABLE_CAP), threads=args.threads)
    return {"value": value, "log_value": math.log(value) if value > 0.0 else None}


def _cmd_oracle_count(args):
    system, _p = _load_system(args.input)
    count = oracle.count_solutions(
        system, args.tolerance, cap=_oracle_cap(args, oracle.DEFAULT_VARIABLE_CAP),
        threads=args.threads)
    return {"count": count, "tolerance": args.tolerance}


def _cmd_oracle_prop31(args):
    system, _p = _load_system(args.input)
    if args.z is None:
        raise InputError("oracle prop31 needs --z")
    z = _parse_z(args.z, system.n_cols)
    value = oracle.phase_product_sum(
        system, z, cap=_oracle_cap(args, oracle.DEFAULT_SIGN_CAP), threads=args.threads)
    return {"re": value.real, "im": value.imag, "abs": abs(value)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothcount",
        description="Smoothed counting of 0-1 solutions to linear systems.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="path to the JSON input document")
    common.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                        help="relative accuracy target (default 1e-3)")
    common.add_argument("--delta", type=float, default=None,
                        help="margin parameter; auto-selected when omitted")
    common.add_argument("--work-limit", type=int, default=DEFAULT_WORK_LIMIT,
                        help="maximum number of enumeration terms")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for the enumeration kernels")
    common.add_argument("--seed", type=int, default=None,
                        help="reserved for instance-generation tooling; the "
                             "computation commands are deterministic and ignore it")

    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", parents=[common],
                             help="zero-free polydisc certificate at p")
    p_check.set_defaults(handler=_cmd_check)

    p_gamma = sub.add_parser("gamma", help="admissible weight maximization")
    gamma_sub = p_gamma.add_subparsers(dest="variant", required=True)
    g_uniform = gamma_sub.add_parser("uniform", parents=[common])
    g_uniform.add_argument("--k", type=int, required=True)
    g_uniform.add_argument("--Delta", required=True, help="integer >= 3 or 'inf'")
    g_uniform.set_defaults(handler=_cmd_gamma_uniform)
    g_matching = gamma_sub.add_parser("matching", parents=[common])
    g_matching.add_argument("--k", type=int, required=True)
    g_matching.add_argument("--Delta", required=True)
    g_matching.add_argument("--omega", type=float, required=True)
    g_matching.set_defaults(handler=_cmd_gamma_matching)
    g_sparse = gamma_sub.add_parser("sparse", parents=[common])
    g_sparse.set_defaults(handler=_cmd_gamma_sparse)

    p_eval = sub.add_parser("eval", parents=[common],
                            help="smoothed expectation of the instance")
    p_eval.add_argument("--geometric", action="store_true",
                        help="nonnegative-integer variables instead of 0-1")
    p_eval.add_argument("--force", action="store_true",
                        help="compute even without a certificate (no guarantee)")
    p_eval.set_defaults(handler=_cmd_eval)

    p_cond = sub.add_parser("cond", parents=[common],
                            help="conditional expectation under fixings")
    p_cond.add_argument("--fix", action="append", metavar="J=BIT",
                        help="fix variable J to BIT; repeatable")
    p_cond.add_argument("--force", action="store_true")
    p_cond.set_defaults(handler=_cmd_cond, geometric=False)

    p_round = sub.add_parser("round", parents=[common],
                             help="derandomized rounding witness")
    p_round.set_defaults(handler=_cmd_round)

    p_hyper = sub.add_parser("hyper", help="hypergraph instance builders")
    hyper_sub = p_hyper.add_subparsers(dest="variant", required=True)
    for name in ("perfect", "matching"):
        h = hyper_sub.add_parser(name, parents=[common])
        h.add_argument("--gamma", type=float, default=None)
        h.add_argument("--omega", type=float, default=None)
        h.add_argument("--p", type=float, default=None,
                       help="edge probability for --general instances")
        h.add_argument("--general", action="store_true",
                       help="skip the uniformity check; needs --gamma and --p")
        h.set_defaults(handler=_cmd_hyper)

    p_ising = sub.add_parser("ising", help="spin-system conversions")
    ising_sub = p_ising.add_subparsers(dest="variant", required=True)
    i_to = ising_sub.add_parser("to", parents=[common])
    i_to.set_defaults(handler=_cmd_ising_to)
    i_from = ising_sub.add_parser("from", parents=[common])
    i_from.set_defaults(handler=_cmd_ising_from)
    i_check = ising_sub.add_parser("check", parents=[common])
    i_check.set_defaults(handler=_cmd_ising_check)
    i_bf = ising_sub.add_parser("bruteforce", parents=[common])
    i_bf.set_defaults(handler=_cmd_ising_bruteforce)

    p_maxent = sub.add_parser("maxent", parents=[common],
                              help="maximum-entropy marginals and count bounds")
    p_maxent.add_argument("--tolerance", type=float, default=1e-8)
    p_maxent.set_defaults(handler=_cmd_maxent)

    p_oracle = sub.add_parser("oracle", help="exhaustive reference computations")
    oracle_sub = p_oracle.add_subparsers(dest="variant", required=True)
    o_p = oracle_sub.add_parser("p", parents=[common])
    o_p.add_argument("--z", help="JSON array of numbers or [re, im] pairs")
    o_p.set_defaults(handler=_cmd_oracle_p)
    o_e = oracle_sub.add_parser("expect", parents=[common])
    o_e.set_defaults(handler=_cmd_oracle_expect)
    o_c = oracle_sub.add_parser("count", parents=[common])
    o_c.add_argument("--tolerance", type=float, default=1e-9)
    o_c.set_defaults(handler=_cmd_oracle_count)
    o_31 = oracle_sub.add_parser("prop31", parents=[common])
    o_31.add_argument("--z", help="JSON array of numbers or [re, im] pairs")
    o_31.set_defaults(handler=_cmd_oracle_prop31)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code in (0, None) else EXIT_INPUT
    try:
        out = args.handler(args)
    except CertificationError as err:
        doc = {"error": "certification", "message": str(err)}
        if err.report is not None:
            doc["violations"] = [
                {"kind": v.kind, "index": v.index, "value": v.value, "bound": v.bound}
                for v in err.report.violations
            ]
        if err.partial_assignment is not None:
            doc["partial_assignment"] = {
                str(j): b for j, b in err.partial_assignment.fixed}
        _emit(doc)
        return EXIT_CERTIFICATION
    except WorkLimitError as err:
        _emit({"error": "work-limit", "message": str(err),
               "required": err.required, "limit": err.limit})
        return EXIT_WORK_LIMIT
    except json.JSONDecodeError as err:
        _emit({"error": "input", "message": f"malformed JSON: {err.msg}",
               "line": err.lineno, "column": err.colno})
        return EXIT_INPUT
    except (InputError, SolverError, FactorizationError, OSError) as err:
        _emit({"error": "input", "message": str(err)})
        return EXIT_INPUT
    if isinstance(out, tuple):
        doc, code = out
    else:
        doc, code = out, EXIT_OK
    _emit(doc)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
