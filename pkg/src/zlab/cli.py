"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 resource-cap error, 3 verification
counterexample.  Every subcommand supports `--format json` with the stable
top-level schema {command, config, results, diagnostics, elapsed_seconds};
tabular subcommands also support `--format csv`.

A constants file (`key = value` lines, `#` comments) may preset eps0, q1
and the window slack constants; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .arcs import (
    NormHistogram,
    arc_point_from_parts,
    dirichlet_decompose,
    classify_arc,
    parseval_check,
    sigma_N_of_Q,
)
from .cfcore import Alphabet, separation_sweep
from .census import dump_bitmap, enumerate_denominators, proportion_table
from .dimension import hausdorff_dimension
from .ensemble import (
    SamplingPolicy,
    build_ladder,
    build_preensembles,
    choose_parameters,
    dump_factorization_json,
    dump_words,
    factorize,
    product_set,
    product_window_report,
    spread_report,
)
from .errors import CounterexampleError, InputError, ResourceCapError
from .instances import desk_instance
from .verifier import (
    M_cardinality_check,
    inclusion_report,
    wedge_rigidity_report,
)

CONSTANT_KEYS = (
    "eps0",
    "q1",
    "lower_slack",
    "upper_slack",
    "tail_lower_slack",
    "tail_upper_slack",
)


def _read_constants(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONSTANT_KEYS:
                raise InputError(f"{path}:{lineno}: unknown constant {key!r}")
            try:
                out[key] = float(value)
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: bad value {value!r}") from exc
    return out


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ZLAB_THREADS", "1")))
    except ValueError:
        return 1


def _add_common(p):
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--constants", help="constants file (key = value lines)")


def _add_ladder_flags(p, constants_required=True):
    p.add_argument("--n", type=float, required=constants_required, help="ensemble scale N")
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--q1", type=float, default=None, help="surrogate Q1 override")


def _resolve(args, key, hard_default):
    """flag > constants file > hard default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return args._constants.get(key, hard_default)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zlab",
        description="continued fractions with bounded partial quotients: "
        "censuses, dimension, ensembles, arcs, verification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="denominator census D_A(N)")
    p.add_argument("--alphabet", required=True)
    p.add_argument("--limit", type=int, action="append", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--multiplicity", action="store_true")
    p.add_argument("--bitmap-out", help="binary bitmap dump path")
    _add_common(p)

    p = sub.add_parser("dimension", help="Hausdorff dimension of the limit set")
    p.add_argument("--alphabet", action="append", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--mesh0", type=int, default=32)
    p.add_argument("--mesh-max", type=int, default=256)
    _add_common(p)

    p = sub.add_parser("ladder", help="scale ladder N_j and Q sequence")
    _add_ladder_flags(p)
    _add_common(p)

    p = sub.add_parser("ensemble", help="pre-ensembles, factorization, reports")
    p.add_argument("--alphabet", required=True)
    _add_ladder_flags(p)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="sample")
    p.add_argument("--max-factor-size", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m1", type=float, help="factorize with thresholds M1, M2, M4")
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--m4", type=float, default=1.0)
    p.add_argument("--alpha", type=int, help="with --beta: report choose_parameters")
    p.add_argument("--beta", type=int)
    p.add_argument("--windows", action="store_true", help="sampled window report")
    p.add_argument("--spread", action="store_true", help="norm spread of Omega (needs --m1)")
    p.add_argument("--words-out", help="dump full product set words, one per line")
    p.add_argument("--factorization-out", help="dump factorization JSON (needs --m1)")
    _add_common(p)

    p = sub.add_parser("arcs", help="Dirichlet decomposition and trig sums")
    p.add_argument("--alphabet", required=True)
    _add_ladder_flags(p)
    p.add_argument("--decompose", type=float, action="append", help="theta in [0,1)")
    p.add_argument("--parseval", action="store_true")
    p.add_argument("--sigma", type=float, help="aggregate second moment above this Q")
    p.add_argument("--points", type=int, default=None, help="quadrature points")
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="sample")
    p.add_argument("--max-factor-size", type=int, default=24)
    p.add_argument("--product-cap", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("verify", help="brute-force verification of the lemmas")
    vsub = p.add_subparsers(dest="target", required=True)

    v = vsub.add_parser("lemma5", help="separation-bound sweep")
    v.add_argument("--alphabet", required=True)
    v.add_argument("--max-len", type=int, required=True)
    _add_common(v)

    for name, helptext in (
        ("inclusion", "approximate set inside exact set"),
        ("cardinality", "|exact set| against the product lower bound"),
        ("wedge", "wedge divisibility and zero-wedge rigidity"),
    ):
        v = vsub.add_parser(name, help=helptext)
        v.add_argument("--alphabet", required=True)
        _add_ladder_flags(v)
        v.add_argument("--alpha", type=int, default=1)
        v.add_argument("--beta", type=int, default=0)
        v.add_argument("--lam", type=float, default=0.1)
        v.add_argument("--z-size", type=int, default=6)
        v.add_argument("--case", choices=("balanced", "polynomial"), default="polynomial")
        v.add_argument("--m1", type=float, default=50.0, help="factorization threshold")
        v.add_argument("--m2", type=float, default=3.0)
        v.add_argument("--m4", type=float, default=3.0)
        v.add_argument("--max-factor-size", type=int, default=64)
        v.add_argument("--seed", type=int, default=0)
        v.add_argument("--cap", type=int, default=2_000_000)
        _add_common(v)

    return ap


# ---------------------------------------------------------------- handlers


def _cmd_census(args):
    alphabet = Alphabet.parse(args.alphabet)
    limits = sorted(set(args.limit))
    threads = args.threads if args.threads is not None else _default_threads()
    rows = proportion_table(alphabet, limits, threads=threads)
    results = {"rows": [{"N": n, "count": c, "ratio": r} for n, c, r in rows]}
    diagnostics = {"threads": threads}
    if args.multiplicity or args.bitmap_out:
        res = enumerate_denominators(
            alphabet, limits[-1], collect_multiplicity=args.multiplicity, threads=threads
        )
        if args.multiplicity:
            results["multiplicity"] = {str(k): v for k, v in sorted(res.multiplicity.items())}
        if args.bitmap_out:
            dump_bitmap(res, args.bitmap_out)
            diagnostics["bitmap"] = args.bitmap_out
    csv_rows = [("N", "count", "ratio")] + [(n, c, f"{r:.6f}") for n, c, r in rows]
    return results, diagnostics, csv_rows


def _cmd_dimension(args):
    rows = []
    for text in args.alphabet:
        est = hausdorff_dimension(
            Alphabet.parse(text), tolerance=args.tol, mesh0=args.mesh0, mesh_max=args.mesh_max
        )
        rows.append(
            {
                "alphabet": str(est.alphabet),
                "delta": est.delta,
                "residual": est.residual,
                "mesh_size": est.mesh_size,
                "drift": est.drift,
            }
        )
    csv_rows = [("alphabet", "delta", "residual", "mesh_size", "drift")] + [
        (r["alphabet"], f"{r['delta']:.12f}", f"{r['residual']:.3e}", r["mesh_size"], f"{r['drift']:.3e}")
        for r in rows
    ]
    return {"rows": rows}, {}, csv_rows


def _build_ladder(args):
    eps0 = _resolve(args, "eps0", 0.4)
    q1 = _resolve(args, "q1", None)
    return build_ladder(args.n, eps0, Q1_override=q1)


def _cmd_ladder(args):
    ladder = _build_ladder(args)
    results = ladder.as_dict()
    results["T1"] = ladder.T1
    csv_rows = [("j", "N_j")] + [
        (j, ladder.rung(j)) for j in range(-ladder.J - 1, ladder.J + 2)
    ]
    return results, {}, csv_rows


def _build_ensemble(args, ladder):
    policy = SamplingPolicy(
        mode=args.mode, max_factor_size=args.max_factor_size, seed=args.seed
    )
    return build_preensembles(ladder, Alphabet.parse(args.alphabet), policy)


def _cmd_ensemble(args):
    ladder = _build_ladder(args)
    ens = _build_ensemble(args, ladder)
    results = {
        "ladder": ladder.as_dict(),
        "factor_cardinalities": [len(f) for f in ens.factors],
    }
    diagnostics = {"mode": args.mode, "seed": args.seed}
    fact = None
    if args.m1 is not None:
        fact = factorize(ens, M1=args.m1, M2=args.m2, M4=args.m4)
        results["factorization"] = fact.as_dict()
        if args.spread:
            results["spread"] = spread_report(fact)
        if args.factorization_out:
            dump_factorization_json(fact, args.factorization_out)
            diagnostics["factorization_out"] = args.factorization_out
    if args.alpha is not None and args.beta is not None:
        choice = choose_parameters(
            args.alpha, args.beta, ladder.N, ladder, Alphabet.parse(args.alphabet).max_letter
        )
        results["parameters"] = {
            "M1": choice.M1,
            "M2": choice.M2,
            "M4": choice.M4,
            "case": choice.case,
            "feasible": choice.feasible,
            "notes": choice.notes,
        }
    if args.windows:
        results["windows"] = product_window_report(
            ens,
            seed=args.seed,
            lower_slack=_resolve(args, "lower_slack", 70.0),
            upper_slack=_resolve(args, "upper_slack", 1.01),
            tail_lower_slack=_resolve(args, "tail_lower_slack", 150.0),
            tail_upper_slack=_resolve(args, "tail_upper_slack", 73.0),
        )
    if args.words_out:
        dump_words(product_set(ens.factors), args.words_out)
        diagnostics["words_out"] = args.words_out
    return results, diagnostics, None


def _cmd_arcs(args):
    ladder = _build_ladder(args)
    results = {}
    csv_rows = None
    if args.decompose:
        rows = []
        for theta in args.decompose:
            p = classify_arc(dirichlet_decompose(theta, ladder.N, ladder.Q1), ladder)
            rows.append(
                {
                    "theta": p.theta,
                    "a": p.a,
                    "q": p.q,
                    "K": p.K,
                    "l": p.l,
                    "lambda": p.lam,
                    "alpha": p.alpha,
                    "beta": p.beta,
                    "kappa": p.kappa,
                    "reconstruction_error": abs(p.reconstruct() - p.theta),
                }
            )
        results["decompose"] = rows
        csv_rows = [("theta", "a", "q", "l", "lambda", "alpha", "beta", "kappa")] + [
            (r["theta"], r["a"], r["q"], r["l"], r["lambda"], r["alpha"], r["beta"], r["kappa"])
            for r in rows
        ]
    if args.parseval or args.sigma is not None:
        ens = _build_ensemble(args, ladder)
        omega = product_set(ens.factors, cap=args.product_cap)
        hist = NormHistogram.from_elements(omega)
        results["histogram"] = {"total": hist.total, "max_norm": hist.max_norm,
                                "distinct_norms": len(hist.counts)}
        if args.parseval:
            points = args.points or 2 * hist.max_norm + 1
            pr = parseval_check(hist, points, N=ladder.N)
            results["parseval"] = {
                "exact": pr.exact,
                "quadrature": pr.quadrature,
                "relative_error": pr.relative_error,
                "ratio_to_bound": pr.ratio_to_bound,
                "cauchy_schwarz_distinct_bound": pr.cauchy_schwarz_distinct_bound,
            }
        if args.sigma is not None:
            points = args.points or 2 * hist.max_norm + 1
            results["sigma"] = {
                "Q": args.sigma,
                "value": sigma_N_of_Q(hist, ladder.N, ladder, args.sigma, points),
            }
    if not results:
        raise InputError("arcs: nothing to do (give --decompose, --parseval or --sigma)")
    return results, {}, csv_rows


def _cmd_verify_lemma5(args):
    report = separation_sweep(Alphabet.parse(args.alphabet), args.max_len)
    if report["violations"]:
        raise CounterexampleError(
            f"separation bound violated: {report['first_violation']}"
        )
    return report, {}, None


def _desk(args):
    return desk_instance(
        Alphabet.parse(args.alphabet),
        N=args.n,
        eps0=_resolve(args, "eps0", 0.4),
        Q1=_resolve(args, "q1", 4.0),
        alpha=args.alpha,
        beta=args.beta,
        lam=args.lam,
        z_size=args.z_size,
        case=args.case,
        block_thresholds=(args.m1, args.m2, args.m4),
        max_factor_size=args.max_factor_size,
        seed=args.seed,
    )


def _cmd_verify_inclusion(args):
    inst = _desk(args)
    report = inclusion_report(
        inst.factorization, inst.g3, inst.Z, inst.strategy_case, inst.params, cap=args.cap
    )
    if report["violations"] and report["inclusion_guaranteed"]:
        raise CounterexampleError(
            f"inclusion violated with hypotheses satisfied: {report['first_violation']}"
        )
    return report, {"z_size": len(inst.Z)}, None


def _cmd_verify_cardinality(args):
    inst = _desk(args)
    report = M_cardinality_check(
        inst.factorization, inst.g3, inst.Z, inst.params, cap=args.cap
    )
    if not report["lower_bound_ok"]:
        raise CounterexampleError(
            f"cardinality lower bound violated: measured {report['measured']} "
            f"< predicted {report['predicted']}"
        )
    return report, {"z_size": len(inst.Z)}, None


def _cmd_verify_wedge(args):
    inst = _desk(args)
    report = wedge_rigidity_report(
        inst.factorization, inst.g3, inst.Z, inst.params, cap=args.cap
    )
    if report["zero_wedge_violations"]:
        raise CounterexampleError("zero wedge with unequal columns found")
    return report, {"z_size": len(inst.Z)}, None


HANDLERS = {
    "census": _cmd_census,
    "dimension": _cmd_dimension,
    "ladder": _cmd_ladder,
    "ensemble": _cmd_ensemble,
    "arcs": _cmd_arcs,
    ("verify", "lemma5"): _cmd_verify_lemma5,
    ("verify", "inclusion"): _cmd_verify_inclusion,
    ("verify", "cardinality"): _cmd_verify_cardinality,
    ("verify", "wedge"): _cmd_verify_wedge,
}


def _emit(args, command, results, diagnostics, csv_rows, elapsed):
    if args.format == "csv":
        if csv_rows is None:
            raise InputError(f"{command}: csv output not available for this invocation")
        text = "\n".join(",".join(str(c) for c in row) for row in csv_rows) + "\n"
    else:
        config = {
            k: v
            for k, v in vars(args).items()
            if k not in ("format", "out", "_constants") and not callable(v)
        }
        text = json.dumps(
            {
                "command": command,
                "config": config,
                "results": results,
                "diagnostics": diagnostics,
                "elapsed_seconds": elapsed,
            },
            indent=2,
            sort_keys=True,
            default=str,
        ) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv) -> int:
    args = build_parser().parse_args(argv)
    try:
        args._constants = _read_constants(args.constants) if args.constants else {}
        key = (args.command, args.target) if args.command == "verify" else args.command
        command = key if isinstance(key, str) else " ".join(key)
        start = time.time()
        results, diagnostics, csv_rows = HANDLERS[key](args)
        _emit(args, command, results, diagnostics, csv_rows, time.time() - start)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 2
    except CounterexampleError as exc:
        print(f"counterexample: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
