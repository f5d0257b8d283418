"""Command line front end.

One subcommand per analysis: inspect and transduce automata, report
structure invariants, reduce, predict and verify prime-subsequence
frequencies, measure Moebius correlations and windowed Moebius sums,
fit Fourier decay, and count truncation violations.  Every command
prints a short human summary to stdout and emits a JSON report: into
--out DIR when given (plus CSV for the plottable series), otherwise
appended to stdout.  Exit codes: 0 all requested checks passed, 1 a
requested invariant failed, 2 bad input or a cap violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

BUNDLED = (
    "thue_morse",
    "rudin_shapiro",
    "five_state",
    "six_state",
    "mod3_residue",
    "base3_nonsync",
)


class CliError(Exception):
    pass


def _resolve(name: str) -> str:
    if os.path.exists(name):
        return name
    stem = name[:-5] if name.endswith(".json") else name
    if stem in BUNDLED:
        from importlib import resources

        return str(resources.files("autperm").joinpath("examples", stem + ".json"))
    raise CliError(
        "no such file or bundled example: %s (bundled: %s)"
        % (name, ", ".join(BUNDLED))
    )


def _load(args):
    from .automaton import load_automaton

    a = load_automaton(_resolve(args.file))
    if getattr(args, "component", None) is not None:
        a = _restrict_component(a, args.component)
    return a


def _restrict_component(a, spec: str):
    from .automaton import scc_decompose

    finals = scc_decompose(a).final_components()
    comp = None
    if spec.lstrip("-").isdigit():
        i = int(spec)
        if not 0 <= i < len(finals):
            raise CliError(
                "component index %d out of range (%d final components)"
                % (i, len(finals))
            )
        comp = finals[i]
    else:
        if spec not in a.state_index:
            raise CliError("no state named %r" % spec)
        want = a.idx(spec)
        for c in finals:
            if want in c:
                comp = c
                break
        if comp is None:
            raise CliError("state %r lies in no final component" % spec)
    # The restriction needs a start state; the least-indexed state of
    # the component keeps the choice deterministic.
    return a.restrict(comp, min(comp))


def _config_echo(args) -> dict:
    skip = {"func", "out", "threads"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        out[k] = v
    return out


def _emit(args, stem: str, doc: dict, lines: list[str], csv_spec=None) -> None:
    doc = {"command": stem, "config": _config_echo(args), **doc}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    for line in lines:
        print(line)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, stem + ".json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print("wrote %s" % path)
        if csv_spec is not None:
            header, rows = csv_spec
            cpath = os.path.join(args.out, stem + ".csv")
            with open(cpath, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                w.writerows(rows)
            print("wrote %s" % cpath)
    else:
        print()
        sys.stdout.write(text)


def _perm_str(g) -> str:
    from .perms import cycle_notation

    return cycle_notation(g)


def _pj(g) -> list[int]:
    return list(g)


# ---------------------------------------------------------------- inspect


def cmd_inspect(args) -> int:
    from .automaton import find_sync_word, scc_decompose, sequence_term

    a = _load(args)
    rep = scc_decompose(a)
    sync = find_sync_word(a)
    labels = a.labels()
    sep = "" if all(len(b) == 1 for b in labels) else " "
    prefix = sep.join(sequence_term(a, n) for n in range(60))

    lines = [
        "k: %d" % a.k,
        "states (%d): %s" % (a.n, " ".join(a.states)),
        "initial: %s" % a.states[a.initial],
        "output labels: %s" % " ".join(labels),
    ]
    for c, fin, per in zip(rep.components, rep.final_flags, rep.periods):
        lines.append(
            "scc {%s}: %s, period %d"
            % (" ".join(a.states[i] for i in c), "final" if fin else "transient", per)
        )
    lines.append(
        "sync word: %s"
        % ("none" if sync is None
           else "".join(map(str, sync)) if sync else "(empty)")
    )
    lines.append("prefix[0:60]: %s" % prefix)

    doc = {
        "k": a.k,
        "states": list(a.states),
        "initial": a.states[a.initial],
        "output": {s: a.output[i] for i, s in enumerate(a.states)},
        "sccs": [
            {
                "states": [a.states[i] for i in c],
                "final": bool(f),
                "period": p,
            }
            for c, f, p in zip(rep.components, rep.final_flags, rep.periods)
        ],
        "sync_word": None if sync is None else list(sync),
        "prefix": prefix,
        "separator": sep,
    }
    _emit(args, "inspect", doc, lines)
    return 0


# -------------------------------------------------------------- transduce


ORACLE_LIMIT = 10**4


def cmd_transduce(args) -> int:
    import numpy as np

    from .numbertheory import batch_states
    from .transducer import (
        build_naturally_induced,
        reconstruct_many,
        transducer_to_doc,
        verify_induced,
    )

    a = _load(args)
    t = build_naturally_induced(a)
    report = verify_induced(t)
    ns = np.arange(ORACLE_LIMIT)
    got = reconstruct_many(t, ns)
    want = [a.output[s] for s in batch_states(a, ns)]
    mismatches = sum(1 for x, y in zip(got, want) if x != y)

    lines = [
        "transducer states: %d (width %d), weight group order %s"
        % (t.n, t.width, report.group_order),
        "property checks: %s" % ("all ok" if report.ok() else "FAILED"),
        "reconstruction oracle n < %d: %d mismatches" % (ORACLE_LIMIT, mismatches),
    ]
    for q in range(t.n):
        lines.append(
            "  state %d = (%s): %s"
            % (
                q,
                ",".join(t.state_names(q)),
                "  ".join(
                    "%d|%s -> %d" % (d, _perm_str(t.lam[q][d]), t.delta[q][d])
                    for d in range(t.k)
                ),
            )
        )

    doc = {
        "transducer": transducer_to_doc(t),
        "checks": report.as_dict(),
        "oracle_limit": ORACLE_LIMIT,
        "oracle_mismatches": mismatches,
    }
    _emit(args, "transduce", doc, lines)
    return 0 if report.ok() and mismatches == 0 else 1


# -------------------------------------------------------------- structure


def cmd_structure(args) -> int:
    from .structure import analyze, verify_structure
    from .transducer import transducer_to_doc

    a = _load(args)
    res = analyze(a)
    rep = res.report
    lines = [
        "d=%d  m0=%d  l0=%d  K=%d" % (rep.d, rep.m0, rep.l0, rep.K),
        "G (order %d): %s" % (len(rep.G), " ".join(_perm_str(g) for g in rep.G)),
        "g0=%s  d'=%d  k0=%d  m0'=%d" % (_perm_str(rep.g0), rep.d_prime, rep.k0, rep.m0_prime),
        "G0 (order %d): %s  g0'=%s"
        % (len(rep.G0), " ".join(_perm_str(g) for g in rep.G0), _perm_str(rep.g0_prime)),
        "s0: %s" % "  ".join(
            "%s:%d" % (_perm_str(g), v) for g, v in sorted(rep.s0.items())
        ),
        "full weight group order: %d" % rep.group_order,
        "d(q,q~) matrix: %s" % "; ".join(
            " ".join(str(x) for x in row) for row in rep.d_matrix
        ),
        "d''(q,q~) matrix: %s" % "; ".join(
            " ".join(str(x) for x in row) for row in rep.d_dprime
        ),
    ]
    doc = {"report": rep.as_dict(), "transducer": transducer_to_doc(res.transducer)}
    failed = False
    if args.verify:
        checks = verify_structure(res, args.verify)
        doc["verify_depth"] = args.verify
        doc["verify"] = checks
        failed = not all(checks.values())
        lines.append(
            "verification to depth %d: %s"
            % (
                args.verify,
                "all ok" if not failed
                else "FAILED " + " ".join(k for k, v in checks.items() if not v),
            )
        )
    _emit(args, "structure", doc, lines)
    return 1 if failed else 0


def cmd_reduce(args) -> int:
    from .automaton import automaton_to_doc
    from .structure import analyze, reduce_to_special

    a = _load(args)
    power, ared = reduce_to_special(a)
    res = analyze(ared)
    lines = [
        "reduction power: %d (one step reads %d base-%d digits)"
        % (power, power, a.k),
        "reduced automaton: %d states over base %d" % (ared.n, ared.k),
        "reduced invariants: d=%d k0=%d d'=%d"
        % (res.report.d, res.report.k0, res.report.d_prime),
    ]
    adoc = automaton_to_doc(ared)
    doc = {"power": power, "automaton": adoc, "reduced_report": res.report.as_dict()}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "reduced_automaton.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(adoc, indent=2, sort_keys=True) + "\n")
        lines.append("reduced automaton schema: %s" % path)
    _emit(args, "reduce", doc, lines)
    return 0


# -------------------------------------------------------------- primes


def _prediction_doc(pred) -> dict:
    return {
        "frequencies": {b: v for b, v in sorted(pred.freq.items())},
        "reduction_power": pred.reduction_power,
        "d_prime": pred.result.report.d_prime,
        "f_g": {
            str(_pj(g)): str(v) for g, v in sorted(pred.f_g.items())
        },
        "f_q": {str(q): v for q, v in sorted(pred.f_q.items())},
        "f_qb": {
            "%d:%s" % (q, b): v for (q, b), v in sorted(pred.f_qb.items())
        },
    }


def cmd_predict(args) -> int:
    from .numbertheory import predict_prime_frequencies

    a = _load(args)
    pred = predict_prime_frequencies(a)
    lines = ["predicted letter frequencies along the primes:"]
    for b, v in sorted(pred.freq.items()):
        lines.append("  %s: %s" % (b, v))
    lines.append("reduction power: %d" % pred.reduction_power)
    _emit(args, "predict-primes", {"prediction": _prediction_doc(pred)}, lines)
    return 0


def cmd_verify(args) -> int:
    from .numbertheory import empirical_prime_frequencies, predict_prime_frequencies

    a = _load(args)
    emp = empirical_prime_frequencies(
        a, args.limit, lo=args.lo, modulus=args.mod, residue=args.res
    )
    pred = None
    pred_error = None
    try:
        pred = predict_prime_frequencies(a)
    except ValueError as exc:
        pred_error = str(exc)

    lines = [
        "primes in [%d, %d]%s: %d"
        % (
            args.lo,
            args.limit,
            "" if args.mod is None else " with p = %d mod %d" % (args.res, args.mod),
            emp.count,
        )
    ]
    doc: dict = {
        "count": emp.count,
        "empirical": {b: v for b, v in sorted(emp.frequencies.items())},
    }
    if emp.weight_distribution is not None:
        doc["weight_distribution"] = {
            str(_pj(g)): v for g, v in sorted(emp.weight_distribution.items())
        }
    worst = None
    if pred is not None:
        worst = max(
            abs(emp.frequencies[b] - pred.freq[b]) for b in pred.freq
        )
        doc["prediction"] = _prediction_doc(pred)
        doc["max_deviation"] = worst
        lines.append("label  empirical    predicted    |deviation|")
        for b in sorted(pred.freq):
            lines.append(
                "  %-4s %.9f  %.9f  %.3e"
                % (b, emp.frequencies[b], pred.freq[b], abs(emp.frequencies[b] - pred.freq[b]))
            )
    else:
        doc["prediction_error"] = pred_error
        for b, v in sorted(emp.frequencies.items()):
            lines.append("  %s: %.9f" % (b, v))
        lines.append("no prediction: %s" % pred_error)

    status = 0
    if args.tol is not None:
        if worst is None:
            raise CliError("--tol given but no prediction is available")
        status = 0 if worst <= args.tol else 1
        lines.append(
            "tolerance %.3e: %s" % (args.tol, "ok" if status == 0 else "EXCEEDED")
        )
    _emit(args, "verify-primes", doc, lines)
    return status


# -------------------------------------------------------------- moebius


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise CliError("expected a comma-separated list of integers: %r" % text)


def cmd_mobius(args) -> int:
    from .numbertheory import mobius_correlation, sieve

    a = _load(args)
    shifts = _parse_ints(args.shifts)
    checkpoints = _parse_ints(args.checkpoints) if args.checkpoints else []
    tables = sieve(args.limit)
    per_shift = {}
    rows = []
    worst = 0.0
    for r in shifts:
        series = mobius_correlation(a, args.limit, r, checkpoints, tables)
        entries = []
        for mc in series:
            adjusted = {b: mc.adjusted(b) for b in sorted(mc.label_sums)}
            entries.append(
                {
                    "limit": mc.limit,
                    "mertens": mc.mertens,
                    "label_sums": dict(sorted(mc.label_sums.items())),
                    "label_counts": dict(sorted(mc.label_counts.items())),
                    "adjusted": adjusted,
                }
            )
            for b, v in adjusted.items():
                rows.append((r, mc.limit, b, "%.12e" % v))
        final = entries[-1]
        per_shift[str(r)] = entries
        m = max(abs(v) for v in final["adjusted"].values())
        worst = max(worst, m)
    lines = ["max |adjusted correlation| at N=%d over shifts %s: %.6e"
             % (args.limit, shifts, worst)]
    doc = {"shifts": per_shift, "max_adjusted": worst}
    status = 0
    if args.tol is not None:
        status = 0 if worst <= args.tol else 1
        lines.append(
            "tolerance %.3e: %s" % (args.tol, "ok" if status == 0 else "EXCEEDED")
        )
    _emit(args, "mobius", doc, lines,
          csv_spec=(("shift", "limit", "label", "adjusted"), rows))
    return status


def cmd_windowed_mobius(args) -> int:
    from .numbertheory import windowed_mobius_sum

    a = _load(args)
    ws = windowed_mobius_sum(
        a, args.limit, args.lambda1, args.lambda2, args.b, args.m, args.r
    )
    lines = [
        "terms: %d of %d (window b=%d over %d top digits, m=%d mod k^%d)"
        % (ws.terms, ws.limit, ws.b, ws.lam1, ws.m, ws.lam2),
        "weight-vector norm: %.6e   pair norm: %.6e"
        % (ws.norm, ws.pair_norm),
    ]
    doc = {
        "limit": ws.limit,
        "nu": ws.nu,
        "terms": ws.terms,
        "weight_vector": {str(_pj(g)): v for g, v in sorted(ws.weight_vector.items())},
        "pair_sums": {
            "%s@%d" % (_pj(g), q): v for (g, q), v in sorted(ws.pair_sums.items())
        },
        "label_sums": dict(sorted(ws.label_sums.items())),
        "norm": ws.norm,
        "pair_norm": ws.pair_norm,
    }
    _emit(args, "windowed-mobius", doc, lines)
    return 0


# -------------------------------------------------------------- fourier


def _parse_lambdas(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise CliError("bad level range: %r" % text)
    return _parse_ints(text)


def _build_rep(res, spec: str):
    from .harmonic import (
        regular_indicator,
        sign_character,
        value_class_character,
    )

    if spec == "regular":
        return regular_indicator(res)
    if spec == "char":
        return sign_character(res)
    if spec.startswith("dl:"):
        try:
            ell = int(spec[3:])
        except ValueError:
            raise CliError("bad representation spec: %r" % spec)
        return value_class_character(res, ell)
    raise CliError("representation must be regular, char, or dl:N")


def cmd_fourier(args) -> int:
    from .harmonic import decay_fit
    from .structure import analyze

    a = _load(args)
    res = analyze(a)
    rep = _build_rep(res, args.rep)
    fit = decay_fit(
        res.transducer,
        rep,
        _parse_lambdas(getattr(args, "lambda")),
        grid_size=args.grid,
        alpha=args.alpha,
        r=args.r,
        refine=not args.no_refine,
    )
    lines = [
        "levels %s, grid %d, representation %s"
        % (list(fit.lambdas), fit.grid_size, args.rep),
        "eta_hat = %.4f   r2 = %.5f   (fit over levels >= %d)"
        % (fit.eta_hat, fit.r2, fit.fit_lambdas[0]),
    ]
    doc = {
        "lambdas": list(fit.lambdas),
        "sup_norms": list(fit.sup_norms),
        "eta_hat": fit.eta_hat,
        "r2": fit.r2,
        "fit_lambdas": list(fit.fit_lambdas),
        "intercept": fit.intercept,
        "grid_size": fit.grid_size,
        "kind": fit.kind,
    }
    rows = [(lam, "%.12e" % s) for lam, s in zip(fit.lambdas, fit.sup_norms)]
    _emit(args, "fourier", doc, lines, csv_spec=(("lambda", "sup_norm"), rows))
    return 0


def cmd_carry(args) -> int:
    from .harmonic import carry_eta, carry_violation_count
    from .structure import analyze

    a = _load(args)
    t = analyze(a).transducer
    eta = carry_eta(t)
    lam = getattr(args, "lambda")
    rhos = [args.rho] if args.rho is not None else list(range(lam))
    counts = [carry_violation_count(t, lam, args.alpha, rho, args.r) for rho in rhos]
    bounds = [float(t.k) ** (lam - eta * rho) for rho in rhos]
    fit_rhos = [rho for rho in rhos if rho <= lam / 2]
    cfit = max(
        (c / b for rho, c, b in zip(rhos, counts, bounds) if rho in fit_rhos),
        default=1.0,
    )
    ok = all(c <= cfit * b * (1 + 1e-9) for c, b in zip(counts, bounds))
    lines = ["eta = %.4f, lambda=%d alpha=%d" % (eta, lam, args.alpha)]
    for rho, c, b in zip(rhos, counts, bounds):
        lines.append("  rho=%-3d violations=%-8d bound C*k^(lam-eta*rho)=%.1f"
                     % (rho, c, cfit * b))
    lines.append("C fitted on rho <= lam/2: %.4f; bound %s"
                 % (cfit, "holds for all rho" if ok else "VIOLATED"))
    doc = {
        "eta": eta,
        "lambda": lam,
        "alpha": args.alpha,
        "r": args.r,
        "rhos": rhos,
        "counts": counts,
        "c_fitted": cfit,
        "bound_holds": ok,
    }
    rows = [(rho, c, "%.6e" % (cfit * b)) for rho, c, b in zip(rhos, counts, bounds)]
    _emit(args, "carry", doc, lines, csv_spec=(("rho", "violations", "bound"), rows))
    if args.check:
        return 0 if ok else 1
    return 0


def cmd_examples(args) -> int:
    from .automaton import is_strongly_connected, load_automaton

    lines = []
    entries = []
    for name in BUNDLED:
        a = load_automaton(_resolve(name))
        sc = is_strongly_connected(a)
        lines.append(
            "%-14s k=%d  states=%d  labels=%s  %s"
            % (name, a.k, a.n, ",".join(a.labels()),
               "strongly connected" if sc else "not strongly connected")
        )
        entries.append(
            {
                "name": name,
                "k": a.k,
                "states": a.n,
                "labels": a.labels(),
                "strongly_connected": sc,
            }
        )
    _emit(args, "examples", {"examples": entries}, lines)
    return 0


# -------------------------------------------------------------- plumbing


def _apply_threads(threads: int | None) -> None:
    if not threads:
        return
    for var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ[var] = str(threads)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="autperm",
        description="Permutation-transducer analysis of automatic sequences.",
    )
    p.add_argument("--out", help="directory for JSON/CSV reports")
    p.add_argument("--threads", type=int, help="worker thread hint (BLAS pools)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, **kw):
        q = sub.add_parser(name, **kw)
        q.set_defaults(func=fn)
        return q

    q = add("inspect", cmd_inspect, help="print automaton facts")
    q.add_argument("file")
    q.add_argument("--component", help="restrict to a final component (index or state)")

    q = add("transduce", cmd_transduce, help="build and check the transducer")
    q.add_argument("file")
    q.add_argument("--component", help="restrict to a final component (index or state)")

    q = add("structure", cmd_structure, help="normalized invariants")
    q.add_argument("file")
    q.add_argument("--component", help="restrict to a final component (index or state)")
    q.add_argument("--verify", type=int, metavar="DEPTH",
                   help="re-derive invariants by word enumeration up to DEPTH")

    q = add("reduce", cmd_reduce, help="power automaton with d=k0=1 components")
    q.add_argument("file")

    q = add("predict-primes", cmd_predict, help="predicted prime-subsequence frequencies")
    q.add_argument("file")

    q = add("verify-primes", cmd_verify, help="sieve frequencies vs prediction")
    q.add_argument("file")
    q.add_argument("--limit", type=int, required=True)
    q.add_argument("--lo", type=int, default=0)
    q.add_argument("--mod", type=int)
    q.add_argument("--res", type=int)
    q.add_argument("--tol", type=float)

    q = add("mobius", cmd_mobius, help="Moebius correlation sums")
    q.add_argument("file")
    q.add_argument("--limit", type=int, required=True)
    q.add_argument("--shifts", default="0")
    q.add_argument("--checkpoints", help="extra partial limits, comma separated")
    q.add_argument("--tol", type=float)

    q = add("windowed-mobius", cmd_windowed_mobius, help="digit-window Moebius sums")
    q.add_argument("file")
    q.add_argument("--limit", type=int, required=True)
    q.add_argument("--lambda1", type=int, required=True)
    q.add_argument("--lambda2", type=int, required=True)
    q.add_argument("--b", type=int, default=0)
    q.add_argument("--m", type=int, default=0)
    q.add_argument("--r", type=int, default=0)

    q = add("fourier", cmd_fourier, help="decay of weight Fourier averages")
    q.add_argument("file")
    q.add_argument("--rep", default="regular",
                   help="regular, char (permutation sign), or dl:N")
    q.add_argument("--lambda", default="8..20", help="levels, e.g. 8..20 or 8,10,12")
    q.add_argument("--grid", type=int, default=4096)
    q.add_argument("--alpha", type=int, default=0)
    q.add_argument("--r", type=int, default=0)
    q.add_argument("--no-refine", action="store_true")

    q = add("carry", cmd_carry, help="digit-truncation violation counts")
    q.add_argument("file")
    q.add_argument("--lambda", type=int, required=True)
    q.add_argument("--alpha", type=int, default=2)
    q.add_argument("--rho", type=int, help="single rho (default: sweep all rho < lambda)")
    q.add_argument("--r", type=int, default=0)
    q.add_argument("--check", action="store_true",
                   help="exit 1 when the fitted bound is violated")

    q = add("examples", cmd_examples, help="list bundled automata")

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_threads(args.threads)
    try:
        return args.func(args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
