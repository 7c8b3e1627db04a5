"""Command-line interface: ``gl3k {eval, shat, rfun, verify, experiment}``.

Exit codes: 0 success, 1 assertion failure, 2 invalid input, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .bilinear import (
    CoeffSeq,
    gcd_stratification,
    m_beta,
    random_sequence,
    theorem2_experiment,
    theorem3_experiment,
)
from .errors import CapExceeded, KloostermanError, OrderOverflow
from .gl3_sums import s_long_fast, s_long_naive
from .transforms import r_function, r_prime_function, shat_closed_form, shat_naive
from .verify import SCHEMA_VERSION, report_json, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class _Fail(Exception):
    """Raised for an assertion failure that should map to exit code 1."""


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _cap(text: str) -> int:
    value = float(text)
    if not math.isfinite(value) or value < 1:
        raise argparse.ArgumentTypeError(f"bad cap {text!r}")
    return int(value)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--cap", type=_cap, default=None, help="naive work cap (default 1e7)")
    p.add_argument("--seed", type=int, default=0, help="seed for numpy's PCG64 / random")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None)
    p.add_argument("--out", default=None, help="write output to FILE instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gl3k", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate S(m1, m2, n1, n2; D1, D2)")
    for name in ("m1", "m2", "n1", "n2", "D1", "D2"):
        p.add_argument(name, type=int)
    p.add_argument("--mode", choices=("naive", "fast", "both"), default="fast")

    p = sub.add_parser("shat", parents=[common], help="evaluate Shat(a, u, t, b; D1, D2)")
    for name in ("a", "u", "t", "b", "D1", "D2"):
        p.add_argument(name, type=int)
    p.add_argument("--closed-form", action="store_true",
                   help="also evaluate the prime-power closed form and compare")

    p = sub.add_parser("rfun", parents=[common], help="the majorant R(t, D1, D2)")
    for name in ("t", "D1", "D2"):
        p.add_argument(name, type=int)
    p.add_argument("--dual", action="store_true", help="compute R'(t, D1, D2) instead")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=("identities", "fourier", "rbound", "decomposition",
                                     "experiments", "all"))

    p = sub.add_parser("experiment", parents=[common], help="bound-ratio experiments")
    p.add_argument("name", choices=("theorem2", "theorem3", "strata", "large-sieve-ratio"))
    p.add_argument("--N", type=_int_list, default=None, help="comma list of N")
    p.add_argument("--X", type=_int_list, default=None, help="comma list with X1 = X2")
    p.add_argument("--X1", type=int, default=None)
    p.add_argument("--X2", type=int, default=None)
    p.add_argument("--H", type=_int_list, default=None,
                   help="comma list with H1 = H2 (default 1, X/2, X)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--alpha", default=None, help="CSV file index,re,im")
    p.add_argument("--beta", default=None, help="CSV file index,re,im")
    p.add_argument("--gamma", default=None, help="CSV file d1,d2,re,im")
    return parser


# ---------------------------------------------------------------------------
# output


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    return v


def _text(rows: list[dict]) -> str:
    return "".join(" ".join(f"{k}={_cell(v)}" for k, v in row.items()) + "\n" for row in rows)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n"


def _plain(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x))


def _render(args, kind: str, columns: list[str], rows: list[dict], default: str) -> str:
    fmt = args.format or default
    if fmt == "csv":
        return _csv(columns, rows)
    if fmt == "text":
        return _text(rows)
    return _json({"schema_version": SCHEMA_VERSION, "kind": kind, "rows": rows})


def _value(x) -> dict:
    z = x.to_complex()
    return {"exact": repr(x), "cyclotomic": x.to_dict(), "re": z.real, "im": z.imag}


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    a = (args.m1, args.m2, args.n1, args.n2, args.D1, args.D2)
    row = {"m1": a[0], "m2": a[1], "n1": a[2], "n2": a[3], "D1": a[4], "D2": a[5]}
    values = {}
    if args.mode in ("naive", "both"):
        values["naive"] = s_long_naive(*a, cap=args.cap)
    if args.mode in ("fast", "both"):
        values["fast"] = s_long_fast(*a, cap=args.cap)
    for k, v in values.items():
        row[k] = _value(v)
    agree = len({*values.values()}) == 1
    if args.mode == "both":
        row["agree"] = agree
    fmt = args.format or "text"
    if fmt == "text":
        lines = [f"{k}: {v!r}  ~ {_cell(v.to_complex())}" for k, v in values.items()]
        if args.mode == "both":
            lines.append("agreement" if agree else "DISAGREEMENT")
        _emit(args, "\n".join(lines) + "\n")
    else:
        flat = [{**{k: row[k] for k in ("m1", "m2", "n1", "n2", "D1", "D2")},
                 "mode": k, "exact": repr(v), "re": v.to_complex().real,
                 "im": v.to_complex().imag} for k, v in values.items()]
        out = _render(args, "eval", ["m1", "m2", "n1", "n2", "D1", "D2", "mode", "exact", "re", "im"],
                      flat if fmt == "csv" else [row], "text")
        _emit(args, out)
    if not agree:
        raise _Fail("naive and fast evaluators disagree")
    return EXIT_OK


def cmd_shat(args) -> int:
    a = (args.a, args.u, args.t, args.b, args.D1, args.D2)
    value = shat_naive(*a, cap=args.cap)
    row = {"a": a[0], "u": a[1], "t": a[2], "b": a[3], "D1": a[4], "D2": a[5],
           "exact": repr(value), "re": value.to_complex().real, "im": value.to_complex().imag}
    ok = True
    if args.closed_form:
        closed = shat_closed_form(*a)
        row["closed_form"] = "unevaluated" if closed is None else repr(closed)
        if closed is not None:
            ok = closed == value
            row["agree"] = ok
    cols = list(row)
    fmt = args.format or "text"
    if fmt == "text":
        text = f"Shat = {row['exact']}  ~ {_cell(value.to_complex())}\n"
        if args.closed_form:
            text += f"closed form: {row['closed_form']}"
            text += ("" if "agree" not in row else (" (agrees)" if ok else " (DISAGREES)")) + "\n"
        _emit(args, text)
    else:
        _emit(args, _render(args, "shat", cols, [row], "text"))
    if not ok:
        raise _Fail("closed form disagrees with the definition")
    return EXIT_OK


def cmd_rfun(args) -> int:
    try:
        if args.dual:
            r = r_prime_function(args.t, args.D1, args.D2, cap=args.cap)
        else:
            r = r_function(args.t, args.D1, args.D2, cap=args.cap)
    except AssertionError as exc:
        raise _Fail(str(exc)) from exc
    row = {"function": "Rprime" if r.dual else "R", "arg": r.t, "D1": r.D1, "D2": r.D2,
           "value": r.value}
    fmt = args.format or "text"
    if fmt == "text":
        name = "R'" if r.dual else "R"
        _emit(args, f"{name}({r.t}, {r.D1}, {r.D2}) = {r.value!r}\n")
    else:
        _emit(args, _render(args, "rfun", list(row), [row], "text"))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, cap=args.cap)
    fmt = args.format or "json"
    if fmt == "json":
        _emit(args, report_json(report))
    else:
        rows = [{"suite": s, "check": c["name"], "passed": c["passed"], "cases": c["cases"],
                 "counterexample": json.dumps(c["counterexample"])}
                for s, body in report["suites"].items() for c in body["checks"]]
        cols = ["suite", "check", "passed", "cases", "counterexample"]
        _emit(args, _csv(cols, rows) if fmt == "csv" else _text(rows))
    return EXIT_OK if report["passed"] else EXIT_FAIL


# experiment columns (fixed so that an empty grid still yields a header)
_T2_COLS = ["N", "X1", "X2", "trials", "max_ratio", "worst_trial", "kind", "lhs",
            "rhs_theorem2", "rhs_weil", "rhs_corollary1", "M_alpha", "M_beta",
            "weil_ratio", "corollary1_ratio", "large_sieve_ratio_beta"]
_T3_COLS = ["N", "X1", "X2", "H1", "H2", "trials", "max_ratio", "worst_trial", "kind", "lhs",
            "rhs_first", "rhs_second", "Mstar_alpha", "Mstar_beta", "degenerates_to_theorem2"]
_LS_COLS = ["N", "X1", "X2", "trials", "max_ratio", "M_beta", "norm_sq"]
_STRATA_COLS = ["stratum", "re", "im", "magnitude"]


def _grid(args) -> tuple[list[int], list[tuple[int, int]]]:
    Ns = args.N if args.N is not None else [4, 8, 16]
    if args.X is not None:
        Xs = [(x, x) for x in args.X]
    elif args.X1 is not None or args.X2 is not None:
        x1 = args.X1 if args.X1 is not None else args.X2
        x2 = args.X2 if args.X2 is not None else args.X1
        Xs = [(x1, x2)]
    else:
        Xs = [(x, x) for x in (4, 6, 8)]
    if any(n < 1 for n in Ns) or any(min(x) < 1 for x in Xs):
        raise ValueError("grid values must be positive")
    if args.trials < 1:
        raise ValueError("--trials must be positive")
    return sorted(Ns), sorted(Xs)


def _summarize(reports, base: dict) -> dict:
    worst = max(reports, key=lambda r: r.ratio)
    row = dict(base)
    row.update({"trials": len(reports), "max_ratio": worst.ratio,
                "worst_trial": worst.grid["trial"], "lhs": worst.lhs})
    row.update({f"rhs_{k}": v for k, v in worst.rhs_components.items()})
    row.update(worst.extra)
    return row


def _experiment_rows(args) -> tuple[list[str], list[dict], bool]:
    Ns, Xs = _grid(args)
    rows: list[dict] = []
    ok = True
    if args.name == "theorem2":
        for N in Ns:
            for X1, X2 in Xs:
                reps = theorem2_experiment(N, X1, X2, args.trials, args.seed, args.cap)
                rows.append(_summarize(reps, {"N": N, "X1": X1, "X2": X2}))
        return _T2_COLS, rows, all(math.isfinite(r["max_ratio"]) for r in rows)
    if args.name == "theorem3":
        for N in Ns:
            for X1, X2 in Xs:
                Hs = args.H if args.H is not None else sorted({1, min(X1, X2) // 2 or 1, min(X1, X2)})
                for H in Hs:
                    reps = theorem3_experiment(N, X1, X2, min(H, X1), min(H, X2),
                                               args.trials, args.seed, args.cap)
                    row = _summarize(reps, {"N": N, "X1": X1, "X2": X2,
                                            "H1": min(H, X1), "H2": min(H, X2)})
                    if "degenerates_to_theorem2" in row:
                        ok = ok and all(r.extra["degenerates_to_theorem2"] for r in reps)
                    rows.append(row)
        return _T3_COLS, rows, ok
    if args.name == "large-sieve-ratio":
        rng = np.random.default_rng(args.seed)
        for N in Ns:
            for X1, X2 in Xs:
                best = None
                for trial in range(args.trials):
                    beta = random_sequence(rng, N, "sign" if trial % 2 == 0 else "phase")
                    mb, nsq = m_beta(beta, X1, X2), beta.norm() ** 2
                    ratio = mb / ((X1**2 + N) * nsq)
                    if best is None or ratio > best[0]:
                        best = (ratio, mb, nsq)
                rows.append({"N": N, "X1": X1, "X2": X2, "trials": args.trials,
                             "max_ratio": best[0], "M_beta": best[1], "norm_sq": best[2]})
        return _LS_COLS, rows, True
    # strata
    N = Ns[0] if args.N is not None else 8
    X1 = args.X1 or (Xs[0][0] if args.X is not None else 6)
    X2 = args.X2 or (Xs[0][1] if args.X is not None else 6)
    rng = np.random.default_rng(args.seed)
    alpha = CoeffSeq.read_csv(args.alpha) if args.alpha else random_sequence(rng, N, "phase")
    beta = CoeffSeq.read_csv(args.beta) if args.beta else random_sequence(rng, N, "sign")
    if args.gamma:
        gamma = CoeffSeq.read_csv(args.gamma, is_gamma=True)
    else:
        gamma = CoeffSeq({(d1, d2): complex(np.exp(2j * np.pi * rng.random()))
                          for d1 in range(1, X1 + 1) for d2 in range(1, X2 + 1)},
                         (X1, X2), is_gamma=True)
    rep = gcd_stratification(alpha, beta, gamma, cap=args.cap)
    for name, v in rep["strata"].items():
        rows.append({"stratum": name, "re": v.real, "im": v.imag, "magnitude": abs(v)})
    t = rep["total"]
    rows.append({"stratum": "total", "re": t.real, "im": t.imag, "magnitude": abs(t)})
    ok = bool(rep["additive"] and rep["coprime_product_form_agrees"]
              and rep["equal_prime_table_agrees"])
    return _STRATA_COLS, rows, ok


def cmd_experiment(args) -> int:
    columns, rows, ok = _experiment_rows(args)
    _emit(args, _render(args, args.name, columns, rows, "csv"))
    if not ok:
        raise _Fail(f"{args.name}: consistency check failed")
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "shat": cmd_shat, "rfun": cmd_rfun,
            "verify": cmd_verify, "experiment": cmd_experiment}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CapExceeded, OrderOverflow) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (KloostermanError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
