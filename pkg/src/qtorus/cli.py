"""Command-line front end.

    qtorus invariant [--tol 1e-15] [--json]
    qtorus brute --theta phi --m 8 --n-max 1000000
    qtorus classify --n 26 --m 5
    qtorus zeckendorf --n 100
    qtorus partitions --n 10
    qtorus converge --m-min 5 --m-max 12
    qtorus bounds

Exit codes: 0 success, 1 usage error, 2 precision or tolerance failure,
3 a computed interval check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction

from . import invariant as inv
from .errors import EmptySetError, NearPoleWarning, PrecisionError, QTorusError, ToleranceError
from .fibonacci import fibonacci, zeckendorf
from .membership import classify
from .numerics import DEFAULT_PRECISION, ApproxReal, NumericContext, golden_ratio, make_context
from .oracle import golden_threshold, j_eps
from .partitions import partitions_P, partitions_Q, rr_series_coeffs

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECISION = 2
EXIT_INTERVAL = 3

MEMBER_LIMIT = 50
CONVERGE_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    precision_bits: int = DEFAULT_PRECISION
    tol: float = inv.DEFAULT_TOL
    n_max: int = 100_000
    m: int | None = None
    theta: str = "phi"
    output_format: str = "text"


# ---------------------------------------------------------------------------
# output


class Report:
    """An ordered list of rows (dicts with the same keys) plus free notes."""

    def __init__(self, rows, notes=(), exit_code=EXIT_OK, title=""):
        self.rows = list(rows)
        self.notes = list(notes)
        self.exit_code = exit_code
        self.title = title

    def render(self, fmt: str) -> str:
        if fmt == "json":
            # numbers travel as decimal strings
            rows = [
                {k: str(v) if isinstance(v, int) and not isinstance(v, bool) else v for k, v in r.items()}
                for r in self.rows
            ]
            body = rows[0] if len(rows) == 1 else rows
            if self.notes:
                body = dict(body, notes=self.notes) if isinstance(body, dict) else {
                    "rows": body, "notes": self.notes
                }
            return json.dumps(body, indent=2) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
            w.writeheader()
            for row in self.rows:
                w.writerow({k: _plain(v) if isinstance(v, bool) else v for k, v in row.items()})
            return buf.getvalue()
        return self._text()

    def _text(self) -> str:
        lines = [self.title] if self.title else []
        if len(self.rows) == 1:
            row = self.rows[0]
            width = max(len(k) for k in row)
            lines += [f"{k.ljust(width)}  {_plain(v)}" for k, v in row.items()]
        else:
            keys = list(self.rows[0])
            cells = [keys] + [[_plain(r[k]) for k in keys] for r in self.rows]
            widths = [max(len(c[i]) for c in cells) for i in range(len(keys))]
            for c in cells:
                lines.append("  ".join(s.ljust(w) for s, w in zip(c, widths)).rstrip())
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _plain(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    return str(v)


def _num(x: ApproxReal) -> str:
    return x.to_decimal()


def _err(x: ApproxReal) -> str:
    return x.error_str()


def _with_err(row: dict, name: str, x: ApproxReal | None, fmt: str) -> None:
    """Value and error as separate keys for machine formats, joined for text."""
    if x is None:
        row[name] = "unbounded" if fmt == "text" else None
        if fmt != "text":
            row[f"err_{name}"] = None
    elif fmt == "text":
        row[name] = f"{_num(x)} ± {_err(x)}"
    else:
        row[name] = _num(x)
        row[f"err_{name}"] = _err(x)


# ---------------------------------------------------------------------------
# commands


def cmd_invariant(cfg: RunConfig, ctx: NumericContext) -> Report:
    rep = inv.j_qt(cfg.tol, ctx)
    row: dict = {}
    for name in ("G4", "G6", "H4", "H6"):
        _with_err(row, name, getattr(rep, name), cfg.output_format)
    _with_err(row, "J", rep.J_qt, cfg.output_format)
    _with_err(row, "j", rep.j_qt, cfg.output_format)
    row["in_theorem3_interval"] = rep.within_interval
    lo, hi = rep.theorem3_interval
    title = f"j^qt(phi) at {ctx.precision_bits} bits, tol(J) = {cfg.tol:g}; interval check {lo} < j < {hi}"
    code = EXIT_OK if rep.within_interval else EXIT_INTERVAL
    return Report([row], rep.notes, code, title if cfg.output_format == "text" else "")


def _theta_arg(text: str):
    if text.lower() == "phi":
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"theta must be 'phi' or a decimal number, got {text!r}")


def cmd_brute(cfg: RunConfig, ctx: NumericContext, eps_text: str | None) -> Report:
    notes = []
    theta = _theta_arg(cfg.theta)
    boundary = ()
    if cfg.m is not None and eps_text is not None:
        raise UsageError("give either --m or --eps, not both")
    if cfg.m is not None:
        if theta is not None:
            raise UsageError("--m sets eps = phi^-m and needs --theta phi")
        if cfg.m < 2:
            raise UsageError("--m must be >= 2")
        eps, boundary = golden_threshold(cfg.m, ctx)
    elif eps_text is not None:
        try:
            eps = ctx.exact(eps_text)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--eps must be a decimal number, got {eps_text!r}")
        if not eps.lower() > 0:
            raise UsageError("--eps must be > 0")
    else:
        raise UsageError("brute needs --m or --eps")
    if cfg.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    if theta is None:
        theta = golden_ratio(ctx)
    else:
        msg = (
            f"theta taken as the exact rational {cfg.theta}; B_eps depends on every digit of "
            "theta, so a truncated decimal describes a different set"
        )
        print(f"qtorus: warning: {msg}", file=sys.stderr)
        notes.append(msg)
    with warnings.catch_warnings():
        # reported below as notes instead
        warnings.simplefilter("ignore", NearPoleWarning)
        rep = j_eps(theta, eps, cfg.n_max, ctx, boundary=boundary)
    row: dict = {"theta": cfg.theta, "epsilon": rep.epsilon.to_decimal(20), "n_max": cfg.n_max}
    _with_err(row, "J_eps", rep.J_eps, cfg.output_format)
    _with_err(row, "j_eps", rep.j_eps, cfg.output_format)
    row["count"] = rep.count
    shown = rep.members[:MEMBER_LIMIT]
    row["members"] = " ".join(map(str, shown)) + (" ..." if rep.count > MEMBER_LIMIT else "")
    notes.append(rep.truncation_note)
    notes.extend(f"divergence warning: {w}" for w in rep.warnings)
    return Report([row], notes)


def cmd_classify(n: int, m: int, cfg: RunConfig) -> Report:
    try:
        v = classify(n, m)
    except ValueError as exc:
        raise UsageError(str(exc))
    row = {
        "n": n,
        "m": m,
        "zeckendorf": str(v.zeckendorf),
        "in_B": v.in_B,
        "case": v.case.value,
    }
    return Report([row])


def cmd_zeckendorf(n: int, cfg: RunConfig) -> Report:
    try:
        z = zeckendorf(n)
    except ValueError as exc:
        raise UsageError(str(exc))
    values = [fibonacci(i) for i in z]
    row = {
        "n": n,
        "indices": str(z),
        "values": " + ".join(map(str, values)),
    }
    return Report([row])


def cmd_partitions(n: int, cfg: RunConfig) -> Report:
    if n < 1:
        raise UsageError("--n must be >= 1")
    P = partitions_P(n)
    Q = partitions_Q(n)
    coeff = rr_series_coeffs(n)[n]
    row = {
        "n": n,
        "c_n": P.count,
        "series_coefficient": coeff,
        "agree": P.count == coeff,
        "P": " ".join(str(t) for t in P),
        "Q_count": Q.count,
        "Q": " ".join(str(t) for t in Q),
    }
    return Report([row], exit_code=EXIT_OK if P.count == coeff else EXIT_INTERVAL)


def cmd_converge(m_min: int, m_max: int, cfg: RunConfig, ctx: NumericContext) -> Report:
    if m_min < 3 or m_max < m_min:
        raise UsageError("need 3 <= --m-min <= --m-max")
    J = inv.J_qt(cfg.tol, ctx)
    rows = []
    ok = True
    for m in range(m_min, m_max + 1):
        Jb = inv.J_Bm(m, cfg.tol, ctx)
        C24 = inv.sandwich_constant(m, ctx) ** 24
        lo, hi = J / C24, J * C24
        inside = lo.upper() < Jb.lower() and Jb.upper() < hi.lower()
        ok = ok and inside
        row = {"m": m}
        _with_err(row, "J_Bm", Jb, cfg.output_format)
        row["sandwich_lo"] = _num(lo)
        row["sandwich_hi"] = _num(hi)
        row["gap"] = format(float(abs(Jb.value - J.value)), ".3e")
        row["inside"] = inside
        rows.append(row)
    notes = [f"J^qt(phi) = {J}; sandwich factor C_m^24 with C_m = (1 + phi^-2m) / (1 - phi^-2m)"]
    return Report(rows, notes, EXIT_OK if ok else EXIT_INTERVAL)


def cmd_bounds(cfg: RunConfig, ctx: NumericContext) -> Report:
    b = inv.theorem3_bounds(ctx)
    row: dict = {}
    for name in ("J_lo", "J_hi", "j_lo", "j_hi"):
        x = getattr(b, name)
        row[name] = x.to_decimal(min(20, x.significant_digits()))
    lo, hi = inv.THEOREM3_INTERVAL
    ok = b.interval_ok()
    row["interval"] = f"{lo} < j^qt < {hi}"
    row["interval_holds"] = ok
    return Report([row], exit_code=EXIT_OK if ok else EXIT_INTERVAL)


# ---------------------------------------------------------------------------
# argument handling


def _default_precision() -> int:
    env = os.environ.get("QT_PRECISION_BITS")
    if env is None:
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QT_PRECISION_BITS must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help="working precision in bits (default 256)")
    common.add_argument("--tol", type=float, default=None, help="absolute tolerance on J (default 1e-20, converge 1e-12)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--json", action="store_true", help="shorthand for --format json")

    p = _Parser(prog="qtorus", description="j-invariant of the quantum torus at the golden mean")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("invariant", parents=[common], help="G4, G6, H4, H6, J^qt and j^qt with error bounds")

    b = sub.add_parser("brute", parents=[common], help="scan B_eps(theta) and evaluate J_eps, j_eps")
    b.add_argument("--theta", default="phi")
    b.add_argument("--m", type=int, help="eps = phi^-m")
    b.add_argument("--eps", help="eps as a decimal")
    b.add_argument("--n-max", type=int, default=100_000)

    c = sub.add_parser("classify", parents=[common], help="is ||n phi|| < phi^-m, and why")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)

    z = sub.add_parser("zeckendorf", parents=[common], help="Zeckendorf form of n")
    z.add_argument("--n", type=int, required=True)

    q = sub.add_parser("partitions", parents=[common], help="gap-2 partitions of n")
    q.add_argument("--n", type=int, required=True)

    v = sub.add_parser("converge", parents=[common], help="J over B_m(phi) against J^qt")
    v.add_argument("--m-min", type=int, default=5)
    v.add_argument("--m-max", type=int, default=12)

    sub.add_parser("bounds", parents=[common], help="closed-form bracket for J^qt and j^qt")
    return p


def _config(args) -> RunConfig:
    fmt = "json" if args.json else args.format
    prec = args.prec if args.prec is not None else _default_precision()
    tol = args.tol
    if tol is None:
        tol = CONVERGE_TOL if args.command == "converge" else inv.DEFAULT_TOL
    if not tol > 0:
        raise UsageError("--tol must be > 0")
    return RunConfig(
        command=args.command,
        precision_bits=prec,
        tol=tol,
        n_max=getattr(args, "n_max", 100_000),
        m=getattr(args, "m", None),
        theta=getattr(args, "theta", "phi"),
        output_format=fmt,
    )


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        ctx = make_context(cfg.precision_bits)
        if args.command == "invariant":
            rep = cmd_invariant(cfg, ctx)
        elif args.command == "brute":
            rep = cmd_brute(cfg, ctx, args.eps)
        elif args.command == "classify":
            rep = cmd_classify(args.n, args.m, cfg)
        elif args.command == "zeckendorf":
            rep = cmd_zeckendorf(args.n, cfg)
        elif args.command == "partitions":
            rep = cmd_partitions(args.n, cfg)
        elif args.command == "converge":
            rep = cmd_converge(args.m_min, args.m_max, cfg, ctx)
        else:
            rep = cmd_bounds(cfg, ctx)
    except (UsageError, EmptySetError, ValueError) as exc:
        print(f"qtorus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, ToleranceError) as exc:
        print(f"qtorus: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except QTorusError as exc:
        print(f"qtorus: error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    out.write(rep.render(cfg.output_format))
    return rep.exit_code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
