"""Command-line front end: ``steerqkd {rate,sweep,threshold,simulate,verify}``.

Exit codes: 0 success, 1 invalid arguments or out-of-range input, 2 domain
errors (no threshold in the bracket, failed oracle check).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from typing import Iterable, Sequence

from . import keyrates, oracle, simulator, thresholds
from .keyrates import NoiseParams

RATE_COLUMNS = {
    "dd": "rate_dd",
    "1sdi": "rate_1sdi",
    "di_chsh": "rate_di",
    "1sdi_nonps": "rate_nonps",
    "1sdi_ps": "rate_ps",
}
DEFAULT_VARIANTS = {"q": ("dd", "1sdi", "di_chsh"), "nu": ("1sdi_nonps", "1sdi_ps"),
                    "eta": ("1sdi_nonps", "1sdi_ps")}
SIM_COLUMNS = ["rounds", "nu", "eta", "seed", "postselect", "n_key_rounds", "key_fraction",
               "q_hat", "q_hat_stderr", "f3_hat", "f3_hat_stderr", "eta_hat", "rate_hat"]
VERIFY_COLUMNS = ["check", "trials", "max_violation", "tolerance", "pass", "worst_case"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """Six-decimal fixed point; ``None``/NaN become an empty field."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def emit_csv(rows: Iterable[Sequence], schema: Sequence[str], destination=None) -> None:
    """Write a header then ``rows`` as CSV with LF line endings.

    ``destination`` is a path, a text stream or ``None`` for standard output.
    Floats are written with six decimals so output is byte-stable.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema)
    for row in rows:
        if len(row) != len(schema):
            raise ValueError(f"row has {len(row)} fields, schema has {len(schema)}")
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="", encoding="ascii") as fh:
            fh.write(text)


def _workers() -> int | None:
    val = os.environ.get("STEERQKD_WORKERS")
    return int(val) if val else None


def _print_report(rep: keyrates.RateReport) -> None:
    print(f"variant  {rep.variant}")
    print(f"Q        {fmt(rep.q)}")
    if rep.chsh is not None:
        print(f"CHSH     {fmt(rep.chsh)}")
    elif not math.isnan(rep.f3):
        print(f"F3       {fmt(rep.f3)}")
    if rep.variant in ("1sdi_ps", "1sdi_nonps"):
        print(f"eta_A    {fmt(rep.eta_a)}")
    print(f"I_AB     {fmt(rep.i_ab)}")
    print(f"chi_E    {fmt(rep.chi_e)}")
    print(f"rate     {fmt(rep.rate)}")


def cmd_rate(args) -> int:
    v = args.variant
    if v in ("1sdi_ps", "1sdi_nonps"):
        if args.q is not None:
            raise UsageError(f"--q is not used by {v}; give --nu and --eta")
        rep = keyrates.evaluate(v, NoiseParams(args.nu, args.eta))
    else:
        q = args.q if args.q is not None else (1 - args.nu) / 2
        if v == "1sdi":
            f3 = args.f3 if args.f3 is not None else keyrates.SQRT3 * (1 - 2 * q)
            rep = keyrates.rate_1sdi(q, f3)
        elif v == "di_chsh":
            b = args.chsh if args.chsh is not None else keyrates.TSIRELSON * (1 - 2 * q)
            rep = keyrates.rate_di_chsh(q, b)
        else:
            rep = keyrates.rate_dd(q)
    _print_report(rep)
    return 0


def cmd_sweep(args) -> int:
    variants = tuple(args.variant) if args.variant else DEFAULT_VARIANTS[args.var]
    spec = thresholds.SweepSpec(args.var, args.start, args.stop, args.step,
                                NoiseParams(args.nu, args.eta), variants)
    table = thresholds.sweep(spec, workers=_workers())
    n = len(variants)
    rows = []
    for k in range(0, len(table), n):
        x = table[k][0]
        rows.append([x, 100 * x] + [rep.rate for _, rep in table[k:k + n]])
    schema = [args.var, f"{args.var}_pct"] + [RATE_COLUMNS[v] for v in variants]
    emit_csv(rows, schema, args.out)
    return 0


def cmd_threshold(args) -> int:
    if args.scan_nu:
        spec = thresholds.SweepSpec("nu", args.start, args.stop, args.step)
        rows = []
        for nu, nonps, ps in thresholds.eta_threshold_table(spec.grid()):
            rows.append([nu, nonps, ps,
                         None if nonps is None else 100 * nonps, None if ps is None else 100 * ps])
        emit_csv(rows, ["nu", "eta_threshold_nonps", "eta_threshold_ps",
                        "eta_threshold_nonps_pct", "eta_threshold_ps_pct"], args.out)
        return 0
    if args.variant in ("1sdi", "di_chsh", "dd"):
        res = thresholds.critical_qber(args.variant)
    else:
        res = thresholds.critical_eta(args.nu, "ps" if args.variant == "1sdi_ps" else "nonps")
    if args.out:
        emit_csv([[args.variant, res.variable, res.critical, res.bracket[0], res.bracket[1],
                   res.iterations, res.residual]],
                 ["variant", "variable", "critical", "lo", "hi", "iterations", "residual"], args.out)
    print(f"variant    {args.variant}")
    print(f"variable   {res.variable}")
    print(f"critical   {fmt(res.critical)}")
    print(f"percent    {100 * res.critical:.6f}")
    print(f"bracket    {res.bracket[0]:.12f} {res.bracket[1]:.12f}")
    print(f"iterations {res.iterations}")
    print(f"residual   {res.residual:.3e}")
    return 0


def cmd_simulate(args) -> int:
    cfg = simulator.ProtocolConfig(rounds=args.rounds, noise=NoiseParams(args.nu, args.eta),
                                   postselect=args.postselect, seed=args.seed)
    st = simulator.run_protocol(cfg, workers=_workers())
    row = [st.rounds, args.nu, args.eta, args.seed, args.postselect, st.n_key_rounds,
           st.key_fraction, st.q_hat, st.q_hat_stderr, st.f3_hat, st.f3_hat_stderr,
           st.eta_hat, st.rate_hat]
    if args.out:
        emit_csv([row], SIM_COLUMNS, args.out)
    for name, val in zip(SIM_COLUMNS, row):
        print(f"{name:<14}{fmt(val)}")
    return 0


def cmd_verify(args) -> int:
    reports = oracle.run_all(quick=args.quick)
    print(f"{'check':<28}{'trials':>8}  {'max_violation':>14}  {'tolerance':>10}  result")
    for r in reports:
        print(f"{r.name:<28}{r.trials:>8}  {r.max_violation:>14.6e}  {r.tolerance:>10.3e}  "
              f"{'PASS' if r.passed else 'FAIL'}")
    if args.out:
        emit_csv([[r.name, r.trials, f"{r.max_violation:.6e}", f"{r.tolerance:.3e}", r.passed,
                   r.worst_case] for r in reports], VERIFY_COLUMNS, args.out)
    return 0 if all(r.passed for r in reports) else 2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="steerqkd", description="Steering-certified QKD key rates, thresholds, "
                "simulation and oracle checks. All quantities are fractions, not percent.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def noise_flags(sp):
        sp.add_argument("--nu", type=float, default=1.0, help="source visibility")
        sp.add_argument("--eta", type=float, default=1.0,
                        help="Alice's detection efficiency")

    def out_flag(sp):
        sp.add_argument("--out", default=None, help="CSV output path; standard output if omitted")

    sp = sub.add_parser("rate", help="evaluate one key rate",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sp.add_argument("--variant", choices=keyrates.VARIANTS, default="1sdi", help="rate formula")
    sp.add_argument("--q", type=float, default=None,
                    help="QBER; derived from --nu on the Werner line if omitted")
    sp.add_argument("--f3", type=float, default=None,
                    help="observed CJWR value for 1sdi; Werner line sqrt(3)(1-2Q) if omitted")
    sp.add_argument("--chsh", type=float, default=None,
                    help="observed CHSH value for di_chsh; Werner line 2sqrt(2)(1-2Q) if omitted")
    noise_flags(sp)
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("sweep", help="tabulate rates over a grid as CSV",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sp.add_argument("--var", choices=("q", "nu", "eta"), default="q", help="swept variable")
    sp.add_argument("--start", type=float, default=0.0, help="first grid point")
    sp.add_argument("--stop", type=float, default=0.12, help="last grid point (inclusive)")
    sp.add_argument("--step", type=float, default=0.001, help="grid spacing")
    sp.add_argument("--variant", action="append", choices=keyrates.VARIANTS,
                    help="repeatable; if omitted q sweeps use dd, 1sdi and di_chsh, other sweeps nonps and ps")
    noise_flags(sp)
    out_flag(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("threshold", help="critical QBER or detection efficiency",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sp.add_argument("--variant", choices=keyrates.VARIANTS, default="1sdi",
                    help="1sdi/di_chsh/dd give a critical QBER; 1sdi_ps/1sdi_nonps a critical eta")
    sp.add_argument("--nu", type=float, default=1.0, help="visibility for eta thresholds")
    sp.add_argument("--scan-nu", action="store_true",
                    help="tabulate both eta thresholds over a visibility grid")
    sp.add_argument("--start", type=float, default=0.80, help="first visibility of the scan")
    sp.add_argument("--stop", type=float, default=1.0, help="last visibility of the scan")
    sp.add_argument("--step", type=float, default=0.005, help="visibility spacing of the scan")
    out_flag(sp)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("simulate", help="Monte Carlo run of the protocol",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sp.add_argument("--rounds", type=int, default=10**6, help="number of protocol rounds")
    sp.add_argument("--seed", type=int, default=42, help="generator seed")
    sp.add_argument("--postselect", action="store_true",
                    help="estimate the QBER only on rounds where Alice's detector clicked")
    noise_flags(sp)
    out_flag(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="run the brute-force oracle checks",
                        formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sp.add_argument("--quick", action="store_true", help="smaller grids and trial counts")
    out_flag(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except thresholds.ThresholdError as exc:
        print(f"steerqkd: {exc}", file=sys.stderr)
        return 2
    except (ValueError, UsageError) as exc:
        parser.print_usage(sys.stderr)
        print(f"steerqkd: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"steerqkd: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
