"""Command-line front end.

Subcommands: expect, verify, sweep, trace, qubit, control. Machine-readable
rows go to stdout (or --out); diagnostics and summaries go to stderr. Exit
codes: 0 success, 1 usage or validation error, 2 verification failure.
All output is byte-deterministic for a fixed invocation and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analytic, control, dephasing, montecarlo, sweeps, tables, verification
from .model import EvaluationPoint, TelegraphSource


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract reserves 2
    # for verification failures, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._fail(message))

    @staticmethod
    def _fail(message) -> int:
        print(f"error: {message}", file=sys.stderr)
        return 1


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="write rows to this path instead of stdout")


def _add_mc_flags(p: argparse.ArgumentParser, samples_default: int) -> None:
    p.add_argument("--samples", type=int, default=samples_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=4)


def _add_symmetric_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--t", type=float, required=True)


def _parse_source_triplet(text: str) -> TelegraphSource:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(
            f"source spec must be delta:tau_plus:tau_minus[:p_plus], got {text!r}"
        )
    values = [float(x) for x in parts]
    p_plus = values[3] if len(values) == 4 else 0.5
    return TelegraphSource(values[0], values[1], values[2], p_plus)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rtnkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    # expect -----------------------------------------------------------
    expect = sub.add_parser("expect", help="evaluate a closed-form expectation")
    esub = expect.add_subparsers(dest="expect_kind", required=True)

    e_sym = esub.add_parser("symmetric")
    _add_symmetric_source_flags(e_sym)
    _add_output_flags(e_sym)

    e_gen = esub.add_parser("general")
    e_gen.add_argument("--m", type=float, required=True)
    e_gen.add_argument("--delta", type=float, required=True)
    e_gen.add_argument("--tau-plus", type=float, required=True)
    e_gen.add_argument("--tau-minus", type=float, required=True)
    e_gen.add_argument("--t", type=float, required=True)
    e_gen.add_argument("--start", choices=analytic.START_POLICIES, default="mixed")
    e_gen.add_argument("--p-plus", type=float, default=0.5)
    _add_output_flags(e_gen)

    e_gauss = esub.add_parser("gaussian")
    e_gauss.add_argument("--m", type=float, required=True)
    e_gauss.add_argument("--sigma", type=float, required=True)
    _add_output_flags(e_gauss)

    e_multi = esub.add_parser("multi")
    e_multi.add_argument("--m", type=float, required=True)
    e_multi.add_argument("--t", type=float, required=True)
    e_multi.add_argument(
        "--source", action="append", required=True, metavar="D:TP:TM[:PP]",
        help="repeatable source spec delta:tau_plus:tau_minus[:p_plus]",
    )
    _add_output_flags(e_multi)

    e_approx = esub.add_parser("approx")
    e_approx.add_argument("--regime", choices=analytic.APPROX_REGIMES, required=True)
    _add_symmetric_source_flags(e_approx)
    _add_output_flags(e_approx)

    # verify -----------------------------------------------------------
    verify = sub.add_parser("verify", help="closed forms vs the sampling oracle")
    verify.add_argument("mode", choices=("symmetric", "general", "conditional"))
    _add_mc_flags(verify, samples_default=1_000_000)
    _add_output_flags(verify)

    # sweep ------------------------------------------------------------
    sweep = sub.add_parser("sweep", help="evaluate a JSON sweep spec")
    sweep.add_argument("--spec", required=True, help="path to the sweep document")
    sweep.add_argument("--samples", type=int, default=None, help="override mc.samples")
    sweep.add_argument("--seed", type=int, default=None, help="override mc.seed")
    sweep.add_argument("--workers", type=int, default=None, help="override mc.workers")
    _add_output_flags(sweep)

    # trace ------------------------------------------------------------
    trace = sub.add_parser("trace", help="sample one path as (time, y, theta) rows")
    trace.add_argument("--delta", type=float, required=True)
    trace.add_argument("--tau", type=float, default=None, help="symmetric dwell time")
    trace.add_argument("--tau-plus", type=float, default=None)
    trace.add_argument("--tau-minus", type=float, default=None)
    trace.add_argument("--p-plus", type=float, default=0.5)
    trace.add_argument("--t", type=float, required=True)
    trace.add_argument("--seed", type=int, default=0)
    _add_output_flags(trace)

    # qubit ------------------------------------------------------------
    qubit = sub.add_parser("qubit", help="two-qubit dephasing error probabilities")
    qsub = qubit.add_subparsers(dest="qubit_kind", required=True)

    q_rtn = qsub.add_parser("rtn")
    q_rtn.add_argument("--delta", type=float, required=True)
    q_rtn.add_argument("--tau", type=float, required=True)
    q_rtn.add_argument("--t", type=float, required=True)
    q_rtn.add_argument("--control-n", type=int, default=None)
    q_rtn.add_argument("--control-method", choices=("suppression", "waiting"), default="suppression")
    _add_output_flags(q_rtn)

    q_gauss = qsub.add_parser("gaussian")
    q_gauss.add_argument("--sigma", type=float, required=True)
    q_gauss.add_argument("--quartic", action="store_true", help="add quartic-expansion columns")
    _add_output_flags(q_gauss)

    # control ----------------------------------------------------------
    ctl = sub.add_parser("control", help="pulse-method expectations")
    csub = ctl.add_subparsers(dest="control_kind", required=True)

    c_wait = csub.add_parser("waiting")
    _add_symmetric_source_flags(c_wait)
    c_wait.add_argument("--n", type=int, required=True)
    c_wait.add_argument("--mode", choices=control.WAITING_MODES, default="exact")
    _add_output_flags(c_wait)

    c_sup = csub.add_parser("suppression")
    _add_symmetric_source_flags(c_sup)
    c_sup.add_argument("--n", type=int, required=True)
    c_sup.add_argument("--mode", choices=control.SUPPRESSION_MODES, default="exact_transfer")
    _add_output_flags(c_sup)

    return parser


# ---------------------------------------------------------------------------
# command bodies


def _emit(rows, fieldnames, args) -> None:
    tables.write_rows(rows, fieldnames, fmt=args.format, out=args.out)


def _cmd_expect(args) -> int:
    kind = args.expect_kind
    if kind == "symmetric":
        source = TelegraphSource.symmetric(args.delta, args.tau)
        value = analytic.cos_expectation_symmetric(source, EvaluationPoint(args.m, args.t))
        rows = [{"m": args.m, "t": args.t, "delta": args.delta, "tau": args.tau, "value": value}]
    elif kind == "general":
        source = TelegraphSource(args.delta, args.tau_plus, args.tau_minus, args.p_plus)
        v = analytic.char_fn_general(source, EvaluationPoint(args.m, args.t), start=args.start)
        rows = [
            {
                "m": args.m, "t": args.t, "delta": args.delta,
                "tau_plus": args.tau_plus, "tau_minus": args.tau_minus,
                "p_plus": args.p_plus, "start": args.start,
                "value_re": v.real, "value_im": v.imag,
            }
        ]
    elif kind == "gaussian":
        value = analytic.gaussian_cos_expectation(args.m, args.sigma)
        rows = [{"m": args.m, "sigma": args.sigma, "value": value}]
    elif kind == "multi":
        parsed = [_parse_source_triplet(s) for s in args.source]
        v = analytic.multi_source_char_fn(parsed, EvaluationPoint(args.m, args.t))
        rows = [{"m": args.m, "t": args.t, "n_sources": len(parsed),
                 "value_re": v.real, "value_im": v.imag}]
    else:  # approx
        source = TelegraphSource.symmetric(args.delta, args.tau)
        point = EvaluationPoint(args.m, args.t)
        rows = [
            {
                "m": args.m, "t": args.t, "delta": args.delta, "tau": args.tau,
                "regime": args.regime,
                "value": analytic.approx_cos_expectation(source, point, args.regime),
                "exact": analytic.cos_expectation_symmetric(source, point),
            }
        ]
    _emit(rows, list(rows[0].keys()), args)
    return 0


def _cmd_verify(args) -> int:
    runner = {
        "symmetric": verification.verify_symmetric,
        "general": verification.verify_general,
        "conditional": verification.verify_conditional,
    }[args.mode]
    rows, summary = runner(samples=args.samples, seed=args.seed, workers=args.workers)
    fieldnames = list(rows[0].keys())
    _emit(rows, fieldnames, args)
    status = "PASS" if summary.all_pass else "FAIL"
    print(
        f"verify {args.mode}: {status} "
        f"({summary.n_rows - summary.n_failed}/{summary.n_rows} rows pass, "
        f"worst |diff|/se = {summary.worst_ratio:.3f}, "
        f"{summary.n_skipped} infeasible)",
        file=sys.stderr,
    )
    return 0 if summary.all_pass else 2


def _cmd_sweep(args) -> int:
    spec = sweeps.SweepSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
    overrides = {"samples": args.samples, "seed": args.seed, "workers": args.workers}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        mc = dict(spec.mc or {})
        mc.update(overrides)
        spec = sweeps.SweepSpec(
            parameter=spec.parameter, grid_min=spec.grid_min, grid_max=spec.grid_max,
            count=spec.count, spacing=spec.spacing, formula=spec.formula,
            fixed=spec.fixed, mc=mc,
        )
    rows, fieldnames = sweeps.run_sweep(spec)
    _emit(rows, fieldnames, args)
    return 0


def _cmd_trace(args) -> int:
    if args.tau is not None:
        source = TelegraphSource(args.delta, args.tau, args.tau, args.p_plus)
    elif args.tau_plus is not None and args.tau_minus is not None:
        source = TelegraphSource(args.delta, args.tau_plus, args.tau_minus, args.p_plus)
    else:
        raise ValueError("trace needs --tau or both --tau-plus and --tau-minus")
    rng = montecarlo.worker_stream(args.seed, 0)
    path = montecarlo.sample_path(source, args.t, rng)
    rows = []
    theta = 0.0
    state = path.start_state
    prev = 0.0
    rows.append({"time": 0.0, "y": state * source.delta, "theta": 0.0})
    for ft in path.flip_times:
        theta += state * source.delta * (ft - prev)
        state = -state
        prev = ft
        rows.append({"time": ft, "y": state * source.delta, "theta": theta})
    theta += state * source.delta * (args.t - prev)
    rows.append({"time": args.t, "y": state * source.delta, "theta": theta})
    _emit(rows, ["time", "y", "theta"], args)
    return 0


def _cmd_qubit(args) -> int:
    if args.qubit_kind == "rtn":
        source = TelegraphSource.symmetric(args.delta, args.tau)
        if args.control_n is not None:
            probs = dephasing.probs_rtn_controlled(
                source, args.t, args.control_n, method=args.control_method
            )
        else:
            probs = dephasing.probs_rtn(source, args.t)
        row = {"delta": args.delta, "tau": args.tau, "t": args.t,
               "n0": probs.n0, "n1": probs.n1, "n2": probs.n2}
        if args.control_n is not None:
            row["control_n"] = args.control_n
            row["control_method"] = args.control_method
    else:
        probs = dephasing.probs_gaussian(args.sigma)
        row = {"sigma": args.sigma, "n0": probs.n0, "n1": probs.n1, "n2": probs.n2}
        if args.quartic:
            q = dephasing.probs_gaussian(args.sigma, quartic=True)
            row.update(n0_quartic=q.n0, n1_quartic=q.n1, n2_quartic=q.n2)
    _emit([row], list(row.keys()), args)
    return 0


def _cmd_control(args) -> int:
    source = TelegraphSource.symmetric(args.delta, args.tau)
    if args.control_kind == "waiting":
        value = control.waiting_method_expectation(source, args.m, args.t, args.n, mode=args.mode)
        row = {"m": args.m, "t": args.t, "delta": args.delta, "tau": args.tau,
               "n": args.n, "mode": args.mode, "value": value, "error": 1.0 - value}
    else:
        v = control.suppression_method_expectation(source, args.m, args.t, args.n, mode=args.mode)
        row = {"m": args.m, "t": args.t, "delta": args.delta, "tau": args.tau,
               "n": args.n, "mode": args.mode,
               "value_re": v.real, "value_im": v.imag, "error": 1.0 - v.real}
    _emit([row], list(row.keys()), args)
    return 0


_COMMANDS = {
    "expect": _cmd_expect,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "trace": _cmd_trace,
    "qubit": _cmd_qubit,
    "control": _cmd_control,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, sweeps.SweepSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
