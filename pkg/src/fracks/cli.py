"""Command-line front end.

    fracks simulate   <config>   0 OK, 2 BLOWUP_DETECTED, 3 DT_UNDERFLOW
    fracks certify    <config>   0 modulus kept at every monitored time, 4 otherwise
    fracks correspond <config>   0 round trip within correspond_tol, 5 otherwise
    fracks decay      <config>   0 rate criterion met, 6 otherwise
    fracks sweep      <config>   0 sweep written
    fracks validate              0 all operator self-checks pass, 1 otherwise

Usage and configuration errors exit 64, unreadable or unwritable files 74.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace

from .config import ConfigError, RunConfig, load_config
from .correspondence import primitive_datum, roundtrip_error
from .dynamics import Model, State
from .experiments import (InequalityMonitor, run_certificate_experiment,
                          run_decay_experiment, run_phase_sweep)
from .output import (OutputError, write_certificate, write_plot, write_series,
                     write_snapshot, write_sweep)
from .report import Status
from .selftest import run_selftest
from .timestepper import integrate

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BLOWUP = 2
EXIT_UNDERFLOW = 3
EXIT_CERT = 4
EXIT_CORRESPOND = 5
EXIT_DECAY = 6
EXIT_USAGE = 64
EXIT_IO = 74

log = logging.getLogger("fracks")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fracks", description="Critical fractional Keller-Segel simulator.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, help_ in (("simulate", "integrate the configured model"),
                        ("certify", "build and scan the modulus certificate"),
                        ("correspond", "Keller-Segel vs Burgers round trip"),
                        ("decay", "fit late-time decay rates"),
                        ("sweep", "(alpha, amplitude) phase sweep")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="key = value configuration file")
    sub.add_parser("validate", help="operator self-test")
    return p


def _finite_or_text(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _write_outputs(cfg: RunConfig, report):
    if cfg.series_csv:
        write_series(report, cfg.series_csv)
    if cfg.snapshot_json and report.final_state is not None:
        write_snapshot(report.final_state, cfg.snapshot_json)
    if cfg.plot_svg:
        write_plot(report, cfg.plot_svg)


def initial_state(cfg: RunConfig) -> State:
    """Density for Keller-Segel, its zero-mean primitive for the reduced models."""
    p = cfg.params()
    u0 = cfg.initial_density()
    if p.model is Model.KELLER_SEGEL:
        return State(u0, 0.0)
    return State(primitive_datum(u0, p), 0.0)


def cmd_simulate(cfg: RunConfig) -> int:
    report = integrate(initial_state(cfg), cfg.params(), cfg.stepper(),
                       monitors=[InequalityMonitor()], config_echo=cfg.echo())
    _write_outputs(cfg, report)
    print(f"status={report.status.value} t={report.t_terminal:.6g} "
          f"steps={report.steps} max_grad={report.max_grad:.6g}")
    return {Status.OK: EXIT_OK, Status.BLOWUP_DETECTED: EXIT_BLOWUP,
            Status.DT_UNDERFLOW: EXIT_UNDERFLOW}[report.status]


def cmd_certify(cfg: RunConfig) -> int:
    p = cfg.params()
    try:
        cert, cond, report, mon = run_certificate_experiment(
            cfg.initial_density(), p, cfg.stepper(), t0=cfg.cert_time)
    except RuntimeError as exc:
        print(f"certify: {exc}", file=sys.stderr)
        return EXIT_CERT
    report.config_echo = cfg.echo()
    _write_outputs(cfg, report)
    deriv_ok = all(r.get("deriv_ok", True) for r in report.rows)
    margin = mon.min_margin
    ok = (cond.all_ok and report.status is Status.OK and deriv_ok
          and math.isfinite(margin) and margin > 0)
    if cfg.certificate_json:
        rec = {k: _finite_or_text(v) for k, v in cert.to_record().items()}
        rec.update({
            "distance": "geodesic",
            "t0": cfg.cert_time,
            "conditions_ok": cond.all_ok,
            "condition_margins": {k: _finite_or_text(v) for k, v in cond.margins.items()},
            "min_scan_margin": _finite_or_text(margin),
            "scan": [[t, _finite_or_text(m)] for t, m, _ in mon.margins],
            "derivative_bound_ok": deriv_ok,
            "status": report.status.value,
            "certified": ok,
        })
        write_certificate(rec, cfg.certificate_json)
    print(f"status={report.status.value} conditions_ok={cond.all_ok} "
          f"log_B={cert.log_B:.6g} min_margin={margin:.6g} certified={ok}")
    return EXIT_OK if ok else EXIT_CERT


def cmd_correspond(cfg: RunConfig) -> int:
    p = replace(cfg.params(), model=Model.KELLER_SEGEL)
    err = roundtrip_error(cfg.initial_density(), p, cfg.stepper())
    ok = err <= cfg.correspond_tol
    print(f"roundtrip_sup_error={err:.6e} tol={cfg.correspond_tol:.1e} ok={ok}")
    return EXIT_OK if ok else EXIT_CORRESPOND


def cmd_decay(cfg: RunConfig) -> int:
    p = replace(cfg.params(), model=Model.KELLER_SEGEL)
    try:
        rep = run_decay_experiment(cfg.initial_density(), p, cfg.stepper())
    except (RuntimeError, ValueError) as exc:
        print(f"decay: {exc}", file=sys.stderr)
        return EXIT_DECAY
    rep.report.config_echo = cfg.echo()
    _write_outputs(cfg, rep.report)
    ok = rep.passes(slack=cfg.decay_slack)
    print(f"rate_l2={rep.fitted_rate_l2:.6f} rate_W={rep.fitted_rate_w:.6f} "
          f"rate_sup={rep.fitted_rate_sup:.6f} rate_h_half={rep.fitted_rate_h_half:.6f} "
          f"theory={rep.theoretical_rate(0.0):.6f} r2={rep.r_squared:.6f} ok={ok}")
    return EXIT_OK if ok else EXIT_DECAY


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.sweep_alphas or not cfg.sweep_amplitudes:
        raise ConfigError("sweep_alphas", "sweep needs sweep_alphas and sweep_amplitudes")
    cells = run_phase_sweep(cfg.sweep_alphas, cfg.sweep_amplitudes, cfg.params(),
                            cfg.stepper(), n=cfg.n, L=cfg.half_length, workers=cfg.workers)
    if cfg.sweep_csv:
        write_sweep(cells, cfg.sweep_csv)
    for c in cells:
        flag = " review" if c.review else ""
        print(f"alpha={c.alpha_diff:g} A={c.amplitude:g} {c.classification.value} "
              f"max_grad={c.max_grad:.4g} t={c.t_terminal:.4g}{flag}")
    return EXIT_OK


def cmd_validate() -> int:
    checks, seconds = run_selftest()
    for c in checks:
        print(c.line())
    ok = all(c.ok for c in checks)
    print(f"{'ok' if ok else 'FAILED'} in {seconds:.2f} s")
    return EXIT_OK if ok else EXIT_FAIL


_COMMANDS = {"simulate": cmd_simulate, "certify": cmd_certify, "correspond": cmd_correspond,
             "decay": cmd_decay, "sweep": cmd_sweep}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate":
        return cmd_validate()
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        print(parser.format_usage(), end="", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(cli_main())
