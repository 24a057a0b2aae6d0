"""``modalstab`` command line: analyze, synthesize, simulate, sweep.

Exit status: 0 completed, 2 internal/numeric/config error, 3 verdict assertion
failure (``--assert-output-stabilizable``, or synthesis refused because the
state is not stabilizable and ``--best-effort`` was not given).
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ModeWeights, RunConfig, UnitMode, parse_config
from .errors import DomainError, ModalStabError, NotStateStabilizableError, SimulationDiverged
from .feedback import FeedbackLaw, closed_loop_spectrum, synthesize
from .modes import Analysis, Status, analyze, decide_output_stabilizability, default_window
from .coefficients import ThresholdPolicy
from .report import Report, analysis_report, feedback_dict, render_text, spectrum_dict
from .simulation import (
    ModalState,
    estimate_decay_rate,
    project_initial,
    simulate_closed_loop,
    simulate_open_loop,
    time_grid,
)
from .spectral import n_max_unstable

log = logging.getLogger("modalstab")

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_VERDICT = 3

BISECT_TOL = 1e-9


class VerdictFailure(Exception):
    """Carries the report of a run whose verdict assertion failed."""

    def __init__(self, report, message):
        super().__init__(message)
        self.report = report


def fmt(x: float) -> str:
    return f"{x:.17g}"


def run_analysis(cfg: RunConfig, window: int | None = None) -> Analysis:
    policy = ThresholdPolicy(rel=cfg.zero_rel_threshold)
    return analyze(cfg.params, cfg.b, cfg.c, window if window is not None else cfg.window, policy)


def cmd_analyze(cfg: RunConfig) -> Report:
    return analysis_report("analyze", run_analysis(cfg), cfg.source)


def law_from_gains(analysis: Analysis, gains: dict[int, float]) -> FeedbackLaw:
    """Wrap configured gains; their placed poles must be real and negative."""
    for n in gains:
        if n > analysis.summary.window or analysis.summary.record(n).b_zero.is_zero:
            raise DomainError(f"configured gain on mode {n} which has b_n = 0 or lies outside the window")
    support = sorted(gains)
    bs = np.array([analysis.summary.record(n).b for n in support])
    sub = FeedbackLaw(gains=gains, targets={n: -1.0 for n in support})
    lams = np.array([analysis.summary.record(n).lam for n in support])
    block = np.diag(lams) + np.outer(bs, sub.gain_vector(max(support))[np.array(support) - 1])
    poles = np.linalg.eigvals(block)
    if np.any(np.abs(poles.imag) > 1e-9 * np.maximum(1.0, np.abs(poles.real))) or np.any(poles.real >= 0):
        raise DomainError(f"configured gains place poles {poles.tolist()}, not all real and negative")
    # most unstable mode gets the most negative pole, as in the default policy
    order = sorted(support, key=lambda n: -analysis.summary.record(n).lam)
    placed = sorted(poles.real)
    return FeedbackLaw(gains=gains, targets=dict(zip(order, placed)))


def build_law(cfg: RunConfig, analysis: Analysis, best_effort: bool):
    if cfg.gains:
        return law_from_gains(analysis, cfg.gains), "gains taken from configuration"
    law = synthesize(analysis.params, analysis.records, cfg.targets, best_effort=best_effort)
    if law.empty:
        note = "already stable" if n_max_unstable(analysis.params) == 0 else "no reachable unstable modes"
    elif analysis.verdict.state_stabilizable.status is Status.NO:
        note = "best effort: unreachable unstable modes remain"
    else:
        note = None
    return law, note


def cmd_synthesize(cfg: RunConfig, best_effort: bool = False) -> Report:
    analysis = run_analysis(cfg)
    report = analysis_report("synthesize", analysis, cfg.source)
    try:
        law, note = build_law(cfg, analysis, best_effort)
    except NotStateStabilizableError as exc:
        report.feedback = {"support": [], "gains": [], "targets": [],
                           "note": f"refused: {exc}"}
        raise VerdictFailure(report, str(exc)) from None
    report.feedback = feedback_dict(law, note)
    bs = [r.b for r in analysis.records]
    cs = [r.c for r in analysis.records]
    report.spectrum = spectrum_dict(closed_loop_spectrum(analysis.params, law, bs, cs), len(bs))
    return report


def initial_state(cfg: RunConfig, N: int) -> ModalState:
    init = cfg.initial
    if init is None:
        m = min(8, N)
        a = np.zeros(N)
        a[:m] = 1.0 / np.sqrt(m)
        return ModalState(a)
    if isinstance(init, UnitMode):
        return ModalState.unit(init.n, N)
    if isinstance(init, ModeWeights):
        a = np.zeros(N)
        a[: len(init.weights)] = init.weights
        return ModalState(a)
    return project_initial(init, cfg.params, N)


def cmd_simulate(cfg: RunConfig, closed_loop: bool = False, best_effort: bool = False):
    """Returns ``(report, csv_text)``."""
    N = max(cfg.truncation, n_max_unstable(cfg.params))
    analysis = run_analysis(cfg, window=max(N, cfg.window or default_window(cfg.params)))
    report = analysis_report("simulate", analysis, cfg.source)
    bs = np.array([r.b for r in analysis.records[:N]])
    cs = np.array([r.c for r in analysis.records[:N]])
    x0 = initial_state(cfg, N)
    t = time_grid(cfg.t_final, cfg.dt)
    diverged = False
    if closed_loop:
        try:
            law, note = build_law(cfg, analysis, best_effort)
        except NotStateStabilizableError as exc:
            raise VerdictFailure(report, str(exc)) from None
        report.feedback = feedback_dict(law, note)
        report.spectrum = spectrum_dict(closed_loop_spectrum(cfg.params, law, bs, cs), N)
        try:
            traj = simulate_closed_loop(x0, cfg.params, bs, cs, law, t, N)
        except SimulationDiverged as exc:
            traj = exc.trajectory
            diverged = True
    else:
        traj = simulate_open_loop(x0, cfg.params, bs, cs, t)
    try:
        rate = estimate_decay_rate(traj)
        rate_note = None
    except ModalStabError as exc:
        rate = None
        rate_note = str(exc)
    report.simulation = {
        "closed_loop": closed_loop,
        "truncation": N,
        "t_final": cfg.t_final,
        "dt": cfg.dt,
        "samples": len(traj),
        "initial": "uniform(8)" if cfg.initial is None else cfg.initial.describe(),
        "diverged": diverged,
        "fitted_rate": rate,
        "fit_note": rate_note,
    }
    buf = io.StringIO()
    buf.write("t,y,u,state_norm\n")
    for row in zip(traj.times, traj.y, traj.u, traj.state_norm):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return report, buf.getvalue()


def cmd_sweep(cfg: RunConfig, k_min: float, k_max: float, steps: int, bisect: bool = False):
    """Returns ``(report, csv_text)``; rows are ordered by ``k``."""
    if not k_min < k_max:
        raise DomainError("sweep needs k_min < k_max")
    if steps < 2:
        raise DomainError("sweep needs steps >= 2")
    top = cfg.params.with_k(k_max)
    window = max(cfg.window or 0, default_window(top))
    base = run_analysis(cfg.with_k(k_max), window=window)
    ks = np.linspace(k_min, k_max, steps)

    def verdict(k):
        return decide_output_stabilizability(base.params.with_k(float(k)), base.summary)

    with ThreadPoolExecutor() as pool:
        decisions = list(pool.map(verdict, ks))

    buf = io.StringIO()
    buf.write("k,output_stabilizable,witness\n")
    for k, d in zip(ks, decisions):
        witness = "" if d.witness is None else str(d.witness.n)
        buf.write(f"{fmt(float(k))},{d.status.value},{witness}\n")

    bracket = None
    for i in range(steps - 1):
        if decisions[i].positive != decisions[i + 1].positive:
            bracket = [float(ks[i]), float(ks[i + 1])]
            break
    refined = None
    if bisect and bracket is not None:
        refined = bisect_flip(base, *bracket)
    report = analysis_report("sweep", base.at_k(cfg.k), cfg.source)
    report.sweep = {
        "k_min": float(k_min),
        "k_max": float(k_max),
        "steps": steps,
        "bracket": bracket,
        "bisected": refined,
        "bisect_tol": BISECT_TOL if bisect else None,
        "all_yes": all(d.positive for d in decisions),
    }
    return report, buf.getvalue()


def bisect_flip(analysis: Analysis, lo: float, hi: float, tol: float = BISECT_TOL) -> list[float]:
    """Shrink ``[lo, hi]`` around the output-verdict flip until ``hi - lo <= tol``."""
    def positive(k):
        return decide_output_stabilizability(analysis.params.with_k(k), analysis.summary).positive

    lo_pos = positive(lo)
    if lo_pos == positive(hi):
        raise DomainError("bracket does not straddle a verdict flip")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if positive(mid) == lo_pos:
            lo = mid
        else:
            hi = mid
    return [lo, hi]


def _write_outputs(out: str | None, report: Report, csv_name: str | None, csv_text: str | None):
    if out is None:
        if csv_text is not None:
            sys.stdout.write(csv_text)
            sys.stderr.write(render_text(report))
        else:
            sys.stdout.write(render_text(report))
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "report.json").write_text(report.to_json(), encoding="utf-8")
    if csv_text is not None:
        (d / csv_name).write_text(csv_text, encoding="utf-8")
    sys.stdout.write(render_text(report))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="run configuration file")
    common.add_argument("--out", metavar="DIR", help="write report.json (and CSV) into DIR")
    common.add_argument("--assert-output-stabilizable", action="store_true",
                        help="exit 3 when the output is not stabilizable")
    common.add_argument("--best-effort", action="store_true",
                        help="synthesize for reachable unstable modes even if some are unreachable")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="modalstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="mode table, index sets and verdicts")
    sub.add_parser("synthesize", parents=[common], help="modal feedback law and closed-loop spectrum")
    sim = sub.add_parser("simulate", parents=[common], help="trajectory CSV t,y,u,state_norm")
    sim.add_argument("--closed-loop", action="store_true")
    sw = sub.add_parser("sweep", parents=[common], help="output verdict over a grid of k")
    sw.add_argument("--k-min", required=True)
    sw.add_argument("--k-max", required=True)
    sw.add_argument("--steps", type=int, default=101)
    sw.add_argument("--bisect", action="store_true", help=f"refine the flip to {BISECT_TOL:g}")
    return parser


def main(argv=None) -> int:
    from .config import parse_k

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = parse_config(args.config)
        csv_name = csv_text = None
        if args.command == "analyze":
            report = cmd_analyze(cfg)
        elif args.command == "synthesize":
            report = cmd_synthesize(cfg, best_effort=args.best_effort)
        elif args.command == "simulate":
            report, csv_text = cmd_simulate(cfg, closed_loop=args.closed_loop,
                                            best_effort=args.best_effort)
            csv_name = "trajectory.csv"
        else:
            report, csv_text = cmd_sweep(cfg, parse_k(args.k_min), parse_k(args.k_max),
                                         args.steps, bisect=args.bisect)
            csv_name = "sweep.csv"
    except VerdictFailure as exc:
        _write_outputs(args.out, exc.report, None, None)
        print(f"modalstab: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (ModalStabError, ValueError) as exc:
        print(f"modalstab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001 - exit-code contract covers internal failures
        log.exception("internal error")
        print(f"modalstab: internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    _write_outputs(args.out, report, csv_name, csv_text)
    if args.assert_output_stabilizable and report.verdicts["output_stabilizable"]["status"] == "no":
        print("modalstab: output is not stabilizable "
              f"(witness n={report.verdicts['output_stabilizable']['witness']})", file=sys.stderr)
        return EXIT_VERDICT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
