"""Machine-readable (JSON) and human-readable verdict reports.

Stable field names of the JSON encoding::

    command, critical_k, modes[], index_sets{}, verdicts{}, feedback{},
    spectrum{}, simulation{}, sweep{}, provenance{}

Non-finite floats are written as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__
from .feedback import FeedbackLaw, SpectrumReport
from .modes import Analysis, Decision

SIGN_CONVENTION = (
    "coefficients are <profile, phi_n>_H by direct integration; "
    "alternative conventions differ by a global sign, which never changes a verdict"
)

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _encode(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj


def _decode(obj):
    if isinstance(obj, str) and obj in _NONFINITE:
        return _NONFINITE[obj]
    if isinstance(obj, dict):
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


@dataclass
class Report:
    command: str
    modes: list[dict[str, Any]]
    index_sets: dict[str, Any]
    verdicts: dict[str, Any]
    critical_k: float
    feedback: dict[str, Any] | None = None
    spectrum: dict[str, Any] | None = None
    simulation: dict[str, Any] | None = None
    sweep: dict[str, Any] | None = None
    provenance: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return _encode(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Report":
        return cls(**_decode(data))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def decision_dict(d: Decision) -> dict[str, Any]:
    return {
        "status": d.status.value,
        "certainty": d.certainty.value,
        "witness": None if d.witness is None else d.witness.n,
        "witness_lambda": None if d.witness is None else d.witness.lam,
        "borderline": list(d.borderline),
        "up_to": d.up_to,
    }


def _flags(rec, unstable: bool) -> list[str]:
    flags = []
    if unstable:
        flags.append("unstable")
    if rec.in_K:
        flags.append("in_K")
    if rec.b_zero.borderline:
        flags.append("borderline_b")
    if rec.c_zero.borderline:
        flags.append("borderline_c")
    return flags


def analysis_report(command: str, analysis: Analysis, source=()) -> Report:
    s = analysis.summary
    modes = [
        {
            "n": r.n,
            "lambda": r.lam,
            "b": r.b,
            "c": r.c,
            "b_zero": r.b_zero.kind.value,
            "c_zero": r.c_zero.kind.value,
            "flags": _flags(r, r.lam >= 0),
        }
        for r in analysis.records
    ]
    periodic = None
    if s.periodic_K is not None:
        periodic = {"period": s.periodic_K.period, "residues": sorted(s.periodic_K.residues)}
    index_sets = {
        "window": s.window,
        "I": sorted(s.I),
        "U": sorted(s.U),
        "O": sorted(s.O),
        "K": sorted(s.K),
        "periodic_K": periodic,
    }
    v = analysis.verdict
    verdicts = {
        "output_stabilizable": decision_dict(v.output_stabilizable),
        "state_stabilizable": decision_dict(v.state_stabilizable),
        "approx_controllable": decision_dict(v.approx_controllable),
        "certainty": v.certainty.value,
    }
    provenance = {
        "tool": "modalstab",
        "version": __version__,
        "config": [[k, val] for k, val in source],
        "alpha": analysis.params.alpha,
        "k": analysis.params.k,
        "b_profile": analysis.b.describe(),
        "c_profile": analysis.c.describe(),
        "zero_rel_threshold": analysis.policy.rel,
        "sign_convention": SIGN_CONVENTION,
    }
    return Report(command, modes, index_sets, verdicts, analysis.critical_k, provenance=provenance)


def feedback_dict(law: FeedbackLaw, note: str | None = None) -> dict[str, Any]:
    return {
        "support": list(law.support),
        "gains": [[n, g] for n, g in law.gains.items()],
        "targets": [[n, t] for n, t in law.targets.items()],
        "note": note,
    }


def spectrum_dict(rep: SpectrumReport, N: int) -> dict[str, Any]:
    return {
        "truncation": N,
        "placed": list(rep.placed),
        "untouched_leading": list(rep.untouched[:8]),
        "max_real_part": rep.max_real_part,
        "residual": rep.residual,
    }


def render_text(report: Report) -> str:
    """Plain-text summary for terminals."""
    lines = [f"modalstab {report.command}"]
    prov = report.provenance
    lines.append(f"  alpha = {prov.get('alpha')!r}, k = {prov.get('k')!r}")
    lines.append(f"  b = {prov.get('b_profile')}, c = {prov.get('c_profile')}")
    idx = report.index_sets
    lines.append(f"  window N = {idx['window']}")
    shown = idx["K"][:12]
    more = " ..." if len(idx["K"]) > 12 else ""
    lines.append(f"  K within window = {shown}{more}")
    if idx["periodic_K"]:
        pk = idx["periodic_K"]
        lines.append(f"  K for all n: n mod {pk['period']} in {pk['residues']}")
    for name in ("output_stabilizable", "state_stabilizable", "approx_controllable"):
        d = report.verdicts[name]
        text = d["status"]
        if d["witness"] is not None:
            text += f" (witness n={d['witness']}, lambda={d['witness_lambda']:.10g})"
        if d["up_to"] is not None:
            text += f" (n <= {d['up_to']})"
        if d["borderline"]:
            text += f" borderline={d['borderline']}"
        lines.append(f"  {name}: {text} [{d['certainty']}]")
    lines.append(f"  critical_k = {report.critical_k:.12g}")
    lines.append("  mode table (first 8):")
    lines.append("      n        lambda_n               b_n               c_n  flags")
    for m in report.modes[:8]:
        lines.append(
            f"    {m['n']:3d} {m['lambda']:>13.6g} {m['b']:>17.10g} {m['c']:>17.10g}  "
            + ",".join(m["flags"])
        )
    if report.feedback is not None:
        fb = report.feedback
        lines.append(f"  feedback support = {fb['support']}")
        for n, g in fb["gains"]:
            lines.append(f"    f_{n} = {g:.12g}")
        if fb.get("note"):
            lines.append(f"    note: {fb['note']}")
    if report.spectrum is not None:
        sp = report.spectrum
        lines.append(f"  closed-loop placed poles = {sp['placed']}")
        lines.append(f"  spectrum residual = {sp['residual']:.3g}")
    if report.simulation is not None:
        for key in sorted(report.simulation):
            lines.append(f"  simulation.{key} = {report.simulation[key]}")
    if report.sweep is not None:
        for key in sorted(report.sweep):
            lines.append(f"  sweep.{key} = {report.sweep[key]}")
    lines.append(f"  note: {SIGN_CONVENTION}")
    return "\n".join(lines) + "\n"
