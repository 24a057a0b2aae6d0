"""Run configuration: flat ``dotted.key = value`` text.

Grammar (one assignment per line, ``#`` starts a comment)::

    system.alpha = 0
    system.k = pi^2                      # also 5pi^2, 2.5*pi^2, -1, 1e-3
    profile.b = indicator(1/4, 3/4)      # or [1/4, 3/4]
    profile.c = tabulated(0:0, 0.5:1, 1:0)
    analysis.window = 64
    analysis.zero_rel_threshold = 1e-9
    feedback.targets = -1, -2
    feedback.gains = 1:-1.5707963267948966
    simulate.t_final = 8
    simulate.dt = 0.01
    simulate.truncation = 64
    simulate.initial = mode(2)           # or modes(1, 0.5, ...) or a profile

Rational endpoints are parsed exactly; unknown or repeated keys are errors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

from .errors import ConfigError, DomainError
from .profiles import Indicator, Profile, Tabulated, as_rational
from .spectral import PI2, SystemParams

KNOWN_KEYS = (
    "system.alpha",
    "system.k",
    "profile.b",
    "profile.c",
    "analysis.window",
    "analysis.zero_rel_threshold",
    "feedback.targets",
    "feedback.gains",
    "simulate.t_final",
    "simulate.dt",
    "simulate.truncation",
    "simulate.initial",
)
REQUIRED_KEYS = ("system.alpha", "system.k", "profile.b", "profile.c")

_NUMBER = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_K_RE = re.compile(
    rf"^\s*(?P<coef>{_NUMBER}(?:\s*/\s*\d+)?|[+-])?\s*\*?\s*pi\s*(?:\^|\*\*)\s*2\s*$"
)
_CALL_RE = re.compile(r"^\s*(?P<name>[a-z_]+)\s*\((?P<args>.*)\)\s*$")


@dataclass(frozen=True)
class UnitMode:
    n: int

    def describe(self) -> str:
        return f"mode({self.n})"


@dataclass(frozen=True)
class ModeWeights:
    weights: tuple[float, ...]

    def describe(self) -> str:
        return "modes(" + ", ".join(repr(w) for w in self.weights) + ")"


InitialSpec = Union[Indicator, Tabulated, UnitMode, ModeWeights]


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    k: float
    b: Profile
    c: Profile
    window: int | None = None
    zero_rel_threshold: float = 1e-9
    targets: tuple[float, ...] | None = None
    gains: dict[int, float] | None = None
    t_final: float = 8.0
    dt: float = 0.01
    truncation: int = 64
    initial: InitialSpec | None = None
    # raw "key = value" text in file order, for report provenance
    source: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    @property
    def params(self) -> SystemParams:
        return SystemParams(self.alpha, self.k)

    def with_k(self, k: float) -> "RunConfig":
        from dataclasses import replace

        return replace(self, k=float(k))


def parse_k(text: str) -> float:
    """Real number or a rational/decimal multiple of ``pi^2``."""
    s = text.strip()
    m = _K_RE.match(s)
    if m:
        coef = (m.group("coef") or "").replace(" ", "")
        if coef in ("", "+"):
            factor = 1.0
        elif coef == "-":
            factor = -1.0
        else:
            factor = float(Fraction(coef))
        return factor * PI2
    return _parse_real(s)


def _parse_real(text: str) -> float:
    s = text.strip()
    try:
        value = float(Fraction(s)) if "/" in s else float(s)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a real number: {text!r}") from None
    if not math.isfinite(value):
        raise DomainError(f"not a finite number: {text!r}")
    return value


def _parse_int(text: str) -> int:
    s = text.strip()
    if not re.fullmatch(r"[+-]?\d+", s):
        raise DomainError(f"not an integer: {text!r}")
    return int(s)


def _split_args(args: str) -> list[str]:
    parts = [a.strip() for a in args.split(",")]
    if parts == [""]:
        return []
    if any(not p for p in parts):
        raise DomainError("empty list element")
    return parts


def parse_profile(text: str) -> Profile:
    s = text.strip()
    if s.startswith("[") and s.endswith("]"):
        args = _split_args(s[1:-1])
        if len(args) != 2:
            raise DomainError("interval needs exactly two endpoints")
        return Indicator(as_rational(args[0]), as_rational(args[1]))
    m = _CALL_RE.match(s)
    if not m:
        raise DomainError(f"unrecognised profile {text!r}")
    name, args = m.group("name"), _split_args(m.group("args"))
    if name == "indicator":
        if len(args) != 2:
            raise DomainError("indicator needs exactly two endpoints")
        return Indicator(as_rational(args[0]), as_rational(args[1]))
    if name == "tabulated":
        nodes, values = [], []
        for pair in args:
            x, sep, v = pair.partition(":")
            if not sep:
                raise DomainError(f"tabulated entry {pair!r} is not node:value")
            nodes.append(_parse_real(x))
            values.append(_parse_real(v))
        return Tabulated(tuple(nodes), tuple(values))
    raise DomainError(f"unknown profile kind {name!r}")


def parse_initial(text: str) -> InitialSpec:
    m = _CALL_RE.match(text)
    if m and m.group("name") == "mode":
        args = _split_args(m.group("args"))
        if len(args) != 1:
            raise DomainError("mode() takes one index")
        n = _parse_int(args[0])
        if n < 1:
            raise DomainError("mode index must be >= 1")
        return UnitMode(n)
    if m and m.group("name") == "modes":
        weights = tuple(_parse_real(a) for a in _split_args(m.group("args")))
        if not weights:
            raise DomainError("modes() needs at least one weight")
        return ModeWeights(weights)
    return parse_profile(text)


def _parse_targets(text: str) -> tuple[float, ...]:
    values = tuple(_parse_real(a) for a in _split_args(text))
    if not values:
        raise DomainError("targets list is empty")
    if any(v >= 0 for v in values):
        raise DomainError("targets must be strictly negative")
    return values


def _parse_gains(text: str) -> dict[int, float]:
    gains = {}
    for pair in _split_args(text):
        n, sep, g = pair.partition(":")
        if not sep:
            raise DomainError(f"gain entry {pair!r} is not n:gain")
        idx = _parse_int(n)
        if idx < 1 or idx in gains:
            raise DomainError(f"bad or repeated mode index {n!r}")
        gains[idx] = _parse_real(g)
    return gains


def _positive(value, what):
    if not value > 0:
        raise DomainError(f"{what} must be positive")
    return value


_PARSERS = {
    "system.alpha": _parse_real,
    "system.k": parse_k,
    "profile.b": parse_profile,
    "profile.c": parse_profile,
    "analysis.window": lambda s: _positive(_parse_int(s), "window"),
    "analysis.zero_rel_threshold": lambda s: _positive(_parse_real(s), "threshold"),
    "feedback.targets": _parse_targets,
    "feedback.gains": _parse_gains,
    "simulate.t_final": lambda s: _positive(_parse_real(s), "t_final"),
    "simulate.dt": lambda s: _positive(_parse_real(s), "dt"),
    "simulate.truncation": lambda s: _positive(_parse_int(s), "truncation"),
    "simulate.initial": parse_initial,
}

_FIELD = {
    "system.alpha": "alpha",
    "system.k": "k",
    "profile.b": "b",
    "profile.c": "c",
    "analysis.window": "window",
    "analysis.zero_rel_threshold": "zero_rel_threshold",
    "feedback.targets": "targets",
    "feedback.gains": "gains",
    "simulate.t_final": "t_final",
    "simulate.dt": "dt",
    "simulate.truncation": "truncation",
    "simulate.initial": "initial",
}


def parse_config_text(text: str) -> RunConfig:
    values = {}
    lines = {}
    source = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError("expected 'key = value'", line=lineno)
        if key not in _PARSERS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigError(f"repeated key (first on line {lines[key]})", key=key, line=lineno)
        if not value:
            raise ConfigError("missing value", key=key, line=lineno)
        try:
            values[key] = _PARSERS[key](value)
        except DomainError as exc:
            raise ConfigError(str(exc), key=key, line=lineno) from None
        lines[key] = lineno
        source.append((key, value))
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError("required key missing", key=key)
    try:
        SystemParams(values["system.alpha"], values["system.k"])
    except DomainError as exc:
        raise ConfigError(str(exc), key="system.alpha", line=lines["system.alpha"]) from None
    if "simulate.dt" in values and values["simulate.dt"] > values.get("simulate.t_final", 8.0):
        raise ConfigError("dt exceeds t_final", key="simulate.dt", line=lines["simulate.dt"])
    init = values.get("simulate.initial")
    trunc = values.get("simulate.truncation", 64)
    if isinstance(init, UnitMode) and init.n > trunc:
        raise ConfigError("unit mode beyond truncation", key="simulate.initial",
                          line=lines["simulate.initial"])
    if isinstance(init, ModeWeights) and len(init.weights) > trunc:
        raise ConfigError("more weights than truncation", key="simulate.initial",
                          line=lines["simulate.initial"])
    kwargs = {_FIELD[key]: v for key, v in values.items()}
    return RunConfig(**kwargs, source=tuple(source))


def parse_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config_text(text)
