# scenario.py
"""Sweep scenarios: JSON scenario files in, validated SweepSpec out."""
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Optional

from entanglement import PureState
from linalg import InvalidInputError, QutritSimError

logger = logging.getLogger(__name__)

SCHEMES = ("one", "two", "one-general", "two-general")
AXES = ("D", "p")
FIGURES = ("fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b")
ENDPOINT_CLAMP = 1.0 - 1e-6
DEFAULT_STEPS = 200

# Parameters each scheme needs, before removing the swept axis.
SCHEME_PARAMS = {
    "one": ("D",),
    "two": ("D", "p"),
    "one-general": ("d1", "d2", "D1", "D2"),
    "two-general": ("d1", "d2", "D1", "D2", "p1", "q1", "p2", "q2"),
}
SCHEME_AXES = {
    "one": ("D",),
    "two": ("D", "p"),
    "one-general": ("D",),
    "two-general": ("D", "p"),
}
TOP_LEVEL_KEYS = {"scheme", "state", "axis", "axis_range", "fixed_params", "reversal", "figure"}


class ConfigError(QutritSimError):
    """A scenario file (or dict) is malformed; the message names the offending field."""


def default_steps():
    raw = os.getenv("QUTRIT_SWEEP_POINTS")
    if not raw:
        return DEFAULT_STEPS
    try:
        steps = int(raw)
    except ValueError:
        raise ConfigError(f"QUTRIT_SWEEP_POINTS must be an integer, got {raw!r}") from None
    if steps < 2:
        raise ConfigError("QUTRIT_SWEEP_POINTS must be at least 2")
    return steps


def _parse_real(value, field_name):
    """Accept ints and floats, reject booleans, strings and non-finite values."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field_name}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{field_name}: must be finite")
    return value


def _parse_amplitude(value, field_name):
    """Amplitude as a number, a [re, im] pair or a {"re": x, "im": y} object."""
    if isinstance(value, dict):
        unknown = set(value) - {"re", "im"}
        if unknown:
            raise ConfigError(f"{field_name}: unknown key(s) {sorted(unknown)}")
        return complex(_parse_real(value.get("re", 0.0), f"{field_name}.re"),
                       _parse_real(value.get("im", 0.0), f"{field_name}.im"))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{field_name}: expected [re, im]")
        return complex(_parse_real(value[0], f"{field_name}[0]"), _parse_real(value[1], f"{field_name}[1]"))
    return complex(_parse_real(value, field_name))


def _amplitude_to_json(value):
    value = complex(value)
    return value.real if value.imag == 0 else [value.real, value.imag]


@dataclass(frozen=True)
class AxisScale:
    """A parameter tied to the swept axis: value = scale * axis_value."""

    scale: float


@dataclass(frozen=True)
class SweepSpec:
    scheme: str
    state: PureState
    axis: str
    start: float
    stop: float
    steps: int
    fixed_params: dict = field(default_factory=dict)
    reversal: Optional[tuple] = None  # None means optimal, else (pr, qr)
    figure: Optional[str] = None

    def resolve(self, axis_value):
        """Every parameter of the scheme evaluated at one axis point."""
        values = {}
        for name in SCHEME_PARAMS[self.scheme]:
            if name == self.axis:
                values[name] = axis_value
                continue
            param = self.fixed_params[name]
            values[name] = param.scale * axis_value if isinstance(param, AxisScale) else param
        return values

    def to_dict(self):
        fixed = {
            name: {"scale": v.scale} if isinstance(v, AxisScale) else v
            for name, v in self.fixed_params.items()
        }
        data = {
            "scheme": self.scheme,
            "state": {
                "alpha": _amplitude_to_json(self.state.alpha),
                "beta": _amplitude_to_json(self.state.beta),
                "gamma": _amplitude_to_json(self.state.gamma),
            },
            "axis": self.axis,
            "axis_range": {"start": self.start, "stop": self.stop, "steps": self.steps},
            "fixed_params": fixed,
            "reversal": "optimal" if self.reversal is None else {"pr": self.reversal[0], "qr": self.reversal[1]},
        }
        if self.figure is not None:
            data["figure"] = self.figure
        return data

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("scenario: expected a JSON object at the top level")
        unknown = set(data) - TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"scenario: unknown key(s) {sorted(unknown)}")
        for required in ("scheme", "state", "axis", "axis_range", "fixed_params"):
            if required not in data:
                raise ConfigError(f"{required}: missing")

        scheme = data["scheme"]
        if scheme not in SCHEMES:
            raise ConfigError(f"scheme: must be one of {list(SCHEMES)}, got {scheme!r}")

        axis = data["axis"]
        if axis not in SCHEME_AXES[scheme]:
            raise ConfigError(f"axis: scheme {scheme!r} sweeps {list(SCHEME_AXES[scheme])}, got {axis!r}")

        state = _parse_state(data["state"])
        start, stop, steps = _parse_range(data["axis_range"])
        fixed = _parse_fixed_params(data["fixed_params"], scheme, axis)
        reversal = _parse_reversal(data.get("reversal", "optimal"), scheme)

        figure = data.get("figure")
        if figure is not None and figure not in FIGURES:
            raise ConfigError(f"figure: must be one of {list(FIGURES)}, got {figure!r}")

        return cls(scheme, state, axis, start, stop, steps, fixed, reversal, figure)


def _parse_state(raw):
    if not isinstance(raw, dict):
        raise ConfigError("state: expected an object with alpha, beta, gamma")
    unknown = set(raw) - {"alpha", "beta", "gamma"}
    if unknown:
        raise ConfigError(f"state: unknown key(s) {sorted(unknown)}")
    amplitudes = []
    for name in ("alpha", "beta", "gamma"):
        if name not in raw:
            raise ConfigError(f"state.{name}: missing")
        amplitudes.append(_parse_amplitude(raw[name], f"state.{name}"))
    try:
        return PureState(*amplitudes)
    except InvalidInputError as e:
        raise ConfigError(f"state: {e}") from e


def _parse_range(raw):
    if not isinstance(raw, dict):
        raise ConfigError("axis_range: expected an object with start, stop[, steps]")
    unknown = set(raw) - {"start", "stop", "steps"}
    if unknown:
        raise ConfigError(f"axis_range: unknown key(s) {sorted(unknown)}")
    if "start" not in raw or "stop" not in raw:
        raise ConfigError("axis_range: start and stop are required")
    start = _parse_real(raw["start"], "axis_range.start")
    stop = _parse_real(raw["stop"], "axis_range.stop")
    steps = raw.get("steps", default_steps())
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise ConfigError(f"axis_range.steps: expected an integer >= 2, got {steps!r}")
    if not 0.0 <= start < 1.0:
        raise ConfigError(f"axis_range.start: must lie in [0, 1), got {start}")
    if stop > 1.0:
        raise ConfigError(f"axis_range.stop: must not exceed 1, got {stop}")
    if stop == 1.0:
        logger.warning("axis_range.stop = 1 is a degenerate limit; clamping to %.6f", ENDPOINT_CLAMP)
        stop = ENDPOINT_CLAMP
    if start >= stop:
        raise ConfigError(f"axis_range: start ({start}) must be below stop ({stop})")
    return start, stop, steps


def _parse_fixed_params(raw, scheme, axis):
    if not isinstance(raw, dict):
        raise ConfigError("fixed_params: expected an object")
    needed = [name for name in SCHEME_PARAMS[scheme] if name != axis]
    unknown = set(raw) - set(needed)
    if unknown:
        raise ConfigError(
            f"fixed_params: unknown key(s) {sorted(unknown)} for scheme {scheme!r} swept over {axis!r}"
        )
    fixed = {}
    for name in needed:
        if name not in raw:
            raise ConfigError(f"fixed_params.{name}: missing")
        value = raw[name]
        if isinstance(value, dict):
            if set(value) != {"scale"}:
                raise ConfigError(f"fixed_params.{name}: expected {{\"scale\": k}}")
            if scheme in ("one", "two"):
                raise ConfigError(f"fixed_params.{name}: axis scaling is only available for general schemes")
            scale = _parse_real(value["scale"], f"fixed_params.{name}.scale")
            if not 0.0 <= scale <= 1.0:
                raise ConfigError(f"fixed_params.{name}.scale: must lie in [0, 1], got {scale}")
            fixed[name] = AxisScale(scale)
        else:
            value = _parse_real(value, f"fixed_params.{name}")
            if not 0.0 <= value < 1.0:
                raise ConfigError(f"fixed_params.{name}: must lie in [0, 1), got {value}")
            fixed[name] = value
    if scheme not in ("one", "two") and not any(isinstance(v, AxisScale) for v in fixed.values()):
        raise ConfigError(
            f"fixed_params: scheme {scheme!r} needs at least one {{\"scale\": k}} entry tied to the {axis!r} axis"
        )
    return fixed


def _parse_reversal(raw, scheme):
    if raw == "optimal":
        return None
    if not isinstance(raw, dict):
        raise ConfigError(f"reversal: expected \"optimal\" or {{\"pr\": x, \"qr\": y}}, got {raw!r}")
    if scheme not in ("one", "two"):
        raise ConfigError("reversal: general schemes always use the per-qutrit optimal reversal")
    if set(raw) != {"pr", "qr"}:
        raise ConfigError(f"reversal: expected exactly pr and qr, got {sorted(raw)}")
    pr = _parse_real(raw["pr"], "reversal.pr")
    qr = _parse_real(raw["qr"], "reversal.qr")
    for name, value in (("pr", pr), ("qr", qr)):
        if not 0.0 <= value < 1.0:
            raise ConfigError(f"reversal.{name}: must lie in [0, 1), got {value}")
    return pr, qr


def load_spec(path):
    """Read and validate a JSON scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Scenario file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return SweepSpec.from_dict(data)


@dataclass(frozen=True)
class ResultRow:
    """One sweep point; ``None`` marks an absent value."""

    axis_value: float
    n_initial: float
    n_damped: float
    n_protected: Optional[float]
    ratio: Optional[float]
    success_probability: float
    axis: str = "D"
