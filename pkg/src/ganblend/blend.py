"""Resolution-dependent checkpoint interpolation.

The output of every blend is p_out = (1 - alpha) * p_base + alpha * p_transfer,
elementwise in f32, where alpha depends on the parameter's resolution
band (and optionally its output channel). alpha = 0 or 1 skips the
arithmetic and copies the donor tensor bit-for-bit; a float lerp of
equal endpoints is not guaranteed to return them exactly, and swap
schedules are advertised as exact selections.

Mapping-network parameters are not resolution dependent, so they follow
a separate MappingPolicy: take base (default), take transfer, or lerp
with a fixed alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log2
from typing import Mapping, Union

import numpy as np

from .checkpoint import Checkpoint, GeneratorConfig, validate_checkpoint
from .errors import ConfigError, ScheduleError
from .topology import Role, Stage, classify

BASE = "base"
TRANSFER = "transfer"

# roles whose leading axis is the output channel a ChannelTable refines;
# the matching per-channel biases follow their weights
_CHANNEL_ROLES = {
    Role.CONV_WEIGHT: Role.CONV_BIAS,
    Role.TORGB_WEIGHT: Role.TORGB_BIAS,
}
_CHANNEL_AXIS_ROLES = {
    Role.CONV_WEIGHT,
    Role.TORGB_WEIGHT,
    Role.CONV_BIAS,
    Role.TORGB_BIAS,
}


@dataclass(frozen=True)
class Swap:
    """Hard selection at a threshold band.

    With low_source="transfer" (the usual direction), bands at or below
    r_swap come wholesale from the transfer model and the rest from the
    base; "base" inverts that.
    """

    r_swap: int
    low_source: str = TRANSFER


@dataclass(frozen=True)
class LinearLog:
    """alpha linear in log2(r) from (r_lo, alpha_lo) to (r_hi, alpha_hi),
    clamped to the endpoint interval outside [r_lo, r_hi]."""

    r_lo: int
    r_hi: int
    alpha_lo: float
    alpha_hi: float


@dataclass(frozen=True)
class Smoothstep:
    """Smooth ramp centered at r_center, spanning width_octaves octaves."""

    r_center: int
    width_octaves: float


@dataclass(frozen=True)
class Table:
    """Explicit per-band alpha. Every band queried must have an entry."""

    alphas: Mapping[int, float]


@dataclass(frozen=True)
class ChannelTable:
    """Per-band alpha with optional per-output-channel overrides.

    channels[r][c] refines band r's alpha for output channel c of that
    band's conv and torgb weights (and the matching bias element).
    Roles without an output-channel axis use the per-band fallback.
    """

    alphas: Mapping[int, float]
    channels: Mapping[int, Mapping[int, float]] = field(default_factory=dict)


BlendSchedule = Union[Swap, LinearLog, Smoothstep, Table, ChannelTable]


@dataclass(frozen=True)
class MappingPolicy:
    kind: str  # "base" | "transfer" | "alpha"
    value: float = 0.0

    @classmethod
    def base(cls) -> "MappingPolicy":
        return cls(BASE)

    @classmethod
    def transfer(cls) -> "MappingPolicy":
        return cls(TRANSFER)

    @classmethod
    def alpha(cls, value: float) -> "MappingPolicy":
        if not 0.0 <= value <= 1.0:
            raise ScheduleError(f"mapping alpha must be in [0,1], got {value}")
        return cls("alpha", float(value))

    @classmethod
    def parse(cls, spec) -> "MappingPolicy":
        """Accepts "base", "transfer", a float, or {"alpha": x}."""
        if isinstance(spec, MappingPolicy):
            return spec
        if spec == BASE:
            return cls.base()
        if spec == TRANSFER:
            return cls.transfer()
        if isinstance(spec, dict) and set(spec) == {"alpha"}:
            return cls.alpha(float(spec["alpha"]))
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            return cls.alpha(float(spec))
        raise ScheduleError(f"cannot parse mapping policy {spec!r}")

    def to_json(self):
        if self.kind == "alpha":
            return {"alpha": self.value}
        return self.kind

    def mapping_alpha(self) -> float:
        if self.kind == BASE:
            return 0.0
        if self.kind == TRANSFER:
            return 1.0
        return self.value


def _check_alpha(a: float, what: str) -> None:
    if not (isinstance(a, (int, float)) and 0.0 <= float(a) <= 1.0):
        raise ScheduleError(f"{what} must be in [0,1], got {a!r}")


def validate_schedule(schedule: BlendSchedule, config: GeneratorConfig) -> None:
    bands = config.bands()
    if isinstance(schedule, Swap):
        if schedule.r_swap not in bands:
            raise ScheduleError(f"r_swap {schedule.r_swap} is not a band of {bands}")
        if schedule.low_source not in (BASE, TRANSFER):
            raise ScheduleError(f"low_source must be base or transfer, got {schedule.low_source!r}")
    elif isinstance(schedule, LinearLog):
        if schedule.r_lo not in bands or schedule.r_hi not in bands:
            raise ScheduleError(f"r_lo/r_hi must be bands of {bands}")
        if not schedule.r_lo < schedule.r_hi:
            raise ScheduleError(f"r_lo must be < r_hi, got {schedule.r_lo} >= {schedule.r_hi}")
        _check_alpha(schedule.alpha_lo, "alpha_lo")
        _check_alpha(schedule.alpha_hi, "alpha_hi")
    elif isinstance(schedule, Smoothstep):
        if schedule.r_center not in bands:
            raise ScheduleError(f"r_center {schedule.r_center} is not a band of {bands}")
        if not schedule.width_octaves > 0:
            raise ScheduleError(f"width_octaves must be > 0, got {schedule.width_octaves}")
    elif isinstance(schedule, (Table, ChannelTable)):
        for r, a in schedule.alphas.items():
            if r not in bands:
                raise ScheduleError(f"table band {r} is not a band of {bands}")
            _check_alpha(a, f"alpha for band {r}")
        if isinstance(schedule, ChannelTable):
            for r, per_chan in schedule.channels.items():
                if r not in bands:
                    raise ScheduleError(f"channel-table band {r} is not a band of {bands}")
                for c, a in per_chan.items():
                    if not (isinstance(c, int) and c >= 0):
                        raise ScheduleError(f"channel index must be >= 0, got {c!r}")
                    _check_alpha(a, f"alpha for band {r} channel {c}")
    else:
        raise ScheduleError(f"unknown schedule type {type(schedule).__name__}")


def alpha_at(schedule: BlendSchedule, r: int, channel: int | None = None) -> float:
    """The transfer weight alpha for band r (optionally one channel)."""
    if isinstance(schedule, Swap):
        low = 1.0 if schedule.low_source == TRANSFER else 0.0
        return low if r <= schedule.r_swap else 1.0 - low
    if isinstance(schedule, LinearLog):
        t = (log2(r) - log2(schedule.r_lo)) / (log2(schedule.r_hi) - log2(schedule.r_lo))
        a = schedule.alpha_lo + t * (schedule.alpha_hi - schedule.alpha_lo)
        lo, hi = sorted((schedule.alpha_lo, schedule.alpha_hi))
        return min(max(a, lo), hi)
    if isinstance(schedule, Smoothstep):
        t = (log2(r) - log2(schedule.r_center)) / schedule.width_octaves + 0.5
        t = min(max(t, 0.0), 1.0)
        return 3.0 * t * t - 2.0 * t * t * t
    if isinstance(schedule, ChannelTable):
        if channel is not None:
            per_chan = schedule.channels.get(r)
            if per_chan is not None and channel in per_chan:
                return float(per_chan[channel])
        if r not in schedule.alphas:
            raise ScheduleError(f"schedule has no alpha for band {r}")
        return float(schedule.alphas[r])
    if isinstance(schedule, Table):
        if r not in schedule.alphas:
            raise ScheduleError(f"schedule has no alpha for band {r}")
        return float(schedule.alphas[r])
    raise ScheduleError(f"unknown schedule type {type(schedule).__name__}")


def describe_schedule(
    schedule: BlendSchedule, config: GeneratorConfig
) -> list[tuple[int, float]]:
    """One (r, alpha) row per band, ascending."""
    validate_schedule(schedule, config)
    return [(r, alpha_at(schedule, r)) for r in config.bands()]


def _lerp(base: np.ndarray, transfer: np.ndarray, alpha: float) -> np.ndarray:
    # exact donor copy at the endpoints, f32 arithmetic in between
    if alpha == 0.0:
        return base.copy()
    if alpha == 1.0:
        return transfer.copy()
    a = np.float32(alpha)
    return (np.float32(1.0) - a) * base + a * transfer


def _lerp_channelwise(
    base: np.ndarray, transfer: np.ndarray, alphas: list[float]
) -> np.ndarray:
    out = np.empty_like(base)
    for c, a in enumerate(alphas):
        out[c] = _lerp(base[c], transfer[c], a)
    return out


def blend_checkpoints(
    base: Checkpoint,
    transfer: Checkpoint,
    schedule: BlendSchedule,
    mapping: MappingPolicy | str | float = MappingPolicy.base(),
) -> Checkpoint:
    """Produce the interpolated checkpoint.

    Both inputs must share a config and manifest. Synthesis parameters
    lerp with their band's alpha (ChannelTable: per output channel for
    conv/torgb weights and biases); mapping parameters follow the
    mapping policy.
    """
    policy = MappingPolicy.parse(mapping)
    if base.meta != transfer.meta:
        raise ConfigError("base and transfer configs differ")
    validate_checkpoint(base)
    validate_checkpoint(transfer)
    validate_schedule(schedule, base.meta)

    out: dict[str, np.ndarray] = {}
    for name, b_arr in base.params.items():
        t_arr = transfer.params[name]
        key = classify(name)
        if key.stage is Stage.MAPPING:
            out[name] = _lerp(b_arr, t_arr, policy.mapping_alpha())
            continue
        r = key.resolution
        if isinstance(schedule, ChannelTable) and key.role in _CHANNEL_AXIS_ROLES:
            alphas = [alpha_at(schedule, r, c) for c in range(b_arr.shape[0])]
            out[name] = _lerp_channelwise(b_arr, t_arr, alphas)
        else:
            out[name] = _lerp(b_arr, t_arr, alpha_at(schedule, r))
    return Checkpoint(base.meta, out)


# ---------------------------------------------------------------------------
# JSON wire format


def schedule_to_json(schedule: BlendSchedule) -> dict:
    if isinstance(schedule, Swap):
        return {"kind": "swap", "r_swap": schedule.r_swap, "low_source": schedule.low_source}
    if isinstance(schedule, LinearLog):
        return {
            "kind": "linear_log",
            "r_lo": schedule.r_lo,
            "r_hi": schedule.r_hi,
            "alpha_lo": schedule.alpha_lo,
            "alpha_hi": schedule.alpha_hi,
        }
    if isinstance(schedule, Smoothstep):
        return {
            "kind": "smoothstep",
            "r_center": schedule.r_center,
            "width_octaves": schedule.width_octaves,
        }
    if isinstance(schedule, ChannelTable):
        return {
            "kind": "channel_table",
            "alphas": {str(r): a for r, a in sorted(schedule.alphas.items())},
            "channels": {
                str(r): {str(c): a for c, a in sorted(per.items())}
                for r, per in sorted(schedule.channels.items())
            },
        }
    if isinstance(schedule, Table):
        return {"kind": "table", "alphas": {str(r): a for r, a in sorted(schedule.alphas.items())}}
    raise ScheduleError(f"unknown schedule type {type(schedule).__name__}")


def _int_keys(obj: Mapping, what: str) -> dict[int, float]:
    try:
        return {int(k): float(v) for k, v in obj.items()}
    except (TypeError, ValueError, AttributeError) as e:
        raise ScheduleError(f"malformed {what}: {e}") from e


def schedule_from_json(obj) -> BlendSchedule:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ScheduleError("schedule JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "swap":
            return Swap(int(obj["r_swap"]), str(obj.get("low_source", TRANSFER)))
        if kind == "linear_log":
            return LinearLog(
                int(obj["r_lo"]), int(obj["r_hi"]),
                float(obj["alpha_lo"]), float(obj["alpha_hi"]),
            )
        if kind == "smoothstep":
            return Smoothstep(int(obj["r_center"]), float(obj["width_octaves"]))
        if kind == "table":
            return Table(_int_keys(obj["alphas"], "table alphas"))
        if kind == "channel_table":
            channels = {
                int(r): _int_keys(per, f"channels[{r}]")
                for r, per in obj.get("channels", {}).items()
            }
            return ChannelTable(_int_keys(obj["alphas"], "table alphas"), channels)
    except (KeyError, TypeError, ValueError) as e:
        raise ScheduleError(f"malformed schedule JSON for kind {kind!r}: {e}") from e
    raise ScheduleError(f"unknown schedule kind {kind!r}")
