"""Parameter-name grammar and resolution-band classification.

Grammar:
    mapping.fc{i}.{weight|bias}
    synthesis.b{r}.const
    synthesis.b{r}.conv{0|1}.{weight|bias|affine_weight|affine_bias|noise_strength}
    synthesis.b{r}.torgb.{weight|bias|affine_weight|affine_bias}

r must be a power of two >= 4. Classification is pure string work; it
does not consult a config, so callers that care about band range check
the resolution against their config's bands themselves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .checkpoint import Checkpoint
from .errors import ConfigError, GrammarError


class Stage(enum.Enum):
    MAPPING = "mapping"
    SYNTHESIS = "synthesis"


class Role(enum.Enum):
    MAP_WEIGHT = "map_weight"
    MAP_BIAS = "map_bias"
    CONST = "const"
    CONV_WEIGHT = "conv_weight"
    CONV_BIAS = "conv_bias"
    STYLE_AFFINE_WEIGHT = "style_affine_weight"
    STYLE_AFFINE_BIAS = "style_affine_bias"
    NOISE_STRENGTH = "noise_strength"
    TORGB_WEIGHT = "torgb_weight"
    TORGB_BIAS = "torgb_bias"


@dataclass(frozen=True)
class LayerKey:
    stage: Stage
    resolution: int | None
    role: Role


_CONV_ROLES = {
    "weight": Role.CONV_WEIGHT,
    "bias": Role.CONV_BIAS,
    "affine_weight": Role.STYLE_AFFINE_WEIGHT,
    "affine_bias": Role.STYLE_AFFINE_BIAS,
    "noise_strength": Role.NOISE_STRENGTH,
}

_TORGB_ROLES = {
    "weight": Role.TORGB_WEIGHT,
    "bias": Role.TORGB_BIAS,
    "affine_weight": Role.STYLE_AFFINE_WEIGHT,
    "affine_bias": Role.STYLE_AFFINE_BIAS,
}


def _bad(name: str, segment: str, why: str) -> GrammarError:
    return GrammarError(f"cannot classify {name!r}: segment {segment!r} {why}")


def classify(name: str) -> LayerKey:
    parts = name.split(".")
    head = parts[0] if parts else ""
    if head == "mapping":
        if len(parts) != 3:
            raise _bad(name, name, "does not match mapping.fc{i}.{weight|bias}")
        fc, leaf = parts[1], parts[2]
        if not (fc.startswith("fc") and fc[2:].isdigit()):
            raise _bad(name, fc, "is not fc{i}")
        if leaf == "weight":
            return LayerKey(Stage.MAPPING, None, Role.MAP_WEIGHT)
        if leaf == "bias":
            return LayerKey(Stage.MAPPING, None, Role.MAP_BIAS)
        raise _bad(name, leaf, "must be weight or bias")

    if head == "synthesis":
        if len(parts) < 3:
            raise _bad(name, name, "is missing segments")
        band = parts[1]
        if not (band.startswith("b") and band[1:].isdigit()):
            raise _bad(name, band, "is not b{r}")
        r = int(band[1:])
        if r < 4 or (r & (r - 1)) != 0:
            raise _bad(name, band, "resolution must be a power of two >= 4")
        block = parts[2]
        if block == "const":
            if len(parts) != 3:
                raise _bad(name, parts[3], "unexpected after const")
            return LayerKey(Stage.SYNTHESIS, r, Role.CONST)
        if block in ("conv0", "conv1"):
            if len(parts) != 4:
                raise _bad(name, block, "needs exactly one trailing role segment")
            role = _CONV_ROLES.get(parts[3])
            if role is None:
                raise _bad(name, parts[3], f"is not a conv parameter ({sorted(_CONV_ROLES)})")
            return LayerKey(Stage.SYNTHESIS, r, role)
        if block == "torgb":
            if len(parts) != 4:
                raise _bad(name, block, "needs exactly one trailing role segment")
            role = _TORGB_ROLES.get(parts[3])
            if role is None:
                raise _bad(name, parts[3], f"is not a torgb parameter ({sorted(_TORGB_ROLES)})")
            return LayerKey(Stage.SYNTHESIS, r, role)
        raise _bad(name, block, "must be const, conv0, conv1 or torgb")

    raise _bad(name, head, "must be mapping or synthesis")


@dataclass
class BandPartition:
    """Parameter names grouped by resolution band, plus the mapping list.

    Every band of the config appears as a key, possibly with an empty
    list. Lists hold names in sorted order.
    """

    mapping: list[str]
    bands: dict[int, list[str]]

    def total(self) -> int:
        return len(self.mapping) + sum(len(v) for v in self.bands.values())


def partition(ckpt: Checkpoint) -> BandPartition:
    """Group a checkpoint's parameter names by band.

    Works on any classifiable name set (it does not require a complete
    manifest), but rejects synthesis names whose band is outside the
    checkpoint's config.
    """
    valid = set(ckpt.meta.bands())
    part = BandPartition(mapping=[], bands={r: [] for r in sorted(valid)})
    for name in sorted(ckpt.params):
        key = classify(name)
        if key.stage is Stage.MAPPING:
            part.mapping.append(name)
        else:
            if key.resolution not in valid:
                raise ConfigError(
                    f"{name!r}: band {key.resolution} outside config bands {sorted(valid)}"
                )
            part.bands[key.resolution].append(name)
    return part
