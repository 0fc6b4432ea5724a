"""Latent-space projection by finite-difference gradient descent.

The optimizer recovers a latent whose render matches a target image
under pixel MSE. Gradients come from central finite differences (two
renders per latent component per step) fed into Adam; the generator
never needs autodiff.

Numerical bookkeeping is deliberately split in two:

* probe renders (the 2*dim finite-difference evaluations) run as one
  batch for throughput; their values only feed the gradient estimate.
* the loss trace, best-candidate tracking and the returned
  reconstruction all come from batch-size-1 renders, the same call
  shape every other part of the toolkit uses, so reported losses and
  images are bit-reproducible and never depend on probe batching.

The optimizer state itself is float64; latents enter the generator as
float32.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .checkpoint import Checkpoint
from .errors import ConfigError, ProjectionError, ShapeError
from .generator import NoiseSpec, _mapping_batch, _synthesize, forward, forward_w

W_AVG_SAMPLES = 1024
W_AVG_STREAM = "projector.w_avg"

SPACE_W = "w"
SPACE_Z = "z"


@dataclass(frozen=True)
class ProjectionConfig:
    space: str = SPACE_W
    steps: int = 300
    learning_rate: float = 0.05
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    fd_step: float = 1e-2
    seed: int = 0

    def __post_init__(self):
        if self.space not in (SPACE_W, SPACE_Z):
            raise ConfigError(f"space must be 'w' or 'z', got {self.space!r}")
        if not (isinstance(self.steps, int) and self.steps >= 1):
            raise ConfigError(f"steps must be an integer >= 1, got {self.steps!r}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.fd_step > 0:
            raise ConfigError(f"fd_step must be > 0, got {self.fd_step}")
        if not (0.0 <= self.adam_beta1 < 1.0 and 0.0 <= self.adam_beta2 < 1.0):
            raise ConfigError("adam betas must lie in [0, 1)")
        if not self.adam_eps > 0:
            raise ConfigError(f"adam_eps must be > 0, got {self.adam_eps}")

    def to_json_dict(self) -> dict:
        return {
            "space": self.space,
            "steps": self.steps,
            "learning_rate": self.learning_rate,
            "adam_beta1": self.adam_beta1,
            "adam_beta2": self.adam_beta2,
            "adam_eps": self.adam_eps,
            "fd_step": self.fd_step,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ProjectionConfig":
        if not isinstance(obj, dict):
            raise ConfigError("projection config must be a JSON object")
        known = {
            "space": str,
            "steps": int,
            "learning_rate": float,
            "adam_beta1": float,
            "adam_beta2": float,
            "adam_eps": float,
            "fd_step": float,
            "seed": int,
        }
        kwargs = {}
        for k, v in obj.items():
            if k not in known:
                raise ConfigError(f"unknown projection config field {k!r}")
            try:
                kwargs[k] = known[k](v)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"bad value for {k!r}: {e}") from e
        return cls(**kwargs)


@dataclass
class ProjectionResult:
    latent: np.ndarray
    loss_trace: list[float] = field(default_factory=list)
    reconstruction: np.ndarray | None = None
    # loss of the returned latent; equals MSE(reconstruction, target).
    # Not necessarily min(loss_trace): the post-final-update iterate is
    # evaluated as a candidate but has no trace row.
    final_loss: float = float("nan")


def _check_target(ckpt: Checkpoint, target: np.ndarray) -> np.ndarray:
    res = ckpt.meta.max_resolution
    t = np.asarray(target, dtype=np.float32)
    if t.shape != (3, res, res):
        raise ShapeError(
            f"target must have shape (3, {res}, {res}) for this model, got {t.shape}"
        )
    if not np.isfinite(t).all():
        raise ProjectionError("target image contains non-finite values")
    return t


class _Adam:
    def __init__(self, dim: int, cfg: ProjectionConfig):
        self.m = np.zeros(dim, dtype=np.float64)
        self.v = np.zeros(dim, dtype=np.float64)
        self.t = 0
        self.cfg = cfg

    def update(self, x: np.ndarray, grad: np.ndarray) -> np.ndarray:
        c = self.cfg
        self.t += 1
        self.m = c.adam_beta1 * self.m + (1.0 - c.adam_beta1) * grad
        self.v = c.adam_beta2 * self.v + (1.0 - c.adam_beta2) * grad * grad
        m_hat = self.m / (1.0 - c.adam_beta1**self.t)
        v_hat = self.v / (1.0 - c.adam_beta2**self.t)
        return x - c.learning_rate * m_hat / (np.sqrt(v_hat) + c.adam_eps)


def _start_latent(ckpt: Checkpoint, cfg: ProjectionConfig) -> np.ndarray:
    if cfg.space == SPACE_Z:
        return np.zeros(ckpt.meta.latent_dim, dtype=np.float64)
    zs = rng.normal(cfg.seed, W_AVG_STREAM, (W_AVG_SAMPLES, ckpt.meta.latent_dim))
    ws = _mapping_batch(ckpt, zs)
    return ws.mean(axis=0, dtype=np.float64)


def _render_batch(ckpt: Checkpoint, latents32: np.ndarray, cfg: ProjectionConfig) -> np.ndarray:
    if cfg.space == SPACE_Z:
        styles = _mapping_batch(ckpt, latents32)
    else:
        styles = latents32
    rgb, _ = _synthesize(ckpt, styles, cfg.seed)
    return rgb


def project(ckpt: Checkpoint, target: np.ndarray, cfg: ProjectionConfig) -> ProjectionResult:
    """Optimize a latent so the model reproduces `target`.

    Returns the best latent evaluated during the run (the trajectory is
    not monotone), its batch-size-1 reconstruction, and the per-step
    loss trace, trace[i] being the loss of the iterate entering step i.
    """
    target = _check_target(ckpt, target)
    target64 = target.astype(np.float64)

    def eval_one(x64: np.ndarray) -> tuple[float, np.ndarray]:
        img = _render_batch(ckpt, x64.astype(np.float32)[None], cfg)[0]
        d = img.astype(np.float64) - target64
        return float(np.mean(d * d)), img

    x = _start_latent(ckpt, cfg)
    dim = x.shape[0]
    adam = _Adam(dim, cfg)
    eye = np.eye(dim, dtype=np.float64)

    trace: list[float] = []
    best_loss = np.inf
    best_x: np.ndarray | None = None
    best_img: np.ndarray | None = None

    for step in range(cfg.steps + 1):
        loss, img = eval_one(x)
        if not np.isfinite(loss):
            raise ProjectionError(f"non-finite loss {loss} at step {step}")
        if step < cfg.steps:
            trace.append(float(np.float32(loss)))
        if loss < best_loss:
            best_loss = loss
            best_x = x.astype(np.float32)
            best_img = img
        if step == cfg.steps:
            # the post-update latent was evaluated as a candidate only
            break

        h = cfg.fd_step * (1.0 + np.abs(x))
        probes = np.concatenate([x[None] + eye * h, x[None] - eye * h])
        probes32 = probes.astype(np.float32)
        imgs = _render_batch(ckpt, probes32, cfg)
        d = imgs.astype(np.float64) - target64[None]
        losses = np.mean(d * d, axis=(1, 2, 3))
        # effective step per component from the rounded f32 probes, so
        # the quotient matches the renders actually performed
        h_eff = (probes32[:dim].diagonal() - probes32[dim:].diagonal()).astype(np.float64)
        grad = (losses[:dim] - losses[dim:]) / h_eff
        if not np.isfinite(grad).all():
            raise ProjectionError(f"non-finite gradient at step {step}")
        x = adam.update(x, grad)

    assert best_x is not None and best_img is not None
    return ProjectionResult(
        latent=best_x,
        loss_trace=trace,
        reconstruction=best_img,
        final_loss=float(np.float32(best_loss)),
    )


def toonify(
    base: Checkpoint, blended: Checkpoint, target: np.ndarray, cfg: ProjectionConfig
) -> np.ndarray:
    """Project into the base model, then render the blend at that latent."""
    img, _ = toonify_with_result(base, blended, target, cfg)
    return img


def toonify_with_result(
    base: Checkpoint, blended: Checkpoint, target: np.ndarray, cfg: ProjectionConfig
) -> tuple[np.ndarray, ProjectionResult]:
    """toonify plus the underlying projection, for callers that report both."""
    if base.meta != blended.meta:
        raise ConfigError("base and blended configs differ")
    result = project(base, target, cfg)
    noise = NoiseSpec(cfg.seed)
    if cfg.space == SPACE_Z:
        img = forward(blended, result.latent, noise)
    else:
        img = forward_w(blended, result.latent, noise)
    return img, result
