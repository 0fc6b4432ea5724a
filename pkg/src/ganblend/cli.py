"""Command-line interface.

Every command is deterministic given its flags. Errors print one line
to stderr prefixed with `error:` and exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import blend as blend_mod
from . import png_io, projector, sampling
from .checkpoint import GeneratorConfig, load, save
from .errors import GanblendError
from .generator import init_random, synth_transfer
from .topology import Stage, classify


def _load_config(path: str | None) -> GeneratorConfig:
    if path is None:
        return GeneratorConfig.default()
    with open(path, "r", encoding="utf-8") as f:
        return GeneratorConfig.from_json_dict(json.load(f))


def cmd_init_base(args) -> int:
    cfg = _load_config(args.config)
    ck = init_random(cfg, args.seed)
    save(ck, args.out)
    print(f"wrote {args.out} ({len(ck.params)} parameters, {cfg.max_resolution}x{cfg.max_resolution})")
    return 0


def cmd_make_transfer(args) -> int:
    base = load(args.base)
    ck = synth_transfer(base, args.strength, args.seed)
    save(ck, args.out)
    print(f"wrote {args.out} (strength {args.strength:g}, seed {args.seed})")
    return 0


def cmd_inspect(args) -> int:
    ck = load(args.path)
    print(f"config: {json.dumps(ck.meta.to_json_dict(), sort_keys=True)}")
    print(f"{'name':<42} {'stage':<10} {'r':>4} {'role':<20} shape")
    for name, arr in ck.params.items():
        key = classify(name)
        r = "-" if key.resolution is None else str(key.resolution)
        stage = key.stage.value
        print(f"{name:<42} {stage:<10} {r:>4} {key.role.value:<20} {list(arr.shape)}")
    return 0


def _schedule_from_args(args) -> blend_mod.BlendSchedule:
    given = [
        args.schedule_json is not None,
        args.swap_at is not None,
        args.table is not None,
    ]
    if sum(given) != 1:
        raise GanblendError(
            "provide exactly one schedule: --schedule-json, --swap-at or --table"
        )
    if args.schedule_json is not None:
        return blend_mod.schedule_from_json(json.loads(args.schedule_json))
    if args.swap_at is not None:
        return blend_mod.Swap(args.swap_at, args.low_from)
    alphas = {}
    for part in args.table.split(","):
        r, _, a = part.partition("=")
        alphas[int(r)] = float(a)
    return blend_mod.Table(alphas)


def _mapping_from_flag(text: str) -> blend_mod.MappingPolicy:
    if text in ("base", "transfer"):
        return blend_mod.MappingPolicy.parse(text)
    try:
        value = float(text)
    except ValueError:
        raise GanblendError(
            f"--mapping must be base, transfer or a float in [0,1], got {text!r}"
        ) from None
    return blend_mod.MappingPolicy.alpha(value)


def cmd_blend(args) -> int:
    base = load(args.base)
    transfer = load(args.transfer)
    schedule = _schedule_from_args(args)
    out = blend_mod.blend_checkpoints(
        base, transfer, schedule, _mapping_from_flag(args.mapping)
    )
    save(out, args.out)
    rows = blend_mod.describe_schedule(schedule, out.meta)
    desc = ", ".join(f"{r}:{a:g}" for r, a in rows)
    print(f"wrote {args.out} (alpha per band: {desc}; mapping {args.mapping})")
    return 0


def cmd_sample(args) -> int:
    ck = load(args.model)
    grid = sampling.render_grid(ck, args.seed, args.count, args.columns)
    png_io.encode_png(grid, args.out)
    print(f"wrote {args.out} ({grid.shape[2]}x{grid.shape[1]} px, {args.count} samples)")
    return 0


def _projection_config(args) -> projector.ProjectionConfig:
    return projector.ProjectionConfig(
        space=args.space,
        steps=args.steps,
        learning_rate=args.lr,
        fd_step=args.fd_step,
        seed=args.seed,
    )


def _latent_json(res: projector.ProjectionResult, cfg: projector.ProjectionConfig) -> dict:
    return {
        "space": cfg.space,
        "values": [float(v) for v in res.latent],
        "final_loss": res.final_loss,
        "loss_trace": res.loss_trace,
        "steps": cfg.steps,
        "seed": cfg.seed,
    }


def cmd_project(args) -> int:
    ck = load(args.model)
    target = png_io.decode_png(args.target)
    cfg = _projection_config(args)
    res = projector.project(ck, target, cfg)
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(_latent_json(res, cfg), f)
        f.write("\n")
    if args.recon_png:
        png_io.encode_png(res.reconstruction, args.recon_png)
    print(f"wrote {args.out} (final loss {res.final_loss:.6g} after {cfg.steps} steps)")
    return 0


def cmd_toonify(args) -> int:
    base = load(args.base)
    blended = load(args.blended)
    target = png_io.decode_png(args.target)
    cfg = _projection_config(args)
    img, res = projector.toonify_with_result(base, blended, target, cfg)
    png_io.encode_png(img, args.out)
    if args.recon_png:
        png_io.encode_png(res.reconstruction, args.recon_png)
    if args.latent_json:
        with open(args.latent_json, "w", encoding="utf-8") as f:
            json.dump(_latent_json(res, cfg), f)
            f.write("\n")
    print(f"wrote {args.out} (projection loss {res.final_loss:.6g})")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ganblend",
        description="Blend style-based generator checkpoints band by band.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("init-base", help="create a random base checkpoint")
    sp.add_argument("--config", help="generator config JSON path (default: desk config)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--out", required=True)
    sp.set_defaults(func=cmd_init_base)

    sp = sub.add_parser("make-transfer", help="derive a synthetic transfer checkpoint")
    sp.add_argument("--base", required=True)
    sp.add_argument("--strength", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("-o", "--out", required=True)
    sp.set_defaults(func=cmd_make_transfer)

    sp = sub.add_parser("inspect", help="print the parameter table of a checkpoint")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("blend", help="interpolate two checkpoints band by band")
    sp.add_argument("--base", required=True)
    sp.add_argument("--transfer", required=True)
    sp.add_argument("--schedule-json", help="schedule as JSON text")
    sp.add_argument("--swap-at", type=int, help="hard swap threshold band")
    sp.add_argument(
        "--low-from",
        choices=["base", "transfer"],
        default="transfer",
        help="donor for bands at or below --swap-at (default transfer)",
    )
    sp.add_argument("--table", help="per-band alphas, e.g. 4=1,8=1,16=0.5,32=0,64=0")
    sp.add_argument(
        "--mapping",
        default="base",
        help="mapping-network source: base, transfer, or an alpha in [0,1]",
    )
    sp.add_argument("-o", "--out", required=True)
    sp.set_defaults(func=cmd_blend)

    sp = sub.add_parser("sample", help="render a deterministic sample grid PNG")
    sp.add_argument("--model", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=24)
    sp.add_argument("--columns", type=int, default=6)
    sp.add_argument("-o", "--out", required=True)
    sp.set_defaults(func=cmd_sample)

    def add_projection_flags(sp):
        sp.add_argument("--space", choices=["w", "z"], default="w")
        sp.add_argument("--steps", type=int, default=300)
        sp.add_argument("--lr", type=float, default=0.05)
        sp.add_argument("--fd-step", type=float, default=1e-2)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("project", help="recover a latent for a target image")
    sp.add_argument("--model", required=True)
    sp.add_argument("--target", required=True, help="PNG at the model resolution")
    add_projection_flags(sp)
    sp.add_argument("--recon-png", help="also write the reconstruction PNG here")
    sp.add_argument("-o", "--out", required=True, help="latent JSON path")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("toonify", help="project into base, render with blended")
    sp.add_argument("--base", required=True)
    sp.add_argument("--blended", required=True)
    sp.add_argument("--target", required=True)
    add_projection_flags(sp)
    sp.add_argument("--recon-png")
    sp.add_argument("--latent-json")
    sp.add_argument("-o", "--out", required=True, help="toonified PNG path")
    sp.set_defaults(func=cmd_toonify)

    sp = sub.add_parser("serve", help="run the local HTTP service")
    sp.add_argument("--port", type=int, default=None, help="default: $GANBLEND_PORT or 7860")
    sp.add_argument("--static", help="directory of console files to serve at /")
    sp.set_defaults(func=cmd_serve)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GanblendError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as e:
        print(f"error: invalid JSON: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyboardInterrupt) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
