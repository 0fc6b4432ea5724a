"""CLI behaviour: exit codes, error prefix, file outputs, determinism.

Commands run in-process through main(argv); the acceptance suite also
drives the `python -m ganblend` entry point as a real subprocess.
"""

import json

import numpy as np
import pytest

from ganblend import blend as blend_mod
from ganblend import png_io
from ganblend.checkpoint import GeneratorConfig, load
from ganblend.cli import main
from ganblend.generator import forward, init_random
from ganblend.sampling import sample_z
from ganblend.topology import Stage, classify

from conftest import assert_checkpoints_equal

TINY = dict(
    latent_dim=8,
    style_dim=8,
    mapping_layers=1,
    max_resolution=8,
    channels_per_band={4: 6, 8: 4},
)


@pytest.fixture()
def tiny_cfg_path(tmp_path):
    cfg = GeneratorConfig(**TINY)
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(cfg.to_json_dict()))
    return str(p)


@pytest.fixture()
def workspace(tmp_path, tiny_cfg_path):
    """tmp dir holding tiny base/transfer/blend checkpoints."""
    base = str(tmp_path / "base.gwt")
    transfer = str(tmp_path / "transfer.gwt")
    blended = str(tmp_path / "blend.gwt")
    assert main(["init-base", "--config", tiny_cfg_path, "--seed", "0", "-o", base]) == 0
    assert main(["make-transfer", "--base", base, "--strength", "0.5", "--seed", "1", "-o", transfer]) == 0
    assert main(["blend", "--base", base, "--transfer", transfer, "--swap-at", "4", "-o", blended]) == 0
    return tmp_path


class TestInitAndTransfer:
    def test_init_base_writes_valid_checkpoint(self, tmp_path):
        out = str(tmp_path / "b.gwt")
        assert main(["init-base", "--seed", "3", "-o", out]) == 0
        ck = load(out)
        assert ck.meta == GeneratorConfig.default()
        assert len(ck.params) == 70

    def test_init_base_custom_config(self, tmp_path, tiny_cfg_path):
        out = str(tmp_path / "t.gwt")
        assert main(["init-base", "--config", tiny_cfg_path, "-o", out]) == 0
        ck = load(out)
        assert ck.meta.max_resolution == 8
        assert ck.meta.style_dim == 8

    def test_init_base_deterministic(self, tmp_path):
        a, b = str(tmp_path / "a.gwt"), str(tmp_path / "b.gwt")
        main(["init-base", "--seed", "5", "-o", a])
        main(["init-base", "--seed", "5", "-o", b])
        assert (tmp_path / "a.gwt").read_bytes() == (tmp_path / "b.gwt").read_bytes()

    def test_make_transfer_differs_from_base(self, workspace):
        base = load(str(workspace / "base.gwt"))
        transfer = load(str(workspace / "transfer.gwt"))
        assert list(base.params) == list(transfer.params)
        assert any(
            not np.array_equal(base.params[k], transfer.params[k])
            for k in base.params
        )

    def test_make_transfer_rejects_negative_strength(self, workspace, capsys):
        rc = main([
            "make-transfer", "--base", str(workspace / "base.gwt"),
            "--strength", "-1", "-o", str(workspace / "x.gwt"),
        ])
        assert rc == 1
        assert capsys.readouterr().err.startswith("error:")


class TestInspect:
    def test_inspect_prints_row_per_parameter(self, workspace, capsys):
        assert main(["inspect", str(workspace / "base.gwt")]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        # config line + column header + one row per parameter
        ck = load(str(workspace / "base.gwt"))
        assert len(lines) == 2 + len(ck.params)
        assert lines[0].startswith("config:")
        for row in lines[2:]:
            assert row.split()[0] in ck.params

    def test_inspect_missing_file(self, capsys):
        assert main(["inspect", "/nonexistent/x.gwt"]) == 1
        assert capsys.readouterr().err.startswith("error:")


class TestBlend:
    def test_swap_blend_matches_library(self, workspace):
        base = load(str(workspace / "base.gwt"))
        transfer = load(str(workspace / "transfer.gwt"))
        expected = blend_mod.blend_checkpoints(
            base, transfer, blend_mod.Swap(4), blend_mod.MappingPolicy.base()
        )
        assert_checkpoints_equal(load(str(workspace / "blend.gwt")), expected)

    def test_swap_at_invalid_band(self, workspace, capsys):
        rc = main([
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "--swap-at", "3", "-o", str(workspace / "x.gwt"),
        ])
        assert rc == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "3" in err and "band" in err

    def test_exactly_one_schedule_required(self, workspace, capsys):
        args = [
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "-o", str(workspace / "x.gwt"),
        ]
        assert main(args) == 1
        assert main(args + ["--swap-at", "4", "--table", "4=1,8=0"]) == 1
        assert capsys.readouterr().err.count("error:") == 2

    def test_table_flag(self, workspace):
        out = str(workspace / "tbl.gwt")
        rc = main([
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "--table", "4=1,8=0.25", "-o", out,
        ])
        assert rc == 0
        base = load(str(workspace / "base.gwt"))
        transfer = load(str(workspace / "transfer.gwt"))
        expected = blend_mod.blend_checkpoints(
            base, transfer,
            blend_mod.Table({4: 1.0, 8: 0.25}),
            blend_mod.MappingPolicy.base(),
        )
        assert_checkpoints_equal(load(out), expected)

    def test_schedule_json_flag(self, workspace):
        out = str(workspace / "ss.gwt")
        sched = json.dumps({"kind": "smoothstep", "r_center": 4, "width_octaves": 1.0})
        rc = main([
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "--schedule-json", sched, "-o", out,
        ])
        assert rc == 0
        assert load(out).meta.max_resolution == 8

    def test_low_from_base_inverts(self, workspace):
        out = str(workspace / "inv.gwt")
        rc = main([
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "--swap-at", "4", "--low-from", "base", "-o", out,
        ])
        assert rc == 0
        base = load(str(workspace / "base.gwt"))
        transfer = load(str(workspace / "transfer.gwt"))
        got = load(out)
        for name in got.params:
            key = classify(name)
            if key.stage is not Stage.SYNTHESIS:
                continue
            donor = base if key.resolution <= 4 else transfer
            assert np.array_equal(got.params[name], donor.params[name]), name

    def test_mapping_alpha_flag(self, workspace):
        out = str(workspace / "m.gwt")
        rc = main([
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "--swap-at", "4", "--mapping", "1.0", "-o", out,
        ])
        assert rc == 0
        transfer = load(str(workspace / "transfer.gwt"))
        got = load(out)
        assert np.array_equal(got.params["mapping.fc0.weight"], transfer.params["mapping.fc0.weight"])

    def test_mapping_bad_string(self, workspace, capsys):
        rc = main([
            "blend", "--base", str(workspace / "base.gwt"),
            "--transfer", str(workspace / "transfer.gwt"),
            "--swap-at", "4", "--mapping", "pineapple", "-o", str(workspace / "x.gwt"),
        ])
        assert rc == 1
        assert "--mapping" in capsys.readouterr().err


class TestSample:
    def test_grid_dimensions(self, workspace):
        out = str(workspace / "grid.png")
        rc = main(["sample", "--model", str(workspace / "base.gwt"),
                   "--seed", "2", "--count", "5", "--columns", "3", "-o", out])
        assert rc == 0
        img = png_io.decode_png(out)
        # 5 cells in 3 columns -> 2 rows of 12px cells
        assert img.shape == (3, 2 * 12, 3 * 12)

    def test_single_cell(self, workspace):
        out = str(workspace / "one.png")
        assert main(["sample", "--model", str(workspace / "base.gwt"),
                     "--count", "1", "--columns", "1", "-o", out]) == 0
        assert png_io.decode_png(out).shape == (3, 12, 12)

    def test_deterministic_bytes(self, workspace):
        a, b = workspace / "ga.png", workspace / "gb.png"
        args = ["sample", "--model", str(workspace / "blend.gwt"),
                "--seed", "9", "--count", "4", "--columns", "2"]
        assert main(args + ["-o", str(a)]) == 0
        assert main(args + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_count(self, workspace, capsys):
        rc = main(["sample", "--model", str(workspace / "base.gwt"),
                   "--count", "0", "-o", str(workspace / "x.png")])
        assert rc == 1
        assert capsys.readouterr().err.startswith("error:")


def _write_target(workspace, seed=4):
    ck = load(str(workspace / "base.gwt"))
    img = forward(ck, sample_z(ck, seed, 0), seed)
    path = workspace / "target.png"
    png_io.encode_png(img, str(path))
    return str(path)


class TestProjectAndToonify:
    def test_project_writes_latent_json(self, workspace):
        target = _write_target(workspace)
        out = str(workspace / "latent.json")
        rc = main(["project", "--model", str(workspace / "base.gwt"),
                   "--target", target, "--steps", "4", "-o", out,
                   "--recon-png", str(workspace / "recon.png")])
        assert rc == 0
        doc = json.loads((workspace / "latent.json").read_text())
        assert doc["space"] == "w"
        assert len(doc["values"]) == 8
        assert len(doc["loss_trace"]) == 4
        assert doc["final_loss"] >= 0.0
        assert png_io.decode_png(str(workspace / "recon.png")).shape == (3, 8, 8)

    def test_project_target_resolution_mismatch(self, workspace, capsys):
        # 12x12 grid PNG is not a valid 8x8 target
        grid = str(workspace / "grid12.png")
        main(["sample", "--model", str(workspace / "base.gwt"),
              "--count", "1", "--columns", "1", "-o", grid])
        rc = main(["project", "--model", str(workspace / "base.gwt"),
                   "--target", grid, "--steps", "2", "-o", str(workspace / "x.json")])
        assert rc == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_toonify_identity_blend_equals_reconstruction(self, workspace):
        target = _write_target(workspace)
        toon = workspace / "toon.png"
        recon = workspace / "trecon.png"
        rc = main(["toonify", "--base", str(workspace / "base.gwt"),
                   "--blended", str(workspace / "base.gwt"),
                   "--target", target, "--steps", "4",
                   "-o", str(toon), "--recon-png", str(recon),
                   "--latent-json", str(workspace / "tl.json")])
        assert rc == 0
        assert toon.read_bytes() == recon.read_bytes()
        assert len(json.loads((workspace / "tl.json").read_text())["values"]) == 8

    def test_toonify_blended_differs(self, workspace):
        target = _write_target(workspace)
        toon = workspace / "toon2.png"
        recon = workspace / "trecon2.png"
        rc = main(["toonify", "--base", str(workspace / "base.gwt"),
                   "--blended", str(workspace / "blend.gwt"),
                   "--target", target, "--steps", "4",
                   "-o", str(toon), "--recon-png", str(recon)])
        assert rc == 0
        assert toon.read_bytes() != recon.read_bytes()


class TestErrorSurface:
    def test_error_prefix_and_exit_code(self, capsys):
        assert main(["inspect", "/no/such/file.gwt"]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert err.strip().count("\n") == 0

    def test_bad_config_json(self, tmp_path, capsys):
        p = tmp_path / "cfg.json"
        p.write_text("{not json")
        rc = main(["init-base", "--config", str(p), "-o", str(tmp_path / "x.gwt")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err
