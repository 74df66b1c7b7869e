import csv
import io
import json

import numpy as np
import pytest

from ncss import cli, gf, pipeline, storage
from ncss.planner import SecurityProfile


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def stored_root(tmp_path):
    payload = np.random.default_rng(11).bytes(1024)
    infile = tmp_path / "input.bin"
    infile.write_bytes(payload)
    root = tmp_path / "demo"
    code = cli.main([
        "store", "--in", str(infile), "--root", str(root),
        "--d", "2", "--k", "8", "--mode", "strict", "--n", "4",
        "--pu", "1e-6", "--breach", "0.5,0.25",
    ])
    assert code == 0
    return payload, infile, root


class TestStoreFetch:
    def test_roundtrip_byte_identical(self, tmp_path, stored_root, capsys):
        payload, _, root = stored_root
        outfile = tmp_path / "recovered.bin"
        code, out, _ = run(
            capsys, "fetch", "--root", str(root), "--out", str(outfile)
        )
        assert code == 0
        assert outfile.read_bytes() == payload

    def test_fetch_by_manifest_path_alone(self, tmp_path, stored_root, capsys):
        payload, _, root = stored_root
        outfile = tmp_path / "again.bin"
        code, _, _ = run(
            capsys, "fetch", "--manifest", str(root / "manifest.json"),
            "--out", str(outfile),
        )
        assert code == 0
        assert outfile.read_bytes() == payload

    def test_store_defaults_n_to_auto(self, tmp_path, capsys):
        infile = tmp_path / "a.bin"
        infile.write_bytes(bytes(512))
        code, out, _ = run(
            capsys, "store", "--in", str(infile), "--root", str(tmp_path / "av"),
            "--d", "2", "--k", "8", "--mode", "strict",
            "--pu", "1e-6", "--breach", "0.5,0.25",
        )
        assert code == 0
        assert json.loads(out)["n"] >= 2

    def test_store_writes_layout_and_summary(self, stored_root, capsys):
        _, infile, root = stored_root
        assert (root / "manifest.json").exists()
        assert (root / "cloud_0" / "shard_000.bin").exists()
        assert (root / "cloud_1" / "shard_000.bin").exists()
        assert (root / "local" / "share.bin").exists()

    def test_cli_matches_library_byte_for_byte(self, tmp_path, stored_root):
        payload, _, cli_root = stored_root
        lib_root = storage.DirectoryRoot(tmp_path / "lib", clouds=2)
        pipeline.store_digits(
            pipeline.bytes_to_digits(payload, 2),
            lib_root,
            gf.FieldSpec(k=8, d=2),
            n=4,
            profile=SecurityProfile(breach=(0.5, 0.25), pu=1e-6),
        )
        for rel in ["cloud_0/shard_000.bin", "cloud_1/shard_000.bin", "local/share.bin"]:
            assert (cli_root / rel).read_bytes() == (
                tmp_path / "lib" / rel
            ).read_bytes()
        assert json.loads((cli_root / "manifest.json").read_text()) == json.loads(
            (tmp_path / "lib" / "manifest.json").read_text()
        )

    def test_auto_matrix_size(self, tmp_path, capsys):
        infile = tmp_path / "x.bin"
        infile.write_bytes(bytes(2048))
        code, out, _ = run(
            capsys, "store", "--in", str(infile), "--root", str(tmp_path / "auto"),
            "--d", "2", "--k", "8", "--mode", "strict", "--n", "auto",
            "--pu", "1e-6", "--breach", "0.5,0.5,0.5",
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["n"] >= 2

    def test_plan_dry_run_leaves_no_files(self, tmp_path, capsys):
        infile = tmp_path / "y.bin"
        infile.write_bytes(bytes(64))
        code, out, _ = run(
            capsys, "plan", "--in", str(infile),
            "--d", "2", "--k", "3", "--mode", "strict", "--n", "3",
            "--pu", "0.015625", "--breach", "0.5,0.25",
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["width"] == 3
        # 64 bytes -> 512 bits -> 171 elements of width 3, one pad digit
        assert summary["total_digits"] == 513
        assert summary["pad_count"] == 1
        assert not (tmp_path / "cloud_0").exists()


class TestUtilityCommands:
    def test_decode(self, capsys):
        code, out, _ = run(
            capsys, "decode", "--k", "3", "--d", "2",
            "--points", "1,2,3", "--elements", "7,3,1",
        )
        assert code == 0
        assert json.loads(out)["decoded"] == [1, 3, 5]

    def test_classify(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--k", "3", "--d", "2", "--alpha", "3",
            "--widths", "1,1,1", "--elements", "2,3,5", "--assignment", "0,2|1",
        )
        assert code == 0
        report = json.loads(out)
        assert report["strict"] is False
        assert report["alpha_bound_satisfied"] is True

    def test_optimize_prints_solution(self, capsys):
        code, out, _ = run(
            capsys, "optimize", "--m", "1024", "--d", "2", "--k", "8",
            "--p", "3", "--breach", "0.5", "--pu", "1e-6",
        )
        assert code == 0
        assert out.strip() == "n=2 l=1 f=96"

    def test_optimize_sweep_csv(self, capsys):
        code, out, _ = run(
            capsys, "optimize", "--m", "1024", "--d", "2", "--k", "8",
            "--p", "3", "--breach", "0.5", "--pu", "1e-6",
            "--sweep", "512,1024,4096",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 3

    def test_optimize_infeasible_exit_code(self, capsys):
        code, _, err = run(
            capsys, "optimize", "--m", "16", "--d", "2", "--k", "8",
            "--p", "3", "--breach", "0.5", "--pu", "1e-30",
        )
        assert code == 4
        assert "infeasible" in err

    def test_attack(self, stored_root, capsys):
        _, _, root = stored_root
        # cloud 1 holds almost the whole stream, so the residual guess is
        # tractable; cloud 0 holds a sliver and the simulation refuses it
        code, out, _ = run(
            capsys, "attack", "--root", str(root), "--cloud", "1",
            "--trials", "2000", "--seed", "1",
        )
        assert code == 0
        report = json.loads(out)
        assert report["observed"] + report["unknown"] == report["total_digits"]
        assert 0 <= report["empirical_guess_rate"] <= 1
        assert report["guess_probability"] <= report["pu"]
        code, _, err = run(
            capsys, "attack", "--root", str(root), "--cloud", "0",
            "--trials", "2000",
        )
        assert code == 2
        assert "unknown digits" in err

    def test_audit_single_and_grid(self, capsys):
        code, out, _ = run(
            capsys, "audit", "--k", "2", "--n", "3", "--w", "1", "--t", "2"
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["perfect"] == "True"
        code, out, _ = run(capsys, "audit", "--k", "2", "--n", "3", "--grid")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 3 * 4  # w in 1..3, t in 0..3

    def test_bench_mul_csv(self, capsys):
        code, out, _ = run(
            capsys, "bench", "--suite", "mul", "--k", "3",
            "--mul-count", "1000000", "--reps", "5",
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["scenario"] == "mul"


class TestConfigHandling:
    def test_config_file_with_flag_precedence(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "m": 1024, "d": 2, "k": 8, "p": 3, "breach": "0.5", "pu": 1e-6,
        }))
        code, out, _ = run(capsys, "optimize", "--config", str(cfg))
        assert code == 0
        assert out.strip() == "n=2 l=1 f=96"
        # a flag overrides the config file value
        code, out, _ = run(
            capsys, "optimize", "--config", str(cfg), "--m", "2048"
        )
        assert code == 0
        assert out.strip() != "n=2 l=1 f=96"

    def test_missing_required_option(self, capsys):
        code, _, err = run(capsys, "optimize", "--m", "100")
        assert code == 2
        assert "invalid configuration" in err

    def test_bad_mode(self, tmp_path, capsys):
        infile = tmp_path / "z.bin"
        infile.write_bytes(bytes(16))
        code, _, err = run(
            capsys, "store", "--in", str(infile), "--root", str(tmp_path / "r"),
            "--d", "2", "--k", "8", "--mode", "wild", "--n", "2",
            "--pu", "0.5", "--breach", "0.5",
        )
        assert code == 2

    def test_missing_input_file_is_pipeline_error(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "store", "--in", str(tmp_path / "absent.bin"),
            "--root", str(tmp_path / "r"),
            "--d", "2", "--k", "8", "--mode", "strict", "--n", "2",
            "--pu", "0.5", "--breach", "0.5",
        )
        assert code == 3

    def test_out_flag_writes_file(self, tmp_path, capsys):
        out_path = tmp_path / "result.txt"
        code, out, _ = run(
            capsys, "optimize", "--m", "1024", "--d", "2", "--k", "8",
            "--p", "3", "--breach", "0.5", "--pu", "1e-6",
            "--out", str(out_path),
        )
        assert code == 0
        assert out == ""
        assert out_path.read_text().strip() == "n=2 l=1 f=96"
