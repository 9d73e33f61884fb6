import os

import pytest

from ellog.cli import main


def test_stage_ordering_errors(tmp_path):
    out = str(tmp_path / "r")
    assert main(["basis", "--out", out]) == 3
    assert main(["harvest", "--out", out]) == 3
    assert main(["dlog", "--plant", "5", "--out", out]) == 3


def test_search_and_basis_artifacts(tmp_path):
    out = str(tmp_path / "r")
    assert main(["search", "--p", "5", "--k", "9", "--seed", "0",
                 "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "curve.txt"))
    assert os.path.exists(os.path.join(out, "config.json"))
    assert main(["basis", "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "basis.json"))
    # deterministic reruns
    with open(os.path.join(out, "basis.json")) as fh:
        first = fh.read()
    assert main(["basis", "--out", out]) == 0
    with open(os.path.join(out, "basis.json")) as fh:
        assert fh.read() == first


def test_search_exhausted_exit_code(tmp_path):
    # k = 3 over F_5 exists, but an absurd k cannot fit any level's window
    out = str(tmp_path / "r")
    rc = main(["search", "--p", "5", "--k", "2", "--out", out])
    assert rc in (2, 5)


def test_full_pipeline_artifacts(pipeline):
    outdir = pipeline["dir"]
    for name in ("curve.txt", "basis.json", "relations.txt", "logs.txt"):
        assert os.path.exists(os.path.join(outdir, name))


def test_dlog_command_planted(pipeline, capsys):
    outdir = pipeline["dir"]
    assert main(["dlog", "--plant", "12345", "--out", outdir]) == 0
    out = capsys.readouterr().out
    assert "log mod M = 12345" in out
    assert "VERIFIED" in out


def test_dlog_command_hex_target(pipeline, capsys):
    basis = pipeline["basis"]
    ext = basis.ext
    g = pipeline["g"]
    z = ext.pow_(g, 777)
    val = 0
    for c in reversed(z):
        val = val * basis.q + c
    assert main(["dlog", "--target", hex(val), "--out", pipeline["dir"]]) == 0
    out = capsys.readouterr().out
    assert "VERIFIED" in out and "log mod M = 777" in out


def test_verify_command(pipeline):
    assert main(["verify", "--sample", "25", "--log-sample", "8",
                 "--out", pipeline["dir"]]) == 0


def test_stats_command(capsys):
    assert main(["stats", "--degree", "4", "--samples", "3000",
                 "--q", "121", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "rate 0.7" in out


def test_relations_file_belongs_to_basis(pipeline, tmp_path):
    # a relations file from another basis is rejected on load
    from ellog.basis import find_basis
    from ellog.harvest import build_factor_base, read_relations
    other = find_basis(5, 1, 7, seed=0)
    fb = build_factor_base(other, 3)
    with pytest.raises(ValueError):
        read_relations(os.path.join(pipeline["dir"], "relations.txt"), fb)
