import json
import math

import pytest

from katospec import cli

OPEN_OFF = "OFF\n4 3 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 1 2 3\n"


def run(argv):
    return cli.main(argv)


def test_mesh_info(capsys):
    assert run(["mesh-info", "--make", "icosphere:subdivisions=1,radius=1"]) == 0
    out = capsys.readouterr().out
    assert "vertices\t42" in out
    assert "euler_characteristic\t2" in out
    assert "betti_one\t0" in out


def test_mesh_info_flat_torus(capsys):
    assert run(["mesh-info", "--make", "flat_torus:nx=8,ny=10"]) == 0
    out = capsys.readouterr().out
    assert "betti_one\t2" in out
    assert "euler_characteristic\t0" in out


def test_mesh_info_model(capsys):
    assert run(["mesh-info", "--model", "kind=sphere,dim=3,radius=1,modes=10"]) == 0
    assert "ricci_lowest\t2.0" in capsys.readouterr().out


def test_mesh_info_bad_file(tmp_path, capsys):
    p = tmp_path / "open.off"
    p.write_text(OPEN_OFF)
    assert run(["mesh-info", "--mesh", str(p)]) == 2
    assert "open surface" in capsys.readouterr().err


def test_requires_exactly_one_input(capsys):
    assert run(["mesh-info"]) == 2
    assert (
        run(["mesh-info", "--make", "icosphere:", "--model", "kind=sphere,dim=3"]) == 2
    )


def test_spectrum_model(capsys):
    assert run(["spectrum", "--model", "kind=sphere,dim=2,radius=1,modes=4", "--modes", "4"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "index\teigenvalue\tresidual"
    eigs = [float(l.split("\t")[1]) for l in lines[1:]]
    assert eigs == [0.0, 2.0, 2.0, 2.0]


def test_spectrum_single_mode(capsys):
    assert run(["spectrum", "--model", "kind=sphere,dim=2,radius=1,modes=4", "--modes", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and lines[1].startswith("0\t0.0")


def test_spectrum_rerun_identical(capsys, tmp_path):
    args = ["spectrum", "--make", "icosphere:subdivisions=1", "--modes", "8",
            "--seed", "5", "--out", str(tmp_path / "a.tsv"), "--no-figures"]
    assert run(args) == 0
    args2 = list(args)
    args2[-2] = str(tmp_path / "b.tsv")
    assert run(args2) == 0
    assert (tmp_path / "a.tsv").read_bytes() == (tmp_path / "b.tsv").read_bytes()


def test_kato_constant_potential(capsys):
    assert run([
        "kato", "--make", "icosphere:subdivisions=1", "--potential", "constant:0.5",
        "--T", "2.0",
    ]) == 0
    out = capsys.readouterr().out
    kappa = float(out.splitlines()[0].split("\t")[1])
    assert kappa == pytest.approx(1.0, abs=1e-9)


def test_kato_ricci_neg_sphere_zero(capsys):
    assert run(["kato", "--make", "icosphere:subdivisions=1", "--potential", "ricci-neg",
                "--T", "1.0"]) == 0
    kappa = float(capsys.readouterr().out.splitlines()[0].split("\t")[1])
    assert kappa == pytest.approx(0.0, abs=1e-9)


def test_kato_threshold_mode(capsys):
    assert run([
        "kato", "--make", "icosphere:subdivisions=1", "--potential", "constant:0.8",
        "--threshold", "0.2",
    ]) == 0
    out = capsys.readouterr().out
    horizon = float(out.splitlines()[1].split("\t")[1])
    assert horizon == pytest.approx(0.25, rel=1e-5)


def test_kato_field_file(tmp_path, capsys):
    field = tmp_path / "field.txt"
    field.write_text("\n".join(["0.5"] * 42) + "\n")
    assert run([
        "kato", "--make", "icosphere:subdivisions=1",
        "--potential", f"file:{field}", "--T", "1.0",
    ]) == 0
    kappa = float(capsys.readouterr().out.splitlines()[0].split("\t")[1])
    assert kappa == pytest.approx(0.5, abs=1e-9)


def test_kato_series_with_figure(tmp_path, capsys):
    out = tmp_path / "series.tsv"
    assert run([
        "kato", "--make", "bumpy_sphere:subdivisions=2,amplitude=0.3,frequency=4,seed=7",
        "--potential", "ricci-neg", "--T", "1.0", "--series", "--out", str(out),
    ]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "horizon\tkappa"
    assert len(lines) == 34
    assert (tmp_path / "series.png").exists()


def test_constants_table(capsys):
    assert run(["constants", "--n", "3,4", "--delta", "0.5,0.9,1.0"]) == 0
    out = capsys.readouterr().out
    assert "out-of-domain" in out  # delta=0.5 row marked
    rows = [l.split("\t") for l in out.strip().splitlines()[1:]]
    delta1 = [r for r in rows if r[0] == "3" and r[1] == "1.0"][0]
    assert float(delta1[4]) == 1.0 and float(delta1[5]) == 1.0
    d09 = [r for r in rows if r[0] == "3" and r[1] == "0.9"][0]
    assert float(d09[4]) == pytest.approx(1.1500, abs=5e-4)
    assert float(d09[5]) == pytest.approx(1.0738, abs=5e-4)
    assert d09[6] == "1"


def test_verify_mini_config(tmp_path, capsys):
    cfg = {
        "seed": 42,
        "modes": 40,
        "manifolds": [{"kind": "icosphere", "subdivisions": 2, "radius": 1.0}],
        "theorems": ["betti", "buser"],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    json_out = tmp_path / "report.json"
    table_out = tmp_path / "report.tsv"
    code = run(["verify", "--config", str(cfg_path), "--json", str(json_out),
                "--out", str(table_out)])
    assert code == 0
    doc = json.loads(json_out.read_text())
    assert len(doc["reports"]) == 2
    assert (tmp_path / "report.png").exists()
    assert table_out.read_text().startswith("theorem\tmanifold\tstatus")

    # byte-identical rerun
    json_out2 = tmp_path / "report2.json"
    run(["verify", "--config", str(cfg_path), "--json", str(json_out2), "--no-figures"])
    assert json_out.read_bytes() == json_out2.read_bytes()


def test_verify_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert run(["verify", "--config", str(bad)]) == 2
    unk = tmp_path / "unk.json"
    unk.write_text(json.dumps({"manifolds": [], "theorems": ["nope"]}))
    assert run(["verify", "--config", str(unk)]) == 2


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        run(["spectrum", "--bogus"])
    assert exc.value.code == 2


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["kato", "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "--potential" in out and "default" in out
    assert "KATOSPEC_SEED" in out


def test_env_seed_override(monkeypatch, capsys):
    monkeypatch.setenv("KATOSPEC_SEED", "7")
    parser = cli.build_parser()
    args = parser.parse_args(["spectrum", "--make", "icosphere:"])
    assert args.seed == 7
    monkeypatch.setenv("KATOSPEC_SEED", "not-an-int")
    with pytest.raises(SystemExit):
        cli.build_parser()


def test_kato_shifted_potential_bumpy(capsys):
    assert run([
        "kato", "--make", "bumpy_sphere:subdivisions=2,amplitude=0.3,frequency=4,seed=7",
        "--potential", "shifted:0.5", "--T", "1.0",
    ]) == 0
    kappa = float(capsys.readouterr().out.splitlines()[0].split("\t")[1])
    assert kappa > 0


def test_spectrum_and_constants_figures(tmp_path):
    out = tmp_path / "spec.tsv"
    assert run(["spectrum", "--make", "icosphere:subdivisions=1", "--modes", "6",
                "--out", str(out)]) == 0
    assert (tmp_path / "spec.png").exists()
    ctab = tmp_path / "ctab.tsv"
    assert run(["constants", "--n", "3", "--delta", "0.85:1.0:6", "--out", str(ctab)]) == 0
    assert (tmp_path / "ctab.png").exists()
