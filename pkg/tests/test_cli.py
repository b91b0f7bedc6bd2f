import json

from secmatch.cli import main


def test_simulate_writes_row(tmp_path, capsys):
    out = tmp_path / "rows.json"
    rc = main(["simulate", "--algorithm", "edge", "--family", "sparse-random",
               "--n", "6", "--density", "0.8", "--trials", "50", "--seed", "4",
               "--out", str(out), "--format", "json"])
    assert rc == 0
    assert "mean_ratio=" in capsys.readouterr().out
    rows = json.loads(out.read_text())
    assert rows[0]["algorithm"] == "edge"


def test_simulate_then_report_round_trip(tmp_path):
    rows = tmp_path / "rows.json"
    main(["simulate", "--algorithm", "ordinal", "--family", "hard-ordinal",
          "--n", "30", "--l", "15", "--trials", "2000", "--seed", "1",
          "--out", str(rows), "--format", "json"])
    out = tmp_path / "rows.csv"
    rc = main(["report", str(rows), "--out", str(out), "--format", "csv"])
    assert rc == 0
    header = out.read_text().splitlines()[0]
    assert header.startswith("algorithm,family,")


def test_analyze_tables(tmp_path, capsys):
    rc = main(["analyze", "edge-schedule", "--m", "10"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "t,alpha"
    assert len(out.splitlines()) == 11

    rc = main(["analyze", "match-probability", "--n", "20", "--k", "10"])
    assert rc == 0
    assert capsys.readouterr().out.splitlines()[0] == "t,p_closed"

    path = tmp_path / "sweep.csv"
    rc = main(["analyze", "threshold-sweep", "--n", "12", "--out", str(path)])
    assert rc == 0
    assert path.read_text().splitlines()[0] == "l,value"


def test_input_errors_exit_one(capsys):
    rc = main(["simulate", "--algorithm", "vertex", "--family", "hard-ordinal",
               "--n", "10", "--trials", "5", "--seed", "0"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err

    rc = main(["analyze", "match-probability", "--n", "10", "--k", "2"])
    assert rc == 1


def test_verify_exits_zero(capsys):
    rc = main(["verify"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "invariant checks passed" in out


def test_ceiling_sweep_table(tmp_path):
    path = tmp_path / "ceil.csv"
    rc = main(["analyze", "ceiling-sweep", "--n-min", "10", "--n", "30",
               "--out", str(path)])
    assert rc == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "n,l_star,value,gap_to_5_12"
    assert len(lines) == 22
    for line in lines[1:]:
        n, l_star, value, gap = line.split(",")
        assert float(value) - 5 / 12 == float(gap)
