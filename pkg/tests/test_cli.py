import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from sixvertex.cli import build_parser, load_defaults, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_example(capsys):
    code, out, _ = run(["exact", "--x", "0/1", "--n", "3"], capsys)
    assert code == 0
    assert "Z_3 = 80" in out
    assert "h_0 = 2" in out


def test_oracle_example(capsys):
    code, out, _ = run(["oracle", "--n", "2", "--a", "1", "--b", "1", "--c", "2"], capsys)
    assert code == 0
    assert "configurations: 2" in out and "Z = 8" in out


def test_oracle_matches_exact_via_x(tmp_path, capsys):
    p = tmp_path / "o.json"
    assert main(["oracle", "--n", "4", "--x", "1/3", "--out", str(p)]) == 0
    capsys.readouterr()
    data = json.loads(p.read_text())
    from sixvertex.exact import partition_exact

    assert Fraction(data["Z"]) == partition_exact(4, Fraction(1, 3)).Z
    assert data["count"] == 42


def test_oracle_dump_configs(tmp_path, capsys):
    p = tmp_path / "o.json"
    main(["oracle", "--n", "3", "--dump-configs", "--out", str(p)])
    capsys.readouterr()
    data = json.loads(p.read_text())
    assert len(data["configurations"]) == 7
    assert sum(data["configurations"][0]["counts"]) == 9


def test_toda_example(capsys):
    code, out, _ = run(["toda", "--x", "1/3", "--n-max", "20", "--threads", "1"], capsys)
    assert code == 0
    assert "residual 0 for all N" in out


def test_toda_parallel_same_output(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["toda", "--x", "2/5", "--n-max", "8", "--threads", "1", "--format", "csv", "--out", str(a)])
    main(["toda", "--x", "2/5", "--n-max", "8", "--threads", "3", "--format", "csv", "--out", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["exact", "--x", "0.5"],
        ["exact", "--x", "1/1"],
        ["exact", "--x", "abc"],
        ["exact", "--n", "0"],
        ["oracle", "--a", "-1"],
        ["fit", "--n-min", "50", "--n-max", "40"],
        ["compare", "--n-min", "16", "--n-max", "20"],
        ["bogus"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    capsys.readouterr()


def test_oracle_over_cap_exit_2(capsys):
    code, _, err = run(["oracle", "--n", "7"], capsys)
    assert code == 2 and "refused" in err


def test_numeric_failure_exit_1(capsys):
    code, _, err = run(["asym", "--x", "0/1", "--n-min", "20", "--n-max", "21", "--prec", "16"], capsys)
    assert code == 1 and "numeric failure" in err


def test_manifest_and_json(tmp_path, capsys):
    p = tmp_path / "sub" / "exact.json"
    assert main(["exact", "--x=-3/5", "--n", "4", "--out", str(p)]) == 0
    capsys.readouterr()
    data = json.loads(p.read_text())
    assert "schema_version" in data
    man = json.loads((tmp_path / "sub" / "exact.json.manifest.json").read_text())
    assert man["command"] == "exact" and man["data_file"] == "exact.json"
    assert man["inputs"]["x"] == "-3/5"
    assert "numpy" in man["versions"] and "elapsed_seconds" in man


def test_json_round_trip(tmp_path, capsys):
    from sixvertex.exact import HankelChain, hankel_chain

    p = tmp_path / "e.json"
    main(["exact", "--x", "2/7", "--n", "6", "--out", str(p)])
    capsys.readouterr()
    data = json.loads(p.read_text())
    assert json.loads(json.dumps(data)) == data
    chain = HankelChain.from_dict(data)
    assert chain == hankel_chain(6, Fraction(2, 7))


@pytest.mark.parametrize(
    "argv",
    [
        ["exact", "--x", "1/3", "--n", "5", "--format", "csv"],
        ["asym", "--x", "1/3", "--n-min", "16", "--n-max", "20", "--format", "csv"],
        ["eqm", "--x", "1/3", "--grid", "21", "--format", "csv"],
        ["rhp", "--x", "0/1", "--n", "10", "--format", "json"],
        ["phase", "--x", "1/3", "--y-count", "3", "--format", "csv"],
        ["fit", "--x", "0/1", "--n-min", "16", "--n-max", "30", "--format", "json"],
        ["compare", "--x", "0/1", "--n-min", "16", "--n-max", "26", "--format", "csv"],
    ],
)
def test_deterministic_output(argv, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a), "--threads", "1"]) == 0
    assert main(argv + ["--out", str(b), "--threads", "1"]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    if "csv" in argv:
        rows = list(csv.reader(a.read_text(encoding="utf-8").splitlines()))
        assert len(rows) >= 2 and all(len(r) == len(rows[0]) for r in rows)
    else:
        assert "schema_version" in json.loads(a.read_text())


def test_compare_boundary_note(capsys):
    code, out, _ = run(["compare", "--x", "9/10", "--n-min", "16", "--n-max", "25"], capsys)
    assert code == 0 and "close to the boundary" in out


def test_defaults_mirror_help():
    d = load_defaults()
    p = build_parser()
    args = p.parse_args(["exact"])
    assert args.x.value == Fraction(d["x"])
    assert args.n == d["n"] and args.format == d["format"] and args.digits == d["digits"]
    args = p.parse_args(["fit"])
    assert (args.n_min, args.n_max, args.prec) == (d["n_min"], d["n_max"], d["prec"])
    args = p.parse_args(["phase"])
    assert (args.y_max, args.y_count, args.sweep) == (d["y_max"], d["y_count"], d["sweep"])


def test_console_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "sixvertex.cli", "exact", "--n", "2"], capture_output=True, text=True, check=True
    )
    assert "Z_2 = 8" in r.stdout
