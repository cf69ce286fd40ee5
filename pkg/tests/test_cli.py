import json

from kocover.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds_inline(capsys):
    code, out, _ = invoke(capsys, "bounds", "--dim", "3", "--cat-u", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["value"] == 2
    assert any(t["rule"] == "classifying-average" for t in data["trace"])


def test_bounds_fibration(capsys):
    code, out, _ = invoke(capsys, "bounds", "--dim", "7", "--base-dim", "4",
                          "--fiber-dim", "3", "--json")
    assert code == 0
    assert json.loads(out)["value"] == 5


def test_complex_info_and_dual(capsys):
    code, out, _ = invoke(capsys, "complex", "info", "--builtin", "torus-7", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["euler_characteristic"] == 0 and data["dim"] == 2

    code, out, _ = invoke(capsys, "complex", "dual", "--builtin",
                          "boundary-delta-3", "--m", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["cells_by_dim"] == {"0": 4}
    assert data["dim"] == 0


def test_complex_skeleton_and_bary(capsys):
    code, out, _ = invoke(capsys, "complex", "skeleton", "--builtin",
                          "boundary-delta-3", "--m", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert len(data["facets"]) == 6

    code, out, _ = invoke(capsys, "complex", "bary", "--builtin", "delta-2", "--json")
    assert code == 0
    data = json.loads(out)
    assert len(data["vertices"]) == 7
    assert len(data["facets"]) == 6


def test_unknown_builtin_is_usage_error(capsys):
    code, _, err = invoke(capsys, "complex", "info", "--builtin", "nope")
    assert code == 2
    assert "unknown builtin" in err


def test_cover_round_trip(tmp_path, capsys):
    out_file = tmp_path / "bundle.json"
    code, _, _ = invoke(capsys, "cover", "build", "--builtin", "boundary-delta-3",
                        "--r", "1", "--m", "2", "--out", str(out_file))
    assert code == 0
    code, out, _ = invoke(capsys, "cover", "verify", "--in", str(out_file), "--json")
    assert code == 0
    assert json.loads(out)["ok"]

    code, out, _ = invoke(capsys, "cover", "kcheck", "--in", str(out_file),
                          "--k", "1", "--skeleton", "1", "--json")
    assert code == 0
    assert json.loads(out)["is_k_cover"]


def test_cover_build_infeasible_fails(capsys, tmp_path):
    code, _, err = invoke(capsys, "cover", "build", "--builtin", "delta-2",
                          "--r", "1", "--m", "4",
                          "--out", str(tmp_path / "x.json"))
    assert code == 1
    assert "unattainable" in err


def test_cover_build_m_below_n_usage_error(capsys, tmp_path):
    code, _, err = invoke(capsys, "cover", "build", "--builtin", "delta-2",
                          "--r", "0", "--m", "1",
                          "--out", str(tmp_path / "x.json"))
    assert code == 2
    assert "below the minimal admissible" in err


def test_product_round_trip(tmp_path, capsys):
    out_file = tmp_path / "product.json"
    code, _, _ = invoke(capsys, "product", "build", "--x", "boundary-delta-3",
                        "--b", "s1", "--out", str(out_file))
    assert code == 0
    code, out, _ = invoke(capsys, "product", "verify", "--in", str(out_file), "--json")
    assert code == 0
    assert json.loads(out)["ok"]


def test_cuplength(capsys):
    code, out, _ = invoke(capsys, "cuplength", "--builtin", "rp2-6", "--json")
    assert code == 0
    assert json.loads(out)["cuplength_mod2"] == 2


def test_deterministic_output(tmp_path, capsys):
    outs = []
    for i in range(2):
        f = tmp_path / f"b{i}.json"
        code, _, _ = invoke(capsys, "cover", "build", "--builtin", "s1",
                            "--r", "0", "--m", "3", "--out", str(f))
        assert code == 0
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]

    seeds = []
    for i in range(2):
        f = tmp_path / f"r{i}.json"
        code, _, _ = invoke(capsys, "cover", "build", "--builtin", "random:1:5:42",
                            "--r", "0", "--m", "2", "--out", str(f))
        assert code == 0
        seeds.append(f.read_bytes())
    assert seeds[0] == seeds[1]


def test_complex_from_file(tmp_path, capsys):
    path = tmp_path / "cx.json"
    path.write_text(json.dumps({"name": "edge", "vertices": ["a", "b"],
                                "facets": [["a", "b"]]}))
    code, out, _ = invoke(capsys, "complex", "info", "--in", str(path), "--json")
    assert code == 0
    assert json.loads(out)["dim"] == 1
