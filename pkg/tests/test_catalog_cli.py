import json

import pytest

from h3nr import catalog
from h3nr import cli
from h3nr.cohomology import CohomologyData

from conftest import load, record


def test_catalog_orders():
    cat = catalog.load_catalog()
    for name in ["G_2_1", "G_27_3", "G_243_56", "G_3125_38", "S4", "A6", "PSL_2_8"]:
        e = cat[name]
        assert e.load().order == e.order
    assert sorted(e.name for e in catalog.family("Phi7") if e.order == 243) == \
        ["G_243_56", "G_243_57", "G_243_58", "G_243_59", "G_243_60"]


def test_presentation_examples():
    from h3nr import groups as grp
    assert grp.from_presentation("pc: n=[2]\na1^2 = 1").order == 2
    assert grp.from_presentation("perm: (4 5 6), (1 2 3 4 5)").order == 360
    G = load("G_27_3")
    assert G.order == 27 and G.exponent == 3


def test_unknown_entry():
    with pytest.raises(KeyError):
        catalog.entry("G_0_0")


def test_cyclic_record():
    r = record("G_243_1")
    assert r.H4 == [243]
    assert r.H4_p == [243] and r.H4_nr == [243] and r.H4_n == [243]
    assert r.H3_s == [] and r.H3_nr == []
    assert r.containment_chain_holds()


def test_record_json_round_trip():
    r = record("G_27_3")
    back = catalog.ResultRecord.from_json(r.to_json())
    assert back == r
    assert "timing" not in json.loads(r.to_json(timing=False))


def test_pipeline_is_deterministic():
    a = catalog.run_pipeline(catalog.entry("G_27_4"))
    b = catalog.run_pipeline(catalog.entry("G_27_4"))
    assert a.to_json(timing=False) == b.to_json(timing=False)


def test_two_group_record_has_na_fields():
    r = record("G_8_3")
    assert r.H4_n is None and r.H3_nr is None and r.H3_s is None
    row = catalog.emit_table([r]).splitlines()[1].split("\t")
    assert row[catalog.FIELDS.index("H4_n") + 1] == "n/a"
    assert r.containment_chain_holds()


def test_containment_chain_detects_violation():
    r = catalog.ResultRecord.from_json(record("G_27_3").to_json())
    r.H4 = [3, 3]
    r.generators = {"H4_p": [[1, 0]], "H4_n": [[0, 1]], "H4_nr": [[0, 1]]}
    assert not r.containment_chain_holds()


def test_format_invariants():
    assert catalog.format_invariants([3, 3, 9]) == "(Z/3)^2+Z/9"
    assert catalog.format_invariants([]) == "0"
    assert catalog.format_invariants(None) == "n/a"


def test_emit_table_formats():
    recs = [record("G_27_3")]
    tsv = catalog.emit_table(recs, "tsv").splitlines()
    assert len(tsv) == 2 and tsv[0].split("\t") == ["group"] + catalog.FIELDS
    md = catalog.emit_table(recs, "markdown").splitlines()
    assert md[0].startswith("| group") and len(md) == 3
    js = json.loads(catalog.emit_table(recs, "json"))
    assert js[0]["group"] == "G_27_3" and "timing" not in js[0]
    with pytest.raises(ValueError):
        catalog.emit_table(recs, "xml")


def test_disk_cache_round_trip(tmp_path):
    G = load("G_16_3")
    c1 = catalog.DiskCache(tmp_path)
    R1 = c1.get(G)
    files = list(tmp_path.glob("res-*.v1.pkl"))
    assert len(files) == 1
    c2 = catalog.DiskCache(tmp_path)
    R2 = c2.get(G)
    assert R2 is not R1 and R2.dims == R1.dims
    assert CohomologyData(R2, 4).torsion_coefficients == CohomologyData(R1, 4).torsion_coefficients
    # a file from another cache version is ignored
    stale = files[0].with_name(files[0].name.replace(".v1.", ".v0."))
    files[0].rename(stale)
    assert catalog.DiskCache(tmp_path).get(G).dims == R1.dims


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_cohomology(capsys):
    code, out, _ = run_cli(capsys, "cohomology", "G_8_3")
    assert code == 0
    assert "H4\t(Z/2)^2+Z/4" in out
    code, out, _ = run_cli(capsys, "cohomology", "G_8_3", "--json")
    assert json.loads(out)["H4"] == [2, 2, 4]


def test_cli_invariants(capsys):
    code, out, _ = run_cli(capsys, "h4p", "G_27_3", "--json")
    assert code == 0 and json.loads(out)["H4_p"] == json.loads(out)["H4"]
    code, out, _ = run_cli(capsys, "b0", "G_27_3", "--json")
    assert code == 0 and json.loads(out)["B0"] == []
    code, out, _ = run_cli(capsys, "h3nr", "G_27_3", "--json")
    assert code == 0 and json.loads(out)["H3_nr"] == []
    code, out, _ = run_cli(capsys, "verify", "G_27_3")
    assert code == 0 and "homotopy\tTrue" in out


def test_cli_exit_codes(capsys):
    assert run_cli(capsys, "stable", "G_8_3")[0] == cli.EXIT_REFUSED
    assert run_cli(capsys, "cohomology", "G_0_0")[0] == cli.EXIT_INPUT
    assert run_cli(capsys, "cohomology", "G_8_3", "--length", "3")[0] == cli.EXIT_INPUT
    assert run_cli(capsys, "nonsense")[0] == cli.EXIT_INPUT
    assert run_cli(capsys, "cohomology", "G_8_3", "--strategy", "bogus")[0] == cli.EXIT_INPUT


def test_cli_presentation_file(capsys, tmp_path):
    p = tmp_path / "c6.txt"
    p.write_text("pc: n=[2,3]\na1^2 = 1\na2^3 = 1\n")
    code, out, _ = run_cli(capsys, "cohomology", str(p), "--json")
    assert code == 0 and json.loads(out)["H2"] == [6]


def test_cli_table(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "table", "G_9_2,G_27_3", "--format", "tsv", "--cache-dir", str(tmp_path))
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3 and lines[1].startswith("G_9_2")


def test_cli_selftest(capsys):
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 0
