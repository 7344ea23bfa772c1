import io
import json
from fractions import Fraction

import pytest

from simplicity.cli import main, parse_grid
from simplicity.gamedoc import dumps
from simplicity.mechanisms import AuctionParams, TradeParams, double_auction, second_price
from simplicity.witness import witness_from_json


def gen(capsys, *argv):
    assert main(["gen", *argv]) == 0
    return capsys.readouterr().out


def check(capsys, monkeypatch, text, *argv):
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code = main(["check", "-", *argv])
    out = capsys.readouterr()
    return code, [json.loads(ln) for ln in out.out.splitlines()], out.err


def test_parse_grid():
    assert parse_grid("0..3") == [0, 1, 2, 3]
    assert parse_grid("0..1:1/2") == [0, Fraction(1, 2), 1]
    assert parse_grid("1/2,3") == [Fraction(1, 2), 3]


def test_ascending_osp_holds(capsys, monkeypatch):
    text = gen(capsys, "ascending", "--bidders", "2", "--values", "0..3")
    code, (report,), _ = check(capsys, monkeypatch, text, "--criterion", "osp")
    assert code == 0 and report["holds"] and report["mechanism"] == "ascending"
    assert report["evaluations"] > 0 and report["wall_time"] >= 0


def test_second_price_osp_fails_with_overbid(capsys, monkeypatch, tmp_path):
    path = tmp_path / "secondprice.game"
    assert main(["gen", "second-price", "-o", str(path)]) == 0
    code = main(["check", str(path), "--criterion", "osp"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1 and not report["holds"]
    w = report["witness"]
    assert int(w["deviation"][w["infoset"]]) > int(w["plan"][w["infoset"]])
    assert Fraction(w["best"]) > Fraction(w["worst"])
    assert witness_from_json(w).replay(second_price(AuctionParams(2)))


def test_broken_file_exits_two(capsys, tmp_path):
    path = tmp_path / "broken.game"
    path.write_text("gamedoc/1\nnode 0 decision\n")
    assert main(["check", str(path), "--criterion", "sp"]) == 2
    out = capsys.readouterr()
    assert "error" in json.loads(out.out) and "broken.game" in out.err


def test_usage_errors_exit_two(capsys):
    assert main(["check", "-", "--criterion", "sp", "--frobnicate"]) == 2
    assert main(["gen", "nonsense"]) == 2
    assert main(["check", "/no/such/file", "--criterion", "sp"]) == 2


def test_validate(capsys, tmp_path):
    good = tmp_path / "good.game"
    good.write_text(dumps(second_price(AuctionParams(2))))
    assert main(["validate", str(good)]) == 0
    assert json.loads(capsys.readouterr().out)["nodes"] == 31
    bad = tmp_path / "bad.game"
    bad.write_text("gamedoc/1\nplayers a\nroot 0\nnode 0 terminal x\n")
    assert main(["validate", str(bad)]) == 2
    report = json.loads(capsys.readouterr().out)
    assert not report["valid"] and report["errors"][0].startswith("4:")


def test_jobs_keep_input_order(capsys, tmp_path):
    paths = []
    for name, argv in [("a", ["second-price"]), ("b", ["dynamic-rp", "--agents", "2",
                                                         "--goods", "2"]),
                       ("c", ["ascending", "--values", "0..2"])]:
        p = tmp_path / f"{name}.game"
        assert main(["gen", *argv, "-o", str(p)]) == 0
        paths.append(str(p))
    code = main(["check", *paths, "--criterion", "osp", "--jobs", "3"])
    reports = [json.loads(ln) for ln in capsys.readouterr().out.splitlines()]
    assert code == 1
    assert [r["file"] for r in reports] == paths
    assert [r["holds"] for r in reports] == [False, True, True]


def test_belief_file(capsys, monkeypatch, tmp_path):
    text = gen(capsys, "double-auction", "--alpha", "1", "--prices", "0..10")
    beliefs = tmp_path / "beliefs.game"
    beliefs.write_text("gamedoc/1\n# seller is sure the buyer is low\n"
                       "belief low 0 1 V=1/2\n")
    code, (report,), _ = check(capsys, monkeypatch, text, "--criterion", "strategic",
                               "--belief", str(beliefs))
    assert code == 0 and report["strategies"] == "pure"
    assert report["certificate"]["scope"] == "holds on supplied family"
    beliefs.write_text("gamedoc/1\nbelief low 0 1 V=99\n")
    code, _, err = check(capsys, monkeypatch, text, "--criterion", "strategic",
                         "--belief", str(beliefs))
    assert code == 2 and "V=99" in err


def test_half_alpha_is_not_strategically_simple(capsys, monkeypatch):
    text = gen(capsys, "double-auction")
    code, (report,), _ = check(capsys, monkeypatch, text, "--criterion", "strategic")
    assert code == 1 and report["witness"]["kind"]
    assert witness_from_json(report["witness"]).replay(double_auction(TradeParams()))


def test_foresight_options(capsys, monkeypatch, tmp_path):
    text = gen(capsys, "ascending", "--values", "0..3")
    assert check(capsys, monkeypatch, text, "--criterion", "one-step")[0] == 0
    assert check(capsys, monkeypatch, text, "--criterion", "strong-osp")[0] == 1
    assert check(capsys, monkeypatch, text, "--criterion", "f-simple",
                 "--foresight", "self")[0] == 1
    # A table naming only the anchor behaves like self foresight.
    table = tmp_path / "f.game"
    table.write_text("gamedoc/1\nforesight \"asc:1@0|\" \"asc:1@0|\"\n")
    code, (report,), _ = check(capsys, monkeypatch, text, "--criterion", "f-simple",
                               "--foresight", str(table))
    assert code == 1
    code, _, err = check(capsys, monkeypatch, text, "--criterion", "f-simple",
                         "--foresight", "doc")
    assert code == 2 and "foresight" in err


def test_budget_flag_and_environment(capsys, monkeypatch):
    text = gen(capsys, "static-rp")
    code, (report,), err = check(capsys, monkeypatch, text, "--criterion", "sp",
                                 "--budget", "100")
    assert code == 2 and "budget" in report["error"]
    monkeypatch.setenv("SIMPLICITY_BUDGET", "100")
    assert check(capsys, monkeypatch, text, "--criterion", "sp")[0] == 2


def test_wgsp_options(capsys, monkeypatch):
    text = gen(capsys, "ascending", "--values", "0..2")
    code, (report,), _ = check(capsys, monkeypatch, text, "--criterion", "wgsp",
                               "--coalition-size", "2")
    assert code == 0 and report["criterion"] == "wgsp"
