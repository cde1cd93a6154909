import json

import numpy as np

from pytest import fixture
from pytest import mark
from pytest import raises

from app import main
from src.cli.commands import exit_code_for
from src.cli.parsing import parse_complex
from src.cli.parsing import parse_decades
from src.cli.parsing import parse_point
from src.errors import AuditFailure
from src.errors import CampaignFailure
from src.errors import DegenerateInputError
from src.errors import DomainError
from src.errors import NumericalFailure
from src.errors import PreconditionError
from src.errors import SeedFailure
from src.errors import UsageError


@fixture
def ball_json(domain_file):
    return domain_file({"variant": "ball", "dim": 2})


@mark.parametrize("token expected".split(), (("0.9", 0.9),
                                             ("-0.5", -0.5),
                                             ("0.4i", 0.4j),
                                             ("-i", -1j),
                                             ("0.1-0.2i", 0.1 - 0.2j),
                                             ("1e-3+2e-2i", 1e-3 + 2e-2j)))
def test_parse_complex(token, expected):
    assert parse_complex(token) == expected


@mark.parametrize("token", ("", "abc", "1+", "0.1i0.2", "1..2"))
def test_parse_complex_rejects(token):
    with raises(UsageError):
        parse_complex(token)


def test_parse_point_and_decades():
    assert np.array_equal(parse_point("0.9,0.1-0.2i"), [0.9, 0.1 - 0.2j])
    with raises(UsageError):
        parse_point("0.9,,0.1")
    assert parse_decades("1e-2,1e-3") == (1e-2, 1e-3)
    with raises(UsageError):
        parse_decades("1e-2,x")


def test_distance_of_equal_points(ball_json, capsys):
    assert main(["distance", ball_json, "0.3,0", "0.3,0"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["display"] == "0.000000"
    assert payload["value"] == 0.0


def test_distance_outside_domain(ball_json):
    assert main(["distance", ball_json, "1.2,0", "0.3,0"]) == 1


def test_malformed_literal(ball_json, capsys):
    assert main(["distance", ball_json, "0.3,zz", "0.3,0"]) == 1
    assert "malformed" in capsys.readouterr().err


def test_missing_domain_file(tmp_path):
    assert main(["distance", str(tmp_path / "nope.json"), "0.3,0", "0.1,0"]) == 1


def test_unknown_subcommand():
    assert main(["frobnicate"]) == 1


def test_version(capsys):
    with raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "lempertkit" in capsys.readouterr().out


def test_csv_output_and_out_file(ball_json, tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert main(["distance", ball_json, "0.3,0", "0.3,0", "--format", "csv", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == "converged,display,lower,residual,upper,value"
    assert out.read_text() == text


def test_scale_on_ball(ball_json, capsys):
    code = main(["scale", ball_json, "0.9,0.1", "0.9,-0.1", "--degree", "8", "--grid", "64"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert np.allclose(payload["map"]["dilation"], 1.0)
    assert 0 < payload["params"]["t"] < 1
    identity = payload["touching_identity"]
    assert abs(identity["lhs"] - identity["rhs"]) < 1e-9


def test_verify_empty_campaign(ball_json, tmp_path, capsys):
    code = main(["verify", ball_json, "--pairs", "0", "--oracle", "--workers", "1", "--out", str(tmp_path)])
    summary = json.loads(capsys.readouterr().out)
    assert code == 0
    assert summary["passed"] is True
    assert (tmp_path / "campaign.csv").exists()


def test_verify_without_out_writes_nothing(ball_json, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["verify", ball_json, "--pairs", "0", "--oracle", "--workers", "1"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True
    assert sorted(p.name for p in tmp_path.iterdir()) == ["ball.json"]


@mark.parametrize("error code".split(), ((NumericalFailure("overflow"), 2),
                                         (SeedFailure("no disc"), 2),
                                         (CampaignFailure("budget"), 2),
                                         (DomainError("outside"), 1),
                                         (PreconditionError("too deep"), 1),
                                         (DegenerateInputError("z = w"), 1),
                                         (AuditFailure("not convex"), 1),
                                         (UsageError("bad literal"), 1)))
def test_exit_code_for_each_error_class(error, code):
    assert exit_code_for(error) == code


def test_numerical_failure_exits_flagged(ball_json, monkeypatch):
    def fail(*args, **kwargs):
        raise NumericalFailure("tanh^-1 overflow")

    monkeypatch.setattr("src.cli.commands.solve_extremal_pair", fail)
    assert main(["distance", ball_json, "0.3,0", "0.1,0"]) == 2
