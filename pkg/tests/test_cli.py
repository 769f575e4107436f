import json

import pytest
from click.testing import CliRunner

from abelcount.cli import main
from abelcount.series import QSeries
from abelcount.verify import REFERENCE_HYPERELLIPTIC_COUNTS


@pytest.fixture
def runner():
    return CliRunner()


class TestNu:
    def test_formula(self, runner):
        result = runner.invoke(main, ["nu", "2", "4"])
        assert result.exit_code == 0 and result.output.strip() == "39"

    def test_all(self, runner):
        result = runner.invoke(main, ["nu", "2", "2", "--oracle", "all"])
        assert result.exit_code == 0
        assert result.output.splitlines() == ["formula: 15", "isotropic: 15", "closed: 15"]

    def test_threefold_all_skips_closed(self, runner):
        result = runner.invoke(main, ["nu", "2", "2", "2", "--oracle", "all"])
        assert result.exit_code == 0
        assert "closed" not in result.output

    def test_closed_rejected_for_three_factors(self, runner):
        result = runner.invoke(main, ["nu", "2", "2", "2", "--oracle", "closed"])
        assert result.exit_code == 2

    def test_bad_entry(self, runner):
        assert runner.invoke(main, ["nu", "0", "2"]).exit_code == 2


class TestTable:
    def test_hyperelliptic_csv(self, runner):
        result = runner.invoke(main, ["table", "hyperelliptic"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0].startswith("# ")
        assert lines[1] == "g,1,2,3,4,5,6,7,8,9,10"
        rows = {int(l.split(",")[0]): [int(x) for x in l.split(",")[1:]] for l in lines[2:]}
        assert rows == REFERENCE_HYPERELLIPTIC_COUNTS

    def test_stable_output(self, runner):
        a = runner.invoke(main, ["table", "hyperelliptic", "--format", "json"]).output
        b = runner.invoke(main, ["table", "hyperelliptic", "--format", "json"]).output
        assert a == b
        assert json.loads(a)["cells"][6][9] == 100

    def test_nu_table(self, runner):
        result = runner.invoke(main, ["table", "nu", "--format", "csv"])
        assert "2,4,39" in result.output.splitlines()

    def test_genus3_is_twice_genus2(self, runner):
        g3 = runner.invoke(main, ["table", "genus3", "--dmax", "4", "--format", "json"]).output
        g2 = runner.invoke(main, ["table", "genus2-quotient", "--dmax", "4",
                                  "--format", "json"]).output
        cells3, cells2 = json.loads(g3)["cells"], json.loads(g2)["cells"]
        assert cells3 == [[2 * v for v in row] for row in cells2]

    def test_plain_and_out(self, runner, tmp_path):
        out = tmp_path / "t.txt"
        result = runner.invoke(main, ["table", "hyperelliptic", "--gmax", "3", "--dmax", "5",
                                      "--format", "plain", "--out", str(out)])
        assert result.exit_code == 0 and result.output == ""
        assert "1650" in out.read_text()

    def test_bad_kind(self, runner):
        assert runner.invoke(main, ["table", "k3"]).exit_code == 2
        assert runner.invoke(main, ["table", "nu", "--format", "xml"]).exit_code == 2


class TestSeries:
    def test_json_roundtrip(self, runner):
        result = runner.invoke(main, ["series", "dthat1", "--qmax", "3", "--json"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["convention"] == "plain_p"
        series = QSeries.from_json(data)
        assert series[1].p_coeff(2) == -2

    def test_text(self, runner):
        result = runner.invoke(main, ["series", "gw11d", "--qmax", "1"])
        assert "q^0: p + 2 + p^-1" in result.output

    def test_dt2_window_error(self, runner):
        result = runner.invoke(main, ["series", "dt2", "--qmax", "8", "--window", "8"])
        assert result.exit_code == 2

    def test_env_default(self, runner):
        result = runner.invoke(main, ["series", "dt1", "--json"],
                               env={"ABELCOUNT_DEFAULT_QMAX": "2"})
        assert json.loads(result.output)["order"] == 2


class TestVerify:
    def test_pass(self, runner):
        result = runner.invoke(main, ["verify", "table1", "hyp3-row"])
        assert result.exit_code == 0
        reports = json.loads(result.output)
        assert [r["check"] for r in reports] == ["hyp3-row", "table1"]
        assert all(r["verdict"] == "pass" for r in reports)

    def test_not_all_pass(self, runner):
        result = runner.invoke(main, ["verify", "modular-identity", "--window", "8"])
        assert result.exit_code == 1
        assert json.loads(result.output)[0]["verdict"] == "skipped"

    def test_unknown(self, runner):
        assert runner.invoke(main, ["verify", "bogus"]).exit_code == 2

    def test_list(self, runner):
        result = runner.invoke(main, ["verify", "--list"])
        assert len(result.output.splitlines()) == 15

    def test_byte_identical(self, runner):
        args = ["verify", "gs-equals-qdqS", "dthat1-assembly", "--qmax", "6"]
        assert runner.invoke(main, args).output == runner.invoke(main, args).output


class TestValue:
    @pytest.mark.parametrize("args, expected", [
        (["fls", "3", "1", "1"], "-1/12"),
        (["quotient", "2", "2", "4"], "39"),
        (["hyperelliptic", "4", "7"], "23814"),
        (["genus1", "4"], "7/4"),
        (["gw", "3", "2", "2", "1"], "30"),
        (["dt", "2", "0", "0", "2"], "-5/2"),
        (["diagonal", "4"], "36"),
    ])
    def test_values(self, runner, args, expected):
        result = runner.invoke(main, ["value"] + args)
        assert result.exit_code == 0, result.output
        assert result.output.strip() == expected

    def test_dt_precondition(self, runner):
        assert runner.invoke(main, ["value", "dt", "0", "0", "0", "3"]).exit_code == 2
