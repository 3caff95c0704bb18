import io
import json
import math

from openpyxl import load_workbook

from app.cli import cli, format_cell, read_csv, render_table


def invoke(runner, app, *args):
    return runner.invoke(cli, list(args), obj=app)


def csv_rows(result):
    return read_csv(io.StringIO(result.stdout))


class TestListCommand:
    """`list` prints one row per catalog entry"""

    def test_csv(self, runner, app):
        result = invoke(runner, app, "list", "--format", "csv")
        assert result.exit_code == 0, result.output
        columns, rows = csv_rows(result)
        assert columns[:3] == ["name", "N", "kind"]
        assert len(rows) == len(app.catalog)
        segment = next(r for r in rows if r["name"] == "segment")
        assert segment["D"] == 1.0 and segment["strong"] == "true"


class TestTubeCommand:
    """`tube` samples the expansion against the oracle"""

    def test_segment_exact(self, runner, app):
        result = invoke(runner, app, "tube", "--entry", "segment", "--t", "0.25", "--format", "csv")
        assert result.exit_code == 0, result.output
        columns, rows = csv_rows(result)
        assert columns == ["t", "formula", "oracle", "abs_err", "rel_err", "tail_bound"]
        assert abs(rows[0]["formula"] - 1.5) < 1e-12, f"V(0.25) = {rows[0]['formula']}"
        assert rows[0]["oracle"] == 1.5

    def test_output_is_reproducible(self, runner, app):
        args = ("tube", "--entry", "cantor_string", "--t-count", "5", "--K-trunc", "50", "--format", "csv")
        first = invoke(runner, app, *args)
        second = invoke(runner, app, *args)
        assert first.exit_code == 0, first.output
        assert first.stdout == second.stdout, "same inputs must give byte-identical output"

    def test_terms(self, runner, app):
        result = invoke(runner, app, "tube", "--entry", "segment", "--terms", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        omegas = sorted(row[0] for row in payload["rows"])
        assert omegas == [0.0, 1.0], f"segment terms sit at s = 0 and s = 1, got {omegas}"

    def test_out_file(self, runner, app, tmp_path):
        target = tmp_path / "curve.csv"
        result = invoke(runner, app, "tube", "--entry", "segment", "--t", "0.5", "--format", "csv",
                        "--out", str(target))
        assert result.exit_code == 0, result.output
        assert result.stdout == ""
        assert "📊 wrote" in result.stderr
        _, rows = read_csv(str(target))
        assert abs(rows[0]["formula"] - 2.0) < 1e-12

    def test_validity_error_exit_code(self, runner, app):
        result = invoke(runner, app, "tube", "--entry", "cantor_string", "--t", "0.9")
        assert result.exit_code == 4
        assert "❌ ValidityError" in result.stderr


class TestDimsCommand:
    """`dims` lists complex dimensions with residues"""

    def test_cantor_string(self, runner, app):
        result = invoke(runner, app, "dims", "--entry", "cantor_string", "--im-max", "20", "--format", "csv")
        assert result.exit_code == 0, result.output
        _, rows = csv_rows(result)
        D = math.log(2) / math.log(3)
        on_line = [r for r in rows if abs(r["re_omega"] - D) < 1e-12]
        # |k| <= 3 with period 2 pi / log 3
        assert len(on_line) == 7, f"expected 7 poles on Re s = D, got {len(on_line)}"
        assert any(r["re_omega"] == 0.0 and abs(r["res_re"] + 2) < 1e-12 for r in rows), "pole at 0 missing"
        assert all(r["order"] == 1 for r in rows)

    def test_window_entry_uses_catalog_screen(self, runner, app):
        result = invoke(runner, app, "dims", "--entry", "a_string", "--format", "csv")
        assert result.exit_code == 0, result.output
        _, rows = csv_rows(result)
        assert sorted(r["re_omega"] for r in rows) == [0.0, 0.5]


class TestZetaCommand:
    """`zeta` evaluates closed forms and numeric cross-checks"""

    def test_closed_form(self, runner, app):
        result = invoke(runner, app, "zeta", "--entry", "segment", "--s", "2", "--format", "csv")
        assert result.exit_code == 0, result.output
        _, rows = csv_rows(result)
        # 2 delta^s / s with delta = 2
        assert abs(rows[0]["re_zeta"] - 4.0) < 1e-12 and rows[0]["im_zeta"] == 0.0

    def test_numeric_tube(self, runner, app):
        result = invoke(runner, app, "zeta", "--entry", "segment", "--s", "2", "--kind", "tube", "--numeric",
                        "--format", "csv")
        assert result.exit_code == 0, result.output
        _, rows = csv_rows(result)
        assert abs(rows[0]["re_zeta"] - 6.0) < 1e-9

    def test_monte_carlo_columns(self, runner, app):
        result = invoke(runner, app, "zeta", "--entry", "gasket", "--s", "2.5,1", "--numeric", "--format", "csv",
                        "--samples", "10000")
        assert result.exit_code == 0, result.output
        columns, rows = csv_rows(result)
        assert columns[-2:] == ["stderr_re", "stderr_im"]
        assert rows[0]["stderr_re"] > 0

    def test_bad_point(self, runner, app):
        result = invoke(runner, app, "zeta", "--entry", "segment", "--s", "two")
        assert result.exit_code == 2


class TestErrors:
    """Exit codes: 2 usage, 3 numerical, 4 input"""

    def test_unknown_entry(self, runner, app):
        result = invoke(runner, app, "dims", "--entry", "koch_snowflake")
        assert result.exit_code == 4
        assert "❌ UnknownEntryError" in result.stderr

    def test_bad_param_syntax(self, runner, app):
        result = invoke(runner, app, "dims", "--entry", "a_string", "--param", "a:2")
        assert result.exit_code == 2

    def test_unknown_param(self, runner, app):
        result = invoke(runner, app, "dims", "--entry", "segment", "--param", "colour=blue")
        assert result.exit_code == 4
        assert "ParameterRangeError" in result.stderr

    def test_mellin_with_small_delta(self, runner, app):
        result = invoke(runner, app, "zeta", "--entry", "cantor_string", "--kind", "mellin", "--s", "0.9",
                        "--param", "delta=0.1")
        assert result.exit_code == 4
        assert "DeltaTooSmallError" in result.stderr


class TestReportCommand:
    """`report` summarizes the dimension and fractality class"""

    def test_cantor_graph_json(self, runner, app):
        result = invoke(runner, app, "report", "--entry", "cantor_graph", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["entry"] == "cantor_graph"
        assert abs(payload["dimension"] - 1.0) < 1e-12
        assert abs(payload["content"] - 2.0) < 1e-12
        assert payload["classification"] == "strictly_subcritical"
        assert abs(payload["subcritical_d"] - math.log(2) / math.log(3)) < 1e-12

    def test_segment_text(self, runner, app):
        result = invoke(runner, app, "report", "--entry", "segment")
        assert result.exit_code == 0, result.output
        assert "nonfractal" in result.stdout

    def test_default_chirp(self, runner, app):
        result = invoke(runner, app, "report", "--entry", "chirp", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert abs(payload["dimension"] - 1.75) < 1e-12
        assert abs(payload["content"] - 2 ** 0.25 / 0.375) < 1e-9

    def test_nest_with_integer_a(self, runner, app):
        result = invoke(runner, app, "report", "--entry", "nest", "--param", "a=2", "--format", "json")
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert abs(payload["content"] - (2 * math.pi ** 3 / 3 - 2 * math.pi)) < 1e-9


class TestValidateCommand:
    """`validate` runs the expansion-versus-oracle suite"""

    def test_segment_with_workbook(self, runner, app, tmp_path):
        book = tmp_path / "validation.xlsx"
        result = invoke(runner, app, "validate", "--entry", "segment", "--t-min", "0.01", "--t-count", "6",
                        "--format", "csv",
                        "--xlsx", str(book))
        assert result.exit_code == 0, result.output
        assert "✅ segment" in result.stderr
        columns, rows = csv_rows(result)
        assert columns[0] == "entry" and len(rows) == 6
        wb = load_workbook(book)
        assert wb.sheetnames == ["Summary", "segment"]
        assert wb["Summary"]["H2"].value == "YES"

    def test_failure_exits_4(self, runner, app):
        result = invoke(runner, app, "validate", "--entry", "cantor_string", "--K-trunc", "0", "--t-count", "8")
        assert result.exit_code == 4
        assert "ValidationFailure" in result.stderr

    def test_param_needs_single_entry(self, runner, app):
        result = invoke(runner, app, "validate", "--entry", "segment", "--entry", "cantor_string",
                        "--param", "delta=3")
        assert result.exit_code == 4


class TestInvertCommand:
    """`invert` recovers V(t) along a vertical line"""

    def test_cantor_mellin(self, runner, app):
        result = invoke(runner, app, "invert", "--entry", "cantor_string", "--kind", "mellin", "--t", "0.1",
                        "--c", "0.8", "--T", "2000", "--format", "csv")
        assert result.exit_code == 0, result.output
        _, rows = csv_rows(result)
        assert rows[0]["abs_err"] < 1e-2, f"inversion error {rows[0]['abs_err']}"


class TestFormatting:
    """Cell formatting and CSV parsing"""

    def test_format_cell(self):
        assert format_cell(None) == ""
        assert format_cell(True) == "true"
        assert format_cell(3) == "3"
        assert float(format_cell(0.1)) == 0.1, "%.17g must round-trip doubles"

    def test_read_csv_types(self):
        text = render_table(("name", "x", "y"), [("a", 1.25, None)], "csv")
        columns, rows = read_csv(io.StringIO(text))
        assert columns == ["name", "x", "y"]
        assert rows == [{"name": "a", "x": 1.25, "y": None}]

    def test_text_is_tab_separated(self):
        text = render_table(("a", "b"), [(1, 2.5)], "text")
        assert text == "a\tb\n1\t2.5\n"
