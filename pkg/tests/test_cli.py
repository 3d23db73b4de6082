import csv
from io import StringIO

import pyarrow as pa
import pyarrow.parquet as pq
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.catalog.entries import CATALOG_HEADER
from apps.cli.acceptance import CHECKS, run_acceptance
from apps.cli.base import NUMERICAL_EXIT, VALIDATION_EXIT
from apps.cli.config import RunConfig, coerce_values, read_config_file
from apps.cli.management.commands.residual import Command as ResidualCommand
from apps.core.exceptions import InvalidParameterError
from apps.core.export_utils import parse_metadata_line, read_csv_file, read_parquet_file


def _run(*args):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


def _parse(text):
    lines = text.splitlines()
    assert lines[0].startswith("#")
    return parse_metadata_line(lines[0]), list(csv.DictReader(lines[1:]))


class TestCommands:
    def test_classify(self):
        out, _ = _run("classify", "--from", "hyperbolic", "--to", "sphere")
        assert "NoSolution NX3B" in out

    def test_residual(self):
        out, err = _run("residual", "--case", "C1B", "--rmin", "0.01", "--rmax", "10", "--nodes", "500")
        metadata, rows = _parse(out)
        assert metadata["command"] == "residual"
        assert len(rows) == 500
        assert max(abs(float(row["residual"])) for row in rows) < 1e-8
        assert "C1B" in err

    def test_residual_identity_case(self):
        out, _ = _run("residual", "--case", "NX3B", "--alpha", "0.7", "--nodes", "40")
        _, rows = _parse(out)
        assert len(rows) == 40
        for row in rows:
            assert float(row["residual"]) == pytest.approx(float(row["identity"]), rel=1e-9, abs=1e-9)

    def test_stability(self):
        out, _ = _run("stability", "--nodes", "256")
        _, rows = _parse(out)
        assert rows[0]["verdict"] == "Stable"
        assert float(rows[0]["min_rayleigh"]) > 0

    def test_catalog(self):
        out, _ = _run("catalog")
        _, rows = _parse(out)
        assert len(rows) == 14

    def test_hamiltonian(self):
        out, _ = _run("hamiltonian", "--nodes", "21")
        _, rows = _parse(out)
        assert len(rows) == 21
        values = [float(row["hamiltonian"]) for row in rows]
        assert max(values) - min(values) < 1e-6

    def test_conformal(self):
        out, err = _run("conformal", "--rmax", "5", "--nodes", "51")
        _, rows = _parse(out)
        assert len(rows) == 51
        assert max(abs(float(row["defect"])) for row in rows) < 1e-6
        assert "truncated=false" in err

    def test_solve_clamped(self):
        out, _ = _run("solve", "--alpha-b", "1.5707963", "--dalpha-b", "1", "--nodes", "50")
        _, rows = _parse(out)
        assert len(rows) == 50
        assert float(rows[-1]["alpha"]) == pytest.approx(1.5707963, abs=1e-8)

    def test_identical_runs_give_identical_output(self):
        assert _run("catalog", "--c", "1.3")[0] == _run("catalog", "--c", "1.3")[0]

    def test_help_lists_columns(self):
        parser = ResidualCommand().create_parser("manage.py", "residual")
        assert "CSV columns" in parser.format_help()


class TestErrors:
    def test_negative_parameter_is_a_validation_error(self):
        with pytest.raises(CommandError) as excinfo:
            _run("catalog", "--c=-1")
        assert excinfo.value.returncode == VALIDATION_EXIT

    def test_numerical_failure_exit_code(self, settings):
        settings.NUMERICS = {**settings.NUMERICS, "DIVERGENCE_THRESHOLD": 1.0}
        with pytest.raises(CommandError) as excinfo:
            _run("solve", "--R-star", "3", "--mode", "conformal")
        assert excinfo.value.returncode == NUMERICAL_EXIT

    def test_unknown_flag(self):
        with pytest.raises(CommandError):
            _run("residual", "--bogus", "1")

    def test_missing_boundary_value(self):
        with pytest.raises(CommandError) as excinfo:
            _run("solve")
        assert excinfo.value.returncode == VALIDATION_EXIT

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            _run("catalog", "--config", str(tmp_path / "missing.cfg"))
        assert excinfo.value.returncode == VALIDATION_EXIT


class TestOutputFiles:
    def test_metadata_round_trip(self, tmp_path):
        path = tmp_path / "residual.csv"
        _run("residual", "--case", "C1C", "--c", "0.8", "--nodes", "30", "--output", str(path))
        metadata, rows = read_csv_file(str(path))
        assert len(rows) == 30
        config = RunConfig.from_metadata(metadata)
        assert config.case == "C1C"
        assert config.c == 0.8
        assert config.metadata() == RunConfig(command="residual", case="C1C", c=0.8, nodes=30).metadata()

    def test_parquet_output(self, tmp_path):
        path = tmp_path / "catalog.parquet"
        _run("catalog", "--format", "parquet", "--output", str(path))
        table = pq.read_table(str(path))
        assert table.num_rows == 14
        assert table.schema.metadata[b"command"] == b"catalog"
        assert table.column_names == list(CATALOG_HEADER)
        assert pa.types.is_float64(table.schema.field("c").type)
        assert pa.types.is_float64(table.schema.field("lambda").type)
        assert pa.types.is_string(table.schema.field("nature").type)
        rows = {row["case_id"]: row for row in table.to_pylist()}
        assert rows["CylQuarterPi"]["c"] is None
        assert rows["CylQuarterPi"]["lambda"] == 3.0
        assert rows["C1B"]["lambda"] is None

    def test_parquet_metadata_round_trip(self, tmp_path):
        path = tmp_path / "stability.parquet"
        _run("stability", "--nodes", "256", "--format", "parquet", "--output", str(path))
        metadata, rows = read_parquet_file(str(path))
        assert RunConfig.from_metadata(metadata).nodes == 256
        assert rows[0]["verdict"] == "Stable"
        assert isinstance(rows[0]["nodes"], int)

    def test_missing_parameters_are_empty_csv_cells(self):
        out, _ = _run("catalog")
        _, rows = _parse(out)
        cylinder = [row for row in rows if row["case_id"].startswith("Cyl")]
        assert cylinder and all(row["c"] == "" and row["d"] == "" for row in cylinder)

    def test_save_uses_output_dir(self, output_dir):
        out, _ = _run("catalog", "--save")
        assert (output_dir / "catalog.csv").exists()
        assert "Wrote 14 rows" in out

    def test_flags_override_config_file(self, tmp_path):
        config_path = tmp_path / "run.cfg"
        config_path.write_text("# defaults\nc = 2.0\nd=0.5\n\ncase=C1B\n", encoding="utf-8")
        out, _ = _run("residual", "--config", str(config_path), "--c", "1.5", "--nodes", "10")
        metadata, _ = _parse(out)
        assert metadata["c"] == "1.5"
        assert metadata["d"] == "0.5"
        assert metadata["case"] == "C1B"


class TestRunConfig:
    def test_aliases(self):
        values = coerce_values({"lambda": "2", "R-star": "3", "from": "sphere", "to": "euclidean", "format": "parquet"})
        assert values == {"lam": 2.0, "alpha_b": 3.0, "domain": "sphere", "target": "euclidean", "fmt": "parquet"}

    def test_unknown_key(self):
        with pytest.raises(InvalidParameterError):
            coerce_values({"radius": "1"})

    def test_boolean_and_number_parsing(self):
        assert coerce_values({"generic": "yes", "nodes": "64"}) == {"generic": True, "nodes": 64}
        with pytest.raises(InvalidParameterError):
            coerce_values({"nodes": "many"})

    def test_malformed_config_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("c 2\n", encoding="utf-8")
        with pytest.raises(InvalidParameterError):
            read_config_file(str(path))

    @pytest.mark.parametrize(
        "values",
        [
            {"fmt": "xlsx"},
            {"m": 2},
            {"nodes": 0},
            {"rmin": 2.0, "rmax": 1.0},
            {"workers": 0},
        ],
    )
    def test_validation(self, values):
        with pytest.raises(InvalidParameterError):
            RunConfig(command="catalog", **values).validate()

    def test_metadata_skips_local_fields(self):
        metadata = RunConfig(command="catalog", output="x.csv", save=True).metadata()
        assert "output" not in metadata and "save" not in metadata and "fmt" not in metadata
        assert metadata["tool_version"] == "1.0.0"


class TestAcceptance:
    def test_all_checks_pass(self):
        results = run_acceptance(workers=2)
        assert [item.name for item in results] == [name for name, _ in CHECKS]
        failed = [f"{item.name}: {item.detail}" for item in results if not item.passed]
        assert not failed

    def test_verify_all_command(self):
        out, _ = _run("verify_all", "--workers", "4")
        assert "all checks passed" in out
