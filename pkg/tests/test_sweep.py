import csv
import io
import json

import pytest

import sweep
from linalg import DegenerateOutcomeError, InvalidInputError
from scenario import ConfigError, ResultRow, SweepSpec
from sweep import (
    CSV_HEADER,
    axis_values,
    emit_csv,
    emit_json,
    emit_plot_script,
    evaluate_point,
    format_real,
    run_sweep,
)

THIRD = 0.5773502691896258


@pytest.fixture
def scheme_one_spec():
    return SweepSpec.from_dict({
        "scheme": "one",
        "state": {"alpha": THIRD, "beta": THIRD, "gamma": THIRD},
        "axis": "D",
        "axis_range": {"start": 0.0, "stop": 0.8, "steps": 5},
        "fixed_params": {},
        "figure": "fig2a",
    })


@pytest.fixture
def scheme_two_spec():
    return SweepSpec.from_dict({
        "scheme": "two",
        "state": {"alpha": THIRD, "beta": THIRD, "gamma": THIRD},
        "axis": "p",
        "axis_range": {"start": 0.0, "stop": 0.9, "steps": 7},
        "fixed_params": {"D": 0.8},
    })


class TestRunSweep:
    def test_rows_follow_axis(self, scheme_one_spec):
        rows = run_sweep(scheme_one_spec)
        assert [r.axis_value for r in rows] == axis_values(scheme_one_spec)
        assert rows[0].n_damped == pytest.approx(rows[0].n_initial)
        assert rows[-1].n_damped == pytest.approx(0.04, abs=1e-12)

    def test_parallel_matches_serial(self, scheme_two_spec):
        assert run_sweep(scheme_two_spec, parallel=3) == run_sweep(scheme_two_spec)

    def test_ratio_column(self, scheme_two_spec):
        rows = run_sweep(scheme_two_spec)
        assert all(r.ratio == pytest.approx(r.n_protected / r.n_initial) for r in rows)
        assert rows[-1].ratio > rows[0].ratio

    def test_general_scheme(self):
        spec = SweepSpec.from_dict({
            "scheme": "two-general",
            "state": {"alpha": THIRD, "beta": THIRD, "gamma": THIRD},
            "axis": "p",
            "axis_range": {"start": 0.0, "stop": 0.9, "steps": 4},
            "fixed_params": {
                "d1": 0.8, "d2": 0.5, "D1": 0.4, "D2": 0.6,
                "p1": {"scale": 1.0}, "q1": {"scale": 1.0}, "p2": {"scale": 1.0}, "q2": {"scale": 1.0},
            },
        })
        rows = run_sweep(spec)
        assert len(rows) == 4
        assert rows[-1].n_protected > rows[-1].n_damped

    def test_degenerate_point(self, scheme_one_spec, monkeypatch):
        def degenerate(spec, values):
            raise DegenerateOutcomeError("zero probability")

        monkeypatch.setattr(sweep, "_scheme_result", degenerate)
        row = evaluate_point(scheme_one_spec, 0.5)
        assert row.n_protected is None and row.ratio is None
        assert row.success_probability == 0.0
        assert row.n_damped == pytest.approx(0.25, abs=1e-12)


class TestFormatting:
    def test_format_real(self):
        assert format_real(None) == ""
        assert format_real(-0.0) == "0"
        assert format_real(1 / 3) == "0.333333333333"

    def test_csv(self, scheme_one_spec):
        buffer = io.StringIO()
        emit_csv(run_sweep(scheme_one_spec), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 6
        assert lines[1].startswith("0,1,1,1,1,1")

    def test_csv_blank_for_absent(self):
        rows = [ResultRow(0.5, 1.0, 0.25, None, None, 0.0)]
        buffer = io.StringIO()
        emit_csv(rows, buffer)
        record = list(csv.reader(io.StringIO(buffer.getvalue())))[1]
        assert record == ["0.5", "1", "0.25", "", "", "0"]

    def test_json(self, scheme_two_spec):
        buffer = io.StringIO()
        emit_json(run_sweep(scheme_two_spec), buffer)
        data = json.loads(buffer.getvalue())
        assert len(data) == 7
        assert set(data[0]) == set(CSV_HEADER)

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            emit_csv([], io.StringIO())

    def test_rejects_unordered(self):
        rows = [ResultRow(0.5, 1, 1, 1, 1, 1), ResultRow(0.1, 1, 1, 1, 1, 1)]
        with pytest.raises(InvalidInputError):
            emit_json(rows, io.StringIO())


class TestPlotScript:
    def test_columns(self, scheme_one_spec):
        buffer = io.StringIO()
        emit_plot_script(run_sweep(scheme_one_spec), "fig2a", buffer, csv_path="fig2a.csv")
        script = buffer.getvalue()
        assert '"fig2a.csv" skip 1 using 1:3 with lines title "N_d"' in script
        assert '"" skip 1 using 1:4 with lines title "N_r"' in script
        assert 'set datafile separator ","' in script

    def test_axis_mismatch(self, scheme_two_spec):
        with pytest.raises(ConfigError):
            emit_plot_script(run_sweep(scheme_two_spec), "fig2a", io.StringIO())

    def test_unknown_figure(self, scheme_one_spec):
        with pytest.raises(ConfigError):
            emit_plot_script(run_sweep(scheme_one_spec), "fig7", io.StringIO())
