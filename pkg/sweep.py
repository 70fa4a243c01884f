# sweep.py
"""Parameter sweeps over the protection schemes and their CSV / JSON / gnuplot outputs."""
import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from channels import DampingParams, ReversalParams, WeakMeasurementParams
from linalg import DegenerateOutcomeError, InvalidInputError
from protection import (
    AsymmetricConfig,
    run_scheme1,
    run_scheme1_general,
    run_scheme2,
    run_scheme2_general,
    unprotected,
)
from scenario import ConfigError, ResultRow

logger = logging.getLogger(__name__)

CSV_HEADER = ("axis", "n_initial", "n_damped", "n_protected", "ratio", "success_probability")

# Series are (CSV column, legend title); columns are 1-based as gnuplot counts them.
FIGURES = {
    "fig2a": {
        "axis": "D",
        "title": "Scheme one, (|00>+|11>+|22>)/sqrt(3): negativity as a function of D",
        "ylabel": "Negativity",
        "series": (("n_damped", "N_d"), ("n_protected", "N_r")),
    },
    "fig2b": {
        "axis": "D",
        "title": "Scheme one, sqrt(3/8)|00>+sqrt(5/8)|11>: negativity as a function of D",
        "ylabel": "Negativity",
        "series": (("n_damped", "N_d"), ("n_protected", "N_r")),
    },
    "fig3a": {
        "axis": "D",
        "title": "Damped negativity N_d as a function of decoherence strength D",
        "ylabel": "Negativity",
        "series": (("n_damped", "N_d"),),
    },
    "fig3b": {
        "axis": "p",
        "title": "Ratio of N_wr to N_i as a function of weak measurement strength p",
        "ylabel": "N_wr / N_i",
        "series": (("ratio", "N_wr/N_i"),),
    },
    "fig4a": {
        "axis": "D",
        "title": "Scheme one, d1 = D, d2 = 0.7D, D1 = 0.3D, D2 = 0.6D",
        "ylabel": "Negativity",
        "series": (("n_damped", "N_d"), ("n_protected", "N_r")),
    },
    "fig4b": {
        "axis": "p",
        "title": "Scheme two, d1 = 0.8, d2 = 0.5, D1 = 0.4, D2 = 0.6",
        "ylabel": "Negativity",
        "series": (("n_damped", "N_d"), ("n_protected", "N_wr")),
    },
}


def axis_values(spec):
    return [float(v) for v in np.linspace(spec.start, spec.stop, spec.steps)]


def _scheme_result(spec, values):
    state = spec.state
    rev = None if spec.reversal is None else ReversalParams(*spec.reversal)
    if spec.scheme == "one":
        return run_scheme1(state, DampingParams.symmetric(values["D"]), rev)
    if spec.scheme == "two":
        wm = WeakMeasurementParams.symmetric(values["p"])
        return run_scheme2(state, wm, DampingParams.symmetric(values["D"]), rev)

    cfg_args = [
        DampingParams(values["d1"], values["D1"]),
        DampingParams(values["d2"], values["D2"]),
    ]
    if spec.scheme == "one-general":
        return run_scheme1_general(state, AsymmetricConfig(*cfg_args))
    cfg_args += [
        WeakMeasurementParams(values["p1"], values["q1"]),
        WeakMeasurementParams(values["p2"], values["q2"]),
    ]
    return run_scheme2_general(state, AsymmetricConfig(*cfg_args))


def evaluate_point(spec, axis_value):
    """One ResultRow; a degenerate post-selection leaves the protected fields absent."""
    values = spec.resolve(axis_value)
    try:
        result = _scheme_result(spec, values)
    except DegenerateOutcomeError as e:
        logger.warning("Degenerate outcome at %s = %.6g: %s", spec.axis, axis_value, e)
        if spec.scheme in ("one", "two"):
            damp_a = damp_b = DampingParams.symmetric(values["D"])
        else:
            damp_a = DampingParams(values["d1"], values["D1"])
            damp_b = DampingParams(values["d2"], values["D2"])
        bare = unprotected(spec.state, damp_a, damp_b)
        return ResultRow(axis_value, bare.n_initial, bare.n_damped, None, None, 0.0, spec.axis)
    except InvalidInputError as e:
        raise ConfigError(f"{spec.axis} = {axis_value}: {e}") from e
    return ResultRow(
        axis_value,
        result.n_initial,
        result.n_damped,
        result.n_protected,
        result.ratio,
        result.success_probability,
        spec.axis,
    )


def run_sweep(spec, parallel=1):
    """Evaluate the scheme at every axis point, in axis order regardless of ``parallel``."""
    points = axis_values(spec)
    if parallel is None or parallel <= 1:
        return [evaluate_point(spec, v) for v in points]
    logger.info("Evaluating %d points on %d workers", len(points), parallel)
    with ThreadPoolExecutor(max_workers=parallel) as executor:
        return list(executor.map(lambda v: evaluate_point(spec, v), points))


def _check_rows(rows):
    rows = list(rows)
    if not rows:
        raise InvalidInputError("No rows to write")
    for prev, cur in zip(rows, rows[1:]):
        if cur.axis_value < prev.axis_value:
            raise InvalidInputError(
                f"Rows out of order: {cur.axis_value!r} follows {prev.axis_value!r}"
            )
    return rows


def format_real(value):
    """12 significant digits; None renders as an empty field."""
    if value is None:
        return ""
    value = float(value)
    if value == 0.0:
        value = 0.0  # no "-0"
    return f"{value:.12g}"


def emit_csv(rows, destination):
    rows = _check_rows(rows)
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            format_real(row.axis_value),
            format_real(row.n_initial),
            format_real(row.n_damped),
            format_real(row.n_protected),
            format_real(row.ratio),
            format_real(row.success_probability),
        ])


def rows_to_dicts(rows):
    return [
        {
            "axis": row.axis_value,
            "n_initial": row.n_initial,
            "n_damped": row.n_damped,
            "n_protected": row.n_protected,
            "ratio": row.ratio,
            "success_probability": row.success_probability,
        }
        for row in rows
    ]


def emit_json(rows, destination):
    rows = _check_rows(rows)
    json.dump(rows_to_dicts(rows), destination, indent=2)
    destination.write("\n")


def emit_plot_script(rows, figure_id, destination, csv_path="results.csv"):
    """Write a gnuplot script drawing ``figure_id`` from the CSV at ``csv_path``."""
    if figure_id not in FIGURES:
        raise ConfigError(f"figure: unknown figure id {figure_id!r}")
    rows = _check_rows(rows)
    figure = FIGURES[figure_id]
    axes = {row.axis for row in rows}
    if axes != {figure["axis"]}:
        raise ConfigError(
            f"figure: {figure_id} plots against {figure['axis']}, rows are swept over {sorted(axes)}"
        )

    lines = [
        f"# {figure_id}: {figure['title']}",
        'set datafile separator ","',
        'set datafile missing ""',
        f'set title "{figure["title"]}"',
        f'set xlabel "{figure["axis"]}"',
        f'set ylabel "{figure["ylabel"]}"',
        f"set xrange [{format_real(rows[0].axis_value)}:{format_real(rows[-1].axis_value)}]",
        "set yrange [0:*]",
        "set key top right",
    ]
    plots = []
    for column, title in figure["series"]:
        index = CSV_HEADER.index(column) + 1
        source = f'"{csv_path}"' if not plots else '""'
        plots.append(f'{source} skip 1 using 1:{index} with lines title "{title}"')
    lines.append("plot " + ", \\\n     ".join(plots))
    destination.write("\n".join(lines) + "\n")
