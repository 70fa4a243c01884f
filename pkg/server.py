from flask import Flask, jsonify, request
from dotenv import load_dotenv

from linalg import DegenerateOutcomeError, InvalidInputError, NumericalFailureError
from main import state_info
from scenario import ConfigError, SweepSpec
from sweep import rows_to_dicts, run_sweep
from verification import verify_paper_values

load_dotenv()

app = Flask(__name__)


@app.route('/api/verify', methods=['GET'])
def verify():
    """Run the golden checks and return the report as JSON"""
    report = verify_paper_values()
    return jsonify(report)


@app.route('/api/sweep', methods=['POST'])
def sweep():
    """Run the scenario posted as the request body"""
    data = request.get_json(silent=True)
    if data is None:
        return jsonify({"error": "Request body must be a JSON scenario"}), 400
    try:
        spec = SweepSpec.from_dict(data)
        rows = run_sweep(spec)
    except ConfigError as e:
        return jsonify({"error": str(e)}), 400
    except (NumericalFailureError, DegenerateOutcomeError) as e:
        return jsonify({"error": f"Numerical failure: {e}"}), 500
    return jsonify({"scheme": spec.scheme, "axis": spec.axis, "rows": rows_to_dicts(rows)})


@app.route('/api/state-info', methods=['GET'])
def get_state_info():
    """Negativity and validity of alpha|00> + beta|11> + gamma|22>"""
    try:
        amplitudes = [complex(request.args.get(name, "")) for name in ("alpha", "beta", "gamma")]
        return jsonify(state_info(*amplitudes))
    except (ValueError, InvalidInputError) as e:
        return jsonify({"valid": False, "error": str(e)}), 400


if __name__ == '__main__':
    app.run(debug=True, port=10000)
