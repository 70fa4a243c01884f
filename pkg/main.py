# main.py
import argparse
import glob
import logging
import os
import sys

from dotenv import load_dotenv

from entanglement import PureState, is_entangled, log_negativity, negativity
from linalg import DegenerateOutcomeError, InvalidInputError, NumericalFailureError
from scenario import ConfigError, load_spec
from sweep import emit_csv, emit_json, emit_plot_script, run_sweep
from verification import print_report, verify_paper_values

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3
EXIT_INTERRUPTED = 130
CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


def _env_int(name, default):
    raw = os.getenv(name)
    try:
        return int(raw) if raw else default
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def state_info(alpha, beta, gamma):
    """Validity, negativity and reduced populations of alpha|00> + beta|11> + gamma|22>."""
    state = PureState.from_amplitudes(alpha, beta, gamma)
    rho = state.density_matrix()
    return {
        "valid": True,
        "amplitudes": {name: [complex(v).real, complex(v).imag]
                       for name, v in (("alpha", state.alpha), ("beta", state.beta), ("gamma", state.gamma))},
        "negativity": negativity(rho),
        "log_negativity": log_negativity(rho),
        "entangled": is_entangled(rho),
        "reduced_populations": [float(x) for x in rho.partial_trace(0).populations()],
    }


def write_outputs(spec, rows, csv_path, json_path=None, plot_path=None):
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        emit_csv(rows, f)
    print(f"Results saved to {csv_path}")
    if json_path:
        with open(json_path, "w", encoding="utf-8") as f:
            emit_json(rows, f)
        print(f"Results saved to {json_path}")
    if plot_path:
        figure = spec.figure
        if figure is None:
            raise ConfigError("figure: --plot needs a \"figure\" entry in the scenario")
        with open(plot_path, "w", encoding="utf-8", newline="") as f:
            emit_plot_script(rows, figure, f, csv_path=os.path.basename(csv_path))
        print(f"Plot script saved to {plot_path}")


def cmd_sweep(args):
    spec = load_spec(args.config)
    parallel = args.parallel if args.parallel is not None else _env_int("QUTRIT_PARALLEL", 1)
    print(f"Sweeping scheme {spec.scheme} over {spec.axis} ({spec.steps} points)...")
    rows = run_sweep(spec, parallel=parallel)
    write_outputs(spec, rows, args.out, args.json, args.plot)
    return EXIT_OK


def cmd_verify(args):
    report = verify_paper_values()
    print_report(report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_state_info(args):
    info = state_info(args.alpha, args.beta, args.gamma)
    print("\nSTATE INFORMATION:")
    for key, value in info.items():
        print(f"  {key.replace('_', ' ').title()}: {value}")
    return EXIT_OK


def reproduce(output_dir, config_dir=CONFIG_DIR, parallel=1):
    """Every bundled scenario: CSV, JSON and gnuplot script side by side."""
    os.makedirs(output_dir, exist_ok=True)
    configs = sorted(glob.glob(os.path.join(config_dir, "*.json")))
    if not configs:
        raise ConfigError(f"No scenario files found in {config_dir}")
    written = []
    for path in configs:
        name = os.path.splitext(os.path.basename(path))[0]
        print("\n" + "=" * 80)
        print(f"REPRODUCING {name}")
        print("=" * 80)
        spec = load_spec(path)
        rows = run_sweep(spec, parallel=parallel)
        base = os.path.join(output_dir, name)
        write_outputs(spec, rows, base + ".csv", base + ".json", base + ".gp" if spec.figure else None)
        written.append(name)
    return written


def cmd_reproduce(args):
    out_dir = args.out_dir or os.getenv("QUTRIT_OUTPUT_DIR", "results")
    parallel = args.parallel if args.parallel is not None else _env_int("QUTRIT_PARALLEL", 1)
    reproduce(out_dir, args.config_dir, parallel)
    return EXIT_OK


def cmd_serve(args):
    from server import app

    app.run(port=args.port)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(description="Qutrit entanglement protection by weak measurement reversal")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Run a scenario sweep")
    p.add_argument("--config", required=True, help="JSON scenario file")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--json", help="Optional JSON output path")
    p.add_argument("--plot", help="Optional gnuplot script path")
    p.add_argument("--parallel", type=int, help="Worker count")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="Check the published values")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("state-info", help="Negativity and validity of alpha|00>+beta|11>+gamma|22>")
    for name in ("alpha", "beta", "gamma"):
        p.add_argument(f"--{name}", type=complex, required=True)
    p.set_defaults(func=cmd_state_info)

    p = sub.add_parser("reproduce", help="Run every bundled figure scenario")
    p.add_argument("--out-dir", help="Output directory (default $QUTRIT_OUTPUT_DIR or ./results)")
    p.add_argument("--config-dir", default=CONFIG_DIR)
    p.add_argument("--parallel", type=int)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("serve", help="Serve the JSON API")
    p.add_argument("--port", type=int, default=10000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    load_dotenv()
    logging.basicConfig(
        level=os.getenv("QUTRIT_LOG_LEVEL", "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidInputError as e:
        print(f"Invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailureError, DegenerateOutcomeError) as e:
        print(f"Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        print("\nRun terminated by user.")
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
