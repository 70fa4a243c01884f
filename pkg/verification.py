# verification.py
import io
import logging
import math
import time

import numpy as np

from channels import (
    DampingParams,
    ReversalParams,
    WeakMeasurementParams,
    amplitude_damping_kraus,
    apply_channel_both,
    reversal_operator,
    trit_flip,
    weak_measurement_operator,
)
from entanglement import PureState, negativity
from linalg import QutritSimError, max_norm
from protection import (
    closed_form_rho_d,
    closed_form_rho_r,
    closed_form_rho_wr,
    find_esd_onset,
    optimal_reversal_scheme1,
    run_scheme1,
    run_scheme2,
    scan_reversal_strength,
    success_probability_scheme1,
    success_probability_scheme2,
)
from scenario import SweepSpec
from sweep import emit_csv, run_sweep

logger = logging.getLogger(__name__)

GREEN, YELLOW, RED, RESET = "\033[92m", "\033[93m", "\033[91m", "\033[0m"

# (|alpha|^2, |beta|^2, |gamma|^2) points across the state simplex
SIMPLEX_POINTS = (
    (1 / 3, 1 / 3, 1 / 3),
    (3 / 8, 5 / 8, 0.0),
    (0.5, 0.25, 0.25),
    (0.1, 0.6, 0.3),
    (0.8, 0.1, 0.1),
    (0.2, 0.2, 0.6),
)
D_GRID = (0.0, 0.15, 0.3, 0.5, 0.7, 0.9)
P_GRID = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)


def _simplex_state(weights, phase=0.3):
    wa, wb, wg = weights
    return PureState(math.sqrt(wa), math.sqrt(wb) * complex(math.cos(phase), math.sin(phase)), math.sqrt(wg))


class GoldenValueVerifier:
    """Golden checks against the published negativities and identities."""

    def __init__(self, damping_scale=1.0):
        # scales every damping strength used by the checks; anything but 1 should fail them
        self.damping_scale = damping_scale
        self.criteria = {
            "golden_negativity": 0.04,
            "golden_tolerance": 0.005,
            "finite_reversal_factor": 10.0,
            "esd_bound": 0.8,
            "esd_regression": math.sqrt(3.0 / 5.0),
            "esd_regression_tolerance": 1e-6,
            "recovery_ratio": 0.99,
            "closed_form_tolerance": 1e-12,
            "probability_tolerance": 1e-12,
            "vanishing_probability": 0.01,
            "decomposition_tolerance": 1e-12,
        }
        self.mes = PureState.maximally_entangled()
        self.esd_state = PureState.esd_prone()

    def _damp(self, D):
        return DampingParams.symmetric(D).scaled(self.damping_scale)

    def check_golden_negativity(self):
        """N_d of the maximally entangled state at D = 0.8."""
        kraus = amplitude_damping_kraus(self._damp(0.8))
        rho = apply_channel_both(self.mes.density_matrix(), kraus, kraus)
        measured = negativity(rho)
        expected = self.criteria["golden_negativity"]
        tol = self.criteria["golden_tolerance"]
        return {
            "name": "N_d(D=0.8), maximally entangled",
            "measured": measured,
            "expected": f"{expected} +/- {tol}",
            "passed": abs(measured - expected) <= tol,
        }

    def check_finite_reversal(self):
        grid = np.linspace(0.0, 0.99, 200)
        results = [run_scheme1(self.mes, self._damp(float(D))) for D in grid]
        worst = min(r.n_protected - r.n_damped for r in results)
        last = results[-1]
        factor = last.n_protected / last.n_damped if last.n_damped > 0 else math.inf
        return {
            "name": "N_r finite as D -> 1 and N_r >= N_d on 200 points",
            "measured": f"N_r/N_d at 0.99 = {factor:.4g}, min(N_r - N_d) = {worst:.3e}",
            "expected": f"> {self.criteria['finite_reversal_factor']:g}, >= 0",
            "passed": factor > self.criteria["finite_reversal_factor"] and worst >= -1e-12,
        }

    def check_esd_onset(self):
        onset = find_esd_onset(self.esd_state)
        dead = []
        for D in np.linspace(min(onset + 1e-6, 0.99), 0.99, 20):
            result = run_scheme1(self.esd_state, DampingParams.symmetric(float(D)))
            dead.append(result.n_damped <= 1e-9 and result.n_protected <= 1e-9)
        regression_ok = abs(onset - self.criteria["esd_regression"]) <= self.criteria["esd_regression_tolerance"]
        return {
            "name": "Sudden death of N_d and N_r, sqrt(3/8)|00>+sqrt(5/8)|11>",
            "measured": f"D* = {onset:.9f}",
            "expected": f"D* <= {self.criteria['esd_bound']}, ~ {self.criteria['esd_regression']:.9f}",
            "passed": onset <= self.criteria["esd_bound"] and all(dead) and regression_ok,
        }

    def check_full_recovery(self):
        wm = WeakMeasurementParams.symmetric(0.999)
        ratios = [run_scheme2(s, wm, self._damp(0.8)).ratio for s in (self.mes, self.esd_state)]
        return {
            "name": "N_wr/N_i at p = 0.999, D = 0.8 (both states)",
            "measured": ", ".join(f"{r:.6f}" for r in ratios),
            "expected": f">= {self.criteria['recovery_ratio']}",
            "passed": all(r >= self.criteria["recovery_ratio"] for r in ratios),
        }

    def check_closed_forms(self):
        worst = 0.0
        for weights in SIMPLEX_POINTS:
            state = _simplex_state(weights)
            initial = state.density_matrix()
            for D in D_GRID:
                kraus = amplitude_damping_kraus(DampingParams.symmetric(D))
                damped = apply_channel_both(initial, kraus, kraus)
                worst = max(worst, max_norm(damped.matrix - closed_form_rho_d(state, D).matrix))
                one = run_scheme1(state, DampingParams.symmetric(D))
                worst = max(worst, max_norm(one.state_protected.matrix - closed_form_rho_r(state, D, D).matrix))
                for p in P_GRID:
                    two = run_scheme2(state, WeakMeasurementParams.symmetric(p), DampingParams.symmetric(D))
                    pr = p + D * (1.0 - p)
                    worst = max(worst, max_norm(two.state_protected.matrix - closed_form_rho_wr(state, p, D, pr).matrix))
        return {
            "name": "Closed-form rho_d, rho_r, rho_wr vs simulation (6x6x6 grid)",
            "measured": f"max entry error {worst:.3e}",
            "expected": f"<= {self.criteria['closed_form_tolerance']:g}",
            "passed": worst <= self.criteria["closed_form_tolerance"],
        }

    def check_success_probabilities(self):
        worst = 0.0
        for weights in SIMPLEX_POINTS:
            state = _simplex_state(weights)
            for D in D_GRID:
                one = run_scheme1(state, DampingParams.symmetric(D))
                worst = max(worst, abs(one.success_probability - success_probability_scheme1(state, D)))
                for p in P_GRID:
                    two = run_scheme2(state, WeakMeasurementParams.symmetric(p), DampingParams.symmetric(D))
                    worst = max(worst, abs(two.success_probability - success_probability_scheme2(state, D, p)))
        p1 = success_probability_scheme1(self.mes, 0.999)
        p2 = success_probability_scheme2(self.mes, 0.8, 0.999)
        limit = self.criteria["vanishing_probability"]
        return {
            "name": "P1, P2 formulas vs pipeline; P1(D=0.999), P2(p=0.999) vanish",
            "measured": f"max error {worst:.3e}, P1 = {p1:.3e}, P2 = {p2:.3e}",
            "expected": f"<= {self.criteria['probability_tolerance']:g}, < {limit}",
            "passed": worst <= self.criteria["probability_tolerance"] and p1 < limit and p2 < limit,
        }

    def check_reversal_decomposition(self):
        f = trit_flip()
        worst = 0.0
        for p in np.linspace(0.0, 0.9, 10):
            for q in np.linspace(0.0, 0.9, 10):
                m3 = weak_measurement_operator(WeakMeasurementParams(float(p), float(q))).operator
                mr = reversal_operator(ReversalParams(float(p), float(q))).operator
                worst = max(worst, max_norm(f @ m3 @ f @ m3 @ f - mr))
        return {
            "name": "F M3 F M3 F = M_r on a 10x10 (p, q) grid",
            "measured": f"max entry error {worst:.3e}",
            "expected": f"<= {self.criteria['decomposition_tolerance']:g}",
            "passed": worst <= self.criteria["decomposition_tolerance"],
        }

    def check_determinism(self):
        spec = SweepSpec.from_dict({
            "scheme": "two",
            "state": {"alpha": 1 / math.sqrt(3), "beta": 1 / math.sqrt(3), "gamma": 1 / math.sqrt(3)},
            "axis": "p",
            "axis_range": {"start": 0.0, "stop": 0.99, "steps": 25},
            "fixed_params": {"D": 0.8},
        })
        outputs = []
        for parallel in (1, 1, 4):
            buffer = io.StringIO()
            emit_csv(run_sweep(spec, parallel=parallel), buffer)
            outputs.append(buffer.getvalue())
        return {
            "name": "Sweep CSV identical across runs and serial/parallel",
            "measured": "identical" if len(set(outputs)) == 1 else "differs",
            "expected": "identical",
            "passed": len(set(outputs)) == 1,
        }

    def advise_optimal_reversal(self):
        """Grid scan over pr; informational only.

        Negativity alone keeps growing as pr -> 1 (at a vanishing success
        probability), so a NOTE here is expected and does not fail the run.
        """
        damp = self._damp(0.5)
        best_pr, best_n = scan_reversal_strength(self.mes, damp)
        optimal = run_scheme1(self.mes, damp, optimal_reversal_scheme1(damp)).n_protected
        return {
            "name": "Grid scan of pr vs pr = D (scheme one, D = 0.5)",
            "measured": f"best grid pr = {best_pr:.2f} with N = {best_n:.6f}; pr = D gives {optimal:.6f}",
            "expected": "no grid point better by more than 1e-6",
            "passed": best_n - optimal <= 1e-6,
        }

    CHECKS = (
        "check_golden_negativity",
        "check_finite_reversal",
        "check_esd_onset",
        "check_full_recovery",
        "check_closed_forms",
        "check_success_probabilities",
        "check_reversal_decomposition",
        "check_determinism",
    )

    def _timed(self, method_name):
        started = time.perf_counter()
        try:
            outcome = getattr(self, method_name)()
        except QutritSimError as e:
            logger.error("%s raised %s", method_name, e)
            outcome = {"name": method_name, "measured": f"error: {e}", "expected": "no error", "passed": False}
        outcome["status"] = "PASS" if outcome["passed"] else "FAIL"
        outcome["runtime_ms"] = (time.perf_counter() - started) * 1000.0
        return outcome

    def run_checks(self):
        checks = [self._timed(name) for name in self.CHECKS]
        advisory = self._timed("advise_optimal_reversal")
        advisory["status"] = "OK" if advisory["passed"] else "NOTE"
        return {
            "status": "PASSED" if all(c["passed"] for c in checks) else "FAILED",
            "passed": all(c["passed"] for c in checks),
            "damping_scale": self.damping_scale,
            "checks": checks,
            "advisories": [advisory],
        }


def verify_paper_values(damping_scale=1.0):
    """Run every golden check; failures are reported in the result, never raised."""
    return GoldenValueVerifier(damping_scale).run_checks()


def print_report(report):
    """Print a verification report to the terminal."""
    print("\n" + "=" * 80)
    print("GOLDEN VALUE VERIFICATION")
    print("=" * 80)
    if report.get("damping_scale", 1.0) != 1.0:
        print(f"{YELLOW}  Damping perturbed by factor {report['damping_scale']}{RESET}")

    for check in report["checks"]:
        color = GREEN if check["passed"] else RED
        print(f"\n  {check['name']}: {color}{check['status']}{RESET}")
        print(f"    Measured: {check['measured']}")
        print(f"    Expected: {check['expected']}")
        print(f"    Runtime:  {check['runtime_ms']:.2f} ms")

    if report["advisories"]:
        print("\nADVISORY:")
        for note in report["advisories"]:
            color = GREEN if note["passed"] else YELLOW
            print(f"\n  {note['name']}: {color}{note['status']}{RESET}")
            print(f"    Measured: {note['measured']}")
            print(f"    Expected: {note['expected']}")
            print(f"    Runtime:  {note['runtime_ms']:.2f} ms")

    color = GREEN if report["passed"] else RED
    print(f"\nOVERALL: {color}{report['status']}{RESET}")
    print("=" * 80 + "\n")
