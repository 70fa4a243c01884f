# protection.py
"""Entanglement protection by weak measurement and reversal.

Scheme one: damping on each qutrit, then a reversing measurement.
Scheme two: a prior weak measurement, damping, then the reversal.
The pipelines simulate the operations directly; the ``closed_form_*``
builders give the analytic post-selected states they must agree with.
"""
import logging
from dataclasses import dataclass

import numpy as np

from channels import (
    DEGENERATE_PROBABILITY,
    DampingParams,
    DensityMatrix,
    ReversalParams,
    WeakMeasurementParams,
    amplitude_damping_kraus,
    apply_channel_both,
    apply_selective_both,
    reversal_operator,
    weak_measurement_operator,
    unit_interval,
)
from entanglement import PureState, negativity
from linalg import DegenerateOutcomeError, InvalidInputError

logger = logging.getLogger(__name__)

ZERO_NEGATIVITY = 1e-9


@dataclass(frozen=True)
class AsymmetricConfig:
    """Per-qutrit damping and weak-measurement parameters (qutrit A, qutrit B)."""

    damp_a: DampingParams
    damp_b: DampingParams
    wm_a: WeakMeasurementParams = WeakMeasurementParams(0.0, 0.0)
    wm_b: WeakMeasurementParams = WeakMeasurementParams(0.0, 0.0)

    def __post_init__(self):
        for name in ("damp_a", "damp_b"):
            if not isinstance(getattr(self, name), DampingParams):
                raise InvalidInputError(f"{name} must be DampingParams")
        for name in ("wm_a", "wm_b"):
            if not isinstance(getattr(self, name), WeakMeasurementParams):
                raise InvalidInputError(f"{name} must be WeakMeasurementParams")

    @classmethod
    def symmetric(cls, damp, wm=None):
        wm = wm or WeakMeasurementParams(0.0, 0.0)
        return cls(damp, damp, wm, wm)


@dataclass(frozen=True, eq=False)
class SchemeResult:
    n_initial: float
    n_damped: float
    n_protected: float
    success_probability: float
    state_damped: DensityMatrix
    state_protected: DensityMatrix

    @property
    def ratio(self):
        """n_protected / n_initial, or None for a separable initial state."""
        return self.n_protected / self.n_initial if self.n_initial > 0 else None


def optimal_reversal_scheme1(damp):
    """pr = g1, qr = g2: the reversal undoes the no-jump damping branch."""
    if damp.g1 >= 1.0 or damp.g2 >= 1.0:
        raise InvalidInputError("Full decay (rate 1) cannot be reversed")
    return ReversalParams(damp.g1, damp.g2)


def optimal_reversal_scheme2(damp, wm):
    """pr = p + g1 (1 - p), qr = q + g2 (1 - q)."""
    return ReversalParams(wm.p + damp.g1 * (1.0 - wm.p), wm.q + damp.g2 * (1.0 - wm.q))


def _run(state, cfg, rev_a, rev_b, with_prior_measurement):
    if not isinstance(state, PureState):
        raise InvalidInputError("Expected a PureState")
    initial = state.density_matrix()
    n_initial = negativity(initial)
    channel_a = amplitude_damping_kraus(cfg.damp_a)
    channel_b = amplitude_damping_kraus(cfg.damp_b)

    damped = apply_channel_both(initial, channel_a, channel_b)

    probability = 1.0
    rho = initial
    if with_prior_measurement:
        outcome = apply_selective_both(rho, weak_measurement_operator(cfg.wm_a), weak_measurement_operator(cfg.wm_b))
        rho, probability = outcome.state, outcome.probability
        rho = apply_channel_both(rho, channel_a, channel_b)
    else:
        rho = damped

    # reversal scaled to unit norm: same post-state, highest success probability
    outcome = apply_selective_both(rho, reversal_operator(rev_a).rescaled(), reversal_operator(rev_b).rescaled())
    probability *= outcome.probability

    result = SchemeResult(
        n_initial=n_initial,
        n_damped=negativity(damped),
        n_protected=negativity(outcome.state),
        success_probability=min(max(probability, 0.0), 1.0),
        state_damped=damped,
        state_protected=outcome.state,
    )
    logger.debug(
        "scheme %s: N_i=%.6g N_d=%.6g N_p=%.6g P=%.6g",
        "two" if with_prior_measurement else "one",
        result.n_initial, result.n_damped, result.n_protected, result.success_probability,
    )
    return result


def run_scheme1(state, damp, rev=None):
    """Damping on both qutrits followed by the reversal ``rev`` (optimal when omitted)."""
    rev = rev or optimal_reversal_scheme1(damp)
    return _run(state, AsymmetricConfig.symmetric(damp), rev, rev, with_prior_measurement=False)


def run_scheme2(state, wm, damp, rev=None):
    rev = rev or optimal_reversal_scheme2(damp, wm)
    return _run(state, AsymmetricConfig.symmetric(damp, wm), rev, rev, with_prior_measurement=True)


def run_scheme1_general(state, cfg):
    """Scheme one with per-qutrit damping and per-qutrit optimal reversal; weak strengths ignored."""
    return _run(
        state, cfg,
        optimal_reversal_scheme1(cfg.damp_a),
        optimal_reversal_scheme1(cfg.damp_b),
        with_prior_measurement=False,
    )


def run_scheme2_general(state, cfg):
    return _run(
        state, cfg,
        optimal_reversal_scheme2(cfg.damp_a, cfg.wm_a),
        optimal_reversal_scheme2(cfg.damp_b, cfg.wm_b),
        with_prior_measurement=True,
    )


def unprotected(state, damp_a, damp_b=None):
    """Damping alone; the protected fields mirror the damped ones."""
    damp_b = damp_b or damp_a
    initial = state.density_matrix()
    damped = apply_channel_both(initial, amplitude_damping_kraus(damp_a), amplitude_damping_kraus(damp_b))
    n_damped = negativity(damped)
    return SchemeResult(negativity(initial), n_damped, n_damped, 1.0, damped, damped)


def success_probability_scheme1(state, D):
    D = unit_interval("D", D, allow_one=False)
    return (1.0 - D) ** 2 * (1.0 + state.excited_weight * (2.0 * D + D * D))


def success_probability_scheme2(state, D, p):
    D = unit_interval("D", D, allow_one=False)
    p = unit_interval("p", p, allow_one=False)
    pbar = 1.0 - p
    return (1.0 - D) ** 2 * pbar ** 2 * (1.0 + state.excited_weight * (2.0 * D * pbar + D * D * pbar * pbar))


def _closed_form(state, D, p, pr):
    a, b, g = state.alpha, state.beta, state.gamma
    wa, wb, wg = abs(a) ** 2, abs(b) ** 2, abs(g) ** 2
    pbar, dbar, rbar = 1.0 - p, 1.0 - D, 1.0 - pr
    norm = rbar ** 2 * wa + pbar ** 2 * (dbar ** 2 + 2.0 * D * dbar * rbar + D ** 2 * rbar ** 2) * (wb + wg)
    if norm <= DEGENERATE_PROBABILITY:
        raise DegenerateOutcomeError(f"Normalization {norm:.3e} is degenerate")

    m = np.zeros((9, 9), dtype=np.complex128)
    m[0, 0] = rbar ** 2 * wa + pbar ** 2 * D ** 2 * rbar ** 2 * (wb + wg)
    # one qutrit decayed, the other still excited: |01>, |10> from beta; |02>, |20> from gamma
    m[1, 1] = m[3, 3] = pbar ** 2 * D * dbar * rbar * wb
    m[2, 2] = m[6, 6] = pbar ** 2 * D * dbar * rbar * wg
    m[4, 4] = pbar ** 2 * dbar ** 2 * wb
    m[8, 8] = pbar ** 2 * dbar ** 2 * wg
    m[0, 4] = pbar * dbar * rbar * a * np.conj(b)
    m[0, 8] = pbar * dbar * rbar * a * np.conj(g)
    m[4, 8] = pbar ** 2 * dbar ** 2 * b * np.conj(g)
    m[4, 0], m[8, 0], m[8, 4] = np.conj(m[0, 4]), np.conj(m[0, 8]), np.conj(m[4, 8])
    return DensityMatrix.from_matrix(m / norm)


def closed_form_rho_d(state, D):
    """Analytic damped state under symmetric damping D on both qutrits."""
    D = unit_interval("D", D, allow_one=True)
    return _closed_form(state, D, 0.0, 0.0)


def closed_form_rho_r(state, D, pr):
    """Analytic scheme-one state, normalized by C1."""
    D = unit_interval("D", D, allow_one=False)
    pr = unit_interval("pr", pr, allow_one=False)
    return _closed_form(state, D, 0.0, pr)


def closed_form_rho_wr(state, p, D, pr):
    """Analytic scheme-two state, normalized by C2."""
    p = unit_interval("p", p, allow_one=False)
    D = unit_interval("D", D, allow_one=False)
    pr = unit_interval("pr", pr, allow_one=False)
    return _closed_form(state, D, p, pr)


def scan_reversal_strength(state, damp, wm=None, grid=None):
    """Best symmetric reversal strength on a grid; a consistency check, not an optimizer."""
    grid = np.linspace(0.0, 0.99, 100) if grid is None else grid
    best_pr, best_n = None, -1.0
    for pr in grid:
        rev = ReversalParams.symmetric(float(pr))
        try:
            result = run_scheme1(state, damp, rev) if wm is None else run_scheme2(state, wm, damp, rev)
        except DegenerateOutcomeError:
            logger.debug("Skipping degenerate reversal strength %.6g", pr)
            continue
        if result.n_protected > best_n:
            best_pr, best_n = float(pr), result.n_protected
    return best_pr, best_n


def find_esd_onset(state, lo=0.0, hi=0.999, tol=1e-10):
    """Smallest symmetric damping strength at which the damped negativity vanishes (bisection)."""
    def dead(D):
        return unprotected(state, DampingParams.symmetric(D)).n_damped <= ZERO_NEGATIVITY

    if dead(lo):
        return lo
    if not dead(hi):
        raise InvalidInputError(f"No entanglement sudden death in [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if dead(mid):
            hi = mid
        else:
            lo = mid
    return hi
