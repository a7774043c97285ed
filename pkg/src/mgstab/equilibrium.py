"""Equilibrium (operating point) computation.

The steady state of the distributed control makes all DG frequencies equal,
equalizes the weighted active-power shares along communication edges, brings
the voltage-plus-droop consensus variable to agreement, and pins leaders to
the global references. Residuals here are the exact stationarity conditions
of the closed-loop dynamics, so the time-domain simulator settles at the same
point the frequency-domain model is linearized around.

Unknowns are the n-1 free bus angles (slack angle fixed at zero) and the n
voltage magnitudes; the common frequency is recovered by a least-squares
solve of the leader rows and reported, not assumed equal to the reference.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import differential_evolution, least_squares

from .config import MicrogridScenario, scenario_to_dict
from .network import assemble_bus_admittance

__all__ = [
    "Equilibrium",
    "EquilibriumError",
    "phasor_injections",
    "equilibrium_residual",
    "residual_vector",
    "solve_equilibrium",
    "clear_cache",
]


class EquilibriumError(RuntimeError):
    """Raised when no operating point meets the residual tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual


@dataclass(eq=False)
class Equilibrium:
    """Solved operating point in SI units.

    delta is in radians relative to the slack bus, v in per-phase RMS volts,
    p/q are three-phase DG injections in W/VAR, and v_d/v_q/i_d/i_q the
    synchronous-frame phasor components the small-signal projection needs.
    residual is the 2-norm of the stationarity conditions at the solution.
    """

    delta: np.ndarray
    v: np.ndarray
    omega: float
    p: np.ndarray
    q: np.ndarray
    v_d: np.ndarray
    v_q: np.ndarray
    i_d: np.ndarray
    i_q: np.ndarray
    residual: float


def phasor_injections(delta, v_mag, ybus):
    """DG power injections and dq components for given bus angles/magnitudes.

    Returns (p, q, v_d, v_q, i_d, i_q) with three-phase powers
    P = 3(v_d i_d + v_q i_q), Q = 3(v_q i_d - v_d i_q).
    """
    v_ph = np.asarray(v_mag) * np.exp(1j * np.asarray(delta))
    i_ph = ybus @ v_ph
    s = 3.0 * v_ph * np.conj(i_ph)
    return (
        s.real,
        s.imag,
        v_ph.real,
        v_ph.imag,
        i_ph.real,
        i_ph.imag,
    )


def _unpack(candidate, scenario):
    n = scenario.n
    candidate = np.asarray(candidate, dtype=float)
    if candidate.shape != (2 * n - 1,):
        raise ValueError(
            f"candidate must have {2 * n - 1} entries "
            f"({n - 1} free angles + {n} voltages)"
        )
    delta = np.zeros(n)
    free = [i for i in range(n) if i != scenario.network.slack_bus]
    delta[free] = candidate[: n - 1]
    v_mag = candidate[n - 1 :]
    return delta, v_mag


def _equilibrium_frequency(scenario, g_rows):
    """Least-squares common frequency from the leader stationarity rows."""
    th = scenario.graph.leaders
    deg = scenario.graph.in_degrees()
    w = th / (deg + th)
    w_ref = scenario.options.reference_omega
    wsq = float(w @ w)
    if wsq == 0.0:
        return w_ref
    return w_ref + float(w @ g_rows) / wsq


def residual_vector(candidate, scenario, ybus=None):
    """Stationarity residuals (2n,) of the closed loop at a candidate point.

    Rows 0..n-1: frequency channel, theta_i/(d_i+theta_i)*(w_ref - w_e)
    plus the weighted active-sharing mismatch sum_j a_ij (c_j - c_i) with
    c = k_p * P. Rows n..2n-1: voltage channel, sum_j a_ij (u_j - u_i)
    + theta_i (V_ref - V_i) with u = V + k_q * Q.
    """
    if ybus is None:
        ybus = assemble_bus_admittance(scenario.network)
    delta, v_mag = _unpack(candidate, scenario)
    p, q, *_ = phasor_injections(delta, v_mag, ybus)

    a = scenario.graph.adjacency
    th = scenario.graph.leaders
    deg = scenario.graph.in_degrees()
    c = scenario.k_p_vector() * p
    u = v_mag + scenario.k_q_vector() * q

    g_rows = a @ c - deg * c
    omega_e = _equilibrium_frequency(scenario, g_rows)
    r_w = th / (deg + th) * (scenario.options.reference_omega - omega_e) + g_rows
    r_v = (a @ u - deg * u) + th * (scenario.options.reference_voltage - v_mag)
    return np.concatenate([r_w, r_v])


def equilibrium_residual(candidate, scenario, ybus=None) -> float:
    """2-norm of ``residual_vector`` (the population-search objective)."""
    return float(np.linalg.norm(residual_vector(candidate, scenario, ybus)))


def _bounds(scenario):
    n = scenario.n
    v_ref = scenario.options.reference_voltage
    lo = np.concatenate([np.full(n - 1, -np.pi / 2), np.full(n, 0.5 * v_ref)])
    hi = np.concatenate([np.full(n - 1, np.pi / 2), np.full(n, 1.5 * v_ref)])
    return lo, hi


def _equilibrium_signature(scenario) -> str:
    """Cache key over the fields the equilibrium actually depends on.

    Latency and the stabilizer do not shift the steady state (the stabilizer
    has unit DC gain), so scenarios differing only there share a solution.
    """
    doc = scenario_to_dict(scenario)
    key = {
        "dgs": doc["dgs"],
        "lines": doc["lines"],
        "loads": doc["loads"],
        "v_nom": doc["v_nom_v"],
        "slack": doc["slack_bus"],
        "adjacency": scenario.graph.adjacency.tolist(),
        "leaders": scenario.graph.leaders.tolist(),
        "w_ref": scenario.options.reference_omega,
        "v_ref": scenario.options.reference_voltage,
        "tol": scenario.options.equilibrium_tol,
        "seed": scenario.options.rng_seed,
    }
    return hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()


_CACHE: dict[str, Equilibrium] = {}


def clear_cache() -> None:
    _CACHE.clear()


def solve_equilibrium(
    scenario: MicrogridScenario,
    initial_guess=None,
    use_cache: bool = True,
) -> Equilibrium:
    """Solve the operating point: population search, then damped refinement.

    Without an initial guess, a seeded differential-evolution search over
    delta in [-pi/2, pi/2] and V in [0.5, 1.5] * V_ref locates the basin,
    then trust-region least squares polishes to the residual tolerance.
    With ``initial_guess`` (a prior solution's packed candidate or an
    Equilibrium), the population stage is skipped. Deterministic for a fixed
    scenario and seed. Raises EquilibriumError when the tolerance cannot be
    met.
    """
    key = _equilibrium_signature(scenario)
    if use_cache and initial_guess is None and key in _CACHE:
        return _CACHE[key]

    ybus = assemble_bus_admittance(scenario.network)
    n = scenario.n
    dims = 2 * n - 1
    lo, hi = _bounds(scenario)
    tol = scenario.options.equilibrium_tol

    if initial_guess is None:
        popsize = max(5, int(np.ceil(20.0 * n / dims)))
        result = differential_evolution(
            equilibrium_residual,
            bounds=list(zip(lo, hi)),
            args=(scenario, ybus),
            maxiter=2000,
            popsize=popsize,
            tol=1e-3,
            seed=scenario.options.rng_seed,
            polish=False,
            workers=1,
        )
        x0 = result.x
    elif isinstance(initial_guess, Equilibrium):
        free = [i for i in range(n) if i != scenario.network.slack_bus]
        x0 = np.concatenate([initial_guess.delta[free], initial_guess.v])
    else:
        x0 = np.asarray(initial_guess, dtype=float)
    x0 = np.clip(x0, lo, hi)

    fit = least_squares(
        residual_vector,
        x0,
        args=(scenario, ybus),
        bounds=(lo, hi),
        method="trf",
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
    )
    res_norm = float(np.linalg.norm(fit.fun))
    if not np.isfinite(res_norm) or res_norm > tol:
        raise EquilibriumError(
            f"equilibrium solve did not reach tolerance {tol:.1e} "
            f"for scenario {scenario.name!r}",
            res_norm,
        )

    delta, v_mag = _unpack(fit.x, scenario)
    p, q, v_d, v_q, i_d, i_q = phasor_injections(delta, v_mag, ybus)
    a = scenario.graph.adjacency
    deg = scenario.graph.in_degrees()
    c = scenario.k_p_vector() * p
    omega_e = _equilibrium_frequency(scenario, a @ c - deg * c)

    eq = Equilibrium(
        delta=delta,
        v=v_mag,
        omega=omega_e,
        p=p,
        q=q,
        v_d=v_d,
        v_q=v_q,
        i_d=i_d,
        i_q=i_q,
        residual=res_norm,
    )
    if use_cache and initial_guess is None:
        _CACHE[key] = eq
    return eq
