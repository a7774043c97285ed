"""Generalized Nyquist assessment of the return ratio.

The contour runs along the imaginary axis with a small right-half-plane
indent arc around s = 0 (the loop contains integrators, so the origin must be
excluded). Only the upper half is evaluated; conjugate symmetry doubles the
accumulated argument, and a closing correction accounts for the truncation at
freq_max, where the loop gain must already be inside the unit circle.

Two independent winding computations run on the same adaptively refined grid:
the summed argument increments of the matched characteristic loci around
(-1+0j), and the argument-principle winding of det(I + L) evaluated through
LU factorization. The determinant route decides the verdict; the loci provide
gain and phase margins. Windings are reported with the orientation that makes
the count equal the number of right-half-plane closed-loop poles, so 0 means
stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import AnalysisOptions, MicrogridScenario, scenario_hash
from .equilibrium import Equilibrium, solve_equilibrium
from .smallsignal import TransferMatrixFn, return_ratio

__all__ = [
    "LociSweep",
    "Margins",
    "NyquistAnalysis",
    "ThresholdResult",
    "build_contour_params",
    "sweep_loci",
    "winding_number",
    "margins",
    "assess_stability",
    "latency_threshold",
]


# === contour parameterization ===
# Param t in [0, 1] is the indent arc s = eps * exp(j phi), phi = t * pi/2.
# Param t in [1, 2] is the axis s = j omega, omega log-interpolated from eps
# to freq_max. Midpoints in t are angular / geometric midpoints.


def _param_to_s(t: float, eps: float, fmax: float) -> complex:
    if t <= 1.0:
        phi = 0.5 * math.pi * t
        return eps * complex(math.cos(phi), math.sin(phi))
    omega = eps * (fmax / eps) ** (t - 1.0)
    return 1j * omega


def build_contour_params(options: AnalysisOptions) -> np.ndarray:
    """Initial contour parameters: indent arc plus log-spaced axis samples."""
    eps = options.origin_indent_radius
    fmax = options.freq_max
    n_arc = max(16, options.points_per_decade // 4)
    decades = math.log10(fmax / eps)
    n_axis = max(2, int(math.ceil(options.points_per_decade * decades)) + 1)
    arc = np.linspace(0.0, 1.0, n_arc, endpoint=False)
    axis = 1.0 + np.linspace(0.0, 1.0, n_axis)
    return np.concatenate([arc, axis])


@dataclass(eq=False)
class LociSweep:
    """Matched characteristic loci along the contour.

    ``loci[k, i]`` is branch k at sample i; branches are continuous in i
    (matched by minimum-total-distance assignment). ``dets[i]`` is
    det(I + L) from an independent LU factorization at the same sample.
    """

    params: np.ndarray
    s_values: np.ndarray
    loci: np.ndarray
    dets: np.ndarray
    eps: float
    fmax: float
    n_initial: int

    @property
    def n_branches(self) -> int:
        return self.loci.shape[0]

    def axis_mask(self) -> np.ndarray:
        return self.params >= 1.0


def _eval_point(l_fn, s):
    m = l_fn(s)
    lam = np.linalg.eigvals(m)
    det = np.linalg.det(np.eye(m.shape[0]) + m)
    return lam, det


def _match(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Order ``new`` to continue the branches of ``prev``."""
    cost = np.abs(prev[:, None] - new[None, :])
    _, cols = linear_sum_assignment(cost)
    return new[cols]


def _needs_refine(lam_a, lam_b, det_a, det_b, refine_tol):
    matched_b = _match(lam_a, lam_b)
    move = np.abs(matched_b - lam_a)
    prox = np.minimum(np.abs(lam_a + 1.0), np.abs(matched_b + 1.0))
    if np.any(move > refine_tol * (0.2 + prox)):
        return True
    if np.abs(np.angle((matched_b + 1.0) / (lam_a + 1.0))).max() > 0.5 * math.pi:
        return True
    if abs(np.angle(det_b / det_a)) > 0.5 * math.pi:
        return True
    return False


def sweep_loci(
    l_fn: TransferMatrixFn,
    options: AnalysisOptions,
    max_points: int = 20000,
) -> LociSweep:
    """Evaluate the loci along the contour with adaptive local refinement.

    Intervals are subdivided until consecutive matched points move by less
    than refine_tol relative to their distance from (-1+0j), every branch's
    argument step around -1 stays below pi/2, and so does the determinant's.
    """
    eps = options.origin_indent_radius
    fmax = options.freq_max
    ts = list(build_contour_params(options))
    n_initial = len(ts)
    evals = {}
    for t in ts:
        evals[t] = _eval_point(l_fn, _param_to_s(t, eps, fmax))

    min_dt = 1e-7
    while len(ts) < max_points:
        inserts = []
        for a, b in zip(ts[:-1], ts[1:]):
            if b - a <= min_dt:
                continue
            lam_a, det_a = evals[a]
            lam_b, det_b = evals[b]
            if _needs_refine(lam_a, lam_b, det_a, det_b, options.refine_tol):
                inserts.append(0.5 * (a + b))
        if not inserts:
            break
        if len(ts) + len(inserts) > max_points:
            inserts = inserts[: max_points - len(ts)]
        for t in inserts:
            evals[t] = _eval_point(l_fn, _param_to_s(t, eps, fmax))
        ts = sorted(ts + inserts)

    params = np.array(ts)
    s_values = np.array([_param_to_s(t, eps, fmax) for t in ts])
    m = len(ts)
    dim = evals[ts[0]][0].size
    loci = np.empty((dim, m), dtype=complex)
    dets = np.empty(m, dtype=complex)

    first = np.array(sorted(evals[ts[0]][0], key=lambda z: (z.real, z.imag)))
    loci[:, 0] = first
    dets[0] = evals[ts[0]][1]
    for i in range(1, m):
        lam, det = evals[ts[i]]
        loci[:, i] = _match(loci[:, i - 1], lam)
        dets[i] = det
    return LociSweep(
        params=params,
        s_values=s_values,
        loci=loci,
        dets=dets,
        eps=eps,
        fmax=fmax,
        n_initial=n_initial,
    )


def _half_contour_winding_loci(sweep: LociSweep) -> float:
    """Accumulated argument of prod_k (lambda_k + 1) along the half contour."""
    z = sweep.loci + 1.0
    steps = np.angle(z[:, 1:] / z[:, :-1])
    total = float(steps.sum())
    # closing correction for the truncated tail beyond freq_max
    total -= float(np.angle(z[:, -1]).sum())
    return total


def _half_contour_winding_det(sweep: LociSweep) -> float:
    steps = np.angle(sweep.dets[1:] / sweep.dets[:-1])
    total = float(steps.sum())
    total -= float(np.angle(sweep.dets[-1]))
    return total


def _integerize(total_half: float) -> tuple[int, float]:
    turns = 2.0 * total_half / (2.0 * math.pi)
    return int(round(turns)), abs(turns - round(turns))


def winding_from_sweep(sweep: LociSweep) -> tuple[int, int]:
    """(loci winding, det winding), oriented so instability counts positive."""
    w_loci, _ = _integerize(_half_contour_winding_loci(sweep))
    w_det, _ = _integerize(_half_contour_winding_det(sweep))
    return -w_loci, -w_det


def winding_number(l_fn: TransferMatrixFn, options: AnalysisOptions) -> int:
    """Signed winding of the loci about (-1+0j), dual-route checked.

    Computes the loci-increment winding and the det(I+L) argument-principle
    winding on the same grid and requires them to agree exactly.
    """
    sweep = sweep_loci(l_fn, options)
    w_loci, w_det = winding_from_sweep(sweep)
    if w_loci != w_det:
        raise ArithmeticError(
            f"winding disagreement: loci route {w_loci}, det route {w_det}"
        )
    return w_det


@dataclass(eq=False)
class Margins:
    gm: float
    pm: float
    gm_omega: float | None
    pm_omega: float | None
    gm_crossings: list = field(default_factory=list)
    pm_crossings: list = field(default_factory=list)


def _bisect_crossing(l_fn, sweep, i, k, target, tol_t=1e-13, max_iter=60):
    """Refine a crossing of branch k in (params[i], params[i+1]).

    ``target`` maps a locus point to a signed scalar; the crossing is its
    zero. Branch continuation picks the eigenvalue nearest the linear
    interpolation of the bracket endpoints. Falls back to interpolation alone
    when no evaluator is given.
    """
    t_a, t_b = sweep.params[i], sweep.params[i + 1]
    lam_a, lam_b = sweep.loci[k, i], sweep.loci[k, i + 1]
    f_a, f_b = target(lam_a, t_a), target(lam_b, t_b)
    if l_fn is None:
        frac = f_a / (f_a - f_b)
        t_c = t_a + frac * (t_b - t_a)
        return lam_a + frac * (lam_b - lam_a), t_c
    for _ in range(max_iter):
        if t_b - t_a < tol_t:
            break
        t_m = 0.5 * (t_a + t_b)
        s_m = _param_to_s(t_m, sweep.eps, sweep.fmax)
        lam_all = np.linalg.eigvals(l_fn(s_m))
        guess = lam_a + (t_m - t_a) / (t_b - t_a) * (lam_b - lam_a)
        lam_m = lam_all[np.argmin(np.abs(lam_all - guess))]
        f_m = target(lam_m, t_m)
        if f_m == 0.0:
            return lam_m, t_m
        if np.sign(f_m) == np.sign(f_a):
            t_a, lam_a, f_a = t_m, lam_m, f_m
        else:
            t_b, lam_b, f_b = t_m, lam_m, f_m
    frac = f_a / (f_a - f_b) if f_a != f_b else 0.5
    t_c = t_a + frac * (t_b - t_a)
    return lam_a + frac * (lam_b - lam_a), t_c


def margins(
    sweep: LociSweep,
    l_fn: TransferMatrixFn | None = None,
    locus_cap: float = 1e3,
) -> Margins:
    """Gain and phase margins from the axis portion of the matched loci.

    Gain margin: 1/|lambda| at the negative-real-axis crossing closest to
    instability (largest |lambda|, capped to exclude the integrator asymptote
    near the origin). Phase margin: 180 deg + arg(lambda) at unit-magnitude
    crossings, minimized over all branches. Crossings are bracketed on the
    sweep grid, then refined by bisection on fresh evaluations when the
    transfer function is available. Both margins are +inf when no crossing
    exists.
    """
    axis = np.flatnonzero(sweep.axis_mask())
    gm_crossings = []
    pm_crossings = []
    for k in range(sweep.n_branches):
        lam = sweep.loci[k]
        for a, b in zip(axis[:-1], axis[1:]):
            la, lb = lam[a], lam[b]
            # negative-real-axis crossing: imaginary part changes sign left
            # of the origin
            if la.imag * lb.imag < 0 and min(la.real, lb.real) < 0:
                lam_c, t_c = _bisect_crossing(
                    l_fn, sweep, a, k, lambda z, t: z.imag
                )
                if lam_c.real < 0 and abs(lam_c.real) <= locus_cap:
                    omega = _param_to_s(t_c, sweep.eps, sweep.fmax).imag
                    gm_crossings.append((abs(lam_c.real), omega))
            # unit-circle crossing
            fa, fb = abs(la) - 1.0, abs(lb) - 1.0
            if fa * fb < 0:
                lam_c, t_c = _bisect_crossing(
                    l_fn, sweep, a, k, lambda z, t: abs(z) - 1.0
                )
                omega = _param_to_s(t_c, sweep.eps, sweep.fmax).imag
                pm = 180.0 + math.degrees(np.angle(lam_c))
                pm_crossings.append((pm, omega))

    if gm_crossings:
        mag, gm_omega = max(gm_crossings, key=lambda c: c[0])
        gm = 1.0 / mag
    else:
        gm, gm_omega = math.inf, None
    if pm_crossings:
        pm, pm_omega = min(pm_crossings, key=lambda c: c[0])
    else:
        pm, pm_omega = math.inf, None
    return Margins(
        gm=gm,
        pm=pm,
        gm_omega=gm_omega,
        pm_omega=pm_omega,
        gm_crossings=gm_crossings,
        pm_crossings=pm_crossings,
    )


@dataclass(eq=False)
class NyquistAnalysis:
    """Complete frequency-domain verdict for one scenario."""

    verdict: str
    winding: int
    det_winding: int
    gm: float
    pm: float
    gm_omega: float | None
    pm_omega: float | None
    min_distance: float
    sweep: LociSweep
    assembly: str
    scenario_name: str
    scenario_sha256: str
    notes: list[str] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.verdict == "stable"


def assess_stability(
    scenario: MicrogridScenario,
    eq: Equilibrium | None = None,
    assembly: str = "direct",
    options: AnalysisOptions | None = None,
) -> NyquistAnalysis:
    """Assemble the return ratio, sweep the contour, and judge stability.

    The verdict is "stable" when the determinant winding is zero, "unstable"
    when nonzero, and "marginal" when the loci pass within the marginal band
    of (-1+0j) regardless of the count. When stable, the gain margin also
    serves as the convergence-rate indicator: the distance of the dominant
    locus from the critical point bounds how fast consensus transients decay.
    """
    opts = options or scenario.options
    if eq is None:
        eq = solve_equilibrium(scenario)
    l_fn = return_ratio(scenario, eq, assembly)
    sweep = sweep_loci(l_fn, opts)
    w_loci, w_det = winding_from_sweep(sweep)
    mar = margins(sweep, l_fn, locus_cap=opts.margin_locus_cap)
    min_distance = float(np.abs(sweep.loci + 1.0).min())

    notes = []
    if w_loci != w_det:
        notes.append(
            f"winding disagreement: loci {w_loci} vs det {w_det}; "
            "det route used for the verdict"
        )
    tail_gain = float(np.abs(sweep.loci[:, -1]).max())
    if tail_gain >= 1.0:
        notes.append(
            f"|lambda| = {tail_gain:.3f} at freq_max; raise freq_max for a "
            "trustworthy truncation"
        )
    if min_distance < opts.marginal_band:
        verdict = "marginal"
    elif w_det == 0:
        verdict = "stable"
    else:
        verdict = "unstable"

    return NyquistAnalysis(
        verdict=verdict,
        winding=w_loci,
        det_winding=w_det,
        gm=mar.gm,
        pm=mar.pm,
        gm_omega=mar.gm_omega,
        pm_omega=mar.pm_omega,
        min_distance=min_distance,
        sweep=sweep,
        assembly=assembly,
        scenario_name=scenario.name,
        scenario_sha256=scenario_hash(scenario),
        notes=notes,
    )


@dataclass(eq=False)
class ThresholdResult:
    """Critical uniform latency located by bisection."""

    tau_star: float
    bracket: tuple[float, float]
    tol: float
    history: list[tuple[float, str]]
    monotone_ok: bool
    notes: list[str] = field(default_factory=list)


def latency_threshold(
    scenario: MicrogridScenario,
    lo: float,
    hi: float,
    tol: float = 0.01,
    assembly: str = "direct",
    options: AnalysisOptions | None = None,
) -> ThresholdResult:
    """Bisect the uniform edge latency between a stable lo and unstable hi.

    The equilibrium does not depend on latency, so it is solved once and
    shared by every probe. Monotonicity (stable below, unstable above) is
    assumed within the bracket and verified afterwards at 5 interior points;
    inconsistencies are reported in ``notes`` and clear ``monotone_ok``.
    """
    if not 0 <= lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    eq = solve_equilibrium(scenario)
    history = []

    def verdict_at(tau: float) -> str:
        probe = scenario.with_uniform_latency(tau)
        v = assess_stability(probe, eq=eq, assembly=assembly, options=options).verdict
        history.append((tau, v))
        return v

    v_lo = verdict_at(lo)
    v_hi = verdict_at(hi)
    if v_lo != "stable":
        raise ValueError(f"bracket low end tau={lo} is not stable ({v_lo})")
    if v_hi == "stable":
        raise ValueError(f"bracket high end tau={hi} is stable")

    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        if verdict_at(mid) == "stable":
            a = mid
        else:
            b = mid
    tau_star = 0.5 * (a + b)

    notes = []
    monotone_ok = True
    for tau in np.linspace(lo, hi, 7)[1:-1]:
        v = verdict_at(float(tau))
        expect_stable = tau < tau_star
        if (v == "stable") != expect_stable:
            if abs(tau - tau_star) > tol:
                monotone_ok = False
                notes.append(
                    f"verdict {v} at tau={tau:.4f} conflicts with "
                    f"tau*={tau_star:.4f}"
                )
    return ThresholdResult(
        tau_star=tau_star,
        bracket=(lo, hi),
        tol=tol,
        history=history,
        monotone_ok=monotone_ok,
        notes=notes,
    )
