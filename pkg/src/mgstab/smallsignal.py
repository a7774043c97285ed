"""Frequency-domain small-signal model assembly.

State vector x stacks the n DG frequency deviations then the n voltage
deviations; output vector y stacks measured active then reactive power
deviations. The model splits into
  * per-DG transfer functions: the virtual-machine frequency response
    (restoration PI + inertia + damping), the first-order voltage droop lag,
    and the power measurement low-pass,
  * the communication structure: delayed adjacency, in-degree and leader
    pinning, with an optional stabilizer filter on every received signal,
  * the electrical coupling C(s) mapping x to y through the quasi-static
    phasor network, linearized at the equilibrium.

The return ratio L(s) = -(A(s) + B(s) C(s)) / s drives the Nyquist verdict:
the loop is the full interconnection broken at the integrator bank 1/s.

Two assemblies of the (A, B) blocks are provided. "direct" eliminates the
internal references from the per-DG control laws (frequency droop correction
enters through the active-power droop gains). "literal" keeps the published
block form, whose frequency coupling block carries the reactive droop gains
instead; it is retained for cross-checking and selected by flag.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import (
    CommGraph,
    DgParams,
    ElectricalNetwork,
    MicrogridScenario,
    StabilizerConfig,
    build_state_labeling,
)
from .equilibrium import Equilibrium
from .graph import delayed_adjacency
from .network import assemble_bus_admittance, dq_decompose

__all__ = [
    "TransferMatrixFn",
    "DqProjection",
    "dg_frequency_tf",
    "dg_voltage_tf",
    "stabilizer_tf",
    "build_dq_projection",
    "build_Cs",
    "build_As_Bs",
    "return_ratio",
    "closed_loop_ic_matrix",
]

ASSEMBLY_MODES = ("direct", "literal")


@dataclass(eq=False)
class TransferMatrixFn:
    """A matrix-valued function of the Laplace variable."""

    dim: int
    fn: Callable[[complex], np.ndarray]
    label: str = ""

    def __call__(self, s: complex) -> np.ndarray:
        out = np.asarray(self.fn(complex(s)))
        if out.shape != (self.dim, self.dim):
            raise ValueError(
                f"{self.label or 'transfer matrix'} returned shape {out.shape}, "
                f"expected ({self.dim}, {self.dim})"
            )
        return out


def dg_frequency_tf(params: DgParams, s: complex, damping: str = "dp"):
    """Reference-tracking and power-injection responses of one DG's frequency.

    Returns (t_omega, t_p) with
      t_omega = (k1 s + k2) / (J w_b s^2 + (k1 + d) s + k2)
      t_p     = s          / (J w_b s^2 + (k1 + d) s + k2)
    where d is the damping term: d_p by default ("dp"), or the damping torque
    factor D = d_p / w_b under the alternative convention ("d").
    """
    if damping == "dp":
        d = params.d_p
    elif damping == "d":
        d = params.d_torque
    else:
        raise ValueError(f"damping must be 'dp' or 'd', got {damping!r}")
    s = complex(s)
    den = params.J * params.omega_b * s * s + (params.k1 + d) * s + params.k2
    return (params.k1 * s + params.k2) / den, s / den


def dg_voltage_tf(params: DgParams, s: complex) -> complex:
    """First-order voltage droop lag 1 / (sigma_v s + 1)."""
    return 1.0 / (params.sigma_v * complex(s) + 1.0)


def stabilizer_tf(s: complex, config: StabilizerConfig | None = None) -> complex:
    """Evaluate the communication stabilizer F(s)."""
    if config is None:
        config = StabilizerConfig()
    s = complex(s)
    b2, b1, b0 = config.num
    a2, a1, a0 = config.den
    den = a2 * s * s + a1 * s + a0
    if den == 0:
        raise ZeroDivisionError(f"stabilizer evaluated at a pole (s = {s})")
    return (b2 * s * s + b1 * s + b0) / den


@dataclass(eq=False)
class DqProjection:
    """Per-DG linearization of the polar-to-dq voltage map at equilibrium.

    ``m_blocks[i]`` is the 2x2 Jacobian of (delta_i, V_i) -> (v_di, v_qi);
    ``assembled`` is its block-diagonal form acting on interleaved
    [delta_1, V_1, delta_2, V_2, ...] vectors. The auxiliary fields m_d, m_q,
    n_d, n_q are the angle/magnitude gradients of the inverse map and d_e its
    determinant, nonzero at any equilibrium with positive voltage.
    """

    m_d: np.ndarray
    m_q: np.ndarray
    n_d: np.ndarray
    n_q: np.ndarray
    d_e: np.ndarray
    m_blocks: np.ndarray
    assembled: np.ndarray


def build_dq_projection(eq: Equilibrium) -> DqProjection:
    """Jacobians of the voltage phasor components at the operating point.

    With delta = atan2(v_q, v_d) and V = hypot(v_d, v_q):
      m_d = d(delta)/d(v_d) = -v_q / V^2,  m_q = d(delta)/d(v_q) = v_d / V^2,
      n_d = d(V)/d(v_d)     =  v_d / V,    n_q = d(V)/d(v_q)     = v_q / V,
    d_e = m_d n_q - n_d m_q = -1/V, and the forward block
    M_e = (1/d_e) [[n_q, -m_q], [-n_d, m_d]] equals the Jacobian of
    (delta, V) -> (v_d, v_q).
    """
    v_d = np.asarray(eq.v_d, dtype=float)
    v_q = np.asarray(eq.v_q, dtype=float)
    v_sq = v_d * v_d + v_q * v_q
    if np.any(v_sq <= 0):
        raise ValueError("dq projection requires positive voltage magnitude")
    m_d = -v_q / v_sq
    m_q = v_d / v_sq
    v_abs = np.sqrt(v_sq)
    n_d = v_d / v_abs
    n_q = v_q / v_abs
    d_e = m_d * n_q - n_d * m_q

    n = v_d.size
    blocks = np.empty((n, 2, 2))
    blocks[:, 0, 0] = n_q / d_e
    blocks[:, 0, 1] = -m_q / d_e
    blocks[:, 1, 0] = -n_d / d_e
    blocks[:, 1, 1] = m_d / d_e

    assembled = np.zeros((2 * n, 2 * n))
    for i in range(n):
        assembled[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blocks[i]
    return DqProjection(
        m_d=m_d, m_q=m_q, n_d=n_d, n_q=n_q, d_e=d_e,
        m_blocks=blocks, assembled=assembled,
    )


def _power_sensitivity_const(eq: Equilibrium, network: ElectricalNetwork):
    """Constant part of C(s): stacked [delta; V] -> stacked [P; Q] map.

    3 (i_dqe + v_dqe Ydq) M in interleaved coordinates, wrapped back to the
    stacked ordering by the interleaving permutation.
    """
    n = len(eq.v_d)
    ydq = dq_decompose(assemble_bus_admittance(network)).assembled
    proj = build_dq_projection(eq)

    i_blocks = np.zeros((2 * n, 2 * n))
    v_blocks = np.zeros((2 * n, 2 * n))
    for i in range(n):
        sl = slice(2 * i, 2 * i + 2)
        i_blocks[sl, sl] = [[eq.i_d[i], eq.i_q[i]], [-eq.i_q[i], eq.i_d[i]]]
        v_blocks[sl, sl] = [[eq.v_d[i], eq.v_q[i]], [eq.v_q[i], -eq.v_d[i]]]

    t = build_state_labeling(n).t_perm
    k_inter = 3.0 * (i_blocks + v_blocks @ ydq) @ proj.assembled
    return t.T @ k_inter @ t


def build_Cs(
    eq: Equilibrium,
    network: ElectricalNetwork,
    dgs: Sequence[DgParams],
) -> TransferMatrixFn:
    """Electrical coupling C(s): state deviations to measured power deviations.

    Columns: the frequency channel acts through the angle integrator (1/s on
    the first n columns), the voltage channel directly. Rows: each DG's P and
    Q pass through its measurement low-pass 1/(sigma_i s + 1).
    """
    n = len(dgs)
    const = _power_sensitivity_const(eq, network)
    sigma = np.array([d.sigma for d in dgs])
    h_diag = np.concatenate([sigma, sigma])

    def fn(s: complex) -> np.ndarray:
        cs = np.empty((2 * n, 2 * n), dtype=complex)
        cs[:, :n] = const[:, :n] / s
        cs[:, n:] = const[:, n:]
        return cs / (h_diag * s + 1.0)[:, None]

    return TransferMatrixFn(dim=2 * n, fn=fn, label="C(s)")


def _comm_matrices(graph: CommGraph):
    deg = np.diag(graph.in_degrees())
    th = np.diag(graph.leaders)
    return deg, th


def _adjacency_at(scenario: MicrogridScenario, s: complex) -> np.ndarray:
    a_hat = delayed_adjacency(scenario.graph, s)
    if scenario.stabilizer.enabled:
        a_hat = a_hat * stabilizer_tf(s, scenario.stabilizer)
    return a_hat


def build_As_Bs(
    scenario: MicrogridScenario,
    s: complex,
    assembly: str = "direct",
):
    """Evaluate the (A, B) blocks of the small-signal model at one point.

    Frequency rows (n): s T_w (D + Th)^-1 A_hat drives the state block;
    the power block is s T_w (A_hat - D) K - s T_p with K the active droop
    gains under "direct" assembly and the reactive droop gains under
    "literal". Voltage rows (n): T_v (A_hat - D - Th) and
    T_v (A_hat - D - s I) K_q. A_hat is the delayed (and optionally
    stabilized) adjacency; D, Th are in-degree and leader diagonals.
    """
    if assembly not in ASSEMBLY_MODES:
        raise ValueError(f"assembly must be one of {ASSEMBLY_MODES}")
    s = complex(s)
    n = scenario.n
    damping = scenario.options.tf_damping
    t_w = np.empty(n, dtype=complex)
    t_p = np.empty(n, dtype=complex)
    t_v = np.empty(n, dtype=complex)
    for i, d in enumerate(scenario.dgs):
        t_w[i], t_p[i] = dg_frequency_tf(d, s, damping)
        t_v[i] = dg_voltage_tf(d, s)

    a_hat = _adjacency_at(scenario, s)
    deg, th = _comm_matrices(scenario.graph)
    inv_dth = np.diag(1.0 / (np.diagonal(deg) + np.diagonal(th)))
    k_p = np.diag(scenario.k_p_vector())
    k_q = np.diag(scenario.k_q_vector())
    eye = np.eye(n)

    a_mat = np.zeros((2 * n, 2 * n), dtype=complex)
    b_mat = np.zeros((2 * n, 2 * n), dtype=complex)

    a_mat[:n, :n] = (s * t_w)[:, None] * (inv_dth @ a_hat)
    a_mat[n:, n:] = t_v[:, None] * (a_hat - deg - th)

    k_freq = k_q if assembly == "literal" else k_p
    b_mat[:n, :n] = (s * t_w)[:, None] * ((a_hat - deg) @ k_freq) - np.diag(s * t_p)
    b_mat[n:, n:] = t_v[:, None] * ((a_hat - deg - s * eye) @ k_q)
    return a_mat, b_mat


def return_ratio(
    scenario: MicrogridScenario,
    eq: Equilibrium,
    assembly: str = "direct",
) -> TransferMatrixFn:
    """Loop transfer matrix L(s) = -(A(s) + B(s) C(s)) / s."""
    if assembly not in ASSEMBLY_MODES:
        raise ValueError(f"assembly must be one of {ASSEMBLY_MODES}")
    c_fn = build_Cs(eq, scenario.network, scenario.dgs)

    def fn(s: complex) -> np.ndarray:
        a_mat, b_mat = build_As_Bs(scenario, s, assembly)
        return -(a_mat + b_mat @ c_fn(s)) / s

    return TransferMatrixFn(dim=2 * scenario.n, fn=fn, label="L(s)")


def closed_loop_ic_matrix(
    scenario: MicrogridScenario,
    eq: Equilibrium,
    s: complex,
) -> np.ndarray:
    """Exact transfer from state initial offsets to the state response.

    Returns X(s) such that x(s) = X(s) x0 for a perturbation applied at t = 0
    to the frequency and voltage states, all internal states starting at
    equilibrium. Unlike the return-ratio blocks, the frequency rows keep the
    machine dynamics explicit (the restoration PI, inertia and damping appear
    directly, not folded into an algebraic identity), so the reconstructed
    trajectory is the true linearized initial-value response:

      J w_b (s w - w0) = (k1 + k2/s)(w* - w) - p - d_p w
      s v - v0 = T_v (A_hat - D - Th) v + T_v (A_hat - D - s) k_q q
                 + (1 - T_v) v0

    with w* from the delayed averaging law and (p, q) = C(s) x.
    """
    s = complex(s)
    n = scenario.n
    a_hat = _adjacency_at(scenario, s)
    deg, th = _comm_matrices(scenario.graph)
    inv_dth = np.diag(1.0 / (np.diagonal(deg) + np.diagonal(th)))
    k_p = np.diag(scenario.k_p_vector())
    k_q = np.diag(scenario.k_q_vector())
    eye = np.eye(n)

    g_pi = np.array([d.k1 + d.k2 / s for d in scenario.dgs])
    j_wb = np.array([d.J * d.omega_b for d in scenario.dgs])
    d_p = np.array([d.d_p for d in scenario.dgs])
    t_v = np.array([dg_voltage_tf(d, s) for d in scenario.dgs])
    sig_v = np.array([d.sigma_v for d in scenario.dgs])

    a2 = np.zeros((2 * n, 2 * n), dtype=complex)
    b2 = np.zeros((2 * n, 2 * n), dtype=complex)
    a2[:n, :n] = (g_pi / j_wb)[:, None] * (inv_dth @ a_hat - eye) - np.diag(
        d_p / j_wb
    )
    a2[n:, n:] = t_v[:, None] * (a_hat - deg - th)
    b2[:n, :n] = (g_pi / j_wb)[:, None] * ((a_hat - deg) @ k_p) - np.diag(
        1.0 / j_wb
    )
    b2[n:, n:] = t_v[:, None] * ((a_hat - deg - s * eye) @ k_q)

    c_mat = build_Cs(eq, scenario.network, scenario.dgs)(s)
    lhs = s * np.eye(2 * n) - a2 - b2 @ c_mat
    w_inject = np.concatenate([np.ones(n), sig_v * s / (sig_v * s + 1.0)])
    return np.linalg.solve(lhs, np.diag(w_inject).astype(complex))
