"""Electrical network model: bus admittance assembly and dq decomposition.

Loads are constant-impedance, folded into the bus admittance diagonal, so the
DG output currents relate to the DG terminal voltages by I = Y V (per-phase
RMS phasors in a common synchronous frame).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ElectricalNetwork

__all__ = [
    "load_admittance",
    "line_admittance",
    "assemble_bus_admittance",
    "dq_decompose",
    "DqAdmittance",
]


def load_admittance(p_w: float, q_var: float, v_nom: float, s=None) -> complex:
    """Per-phase admittance of a three-phase (P, Q) load at nominal voltage.

    With S_phase = (P + jQ)/3 and I = Y V, S_phase = V (Y V)* gives
    Y = conj(S_phase) / v_nom^2. The load is frequency-independent; ``s`` is
    accepted for interface uniformity and ignored.
    """
    s_phase = (p_w + 1j * q_var) / 3.0
    return np.conj(s_phase) / (v_nom * v_nom)


def line_admittance(r_ohm: float, x_ohm: float) -> complex:
    """Series admittance 1 / (R + jX) of a branch."""
    z = complex(r_ohm, x_ohm)
    if z == 0:
        raise ValueError("line impedance must be nonzero")
    return 1.0 / z


def assemble_bus_admittance(network: ElectricalNetwork) -> np.ndarray:
    """Bus admittance matrix with loads on the diagonal.

    Y[i, i] collects the load admittance at bus i plus all incident line
    admittances; Y[i, j] = -y_line for each line between i and j. Buses
    without a connecting line simply have a zero off-diagonal entry.
    """
    n = network.n
    y = np.zeros((n, n), dtype=complex)
    for ld in network.loads:
        y[ld.bus, ld.bus] += load_admittance(ld.p_w, ld.q_var, network.v_nom)
    for ln in network.lines:
        yl = line_admittance(ln.r_ohm, ln.x_ohm)
        y[ln.from_bus, ln.from_bus] += yl
        y[ln.to_bus, ln.to_bus] += yl
        y[ln.from_bus, ln.to_bus] -= yl
        y[ln.to_bus, ln.from_bus] -= yl
    return y


@dataclass(eq=False)
class DqAdmittance:
    """Real dq form of a complex admittance matrix.

    ``blocks[i, j]`` is the 2x2 real representation [[G, -B], [B, G]] of
    Y[i, j]; ``assembled`` is the (2n, 2n) matrix acting on interleaved
    [d_1, q_1, d_2, q_2, ...] vectors.
    """

    blocks: np.ndarray
    assembled: np.ndarray


def dq_decompose(y: np.ndarray) -> DqAdmittance:
    """Expand a complex matrix into its real 2x2-block dq representation.

    The map z -> [[Re z, -Im z], [Im z, Re z]] is an algebra homomorphism:
    blocks multiply and add exactly as the complex entries do, and
    block(z) @ [Re w, Im w] = [Re(z w), Im(z w)].
    """
    y = np.asarray(y, dtype=complex)
    n = y.shape[0]
    if y.shape != (n, n):
        raise ValueError("admittance matrix must be square")
    g = y.real
    b = y.imag
    blocks = np.empty((n, n, 2, 2))
    blocks[:, :, 0, 0] = g
    blocks[:, :, 0, 1] = -b
    blocks[:, :, 1, 0] = b
    blocks[:, :, 1, 1] = g
    assembled = blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    return DqAdmittance(blocks=blocks, assembled=assembled)
