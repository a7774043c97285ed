"""Scenario model: data types, unit handling, file I/O and validation.

A scenario bundles everything needed to analyze one microgrid: per-DG control
and machine parameters, the directed communication graph with per-edge latency,
the electrical network (lines and constant-impedance loads), the communication
stabilizer configuration, and numerical analysis options.

Scenario files are YAML text (conventional extension ``.scn``) with explicit
unit-bearing key names (``p_kw``, ``r_ohm``, ``k_p_rad_per_s_per_kw``, ...).
Bus numbering inside files is 1-based to match engineering convention; all
in-memory indices are 0-based. All loaded quantities are normalized to SI
(W, VAR, ohm, rad/s, V, s) before use.
"""
from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

FORMAT_VERSION = 1

__all__ = [
    "DgParams",
    "CommGraph",
    "Line",
    "Load",
    "ElectricalNetwork",
    "StabilizerConfig",
    "AnalysisOptions",
    "MicrogridScenario",
    "StateLabeling",
    "ScenarioError",
    "load_scenario",
    "save_scenario",
    "validate",
    "build_state_labeling",
    "scenario_hash",
    "scenario_equal",
]


class ScenarioError(ValueError):
    """Raised when a scenario file cannot be parsed or fails validation."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class DgParams:
    """Control and virtual-machine parameters of one DG, in SI units.

    Attributes:
        k_p: active-power droop gain [rad/s per W].
        k_q: reactive-power droop gain [V per VAR].
        J: virtual inertia [kg m^2].
        omega_b: base angular frequency [rad/s].
        d_p: damping factor [N m] (torque damping scaled by omega_b).
        k1: proportional gain of the frequency restoration PI.
        k2: integral gain of the frequency restoration PI.
        sigma: power measurement low-pass time constant [s].
        sigma_v: voltage droop low-pass time constant [s].
    """

    k_p: float
    k_q: float
    J: float
    omega_b: float
    d_p: float
    k1: float
    k2: float
    sigma: float
    sigma_v: float

    @property
    def d_torque(self) -> float:
        """Damping torque factor D [N m s], with d_p = D * omega_b."""
        return self.d_p / self.omega_b


@dataclass(eq=False)
class CommGraph:
    """Directed communication graph with per-edge latency.

    ``adjacency[i, j] = 1`` means DG i receives data from DG j. ``leaders`` is
    the 0/1 pinning vector (theta): nodes that also track the global
    references. ``latency[i, j]`` is the delay in seconds on edge (i, j);
    entries on absent edges are stored but ignored.
    """

    adjacency: np.ndarray
    leaders: np.ndarray
    latency: np.ndarray

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=float)
        self.leaders = np.asarray(self.leaders, dtype=float)
        self.latency = np.asarray(self.latency, dtype=float)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def in_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> list[tuple[int, int]]:
        """Edge list [(receiver, sender), ...] in row-major order."""
        idx = np.argwhere(self.adjacency > 0)
        return [(int(i), int(j)) for i, j in idx]

    def with_uniform_latency(self, tau: float) -> "CommGraph":
        return CommGraph(
            adjacency=self.adjacency.copy(),
            leaders=self.leaders.copy(),
            latency=np.full_like(self.latency, float(tau)),
        )

    def with_adjacency(self, adjacency: np.ndarray) -> "CommGraph":
        return CommGraph(
            adjacency=np.asarray(adjacency, dtype=float),
            leaders=self.leaders.copy(),
            latency=self.latency.copy(),
        )


@dataclass(frozen=True)
class Line:
    """One branch between two buses (0-based), series impedance in ohm."""

    from_bus: int
    to_bus: int
    r_ohm: float
    x_ohm: float


@dataclass(frozen=True)
class Load:
    """Constant-impedance load at a bus; p_w, q_var are three-phase totals."""

    bus: int
    p_w: float
    q_var: float


@dataclass(eq=False)
class ElectricalNetwork:
    """Bus-level electrical model: lines, loads, nominal voltage, slack bus."""

    n: int
    lines: tuple[Line, ...]
    loads: tuple[Load, ...]
    v_nom: float
    slack_bus: int = 0

    def __post_init__(self):
        self.lines = tuple(self.lines)
        self.loads = tuple(self.loads)


@dataclass(frozen=True)
class StabilizerConfig:
    """Communication stabilizer filter, a biproper second-order section.

    F(s) = (num[0] s^2 + num[1] s + num[2]) / (den[0] s^2 + den[1] s + den[2]).
    The default damps high-frequency content of received signals by half while
    leaving DC untouched (F(0) = 1).
    """

    enabled: bool = False
    num: tuple[float, float, float] = (0.5, 1.0, 1.0)
    den: tuple[float, float, float] = (1.0, 2.0, 1.0)


@dataclass(frozen=True)
class AnalysisOptions:
    """Numerical knobs shared by the frequency- and time-domain engines.

    Frequencies are in rad/s. The Nyquist contour runs up the imaginary axis
    from the indent arc (radius ``origin_indent_radius`` around s = 0) to
    ``freq_max``, log-sampled at ``points_per_decade`` with adaptive
    refinement controlled by ``refine_tol``. ``margin_locus_cap`` excludes
    integrator-asymptote crossings (|lambda| above the cap) from gain-margin
    selection. ``marginal_band`` is the locus distance to (-1+0j) below which
    a verdict is reported as marginal.
    """

    freq_min: float = 2.0e-4
    freq_max: float = 1.0e4
    points_per_decade: int = 64
    refine_tol: float = 0.05
    origin_indent_radius: float = 1.0e-4
    margin_locus_cap: float = 1.0e3
    marginal_band: float = 1.0e-3
    sim_step: float = 1.0e-3
    sim_duration: float = 90.0
    rng_seed: int = 2024
    equilibrium_tol: float = 1.0e-6
    reference_omega: float = 377.0
    reference_voltage: float = 120.0
    tf_damping: str = "dp"

    def replace(self, **kw) -> "AnalysisOptions":
        return dataclasses.replace(self, **kw)


@dataclass(eq=False)
class MicrogridScenario:
    """Complete analysis scenario."""

    name: str
    dgs: tuple[DgParams, ...]
    graph: CommGraph
    network: ElectricalNetwork
    options: AnalysisOptions = field(default_factory=AnalysisOptions)
    stabilizer: StabilizerConfig = field(default_factory=StabilizerConfig)

    def __post_init__(self):
        self.dgs = tuple(self.dgs)

    @property
    def n(self) -> int:
        return len(self.dgs)

    def k_p_vector(self) -> np.ndarray:
        return np.array([d.k_p for d in self.dgs])

    def k_q_vector(self) -> np.ndarray:
        return np.array([d.k_q for d in self.dgs])

    def with_options(self, **kw) -> "MicrogridScenario":
        return MicrogridScenario(
            name=self.name,
            dgs=self.dgs,
            graph=self.graph,
            network=self.network,
            options=self.options.replace(**kw),
            stabilizer=self.stabilizer,
        )

    def with_graph(self, graph: CommGraph) -> "MicrogridScenario":
        return MicrogridScenario(
            name=self.name,
            dgs=self.dgs,
            graph=graph,
            network=self.network,
            options=self.options,
            stabilizer=self.stabilizer,
        )

    def with_uniform_latency(self, tau: float) -> "MicrogridScenario":
        return self.with_graph(self.graph.with_uniform_latency(tau))

    def with_stabilizer(self, enabled: bool) -> "MicrogridScenario":
        return MicrogridScenario(
            name=self.name,
            dgs=self.dgs,
            graph=self.graph,
            network=self.network,
            options=self.options,
            stabilizer=dataclasses.replace(self.stabilizer, enabled=enabled),
        )


@dataclass(eq=False)
class StateLabeling:
    """Index bookkeeping for the small-signal vectors.

    x stacks the n frequency deviations then the n voltage deviations;
    y stacks the n active then the n reactive power deviations. ``t_perm`` is
    the orthogonal permutation T that maps the stacked per-quantity ordering
    [q_1..q_n, r_1..r_n] to the interleaved per-DG ordering
    [q_1, r_1, q_2, r_2, ...].
    """

    x_order: tuple[str, ...]
    y_order: tuple[str, ...]
    t_perm: np.ndarray


def build_state_labeling(n: int) -> StateLabeling:
    """Return labels and the stacked-to-interleaved permutation for n DGs."""
    if n < 1:
        raise ValueError("n must be positive")
    x_order = tuple(f"omega[{i}]" for i in range(n)) + tuple(
        f"v[{i}]" for i in range(n)
    )
    y_order = tuple(f"p[{i}]" for i in range(n)) + tuple(
        f"q[{i}]" for i in range(n)
    )
    t = np.zeros((2 * n, 2 * n))
    for i in range(n):
        t[2 * i, i] = 1.0
        t[2 * i + 1, n + i] = 1.0
    return StateLabeling(x_order=x_order, y_order=y_order, t_perm=t)


# === scenario file I/O ===

# Recognized unit spellings and multipliers to SI, per quantity.
_UNIT_KEYS = {
    "p": {"p_kw": 1e3, "p_w": 1.0},
    "q": {"q_kvar": 1e3, "q_var": 1.0},
    "k_p": {"k_p_rad_per_s_per_kw": 1e-3, "k_p_rad_per_s_per_w": 1.0},
    "k_q": {"k_q_v_per_kvar": 1e-3, "k_q_v_per_var": 1.0},
}


def _take_unit(mapping: dict, quantity: str, loc: str) -> float:
    """Fetch one quantity given as exactly one of its unit spellings."""
    found = [k for k in _UNIT_KEYS[quantity] if k in mapping]
    if len(found) != 1:
        options = ", ".join(sorted(_UNIT_KEYS[quantity]))
        raise ScenarioError(
            f"expected exactly one of {options}, found {found or 'none'}", loc
        )
    key = found[0]
    return _as_float(mapping[key], f"{loc}.{key}") * _UNIT_KEYS[quantity][key]


def _as_float(value, loc: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"expected a number, got {value!r}", loc) from None
    if not math.isfinite(out):
        raise ScenarioError(f"expected a finite number, got {value!r}", loc)
    return out


def _as_int(value, loc: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"expected an integer, got {value!r}", loc)
    return value


def _as_map(value, loc: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"expected a mapping, got {type(value).__name__}", loc)
    return value


def _as_list(value, loc: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(f"expected a list, got {type(value).__name__}", loc)
    return value


def _bus_index(value, n: int, loc: str) -> int:
    b = _as_int(value, loc)
    if not 1 <= b <= n:
        raise ScenarioError(f"bus {b} out of range 1..{n}", loc)
    return b - 1


def _parse_dg(raw: dict, loc: str) -> DgParams:
    pi = _as_list(raw.get("pi_gains", [5.0e5, 1.0e5]), f"{loc}.pi_gains")
    if len(pi) != 2:
        raise ScenarioError("pi_gains must be [k1, k2]", f"{loc}.pi_gains")
    return DgParams(
        k_p=_take_unit(raw, "k_p", loc),
        k_q=_take_unit(raw, "k_q", loc),
        J=_as_float(raw.get("inertia_kgm2", 1.0), f"{loc}.inertia_kgm2"),
        omega_b=_as_float(
            raw.get("base_freq_rad_per_s", 377.0), f"{loc}.base_freq_rad_per_s"
        ),
        d_p=_resolve_damping(raw, loc),
        k1=_as_float(pi[0], f"{loc}.pi_gains[0]"),
        k2=_as_float(pi[1], f"{loc}.pi_gains[1]"),
        sigma=_as_float(raw.get("power_filter_s", 0.05), f"{loc}.power_filter_s"),
        sigma_v=_as_float(
            raw.get("voltage_filter_s", 0.1), f"{loc}.voltage_filter_s"
        ),
    )


def _resolve_damping(raw: dict, loc: str) -> float:
    """d_p [N m] and the torque factor D [N m s] relate by d_p = D * omega_b."""
    omega_b = _as_float(
        raw.get("base_freq_rad_per_s", 377.0), f"{loc}.base_freq_rad_per_s"
    )
    has_dp = "damping_nm" in raw
    has_d = "damping_torque_nms" in raw
    if has_dp and has_d:
        d_p = _as_float(raw["damping_nm"], f"{loc}.damping_nm")
        d = _as_float(raw["damping_torque_nms"], f"{loc}.damping_torque_nms")
        if not math.isclose(d_p, d * omega_b, rel_tol=1e-9):
            raise ScenarioError(
                "damping_nm and damping_torque_nms disagree "
                f"({d_p} != {d} * {omega_b})",
                loc,
            )
        return d_p
    if has_d:
        return _as_float(raw["damping_torque_nms"], f"{loc}.damping_torque_nms") * omega_b
    return _as_float(raw.get("damping_nm", 1.0), f"{loc}.damping_nm")


def _parse_graph(raw: dict, n: int, loc: str) -> CommGraph:
    adjacency = np.zeros((n, n))
    edges = _as_list(raw.get("edges", []), f"{loc}.edges")
    for k, e in enumerate(edges):
        eloc = f"{loc}.edges[{k}]"
        e = _as_list(e, eloc)
        if len(e) != 2:
            raise ScenarioError("edge must be [receiver, sender]", eloc)
        i = _bus_index(e[0], n, eloc)
        j = _bus_index(e[1], n, eloc)
        if i == j:
            raise ScenarioError("self edge not allowed", eloc)
        adjacency[i, j] = 1.0

    leaders = np.zeros(n)
    for k, b in enumerate(_as_list(raw.get("leaders", []), f"{loc}.leaders")):
        leaders[_bus_index(b, n, f"{loc}.leaders[{k}]")] = 1.0

    latency = np.zeros((n, n))
    raw_lat = raw.get("latency_s", 0.0)
    if isinstance(raw_lat, list):
        for k, entry in enumerate(raw_lat):
            eloc = f"{loc}.latency_s[{k}]"
            entry = _as_list(entry, eloc)
            if len(entry) != 3:
                raise ScenarioError(
                    "per-edge latency must be [receiver, sender, seconds]", eloc
                )
            i = _bus_index(entry[0], n, eloc)
            j = _bus_index(entry[1], n, eloc)
            latency[i, j] = _as_float(entry[2], eloc)
    else:
        latency[:] = _as_float(raw_lat, f"{loc}.latency_s")
    return CommGraph(adjacency=adjacency, leaders=leaders, latency=latency)


def _parse_scenario_dict(doc: dict) -> MicrogridScenario:
    doc = _as_map(doc, "scenario")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ScenarioError(
            f"format_version must be {FORMAT_VERSION}, got {version!r}",
            "format_version",
        )
    dgs_raw = _as_list(doc.get("dgs"), "dgs")
    if not dgs_raw:
        raise ScenarioError("at least one DG required", "dgs")
    dgs = tuple(
        _parse_dg(_as_map(raw, f"dgs[{i}]"), f"dgs[{i}]")
        for i, raw in enumerate(dgs_raw)
    )
    n = len(dgs)

    lines = []
    for k, raw in enumerate(_as_list(doc.get("lines", []), "lines")):
        loc = f"lines[{k}]"
        raw = _as_map(raw, loc)
        lines.append(
            Line(
                from_bus=_bus_index(raw.get("from"), n, f"{loc}.from"),
                to_bus=_bus_index(raw.get("to"), n, f"{loc}.to"),
                r_ohm=_as_float(raw.get("r_ohm"), f"{loc}.r_ohm"),
                x_ohm=_as_float(raw.get("x_ohm"), f"{loc}.x_ohm"),
            )
        )
    loads = []
    for k, raw in enumerate(_as_list(doc.get("loads", []), "loads")):
        loc = f"loads[{k}]"
        raw = _as_map(raw, loc)
        loads.append(
            Load(
                bus=_bus_index(raw.get("bus"), n, f"{loc}.bus"),
                p_w=_take_unit(raw, "p", loc),
                q_var=_take_unit(raw, "q", loc),
            )
        )

    network = ElectricalNetwork(
        n=n,
        lines=tuple(lines),
        loads=tuple(loads),
        v_nom=_as_float(doc.get("v_nom_v", 120.0), "v_nom_v"),
        slack_bus=_bus_index(doc.get("slack_bus", 1), n, "slack_bus"),
    )
    graph = _parse_graph(_as_map(doc.get("graph", {}), "graph"), n, "graph")

    opts_raw = _as_map(doc.get("analysis", {}), "analysis")
    control = _as_map(doc.get("control", {}), "control")
    defaults = AnalysisOptions()
    known = {f.name for f in dataclasses.fields(AnalysisOptions)}
    overrides = {}
    for key, value in opts_raw.items():
        if key not in known:
            raise ScenarioError(f"unknown analysis option {key!r}", f"analysis.{key}")
        if key == "tf_damping":
            overrides[key] = str(value)
        elif key in ("points_per_decade", "rng_seed"):
            overrides[key] = _as_int(value, f"analysis.{key}")
        else:
            overrides[key] = _as_float(value, f"analysis.{key}")
    if "reference_omega_rad_per_s" in control:
        overrides["reference_omega"] = _as_float(
            control["reference_omega_rad_per_s"], "control.reference_omega_rad_per_s"
        )
    if "reference_voltage_v" in control:
        overrides["reference_voltage"] = _as_float(
            control["reference_voltage_v"], "control.reference_voltage_v"
        )
    options = dataclasses.replace(defaults, **overrides)

    stab_raw = _as_map(doc.get("stabilizer", {}), "stabilizer")
    num = stab_raw.get("num", [0.5, 1.0, 1.0])
    den = stab_raw.get("den", [1.0, 2.0, 1.0])
    if len(_as_list(num, "stabilizer.num")) != 3 or len(
        _as_list(den, "stabilizer.den")
    ) != 3:
        raise ScenarioError("stabilizer num/den must have 3 coefficients each")
    stabilizer = StabilizerConfig(
        enabled=bool(stab_raw.get("enabled", False)),
        num=tuple(_as_float(c, "stabilizer.num") for c in num),
        den=tuple(_as_float(c, "stabilizer.den") for c in den),
    )

    scenario = MicrogridScenario(
        name=str(doc.get("name", "unnamed")),
        dgs=dgs,
        graph=graph,
        network=network,
        options=options,
        stabilizer=stabilizer,
    )
    problems = validate(scenario)
    if problems:
        raise ScenarioError("; ".join(problems), "validate")
    return scenario


def load_scenario(source) -> MicrogridScenario:
    """Load and validate a scenario from a path, text, or open stream.

    Raises ScenarioError with a field location (and, for syntax errors, the
    YAML line/column) when the file is malformed or violates an invariant.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text()
    elif isinstance(source, io.IOBase):
        text = source.read()
    else:
        text = str(source)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario text is not valid YAML: {exc}") from exc
    return _parse_scenario_dict(doc)


def scenario_to_dict(scenario: MicrogridScenario) -> dict:
    """Canonical SI-unit dictionary form of a scenario (used for save/hash)."""
    g = scenario.graph
    doc = {
        "format_version": FORMAT_VERSION,
        "name": scenario.name,
        "v_nom_v": scenario.network.v_nom,
        "slack_bus": scenario.network.slack_bus + 1,
        "dgs": [
            {
                "k_p_rad_per_s_per_w": d.k_p,
                "k_q_v_per_var": d.k_q,
                "inertia_kgm2": d.J,
                "base_freq_rad_per_s": d.omega_b,
                "damping_nm": d.d_p,
                "pi_gains": [d.k1, d.k2],
                "power_filter_s": d.sigma,
                "voltage_filter_s": d.sigma_v,
            }
            for d in scenario.dgs
        ],
        "lines": [
            {
                "from": ln.from_bus + 1,
                "to": ln.to_bus + 1,
                "r_ohm": ln.r_ohm,
                "x_ohm": ln.x_ohm,
            }
            for ln in scenario.network.lines
        ],
        "loads": [
            {"bus": ld.bus + 1, "p_w": ld.p_w, "q_var": ld.q_var}
            for ld in scenario.network.loads
        ],
        "graph": {
            "edges": [[i + 1, j + 1] for i, j in g.edges()],
            "leaders": [i + 1 for i in range(g.n) if g.leaders[i] > 0],
            "latency_s": [
                [i + 1, j + 1, float(g.latency[i, j])] for i, j in g.edges()
            ],
        },
        "control": {
            "reference_omega_rad_per_s": scenario.options.reference_omega,
            "reference_voltage_v": scenario.options.reference_voltage,
        },
        "stabilizer": {
            "enabled": scenario.stabilizer.enabled,
            "num": list(scenario.stabilizer.num),
            "den": list(scenario.stabilizer.den),
        },
        "analysis": {
            f.name: getattr(scenario.options, f.name)
            for f in dataclasses.fields(AnalysisOptions)
            if f.name not in ("reference_omega", "reference_voltage")
        },
    }
    return doc


def save_scenario(scenario: MicrogridScenario, path) -> None:
    """Write the scenario as SI-unit YAML; reloading reproduces it exactly."""
    doc = scenario_to_dict(scenario)
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))


def scenario_hash(scenario: MicrogridScenario) -> str:
    """sha256 of the canonical SI serialization; unit-spelling invariant."""
    blob = json.dumps(scenario_to_dict(scenario), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def scenario_equal(a: MicrogridScenario, b: MicrogridScenario) -> bool:
    """Field-for-field equality in SI units."""
    return scenario_to_dict(a) == scenario_to_dict(b)


def validate(scenario: MicrogridScenario) -> list[str]:
    """Check every structural invariant; return one message per violation."""
    out: list[str] = []
    n = scenario.n
    g = scenario.graph
    net = scenario.network
    opt = scenario.options

    if n < 2:
        out.append("scenario needs at least 2 DGs")
    if g.adjacency.shape != (n, n):
        out.append(f"graph adjacency shape {g.adjacency.shape} != ({n}, {n})")
        return out
    if g.latency.shape != (n, n):
        out.append(f"graph latency shape {g.latency.shape} != ({n}, {n})")
        return out
    if g.leaders.shape != (n,):
        out.append(f"graph leaders shape {g.leaders.shape} != ({n},)")
        return out
    if net.n != n:
        out.append(f"network bus count {net.n} != DG count {n}")

    a = g.adjacency
    if not np.isin(a, (0.0, 1.0)).all():
        out.append("adjacency entries must be 0 or 1")
    if np.diagonal(a).any():
        out.append("adjacency diagonal must be zero (no self edges)")
    if not np.isin(g.leaders, (0.0, 1.0)).all():
        out.append("leaders entries must be 0 or 1")
    if g.leaders.sum() < 1:
        out.append("at least one leader required")
    if (g.latency < 0).any() or not np.isfinite(g.latency).all():
        out.append("latencies must be finite and non-negative")

    for i, d in enumerate(scenario.dgs):
        for name in ("k_p", "J", "omega_b", "k1", "k2", "sigma", "sigma_v"):
            if getattr(d, name) <= 0:
                out.append(f"dgs[{i}].{name} must be positive")
        if d.k_q < 0:
            out.append(f"dgs[{i}].k_q must be non-negative")
        if d.d_p < 0:
            out.append(f"dgs[{i}].d_p must be non-negative")

    for k, ln in enumerate(net.lines):
        if not (0 <= ln.from_bus < n and 0 <= ln.to_bus < n):
            out.append(f"lines[{k}] references a bus outside 0..{n - 1}")
        if ln.from_bus == ln.to_bus:
            out.append(f"lines[{k}] connects a bus to itself")
        if ln.r_ohm < 0:
            out.append(f"lines[{k}].r_ohm must be non-negative")
        if ln.r_ohm == 0 and ln.x_ohm == 0:
            out.append(f"lines[{k}] has zero impedance")
    for k, ld in enumerate(net.loads):
        if not 0 <= ld.bus < n:
            out.append(f"loads[{k}] references a bus outside 0..{n - 1}")
    if net.v_nom <= 0:
        out.append("v_nom must be positive")
    if not 0 <= net.slack_bus < n:
        out.append("slack_bus out of range")

    if not 0 < opt.origin_indent_radius < opt.freq_min < opt.freq_max:
        out.append(
            "need 0 < origin_indent_radius < freq_min < freq_max "
            f"(got {opt.origin_indent_radius}, {opt.freq_min}, {opt.freq_max})"
        )
    if opt.points_per_decade < 8:
        out.append("points_per_decade must be at least 8")
    for name in ("refine_tol", "sim_step", "sim_duration", "equilibrium_tol",
                 "reference_omega", "reference_voltage", "margin_locus_cap",
                 "marginal_band"):
        if getattr(opt, name) <= 0:
            out.append(f"options.{name} must be positive")
    if opt.tf_damping not in ("dp", "d"):
        out.append("options.tf_damping must be 'dp' or 'd'")

    den = scenario.stabilizer.den
    if den[0] == 0:
        out.append("stabilizer denominator must be second order (den[0] != 0)")
    return out


def latency_warnings(scenario: MicrogridScenario) -> list[str]:
    """Advisory notes that do not fail validation."""
    g = scenario.graph
    out = []
    off_edge = (g.adjacency == 0) & (g.latency != 0)
    np.fill_diagonal(off_edge, False)
    for i, j in np.argwhere(off_edge):
        out.append(
            f"latency[{i},{j}]={g.latency[i, j]} set on an absent edge; ignored"
        )
    return out
