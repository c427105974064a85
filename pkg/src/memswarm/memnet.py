"""Memristive networks driven by a constant current source.

Each device has conductance ``sigma(x) = sigma_on*x + sigma_off*(1 - x)``
and an internal state obeying ``dx/dt = kappa*I - Gamma*x``; with a
threshold ``I_t > 0`` the drive term becomes
``sgn(I)*kappa*(|I| - I_t)`` and vanishes below threshold.  A graph is
compiled into a circuit (one device per unit of edge length), the source
current enters at the graph's source and leaves at its target, and the
device states are advanced in time with the circuit re-solved at every
Runge-Kutta stage.  The shortest path ends up stored in the device states.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    NonIntegerLengthInChainMode,
    SingularSystem,
    StateBlowup,
    StateOutOfRange,
    ZeroRelaxation,
)
from .graph import Graph, Node, Path, build_graph, extract_path, hop_distances
from .integrate import n_steps_for, rk4_step
from .trajectory import Trajectory


@dataclass(frozen=True)
class DeviceParams:
    sigma_on: float = 0.01
    sigma_off: float = 1e-5
    kappa: float = 1.0
    Gamma: float = 0.1
    I_t: float = 0.0

    def __post_init__(self):
        if not self.sigma_on > self.sigma_off > 0:
            raise ValueError("need sigma_on > sigma_off > 0")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.Gamma < 0 or self.I_t < 0:
            raise ValueError("Gamma and I_t must be non-negative")


def conductance(p: DeviceParams, x):
    """Device conductance at state ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > 1) or np.any(np.isnan(xa)):
        raise StateOutOfRange(f"state must lie in [0, 1], got {x!r}")
    sigma = p.sigma_on * xa + p.sigma_off * (1.0 - xa)
    return float(sigma) if sigma.ndim == 0 else sigma


def state_derivative(p: DeviceParams, x, I):
    """``dx/dt`` for current ``I``; pure relaxation below the threshold."""
    x = np.asarray(x, dtype=float)
    I = np.asarray(I, dtype=float)
    mag = np.abs(I)
    drive = np.where(mag < p.I_t, 0.0, np.sign(I) * p.kappa * (mag - p.I_t))
    rate = drive - p.Gamma * x
    return float(rate) if rate.ndim == 0 else rate


@dataclass(frozen=True)
class Branch:
    """``n`` unit devices in series between ``tail`` and ``head``, lumped.

    Positive current flows from tail to head.  ``n`` is the edge length in
    lumped mode and may be fractional there.
    """

    tail: Node
    head: Node
    edge_id: int
    n: float = 1

    def limits(self, p: DeviceParams) -> tuple[float, float]:
        return p.sigma_on / self.n, p.sigma_off / self.n


@dataclass(frozen=True)
class OperatingPoint:
    voltages: np.ndarray  # per node, ground (target) at 0
    currents: np.ndarray  # per branch, signed along orientation
    conductances: np.ndarray  # per branch
    network: Network

    def kcl_residual(self) -> np.ndarray:
        """Net current leaving each node through branches minus injection."""
        net = self.network
        out = np.zeros(len(net.nodes))
        np.add.at(out, net.tail_index, self.currents)
        np.subtract.at(out, net.head_index, self.currents)
        out[net.node_index[net.source]] -= net.I0
        out[net.node_index[net.target]] += net.I0
        return out

    def dissipated_power(self) -> float:
        drop = self.voltages[self.network.tail_index] - self.voltages[self.network.head_index]
        return float(np.sum(self.conductances * drop**2))

    @property
    def source_voltage(self) -> float:
        return float(self.voltages[self.network.node_index[self.network.source]])


class Network:
    """A compiled circuit: oriented branches, node incidence and the source current."""

    def __init__(self, graph: Graph, device: DeviceParams, branches: Sequence[Branch], nodes: Sequence[Node], I0: float):
        if not branches:
            raise ValueError("network needs at least one branch")
        if I0 < 0:
            raise ValueError("I0 must be non-negative")
        self.graph = graph
        self.device = device
        self.branches = tuple(branches)
        self.nodes = tuple(nodes)
        self.I0 = float(I0)
        self.source = graph.source
        self.target = graph.target
        self.node_index = {n: i for i, n in enumerate(self.nodes)}
        self.tail_index = np.array([self.node_index[b.tail] for b in self.branches])
        self.head_index = np.array([self.node_index[b.head] for b in self.branches])
        self.edge_of_branch = np.array([b.edge_id for b in self.branches])
        mult = np.array([b.n for b in self.branches], dtype=float)
        self.sigma_on = device.sigma_on / mult
        self.sigma_off = device.sigma_off / mult
        # reduced numbering: grounded nodes are dropped and map to -1
        grounded = self._ground_nodes()
        self._reduced = np.full(len(self.nodes), -1)
        free = [i for i in range(len(self.nodes)) if i not in grounded]
        self._reduced[free] = np.arange(len(free))
        self._injection = np.zeros(len(free))
        self._injection[self._reduced[self.node_index[self.source]]] = self.I0
        counts = np.bincount(self.edge_of_branch, minlength=graph.n_edges)
        # (branches, edges) averaging matrix
        self._to_edges = np.zeros((self.n_branches, graph.n_edges))
        self._to_edges[np.arange(self.n_branches), self.edge_of_branch] = 1.0 / counts[self.edge_of_branch]

    def _ground_nodes(self) -> set[int]:
        # the target, plus one node of every component cut off from it; those
        # carry no current but need a voltage reference to keep the system regular
        parent = list(range(len(self.nodes)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for t, h in zip(self.tail_index, self.head_index):
            parent[find(t)] = find(h)
        target = self.node_index[self.target]
        grounded = {target}
        roots = {find(target)}
        for i in range(len(self.nodes)):
            if find(i) not in roots:
                roots.add(find(i))
                grounded.add(i)
        return grounded

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    def initial_states(self) -> np.ndarray:
        return np.zeros(self.n_branches)

    def edge_states(self, states) -> np.ndarray:
        """Per-edge state, the mean over the edge's devices; rows of a 2-D input are samples."""
        return np.asarray(states, dtype=float) @ self._to_edges

    def branch_conductances(self, states) -> np.ndarray:
        x = np.asarray(states, dtype=float)
        return self.sigma_off + x * (self.sigma_on - self.sigma_off)

    def rates(self, states) -> np.ndarray:
        """State derivatives, zeroed where they would push x out of [0, 1]."""
        x = np.asarray(states, dtype=float)
        dx = state_derivative(self.device, x, solve_dc(self, x).currents)
        dx = np.where(((x <= 0) & (dx < 0)) | ((x >= 1) & (dx > 0)), 0.0, dx)
        return dx

    def kernel_args(self):
        return (
            self._reduced[self.tail_index],
            self._reduced[self.head_index],
            self._injection,
            self.sigma_on,
            self.sigma_off,
            np.full(self.n_branches, self.device.kappa, dtype=float),
            np.full(self.n_branches, self.device.Gamma, dtype=float),
            np.full(self.n_branches, self.device.I_t, dtype=float),
        )

    def __repr__(self) -> str:
        return f"Network({self.n_branches} branches, {len(self.nodes)} nodes, I0={self.I0})"


def _orient(u: Node, v: Node, rank: dict) -> tuple[Node, Node]:
    return (u, v) if rank[u] <= rank[v] else (v, u)


def graph_to_network(
    g: Graph, p: DeviceParams, mode: Literal["chain", "lumped"] = "lumped", I0: float = 0.1
) -> Network:
    """Compile ``g`` into a memristive circuit.

    ``chain`` puts ``L`` unit devices in series on an edge of integer length
    ``L`` (adding ``L - 1`` internal nodes).  ``lumped`` uses one branch per
    edge whose conductance limits are divided by the length; the series
    devices share one state, which is exact when they start equal.
    """
    if mode not in ("chain", "lumped"):
        raise ValueError(f"unknown compilation mode {mode!r}")
    # source-side end first: hops from source minus hops to target, then node order
    from_a = hop_distances(g, g.source)
    to_b = hop_distances(g, g.target)
    # nodes cut off from both terminals carry no current; any orientation will do
    rank = {n: (from_a[n] - to_b[n], i) if n in from_a else (0, i) for i, n in enumerate(g.nodes)}
    nodes = list(g.nodes)
    branches = []
    for e in g.edges:
        tail, head = _orient(e.u, e.v, rank)
        if mode == "lumped":
            branches.append(Branch(tail, head, e.edge_id, e.length))
            continue
        n = round(e.length)
        if abs(e.length - n) > 1e-12 * max(1.0, e.length) or n < 1:
            raise NonIntegerLengthInChainMode(f"edge {e.edge_id} has length {e.length}")
        chain = [tail] + [("chain", e.edge_id, k) for k in range(1, n)] + [head]
        nodes.extend(chain[1:-1])
        branches.extend(Branch(a, b, e.edge_id) for a, b in zip(chain, chain[1:]))
    return Network(g, p, branches, nodes, I0)


def solve_dc(net: Network, states) -> OperatingPoint:
    """Node voltages and branch currents for the given device states.

    Nodal analysis on the conductance Laplacian with the target grounded
    and ``I0`` injected at the source.
    """
    x = np.asarray(states, dtype=float)
    sig = net.branch_conductances(x)
    if not np.all(sig > 0):
        raise SingularSystem("non-positive branch conductance")
    m = len(net._injection)
    t = net._reduced[net.tail_index]
    h = net._reduced[net.head_index]
    A = np.zeros((m, net.n_branches))
    cols = np.arange(net.n_branches)
    A[t[t >= 0], cols[t >= 0]] = 1.0
    A[h[h >= 0], cols[h >= 0]] = -1.0
    lap = (A * sig) @ A.T
    try:
        v_red = np.linalg.solve(lap, net._injection)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    if not np.all(np.isfinite(v_red)):
        raise SingularSystem("non-finite node voltages")
    voltages = np.append(v_red, 0.0)[net._reduced]
    currents = sig * (voltages[net.tail_index] - voltages[net.head_index])
    return OperatingPoint(voltages, currents, sig, net)


def step(net: Network, states, dt: float) -> np.ndarray:
    """One RK4 step of the coupled circuit/state dynamics, clamped to [0, 1]."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    new = rk4_step(net.rates, np.asarray(states, dtype=float), dt)
    if not np.all(np.isfinite(new)):
        raise StateBlowup("device state became non-finite; reduce dt")
    return np.clip(new, 0.0, 1.0)


def simulate(
    net: Network,
    t_end: float = 200.0,
    dt: float = 1e-3,
    record_every: int = 1000,
    x0=None,
    steady_tol: float | None = None,
) -> Trajectory:
    """Integrate the network from ``x0`` (all zeros by default) to ``t_end``.

    Samples are taken every ``record_every`` steps from t = 0.  With
    ``steady_tol`` set the run stops once every ``|dx/dt|`` falls below it.
    ``Trajectory.branch_state[-1]`` is the last recorded sample; the state
    at the stopping time is in ``Trajectory.end_branch_state``.
    """
    n = n_steps_for(t_end, dt)
    if record_every < 1:
        raise ValueError("record_every must be at least 1")
    x = net.initial_states() if x0 is None else np.array(x0, dtype=float)
    if x.shape != (net.n_branches,) or np.any(x < 0) or np.any(x > 1):
        raise StateOutOfRange("initial states must be one value in [0, 1] per branch")
    status, steps, clamps, times, X, I, S, x_end = _kernels.simulate_kernel(
        x, *net.kernel_args(), float(dt), n, int(record_every), float(steady_tol or 0.0)
    )
    if status == _kernels.BLOWUP:
        raise StateBlowup(f"device state became non-finite after t={steps * dt:g}; reduce dt")
    if status == _kernels.SINGULAR:
        raise SingularSystem(f"circuit became singular after t={steps * dt:g}")
    return Trajectory(
        index=times,
        state=net.edge_states(X),
        currents=I,
        conductances=S,
        branch_state=X,
        clamp_events=int(clamps),
        end_branch_state=x_end,
        end_time=steps * dt,
    )


class TwoPathSteadyState(NamedTuple):
    sigma_tilde_1: float
    sigma_tilde_2: float
    C: float
    x1: float
    x2: float


def normalized_to_state(sigma_tilde, on_off_ratio: float):
    """Convert ``sigma / sigma_off`` to the device state."""
    return (np.asarray(sigma_tilde) - 1.0) / (on_off_ratio - 1.0)


def memristive_two_path_steady_state(p: DeviceParams, I0: float) -> TwoPathSteadyState:
    """Closed-form steady state of the two-path network with L2 = 2 L1.

    Returns the normalized conductances ``sigma / sigma_off`` of both paths,
    the drive constant ``C = kappa*I0*(sigma_on/sigma_off - 1)`` and the
    matching device states.  Threshold-free devices only.
    """
    if p.Gamma == 0:
        raise ZeroRelaxation("closed form requires Gamma > 0")
    if p.I_t != 0:
        raise ValueError("closed form holds for threshold-free devices (I_t = 0)")
    ratio = p.sigma_on / p.sigma_off
    C = p.kappa * I0 * (ratio - 1.0)
    G = p.Gamma
    root = np.sqrt(C * C + 2.0 * C * G + 9.0 * G * G)
    s1 = (C - G + root) / (2.0 * G)
    s2 = (C + 5.0 * G - root) / (2.0 * G)
    x1, x2 = normalized_to_state([s1, s2], ratio)
    return TwoPathSteadyState(float(s1), float(s2), float(C), float(x1), float(x2))


def read_solution(net: Network, states, theta: float = 0.5) -> Path:
    """Path stored in the final device states (see :func:`graph.extract_path`)."""
    return extract_path(net.graph, net.edge_states(states), theta)


def preset_two_path_graph() -> Graph:
    """Two parallel routes A-B of lengths 1 and 2."""
    return build_graph([("A", "B", 1), ("A", "B", 2)], "A", "B")


def preset_multipath_graph() -> Graph:
    """Eight unit edges: left arm A-C-B, right arm A-D-E-B and A-F-G-B.

    The left arm (edges 0, 1) is the shortest route, yet at equal device
    states the two right-hand chains together conduct more (2/3 against
    1/2 of a unit conductance), so the right arm starts with 4/7 of I0.
    """
    return build_graph(
        [
            ("A", "C", 1),
            ("C", "B", 1),
            ("A", "D", 1),
            ("D", "E", 1),
            ("E", "B", 1),
            ("A", "F", 1),
            ("F", "G", 1),
            ("G", "B", 1),
        ],
        "A",
        "B",
    )
