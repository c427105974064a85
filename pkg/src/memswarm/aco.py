"""Ant colony optimization: the stochastic colony and its mean-field limit.

The discrete colony releases ants one at a time from the source.  Each ant
does a node-tabu random walk, choosing among the allowable edges at the
current node with probability proportional to ``tau**alpha * (1/L)**beta``.
After every ant, all pheromone evaporates by a factor ``1 - rho`` and, if
the ant reached the target, each edge of its path gains ``Q / L_path``.
Ants that dead-end are discarded: they deposit nothing but the evaporation
still happens.

For graphs made of parallel source-target edges the colony has a
deterministic continuum limit, integrated by
:func:`integrate_parallel_path_aco`.
"""

from __future__ import annotations

from collections.abc import Collection, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import NoAllowableMove, StateBlowup, UnsupportedExponents, ZeroEvaporation
from .graph import Graph, Node, Path
from .integrate import n_steps_for, rk4_step
from .trajectory import Trajectory

# Memory cap for the pre-drawn uniforms of one block of realizations.
_BLOCK_UNIFORMS = 2_000_000


@dataclass(frozen=True)
class AcoParams:
    alpha: float = 1.0
    beta: float = 1.0
    rho: float = 0.1
    Q: float = 1.0
    gamma: float = 1.0
    tau0: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.Q < 0:
            raise ValueError(f"Q must be non-negative, got {self.Q}")
        if not self.tau0 > 0:
            raise ValueError(f"tau0 must be positive, got {self.tau0}")
        # gamma = 0 is allowed: it freezes the continuous dynamics
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")


@dataclass(frozen=True)
class ColonyRunSpec:
    n_ants: int = 1000
    n_realizations: int = 1000
    seed: int = 0
    record_every: int = 10

    def __post_init__(self):
        for name in ("n_ants", "n_realizations", "record_every"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be at least 1")


@dataclass
class PheromoneState:
    tau: np.ndarray

    def __post_init__(self):
        self.tau = np.array(self.tau, dtype=float)
        if np.any(self.tau < 0) or not np.all(np.isfinite(self.tau)):
            raise ValueError("pheromone levels must be finite and non-negative")

    @classmethod
    def uniform(cls, g: Graph, tau0: float) -> PheromoneState:
        return cls(np.full(g.n_edges, float(tau0)))


def _attractiveness(tau: np.ndarray, eta_beta: np.ndarray, alpha: float) -> np.ndarray:
    # pow is skipped for alpha == 1 so the scalar and batched walks agree bitwise
    if alpha == 1.0:
        return tau * eta_beta
    return np.power(tau, alpha) * eta_beta


def _visibility(g: Graph, beta: float) -> np.ndarray:
    eta = 1.0 / g.lengths
    return eta if beta == 1.0 else np.power(eta, beta)


def _allowable(g: Graph, node: Node, forbidden: Collection[Node]) -> list[int]:
    return [e for e in g.incident(node) if g.edges[e].other(node) not in forbidden]


def _weights(g: Graph, tau, params: AcoParams, options: list[int]) -> np.ndarray:
    w = _attractiveness(np.asarray(tau, dtype=float)[options], _visibility(g, params.beta)[options], params.alpha)
    if w.sum() == 0.0:
        # every option has vanished pheromone: fall back to a uniform choice
        return np.ones(len(options))
    return w


def transition_probabilities(
    g: Graph,
    ph: PheromoneState,
    params: AcoParams,
    current_node: Node,
    forbidden_nodes: Collection[Node] = (),
) -> dict[int, float]:
    """Move probabilities from ``current_node``, keyed by edge id (ascending).

    Only edges whose far end is not in ``forbidden_nodes`` are allowable.
    """
    options = _allowable(g, current_node, set(forbidden_nodes))
    if not options:
        raise NoAllowableMove(f"no allowable edge leaves {current_node!r}")
    w = _weights(g, ph.tau, params, options)
    p = w / w.sum()
    return dict(zip(options, p.tolist()))


def deposit_and_evaporate(
    ph: PheromoneState, completed_path: Path | None, params: AcoParams
) -> PheromoneState:
    """Apply one ant's pheromone update; ``None`` marks a discarded ant."""
    tau = ph.tau * (1.0 - params.rho)
    if completed_path is not None:
        tau[list(completed_path.edges)] += params.Q / completed_path.total_length
    return PheromoneState(tau)


def run_ant(g: Graph, ph: PheromoneState, params: AcoParams, rng: np.random.Generator) -> Path | None:
    """Send one ant from source to target; ``None`` if it dead-ends.

    Exactly ``g.n_nodes - 1`` uniforms are drawn per ant whatever the walk
    length, so the stream position depends only on the ant count.
    """
    draws = rng.random(g.n_nodes - 1)
    node, visited, taken = g.source, {g.source}, []
    for u in draws:
        options = _allowable(g, node, visited)
        if not options:
            return None
        cw = np.cumsum(_weights(g, ph.tau, params, options))
        k = min(int(np.searchsorted(cw, u * cw[-1], side="right")), len(options) - 1)
        e = options[k]
        taken.append(e)
        node = g.edges[e].other(node)
        if node == g.target:
            return g.make_path(taken)
        visited.add(node)
    return None  # unreachable: a simple path has at most n_nodes - 1 edges


def realization_rng(seed: int, realization: int) -> np.random.Generator:
    """Counter-based stream owned by one realization."""
    seq = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(realization),))
    return np.random.Generator(np.random.Philox(seq))


def run_realization(
    g: Graph, params: AcoParams, n_ants: int, rng: np.random.Generator, record_every: int = 1
) -> np.ndarray:
    """One colony, ant by ant.  Returns pheromone sampled every ``record_every`` ants."""
    ph = PheromoneState.uniform(g, params.tau0)
    samples = [ph.tau.copy()]
    for k in range(1, n_ants + 1):
        ph = deposit_and_evaporate(ph, run_ant(g, ph, params, rng), params)
        if k % record_every == 0:
            samples.append(ph.tau.copy())
    return np.array(samples)


class _BatchedWalker:
    """Runs many independent colonies in lockstep, one ant per colony at a time."""

    def __init__(self, g: Graph, params: AcoParams):
        self.g = g
        self.params = params
        index = {n: i for i, n in enumerate(g.nodes)}
        self.u = np.array([index[e.u] for e in g.edges])
        self.v = np.array([index[e.v] for e in g.edges])
        self.lengths = g.lengths
        self.eta_beta = _visibility(g, params.beta)
        self.source = index[g.source]
        self.target = index[g.target]

    def release(self, tau: np.ndarray, draws: np.ndarray) -> np.ndarray:
        """Advance every colony in ``tau`` (R, E) by one ant using ``draws`` (R, steps)."""
        R, E = tau.shape
        rows = np.arange(R)
        cur = np.full(R, self.source)
        visited = np.zeros((R, self.g.n_nodes), dtype=bool)
        visited[:, self.source] = True
        on_path = np.zeros((R, E), dtype=bool)
        length = np.zeros(R)
        walking = np.ones(R, dtype=bool)
        arrived = np.zeros(R, dtype=bool)
        attract = _attractiveness(tau, self.eta_beta, self.params.alpha)
        for step in range(draws.shape[1]):
            at_u = self.u == cur[:, None]
            other = np.where(at_u, self.v, self.u)
            allowed = (at_u | (self.v == cur[:, None])) & ~visited[rows[:, None], other]
            allowed &= walking[:, None]
            walking &= allowed.any(axis=1)
            if not walking.any():
                break
            w = np.where(allowed, attract, 0.0)
            cw = np.cumsum(w, axis=1)
            flat = walking & (cw[:, -1] == 0.0)
            if flat.any():
                cw[flat] = np.cumsum(allowed[flat], axis=1)
            pick = np.argmax(cw > (draws[:, step] * cw[:, -1])[:, None], axis=1)
            m = rows[walking]
            e = pick[walking]
            on_path[m, e] = True
            length[m] += self.lengths[e]
            nxt = other[m, e]
            cur[m] = nxt
            visited[m, nxt] = True
            done = nxt == self.target
            arrived[m[done]] = True
            walking[m[done]] = False
        tau = tau * (1.0 - self.params.rho)
        deposit = np.zeros(R)
        deposit[arrived] = self.params.Q / length[arrived]
        return tau + on_path * deposit[:, None]


def run_colony(g: Graph, params: AcoParams, spec: ColonyRunSpec) -> Trajectory:
    """Ensemble-averaged pheromone over independent colonies.

    Realization ``r`` draws from :func:`realization_rng` ``(seed, r)``, so the
    result is a pure function of the arguments and matches
    :func:`run_realization` colony by colony.  The returned trajectory holds
    the mean pheromone every ``record_every`` ants (ant 0 included) and, in
    ``realizations_final``, every colony's final pheromone.
    """
    walker = _BatchedWalker(g, params)
    n_steps = g.n_nodes - 1
    n_rec = spec.n_ants // spec.record_every + 1
    total = np.zeros((n_rec, g.n_edges))
    finals = np.empty((spec.n_realizations, g.n_edges))
    block = max(1, _BLOCK_UNIFORMS // (spec.n_ants * n_steps))
    for start in range(0, spec.n_realizations, block):
        stop = min(start + block, spec.n_realizations)
        draws = np.stack(
            [realization_rng(spec.seed, r).random((spec.n_ants, n_steps)) for r in range(start, stop)]
        )
        tau = np.full((stop - start, g.n_edges), params.tau0)
        total[0] += tau.sum(axis=0)
        for k in range(1, spec.n_ants + 1):
            tau = walker.release(tau, draws[:, k - 1])
            if k % spec.record_every == 0:
                total[k // spec.record_every] += tau.sum(axis=0)
        finals[start:stop] = tau
    return Trajectory(
        index=np.arange(n_rec) * spec.record_every,
        state=total / spec.n_realizations,
        index_name="t_or_ant_index",
        state_name="tau",
        realizations_final=finals,
        index_is_count=True,
    )


def _mean_field_rate(lengths: np.ndarray, params: AcoParams):
    """Right-hand side of the K-path mean-field equations as a closure."""
    eta_beta = lengths ** -params.beta
    gain = params.gamma * params.Q / lengths
    decay = params.gamma * params.rho
    uniform = np.full(len(lengths), 1.0 / len(lengths))
    alpha = params.alpha

    def rate(tau: np.ndarray) -> np.ndarray:
        w = _attractiveness(tau, eta_beta, alpha)
        total = w.sum()
        p = w / total if total > 0 else uniform
        return p * gain - decay * tau

    return rate


def integrate_parallel_path_aco(
    lengths: Sequence[float],
    params: AcoParams,
    t_end: float,
    dt: float = 1e-2,
    record_every: int = 1,
) -> Trajectory:
    """Mean-field pheromone dynamics on K parallel source-target paths.

    Each path ``k`` obeys ``dtau_k/dt = -gamma*rho*tau_k + p_k*gamma*Q/L_k``
    with ``p_k`` the K-way choice probability.  Integrated with fixed-step
    RK4 from ``tau_k(0) = tau0``; the final state is always recorded.
    """
    L = np.asarray(lengths, dtype=float)
    if L.ndim != 1 or len(L) < 1 or np.any(L <= 0):
        raise ValueError("lengths must be a non-empty list of positive reals")
    n = n_steps_for(t_end, dt)
    tau = np.full(len(L), params.tau0)
    times, states = [0.0], [tau]
    rate = _mean_field_rate(L, params)
    for k in range(1, n + 1):
        # overflow is caught below and reported as a blowup
        with np.errstate(over="ignore", invalid="ignore"):
            tau = rk4_step(rate, tau, dt)
        if not np.all(np.isfinite(tau)):
            raise StateBlowup(f"pheromone became non-finite at t={k * dt:g}; reduce dt")
        if k % record_every == 0 or k == n:
            times.append(k * dt)
            states.append(tau)
    return Trajectory(np.array(times), np.array(states), index_name="t_or_ant_index", state_name="tau")


def aco_steady_state_two_path(params: AcoParams, L1: float) -> tuple[float, float]:
    """Stable fixed point ``(Q / (L1 rho), 0)`` of the two-path mean-field ODEs.

    Only valid for ``alpha = beta = 1`` and ``rho > 0``.
    """
    if params.alpha != 1 or params.beta != 1:
        raise UnsupportedExponents("closed form requires alpha = beta = 1")
    if params.rho == 0:
        raise ZeroEvaporation("no steady state without evaporation")
    return params.Q / (L1 * params.rho), 0.0
