"""scikit-learn style front-ends for the two solvers.

Both estimators take a graph as ``X`` (a :class:`~memswarm.graph.Graph`, a
graph dict in the JSON schema, or a preset name).  ``fit`` runs the
dynamics and stores the trajectory, the final per-edge state and the
extracted path; ``transform`` returns the final per-edge state for a graph
and ``predict`` its extracted path as a list of edge ids.  Hyperparameters
go through ``get_params``/``set_params``, so ``clone`` and parameter sweeps
work as usual.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .aco import AcoParams, ColonyRunSpec, integrate_parallel_path_aco, run_colony
from .errors import GraphError
from .graph import Graph, graph_from_dict, greedy_path
from .memnet import DeviceParams, graph_to_network, preset_multipath_graph, preset_two_path_graph, read_solution, simulate

GRAPH_PRESETS = {
    "fig2_two_path": preset_two_path_graph,
    "fig4_multipath": preset_multipath_graph,
    "fig6_threshold": preset_multipath_graph,
}


def check_graph(X) -> Graph:
    """Coerce ``X`` to a validated :class:`Graph`."""
    if isinstance(X, Graph):
        return X
    if isinstance(X, str):
        try:
            return GRAPH_PRESETS[X]()
        except KeyError:
            raise GraphError(f"unknown graph preset {X!r}") from None
    if isinstance(X, Mapping):
        return graph_from_dict(X)
    raise TypeError(f"expected a Graph, graph dict or preset name, got {type(X).__name__}")


class _PathSolver(TransformerMixin, BaseEstimator):
    def _solve(self, graph: Graph):
        raise NotImplementedError

    def fit(self, X, y=None):
        self.graph_ = check_graph(X)
        self.trajectory_, self.states_, self.path_ = self._solve(self.graph_)
        return self

    def transform(self, X):
        check_is_fitted(self, "states_")
        graph = check_graph(X)
        if graph is self.graph_:
            return self.states_
        return self._solve(graph)[1]

    def predict(self, X):
        check_is_fitted(self, "path_")
        graph = check_graph(X)
        path = self.path_ if graph is self.graph_ else self._solve(graph)[2]
        return list(path.edges)

    def fit_predict(self, X, y=None):
        return self.fit(X).predict(self.graph_)


class MemristiveShortestPath(_PathSolver):
    """Shortest path from the relaxation of a current-driven memristive network.

    Parameters
    ----------
    sigma_on, sigma_off : float
        Limiting unit-device conductances (S).
    kappa : float
        State drive per unit current, 1/(s*A).
    Gamma : float
        State relaxation rate (1/s).
    I_t : float
        Threshold current (A); 0 gives the threshold-free model.
    I0 : float
        Source current (A).
    mode : {"lumped", "chain"}
        How edge lengths become devices, see :func:`memnet.graph_to_network`.
    t_end, dt : float
        Duration and RK4 step (s).
    record_every : int
        Trajectory sampling stride in steps.
    theta : float
        Readout threshold as a fraction of the largest state.
    """

    def __init__(
        self,
        sigma_on=0.01,
        sigma_off=1e-5,
        kappa=1.0,
        Gamma=0.1,
        I_t=0.0,
        I0=0.1,
        mode="lumped",
        t_end=200.0,
        dt=1e-3,
        record_every=1000,
        theta=0.5,
    ):
        self.sigma_on = sigma_on
        self.sigma_off = sigma_off
        self.kappa = kappa
        self.Gamma = Gamma
        self.I_t = I_t
        self.I0 = I0
        self.mode = mode
        self.t_end = t_end
        self.dt = dt
        self.record_every = record_every
        self.theta = theta

    def _solve(self, graph):
        device = DeviceParams(self.sigma_on, self.sigma_off, self.kappa, self.Gamma, self.I_t)
        net = graph_to_network(graph, device, self.mode, self.I0)
        traj = simulate(net, self.t_end, self.dt, self.record_every)
        self.network_ = net
        return traj, net.edge_states(traj.end_branch_state), read_solution(net, traj.end_branch_state, self.theta)


class AntColonyShortestPath(_PathSolver):
    """Shortest path from ant colony pheromone, stochastic or mean-field.

    ``mode="discrete"`` averages ``n_realizations`` independent colonies of
    ``n_ants`` ants; the path is read greedily from the mean final
    pheromone.  ``mode="mean_field"`` integrates the continuum equations and
    only accepts graphs whose edges all join source and target.
    """

    def __init__(
        self,
        alpha=1.0,
        beta=1.0,
        rho=0.05,
        Q=0.1,
        gamma=1.0,
        tau0=0.5,
        mode="discrete",
        n_ants=1000,
        n_realizations=1000,
        record_every=10,
        seed=0,
        t_end=200.0,
        dt=1e-2,
    ):
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.Q = Q
        self.gamma = gamma
        self.tau0 = tau0
        self.mode = mode
        self.n_ants = n_ants
        self.n_realizations = n_realizations
        self.record_every = record_every
        self.seed = seed
        self.t_end = t_end
        self.dt = dt

    def _solve(self, graph):
        params = AcoParams(self.alpha, self.beta, self.rho, self.Q, self.gamma, self.tau0)
        if self.mode == "discrete":
            spec = ColonyRunSpec(self.n_ants, self.n_realizations, self.seed, self.record_every)
            traj = run_colony(graph, params, spec)
        elif self.mode == "mean_field":
            if not graph.is_parallel_paths():
                raise GraphError("mean-field mode needs every edge to join source and target")
            traj = integrate_parallel_path_aco(graph.lengths, params, self.t_end, self.dt, self.record_every)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        final = np.asarray(traj.final, dtype=float)
        return traj, final, greedy_path(graph, final)
