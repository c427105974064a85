"""Shortest paths from memristive network dynamics and ant colonies."""

from .aco import (
    AcoParams,
    ColonyRunSpec,
    PheromoneState,
    aco_steady_state_two_path,
    deposit_and_evaporate,
    integrate_parallel_path_aco,
    run_ant,
    run_colony,
    transition_probabilities,
)
from .estimators import AntColonyShortestPath, MemristiveShortestPath, check_graph
from .graph import Graph, Path, build_graph, enumerate_simple_paths, shortest_path_oracle
from .memnet import (
    DeviceParams,
    Network,
    conductance,
    graph_to_network,
    memristive_two_path_steady_state,
    preset_multipath_graph,
    preset_two_path_graph,
    read_solution,
    simulate,
    solve_dc,
    state_derivative,
    step,
)
from .trajectory import Trajectory

__version__ = "0.1.0"
