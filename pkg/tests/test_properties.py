"""Randomized invariant checks.

Each ``check_*`` function takes one generated case and asserts an
invariant; the hypothesis tests here run them at modest example counts
and the acceptance suite reruns them at full volume.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from memswarm.aco import AcoParams, ColonyRunSpec, PheromoneState, deposit_and_evaporate, run_colony, transition_probabilities
from memswarm.errors import PathBudgetExceeded
from memswarm.graph import enumerate_simple_paths, shortest_path_oracle, validate_path
from memswarm.memnet import (
    DeviceParams,
    graph_to_network,
    memristive_two_path_steady_state,
    preset_two_path_graph,
    simulate,
    solve_dc,
)

from .conftest import graphs

unit = st.floats(0.0, 1.0)
exponent = st.floats(0.1, 3.0)


@st.composite
def pheromone_cases(draw):
    g = draw(graphs())
    tau = draw(st.lists(st.floats(0.0, 100.0), min_size=g.n_edges, max_size=g.n_edges))
    params = AcoParams(alpha=draw(exponent), beta=draw(exponent), rho=draw(unit), Q=draw(st.floats(0.0, 10.0)))
    node = draw(st.sampled_from(g.nodes))
    return g, np.array(tau), params, node


@st.composite
def devices(draw):
    sigma_off = draw(st.floats(1e-6, 1e-3))
    return DeviceParams(
        sigma_on=sigma_off * draw(st.floats(2.0, 1e3)),
        sigma_off=sigma_off,
        kappa=draw(st.floats(0.1, 10.0)),
        Gamma=draw(st.floats(0.0, 1.0)),
        I_t=draw(st.sampled_from([0.0, 0.0, 0.01, 0.05])),
    )


@st.composite
def circuit_cases(draw):
    g = draw(graphs())
    net = graph_to_network(g, draw(devices()), draw(st.sampled_from(["lumped", "chain"])), draw(st.floats(1e-3, 1.0)))
    x = np.array(draw(st.lists(unit, min_size=net.n_branches, max_size=net.n_branches)))
    return net, x


def check_normalization(case):
    g, tau, params, node = case
    p = np.array(list(transition_probabilities(g, PheromoneState(tau), params, node).values()))
    assert np.all(p >= 0)
    assert abs(p.sum() - 1.0) < 1e-12


def check_scale_covariance(case, c):
    g, tau, params, node = case
    a = transition_probabilities(g, PheromoneState(tau), params, node)
    b = transition_probabilities(g, PheromoneState(tau * c), params, node)
    assert np.allclose(list(a.values()), list(b.values()), rtol=1e-9, atol=1e-12)


def check_nonnegativity(case, choice):
    g, tau, params, _ = case
    paths = enumerate_simple_paths(g, max_paths=10_000)
    path = None if choice >= len(paths) else paths[choice]
    out = deposit_and_evaporate(PheromoneState(tau), path, params)
    assert np.all(out.tau >= 0)


def check_kcl_and_passivity(case):
    net, x = case
    op = solve_dc(net, x)
    assert np.max(np.abs(op.kcl_residual())) < 1e-10 * net.I0
    power = op.dissipated_power()
    assert power >= 0
    assert math.isclose(power, net.I0 * op.source_voltage, rel_tol=1e-9, abs_tol=0)


def check_state_bounds(g, device, I0, mode):
    net = graph_to_network(g, device, mode, I0)
    traj = simulate(net, t_end=2.0, dt=0.05, record_every=1)
    assert np.all(traj.branch_state >= 0) and np.all(traj.branch_state <= 1)
    assert np.all(traj.conductances >= net.sigma_off * (1 - 1e-12))
    assert np.all(traj.conductances <= net.sigma_on * (1 + 1e-12))


def check_chain_lumped(g, device, I0):
    a = simulate(graph_to_network(g, device, "lumped", I0), t_end=1.0, dt=0.01, record_every=10)
    b = simulate(graph_to_network(g, device, "chain", I0), t_end=1.0, dt=0.01, record_every=10)
    assert np.max(np.abs(a.state - b.state)) < 1e-9


def check_determinism(g, seed):
    params = AcoParams(rho=0.1, Q=0.5)
    spec = ColonyRunSpec(n_ants=20, n_realizations=3, seed=seed, record_every=5)
    a, b = run_colony(g, params, spec), run_colony(g, params, spec)
    assert np.array_equal(a.state, b.state)
    assert np.array_equal(a.realizations_final, b.realizations_final)


def check_oracle_equivalence(g):
    try:
        paths = enumerate_simple_paths(g, max_paths=12)
    except PathBudgetExceeded:
        assume(False)
    best = shortest_path_oracle(g)
    validate_path(g, best)
    assert best.total_length == min(p.total_length for p in paths)
    assert best == paths[0]


@settings(max_examples=300)
@given(pheromone_cases())
def test_transition_probabilities_normalized(case):
    check_normalization(case)


@settings(max_examples=200)
@given(pheromone_cases(), st.floats(1e-3, 1e3))
def test_transition_probabilities_scale_covariant(case, c):
    assume(case[1].max() * min(c, 1) > 1e-6)
    check_scale_covariance(case, c)


@settings(max_examples=300)
@given(pheromone_cases(), st.integers(0, 20))
def test_deposit_keeps_pheromone_nonnegative(case, choice):
    check_nonnegativity(case, choice)


@settings(max_examples=300)
@given(circuit_cases())
def test_kcl_and_passivity(case):
    check_kcl_and_passivity(case)


@settings(max_examples=100)
@given(graphs(), devices(), st.floats(1e-3, 1.0), st.sampled_from(["lumped", "chain"]))
def test_states_stay_in_bounds(g, device, I0, mode):
    check_state_bounds(g, device, I0, mode)


@settings(max_examples=100)
@given(graphs(), devices(), st.floats(1e-3, 1.0))
def test_chain_and_lumped_equivalent(g, device, I0):
    check_chain_lumped(g, device, I0)


@settings(max_examples=50)
@given(graphs(), st.integers(0, 2**32 - 1))
def test_colony_deterministic(g, seed):
    check_determinism(g, seed)


@settings(max_examples=300)
@given(graphs(max_nodes=7, max_extra=6, integer_lengths=False))
def test_oracle_equivalence_real_lengths(g):
    check_oracle_equivalence(g)


@settings(max_examples=300)
@given(graphs(max_nodes=7, max_extra=6))
def test_oracle_equivalence_integer_lengths(g):
    check_oracle_equivalence(g)


@settings(max_examples=50)
@given(st.floats(1e-4, 0.5), st.floats(0.01, 1.0))
def test_two_path_dominance(I0, Gamma):
    device = DeviceParams(Gamma=Gamma)
    traj = simulate(graph_to_network(preset_two_path_graph(), device, "lumped", I0), t_end=5.0, dt=0.01, record_every=1)
    assert traj.currents[0, 0] > traj.currents[0, 1]
    assert np.all(traj.state[:, 0] >= traj.state[:, 1])


@settings(max_examples=100)
@given(st.floats(1e-3, 1.0), st.floats(1e-3, 1.0), st.floats(10.0, 1e4))
def test_two_path_closed_form_is_a_fixed_point(I0, Gamma, ratio):
    p = DeviceParams(sigma_on=1e-5 * ratio, sigma_off=1e-5, Gamma=Gamma)
    ss = memristive_two_path_steady_state(p, I0)
    s1, s2 = ss.sigma_tilde_1, ss.sigma_tilde_2
    scale = ss.C + Gamma * s1
    assert abs(-Gamma * (s1 - 1) + ss.C * s1 / (s1 + s2 / 2)) < 1e-9 * scale
    assert abs(-Gamma * (s2 - 1) + ss.C * (s2 / 2) / (s1 + s2 / 2)) < 1e-9 * scale
    assert s1 > s2 >= 1


@pytest.mark.xfail(strict=True, reason="at t=200 s the slow mode (rate ~0.05/s) is still 6.8e-4 from steady state")
def test_two_path_steady_state_within_1e4_at_200s():
    net = graph_to_network(preset_two_path_graph(), DeviceParams(), "lumped", 0.09)
    traj = simulate(net, t_end=200, dt=1e-3, record_every=200_000)
    ss = memristive_two_path_steady_state(net.device, 0.09)
    sim = traj.conductances[-1] / net.sigma_off
    assert np.allclose(sim, [ss.sigma_tilde_1, ss.sigma_tilde_2], rtol=1e-4, atol=0)
