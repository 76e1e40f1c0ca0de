"""Tests for whole scenario runs"""
import dataclasses
import math

import pytest

from drrmdpf.consts import ROLE_CONSUMER, ROLE_PRODUCER, ROLE_ROUTER
from drrmdpf.errors import ConfigurationError, SimulationError
from drrmdpf.metrics import write_report
from drrmdpf.scenario import Scenario
from drrmdpf.simulation import Simulation, content_name, run_scenario
from drrmdpf.topology import LinkSpec, NodeSpec, Topology, grid_topology

# 64 B Interest and 1024 B Data over two 10 Mbps / 10 ms hops each way
LINE_RETRIEVAL = 2 * (64 * 8 / 10e6 + 0.010) + 2 * (1024 * 8 / 10e6 + 0.010)


def test_content_names():
    assert content_name(0, 10) == "/c0/o0"
    assert content_name(23, 10) == "/c3/o23"


def test_single_path_latency_oracle(line_scenario):
    report = run_scenario(line_scenario)

    assert report.interests_sent == 10
    assert report.isr == 1.0
    assert report.mean_retrieval == pytest.approx(LINE_RETRIEVAL, rel=1e-6)
    assert report.drops == 0
    assert report.throughput == pytest.approx(1.0)


@pytest.mark.parametrize("strategy", ["drr-mdpf", "best-route", "random", "rfa-like", "saf-like"])
def test_latency_oracle_holds_for_every_strategy(line_scenario, strategy):
    report = run_scenario(dataclasses.replace(line_scenario, strategy=strategy))

    assert report.isr == 1.0
    assert report.mean_retrieval == pytest.approx(LINE_RETRIEVAL, rel=1e-6)


def test_zero_duration_is_empty(line_scenario):
    report = run_scenario(dataclasses.replace(line_scenario, duration=0.0))

    assert report.interests_sent == 0
    assert report.data_received == 0
    assert report.drops == 0
    assert report.isr == 0.0
    assert report.throughput == 0.0
    assert math.isnan(report.mean_retrieval)


def test_same_seed_gives_identical_bytes(grid_scenario):
    first = write_report(run_scenario(grid_scenario))
    second = write_report(run_scenario(grid_scenario))

    assert first == second


def test_different_seeds_differ(grid_scenario):
    first = write_report(run_scenario(grid_scenario))
    second = write_report(run_scenario(dataclasses.replace(grid_scenario, seed=43)))

    assert first != second


def _conserved(report):
    accounted = report.data_received + report.timeouts + report.dropped + report.pending_at_end
    return report.interests_sent == accounted


@pytest.mark.parametrize("strategy", ["drr-mdpf", "random", "rfa-like", "saf-like"])
def test_conservation_under_congestion(grid_scenario, strategy):
    scenario = dataclasses.replace(
        grid_scenario,
        strategy=strategy,
        interest_rate=2500.0,
        popularity=0.0,
        queue_capacity=5,
        pit_timeout=0.2,
        duration=0.5,
    )

    report = run_scenario(scenario)

    assert report.drops > 0
    assert report.timeouts > 0
    assert _conserved(report)
    assert 0.0 <= report.isr < 1.0


def test_caching_produces_hits(grid_scenario):
    report = run_scenario(dataclasses.replace(grid_scenario, catalog_size=50))

    assert report.cache_hits > 0
    assert _conserved(report)


def test_link_down_causes_timeouts(line_scenario):
    scenario = dataclasses.replace(line_scenario, link_down=(("r0", "p0", 4.5),))

    report = run_scenario(scenario)

    assert report.data_received == 5
    assert report.timeouts == 5
    assert report.drops == 5
    assert _conserved(report)


def test_retries_are_counted_as_new_sends(line_scenario):
    scenario = dataclasses.replace(
        line_scenario, link_down=(("r0", "p0", 4.5),), consumer_retries=2
    )

    report = run_scenario(scenario)

    assert report.retransmissions == 10
    assert report.interests_sent == 20
    assert report.timeouts == 15
    assert _conserved(report)


def test_topology_without_producer_is_rejected(line_scenario):
    topology = Topology(
        nodes=[NodeSpec("c0", ROLE_CONSUMER), NodeSpec("r0", ROLE_ROUTER)],
        links=[LinkSpec("c0", "r0")],
    )

    with pytest.raises(ConfigurationError):
        run_scenario(line_scenario, topology)


def test_disconnected_topology_is_rejected(line_scenario):
    topology = Topology(
        nodes=[
            NodeSpec("c0", ROLE_CONSUMER),
            NodeSpec("r0", ROLE_ROUTER),
            NodeSpec("p0", ROLE_PRODUCER),
        ],
        links=[LinkSpec("c0", "r0")],
    )

    with pytest.raises(ConfigurationError):
        run_scenario(line_scenario, topology)


def test_unknown_link_down_is_rejected(line_scenario):
    with pytest.raises(ConfigurationError):
        run_scenario(dataclasses.replace(line_scenario, link_down=(("c0", "p0", 1.0),)))


def test_event_cap_aborts_run(grid_scenario):
    with pytest.raises(SimulationError):
        run_scenario(dataclasses.replace(grid_scenario, event_cap=100))


def test_fib_points_towards_producer():
    simulation = Simulation(Scenario(topology="grid"), grid_topology(3, 3))

    corner = simulation.nodes["g0_0"]
    entry = corner.fib.longest_prefix_match("/c0/o0")

    assert sorted(corner.faces[face].neighbor for face in entry.candidate_faces) == [
        "g0_1",
        "g1_0",
    ]
    assert len(simulation.nodes["g2_2"].fib) == 0


def _grid_sweep(strategy, **changes):
    base = Scenario(
        topology="grid",
        name="directional",
        seed=7,
        strategy=strategy,
        duration=2.0,
        cache_fraction=0.10,
        reward_mode="qualitative",
        selection_mode="sample",
    )

    return run_scenario(dataclasses.replace(base, **changes))


RATES = (2000.0, 2500.0, 3000.0, 3500.0, 4000.0)
CACHE_FRACTIONS = (0.01, 0.15, 0.30, 0.45, 0.60)


@pytest.mark.slow
def test_drr_mdpf_isr_not_below_uniform_random():
    drr = [_grid_sweep("drr-mdpf", interest_rate=rate) for rate in RATES]
    uniform = [_grid_sweep("smdpf-like", interest_rate=rate) for rate in RATES]

    for ours, theirs in zip(drr, uniform):
        assert ours.isr >= theirs.isr, f"rate {ours.rate}"

    assert drr[-1].drop_rate <= uniform[-1].drop_rate


@pytest.mark.slow
@pytest.mark.parametrize("strategy", ["drr-mdpf", "random", "rfa-like", "saf-like", "best-route"])
def test_isr_grows_with_cache_size(strategy):
    isr = [_grid_sweep(strategy, cache_fraction=fraction).isr for fraction in CACHE_FRACTIONS]

    for smaller, larger in zip(isr, isr[1:]):
        assert larger >= smaller - 0.02


@pytest.mark.slow
@pytest.mark.parametrize("rate", RATES)
def test_rank_balances_load_at_least_as_well_as_drr_mdpf(rate):
    rank = _grid_sweep("rfa-like", interest_rate=rate)
    drr = _grid_sweep("drr-mdpf", interest_rate=rate)

    assert rank.cov_load <= drr.cov_load


def test_rank_spreads_load_better_than_best_route():
    rank = _grid_sweep("rfa-like", interest_rate=2000.0, duration=0.5)
    best = _grid_sweep("best-route", interest_rate=2000.0, duration=0.5)

    assert rank.cov_load <= best.cov_load


@pytest.mark.parametrize("strategy", ["drr-mdpf", "rfa-like", "saf-like"])
def test_strict_mode_checks_every_event(grid_scenario, strategy):
    scenario = dataclasses.replace(
        grid_scenario, strategy=strategy, queue_capacity=5, pit_timeout=0.2, duration=0.5
    )

    assert write_report(run_scenario(scenario, strict=True)) == write_report(run_scenario(scenario))


def test_strict_mode_catches_corrupt_tables_early(grid_scenario):
    simulation = Simulation(grid_scenario, grid_topology(3, 3), strict=True)
    simulation.nodes["g0_0"].unsatisfied[(0, "c9999")] += 1

    with pytest.raises(SimulationError):
        simulation.run()

    assert simulation.engine.now < grid_scenario.duration / 2
