"""
Python library simulating DRR-MDPF forwarding in Named Data Networking
"""
from .errors import *
from .prob import FiniteMdp, normalize, sample_index, expected_reward, value_iteration
from .scheduler import DrrScheduler
from .strategy import StrategyTable, InterfaceState, normalized_state, weighted_probabilities
from .baselines import BaselineStrategy, baseline_select
from .topology import Topology, load_topology, dump_topology, generate_topology
from .scenario import Scenario, parse_scenario, dump_scenario, apply_overrides
from .metrics import MetricsReport, coefficient_of_variation, finalize_report, write_report
from .simulation import run_scenario
