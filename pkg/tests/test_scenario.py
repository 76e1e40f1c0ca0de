"""Tests for scenario parsing, dumping and overrides"""
import pytest

from drrmdpf.errors import ScenarioParseError
from drrmdpf.scenario import Scenario, apply_overrides, dump_scenario, parse_scenario

FULL = """
# every key
topology = random:20:40
strategy = saf-like
name = full
seed = 9
catalog_size = 2000
content_classes = 8
popularity = 0.8
interest_rate = 3500
cache_fraction = 0.45
duration = 12.5
quantum = 1000
queue_capacity = 50
pit_timeout = 1.5
interest_size = 80
data_size = 1200
arrival_process = constant
request_pattern = sequential
consumer_retries = 2
link_down = n1:n2@3.5, n4:n5@7
link_bandwidth = 1e7
link_delay = 0.005
event_cap = 5000000

[strategy]
lambda_r = 0.8
lambda_smooth = 0.2
reward_mode = qualitative
selection_mode = sample
"""


def test_minimal_config_gets_defaults():
    scenario = parse_scenario("topology = grid\nstrategy = drr-mdpf\n")

    assert scenario.duration == 150.0
    assert scenario.queue_capacity == 100
    assert scenario.interest_rate == 2000.0
    assert scenario.cache_fraction == 0.10
    assert scenario.lambda_r == 0.9
    assert scenario.cs_capacity == 1000


def test_full_config():
    scenario = parse_scenario(FULL)

    assert scenario.strategy == "saf-like"
    assert scenario.interest_rate == 3500.0
    assert scenario.link_bandwidth == 1e7
    assert scenario.link_down == (("n1", "n2", 3.5), ("n4", "n5", 7.0))
    assert scenario.reward_mode == "qualitative"
    assert scenario.lambda_smooth == 0.2


def test_dump_and_reparse_is_identity():
    scenario = parse_scenario(FULL)

    assert parse_scenario(dump_scenario(scenario)) == scenario
    assert parse_scenario(dump_scenario(Scenario(topology="line"))) == Scenario(topology="line")


def test_cache_fraction_out_of_range():
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario("topology = grid\ncache_fraction = 1.5\n")

    assert excinfo.value.line == 2
    assert "[0, 1]" in str(excinfo.value)


@pytest.mark.parametrize(
    "text, line",
    [
        ("topology = grid\ncolour = red\n", 2),
        ("topology = grid\nqueue_capacity = lots\n", 2),
        ("topology = grid\nqueue_capacity = 2.5\n", 2),
        ("topology = grid\ninterest_rate = -5\n", 2),
        ("topology = grid\nstrategy = flooding\n", 2),
        ("topology = grid\nlambda_r = 0.5\n", 2),
        ("topology = grid\n[strategy]\nlambda_r = 1.0\n", 3),
        ("topology = grid\n[routing]\n", 2),
        ("topology = grid\nduration\n", 2),
        ("topology = grid\nseed = 1\nseed = 2\n", 3),
        ("topology = grid\nlink_down = a-b@3\n", 2),
        ("topology = grid\nseed = true\n", 2),
    ],
)
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ScenarioParseError) as excinfo:
        parse_scenario(text)

    assert excinfo.value.line == line


def test_missing_topology():
    with pytest.raises(ScenarioParseError):
        parse_scenario("strategy = random\n")


def test_zero_duration_is_allowed():
    assert parse_scenario("topology = line\nduration = 0\n").duration == 0.0


def test_overrides_match_file_edits():
    base = parse_scenario("topology = grid\ninterest_rate = 2000\n")
    edited = parse_scenario("topology = grid\ninterest_rate = 3000\n[strategy]\nlambda_r = 0.5\n")

    overridden = apply_overrides(base, ["interest_rate=3000", "strategy.lambda_r=0.5"])

    assert overridden == edited


def test_override_errors():
    base = Scenario(topology="grid")

    with pytest.raises(ScenarioParseError):
        apply_overrides(base, ["nonsense"])

    with pytest.raises(ScenarioParseError):
        apply_overrides(base, ["cache_fraction=2"])
