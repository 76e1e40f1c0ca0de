"""
Scenario configuration

    # comment
    topology = grid
    strategy = drr-mdpf
    interest_rate = 2500

    [strategy]
    lambda_r = 0.9
    reward_mode = qualitative

Values are coerced with yaml.safe_load and checked against the field table,
omitted keys keep the defaults from consts.
"""
import dataclasses
import logging

from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Optional, Tuple

import yaml

from .consts import (
    ARRIVAL_POISSON,
    ARRIVAL_PROCESSES,
    CACHE_FRACTION,
    CATALOG_SIZE,
    CONTENT_CLASSES,
    DATA_SIZE,
    DEFAULT_QUANTUM,
    EVENT_CAP,
    INTEREST_RATE,
    INTEREST_SIZE,
    LAMBDA_R,
    LAMBDA_SMOOTH,
    LINK_BANDWIDTH,
    LINK_DELAY,
    PATTERN_ZIPF,
    PIT_TIMEOUT,
    QUEUE_CAPACITY,
    REQUEST_PATTERNS,
    REWARD_AS_WRITTEN,
    REWARD_MODES,
    SELECT_ARGMAX,
    SELECTION_MODES,
    SIMULATION_DURATION,
    STRATEGY_BEST_ROUTE,
    STRATEGY_DRR_MDPF,
    STRATEGY_LA_MDPF_LIKE,
    STRATEGY_RANDOM,
    STRATEGY_RFA_LIKE,
    STRATEGY_SAF_LIKE,
    STRATEGY_SMDPF_LIKE,
    ZIPF_EXPONENT,
)
from .errors import ScenarioParseError

LOGGER = logging.getLogger(__name__)

STRATEGIES = (
    STRATEGY_DRR_MDPF,
    STRATEGY_BEST_ROUTE,
    STRATEGY_RANDOM,
    STRATEGY_RFA_LIKE,
    STRATEGY_SAF_LIKE,
    STRATEGY_SMDPF_LIKE,
    STRATEGY_LA_MDPF_LIKE,
)

STRATEGY_SECTION = "strategy"

LinkFailure = Tuple[str, str, float]


@dataclass(frozen=True)
class Scenario:
    """Fully validated run description."""

    topology: str
    strategy: str = STRATEGY_DRR_MDPF
    name: str = "scenario"
    seed: int = 0
    catalog_size: int = CATALOG_SIZE
    content_classes: int = CONTENT_CLASSES
    popularity: float = ZIPF_EXPONENT
    interest_rate: float = INTEREST_RATE
    cache_fraction: float = CACHE_FRACTION
    duration: float = SIMULATION_DURATION
    quantum: int = DEFAULT_QUANTUM
    queue_capacity: int = QUEUE_CAPACITY
    pit_timeout: float = PIT_TIMEOUT
    interest_size: int = INTEREST_SIZE
    data_size: int = DATA_SIZE
    arrival_process: str = ARRIVAL_POISSON
    request_pattern: str = PATTERN_ZIPF
    consumer_retries: int = 0
    link_down: Tuple[LinkFailure, ...] = ()
    link_bandwidth: float = LINK_BANDWIDTH
    link_delay: float = LINK_DELAY
    event_cap: int = EVENT_CAP
    # [strategy]
    lambda_r: float = LAMBDA_R
    lambda_smooth: float = LAMBDA_SMOOTH
    reward_mode: str = REWARD_AS_WRITTEN
    selection_mode: str = SELECT_ARGMAX

    @property
    def cs_capacity(self) -> int:
        """
        Content Store slots per router
        """
        return int(round(self.cache_fraction * self.catalog_size))


def _positive(value) -> Optional[str]:
    return None if value > 0 else "must be positive"


def _non_negative(value) -> Optional[str]:
    return None if value >= 0 else "must be >= 0"


def _unit_interval(value) -> Optional[str]:
    return None if 0.0 <= value <= 1.0 else "must be in [0, 1]"


def _open_unit_interval(value) -> Optional[str]:
    return None if 0.0 < value < 1.0 else "must be in (0, 1)"


def _one_of(choices: Iterable[str]) -> Callable[[str], Optional[str]]:
    choices = tuple(choices)

    def check(value: str) -> Optional[str]:
        return None if value in choices else f"must be one of {', '.join(choices)}"

    return check


def _non_empty(value: str) -> Optional[str]:
    return None if value else "must not be empty"


# key -> (type, check)
FIELDS: Dict[str, Tuple[type, Callable[[Any], Optional[str]]]] = {
    "topology": (str, _non_empty),
    "strategy": (str, _one_of(STRATEGIES)),
    "name": (str, _non_empty),
    "seed": (int, _non_negative),
    "catalog_size": (int, _positive),
    "content_classes": (int, _positive),
    "popularity": (float, _non_negative),
    "interest_rate": (float, _positive),
    "cache_fraction": (float, _unit_interval),
    "duration": (float, _non_negative),
    "quantum": (int, _positive),
    "queue_capacity": (int, _positive),
    "pit_timeout": (float, _positive),
    "interest_size": (int, _positive),
    "data_size": (int, _positive),
    "arrival_process": (str, _one_of(ARRIVAL_PROCESSES)),
    "request_pattern": (str, _one_of(REQUEST_PATTERNS)),
    "consumer_retries": (int, _non_negative),
    "link_down": (tuple, lambda value: None),
    "link_bandwidth": (float, _positive),
    "link_delay": (float, _non_negative),
    "event_cap": (int, _positive),
}

STRATEGY_FIELDS: Dict[str, Tuple[type, Callable[[Any], Optional[str]]]] = {
    "lambda_r": (float, _open_unit_interval),
    "lambda_smooth": (float, _unit_interval),
    "reward_mode": (str, _one_of(REWARD_MODES)),
    "selection_mode": (str, _one_of(SELECTION_MODES)),
}


def parse_link_down(text: str, *, line: int = 0) -> Tuple[LinkFailure, ...]:
    """
    'a:b@t, c:d@t' -> ((a, b, t), (c, d, t))
    """
    failures = []

    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue

        link, sep, at = item.partition("@")
        a, colon, b = link.partition(":")

        if not sep or not colon or not a.strip() or not b.strip():
            err_msg = f"link_down entry {item!r} is not of the form a:b@time"
            raise ScenarioParseError(err_msg, line=line)

        try:
            time = float(at)
        except ValueError:
            raise ScenarioParseError(f"link_down time {at!r} is not a number", line=line) from None

        if time < 0:
            raise ScenarioParseError(f"link_down time {time} must be >= 0", line=line)

        failures.append((a.strip(), b.strip(), time))

    return tuple(failures)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def coerce_value(key: str, raw: str, *, line: int = 0) -> Any:
    """
    Typed and range checked value for key, raw as written in the file
    """
    spec = FIELDS.get(key) or STRATEGY_FIELDS.get(key)
    if spec is None:
        raise ScenarioParseError(f"unknown key {key!r}", line=line)

    kind, check = spec
    raw = raw.strip()

    if kind is tuple:
        return parse_link_down(raw, line=line)

    try:
        loaded = yaml.safe_load(raw) if raw else ""
    except yaml.YAMLError:
        loaded = raw

    if kind is str:
        value = loaded if isinstance(loaded, str) else raw

    elif kind is int:
        if isinstance(loaded, float) and loaded.is_integer():
            loaded = int(loaded)

        if not _is_number(loaded) or not isinstance(loaded, int):
            raise ScenarioParseError(f"{key} expects an integer, got {raw!r}", line=line)

        value = loaded

    else:
        if isinstance(loaded, str):
            try:
                loaded = float(loaded)
            except ValueError:
                pass

        if not _is_number(loaded) or loaded != loaded or loaded in (float("inf"), float("-inf")):
            raise ScenarioParseError(f"{key} expects a number, got {raw!r}", line=line)

        value = float(loaded)

    problem = check(value)
    if problem:
        raise ScenarioParseError(f"{key} = {raw}: {problem}", line=line)

    return value


def parse_scenario(text: str) -> Scenario:
    """
    Parse a scenario file, unknown keys are hard errors
    """
    values: Dict[str, Any] = {}
    seen_at: Dict[str, int] = {}
    section = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue

        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section != STRATEGY_SECTION:
                raise ScenarioParseError(f"unknown section [{section}]", line=line_no)
            continue

        key, sep, raw_value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ScenarioParseError(f"expected key = value, got {line!r}", line=line_no)

        table = STRATEGY_FIELDS if section == STRATEGY_SECTION else FIELDS
        if key not in table:
            if section is None and key in STRATEGY_FIELDS:
                err_msg = f"{key!r} belongs to the [{STRATEGY_SECTION}] section"
                raise ScenarioParseError(err_msg, line=line_no)
            raise ScenarioParseError(f"unknown key {key!r}", line=line_no)

        if key in seen_at:
            err_msg = f"{key!r} already set on line {seen_at[key]}"
            raise ScenarioParseError(err_msg, line=line_no)
        seen_at[key] = line_no

        values[key] = coerce_value(key, raw_value, line=line_no)

    if "topology" not in values:
        raise ScenarioParseError("missing required key 'topology'")

    scenario = Scenario(**values)

    LOGGER.debug(f"parse_scenario: {scenario}")

    return scenario


def _render(value: Any) -> str:
    if isinstance(value, tuple):
        return ", ".join(f"{a}:{b}@{at!r}" for a, b, at in value)

    if isinstance(value, float):
        return repr(value)

    return str(value)


def dump_scenario(scenario: Scenario) -> str:
    """
    Render every field, parse_scenario reads it back to an equal Scenario
    """
    lines = []

    for key in FIELDS:
        value = getattr(scenario, key)
        if key == "link_down" and not value:
            continue
        lines.append(f"{key} = {_render(value)}")

    lines.append("")
    lines.append(f"[{STRATEGY_SECTION}]")

    for key in STRATEGY_FIELDS:
        lines.append(f"{key} = {_render(getattr(scenario, key))}")

    return "\n".join(lines) + "\n"


def apply_overrides(scenario: Scenario, overrides: Iterable[str]) -> Scenario:
    """
    key=value pairs, 'strategy.' prefix optional for strategy parameters
    """
    changes = {}

    for override in overrides:
        key, sep, raw_value = override.partition("=")
        key = key.strip()

        if key.startswith(f"{STRATEGY_SECTION}."):
            key = key[len(STRATEGY_SECTION) + 1 :]

        if not sep or not key:
            raise ScenarioParseError(f"override {override!r} is not key=value")

        changes[key] = coerce_value(key, raw_value)

    if not changes:
        return scenario

    LOGGER.debug(f"apply_overrides: {changes}")

    return dataclasses.replace(scenario, **changes)
