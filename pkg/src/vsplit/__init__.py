"""Energy-optimal baseband split placement for solar-powered virtual small cells."""
from .errors import ConfigError, EnumerationCapError, InfeasibleError
from .modes import SplitMode
from .optimizer import PathLabel, brute_force, expand, solve
from .policies import STATIC_POLICIES, ComparisonReport, StaticPolicy, compare, run_policy
from .results import SearchResult, evaluate_sequence
from .scenario import PRESETS, Scenario, load_scenario

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EnumerationCapError",
    "InfeasibleError",
    "SplitMode",
    "PathLabel",
    "brute_force",
    "expand",
    "solve",
    "STATIC_POLICIES",
    "ComparisonReport",
    "StaticPolicy",
    "compare",
    "run_policy",
    "SearchResult",
    "evaluate_sequence",
    "PRESETS",
    "Scenario",
    "load_scenario",
]
