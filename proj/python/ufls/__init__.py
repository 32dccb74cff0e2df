"""Python bindings for the ufls simulator core."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ConfigError,
    FilterConfig,
    GridParams,
    ParticleFilter,
    ScenarioConfig,
    load_excess,
    preset,
    run_scenario,
)
