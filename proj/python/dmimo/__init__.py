"""Position error bounds, ML positioning and GM-PHD tracking for distributed MIMO."""

from ._dmimo import (
    ConfigError,
    Error,
    InvalidArgument,
    IoError,
    NumericalError,
    ScenarioConfig,
    bounds,
    canonical_monte_carlo_config,
    canonical_room_config,
    efim_xi,
    layout_config,
    load_config,
    monte_carlo,
    parse_config,
    peb,
    peb_map,
    select_aps,
    track,
    verify_fixtures,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "IoError",
    "NumericalError",
    "ScenarioConfig",
    "bounds",
    "canonical_monte_carlo_config",
    "canonical_room_config",
    "efim_xi",
    "layout_config",
    "load_config",
    "monte_carlo",
    "parse_config",
    "peb",
    "peb_map",
    "select_aps",
    "track",
    "verify_fixtures",
]
