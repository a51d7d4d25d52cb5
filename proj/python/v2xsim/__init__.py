"""Python bindings for the v2xsim V2X resource allocation simulator."""

from ._v2xsim import (
    ConfigError,
    DegenerateCsi,
    PairLinkParams,
    bessel_j0,
    config_keys,
    cue_rate,
    default_config,
    jakes_epsilon,
    max_weight_matching,
    outage_probability,
    rb_requirements,
    run,
    run_plan,
    select_mcs,
    solve_pair_power,
)

__all__ = [
    "ConfigError",
    "DegenerateCsi",
    "PairLinkParams",
    "bessel_j0",
    "config_keys",
    "cue_rate",
    "default_config",
    "jakes_epsilon",
    "max_weight_matching",
    "outage_probability",
    "rb_requirements",
    "run",
    "run_plan",
    "select_mcs",
    "solve_pair_power",
]
