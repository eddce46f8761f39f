"""Monte Carlo toolkit for the Brownian snake and the Brownian sphere."""

from ._bsphere import (
    CorruptFileError,
    ParameterError,
    ResourceError,
    SnakeTrajectory,
    UnsupportedVersionError,
    __version__,
    approx_D,
    clg_value,
    command_names,
    config_hash,
    estimate_min_tail,
    first_moment,
    ito_tail,
    min_tail,
    read_trajectory,
    run,
    sample_snake,
    second_moment,
    write_trajectory,
)

__all__ = [
    "CorruptFileError",
    "ParameterError",
    "ResourceError",
    "SnakeTrajectory",
    "UnsupportedVersionError",
    "__version__",
    "approx_D",
    "clg_value",
    "command_names",
    "config_hash",
    "estimate_min_tail",
    "first_moment",
    "ito_tail",
    "min_tail",
    "read_trajectory",
    "run",
    "sample_snake",
    "second_moment",
    "write_trajectory",
]
