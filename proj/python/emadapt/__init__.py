"""Adaptive edge-element solver for exterior time-harmonic Maxwell
scattering with a spectral transparent boundary condition."""

from ._emadapt import (
    AdaptiveResult,
    ConvergenceRecord,
    Mesh,
    RecordRow,
    RunConfig,
    WaveParams,
    adaptive_solve,
    choose_N,
    fit_slope,
    generate_shell_mesh,
    generate_ushape_mesh,
    load_config,
    load_mesh,
    sph_bessel_j,
    sph_hankel,
    truncation_indicator,
    validate_config,
)

__all__ = [
    "AdaptiveResult",
    "ConvergenceRecord",
    "Mesh",
    "RecordRow",
    "RunConfig",
    "WaveParams",
    "adaptive_solve",
    "choose_N",
    "fit_slope",
    "generate_shell_mesh",
    "generate_ushape_mesh",
    "load_config",
    "load_mesh",
    "sph_bessel_j",
    "sph_hankel",
    "truncation_indicator",
    "validate_config",
]

__version__ = "0.1.0"
