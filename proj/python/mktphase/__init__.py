"""Market-mode spectral analysis of equity price panels."""

from ._mktphase import (
    AverageCorrelation,
    Eigensystem,
    Error,
    PowerLawFit,
    SpectralWindow,
    WindowDiagnostics,
    WindowSpec,
    __version__,
    analyze_window,
    delta_bound,
    diagnose_window,
    eigensystem,
    fit_power_law,
    ideal_covariance,
    kirman_order_parameter,
    mode_overlaps,
    normalize_beta0,
    oracle_leading,
    order_parameters,
    run,
    sample_returns,
    sector_risk,
    window_grid,
)

__all__ = [
    "AverageCorrelation",
    "Eigensystem",
    "Error",
    "PowerLawFit",
    "SpectralWindow",
    "WindowDiagnostics",
    "WindowSpec",
    "__version__",
    "analyze_window",
    "delta_bound",
    "diagnose_window",
    "eigensystem",
    "fit_power_law",
    "ideal_covariance",
    "kirman_order_parameter",
    "mode_overlaps",
    "normalize_beta0",
    "oracle_leading",
    "order_parameters",
    "run",
    "sample_returns",
    "sector_risk",
    "window_grid",
]
