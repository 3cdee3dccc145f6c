"""NLI power coefficients for dual-polarization 4D modulation formats."""

from ._dp4d import (
    Constellation4D,
    EtaEstimate,
    EtaSsfm,
    LinkIntegrals,
    LinkSpec,
    QuadratureSettings,
    SimConfig,
    compute_chi_integrals,
    compute_moments,
    eta_4d,
    eta_egn_projection,
    generate_2a8psk,
    generate_pm_qam,
    load_constellation_file,
    normalize_energy,
    run_ssfm,
    swap_polarizations,
)

__all__ = [
    "Constellation4D",
    "EtaEstimate",
    "EtaSsfm",
    "LinkIntegrals",
    "LinkSpec",
    "QuadratureSettings",
    "SimConfig",
    "compute_chi_integrals",
    "compute_moments",
    "eta_4d",
    "eta_egn_projection",
    "generate_2a8psk",
    "generate_pm_qam",
    "load_constellation_file",
    "normalize_energy",
    "run_ssfm",
    "swap_polarizations",
]
