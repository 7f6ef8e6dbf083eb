"""Exact diagonalization of one-dimensional non-Hermitian anyon-Hubbard
chains: Fock-sector Hamiltonians, non-unitary dynamics, OTOCs and spectral
winding numbers."""

from nhanyon._core import (  # noqa: F401
    BoundCluster,
    DensityProfile,
    FockBasis,
    ModelParams,
    OtocGrid,
    Spectrum,
    SymmetryReport,
    TimeSeries,
    WindingScan,
    __version__,
    annihilation,
    anyon_annihilation,
    bound_state_loop,
    conjugate_pair_check,
    density_correlation,
    density_profiles,
    density_series,
    dynamical_symmetry_residual,
    effective_bound_hamiltonian,
    effective_dispersion,
    eigendecompose,
    eigendecompose_matrix,
    fock_state,
    hamiltonian,
    imbalance,
    known_presets,
    normalize_grid,
    obc_reality_residual,
    propagate,
    pseudo_hermiticity_residual,
    reversed_interval,
    run_experiment,
    sector_dimension,
    state_otoc,
    thermal_otoc,
    transition_asymmetry,
    uniform_center_state,
    winding_number,
)
