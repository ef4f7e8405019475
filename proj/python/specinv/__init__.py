"""Inverse spectral toolkit for Neumann Schroedinger operators."""

from ._core import (
    Domain,
    EigenSystem,
    ExtractedData,
    SpecinvError,
    SpectralSamples,
    __version__,
    distinguishability_test,
    eigensolve,
    estimate_order,
    extract_eigendata,
    lift_sign,
    make_lambda_grid,
    nd_map,
    nd_map_direct,
    orthogonality_probe,
    preset_json,
    preset_names,
    run_pipeline,
    sample_potential,
    solve_neumann_bvp,
    synthesize_theta,
    verify_square_uniqueness,
)
