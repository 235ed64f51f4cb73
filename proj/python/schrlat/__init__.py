"""Self-similar Schroedinger solutions, lattice concentration and weighted extension experiments."""

from ._core import (
    BoxUnionWeight,
    CertificateInapplicable,
    FrequencyProfile,
    LatticeSet,
    QuadratureSpec,
    ValidationError,
    box_mass,
    build_lattice,
    build_profile,
    cli,
    knapp_ratio,
    mc_norm,
    min_modulus,
    phase_deviation,
    region_classify,
    run_knapp,
    run_upperbound,
    set_threads,
    solution_at,
    sup_ball_mass,
    surface_extension,
)

__all__ = [
    "BoxUnionWeight",
    "CertificateInapplicable",
    "FrequencyProfile",
    "LatticeSet",
    "QuadratureSpec",
    "ValidationError",
    "box_mass",
    "build_lattice",
    "build_profile",
    "cli",
    "knapp_ratio",
    "mc_norm",
    "min_modulus",
    "phase_deviation",
    "region_classify",
    "run_knapp",
    "run_upperbound",
    "set_threads",
    "solution_at",
    "sup_ball_mass",
    "surface_extension",
]
