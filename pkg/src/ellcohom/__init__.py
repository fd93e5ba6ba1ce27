"""Elliptic hypergeometric forms and the cohomology of elliptic arrangement complements."""
from .arrangement import (EllipticArrangement, EllipticHyperplane, Vertex, betti, discriminantal,
                          enumerate_vertices, is_convenient, local_os_dim)
from .elliptic_core import sigma, theta, theta_prime_zero
from .estimator import EllipticCohomology
from .exact_lattice import EPoint, QPair, snf, solve_on_E
from .exceptions import EllCohomError, NotConvenient, PrecisionLossWarning
from .forest_algebra import Forest, forest_space_dim, generate_admissible
from .form_builder import FormDescriptor, TransversalSystem, normalized_forms, point_residue

__all__ = [
    "EllipticArrangement", "EllipticHyperplane", "Vertex", "betti", "discriminantal",
    "enumerate_vertices", "is_convenient", "local_os_dim",
    "sigma", "theta", "theta_prime_zero",
    "EllipticCohomology",
    "EPoint", "QPair", "snf", "solve_on_E",
    "EllCohomError", "NotConvenient", "PrecisionLossWarning",
    "Forest", "forest_space_dim", "generate_admissible",
    "FormDescriptor", "TransversalSystem", "normalized_forms", "point_residue",
]
