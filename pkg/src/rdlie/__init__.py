"""Numerical property RD for SL(n, R) through the Harish-Chandra function.

Root data, polar decompositions, Haar quadrature, the boundary
representation of SL(2, R), Xi for n = 2, 3, the weighted spherical
integral with certified tail bounds, and a seeded verification harness.
"""
from .exceptions import (DivergentTailError, DomainError, GridMismatchError, InvalidRankError,
                         NumericError, PreconditionError, RDError, UnsupportedRankError)
from .harish_chandra import XiSample, decay_envelope_fit, xi, xi_boundary, xi_iwasawa, xi_ray
from .lie_structure import (ChamberVector, RootDatum, build_root_datum, jacobian, killing_norm,
                            rd_threshold, rho)
from .polar import PolarTriple, cartan_decompose, iwasawa, iwasawa_projection, length
from .rd_integral import RDReport, divergence_scan, rd_constant, rd_integrand, tail_bound
from .verify import VerificationRun, run_verification

__version__ = "0.1.0"

__all__ = [
    "ChamberVector", "DivergentTailError", "DomainError", "GridMismatchError", "InvalidRankError",
    "NumericError", "PolarTriple", "PreconditionError", "RDError", "RDReport", "RootDatum",
    "UnsupportedRankError", "VerificationRun", "XiSample", "build_root_datum", "cartan_decompose",
    "decay_envelope_fit", "divergence_scan", "iwasawa", "iwasawa_projection", "jacobian",
    "killing_norm", "length", "rd_constant", "rd_integrand", "rd_threshold", "rho",
    "run_verification", "tail_bound", "xi", "xi_boundary", "xi_iwasawa", "xi_ray",
]
