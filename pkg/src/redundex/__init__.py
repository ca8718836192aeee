"""Redundant syndrome extraction for small stabilizer codes.

Exact failure-rate and cost polynomials for minimal, repeated, minimally
redundant and design-based measurement protocols, plus the block-design
checks behind the design-based choice.
"""

from .codes import Kind, Protocol, build_protocol, builtin_code, classify
from .decode import AMBIGUOUS, DecodePolicy, build_lookup_table, decode, success
from .designs import BlockDesign, derive_parameters
from .failure import ErrorModel, exact_failure, expected_cost, monte_carlo, truncated_failure
from .pauli import PauliOperator, commutes, enumerate_group, multiply, syndrome
from .polynomial import BivariatePolynomial

__all__ = [
    "AMBIGUOUS",
    "BivariatePolynomial",
    "BlockDesign",
    "DecodePolicy",
    "ErrorModel",
    "Kind",
    "PauliOperator",
    "Protocol",
    "build_lookup_table",
    "build_protocol",
    "builtin_code",
    "classify",
    "commutes",
    "decode",
    "derive_parameters",
    "enumerate_group",
    "exact_failure",
    "expected_cost",
    "monte_carlo",
    "multiply",
    "success",
    "syndrome",
    "truncated_failure",
]
