"""Twisted crossed products and twisted kernels over discrete groups."""

from .groups import Group, GroupError, parse_group
from .coefficients import FiniteSpectrumModel, ScalarModel, StandardFunction, StandardModel
from .system import TwistedSystem, verify_axioms, cocycle_identity_form
from .crossed import CrossedElement, product, involution, power
from .kernels import KernelElement, compose, involve_kernel, gamma, gamma_inverse, kernel_norm
from .specs import build_system, parse_norm, parse_weight

__all__ = [
    "Group", "GroupError", "parse_group",
    "FiniteSpectrumModel", "ScalarModel", "StandardFunction", "StandardModel",
    "TwistedSystem", "verify_axioms", "cocycle_identity_form",
    "CrossedElement", "product", "involution", "power",
    "KernelElement", "compose", "involve_kernel", "gamma", "gamma_inverse", "kernel_norm",
    "build_system", "parse_norm", "parse_weight",
]
