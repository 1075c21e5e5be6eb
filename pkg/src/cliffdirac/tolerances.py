"""Tolerance tiers shared by tests, suites and the harness."""
from .algebra import ALGEBRAIC_TOL
from .geometry import DEFAULT_H

EXACT_LINEAR_TOL = 1e-12
PLANEWAVE_TOL = 1e-9
CONSERVATION_TOL = 1e-8


def algebraic(scale=1.0):
    return ALGEBRAIC_TOL * max(1.0, scale)


def fd(h=DEFAULT_H, scale=1.0):
    """One central-difference layer: truncation ``O(h^2)`` with a roundoff floor."""
    return max(50.0 * h * h, 1e-9) * (1.0 + scale)


def nested_fd(h=DEFAULT_H, scale=1.0):
    """Two stacked difference layers (outer step ``h^(2/3)``)."""
    return max(100.0 * h * h, 1e-9) * (1.0 + scale)


TIERS = {"algebraic": algebraic, "fd": fd, "nested_fd": nested_fd}
