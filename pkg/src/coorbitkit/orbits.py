"""Geometry of the open dual orbit of each admissible family.

Each admissible family acts on frequency space with a single open orbit of
full measure.  This module provides membership tests, the distance to the
orbit complement, the vanishing polynomial cutting out the complement, and
the decay envelope ``A`` built from these quantities:

    A(xi) = min( dist(xi) / (1 + sqrt(|xi|^2 - dist(xi)^2)),
                 1 / (1 + |xi|) )

``A`` takes values in (0, 1] on the orbit, vanishes toward the orbit
boundary and at infinity, and upper-bounds Fourier transforms of functions
whose moments vanish on the complement.
"""

from __future__ import annotations

import numpy as np

from .groups import GroupFamily, UnsupportedFamilyError


class OrbitDomainError(ValueError):
    """A point required to lie on the open orbit does not."""


def _require_admissible(family: GroupFamily):
    if not family.admissible:
        raise UnsupportedFamilyError(
            "scalar dilations have no single open dual orbit")


def base_point(family: GroupFamily) -> np.ndarray:
    """Reference point on the open orbit used throughout."""
    _require_admissible(family)
    if family.tag == "diagonal":
        return np.array([1.0, 1.0])
    return np.array([1.0, 0.0])


def orbit_polynomial(family: GroupFamily, xi):
    """Polynomial vanishing exactly on the orbit complement."""
    _require_admissible(family)
    xi = np.asarray(xi, dtype=float)
    x1, x2 = xi[..., 0], xi[..., 1]
    if family.tag == "similitude":
        return x1 * x1 + x2 * x2
    if family.tag == "diagonal":
        return x1 * x2
    return x1


def orbit_polynomial_degree(family: GroupFamily) -> int:
    """Order of vanishing of the orbit polynomial on each boundary
    component (2 at the origin for similitude, else 1)."""
    _require_admissible(family)
    return 2 if family.tag == "similitude" else 1


def in_orbit(family: GroupFamily, xi):
    return orbit_polynomial(family, xi) != 0.0


def dist_complement(family: GroupFamily, xi):
    """Euclidean distance to the orbit complement; zero on the complement."""
    _require_admissible(family)
    xi = np.asarray(xi, dtype=float)
    x1, x2 = xi[..., 0], xi[..., 1]
    if family.tag == "similitude":
        return np.hypot(x1, x2)
    if family.tag == "diagonal":
        return np.minimum(np.abs(x1), np.abs(x2))
    return np.abs(x1)


def aux_A(family: GroupFamily, xi):
    """Decay envelope from the generic euclidean formula.

    Raises :class:`OrbitDomainError` off the orbit, where the envelope is
    undefined.
    """
    xi = np.asarray(xi, dtype=float)
    if not np.all(in_orbit(family, xi)):
        raise OrbitDomainError("envelope requested off the open orbit")
    dist = dist_complement(family, xi)
    norm2 = xi[..., 0] ** 2 + xi[..., 1] ** 2
    tangential = np.sqrt(np.maximum(norm2 - dist * dist, 0.0))
    return np.minimum(dist / (1.0 + tangential),
                      1.0 / (1.0 + np.sqrt(norm2)))


def aux_A_closed(family: GroupFamily, xi):
    """Per-family display form of the envelope.

    For the similitude family this coincides with :func:`aux_A`; the
    diagonal and shearlet forms trade the euclidean norm for the 1-norm in
    the far-field branch, which changes values by at most a fixed factor.
    """
    xi = np.asarray(xi, dtype=float)
    if not np.all(in_orbit(family, xi)):
        raise OrbitDomainError("envelope requested off the open orbit")
    x1, x2 = np.abs(xi[..., 0]), np.abs(xi[..., 1])
    if family.tag == "similitude":
        return aux_A(family, xi)
    if family.tag == "diagonal":
        return np.minimum(np.minimum(x1, x2) / (1.0 + np.maximum(x1, x2)),
                          1.0 / (1.0 + x1 + x2))
    return np.minimum(x1 / (1.0 + x2), 1.0 / (1.0 + x1 + x2))
