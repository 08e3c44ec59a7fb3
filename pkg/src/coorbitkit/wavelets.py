"""Analyzing-wavelet construction and frequency-side diagnostics.

Two constructions are provided.  A *bump* wavelet is a smooth compactly
supported frequency bump placed strictly inside the open dual orbit; it has
vanishing moments of every order on the orbit complement by construction.
A *moment* wavelet multiplies a Gaussian envelope by a power of the orbit
polynomial, which forces a prescribed vanishing order on the complement
while keeping an explicit closed form.

Also here: the radial pair used by the reducible-representation experiment,
a grid Schwartz seminorm built on 4th-order finite differences, and a
boundary-decay slope estimator for the vanishing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .fields import FrequencyGrid, SampledField, field_from_profile, l2_norm
from .groups import GroupFamily
from .orbits import dist_complement, orbit_polynomial, orbit_polynomial_degree

MAX_SEMINORM_ORDER = 6


class WaveletSupportError(ValueError):
    """Requested bump support sticks out of the open orbit."""

    def __init__(self, message, margin):
        super().__init__(message)
        self.margin = margin


@dataclass(frozen=True)
class WaveletSpec:
    """Parameters for one analyzing wavelet.

    ``kind`` is ``"bump"`` (fields: ``center``, ``radius``) or ``"moment"``
    (fields: ``order``, ``envelope_sigma``).
    """

    kind: str
    center: tuple[float, float] = (1.0, 0.0)
    radius: float = 0.5
    order: int = 1
    envelope_sigma: float = 2.0

    def __post_init__(self):
        if self.kind not in ("bump", "moment"):
            raise ValueError("kind must be 'bump' or 'moment'")
        if self.kind == "bump" and not self.radius > 0:
            raise ValueError("bump radius must be positive")
        if self.kind == "moment":
            if self.order < 0 or int(self.order) != self.order:
                raise ValueError("moment order must be a nonnegative integer")
            if not self.envelope_sigma > 0:
                raise ValueError("envelope_sigma must be positive")


def mollifier(t):
    """The standard bump profile exp(-1/(1-t^2)) on |t| < 1, else 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def bump_wavelet(family: GroupFamily, spec: WaveletSpec,
                 grid: FrequencyGrid) -> SampledField:
    """Frequency-domain bump supported in the closed ball of ``spec``.

    The ball must sit strictly inside the open orbit; the construction is
    normalized to unit L2 norm on the grid.
    """
    if spec.kind != "bump":
        raise ValueError("bump_wavelet needs a bump spec")
    center = np.asarray(spec.center, dtype=float)
    margin = float(dist_complement(family, center)) - spec.radius
    if margin <= 0:
        raise WaveletSupportError(
            f"bump ball of radius {spec.radius} at {tuple(center)} leaves "
            f"the open orbit by {-margin:.6g}", margin)

    def raw(x1, x2):
        t = np.hypot(x1 - center[0], x2 - center[1]) / spec.radius
        return mollifier(t)

    rough = field_from_profile(grid, raw, family)
    amp = 1.0 / l2_norm(rough)
    return field_from_profile(
        grid, lambda x1, x2: amp * raw(x1, x2), family)


def moment_wavelet(family: GroupFamily, spec: WaveletSpec,
                   grid: FrequencyGrid) -> SampledField:
    """Orbit polynomial to the ``order`` power times a Gaussian envelope,
    normalized to unit L2 norm on the grid."""
    if spec.kind != "moment":
        raise ValueError("moment_wavelet needs a moment spec")
    s, sigma = int(spec.order), float(spec.envelope_sigma)

    def raw(x1, x2):
        xi = np.stack([np.asarray(x1, dtype=float),
                       np.asarray(x2, dtype=float)], axis=-1)
        p = orbit_polynomial(family, xi)
        return p ** s * np.exp(-np.pi * (x1 * x1 + x2 * x2) / sigma ** 2)

    rough = field_from_profile(grid, raw, family)
    amp = 1.0 / l2_norm(rough)
    return field_from_profile(
        grid, lambda x1, x2: amp * raw(x1, x2), family)


def vanishing_order(family: GroupFamily, spec: WaveletSpec) -> int:
    """Vanishing order on the orbit complement of a moment wavelet."""
    return int(spec.order) * orbit_polynomial_degree(family)


# ---------------------------------------------------------------------------
# Radial pair for the reducible scalar action
# ---------------------------------------------------------------------------

def radial_profile(r1: float, r2: float):
    """Smooth radial bump on [r1, r2], scaled so the scale-invariant
    energy integral of the profile over (0, inf) equals one."""
    if not (0 < r1 < r2):
        raise ValueError("need 0 < r1 < r2")
    mid, half = 0.5 * (r1 + r2), 0.5 * (r2 - r1)

    def raw(s):
        return mollifier((np.asarray(s, dtype=float) - mid) / half)

    total, _ = quad(lambda s: raw(s) ** 2 / s, r1, r2, limit=200)
    amp = 1.0 / math.sqrt(total)
    return lambda s: amp * raw(s)


def radial_bump_field(grid: FrequencyGrid, r1: float, r2: float,
                      family: Optional[GroupFamily] = None) -> SampledField:
    prof = radial_profile(r1, r2)
    return field_from_profile(
        grid, lambda x1, x2: prof(np.hypot(x1, x2)), family)


def counterexample_pair(grid: FrequencyGrid, r1: float, r2: float
                        ) -> tuple[SampledField, SampledField]:
    """Radial field and its half-plane sign flip for the scalar family.

    Both transforms of each field with itself coincide, yet the cross
    transform fails to be integrable; the pair drives the reducible-action
    experiment.  The flip uses sign(0) = 0, so the returned second field
    vanishes on the vertical axis.
    """
    if not (0 < r1 < r2 <= grid.xi_max / 2):
        raise ValueError("radii must satisfy 0 < r1 < r2 <= xi_max / 2")
    family = GroupFamily.scalar()
    f = radial_bump_field(grid, r1, r2, family)
    prof = f.profile

    def flipped(x1, x2):
        return np.sign(x1) * prof(x1, x2)

    g = field_from_profile(grid, flipped, family)
    return f, g


# ---------------------------------------------------------------------------
# Grid Schwartz seminorm
# ---------------------------------------------------------------------------

def _diff1(arr: np.ndarray, step: float, axis: int) -> np.ndarray:
    # 4th-order central first derivative; wrap-around is harmless because
    # every admissible field decays to negligible size at the grid rim.
    return (-np.roll(arr, -2, axis) + 8.0 * np.roll(arr, -1, axis)
            - 8.0 * np.roll(arr, 1, axis) + np.roll(arr, 2, axis)) / (12.0 * step)


def schwartz_seminorm(f: SampledField, r: int, m: float) -> float:
    """Grid supremum of ``(1+|x|)^m |D^alpha f|`` over orders ``<= r``.

    Derivatives are 4th-order central finite differences applied
    repeatedly; orders above 6 are rejected because the stencil accuracy
    degrades.
    """
    if r < 0 or int(r) != r:
        raise ValueError("derivative order must be a nonnegative integer")
    if r > MAX_SEMINORM_ORDER:
        raise ValueError(f"derivative order r={r} exceeds the supported "
                         f"maximum {MAX_SEMINORM_ORDER}")
    step = (f.grid.spacing if f.domain_tag == "frequency"
            else f.grid.space_spacing)
    x1, x2 = (f.grid.mesh() if f.domain_tag == "frequency"
              else f.grid.space_mesh())
    weight = (1.0 + np.hypot(x1, x2)) ** m

    best = 0.0
    d_axis0 = f.values
    for a1 in range(r + 1):
        d = d_axis0
        for a2 in range(r - a1 + 1):
            best = max(best, float(np.max(weight * np.abs(d))))
            if a2 < r - a1:
                d = _diff1(d, step, 1)
        d_axis0 = _diff1(d_axis0, step, 0)
    return best


# ---------------------------------------------------------------------------
# Vanishing-order estimate from decay toward the orbit complement
# ---------------------------------------------------------------------------

def moment_slope(f: SampledField, family: GroupFamily) -> float:
    """Estimate the decay order of |f| toward the orbit complement.

    Grid points in the distance decade nearest the complement are grouped
    by their (discrete) distance value; the estimate is the least-squares
    slope of the log envelope (max of |f| per distance) against the log
    distance.  Fields that vanish identically on a several-cell band
    around the complement report ``inf``.
    """
    if f.domain_tag != "frequency":
        raise ValueError("moment_slope expects a frequency-domain field")
    dist = dist_complement(family, f.grid.points())
    mag = np.abs(f.values)
    nz = mag > 0
    grid_d0 = float(dist[dist > 1e-12].min())
    d_field = float(dist[nz].min()) if np.any(nz) else math.inf
    if d_field > 5.0 * grid_d0:
        return math.inf

    d0 = d_field
    sel = nz & (dist >= d0 * (1 - 1e-12)) & (dist <= 10.0 * d0 * (1 + 1e-12))
    logd = np.log(dist[sel])
    logm = np.log(mag[sel])
    # group by discrete distance value and keep the envelope per group
    order = np.argsort(logd)
    logd, logm = logd[order], logm[order]
    breaks = np.concatenate([[0], np.nonzero(np.diff(logd) > 1e-9)[0] + 1,
                             [len(logd)]])
    xs = logd[breaks[:-1]]
    ys = np.array([logm[i:j].max() for i, j in zip(breaks[:-1], breaks[1:])])
    if len(xs) < 4:
        raise ValueError("too few distinct distances near the boundary")
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope)
