"""Chart arithmetic for planar dilation groups and their affine extensions.

Group elements live in per-family chart coordinates ``(a, b)`` rather than
raw matrices, so that composition, inversion, Haar densities and modular
functions stay closed-form and drift-free.  Supported families:

* ``similitude``   rotation-dilations ``[[a, b], [-b, a]]``, ``a^2 + b^2 > 0``
* ``diagonal``     ``[[a, 0], [0, b]]``, ``ab != 0``
* ``shearlet``     ``[[a, b], [0, a^c]]``, ``a != 0``, with the signed power
  convention ``a^c = sign(a) |a|^c``
* ``scalar``       ``a * identity``, ``a > 0``

The scalar family acts reducibly on the plane and is rejected by every
operation that needs a single open dual orbit; it exists solely for the
reducible-representation experiment.

The affine extension pairs a translation with a dilation; its product law is
``(x, h)(y, g) = (x + h y, h g)`` and ``(x, h)^{-1} = (-h^{-1} x, h^{-1})``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FAMILY_TAGS = ("similitude", "diagonal", "shearlet", "scalar")

# Chart coordinates below this magnitude would overflow on inversion.
CHART_FLOOR = 1e-300


class InvalidElementError(ValueError):
    """Chart coordinates violate the family constraints."""


class FamilyMismatchError(ValueError):
    """Operands belong to different group families."""


class UnsupportedFamilyError(ValueError):
    """The scalar family has no single open dual orbit."""


def signed_power(a, c):
    """``sign(a) * |a|**c``, elementwise."""
    a = np.asarray(a, dtype=float)
    return np.sign(a) * np.abs(a) ** c


@dataclass(frozen=True)
class GroupFamily:
    """A supported two-dimensional dilation-group family.

    ``c`` is the anisotropy exponent and is meaningful for the shearlet
    family only.
    """

    tag: str
    c: float | None = None

    def __post_init__(self):
        if self.tag not in FAMILY_TAGS:
            raise ValueError(f"unknown family tag {self.tag!r}")
        if self.tag == "shearlet":
            if self.c is None or not math.isfinite(float(self.c)):
                raise ValueError("shearlet family needs a finite exponent c")
        elif self.c is not None:
            raise ValueError(f"family {self.tag!r} carries no parameter c")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def similitude() -> "GroupFamily":
        return GroupFamily("similitude")

    @staticmethod
    def diagonal() -> "GroupFamily":
        return GroupFamily("diagonal")

    @staticmethod
    def shearlet(c: float) -> "GroupFamily":
        return GroupFamily("shearlet", float(c))

    @staticmethod
    def scalar() -> "GroupFamily":
        return GroupFamily("scalar")

    # -- properties --------------------------------------------------------

    @property
    def admissible(self) -> bool:
        """True unless the family acts reducibly (scalar dilations)."""
        return self.tag != "scalar"

    def identity(self) -> "DilationParams":
        a, b = {"similitude": (1.0, 0.0),
                "diagonal": (1.0, 1.0),
                "shearlet": (1.0, 0.0),
                "scalar": (1.0, 0.0)}[self.tag]
        return DilationParams(self, a, b)

    # -- JSON wire format --------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        d = {"family": self.tag}
        if self.tag == "shearlet":
            d["c"] = self.c
        return d

    @staticmethod
    def from_dict(d: dict) -> "GroupFamily":
        tag = d["family"]
        if tag == "shearlet":
            return GroupFamily.shearlet(d["c"])
        return GroupFamily(tag)

    @staticmethod
    def from_json(text: str) -> "GroupFamily":
        return GroupFamily.from_dict(json.loads(text))


@dataclass(frozen=True)
class DilationParams:
    """One group element in its family chart.  ``b`` is unused (fixed 0)
    for the scalar family."""

    family: GroupFamily
    a: float
    b: float = 0.0


def _require_same_family(h1: DilationParams, h2: DilationParams):
    if h1.family != h2.family:
        raise FamilyMismatchError(
            f"cannot combine {h1.family.tag} with {h2.family.tag}")


# ---------------------------------------------------------------------------
# Vectorized chart kernels.  All take a family plus coordinate arrays and are
# the single source of truth; the scalar element API wraps them.
# ---------------------------------------------------------------------------

def valid_mask(family: GroupFamily, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = family.tag
    if tag == "similitude":
        return a * a + b * b > CHART_FLOOR
    if tag == "diagonal":
        return (np.abs(a) > CHART_FLOOR) & (np.abs(b) > CHART_FLOOR)
    if tag == "shearlet":
        return np.abs(a) > CHART_FLOOR
    return a > CHART_FLOOR


def matrix_entries(family: GroupFamily, a, b):
    """Entries ``(m11, m12, m21, m22)`` of the representing matrix."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    zeros = np.zeros_like(a)
    tag = family.tag
    if tag == "similitude":
        return a, b, -b, a
    if tag == "diagonal":
        return a, zeros, zeros, b
    if tag == "shearlet":
        return a, b, zeros, signed_power(a, family.c)
    return a, zeros, zeros, a.copy() if isinstance(a, np.ndarray) else a


def det_ab(family: GroupFamily, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = family.tag
    if tag == "similitude":
        return a * a + b * b
    if tag == "diagonal":
        return a * b
    if tag == "shearlet":
        # a * sign(a)|a|^c collapses to |a|^(1+c)
        return np.abs(a) ** (1.0 + family.c)
    return a * a


def modular_H_ab(family: GroupFamily, a, b):
    a = np.asarray(a, dtype=float)
    if family.tag == "shearlet":
        return np.abs(a) ** (family.c - 1.0)
    return np.ones_like(a)


def haar_density_ab(family: GroupFamily, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = family.tag
    if tag == "similitude":
        return 1.0 / (a * a + b * b)
    if tag == "diagonal":
        return 1.0 / np.abs(a * b)
    if tag == "shearlet":
        return 1.0 / (a * a)
    return 1.0 / a


def family_norm_ab(family: GroupFamily, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = family.tag
    if tag == "similitude":
        return np.hypot(a, b)
    if tag == "diagonal":
        return np.maximum(np.abs(a), np.abs(b))
    if tag == "shearlet":
        return np.maximum(np.maximum(np.abs(a), np.abs(a) ** family.c),
                          np.abs(b))
    return np.abs(a)


def opnorm_ab(family: GroupFamily, a, b):
    """Largest singular value of the representing matrix, closed form.

    The first three families are normal or diagonal, where the value is
    exact; the shearlet case uses the 2x2 singular-value formula.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = family.tag
    if tag == "similitude":
        return np.hypot(a, b)
    if tag == "diagonal":
        return np.maximum(np.abs(a), np.abs(b))
    if tag == "scalar":
        return np.abs(a)
    m11, m12, m21, m22 = matrix_entries(family, a, b)
    frob2 = m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22
    det = m11 * m22 - m12 * m21
    gap = np.sqrt(np.maximum(frob2 * frob2 - 4.0 * det * det, 0.0))
    return np.sqrt(0.5 * (frob2 + gap))


def compose_ab(family: GroupFamily, a1, b1, a2, b2):
    a1 = np.asarray(a1, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    tag = family.tag
    if tag == "similitude":
        return a1 * a2 - b1 * b2, a1 * b2 + b1 * a2
    if tag == "diagonal":
        return a1 * a2, b1 * b2
    if tag == "shearlet":
        return a1 * a2, a1 * b2 + b1 * signed_power(a2, family.c)
    return a1 * a2, np.zeros_like(a1 * a2)


def invert_ab(family: GroupFamily, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = family.tag
    if tag == "similitude":
        d = a * a + b * b
        return a / d, -b / d
    if tag == "diagonal":
        return 1.0 / a, 1.0 / b
    if tag == "shearlet":
        # the (1,2) entry of the inverse matrix is -b / (a * a^c) and the
        # denominator a * sign(a)|a|^c is positive
        return 1.0 / a, -b * np.abs(a) ** (-family.c - 1.0)
    return 1.0 / a, np.zeros_like(a)


# ---------------------------------------------------------------------------
# Element-level API
# ---------------------------------------------------------------------------

def validate(h: DilationParams) -> DilationParams:
    if not bool(valid_mask(h.family, h.a, h.b)):
        raise InvalidElementError(
            f"({h.a}, {h.b}) is outside the {h.family.tag} chart")
    return h


def to_matrix(h: DilationParams) -> np.ndarray:
    validate(h)
    m11, m12, m21, m22 = matrix_entries(h.family, h.a, h.b)
    return np.array([[m11, m12], [m21, m22]], dtype=float)


def compose(h1: DilationParams, h2: DilationParams) -> DilationParams:
    _require_same_family(h1, h2)
    validate(h1)
    validate(h2)
    a, b = compose_ab(h1.family, h1.a, h1.b, h2.a, h2.b)
    return DilationParams(h1.family, float(a), float(b))


def invert(h: DilationParams) -> DilationParams:
    validate(h)
    a, b = invert_ab(h.family, h.a, h.b)
    return DilationParams(h.family, float(a), float(b))


def determinant(h: DilationParams) -> float:
    validate(h)
    return float(det_ab(h.family, h.a, h.b))


def modular_H(h: DilationParams) -> float:
    validate(h)
    return float(modular_H_ab(h.family, h.a, h.b))


def modular_G(h: DilationParams) -> float:
    """Modular function of the affine group; depends on the dilation part
    only and equals ``modular_H(h) / |det h|``."""
    validate(h)
    return float(modular_H_ab(h.family, h.a, h.b)
                 / np.abs(det_ab(h.family, h.a, h.b)))


def haar_density(h: DilationParams) -> float:
    validate(h)
    return float(haar_density_ab(h.family, h.a, h.b))


def group_norm(h: DilationParams) -> float:
    """Per-family matrix norm (rotation-dilation modulus, max of the
    diagonal entries, or max of scale, anisotropic scale and shear)."""
    validate(h)
    return float(family_norm_ab(h.family, h.a, h.b))


def operator_norm(h: DilationParams) -> float:
    """Spectral norm of the representing matrix."""
    validate(h)
    return float(opnorm_ab(h.family, h.a, h.b))


def dual_action(h: DilationParams, xi) -> np.ndarray:
    """Transposed action ``h^T xi`` on frequency vectors.

    ``xi`` may be a single point or an array of shape ``(..., 2)``.
    """
    validate(h)
    xi = np.asarray(xi, dtype=float)
    m11, m12, m21, m22 = matrix_entries(h.family, h.a, h.b)
    out = np.empty_like(xi)
    out[..., 0] = m11 * xi[..., 0] + m21 * xi[..., 1]
    out[..., 1] = m12 * xi[..., 0] + m22 * xi[..., 1]
    return out


# ---------------------------------------------------------------------------
# Affine extension
# ---------------------------------------------------------------------------

@dataclass
class AffinePoint:
    """A translation paired with a dilation, ``(x, h)``."""

    x: np.ndarray
    h: DilationParams

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(2)


def affine_identity(family: GroupFamily) -> AffinePoint:
    return AffinePoint(np.zeros(2), family.identity())


def affine_apply(p: AffinePoint, y) -> np.ndarray:
    """Affine map ``y -> x + h y``."""
    y = np.asarray(y, dtype=float)
    m11, m12, m21, m22 = matrix_entries(p.h.family, p.h.a, p.h.b)
    out = np.empty_like(y)
    out[..., 0] = p.x[0] + m11 * y[..., 0] + m12 * y[..., 1]
    out[..., 1] = p.x[1] + m21 * y[..., 0] + m22 * y[..., 1]
    return out


def affine_compose(p: AffinePoint, q: AffinePoint) -> AffinePoint:
    _require_same_family(p.h, q.h)
    return AffinePoint(affine_apply(p, q.x), compose(p.h, q.h))


def affine_invert(p: AffinePoint) -> AffinePoint:
    hinv = invert(p.h)
    m11, m12, m21, m22 = matrix_entries(hinv.family, hinv.a, hinv.b)
    x = p.x
    xin = -np.array([m11 * x[0] + m12 * x[1], m21 * x[0] + m22 * x[1]])
    return AffinePoint(xin, hinv)
