"""Weights on the affine group and the control weights derived from them.

A weight couples a polynomial factor on the translation part with a
per-family bundle on the dilation part:

    v(x, h) = (1 + |x| + ||h||_op)^s * w(h)

with ``w`` given by the family exponent bundle (see :class:`WeightSpec`).
The *control weight* machinery dominates the operator norms of left and
right translations on the weighted mixed-norm spaces; two variants are
exposed:

* :func:`control_weight_eval` evaluates the separated upper bound
  ``(1+|x|)^s w0(h)`` with the product form of ``w0`` spelled out below;
* :func:`control_weight_symmetric` evaluates the exact symmetric weight
  ``v2`` which satisfies ``v2(x,h) = modular(x,h)^{-1} v2((x,h)^{-1})``
  identically and stays >= 1.

The modular factor of ``v2`` takes the maximum over the exponent set
{-1/q, 1/q-1, 0, -1}.  The two extra exponents {0, -1} are forced by the
axioms: dominating left translations (which carry no modular factor) keeps
the weight >= 1, and the pair is closed under the symmetry relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .groups import (DilationParams, GroupFamily, det_ab, invert_ab,
                     matrix_entries, modular_H_ab, opnorm_ab, validate)


@dataclass(frozen=True)
class WeightSpec:
    """Exponent bundle defining a weight on the affine group.

    ``s`` drives the translation part.  The dilation part depends on the
    family: similitude uses ``(det)^u + (det)^-u``; diagonal uses
    ``(|a|+1/|a|)^t (|b|+1/|b|)^u``; shearlet uses
    ``(|a|+1/|a|+|b|)^u`` or, when ``shear_lit=(r1, r2)`` is set, the
    anisotropy-adapted form ``|a|^r1 (|a|+1/|a|+|a^{-1/2} b|)^r2``;
    scalar uses ``(a+1/a)^u``.
    """

    family: GroupFamily
    s: float = 0.0
    u: float = 0.0
    t: float = 0.0
    shear_lit: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("translation exponent s must be >= 0")
        for name in ("s", "u", "t"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"exponent {name} must be finite")
        if self.shear_lit is not None and self.family.tag != "shearlet":
            raise ValueError("shear_lit applies to the shearlet family only")


def hweight_ab(spec: WeightSpec, a, b) -> np.ndarray:
    """Dilation-part weight ``w(h)`` on chart coordinate arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tag = spec.family.tag
    if tag == "similitude":
        d = a * a + b * b
        return d ** spec.u + d ** (-spec.u)
    if tag == "diagonal":
        return ((np.abs(a) + 1.0 / np.abs(a)) ** spec.t
                * (np.abs(b) + 1.0 / np.abs(b)) ** spec.u)
    if tag == "shearlet":
        if spec.shear_lit is not None:
            r1, r2 = spec.shear_lit
            core = (np.abs(a) + 1.0 / np.abs(a)
                    + np.abs(b) / np.sqrt(np.abs(a)))
            return np.abs(a) ** r1 * core ** r2
        return (np.abs(a) + 1.0 / np.abs(a) + np.abs(b)) ** spec.u
    return (a + 1.0 / a) ** spec.u


def weight_eval(spec: WeightSpec, x, h: DilationParams) -> np.ndarray:
    """``(1 + |x| + ||h||_op)^s * w(h)`` for one element and any x batch."""
    validate(h)
    x = np.asarray(x, dtype=float)
    opn = float(opnorm_ab(h.family, h.a, h.b))
    w = float(hweight_ab(spec, h.a, h.b))
    r = np.hypot(x[..., 0], x[..., 1])
    out = (1.0 + r + opn) ** spec.s * w
    return out if out.shape else float(out)


def _inv_q(q) -> float:
    return 0.0 if np.isinf(q) else 1.0 / float(q)


def modular_G_ab(family: GroupFamily, a, b) -> np.ndarray:
    return modular_H_ab(family, a, b) / np.abs(det_ab(family, a, b))


def _sym_pieces(spec: WeightSpec, p, q, a, b):
    """Node factors of the symmetric control weight: modular max, weight
    sum, determinant sum (all symmetric under inversion except through the
    modular relation)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ai, bi = invert_ab(spec.family, a, b)
    delta = modular_G_ab(spec.family, a, b)
    iq = _inv_q(q)
    ip = _inv_q(p)
    mod = np.maximum.reduce([delta ** (-iq), delta ** (iq - 1.0),
                             np.ones_like(delta), delta ** (-1.0)])
    wsum = hweight_ab(spec, a, b) + hweight_ab(spec, ai, bi)
    det = np.abs(det_ab(spec.family, a, b))
    dsum = det ** (ip - iq) + det ** (iq - ip)
    return mod, wsum, dsum, (ai, bi)


def control_weight_eval(spec: WeightSpec, p, q, x,
                        h: DilationParams) -> np.ndarray:
    """Separated control-weight bound ``(1+|x|)^s * w0(h)``.

    ``w0`` is the product of the inversion-symmetrized dilation weight,
    the two-sided modular factor ``max(D^{-1/q}, D^{1/q-1})`` of the
    affine modular function D, the two-sided determinant factor, and the
    operator-norm factor ``(1 + ||h|| + ||h^{-1}||)^s``.
    """
    validate(h)
    x = np.asarray(x, dtype=float)
    a, b = h.a, h.b
    ai, bi = invert_ab(spec.family, a, b)
    delta = float(modular_G_ab(spec.family, a, b))
    iq, ip = _inv_q(q), _inv_q(p)
    mod = max(delta ** (-iq), delta ** (iq - 1.0))
    wsum = float(hweight_ab(spec, a, b) + hweight_ab(spec, ai, bi))
    det = abs(float(det_ab(spec.family, a, b)))
    dsum = det ** (iq - ip) + det ** (ip - iq)
    opsum = (1.0 + float(opnorm_ab(spec.family, a, b))
             + float(opnorm_ab(spec.family, ai, bi))) ** spec.s
    r = np.hypot(x[..., 0], x[..., 1])
    out = (1.0 + r) ** spec.s * wsum * mod * dsum * opsum
    return out if out.shape else float(out)


def control_weight_symmetric(spec: WeightSpec, p, q, x,
                             h: DilationParams) -> np.ndarray:
    """Exact symmetric control weight ``v2``.

    Satisfies ``v2(x, h) = modular(x,h)^{-1} v2((x,h)^{-1})`` identically
    and is bounded below by 1, as any weight dominating the translation
    operator norms must be.
    """
    validate(h)
    x = np.asarray(x, dtype=float)
    mod, wsum, dsum, (ai, bi) = _sym_pieces(spec, p, q, h.a, h.b)
    m11, m12, m21, m22 = matrix_entries(spec.family, ai, bi)
    hix = np.stack([m11 * x[..., 0] + m12 * x[..., 1],
                    m21 * x[..., 0] + m22 * x[..., 1]], axis=-1)
    v1 = (1.0 + np.hypot(x[..., 0], x[..., 1])
          + np.hypot(hix[..., 0], hix[..., 1])
          + float(opnorm_ab(spec.family, h.a, h.b))
          + float(opnorm_ab(spec.family, ai, bi))) ** spec.s
    out = v1 * float(mod) * float(wsum) * float(dsum)
    return out if out.shape else float(out)


def control_weight_symmetric_slices(spec: WeightSpec, p, q,
                                    x1: np.ndarray, x2: np.ndarray,
                                    a, b) -> np.ndarray:
    """Vectorized ``v2`` over an x mesh for a batch of chart nodes.

    Returns an array of shape ``(len(a),) + x1.shape``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    mod, wsum, dsum, (ai, bi) = _sym_pieces(spec, p, q, a, b)
    m11, m12, m21, m22 = matrix_entries(spec.family, ai, bi)
    sh = (len(a),) + (1,) * x1.ndim
    h1 = m11.reshape(sh) * x1 + m12.reshape(sh) * x2
    h2 = m21.reshape(sh) * x1 + m22.reshape(sh) * x2
    opn = opnorm_ab(spec.family, a, b)
    opni = opnorm_ab(spec.family, ai, bi)
    v1 = (1.0 + np.hypot(x1, x2) + np.hypot(h1, h2)
          + opn.reshape(sh) + opni.reshape(sh)) ** spec.s
    return v1 * (mod * wsum * dsum).reshape(sh)
