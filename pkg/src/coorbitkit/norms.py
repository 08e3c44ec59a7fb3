"""Mixed norms on transform arrays, weighted space norms, embeddedness
quadratures and the coefficient-decay ratio.

The mixed norm of a transform takes an inner weighted p-norm over the
translation grid and an outer q-norm over the dilation nodes against the
affine Haar measure (node weight divided by the determinant).  Infinite
exponents replace the corresponding quadrature by a grid supremum.

The embeddedness checker quantifies whether powers of the orbit envelope
damp the canonical integrands into L^q over the dilation group: it
evaluates truncated chart quadratures over a geometrically growing box
schedule and decides convergence with a Cauchy-increment test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from typing import Iterable, Optional

import numpy as np

from .cwt import HGrid, TransformArray, _trapezoid_weights, iter_analyze
from .fields import SampledField
from .groups import (GroupFamily, det_ab, family_norm_ab, invert_ab,
                     matrix_entries, opnorm_ab)
from .orbits import aux_A, base_point
from .wavelets import schwartz_seminorm
from .weights import WeightSpec, hweight_ab

SPACE_DIM = 2


@dataclass(frozen=True)
class MixedNormParams:
    """Exponent pair plus optional weight; ``weight=None`` means v == 1."""

    p: float
    q: float
    weight: Optional[WeightSpec] = None

    def __post_init__(self):
        for e in (self.p, self.q):
            if not (e >= 1):
                raise ValueError("exponents must satisfy p, q >= 1")


def _slice_weight(params: MixedNormParams, r_mesh: np.ndarray,
                  opn: float, w_h: float) -> np.ndarray | float:
    if params.weight is None:
        return 1.0
    s = params.weight.s
    return (1.0 + r_mesh + opn) ** s * w_h


def mixed_norm_stream(slabs: Iterable[tuple[np.ndarray, np.ndarray]],
                      xgrid, hgrid: HGrid,
                      params: MixedNormParams) -> float:
    """Mixed norm from an ordered stream of ``(node_indices, slab)``."""
    p, q = params.p, params.q
    x1, x2 = xgrid.space_mesh()
    r_mesh = np.hypot(x1, x2)
    cell = xgrid.space_spacing ** 2
    opn = opnorm_ab(hgrid.family, hgrid.a, hgrid.b)
    wh = (hweight_ab(params.weight, hgrid.a, hgrid.b)
          if params.weight is not None else np.ones(len(hgrid)))
    dets = np.abs(hgrid.dets())

    inner = np.zeros(len(hgrid))
    for idx, slab in slabs:
        for pos, j in enumerate(idx):
            v = _slice_weight(params, r_mesh, float(opn[j]), float(wh[j]))
            weighted = np.abs(slab[pos]) * v
            if math.isinf(p):
                inner[j] = float(weighted.max())
            else:
                inner[j] = float((weighted ** p).sum() * cell) ** (1.0 / p)
    if math.isinf(q):
        return float(inner.max())
    return float((hgrid.weight / dets * inner ** q).sum() ** (1.0 / q))


def mixed_norm(T: TransformArray, params: MixedNormParams) -> float:
    """Weighted mixed norm of a materialized transform array."""
    idx = np.arange(len(T.hgrid))
    return mixed_norm_stream([(idx, T.values)], T.xgrid, T.hgrid, params)


def flat_lp_norm(T: TransformArray, p: float,
                 weight: Optional[WeightSpec]) -> float:
    """Plain weighted p-norm over all (x, h) cells in one flattened
    quadrature; agrees with :func:`mixed_norm` when p == q."""
    x1, x2 = T.xgrid.space_mesh()
    r_mesh = np.hypot(x1, x2)
    cell = T.xgrid.space_spacing ** 2
    dets = np.abs(T.hgrid.dets())
    opn = opnorm_ab(T.hgrid.family, T.hgrid.a, T.hgrid.b)
    wh = (hweight_ab(weight, T.hgrid.a, T.hgrid.b)
          if weight is not None else np.ones(len(T.hgrid)))
    total = 0.0
    sup = 0.0
    for j in range(len(T.hgrid)):
        v = (1.0 if weight is None
             else (1.0 + r_mesh + float(opn[j])) ** weight.s * float(wh[j]))
        weighted = np.abs(T.values[j]) * v
        if math.isinf(p):
            sup = max(sup, float(weighted.max()))
        else:
            total += float((weighted ** p).sum()) * cell \
                * T.hgrid.weight[j] / dets[j]
    return sup if math.isinf(p) else total ** (1.0 / p)


def lps_norm(f: SampledField, p: float, s: float) -> float:
    """Weighted p-norm ``(sum |f(x)|^p (1+|x|)^{sp} dx)^{1/p}`` on the
    space grid; supremum form for p = inf."""
    if f.domain_tag != "space":
        raise ValueError("lps_norm expects a space-domain field")
    x1, x2 = f.grid.space_mesh()
    w = (1.0 + np.hypot(x1, x2)) ** s
    weighted = np.abs(f.values) * w
    if math.isinf(p):
        return float(weighted.max())
    cell = f.grid.space_spacing ** 2
    return float((weighted ** p).sum() * cell) ** (1.0 / p)


# ---------------------------------------------------------------------------
# Temperate-embeddedness quadratures
# ---------------------------------------------------------------------------

def _graded_halfline(top: float, floor: float = 2.0 ** -8,
                     per_octave: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Mesh {0} + log-spaced [floor, top] with non-uniform trapezoid
    weights, for integrands that decay polynomially along the line."""
    n = max(2, int(per_octave * math.log2(top / floor)) + 1)
    pts = np.concatenate([[0.0], np.geomspace(floor, top, n)])
    return pts, _trapezoid_weights(pts)


def _embed_mesh(family: GroupFamily, k: int, per_octave: int = 8):
    """Chart nodes and Haar weights over the truncation box of level k
    (scales in [2^-k, 2^k], shear/second coordinate within 2^k)."""
    t = np.linspace(-k * math.log(2.0), k * math.log(2.0),
                    2 * per_octave * k + 1)
    wt = _trapezoid_weights(t)
    tag = family.tag
    if tag == "similitude":
        # the integrands depend on the chart through the modulus only
        rho = np.exp(t)
        return rho, np.zeros_like(rho), wt * 2.0 * math.pi
    if tag == "diagonal":
        A, B = np.meshgrid(np.exp(t), np.exp(t), indexing="ij")
        W = 4.0 * np.outer(wt, wt)
        return A.ravel(), B.ravel(), W.ravel()
    if tag == "shearlet":
        bs, wb = _graded_halfline(2.0 ** k, per_octave=per_octave)
        A, B = np.meshgrid(np.exp(t), bs, indexing="ij")
        W = 4.0 * np.outer(wt * np.exp(-t), wb)
        return A.ravel(), B.ravel(), W.ravel()
    raise ValueError("embeddedness applies to admissible families only")


def embeddedness_integrand(family: GroupFamily, which: str, s: float,
                           q: float, wspec: WeightSpec, ell: int,
                           a, b) -> np.ndarray:
    """Pointwise integrand of the requested condition on chart arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    det = np.abs(det_ab(family, a, b))
    norm = family_norm_ab(family, a, b)
    w = hweight_ab(wspec, a, b)
    xi0 = base_point(family)
    m11, m12, m21, m22 = matrix_entries(family, a, b)
    if which == "i":
        pts = np.stack([m11 * xi0[0] + m21 * xi0[1],
                        m12 * xi0[0] + m22 * xi0[1]], axis=-1)
        power = 0.5 - 1.0 / q
    elif which == "ii":
        ai, bi = invert_ab(family, a, b)
        n11, n12, n21, n22 = matrix_entries(family, ai, bi)
        pts = np.stack([n11 * xi0[0] + n21 * xi0[1],
                        n12 * xi0[0] + n22 * xi0[1]], axis=-1)
        power = -0.5 - 1.0 / q
    else:
        raise ValueError("which must be 'i' or 'ii'")
    env = aux_A(family, pts)
    return (det ** power * (1.0 + norm) ** (s + SPACE_DIM + 1.0)
            * w * env ** ell)


def embeddedness_condition(family: GroupFamily, which: str, s: float,
                           q: float, wspec: WeightSpec, ell: int,
                           trunc: int, per_octave: int = 8) -> float:
    """Truncated chart quadrature of one embeddedness condition.

    Condition "i" returns the L^q norm of its integrand over the level
    box, condition "ii" the L^1 integral.  ``trunc`` indexes the geometric
    box schedule (level box spans 2^(2 trunc) octaves each way).
    """
    if math.isinf(q):
        raise ValueError("the embeddedness conditions require q < inf")
    if ell < 0 or int(ell) != ell:
        raise ValueError("envelope power ell must be a nonnegative integer")
    if trunc < 1:
        raise ValueError("truncation level must be >= 1")
    a, b, w = _embed_mesh(family, 2 * trunc, per_octave)
    vals = embeddedness_integrand(family, which, s, q, wspec, ell, a, b)
    if which == "i":
        return float(np.sum(vals ** q * w) ** (1.0 / q))
    return float(np.sum(vals * w))


@dataclass
class ConditionVerdict:
    which: str
    values: list[float]
    converged: bool
    limit: Optional[float] = None
    growth_exponent: Optional[float] = None

    def to_dict(self) -> dict:
        return {"which": self.which, "values": self.values,
                "verdict": "Converged" if self.converged else "Diverged",
                "limit": self.limit, "growth_exponent": self.growth_exponent}


@dataclass
class EmbeddednessReport:
    family: GroupFamily
    s: float
    q: float
    weight: WeightSpec
    levels: int
    per_ell: dict = dfield(default_factory=dict)
    minimal_ell: Optional[int] = None

    def to_dict(self) -> dict:
        return {"family": self.family.to_dict(), "s": self.s, "q": self.q,
                "levels": self.levels, "minimal_ell": self.minimal_ell,
                "per_ell": {str(k): {c.which: c.to_dict() for c in v}
                            for k, v in self.per_ell.items()}}


def _judge(values: list[float], rel_tol: float) -> ConditionVerdict:
    v = np.asarray(values)
    incr = np.diff(v) / v[1:]
    converged = bool(len(incr) >= 2 and np.all(incr[-2:] < rel_tol))
    if converged:
        return ConditionVerdict("?", list(map(float, v)), True,
                                limit=float(v[-1]))
    # exponent of the growth against the box scale 2^(2 trunc)
    k = np.arange(1, len(v) + 1) * 2.0 * math.log(2.0)
    slope = float(np.polyfit(k, np.log(np.maximum(v, 1e-300)), 1)[0])
    return ConditionVerdict("?", list(map(float, v)), False,
                            growth_exponent=slope)


def embeddedness_verdict(family: GroupFamily, s: float, q: float,
                         wspec: WeightSpec, ell_range: Iterable[int],
                         levels: int = 6, rel_tol: float = 0.01,
                         per_octave: int = 8) -> EmbeddednessReport:
    """Scan envelope powers and report the smallest one for which both
    condition quadratures pass the Cauchy-increment test."""
    ells = sorted(set(int(e) for e in ell_range))
    if not ells:
        raise ValueError("empty ell range")
    if levels < 4:
        raise ValueError("truncation schedule too short, need >= 4 levels")
    report = EmbeddednessReport(family, s, q, wspec, levels)
    for ell in ells:
        verdicts = []
        for which in ("i", "ii"):
            values = [embeddedness_condition(family, which, s, q, wspec,
                                             ell, trunc, per_octave)
                      for trunc in range(1, levels + 1)]
            v = _judge(values, rel_tol)
            v.which = which
            verdicts.append(v)
        report.per_ell[ell] = verdicts
        if (report.minimal_ell is None
                and all(v.converged for v in verdicts)):
            report.minimal_ell = ell
    return report


# ---------------------------------------------------------------------------
# Coefficient-decay ratio
# ---------------------------------------------------------------------------

def decay_ratio(f: SampledField, psi: SampledField,
                params: MixedNormParams, t: int, hgrid: HGrid,
                chunk: int = 64, exact: bool = False) -> float:
    """Mixed norm of the transform over the product of the Schwartz
    seminorms of both frequency fields."""
    if f.domain_tag != "frequency" or psi.domain_tag != "frequency":
        raise ValueError("decay_ratio expects frequency-domain fields")
    den = schwartz_seminorm(f, t, t) * schwartz_seminorm(psi, t, t)
    if den == 0:
        raise ZeroDivisionError("vanishing Schwartz seminorm")
    num = mixed_norm_stream(iter_analyze(f, psi, hgrid, chunk, exact=exact),
                            f.grid, hgrid, params)
    return num / den
