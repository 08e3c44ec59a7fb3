"""Desk-scale frame discretization of the continuous transform.

A sampling set pairs a multiplicative mesh of dilations with, per dilation
``h_j``, the affine image ``h_j (beta k)`` of a square lattice, snapped to
the analysis grid.  On top of it live: a direct covering check producing
the smallest product neighborhood for which the set is dense over the
covered region, the weighted oscillation norm of the self-transform of a
wavelet (the smallness certificate for atomic decompositions), a discrete
weighted coefficient norm, coefficient analysis / synthesis against the
atoms, and Richardson iteration on the frame operator.

Off-mesh group points needed by the oscillation norm are evaluated
exactly through the covariance identity

    W(z y) = (analysis of the y-translated wavelet)(z),

which trades chart interpolation for a handful of extra transform passes
with analytically shifted wavelets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from typing import Callable, Optional

import numpy as np

from .cwt import HGrid, analyze, iter_analyze
from .fields import FrequencyGrid, SampledField, field_from_profile, inner, l2_norm
from .groups import (DilationParams, GroupFamily, compose_ab, det_ab,
                     invert_ab, matrix_entries)
from .weights import WeightSpec, control_weight_symmetric_slices, weight_eval


@dataclass(frozen=True)
class UBox:
    """Product neighborhood of the identity: an x-ball radius and half
    widths of a chart box (log scale, second coordinate)."""

    x_radius: float
    log_a_half: float
    b_half: float

    def scaled(self, factor: float) -> "UBox":
        return UBox(self.x_radius * factor, self.log_a_half * factor,
                    self.b_half * factor)


@dataclass
class SamplingSet:
    """Discrete point family over the affine group, tied to a grid."""

    family: GroupFamily
    xgrid: FrequencyGrid
    h_a: np.ndarray           # chart coordinates of the dilation nodes
    h_b: np.ndarray
    beta: float
    a_ratio: float
    b_step: float
    point_j: np.ndarray       # dilation index per sampling point
    x_index: np.ndarray       # (N, 2) snapped space-grid indices
    x_points: np.ndarray      # (N, 2) snapped space positions
    max_snap_offset: float
    meta: dict = dfield(default_factory=dict)

    def __len__(self):
        return len(self.point_j)

    @property
    def n_dilations(self) -> int:
        return len(self.h_a)

    def dilation_nodes(self) -> list[DilationParams]:
        return [DilationParams(self.family, float(a), float(b))
                for a, b in zip(self.h_a, self.h_b)]

    def hgrid(self) -> HGrid:
        """Unit-weight node grid for coefficient evaluation."""
        return HGrid(self.family, self.h_a, self.h_b,
                     np.ones_like(self.h_a))


def _dilation_mesh(family: GroupFamily, a_ratio: float, b_step: float,
                   scale_range: tuple[int, int], shear_max: float = 2.0):
    js = np.arange(scale_range[0], scale_range[1] + 1)
    scales = a_ratio ** js.astype(float)
    tag = family.tag
    if tag == "similitude":
        m = max(1, int(round(2.0 * math.pi / b_step)))
        theta = (2.0 * math.pi / m) * np.arange(m)
        A = scales[:, None] * np.cos(theta)[None, :]
        B = scales[:, None] * np.sin(theta)[None, :]
        return A.ravel(), B.ravel()
    if tag == "diagonal":
        # second coordinate multiplicative as well; b_step acts as log step
        bs = np.exp(b_step * js.astype(float))
        A, B = np.meshgrid(scales, bs, indexing="ij")
        return A.ravel(), B.ravel()
    if tag == "shearlet":
        m_max = max(1, int(math.ceil(shear_max / b_step)))
        ms = np.arange(-m_max, m_max + 1)
        A = np.repeat(scales, len(ms))
        B = (scales[:, None] * (b_step * ms)[None, :]).ravel()
        return A, B
    return scales, np.zeros_like(scales)


def build_sampling_set(family: GroupFamily, a_ratio: float, b_step: float,
                       beta: float, window: int, xgrid: FrequencyGrid,
                       scale_range: tuple[int, int] = (-2, 2),
                       shear_max: float = 2.0,
                       clip: bool = False) -> SamplingSet:
    """Assemble the point family ``(h_j (beta k), h_j)``.

    ``a_ratio`` is the multiplicative scale step, ``b_step`` the second
    chart step in the family's natural normalization (angle for the
    similitude chart, log step for the diagonal one, shear step scaled by
    the dilation for the shearlet one), ``beta`` the base lattice spacing
    and ``window`` the half width of the integer lattice window.  Points
    are snapped to the space grid; the largest snap offset is recorded.
    With ``clip=True``, lattice points falling outside the grid cell are
    dropped (useful to pave the whole cell); otherwise they raise.
    """
    if window < 0 or a_ratio <= 1.0 or b_step <= 0 or beta <= 0:
        raise ValueError("need a_ratio > 1, b_step > 0, beta > 0, "
                         "window >= 0")
    h_a, h_b = _dilation_mesh(family, a_ratio, b_step, scale_range,
                              shear_max)
    ks = np.arange(-window, window + 1)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    lattice = beta * np.stack([k1.ravel(), k2.ravel()], axis=1)

    dx = xgrid.space_spacing
    half = xgrid.n // 2
    all_j, all_idx, all_pts = [], [], []
    worst = 0.0
    for j, (a, b) in enumerate(zip(h_a, h_b)):
        m11, m12, m21, m22 = matrix_entries(family, a, b)
        x = np.stack([m11 * lattice[:, 0] + m12 * lattice[:, 1],
                      m21 * lattice[:, 0] + m22 * lattice[:, 1]], axis=1)
        idx = np.round(x / dx).astype(np.int64) + half
        inside = np.all((idx >= 0) & (idx < xgrid.n), axis=1)
        if not np.all(inside):
            if not clip:
                raise ValueError("sampling window leaves the space grid; "
                                 "shrink the window or pass clip=True")
            x, idx = x[inside], idx[inside]
        snapped = (idx - half) * dx
        worst = max(worst, float(np.max(np.hypot(*(x - snapped).T))))
        all_j.append(np.full(len(x), j))
        all_idx.append(idx)
        all_pts.append(snapped)
    return SamplingSet(
        family, xgrid, h_a, h_b, beta, a_ratio, b_step,
        np.concatenate(all_j), np.concatenate(all_idx),
        np.concatenate(all_pts), worst,
        meta={"window": window, "scale_range": list(scale_range),
              "clip": clip})


def _second_coordinate(family: GroupFamily, ua, ub):
    """Chart displacement of an element near the identity, as the pair
    (log scale, second coordinate) used by covering boxes."""
    tag = family.tag
    if tag == "similitude":
        return 0.5 * np.log(ua * ua + ub * ub), np.arctan2(ub, ua)
    if tag == "diagonal":
        return np.log(np.abs(ua)), np.log(np.abs(ub))
    if tag == "shearlet":
        return np.log(np.abs(ua)), ub
    return np.log(ua), np.zeros_like(ub)


def covering_report(Z: SamplingSet, n_probes: int = 2000,
                    seed: int = 0) -> dict:
    """Direct covering check over the region the set is meant to cover.

    Draws probe points in the interior of the covered region and, for
    each, finds the sampling point whose inverse translate lands closest
    to the identity; reports the componentwise maxima, i.e. the smallest
    product box for which the set is dense over the probed region.
    """
    rng = np.random.default_rng(seed)
    fam = Z.family
    la, lb = _second_coordinate(fam, Z.h_a, Z.h_b)
    la_rng = (la.min(), la.max())
    box = 0.35 * float(np.max(np.abs(Z.x_points))) + Z.beta
    need = np.zeros((n_probes, 3))
    log_ratio = math.log(Z.a_ratio)

    for p in range(n_probes):
        x = rng.uniform(-box, box, size=2)
        t = rng.uniform(la_rng[0] + 0.1, la_rng[1] - 0.1)
        if fam.tag == "similitude":
            th = rng.uniform(-math.pi, math.pi)
            ha, hb = math.exp(t) * math.cos(th), math.exp(t) * math.sin(th)
        elif fam.tag == "diagonal":
            t2 = rng.uniform(la_rng[0] + 0.1, la_rng[1] - 0.1)
            ha, hb = math.exp(t), math.exp(t2)
        elif fam.tag == "shearlet":
            ha, hb = math.exp(t), rng.uniform(-0.5, 0.5) * math.exp(t)
        else:
            ha, hb = math.exp(t), 0.0

        ia, ib = invert_ab(fam, Z.h_a, Z.h_b)
        ua, ub = compose_ab(fam, ia, ib, ha, hb)
        dla, dlb = _second_coordinate(fam, ua, ub)
        # local lattice misfit per node for this probe's x
        m11, m12, m21, m22 = matrix_entries(fam, ia, ib)
        xl1 = m11 * x[0] + m12 * x[1]
        xl2 = m21 * x[0] + m22 * x[1]
        r1 = xl1 - Z.beta * np.round(xl1 / Z.beta)
        r2 = xl2 - Z.beta * np.round(xl2 / Z.beta)
        xdist = np.hypot(r1, r2)
        cost = np.maximum.reduce([
            xdist / (Z.beta / 2.0),
            np.abs(dla) / (log_ratio / 2.0),
            np.abs(dlb) / (Z.b_step / 2.0)])
        i = int(np.argmin(cost))
        need[p] = (xdist[i], abs(dla[i]), abs(dlb[i]))

    worst = need.max(axis=0)
    return {
        "x_radius": float(worst[0] + Z.max_snap_offset),
        "log_a_half": float(worst[1]),
        "b_half": float(worst[2]),
        "n_probes": n_probes,
        "max_snap_offset": Z.max_snap_offset,
    }


# ---------------------------------------------------------------------------
# Oscillation norm
# ---------------------------------------------------------------------------

def _translated_wavelet(psi: SampledField, v: np.ndarray,
                        w_a: float, w_b: float) -> SampledField:
    """Field of the unitary affine action applied to a profiled wavelet."""
    if psi.profile is None:
        raise ValueError("oscillation evaluation needs a profiled wavelet")
    fam = psi.family
    m11, m12, m21, m22 = matrix_entries(fam, w_a, w_b)
    root_det = math.sqrt(abs(float(det_ab(fam, w_a, w_b))))
    prof = psi.profile

    def moved(x1, x2):
        ph = np.exp(-2j * np.pi * (v[0] * x1 + v[1] * x2))
        return root_det * ph * prof(m11 * x1 + m21 * x2,
                                    m12 * x1 + m22 * x2)

    return field_from_profile(psi.grid, moved, fam)


def u_box_samples(family: GroupFamily, box: UBox):
    """Sample points of the product neighborhood: x-ball center and axis
    points crossed with a 3x3 chart box mesh, minus the identity itself
    (which contributes zero oscillation)."""
    r = box.x_radius
    xs = [np.zeros(2)]
    if r > 0:
        xs += [np.array([r, 0.0]), np.array([-r, 0.0]),
               np.array([0.0, r]), np.array([0.0, -r])]
    hs = []
    for d1 in (-box.log_a_half, 0.0, box.log_a_half):
        for d2 in (-box.b_half, 0.0, box.b_half):
            if family.tag == "similitude":
                hs.append((d1, d2, math.exp(d1) * math.cos(d2),
                           math.exp(d1) * math.sin(d2)))
            elif family.tag == "diagonal":
                hs.append((d1, d2, math.exp(d1), math.exp(d2)))
            elif family.tag == "shearlet":
                hs.append((d1, d2, math.exp(d1), d2))
            else:
                hs.append((d1, 0.0, math.exp(d1), 0.0))
    hs = list(dict.fromkeys(hs))
    out = []
    for v in xs:
        for d1, d2, wa, wb in hs:
            if np.all(v == 0.0) and d1 == 0.0 and d2 == 0.0:
                continue
            out.append((v, wa, wb))
    return out


def oscillation_norm(psi: SampledField, box: UBox, wspec: WeightSpec,
                     p: float, q: float, hgrid: HGrid,
                     chunk: int = 128) -> float:
    """Weighted integral of the sampled oscillation of the self-transform.

    The supremum over the neighborhood is lower-bounded by a finite sample
    (center, ball axis points, chart box corners); callers compensate with
    a safety factor on the acceptance threshold.
    """
    samples = u_box_samples(psi.family, box)
    base = analyze(psi, psi, hgrid, chunk=chunk, exact=True)
    osc = np.zeros_like(base.values, dtype=float)
    for v, wa, wb in samples:
        shifted = analyze(psi, _translated_wavelet(psi, v, wa, wb),
                          hgrid, chunk=chunk, exact=True)
        np.maximum(osc, np.abs(base.values - shifted.values), out=osc)

    x1, x2 = psi.grid.space_mesh()
    cellx = psi.grid.space_spacing ** 2
    dets = np.abs(hgrid.dets())
    total = 0.0
    for start in range(0, len(hgrid), chunk):
        idx = np.arange(start, min(start + chunk, len(hgrid)))
        v2 = control_weight_symmetric_slices(wspec, p, q, x1, x2,
                                             hgrid.a[idx], hgrid.b[idx])
        contrib = np.sum(osc[idx] * v2, axis=(1, 2)) * cellx
        total += float(np.sum(hgrid.weight[idx] / dets[idx] * contrib))
    return total


def shrink_u_until(psi: SampledField, wspec: WeightSpec, p: float, q: float,
                   hgrid: HGrid, start: UBox, target: float = 0.5,
                   max_halvings: int = 12) -> tuple[UBox, float, list]:
    """Halve the neighborhood until the sampled oscillation norm falls
    below the target; returns the box, its value and the search trace."""
    box, history = start, []
    for _ in range(max_halvings + 1):
        val = oscillation_norm(psi, box, wspec, p, q, hgrid)
        history.append((box, val))
        if val < target:
            return box, val, history
        box = box.scaled(0.5)
    raise RuntimeError("oscillation norm did not reach the target; "
                       f"last value {history[-1][1]:.3g}")


# ---------------------------------------------------------------------------
# Discrete coefficient norm and frame operations
# ---------------------------------------------------------------------------

def discrete_norm(c: np.ndarray, Z: SamplingSet, p: float, q: float,
                  wspec: Optional[WeightSpec]) -> float:
    """Discrete weighted coefficient norm over the sampling set.

    Per dilation: a weighted p-norm of the coefficients against the
    weight at the sampling points times ``|det|^{1/p - 1/q}``; across
    dilations: a q-norm with density ``|det|^{q/p - 1}``.  Supremum
    conventions apply for infinite exponents.
    """
    c = np.asarray(c)
    if c.shape != (len(Z),):
        raise ValueError("coefficient array does not match the point count")
    ip = 0.0 if math.isinf(p) else 1.0 / p
    iq = 0.0 if math.isinf(q) else 1.0 / q
    inner_vals = np.zeros(Z.n_dilations)
    for j in range(Z.n_dilations):
        sel = Z.point_j == j
        h = DilationParams(Z.family, float(Z.h_a[j]), float(Z.h_b[j]))
        v = (weight_eval(wspec, Z.x_points[sel], h)
             if wspec is not None else 1.0)
        det = abs(float(det_ab(Z.family, Z.h_a[j], Z.h_b[j])))
        terms = np.abs(c[sel]) * v * det ** (ip - iq)
        inner_vals[j] = (np.max(terms) if math.isinf(p)
                         else float(np.sum(terms ** p)) ** ip)
    if math.isinf(q):
        return float(np.max(inner_vals))
    dets = np.abs(det_ab(Z.family, Z.h_a, Z.h_b))
    return float(np.sum(dets ** (q * ip - 1.0) * inner_vals ** q) ** iq)


def analyze_at(f: SampledField, psi: SampledField,
               Z: SamplingSet) -> np.ndarray:
    """Transform coefficients of ``f`` at the sampling points."""
    coeffs = np.empty(len(Z), dtype=complex)
    hg = Z.hgrid()
    exact = psi.profile is not None
    for idx, slab in iter_analyze(f, psi, hg, chunk=32, exact=exact):
        for pos, j in enumerate(idx):
            sel = Z.point_j == j
            coeffs[sel] = slab[pos][Z.x_index[sel, 0], Z.x_index[sel, 1]]
    return coeffs


def synthesize_from(c: np.ndarray, psi: SampledField,
                    Z: SamplingSet) -> SampledField:
    """Superpose translated-dilated atoms with the given coefficients.

    Snapped sampling positions sit on the space grid, so the phase sums
    collapse to one FFT per dilation node.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape != (len(Z),):
        raise ValueError("coefficient array does not match the point count")
    g = Z.xgrid
    exact = psi.profile is not None
    x1, x2 = g.mesh()
    out = np.zeros((g.n, g.n), dtype=complex)
    for j in range(Z.n_dilations):
        sel = Z.point_j == j
        if not np.any(sel):
            continue
        sparse = np.zeros((g.n, g.n), dtype=complex)
        np.add.at(sparse, (Z.x_index[sel, 0], Z.x_index[sel, 1]), c[sel])
        phases = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(sparse)))
        a, b = float(Z.h_a[j]), float(Z.h_b[j])
        m11, m12, m21, m22 = matrix_entries(Z.family, a, b)
        e1 = m11 * x1 + m21 * x2
        e2 = m12 * x1 + m22 * x2
        if exact:
            resampled = np.asarray(psi.profile(e1, e2), dtype=complex)
        else:
            from .fields import bilinear_sample_xy
            resampled = bilinear_sample_xy(psi, e1, e2)
        root_det = math.sqrt(abs(float(det_ab(Z.family, a, b))))
        out += root_det * resampled * phases
    return SampledField(g, out, "frequency", psi.family)


@dataclass
class FrameResult:
    reconstruction: SampledField
    rel_error: float
    iterations: int
    history: list
    lower_bound: float
    upper_bound: float
    converged: bool


def frame_reconstruct(f: SampledField, psi: SampledField, Z: SamplingSet,
                      max_iter: int = 200, tol: float = 1e-3,
                      band: Optional[np.ndarray] = None,
                      power_iters: int = 20, seed: int = 0) -> FrameResult:
    """Richardson iteration on the sampled frame operator.

    The operator is the composition of coefficient analysis and atom
    synthesis, projected to the test band when one is supplied; the
    relaxation parameter is ``2 / (A + B)`` with the extreme eigenvalue
    estimates obtained by (shifted) power iteration on that band.
    """
    g = f.grid
    proj = (lambda arr: arr * band) if band is not None else (lambda arr: arr)

    def S(values: np.ndarray) -> np.ndarray:
        field = SampledField(g, proj(values), "frequency", f.family)
        return proj(synthesize_from(analyze_at(field, psi, Z), psi, Z).values)

    rng = np.random.default_rng(seed)
    v = proj(rng.normal(size=(g.n, g.n)) + 1j * rng.normal(size=(g.n, g.n)))
    for _ in range(power_iters):
        v = S(v)
        v /= np.linalg.norm(v)
    upper = float(np.real(np.vdot(v, S(v))))

    w = proj(rng.normal(size=(g.n, g.n)) + 1j * rng.normal(size=(g.n, g.n)))
    for _ in range(power_iters):
        w = upper * w - S(w)
        w /= np.linalg.norm(w)
    lower = upper - float(np.real(np.vdot(w, upper * w - S(w))))

    lam = 2.0 / (lower + upper) if lower > 0 else 1.0 / upper
    target = proj(f.values)
    fnorm = np.linalg.norm(target)
    g_rhs = S(target)
    x = np.zeros_like(target)
    history = []
    it = 0
    rel = np.inf
    for it in range(1, max_iter + 1):
        x = x + lam * (g_rhs - S(x))
        rel = float(np.linalg.norm(x - target) / fnorm)
        history.append(rel)
        if rel < tol:
            break
    rec = SampledField(g, x, "frequency", f.family)
    return FrameResult(rec, rel, it, history, lower, upper, rel < tol)
