"""Origin-exclusion geometry for planar value sets.

A value set at a boundary point is known only through finitely many complex
samples whose convex hull encloses it.  The single question asked here is how
far the origin sits from that hull: a positive answer certifies zero
exclusion, a non-positive one does not.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

_ZERO_POINT_REL = 1e-14


def _pair_index_arrays(v: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(combinations(range(v), 2))
    if not pairs:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    ii, jj = zip(*pairs)
    return np.asarray(ii, dtype=int), np.asarray(jj, dtype=int)


def batch_origin_margin(values: np.ndarray) -> np.ndarray:
    """Signed distance from the origin to conv(values) along the last axis.

    ``values`` is a complex array of shape (..., V).  Positive results are the
    exact distance from 0 to the hull (the origin is excluded); non-positive
    results mean 0 lies in or on the hull, with magnitude only a cheap
    penetration indicator.

    The inside test is exact for nonzero points: 0 is outside the hull iff the
    point arguments leave an angular gap wider than pi.  When 0 is outside,
    the hull distance equals the minimum over all point pairs of the
    origin-to-segment distance, because every chord lies inside the hull and
    the boundary edges are among the pairs.
    """
    values = np.asarray(values, dtype=complex)
    absv = np.abs(values)
    v = values.shape[-1]
    if v == 1:
        return absv[..., 0].copy()

    scale = np.max(absv, axis=-1)
    zero_hit = np.min(absv, axis=-1) <= _ZERO_POINT_REL * np.maximum(scale, 1e-300)

    ang = np.sort(np.angle(values), axis=-1)
    gaps = np.diff(ang, axis=-1)
    wrap = 2.0 * np.pi - (ang[..., -1] - ang[..., 0])
    max_gap = np.maximum(np.max(gaps, axis=-1, initial=0.0), wrap)
    outside = (max_gap > np.pi) & ~zero_hit

    ii, jj = _pair_index_arrays(v)
    a = values[..., ii]
    d = values[..., jj] - a
    dd = (d.real**2 + d.imag**2)
    # projection parameter of the origin onto each chord, clamped to [0, 1]
    t = np.where(dd > 0.0, -(a.real * d.real + a.imag * d.imag) / np.where(dd > 0.0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t * d
    dmin = np.min(np.abs(proj), axis=-1)

    return np.where(zero_hit, 0.0, np.where(outside, dmin, -dmin))


def origin_margin(values) -> float:
    """Scalar form of :func:`batch_origin_margin` for a single point set."""
    return float(batch_origin_margin(np.asarray(values, dtype=complex).reshape(1, -1))[0])
