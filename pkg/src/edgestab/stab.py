"""Stability deciders: points, segments, parameter boxes, and whole families.

The decision layers build on each other:

* ``point_stable`` checks one polynomial by computing its roots.
* ``hurwitz_algebraic`` is an independent algebraic route (Routh array) used
  to cross-check the root-based path for the left half plane.
* ``segment_stable`` decides a one-parameter segment by scanning the region
  boundary for parameter crossings.
* ``box_stable`` decides a multi-affine parameter box by zero exclusion of
  its boundary value sets, with certified interval refinement.
* ``analyze_family`` / ``analyze_interval`` stream the edge configurations
  of a family through ``box_stable`` and aggregate.

Verdict dominance when aggregating: Unstable beats Degenerate beats
Inconclusive beats RobustlyStable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import least_squares

from . import hull
from .det import ParametricDeterminant, coefficient_box, det_parametric
from .edges import EdgeConfiguration, iter_configs, count_configs
from .errors import (
    DegreeDropError,
    RegionNotHurwitzError,
    ValidationFailure,
    ZeroPolynomialError,
)
from .family import EdgeSegment, MatrixFamily, validate
from .poly import Polynomial
from .region import Disk, HurwitzHalfPlane, Region, ShiftedHalfPlane, sweep_range_from_box

MAX_DRIVER_SIZE = 8

# Interval refinement beyond the base grid is triggered well before margins
# reach the inconclusive band, and capped by a global evaluation budget.
_REFINE_ROUND_CAP_FACTOR = 64


class Status(enum.Enum):
    ROBUSTLY_STABLE = "RobustlyStable"
    UNSTABLE = "Unstable"
    DEGENERATE = "Degenerate"
    INCONCLUSIVE = "Inconclusive"


_DOMINANCE = {
    Status.UNSTABLE: 3,
    Status.DEGENERATE: 2,
    Status.INCONCLUSIVE: 1,
    Status.ROBUSTLY_STABLE: 0,
}


def dominant(a: Status, b: Status) -> Status:
    return a if _DOMINANCE[a] >= _DOMINANCE[b] else b


@dataclass(frozen=True)
class Tolerances:
    """Numeric policy knobs shared by the deciders."""

    boundary_grid: int = 512
    refine_depth: int = 40
    box_depth: int = 12
    zero_margin: float = 1e-7
    degree_eps: float = 1e-9

    def __post_init__(self):
        if self.boundary_grid < 8:
            raise ValueError("boundary_grid must be at least 8")
        if self.refine_depth < 0 or self.box_depth < 0:
            raise ValueError("depths must be nonnegative")
        if not (self.zero_margin > 0.0 and self.degree_eps > 0.0):
            raise ValueError("margins must be positive")


@dataclass(frozen=True)
class Witness:
    """Where instability was found: configuration, parameters, offending root."""

    config_index: int | None = None
    lam: tuple[float, ...] | None = None
    root: complex | None = None
    theta: float | None = None


@dataclass(frozen=True)
class Verdict:
    status: Status
    margin: float | None = None
    witness: Witness | None = None
    reason: str = ""

    @property
    def is_stable(self) -> bool:
        return self.status is Status.ROBUSTLY_STABLE

    def describe(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "config_index": self.witness.config_index,
                "lambda": list(self.witness.lam) if self.witness.lam is not None else None,
                "root": [self.witness.root.real, self.witness.root.imag]
                if self.witness.root is not None
                else None,
                "theta": self.witness.theta,
            }
        return {
            "status": self.status.value,
            "margin": self.margin,
            "reason": self.reason,
            "witness": w,
        }


# ----------------------------------------------------------------------
# point tests


def point_stable(p: Polynomial, region: Region) -> Verdict:
    """Root-location test for a single polynomial.

    Stable iff every root lies strictly inside the region; the margin is the
    smallest signed boundary distance.  Nonzero constants are vacuously
    stable; the zero polynomial raises ``ZeroPolynomialError``.
    """
    roots = p.roots()
    if roots.size == 0:
        return Verdict(Status.ROBUSTLY_STABLE, margin=math.inf, reason="no roots")
    margins = np.asarray(region.margin(roots), dtype=float)
    worst = int(np.argmin(margins))
    m = float(margins[worst])
    if m > 0.0:
        return Verdict(Status.ROBUSTLY_STABLE, margin=m, reason="all roots inside")
    return Verdict(
        Status.UNSTABLE,
        margin=m,
        witness=Witness(root=complex(roots[worst])),
        reason="root on or outside the region boundary",
    )


def hurwitz_algebraic(p: Polynomial) -> bool:
    """Strict left-half-plane test by the Routh array, no root computation.

    Stable iff every first-column entry is positive after sign-normalizing
    the leading coefficient.  A vanishing pivot or an all-zero row signals
    boundary or unstable roots and maps to False.
    """
    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no stability character")
    deg = p.degree
    if deg == 0:
        return True
    c = p.coeffs[::-1].copy()  # descending
    if c[0] < 0.0:
        c = -c
    tiny = 1e-13 * float(np.max(np.abs(c)))
    row0 = c[0::2].copy()
    row1 = c[1::2].copy()
    if row1.size < row0.size:
        row1 = np.append(row1, 0.0)
    rows = [row0, row1]
    for _ in range(deg - 1):
        prev, cur = rows[-2], rows[-1]
        if np.all(np.abs(cur) <= tiny):
            return False  # symmetric root pattern, not strictly Hurwitz
        if abs(cur[0]) <= tiny:
            return False  # zero pivot: roots on or right of the axis
        nxt = np.empty(max(cur.size - 1, 1))
        for l in range(nxt.size):
            a = prev[l + 1] if l + 1 < prev.size else 0.0
            b = cur[l + 1] if l + 1 < cur.size else 0.0
            nxt[l] = (cur[0] * a - prev[0] * b) / cur[0]
        rows.append(nxt)
    first = np.array([r[0] for r in rows[: deg + 1]])
    return bool(np.all(first > tiny))


# ----------------------------------------------------------------------
# boundary sweep helpers


def _theta_grid(region: Region, lo: float, hi: float, count: int) -> np.ndarray:
    """Boundary sample parameters.

    Disks get a uniform closed circle.  Half planes mix a linear grid with a
    geometric one so that both the low-frequency structure and the Cauchy
    tail are resolved before refinement starts.
    """
    if hi <= lo:
        return np.array([lo])
    if isinstance(region, Disk):
        return np.linspace(lo, hi, count + 1)
    half = count // 2
    lin = np.linspace(lo, hi, half)
    geo = np.geomspace(max(hi * 1e-6, 1e-12), hi, count - half)
    return np.unique(np.concatenate([[lo], lin, geo]))


def _deriv_envelope(box: np.ndarray) -> np.ndarray:
    """Ascending coefficients of sum_l l*max|c_l|*R**(l-1)."""
    mags = np.max(np.abs(box), axis=1)
    if mags.size <= 1:
        return np.zeros(1)
    return mags[1:] * np.arange(1, mags.size)


def _lipschitz_bound(env: np.ndarray, radius, speed: float) -> np.ndarray:
    """Upper bound on |dD/dtheta| for boundary points with |s| <= radius."""
    return speed * np.polyval(env[::-1], np.asarray(radius, dtype=float))


def _abs_s_bound(region: Region, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """max |s(theta)| over [a, b] for each interval."""
    if isinstance(region, Disk):
        return np.full_like(np.asarray(a, dtype=float), abs(region.center) + region.radius)
    sigma = region.sigma if isinstance(region, ShiftedHalfPlane) else 0.0
    return np.hypot(sigma, np.maximum(np.abs(a), np.abs(b)))


class _SweepOutcome:
    __slots__ = ("kind", "min_rel_margin", "witness", "reason")

    def __init__(self, kind, min_rel_margin=math.inf, witness=None, reason=""):
        self.kind = kind  # "excluded" | "unstable" | "inconclusive"
        self.min_rel_margin = min_rel_margin
        self.witness = witness
        self.reason = reason


def _subset_transform(masks: np.ndarray, k: int) -> np.ndarray:
    """0/1 matrix T with T[v, r] = 1 iff masks[r] is a subset of vertex v."""
    verts = np.arange(1 << k)[:, None]
    return ((masks[None, :] & ~verts) == 0).astype(float)


def _corner_lambdas(k: int) -> np.ndarray:
    out = np.zeros((1 << k, k))
    for v in range(1 << k):
        for slot in range(k):
            if v >> slot & 1:
                out[v, slot] = 1.0
    return out


def _eval_terms(rows: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Evaluate all term polynomials at the boundary points: (terms, T)."""
    out = np.zeros((rows.shape[0], s.size), dtype=complex)
    for r in range(rows.shape[0]):
        out[r] = np.polyval(rows[r][::-1], s)
    return out


def _box_corner_values(term_vals: np.ndarray, masks: np.ndarray, lo: np.ndarray, hi: np.ndarray, k: int) -> np.ndarray:
    """Values of D at the corners of a sub-box of the lambda cube.

    ``term_vals`` is (terms,) complex at a single boundary point.  Corner c
    picks lo or hi per slot; each term contributes prod over its slots.
    """
    corners = 1 << k
    out = np.zeros(corners, dtype=complex)
    for c in range(corners):
        lam = np.where([(c >> slot) & 1 for slot in range(k)], hi, lo)
        w = np.ones(masks.size)
        for r, mask in enumerate(masks):
            prod = 1.0
            slot = 0
            m = int(mask)
            while m:
                if m & 1:
                    prod *= lam[slot]
                m >>= 1
                slot += 1
            w[r] = prod
        out[c] = np.dot(w, term_vals)
    return out


def _subdivide_at_theta(
    term_vals: np.ndarray,
    masks: np.ndarray,
    k: int,
    depth_cap: int,
) -> tuple[float, tuple[np.ndarray, np.ndarray] | None]:
    """Zero-exclusion distance at one boundary point by lambda-box subdivision.

    Returns (distance, leftover_box).  A positive distance certifies
    exclusion for the whole cube (minimum over leaf hull distances).  When a
    leaf at the depth cap still captures the origin, its bounds come back as
    ``leftover_box`` for witness search and the distance is 0.
    """
    stack = [(np.zeros(k), np.ones(k), 0)]
    dist = math.inf
    while stack:
        lo, hi, depth = stack.pop()
        vals = _box_corner_values(term_vals, masks, lo, hi, k)
        m = hull.origin_margin(vals)
        if m > 0.0:
            dist = min(dist, m)
            continue
        if depth >= depth_cap:
            return 0.0, (lo, hi)
        axis = int(np.argmax(hi - lo))
        mid = 0.5 * (lo[axis] + hi[axis])
        hi_left = hi.copy()
        hi_left[axis] = mid
        lo_right = lo.copy()
        lo_right[axis] = mid
        stack.append((lo_right, hi.copy(), depth + 1))
        stack.append((lo.copy(), hi_left, depth + 1))
    return dist, None


def _witness_window(tol: Tolerances, root: complex) -> float:
    """Acceptance slack for confirming a member root as a boundary crossing.

    Scales with zero_margin but is capped, so loosening the inconclusive
    band can never promote a clearly interior root to a confirmed crossing.
    """
    return min(100.0 * tol.zero_margin, 1e-4) * (1.0 + abs(root))


def _confirm_boundary_root(
    pd: ParametricDeterminant,
    region: Region,
    theta_lo: float,
    theta_hi: float,
    lam_box: tuple[np.ndarray, np.ndarray],
    tol: Tolerances,
) -> Witness | None:
    """Try to pin an actual member with a root on or outside the boundary.

    Solves Re D = Im D = 0 over (lambda, theta) inside the candidate box and
    accepts only if the resulting member's root margin is within tolerance of
    the boundary (or beyond it).
    """
    masks, rows = pd.coefficient_matrix()
    lo, hi = lam_box
    k = pd.k

    def residual(x):
        lam, theta = x[:k], x[k]
        s = region.boundary(theta)
        tv = np.array([np.polyval(rows[r][::-1], s) for r in range(rows.shape[0])])
        w = np.ones(masks.size)
        for r, mask in enumerate(masks):
            m = int(mask)
            slot = 0
            prod = 1.0
            while m:
                if m & 1:
                    prod *= lam[slot]
                m >>= 1
                slot += 1
            w[r] = prod
        val = np.dot(w, tv)
        return [val.real, val.imag]

    theta_span = max(theta_hi - theta_lo, 1e-12)
    x0 = np.concatenate([0.5 * (lo + hi), [0.5 * (theta_lo + theta_hi)]])
    bounds = (
        np.concatenate([lo, [theta_lo - 0.5 * theta_span]]),
        np.concatenate([hi, [theta_hi + 0.5 * theta_span]]),
    )
    try:
        sol = least_squares(residual, x0, bounds=bounds, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    except Exception:
        return None
    lam = tuple(float(v) for v in np.clip(sol.x[:k], 0.0, 1.0))
    member = pd.assemble(lam)
    if member.is_zero:
        return None
    roots = member.roots()
    if roots.size == 0:
        return None
    margins = np.asarray(region.margin(roots), dtype=float)
    worst = int(np.argmin(margins))
    root = complex(roots[worst])
    if margins[worst] <= _witness_window(tol, root):
        return Witness(lam=lam, root=root, theta=float(sol.x[k]))
    return None


def _zero_exclusion_sweep(
    pd: ParametricDeterminant,
    region: Region,
    lo: float,
    hi: float,
    tol: Tolerances,
) -> _SweepOutcome:
    """Certified zero-exclusion sweep of the region boundary.

    The value set of D(s(theta), lambda-box) at each sampled theta is boxed
    by the convex hull of its 2**k box-corner values.  An interval between
    neighboring samples is certified root-free when both endpoint exclusion
    distances exceed L * h / 2, where L bounds |dD/dtheta| via the
    coefficient box.  Uncertified intervals are split at their midpoints,
    breadth-first, so each round evaluates all new points in one vectorized
    pass.  Sample points whose hull captures the origin go through
    lambda-box subdivision and, if that fails, witness confirmation.
    """
    masks, rows = pd.coefficient_matrix()
    k = pd.k
    box = coefficient_box(pd)
    env = _deriv_envelope(box)
    speed = region.boundary_speed()
    transform = _subset_transform(masks, k)

    thetas = _theta_grid(region, lo, hi, tol.boundary_grid)
    budget = _REFINE_ROUND_CAP_FACTOR * tol.boundary_grid
    scale_floor = 1e-300

    def evaluate(ts: np.ndarray):
        s = region.boundary(ts)
        tv = _eval_terms(rows, s)  # (terms, T)
        corner_vals = transform @ tv  # (2**k, T)
        margins = hull.batch_origin_margin(corner_vals.T)
        scales = np.maximum(np.max(np.abs(corner_vals), axis=0), scale_floor)
        return margins, scales

    margins, scales = evaluate(thetas)
    resolved_dist = margins.copy()  # absolute lower bound on value-set distance
    min_rel = math.inf
    reason_parts: list[str] = []

    def handle_capture(idx: int) -> _SweepOutcome | None:
        """Subdivide the lambda box at a captured sample; may conclude the sweep."""
        nonlocal min_rel
        s = region.boundary(thetas[idx])
        tv = np.array([np.polyval(rows[r][::-1], s) for r in range(rows.shape[0])])
        dist, leftover = _subdivide_at_theta(tv, masks, k, tol.box_depth)
        if dist > 0.0:
            resolved_dist[idx] = dist
            return None
        span = thetas[-1] - thetas[0]
        t_lo = thetas[max(idx - 1, 0)]
        t_hi = thetas[min(idx + 1, thetas.size - 1)]
        if t_hi <= t_lo:
            t_lo, t_hi = thetas[idx] - 1e-6 * span, thetas[idx] + 1e-6 * span
        w = _confirm_boundary_root(pd, region, t_lo, t_hi, leftover, tol)
        if w is not None:
            return _SweepOutcome("unstable", witness=w)
        return _SweepOutcome(
            "inconclusive",
            min_rel_margin=0.0,
            reason=f"value set hull captures the origin near theta={thetas[idx]:.6g} "
            "and no boundary root could be confirmed",
        )

    def conclude(min_rel: float, reason: str, certified: bool = False) -> _SweepOutcome:
        """Below the trust band, hunt for an actual crossing before giving up.

        A transversal boundary crossing shows up as sampled hull distances
        that approach zero without a strict capture; confirming a member
        with a boundary root converts that to a sound Unstable verdict.
        Only a fully certified sweep may report exclusion.
        """
        if min_rel >= tol.zero_margin:
            if certified:
                return _SweepOutcome("excluded", min_rel_margin=min_rel)
            return _SweepOutcome("inconclusive", min_rel_margin=min_rel, reason=reason)
        rel = resolved_dist / scales
        idx = int(np.argmin(rel))
        t_lo = thetas[max(idx - 1, 0)]
        t_hi = thetas[min(idx + 1, thetas.size - 1)]
        if t_hi <= t_lo:
            t_lo, t_hi = thetas[idx] - 1e-6, thetas[idx] + 1e-6
        w = _confirm_boundary_root(
            pd, region, t_lo, t_hi, (np.zeros(k), np.ones(k)), tol
        )
        if w is not None:
            return _SweepOutcome("unstable", witness=w)
        return _SweepOutcome("inconclusive", min_rel_margin=min_rel, reason=reason)

    for idx in np.nonzero(margins <= 0.0)[0]:
        out = handle_capture(int(idx))
        if out is not None:
            return out

    for _ in range(tol.refine_depth):
        if thetas.size > budget:
            return conclude(
                float(np.min(resolved_dist / scales)),
                "boundary refinement budget exhausted",
            )
        a, b = thetas[:-1], thetas[1:]
        widths = b - a
        radii = _abs_s_bound(region, a, b)
        need = _lipschitz_bound(env, radii, speed) * widths * 0.5
        ok = (resolved_dist[:-1] > need) & (resolved_dist[1:] > need)
        live = widths > 1e-14 * max(hi - lo, 1.0)
        bad = np.nonzero(~ok & live)[0]
        if bad.size == 0:
            break
        mids = 0.5 * (a[bad] + b[bad])
        mid_margins, mid_scales = evaluate(mids)
        # weave the new samples into the sorted grid
        thetas = np.insert(thetas, bad + 1, mids)
        resolved_dist = np.insert(resolved_dist, bad + 1, mid_margins)
        scales = np.insert(scales, bad + 1, mid_scales)
        for pos in np.nonzero(resolved_dist <= 0.0)[0]:
            out = handle_capture(int(pos))
            if out is not None:
                return out
    else:
        rel = resolved_dist / scales
        return conclude(
            float(np.min(rel)),
            "interval certificates still open at the refinement depth cap",
        )

    rel = resolved_dist / scales
    min_rel = float(np.min(rel))
    return conclude(
        min_rel,
        f"minimal relative exclusion margin {min_rel:.3e} is below zero_margin",
        certified=True,
    )


# ----------------------------------------------------------------------
# segment decider


def segment_stable(seg: EdgeSegment, region: Region, tol: Tolerances | None = None) -> Verdict:
    """Robust stability of one polynomial segment.

    A member lam*p1 + (1-lam)*p0 has a root at the boundary point s iff
    lam = -p0(s) / (p1(s) - p0(s)) is real and in [0, 1].  The decision
    anchors at lam = 0 and scans the boundary for such crossings: sign
    changes of Im(lam(theta)) are bisected, and intervals whose value
    segment comes close to the origin are refined.  Degenerate segments
    reduce to the point test.
    """
    tol = tol or Tolerances()
    p0, p1 = seg.p0, seg.p1
    if p0 == p1:
        if p0.is_zero:
            return Verdict(Status.DEGENERATE, reason="segment collapses to the zero polynomial")
        return point_stable(p0, region)
    if p0.is_zero or p1.is_zero:
        return Verdict(Status.DEGENERATE, reason="segment endpoint is the zero polynomial")
    if p0.degree != p1.degree:
        return Verdict(Status.DEGENERATE, reason="endpoint degrees differ (degree drop)")
    scale = max(p0.coeff_scale, p1.coeff_scale)
    if min(abs(p0.leading), abs(p1.leading)) < tol.degree_eps * scale or p0.leading * p1.leading < 0.0:
        return Verdict(
            Status.DEGENERATE,
            reason="leading coefficient vanishes along the segment (degree drop)",
        )

    anchor = point_stable(p0, region)
    if anchor.status is Status.UNSTABLE:
        return Verdict(
            Status.UNSTABLE,
            margin=anchor.margin,
            witness=replace(anchor.witness, lam=(0.0,)),
            reason="segment start is unstable",
        )

    delta = p1 - p0
    pd = ParametricDeterminant(1, {0: p0, 1: delta})
    try:
        lo, hi = sweep_range_from_box(region, coefficient_box(pd))
    except DegreeDropError as exc:
        return Verdict(Status.DEGENERATE, reason=str(exc))

    thetas = _theta_grid(region, lo, hi, tol.boundary_grid)
    budget = _REFINE_ROUND_CAP_FACTOR * tol.boundary_grid

    def evaluate(ts):
        s = region.boundary(ts)
        v0 = np.atleast_1d(p0(s)).astype(complex)
        v1 = np.atleast_1d(p1(s)).astype(complex)
        return v0, v1

    v0, v1 = evaluate(thetas)
    coeff_env = scale * np.maximum(1.0, np.abs(region.boundary(thetas))) ** p0.degree

    common = (np.abs(v0) <= 1e-12 * coeff_env) & (np.abs(v1) <= 1e-12 * coeff_env)
    if np.any(common):
        idx = int(np.nonzero(common)[0][0])
        return Verdict(
            Status.DEGENERATE,
            reason=f"both endpoints vanish at the boundary point theta={thetas[idx]:.6g}",
        )

    def seg_rel_dist(a, b):
        vals = np.stack([a, b], axis=-1)
        return hull.batch_origin_margin(vals) / np.maximum(
            np.maximum(np.abs(a), np.abs(b)), 1e-300
        )

    def lam_of(a, b):
        d = b - a
        tiny = np.abs(d) <= 1e-300
        return np.where(tiny, np.inf, -a / np.where(tiny, 1.0, d))

    rel = seg_rel_dist(v0, v1)
    lam = lam_of(v0, v1)

    min_rel = float(np.min(rel))

    def crossing_at(theta_star: float) -> Verdict | None:
        s = complex(region.boundary(theta_star))
        a, b = complex(p0(s)), complex(p1(s))
        d = b - a
        if abs(d) == 0.0:
            return None
        lam_c = -a / d
        lam_tol = max(tol.zero_margin, 1e-9) * max(1.0, abs(lam_c))
        if abs(lam_c.imag) > lam_tol:
            return None
        lr = lam_c.real
        if lr < -tol.zero_margin or lr > 1.0 + tol.zero_margin:
            return None
        lam_use = min(max(lr, 0.0), 1.0)
        member = seg.at(lam_use)
        if member.is_zero:
            return None
        roots = member.roots()
        margins = np.asarray(region.margin(roots), dtype=float)
        worst = int(np.argmin(margins))
        root = complex(roots[worst])
        if margins[worst] <= _witness_window(tol, root):
            return Verdict(
                Status.UNSTABLE,
                margin=float(margins[worst]),
                witness=Witness(lam=(lam_use,), root=root, theta=float(theta_star)),
                reason="member with a boundary root found on the segment",
            )
        return None

    # bisect sign changes of Im(lambda) where the crossing parameter is near [0, 1]
    def refine_sign_change(t_a, t_b) -> Verdict | None:
        for _ in range(tol.refine_depth):
            t_m = 0.5 * (t_a + t_b)
            a0, b0 = evaluate(np.array([t_a]))
            am, bm = evaluate(np.array([t_m]))
            g_a = float(lam_of(a0, b0)[0].imag) if np.isfinite(lam_of(a0, b0)[0]) else 0.0
            g_m = float(lam_of(am, bm)[0].imag) if np.isfinite(lam_of(am, bm)[0]) else 0.0
            if g_a == 0.0:
                break
            if (g_a < 0.0) == (g_m < 0.0):
                t_a = t_m
            else:
                t_b = t_m
        return crossing_at(0.5 * (t_a + t_b))

    finite = np.isfinite(lam)
    g = np.where(finite, lam.imag, np.nan)
    re_near = np.where(finite, (lam.real > -0.25) & (lam.real < 1.25), False)

    sign_flip = np.zeros(thetas.size - 1, dtype=bool)
    valid = finite[:-1] & finite[1:]
    sign_flip[valid] = (g[:-1][valid] < 0.0) != (g[1:][valid] < 0.0)
    near = re_near[:-1] | re_near[1:]
    for idx in np.nonzero(sign_flip & near)[0]:
        out = refine_sign_change(float(thetas[idx]), float(thetas[idx + 1]))
        if out is not None:
            return out

    # refine intervals whose value segment dips toward the origin
    trigger = max(10.0 * tol.zero_margin, 1e-3)
    for _ in range(tol.refine_depth):
        if thetas.size > budget:
            break
        close = rel < trigger
        bad = np.nonzero(close[:-1] | close[1:])[0]
        span_floor = 1e-12 * max(hi - lo, 1.0)
        bad = bad[(thetas[bad + 1] - thetas[bad]) > span_floor]
        if bad.size == 0:
            break
        mids = 0.5 * (thetas[bad] + thetas[bad + 1])
        mv0, mv1 = evaluate(mids)
        mrel = seg_rel_dist(mv0, mv1)
        mlam = lam_of(mv0, mv1)
        for pos, t_m in enumerate(mids):
            lam_m = mlam[pos]
            if mrel[pos] < tol.zero_margin and np.isfinite(lam_m):
                out = crossing_at(float(t_m))
                if out is not None:
                    return out
        thetas = np.insert(thetas, bad + 1, mids)
        rel = np.insert(rel, bad + 1, mrel)
        lam = np.insert(lam, bad + 1, mlam)
        min_rel = min(min_rel, float(np.min(mrel)))

    min_rel = min(min_rel, float(np.min(rel)))
    if min_rel < tol.zero_margin:
        return Verdict(
            Status.INCONCLUSIVE,
            margin=min_rel,
            reason=f"value segment approaches the origin (relative margin {min_rel:.3e})",
        )
    return Verdict(Status.ROBUSTLY_STABLE, margin=min_rel, reason="no boundary crossing")


# ----------------------------------------------------------------------
# box decider


def box_stable(pd: ParametricDeterminant, region: Region, tol: Tolerances | None = None) -> Verdict:
    """Robust stability of a multi-affine determinant over the lambda box.

    Degree health comes first: a leading-coefficient interval touching zero
    is Degenerate.  The anchor member (lambda = 0) and all box corners are
    root-tested directly; instability there is exact.  The remaining
    obstruction is a boundary root strictly inside the box, ruled out by the
    certified zero-exclusion sweep.
    """
    tol = tol or Tolerances()
    if not pd.terms or all(p.is_zero for p in pd.terms.values()):
        return Verdict(Status.DEGENERATE, reason="determinant is identically zero")

    box = coefficient_box(pd)
    mags = np.max(np.abs(box), axis=1)
    cmax = float(np.max(mags))
    nz = np.nonzero(mags > 0.0)[0]
    d = int(nz[-1])
    blo, bhi = box[d]
    lead_min = 0.0 if blo <= 0.0 <= bhi else min(abs(blo), abs(bhi))
    if lead_min < tol.degree_eps * cmax:
        return Verdict(
            Status.DEGENERATE,
            margin=None,
            reason="leading-coefficient interval reaches zero (degree drop)",
        )
    if d == 0:
        return Verdict(
            Status.ROBUSTLY_STABLE,
            margin=math.inf,
            reason="constant nonzero determinant",
        )

    if pd.k == 0:
        return point_stable(pd.terms.get(0, Polynomial([0.0])), region)

    anchor = point_stable(pd.assemble(np.zeros(pd.k)), region)
    if anchor.status is Status.UNSTABLE:
        return Verdict(
            Status.UNSTABLE,
            margin=anchor.margin,
            witness=replace(anchor.witness, lam=tuple(0.0 for _ in range(pd.k))),
            reason="anchor member is unstable",
        )

    # exact corner pre-check
    corners = _corner_lambdas(pd.k)
    for v in range(corners.shape[0]):
        lam = corners[v]
        member = pd.assemble(lam)
        verdict = point_stable(member, region)
        if verdict.status is Status.UNSTABLE:
            root = verdict.witness.root
            if verdict.margin < -tol.zero_margin * (1.0 + abs(root)):
                return Verdict(
                    Status.UNSTABLE,
                    margin=verdict.margin,
                    witness=Witness(lam=tuple(float(x) for x in lam), root=root),
                    reason="box corner member is unstable",
                )

    try:
        lo, hi = sweep_range_from_box(region, box)
    except DegreeDropError as exc:  # unreachable given the check above, kept for safety
        return Verdict(Status.DEGENERATE, reason=str(exc))

    sweep = _zero_exclusion_sweep(pd, region, lo, hi, tol)
    if sweep.kind == "unstable":
        w = sweep.witness
        member = pd.assemble(np.asarray(w.lam))
        mroots = member.roots()
        mmargins = np.asarray(region.margin(mroots), dtype=float)
        return Verdict(
            Status.UNSTABLE,
            margin=float(np.min(mmargins)),
            witness=w,
            reason="member with a boundary root found inside the box",
        )
    if sweep.kind == "inconclusive":
        return Verdict(Status.INCONCLUSIVE, margin=sweep.min_rel_margin, reason=sweep.reason)
    margin = min(sweep.min_rel_margin, anchor.margin if anchor.margin is not None else math.inf)
    return Verdict(
        Status.ROBUSTLY_STABLE,
        margin=sweep.min_rel_margin,
        reason="boundary value sets exclude the origin",
    )


# ----------------------------------------------------------------------
# family drivers


@dataclass(frozen=True)
class ConfigOutcome:
    """Per-configuration record kept for reports."""

    index: int
    status: Status
    margin: float | None
    reason: str


_CHUNK = 64


def _check_chunk(args) -> list:
    fam, start, stop, tol, mode = args
    out = []
    for cfg in iter_configs(fam, start=start, stop=stop):
        pd = det_parametric(cfg)
        v = box_stable(pd, fam.region, tol)
        out.append((cfg.index, v))
        if v.status is Status.UNSTABLE:
            break
    return out


def _aggregate(results, total: int):
    worst = Status.ROBUSTLY_STABLE
    margin = math.inf
    witness = None
    reason = ""
    outcomes: list[ConfigOutcome] = []
    for index, v in results:
        outcomes.append(ConfigOutcome(index, v.status, v.margin, v.reason))
        if v.status is Status.UNSTABLE and worst is not Status.UNSTABLE:
            witness = replace(v.witness or Witness(), config_index=index)
            reason = f"configuration {index}: {v.reason}"
        elif v.status is not Status.ROBUSTLY_STABLE and _DOMINANCE[v.status] > _DOMINANCE[worst]:
            reason = f"configuration {index}: {v.reason}"
        worst = dominant(worst, v.status)
        if v.margin is not None:
            margin = min(margin, v.margin)
    if worst is Status.ROBUSTLY_STABLE:
        verdict = Verdict(
            Status.ROBUSTLY_STABLE,
            margin=margin if margin != math.inf else None,
            reason=f"all {total} configurations certified",
        )
    elif worst is Status.UNSTABLE:
        verdict = Verdict(Status.UNSTABLE, margin=margin, witness=witness, reason=reason)
    else:
        verdict = Verdict(worst, margin=margin if margin != math.inf else None, reason=reason)
    return verdict, outcomes


def _run_configs(fam: MatrixFamily, tol: Tolerances, jobs: int):
    total = count_configs(fam)
    if jobs <= 1:
        results = []
        for cfg in iter_configs(fam):
            pd = det_parametric(cfg)
            v = box_stable(pd, fam.region, tol)
            results.append((cfg.index, v))
            if v.status is Status.UNSTABLE:
                break
        return _aggregate(results, total)

    # fixed-size chunks in stream order: the report cannot depend on the worker count
    from concurrent.futures import ProcessPoolExecutor

    ranges = [(fam, s, min(s + _CHUNK, total), tol, fam.mode) for s in range(0, total, _CHUNK)]
    results = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for chunk in pool.map(_check_chunk, ranges):
            results.extend(chunk)
            if chunk and chunk[-1][1].status is Status.UNSTABLE:
                break
    return _aggregate(results, total)


def _precheck(fam: MatrixFamily, expected_mode: str):
    if fam.n > MAX_DRIVER_SIZE:
        raise ValidationFailure(f"driver supports n <= {MAX_DRIVER_SIZE}, got n = {fam.n}")
    if fam.mode != expected_mode:
        raise ValidationFailure(f"driver requires a {expected_mode} family, got {fam.mode}")
    problems = [d for d in validate(fam) if d.level == "error"]
    if problems:
        raise ValidationFailure("; ".join(d.message for d in problems))


def analyze_family_detailed(
    fam: MatrixFamily, tol: Tolerances | None = None, jobs: int = 1
) -> tuple[Verdict, list[ConfigOutcome]]:
    """Decide a polytope family and keep the per-configuration record."""
    tol = tol or Tolerances()
    _precheck(fam, "polytope")
    return _run_configs(fam, tol, jobs)


def analyze_family(fam: MatrixFamily, tol: Tolerances | None = None, jobs: int = 1) -> Verdict:
    """Robust D-stability of a polytope family via its edge configurations."""
    return analyze_family_detailed(fam, tol, jobs)[0]


def analyze_interval_detailed(
    fam: MatrixFamily, tol: Tolerances | None = None, jobs: int = 1
) -> tuple[Verdict, list[ConfigOutcome]]:
    """Decide an interval family (Kharitonov reduction, Hurwitz region only)."""
    tol = tol or Tolerances()
    if not isinstance(fam.region, HurwitzHalfPlane):
        raise RegionNotHurwitzError(
            "interval analysis is only valid for the open left half plane"
        )
    _precheck(fam, "interval")
    return _run_configs(fam, tol, jobs)


def analyze_interval(fam: MatrixFamily, tol: Tolerances | None = None, jobs: int = 1) -> Verdict:
    return analyze_interval_detailed(fam, tol, jobs)[0]
