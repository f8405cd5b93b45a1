"""Dense univariate real polynomials on an ascending coefficient basis."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ZeroLeadingCoefficientError, ZeroPolynomialError

# Relative floor below which trailing coefficients are considered spurious.
TRUNCATION_REL_TOL = 1e-12

# Target residual for computed roots, relative to the coefficient scale at the root.
ROOT_RESIDUAL_TOL = 1e-9


class Polynomial:
    """Immutable real polynomial; ``coeffs[i]`` multiplies ``s**i``.

    Construction normalizes the representation: trailing coefficients whose
    magnitude is at most ``TRUNCATION_REL_TOL`` times the largest coefficient
    magnitude are dropped, and ``truncated`` records whether any dropped
    coefficient was actually nonzero.  The zero polynomial is stored as the
    single coefficient ``0.0``.
    """

    __slots__ = ("coeffs", "truncated")

    def __init__(self, coeffs: Sequence[float] | np.ndarray):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if arr.ndim != 1:
            raise ValueError("coefficients must form a one-dimensional sequence")
        if arr.size == 0:
            raise ValueError("coefficient sequence must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        truncated = False
        scale = float(np.max(np.abs(arr)))
        if scale == 0.0:
            arr = np.zeros(1)
        else:
            keep = arr.size
            floor = TRUNCATION_REL_TOL * scale
            while keep > 1 and abs(arr[keep - 1]) <= floor:
                if arr[keep - 1] != 0.0:
                    truncated = True
                keep -= 1
            arr = arr[:keep].copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "truncated", truncated)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __reduce__(self):
        # immutability blocks the default slot-state restore; rebuild instead
        return (_rebuild, (self.coeffs, self.truncated))

    # ------------------------------------------------------------------
    # basic structure

    @property
    def degree(self) -> int:
        """Degree of the normalized representation; the zero polynomial reports 0."""
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    @property
    def leading(self) -> float:
        """Coefficient of the highest retained power."""
        return float(self.coeffs[-1])

    @property
    def coeff_scale(self) -> float:
        """Largest coefficient magnitude."""
        return float(np.max(np.abs(self.coeffs)))

    def as_list(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    # ------------------------------------------------------------------
    # ring operations

    def _padded_pair(self, other: "Polynomial") -> tuple[np.ndarray, np.ndarray]:
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return a, b

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._padded_pair(other)
        return Polynomial(a + b)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._padded_pair(other)
        return Polynomial(a - b)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial(self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c: float) -> "Polynomial":
        return Polynomial(self.coeffs * float(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def isclose(self, other: "Polynomial", rtol: float = 1e-10, atol: float = 1e-12) -> bool:
        a, b = self._padded_pair(other)
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    # ------------------------------------------------------------------
    # evaluation and calculus

    def __call__(self, z):
        """Evaluate by Horner's scheme; accepts scalars or numpy arrays."""
        return np.polyval(self.coeffs[::-1], z)

    def derivative(self) -> "Polynomial":
        if self.coeffs.size == 1:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    # ------------------------------------------------------------------
    # roots

    def roots(self) -> np.ndarray:
        """All complex roots, via the companion-matrix eigenproblem.

        Each eigenvalue gets up to two Newton refinement steps, kept only when
        the residual |p(r)| improves.  The zero polynomial has no meaningful
        root set and raises; a nonzero constant returns an empty array.
        """
        if self.is_zero:
            raise ZeroPolynomialError("the zero polynomial has no root set")
        if self.degree == 0:
            return np.empty(0, dtype=complex)
        r = np.atleast_1d(np.roots(self.coeffs[::-1])).astype(complex)
        dp = self.derivative()
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(2):
                pv = np.atleast_1d(self(r))
                dv = np.atleast_1d(dp(r))
                safe = (np.abs(dv) > 0.0) & np.isfinite(pv) & np.isfinite(dv)
                step = np.zeros_like(r)
                step[safe] = pv[safe] / dv[safe]
                # a polish step is microscopic; a large one means the value is
                # noise-dominated (e.g. near-multiple roots) and following it
                # can jump into a different root's basin
                step[np.abs(step) > 1e-3 * (1.0 + np.abs(r))] = 0.0
                cand = r - step
                better = np.abs(np.atleast_1d(self(cand))) < np.abs(pv)
                r = np.where(better, cand, r)
        return r

    def cauchy_root_bound(self) -> float:
        """1 + max(|c_i|)/|c_deg| over the non-leading coefficients.

        Every root has modulus at most this bound.
        """
        if self.is_zero:
            raise ZeroLeadingCoefficientError(
                "root bound undefined for the zero polynomial"
            )
        if self.degree == 0:
            return 1.0
        return 1.0 + float(np.max(np.abs(self.coeffs[:-1]))) / abs(self.leading)

    # ------------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Polynomial({self.as_list()})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            if i == 0:
                parts.append(f"{c:g}")
            elif i == 1:
                parts.append(f"{c:g}*s")
            else:
                parts.append(f"{c:g}*s^{i}")
        return " + ".join(parts).replace("+ -", "- ")


def from_roots(roots: Iterable[complex], leading: float = 1.0) -> Polynomial:
    """Real polynomial with the given roots; complex roots must come in conjugate pairs."""
    coeffs = np.atleast_1d(np.polynomial.polynomial.polyfromroots(list(roots)))
    if np.max(np.abs(coeffs.imag)) > 1e-9 * max(1.0, np.max(np.abs(coeffs))):
        raise ValueError("roots do not describe a real polynomial")
    return Polynomial(coeffs.real * float(leading))


def _rebuild(coeffs: np.ndarray, truncated: bool) -> Polynomial:
    p = Polynomial(coeffs)
    object.__setattr__(p, "truncated", truncated)
    return p
