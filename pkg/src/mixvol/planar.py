"""Planar convex bodies through their support functions.

A convex body K in the plane is represented by its support function
h(theta) = sup_{x in K} <x, (cos theta, sin theta)> together with the
derivative h'(theta).  Area follows from the Cauchy formula

    Area(K) = (1/2) integral_0^{2 pi} (h^2 - h'^2) d theta,

evaluated with the periodic trapezoid rule, which is spectrally accurate
for smooth bodies.  Support functions add under Minkowski sums, so mixed
areas come out of the polarization

    V(K, L) = (Area(K + L) - Area(K) - Area(L)) / 2

and, as a cross-check, out of a least-squares fit of the Minkowski
quadratic Area(s K + t L) = c20 s^2 + c11 s t + c02 t^2 with c11 = 2 V(K, L).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, IllConditionedFit, NonConvexBody, OutOfRange
from .geometry import Ellipsoid

# Condition ceiling for the Minkowski quadratic fit; the default scale grid
# stays far below it, so tripping this means a degenerate caller-supplied grid.
MAX_FIT_CONDITION = 1e12

# Convexity slack for the grid test of h + h'' >= 0: second differences of a
# spectrally sampled support function carry O(delta^2) noise, not exact zeros.
CONVEXITY_SLACK = 1e-8


@dataclass(frozen=True)
class SupportBody2D:
    """Planar convex body given by vectorized h(theta) and h'(theta)."""

    h: Callable[[np.ndarray], np.ndarray]
    h_prime: Callable[[np.ndarray], np.ndarray]

    @staticmethod
    def from_ellipsoid(e: Ellipsoid) -> "SupportBody2D":
        """Centered ellipse with representing matrix sigma.

        h(theta) = sqrt(u' sigma u) for u = (cos theta, sin theta), and
        h'(theta) = (du/dtheta)' sigma u / h(theta).
        """
        if e.dim != 2:
            raise DimensionMismatch(f"planar oracle needs dimension 2, got {e.dim}")
        s = e.sigma.entries

        def h(theta: np.ndarray) -> np.ndarray:
            theta = np.asarray(theta, dtype=float)
            c, sn = np.cos(theta), np.sin(theta)
            q = s[0, 0] * c * c + 2.0 * s[0, 1] * c * sn + s[1, 1] * sn * sn
            return np.sqrt(q)

        def h_prime(theta: np.ndarray) -> np.ndarray:
            theta = np.asarray(theta, dtype=float)
            c, sn = np.cos(theta), np.sin(theta)
            # d/dtheta of u' sigma u, halved: (u_theta)' sigma u
            num = (s[1, 1] - s[0, 0]) * c * sn + s[0, 1] * (c * c - sn * sn)
            return num / h(theta)

        return SupportBody2D(h=h, h_prime=h_prime)

    @staticmethod
    def from_disk(radius: float = 1.0) -> "SupportBody2D":
        if radius <= 0.0:
            raise OutOfRange(f"disk radius must be positive, got {radius}")
        r = float(radius)
        return SupportBody2D(
            h=lambda theta: np.full_like(np.asarray(theta, dtype=float), r),
            h_prime=lambda theta: np.zeros_like(np.asarray(theta, dtype=float)),
        )

    def add(self, other: "SupportBody2D") -> "SupportBody2D":
        """Minkowski sum: support functions add pointwise."""
        return SupportBody2D(
            h=lambda theta: self.h(theta) + other.h(theta),
            h_prime=lambda theta: self.h_prime(theta) + other.h_prime(theta),
        )

    def scale(self, c: float) -> "SupportBody2D":
        if c < 0.0:
            raise OutOfRange(f"scale factor must be nonnegative, got {c}")
        return SupportBody2D(
            h=lambda theta: c * self.h(theta),
            h_prime=lambda theta: c * self.h_prime(theta),
        )

    def __add__(self, other: "SupportBody2D") -> "SupportBody2D":
        return self.add(other)

    def __mul__(self, c: float) -> "SupportBody2D":
        return self.scale(c)

    __rmul__ = __mul__


def _grid(n_theta: int) -> tuple[np.ndarray, float]:
    if n_theta < 64 or n_theta % 2:
        raise OutOfRange(
            f"angular grid needs an even node count >= 64, got {n_theta}"
        )
    delta = 2.0 * np.pi / n_theta
    return np.arange(n_theta) * delta, delta


def area_from_support(body: SupportBody2D, n_theta: int = 512) -> float:
    """Cauchy area integral on a uniform angular grid.

    Rejects with NonConvexBody when the curvature test h + h'' >= 0 fails on
    the grid (h'' by periodic central differences of h').
    """
    theta, delta = _grid(n_theta)
    h = np.asarray(body.h(theta), dtype=float)
    hp = np.asarray(body.h_prime(theta), dtype=float)
    h_pp = (np.roll(hp, -1) - np.roll(hp, 1)) / (2.0 * delta)
    scale = max(1.0, float(np.max(np.abs(h))))
    defect = h + h_pp
    if np.any(defect < -CONVEXITY_SLACK * scale):
        raise NonConvexBody(
            f"support function violates h + h'' >= 0 (min {float(np.min(defect)):.3e})"
        )
    # periodic integrand: trapezoid == left rule, spectral for smooth h
    return 0.5 * float(np.sum(h * h - hp * hp)) * delta


def mixed_area_oracle(k: SupportBody2D, l: SupportBody2D, n_theta: int = 512) -> float:
    """V(K, L) by polarizing the area of the Minkowski sum."""
    total = area_from_support(k.add(l), n_theta)
    return 0.5 * (total - area_from_support(k, n_theta) - area_from_support(l, n_theta))


@dataclass(frozen=True)
class MinkowskiFit:
    """Least-squares coefficients of Area(s K + t L) = c20 s^2 + c11 s t + c02 t^2."""

    c20: float
    c11: float
    c02: float
    max_residual: float

    @property
    def mixed_area(self) -> float:
        return 0.5 * self.c11

    @property
    def area_first(self) -> float:
        return self.c20

    @property
    def area_second(self) -> float:
        return self.c02


# Default (s, t) scale pairs for the quadratic fit: a 3 x 3 product grid,
# well separated so the Vandermonde-like design stays mildly conditioned.
DEFAULT_SCALES = tuple((s, t) for s in (0.5, 1.0, 1.5) for t in (0.5, 1.0, 1.5))


def minkowski_poly_check(
    k: SupportBody2D,
    l: SupportBody2D,
    scales: Sequence[tuple[float, float]] = DEFAULT_SCALES,
    n_theta: int = 512,
) -> MinkowskiFit:
    """Fit the Minkowski quadratic over a grid of scale pairs.

    The fitted c11 / 2 must agree with mixed_area_oracle; a disagreement
    flags a broken support function.  Raises IllConditionedFit when the
    design matrix condition exceeds 1e12.
    """
    pairs = [(float(s), float(t)) for s, t in scales]
    if len(pairs) < 3:
        raise OutOfRange(f"need at least 3 scale pairs, got {len(pairs)}")
    design = np.array([[s * s, s * t, t * t] for s, t in pairs])
    cond = float(np.linalg.cond(design))
    if cond > MAX_FIT_CONDITION:
        raise IllConditionedFit(f"scale grid condition {cond:.3e} exceeds 1e12")
    areas = np.array(
        [area_from_support(k.scale(s).add(l.scale(t)), n_theta) for s, t in pairs]
    )
    coef, *_ = np.linalg.lstsq(design, areas, rcond=None)
    resid = float(np.max(np.abs(design @ coef - areas)))
    return MinkowskiFit(
        c20=float(coef[0]), c11=float(coef[1]), c02=float(coef[2]), max_residual=resid
    )
