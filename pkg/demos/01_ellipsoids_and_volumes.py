"""
Ellipsoids, Gram determinants, and mixed volumes
================================================

A location-dispersion ellipsoid {x : x' Sigma^{-1} x <= 1} is the unit ball
of the norm induced by a covariance matrix Sigma.  Mixed volumes of such
ellipsoids are expectations of Gram determinants of Gaussian matrices, which
is what the estimators below sample.
"""

import math

import numpy as np

from mixvol import (
    Ellipsoid,
    SupportBody2D,
    ellipsoid_from_axes,
    make_spd,
    mixed_area_oracle,
    mixed_volume_full,
    mixed_volume_with_balls,
    support_function,
    transform_ellipsoid,
    unit_ball,
    unit_ball_volume,
)

# 1. Build ellipsoids three ways: from a covariance matrix, from semi-axes,
#    and as the unit ball.
sigma = make_spd([[2.0, 1.0], [1.0, 2.0]])
tilted = Ellipsoid(sigma)
ellipse = ellipsoid_from_axes([2.0, 1.0])   # axis-aligned, semi-axes 2 and 1
disk = unit_ball(2)
print("tilted ellipsoid dim:", tilted.dim)

# 2. The support function h_E(u) = sqrt(u' Sigma u) gives the signed distance
#    of the tangent plane with outer normal u.
u = np.array([1.0, 0.0])
print(f"h(ellipse, e1) = {support_function(ellipse, u):.3f}  (semi-axis 2)")
print(f"h(disk, e1)    = {support_function(disk, u):.3f}  (radius 1)")

# 3. Linear images: transform_ellipsoid(E, L) is the ellipsoid of L Z for
#    Z drawn with covariance Sigma, i.e. covariance L Sigma L'.
quarter_turn = np.array([[0.0, -1.0], [1.0, 0.0]])
rotated = transform_ellipsoid(ellipse, quarter_turn)
print(f"h(rotated ellipse, e1) = {support_function(rotated, u):.3f}  (now 1)")

# 4. The mixed volume V_2(K, L) of two disks of radius 1 is pi, and the
#    Monte Carlo estimate comes with a seeded, reproducible error bar.
est = mixed_volume_full([disk, disk], 200_000, seed=1)
print(f"V(B, B) = {est.mean:.4f} +- {est.std_error:.4f}  (pi = {math.pi:.4f})")
assert abs(est.mean - math.pi) < 4 * est.std_error

# 5. In the plane the same number has a deterministic oracle: polarize the
#    area of the Minkowski sum computed from support functions.
oracle = mixed_area_oracle(
    SupportBody2D.from_ellipsoid(ellipse), SupportBody2D.from_disk(1.0)
)
est = mixed_volume_full([ellipse, disk], 200_000, seed=2)
print(f"V(ellipse, disk): mc = {est.mean:.4f} +- {est.std_error:.4f}, "
      f"oracle = {oracle:.4f}")
assert abs(est.mean - oracle) < 4 * est.std_error

# 6. Filling every slot with unit balls recovers the ball volume kappa_d.
est = mixed_volume_with_balls([unit_ball(3)] * 3, 200_000, seed=3)
print(f"V(B, B, B) in R^3 = {est.mean:.4f} +- {est.std_error:.4f}  "
      f"(kappa_3 = {unit_ball_volume(3):.4f})")

# 7. Same seed, same bits: estimates are reproducible by construction.
again = mixed_volume_with_balls([unit_ball(3)] * 3, 200_000, seed=3)
assert again.mean == est.mean and again.std_error == est.std_error
print("reproducibility: second run with seed 3 is bit-identical")
