"""
Intrinsic volumes, mean width, and Sudakov's estimate
=====================================================

Intrinsic volumes V_k(K) normalize the mixed volumes with ball slots so that
they no longer depend on the ambient dimension.  V_1 carries the metric
information: it is proportional to the mean width and to the Gaussian mean
E sup over the body, which is the quantity in Sudakov's minoration.
"""

import math

import numpy as np

from mixvol import (
    PointCloud,
    ellipsoid_from_axes,
    expected_norm,
    intrinsic_volume,
    mean_width,
    sudakov_width,
    unit_ball,
)

N = 200_000

# 1. For the unit disk: V_1 = pi (half the perimeter), V_2 = pi (the area).
disk = unit_ball(2)
v1 = intrinsic_volume(disk, 1, N, seed=1)
v2 = intrinsic_volume(disk, 2, N, seed=2)
print(f"disk: V_1 = {v1.mean:.4f} +- {v1.std_error:.4f}  (pi)")
print(f"      V_2 = {v2.mean:.4f} +- {v2.std_error:.4f}  (pi)")

# 2. V_1 of a flat ellipsoid barely moves when a tiny third axis is added:
#    intrinsic volumes are intrinsic to the body, not to the ambient space.
flat = ellipsoid_from_axes([2.0, 1.0])
lifted = ellipsoid_from_axes([2.0, 1.0, 1e-4])
a = intrinsic_volume(flat, 1, N, seed=3)
b = intrinsic_volume(lifted, 1, N, seed=3)
print(f"V_1 in R^2 = {a.mean:.4f}, after embedding in R^3 = {b.mean:.4f}")

# 3. Mean width: the average distance between parallel supporting planes.
#    For the unit ball it is 2 in every dimension.
for d in (2, 3, 4):
    w = mean_width(unit_ball(d), N, seed=d)
    print(f"mean width of B in R^{d} = {w.mean:.4f} +- {w.std_error:.4f}")

# 4. Expected norm of a Gaussian vector, measured two ways: directly, and
#    as V_1 / sqrt(2 pi).  For standard Z in R^3 both give the chi(3) mean
#    2 sqrt(2/pi).
e = expected_norm(unit_ball(3), N, seed=7)
print(f"E||Z||, Z standard in R^3: direct = {e.direct.mean:.4f}, "
      f"via V_1 = {e.via_intrinsic.mean:.4f}  "
      f"(2 sqrt(2/pi) = {2.0 * math.sqrt(2.0 / math.pi):.4f})")

# 5. Sudakov width of a finite set: E max_i <x_i, Z>.  Two opposite points
#    at distance 2 give E|Z_1| = sqrt(2/pi).
segment = PointCloud([[-1.0, 0.0], [1.0, 0.0]])
s = sudakov_width(segment, N, seed=8)
print(f"segment: E sup = {s.gaussian_mean.mean:.4f}  "
      f"(sqrt(2/pi) = {math.sqrt(2.0 / math.pi):.4f})")
print(f"         implied V_1 = {s.implied_v1.mean:.4f}  (segment length 2)")

# 6. A dense sample of the unit circle reproduces the disk value
#    E sup = V_1 / sqrt(2 pi) = sqrt(pi/2).
angles = 2.0 * np.pi * np.arange(1024) / 1024
circle = PointCloud(np.stack([np.cos(angles), np.sin(angles)], axis=1))
c = sudakov_width(circle, N, seed=9)
print(f"circle (1024 pts): E sup = {c.gaussian_mean.mean:.4f}  "
      f"(sqrt(pi/2) = {math.sqrt(math.pi / 2.0):.4f})")
assert abs(c.gaussian_mean.mean - math.sqrt(math.pi / 2.0)) < 0.01
