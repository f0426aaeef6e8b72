"""
Zero counts of random trigonometric and polynomial processes
============================================================

For a smooth stationary Gaussian process, the expected number of zeros per
unit length has a closed form in the spectral weights.  The same machinery
covers Kac's classical question: how many real roots does a random
polynomial have?  Both answers are checked here by direct simulation.
"""

import math

import numpy as np

from mixvol import (
    FieldSpec,
    KernelSpec,
    Region,
    RngStream,
    count_zeros_1d,
    expected_zero_measure,
    simulate_realization,
    zero_count_experiment_1d,
    zero_intensity,
)

# 1. A two-atom spectrum: X(t) = a1 cos t + b1 sin t + a3 cos 3t + b3 sin 3t
#    with independent standard coefficients.  Zeros occur at rate
#    sqrt(sum w omega^2 / sum w) / pi = sqrt(5)/pi per unit length.
rice = FieldSpec(1, (KernelSpec.trig([(1.0, [1.0]), (1.0, [3.0])]),))
intensity = zero_intensity(rice, np.zeros(1))
print(f"analytic intensity = {intensity.mean:.6f}  "
      f"(sqrt(5)/pi = {math.sqrt(5.0) / math.pi:.6f})")

# 2. One realization: draw coefficients from a named stream and certify
#    every sign change by bisection.
realization = simulate_realization(rice, RngStream(seed=0, stream_index=0))
window = Region([0.0], [100.0])
count = count_zeros_1d(realization, window, grid_n=2048)
print(f"zeros of realization 0 on [0, 100]: {count}")

# 3. Average over 2000 independent realizations: the empirical mean lands
#    on 100 sqrt(5)/pi with a shrinking error bar.
est = zero_count_experiment_1d(rice, window, 2000, seed=1)
target = 100.0 * math.sqrt(5.0) / math.pi
print(f"empirical mean = {est.mean:.3f} +- {est.std_error:.3f}  "
      f"(target {target:.3f})")
assert abs(est.mean - target) < 4 * est.std_error

# 4. Kac's quadratic: c0 + c1 t + c2 t^2 with standard normal coefficients
#    is the polynomial-kernel field with degrees 0, 1, 2.  Its expected
#    number of real roots in [-5, 5] comes from integrating the exact
#    non-stationary intensity.
kac = FieldSpec(1, (KernelSpec.polynomial([(1.0, 0), (1.0, 1), (1.0, 2)]),))
measure = expected_zero_measure(kac, Region([-5.0], [5.0]))
print(f"E #roots of a random quadratic in [-5, 5] = {measure.mean:.5f}")

# 5. Brute force agrees: solve 100000 random quadratics and count.
rng = np.random.default_rng(42)
coeffs = rng.standard_normal((100_000, 3))
hits = 0
for c0, c1, c2 in coeffs:
    roots = np.roots([c2, c1, c0])
    real = roots[np.abs(roots.imag) < 1e-12].real
    hits += int(np.count_nonzero((real >= -5.0) & (real < 5.0)))
print(f"simulated mean root count = {hits / 100_000:.5f}")
