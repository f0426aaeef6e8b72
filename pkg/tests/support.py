"""Shared helpers for the mixvol test suite.

Random SPD/ellipsoid factories keep condition numbers modest so Monte Carlo
variances stay small; the fixed SEEDS tuple is reused by every property test
that the suite promises to run under five independent seeds.
"""

import numpy as np

from mixvol import Ellipsoid, make_spd

SEEDS = (1, 2, 3, 4, 5)


def rng_for(seed):
    return np.random.default_rng(seed)


def random_spd_entries(rng, d, scale=1.0):
    """Well-conditioned random SPD entries: G G^T plus a ridge."""
    g = rng.normal(size=(d, d)) * scale
    return g @ g.T + (0.5 * d * scale * scale) * np.eye(d)


def random_spd(rng, d, scale=1.0):
    return make_spd(random_spd_entries(rng, d, scale))


def random_ellipsoid(rng, d, scale=1.0):
    return Ellipsoid(random_spd(rng, d, scale))


def random_symmetric(rng, d, scale=1.0):
    """Random symmetric (not necessarily definite) entries."""
    g = rng.normal(size=(d, d)) * scale
    return 0.5 * (g + g.T)


def random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def random_unit_vector(rng, d):
    v = rng.normal(size=d)
    return v / np.linalg.norm(v)


def fd_mixed_discriminant(mats, h=1e-3):
    """Mixed discriminant via central differences of the derivative definition.

    Tensor-product central differences of det(sum lambda_i A_i) at 0 pick out
    exactly the lambda_1...lambda_d coefficient (all-odd monomial), i.e.
    d! * D_d, so the step error vanishes and only round-off remains.
    """
    import itertools
    import math

    d = len(mats)
    total = 0.0
    for signs in itertools.product((-1.0, 1.0), repeat=d):
        m = sum(s * h * a for s, a in zip(signs, mats))
        total += np.prod(signs) * np.linalg.det(m)
    return total / (2.0 * h) ** d / math.factorial(d)


def quadratic_root_count_oracle(n, seed, lo=-5.0, hi=5.0):
    """Mean count of real roots of c0 + c1 t + c2 t^2 in [lo, hi), with the
    c_j independent standard normals.  Returns (mean, std_error)."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(n, 3))
    disc = c[:, 1] ** 2 - 4.0 * c[:, 2] * c[:, 0]
    counts = np.zeros(n)
    ok = disc > 0.0
    sq = np.sqrt(disc[ok])
    denom = 2.0 * c[ok, 2]
    r1 = (-c[ok, 1] - sq) / denom
    r2 = (-c[ok, 1] + sq) / denom
    counts[ok] = ((r1 >= lo) & (r1 < hi)).astype(float) + (
        (r2 >= lo) & (r2 < hi)
    ).astype(float)
    return float(counts.mean()), float(counts.std(ddof=1) / np.sqrt(n))
