"""Shared sampling helpers for the test suite."""

from __future__ import annotations

import numpy as np

from polyhardy import BlaschkeProduct, Inner, make_scenario


def random_blaschke(rng, max_degree=3, max_modulus=0.6, min_degree=1) -> BlaschkeProduct:
    degree = int(rng.integers(min_degree, max_degree + 1))
    radii = max_modulus * np.sqrt(rng.uniform(0.0, 1.0, degree))
    angles = rng.uniform(0.0, 2.0 * np.pi, degree)
    zeros = radii * np.exp(1j * angles)
    constant = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    return BlaschkeProduct(zeros, complex(constant))


def random_inner_scenario(rng, n, degrees, max_degree=3, max_modulus=0.6):
    factors = [Inner(random_blaschke(rng, max_degree, max_modulus)) for _ in range(n)]
    return make_scenario(factors, degrees)


def random_complex_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
