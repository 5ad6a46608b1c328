"""Shared oracles: slow, definitional reimplementations used to pin the fast paths."""
from fractions import Fraction
from itertools import product

import numpy as np

from hypercube_spectra import BooleanFunction, from_sign_bits


def random_function(rng: np.random.Generator, n: int) -> BooleanFunction:
    bits = rng.integers(0, 2, size=1 << n).astype(np.uint8)
    return from_sign_bits(bits)


def brute_coeff(f: BooleanFunction, mask: int) -> int:
    """sum_x f(x) X_S(x) by direct enumeration."""
    total = 0
    for i in range(f.size):
        chi = -1 if bin(i & mask).count("1") % 2 else 1
        total += f.evaluate(i) * chi
    return total


def brute_spectrum(f: BooleanFunction) -> list[int]:
    return [brute_coeff(f, mask) for mask in range(f.size)]


def brute_restrict(f: BooleanFunction, free, assignment) -> BooleanFunction:
    free_sorted = sorted(free)
    values = []
    for sub in range(1 << len(free_sorted)):
        index = 0
        for j, coord in enumerate(free_sorted):
            if (sub >> j) & 1:
                index |= 1 << (coord - 1)
        for coord, val in assignment.items():
            if val == -1:
                index |= 1 << (coord - 1)
        values.append(f.evaluate(index))
    return BooleanFunction(len(free_sorted), sum(1 << i for i, v in enumerate(values) if v == -1))


def brute_moment(f: BooleanFunction, coords, eps: float) -> float:
    """Average restricted-spectrum power sum, restriction by restriction."""
    v = sorted(coords)
    if not v:
        return 1.0
    fixed = [c for c in range(1, f.n + 1) if c not in v]
    total = 0.0
    for choice in product((1, -1), repeat=len(fixed)):
        g = brute_restrict(f, v, dict(zip(fixed, choice)))
        for c in brute_spectrum(g):
            total += ((c / g.size) ** 2) ** (1.0 + eps)
    return total / (1 << len(fixed))


def brute_influence(f: BooleanFunction, k: int) -> Fraction:
    changed = sum(
        1 for i in range(f.size) if f.evaluate(i) != f.evaluate(i ^ (1 << (k - 1)))
    )
    return Fraction(changed, f.size)
