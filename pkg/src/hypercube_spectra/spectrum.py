"""Exact Walsh-Hadamard spectra and influences.

All coefficients are kept as unnormalised integers: coeffs[S] is
sum_x f(x) X_S(x) = 2^n fhat(S), where the character index S is read as a
bit mask over coordinates (bit k-1 set means k in S).  For n <= 24 every
quantity in sight fits comfortably in int64: |coeffs| <= 2^n, squares sum
to exactly 4^n <= 2^48.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import BooleanFunction


def hadamard_inplace(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis, in place.

    The last axis length must be a power of two.  Works batched: any
    leading axes are carried along untouched.
    """
    size = values.shape[-1]
    flat = values.reshape(-1, size)
    h = 1
    while h < size:
        v = flat.reshape(flat.shape[0], -1, 2, h)
        even = v[:, :, 0, :] + v[:, :, 1, :]
        odd = v[:, :, 0, :] - v[:, :, 1, :]
        v[:, :, 0, :] = even
        v[:, :, 1, :] = odd
        h *= 2
    return values


def partial_hadamard_inplace(values: np.ndarray, bit_positions) -> np.ndarray:
    """Butterfly passes on the given 0-based bit positions only, in place.

    Transforming a subset V of the coordinates turns index i into a hybrid
    label: the V-bits of i select a character S subset V, the remaining bits
    still select the assignment to the untouched coordinates.  Entry i is
    then 2^|V| times the coefficient fhat_{restriction}(S).
    """
    size = values.shape[-1]
    flat = values.reshape(-1, size)
    for b in sorted(bit_positions):
        v = flat.reshape(flat.shape[0], -1, 2, 1 << b)
        even = v[:, :, 0, :] + v[:, :, 1, :]
        odd = v[:, :, 0, :] - v[:, :, 1, :]
        v[:, :, 0, :] = even
        v[:, :, 1, :] = odd
    return values


@dataclass(frozen=True)
class Spectrum:
    """Integer Walsh-Hadamard coefficients of one function."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.coeffs.shape != (1 << self.n,):
            raise ValueError("coefficient array has wrong length")
        self.coeffs.setflags(write=False)

    def squared(self) -> np.ndarray:
        return self.coeffs * self.coeffs

    def parseval_ok(self) -> bool:
        return int(self.squared().sum()) == 4**self.n

    def weight(self, mask: int) -> Fraction:
        """fhat(S)^2 as an exact rational."""
        return Fraction(int(self.coeffs[mask]) ** 2, 4**self.n)


def wht(f: BooleanFunction) -> Spectrum:
    """Exact integer spectrum of f."""
    return Spectrum(f.n, hadamard_inplace(f.values()))


@dataclass(frozen=True)
class InfluenceProfile:
    """Per-coordinate influences of one function, as exact rationals."""

    per_coord: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.per_coord)

    @property
    def total(self) -> Fraction:
        return sum(self.per_coord, Fraction(0))


def influences_combinatorial(f: BooleanFunction) -> InfluenceProfile:
    """I_k = P(f changes when coordinate k flips), counted on the table."""
    bits = f.bits()
    out = []
    for k in range(1, f.n + 1):
        v = bits.reshape(-1, 2, 1 << (k - 1))
        differing_pairs = int(np.count_nonzero(v[:, 0, :] != v[:, 1, :]))
        out.append(Fraction(differing_pairs, 1 << (f.n - 1)))
    return InfluenceProfile(tuple(out))


def influences_spectral(spectrum: Spectrum) -> InfluenceProfile:
    """I_k = sum over S containing k of fhat(S)^2, from integer coefficients."""
    squared = spectrum.squared()
    idx = np.arange(1 << spectrum.n, dtype=np.int64)
    out = []
    for k in range(1, spectrum.n + 1):
        num = int(squared[(idx >> (k - 1)) & 1 == 1].sum())
        out.append(Fraction(num, 4**spectrum.n))
    return InfluenceProfile(tuple(out))


def weighted_degree_sum(spectrum: Spectrum) -> int:
    """sum_S |S| coeffs[S]^2, which equals 4^n times the total influence."""
    sizes = np.bitwise_count(np.arange(1 << spectrum.n, dtype=np.int64))
    return int((sizes * spectrum.squared()).sum())
