"""Truth tables of functions f:{-1,+1}^n -> {-1,+1} and named families.

Bit conventions, fixed across the package:

* Coordinates are labelled 1..n.  Input index i in [0, 2^n) encodes the
  point x with x_k = +1 when bit (k-1) of i is 0 and x_k = -1 when that
  bit is 1.
* The truth table is a 2^n-bit integer; bit i is 1 iff f = -1 at the
  point encoded by i.
* The text form is lowercase hex with ceil(2^n / 4) digits, little-endian
  by input index: bit i of the table is bit (i mod 4) of hex digit
  (i div 4).  The dimension n is not recoverable from the digits and
  travels separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_N = 24

_FAMILY_NAMES = (
    "parity",
    "and",
    "dictator",
    "majority",
    "minblock",
    "tribes",
    "first-even-group",
)


def _check_dim(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError("dimension n must be an int")
    if not 1 <= n <= MAX_N:
        raise ValueError(f"dimension n must be in [1, {MAX_N}], got {n}")


@dataclass(frozen=True)
class BooleanFunction:
    """A function {-1,+1}^n -> {-1,+1} stored as a packed truth table."""

    n: int
    table: int

    def __post_init__(self) -> None:
        _check_dim(self.n)
        if not isinstance(self.table, int) or isinstance(self.table, bool):
            raise ValueError("truth table must be an int")
        if not 0 <= self.table < (1 << (1 << self.n)):
            raise ValueError(f"truth table out of range for n={self.n}")

    @property
    def size(self) -> int:
        return 1 << self.n

    def evaluate(self, index: int) -> int:
        """Value of f at the point encoded by the given input index."""
        if not 0 <= index < self.size:
            raise ValueError(f"input index out of range for n={self.n}")
        return 1 - 2 * ((self.table >> index) & 1)

    def bits(self) -> np.ndarray:
        """Truth table as a uint8 array of 0/1 sign bits (1 means f = -1)."""
        raw = self.table.to_bytes((self.size + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, np.uint8), bitorder="little")[: self.size]

    def values(self) -> np.ndarray:
        """Truth table as an int64 array of +-1 values, indexed by input index."""
        return 1 - 2 * self.bits().astype(np.int64)

    def is_constant(self) -> bool:
        return self.table == 0 or self.table == (1 << self.size) - 1

    def flip(self, k: int) -> BooleanFunction:
        """g(x) = f(x with coordinate k negated)."""
        if not 1 <= k <= self.n:
            raise ValueError(f"coordinate {k} out of range for n={self.n}")
        idx = np.arange(self.size, dtype=np.int64) ^ (1 << (k - 1))
        return from_sign_bits(self.bits()[idx])

    def negate(self) -> BooleanFunction:
        """-f."""
        return BooleanFunction(self.n, self.table ^ ((1 << self.size) - 1))

    def permute(self, perm: Sequence[int]) -> BooleanFunction:
        """Relabel coordinates: new coordinate j reads old coordinate perm[j-1]."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"perm must be a permutation of 1..{self.n}")
        idx = np.arange(self.size, dtype=np.int64)
        orig = np.zeros(self.size, dtype=np.int64)
        for j, old in enumerate(perm):
            orig |= ((idx >> j) & 1) << (old - 1)
        return from_sign_bits(self.bits()[orig])

    def restrict(self, free: Iterable[int], assignment: Mapping[int, int]) -> BooleanFunction:
        """Fix the coordinates outside `free` to the +-1 values in `assignment`.

        The result is a function of the |free| surviving coordinates,
        relabelled 1..|free| in increasing order of their old labels.
        """
        free_sorted = sorted(set(free))
        if not free_sorted:
            raise ValueError("free coordinate set must be non-empty")
        if free_sorted[0] < 1 or free_sorted[-1] > self.n:
            raise ValueError(f"free coordinates must lie in 1..{self.n}")
        fixed = set(range(1, self.n + 1)) - set(free_sorted)
        if set(assignment) != fixed:
            raise ValueError("assignment must cover exactly the non-free coordinates")
        base = 0
        for coord, val in assignment.items():
            if val not in (-1, 1):
                raise ValueError("assignment values must be +-1")
            if val == -1:
                base |= 1 << (coord - 1)
        m = len(free_sorted)
        sub = np.arange(1 << m, dtype=np.int64)
        orig = np.full(1 << m, base, dtype=np.int64)
        for j, coord in enumerate(free_sorted):
            orig |= ((sub >> j) & 1) << (coord - 1)
        return from_sign_bits(self.bits()[orig])

    def to_hex(self) -> str:
        width = (self.size + 3) // 4
        return format(self.table, f"0{width}x")[::-1]  # digit 0 first

    @classmethod
    def from_hex(cls, n: int, text: str) -> BooleanFunction:
        _check_dim(n)
        width = ((1 << n) + 3) // 4
        if len(text) != width:
            raise ValueError(
                f"truth-table hex for n={n} must have exactly {width} digits, got {len(text)}"
            )
        try:
            table = int(text[::-1], 16)
        except ValueError:
            raise ValueError(f"invalid hex digits in truth table: {text!r}") from None
        return cls(n, table)


def from_sign_bits(bits: np.ndarray) -> BooleanFunction:
    """Build a function from a 0/1 sign-bit array of length 2^n (1 means -1)."""
    size = len(bits)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError("bit array length must be a power of two")
    _check_dim(n)
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    return BooleanFunction(n, int.from_bytes(packed.tobytes(), "little"))


def from_values(values: Sequence[int]) -> BooleanFunction:
    """Build a function from its +-1 value list, indexed by input index."""
    arr = np.asarray(values, dtype=np.int64)
    if not np.all(np.abs(arr) == 1):
        raise ValueError("values must be +-1")
    return from_sign_bits(((1 - arr) // 2).astype(np.uint8))


@dataclass(frozen=True)
class Restriction:
    """A choice of free coordinates plus +-1 values for the rest."""

    base: BooleanFunction
    free: frozenset[int]
    assignment: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        self.base.restrict(self.free, dict(self.assignment))  # validates

    def induced(self) -> BooleanFunction:
        return self.base.restrict(self.free, dict(self.assignment))


@dataclass(frozen=True)
class FamilySpec:
    """A named family instance, e.g. parity:s=3,n=5."""

    name: str
    params: dict[str, int | str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in _FAMILY_NAMES:
            raise ValueError(
                f"unknown family {self.name!r}; known: {', '.join(_FAMILY_NAMES)}"
            )

    @classmethod
    def parse(cls, text: str) -> FamilySpec:
        name, _, rest = text.partition(":")
        params: dict[str, int | str] = {}
        if rest:
            for piece in rest.split(","):
                key, eq, val = piece.partition("=")
                if not eq or not key:
                    raise ValueError(f"malformed family parameter {piece!r}")
                if key == "fallback":
                    params[key] = val
                else:
                    try:
                        params[key] = int(val)
                    except ValueError:
                        raise ValueError(
                            f"family parameter {key!r} must be an integer, got {val!r}"
                        ) from None
        return cls(name, params)

    def text(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{inner}"


def _take(params: dict, allowed: dict[str, int | str | None], family: str) -> dict:
    out = {}
    for key, default in allowed.items():
        if key in params:
            out[key] = params[key]
        elif default is not None:
            out[key] = default
        else:
            raise ValueError(f"family {family!r} requires parameter {key!r}")
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"family {family!r} does not take {sorted(extra)}")
    return out


def _index(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def parity(s: int, n: int | None = None) -> BooleanFunction:
    """x_1 x_2 ... x_s embedded in n coordinates (n defaults to s)."""
    if n is None:
        n = s
    _check_dim(n)
    if not 1 <= s <= n:
        raise ValueError(f"parity needs 1 <= s <= n, got s={s}, n={n}")
    mask = (1 << s) - 1
    bits = (np.bitwise_count(_index(n) & mask) & 1).astype(np.uint8)
    return from_sign_bits(bits)


def dictator(n: int, k: int = 1) -> BooleanFunction:
    """f(x) = x_k."""
    _check_dim(n)
    if not 1 <= k <= n:
        raise ValueError(f"dictator coordinate k={k} out of range for n={n}")
    bits = ((_index(n) >> (k - 1)) & 1).astype(np.uint8)
    return from_sign_bits(bits)


def and_function(n: int) -> BooleanFunction:
    """+1 exactly when every coordinate is +1."""
    _check_dim(n)
    bits = (_index(n) != 0).astype(np.uint8)
    return from_sign_bits(bits)


def majority(n: int) -> BooleanFunction:
    """Sign of the coordinate sum; n must be odd."""
    _check_dim(n)
    if n % 2 == 0:
        raise ValueError(f"majority needs odd n, got {n}")
    bits = (np.bitwise_count(_index(n)) > n // 2).astype(np.uint8)
    return from_sign_bits(bits)


def minblock(s: int, t: int) -> BooleanFunction:
    """Product over t blocks of size s of the block-minimum coordinate value."""
    if s < 1 or t < 1:
        raise ValueError("minblock needs s >= 1 and t >= 1")
    n = s * t
    _check_dim(n)
    idx = _index(n)
    mask = (1 << s) - 1
    acc = np.zeros(1 << n, dtype=np.int64)
    for p in range(t):
        acc ^= ((idx >> (p * s)) & mask) != 0  # block min is -1 iff any -1
    return from_sign_bits(acc.astype(np.uint8))


def tribes(w: int, s: int) -> BooleanFunction:
    """OR of s disjoint ANDs of width w, with +1 meaning TRUE."""
    if w < 1 or s < 1:
        raise ValueError("tribes needs w >= 1 and s >= 1")
    n = w * s
    _check_dim(n)
    idx = _index(n)
    mask = (1 << w) - 1
    any_true = np.zeros(1 << n, dtype=bool)
    for p in range(s):
        any_true |= ((idx >> (p * w)) & mask) == 0  # AND is TRUE iff all +1
    return from_sign_bits((~any_true).astype(np.uint8))


def first_even_group(s: int, t: int, fallback: str = "t") -> BooleanFunction:
    """(-1)^{p_0} where p_0 is the first of t size-s blocks with even parity.

    Even parity means an even number of -1 entries.  When every block has
    odd parity, p_0 falls back to t (default) or to n = s*t.
    """
    if s < 1 or t < 1:
        raise ValueError("first-even-group needs s >= 1 and t >= 1")
    if fallback not in ("t", "n"):
        raise ValueError(f"fallback must be 't' or 'n', got {fallback!r}")
    n = s * t
    _check_dim(n)
    idx = _index(n)
    p0 = np.zeros(1 << n, dtype=np.int64)
    for p in range(1, t + 1):
        block = ((1 << s) - 1) << ((p - 1) * s)
        even = (np.bitwise_count(idx & block) & 1) == 0
        p0[even & (p0 == 0)] = p
    p0[p0 == 0] = t if fallback == "t" else n
    return from_sign_bits(((p0 & 1) == 1).astype(np.uint8))


def make_family(spec: FamilySpec) -> BooleanFunction:
    """Instantiate a parsed family spec."""
    name, params = spec.name, spec.params
    if name == "parity":
        got = _take(params, {"s": None, "n": -1}, name)
        return parity(got["s"], None if got["n"] == -1 else got["n"])
    if name == "and":
        got = _take(params, {"n": None}, name)
        return and_function(got["n"])
    if name == "dictator":
        got = _take(params, {"n": None, "k": 1}, name)
        return dictator(got["n"], got["k"])
    if name == "majority":
        got = _take(params, {"n": None}, name)
        return majority(got["n"])
    if name == "minblock":
        got = _take(params, {"s": None, "t": None}, name)
        return minblock(got["s"], got["t"])
    if name == "tribes":
        got = _take(params, {"w": None, "s": None}, name)
        return tribes(got["w"], got["s"])
    if name == "first-even-group":
        got = _take(params, {"s": None, "t": None, "fallback": "t"}, name)
        return first_even_group(got["s"], got["t"], got["fallback"])
    raise ValueError(f"unknown family {name!r}")
