"""Scalar inequalities behind the chain floors, plus spectral-ratio reports.

Two scalar facts are swept numerically over [0,1]^2 x (0,1/2).  Writing
s = (sqrt(b)+sqrt(a))^2 and d = (sqrt(b)-sqrt(a))^2, the quantity

    L(a,b,eps) = (s^(1+eps) + d^(1+eps)) / 2 - a^(1+eps) - b^(1+eps)

is sandwiched, for 0 <= a <= b <= 1:

    (b^eps - a^eps) a  <=  L  <=  (3 eps + 2 eps^2) a + (b^eps - a^eps) a

The upper bound is the "lemma24" form, the lower bound the "eq27" form.
Both gap functions are oriented so a violation is a negative gap; their
sum telescopes to exactly (3 eps + 2 eps^2) a.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import BooleanFunction
from .spectrum import (
    Spectrum,
    influences_spectral,
    partial_hadamard_inplace,
    wht,
)

DEFAULT_EPS_LIST = tuple(0.01 + 0.02 * k for k in range(25))  # 0.01 .. 0.49


def _check_pair(a: float, b: float, eps: float) -> None:
    if not 0.0 <= a <= b <= 1.0:
        raise ValueError(f"need 0 <= a <= b <= 1, got a={a}, b={b}")
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")


def _cross_terms(a: float, b: float, eps: float) -> tuple[float, float]:
    p = 1.0 + eps
    sa, sb = math.sqrt(a), math.sqrt(b)
    return ((sb + sa) ** 2) ** p / 2.0, ((sb - sa) ** 2) ** p / 2.0


def lemma24_gap(a: float, b: float, eps: float) -> float:
    """(3 eps + 2 eps^2) a + (b^eps - a^eps) a - L(a,b,eps); >= 0 always."""
    _check_pair(a, b, eps)
    p = 1.0 + eps
    plus, minus = _cross_terms(a, b, eps)
    return math.fsum(
        [
            (3.0 * eps + 2.0 * eps * eps) * a,
            (b**eps - a**eps) * a,
            a**p,
            b**p,
            -plus,
            -minus,
        ]
    )


def eq27_gap(a: float, b: float, eps: float) -> float:
    """L(a,b,eps) - (b^eps - a^eps) a; >= 0 always (the lower half)."""
    _check_pair(a, b, eps)
    p = 1.0 + eps
    plus, minus = _cross_terms(a, b, eps)
    return math.fsum([plus, minus, -(a**p), -(b**p), -(b**eps - a**eps) * a])


def _gap_grid(a: np.ndarray, b: np.ndarray, eps: float, upper: bool) -> np.ndarray:
    p = 1.0 + eps
    sa, sb = np.sqrt(a), np.sqrt(b)
    cross = ((sb + sa) ** 2) ** p / 2.0 + ((sb - sa) ** 2) ** p / 2.0 - a**p - b**p
    base = (b**eps - a**eps) * a
    if upper:
        return base + (3.0 * eps + 2.0 * eps * eps) * a - cross
    return cross - base


@dataclass(frozen=True)
class ScalarGridSpec:
    """Uniform sweep grid: a and b over [0,1] including endpoints and a=b."""

    a_steps: int = 200
    b_steps: int = 200
    eps_list: tuple[float, ...] = DEFAULT_EPS_LIST

    def __post_init__(self) -> None:
        if self.a_steps < 2 or self.b_steps < 2:
            raise ValueError("grids need at least two steps to include 0 and 1")
        for e in self.eps_list:
            if not 0.0 < e < 0.5:
                raise ValueError(f"eps values must lie in (0, 1/2), got {e}")


@dataclass(frozen=True)
class SweepResult:
    kind: str
    evaluated: int
    violations: int
    min_gap: float
    argmin: tuple[float, float, float]  # (a, b, eps)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "evaluated": self.evaluated,
            "violations": self.violations,
            "min_gap": self.min_gap,
            "argmin": {
                "a": self.argmin[0],
                "b": self.argmin[1],
                "eps": self.argmin[2],
            },
        }


_GAP_TOLERANCE = 1e-12


def sweep_gap(kind: str, grid: ScalarGridSpec | None = None) -> SweepResult:
    """Evaluate one gap function over a full grid; count violations < -1e-12."""
    if kind not in ("lemma24", "eq27"):
        raise ValueError(f"unknown gap kind {kind!r}")
    grid = grid or ScalarGridSpec()
    a_axis = np.linspace(0.0, 1.0, grid.a_steps)
    b_axis = np.linspace(0.0, 1.0, grid.b_steps)
    aa, bb = np.meshgrid(a_axis, b_axis, indexing="ij")
    keep = aa <= bb
    a_flat, b_flat = aa[keep], bb[keep]
    evaluated = 0
    violations = 0
    min_gap = math.inf
    argmin = (0.0, 0.0, 0.0)
    for eps in grid.eps_list:
        gaps = _gap_grid(a_flat, b_flat, eps, upper=(kind == "lemma24"))
        evaluated += gaps.size
        violations += int(np.count_nonzero(gaps < -_GAP_TOLERANCE))
        low = int(np.argmin(gaps))
        if gaps[low] < min_gap:
            min_gap = float(gaps[low])
            argmin = (float(a_flat[low]), float(b_flat[low]), float(eps))
    return SweepResult(kind, evaluated, violations, min_gap, argmin)


def sweep_gap_random(kind: str, count: int, seed: int) -> SweepResult:
    """Same check on seeded random triples (a, b, eps)."""
    if kind not in ("lemma24", "eq27"):
        raise ValueError(f"unknown gap kind {kind!r}")
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    a = rng.random(count)
    b = a + (1.0 - a) * rng.random(count)
    eps = np.clip(rng.random(count) * 0.5, 1e-9, 0.5 - 1e-9)
    gaps = np.empty(count)
    for i in range(count):  # eps varies per sample, so no single vector call
        gaps[i] = _gap_grid(a[i : i + 1], b[i : i + 1], float(eps[i]), kind == "lemma24")[0]
    violations = int(np.count_nonzero(gaps < -_GAP_TOLERANCE))
    low = int(np.argmin(gaps))
    return SweepResult(
        kind,
        count,
        violations,
        float(gaps[low]),
        (float(a[low]), float(b[low]), float(eps[low])),
    )


@dataclass(frozen=True)
class Q31Coordinate:
    coord: int
    numerator: Fraction  # sum over S not containing k of |fhat(S) fhat(S+k)|
    influence: Fraction
    ratio: Fraction | None  # absent when I_k = 0


@dataclass(frozen=True)
class Q31Report:
    """Cross-term mass N_k against influence I_k, coordinate by coordinate."""

    n: int
    per_coord: tuple[Q31Coordinate, ...]
    best: Fraction | None
    worst: Fraction | None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "per_coord": [
                {
                    "coord": c.coord,
                    "numerator": str(c.numerator),
                    "influence": str(c.influence),
                    "ratio": None if c.ratio is None else str(c.ratio),
                }
                for c in self.per_coord
            ],
            "best": None if self.best is None else str(self.best),
            "worst": None if self.worst is None else str(self.worst),
        }


def q31_report(spectrum: Spectrum) -> Q31Report:
    """Exact N_k = sum_{S not cont. k} |fhat(S) fhat(S+k)| and N_k / I_k.

    Products of two coefficients stay below 2^(2n) and 2^(n-1) of them are
    summed, so int64 is exact up to n = 21; larger n falls back to Python
    integers.
    """
    n = spectrum.n
    coeffs = spectrum.coeffs
    profile = influences_spectral(spectrum)
    idx = np.arange(1 << n, dtype=np.int64)
    per = []
    for k in range(1, n + 1):
        bit = 1 << (k - 1)
        lo = idx[(idx & bit) == 0]
        if 3 * n - 1 <= 62:
            num = int(np.abs(coeffs[lo] * coeffs[lo + bit]).sum())
        else:
            num = sum(
                abs(int(x) * int(y)) for x, y in zip(coeffs[lo], coeffs[lo + bit])
            )
        numerator = Fraction(num, 4**n)
        influence = profile.per_coord[k - 1]
        ratio = numerator / influence if influence > 0 else None
        per.append(Q31Coordinate(k, numerator, influence, ratio))
    defined = [c.ratio for c in per if c.ratio is not None]
    return Q31Report(
        n=n,
        per_coord=tuple(per),
        best=min(defined) if defined else None,
        worst=max(defined) if defined else None,
    )


@dataclass(frozen=True)
class LogRatioReport:
    """E_x sum_S min log(max/min) over coefficient pairs differing in k."""

    value: float
    majorant: float  # same sum with sqrt(min*max) in place of the log term
    influence: Fraction
    cap: float  # I_k ln(e / I_k), from the log-sum inequality

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "majorant": self.majorant,
            "influence": str(self.influence),
            "cap": self.cap,
        }


def log_ratio_functional(f: BooleanFunction, v1, k: int) -> LogRatioReport:
    """Averaged sum of min(u,v) ln(max(u,v)/min(u,v)) over restricted pairs.

    Pairs are squared coefficients of the restriction to V1 + {k} at
    characters S and S + {k}, averaged over assignments.  The value is
    capped by I_k ln(e/I_k) and by the sqrt(uv) cross-term majorant.
    """
    v = sorted(set(v1))
    if k in v:
        raise ValueError(f"coordinate k={k} must not belong to V1")
    coords = v + [k]
    if coords and (min(coords) < 1 or max(coords) > f.n):
        raise ValueError(f"coordinates must lie in 1..{f.n}")
    m = len(coords)
    work = partial_hadamard_inplace(f.values(), [c - 1 for c in coords])
    bit = 1 << (k - 1)
    idx = np.arange(1 << f.n, dtype=np.int64)
    lo = idx[(idx & bit) == 0]
    u = work[lo].astype(np.float64) ** 2 / 4.0**m
    w = work[lo + bit].astype(np.float64) ** 2 / 4.0**m
    small = np.minimum(u, w)
    large = np.maximum(u, w)
    pos = small > 0.0
    scale = 2.0 ** (f.n - m)
    value = float((small[pos] * np.log(large[pos] / small[pos])).sum()) / scale
    majorant = float(np.sqrt(small * large).sum()) / scale
    influence = influences_spectral(wht(f)).per_coord[k - 1]
    ik = float(influence)
    cap = 0.0 if ik == 0.0 else ik * (1.0 - math.log(ik))
    return LogRatioReport(value=value, majorant=majorant, influence=influence, cap=cap)
