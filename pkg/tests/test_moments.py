import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_moment, random_function
from hypercube_spectra import (
    BooleanFunction,
    chain,
    dictator,
    entropy_from_moment_derivative,
    fourier_entropy,
    influences_combinatorial,
    lemma22_check,
    majority,
    minblock,
    moment,
    moment_curve,
    parity,
    step_floor,
    wht,
)


def test_moment_conventions():
    rng = np.random.default_rng(2)
    f = random_function(rng, 5)
    assert moment(f, [], 0.3) == 1.0
    assert moment(f, [1, 2, 3, 4, 5], 0.0) == pytest.approx(1.0, abs=1e-12)
    assert moment(f, [2, 4], 0.0) == pytest.approx(1.0, abs=1e-12)


def test_moment_eps_domain():
    f = majority(3)
    with pytest.raises(ValueError):
        moment(f, [1], -0.1)
    with pytest.raises(ValueError):
        moment(f, [1], 0.5)
    with pytest.raises(ValueError):
        moment(f, [1, 1], 0.1)
    with pytest.raises(ValueError):
        moment(f, [0, 1], 0.1)


def test_majority3_closed_form():
    # all four nonzero weights are 1/4, so M = 4^(-eps) for the full cube
    f = majority(3)
    for eps in (0.1, 0.25, 0.4, 0.49):
        assert moment(f, [1, 2, 3], eps) == pytest.approx(4.0 ** (-eps), abs=1e-12)


def test_parity_moment_is_one_for_every_v():
    f = parity(3)
    for coords in ([1], [2, 3], [1, 2, 3], [1, 3]):
        assert moment(f, coords, 0.3) == pytest.approx(1.0, abs=1e-12)


def test_moment_matches_restriction_by_restriction_oracle():
    rng = np.random.default_rng(14)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        f = random_function(rng, n)
        size = int(rng.integers(1, n + 1))
        coords = sorted(rng.choice(np.arange(1, n + 1), size=size, replace=False).tolist())
        eps = float(rng.uniform(0.0, 0.499))
        assert moment(f, coords, eps) == pytest.approx(brute_moment(f, coords, eps), abs=1e-10)


def test_moment_invariant_under_relabelling_and_dummy_coordinates():
    rng = np.random.default_rng(15)
    f = random_function(rng, 4)
    # embed f in 5 coordinates; coordinate 5 is dummy
    g = BooleanFunction(5, sum(((f.table >> i) & 1) << i for i in range(16)) | (f.table << 16))
    assert moment(g, [1, 2], 0.2) == pytest.approx(moment(f, [1, 2], 0.2), abs=1e-12)
    perm = [3, 1, 2, 4]
    h = f.permute(perm)
    # coordinate j of h reads perm[j-1] of f
    assert moment(h, [2, 3], 0.2) == pytest.approx(moment(f, [1, 2], 0.2), abs=1e-12)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.data())
@settings(deadline=None, max_examples=40)
def test_moment_curve_non_increasing(n, seed, data):
    f = random_function(np.random.default_rng(seed), n)
    size = data.draw(st.integers(1, n))
    coords = data.draw(
        st.lists(st.integers(1, n), min_size=size, max_size=size, unique=True)
    )
    curve = moment_curve(f, coords, [0.0, 0.1, 0.2, 0.3, 0.4, 0.49])
    for earlier, later in zip(curve.values, curve.values[1:]):
        assert later <= earlier + 1e-12


def test_moment_curve_grid_validation():
    f = majority(3)
    with pytest.raises(ValueError):
        moment_curve(f, [1], [0.2, 0.1])
    with pytest.raises(ValueError):
        moment_curve(f, [1], [0.1, 0.5])
    curve = moment_curve(f, [1, 2])
    assert len(curve.eps) == 49  # default grid 0.01..0.49
    assert curve.values[0] > curve.values[-1]


def test_lemma22_examples():
    lhs, rhs = lemma22_check(parity(2), [1], 1)
    assert lhs == rhs == 1
    lhs, rhs = lemma22_check(majority(3), [1, 2], 1)
    assert (lhs, rhs) == (rhs, rhs)
    assert rhs == pytest.approx(0.5)
    lhs, rhs = lemma22_check(BooleanFunction(4, 0), [2, 3], 3)
    assert lhs == rhs == 0


def test_lemma22_validation():
    with pytest.raises(ValueError):
        lemma22_check(majority(3), [1, 2], 3)


def test_lemma22_exact_equality_random():
    rng = np.random.default_rng(6)
    for _ in range(150):
        n = int(rng.integers(1, 9))
        f = random_function(rng, n)
        size = int(rng.integers(1, n + 1))
        j_set = sorted(rng.choice(np.arange(1, n + 1), size=size, replace=False).tolist())
        k = int(rng.choice(j_set))
        lhs, rhs = lemma22_check(f, j_set, k)
        assert lhs == rhs  # exact rationals, zero tolerance


def test_chain_parity_stays_flat():
    report = chain(parity(3), 0.25)
    assert report.final == pytest.approx(1.0, abs=1e-12)
    for step in report.steps:
        assert step.delta == pytest.approx(0.0, abs=1e-12)
        assert step.floor <= 0.0


def test_chain_majority3_reaches_full_moment():
    report = chain(majority(3), 0.25)
    assert report.final == pytest.approx(4.0 ** (-0.25), abs=1e-12)
    assert [s.coord for s in report.steps] == [1, 2, 3]
    for step in report.steps:
        assert step.delta >= step.floor - 1e-12
    assert report.final >= report.telescoped_floor - 1e-12


def test_chain_respects_order_and_validates():
    f = majority(3)
    report = chain(f, 0.2, order=[3, 1, 2])
    assert [s.coord for s in report.steps] == [3, 1, 2]
    assert report.final == pytest.approx(moment(f, [1, 2, 3], 0.2), abs=1e-12)
    with pytest.raises(ValueError):
        chain(f, 0.2, order=[1, 2])
    with pytest.raises(ValueError):
        chain(f, 0.0)
    with pytest.raises(ValueError):
        chain(f, 0.5)


def test_chain_final_matches_direct_moment():
    rng = np.random.default_rng(30)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        f = random_function(rng, n)
        eps = float(rng.uniform(0.01, 0.49))
        report = chain(f, eps)
        assert report.final == pytest.approx(moment(f, range(1, n + 1), eps), abs=1e-12)


def test_chain_floor_holds_on_random_orders():
    rng = np.random.default_rng(31)
    for _ in range(15):
        n = int(rng.integers(2, 8))
        f = random_function(rng, n)
        order = (rng.permutation(n) + 1).tolist()
        for eps in (0.05, 0.25, 0.45):
            report = chain(f, eps, order=order)
            for step in report.steps:
                assert step.delta >= step.floor - 1e-9
            assert report.final >= report.telescoped_floor - 1e-9


def test_chain_size_guard():
    f = parity(17)
    with pytest.raises(ValueError):
        chain(f, 0.25)
    report = chain(f, 0.25, allow_large=True)
    assert report.final == pytest.approx(1.0, abs=1e-12)


def test_step_floor_values():
    assert step_floor(0, 0.3) == 0.0
    # influence 1, eps 0.25: -(0.75 + 0.125 + 4^0.25 - 1)
    expected = -(0.75 + 0.125 + 4**0.25 - 1.0)
    assert step_floor(1, 0.25) == pytest.approx(expected, rel=1e-12)


def test_derivative_recovers_entropy_examples():
    assert entropy_from_moment_derivative(majority(3)) == pytest.approx(2.0, rel=1e-6)
    # spectrum concentrated on one character: exactly zero, no rounding at all
    assert entropy_from_moment_derivative(parity(4)) == 0.0
    assert entropy_from_moment_derivative(dictator(5, 3)) == 0.0


def test_derivative_matches_entropy_random():
    rng = np.random.default_rng(44)
    for _ in range(25):
        n = int(rng.integers(1, 7))
        f = random_function(rng, n)
        ent = fourier_entropy(wht(f))
        approx = entropy_from_moment_derivative(f)
        assert approx == pytest.approx(ent, abs=max(1e-6, 1e-6 * ent))


def test_derivative_step_validation():
    with pytest.raises(ValueError):
        entropy_from_moment_derivative(majority(3), h=0.0)
    with pytest.raises(ValueError):
        entropy_from_moment_derivative(majority(3), h=0.01)


def test_minblock_chain_floors_with_exact_influences():
    f = minblock(2, 3)
    prof = influences_combinatorial(f)
    report = chain(f, 0.3)
    for step in report.steps:
        assert step.floor == pytest.approx(step_floor(prof.per_coord[step.coord - 1], 0.3))
