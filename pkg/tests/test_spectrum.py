import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_spectrum, random_function
from hypercube_spectra import (
    BooleanFunction,
    and_function,
    batch_stats,
    dictator,
    influences_combinatorial,
    influences_spectral,
    majority,
    parity,
    weighted_degree_sum,
    wht,
)
from hypercube_spectra.spectrum import hadamard_inplace, partial_hadamard_inplace


def test_wht_dictator():
    s = wht(dictator(1))
    assert s.coeffs.tolist() == [0, 2]


def test_wht_parity_concentrates_on_full_mask():
    s = wht(parity(2))
    assert s.coeffs.tolist() == [0, 0, 0, 4]


def test_wht_majority3():
    s = wht(majority(3))
    # characters: {}, {1}, {2}, {1,2}, {3}, {1,3}, {2,3}, {1,2,3}
    assert s.coeffs.tolist() == [0, 4, 4, 0, 4, 0, 0, -4]


def test_wht_and():
    s = wht(and_function(3))
    assert s.coeffs[0] == -8 + 2  # 2^n(-1 + 2^(1-n))
    assert all(c == 2 for c in s.coeffs[1:])


def test_wht_matches_brute_force():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 4, 6):
        f = random_function(rng, n)
        assert wht(f).coeffs.tolist() == brute_spectrum(f)


def test_parseval_all_n3_tables():
    for table in range(256):
        assert wht(BooleanFunction(3, table)).parseval_ok()


@given(st.integers(1, 10), st.integers(0, 2**64 - 1))
@settings(deadline=None, max_examples=60)
def test_parseval_random(n, seed):
    f = random_function(np.random.default_rng(seed), n)
    s = wht(f)
    assert int(s.squared().sum()) == 4**n


def test_transform_is_self_inverse_up_to_scale():
    rng = np.random.default_rng(9)
    f = random_function(rng, 5)
    twice = hadamard_inplace(hadamard_inplace(f.values()))
    assert (twice == (1 << 5) * f.values()).all()


def test_partial_transform_composes_to_full():
    rng = np.random.default_rng(10)
    f = random_function(rng, 6)
    a = partial_hadamard_inplace(f.values(), [0, 3, 5])
    a = partial_hadamard_inplace(a, [1, 2, 4])
    assert (a == wht(f).coeffs).all()


def test_partial_transform_order_irrelevant():
    rng = np.random.default_rng(12)
    f = random_function(rng, 5)
    a = partial_hadamard_inplace(f.values(), [4, 0, 2])
    b = partial_hadamard_inplace(f.values(), [0, 2, 4])
    assert (a == b).all()


def test_influences_examples():
    assert [str(x) for x in influences_combinatorial(dictator(3)).per_coord] == ["1", "0", "0"]
    assert [str(x) for x in influences_combinatorial(and_function(2)).per_coord] == ["1/2", "1/2"]
    prof = influences_combinatorial(majority(3))
    assert prof.total == pytest.approx(1.5)


def test_influence_defs_agree_exhaustively_n_le_3():
    for n in (1, 2, 3):
        for table in range(1 << (1 << n)):
            f = BooleanFunction(n, table)
            assert influences_combinatorial(f).per_coord == influences_spectral(wht(f)).per_coord


def test_influence_defs_agree_random():
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = int(rng.integers(4, 11))
        f = random_function(rng, n)
        assert influences_combinatorial(f).per_coord == influences_spectral(wht(f)).per_coord


def test_weighted_degree_sum_identity():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        f = random_function(rng, n)
        s = wht(f)
        total = influences_combinatorial(f).total
        assert weighted_degree_sum(s) == 4**n * total


def test_batch_stats_matches_single_function_paths():
    from hypercube_spectra import fourier_entropy, min_entropy

    rng = np.random.default_rng(8)
    fns = [random_function(rng, 5) for _ in range(40)]
    bits = np.stack([f.bits() for f in fns])
    stats = batch_stats(bits)
    for i, f in enumerate(fns):
        s = wht(f)
        assert stats["entropy"][i] == pytest.approx(fourier_entropy(s), abs=1e-12)
        assert stats["min_entropy"][i] == pytest.approx(min_entropy(s), abs=1e-12)
        assert stats["influence_total"][i] == float(influences_combinatorial(f).total)
        assert int(stats["parseval"][i]) == 4**5
