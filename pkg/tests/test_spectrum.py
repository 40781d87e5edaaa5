import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrclique.defexp import eval_deformed_exp, eval_truncated, truncated_coefficients
from qrclique.errors import InvalidParameterError, KurtzPreconditionError, RootFindingError
from qrclique.numeric import to_exact
from qrclique.spectrum import (
    WeightSequence,
    asymptotic_seed,
    dump_root_table,
    elementary_symmetric,
    find_roots_entire,
    find_roots_truncated,
    max_weight_bound_check,
    root_table,
    roots_to_weights,
    verify_elementary_symmetric,
    weights_below_tail,
    weights_from_table,
)

# independent oracles: mpmath findroot on the series at 50 digits, frozen
A1_HALF = "-1.48807854559971029465624603158235766189"
ROOTS_09 = (
    "-4.94086761962908718511542592138",
    "-6.78780802715286574918728420456",
    "-8.83364290080372610692311261217",
)


def test_quadratic_roots():
    roots = find_roots_truncated("0.25", 2)
    ctx = roots.roots[0].context
    s = ctx.sqrt(2)
    assert abs(roots.roots[0] - (-4 + 2 * s)) < ctx.ldexp(1, -100)
    assert abs(roots.roots[1] - (-4 - 2 * s)) < ctx.ldexp(1, -100)
    assert roots.certified and roots.source == "truncated"


@pytest.mark.parametrize("k", [3, 6, 10, 15])
def test_truncated_roots_are_zeros(k):
    roots = find_roots_truncated("0.2", k)
    coeffs = truncated_coefficients("0.2", k)
    assert len(roots) == k
    assert list(roots.roots) == sorted(roots.roots, reverse=True)
    for (lo, hi) in roots.enclosures:
        assert eval_truncated(coeffs, lo) * eval_truncated(coeffs, hi) <= 0


@settings(max_examples=25)
@given(st.integers(min_value=1, max_value=25), st.integers(min_value=2, max_value=9))
def test_sigma_identities_truncated(denom, k):
    p = Fraction(1, 4) * Fraction(denom, 25)
    weights = roots_to_weights(find_roots_truncated(p, k))
    assert all(row.ok for row in verify_elementary_symmetric(weights, k))
    assert max_weight_bound_check(weights).holds


def test_kurtz_refusal_and_force():
    with pytest.raises(KurtzPreconditionError) as info:
        find_roots_truncated("0.6", 4)
    assert info.value.index == 1
    assert "non-real" in str(info.value)
    forced = find_roots_truncated("0.6", 4, force=True)
    assert not forced.certified


def test_entire_first_root_oracle():
    roots = find_roots_entire("0.5", 1)
    ctx = roots.roots[0].context
    assert abs(roots.roots[0] - ctx.mpf(A1_HALF)) < 1e-35


def test_entire_roots_p09_oracle():
    roots = find_roots_entire("0.9", 3)
    for got, want in zip(roots.roots, ROOTS_09):
        assert abs(got - got.context.mpf(want)) < 1e-28


def test_entire_roots_sign_change():
    roots = find_roots_entire("0.7", 8)
    for lo, hi in roots.enclosures:
        f_lo = eval_deformed_exp("0.7", to_exact(lo), Fraction(1, 10**60))
        f_hi = eval_deformed_exp("0.7", to_exact(hi), Fraction(1, 10**60))
        assert f_lo * f_hi <= 0


def test_entire_weights_and_tail():
    roots, weights = weights_below_tail("0.5", Fraction(1, 10**9))
    assert weights.tail_mass < 1e-9
    assert weights.source == "entire"
    rows = verify_elementary_symmetric(weights, 8)
    assert all(row.ok for row in rows)
    assert weights.weights[0] >= 0.5


def test_asymptotic_seed():
    assert asymptotic_seed(3, "0.5") == -12
    with pytest.raises(InvalidParameterError):
        asymptotic_seed(0, "0.5")


def test_elementary_symmetric_small():
    assert elementary_symmetric([1, 2, 3], 3) == [1, 6, 11, 6]


def test_weight_sequence_validation():
    with pytest.raises(InvalidParameterError):
        WeightSequence.from_values(["0.5", "-0.1"], "0.5")
    ws = WeightSequence.from_values(["0.1", "0.9"], "0.5")
    assert ws.weights[0] > ws.weights[1]


def test_verify_needs_enough_weights():
    weights = roots_to_weights(find_roots_truncated("0.25", 3))
    with pytest.raises(InvalidParameterError):
        verify_elementary_symmetric(weights, 4)


def test_root_table_round_trip():
    roots = find_roots_truncated("0.25", 4)
    weights = roots_to_weights(roots)
    table = json.loads(dump_root_table(root_table(roots, weights,
                                                  verify_elementary_symmetric(weights, 4))))
    assert table["p"] == "0.25" and len(table["roots"]) == 4
    assert all(row["ok"] for row in table["sigma"])
    again = weights_from_table(table)
    for a, b in zip(again.weights, weights.weights):
        assert abs(a - b) < 1e-35


def test_positive_root_rejected():
    roots = find_roots_truncated("0.25", 2)
    bad = roots.__class__((roots.roots[0], -roots.roots[1]), roots.enclosures,
                          roots.source, 2, roots.p, roots.precision_bits)
    with pytest.raises(InvalidParameterError):
        roots_to_weights(bad)


def test_failure_hierarchy():
    assert issubclass(KurtzPreconditionError, RootFindingError)
