from __future__ import annotations

from fractions import Fraction

import pytest

from oracles import naive_is_anti_power
from tm_antipowers.antipower import AntiPowerEngine
from tm_antipowers.bounds import K_ALPHA, KAPPA_RHO
from tm_antipowers.errors import DomainError, HypothesisError, ResourceError
from tm_antipowers.harness import (
    conjecture_scan,
    conjecture_statistics,
    conjecture_sweep,
    decimal_str,
    family_probe,
    fraction_str,
    nonempty_threshold_probe,
    ratio_sweep,
)
from tm_antipowers.word import TmBuffer


def test_rendering():
    assert fraction_str(Fraction(12225, 4162)) == "12225/4162"
    assert decimal_str(Fraction(12225, 4162)) == "2.937290"
    assert decimal_str(Fraction(-1, 3)) == "-0.333333"
    assert decimal_str(Fraction(2, 3)) == "0.666667"
    assert fraction_str(None) is None and decimal_str(None) is None


def test_ratio_sweep_examples(engine):
    (row,) = ratio_sweep(0, 3, 3, engine=engine)
    assert (row.gamma, row.big_gamma) == (5, 3)
    assert row.gamma_ratio == Fraction(5, 3)
    for k in (32, 64, 128):
        (row,) = ratio_sweep(0, k, k, engine=engine)
        assert row.big_gamma_ratio <= Fraction(3, 2)
    (row,) = ratio_sweep(2, 1, 1, engine=engine)
    assert row.big_gamma is None and row.big_gamma_ratio is None
    assert row.to_record()["big_gamma_ratio"] is None


def test_ratio_rows_respect_ceiling(engine):
    for row in ratio_sweep(1, 1, 80, engine=engine):
        assert row.gamma >= 1
        if row.big_gamma is not None:
            assert row.big_gamma % 2 == 1 and row.big_gamma <= 3 * row.k - 4


def test_ratio_sweep_validation():
    with pytest.raises(DomainError):
        ratio_sweep(0, 5, 4)
    with pytest.raises(DomainError):
        ratio_sweep(0, 0, 4)


def test_ratio_sweep_reports_offending_k():
    e = AntiPowerEngine(TmBuffer(mem_cap=256))
    with pytest.raises(ResourceError, match="k="):
        ratio_sweep(0, 3, 40, engine=e)


def test_workers_do_not_change_results():
    one = ratio_sweep(3, 1, 60, workers=1, engine=AntiPowerEngine())
    four = ratio_sweep(3, 1, 60, workers=4, engine=AntiPowerEngine())
    assert one == four
    a = conjecture_sweep(2, 3, 12, 200, workers=1, engine=AntiPowerEngine())
    b = conjecture_sweep(2, 3, 12, 200, workers=3, engine=AntiPowerEngine())
    assert [r.to_record() for r in a] == [r.to_record() for r in b]


def test_conjecture_examples(engine):
    for k in (3, 7, 20):
        assert conjecture_scan(0, k, 1000, engine).count == 0
    rep = conjecture_scan(2, 3, 4, engine)
    assert 2 in rep.violations
    assert rep.count == len(rep.violations)
    with pytest.raises(DomainError):
        conjecture_scan(1, 2, 10, engine)


def test_conjecture_violations_are_asymmetric(engine, word):
    for j in (1, 2, 3):
        for k in (3, 5, 9):
            rep = conjecture_scan(j, k, 300, engine)
            for m in range(1, 301):
                asym = naive_is_anti_power(word, j, k, m) != naive_is_anti_power(word, j, k, 2 * m)
                assert asym == (m in rep.violations)


def test_conjecture_statistics_small(engine):
    stats = conjecture_statistics([1, 2], 3, 6, 100, engine)
    assert set(stats.per_j) == {1, 2}
    counts = [r.count for r in stats.reports]
    assert stats.joint == Fraction(sum(counts), len(counts))
    rec = stats.to_record()
    assert set(rec["per_j_mean"]) == {"1", "2"}


def test_family_probe_examples(engine):
    probes = family_probe(K_ALPHA, range(2, 5), 0, engine)
    assert all(p.observed_ok for p in probes)
    ratios = [p.ratio for p in probes]
    assert ratios == sorted(ratios) and all(r < 3 for r in ratios)
    (p,) = family_probe(KAPPA_RHO, [9], 1, engine)
    assert p.observed_ok
    with pytest.raises(HypothesisError):
        family_probe(K_ALPHA, [1], 4, engine)


def test_kalpha_ratio_sequence_is_increasing_below_three():
    from tm_antipowers.bounds import family_point

    ratios = [family_point(K_ALPHA, a, 0).ratio for a in range(2, 30)]
    assert all(x < y for x, y in zip(ratios, ratios[1:]))
    assert all(r < 3 for r in ratios)
    assert ratios[4] == Fraction(12225, 4162)


def test_threshold_probe(engine):
    rows = nonempty_threshold_probe(5, range(1, 5), engine)
    assert [r.alpha for r in rows] == [1, 2, 3, 4]
    assert all(r.floor_low == 3 and r.floor_high == 5 for r in rows)
    # from alpha = ceil(log2 j) + 2 on, the construction guarantees a witness
    assert all(r.outside for r in rows if r.alpha >= 5)
