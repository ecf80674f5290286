import math

import pytest
from hypothesis import given, strategies as st

from culprit import CodeElement, CoverageMatrix, EmptyDomain, NoFailingTests, SuspiciousnessMap, ochiai, rank_elements
from culprit.sbfl import tarantula

E = [CodeElement("A.java", i) for i in range(1, 7)]


def test_ochiai_examples():
    cov = CoverageMatrix.from_records([
        ("f1", "FAIL", [E[0], E[1]]),
        ("f2", "FAIL", [E[0]]),
        ("p1", "PASS", [E[2], E[1]]),
    ])
    s = ochiai(cov)
    assert s[E[0]] == 1.0
    assert s[E[2]] == 0.0
    assert s[E[5]] == 0.0  # never covered
    assert s[E[1]] == pytest.approx(1 / math.sqrt(2 * 2))


def test_ochiai_one_failing_three_passing():
    cov = CoverageMatrix.from_records(
        [("f", "FAIL", [E[0]])] + [(f"p{i}", "PASS", [E[0]]) for i in range(3)])
    # direct arithmetic: 1 / sqrt(1 * (1 + 3))
    assert ochiai(cov)[E[0]] == 0.5


def test_ochiai_needs_failure():
    with pytest.raises(NoFailingTests):
        ochiai(CoverageMatrix.from_records([("p", "PASS", [E[0]])]))


def test_scores_must_be_non_negative():
    with pytest.raises(ValueError):
        SuspiciousnessMap({E[0]: -0.1})


TABLE_SCORES = [1.0, 0.6, 0.6, 0.6, 0.3]


def table_map():
    return SuspiciousnessMap(dict(zip(E, TABLE_SCORES)))


def test_rank_max_matches_voting_table():
    r = rank_elements(table_map(), "max")
    assert [r[e] for e in E[:5]] == [1, 4, 4, 4, 5]


def test_rank_dense_matches_voting_table():
    r = rank_elements(table_map(), "dense")
    assert [r[e] for e in E[:5]] == [1, 2, 2, 2, 3]


def test_rank_distinct_scores_agree():
    s = SuspiciousnessMap(dict(zip(E, [0.9, 0.5, 0.4, 0.1])))
    assert rank_elements(s, "max") == rank_elements(s, "dense")


def test_rank_ignores_zero_and_rejects_empty():
    s = SuspiciousnessMap({E[0]: 0.5, E[1]: 0.0})
    assert rank_elements(s) == {E[0]: 1}
    with pytest.raises(EmptyDomain):
        rank_elements(SuspiciousnessMap({E[0]: 0.0}))


def test_tarantula_registered_behind_same_contract():
    cov = CoverageMatrix.from_records([("f", "FAIL", [E[0]]), ("p", "PASS", [E[0], E[1]])])
    s = tarantula(cov)
    assert s[E[0]] == pytest.approx(0.5)
    assert s[E[1]] == 0.0


score_lists = st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.3, 0.6, 0.9, 1.0]), min_size=1, max_size=12)


@given(score_lists)
def test_rank_order_preservation(scores):
    elems = [CodeElement("X.java", i + 1) for i in range(len(scores))]
    s = SuspiciousnessMap(dict(zip(elems, scores)))
    if not any(scores):
        return
    rmax, rdense = rank_elements(s, "max"), rank_elements(s, "dense")
    pos = [e for e in elems if s[e] > 0]
    for a in pos:
        assert rmax[a] >= rdense[a]
        for b in pos:
            assert (s[a] > s[b]) == (rmax[a] < rmax[b])
            assert (s[a] > s[b]) == (rdense[a] < rdense[b])
    top = max(s[e] for e in pos)
    assert all(rdense[e] == 1 for e in pos if s[e] == top)
