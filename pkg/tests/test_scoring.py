import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from culprit import CodeElement, CommitRecord, EvolveMap, SuspiciousnessMap, rank_elements
from culprit.scoring import (
    BATCH, DEFAULT, Mode, ScoreReport, VotingConfig, commit_score, depth, rank_commits, score_commits, vote,
)

from oracles import brute_commit_score

E = [CodeElement("A.java", i) for i in range(1, 6)]
TABLE = SuspiciousnessMap(dict(zip(E, [1.0, 0.6, 0.6, 0.6, 0.3])))


@pytest.mark.parametrize("alpha,tau,expected", [
    (0, "max", [1.0, 0.25, 0.25, 0.25, 0.20]),
    (1, "max", [1.0, 0.15, 0.15, 0.15, 0.06]),
    (0, "dense", [1.0, 0.50, 0.50, 0.50, 1 / 3]),
    (1, "dense", [1.0, 0.30, 0.30, 0.30, 0.10]),
])
def test_voting_table(alpha, tau, expected):
    cfg = VotingConfig(alpha=alpha, tau=tau)
    ranks = rank_elements(TABLE, tau)
    assert [vote(e, TABLE, ranks, cfg) for e in E] == pytest.approx(expected)


def test_config_validation_and_presets():
    with pytest.raises(ValueError):
        VotingConfig(alpha=0.5)
    with pytest.raises(ValueError):
        VotingConfig(lam=1.0)
    with pytest.raises(ValueError):
        VotingConfig(tau="min")
    assert (DEFAULT.alpha, DEFAULT.tau.value, DEFAULT.lam) == (0, "max", 0.1)
    assert (BATCH.alpha, BATCH.tau.value, BATCH.lam) == (1, "max", 0.0)
    assert VotingConfig.from_dict(DEFAULT.to_dict()) == DEFAULT


def evolve(hist):
    """hist: element -> list of commit names newest first; times from trailing digits."""
    recs = {}
    for ids in hist.values():
        for c in ids:
            recs[c] = CommitRecord(c, int(c[1:]))
    return EvolveMap.from_records({e: [recs[c] for c in ids] for e, ids in hist.items()})


def test_depth_examples():
    e = E[0]
    ev = evolve({e: ["c2", "c1", "c0"]})
    assert depth(e, "c0", ev, {"c0", "c1", "c2"}) == 2
    assert depth(e, "c0", ev, {"c0", "c2"}) == 1  # c1 was filtered
    assert depth(e, "c2", ev, {"c0", "c1", "c2"}) == 0


def test_commit_score_examples():
    e1, e2 = E[0], E[1]
    ev = evolve({e1: ["c2", "c0"], e2: ["c0"]})
    susp = SuspiciousnessMap({e1: 1.0, e2: 0.5})
    ranks = rank_elements(susp, "max")
    space = {"c0", "c2"}
    # e1 votes 1 to c2, 0.9 to c0; e2 votes 1/2 to c0
    assert commit_score("c2", susp, ranks, ev, space) == pytest.approx(1.0)
    assert commit_score("c0", susp, ranks, ev, space) == pytest.approx(0.9 + 0.5)
    assert commit_score("c0", susp, ranks, ev, space, VotingConfig(mode="equal")) == pytest.approx(1.9)
    assert commit_score("c0", susp, ranks, ev, space, VotingConfig(mode="score-only")) == pytest.approx(1.4)
    assert commit_score("c0", susp, ranks, ev, space, VotingConfig(mode="max-aggr")) == pytest.approx(1.0)


def test_rank_commits_max_tiebreak():
    out = rank_commits({"a": 0.5, "b": 0.9, "c": 0.5, "d": 0.1})
    assert [(c, r) for c, _, r in out] == [("b", 1), ("c", 3), ("a", 3), ("d", 4)]
    assert [r for *_, r in rank_commits({"x": 1.0, "y": 1.0})] == [2, 2]


def test_score_commits_report_round_trip():
    e1, e2 = E[0], E[1]
    ev = evolve({e1: ["c3", "c1"], e2: ["c2"]})
    susp = SuspiciousnessMap({e1: 1.0, e2: 0.4})
    rep = score_commits({e1, e2}, susp, ev, {"c1", "c2", "c3"}, excluded=["c9"])
    assert [r.id for r in rep.ranked] == ["c3", "c1", "c2"]
    assert rep.rank_of("c2") == 3 and rep.rank_of("zzz") is None
    assert rep.score("zzz") == 0.0
    assert rep.newest_first() == ["c3", "c2", "c1"]
    doc = json.loads(rep.to_json(explain=True))
    assert doc["excluded"] == ["c9"]
    assert ScoreReport.from_dict(doc).to_json(explain=True) == rep.to_json(explain=True)
    assert rep.to_csv().splitlines()[0] == "commit,score,rank"


def test_zero_susp_elements_have_no_vote():
    e1, e2 = E[0], E[1]
    ev = evolve({e1: ["c1"], e2: ["c2"]})
    rep = score_commits({e1, e2}, SuspiciousnessMap({e1: 1.0, e2: 0.0}), ev, {"c1", "c2"})
    assert rep.score("c2") == 0.0


def random_fixture(rng):
    n_commits = rng.randint(1, 10)
    n_elems = rng.randint(1, 20)
    commits = [f"c{i}" for i in range(n_commits)]
    elems = [CodeElement("F.java", i + 1) for i in range(n_elems)]
    hist = {e: sorted(rng.sample(commits, rng.randint(0, n_commits)), key=lambda c: -int(c[1:])) for e in elems}
    levels = [0.0, 0.2, 0.5, 0.5, 0.7, 1.0, rng.random()]
    susp = {e: rng.choice(levels) for e in elems}
    seen = sorted({c for ids in hist.values() for c in ids})
    cbic = set(rng.sample(seen, rng.randint(0, len(seen))))  # C_BIC is a subset of C_F
    return commits, elems, hist, susp, cbic


def check_fixture(rng):
    commits, elems, hist, susp, cbic = random_fixture(rng)
    ev = evolve(hist)
    pairs = {(e, c) for e, ids in hist.items() for c in ids}
    times = {c: int(c[1:]) for c in commits}
    sm = SuspiciousnessMap(susp)
    for mode in Mode:
        for alpha, tau in ((0, "max"), (1, "dense")):
            cfg = VotingConfig(alpha=alpha, tau=tau, lam=rng.choice([0.0, 0.1, 0.35]), mode=mode)
            try:
                ranks = rank_elements(sm, tau)
            except Exception:
                ranks = {}
            for c in cbic:
                got = commit_score(c, sm, ranks, ev, cbic, cfg)
                want = brute_commit_score(c, pairs, times, susp, cbic, alpha, tau, cfg.lam, mode.value)
                assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_commit_score_matches_brute_force_sample():
    rng = random.Random(7)
    for _ in range(200):
        check_fixture(rng)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_score_invariants(seed):
    rng = random.Random(seed)
    commits, elems, hist, susp, cbic = random_fixture(rng)
    ev = evolve(hist)
    rep = score_commits(set(elems), SuspiciousnessMap(susp), ev, cbic)
    assert {r.id for r in rep.ranked} == cbic
    assert all(r.score >= 0 for r in rep.ranked)
    # lambda = 0 removes any age effect: each commit gets the plain vote sum
    flat = score_commits(set(elems), SuspiciousnessMap(susp), ev, cbic, VotingConfig(lam=0.0))
    for r in rep.ranked:
        assert r.score <= flat.score(r.id) + 1e-12
    # monotone in the vote: raising lam never raises a score
    steep = score_commits(set(elems), SuspiciousnessMap(susp), ev, cbic, VotingConfig(lam=0.5))
    for r in steep.ranked:
        assert r.score <= rep.score(r.id) + 1e-12
