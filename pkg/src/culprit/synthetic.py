"""Synthetic subjects with a planted bug-inducing commit."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coverage import matrix_to_dict
from .history import evolve_map_to_dict
from .model import CodeElement, CommitRecord, CoverageMatrix, EvolveMap, Outcome
from .scoring import rank_commits


@dataclass
class ScoreSpace:
    """A scored reduced space embedded in a longer history (both newest first)."""

    full: list[str]
    reduced: list[str]
    scores: dict[str, float]
    bic: str

    @property
    def bic_rank(self) -> int:
        return next(r for c, _, r in rank_commits(self.scores) if c == self.bic)


def score_space(
    rng: np.random.Generator,
    size: int,
    *,
    full_size: int | None = None,
    bias: float = 0.3,
    noise: float = 0.5,
    bic_top: int | None = 3,
) -> ScoreSpace:
    """Recency-biased scores over ``size`` commits.

    The commit at recency index ``i`` scores ``exp(-bias * i)`` times
    log-normal noise. The BIC is drawn uniformly from the commits whose
    max-tiebreak rank is at most ``bic_top`` (any commit when ``None``).
    The reduced commits sit at random positions of a ``full_size`` history.
    """
    full_size = full_size or size
    if full_size < size:
        raise ValueError("full history cannot be shorter than the reduced space")
    positions = np.sort(rng.choice(full_size, size=size, replace=False))
    full = [f"c{i:05d}" for i in range(full_size)]
    reduced = [full[p] for p in positions]
    raw = np.exp(-bias * np.arange(size)) * rng.lognormal(0.0, noise, size)
    scores = {c: float(s) for c, s in zip(reduced, raw)}
    ranked = rank_commits(scores)
    pool = [c for c, _, r in ranked if bic_top is None or r <= bic_top]
    bic = pool[int(rng.integers(len(pool)))]
    return ScoreSpace(full, reduced, scores, bic)


@dataclass
class SyntheticSubject:
    id: str
    coverage: CoverageMatrix
    evolve: EvolveMap
    true_bic: str
    commits: list[CommitRecord]
    style: set[str]

    def write(self, root) -> Path:
        d = Path(root) / self.id
        d.mkdir(parents=True, exist_ok=True)
        (d / "coverage.json").write_text(json.dumps(matrix_to_dict(self.coverage), indent=1) + "\n")
        (d / "history.json").write_text(
            json.dumps(evolve_map_to_dict(self.evolve, self.style), indent=1, sort_keys=True) + "\n")
        meta = {
            "id": self.id,
            "true_bic": self.true_bic,
            "coverage": "coverage.json",
            "history": "history.json",
            "commits": [{"id": c.id, "time": c.time, "order": c.order} for c in self.commits],
        }
        (d / "subject.json").write_text(json.dumps(meta, indent=1) + "\n")
        return d


def synthetic_subject(
    rng: np.random.Generator,
    sid: str = "S0",
    *,
    n_commits: int = 60,
    n_methods: int = 12,
    statements: int = 5,
    edits_per_method: int = 3,
    n_passing: int = 15,
    covered_methods: int = 4,
    bic_recency: float = 0.3,
    style_rate: float = 0.1,
) -> SyntheticSubject:
    """A full subject: coverage matrix, method histories, planted BIC.

    One method is faulty: the BIC edits it and the failing test reaches its
    statements, which passing tests rarely cover. ``bic_recency`` in [0, 1]
    places the BIC that far back from the newest commit.
    """
    commits = [CommitRecord(f"{sid}-{i:04d}", 1_600_000_000 + 3600 * i, i) for i in range(n_commits)]
    newest = n_commits - 1
    bic_idx = int(round(newest - bic_recency * newest * 0.9))
    bic_idx = min(max(bic_idx, n_commits // 10 + 1), newest)
    faulty = 0

    history: dict[CodeElement, list[CommitRecord]] = {}
    methods: list[list[CodeElement]] = []
    for m in range(n_methods):
        path = f"src/pkg/Unit{m}.java"
        start = 10
        span = (start, start + statements + 1)
        elems = [CodeElement(path, start + 1 + k, span) for k in range(statements)]
        methods.append(elems)
        created = int(rng.integers(0, max(1, n_commits // 10)))
        edits = set(rng.choice(np.arange(created + 1, n_commits), size=min(edits_per_method, n_commits - created - 1),
                               replace=False).tolist()) if created + 1 < n_commits else set()
        ids = {created, *edits}
        if m == faulty:
            ids.add(bic_idx)
        for e in elems:
            history[e] = [commits[i] for i in ids]

    cover = [e for e in methods[faulty]]
    others = rng.choice(np.arange(1, n_methods), size=min(covered_methods - 1, n_methods - 1), replace=False)
    for m in others:
        cover.extend(methods[int(m)])
    records = [("test.pkg.TestUnit0::testFails", Outcome.FAIL, cover)]
    for t in range(n_passing):
        picks = rng.choice(np.arange(n_methods), size=3, replace=False)
        elems = []
        for m in picks:
            ms = methods[int(m)]
            if int(m) == faulty:
                # passing runs skip the faulty statements but reach the rest
                elems.extend(ms[statements // 2 + 1:])
            else:
                elems.extend(ms)
        records.append((f"test.pkg.TestUnit{int(picks[0])}::t{t}", Outcome.PASS, elems))
    coverage = CoverageMatrix.from_records(records)

    ev = EvolveMap.from_records({e: history[e] for e in cover})
    in_space = set(ev.commits) - {commits[bic_idx].id}
    style = {c for c in sorted(in_space) if rng.random() < style_rate}
    return SyntheticSubject(sid, coverage, ev, commits[bic_idx].id, commits[::-1], style)
