"""Commit scoring: rank-based voting with per-element depth decay.

Each suspicious element casts a vote for every in-space commit in its
history. The vote is ``(alpha * susp + 1 - alpha) / rank`` and shrinks by a
factor ``(1 - lam)`` for every newer in-space commit that also touched the
element. A commit's score is the sum of the votes it receives.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

from .errors import EmptyDomain
from .model import CodeElement, EvolveMap
from .sbfl import SuspiciousnessMap, Tie, rank_elements


class Mode(str, enum.Enum):
    VOTE = "vote"
    EQUAL = "equal"
    SCORE_ONLY = "score-only"
    MAX_AGGR = "max-aggr"


@dataclass(frozen=True)
class VotingConfig:
    alpha: int = 0
    tau: Tie = Tie.MAX
    lam: float = 0.1
    mode: Mode = Mode.VOTE

    def __post_init__(self):
        object.__setattr__(self, "tau", Tie(self.tau))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.alpha not in (0, 1):
            raise ValueError(f"alpha must be 0 or 1, got {self.alpha!r}")
        object.__setattr__(self, "alpha", int(self.alpha))
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {self.lam!r}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "tau": self.tau.value, "lam": self.lam, "mode": self.mode.value}

    @classmethod
    def from_dict(cls, d: Mapping) -> VotingConfig:
        return cls(**{k: d[k] for k in ("alpha", "tau", "lam", "mode") if k in d})


DEFAULT = VotingConfig(alpha=0, tau=Tie.MAX, lam=0.1)
# same-day batches carry no age signal, so decay is disabled
BATCH = VotingConfig(alpha=1, tau=Tie.MAX, lam=0.0)


def vote(e: CodeElement, susp: SuspiciousnessMap, ranks: Mapping[CodeElement, int], config: VotingConfig = DEFAULT) -> float:
    """Voting power of ``e`` under ``config.mode``.

    Elements with no FL rank (score 0) carry no vote in ``VOTE`` mode.
    """
    if config.mode is Mode.EQUAL:
        return 1.0
    if config.mode in (Mode.SCORE_ONLY, Mode.MAX_AGGR):
        return susp[e]
    rank = ranks.get(e)
    if rank is None:
        return 0.0
    return (config.alpha * susp[e] + (1 - config.alpha)) / rank


def depth(e: CodeElement, c: str, ev: EvolveMap, cbic: Iterable[str]) -> int:
    """Number of in-space commits in the history of ``e`` newer than ``c``."""
    space = set(cbic)
    key = ev.sort_key(c)
    return sum(1 for other in ev.history[e] if other in space and ev.sort_key(other) > key)


def elements_by_commit(ef: Iterable[CodeElement], ev: EvolveMap) -> dict[str, set[CodeElement]]:
    out: dict[str, set[CodeElement]] = defaultdict(set)
    for e in ef:
        for c in ev.history.get(e, ()):
            out[c].add(e)
    return out


@dataclass(frozen=True)
class Contribution:
    element: CodeElement
    vote: float
    depth: int
    contribution: float


def _contributions(ef, susp, ranks, ev, cbic, config) -> dict[str, list[Contribution]]:
    space = set(cbic)
    out: dict[str, list[Contribution]] = {c: [] for c in space}
    for e in sorted(ef):
        in_space = [c for c in ev.history.get(e, ()) if c in space]
        v = vote(e, susp, ranks, config)
        for d, c in enumerate(in_space):
            weight = 1.0 if config.mode is Mode.MAX_AGGR else (1.0 - config.lam) ** d
            out[c].append(Contribution(e, v, d, v * weight))
    return out


def _aggregate(contribs: list[Contribution], mode: Mode) -> float:
    if not contribs:
        return 0.0
    if mode is Mode.MAX_AGGR:
        return max(x.contribution for x in contribs)
    return sum(x.contribution for x in contribs)


def commit_score(c, susp, ranks, ev, cbic, config: VotingConfig = DEFAULT, ef=None) -> float:
    ef = set(ev.history) if ef is None else set(ef)
    touched = {e for e in ef if c in ev.history.get(e, ())}
    return _aggregate(_contributions(touched, susp, ranks, ev, cbic, config).get(c, []), config.mode)


@dataclass(frozen=True)
class RankedCommit:
    id: str
    score: float
    rank: int
    time: int
    order: int


def rank_commits(scores: Mapping[str, float], sort_key=None) -> list[tuple[str, float, int]]:
    """Max-tiebreak ranking, best first.

    Tied commits share the worst position of their group. ``sort_key``
    orders commits inside a tie group (newest first) for display.
    """
    key = sort_key or (lambda c: c)
    ordered = sorted(scores, key=key, reverse=True)
    ordered.sort(key=lambda c: scores[c], reverse=True)
    worst: dict[float, int] = {}
    for pos, c in enumerate(ordered, 1):
        worst[scores[c]] = pos
    return [(c, scores[c], worst[scores[c]]) for c in ordered]


@dataclass
class ScoreReport:
    """Ranked commits of the final search space.

    Commits outside ``ranked`` implicitly score 0 (``zero_tail``).
    """

    ranked: list[RankedCommit]
    per_commit_votes: dict[str, list[Contribution]]
    config: VotingConfig
    excluded: list[str] = field(default_factory=list)
    zero_tail: bool = True

    def score(self, commit_id: str) -> float:
        for r in self.ranked:
            if r.id == commit_id:
                return r.score
        return 0.0

    def rank_of(self, commit_id: str) -> int | None:
        for r in self.ranked:
            if r.id == commit_id:
                return r.rank
        return None

    def scores(self) -> dict[str, float]:
        return {r.id: r.score for r in self.ranked}

    def newest_first(self) -> list[str]:
        return [r.id for r in sorted(self.ranked, key=lambda r: (r.time, r.order), reverse=True)]

    def to_dict(self, explain: bool = False) -> dict:
        doc = {
            "config": self.config.to_dict(),
            "zero_tail": self.zero_tail,
            "excluded": list(self.excluded),
            "ranked": [asdict(r) for r in self.ranked],
        }
        if explain:
            doc["votes"] = {
                c: [
                    {"file": x.element.file, "line": x.element.line, "vote": x.vote,
                     "depth": x.depth, "contribution": x.contribution}
                    for x in rows
                ]
                for c, rows in self.per_commit_votes.items()
            }
        return doc

    def to_json(self, explain: bool = False) -> str:
        return json.dumps(self.to_dict(explain), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["commit", "score", "rank"])
        for r in self.ranked:
            w.writerow([r.id, repr(r.score), r.rank])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, doc: Mapping) -> ScoreReport:
        ranked = [RankedCommit(**r) for r in doc["ranked"]]
        votes = {
            c: [Contribution(CodeElement(x["file"], x["line"]), x["vote"], x["depth"], x["contribution"]) for x in rows]
            for c, rows in doc.get("votes", {}).items()
        }
        return cls(ranked, votes, VotingConfig.from_dict(doc["config"]),
                   list(doc.get("excluded", [])), bool(doc.get("zero_tail", True)))


def score_commits(
    ef: Iterable[CodeElement],
    susp: SuspiciousnessMap,
    ev: EvolveMap,
    cbic: Iterable[str],
    config: VotingConfig = DEFAULT,
    excluded: Iterable[str] = (),
) -> ScoreReport:
    """Score every commit of ``cbic`` and rank them."""
    ef = set(ef)
    cbic = set(cbic)
    try:
        ranks = rank_elements(susp, config.tau) if config.mode is Mode.VOTE else {}
    except EmptyDomain:
        ranks = {}
    contribs = _contributions(ef, susp, ranks, ev, cbic, config)
    scores = {c: _aggregate(contribs[c], config.mode) for c in cbic}
    ranked = [
        RankedCommit(c, s, r, *ev.sort_key(c))
        for c, s, r in rank_commits(scores, ev.sort_key)
    ]
    return ScoreReport(ranked, contribs, config, sorted(excluded))
