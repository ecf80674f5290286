"""Spectrum-based suspiciousness of statements and their FL ranks."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import EmptyDomain, NoFailingTests
from .model import CodeElement, CoverageMatrix


class Tie(str, enum.Enum):
    MAX = "max"
    DENSE = "dense"


@dataclass(frozen=True)
class SuspiciousnessMap:
    scores: Mapping[CodeElement, float]
    formula: str = "ochiai"

    def __post_init__(self):
        if any(v < 0 for v in self.scores.values()):
            raise ValueError("suspiciousness scores must be non-negative")
        ordered = sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0].file, kv[0].line))
        object.__setattr__(self, "scores", dict(ordered))

    def __getitem__(self, e: CodeElement) -> float:
        return self.scores.get(e, 0.0)

    def positive(self) -> dict[CodeElement, float]:
        return {e: s for e, s in self.scores.items() if s > 0}


def _counts(cov: CoverageMatrix):
    failing = {t.full_name for t in cov.failing}
    if not failing:
        raise NoFailingTests(stage="sbfl")
    ef, ep = Counter(), Counter()
    for name, elements in cov.covered.items():
        (ef if name in failing else ep).update(elements)
    return ef, ep, len(failing), len(cov.tests) - len(failing)


def ochiai(cov: CoverageMatrix) -> SuspiciousnessMap:
    ef, ep, n_fail, _ = _counts(cov)
    scores = {}
    for e in cov.elements():
        f = ef[e]
        scores[e] = f / math.sqrt(n_fail * (f + ep[e])) if f else 0.0
    return SuspiciousnessMap(scores, "ochiai")


def tarantula(cov: CoverageMatrix) -> SuspiciousnessMap:
    ef, ep, n_fail, n_pass = _counts(cov)
    scores = {}
    for e in cov.elements():
        f = ef[e] / n_fail
        p = ep[e] / n_pass if n_pass else 0.0
        scores[e] = f / (f + p) if f else 0.0
    return SuspiciousnessMap(scores, "tarantula")


FORMULAS: dict[str, Callable[[CoverageMatrix], SuspiciousnessMap]] = {
    "ochiai": ochiai,
    "tarantula": tarantula,
}


def rank_elements(susp: SuspiciousnessMap, tau: Tie | str = Tie.MAX) -> dict[CodeElement, int]:
    """Rank the positively scored elements, best first.

    ``MAX`` gives every member of a tie group the worst position of the
    group; ``DENSE`` numbers distinct score values 1, 2, 3, ...
    """
    tau = Tie(tau)
    pos = susp.positive()
    if not pos:
        raise EmptyDomain("no element has a positive suspiciousness score")
    distinct = sorted(set(pos.values()), reverse=True)
    if tau is Tie.DENSE:
        level = {s: i + 1 for i, s in enumerate(distinct)}
    else:
        counts = Counter(pos.values())
        level, running = {}, 0
        for s in distinct:
            running += counts[s]
            level[s] = running
    return {e: level[s] for e, s in pos.items()}
