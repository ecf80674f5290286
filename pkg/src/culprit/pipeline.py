"""The three-stage ranking pipeline: reduce, filter style commits, score."""

from __future__ import annotations

from dataclasses import dataclass, field

from .coverage import select_relevant_tests
from .errors import CulpritError
from .history import build_evolve_map
from .model import CodeElement, CoverageMatrix, EvolveMap, candidate_commits, suspicious_elements
from .sbfl import FORMULAS, SuspiciousnessMap
from .scoring import DEFAULT, ScoreReport, VotingConfig, score_commits
from .style import style_commits


@dataclass
class PipelineResult:
    coverage: CoverageMatrix
    ef: frozenset[CodeElement]
    susp: SuspiciousnessMap
    evolve: EvolveMap
    cf: frozenset[str]
    style: frozenset[str]
    cbic: frozenset[str]
    report: ScoreReport
    stats: dict = field(default_factory=dict)


def _stage(name):
    def wrap(fn):
        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except CulpritError as exc:
                exc.stage = name
                raise
        return inner
    return wrap


def run_pipeline(
    cov: CoverageMatrix,
    adapter=None,
    until: str = "HEAD",
    config: VotingConfig = DEFAULT,
    *,
    evolve: EvolveMap | None = None,
    skip_stage2: bool = False,
    select_relevant: bool = False,
    formula: str = "ochiai",
    extensions=None,
    workers: int = 4,
) -> PipelineResult:
    """Rank the commits that may have introduced the observed failure.

    Either ``adapter`` or a pre-built ``evolve`` map must be given; Stage 2
    needs an adapter.
    """
    if select_relevant:
        cov = _stage("coverage")(select_relevant_tests)(cov)
    ef = _stage("stage1")(suspicious_elements)(cov)
    if evolve is None:
        if adapter is None:
            raise ValueError("need an adapter or a pre-built EvolveMap")
        evolve = _stage("history")(build_evolve_map)(adapter, ef, until, workers)
    cf = _stage("stage1")(candidate_commits)(ef, evolve)
    if skip_stage2 or adapter is None:
        style = frozenset()
    else:
        style = frozenset(_stage("stage2")(style_commits)(cf, ef, evolve, adapter, extensions))
    cbic = cf - style
    susp = _stage("stage3")(FORMULAS[formula])(cov)
    report = _stage("stage3")(score_commits)(ef, susp, evolve, cbic, config, excluded=style)
    stats = {"tests": len(cov.tests), "failing": len(cov.failing), "ef": len(ef),
             "cf": len(cf), "style": len(style), "cbic": len(cbic)}
    return PipelineResult(cov, ef, susp, evolve, cf, style, cbic, report, stats)
