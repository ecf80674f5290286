"""Ranking metrics and a replayable benchmark harness.

A dataset is a directory of subject directories. Each subject holds a
``subject.json``::

    {"id": "Lang-46", "true_bic": "<commit>",
     "coverage": "coverage.json", "history": "history.json",
     "commits": [{"id": ..., "time": ..., "order": ...}, ...]}

``coverage`` uses the matrix JSON format and ``history`` the serialized
Evolve format. ``commits`` lists the full history C; when omitted, C is the
set of commits appearing in the serialized history.
"""

from __future__ import annotations

import csv
import json
import logging
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bisect import compare_costs
from .coverage import load_coverage
from .errors import EmptyInput, ParseError
from .history import SerializedAdapter
from .model import CommitRecord
from .pipeline import run_pipeline
from .scoring import DEFAULT, Mode, VotingConfig

log = logging.getLogger(__name__)

ACCURACY_AT = (1, 2, 3, 5, 10)


def mrr(ranks: Iterable[float]) -> float:
    ranks = list(ranks)
    if not ranks:
        raise EmptyInput("no ranks to average")
    if any(r < 1 for r in ranks):
        raise ValueError("ranks start at 1")
    return float(np.mean([1.0 / r for r in ranks]))


def accuracy_at(ranks: Iterable[float], n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(1 for r in ranks if r <= n)


def random_baseline_expected_rank(space_size: int) -> float:
    """Expected BIC rank when the search space is shuffled uniformly."""
    if space_size < 1:
        raise ValueError("space_size must be >= 1")
    return (1 + space_size) / 2


def summarize(ranks: Sequence[float]) -> dict:
    return {"mrr": mrr(ranks), **{f"acc@{n}": accuracy_at(ranks, n) for n in ACCURACY_AT}}


@dataclass
class LabelledSubject:
    id: str
    coverage: Path
    history: Path
    true_bic: str
    commits: list[CommitRecord] | None = None

    def full_history(self, adapter: SerializedAdapter) -> list[str]:
        records = self.commits or list(adapter.evolve.commits.values())
        return [r.id for r in sorted(records, key=lambda r: r.sort_key, reverse=True)]


def load_subject(path) -> LabelledSubject:
    path = Path(path)
    meta_file = path / "subject.json"
    try:
        meta = json.loads(meta_file.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read subject metadata: {exc}", path=meta_file) from None
    commits = None
    if "commits" in meta:
        commits = [CommitRecord(c["id"], int(c["time"]), int(c.get("order", 0))) for c in meta["commits"]]
    subject = LabelledSubject(
        id=meta.get("id", path.name),
        coverage=path / meta.get("coverage", "coverage.json"),
        history=path / meta.get("history", "history.json"),
        true_bic=meta["true_bic"],
        commits=commits,
    )
    known = {c.id for c in commits} if commits else set(SerializedAdapter(subject.history).evolve.commits)
    if subject.true_bic not in known:
        raise ParseError(f"true_bic {subject.true_bic} is not in the subject's history", path=meta_file)
    return subject


def load_dataset(root) -> list[LabelledSubject]:
    root = Path(root)
    return [load_subject(p) for p in sorted(root.iterdir()) if (p / "subject.json").exists()]


@dataclass
class BenchmarkConfig:
    voting: VotingConfig = DEFAULT
    ablations: tuple[str, ...] = ("skip-stage2", "equal", "score-only", "max-aggr")
    select_relevant: bool = False
    bisection: bool = True
    workers: int = 4

    def to_dict(self) -> dict:
        return {"voting": self.voting.to_dict(), "ablations": list(self.ablations),
                "select_relevant": self.select_relevant, "bisection": self.bisection}


def _variants(cfg: BenchmarkConfig) -> dict[str, tuple[VotingConfig, bool]]:
    out = {"method": (cfg.voting, False)}
    for name in cfg.ablations:
        if name == "skip-stage2":
            out[name] = (cfg.voting, True)
        else:
            out[name] = (replace(cfg.voting, mode=Mode(name)), False)
    return out


@dataclass
class SubjectResult:
    id: str
    size_c: int
    size_cf: int
    size_cbic: int
    ranks: dict[str, float]
    bisect: dict | None = None
    report: dict | None = None
    error: str | None = None


def _bic_rank(report, bic: str, size_c: int) -> int:
    rank = report.rank_of(bic)
    # outside the space the BIC scores 0 and ties with every other zero
    return rank if rank is not None else size_c


def evaluate_subject(subject: LabelledSubject, cfg: BenchmarkConfig) -> SubjectResult:
    try:
        cov = load_coverage(subject.coverage)
        adapter = SerializedAdapter(subject.history)
        full = subject.full_history(adapter)
        ranks, main = {}, None
        for name, (voting, skip2) in _variants(cfg).items():
            res = run_pipeline(cov, adapter, "HEAD", voting, evolve=adapter.evolve,
                               skip_stage2=skip2, select_relevant=cfg.select_relevant)
            ranks[name] = _bic_rank(res.report, subject.true_bic, len(full))
            if name == "method":
                main = res
        n = len(main.cbic)
        ranks["random"] = random_baseline_expected_rank(n) if n else float(len(full))
        ranks["lower-bound"] = float(n) if n else float(len(full))
        costs = None
        if cfg.bisection and main.report.score(subject.true_bic) > 0:
            c = compare_costs(main.report.newest_first(), main.report.scores(), subject.true_bic, full)
            costs = {"weighted": c.weighted, "standard_reduced": c.standard_reduced,
                     "standard_full": c.standard_full}
        return SubjectResult(subject.id, len(full), len(main.cf), n, ranks, costs,
                             main.report.to_dict(explain=True))
    except Exception as exc:  # isolate per-subject failures
        log.warning("subject %s failed: %s", subject.id, exc)
        return SubjectResult(subject.id, 0, 0, 0, {}, error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc()}")


@dataclass
class BenchmarkReport:
    config: BenchmarkConfig
    subjects: list[SubjectResult]
    aggregate: dict = field(default_factory=dict)
    bisection: dict = field(default_factory=dict)
    dominance_ok: bool = True

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "aggregate": self.aggregate,
            "bisection": self.bisection,
            "dominance_ok": self.dominance_ok,
            "subjects": [
                {"id": s.id, "C": s.size_c, "C_F": s.size_cf, "C_BIC": s.size_cbic,
                 "ranks": s.ranks, "bisect": s.bisect, "error": s.error}
                for s in self.subjects
            ],
        }

    def write(self, out_dir):
        out = Path(out_dir)
        (out / "trace").mkdir(parents=True, exist_ok=True)
        (out / "results.json").write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        methods = list(self.aggregate)
        with open(out / "results.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["subject", "C", "C_F", "C_BIC", *methods,
                        "weighted_iters", "standard_reduced_iters", "standard_full_iters", "error"])
            for s in self.subjects:
                b = s.bisect or {}
                w.writerow([s.id, s.size_c, s.size_cf, s.size_cbic,
                            *(s.ranks.get(m, "") for m in methods),
                            b.get("weighted", ""), b.get("standard_reduced", ""), b.get("standard_full", ""),
                            (s.error or "").splitlines()[0] if s.error else ""])
        for s in self.subjects:
            if s.report is not None:
                (out / "trace" / f"{s.id}.json").write_text(
                    json.dumps({"report": s.report, "bisect": s.bisect}, indent=1, sort_keys=True) + "\n")


def run_benchmark(subjects: Sequence[LabelledSubject], config: BenchmarkConfig | None = None) -> BenchmarkReport:
    cfg = config or BenchmarkConfig()
    if cfg.workers > 1 and len(subjects) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda s: evaluate_subject(s, cfg), subjects))
    else:
        results = [evaluate_subject(s, cfg) for s in subjects]
    ok = [r for r in results if r.error is None]
    report = BenchmarkReport(cfg, results)
    if ok:
        for name in ok[0].ranks:
            report.aggregate[name] = summarize([r.ranks[name] for r in ok])
        report.dominance_ok = (
            report.aggregate["lower-bound"]["mrr"]
            <= report.aggregate["random"]["mrr"]
            <= report.aggregate["method"]["mrr"]
        )
        costs = [r.bisect for r in ok if r.bisect]
        if costs:
            w = np.array([c["weighted"] for c in costs])
            sr = np.array([c["standard_reduced"] for c in costs])
            sf = np.array([c["standard_full"] for c in costs])
            report.bisection = {
                "subjects": len(costs),
                "mean_saved_vs_full": float(np.mean(sf - w)),
                "mean_saved_vs_reduced": float(np.mean(sr - w)),
                "improved_vs_full": int(np.sum(sf > w)),
                "worse_vs_full": int(np.sum(sf < w)),
                "improved_vs_reduced": int(np.sum(sr > w)),
                "worse_vs_reduced": int(np.sum(sr < w)),
            }
    return report
