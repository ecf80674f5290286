"""Domain types and the Cover / Evolve relations consumed by every stage."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import MissingHistory, NoFailingTests


class Outcome(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True, order=True)
class CodeElement:
    """A statement, identified by ``(file, line)`` in the snapshot under test.

    ``enclosing_span`` is the ``(start, end)`` line range of the method that
    contains the statement. It does not take part in equality or hashing.
    """

    file: str
    line: int
    enclosing_span: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.file:
            raise ValueError("CodeElement.file must be non-empty")
        if self.line < 1:
            raise ValueError(f"line must be >= 1, got {self.line}")
        if self.enclosing_span is not None:
            start, end = self.enclosing_span
            if not start <= self.line <= end:
                raise ValueError(
                    f"span {self.enclosing_span} does not enclose line {self.line}"
                )

    @property
    def span(self) -> tuple[int, int]:
        """Span used for history tracing; degrades to the line itself."""
        return self.enclosing_span or (self.line, self.line)

    def __str__(self):
        return f"{self.file}:{self.line}"


@dataclass(frozen=True)
class TestCase:
    full_name: str
    outcome: Outcome

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not self.full_name:
            raise ValueError("test name must be non-empty")
        object.__setattr__(self, "outcome", Outcome(self.outcome))

    @property
    def failed(self) -> bool:
        return self.outcome is Outcome.FAIL


@dataclass(frozen=True)
class CoverageMatrix:
    """Per-test outcomes plus the set of elements each test covers."""

    tests: tuple[TestCase, ...]
    covered: Mapping[str, frozenset[CodeElement]]

    def __post_init__(self):
        names = [t.full_name for t in self.tests]
        if len(set(names)) != len(names):
            seen = set()
            dup = next(n for n in names if n in seen or seen.add(n))
            raise ValueError(f"duplicate test name {dup!r}")
        unknown = set(self.covered) - set(names)
        if unknown:
            raise ValueError(f"coverage for unknown tests: {sorted(unknown)}")
        object.__setattr__(self, "tests", tuple(self.tests))
        object.__setattr__(
            self,
            "covered",
            {n: frozenset(self.covered.get(n, ())) for n in names},
        )

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str | Outcome, Iterable[CodeElement]]]):
        tests, covered = [], {}
        for name, outcome, elements in records:
            tests.append(TestCase(name, Outcome(outcome)))
            covered[name] = frozenset(elements)
        return cls(tuple(tests), covered)

    @property
    def failing(self) -> list[TestCase]:
        return [t for t in self.tests if t.failed]

    @property
    def passing(self) -> list[TestCase]:
        return [t for t in self.tests if not t.failed]

    def elements(self) -> frozenset[CodeElement]:
        return frozenset().union(*self.covered.values()) if self.covered else frozenset()

    def pairs(self) -> set[tuple[str, CodeElement]]:
        """The Cover relation as explicit ``(test, element)`` pairs."""
        return {(t, e) for t, es in self.covered.items() for e in es}

    def require_failure(self):
        if not any(t.failed for t in self.tests):
            raise NoFailingTests()

    def restrict(self, names: Iterable[str]) -> CoverageMatrix:
        keep = set(names)
        tests = tuple(t for t in self.tests if t.full_name in keep)
        return CoverageMatrix(tests, {t.full_name: self.covered[t.full_name] for t in tests})


@dataclass(frozen=True)
class FileChange:
    """One file touched by a commit. ``hunks`` holds ``((old_start, old_len), (new_start, new_len))``."""

    old_path: str | None
    new_path: str | None
    hunks: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = ()


@dataclass(frozen=True)
class CommitRecord:
    id: str
    time: int
    order: int = 0
    message: str = ""
    changed_files: tuple[FileChange, ...] = ()

    @property
    def sort_key(self) -> tuple[int, int]:
        # committer time first, topological position breaks ties
        return (self.time, self.order)

    def touched_paths(self) -> set[str]:
        return {fc.new_path for fc in self.changed_files if fc.new_path}

    def merged(self, other: CommitRecord) -> CommitRecord:
        if other.id != self.id:
            raise ValueError("cannot merge different commits")
        files = tuple(dict.fromkeys(self.changed_files + other.changed_files))
        return CommitRecord(self.id, self.time, self.order, self.message or other.message, files)


@dataclass(frozen=True)
class EvolveMap:
    """Change history of every traced element, newest commit first.

    ``commits`` resolves every id appearing in ``history`` to its record.
    """

    history: Mapping[CodeElement, tuple[str, ...]]
    commits: Mapping[str, CommitRecord]

    def __post_init__(self):
        history = {e: tuple(ids) for e, ids in self.history.items()}
        for e, ids in history.items():
            for cid in ids:
                if cid not in self.commits:
                    raise ValueError(f"history of {e} references unknown commit {cid!r}")
            keys = [self.commits[c].sort_key for c in ids]
            if any(a <= b for a, b in zip(keys, keys[1:])):
                raise ValueError(f"history of {e} is not strictly newest-first")
        object.__setattr__(self, "history", history)
        object.__setattr__(self, "commits", dict(self.commits))

    @classmethod
    def from_records(cls, history: Mapping[CodeElement, Iterable[CommitRecord]]) -> EvolveMap:
        """Build from per-element record lists; sorts each list newest-first."""
        commits: dict[str, CommitRecord] = {}
        hist = {}
        for e, records in history.items():
            records = list(records)
            for r in records:
                commits[r.id] = commits[r.id].merged(r) if r.id in commits else r
            ordered = sorted({r.id for r in records}, key=lambda c: commits[c].sort_key, reverse=True)
            hist[e] = tuple(ordered)
        return cls(hist, commits)

    def pairs(self) -> set[tuple[str, CodeElement]]:
        """The Evolve relation as explicit ``(commit, element)`` pairs."""
        return {(c, e) for e, ids in self.history.items() for c in ids}

    def sort_key(self, commit_id: str) -> tuple[int, int]:
        return self.commits[commit_id].sort_key

    def newest_first(self, commit_ids: Iterable[str]) -> list[str]:
        return sorted(set(commit_ids), key=self.sort_key, reverse=True)


def suspicious_elements(cov: CoverageMatrix) -> frozenset[CodeElement]:
    """Elements covered by at least one failing test."""
    cov.require_failure()
    out: set[CodeElement] = set()
    for t in cov.failing:
        out |= cov.covered[t.full_name]
    return frozenset(out)


def candidate_commits(ef: Iterable[CodeElement], ev: EvolveMap) -> frozenset[str]:
    """Commits in the history of at least one element of ``ef``."""
    out: set[str] = set()
    for e in ef:
        if e not in ev.history:
            raise MissingHistory(e)
        out.update(ev.history[e])
    return frozenset(out)
