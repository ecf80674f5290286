"""Weighted and standard bisection over a newest-first commit list.

The weighted variant picks the pivot that splits the remaining commit score
mass as evenly as possible; with uniform scores it reduces to the ordinary
midpoint rule. Both variants treat the position just past the oldest
candidate as known-good and the newest candidate as known-bad.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Iterable, Mapping, Sequence, TextIO

from .errors import EmptySpace, InconsistentOracle, OracleAbort

Oracle = Callable[[str], bool]
"""Returns True when the snapshot at ``commit`` contains the bug."""


@dataclass
class BisectResult:
    bic: str
    iterations: int
    trace: list[tuple[int, bool]] = field(default_factory=list)
    ordered: list[str] = field(default_factory=list)

    def trace_records(self) -> list[dict]:
        return [
            {"pivot": self.ordered[i], "verdict": "bad" if bad else "good"}
            for i, bad in self.trace
        ]


def _weighted_pivot(prefix: Sequence[Fraction], bad: int, good: int) -> int:
    # prefix[i] = sum of scores[0:i]; S(a, b) = prefix[b + 1] - prefix[a]
    best, best_diff = bad + 1, None
    for i in range(bad + 1, good):
        left = prefix[i] - prefix[bad]
        right = prefix[good] - prefix[i]
        diff = abs(left - right)
        if best_diff is None or diff < best_diff:
            best, best_diff = i, diff
    return best


def _midpoint(bad: int, good: int) -> int:
    return (bad + good) // 2


def _search(ordered: list[str], oracle: Oracle, pick, confirm_single: bool) -> BisectResult:
    bad, good = 0, len(ordered)
    trace: list[tuple[int, bool]] = []
    if len(ordered) == 1 and confirm_single:
        verdict = bool(oracle(ordered[0]))
        trace.append((0, verdict))
        if not verdict:
            raise InconsistentOracle(
                f"sole candidate {ordered[0]} reported good", _records(ordered, trace)
            )
    while good > bad + 1:
        pivot = pick(bad, good)
        assert bad < pivot < good
        verdict = bool(oracle(ordered[pivot]))
        trace.append((pivot, verdict))
        if verdict:
            bad = pivot
        else:
            good = pivot
    return BisectResult(ordered[bad], len(trace), trace, list(ordered))


def _records(ordered, trace):
    return [{"pivot": ordered[i], "verdict": "bad" if v else "good"} for i, v in trace]


def weighted_bisect(
    commits: Sequence[str],
    scores: Mapping[str, float],
    oracle: Oracle,
    *,
    confirm_single: bool = False,
) -> BisectResult:
    """Find the oldest bad commit, pivoting on score mass.

    ``commits`` must be ordered newest first. Commits scoring zero are
    dropped before the search starts.
    """
    ordered = [c for c in commits if scores.get(c, 0.0) > 0]
    if not ordered:
        raise EmptySpace()
    # exact rationals so that equal half-masses compare as true ties
    prefix = [Fraction(0), *accumulate(Fraction(scores[c]) for c in ordered)]
    return _search(ordered, oracle, lambda b, g: _weighted_pivot(prefix, b, g), confirm_single)


def standard_bisect(commits: Sequence[str], oracle: Oracle, *, confirm_single: bool = False) -> BisectResult:
    ordered = list(commits)
    if not ordered:
        raise EmptySpace("no commits to bisect")
    return _search(ordered, oracle, _midpoint, confirm_single)


class TableOracle:
    """Verdicts looked up from a precomputed ``commit -> bad?`` table."""

    def __init__(self, verdicts: Mapping[str, bool]):
        self.verdicts = dict(verdicts)
        self.calls = 0

    @classmethod
    def planted(cls, ordered: Sequence[str], bic: str) -> TableOracle:
        """Monotone table for a newest-first history whose BIC is ``bic``."""
        idx = list(ordered).index(bic)
        return cls({c: i <= idx for i, c in enumerate(ordered)})

    def check_monotone(self, ordered: Sequence[str]):
        seen_good = False
        for c in ordered:
            if not self.verdicts[c]:
                seen_good = True
            elif seen_good:
                raise InconsistentOracle(f"{c} is bad but a newer commit is good")

    def __call__(self, commit: str) -> bool:
        self.calls += 1
        try:
            return self.verdicts[commit]
        except KeyError:
            raise OracleAbort(f"no verdict recorded for {commit}") from None


class CommandOracle:
    """Run a shell command per probe: exit 0 is good, 1 is bad, anything else aborts.

    ``{commit}`` in the template is replaced by the commit id. When ``repo``
    is given the command runs inside a detached scratch worktree checked out
    at the probed commit.
    """

    def __init__(self, template: str, repo=None, git: str = "git"):
        self.template = template
        self.repo = repo
        self.git = git

    def _run(self, commit: str, cwd) -> int:
        cmd = self.template.replace("{commit}", shlex.quote(commit))
        return subprocess.run(cmd, shell=True, cwd=cwd).returncode

    def __call__(self, commit: str) -> bool:
        if self.repo is None:
            code = self._run(commit, None)
        else:
            with tempfile.TemporaryDirectory(prefix="culprit-probe-") as tmp:
                subprocess.run(
                    [self.git, "-C", str(self.repo), "worktree", "add", "--detach", "--force", tmp, commit],
                    check=True, capture_output=True,
                )
                try:
                    code = self._run(commit, tmp)
                finally:
                    subprocess.run(
                        [self.git, "-C", str(self.repo), "worktree", "remove", "--force", tmp],
                        capture_output=True,
                    )
        if code == 0:
            return False
        if code == 1:
            return True
        raise OracleAbort(f"oracle command exited with {code} at {commit}")


class InteractiveOracle:
    """Ask a human for ``good``/``bad``/``abort`` on each probe."""

    def __init__(self, stdin: TextIO | None = None, stdout: TextIO | None = None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def __call__(self, commit: str) -> bool:
        while True:
            self.stdout.write(f"Does {commit} contain the bug? [good/bad/abort] ")
            self.stdout.flush()
            answer = self.stdin.readline()
            if not answer:
                raise OracleAbort("no more input")
            answer = answer.strip().lower()
            if answer in ("bad", "b"):
                return True
            if answer in ("good", "g"):
                return False
            if answer in ("abort", "a", "q"):
                raise OracleAbort("aborted by user")


@dataclass(frozen=True)
class BisectCosts:
    weighted: int
    standard_reduced: int
    standard_full: int


def compare_costs(
    commits: Sequence[str],
    scores: Mapping[str, float],
    planted_bic: str,
    full_history: Iterable[str] | None = None,
) -> BisectCosts:
    """Oracle-call counts for the three bisection set-ups on a planted BIC.

    ``commits`` is the reduced space, newest first. ``full_history`` (newest
    first) defaults to ``commits``.
    """
    reduced = [c for c in commits if scores.get(c, 0.0) > 0]
    full = list(full_history) if full_history is not None else list(commits)
    w = weighted_bisect(reduced, scores, TableOracle.planted(reduced, planted_bic))
    s = standard_bisect(reduced, TableOracle.planted(reduced, planted_bic))
    f = standard_bisect(full, TableOracle.planted(full, planted_bic))
    for r in (w, s, f):
        if r.bic != planted_bic:
            raise InconsistentOracle(f"search ended at {r.bic}, expected {planted_bic}", r.trace_records())
    return BisectCosts(w.iterations, s.iterations, f.iterations)


def write_trace(result: BisectResult, fh: TextIO):
    for rec in result.trace_records():
        fh.write(json.dumps(rec) + "\n")
