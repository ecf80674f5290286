"""Construction of the Evolve relation from version-control history.

Every statement inherits the history of its enclosing method: the method's
line range is traced back with ``git log -C -M -L<start>,<end>:<file>``,
which follows renames, moves and copies.
"""

from __future__ import annotations

import json
import logging
import os
import re
import subprocess
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from pathlib import Path
from typing import Iterable

from .errors import FileUnavailable, UnknownCommit, VcsError
from .model import CodeElement, CommitRecord, EvolveMap, FileChange
from .spans import resolve_span

log = logging.getLogger(__name__)

_RS = "\x1e"
_HUNK = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def git_binary() -> str:
    return os.environ.get("CULPRIT_VCS", "git")


class GitAdapter:
    """Live history from a git working copy."""

    kind = "GIT_CLI"

    def __init__(self, root, git: str | None = None):
        self.root = Path(root)
        self.git = git or git_binary()
        self._lock = threading.Lock()
        self._order: dict[str, dict[str, int]] = {}
        self._traces: dict[tuple, Future] = {}

    def run(self, *args: str, check: bool = True) -> str:
        try:
            proc = subprocess.run(
                [self.git, "-C", str(self.root), *args],
                capture_output=True, text=True, errors="surrogateescape",
            )
        except OSError as exc:
            raise VcsError(f"cannot run {self.git}: {exc}") from None
        if check and proc.returncode != 0:
            raise VcsError(f"git {' '.join(args[:2])} failed ({proc.returncode}): {proc.stderr.strip()}")
        return proc.stdout

    def resolve(self, commit: str) -> str:
        out = subprocess.run(
            [self.git, "-C", str(self.root), "rev-parse", "--verify", "--quiet", f"{commit}^{{commit}}"],
            capture_output=True, text=True,
        )
        if out.returncode != 0:
            raise UnknownCommit(commit)
        return out.stdout.strip()

    def topo_order(self, until: str) -> dict[str, int]:
        """Position of each ancestor of ``until``: oldest is 0."""
        with self._lock:
            if until not in self._order:
                ids = self.run("rev-list", "--topo-order", "--reverse", until).split()
                self._order[until] = {c: i for i, c in enumerate(ids)}
            return self._order[until]

    def commits(self, until: str) -> list[CommitRecord]:
        """Every commit reachable from ``until``, newest first."""
        until = self.resolve(until)
        order = self.topo_order(until)
        out = self.run("log", "--format=%H %ct", until)
        records = []
        for row in out.splitlines():
            cid, ts = row.split()
            records.append(CommitRecord(cid, int(ts), order[cid]))
        return sorted(records, key=lambda r: r.sort_key, reverse=True)

    def file_at(self, commit: str, path: str) -> str | None:
        proc = subprocess.run(
            [self.git, "-C", str(self.root), "show", f"{commit}:{path}"],
            capture_output=True,
        )
        if proc.returncode != 0:
            return None
        try:
            return proc.stdout.decode("utf-8")
        except UnicodeDecodeError:
            return None

    def _parent(self, commit: str) -> str | None:
        out = self.run("rev-list", "--parents", "-n", "1", commit).split()
        return out[1] if len(out) > 1 else None

    def old_path(self, commit: str, parent: str, path: str) -> str | None:
        out = self.run("diff", "--name-status", "-M", "-z", parent, commit)
        fields = out.split("\0")
        i = 0
        while i < len(fields) - 1:
            status = fields[i]
            if status[:1] in "RC":
                src, dst = fields[i + 1], fields[i + 2]
                if dst == path:
                    return src
                i += 3
            else:
                if fields[i + 1] == path:
                    return None if status == "A" else path
                i += 2
        return path

    def file_versions(self, commit: str, path: str) -> tuple[str | None, str | None]:
        """``path`` as it was before and after ``commit``; ``None`` where absent."""
        try:
            parent = self._parent(commit)
        except VcsError as exc:
            raise FileUnavailable(str(exc)) from None
        if parent is None:
            raise FileUnavailable(f"{commit} is a root commit")
        after = self.file_at(commit, path)
        if after is None:
            raise FileUnavailable(f"{path} missing at {commit}")
        src = self.old_path(commit, parent, path)
        before = self.file_at(parent, src) if src else None
        return before, after

    def enclosing_span(self, element: CodeElement, until: str) -> tuple[int, int]:
        if element.enclosing_span:
            return element.enclosing_span
        return resolve_span(self.file_at(until, element.file), element.line, element.file)

    def _trace_span(self, path: str, span: tuple[int, int], until: str) -> list[CommitRecord]:
        order = self.topo_order(until)
        out = self.run(
            "log", "-C", "-M", f"-L{span[0]},{span[1]}:{path}",
            f"--format={_RS}%H %ct %s", until,
        )
        return parse_line_log(out, order)

    def trace(self, element: CodeElement, until: str) -> list[CommitRecord]:
        until = self.resolve(until)
        key = (element.file, self.enclosing_span(element, until), until)
        with self._lock:
            fut = self._traces.get(key)
            owner = fut is None
            if owner:
                fut = self._traces[key] = Future()
        if owner:
            try:
                fut.set_result(self._trace_span(key[0], key[1], until))
            except BaseException as exc:
                fut.set_exception(exc)
        return fut.result()


def parse_line_log(out: str, order: dict[str, int]) -> list[CommitRecord]:
    records = []
    for chunk in out.split(_RS)[1:]:
        header, _, body = chunk.partition("\n")
        parts = header.split(" ", 2)
        cid, ts = parts[0], int(parts[1])
        message = parts[2] if len(parts) > 2 else ""
        changes, old, new, hunks = [], None, None, []
        for line in body.splitlines():
            if line.startswith("diff --git "):
                if old is not None or new is not None:
                    changes.append(FileChange(old, new, tuple(hunks)))
                old = new = None
                hunks = []
            elif line.startswith("--- "):
                old = None if line[4:] == "/dev/null" else line[4:].removeprefix("a/")
            elif line.startswith("+++ "):
                new = None if line[4:] == "/dev/null" else line[4:].removeprefix("b/")
            else:
                m = _HUNK.match(line)
                if m:
                    a, b, c, d = m.groups()
                    hunks.append(((int(a), int(b or 1)), (int(c), int(d or 1))))
        if old is not None or new is not None:
            changes.append(FileChange(old, new, tuple(hunks)))
        if cid not in order:
            raise VcsError(f"line log reported {cid}, which is not an ancestor")
        records.append(CommitRecord(cid, ts, order[cid], message, tuple(changes)))
    return sorted(records, key=lambda r: r.sort_key, reverse=True)


class SerializedAdapter:
    """Replays a previously mined history file; no repository needed.

    Format: ``{"elements": [{"file", "line", "history": [{"id", "time",
    "order"}, ...]}, ...]}``. An optional top-level ``"style_commits"`` list
    records Stage 2 verdicts made when the history was mined.
    """

    kind = "SERIALIZED"

    def __init__(self, root):
        self.root = Path(root)
        try:
            doc = json.loads(self.root.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise VcsError(f"cannot read serialized history {self.root}: {exc}") from None
        self.evolve = evolve_map_from_dict(doc)
        self.style = set(doc.get("style_commits", []))
        self._by_pos = {(e.file, e.line): e for e in self.evolve.history}

    def resolve(self, commit: str) -> str:
        if commit in (None, "HEAD"):
            return commit
        if commit not in self.evolve.commits:
            raise UnknownCommit(commit)
        return commit

    def trace(self, element: CodeElement, until: str | None = None) -> list[CommitRecord]:
        known = self._by_pos.get((element.file, element.line))
        if known is None:
            raise VcsError(f"no recorded history for {element}", element=element)
        ids = self.evolve.history[known]
        if until not in (None, "HEAD"):
            limit = self.evolve.sort_key(self.resolve(until))
            ids = [c for c in ids if self.evolve.sort_key(c) <= limit]
        return [self.evolve.commits[c] for c in ids]

    def recorded_style(self, commit: str) -> bool:
        return commit in self.style

    def file_versions(self, commit: str, path: str):
        raise FileUnavailable("serialized histories carry no file contents")


def open_adapter(kind: str, root) -> GitAdapter | SerializedAdapter:
    kind = kind.upper().replace("-", "_")
    if kind in ("GIT", "GIT_CLI"):
        return GitAdapter(root)
    if kind == "SERIALIZED":
        return SerializedAdapter(root)
    raise ValueError(f"unknown adapter kind {kind!r}")


def trace_history(adapter, element: CodeElement, until_commit: str) -> list[CommitRecord]:
    """Commits up to ``until_commit`` that changed the method enclosing ``element``, newest first."""
    return adapter.trace(element, until_commit)


def build_evolve_map(adapter, ef: Iterable[CodeElement], until_commit: str, workers: int = 4) -> EvolveMap:
    """Trace every element; statements of one method share a single trace."""
    ef = sorted(set(ef))
    errors = []

    def one(e):
        try:
            return e, adapter.trace(e, until_commit), None
        except VcsError as exc:
            return e, None, exc

    if workers > 1 and len(ef) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ef))
    else:
        results = [one(e) for e in ef]
    history = {}
    for e, records, exc in results:
        if exc is not None:
            if isinstance(exc, UnknownCommit):
                raise exc
            errors.append((e, exc))
        else:
            history[e] = records
    if errors:
        e, first = errors[0]
        raise VcsError(
            f"history retrieval failed for {len(errors)} element(s); first {e}: {first}",
            element=e, errors=errors,
        )
    return EvolveMap.from_records(history)


def evolve_map_to_dict(ev: EvolveMap, style_commits: Iterable[str] | None = None) -> dict:
    elements = []
    for e in sorted(ev.history):
        row = {
            "file": e.file,
            "line": e.line,
            "history": [
                {"id": c, "time": ev.commits[c].time, "order": ev.commits[c].order}
                for c in ev.history[e]
            ],
        }
        if e.enclosing_span:
            row["span"] = list(e.enclosing_span)
        elements.append(row)
    doc = {"elements": elements}
    if style_commits is not None:
        doc["style_commits"] = sorted(style_commits)
    return doc


def evolve_map_from_dict(doc: dict) -> EvolveMap:
    history = {}
    for row in doc["elements"]:
        span = tuple(row["span"]) if row.get("span") else None
        e = CodeElement(row["file"], int(row["line"]), span)
        history[e] = [CommitRecord(h["id"], int(h["time"]), int(h.get("order", 0))) for h in row["history"]]
    return EvolveMap.from_records(history)


def save_evolve_map(ev: EvolveMap, path, style_commits=None):
    Path(path).write_text(json.dumps(evolve_map_to_dict(ev, style_commits), indent=1, sort_keys=True) + "\n")


def load_evolve_map(path) -> EvolveMap:
    return SerializedAdapter(path).evolve
