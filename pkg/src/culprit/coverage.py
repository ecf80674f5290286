"""Coverage ingestion and relevant-test selection.

Two on-disk formats are understood:

``MATRIX_JSON``
    ``{"tests": [{"name": str, "outcome": "PASS"|"FAIL",
    "covered": [[path, line], ...]}, ...]}``. A covered entry may carry
    two more integers, ``[path, line, span_start, span_end]``, giving the
    enclosing method span.

``LCOV_PER_TEST``
    A directory holding one ``<test name>.lcov`` tracefile per test and an
    ``outcomes.tsv`` with ``name<TAB>PASS|FAIL`` rows.
"""

from __future__ import annotations

import enum
import json
from pathlib import Path, PurePosixPath

from .errors import DuplicateTestName, NoFailingTests, ParseError
from .model import CodeElement, CoverageMatrix, Outcome, TestCase


class CoverageFormat(str, enum.Enum):
    MATRIX_JSON = "matrix-json"
    LCOV_PER_TEST = "lcov-per-test"


def load_coverage(path, fmt: CoverageFormat | str = CoverageFormat.MATRIX_JSON) -> CoverageMatrix:
    fmt = CoverageFormat(fmt)
    path = Path(path)
    if not path.exists():
        raise ParseError("coverage input does not exist", path=path)
    if fmt is CoverageFormat.MATRIX_JSON:
        return _load_matrix_json(path)
    return _load_lcov_dir(path)


def _element(raw, path, idx) -> CodeElement:
    if not isinstance(raw, (list, tuple)) or len(raw) not in (2, 4):
        raise ParseError(f"covered entry #{idx} must be [path, line] or [path, line, start, end]", path=path)
    try:
        span = (int(raw[2]), int(raw[3])) if len(raw) == 4 else None
        return CodeElement(str(raw[0]), int(raw[1]), span)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"covered entry #{idx}: {exc}", path=path) from None


def _load_matrix_json(path: Path) -> CoverageMatrix:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, offset=exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("tests"), list):
        raise ParseError('top-level object must have a "tests" list', path=path)
    return matrix_from_dict(doc, path=path)


def matrix_from_dict(doc: dict, path=None) -> CoverageMatrix:
    tests, covered = [], {}
    for i, entry in enumerate(doc["tests"]):
        try:
            name = entry["name"]
            outcome = Outcome(entry["outcome"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"test #{i} needs a name and an outcome of PASS or FAIL", path=path) from None
        if name in covered:
            raise DuplicateTestName(name, path=path)
        tests.append(TestCase(name, outcome))
        covered[name] = frozenset(_element(r, path, j) for j, r in enumerate(entry.get("covered", [])))
    return CoverageMatrix(tuple(tests), covered)


def matrix_to_dict(cov: CoverageMatrix) -> dict:
    tests = []
    for t in cov.tests:
        rows = []
        for e in sorted(cov.covered[t.full_name]):
            rows.append([e.file, e.line, *e.enclosing_span] if e.enclosing_span else [e.file, e.line])
        tests.append({"name": t.full_name, "outcome": t.outcome.value, "covered": rows})
    return {"tests": tests}


def _parse_lcov(path: Path) -> set[CodeElement]:
    elements = set()
    source = None
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if line.startswith("SF:"):
            source = line[3:]
        elif line.startswith("DA:"):
            if source is None:
                raise ParseError("DA record outside of an SF block", path=path, line=lineno)
            try:
                fields = line[3:].split(",")
                ln, hits = int(fields[0]), int(fields[1])
            except (ValueError, IndexError):
                raise ParseError(f"malformed DA record {line!r}", path=path, line=lineno) from None
            if hits > 0:
                elements.add(CodeElement(source, ln))
        elif line == "end_of_record":
            source = None
    return elements


def _load_lcov_dir(root: Path) -> CoverageMatrix:
    if not root.is_dir():
        raise ParseError("LCOV_PER_TEST input must be a directory", path=root)
    outcomes_file = root / "outcomes.tsv"
    if not outcomes_file.exists():
        raise ParseError("missing outcomes.tsv", path=root)
    tests = []
    seen = set()
    for lineno, row in enumerate(outcomes_file.read_text().splitlines(), 1):
        if not row.strip():
            continue
        parts = row.split("\t")
        if len(parts) != 2 or parts[1].strip() not in ("PASS", "FAIL"):
            raise ParseError("expected name<TAB>PASS|FAIL", path=outcomes_file, line=lineno)
        name = parts[0]
        if name in seen:
            raise DuplicateTestName(name, path=outcomes_file, line=lineno)
        seen.add(name)
        tests.append(TestCase(name, Outcome(parts[1].strip())))
    covered = {}
    for t in tests:
        f = root / f"{t.full_name}.lcov"
        covered[t.full_name] = frozenset(_parse_lcov(f)) if f.exists() else frozenset()
    return CoverageMatrix(tuple(tests), covered)


def class_name(path: str) -> str:
    return PurePosixPath(path).stem


def select_relevant_tests(cov: CoverageMatrix) -> CoverageMatrix:
    """Keep failing tests and the passing tests that mention a class they executed.

    A class is identified by the stem of a covered file; a passing test is
    relevant when its full name contains one such stem (case-sensitive).
    """
    failing = cov.failing
    if not failing:
        raise NoFailingTests()
    classes = {class_name(e.file) for t in failing for e in cov.covered[t.full_name]}
    classes.discard("")
    keep = [
        t.full_name
        for t in cov.tests
        if t.failed or any(c in t.full_name for c in classes)
    ]
    return cov.restrict(keep)
