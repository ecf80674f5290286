"""Exception hierarchy shared by every pipeline stage."""


class CulpritError(Exception):
    """Base class; ``stage`` names the pipeline stage that raised."""

    stage = "unknown"

    def __init__(self, message="", *, stage=None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class NoFailingTests(CulpritError):
    stage = "coverage"

    def __init__(self, message="coverage contains no failing test", **kw):
        super().__init__(message, **kw)


class ParseError(CulpritError):
    stage = "ingest"

    def __init__(self, message, *, path=None, line=None, offset=None, **kw):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        if where:
            message = f"{':'.join(where)}: {message}"
        super().__init__(message, **kw)
        self.path = path
        self.line = line
        self.offset = offset


class DuplicateTestName(ParseError):
    def __init__(self, name, **kw):
        super().__init__(f"duplicate test name {name!r}", **kw)
        self.name = name


class MissingHistory(CulpritError):
    stage = "stage1"

    def __init__(self, element):
        super().__init__(f"no history entry for {element}")
        self.element = element


class VcsError(CulpritError):
    stage = "history"

    def __init__(self, message, *, element=None, errors=None, **kw):
        super().__init__(message, **kw)
        self.element = element
        self.errors = errors or []


class UnknownCommit(VcsError):
    def __init__(self, commit, **kw):
        super().__init__(f"unknown commit {commit!r}", **kw)
        self.commit = commit


class FileUnavailable(CulpritError):
    stage = "stage2"


class EmptyDomain(CulpritError):
    stage = "sbfl"


class EmptySpace(CulpritError):
    stage = "bisect"

    def __init__(self, message="no commit with a positive score", **kw):
        super().__init__(message, **kw)


class InconsistentOracle(CulpritError):
    stage = "bisect"

    def __init__(self, message, trace=None, **kw):
        super().__init__(message, **kw)
        self.trace = list(trace or [])


class OracleAbort(CulpritError):
    stage = "bisect"


class EmptyInput(CulpritError):
    stage = "eval"
