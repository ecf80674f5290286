"""Locate the method enclosing a statement, without a language parser."""

from __future__ import annotations

import ast
from pathlib import PurePosixPath

from .errors import ParseError
from .style import _C_TOKEN

_NOT_METHODS = {"if", "for", "while", "switch", "catch", "synchronized", "foreach",
                "using", "lock", "fixed", "return", "sizeof", "new"}
_SUFFIX_TOKENS = {",", ".", "::", "<", ">", "*", "&", "->", "[", "]"}


def _c_tokens_with_lines(source: str):
    pos, line, out = 0, 1, []
    while pos < len(source):
        m = _C_TOKEN.match(source, pos)
        text = m.group(0)
        kind = m.lastgroup
        if kind == "open_comment":
            raise ParseError("unterminated block comment")
        if kind not in ("ws", "line_comment", "block_comment"):
            out.append((text if kind in ("op", "punct", "ident") else "<lit>", line))
        line += text.count("\n")
        pos = m.end()
    return out


def _method_header(tokens, lb: int) -> int | None:
    """Index of the method name token for the ``{`` at ``lb``, if it opens a method body."""
    j = lb - 1
    steps = 0
    while j >= 0 and tokens[j][0] != ")" and steps < 16:
        t = tokens[j][0]
        if not (t in _SUFFIX_TOKENS or t[:1].isalpha() or t[:1] == "_"):
            return None
        j -= 1
        steps += 1
    if j < 0 or tokens[j][0] != ")":
        return None
    level = 0
    while j >= 0:
        t = tokens[j][0]
        if t == ")":
            level += 1
        elif t == "(":
            level -= 1
            if level == 0:
                break
        j -= 1
    name = j - 1
    if name < 0:
        return None
    t = tokens[name][0]
    if not (t[:1].isalpha() or t[:1] in "_$~") or t in _NOT_METHODS:
        return None
    if name > 0 and tokens[name - 1][0] == "new":
        return None
    return name


def c_method_spans(source: str) -> list[tuple[int, int]]:
    tokens = _c_tokens_with_lines(source)
    spans, stack = [], []
    for i, (t, line) in enumerate(tokens):
        if t == "{":
            stack.append(i)
        elif t == "}" and stack:
            lb = stack.pop()
            name = _method_header(tokens, lb)
            if name is not None:
                spans.append((tokens[name][1], line))
    return spans


def python_method_spans(source: str) -> list[tuple[int, int]]:
    try:
        tree = ast.parse(source)
    except SyntaxError as exc:
        raise ParseError(f"python parse: {exc}") from None
    return [
        (node.lineno, node.end_lineno)
        for node in ast.walk(tree)
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef))
    ]


def resolve_span(source: str | None, line: int, path: str) -> tuple[int, int]:
    """Outermost method span containing ``line``; the line itself when none is found."""
    if source is None:
        return (line, line)
    try:
        if PurePosixPath(path).suffix == ".py":
            spans = python_method_spans(source)
        else:
            spans = c_method_spans(source)
    except ParseError:
        return (line, line)
    containing = [s for s in spans if s[0] <= line <= s[1]]
    if not containing:
        return (line, line)
    return min(containing, key=lambda s: (s[0], -s[1]))
