"""Detection of style-only commits.

A commit is style-only when every relevant file it modified has the same
normalized token sequence before and after the commit. Normalization drops
comments and layout, and rewrites ``if (x) { s; }`` to ``if (x) s;`` when the
braces hold exactly one simple statement. Anything the normalizer cannot
handle counts as a semantic change, so a commit is only ever removed when it
is provably cosmetic under those rewrites.
"""

from __future__ import annotations

import hashlib
import io
import re
import tokenize as pytokenize
from dataclasses import dataclass
from pathlib import PurePosixPath
from typing import Callable, Iterable, Mapping

from .errors import FileUnavailable, ParseError
from .model import CodeElement, CommitRecord, EvolveMap

Token = tuple[str, str]
Normalizer = Callable[[str], list[Token]]


@dataclass(frozen=True)
class SyntaxFingerprint:
    tokens: tuple[Token, ...]

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        for kind, text in self.tokens:
            h.update(kind.encode())
            h.update(b"\0")
            h.update(text.encode("utf-8", "surrogatepass"))
            h.update(b"\1")
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, SyntaxFingerprint) and self.tokens == other.tokens

    def __hash__(self):
        return hash(self.tokens)


# --- C-family lexer -------------------------------------------------------

_OPERATORS = sorted(
    """>>>= <<= >>= >>> ... ->* :: -> ++ -- << >> <= >= == != && || += -= *= /= %= &= |= ^= .* ##""".split(),
    key=len,
    reverse=True,
)
_OP_RE = "|".join(re.escape(op) for op in _OPERATORS)

_C_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<open_comment>/\*)
  | (?P<raw_string>(?:u8|[uUL])?R"(?P<delim>[^\s()\\]{0,16})\(.*?\)(?P=delim)")
  | (?P<verbatim>@"(?:[^"]|"")*")
  | (?P<text_block>\"\"\".*?\"\"\")
  | (?P<string>(?:u8|[uUL])?"(?:\\.|[^"\\\n])*")
  | (?P<char>(?:u8|[uUL])?'(?:\\.|[^'\\\n])+')
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eEpP][+-]?\d+)?[\w]*)
  | (?P<ident>[A-Za-z_$][\w$]*)
  | (?P<op>"""
    + _OP_RE
    + r""")
  | (?P<punct>[^\s\w])
    """,
    re.VERBOSE | re.DOTALL,
)

_DIRECTIVE = re.compile(r"#(?:[^\n\\]|\\.)*", re.DOTALL)

_KEEP_EXACT = {"raw_string", "verbatim", "text_block", "string", "char"}


def c_tokens(source: str, *, directives: bool = False) -> list[Token]:
    """Lex C-family source into ``(kind, text)`` tokens, dropping comments and layout.

    With ``directives`` set, preprocessor lines become single byte-exact tokens.
    """
    out: list[Token] = []
    pos, n = 0, len(source)
    at_line_start = True
    while pos < n:
        if directives and at_line_start:
            m = _DIRECTIVE.match(source, pos)
            if m:
                out.append(("directive", m.group(0).strip()))
                pos = m.end()
                continue
        m = _C_TOKEN.match(source, pos)
        if m is None:  # pragma: no cover - punct alternative matches any char
            raise ParseError(f"cannot lex at offset {pos}", offset=pos)
        kind = m.lastgroup if m.lastgroup != "delim" else "raw_string"
        text = m.group(0)
        pos = m.end()
        if kind == "ws":
            if "\n" in text:
                at_line_start = True
            continue
        if kind == "open_comment":
            raise ParseError("unterminated block comment", offset=m.start())
        if kind == "line_comment":
            continue
        if kind == "block_comment":
            # a comment separates tokens just like whitespace does
            continue
        at_line_start = False
        if kind in _KEEP_EXACT:
            kind = "literal"
        elif kind == "punct" and text in "\"'`":
            raise ParseError(f"unterminated literal at offset {m.start()}", offset=m.start())
        out.append((kind, text))
    return out


_CONTROL_HEADERS = {"if", "for", "while"}
_CONTROL_BARE = {"else", "do"}
_COMPOUND_STARTERS = {"if", "for", "while", "do", "else", "switch", "try", "case", "default",
                      "synchronized", "catch", "finally", "goto"}


def _matching(tokens: list[Token], i: int, open_: str, close: str) -> int | None:
    level = 0
    for j in range(i, len(tokens)):
        t = tokens[j][1]
        if tokens[j][0] != "literal":
            if t == open_:
                level += 1
            elif t == close:
                level -= 1
                if level == 0:
                    return j
    return None


def _single_statement_block(tokens: list[Token], lb: int) -> int | None:
    """If ``tokens[lb]`` opens ``{ stmt ; }`` with one simple statement, return the ``}`` index."""
    j = lb + 1
    if j >= len(tokens) or tokens[j][0] == "ident" and tokens[j][1] in _COMPOUND_STARTERS:
        return None
    depth = 0
    semis = 0
    while j < len(tokens):
        kind, t = tokens[j]
        if kind == "literal" or kind == "directive":
            if kind == "directive":
                return None
        elif t in "([":
            depth += 1
        elif t in ")]":
            depth -= 1
        elif t in "{}":
            if t == "}" and depth == 0 and semis == 1 and tokens[j - 1][1] == ";":
                return j
            return None
        elif t == ";" and depth == 0:
            semis += 1
            if semis > 1:
                return None
        elif t == ":" and depth == 0:
            return None  # labels
        j += 1
    return None


def drop_redundant_braces(tokens: list[Token]) -> list[Token]:
    """Remove braces around a lone simple statement following a control header."""
    drop: set[int] = set()
    for i, (kind, t) in enumerate(tokens):
        if kind != "ident":
            continue
        body = None
        if t in _CONTROL_HEADERS and i + 1 < len(tokens) and tokens[i + 1][1] == "(":
            close = _matching(tokens, i + 1, "(", ")")
            if close is not None:
                body = close + 1
        elif t in _CONTROL_BARE:
            body = i + 1
        if body is None or body >= len(tokens) or tokens[body][1] != "{":
            continue
        rb = _single_statement_block(tokens, body)
        if rb is not None:
            drop.update((body, rb))
    return [tok for i, tok in enumerate(tokens) if i not in drop]


def c_family(source: str) -> list[Token]:
    return drop_redundant_braces(c_tokens(source))


def c_preprocessed(source: str) -> list[Token]:
    return drop_redundant_braces(c_tokens(source, directives=True))


def python_tokens(source: str) -> list[Token]:
    """Python tokens without comments and non-logical newlines; indentation by structure only."""
    out: list[Token] = []
    try:
        for tok in pytokenize.generate_tokens(io.StringIO(source).readline):
            if tok.type in (pytokenize.COMMENT, pytokenize.NL, pytokenize.ENCODING, pytokenize.ENDMARKER):
                continue
            name = pytokenize.tok_name[tok.type]
            text = "" if tok.type in (pytokenize.INDENT, pytokenize.DEDENT, pytokenize.NEWLINE) else tok.string
            out.append((name, text))
    except (pytokenize.TokenError, IndentationError, SyntaxError) as exc:
        raise ParseError(f"python tokenizer: {exc}") from None
    return out


NORMALIZERS: dict[str, Normalizer] = {
    "c-family": c_family,
    "c-preprocessed": c_preprocessed,
    "python": python_tokens,
}

DEFAULT_EXTENSIONS: dict[str, str] = {
    ".java": "c-family",
    ".cs": "c-preprocessed",
    ".c": "c-preprocessed",
    ".h": "c-preprocessed",
    ".cc": "c-preprocessed",
    ".cpp": "c-preprocessed",
    ".cxx": "c-preprocessed",
    ".hpp": "c-preprocessed",
    ".hh": "c-preprocessed",
    ".hxx": "c-preprocessed",
    ".py": "python",
}


def normalizer_for(path: str, extensions: Mapping[str, str] | None = None) -> Normalizer | None:
    ext = PurePosixPath(path).suffix.lower()
    name = (extensions or DEFAULT_EXTENSIONS).get(ext)
    return NORMALIZERS.get(name) if name else None


def fingerprint(source: str | bytes, normalizer: Normalizer) -> SyntaxFingerprint:
    if isinstance(source, bytes):
        if b"\0" in source:
            raise ParseError("binary content")
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError:
            raise ParseError("file is not valid UTF-8") from None
    return SyntaxFingerprint(tuple(normalizer(source)))


def elements_touched_by(c: str | CommitRecord, ef: Iterable[CodeElement], ev: EvolveMap) -> set[CodeElement]:
    cid = c.id if isinstance(c, CommitRecord) else c
    return {e for e in ef if cid in ev.history.get(e, ())}


def same_syntax(before, after, path: str, extensions=None) -> bool:
    norm = normalizer_for(path, extensions)
    if norm is None or before is None or after is None:
        return False
    try:
        return fingerprint(before, norm) == fingerprint(after, norm)
    except ParseError:
        return False


def is_style_change(c: str | CommitRecord, files: Iterable[str], adapter, extensions=None) -> bool:
    """True when every file in ``files`` is syntactically unchanged by ``c``.

    Files that cannot be read, decoded or lexed count as changed; an empty
    ``files`` set never qualifies. Adapters exposing ``recorded_style``
    (replayed histories) answer from their recorded verdicts instead.
    """
    cid = c.id if isinstance(c, CommitRecord) else c
    recorded = getattr(adapter, "recorded_style", None)
    if recorded is not None:
        return recorded(cid)
    files = sorted(set(files))
    if not files:
        return False
    for path in files:
        try:
            before, after = adapter.file_versions(cid, path)
        except FileUnavailable:
            return False
        if not same_syntax(before, after, path, extensions):
            return False
    return True


def files_for(c: str, ef: Iterable[CodeElement], ev: EvolveMap) -> set[str]:
    """Paths, as of commit ``c``, of covered files that ``c`` modified."""
    record = ev.commits.get(c)
    if record is not None and record.changed_files:
        return record.touched_paths()
    return {e.file for e in elements_touched_by(c, ef, ev)}


def style_commits(cf: Iterable[str], ef: Iterable[CodeElement], ev: EvolveMap, adapter, extensions=None) -> set[str]:
    ef = set(ef)
    return {c for c in cf if is_style_change(c, files_for(c, ef, ev), adapter, extensions)}


def reduce_search_space(cf: Iterable[str], ef: Iterable[CodeElement], ev: EvolveMap, adapter, extensions=None) -> set[str]:
    cf = set(cf)
    return cf - style_commits(cf, ef, ev, adapter, extensions)
