import json
import os
import subprocess
from pathlib import Path

BASE_TIME = 1_650_000_000


class GitRepo:
    """Tiny scripted git repository for history fixtures."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.git("init", "-q", "-b", "main")
        self.git("config", "user.email", "dev@example.org")
        self.git("config", "user.name", "Dev")
        self.git("config", "commit.gpgsign", "false")
        self.tick = 0

    def git(self, *args, env=None):
        return subprocess.run(
            ["git", "-C", str(self.path), *args],
            check=True, capture_output=True, text=True, env=env,
        ).stdout

    def write(self, rel, text):
        p = self.path / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)

    def commit(self, message, files=None, moves=None):
        for old, new in (moves or {}).items():
            (self.path / new).parent.mkdir(parents=True, exist_ok=True)
            self.git("mv", old, new)
        for rel, text in (files or {}).items():
            if text is None:
                self.git("rm", "-q", rel)
            else:
                self.write(rel, text)
        self.git("add", "-A")
        self.tick += 1
        stamp = f"{BASE_TIME + 1000 * self.tick} +0000"
        env = {**os.environ, "GIT_AUTHOR_DATE": stamp, "GIT_COMMITTER_DATE": stamp}
        self.git("commit", "-q", "--allow-empty", "-m", message, env=env)
        return self.git("rev-parse", "HEAD").strip()

    def read(self, rel):
        return (self.path / rel).read_text()


def line_of(text, marker):
    for i, line in enumerate(text.splitlines(), 1):
        if marker in line:
            return i
    raise AssertionError(f"marker {marker!r} not found")


ESCAPE_V0 = """\
package org.example;

public class Escaper {

    /**
     * Escapes a string.
     */
    public static String escape(String str) {
        if (str == null) return null;
        StringBuilder out = new StringBuilder();
        for (int i = 0; i < str.length(); i++) {
            char ch = str.charAt(i);
            if (ch == '/') out.append("\\\\/");
            else out.append(ch);
        }
        return out.toString();
    }
}
"""

# planted bug: forward slashes are no longer escaped
ESCAPE_V1 = ESCAPE_V0.replace("""            if (ch == '/') out.append("\\\\/");
            else out.append(ch);""", """            if (ch == '/') out.append(ch);  // BUG
            else out.append(ch);""")

# style-only rewrite shaped like the Lang-46 commit: comments changed, single
# statements wrapped in braces, whitespace reflowed
ESCAPE_V2 = """\
package org.example;

public class Escaper {

    /**
     * <p>Escapes the characters in a <code>String</code>.</p>
     *
     * @param str  the string to escape, may be null
     */
    public static String escape(String str) {
        // null in, null out
        if (str == null) {
            return null;
        }
        StringBuilder out = new StringBuilder();
        for (int i = 0; i < str.length(); i++) {
            char ch = str.charAt(i);
            if (ch == '/') {
                out.append(ch);  // BUG
            } else {
                out.append(ch);
            }
        }
        return out.toString();
    }
}
"""

UTIL_V0 = """\
package org.example;

public class TextUtil {

    public static boolean isEmpty(String s) {
        return s == null || s.length() == 0;
    }

    public static String trim(String s) {
        return s == null ? null : s.trim();
    }
}
"""


def _util(version):
    text = UTIL_V0
    if version >= 1:
        text = text.replace("return s == null || s.length() == 0;", "return s == null || s.isEmpty();")
    if version >= 2:
        text = text.replace("return s == null ? null : s.trim();", "return s == null ? null : s.strip();")
    if version >= 3:
        text = text.replace("return s == null || s.isEmpty();", "return s == null || s.length() < 1;")
    if version >= 4:
        text = text.replace("return s == null ? null : s.strip();",
                            "if (s == null) return null;\n        return s.strip();")
    return text


def build_lang46_repo(path):
    """Eleven-commit repository with one semantic BIC and one style-only commit.

    Returns ``(repo, commits)`` where ``commits`` maps a role name to its id.
    """
    repo = GitRepo(path)
    ids = {}
    ids["create_escaper"] = repo.commit("Add Escaper", {"src/org/example/Escaper.java": ESCAPE_V0})
    ids["create_util"] = repo.commit("Add TextUtil", {"src/org/example/TextUtil.java": _util(0)})
    ids["util_isempty"] = repo.commit("Simplify isEmpty", {"src/org/example/TextUtil.java": _util(1)})
    ids["util_trim"] = repo.commit("Use strip", {"src/org/example/TextUtil.java": _util(2)})
    ids["bic"] = repo.commit("Stop escaping slashes", {"src/org/example/Escaper.java": ESCAPE_V1})
    ids["readme"] = repo.commit("Docs", {"README.md": "Escaper\n"})
    ids["style"] = repo.commit("Checkstyle fixes", {"src/org/example/Escaper.java": ESCAPE_V2})
    ids["util_isempty2"] = repo.commit("Length check", {"src/org/example/TextUtil.java": _util(3)})
    ids["unrelated"] = repo.commit("Add Other", {"src/org/example/Other.java": "class Other { }\n"})
    ids["util_trim2"] = repo.commit("Guard trim", {"src/org/example/TextUtil.java": _util(4)})
    ids["docs"] = repo.commit("More docs", {"README.md": "Escaper\n\nUsage.\n"})
    return repo, ids


def lang46_coverage(repo):
    """Failing test covers escape() and isEmpty(); passing tests cover isEmpty() and trim()."""
    esc = repo.read("src/org/example/Escaper.java")
    util = repo.read("src/org/example/TextUtil.java")
    e = "src/org/example/Escaper.java"
    u = "src/org/example/TextUtil.java"
    escape_lines = [line_of(esc, m) for m in ("if (str == null)", "StringBuilder out", "out.append(ch);  // BUG")]
    isempty = line_of(util, "s.length() < 1")
    trim = line_of(util, "return s.strip()")
    return {
        "tests": [
            {"name": "org.example.EscaperTest::testSlash", "outcome": "FAIL",
             "covered": [[e, ln] for ln in escape_lines] + [[u, isempty]]},
            {"name": "org.example.TextUtilTest::testIsEmpty", "outcome": "PASS",
             "covered": [[u, isempty]]},
            {"name": "org.example.TextUtilTest::testTrim", "outcome": "PASS",
             "covered": [[u, trim]]},
        ]
    }


def write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=1))
    return path
