"""
Ranking commits in a real repository
====================================

Build a throwaway git history with one bad commit and one cosmetic cleanup,
then run the three stages on it.
"""

import os
import subprocess
import tempfile
from pathlib import Path

from culprit import run_pipeline
from culprit.coverage import matrix_from_dict
from culprit.history import GitAdapter

root = Path(tempfile.mkdtemp()) / "repo"
root.mkdir()
stamp = [1_700_000_000]


def git(*args):
    env = {**os.environ, "GIT_AUTHOR_DATE": f"{stamp[0]} +0000", "GIT_COMMITTER_DATE": f"{stamp[0]} +0000"}
    return subprocess.run(["git", "-C", str(root), *args], check=True, capture_output=True, text=True, env=env).stdout


def commit(message, path, text):
    (root / path).write_text(text)
    stamp[0] += 60
    git("add", "-A")
    git("commit", "-q", "-m", message)
    return git("rev-parse", "--short", "HEAD").strip()


git("init", "-q")
git("config", "user.email", "demo@example.org")
git("config", "user.name", "Demo")

good = """class Price {
    static int total(int a, int b) {
        if (a < 0) return 0;
        return a + b;
    }
}
"""
bad = good.replace("return a + b;", "return a - b;")
tidy = """class Price {
    /** Sum of two prices. */
    static int total(int a, int b) {
        if (a < 0) {
            return 0;
        }
        return a - b;  // combine
    }
}
"""
ids = {
    "create": commit("Add Price", "Price.java", good),
    "bic": commit("Refactor total", "Price.java", bad),
    "tidy": commit("Checkstyle", "Price.java", tidy),
    "readme": commit("Readme", "README", "price calculator\n"),
}
print({v: k for k, v in ids.items()})

# One failing test reaches the return statement, one passing test only the guard
coverage = matrix_from_dict({"tests": [
    {"name": "PriceTest::testTotal", "outcome": "FAIL", "covered": [["Price.java", 4], ["Price.java", 7]]},
    {"name": "PriceTest::testNegative", "outcome": "PASS", "covered": [["Price.java", 4]]},
]})

result = run_pipeline(coverage, GitAdapter(root))
print("candidates:", len(result.cf), " style-only:", sorted(c[:7] for c in result.style))
for r in result.report.ranked:
    print(f"{r.rank}  {r.score:.3f}  {r.id[:7]}")
# The cleanup commit is gone and the bad commit leads the ranking
