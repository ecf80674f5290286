import io
import random
import sys

import pytest

from culprit.bisect import (
    CommandOracle, InteractiveOracle, TableOracle, compare_costs, standard_bisect, weighted_bisect, write_trace,
)
from culprit.errors import EmptySpace, InconsistentOracle, OracleAbort

from oracles import brute_weighted_pivot, textbook_bisect


def names(n):
    return [f"c{i}" for i in range(n)]


def test_uniform_examples():
    cs = names(8)
    res = weighted_bisect(cs, dict.fromkeys(cs, 1.0), TableOracle.planted(cs, "c5"))
    assert res.bic == "c5"
    assert [i for i, _ in res.trace] == [4, 6, 5]


def test_weighted_pivot_follows_mass():
    cs = names(5)
    scores = {"c0": 1.0, "c1": 0.1, "c2": 0.1, "c3": 0.1, "c4": 5.0}
    res = weighted_bisect(cs, scores, TableOracle.planted(cs, "c4"))
    # mass concentrated in c4: first pivot sits right on it
    assert res.trace[0][0] == 4
    assert res.bic == "c4" and res.iterations == 1


def test_single_candidate_needs_no_calls():
    oracle = TableOracle({"c0": True})
    res = weighted_bisect(["c0"], {"c0": 0.3}, oracle)
    assert (res.bic, res.iterations, oracle.calls) == ("c0", 0, 0)


def test_single_candidate_confirmation():
    with pytest.raises(InconsistentOracle):
        weighted_bisect(["c0"], {"c0": 0.3}, TableOracle({"c0": False}), confirm_single=True)
    res = weighted_bisect(["c0"], {"c0": 0.3}, TableOracle({"c0": True}), confirm_single=True)
    assert res.iterations == 1


def test_zero_scores_are_dropped():
    with pytest.raises(EmptySpace):
        weighted_bisect(["a", "b"], {"a": 0.0}, TableOracle({}))
    cs = ["a", "b", "c"]
    res = weighted_bisect(cs, {"a": 1.0, "b": 0.0, "c": 1.0}, TableOracle.planted(["a", "c"], "c"))
    assert res.bic == "c" and res.ordered == ["a", "c"]


def test_table_oracle_monotonicity_check():
    oracle = TableOracle({"a": True, "b": False, "c": True})
    with pytest.raises(InconsistentOracle):
        oracle.check_monotone(["a", "b", "c"])


@pytest.mark.parametrize("n", range(1, 8))
def test_exhaustive_small(n):
    rng = random.Random(n)
    cs = names(n)
    for pos in range(n):
        oracle = TableOracle.planted(cs, cs[pos])
        std = standard_bisect(cs, oracle)
        found, probes = textbook_bisect(n, pos)
        assert std.bic == cs[found] and [i for i, _ in std.trace] == probes
        for _ in range(20):
            w = [rng.uniform(0.01, 5.0) for _ in range(n)]
            res = weighted_bisect(cs, dict(zip(cs, w)), TableOracle.planted(cs, cs[pos]))
            assert res.bic == cs[pos]
            assert res.iterations <= n - 1
            bad, good = 0, n
            for pivot, verdict in res.trace:
                assert pivot == brute_weighted_pivot(w, bad, good)
                bad, good = (pivot, good) if verdict else (bad, pivot)


def test_interactive_oracle_scripted():
    cs = names(6)
    out = io.StringIO()
    oracle = InteractiveOracle(io.StringIO("maybe\ngood\nbad\ngood\n"), out)
    res = standard_bisect(cs, oracle)
    assert res.bic == "c1"
    assert "c3" in out.getvalue()


def test_interactive_oracle_eof_aborts():
    with pytest.raises(OracleAbort):
        standard_bisect(names(4), InteractiveOracle(io.StringIO(""), io.StringIO()))


def test_command_oracle_exit_codes(tmp_path):
    bad = {"c0", "c1"}
    script = tmp_path / "probe.py"
    script.write_text(f"import sys\nsys.exit(1 if sys.argv[1] in {sorted(bad)!r} else 0)\n")
    oracle = CommandOracle(f"{sys.executable} {script} {{commit}}")
    assert standard_bisect(names(5), oracle).bic == "c1"
    script.write_text("import sys\nsys.exit(125)\n")
    with pytest.raises(OracleAbort):
        standard_bisect(names(3), oracle)


def test_compare_costs_and_trace():
    full = names(16)
    reduced = ["c1", "c6", "c9", "c12"]
    scores = {"c1": 0.1, "c6": 0.2, "c9": 3.0, "c12": 0.1}
    costs = compare_costs(reduced, scores, "c9", full)
    assert costs.standard_full == 4 and costs.standard_reduced == 2
    assert costs.weighted <= costs.standard_reduced
    buf = io.StringIO()
    write_trace(weighted_bisect(reduced, scores, TableOracle.planted(reduced, "c9")), buf)
    assert all('"verdict"' in line for line in buf.getvalue().splitlines())
