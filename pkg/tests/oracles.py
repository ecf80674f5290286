"""Independent reference implementations used as test oracles.

These follow the textbook definitions directly (pairwise counting, direct
summation over Evolve pairs) and share no code with the package.
"""

import math


def ochiai_direct(rows, element):
    """rows: list of (failed: bool, covered: set)."""
    n_fail = sum(1 for f, _ in rows if f)
    ef = sum(1 for f, cov in rows if f and element in cov)
    ep = sum(1 for f, cov in rows if not f and element in cov)
    if ef == 0:
        return 0.0
    return ef / math.sqrt(n_fail * (ef + ep))


def rank_max(scores, e):
    """Worst position in the tie group: count of positive scores >= own."""
    return sum(1 for s in scores.values() if s > 0 and s >= scores[e])


def rank_dense(scores, e):
    return len({s for s in scores.values() if s > 0 and s > scores[e]}) + 1


def brute_commit_score(c, pairs, times, susp, cbic, alpha, tau, lam, mode):
    """Direct summation over the (element, commit) pairs of Evolve.

    pairs: set of (element, commit); times: commit -> comparable age key.
    """
    contribs = []
    for e, c2 in pairs:
        if c2 != c or c not in cbic:
            continue
        if mode == "equal":
            v = 1.0
        elif mode in ("score-only", "max-aggr"):
            v = susp.get(e, 0.0)
        else:
            if susp.get(e, 0.0) <= 0:
                v = 0.0
            else:
                r = rank_max(susp, e) if tau == "max" else rank_dense(susp, e)
                v = (alpha * susp[e] + 1 - alpha) / r
        if mode == "max-aggr":
            contribs.append(v)
            continue
        d = sum(1 for e2, c3 in pairs if e2 == e and c3 in cbic and times[c3] > times[c])
        contribs.append(v * (1 - lam) ** d)
    if not contribs:
        return 0.0
    return max(contribs) if mode == "max-aggr" else sum(contribs)


def textbook_bisect(n, bic_index):
    """Classic binary search for the oldest bad index in a newest-first list.

    Index 0 is known bad, index n is the implicit good sentinel.
    Returns (found index, list of probed indices).
    """
    lo, hi = 0, n
    probes = []
    while hi - lo > 1:
        mid = (lo + hi) // 2
        probes.append(mid)
        if mid <= bic_index:
            lo = mid
        else:
            hi = mid
    return lo, probes


def brute_weighted_pivot(weights, bad, good):
    """Pivot minimizing |sum(bad..i-1) - sum(i..good-1)|, smallest i on ties."""
    best = None
    for i in range(bad + 1, good):
        diff = abs(sum(weights[bad:i]) - sum(weights[i:good]))
        if best is None or diff < best[0]:
            best = (diff, i)
    return best[1]
