"""
Voting power of suspicious elements
===================================

Five statements with Ochiai scores 1.0, 0.6, 0.6, 0.6 and 0.3. How much
does each one contribute to the commits in its history?
"""

from culprit import CodeElement, SuspiciousnessMap, rank_elements
from culprit.scoring import VotingConfig, vote

elements = [CodeElement("Calc.java", line) for line in (10, 11, 12, 13, 14)]
susp = SuspiciousnessMap(dict(zip(elements, [1.0, 0.6, 0.6, 0.6, 0.3])))

# Max-tiebreak puts the three tied statements at rank 4, dense ranking at 2
for tau in ("max", "dense"):
    ranks = rank_elements(susp, tau)
    print(tau, [ranks[e] for e in elements])

# alpha=0 votes by rank alone; alpha=1 also scales by the score
print()
print(f"{'alpha':>5} {'tau':>6}  votes")
for alpha in (0, 1):
    for tau in ("max", "dense"):
        cfg = VotingConfig(alpha=alpha, tau=tau)
        ranks = rank_elements(susp, tau)
        votes = [vote(e, susp, ranks, cfg) for e in elements]
        print(f"{alpha:>5} {tau:>6}  " + "  ".join(f"{v:.2f}" for v in votes))

# With max-tiebreak a crowd of tied elements cannot outvote the single clear
# leader: three statements at 0.25 each still fall short of 1.0
