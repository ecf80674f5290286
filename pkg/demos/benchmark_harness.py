"""
Evaluating on a labelled dataset
================================

Synthetic subjects stand in for real bug data: a coverage matrix, method
histories and a planted BIC each.
"""

import tempfile
from pathlib import Path

import numpy as np

from culprit.evaluation import BenchmarkConfig, load_dataset, run_benchmark
from culprit.synthetic import synthetic_subject

root = Path(tempfile.mkdtemp())
rng = np.random.default_rng(42)
for i in range(20):
    synthetic_subject(rng, f"S{i:02d}", bic_recency=rng.uniform(0, 0.5)).write(root / "dataset")

subjects = load_dataset(root / "dataset")
report = run_benchmark(subjects, BenchmarkConfig(workers=4))

print(f"{'technique':<12} {'MRR':>6}  acc@1 acc@3 acc@5")
for name, row in report.aggregate.items():
    print(f"{name:<12} {row['mrr']:>6.3f}  {row['acc@1']:>5} {row['acc@3']:>5} {row['acc@5']:>5}")

print()
print("lower bound <= random <= method:", report.dominance_ok)
print("bisection:", report.bisection)

report.write(root / "results")
print("written to", root / "results")
