"""Find the commit that introduced a failing test's bug from coverage and history."""

from .bisect import (
    BisectResult, CommandOracle, InteractiveOracle, TableOracle,
    compare_costs, standard_bisect, weighted_bisect,
)
from .coverage import CoverageFormat, load_coverage, select_relevant_tests
from .errors import (
    CulpritError, DuplicateTestName, EmptyDomain, EmptyInput, EmptySpace, FileUnavailable,
    InconsistentOracle, MissingHistory, NoFailingTests, OracleAbort, ParseError, UnknownCommit, VcsError,
)
from .evaluation import (
    BenchmarkConfig, LabelledSubject, accuracy_at, load_dataset, mrr,
    random_baseline_expected_rank, run_benchmark,
)
from .history import GitAdapter, SerializedAdapter, build_evolve_map, trace_history
from .model import (
    CodeElement, CommitRecord, CoverageMatrix, EvolveMap, Outcome, TestCase,
    candidate_commits, suspicious_elements,
)
from .pipeline import run_pipeline
from .sbfl import SuspiciousnessMap, Tie, ochiai, rank_elements
from .scoring import (
    BATCH, DEFAULT, Mode, ScoreReport, VotingConfig, commit_score, depth, rank_commits,
    score_commits, vote,
)
from .style import elements_touched_by, fingerprint, is_style_change, reduce_search_space

__version__ = "0.1.0"
