"""Command-line entry point: ``culprit rank|bisect|eval|mine-history|check-style``.

Exit codes (stable):

==  =====================================
0   success
1   unexpected internal error
2   usage error
3   no failing tests in the coverage
4   version-control error / unknown commit
5   unreadable or malformed input
6   empty search space
7   inconsistent bisection oracle
8   bisection aborted by the oracle
==  =====================================
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .bisect import (
    CommandOracle, InteractiveOracle, TableOracle, standard_bisect, weighted_bisect, write_trace,
)
from .coverage import CoverageFormat, load_coverage
from .errors import (
    CulpritError, EmptySpace, InconsistentOracle, NoFailingTests, OracleAbort, ParseError, VcsError,
)
from .evaluation import BenchmarkConfig, load_dataset, run_benchmark
from .history import GitAdapter, SerializedAdapter, build_evolve_map, save_evolve_map
from .model import suspicious_elements, candidate_commits
from .pipeline import run_pipeline
from .scoring import BATCH, DEFAULT, ScoreReport, VotingConfig
from .style import DEFAULT_EXTENSIONS, files_for, is_style_change, style_commits

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("culprit")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2
EXIT_CODES = [
    (NoFailingTests, 3),
    (VcsError, 4),
    (ParseError, 5),
    (EmptySpace, 6),
    (InconsistentOracle, 7),
    (OracleAbort, 8),
]


def exit_code(exc: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return EXIT_INTERNAL


@dataclass
class RunConfig:
    repo: str | None = None
    coverage: str | None = None
    coverage_format: str = CoverageFormat.MATRIX_JSON.value
    history: str | None = None
    until: str = "HEAD"
    voting: VotingConfig = DEFAULT
    skip_stage2: bool = False
    select_relevant: bool = False
    formula: str = "ochiai"
    extensions: dict = field(default_factory=dict)
    out: str = "culprit-out"
    workers: int = 4
    seed: int = 0

    def validate(self):
        if not self.coverage:
            raise ParseError("no coverage input given")
        if not (self.repo or self.history):
            raise ParseError("need --repo or --history")
        if self.workers < 1:
            raise ParseError("workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["voting"] = self.voting.to_dict()
        return d


def read_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc}", path=path) from None
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc), path=path) from None


def _voting_from(args, base: VotingConfig) -> VotingConfig:
    if getattr(args, "preset", None) == "batch":
        base = BATCH
    fields = base.to_dict()
    for name in ("alpha", "tau", "lam", "mode"):
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    try:
        return VotingConfig.from_dict(fields)
    except ValueError as exc:
        raise ParseError(f"invalid voting configuration: {exc}") from None


def build_run_config(args) -> RunConfig:
    doc = read_toml(args.config) if getattr(args, "config", None) else {}
    paths, stages, run = doc.get("paths", {}), doc.get("stages", {}), doc.get("run", {})
    try:
        base = VotingConfig.from_dict(doc.get("voting", {})) if doc.get("voting") else DEFAULT
    except ValueError as exc:
        raise ParseError(f"invalid [voting] table: {exc}", path=args.config) from None
    cfg = RunConfig(
        repo=paths.get("repo"),
        coverage=paths.get("coverage"),
        coverage_format=paths.get("coverage_format", CoverageFormat.MATRIX_JSON.value),
        history=paths.get("history"),
        until=paths.get("until", "HEAD"),
        voting=base,
        skip_stage2=stages.get("skip_stage2", False),
        select_relevant=stages.get("select_relevant", False),
        formula=stages.get("formula", "ochiai"),
        extensions=doc.get("style", {}).get("extensions", {}),
        out=run.get("out", "culprit-out"),
        workers=run.get("workers", 4),
        seed=run.get("seed", 0),
    )
    for name in ("repo", "coverage", "coverage_format", "history", "until", "out", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if args.skip_stage2:
        cfg.skip_stage2 = True
    if args.select_relevant:
        cfg.select_relevant = True
    cfg.voting = _voting_from(args, cfg.voting)
    cfg.validate()
    return cfg


def _digest(path) -> str | None:
    p = Path(path)
    h = hashlib.sha256()
    if p.is_file():
        h.update(p.read_bytes())
    elif p.is_dir():
        for f in sorted(x for x in p.rglob("*") if x.is_file()):
            h.update(str(f.relative_to(p)).encode())
            h.update(f.read_bytes())
    else:
        return None
    return h.hexdigest()


def _adapter(cfg: RunConfig):
    if cfg.history:
        return SerializedAdapter(cfg.history)
    return GitAdapter(cfg.repo)


def cmd_rank(args) -> int:
    cfg = build_run_config(args)
    cov = load_coverage(cfg.coverage, cfg.coverage_format)
    adapter = _adapter(cfg)
    until = adapter.resolve(cfg.until)
    extensions = {**DEFAULT_EXTENSIONS, **cfg.extensions} if cfg.extensions else None
    result = run_pipeline(
        cov, adapter, until, cfg.voting,
        evolve=adapter.evolve if isinstance(adapter, SerializedAdapter) else None,
        skip_stage2=cfg.skip_stage2, select_relevant=cfg.select_relevant,
        formula=cfg.formula, extensions=extensions, workers=cfg.workers,
    )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(result.report.to_json(explain=args.explain))
    (out / "report.csv").write_text(result.report.to_csv())
    manifest = {
        "tool": "culprit",
        "version": __version__,
        "command": "rank",
        "config": cfg.to_dict(),
        "resolved_until": until,
        "inputs": {k: _digest(v) for k, v in (("coverage", cfg.coverage), ("history", cfg.history)) if v},
        "stats": result.stats,
    }
    (out / "run-manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"search space: |C_F|={len(result.cf)} style={len(result.style)} |C_BIC|={len(result.cbic)}")
    for r in result.report.ranked[: args.top]:
        print(f"{r.rank:>4}  {r.score:.6f}  {r.id}")
    return EXIT_OK


def load_report(path) -> ScoreReport:
    try:
        return ScoreReport.from_dict(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read score report: {exc}", path=path) from None


def cmd_bisect(args) -> int:
    report = load_report(args.scores)
    ordered = report.newest_first()
    if args.interactive:
        oracle = InteractiveOracle(sys.stdin, sys.stderr)
    elif args.oracle_cmd:
        oracle = CommandOracle(args.oracle_cmd, repo=args.repo)
    else:
        try:
            verdicts = json.loads(Path(args.table).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read verdict table: {exc}", path=args.table) from None
        oracle = TableOracle({c: v in (True, "bad") for c, v in verdicts.items()})
        oracle.check_monotone([c for c in ordered if c in oracle.verdicts])
    if args.uniform:
        result = standard_bisect(ordered, oracle, confirm_single=args.confirm_single)
    else:
        result = weighted_bisect(ordered, report.scores(), oracle, confirm_single=args.confirm_single)
    if args.trace == "-":
        write_trace(result, sys.stdout)
    else:
        with open(args.trace, "w") as fh:
            write_trace(result, fh)
    print(f"bic {result.bic}")
    print(f"iterations {result.iterations}")
    return EXIT_OK


def cmd_eval(args) -> int:
    doc = read_toml(args.config) if args.config else {}
    voting = VotingConfig.from_dict(doc["voting"]) if doc.get("voting") else DEFAULT
    voting = _voting_from(args, voting)
    bench = doc.get("benchmark", {})
    cfg = BenchmarkConfig(
        voting=voting,
        ablations=tuple(bench.get("ablations", BenchmarkConfig.ablations)),
        select_relevant=bench.get("select_relevant", False),
        bisection=bench.get("bisection", True),
        workers=args.workers or bench.get("workers", 4),
    )
    subjects = load_dataset(args.dataset)
    if not subjects:
        raise ParseError("dataset contains no subjects", path=args.dataset)
    report = run_benchmark(subjects, cfg)
    report.write(args.out)
    print(f"{'technique':<14} {'MRR':>6} " + " ".join(f"{'@' + str(n):>4}" for n in (1, 2, 3, 5, 10)))
    for name, row in report.aggregate.items():
        print(f"{name:<14} {row['mrr']:>6.3f} " + " ".join(f"{row['acc@' + str(n)]:>4}" for n in (1, 2, 3, 5, 10)))
    failed = [s.id for s in report.subjects if s.error]
    if failed:
        print(f"failed subjects: {', '.join(failed)}", file=sys.stderr)
    if report.bisection:
        b = report.bisection
        print(f"bisection: saved {b['mean_saved_vs_full']:.2f} probes on average vs full history "
              f"({b['improved_vs_full']}/{b['subjects']} improved)")
    return EXIT_OK


def cmd_mine_history(args) -> int:
    cov = load_coverage(args.coverage, args.coverage_format)
    adapter = GitAdapter(args.repo)
    until = adapter.resolve(args.until)
    ef = suspicious_elements(cov)
    ev = build_evolve_map(adapter, ef, until, workers=args.workers)
    style = None
    if args.with_style:
        style = style_commits(candidate_commits(ef, ev), ef, ev, adapter)
    save_evolve_map(ev, args.out, style)
    print(f"traced {len(ev.history)} elements, {len(ev.commits)} commits -> {args.out}")
    return EXIT_OK


def cmd_check_style(args) -> int:
    adapter = GitAdapter(args.repo)
    if args.commit:
        commit = adapter.resolve(args.commit)
        files = args.file or sorted(
            p for p in adapter.run("diff-tree", "--no-commit-id", "--name-only", "-r", commit).split()
        )
        verdict = is_style_change(commit, files, adapter)
        print(f"{commit} {'style' if verdict else 'semantic'}")
        return EXIT_OK
    if not args.coverage:
        raise ParseError("need --commit or --coverage")
    cov = load_coverage(args.coverage, args.coverage_format)
    until = adapter.resolve(args.until)
    ef = suspicious_elements(cov)
    ev = build_evolve_map(adapter, ef, until, workers=args.workers)
    for c in ev.newest_first(candidate_commits(ef, ev)):
        verdict = is_style_change(c, files_for(c, ef, ev), adapter)
        print(f"{c} {'style' if verdict else 'semantic'}")
    return EXIT_OK


def _voting_flags(p):
    p.add_argument("--alpha", type=int, choices=(0, 1))
    p.add_argument("--tau", choices=("max", "dense"))
    p.add_argument("--lam", type=float, help="depth decay factor in [0, 1)")
    p.add_argument("--mode", choices=("vote", "equal", "score-only", "max-aggr"))
    p.add_argument("--preset", choices=("default", "batch"),
                   help="default: alpha=0 tau=max lam=0.1; batch: alpha=1 tau=max lam=0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="culprit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"culprit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank candidate commits for a failure")
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--coverage")
    p.add_argument("--coverage-format", choices=[f.value for f in CoverageFormat])
    src = p.add_mutually_exclusive_group()
    src.add_argument("--repo")
    src.add_argument("--history", help="serialized Evolve map (replaces --repo)")
    p.add_argument("--until", help="commit under test (default HEAD)")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.add_argument("--skip-stage2", action="store_true")
    p.add_argument("--select-relevant", action="store_true")
    p.add_argument("--explain", action="store_true", help="include per-element vote provenance")
    p.add_argument("--top", type=int, default=10)
    _voting_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bisect", help="confirm the BIC by (weighted) bisection")
    p.add_argument("--scores", required=True, help="report.json from `culprit rank`")
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--oracle-cmd", help="shell command; {commit} is substituted")
    how.add_argument("--interactive", action="store_true")
    how.add_argument("--table", help="JSON object commit -> true/'bad' or false/'good'")
    p.add_argument("--repo", help="run --oracle-cmd in a scratch worktree of this repository")
    p.add_argument("--uniform", action="store_true", help="standard bisection (equal weights)")
    p.add_argument("--confirm-single", action="store_true",
                   help="probe the sole candidate when the space has one commit")
    p.add_argument("--trace", default="bisect-trace.jsonl", help="JSON-lines trace output ('-' for stdout)")
    p.set_defaults(func=cmd_bisect)

    p = sub.add_parser("eval", help="evaluate on a labelled dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config")
    p.add_argument("--out", default="culprit-eval")
    p.add_argument("--workers", type=int)
    _voting_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mine-history", help="trace and serialize the Evolve relation")
    p.add_argument("--repo", required=True)
    p.add_argument("--coverage", required=True)
    p.add_argument("--coverage-format", default=CoverageFormat.MATRIX_JSON.value,
                   choices=[f.value for f in CoverageFormat])
    p.add_argument("--until", default="HEAD")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--with-style", action="store_true", help="record Stage 2 verdicts too")
    p.set_defaults(func=cmd_mine_history)

    p = sub.add_parser("check-style", help="run only the style-change detector")
    p.add_argument("--repo", required=True)
    p.add_argument("--commit")
    p.add_argument("--file", action="append", help="restrict to these paths (repeatable)")
    p.add_argument("--coverage")
    p.add_argument("--coverage-format", default=CoverageFormat.MATRIX_JSON.value,
                   choices=[f.value for f in CoverageFormat])
    p.add_argument("--until", default="HEAD")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_check_style)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CulpritError as exc:
        print(f"culprit: [{exc.stage}] {type(exc).__name__}: {exc}", file=sys.stderr)
        trace = getattr(exc, "trace", None)
        if trace:
            for rec in trace:
                print(json.dumps(rec), file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
