"""Command-line entry point: ``fairsumm <command> ...``.

Exit status is 0 on success, 2 for invalid input and 3 when the fairness
requirements cannot be met.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .constraints import (
    FairnessSpec,
    MatroidOracle,
    NOTIONS,
    adverse_impact_audit,
    format_quotas,
    make_quotas,
    parse_quotas,
)
from .corpus import load_corpus, load_scores, load_stopwords
from .errors import FairSummError, InfeasibleError, ValidationError
from .harness import (
    ALGORITHMS,
    NoiseExperimentConfig,
    audit_flags,
    brute_force_optimum,
    render_noise_table,
    render_table,
    run_noise_experiment,
    summarize,
    true_counts,
)
from .objective import ObjectiveConfig
from .rouge import load_reference, rouge_multi, summary_tokens
from .simsem import DEFAULT_SEED, build_model, read_sim_cache, write_sim_cache
from .solver import SolverConfig

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _paths(text):
    return [p for p in text.split(",") if p]


def _add_corpus_opts(p):
    p.add_argument("--allow-unlabeled", action="store_true",
                   help="keep units without a group label (they are never selected by quota)")
    p.add_argument("--stopwords", type=Path, help="stopword file, one term per line")


def _add_model_opts(p):
    p.add_argument("--lambda1", type=float, default=1.0, help="coverage weight")
    p.add_argument("--lambda2", type=float, default=1.0, help="diversity weight")
    p.add_argument("--delta", type=float, default=0.1, help="threshold decay")
    p.add_argument("--clusters", type=int, help="k-means cluster count (default ceil(N/10))")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--sim-cache", type=Path,
                   help="binary similarity cache; read if present, written otherwise")


def _add_fairness_opts(p, k_required=True):
    p.add_argument("--notion", choices=NOTIONS, default="equal")
    p.add_argument("-k", type=int, required=k_required, help="summary length")
    p.add_argument("--quota", type=parse_quotas, help="custom quotas, e.g. male=25,female=25")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairsumm", description="Fair extractive summarization.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("summarize", help="select a summary and print a JSON report")
    s.add_argument("corpus", type=Path, help="JSONL corpus with id, text, group")
    s.add_argument("--algo", choices=ALGORITHMS, default="fairsumm")
    _add_fairness_opts(s)
    _add_model_opts(s)
    _add_corpus_opts(s)
    s.add_argument("--scores", type=Path, help="id<TAB>score file for re-ranking")
    s.add_argument("--p", type=float, help="minimum protected share for re-ranking")
    s.add_argument("--alpha", type=float, default=0.5, help="significance for re-ranking")
    s.add_argument("--refs", type=_paths, help="comma-separated reference summary files")
    s.add_argument("--format", choices=("json", "table"), default="json")
    s.add_argument("-o", "--output", type=Path, help="write the report here instead of stdout")

    r = sub.add_parser("refasumm", help="shorthand for summarize --algo refasumm")
    r.add_argument("corpus", type=Path)
    _add_fairness_opts(r)
    _add_model_opts(r)
    _add_corpus_opts(r)
    r.add_argument("--scores", type=Path)
    r.add_argument("--p", type=float)
    r.add_argument("--alpha", type=float, default=0.5)
    r.add_argument("--refs", type=_paths)
    r.add_argument("--format", choices=("json", "table"), default="json")
    r.add_argument("-o", "--output", type=Path)

    e = sub.add_parser("evaluate", help="ROUGE of a summary against references")
    e.add_argument("--summary", type=Path, required=True,
                   help="summary as a report JSON (needs --corpus), JSONL of {text}, or plain lines")
    e.add_argument("--refs", type=_paths, required=True)
    e.add_argument("--corpus", type=Path)
    _add_corpus_opts(e)

    a = sub.add_parser("audit", help="representation flags for a summary")
    a.add_argument("--summary", type=Path, help="report JSON or one unit id per line")
    a.add_argument("--corpus", type=Path)
    a.add_argument("--counts", type=parse_quotas, help="summary counts, e.g. female=34,male=16")
    a.add_argument("--census", type=parse_quotas, help="corpus counts, e.g. female=2505,male=1532")
    _add_corpus_opts(a)

    q = sub.add_parser("quota", help="per-group quotas for a fairness notion")
    _add_fairness_opts(q)
    q.add_argument("--corpus", type=Path)
    q.add_argument("--census", type=parse_quotas, help="group counts, e.g. a=2505,b=1532")
    _add_corpus_opts(q)

    n = sub.add_parser("noise-exp", help="label-noise robustness experiment")
    n.add_argument("corpus", type=Path)
    _add_fairness_opts(n)
    _add_model_opts(n)
    _add_corpus_opts(n)
    n.add_argument("--rates", type=_floats, default=[0.1, 0.2, 0.3])
    n.add_argument("--trials", type=int, default=100)
    n.add_argument("--refs", type=_paths)
    n.add_argument("--format", choices=("json", "table"), default="json")

    o = sub.add_parser("oracle", help="exhaustive optimum for small corpora")
    o.add_argument("corpus", type=Path)
    _add_fairness_opts(o)
    _add_model_opts(o)
    _add_corpus_opts(o)
    return parser


def _corpus(args, path=None):
    stops = load_stopwords(args.stopwords) if args.stopwords else None
    return load_corpus(path or args.corpus, stopword_list=stops, allow_unlabeled=args.allow_unlabeled)


def _refs(args):
    if not args.refs:
        return None
    stops = load_stopwords(args.stopwords) if args.stopwords else None
    return [load_reference(p, stops) for p in args.refs]


def _model(args, corpus):
    similarity = None
    cache = args.sim_cache
    if cache is not None and cache.exists():
        cached = read_sim_cache(cache)
        similarity = lambda _c: cached
    model = build_model(corpus, clusters=args.clusters, seed=args.seed, similarity=similarity)
    if cache is not None and not cache.exists():
        write_sim_cache(cache, model.sim)
    return model


def _emit(text, output=None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_summarize(args, algo=None):
    corpus = _corpus(args)
    algo = algo or args.algo
    if args.scores:
        corpus = corpus.with_scores(load_scores(args.scores))
    report = summarize(
        corpus, algo, args.k, args.notion, args.quota,
        ObjectiveConfig(args.lambda1, args.lambda2), SolverConfig(args.delta),
        seed=args.seed, model=_model(args, corpus), p=args.p, alpha=args.alpha,
        references=_refs(args),
    )
    _emit(render_table(report) if args.format == "table" else report.to_json(), args.output)


def _read_summary_ids(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict) and "selected" in doc:
        return [str(x) for x in doc["selected"]]
    return [line.strip() for line in text.splitlines() if line.strip()]


def cmd_evaluate(args):
    refs = _refs(args)
    text = args.summary.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict) and "selected" in doc:
        if args.corpus is None:
            raise ValidationError("a report summary needs --corpus to resolve unit ids")
        corpus = _corpus(args, args.corpus)
        tokens = summary_tokens(corpus[corpus.index_of(str(i))] for i in doc["selected"])
    else:
        stops = load_stopwords(args.stopwords) if args.stopwords else None
        tokens = load_reference(args.summary, stops)
    scores = rouge_multi(tokens, refs)
    _emit(json.dumps({v: s.as_dict() for v, s in scores.items()}, indent=2, sort_keys=True) + "\n")


def cmd_audit(args):
    if args.counts is not None:
        if args.census is None and args.corpus is None:
            raise ValidationError("--counts needs --census or --corpus")
        census = args.census if args.census is not None else _corpus(args, args.corpus).census
        counts = args.counts
    else:
        if args.summary is None or args.corpus is None:
            raise ValidationError("audit needs --summary with --corpus, or --counts with --census")
        corpus = _corpus(args, args.corpus)
        counts = true_counts(corpus, [corpus.index_of(i) for i in _read_summary_ids(args.summary)])
        census = corpus.census
    flags = {g: list(f) for g, f in adverse_impact_audit(counts, census).items()}
    _emit(json.dumps({"counts": counts, "flags": flags}, indent=2, sort_keys=True) + "\n")


def cmd_quota(args):
    if args.census is not None:
        census = args.census
    elif args.corpus is not None:
        census = _corpus(args, args.corpus).census
    else:
        raise ValidationError("quota needs --census or --corpus")
    _emit(format_quotas(make_quotas(args.notion, args.k, census, args.quota)) + "\n")


def cmd_noise(args):
    corpus = _corpus(args)
    spec = FairnessSpec.build(args.notion, args.k, corpus.census, args.quota)
    rows = run_noise_experiment(
        corpus, spec, ObjectiveConfig(args.lambda1, args.lambda2), SolverConfig(args.delta),
        NoiseExperimentConfig(tuple(args.rates), args.trials, args.seed),
        references=_refs(args), model=_model(args, corpus), seed=args.seed,
    )
    if args.format == "table":
        _emit(render_noise_table(rows))
    else:
        _emit(json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n")


def cmd_oracle(args):
    corpus = _corpus(args)
    model = _model(args, corpus)
    objective = ObjectiveConfig(args.lambda1, args.lambda2)
    quotas = make_quotas(args.notion, args.k, corpus.census, args.quota)
    best, value = brute_force_optimum(model, objective, MatroidOracle(corpus.labels(), quotas), args.k)
    counts = true_counts(corpus, best)
    _emit(json.dumps({
        "selected": [corpus[i].id for i in best],
        "objective": value,
        "group_counts": counts,
        "flags": audit_flags(counts, corpus.census),
        "quotas": quotas,
    }, indent=2, sort_keys=True) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "summarize": cmd_summarize,
        "refasumm": lambda a: cmd_summarize(a, "refasumm"),
        "evaluate": cmd_evaluate,
        "audit": cmd_audit,
        "quota": cmd_quota,
        "noise-exp": cmd_noise,
        "oracle": cmd_oracle,
    }
    try:
        handlers[args.command](args)
    except InfeasibleError as exc:
        print(f"fairsumm: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FairSummError, OSError) as exc:
        print(f"fairsumm: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
