"""Command-line pipeline: ingest, preprocess, features, rank, eval, report.

Exit codes: 0 success, 1 usage, 2 data error, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import evaluate as eval_mod
from . import graphs as graphs_mod
from . import ranking as ranking_mod
from . import textfeat
from .corpus import DataError, PreprocessConfig
from .ranking import MODES, HyperParams

log = logging.getLogger("mrfrank")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NO_CONVERGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def add_preprocess_flags(parser):
    g = parser.add_argument_group("preprocess")
    g.add_argument("--min-year", type=int, default=None)
    g.add_argument("--require-abstract", action="store_true", default=None)
    g.add_argument("--survey-substrings", type=str, default=None,
                   help="comma-separated title substrings")
    g.add_argument("--proceedings-prefixes", type=str, default=None,
                   help="comma-separated title prefixes")


def add_feature_flags(parser):
    g = parser.add_argument_group("features")
    g.add_argument("--window-years", type=int, default=None)
    g.add_argument("--min-df", type=int, default=None)
    g.add_argument("--stopwords", type=str, default=None,
                   help="path to a stopword list overriding the built-in one")


def add_hyperparam_flags(parser):
    g = parser.add_argument_group("hyperparams")
    g.add_argument("--alpha-p", type=float, default=None)
    g.add_argument("--beta-p", type=float, default=None)
    g.add_argument("--alpha-a", type=float, default=None)
    g.add_argument("--beta-a", type=float, default=None)
    g.add_argument("--alpha-f", type=float, default=None)
    g.add_argument("--rho-edge", type=float, default=None)
    g.add_argument("--rho-feature", type=float, default=None)
    g.add_argument("--u", type=int, default=None)
    g.add_argument("--tolerance", type=float, default=None)
    g.add_argument("--max-iterations", type=int, default=None)
    g.add_argument("--mode", choices=[m.replace("_", "-") for m in MODES],
                   default=None)


@dataclasses.dataclass
class RunConfig:
    corpus: Path
    workspace: Path
    preprocess: PreprocessConfig
    window_years: int = 1
    min_df: int = 3
    stopwords: str | None = None
    hyperparams: HyperParams = dataclasses.field(default_factory=HyperParams)
    cutoff_year: int = 2005
    horizon_year: int = 2011
    cohort_years: tuple[int, ...] = ()
    ks: tuple[int, ...] = (10, 20, 50)


def _merge(cls, file_section: dict, args, fields):
    kwargs = dict(file_section)
    for f in fields:
        v = getattr(args, f, None)
        if v is not None:
            kwargs[f] = v
    return cls(**kwargs)


def load_config(args) -> RunConfig:
    raw = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)

    pp_raw = dict(raw.get("preprocess", {}))
    for key in ("survey_substrings", "proceedings_prefixes"):
        if key in pp_raw:
            pp_raw[key] = tuple(pp_raw[key])
        v = getattr(args, key, None)
        if v is not None:
            pp_raw[key] = tuple(s for s in v.split(",") if s)
            setattr(args, key, None)
    pp = _merge(PreprocessConfig, pp_raw,
                args, [f.name for f in dataclasses.fields(PreprocessConfig)])

    hp_raw = dict(raw.get("hyperparams", {}))
    if getattr(args, "mode", None) is not None:
        args.mode = args.mode.replace("-", "_")
    hp = _merge(HyperParams, hp_raw,
                args, [f.name for f in dataclasses.fields(HyperParams)])

    feat_raw = raw.get("features", {})
    proto = raw.get("protocol", {})

    def pick(name, default, section):
        v = getattr(args, name, None)
        if v is not None:
            return v
        return section.get(name, default)

    corpus_path = pick("corpus", raw.get("corpus"), raw)
    workspace = pick("workspace", raw.get("workspace"), raw)
    if corpus_path is None or workspace is None:
        raise DataError("config must provide corpus and workspace paths")
    return RunConfig(
        corpus=Path(corpus_path),
        workspace=Path(workspace),
        preprocess=pp,
        window_years=pick("window_years", 1, feat_raw),
        min_df=pick("min_df", 3, feat_raw),
        stopwords=pick("stopwords", None, feat_raw),
        hyperparams=hp,
        cutoff_year=proto.get("cutoff_year", 2005),
        horizon_year=proto.get("horizon_year", 2011),
        cohort_years=tuple(proto.get("cohort_years", ())),
        ks=tuple(proto.get("ks", (10, 20, 50))),
    )


def _load_corpus(path):
    records = corpus_mod.read_native(path)
    return corpus_mod.parse_corpus(records)


def cmd_ingest(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        if args.format == "arnetminer":
            records = corpus_mod.convert_arnetminer(fh)
        else:
            records = [json.loads(line) for line in fh if line.strip()]
    corpus, report = corpus_mod.parse_corpus(records)
    corpus_mod.write_native(corpus, args.output)
    for line in report.lines():
        print(line)
    return EXIT_OK


def cmd_preprocess(args) -> int:
    cfg = _merge(PreprocessConfig, {}, args,
                 ["min_year", "require_abstract"])
    for key in ("survey_substrings", "proceedings_prefixes"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, tuple(s for s in v.split(",") if s))
    corpus, _ = _load_corpus(args.input)
    out, report = corpus_mod.preprocess(corpus, cfg)
    corpus_mod.write_native(out, args.output)
    for line in report.lines():
        print(line)
    return EXIT_OK


def cmd_features(args) -> int:
    corpus, _ = _load_corpus(args.input)
    stop = (textfeat.load_stopwords(args.stopwords) if args.stopwords
            else textfeat.load_stopwords())
    table = textfeat.build_feature_table(
        corpus, window_years=args.window_years or 1,
        min_df=args.min_df or 3, stopwords=stop)
    textfeat.write_feature_table(table, args.output,
                                 rho=args.rho if args.rho is not None else 0.2,
                                 u=args.u if args.u is not None else 3)
    print(f"features\t{len(table.features)}")
    return EXIT_OK


def _pipeline(cfg: RunConfig):
    """Shared front half: corpus -> preprocess -> cutoff split."""
    corpus, _ = _load_corpus(cfg.corpus)
    pre, filter_report = corpus_mod.preprocess(corpus, cfg.preprocess)
    sub, gt = corpus_mod.split_ground_truth(pre, cfg.cutoff_year, cfg.horizon_year)
    return sub, gt, filter_report


def cmd_rank(args) -> int:
    cfg = load_config(args)
    cfg.workspace.mkdir(parents=True, exist_ok=True)
    hp = cfg.hyperparams
    sub, _, filter_report = _pipeline(cfg)
    (cfg.workspace / "filter_report.txt").write_text(
        "\n".join(filter_report.lines()) + "\n")

    stop = (textfeat.load_stopwords(cfg.stopwords) if cfg.stopwords
            else textfeat.load_stopwords())
    table = textfeat.build_feature_table(sub, window_years=cfg.window_years,
                                         min_df=cfg.min_df, stopwords=stop)
    hp_eff = hp.effective()
    e_by_feat = textfeat.innovativeness_at_window(
        table, table.n_windows - 1, rho=hp_eff.rho_feature, u=hp_eff.u)

    index = graphs_mod.build_index(sub, table.features)
    if index.n == 0 or index.m == 0 or index.k == 0:
        raise DataError("pipeline produced an empty entity set "
                        f"(N={index.n}, M={index.m}, K={index.k})")
    e = np.zeros(index.k)
    for feat, score in e_by_feat.items():
        e[index.feature_pos[textfeat.feature_key(feat)]] = score

    pw = textfeat.tfidf_paper(sub, table)
    aw = textfeat.tfidf_author(sub, table)
    gs = graphs_mod.build_graphs(sub, index, pw, aw, t_current=cfg.cutoff_year,
                                 rho_edge=hp_eff.rho_edge)
    state, conv = ranking_mod.run(gs, e, hp)

    mode = hp.mode
    ws = cfg.workspace
    ranking_mod.write_ranking(
        ranking_mod.rank_entities(state.a_paper, index.paper_ids),
        ws / f"papers_{mode}.tsv", conv.converged)
    ranking_mod.write_ranking(
        ranking_mod.rank_entities(state.a_author, index.author_ids),
        ws / f"authors_{mode}.tsv", conv.converged)
    ranking_mod.write_ranking(
        ranking_mod.rank_entities(state.a_feature, index.feature_ids),
        ws / f"features_{mode}.tsv", conv.converged)
    ranking_mod.write_convergence(conv, ws / f"convergence_{mode}.tsv")

    if not conv.converged:
        print(f"WARNING: not converged after {conv.iterations} iterations "
              f"(last delta {state.last_delta:.3g})", file=sys.stderr)
        return EXIT_NO_CONVERGE
    print(f"converged in {conv.iterations} iterations")
    return EXIT_OK


def _read_ranking(path) -> list[str]:
    ids = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("rank\t"):
                continue
            ids.append(line.split("\t")[1])
    return ids


def cmd_eval(args) -> int:
    cfg = load_config(args)
    sub, gt, _ = _pipeline(cfg)
    ws = cfg.workspace

    methods: dict[str, tuple[list[str] | None, list[str] | None]] = {}
    for mode in MODES:
        ppath = ws / f"papers_{mode}.tsv"
        apath = ws / f"authors_{mode}.tsv"
        if ppath.exists() or apath.exists():
            methods[mode] = (
                _read_ranking(ppath) if ppath.exists() else None,
                _read_ranking(apath) if apath.exists() else None,
            )
    if not methods:
        raise DataError(f"no ranking files found in workspace {ws}")

    rows = []
    for year in cfg.cohort_years:
        cohorts = {"P": eval_mod.papers_of_year(sub, year),
                   "A": eval_mod.authors_starting_year(sub, year)}
        for kind, cohort in cohorts.items():
            if not cohort.member_ids:
                log.warning("empty %s cohort for year %d, omitted",
                            cohort.kind, year)
                continue
            for method in sorted(methods):
                ranked = methods[method][0 if kind == "P" else 1]
                if ranked is None:
                    continue
                for res in eval_mod.evaluate_run(ranked, gt, cohort, list(cfg.ks)):
                    rows.append((year, method, kind, res.k, res.total_ri))
            cc = eval_mod.citation_count_baseline(sub, cohort)
            for res in eval_mod.evaluate_run(cc, gt, cohort, list(cfg.ks)):
                rows.append((year, "cc", kind, res.k, res.total_ri))

    out = ws / "eval.tsv"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("year\tmethod\tkind\tk\tri\n")
        for year, method, kind, k, ri in rows:
            fh.write(f"{year}\t{method}\t{kind}\t{k}\t{ri:.10g}\n")
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def render_report(eval_path) -> str:
    """Aligned per-year table: method rows, (k, P/A) columns."""
    rows = []
    with open(eval_path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            year, method, kind, k, ri = line.rstrip("\n").split("\t")
            rows.append((int(year), method, kind, int(k), float(ri)))
    if not rows:
        return "(no evaluation rows)\n"
    years = sorted({r[0] for r in rows})
    ks = sorted({r[3] for r in rows})
    methods = sorted({r[1] for r in rows})
    cell = {(y, m, kd, k): ri for y, m, kd, k, ri in rows}

    lines = []
    header = ["year", "method"] + [f"P@{k}" for k in ks] + [f"A@{k}" for k in ks]
    widths = [6, 22] + [8] * (2 * len(ks))
    lines.append("".join(h.ljust(w) for h, w in zip(header, widths)))
    for y in years:
        for m in methods:
            vals = []
            for kd in ("P", "A"):
                for k in ks:
                    v = cell.get((y, m, kd, k))
                    vals.append("-" if v is None else f"{v:.4g}")
            lines.append("".join(s.ljust(w) for s, w in
                                 zip([str(y), m] + vals, widths)))
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    text = render_report(args.input)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="mrfrank",
                     description="Future-influence ranking of papers and authors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert raw corpus to native JSON lines")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=["native", "arnetminer"], default="native")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="apply corpus filters")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    add_preprocess_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("features", help="build and snapshot the feature table")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    add_feature_flags(p)
    p.add_argument("--rho", type=float, default=None,
                   help="feature decay used for the snapshot scores")
    p.add_argument("--u", type=int, default=None)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("rank", help="run the full ranking pipeline")
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", default=None)
    p.add_argument("--workspace", default=None)
    add_preprocess_flags(p)
    add_feature_flags(p)
    add_hyperparam_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="score rankings against ground truth")
    p.add_argument("--config", default=None)
    p.add_argument("--corpus", default=None)
    p.add_argument("--workspace", default=None)
    add_preprocess_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="render the evaluation table")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except (DataError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
