"""Word and same-sentence word-pair features, windowed frequency histories,
burst-based innovativeness scores and tf-idf weights."""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources

from .corpus import Corpus, PaperRecord

# Feature keys: ("w", token) for a word, ("p", tok_a, tok_b) for a pair
# with tok_a < tok_b lexicographically.
Feature = tuple

_SENTENCE_SPLIT = re.compile(r"[.!?]+")
_TOKEN = re.compile(r"[a-z0-9]+")


def load_stopwords(path=None) -> frozenset[str]:
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return frozenset(w.strip() for w in fh if w.strip())
    text = resources.files("mrfrank.data").joinpath("stopwords.txt").read_text()
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


_DEFAULT_STOPWORDS = load_stopwords()


def tokenize(text: str, stopwords: frozenset[str] = _DEFAULT_STOPWORDS) -> list[list[str]]:
    """Split into sentences of normalized tokens.

    Sentences split on terminal punctuation; tokens lowercased, punctuation
    stripped; stopwords and tokens shorter than 2 characters dropped.
    """
    sentences = []
    for chunk in _SENTENCE_SPLIT.split(text.lower()):
        tokens = [t for t in _TOKEN.findall(chunk)
                  if len(t) >= 2 and t not in stopwords]
        if tokens:
            sentences.append(tokens)
    return sentences


def extract_features(paper: PaperRecord,
                     stopwords: frozenset[str] = _DEFAULT_STOPWORDS) -> Counter:
    """Per-paper feature counts: word counts plus same-sentence pair
    co-occurrences (a pair counts once per sentence)."""
    counts: Counter = Counter()
    text = paper.title + ". " + paper.abstract
    for sentence in tokenize(text, stopwords):
        for tok in sentence:
            counts[("w", tok)] += 1
        uniq = sorted(set(sentence))
        for i in range(len(uniq)):
            for j in range(i + 1, len(uniq)):
                counts[("p", uniq[i], uniq[j])] += 1
    return counts


@dataclass
class FeatureStats:
    feature: Feature
    window_freqs: dict[int, int]      # window index -> papers containing feature
    first_seen: int                   # window index of first occurrence
    doc_freq: int                     # papers containing the feature overall
    lambda_i: float = 0.0


@dataclass
class FeatureTable:
    features: dict[Feature, FeatureStats]
    global_lambda: float
    window_years: int
    origin_year: int                  # window 0 starts at this year
    n_windows: int                    # windows 0..n_windows-1 cover the corpus
    paper_features: dict[str, Counter] = field(default_factory=dict)

    def window_of(self, year: int) -> int:
        return (year - self.origin_year) // self.window_years

    def freq(self, feature: Feature, j: int) -> int:
        stats = self.features.get(feature)
        if stats is None:
            return 0
        return stats.window_freqs.get(j, 0)


def build_feature_table(corpus: Corpus, window_years: int = 1, min_df: int = 3,
                        stopwords: frozenset[str] = _DEFAULT_STOPWORDS,
                        lambda_lifetime: bool = True) -> FeatureTable:
    """Windowed document frequencies and Poisson mean estimates per feature.

    ``lambda_lifetime`` averages each feature's frequencies from its first
    occurrence window to the latest window; when off, the average runs over
    all corpus windows.
    """
    if not corpus.papers:
        return FeatureTable({}, 0.0, window_years, 0, 0, {})

    origin = min(p.year for p in corpus.papers.values())
    last = max(p.year for p in corpus.papers.values())
    n_windows = (last - origin) // window_years + 1

    per_paper: dict[str, Counter] = {}
    window_freqs: dict[Feature, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    doc_freq: Counter = Counter()
    for pid in sorted(corpus.papers):
        p = corpus.papers[pid]
        counts = extract_features(p, stopwords)
        per_paper[pid] = counts
        j = (p.year - origin) // window_years
        for feat in counts:
            window_freqs[feat][j] += 1
            doc_freq[feat] += 1

    features: dict[Feature, FeatureStats] = {}
    for feat in sorted(window_freqs):
        if doc_freq[feat] < min_df:
            continue
        freqs = dict(window_freqs[feat])
        first = min(freqs)
        span = n_windows - first if lambda_lifetime else n_windows
        lam = sum(freqs.values()) / span
        features[feat] = FeatureStats(feature=feat, window_freqs=freqs,
                                      first_seen=first, doc_freq=doc_freq[feat],
                                      lambda_i=lam)

    if features:
        global_lambda = sum(s.lambda_i for s in features.values()) / len(features)
    else:
        global_lambda = 0.0

    for pid in per_paper:
        per_paper[pid] = Counter({f: c for f, c in per_paper[pid].items()
                                  if f in features})
    return FeatureTable(features=features, global_lambda=global_lambda,
                        window_years=window_years, origin_year=origin,
                        n_windows=n_windows, paper_features=per_paper)


def innovativeness(stats: FeatureStats, table: FeatureTable, j: int,
                   rho: float, u: int = 3) -> float:
    """Burst score of a feature at window j: deviation from the Poisson mean,
    times discounted recent increments, times an age decay; clamped at 0.

    Windows before the feature's first occurrence contribute frequency 0.
    """
    lam_i = stats.lambda_i
    lam = table.global_lambda
    if lam_i <= 0.0 or lam <= 0.0:
        return 0.0
    x_j = stats.window_freqs.get(j, 0)
    first = abs(x_j - lam_i) / lam
    lookback = 0.0
    for s in range(1, u + 1):
        x_prev = stats.window_freqs.get(j - s, 0) if j - s >= stats.first_seen else 0
        lookback += ((x_j - x_prev) / lam_i) * (1.0 / s)
    age_years = (j - stats.first_seen) * table.window_years
    score = first * lookback * math.exp(-rho * age_years)
    return max(score, 0.0)


def innovativeness_at_window(table: FeatureTable, j: int, rho: float,
                             u: int = 3) -> dict[Feature, float]:
    return {feat: innovativeness(stats, table, j, rho, u)
            for feat, stats in table.features.items()}


def tfidf_paper(corpus: Corpus, table: FeatureTable) -> dict[tuple[str, Feature], float]:
    """tf-idf per (paper, feature): raw in-paper count times ln(N / df)."""
    n = len(corpus.papers)
    weights: dict[tuple[str, Feature], float] = {}
    for pid in sorted(table.paper_features):
        for feat, tf in table.paper_features[pid].items():
            idf = math.log(n / table.features[feat].doc_freq)
            w = tf * idf
            if w > 0.0:
                weights[(pid, feat)] = w
    return weights


def tfidf_author(corpus: Corpus, table: FeatureTable) -> dict[tuple[str, Feature], float]:
    """tf-idf per (author, feature) over the author's concatenated papers:
    summed counts times ln(M / authors-using-feature)."""
    author_tf: dict[str, Counter] = defaultdict(Counter)
    for pid in sorted(table.paper_features):
        for a in corpus.papers[pid].author_ids:
            author_tf[a].update(table.paper_features[pid])
    m = len(corpus.authors)
    author_freq: Counter = Counter()
    for a in author_tf:
        author_freq.update(author_tf[a].keys())
    weights: dict[tuple[str, Feature], float] = {}
    for a in sorted(author_tf):
        for feat, tf in author_tf[a].items():
            idf = math.log(m / author_freq[feat])
            w = tf * idf
            if w > 0.0:
                weights[(a, feat)] = w
    return weights


def feature_key(feature: Feature) -> str:
    """Stable text key for a feature, used for indexing and serialization."""
    return "|".join(feature)


def write_feature_table(table: FeatureTable, path, rho: float, u: int = 3) -> None:
    """Snapshot the table as TSV: kind, terms, df, lambda, per-window counts
    and innovativeness at the latest window."""
    j = table.n_windows - 1
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# origin_year\t{table.origin_year}\twindow_years\t{table.window_years}"
                 f"\tn_windows\t{table.n_windows}\tglobal_lambda\t{table.global_lambda:.10g}\n")
        fh.write("kind\tterms\tdf\tfirst_seen\tlambda\tinnov\twindow_counts\n")
        for feat in sorted(table.features):
            s = table.features[feat]
            counts = ",".join(f"{w}:{c}" for w, c in sorted(s.window_freqs.items()))
            e = innovativeness(s, table, j, rho, u)
            fh.write(f"{feat[0]}\t{' '.join(feat[1:])}\t{s.doc_freq}\t{s.first_seen}"
                     f"\t{s.lambda_i:.10g}\t{e:.10g}\t{counts}\n")
