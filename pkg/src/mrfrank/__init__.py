"""Future-influence ranking of papers and authors: burst-detected text
features plus time-aware citation/coauthor graphs combined in a
mutual-reinforcement eigenvector iteration."""

__version__ = "0.1.0"

from .corpus import (AuthorRecord, Corpus, GroundTruth, PaperRecord,
                     PreprocessConfig, parse_corpus, preprocess,
                     split_ground_truth)
from .ranking import (ConvergenceLog, HyperParams, RankState,
                      assemble_combined, init_state, iterate_once,
                      rank_entities, run)

__all__ = [
    "AuthorRecord", "Corpus", "GroundTruth", "PaperRecord",
    "PreprocessConfig", "parse_corpus", "preprocess", "split_ground_truth",
    "ConvergenceLog", "HyperParams", "RankState", "assemble_combined",
    "init_state", "iterate_once", "rank_entities", "run",
]
