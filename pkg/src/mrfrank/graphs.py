"""The five sparse literature graphs with time-aware edge weights, plus the
column-normalized operator blocks consumed by the ranking iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .corpus import Corpus
from .textfeat import Feature, feature_key


@dataclass(frozen=True)
class EntityIndex:
    paper_ids: tuple[str, ...]
    author_ids: tuple[str, ...]
    feature_ids: tuple[str, ...]
    paper_pos: dict[str, int] = field(repr=False, default_factory=dict)
    author_pos: dict[str, int] = field(repr=False, default_factory=dict)
    feature_pos: dict[str, int] = field(repr=False, default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.paper_ids)

    @property
    def m(self) -> int:
        return len(self.author_ids)

    @property
    def k(self) -> int:
        return len(self.feature_ids)


def build_index(corpus: Corpus, features) -> EntityIndex:
    papers = tuple(sorted(corpus.papers))
    authors = tuple(sorted(corpus.authors))
    feats = tuple(sorted(feature_key(f) for f in features))
    return EntityIndex(
        paper_ids=papers, author_ids=authors, feature_ids=feats,
        paper_pos={p: i for i, p in enumerate(papers)},
        author_pos={a: i for i, a in enumerate(authors)},
        feature_pos={f: i for i, f in enumerate(feats)},
    )


class SparseMatrix:
    """COO triples in canonical (row, col) order with a derived CSR index.

    All stored weights are strictly positive; zeros are omitted.
    """

    def __init__(self, shape: tuple[int, int], rows, cols, data):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        data = np.asarray(data, dtype=np.float64)
        keep = data != 0.0
        rows, cols, data = rows[keep], cols[keep], data[keep]
        order = np.lexsort((cols, rows))
        self.shape = shape
        self.rows = rows[order]
        self.cols = cols[order]
        self.data = data[order]
        self.indptr = np.searchsorted(self.rows, np.arange(shape[0] + 1))

    @property
    def nnz(self) -> int:
        return self.data.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return kernels.spmv(self.indptr, self.rows, self.cols, self.data,
                            x, self.shape[0])

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix((self.shape[1], self.shape[0]),
                            self.cols, self.rows, self.data)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.rows, self.cols] = self.data
        return out

    @classmethod
    def from_entries(cls, shape: tuple[int, int], entries: dict) -> "SparseMatrix":
        items = sorted(entries.items())
        rows = [rc[0] for rc, _ in items]
        cols = [rc[1] for rc, _ in items]
        data = [w for _, w in items]
        return cls(shape, rows, cols, data)

    def write_coordinate(self, path) -> None:
        """Coordinate-format text export: header with dimensions, then
        ``row col weight`` triples."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{self.shape[0]} {self.shape[1]} {self.nnz}\n")
            for r, c, w in zip(self.rows, self.cols, self.data):
                fh.write(f"{r} {c} {w:.17g}\n")

    @classmethod
    def read_coordinate(cls, path) -> "SparseMatrix":
        with open(path, encoding="utf-8") as fh:
            nr, nc, nnz = (int(v) for v in fh.readline().split())
            rows, cols, data = [], [], []
            for _ in range(nnz):
                r, c, w = fh.readline().split()
                rows.append(int(r))
                cols.append(int(c))
                data.append(float(w))
        return cls((nr, nc), rows, cols, data)


def column_normalize(m: SparseMatrix) -> SparseMatrix:
    """Scale every nonzero column to sum 1; zero columns stay zero."""
    if m.nnz == 0:
        return m
    sums = np.bincount(m.cols, weights=m.data, minlength=m.shape[1])
    out = SparseMatrix.__new__(SparseMatrix)
    out.shape = m.shape
    out.rows = m.rows
    out.cols = m.cols
    out.data = m.data / sums[m.cols]
    out.indptr = m.indptr
    return out


def normalize_columns_like(m: SparseMatrix, ref: SparseMatrix) -> SparseMatrix:
    """Scale each column of ``m`` by the matching column sum of ``ref``.

    Used for the time-aware blocks with ``ref`` the undecayed counterpart:
    every outgoing citation of one paper carries the same timestamp, so
    normalizing by the decayed column sums would cancel the decay exactly.
    Normalizing by the undecayed sums keeps each citer's vote split across
    its references while recent votes keep more absolute weight; at rho = 0
    this is plain column normalization.
    """
    if m.nnz == 0:
        return m
    if not (np.array_equal(m.rows, ref.rows) and np.array_equal(m.cols, ref.cols)):
        raise ValueError("reference matrix has a different sparsity pattern")
    sums = np.bincount(ref.cols, weights=ref.data, minlength=ref.shape[1])
    out = SparseMatrix.__new__(SparseMatrix)
    out.shape = m.shape
    out.rows = m.rows
    out.cols = m.cols
    out.data = m.data / sums[m.cols]
    out.indptr = m.indptr
    return out


def _decay(t_current: int, t_event: int, rho: float, time_aware: bool) -> float:
    if not time_aware or rho == 0.0:
        return 1.0
    return math.exp(-rho * (t_current - t_event))


def build_citation(corpus: Corpus, index: EntityIndex, t_current: int,
                   rho: float, time_aware: bool = True) -> SparseMatrix:
    """N x N matrix, entry (i, j) when paper i cites paper j, weighted by
    the age of the citation (citing paper's publication year)."""
    entries: dict[tuple[int, int], float] = {}
    for citing, cited, year in corpus.citation_edges:
        i = index.paper_pos[citing]
        j = index.paper_pos[cited]
        entries[(i, j)] = _decay(t_current, year, rho, time_aware)
    return SparseMatrix.from_entries((index.n, index.n), entries)


def build_coauthor(corpus: Corpus, index: EntityIndex, t_current: int,
                   rho: float, time_aware: bool = True) -> SparseMatrix:
    """Symmetric M x M matrix summing decayed weights over coauthored papers."""
    entries: dict[tuple[int, int], float] = {}
    for pid in sorted(corpus.papers):
        p = corpus.papers[pid]
        w = _decay(t_current, p.year, rho, time_aware)
        idxs = sorted(index.author_pos[a] for a in set(p.author_ids))
        for ii in range(len(idxs)):
            for jj in range(ii + 1, len(idxs)):
                a, b = idxs[ii], idxs[jj]
                entries[(a, b)] = entries.get((a, b), 0.0) + w
                entries[(b, a)] = entries.get((b, a), 0.0) + w
    return SparseMatrix.from_entries((index.m, index.m), entries)


def build_author_paper(corpus: Corpus, index: EntityIndex) -> SparseMatrix:
    """Binary M x N authorship matrix."""
    entries: dict[tuple[int, int], float] = {}
    for pid in sorted(corpus.papers):
        j = index.paper_pos[pid]
        for a in corpus.papers[pid].author_ids:
            entries[(index.author_pos[a], j)] = 1.0
    return SparseMatrix.from_entries((index.m, index.n), entries)


def build_paper_feature(weights: dict[tuple[str, Feature], float],
                        index: EntityIndex) -> SparseMatrix:
    """N x K tf-idf matrix from the paper tf-idf map."""
    entries = {}
    for (pid, feat), w in weights.items():
        key = feature_key(feat)
        if key in index.feature_pos:
            entries[(index.paper_pos[pid], index.feature_pos[key])] = w
    return SparseMatrix.from_entries((index.n, index.k), entries)


def build_author_feature(weights: dict[tuple[str, Feature], float],
                         index: EntityIndex) -> SparseMatrix:
    """M x K tf-idf matrix from the author tf-idf map."""
    entries = {}
    for (aid, feat), w in weights.items():
        key = feature_key(feat)
        if key in index.feature_pos:
            entries[(index.author_pos[aid], index.feature_pos[key])] = w
    return SparseMatrix.from_entries((index.m, index.k), entries)


@dataclass
class GraphSet:
    index: EntityIndex
    citation: SparseMatrix       # N x N, (i, j): i cites j
    coauthor: SparseMatrix       # M x M, symmetric
    author_paper: SparseMatrix   # M x N, binary
    paper_feature: SparseMatrix  # N x K, tf-idf
    author_feature: SparseMatrix  # M x K, tf-idf
    t_current: int = 0
    rho_edge: float = 0.0
    time_aware: bool = True
    # undecayed counterparts, present when decay is active; they provide the
    # normalizing column sums for the time-aware blocks
    citation_undecayed: SparseMatrix | None = None
    coauthor_undecayed: SparseMatrix | None = None


def build_graphs(corpus: Corpus, index: EntityIndex, paper_weights,
                 author_weights, t_current: int, rho_edge: float,
                 time_aware: bool = True) -> GraphSet:
    gs = GraphSet(
        index=index,
        citation=build_citation(corpus, index, t_current, rho_edge, time_aware),
        coauthor=build_coauthor(corpus, index, t_current, rho_edge, time_aware),
        author_paper=build_author_paper(corpus, index),
        paper_feature=build_paper_feature(paper_weights, index),
        author_feature=build_author_feature(author_weights, index),
        t_current=t_current, rho_edge=rho_edge, time_aware=time_aware,
    )
    if time_aware and rho_edge != 0.0:
        gs.citation_undecayed = build_citation(corpus, index, t_current, 0.0, False)
        gs.coauthor_undecayed = build_coauthor(corpus, index, t_current, 0.0, False)
    return gs


@dataclass
class OperatorBlocks:
    """Column-normalized blocks, each in the orientation used by the
    update equations (authority flows citing -> cited, so the citation
    block is transposed before normalization)."""

    pp: SparseMatrix  # N x N
    pa: SparseMatrix  # N x M
    pt: SparseMatrix  # N x K
    aa: SparseMatrix  # M x M
    ap: SparseMatrix  # M x N
    at: SparseMatrix  # M x K
    tp: SparseMatrix  # K x N
    ta: SparseMatrix  # K x M


def operator_blocks(graphs: GraphSet) -> OperatorBlocks:
    if graphs.citation_undecayed is not None:
        pp = normalize_columns_like(graphs.citation.transpose(),
                                    graphs.citation_undecayed.transpose())
    else:
        pp = column_normalize(graphs.citation.transpose())
    if graphs.coauthor_undecayed is not None:
        aa = normalize_columns_like(graphs.coauthor, graphs.coauthor_undecayed)
    else:
        aa = column_normalize(graphs.coauthor)
    return OperatorBlocks(
        pp=pp,
        pa=column_normalize(graphs.author_paper.transpose()),
        pt=column_normalize(graphs.paper_feature),
        aa=aa,
        ap=column_normalize(graphs.author_paper),
        at=column_normalize(graphs.author_feature),
        tp=column_normalize(graphs.paper_feature.transpose()),
        ta=column_normalize(graphs.author_feature.transpose()),
    )
