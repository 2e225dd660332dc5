"""Mutual-reinforcement power iteration over papers, authors and text
features, with the dense combined-matrix oracle and ranked-list output.

The iteration applies the combined block matrix to the concatenated
authority vector and renormalizes it by its total sum, which is exactly
power iteration and therefore converges to the dominant eigenvector of
the combined matrix.  The exposed per-type vectors are each rescaled to
sum 1 after every step; their relative masses are carried in the state.

The innovativeness vector is rescaled to sum 1 before entering the
matrix, so only the relative burstiness of features matters and a global
rescaling of the scores cannot change any ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .graphs import EntityIndex, GraphSet, OperatorBlocks, operator_blocks

MODES = ("full", "no_time", "no_content", "no_time_no_content")


class NumericalError(Exception):
    """Non-finite value produced during the iteration."""


@dataclass
class HyperParams:
    alpha_p: float = 0.4
    beta_p: float = 1.0 / 3.0   # gamma1 = (1-beta_p)(1-alpha_p) = 0.4
    alpha_a: float = 0.4
    beta_a: float = 0.5         # gamma2 = (1-beta_a)(1-alpha_a) = 0.3
    alpha_f: float = 0.5
    rho_edge: float = 0.2
    rho_feature: float = 0.2
    u: int = 3
    tolerance: float = 1e-8
    max_iterations: int = 200
    mode: str = "full"

    def __post_init__(self):
        for name in ("alpha_p", "beta_p", "alpha_a", "beta_a", "alpha_f"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be > 0")
        if self.rho_edge < 0.0 or self.rho_feature < 0.0:
            raise ValueError("decay rates must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def effective(self) -> "HyperParams":
        """Coefficients after applying the ablation mode: no_time forces
        binary edges (rho_edge = 0), no_content forces beta_p = beta_a = 1."""
        hp = self
        if hp.mode in ("no_time", "no_time_no_content"):
            hp = replace(hp, rho_edge=0.0)
        if hp.mode in ("no_content", "no_time_no_content"):
            hp = replace(hp, beta_p=1.0, beta_a=1.0)
        return hp


@dataclass
class RankState:
    a_paper: np.ndarray
    a_author: np.ndarray
    a_feature: np.ndarray
    # relative mass of each section in the underlying concatenated vector
    masses: np.ndarray = field(default_factory=lambda: np.full(3, 1.0 / 3.0))
    iteration: int = 0
    last_delta: float = float("inf")

    def concatenated(self) -> np.ndarray:
        return np.concatenate([self.a_paper, self.a_author, self.a_feature])

    def raw(self) -> np.ndarray:
        return np.concatenate([self.masses[0] * self.a_paper,
                               self.masses[1] * self.a_author,
                               self.masses[2] * self.a_feature])


@dataclass
class ConvergenceLog:
    deltas: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.deltas)


def init_state(n: int, m: int, k: int) -> RankState:
    if n <= 0 or m <= 0 or k <= 0:
        raise ValueError(f"entity counts must be positive, got {(n, m, k)}")
    return RankState(a_paper=np.full(n, 1.0 / n),
                     a_author=np.full(m, 1.0 / m),
                     a_feature=np.full(k, 1.0 / k))


def normalize_innovativeness(e: np.ndarray) -> np.ndarray:
    """Scale the innovativeness vector to sum 1 (zeros stay zeros)."""
    e = np.asarray(e, dtype=np.float64)
    if np.any(e < 0.0):
        raise ValueError("innovativeness scores must be non-negative")
    total = e.sum()
    return e / total if total > 0.0 else e.copy()


def _apply_blocks(blocks: OperatorBlocks, e_norm: np.ndarray, hp: HyperParams,
                  p: np.ndarray, a: np.ndarray, f: np.ndarray):
    """One application of the combined matrix to raw section vectors."""
    c_pp = hp.alpha_p
    c_pa = hp.beta_p * (1.0 - hp.alpha_p)
    c_pt = (1.0 - hp.beta_p) * (1.0 - hp.alpha_p)
    c_aa = hp.alpha_a
    c_ap = hp.beta_a * (1.0 - hp.alpha_a)
    c_at = (1.0 - hp.beta_a) * (1.0 - hp.alpha_a)

    new_p = np.zeros_like(p)
    if c_pp != 0.0:
        new_p += c_pp * blocks.pp.matvec(p)
    if c_pa != 0.0:
        new_p += c_pa * blocks.pa.matvec(a)
    if c_pt != 0.0:
        new_p += c_pt * blocks.pt.matvec(f)

    new_a = np.zeros_like(a)
    if c_aa != 0.0:
        new_a += c_aa * blocks.aa.matvec(a)
    if c_ap != 0.0:
        new_a += c_ap * blocks.ap.matvec(p)
    if c_at != 0.0:
        new_a += c_at * blocks.at.matvec(f)

    new_f = np.zeros_like(f)
    if hp.alpha_f != 0.0:
        new_f += hp.alpha_f * blocks.ta.matvec(a)
    if hp.alpha_f != 1.0:
        new_f += (1.0 - hp.alpha_f) * blocks.tp.matvec(p)
    new_f *= e_norm
    return new_p, new_a, new_f


def iterate_once(state: RankState, blocks: OperatorBlocks, e: np.ndarray,
                 hp: HyperParams) -> RankState:
    """One Jacobi-style update of all three vectors from the old state.

    A section whose raw image is all zero is reset to a uniform vector of
    unit mass before the global renormalization.
    """
    hp = hp.effective()
    e_norm = normalize_innovativeness(e)
    raw = state.raw()
    n, m = state.a_paper.size, state.a_author.size
    p, a, f = raw[:n], raw[n:n + m], raw[n + m:]
    new_p, new_a, new_f = _apply_blocks(blocks, e_norm, hp, p, a, f)

    sections = [new_p, new_a, new_f]
    for i, sec in enumerate(sections):
        if not np.all(np.isfinite(sec)):
            raise NumericalError(
                f"non-finite value at iteration {state.iteration + 1}")
        if sec.sum() == 0.0:
            sections[i] = np.full(sec.size, 1.0 / sec.size)
    total = sections[0].sum() + sections[1].sum() + sections[2].sum()
    sections = [sec / total for sec in sections]
    masses = np.array([sec.sum() for sec in sections])

    out = RankState(
        a_paper=sections[0] / masses[0],
        a_author=sections[1] / masses[1],
        a_feature=sections[2] / masses[2],
        masses=masses,
        iteration=state.iteration + 1,
    )
    out.last_delta = float(np.abs(out.concatenated() - state.concatenated()).sum())
    return out


def run(graphs: GraphSet, e: np.ndarray, hp: HyperParams,
        blocks: OperatorBlocks | None = None) -> tuple[RankState, ConvergenceLog]:
    """Iterate to convergence (L1 delta over the concatenated per-type
    vectors below tolerance) or until max_iterations."""
    if blocks is None:
        blocks = operator_blocks(graphs)
    idx = graphs.index
    state = init_state(idx.n, idx.m, idx.k)
    log = ConvergenceLog()
    for _ in range(hp.max_iterations):
        state = iterate_once(state, blocks, e, hp)
        log.deltas.append(state.last_delta)
        if state.last_delta < hp.tolerance:
            log.converged = True
            break
    return state, log


def assemble_combined(graphs: GraphSet, e: np.ndarray, hp: HyperParams,
                      size_limit: int = 2000) -> np.ndarray:
    """Dense (N+M+K)^2 combined matrix for small-instance oracle checks."""
    idx = graphs.index
    n, m, k = idx.n, idx.m, idx.k
    if n + m + k > size_limit:
        raise ValueError(f"combined size {n + m + k} exceeds oracle limit {size_limit}")
    hp = hp.effective()
    b = operator_blocks(graphs)
    e_norm = normalize_innovativeness(e)

    out = np.zeros((n + m + k, n + m + k))
    out[:n, :n] = hp.alpha_p * b.pp.to_dense()
    out[:n, n:n + m] = hp.beta_p * (1 - hp.alpha_p) * b.pa.to_dense()
    out[:n, n + m:] = (1 - hp.beta_p) * (1 - hp.alpha_p) * b.pt.to_dense()
    out[n:n + m, :n] = hp.beta_a * (1 - hp.alpha_a) * b.ap.to_dense()
    out[n:n + m, n:n + m] = hp.alpha_a * b.aa.to_dense()
    out[n:n + m, n + m:] = (1 - hp.beta_a) * (1 - hp.alpha_a) * b.at.to_dense()
    out[n + m:, :n] = (1 - hp.alpha_f) * e_norm[:, None] * b.tp.to_dense()
    out[n + m:, n:n + m] = hp.alpha_f * e_norm[:, None] * b.ta.to_dense()
    return out


@dataclass(frozen=True)
class RankedEntity:
    rank: int
    entity_id: str
    score: float


def rank_entities(vector: np.ndarray, ids, cohort=None) -> list[RankedEntity]:
    """Descending by score, ties broken by ascending id; an optional cohort
    filter is applied after ranking and ranks renumbered within it."""
    order = sorted(range(len(ids)), key=lambda i: (-vector[i], ids[i]))
    ranked = [(ids[i], float(vector[i])) for i in order]
    if cohort is not None:
        cohort = set(cohort)
        ranked = [(eid, s) for eid, s in ranked if eid in cohort]
    return [RankedEntity(r, eid, s) for r, (eid, s) in enumerate(ranked, start=1)]


def write_ranking(ranked: list[RankedEntity], path, converged: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if not converged:
            fh.write("# WARNING: NOT CONVERGED\n")
        fh.write("rank\tid\tscore\n")
        for r in ranked:
            fh.write(f"{r.rank}\t{r.entity_id}\t{r.score:.10g}\n")


def write_convergence(log: ConvergenceLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# converged\t{log.converged}\n")
        fh.write("iteration\tl1_delta\n")
        for i, d in enumerate(log.deltas, start=1):
            fh.write(f"{i}\t{d:.10g}\n")
