"""Experiment runner and ranking statistics: repeated paired comparisons,
Friedman test, Nemenyi critical difference, and robust descriptives."""

from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.stats import chi2, rankdata

from .attack_engine import AttackConfig, AttackSummary, attack_testset
from .synth_data import GeneratorConfig, generate
from .target_lcd import train_target


class TooFewBlocks(Exception):
    """Ranking needs at least 2 methods and 2 blocks."""


# Critical values q_alpha of the Nemenyi test (studentized range / sqrt(2)),
# Demsar 2006, for k = 2..10 methods.
_NEMENYI_Q = {
    0.05: (1.959964, 2.343701, 2.569032, 2.727774, 2.849705,
           2.948319, 3.030879, 3.101730, 3.163684),
    0.10: (1.644854, 2.052293, 2.291341, 2.459516, 2.588521,
           2.692732, 2.779884, 2.854606, 2.919889),
}


@dataclass(frozen=True)
class ResultTable:
    """Accuracy declines (percentage points, negative = decline): one row per
    dataset config (or budget), one column per method, repetitions deep."""

    row_names: tuple[str, ...]
    method_names: tuple[str, ...]
    values: np.ndarray  # shape (rows, methods, repetitions)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 3 or v.shape[0] != len(self.row_names) or v.shape[1] != len(self.method_names):
            raise ValueError("values must have shape (rows, methods, repetitions)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def repetitions(self) -> int:
        return self.values.shape[2]

    def method_values(self, method: str) -> np.ndarray:
        j = self.method_names.index(method)
        return self.values[:, j, :].ravel()

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("row,method,rep,decline\n")
        for i, row in enumerate(self.row_names):
            for j, method in enumerate(self.method_names):
                for rep in range(self.repetitions):
                    out.write(f"{row},{method},{rep},{float(self.values[i, j, rep])!r}\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        rows: dict[str, dict[str, dict[int, float]]] = {}
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "row,method,rep,decline":
            raise ValueError("bad result-table CSV header")
        for ln in lines[1:]:
            row, method, rep, val = ln.split(",")
            rows.setdefault(row, {}).setdefault(method, {})[int(rep)] = float(val)
        row_names = tuple(rows)
        method_names = tuple(rows[row_names[0]])
        reps = len(rows[row_names[0]][method_names[0]])
        values = np.zeros((len(row_names), len(method_names), reps))
        for i, row in enumerate(row_names):
            for j, method in enumerate(method_names):
                cells = rows[row][method]
                if len(cells) != reps:
                    raise ValueError("ragged result table")
                for rep, val in cells.items():
                    values[i, j, rep] = val
        return cls(row_names, method_names, values)

    def to_json(self) -> dict:
        return {
            "rows": list(self.row_names),
            "methods": list(self.method_names),
            "values": self.values.tolist(),
        }


@dataclass(frozen=True)
class RankReport:
    """Per-method mean rank / median / MAD / CI plus the Friedman and Nemenyi results.

    Larger decline (more negative) is the better attack; rank k is best, so the
    strongest method has the highest mean rank, matching the reporting
    convention of critical-difference diagrams for attack benchmarks.
    """

    method_names: tuple[str, ...]
    mean_ranks: tuple[float, ...]
    medians: tuple[float, ...]
    mads: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]
    friedman_chi2: float
    friedman_p: float
    cd: float
    alpha: float
    n_blocks: int
    significant: tuple[tuple[bool, ...], ...]

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "n_blocks": self.n_blocks,
            "friedman_chi2": self.friedman_chi2,
            "friedman_p": self.friedman_p,
            "critical_difference": self.cd,
            "methods": [
                {
                    "name": m,
                    "mean_rank": self.mean_ranks[i],
                    "median": self.medians[i],
                    "mad": self.mads[i],
                    "ci": [self.ci_low[i], self.ci_high[i]],
                }
                for i, m in enumerate(self.method_names)
            ],
            "significant": [list(row) for row in self.significant],
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("method,mean_rank,median,mad,ci_low,ci_high\n")
        for i, m in enumerate(self.method_names):
            out.write(f"{m},{self.mean_ranks[i]!r},{self.medians[i]!r},"
                      f"{self.mads[i]!r},{self.ci_low[i]!r},{self.ci_high[i]!r}\n")
        return out.getvalue()


def nemenyi_critical_difference(k: int, n_blocks: int, alpha: float = 0.05) -> float:
    """CD = q_alpha * sqrt(k (k+1) / (6 N))."""
    if alpha not in _NEMENYI_Q:
        raise ValueError(f"no embedded q table for alpha={alpha}")
    if not (2 <= k <= 10):
        raise ValueError("embedded q constants cover 2 <= k <= 10 methods")
    q = _NEMENYI_Q[alpha][k - 2]
    return q * np.sqrt(k * (k + 1) / (6.0 * n_blocks))


def rank_descriptives(table: ResultTable) -> dict[str, dict[str, float]]:
    """Per-method median, MAD, and the notched-median interval
    MED +/- 1.58 * IQR / sqrt(m)."""
    out = {}
    for method in table.method_names:
        vals = table.method_values(method)
        med = float(np.median(vals))
        mad = float(np.median(np.abs(vals - med)))
        iqr = float(np.percentile(vals, 75) - np.percentile(vals, 25))
        half = 1.58 * iqr / np.sqrt(len(vals))
        out[method] = {"median": med, "mad": mad,
                       "ci_low": med - half, "ci_high": med + half}
    return out


def friedman_nemenyi(table: ResultTable, alpha: float = 0.05) -> RankReport:
    """Friedman test over blocks = rows x repetitions, then the Nemenyi
    critical difference on mean ranks.

    Within each block, methods are ranked so the largest decline (most
    negative value, the strongest attack) takes rank k; ties share averaged
    ranks. chi2_F = 12N / (k (k+1)) * [sum_j R_j^2 - k (k+1)^2 / 4].
    """
    k = len(table.method_names)
    blocks = table.values.transpose(0, 2, 1).reshape(-1, k)
    n = blocks.shape[0]
    if k < 2 or n < 2:
        raise TooFewBlocks(f"need >= 2 methods and >= 2 blocks, got k={k}, N={n}")
    ranks = np.empty_like(blocks)
    for b in range(n):
        ranks[b] = k + 1 - rankdata(blocks[b])
    mean_ranks = ranks.mean(axis=0)
    chi2_stat = 12.0 * n / (k * (k + 1)) * (np.sum(mean_ranks**2) - k * (k + 1) ** 2 / 4.0)
    p_value = float(chi2.sf(chi2_stat, df=k - 1))
    cd = float(nemenyi_critical_difference(k, n, alpha))
    desc = rank_descriptives(table)
    significant = tuple(
        tuple(bool(abs(mean_ranks[i] - mean_ranks[j]) > cd) for j in range(k))
        for i in range(k)
    )
    return RankReport(
        method_names=table.method_names,
        mean_ranks=tuple(float(r) for r in mean_ranks),
        medians=tuple(desc[m]["median"] for m in table.method_names),
        mads=tuple(desc[m]["mad"] for m in table.method_names),
        ci_low=tuple(desc[m]["ci_low"] for m in table.method_names),
        ci_high=tuple(desc[m]["ci_high"] for m in table.method_names),
        friedman_chi2=float(chi2_stat),
        friedman_p=p_value,
        cd=cd,
        alpha=alpha,
        n_blocks=n,
        significant=significant,
    )


def cd_diagram_text(report: RankReport) -> str:
    """Plain-text critical-difference diagram: methods on the mean-rank axis and
    the cliques whose mean-rank spread stays within CD."""
    order = sorted(range(len(report.method_names)),
                   key=lambda i: -report.mean_ranks[i])
    lines = [
        f"critical difference diagram (alpha={report.alpha}, "
        f"k={len(report.method_names)}, N={report.n_blocks})",
        f"CD = {report.cd:.4f} (higher mean rank = stronger attack)",
        "",
    ]
    for i in order:
        lines.append(f"  MR={report.mean_ranks[i]:.4f}  {report.method_names[i]}")
    cliques = []
    mrs = [report.mean_ranks[i] for i in order]
    for start in range(len(order)):
        end = start
        while end + 1 < len(order) and mrs[start] - mrs[end + 1] <= report.cd:
            end += 1
        if end > start:
            cliques.append((start, end))
    maximal = [c for c in cliques
               if not any(o != c and o[0] <= c[0] and c[1] <= o[1] for o in cliques)]
    lines.append("")
    if maximal:
        for start, end in maximal:
            names = ", ".join(report.method_names[order[i]] for i in range(start, end + 1))
            lines.append(f"  no significant difference within: {{{names}}}")
    else:
        lines.append("  all pairwise differences exceed CD")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MethodSpec:
    """One benchmark column: a named (strategy, surrogate, r-override) combination."""

    name: str
    strategy: str = "eigencentrality"
    surrogate: str = "svm_rbf"
    r: float | None = None


@lru_cache(maxsize=4)
def _prepared_target(gen_cfg: GeneratorConfig, rep_seed: int, wl_iters: int, c: float):
    """Dataset and trained target for one (config, repetition); cached so the
    methods sharing a block reuse the same victim."""
    ds = generate(replace(gen_cfg, seed=rep_seed))
    target = train_target(ds, wl_iters=wl_iters, C=c, seed=rep_seed)
    return ds.subset("test"), target


def _run_cell(args) -> tuple[int, int, int, float, AttackSummary]:
    (row_idx, method_idx, rep, gen_cfg, method, base, seed, target_wl_iters,
     target_c, row_r) = args
    rep_seed = seed + rep
    test_ds, target = _prepared_target(gen_cfg, rep_seed, target_wl_iters, target_c)
    r = method.r if method.r is not None else base.r
    if row_r is not None:
        r = row_r
    cfg = replace(base, strategy=method.strategy, surrogate=method.surrogate,
                  r=r, seed=rep_seed)
    summary = attack_testset(target, test_ds, cfg)
    return row_idx, method_idx, rep, summary.decline_pp, summary


@dataclass
class BenchResult:
    table: ResultTable
    summaries: dict[tuple[str, str, int], AttackSummary]


def run_benchmark(
    methods: list[MethodSpec],
    configs: dict[str, GeneratorConfig],
    base: AttackConfig,
    repetitions: int = 10,
    budgets: list[float] | None = None,
    seed: int = 42,
    target_wl_iters: int = 3,
    target_c: float = 10.0,
    workers: int = 1,
) -> BenchResult:
    """Paired benchmark: per (row, repetition), every method attacks the same
    freshly trained target with the same test split (identical rep seed).

    Rows are dataset configs; with budgets given, each config expands to one
    row per budget value r (the Table-5-style sweep). Cells are independent
    given their seeds, so the worker count cannot change any value.
    """
    if not methods or not configs or repetitions < 1:
        raise ValueError("need methods, configs, and repetitions >= 1")
    rows: list[tuple[str, str, float | None]] = []
    for cname in configs:
        if budgets:
            for r in budgets:
                rows.append((f"{cname}:r={r:g}", cname, r))
        else:
            rows.append((cname, cname, None))
    tasks = []
    for row_idx, (_, cname, row_r) in enumerate(rows):
        for rep in range(repetitions):
            for method_idx, method in enumerate(methods):
                tasks.append((row_idx, method_idx, rep, configs[cname], method,
                              base, seed, target_wl_iters, target_c, row_r))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, tasks, chunksize=max(1, len(methods))))
    else:
        cells = [_run_cell(t) for t in tasks]
    values = np.zeros((len(rows), len(methods), repetitions))
    summaries: dict[tuple[str, str, int], AttackSummary] = {}
    for row_idx, method_idx, rep, decline, summary in cells:
        values[row_idx, method_idx, rep] = decline
        summaries[(rows[row_idx][0], methods[method_idx].name, rep)] = summary
    table = ResultTable(
        row_names=tuple(r[0] for r in rows),
        method_names=tuple(m.name for m in methods),
        values=values,
    )
    return BenchResult(table=table, summaries=summaries)
