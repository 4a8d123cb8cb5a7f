"""Link sign prediction under attack: train/test splits, a balance-theory
vote predictor, exact F1 metrics, and the poisoning evaluation pipeline."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence

from .attack import (
    MODE_BALANCE_SEQUENTIAL,
    MODES,
    AttackConfig,
    apply_flips,
    run_attack,
)
from .balance import balance_degree, two_path_sum
from .graph import SignedGraph

PIPELINE_CSV_SCHEMA = "attack-eval/1"
PIPELINE_CSV_COLUMNS = (
    "dataset,mode,budget_frac,d3,micro_f1,binary_f1,macro_f1,split_seed,attack_seed"
)


def _as_fraction(x: Fraction | float | str) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class EdgeSplit:
    """Disjoint train/test partition of a graph's signed edges."""

    node_count: int
    train_edges: tuple[tuple[int, int, int], ...]
    test_edges: tuple[tuple[int, int, int], ...]
    split_seed: int
    train_fraction: Fraction

    def train_graph(self) -> SignedGraph:
        """Training edges over the full node set (test pairs are absent)."""
        return SignedGraph(self.node_count, self.train_edges)


def split_edges(
    g: SignedGraph, fraction: Fraction | float = Fraction(4, 5), seed: int = 0
) -> EdgeSplit:
    """Randomly partition edges into round(fraction*m) train and the rest
    test. Deterministic per seed. Raises ValueError when either side would
    be empty.
    """
    fraction = _as_fraction(fraction)
    if not 0 < fraction < 1:
        raise ValueError(f"train fraction must be in (0, 1), got {fraction}")
    edges = list(g.edges())
    n_train = round(fraction * len(edges))
    if n_train == 0 or n_train == len(edges):
        raise ValueError(
            f"cannot split {len(edges)} edges at fraction {fraction}: "
            "one side would be empty"
        )
    rng = random.Random(seed)
    rng.shuffle(edges)
    return EdgeSplit(
        node_count=g.node_count,
        train_edges=tuple(edges[:n_train]),
        test_edges=tuple(edges[n_train:]),
        split_seed=seed,
        train_fraction=fraction,
    )


def triad_vote_predict(train: SignedGraph, u: int, v: int) -> int:
    """Predict the sign of pair (u, v) from the training graph.

    Each common neighbor w votes with A_uw * A_wv; positive total predicts
    +1, negative -1. A zero total (including no common neighbors at all)
    falls back to the majority training sign, +1 on an exact tie.
    """
    score = two_path_sum(train, u, v)
    if score > 0:
        return 1
    if score < 0:
        return -1
    return 1 if train.pos_edge_count >= train.neg_edge_count else -1


@dataclass(frozen=True)
class EvalReport:
    """Binary confusion counts and the three F1 flavors, all exact.

    The positive class is sign +1. micro_f1 coincides with accuracy for
    single-label binary classification; binary_f1 is the positive-class
    F1; macro_f1 averages the per-class F1s, scoring a degenerate class
    (no true and no predicted members) as 0.
    """

    tp: int
    fp: int
    tn: int
    fn: int
    micro_f1: Fraction
    binary_f1: Fraction
    macro_f1: Fraction

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _f1(tp: int, fp: int, fn: int) -> Fraction:
    denom = 2 * tp + fp + fn
    return Fraction(2 * tp, denom) if denom else Fraction(0)


def evaluate(predictions: Sequence[int], labels: Sequence[int]) -> EvalReport:
    """Score sign predictions against ground-truth signs."""
    if len(predictions) != len(labels):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions, {len(labels)} labels"
        )
    if not labels:
        raise ValueError("nothing to evaluate")
    tp = fp = tn = fn = 0
    for pred, label in zip(predictions, labels):
        if pred not in (1, -1) or label not in (1, -1):
            raise ValueError(f"signs must be +1 or -1, got ({pred}, {label})")
        if label > 0:
            if pred > 0:
                tp += 1
            else:
                fn += 1
        else:
            if pred > 0:
                fp += 1
            else:
                tn += 1
    pos_f1 = _f1(tp, fp, fn)
    neg_f1 = _f1(tn, fn, fp)
    return EvalReport(
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        micro_f1=Fraction(tp + tn, len(labels)),
        binary_f1=pos_f1,
        macro_f1=(pos_f1 + neg_f1) / 2,
    )


def evaluate_on_split(train: SignedGraph, test_edges: Iterable[tuple[int, int, int]]) -> EvalReport:
    """Predict every held-out edge with the triad vote and score it."""
    preds: list[int] = []
    labels: list[int] = []
    for u, v, s in test_edges:
        preds.append(triad_vote_predict(train, u, v))
        labels.append(s)
    return evaluate(preds, labels)


@dataclass(frozen=True)
class PipelineRow:
    """One (budget, mode) cell of the attack-evaluation sweep."""

    dataset: str
    mode: str
    budget_frac: Fraction
    d3: Fraction | None
    report: EvalReport
    split_seed: int
    attack_seed: int


def attack_eval_pipeline(
    g: SignedGraph,
    budgets: Sequence[Fraction | float | str],
    modes: Sequence[str],
    *,
    split_seed: int = 0,
    train_fraction: Fraction | float = Fraction(4, 5),
    attack_seed: int = 0,
    batch_size: int = 10,
    dataset: str = "graph",
) -> list[PipelineRow]:
    """Poison the training edges at each (budget, mode), then measure link
    sign prediction on the untouched test edges.

    Budget 0 rows are clean baselines. The test split and its labels are
    fixed once up front and never attacked. Sequential balance rows for a
    whole budget list are served from one greedy run via trace prefixes
    (greedy selection does not depend on the budget); other modes run
    per-budget.
    """
    budgets = [_as_fraction(b) for b in budgets]
    for b in budgets:
        if not 0 <= b <= 1:
            raise ValueError(f"budget fraction must be in [0, 1], got {b}")
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    split = split_edges(g, train_fraction, split_seed)
    clean_train = split.train_graph()
    clean_report = evaluate_on_split(clean_train, split.test_edges)
    clean_d3 = balance_degree(clean_train).d3

    rows: list[PipelineRow] = []
    for mode in modes:
        nonzero = [b for b in budgets if b > 0]
        prefix_trace = None
        if mode == MODE_BALANCE_SEQUENTIAL and nonzero:
            cfg = AttackConfig(budget_fraction=max(nonzero), mode=mode, seed=attack_seed)
            _, prefix_trace = run_attack(clean_train, cfg)
        for budget in budgets:
            if budget == 0:
                rows.append(
                    PipelineRow(
                        dataset, mode, budget, clean_d3, clean_report, split_seed, attack_seed
                    )
                )
                continue
            if prefix_trace is not None:
                k = AttackConfig(budget_fraction=budget, mode=mode).budget_edges(
                    clean_train.edge_count
                )
                flips = prefix_trace.flipped_edges()[:k]
                poisoned = apply_flips(clean_train, flips)
            else:
                cfg = AttackConfig(
                    budget_fraction=budget,
                    mode=mode,
                    batch_size=batch_size,
                    seed=attack_seed,
                )
                poisoned, _ = run_attack(clean_train, cfg)
            rows.append(
                PipelineRow(
                    dataset=dataset,
                    mode=mode,
                    budget_frac=budget,
                    d3=balance_degree(poisoned).d3,
                    report=evaluate_on_split(poisoned, split.test_edges),
                    split_seed=split_seed,
                    attack_seed=attack_seed,
                )
            )
    return rows


def write_pipeline_csv(rows: Iterable[PipelineRow], stream: IO[str]) -> None:
    """Serialize pipeline rows to the plot-ready CSV layout."""
    stream.write(f"# schema={PIPELINE_CSV_SCHEMA}\n")
    stream.write(PIPELINE_CSV_COLUMNS + "\n")
    for r in rows:
        d3 = "" if r.d3 is None else repr(float(r.d3))
        stream.write(
            ",".join(
                (
                    r.dataset,
                    r.mode,
                    repr(float(r.budget_frac)),
                    d3,
                    repr(float(r.report.micro_f1)),
                    repr(float(r.report.binary_f1)),
                    repr(float(r.report.macro_f1)),
                    str(r.split_seed),
                    str(r.attack_seed),
                )
            )
            + "\n"
        )
