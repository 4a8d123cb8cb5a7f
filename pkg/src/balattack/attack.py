"""Greedy sign-flip attacks on the balance degree, plus the random baseline.

All attacks operate on a private copy of the input graph, flip signs only
(the edge support and degrees never change), and emit a per-flip trace.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import IO, Iterable

from .balance import TwoPathTable, count_signed_triangles
from .graph import SignedGraph

MODE_BALANCE_SEQUENTIAL = "balance_sequential"
MODE_BALANCE_BATCHED = "balance_batched"
MODE_RANDOM = "random"
MODES = (MODE_BALANCE_SEQUENTIAL, MODE_BALANCE_BATCHED, MODE_RANDOM)

STATUS_BUDGET_EXHAUSTED = "budget_exhausted"
STATUS_NO_CANDIDATES = "no_candidates"
STATUS_ALREADY_MINIMAL = "already_minimal"

TRACE_CSV_SCHEMA = "attack-trace/1"
TRACE_CSV_COLUMNS = "step,u,v,old_sign,p_uv,delta_trace,d3"


def _as_fraction(x: Fraction | float | int | str) -> Fraction:
    # Floats go through their decimal repr so 0.05 means 1/20, not the
    # nearest binary double.
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class AttackConfig:
    """Attack parameters.

    budget_fraction is the attacked share of undirected edges; the edge
    budget is round(fraction * m), clamped to [1, m]. `seed` drives the
    random mode and, when `shuffle_ties` is set, randomized tie-breaking
    among equally ranked candidates (off by default: ties break to the
    lexicographically smallest pair). `trace_every` controls how often the
    running balance degree is stored on trace records; the final record
    always carries it.
    """

    budget_fraction: Fraction | float | str
    mode: str = MODE_BALANCE_SEQUENTIAL
    batch_size: int = 10
    seed: int = 0
    trace_every: int = 1
    shuffle_ties: bool = False

    def __post_init__(self):
        frac = _as_fraction(self.budget_fraction)
        if not 0 < frac <= 1:
            raise ValueError(f"budget_fraction must be in (0, 1], got {frac}")
        object.__setattr__(self, "budget_fraction", frac)
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")

    def budget_edges(self, edge_count: int) -> int:
        """Edge budget for a graph with `edge_count` edges."""
        if edge_count < 1:
            raise ValueError("graph has no edges to attack")
        return min(edge_count, max(1, round(self.budget_fraction * edge_count)))


@dataclass(frozen=True)
class FlipRecord:
    """One executed flip.

    `p_uv` is the two-path sum the flip was selected on (in batched mode
    that is the epoch-frozen value). `delta_trace` is the realized change
    of tr(A^3), always exact. `d3` is the balance degree after the flip,
    or None when skipped by trace_every or undefined (triangle-free).
    """

    step: int
    u: int
    v: int
    old_sign: int
    p_uv: int
    delta_trace: int
    d3: Fraction | None


@dataclass
class AttackTrace:
    mode: str
    budget: int
    status: str
    initial_d3: Fraction | None
    final_d3: Fraction | None
    records: list[FlipRecord] = field(default_factory=list)

    def flipped_edges(self) -> list[tuple[int, int]]:
        return [(r.u, r.v) for r in self.records]

    def write_csv(self, stream: IO[str]) -> None:
        stream.write(f"# schema={TRACE_CSV_SCHEMA}\n")
        stream.write(TRACE_CSV_COLUMNS + "\n")
        for r in self.records:
            d3 = "" if r.d3 is None else repr(float(r.d3))
            stream.write(
                f"{r.step},{r.u},{r.v},{r.old_sign},{r.p_uv},{r.delta_trace},{d3}\n"
            )


def select_candidates(g: SignedGraph, table: TwoPathTable) -> set[tuple[int, int]]:
    """Edges whose flip strictly lowers tr(A^3): those with a_uv * p_uv > 0.

    Zero two-path sums are excluded — flipping them changes nothing.
    """
    out: set[tuple[int, int]] = set()
    adj = g._adj
    for (u, v), p in table.items():
        if p != 0 and adj[u][v] * p > 0:
            out.add((u, v))
    return out


class _TraceState:
    """Running trace bookkeeping shared by all attack modes.

    Keeps tr(A^3) incrementally (tr(|A|^3) is flip-invariant) so the
    per-step balance degree is exact and O(1).
    """

    def __init__(self, g: SignedGraph, cfg: AttackConfig):
        b, u = count_signed_triangles(g)
        self.trace_abs = 6 * (b + u)
        self.trace_a3 = 6 * (b - u)
        self.trace_every = cfg.trace_every
        self.records: list[FlipRecord] = []
        self.initial_d3 = self.d3()

    def d3(self) -> Fraction | None:
        if self.trace_abs == 0:
            return None
        return Fraction(self.trace_a3 + self.trace_abs, 2 * self.trace_abs)

    def record(self, u: int, v: int, old_sign: int, p_sel: int, delta: int) -> None:
        self.trace_a3 += delta
        step = len(self.records) + 1
        d3 = self.d3() if step % self.trace_every == 0 else None
        self.records.append(FlipRecord(step, u, v, old_sign, p_sel, delta, d3))

    def finish(self, mode: str, budget: int, status: str) -> AttackTrace:
        final = self.d3()
        if self.records and self.records[-1].d3 is None and self.trace_abs != 0:
            self.records[-1] = replace(self.records[-1], d3=final)
        return AttackTrace(
            mode=mode,
            budget=budget,
            status=status,
            initial_d3=self.initial_d3,
            final_d3=final,
            records=self.records,
        )


def _best_candidate(
    g: SignedGraph, table: TwoPathTable, rng: random.Random | None
) -> tuple[int, int, int] | None:
    """Candidate with the largest |p_uv|, or None if there are none.

    Ties go to the smallest (u, v) pair, or to a seeded random pick when
    a shuffling rng is supplied. Returns (u, v, p_uv).
    """
    adj = g._adj
    best_score = 0
    best: tuple[int, int] | None = None
    ties: list[tuple[int, int]] = []
    for (u, v), p in table.items():
        score = adj[u][v] * p
        if score > best_score:
            best_score = score
            best = (u, v)
            if rng is not None:
                ties = [best]
        elif score == best_score and score > 0:
            if rng is not None:
                ties.append((u, v))
            elif (u, v) < best:  # type: ignore[operator]
                best = (u, v)
    if best is None:
        return None
    if rng is not None and len(ties) > 1:
        best = rng.choice(sorted(ties))
    return best[0], best[1], best_score * adj[best[0]][best[1]]


def _epoch_ranking(
    g: SignedGraph, table: TwoPathTable, rng: random.Random | None
) -> list[tuple[int, int, int]]:
    """Candidates sorted best-first by |p_uv| as of the current table."""
    adj = g._adj
    cands = [
        (u, v, p) for (u, v), p in table.items() if p != 0 and adj[u][v] * p > 0
    ]
    cands.sort(key=lambda t: (-abs(t[2]), t[0], t[1]))
    if rng is not None:
        # Shuffle inside equal-|p| groups only; ordering between groups
        # is already settled.
        cands.sort(key=lambda t: (-abs(t[2]), rng.random()))
    return cands


def run_balance_attack(
    g: SignedGraph, cfg: AttackConfig
) -> tuple[SignedGraph, AttackTrace]:
    """Greedily flip signs to minimize the balance degree.

    Sequential mode re-selects after every flip (exact greedy). Batched
    mode freezes the candidate ranking per epoch and flips the top
    batch_size edges before re-ranking; the two coincide at batch_size=1.
    The input graph is not modified; at most `budget` signs differ in the
    returned copy. Raises ValueError for an edgeless graph or a random
    config.
    """
    if cfg.mode == MODE_RANDOM:
        raise ValueError("use run_random_attack for random mode")
    if g.edge_count == 0:
        raise ValueError("graph has no edges to attack")
    budget = cfg.budget_edges(g.edge_count)
    poisoned = g.copy()
    table = TwoPathTable.from_graph(poisoned)
    state = _TraceState(poisoned, cfg)
    rng = random.Random(cfg.seed) if cfg.shuffle_ties else None

    if state.trace_abs > 0 and state.trace_a3 == -state.trace_abs:
        # Every triangle is already unbalanced; no flip can help (any
        # candidate would need a balanced triangle behind it).
        return poisoned, state.finish(cfg.mode, budget, STATUS_ALREADY_MINIMAL)

    status = STATUS_BUDGET_EXHAUSTED
    if cfg.mode == MODE_BALANCE_SEQUENTIAL:
        while len(state.records) < budget:
            pick = _best_candidate(poisoned, table, rng)
            if pick is None:
                status = STATUS_NO_CANDIDATES
                break
            u, v, p = pick
            a = table.apply_flip(u, v)
            state.record(u, v, a, p, -12 * a * p)
    else:
        while len(state.records) < budget:
            ranking = _epoch_ranking(poisoned, table, rng)
            if not ranking:
                status = STATUS_NO_CANDIDATES
                break
            for u, v, p_sel in ranking[: budget - len(state.records)][: cfg.batch_size]:
                # Selection used the frozen epoch ranking; the realized
                # delta comes from the live table so the trace stays exact.
                p_now = table.get(u, v)
                a = table.apply_flip(u, v)
                state.record(u, v, a, p_sel, -12 * a * p_now)
    return poisoned, state.finish(cfg.mode, budget, status)


def run_random_attack(
    g: SignedGraph, cfg: AttackConfig
) -> tuple[SignedGraph, AttackTrace]:
    """Flip a uniformly random budget-sized edge subset (the baseline).

    Deterministic for a given seed. The trace records the true two-path
    sums and trace deltas at each flip, same as the greedy modes.
    """
    if cfg.mode != MODE_RANDOM:
        raise ValueError(f"config mode is {cfg.mode!r}, expected {MODE_RANDOM!r}")
    if g.edge_count == 0:
        raise ValueError("graph has no edges to attack")
    budget = cfg.budget_edges(g.edge_count)
    rng = random.Random(cfg.seed)
    chosen = rng.sample([(u, v) for u, v, _ in g.edges()], budget)
    poisoned = g.copy()
    table = TwoPathTable.from_graph(poisoned)
    state = _TraceState(poisoned, cfg)
    for u, v in chosen:
        p = table.get(u, v)
        a = table.apply_flip(u, v)
        state.record(u, v, a, p, -12 * a * p)
    return poisoned, state.finish(cfg.mode, budget, STATUS_BUDGET_EXHAUSTED)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class PerturbationReport:
    """Outcome of checking an attacked graph against the threat model."""

    ok: bool
    budget: int
    sign_differences: int
    changed_edges: tuple[tuple[int, int], ...]
    checks: tuple[CheckResult, ...]

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        return "\n".join(lines)


def verify_perturbation(
    original: SignedGraph, attacked: SignedGraph, budget: int
) -> PerturbationReport:
    """Check that `attacked` is a permissible sign-only perturbation of
    `original`: same edge support, at most `budget` sign differences,
    identical degree sequence. Raises ValueError on mismatched node sets;
    everything else is reported, not raised.
    """
    if original.node_count != attacked.node_count:
        raise ValueError(
            f"node sets differ: {original.node_count} vs {attacked.node_count} nodes"
        )
    support_orig = {(u, v) for u, v, _ in original.edges()}
    support_att = {(u, v) for u, v, _ in attacked.edges()}
    support_ok = support_orig == support_att
    if support_ok:
        support_detail = f"{len(support_orig)} edges on both sides"
    else:
        missing = len(support_orig - support_att)
        extra = len(support_att - support_orig)
        support_detail = f"{missing} edges missing, {extra} edges added"

    changed = tuple(
        (u, v)
        for u, v, s in original.edges()
        if attacked.has_edge(u, v) and attacked.sign(u, v) != s
    )
    budget_ok = support_ok and len(changed) <= budget
    degree_ok = original.degree_sequence() == attacked.degree_sequence()

    checks = (
        CheckResult("edge_support", support_ok, support_detail),
        CheckResult(
            "sign_budget",
            budget_ok,
            f"{len(changed)} sign differences, budget {budget}",
        ),
        CheckResult(
            "degree_sequence",
            degree_ok,
            "identical" if degree_ok else "degree sequences differ",
        ),
    )
    return PerturbationReport(
        ok=all(c.passed for c in checks),
        budget=budget,
        sign_differences=len(changed),
        changed_edges=changed,
        checks=checks,
    )


def run_attack(g: SignedGraph, cfg: AttackConfig) -> tuple[SignedGraph, AttackTrace]:
    """Dispatch on cfg.mode."""
    if cfg.mode == MODE_RANDOM:
        return run_random_attack(g, cfg)
    return run_balance_attack(g, cfg)


def apply_flips(g: SignedGraph, edges: Iterable[tuple[int, int]]) -> SignedGraph:
    """Copy g and flip the listed edges; used to replay trace prefixes."""
    out = g.copy()
    for u, v in edges:
        out.flip_edge(u, v)
    return out
