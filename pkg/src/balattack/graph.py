"""Signed-graph container, dataset ingestion, and canonical serialization."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

_SIGN_TOKENS = {"+1": 1, "1": 1, "+": 1, "-1": -1, "-": -1}
_NODES_HEADER = re.compile(r"#\s*nodes\s*=\s*(\d+)\s*$")


class ParseError(ValueError):
    """Malformed input data. `line` is the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SignedGraph:
    """Undirected simple graph whose edges carry a sign, +1 or -1.

    Nodes are contiguous internal ids 0..n-1; `node_labels` optionally maps
    them back to the external ids of the source data. An absent edge means
    "no relation": sign 0 is never stored. The edge support is frozen at
    construction; the only permitted mutation is negating the sign of an
    existing edge, so the degree sequence is invariant for the lifetime of
    the object. Concurrent reads are safe, `flip_edge` needs exclusive
    access.

    Equality compares node count and signed adjacency. Labels are metadata
    and do not participate.
    """

    __slots__ = ("_adj", "_m", "_pos", "node_labels")

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple[int, int, int]] = (),
        node_labels: list[str] | None = None,
    ):
        if node_count < 0:
            raise ValueError("node_count must be >= 0")
        if node_labels is not None and len(node_labels) != node_count:
            raise ValueError("node_labels length must equal node_count")
        self._adj: list[dict[int, int]] = [{} for _ in range(node_count)]
        self._m = 0
        self._pos = 0
        self.node_labels = node_labels
        for u, v, s in edges:
            self._add_edge(u, v, s)

    def _add_edge(self, u: int, v: int, s: int) -> None:
        n = len(self._adj)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"node id out of range: ({u}, {v})")
        if u == v:
            raise ValueError(f"self-loop not allowed: {u}")
        if s != 1 and s != -1:
            raise ValueError(f"edge sign must be +1 or -1, got {s}")
        prev = self._adj[u].get(v)
        if prev is not None:
            if prev != s:
                raise ValueError(f"conflicting signs for edge ({u}, {v})")
            return
        self._adj[u][v] = s
        self._adj[v][u] = s
        self._m += 1
        if s > 0:
            self._pos += 1

    @property
    def node_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def pos_edge_count(self) -> int:
        return self._pos

    @property
    def neg_edge_count(self) -> int:
        return self._m - self._pos

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < len(self._adj) and v in self._adj[u]

    def sign(self, u: int, v: int) -> int:
        """Sign of edge {u,v}; raises ValueError if the pair is not an edge."""
        if not (0 <= u < len(self._adj)) or v not in self._adj[u]:
            raise ValueError(f"not an edge: ({u}, {v})")
        return self._adj[u][v]

    def adjacency(self, u: int) -> dict[int, int]:
        """Neighbor -> sign mapping for u. Treat as read-only."""
        if not (0 <= u < len(self._adj)):
            raise ValueError(f"node id out of range: {u}")
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency(u))

    def degree_sequence(self) -> list[int]:
        """Unsigned degrees, ascending. Invariant under any sign flips."""
        return sorted(len(d) for d in self._adj)

    def flip_edge(self, u: int, v: int) -> None:
        """Negate the sign of existing edge {u,v}; an involution."""
        if not (0 <= u < len(self._adj)) or v not in self._adj[u]:
            raise ValueError(f"not an edge: ({u}, {v})")
        s = -self._adj[u][v]
        self._adj[u][v] = s
        self._adj[v][u] = s
        self._pos += 1 if s > 0 else -1

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield (u, v, sign) with u < v in sorted pair order."""
        for u, nbrs in enumerate(self._adj):
            for v in sorted(nbrs):
                if v > u:
                    yield u, v, nbrs[v]

    def label(self, u: int) -> str:
        if self.node_labels is not None:
            return self.node_labels[u]
        return str(u)

    def copy(self) -> "SignedGraph":
        g = SignedGraph.__new__(SignedGraph)
        g._adj = [dict(d) for d in self._adj]
        g._m = self._m
        g._pos = self._pos
        g.node_labels = list(self.node_labels) if self.node_labels is not None else None
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return (
            f"<SignedGraph n={self.node_count} m={self._m} "
            f"+{self._pos}/-{self._m - self._pos}>"
        )


@dataclass(frozen=True)
class LoadOptions:
    """Rating-CSV ingestion knobs.

    conflict_policy: how multiple rows for one unordered pair combine.
    Only "sum" is supported: ratings are summed and the edge takes the
    sign of the total; a total of exactly 0 drops the pair.
    """

    conflict_policy: str = "sum"

    def __post_init__(self):
        if self.conflict_policy != "sum":
            raise ValueError(f"unknown conflict policy: {self.conflict_policy!r}")


@dataclass
class LoadStats:
    """Bookkeeping from a rating-CSV load."""

    rows: int = 0
    header_skipped: bool = False
    zero_rating_rows: int = 0
    self_loop_rows: int = 0
    merged_rows: int = 0
    zero_sum_pairs: int = 0
    nodes: int = 0
    edges: int = 0
    pos_edges: int = 0
    neg_edges: int = 0


def _parse_number(text: str) -> int | float:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return float(text)  # raises ValueError on garbage


def load_rating_csv(
    stream: Iterable[str], options: LoadOptions | None = None
) -> tuple[SignedGraph, LoadStats]:
    """Load a directed rating CSV (`source,target,rating[,time]`) as an
    undirected signed graph.

    A first row whose rating field is missing or non-numeric is treated as a
    header. Self-loop rows and zero-rated rows are dropped (and counted).
    All surviving rows for one unordered pair are merged per
    `options.conflict_policy`; external ids are compacted to 0..n-1 in first
    appearance order and kept in `node_labels`. Nodes seen only in dropped
    rows are omitted.

    Returns the graph and the load statistics. Raises ParseError with a line
    number for malformed rows, or on input with no data rows at all.
    """
    options = options or LoadOptions()
    sums: dict[tuple[str, str], int | float] = {}
    stats = LoadStats()
    reader = csv.reader(stream)
    for lineno, row in enumerate(reader, 1):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) < 3:
            if lineno == 1:
                stats.header_skipped = True
                continue
            raise ParseError(f"expected source,target,rating[,time], got {len(row)} fields", lineno)
        try:
            rating = _parse_number(row[2])
        except ValueError:
            if lineno == 1:
                stats.header_skipped = True
                continue
            raise ParseError(f"non-numeric rating {row[2]!r}", lineno) from None
        stats.rows += 1
        src = row[0].strip()
        dst = row[1].strip()
        if src == dst:
            stats.self_loop_rows += 1
            continue
        if rating == 0:
            stats.zero_rating_rows += 1
            continue
        key = (src, dst) if src <= dst else (dst, src)
        if key in sums:
            stats.merged_rows += 1
            sums[key] += rating
        else:
            sums[key] = rating
    if stats.rows == 0:
        raise ParseError("empty input: no data rows")

    ids: dict[str, int] = {}
    labels: list[str] = []
    edges: list[tuple[int, int, int]] = []
    for (a, b), total in sums.items():
        if total == 0:
            stats.zero_sum_pairs += 1
            continue
        for x in (a, b):
            if x not in ids:
                ids[x] = len(labels)
                labels.append(x)
        edges.append((ids[a], ids[b], 1 if total > 0 else -1))
    g = SignedGraph(len(labels), edges, labels)
    stats.nodes = g.node_count
    stats.edges = g.edge_count
    stats.pos_edges = g.pos_edge_count
    stats.neg_edges = g.neg_edge_count
    return g, stats


def load_edge_list(stream: Iterable[str]) -> SignedGraph:
    """Load the canonical edge-list format: `u v s` lines, s in {+1,-1}
    (also accepted: bare `+`/`-`), plus an optional `# nodes=<n>` header.

    Duplicate pairs with the same sign are tolerated; a conflicting
    duplicate, a self-loop, or an invalid sign is a ParseError.
    """
    declared_n: int | None = None
    edges: dict[tuple[int, int], int] = {}
    max_id = -1
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NODES_HEADER.match(line)
            if m:
                declared_n = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'u v s', got {len(parts)} fields", lineno)
        try:
            u = int(parts[0])
            v = int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("node ids must be non-negative", lineno)
        if u == v:
            raise ParseError(f"self-loop on node {u}", lineno)
        s = _SIGN_TOKENS.get(parts[2])
        if s is None:
            raise ParseError(f"sign must be +1 or -1, got {parts[2]!r}", lineno)
        key = (u, v) if u < v else (v, u)
        prev = edges.get(key)
        if prev is not None and prev != s:
            raise ParseError(f"conflicting duplicate for edge {key}", lineno)
        edges[key] = s
        if v > max_id or u > max_id:
            max_id = max(u, v)
    n = max_id + 1
    if declared_n is not None:
        if declared_n < n:
            raise ParseError(f"header declares {declared_n} nodes but ids reach {max_id}")
        n = declared_n
    return SignedGraph(n, [(u, v, s) for (u, v), s in edges.items()])


def write_edge_list(g: SignedGraph, stream: IO[str]) -> None:
    """Write the canonical edge list: node-count header, then `u v s` with
    u < v in sorted order. Round-trips bit-exactly through load_edge_list."""
    stream.write(f"# nodes={g.node_count}\n")
    for u, v, s in g.edges():
        stream.write(f"{u} {v} {'+1' if s > 0 else '-1'}\n")
