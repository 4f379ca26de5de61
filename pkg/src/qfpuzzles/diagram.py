"""The Markov diagram of a puzzle and its graph-theoretic estimators.

Vertices are the certified irreducible pieces up to a cutoff order.  For
each vertex ``v`` and each piece ``u`` with ``i(u) = v``, the reduction
chain ``u, f(u), f^2(u), ...`` is followed while pieces stay reducible:
if it stops at an irreducible piece ``w`` inside the cutoff, the diagram
gains the arrow ``v ~> w`` with witness ``u``; chains leaving the
certified region produce explicit frontier markers instead of arrows, so
truncation degrades to interval answers rather than wrong ones.  Chains
that die at the root prove the absence of an arrow.

For any fixed pair ``(v, w)`` the witness is unique; this is asserted
during construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from qfpuzzles.graphs import Edge, GraphTruncation, based_loop_counts, avoiding_path_counts
from qfpuzzles.puzzle import Puzzle
from qfpuzzles.reducibility import ReducibilityAnalyzer


class DiagramError(ValueError):
    pass


class DepthExhausted(DiagramError):
    """A pullback or witness search left the puzzle truncation."""


@dataclass(frozen=True)
class Arrow:
    source: int
    target: int
    witness: int
    chain: tuple[int, ...]  # witness, f(witness), ..., target (certificate)

    @property
    def steps(self) -> int:
        return len(self.chain) - 1


@dataclass(frozen=True)
class FrontierMarker:
    source: int
    witness: int
    reason: str  # "unknown-verdict" | "target-beyond-cutoff"


class MarkovDiagram:
    def __init__(
        self,
        puzzle: Puzzle,
        analyzer: ReducibilityAnalyzer,
        cutoff: int,
        vertices: Sequence[int],
        arrows: Sequence[Arrow],
        frontier: Sequence[FrontierMarker],
    ):
        self.puzzle = puzzle
        self.analyzer = analyzer
        self.cutoff = cutoff
        self.provenance = puzzle.name
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self.frontier = tuple(frontier)
        self._arrow_by_pair = {(a.source, a.target): a for a in self.arrows}
        if len(self._arrow_by_pair) != len(self.arrows):
            raise DiagramError("duplicate arrows between a vertex pair")

    def arrow(self, source: int, target: int) -> Arrow | None:
        return self._arrow_by_pair.get((source, target))

    def successors(self, vertex: int) -> list[int]:
        return sorted(t for (s, t) in self._arrow_by_pair if s == vertex)

    @property
    def is_complete(self) -> bool:
        """True when no reduction chain hit the truncation frontier."""
        return not self.frontier

    def to_graph(self) -> GraphTruncation:
        p = self.puzzle
        return GraphTruncation(
            tuple(p.label(v) for v in self.vertices),
            tuple(Edge(p.label(a.source), p.label(a.target)) for a in self.arrows),
            completeness_bound=None if self.is_complete else self.cutoff,
            name=f"{p.name}-diagram",
        )

    def to_dot(self) -> str:
        p = self.puzzle
        lines = [f'digraph "{self.provenance}" {{']
        for v in self.vertices:
            lines.append(f'  "{p.label(v)}"[label="{p.label(v)}|{p.order(v)}"];')
        for a in self.arrows:
            lines.append(
                f'  "{p.label(a.source)}" -> "{p.label(a.target)}"'
                f' [label="{p.label(a.witness)}"];'
            )
        for m in self.frontier:
            lines.append(
                f'  "{p.label(m.source)}" -> "?{p.label(m.witness)}" [style=dashed];'
            )
        lines.append("}")
        return "\n".join(lines)


def build_diagram(
    p: Puzzle, cutoff: int, analyzer: ReducibilityAnalyzer | None = None
) -> MarkovDiagram:
    """Construct the Markov diagram on irreducible pieces of order <= cutoff.

    Witness search needs one extra level, so ``cutoff <= depth - 1``.
    """
    if cutoff < 1 or cutoff + 1 > p.depth:
        raise DiagramError(f"cutoff {cutoff} needs depth >= {cutoff + 1}, have {p.depth}")
    an = analyzer or ReducibilityAnalyzer(p)
    vertices: list[int] = []
    for n in range(1, cutoff + 1):
        level = an.irreducible_pieces(n)
        vertices.extend(level.certified)
        if level.unknown:
            raise DiagramError(
                f"order-{n} pieces with unknown verdicts cannot seed a diagram"
            )
    vset = set(vertices)
    arrows: list[Arrow] = []
    frontier: list[FrontierMarker] = []
    for v in sorted(vertices):
        for u in p.i_preimages(v):
            chain = an.reduction_chain(u)
            if chain.kind == "root":
                continue
            if chain.kind == "unknown":
                frontier.append(FrontierMarker(v, u, "unknown-verdict"))
                continue
            w = chain.terminal
            if w in vset:
                arrows.append(Arrow(v, w, u, chain.pieces))
            else:
                frontier.append(FrontierMarker(v, u, "target-beyond-cutoff"))
    return MarkovDiagram(p, an, cutoff, sorted(vertices), arrows, frontier)


# -- path / piece correspondence ----------------------------------------------


def _validate_path(d: MarkovDiagram, path: Sequence[int]) -> list[Arrow]:
    if not path:
        raise DiagramError("empty path")
    hops = []
    for v, w in zip(path, path[1:]):
        a = d.arrow(v, w)
        if a is None:
            raise DiagramError(
                f"no arrow {d.puzzle.label(v)!r} ~> {d.puzzle.label(w)!r}"
            )
        hops.append(a)
    return hops


def path_to_piece(d: MarkovDiagram, path: Sequence[int]) -> int:
    """The unique piece encoding a diagram path of length n.

    Runs the inductive pullback construction: starting from the last
    vertex, each arrow's witness tree is used to pull the partial piece
    back through the chain isomorphism.  The returned piece ``w`` has
    order ``|v_0| + n`` and satisfies ``i^n(w) = v_0`` and, for every k,
    ``i^k(w)`` reduces onto ``v_{n-k}``; both are asserted, with reduction
    verdicts consulted wherever the truncation certifies them.
    """
    p = d.puzzle
    hops = _validate_path(d, path)
    n = len(path) - 1
    if p.order(path[0]) + n > p.depth:
        raise DepthExhausted(
            f"piece of order {p.order(path[0]) + n} exceeds depth {p.depth}"
        )
    w = path[-1]
    for j, arrow in enumerate(reversed(hops), start=1):
        u, steps = arrow.witness, arrow.steps
        # Candidates are the level-(j-1) nodes of the tree below u; the
        # chain isomorphism sends exactly one of them to the current w.
        frontier = [u]
        for _ in range(j - 1):
            frontier = [x for q in frontier for x in p.i_preimages(q)]
        matches = [x for x in frontier if p.f_iter(x, steps) == w]
        if len(matches) != 1:
            raise DepthExhausted(
                f"pullback through witness {p.label(u)!r} found {len(matches)} preimages"
            )
        w = matches[0]
        if p.order(w) != p.order(arrow.source) + j:
            raise DiagramError("pullback produced a piece at the wrong order")
    _assert_path_piece(d, path, w)
    return w


def _assert_path_piece(d: MarkovDiagram, path: Sequence[int], w: int) -> None:
    p, an = d.puzzle, d.analyzer
    n = len(path) - 1
    if p.i_iter(w, n) != path[0]:
        raise DiagramError("constructed piece does not project onto the path start")
    for k in range(n + 1):
        q = p.i_iter(w, k)
        target = path[n - k]
        m = p.order(q) - p.order(target)
        current = q
        for _ in range(m):
            verdict = an.verdict(current)
            if verdict.is_irreducible:
                raise DiagramError("reduction certificate broken along the path")
            current = p.f(current)
        if current != target:
            raise DiagramError("reduction chain misses the path vertex")


def project_path(d: MarkovDiagram, path: Sequence[int]) -> tuple[list[str], list[str]]:
    """Coordinates of the puzzle point encoded by a path.

    Returns two label lists: the coordinates ``x_{|v_0|} .. x_{|v_0|+n}``
    of the encoded point (each depending only on the path prefix), and
    the shifted prefix realizing the projection (the ``|v_0|``-fold
    f-image of each coordinate).
    """
    p = d.puzzle
    _validate_path(d, path)
    shift = p.order(path[0])
    xs: list[str] = []
    pis: list[str] = []
    for j in range(len(path)):
        wj = path_to_piece(d, path[: j + 1])
        xs.append(p.label(wj))
        pis.append(p.label(p.f_iter(wj, shift)))
    return xs, pis


# -- SCCs and entropy estimators ----------------------------------------------


@dataclass(frozen=True)
class SCC:
    vertices: tuple[str, ...]
    period: int | None  # None when the component carries no cycle


def scc_decomposition(g: GraphTruncation | MarkovDiagram) -> list[SCC]:
    """Strongly connected components with periods.

    The period of a component is the gcd of the lengths of all its
    cycles, computed by potential coloring along a spanning traversal;
    bundle lengths count.
    """
    if isinstance(g, MarkovDiagram):
        g = g.to_graph()
    succ: dict[str, list[tuple[str, int]]] = {v: [] for v in g.vertices}
    for e in g.edges:
        succ[e.src].append((e.dst, e.length))

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = [0]

    def strongconnect(root: str):
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w, _ in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)

    for v in g.vertices:
        if v not in index:
            strongconnect(v)

    out = []
    for comp in components:
        cset = set(comp)
        period = _component_period(comp, succ, cset)
        out.append(SCC(tuple(sorted(comp)), period))
    out.sort(key=lambda s: s.vertices)
    return out


def _component_period(comp: list[str], succ, cset: set[str]) -> int | None:
    root = comp[0]
    pot: dict[str, int] = {root: 0}
    queue = [root]
    g = 0
    while queue:
        v = queue.pop()
        for w, length in succ[v]:
            if w not in cset:
                continue
            if w not in pot:
                pot[w] = pot[v] + length
                queue.append(w)
            else:
                g = math.gcd(g, abs(pot[v] + length - pot[w]))
    return g or None


@dataclass(frozen=True)
class RateRow:
    n: int
    count: int
    rate: float | None  # (1/n) log count; None when the count vanishes
    ratio: float | None  # log(count_n / count_{n-1}); successive-ratio estimate


@dataclass(frozen=True)
class RateTable:
    """Exact counts with log-rate estimates; counts are exact integers,

    rates are floats and always labeled estimates.
    """

    rows: tuple[RateRow, ...]
    exact: bool = True  # False when the truncation cannot guarantee the counts

    def row(self, n: int) -> RateRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    @property
    def final_rate(self) -> float | None:
        return self.rows[-1].rate if self.rows else None

    @property
    def final_ratio(self) -> float | None:
        return self.rows[-1].ratio if self.rows else None


def _rate_table(counts: Sequence[int], exact: bool = True) -> RateTable:
    rows = []
    prev = None
    for n, c in enumerate(counts, start=1):
        rate = math.log(c) / n if c > 0 else None
        ratio = math.log(c / prev) if prev and c > 0 else None
        rows.append(RateRow(n, c, rate, ratio))
        prev = c
    return RateTable(tuple(rows), exact)


def gurevich_entropy_estimate(
    g: GraphTruncation | MarkovDiagram, base: str, max_length: int
) -> RateTable:
    """Exact loop counts at a base vertex with their log-rate table.

    No extrapolation: the table reports (1/n) log c_n and the successive
    ratio log(c_n / c_{n-1}); the latter converges much faster on
    irreducible graphs.
    """
    if isinstance(g, MarkovDiagram):
        g = g.to_graph()
    counts = based_loop_counts(g, base, max_length)
    exact = g.completeness_bound is None or max_length <= g.completeness_bound
    return _rate_table(counts, exact)


@dataclass(frozen=True)
class RecurrenceEvidence:
    """Finite-scale comparison of loop growth vs excursion growth.

    ``gap`` is (loop ratio) - (excursion rate) at the deepest sampled
    length; a clearly positive gap is the desk-scale signature of a
    strongly recurrent graph (excursions avoiding the finite set grow
    strictly slower than loops).  No claim is certified: both numbers
    are sampled estimates.
    """

    loops: RateTable
    excursions: RateTable
    gap: float | None

    @property
    def suggests_strict_inequality(self) -> bool:
        return self.gap is not None and self.gap > 0


def recurrence_evidence(
    g: GraphTruncation | MarkovDiagram,
    base: str,
    finite_set: Iterable[str],
    max_length: int,
) -> RecurrenceEvidence:
    """Collect loop-count and excursion-count tables and their tail gap."""
    loops = gurevich_entropy_estimate(g, base, max_length)
    excursions = entropy_at_infinity_estimate(g, finite_set, max_length)
    loop_tail = loops.final_ratio if loops.final_ratio is not None else loops.final_rate
    exc_tail = excursions.final_rate
    gap = None
    if loop_tail is not None:
        gap = loop_tail - (exc_tail if exc_tail is not None else 0.0)
    return RecurrenceEvidence(loops, excursions, gap)


def entropy_at_infinity_estimate(
    g: GraphTruncation | MarkovDiagram,
    finite_set: Iterable[str],
    max_length: int,
) -> RateTable:
    """Growth of excursions avoiding a finite vertex set.

    For each pair (u, v) in the set, counts n-paths u -> v whose strictly
    intermediate named vertices avoid the whole set; the table reports the
    max count over pairs for each n.  The outer infimum over finite sets
    is the caller's loop.
    """
    if isinstance(g, MarkovDiagram):
        g = g.to_graph()
    F = sorted(set(finite_set))
    if not F:
        raise DiagramError("the avoided set must be nonempty")
    maxima = [0] * max_length
    for u in F:
        for v in F:
            counts = avoiding_path_counts(g, u, v, F, max_length)
            for k, c in enumerate(counts):
                if c > maxima[k]:
                    maxima[k] = c
    exact = g.completeness_bound is None or max_length <= g.completeness_bound
    return _rate_table(maxima, exact)
