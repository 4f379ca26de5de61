"""Reducibility of puzzle pieces: i-trees, verdicts, constraints, determinacy.

A piece ``v`` of positive order is *f-reducible* when
(R1) ``f`` maps the i-tree below ``v`` level-by-level bijectively onto the
i-tree below ``f(v)``, and
(R2) no sibling ``w != v`` shares both images (``i(w) = i(v)`` and
``f(w) = f(v)``).
Otherwise ``v`` is *f-irreducible*.  Irreducible pieces encode the
constraints of the puzzle dynamics; reducible pieces extend exactly like
their f-image.

Condition (R2) is applied to every same-image sibling regardless of
whether the sibling itself satisfies (R1).  With the weaker sibling rule
the diagram of the golden-mean puzzle would lose its base vertices and
could not carry the dynamics, so sibling competition alone blocks
reducibility here.

Truncation semantics: bijectivity can only be checked on materialized
tree levels.  A failure at any materialized level is definitive; success
on all available levels yields a ``REDUCIBLE`` verdict certified to that
depth, or ``UNKNOWN`` when fewer levels are available than the analyzer's
``min_certified`` threshold.  R2 verdicts are exact at any depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from qfpuzzles.puzzle import DyadicDistance, EntropyTable, Puzzle, sequence_entropy


class Status(Enum):
    REDUCIBLE = "Reducible"
    IRREDUCIBLE_R1 = "Irreducible_R1"
    IRREDUCIBLE_R2 = "Irreducible_R2"
    UNKNOWN = "UnknownBeyondDepth"


@dataclass(frozen=True)
class ReducibilityVerdict:
    status: Status
    certified_depth: int
    witness_level: int | None = None  # set for IRREDUCIBLE_R1
    witness_piece: int | None = None  # set for IRREDUCIBLE_R2

    @property
    def is_irreducible(self) -> bool:
        return self.status in (Status.IRREDUCIBLE_R1, Status.IRREDUCIBLE_R2)

    @property
    def is_reducible(self) -> bool:
        return self.status is Status.REDUCIBLE

    @property
    def is_unknown(self) -> bool:
        return self.status is Status.UNKNOWN


@dataclass(frozen=True)
class ITree:
    """The i-tree below a piece, materialized breadth-first.

    ``levels[k]`` holds the pieces ``w`` with ``i^k(w) = root``;
    ``certified_depth`` is the number of levels below the root that the
    puzzle truncation allowed us to materialize.
    """

    root: int
    levels: tuple[tuple[int, ...], ...]

    @property
    def certified_depth(self) -> int:
        return len(self.levels) - 1

    @property
    def size(self) -> int:
        return sum(len(lv) for lv in self.levels)

    def nodes(self) -> list[int]:
        return [w for lv in self.levels for w in lv]


@dataclass(frozen=True)
class ReductionOutcome:
    """Result of following a reduction chain for a fixed number of steps."""

    piece: int | None
    status: str  # "ok" | "blocked" | "unknown"


@dataclass(frozen=True)
class ChainResult:
    """A maximal reduction chain ``v, f(v), f^2(v), ...``.

    ``kind`` tells how it ended: at an ``"irreducible"`` piece, at the
    ``"root"`` with every chain piece reducible, or at an ``"unknown"``
    verdict (truncation frontier).  ``pieces`` lists the visited pieces,
    ending with the terminal one.
    """

    kind: str
    pieces: tuple[int, ...]

    @property
    def terminal(self) -> int:
        return self.pieces[-1]


@dataclass(frozen=True)
class IrreducibleLevel:
    certified: tuple[int, ...]
    unknown: tuple[int, ...]


@dataclass(frozen=True)
class DeterminacyResult:
    determined: bool
    counterexample: tuple[int, int] | None
    checked_through_order: int


class ReducibilityAnalyzer:
    """Per-puzzle verdict engine with a write-once verdict cache."""

    def __init__(self, puzzle: Puzzle, min_certified: int = 1):
        if min_certified < 1:
            raise ValueError("min_certified must be >= 1")
        self.puzzle = puzzle
        self.min_certified = min_certified
        self._verdicts: dict[int, ReducibilityVerdict] = {}

    # -- trees -------------------------------------------------------------

    def i_tree(self, piece: int, max_levels: int | None = None) -> ITree:
        p = self.puzzle
        available = p.depth - p.order(piece)
        depth = available if max_levels is None else min(max_levels, available)
        levels: list[tuple[int, ...]] = [(piece,)]
        frontier = [piece]
        for _ in range(depth):
            frontier = sorted(w for u in frontier for w in p.i_preimages(u))
            levels.append(tuple(frontier))
        return ITree(piece, tuple(levels))

    # -- verdicts ------------------------------------------------------------

    def verdict(self, piece: int) -> ReducibilityVerdict:
        cached = self._verdicts.get(piece)
        if cached is not None:
            return cached
        out = self._compute_verdict(piece)
        self._verdicts.setdefault(piece, out)
        return self._verdicts[piece]

    def _compute_verdict(self, piece: int) -> ReducibilityVerdict:
        p = self.puzzle
        if p.order(piece) == 0:
            raise ValueError("reducibility is defined for pieces of order >= 1")
        d_avail = p.depth - p.order(piece)
        fv = p.f(piece)

        level_v: Sequence[int] = (piece,)
        level_fv: Sequence[int] = (fv,)
        for lvl in range(1, d_avail + 1):
            level_v = [w for u in level_v for w in p.i_preimages(u)]
            level_fv = [w for u in level_fv for w in p.i_preimages(u)]
            images = set()
            ok = len(level_v) == len(level_fv)
            if ok:
                target = set(level_fv)
                for w in level_v:
                    img = p.f(w)
                    if img in images or img not in target:
                        ok = False
                        break
                    images.add(img)
            if not ok:
                return ReducibilityVerdict(
                    Status.IRREDUCIBLE_R1, certified_depth=d_avail, witness_level=lvl
                )

        iv = p.i(piece)
        for sib in p.i_preimages(iv):
            if sib != piece and p.f(sib) == fv:
                return ReducibilityVerdict(
                    Status.IRREDUCIBLE_R2, certified_depth=d_avail, witness_piece=sib
                )

        if d_avail < self.min_certified:
            return ReducibilityVerdict(Status.UNKNOWN, certified_depth=d_avail)
        return ReducibilityVerdict(Status.REDUCIBLE, certified_depth=d_avail)

    # -- derived notions -----------------------------------------------------

    def irreducible_pieces(self, n: int) -> IrreducibleLevel:
        """The set of irreducible pieces of order ``n``; pieces whose

        verdict is unknown beyond the truncation are reported separately.
        """
        if not 1 <= n <= self.puzzle.depth:
            raise ValueError(f"order {n} outside 1..{self.puzzle.depth}")
        certified, unknown = [], []
        for piece in self.puzzle.level(n):
            v = self.verdict(piece)
            if v.is_irreducible:
                certified.append(piece)
            elif v.is_unknown:
                unknown.append(piece)
        return IrreducibleLevel(tuple(certified), tuple(unknown))

    def reduces(self, piece: int, k: int) -> ReductionOutcome:
        """``f^k(piece)`` when every intermediate piece is reducible.

        ``k = 0`` returns the piece itself.  A definite irreducible on the
        way yields ``"blocked"``; an unknown verdict yields ``"unknown"``.
        """
        if k < 0:
            raise ValueError("k must be >= 0")
        if k > self.puzzle.order(piece):
            raise ValueError("cannot reduce below the root")
        current = piece
        for _ in range(k):
            v = self.verdict(current)
            if v.is_unknown:
                return ReductionOutcome(None, "unknown")
            if not v.is_reducible:
                return ReductionOutcome(None, "blocked")
            current = self.puzzle.f(current)
        return ReductionOutcome(current, "ok")

    def reduction_chain(self, piece: int) -> ChainResult:
        """Follow ``f`` while pieces are reducible; stop at the first

        irreducible piece, at the root, or at an unknown verdict.
        """
        p = self.puzzle
        pieces = [piece]
        current = piece
        while p.order(current) >= 1:
            v = self.verdict(current)
            if v.is_irreducible:
                return ChainResult("irreducible", tuple(pieces))
            if v.is_unknown:
                return ChainResult("unknown", tuple(pieces))
            current = p.f(current)
            pieces.append(current)
        return ChainResult("root", tuple(pieces))

    def constraint_entropy(
        self,
        eps_list: Sequence[DyadicDistance],
        n_range: Sequence[int],
    ) -> EntropyTable:
        """Covering-number entropy table of the irreducible families C_n.

        Only certified irreducible pieces enter; unknown-verdict pieces
        are excluded (they are reported by :meth:`irreducible_pieces`).
        """

        def family(n: int) -> Iterable[int]:
            if not 1 <= n <= self.puzzle.depth:
                return ()
            return self.irreducible_pieces(n).certified

        return sequence_entropy(self.puzzle, family, eps_list, n_range)

    def is_determined(self) -> DeterminacyResult:
        """Search for pairs ``u != v`` with a common one-step reduction and

        equal order-1 projection.  The scan covers every order whose
        pieces admit certified reducibility verdicts; the first
        counterexample in (order, label) order is returned.
        """
        p = self.puzzle
        top = p.depth - 1
        for n in range(1, top + 1):
            by_target: dict[tuple[int, int], list[int]] = {}
            for piece in sorted(p.level(n), key=p.label):
                if not self.verdict(piece).is_reducible:
                    continue
                key = (p.f(piece), p.project(piece, 1))
                by_target.setdefault(key, []).append(piece)
            pairs = [
                tuple(group[:2]) for group in by_target.values() if len(group) > 1
            ]
            if pairs:
                u, v = min(pairs, key=lambda uv: (p.label(uv[0]), p.label(uv[1])))
                return DeterminacyResult(False, (u, v), n)
        return DeterminacyResult(True, None, top)
