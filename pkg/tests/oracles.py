"""Brute-force reference implementations used to cross-check the miners and enumerators.

They enumerate everything explicitly and are only fit for a handful of
junctions, which is all the tests feed them.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

from rsuplan.mining import Pattern, PatternKind, PatternSet
from rsuplan.trajectory_db import SequentialDatabase, SupportValue

Seq = Tuple[int, ...]


def pattern_set(kind: PatternKind, *sequences: Sequence[int], total: int = 8) -> PatternSet:
    """Pattern set with placeholder supports, for tests that only look at sequences."""
    return PatternSet(kind, tuple(Pattern(tuple(s), SupportValue(1, total)) for s in sequences))


def subsequences(path: Sequence[int]) -> FrozenSet[Seq]:
    """Every non-empty ordered subsequence of ``path``."""
    return _subsequences(tuple(path))


@functools.lru_cache(maxsize=None)
def _subsequences(path: Seq) -> FrozenSet[Seq]:
    found: Set[Seq] = set()
    for size in range(1, len(path) + 1):
        for idx in itertools.combinations(range(len(path)), size):
            found.add(tuple(path[i] for i in idx))
    return frozenset(found)


def contains(s: Sequence[int], path: Sequence[int]) -> bool:
    return tuple(s) in subsequences(path)


def count(db: SequentialDatabase, s: Sequence[int]) -> int:
    return sum(1 for t in db if contains(s, t.path))


def is_frequent(db: SequentialDatabase, s: Sequence[int], minsup: Fraction) -> bool:
    if not s:
        return True
    return Fraction(count(db, s), len(db)) >= minsup


def frequent(db: SequentialDatabase, minsup: Fraction) -> Dict[Seq, int]:
    candidates = set().union(*(subsequences(t.path) for t in db))
    return {s: count(db, s) for s in candidates if is_frequent(db, s, minsup)}


def maximal(fs: Iterable[Seq]) -> Set[Seq]:
    fs = set(fs)
    return {s for s in fs if not any(s != o and contains(s, o) for o in fs)}


def minimal_rare(db: SequentialDatabase, minsup: Fraction, max_len: int) -> Set[Seq]:
    """Rare sequences over the junction universe whose one-deletions are all frequent."""
    universe = sorted(db.junction_universe)
    found = set()
    for size in range(1, max_len + 1):
        for s in itertools.product(universe, repeat=size):
            if is_frequent(db, s, minsup):
                continue
            deletions = (s[:i] + s[i + 1 :] for i in range(size))
            if all(is_frequent(db, d, minsup) for d in deletions):
                found.add(s)
    return found


def rare_border(db: SequentialDatabase, minsup: Fraction, max_len: int) -> Dict[Seq, int]:
    """Rare sequences up to ``max_len`` whose prefix without the last junction is frequent."""
    universe = sorted(db.junction_universe)
    found = {}
    for size in range(1, max_len + 1):
        for s in itertools.product(universe, repeat=size):
            if not is_frequent(db, s, minsup) and is_frequent(db, s[:-1], minsup):
                found[s] = count(db, s)
    return found


def closed(fs: Dict[Seq, int]) -> Set[Seq]:
    return {
        s
        for s, c in fs.items()
        if not any(o != s and fs[o] == c and contains(s, o) for o in fs)
    }


def minimal_transversals(edges: Iterable[Iterable[int]]) -> List[FrozenSet[int]]:
    edges = [frozenset(e) for e in edges]
    vertices = sorted(set().union(*edges))

    def hits(chosen: FrozenSet[int]) -> bool:
        return all(e & chosen for e in edges)

    found = []
    for size in range(1, len(vertices) + 1):
        for combo in itertools.combinations(vertices, size):
            chosen = frozenset(combo)
            if hits(chosen) and all(not hits(chosen - {v}) for v in chosen):
                found.append(chosen)
    return found
