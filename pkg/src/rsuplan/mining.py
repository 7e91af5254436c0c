"""Frequent, maximal, rare and minimal rare junction sequences.

Frequent sequences are enumerated PrefixSpan style: every frequent prefix keeps
a projected database (one suffix start per supporting trajectory) and is grown
by one junction at a time. Rare candidates are exactly the one-junction
extensions of frequent prefixes that fall below the threshold, which is the
only place minimal rare sequences can live.
"""

from __future__ import annotations

import hashlib
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import ParameterError, ParseError
from .trajectory_db import (
    JunctionId,
    JunctionSequence,
    SequentialDatabase,
    SupportValue,
    is_ordered_subsequence,
)

logger = logging.getLogger(__name__)


class PatternKind(str, Enum):
    FS = "FS"
    MFS = "MFS"
    RS = "RS"
    MRS = "MRS"
    AP = "AP"


@dataclass(frozen=True)
class MinSup:
    """Minimum support as an exact fraction of the database size.

    The numerator and denominator are kept as given (``2/8`` stays ``2/8`` in
    reports) while comparisons use cross-multiplied integers.
    """

    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        if self.numerator <= 0 or self.denominator <= 0:
            raise ParameterError(f"minsup must be positive, got {self}")
        if self.numerator > self.denominator:
            raise ParameterError(f"minsup must not exceed 1, got {self}")

    @classmethod
    def parse(cls, value: Union[str, float, Fraction, "MinSup"]) -> "MinSup":
        """Accept ``"a/b"``, a decimal string or number, or a Fraction."""
        if isinstance(value, MinSup):
            return value
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                num, _, den = text.partition("/")
                try:
                    return cls(int(num), int(den))
                except ValueError as exc:
                    raise ParameterError(f"invalid minsup {value!r}") from exc
            try:
                frac = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise ParameterError(f"invalid minsup {value!r}") from exc
        elif isinstance(value, Fraction):
            frac = value
        else:
            frac = Fraction(str(value))
        return cls(frac.numerator, frac.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def is_met(self, count: int, total: int) -> bool:
        return count * self.denominator >= self.numerator * total

    def admits(self, value: SupportValue) -> bool:
        return self.is_met(value.count, value.total)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def canonical_key(sequence: Sequence[JunctionId]) -> Tuple[int, Tuple[JunctionId, ...]]:
    """Sort key ordering sequences by length, then lexicographically."""
    return (len(sequence), tuple(sequence))


@dataclass(frozen=True)
class Pattern:
    sequence: JunctionSequence
    support: SupportValue

    def __post_init__(self) -> None:
        if not self.sequence:
            raise ParameterError("patterns must contain at least one junction")

    def __len__(self) -> int:
        return len(self.sequence)

    @property
    def junctions(self) -> frozenset:
        return frozenset(self.sequence)

    def to_text(self) -> str:
        return f"<{' '.join(map(str, self.sequence))}> {self.support}"


_PATTERN_LINE = re.compile(r"^<\s*(\d+(?:\s+\d+)*)\s*>\s+(\d+)\s*/\s*(\d+)$")


@dataclass(frozen=True)
class PatternSet:
    """Canonically sorted, duplicate-free collection of patterns of one kind."""

    kind: PatternKind
    patterns: Tuple[Pattern, ...] = ()
    _index: Dict[JunctionSequence, Pattern] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        unique: Dict[JunctionSequence, Pattern] = {}
        for p in self.patterns:
            unique.setdefault(tuple(p.sequence), p)
        ordered = tuple(sorted(unique.values(), key=lambda p: canonical_key(p.sequence)))
        object.__setattr__(self, "kind", PatternKind(self.kind))
        object.__setattr__(self, "patterns", ordered)
        object.__setattr__(self, "_index", {p.sequence: p for p in ordered})

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Pattern):
            return item.sequence in self._index
        try:
            return tuple(item) in self._index  # type: ignore[arg-type]
        except TypeError:
            return False

    def get(self, sequence: Sequence[JunctionId]) -> Optional[Pattern]:
        return self._index.get(tuple(sequence))

    def sequences(self) -> List[JunctionSequence]:
        return [p.sequence for p in self.patterns]

    def junctions(self) -> frozenset:
        return frozenset(j for p in self.patterns for j in p.sequence)

    def relabel(self, kind: PatternKind) -> "PatternSet":
        return PatternSet(kind, self.patterns)

    def to_text(self) -> str:
        return "".join(p.to_text() + "\n" for p in self.patterns)

    @classmethod
    def from_text(cls, text: str, kind: PatternKind) -> "PatternSet":
        patterns = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            match = _PATTERN_LINE.match(line)
            if not match:
                raise ParseError(f"expected '<j1 j2 ...> count/total', got {line!r}", lineno)
            seq = tuple(int(x) for x in match.group(1).split())
            count, total = int(match.group(2)), int(match.group(3))
            if total <= 0 or count > total:
                raise ParseError(f"invalid support {count}/{total}", lineno)
            patterns.append(Pattern(seq, SupportValue(count, total)))
        return cls(kind, tuple(patterns))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "patterns": [
                {
                    "sequence": list(p.sequence),
                    "count": p.support.count,
                    "total": p.support.total,
                }
                for p in self.patterns
            ],
        }

    def digest(self) -> str:
        """SHA-256 of the kind and text form; stable across runs and platforms."""
        payload = f"{self.kind.value}\n{self.to_text()}".encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


# ---------------------------------------------------------------------------
# Prefix-projected enumeration
# ---------------------------------------------------------------------------

Projection = List[Tuple[int, int]]


def _project(
    paths: Sequence[JunctionSequence], projection: Projection, j: JunctionId
) -> Projection:
    projected = []
    for idx, start in projection:
        path = paths[idx]
        try:
            projected.append((idx, path.index(j, start) + 1))
        except ValueError:
            continue
    return projected


def _enumerate(
    db: SequentialDatabase,
    minsup: MinSup,
    max_len: Optional[int],
    collect_rare: bool,
) -> Tuple[List[Pattern], List[Pattern]]:
    paths = [t.path for t in db]
    total = len(paths)
    universe = sorted(db.junction_universe)
    frequent: List[Pattern] = []
    rare: List[Pattern] = []

    stack: List[Tuple[JunctionSequence, Projection]] = [((), [(i, 0) for i in range(total)])]
    while stack:
        prefix, projection = stack.pop()
        counts: Counter = Counter()
        for idx, start in projection:
            counts.update(set(paths[idx][start:]))

        for j in universe:
            count = counts.get(j, 0)
            sequence = prefix + (j,)
            if minsup.is_met(count, total):
                frequent.append(Pattern(sequence, SupportValue(count, total)))
                stack.append((sequence, _project(paths, projection, j)))
            elif collect_rare and (max_len is None or len(sequence) <= max_len):
                rare.append(Pattern(sequence, SupportValue(count, total)))

    logger.debug(
        f"Enumerated {len(frequent)} frequent and {len(rare)} rare border sequences "
        f"at minsup {minsup}"
    )
    return frequent, rare


def mine_frequent(db: SequentialDatabase, minsup: MinSup) -> PatternSet:
    """All sequences whose support meets ``minsup``, canonically sorted."""
    minsup = MinSup.parse(minsup)
    frequent, _ = _enumerate(db, minsup, None, collect_rare=False)
    return PatternSet(PatternKind.FS, tuple(frequent))


def mine_rare(db: SequentialDatabase, minsup: MinSup, max_len: Optional[int] = None) -> PatternSet:
    """Rare sequences on the frequent border.

    Every returned sequence has support below ``minsup`` and is either a single
    junction of the universe or a frequent sequence extended by one junction.
    Rare sequences are never extended further. Zero-support candidates are kept
    so later pruning can see them.

    Args:
        max_len: Longest candidate considered; defaults to the longest trajectory.
    """
    minsup = MinSup.parse(minsup)
    if max_len is None:
        max_len = db.longest_path
    if max_len < 1:
        raise ParameterError("max_len must be at least 1")
    _, rare = _enumerate(db, minsup, max_len, collect_rare=True)
    return PatternSet(PatternKind.RS, tuple(rare))


def maximal_frequent(fs: PatternSet) -> PatternSet:
    """Keep the frequent sequences not contained in any other frequent sequence."""
    mfs: List[Pattern] = []
    for candidate in sorted(fs, key=lambda p: canonical_key(p.sequence)):
        mfs = [m for m in mfs if not is_ordered_subsequence(m.sequence, candidate.sequence)]
        mfs.append(candidate)
    return PatternSet(PatternKind.MFS, tuple(mfs))


def minimal_rare(rs: PatternSet) -> PatternSet:
    """Keep the rare sequences that contain no other already-kept rare sequence.

    ``rs`` is processed in ascending length order, so a kept sequence never
    contains a shorter rare one.
    """
    mrs: List[Pattern] = []
    for candidate in sorted(rs, key=lambda p: canonical_key(p.sequence)):
        if not any(is_ordered_subsequence(m.sequence, candidate.sequence) for m in mrs):
            mrs.append(candidate)
    return PatternSet(PatternKind.MRS, tuple(mrs))


def prune_amp(mrs: PatternSet) -> PatternSet:
    """Drop zero-support members and single-junction members."""
    kept = tuple(p for p in mrs if p.support.count > 0 and len(p) > 1)
    dropped = len(mrs) - len(kept)
    if dropped:
        logger.debug(f"Pruned {dropped} null or single-junction rare sequences")
    return PatternSet(mrs.kind, kept)


@dataclass(frozen=True)
class MiningResult:
    """Every pattern set produced on the way to the representative set."""

    minsup: MinSup
    max_len: int
    fs: PatternSet
    mfs: PatternSet
    rs: PatternSet
    mrs: PatternSet
    pruned_mrs: PatternSet
    ap: PatternSet

    def to_dict(self) -> Dict[str, Any]:
        return {
            "minsup": str(self.minsup),
            "max_len": self.max_len,
            "FS": self.fs.to_dict()["patterns"],
            "MFS": self.mfs.to_dict()["patterns"],
            "RS": self.rs.to_dict()["patterns"],
            "MRS": self.mrs.to_dict()["patterns"],
            "MRS_pruned": self.pruned_mrs.to_dict()["patterns"],
            "AP": self.ap.to_dict()["patterns"],
        }


def _union(kind: PatternKind, *sets: PatternSet) -> PatternSet:
    return PatternSet(kind, tuple(p for s in sets for p in s))


def mine_patterns(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    max_len: Optional[int] = None,
    prune: bool = True,
) -> MiningResult:
    """Run the full mining pass once and keep every intermediate set.

    With ``prune=False`` the representative set is built from the unpruned
    minimal rare sequences.
    """
    minsup = MinSup.parse(minsup)
    if max_len is None:
        max_len = db.longest_path
    if max_len < 1:
        raise ParameterError("max_len must be at least 1")

    frequent, rare = _enumerate(db, minsup, max_len, collect_rare=True)
    fs = PatternSet(PatternKind.FS, tuple(frequent))
    rs = PatternSet(PatternKind.RS, tuple(rare))
    mfs = maximal_frequent(fs)
    mrs = minimal_rare(rs)
    pruned = prune_amp(mrs)
    ap = _union(PatternKind.AP, mfs, pruned if prune else mrs)

    if not pruned:
        logger.warning(f"No minimal rare sequence survives pruning at minsup {minsup}")
    logger.info(
        f"Mined |FS|={len(fs)} |MFS|={len(mfs)} |MRS|={len(mrs)} "
        f"|MRS pruned|={len(pruned)} |AP|={len(ap)}"
    )
    return MiningResult(minsup, max_len, fs, mfs, rs, mrs, pruned, ap)


def amp(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    max_len: Optional[int] = None,
    prune: bool = True,
) -> PatternSet:
    """Representative pattern set: maximal frequent plus (pruned) minimal rare."""
    return mine_patterns(db, minsup, max_len, prune=prune).ap

