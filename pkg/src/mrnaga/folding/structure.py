"""Dot-bracket structures: parsing, loop decomposition, paired fractions, start windows."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class SecondaryStructure:
    """A folded sequence.

    ``energy`` is in kcal/mol for energy-model folds and None for
    pair-maximisation folds, which carry ``pair_count`` instead.
    """

    sequence: str
    dot_bracket: str
    energy: Optional[float] = None
    pair_count: Optional[int] = None

    def __post_init__(self):
        if len(self.sequence) != len(self.dot_bracket):
            raise StructureError(
                f"structure length {len(self.dot_bracket)} != sequence length {len(self.sequence)}")

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return parse_dot_bracket(self.dot_bracket)

    def __len__(self) -> int:
        return len(self.dot_bracket)


def parse_dot_bracket(s: str) -> list[tuple[int, int]]:
    """Pair list (i < j, sorted by i) of a pseudoknot-free dot-bracket string."""
    stack, pairs = [], []
    for pos, ch in enumerate(s):
        if ch == "(":
            stack.append(pos)
        elif ch == ")":
            if not stack:
                raise StructureError(f"unbalanced ')' at position {pos}")
            pairs.append((stack.pop(), pos))
        elif ch != ".":
            raise StructureError(f"illegal character {ch!r} at position {pos}")
    if stack:
        raise StructureError(f"unbalanced '(' at position {stack[-1]}")
    return sorted(pairs)


def to_dot_bracket(pairs, n: int) -> str:
    out = ["."] * n
    for i, j in pairs:
        out[min(i, j)] = "("
        out[max(i, j)] = ")"
    return "".join(out)


def check_pairs(seq: str, dot_bracket: str, hairpin_min: int = 3) -> None:
    """Raise unless every pair is canonical (AU, GC, GU) and spans more than ``hairpin_min``."""
    from .energy import can_pair

    for i, j in parse_dot_bracket(dot_bracket):
        if j - i <= hairpin_min:
            raise StructureError(f"pair ({i},{j}) closes a hairpin shorter than {hairpin_min + 1}")
        if not can_pair(seq[i], seq[j]):
            raise StructureError(f"non-canonical pair {seq[i]}{seq[j]} at ({i},{j})")


def count_motifs(structure) -> dict:
    """Loop decomposition counts.

    ``total`` sums hairpins, bulges, interior loops and multiloops; stems
    (maximal stacked helices) are reported but not added to the total.
    """
    db = structure.dot_bracket if isinstance(structure, SecondaryStructure) else structure
    pairs = parse_dot_bracket(db)
    partner = [-1] * len(db)
    for i, j in pairs:
        partner[i], partner[j] = j, i
    counts = dict(hairpin=0, bulge=0, internal=0, multiloop=0, stem=0)
    stacked_on = set()
    for i, j in pairs:
        inner = []
        x = i + 1
        while x < j:
            if partner[x] > x:
                inner.append((x, partner[x]))
                x = partner[x] + 1
            else:
                x += 1
        if not inner:
            counts["hairpin"] += 1
        elif len(inner) > 1:
            counts["multiloop"] += 1
        else:
            p, q = inner[0]
            l1, l2 = p - i - 1, j - q - 1
            if l1 == 0 and l2 == 0:
                stacked_on.add((p, q))
            elif l1 == 0 or l2 == 0:
                counts["bulge"] += 1
            else:
                counts["internal"] += 1
    # every pair not stacked inside another opens a new helix
    counts["stem"] = sum(1 for pr in pairs if pr not in stacked_on)
    counts["total"] = counts["hairpin"] + counts["bulge"] + counts["internal"] + counts["multiloop"]
    return counts


def paired_fraction(structure, start: int = 0, end: Optional[int] = None) -> float:
    """Fraction of positions in ``[start, end)`` that are paired."""
    db = structure.dot_bracket if isinstance(structure, SecondaryStructure) else structure
    end = len(db) if end is None else end
    if not 0 <= start <= end <= len(db):
        raise StructureError(f"range [{start}, {end}) outside structure of length {len(db)}")
    if end == start:
        raise StructureError("empty range")
    window = db[start:end]
    return (len(window) - window.count(".")) / len(window)


def window_around_start(construct, radius: int = 30) -> tuple[str, tuple[int, int]]:
    """Subsequence ``[start - radius, start + radius)`` of the transcript, clipped.

    ``start`` is the first base of the CDS. Returns the window sequence and
    its (lo, hi) coordinates in the transcript.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    full = construct.transcript
    start = construct.cds_start
    lo, hi = max(0, start - radius), min(len(full), start + radius)
    return full[lo:hi], (lo, hi)
