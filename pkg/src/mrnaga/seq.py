"""Sequence types, the standard genetic code and coding-sequence validity rules.

DNA (T alphabet) is the canonical internal form; RNA is only an output rendering.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

DNA_ALPHABET = frozenset("ACGT")
RNA_ALPHABET = frozenset("ACGU")
AMINO_ACIDS = frozenset("ACDEFGHIKLMNPQRSTVWY")
STOP = "*"

_BASES = "TCAG"
_AA_ORDER = "FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG"


class SequenceError(ValueError):
    """Raised for malformed nucleotide or protein input."""


def _clean(text: str, alphabet: frozenset, what: str) -> str:
    s = "".join(text.split()).upper()
    if not s:
        raise SequenceError(f"empty {what} sequence")
    bad = sorted(set(s) - alphabet)
    if bad:
        raise SequenceError(f"illegal character(s) {''.join(bad)!r} in {what} sequence")
    return s


@dataclass(frozen=True)
class NucleicSequence:
    """Nucleotide string stored in DNA form; ``kind`` records how it was supplied."""

    bases: str
    kind: str = "DNA"

    def __post_init__(self):
        if self.kind not in ("DNA", "RNA"):
            raise SequenceError(f"unknown kind {self.kind!r}")
        s = "".join(self.bases.split()).upper().replace("U", "T")
        object.__setattr__(self, "bases", _clean(s, DNA_ALPHABET, "nucleotide"))

    @classmethod
    def parse(cls, text: str) -> "NucleicSequence":
        s = "".join(text.split()).upper()
        kind = "RNA" if "U" in s and "T" not in s else "DNA"
        if "U" in s and "T" in s:
            raise SequenceError("sequence mixes T and U")
        return cls(s, kind)

    def __str__(self) -> str:
        return self.rendered()

    def __len__(self) -> int:
        return len(self.bases)

    def rendered(self) -> str:
        return self.bases.replace("T", "U") if self.kind == "RNA" else self.bases

    def codons(self) -> list[str]:
        return [self.bases[i:i + 3] for i in range(0, len(self.bases) - 2, 3)]


@dataclass(frozen=True)
class ProteinSequence:
    residues: str

    def __post_init__(self):
        s = "".join(self.residues.split()).upper()
        if s.endswith(STOP):
            s = s[:-1]
        if STOP in s:
            raise SequenceError("stop symbol inside protein sequence")
        object.__setattr__(self, "residues", _clean(s, AMINO_ACIDS, "protein"))

    def __str__(self) -> str:
        return self.residues

    def __len__(self) -> int:
        return len(self.residues)


class GeneticCode:
    """The standard nuclear code: 61 sense codons, stops TAA/TAG/TGA."""

    def __init__(self):
        codons = [a + b + c for a in _BASES for b in _BASES for c in _BASES]
        table = dict(zip(codons, _AA_ORDER))
        families: dict[str, list[str]] = {}
        for codon in sorted(table):
            families.setdefault(table[codon], []).append(codon)
        self.table = MappingProxyType(table)
        self.stops = tuple(families.pop(STOP))
        self.synonym_families = MappingProxyType({aa: tuple(c) for aa, c in families.items()})
        self.sense_codons = tuple(sorted(c for c in table if table[c] != STOP))

    def is_stop(self, codon: str) -> bool:
        return self.table[codon] == STOP


STANDARD_CODE = GeneticCode()


def _as_bases(seq) -> str:
    if isinstance(seq, NucleicSequence):
        return seq.bases
    return NucleicSequence.parse(seq).bases


def translate(cds, code: GeneticCode = STANDARD_CODE) -> tuple[str, bool]:
    """Translate until the first stop.

    Returns the residues before the stop and whether a stop was seen.
    """
    s = _as_bases(cds)
    if len(s) % 3:
        raise SequenceError(f"length {len(s)} is not a multiple of 3")
    out = []
    for i in range(0, len(s), 3):
        aa = code.table[s[i:i + 3]]
        if aa == STOP:
            return "".join(out), True
        out.append(aa)
    return "".join(out), False


def validate_cds(cds, target, code: GeneticCode = STANDARD_CODE) -> list[str]:
    """Return the list of violated rules; an empty list means the CDS is valid.

    Rules: ``length%3``, ``starts-with-ATG``, ``internal stop``,
    ``terminal stop``, ``translation mismatch``.
    """
    try:
        s = _as_bases(cds)
    except SequenceError as exc:
        return [f"bad sequence: {exc}"]
    target = str(target) if target is not None else None
    problems = []
    if len(s) % 3:
        problems.append("length%3")
    if not s.startswith("ATG"):
        problems.append("starts-with-ATG")
    codons = [s[i:i + 3] for i in range(0, len(s) - len(s) % 3, 3)]
    if any(code.is_stop(c) for c in codons[:-1]):
        problems.append("internal stop")
    if not codons or not code.is_stop(codons[-1]):
        problems.append("terminal stop")
    if target is not None:
        # compare the sense codons only; a misplaced stop is reported by its own rule
        protein = "".join(code.table[c] for c in codons).replace(STOP, "")
        if protein != target:
            problems.append("translation mismatch")
    return problems


def synonymous_codons(codon: str, code: GeneticCode = STANDARD_CODE) -> tuple[str, ...]:
    codon = codon.upper().replace("U", "T")
    aa = code.table.get(codon)
    if aa is None:
        raise SequenceError(f"not a codon: {codon!r}")
    if aa == STOP:
        raise SequenceError(f"{codon} is a stop codon")
    return code.synonym_families[aa]


def to_rna(seq: NucleicSequence) -> NucleicSequence:
    return NucleicSequence(seq.bases, "RNA")


def to_dna(seq: NucleicSequence) -> NucleicSequence:
    return NucleicSequence(seq.bases, "DNA")


@dataclass(frozen=True)
class Construct:
    """Full transcript: fixed 5'UTR + evolvable CDS + fixed 3'UTR.

    UTRs may be empty strings. The CDS must be structurally valid.
    """

    utr5: str
    cds: str
    utr3: str

    def __post_init__(self):
        for name in ("utr5", "cds", "utr3"):
            raw = getattr(self, name)
            if isinstance(raw, NucleicSequence):
                raw = raw.bases
            s = "".join(raw.split()).upper().replace("U", "T")
            if s or name == "cds":
                s = _clean(s, DNA_ALPHABET, name)
            object.__setattr__(self, name, s)
        problems = validate_cds(self.cds, None)
        if problems:
            raise SequenceError("invalid CDS: " + ", ".join(problems))

    @property
    def transcript(self) -> str:
        return self.utr5 + self.cds + self.utr3

    @property
    def cds_start(self) -> int:
        return len(self.utr5)

    def __len__(self) -> int:
        return len(self.utr5) + len(self.cds) + len(self.utr3)
