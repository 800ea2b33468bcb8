"""Minimal FASTA reading and writing."""
from __future__ import annotations

from .seq import AMINO_ACIDS, STOP, SequenceError

NUCLEOTIDES = frozenset("ACGTU")
PROTEIN = AMINO_ACIDS | {STOP}


class FastaError(ValueError):
    pass


def parse_fasta(path, protein: bool = False) -> list[tuple[str, str]]:
    """Records as (header, sequence); multi-line sequences are joined.

    Sequences are upper-cased; characters outside A/C/G/T/U (or the amino
    acid letters and '*' with ``protein``) are rejected.
    """
    with open(path) as fh:
        return parse_fasta_text(fh.read(), str(path), protein)


def parse_fasta_text(text: str, source: str = "<input>", protein: bool = False) -> list[tuple[str, str]]:
    alphabet = PROTEIN if protein else NUCLEOTIDES
    records = []
    header, chunks = None, []

    def close():
        if header is None:
            return
        seq = "".join(chunks).upper()
        if not seq:
            raise FastaError(f"{source}: empty record {header!r}")
        bad = sorted(set(seq) - alphabet)
        if bad:
            raise SequenceError(f"{source}: record {header!r} has illegal character(s) {''.join(bad)!r}")
        records.append((header, seq))

    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            close()
            header, chunks = line[1:].strip(), []
        elif header is None:
            raise FastaError(f"{source}:{lineno}: sequence data before the first '>' header")
        else:
            chunks.append("".join(line.split()))
    close()
    return records


def format_fasta(records, width: int = 60) -> str:
    out = []
    for header, seq in records:
        out.append(f">{header}")
        out.extend(seq[i:i + width] for i in range(0, len(seq), width))
    return "\n".join(out) + "\n" if out else ""


def write_fasta(records, path, width: int = 60) -> None:
    with open(path, "w") as fh:
        fh.write(format_fasta(records, width))
