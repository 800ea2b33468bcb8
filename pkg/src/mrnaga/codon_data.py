"""Reference tables: codon usage, CAI adaptiveness, tAI weights, codon-pair scores."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .seq import STANDARD_CODE, SequenceError, GeneticCode, _as_bases

SENSE = STANDARD_CODE.sense_codons


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class CodonUsageTable:
    """Per-family codon frequencies (each synonym family sums to 1).

    Stop codons are kept as their own family so a terminal stop can be
    sampled by usage.
    """

    freq: dict
    provenance: str = ""

    def family(self, aa: str) -> dict:
        codons = STANDARD_CODE.stops if aa == "*" else STANDARD_CODE.synonym_families[aa]
        return {c: self.freq[c] for c in codons}


@dataclass(frozen=True)
class AdaptivenessTable:
    w: dict


@dataclass(frozen=True)
class TaiWeightTable:
    s: dict
    provenance: str = ""


@dataclass(frozen=True)
class CodonPairTable:
    cps: dict
    pair_count_total: int = 0
    provenance: str = ""

    def score(self, a: str, b: str) -> float:
        return self.cps[(a, b)]


def _data_path(name: str) -> Path:
    return Path(str(resources.files("mrnaga") / "data" / name))


def _read_records(path, width: int) -> tuple[list[tuple], str]:
    records, comments = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line.lstrip("# "))
                continue
            parts = line.split()
            if len(parts) != width:
                raise TableError(f"{path}:{lineno}: expected {width} fields, got {len(parts)}")
            *keys, value = parts
            keys = [k.upper().replace("U", "T") for k in keys]
            for k in keys:
                if k not in STANDARD_CODE.table:
                    raise TableError(f"{path}:{lineno}: unknown codon {k!r}")
            try:
                records.append((*keys, float(value)))
            except ValueError:
                raise TableError(f"{path}:{lineno}: bad number {value!r}") from None
    return records, "; ".join(comments)


def usage_from_counts(counts: dict, pseudocount: float = 0.0, provenance: str = "") -> CodonUsageTable:
    """Normalize raw counts (or per-thousand values) within each synonym family."""
    missing = [c for c in SENSE if c not in counts]
    if missing:
        raise TableError(f"missing codon(s): {', '.join(missing)}")
    if any(v < 0 for v in counts.values()):
        raise TableError("negative codon frequency")
    freq = {}
    families = dict(STANDARD_CODE.synonym_families)
    families["*"] = STANDARD_CODE.stops
    for aa, codons in families.items():
        raw = [counts.get(c, 1.0 if aa == "*" else 0.0) + pseudocount for c in codons]
        total = sum(raw)
        if total <= 0 or min(raw) <= 0:
            raise TableError(f"zero frequency in family {aa}; use a positive pseudocount")
        for c, v in zip(codons, raw):
            freq[c] = v / total
    return CodonUsageTable(freq, provenance)


def load_usage_table(path=None, pseudocount: float = 0.0) -> CodonUsageTable:
    """Load a ``CODON<TAB>value`` table; the bundled human table when ``path`` is None."""
    path = path or _data_path("human_codon_usage.tsv")
    records, provenance = _read_records(path, 2)
    counts = {}
    for codon, value in records:
        if codon in counts:
            raise TableError(f"duplicate codon {codon}")
        counts[codon] = value
    return usage_from_counts(counts, pseudocount, provenance or str(path))


def adaptiveness_from_usage(usage: CodonUsageTable) -> AdaptivenessTable:
    w = {}
    for codons in STANDARD_CODE.synonym_families.values():
        top = max(usage.freq[c] for c in codons)
        for c in codons:
            w[c] = 1.0 if usage.freq[c] == top else usage.freq[c] / top
    return AdaptivenessTable(w)


def _normalize_tai(weights: dict, provenance: str) -> TaiWeightTable:
    missing = [c for c in SENSE if c not in weights]
    if missing:
        raise TableError(f"missing codon(s): {', '.join(missing)}")
    bad = [c for c, v in weights.items() if not v > 0]
    if bad:
        raise TableError(f"nonpositive tAI weight for {', '.join(bad)}")
    top = max(weights[c] for c in SENSE)
    return TaiWeightTable({c: weights[c] / top for c in SENSE}, provenance)


def load_tai_table(path=None) -> TaiWeightTable:
    """Load tAI weights and rescale so the largest is exactly 1."""
    path = path or _data_path("human_tai_weights.tsv")
    records, provenance = _read_records(path, 2)
    weights = {c: v for c, v in records if not STANDARD_CODE.is_stop(c)}
    return _normalize_tai(weights, provenance or str(path))


# Selective constraints between wobble base of the anticodon and codon
# third position (eukaryotic set; A34 is read as inosine).
WOBBLE_S = {"GU": 0.41, "IC": 0.28, "IA": 0.9999, "UG": 0.68}
_COMPLEMENT = str.maketrans("ACGT", "TGCA")


def tai_weights_from_trna(gene_copies: dict) -> dict:
    """Raw tAI absolute adaptiveness per sense codon from tRNA gene copy numbers.

    ``gene_copies`` maps anticodon (5'->3', DNA letters) to copy number.
    Codons with no decoding tRNA get the geometric mean of the others.
    """
    raw = {}
    for codon in SENSE:
        stem = codon[:2]
        third = codon[2]
        # anticodon is the reverse complement: wobble base first
        def copies(wobble):
            return gene_copies.get(wobble + stem[::-1].translate(_COMPLEMENT), 0)

        if third == "T":
            total = copies("A") + (1 - WOBBLE_S["GU"]) * copies("G")
        elif third == "C":
            total = copies("G") + (1 - WOBBLE_S["IC"]) * copies("A")
        elif third == "A":
            total = copies("T") + (1 - WOBBLE_S["IA"]) * copies("A")
        else:
            total = copies("C") + (1 - WOBBLE_S["UG"]) * copies("T")
        raw[codon] = total
    top = max(raw.values())
    w = {c: v / top for c, v in raw.items()}
    nonzero = [v for v in w.values() if v > 0]
    fill = math.exp(sum(math.log(v) for v in nonzero) / len(nonzero))
    return {c: (v if v > 0 else fill) for c, v in w.items()}


def _codon_list(seq) -> list[str]:
    s = _as_bases(seq)
    if len(s) % 3:
        raise SequenceError("corpus sequence length is not a multiple of 3")
    codons = [s[i:i + 3] for i in range(0, len(s), 3)]
    if codons and STANDARD_CODE.is_stop(codons[-1]):
        codons = codons[:-1]
    if any(STANDARD_CODE.is_stop(c) for c in codons):
        raise SequenceError("corpus sequence has an internal stop codon")
    return codons


def count_codon_pairs(corpus) -> Counter:
    pairs = Counter()
    for seq in corpus:
        codons = _codon_list(seq)
        pairs.update(zip(codons, codons[1:]))
    return pairs


def build_cps_table(corpus, pseudocount: float = 0.5, code: GeneticCode = STANDARD_CODE) -> CodonPairTable:
    """Codon-pair scores from a CDS corpus.

    cps(AB) = ln( n_AB / (n_A/n_X * n_B/n_Y * n_XY) ) where n_AB is the
    (smoothed) pair count, n_A / n_B the first/second-position codon
    marginals and n_X, n_Y, n_XY the amino-acid aggregates of those counts.
    """
    corpus = list(corpus)
    if not corpus:
        raise TableError("empty corpus")
    observed = count_codon_pairs(corpus)
    n = {(a, b): observed.get((a, b), 0) + pseudocount for a in SENSE for b in SENSE}
    left, right = Counter(), Counter()
    aa_pair = Counter()
    aa_left, aa_right = Counter(), Counter()
    for (a, b), v in n.items():
        left[a] += v
        right[b] += v
        aa_pair[code.table[a], code.table[b]] += v
    for c in SENSE:
        aa_left[code.table[c]] += left[c]
        aa_right[code.table[c]] += right[c]
    cps = {}
    for (a, b), v in n.items():
        x, y = code.table[a], code.table[b]
        if aa_pair[x, y] == 0:
            cps[a, b] = 0.0
            continue
        if v == 0:
            raise TableError(f"unobserved pair {a}{b} with pseudocount 0")
        expected = left[a] / aa_left[x] * right[b] / aa_right[y] * aa_pair[x, y]
        cps[a, b] = math.log(v / expected)
    return CodonPairTable(cps, sum(observed.values()), f"corpus of {len(corpus)} sequences")


def neutral_cps_table() -> CodonPairTable:
    """All-zero scores, used when no corpus-derived table is supplied."""
    return CodonPairTable({(a, b): 0.0 for a in SENSE for b in SENSE}, 0, "neutral")


def load_cps_table(path) -> CodonPairTable:
    records, provenance = _read_records(path, 3)
    cps = {}
    for a, b, value in records:
        if STANDARD_CODE.is_stop(a) or STANDARD_CODE.is_stop(b):
            raise TableError(f"stop codon in pair {a}{b}")
        cps[a, b] = value
    missing = 61 * 61 - len(cps)
    if missing:
        raise TableError(f"{missing} codon pair(s) missing")
    total = 0
    for note in provenance.split("; "):
        if note.startswith("pair_count_total"):
            total = int(note.split("=")[1])
    return CodonPairTable(cps, total, provenance or str(path))


def write_cps_table(table: CodonPairTable, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# codon-pair scores ({table.provenance})\n")
        fh.write(f"# pair_count_total={table.pair_count_total}\n")
        for a in SENSE:
            for b in SENSE:
                fh.write(f"{a}\t{b}\t{table.cps[a, b]!r}\n")


@dataclass(frozen=True)
class CodonTables:
    """Everything the metric layer needs, bundled for passing around."""

    usage: CodonUsageTable
    adaptiveness: AdaptivenessTable
    tai: TaiWeightTable
    cps: CodonPairTable = field(default_factory=neutral_cps_table)

    @classmethod
    def load(cls, usage_path=None, tai_path=None, cps_path=None) -> "CodonTables":
        usage = load_usage_table(usage_path)
        cps = load_cps_table(cps_path) if cps_path else neutral_cps_table()
        return cls(usage, adaptiveness_from_usage(usage), load_tai_table(tai_path), cps)
