"""Raw per-construct metrics: codon usage, codon pairs, composition, immunogenic motifs, structure."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional

from .codon_data import AdaptivenessTable, CodonPairTable, CodonTables, TaiWeightTable
from .folding import SecondaryStructure, count_motifs, paired_fraction, window_around_start
from .seq import STANDARD_CODE, Construct, _as_bases

LOG_FLOOR = 1e-9
CAI_EXCLUDED = frozenset({"ATG", "TGG"})


@dataclass(frozen=True)
class MetricVector:
    cai: float
    tai: float
    cpb_raw: float
    gc: float
    immune_raw: float
    unpaired30: float
    mfe_global: float
    mfe_local: float
    utr_balance: float
    motif_total: int
    embed_sim: float

    def __post_init__(self):
        for name in ("cai", "tai", "gc", "unpaired30", "utr_balance", "embed_sim"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.immune_raw < 0 or self.motif_total < 0:
            raise ValueError("negative count metric")

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


def _sense_codons(cds) -> list[str]:
    s = _as_bases(cds)
    codons = [s[i:i + 3] for i in range(0, len(s) - 2, 3)]
    if codons and STANDARD_CODE.is_stop(codons[-1]):
        codons = codons[:-1]
    return codons


def _geo_mean(values) -> float:
    values = list(values)
    return math.exp(sum(math.log(max(v, LOG_FLOOR)) for v in values) / len(values))


def cai(cds, w: AdaptivenessTable) -> float:
    """Geometric mean relative adaptiveness, skipping ATG, TGG and the stop."""
    codons = [c for c in _sense_codons(cds) if c not in CAI_EXCLUDED]
    if not codons:
        raise ValueError("CDS has no codons from multi-codon families")
    return min(1.0, _geo_mean(w.w[c] for c in codons))


def tai(cds, s: TaiWeightTable) -> float:
    codons = _sense_codons(cds)
    if not codons:
        raise ValueError("CDS has no sense codons")
    return min(1.0, _geo_mean(s.s[c] for c in codons))


def codon_pair_bias(cds, table: CodonPairTable) -> float:
    codons = _sense_codons(cds)
    if len(codons) < 2:
        raise ValueError("codon-pair bias needs at least two sense codons")
    return sum(table.cps[a, b] for a, b in zip(codons, codons[1:])) / (len(codons) - 1)


def gc_content(seq) -> float:
    s = _as_bases(seq)
    return (s.count("G") + s.count("C")) / len(s)


def _count_overlapping(s: str, motif: str) -> int:
    return sum(1 for i in range(len(s) - 1) if s.startswith(motif, i))


def immune_score(construct, upa_weight: float = 1.0) -> float:
    """CpG count plus ``upa_weight`` x UpA count over the whole transcript."""
    s = construct.transcript if isinstance(construct, Construct) else _as_bases(construct)
    return _count_overlapping(s, "CG") + upa_weight * _count_overlapping(s, "TA")


def immune_motif_count(construct) -> int:
    return int(immune_score(construct, 1.0))


def unpaired_fraction(structure: SecondaryStructure) -> float:
    return 1.0 - paired_fraction(structure)


def unpaired30(construct: Construct, folder, radius: int = 30) -> float:
    window, _ = window_around_start(construct, radius)
    return unpaired_fraction(folder.fold(window))


def utr_balance(construct: Construct, global_structure) -> float:
    """Paired fraction over the pooled 5' and 3' UTR positions of the global fold."""
    db = global_structure.dot_bracket if isinstance(global_structure, SecondaryStructure) else global_structure
    n5, n3 = len(construct.utr5), len(construct.utr3)
    if n5 + n3 == 0:
        warnings.warn("construct has no UTR bases; utr_balance set to 0", stacklevel=2)
        return 0.0
    utr = db[:n5] + db[len(db) - n3:]
    return (len(utr) - utr.count(".")) / len(utr)


def codon_vector(cds) -> list[int]:
    counts = dict.fromkeys(STANDARD_CODE.sense_codons, 0)
    for c in _sense_codons(cds):
        counts[c] += 1
    return list(counts.values())


def codon_cosine(a, b) -> float:
    """Cosine similarity of 61-dim codon-count vectors."""
    u, v = codon_vector(a), codon_vector(b)
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(x * x for x in v))
    if nu == 0 or nv == 0:
        raise ValueError("empty codon vector")
    if u == v:
        return 1.0
    return min(1.0, sum(x * y for x, y in zip(u, v)) / (nu * nv))


def embed_similarity(candidate, reference, scorer: Optional[Callable] = None) -> float:
    return (scorer or codon_cosine)(candidate, reference)


@dataclass(frozen=True)
class MetricConfig:
    upa_weight: float = 1.0
    window_radius: int = 30
    reference_cds: Optional[str] = None


@dataclass(frozen=True)
class Evaluation:
    """Metrics plus the structures they were computed from."""

    metrics: MetricVector
    global_structure: SecondaryStructure
    window_structure: SecondaryStructure
    window: tuple


def evaluate_construct(construct: Construct, tables: CodonTables, folder,
                       config: MetricConfig = MetricConfig(), scorer=None) -> Evaluation:
    full = folder.fold(construct.transcript)
    window_seq, coords = window_around_start(construct, config.window_radius)
    local = folder.fold(window_seq)
    reference = config.reference_cds or construct.cds
    mv = MetricVector(
        cai=cai(construct.cds, tables.adaptiveness),
        tai=tai(construct.cds, tables.tai),
        cpb_raw=codon_pair_bias(construct.cds, tables.cps),
        gc=gc_content(construct.cds),
        immune_raw=immune_score(construct, config.upa_weight),
        unpaired30=unpaired_fraction(local),
        mfe_global=full.energy,
        mfe_local=local.energy,
        utr_balance=utr_balance(construct, full),
        motif_total=count_motifs(full)["total"],
        embed_sim=embed_similarity(construct.cds, reference, scorer),
    )
    return Evaluation(mv, full, local, coords)


def evaluate_all(construct: Construct, tables: CodonTables, folder,
                 config: MetricConfig = MetricConfig(), scorer=None) -> MetricVector:
    return evaluate_construct(construct, tables, folder, config, scorer).metrics
