"""Independent reference implementations used as test oracles.

Nothing here imports the package's algorithms; the energy oracle reads the
bundled parameter file directly.
"""
import itertools
import json
import math
from functools import lru_cache
from pathlib import Path

ENERGY_FILE = Path(__file__).resolve().parents[1] / "src" / "mrnaga" / "data" / "energy_reduced.json"

PAIRS = {"AU", "UA", "GC", "CG", "GU", "UG"}
HAIRPIN_MIN = 3

_BASES = "TCAG"
_AAS = "FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG"
CODON_TABLE = {a + b + c: aa for (a, b, c), aa in zip(itertools.product(_BASES, repeat=3), _AAS)}
SENSE = sorted(c for c, aa in CODON_TABLE.items() if aa != "*")


def translate(cds):
    """Residues up to (not including) the first stop, and whether a stop was met."""
    out = []
    for i in range(0, len(cds), 3):
        aa = CODON_TABLE[cds[i:i + 3]]
        if aa == "*":
            return "".join(out), True
        out.append(aa)
    return "".join(out), False


def _rna(s):
    return s.upper().replace("T", "U")


# ------------------------------------------------------------ structures

def enumerate_structures(seq, hairpin_min=HAIRPIN_MIN):
    """Every pseudoknot-free set of allowed pairs, as tuples of (i, j)."""
    s = _rna(seq)

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i >= j:
            return [()]
        out = list(rec(i + 1, j))                   # i unpaired
        for k in range(i + hairpin_min + 1, j + 1):
            if s[i] + s[k] in PAIRS:
                for inner in rec(i + 1, k - 1):
                    for rest in rec(k + 1, j):
                        out.append(((i, k),) + inner + rest)
        return out

    return rec(0, len(s) - 1)


def max_pairs(seq, hairpin_min=HAIRPIN_MIN):
    return max(len(p) for p in enumerate_structures(seq, hairpin_min))


class ReducedEnergy:
    """The bundled nearest-neighbour parameters, evaluated loop by loop (dcal/mol)."""

    def __init__(self, path=ENERGY_FILE):
        raw = json.loads(Path(path).read_text())
        self.raw = raw
        self.stack = raw["stack"]

    def hairpin(self, size):
        tab = self.raw["hairpin"]
        if size < HAIRPIN_MIN:
            return None
        if size < len(tab):
            return tab[size]
        last = len(tab) - 1
        return tab[last] + round(self.raw["loop_extrapolation"] * math.log(size / last))

    def two_pair_loop(self, outer, inner, l1, l2):
        if l1 + l2 > self.raw["max_loop"]:
            return None
        st = self.stack[f"{outer}/{inner}"]
        if l1 == 0 and l2 == 0:
            return st
        if l1 == 0 or l2 == 0:
            e = self.raw["bulge"][l1 + l2]
            return e + st if l1 + l2 == 1 else e
        asym = min(self.raw["ninio_max"], self.raw["ninio"] * abs(l1 - l2))
        return self.raw["interior"][l1 + l2] + asym

    def energy(self, seq, pairs):
        """Total energy or None when a loop is forbidden."""
        s = _rna(seq)
        partner = {}
        for i, j in pairs:
            partner[i], partner[j] = j, i
        total = 0
        for i, j in pairs:
            branches, unpaired, x = [], 0, i + 1
            while x < j:
                if x in partner and partner[x] > x:
                    branches.append((x, partner[x]))
                    x = partner[x] + 1
                else:
                    unpaired += 1
                    x += 1
            if not branches:
                e = self.hairpin(j - i - 1)
            elif len(branches) == 1:
                p, q = branches[0]
                e = self.two_pair_loop(s[i] + s[j], s[p] + s[q], p - i - 1, j - q - 1)
            else:
                e = (self.raw["ml_closing"] + self.raw["ml_branch"] * (len(branches) + 1)
                     + self.raw["ml_unpaired"] * unpaired)
            if e is None:
                return None
            total += e
        return total

    def min_energy(self, seq):
        """Exhaustive minimum over all structures (the open chain scores 0)."""
        best = 0
        for pairs in enumerate_structures(seq):
            e = self.energy(seq, pairs)
            if e is not None and e < best:
                best = e
        return best


# --------------------------------------------------------------- metrics

def geo_mean_log(values, floor=1e-9):
    values = list(values)
    return math.exp(math.fsum(math.log(max(v, floor)) for v in values) / len(values))


def cai_by_hand(cds, counts):
    """Sharp-Li CAI straight from raw per-codon counts (no pseudocounts)."""
    fam = {}
    for c, aa in CODON_TABLE.items():
        if aa != "*":
            fam.setdefault(aa, []).append(c)
    w = {}
    for aa, codons in fam.items():
        top = max(counts[c] for c in codons)
        for c in codons:
            w[c] = counts[c] / top
    codons = [cds[i:i + 3] for i in range(0, len(cds) - 3, 3)]
    return geo_mean_log(w[c] for c in codons if c not in ("ATG", "TGG"))


def tai_by_hand(cds, weights):
    top = max(weights.values())
    codons = [cds[i:i + 3] for i in range(0, len(cds) - 3, 3)]
    return geo_mean_log(weights[c] / top for c in codons)


def dinucleotide_scan(seq, upa_weight=1.0):
    cg = ta = 0
    for i in range(len(seq) - 1):
        d = seq[i:i + 2]
        if d == "CG":
            cg += 1
        elif d == "TA":
            ta += 1
    return cg + upa_weight * ta


def codon_pairs_by_hand(corpus):
    counts = {}
    for seq in corpus:
        codons = [seq[i:i + 3] for i in range(0, len(seq), 3)]
        if CODON_TABLE[codons[-1]] == "*":
            codons = codons[:-1]
        for a, b in zip(codons, codons[1:]):
            counts[a, b] = counts.get((a, b), 0) + 1
    return counts


def eulerian_pair_corpus():
    """One CDS body in which every ordered sense-codon pair occurs exactly once.

    Built as an Eulerian circuit of the complete directed graph (with loops)
    on the 61 sense codons, so observed pair frequencies equal the
    independence expectation everywhere.
    """
    out_edges = {c: list(SENSE) for c in SENSE}
    stack, circuit = [SENSE[0]], []
    while stack:
        v = stack[-1]
        if out_edges[v]:
            stack.append(out_edges[v].pop())
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    assert len(circuit) == len(SENSE) ** 2 + 1
    return "".join(circuit)
