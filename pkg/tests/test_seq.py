import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrnaga.seq import (STANDARD_CODE, Construct, NucleicSequence, ProteinSequence, SequenceError,
                        synonymous_codons, to_dna, to_rna, translate, validate_cds)

import oracles


def test_genetic_code_shape():
    assert len(STANDARD_CODE.table) == 64
    assert len(STANDARD_CODE.sense_codons) == 61
    assert set(STANDARD_CODE.stops) == {"TAA", "TAG", "TGA"}
    members = [c for fam in STANDARD_CODE.synonym_families.values() for c in fam]
    assert sorted(members) == sorted(STANDARD_CODE.sense_codons)
    assert dict(STANDARD_CODE.table) == oracles.CODON_TABLE


@pytest.mark.parametrize("cds, protein, stop", [
    ("ATG", "M", False),
    ("ATGGCTTAA", "MA", True),
    ("ATGTAAGGG", "M", True),
])
def test_translate_examples(cds, protein, stop):
    assert translate(cds) == (protein, stop)


def test_translate_errors():
    with pytest.raises(SequenceError):
        translate("ATGG")
    with pytest.raises(SequenceError):
        translate("ATGNNN")


def test_translate_accepts_lowercase_and_rna():
    assert translate(NucleicSequence.parse("augGCUuaa")) == ("MA", True)


@pytest.mark.parametrize("cds, target, rules", [
    ("ATGGCTTAA", "MA", []),
    ("ATGTAAGCTTAA", "MA", ["internal stop"]),
    ("GCTATGTAA", "M", ["starts-with-ATG", "translation mismatch"]),
    ("ATGGCT", "MA", ["terminal stop"]),
    ("ATGGCTTA", "MA", ["length%3", "terminal stop"]),
])
def test_validate_examples(cds, target, rules):
    assert validate_cds(cds, target) == rules


def _rules_by_hand(cds, target):
    out = []
    if len(cds) % 3:
        return ["length%3"]
    codons = [cds[i:i + 3] for i in range(0, len(cds), 3)]
    if not codons or codons[0] != "ATG":
        out.append("starts-with-ATG")
    aas = [oracles.CODON_TABLE[c] for c in codons]
    if "*" in aas[:-1]:
        out.append("internal stop")
    if not aas or aas[-1] != "*":
        out.append("terminal stop")
    body = "".join(a for a in aas if a != "*")
    if body != target:
        out.append("translation mismatch")
    return out


def test_validate_exhaustive_small_cases():
    # every CDS of up to 3 codons over a small codon alphabet, against two targets
    alphabet = ["ATG", "GCT", "TAA", "TGG"]
    for n in range(1, 4):
        for codons in itertools.product(alphabet, repeat=n):
            cds = "".join(codons)
            for target in ("MA", "M"):
                got = validate_cds(cds, target)
                expected = _rules_by_hand(cds, target)
                assert bool(got) == bool(expected), (cds, target, got, expected)
                assert set(got) <= {"length%3", "starts-with-ATG", "internal stop", "terminal stop",
                                    "translation mismatch"}


@pytest.mark.parametrize("codon, family", [
    ("ATG", {"ATG"}),
    ("GCT", {"GCT", "GCC", "GCA", "GCG"}),
    ("TGG", {"TGG"}),
])
def test_synonymous_codons(codon, family):
    assert set(synonymous_codons(codon)) == family


def test_synonymous_codons_rejects_stop():
    with pytest.raises(SequenceError):
        synonymous_codons("TAA")


def test_rna_dna_conversion():
    assert to_rna(NucleicSequence("ATGT")).rendered() == "AUGU"
    assert to_dna(NucleicSequence.parse("AUG")).rendered() == "ATG"


@given(st.text(alphabet="ACGT", min_size=1, max_size=80))
def test_rna_round_trip(s):
    x = NucleicSequence(s)
    assert to_dna(to_rna(x)) == x
    assert to_rna(x).rendered() == s.replace("T", "U")


def test_nucleic_rejects_ambiguity_and_empty():
    for bad in ("ATGN", "ATGR", "", "AT-G"):
        with pytest.raises(SequenceError):
            NucleicSequence(bad)
    with pytest.raises(SequenceError):
        NucleicSequence.parse("AUGT")


def test_protein_rejects_internal_stop():
    assert ProteinSequence("MA*").residues == "MA"
    with pytest.raises(SequenceError):
        ProteinSequence("M*A")
    with pytest.raises(SequenceError):
        ProteinSequence("MAB")


def test_construct_rules():
    c = Construct("GGG", "ATGGCTTAA", "CC")
    assert c.transcript == "GGGATGGCTTAACC"
    assert c.cds_start == 3
    with pytest.raises(SequenceError):
        Construct("", "ATGTAAGCTTAA", "")
    with pytest.raises(SequenceError):
        Construct("", "ATGGCT", "")


_sense = [c for c in oracles.SENSE if c != "ATG"]


@settings(max_examples=200)
@given(st.lists(st.sampled_from(_sense), min_size=1, max_size=40), st.data())
def test_synonymous_substitution_preserves_translation(body, data):
    cds = "ATG" + "".join(body) + "TAA"
    codons = [cds[i:i + 3] for i in range(0, len(cds), 3)]
    for pos in range(1, len(codons) - 1):
        codons[pos] = data.draw(st.sampled_from(sorted(synonymous_codons(codons[pos]))))
    assert translate("".join(codons)) == translate(cds)
