import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrnaga.codon_data import (TableError, adaptiveness_from_usage, build_cps_table, count_codon_pairs,
                               load_cps_table, load_tai_table, load_usage_table, neutral_cps_table,
                               tai_weights_from_trna, usage_from_counts, write_cps_table)
from mrnaga.seq import STANDARD_CODE, SequenceError

import oracles

SENSE = oracles.SENSE


def _write_table(path, rows):
    path.write_text("# toy table\n" + "".join(f"{k}\t{v}\n" for k, v in rows.items()))
    return path


def _uniform_counts():
    return {c: 1.0 for c in SENSE}


def test_bundled_usage_table_families_sum_to_one():
    usage = load_usage_table()
    for aa, codons in STANDARD_CODE.synonym_families.items():
        assert math.isclose(sum(usage.freq[c] for c in codons), 1.0, abs_tol=1e-9), aa
    assert all(v > 0 for v in usage.freq.values())
    assert usage.provenance


def test_usage_pseudocount_smoothing():
    counts = _uniform_counts()
    counts.update(GCT=2, GCC=2, GCA=0, GCG=0)
    usage = usage_from_counts(counts, pseudocount=1)
    assert usage.freq["GCT"] == pytest.approx(0.375)
    assert usage.freq["GCA"] == pytest.approx(0.125)


def test_usage_zero_count_without_pseudocount_is_rejected():
    counts = _uniform_counts()
    counts["GCA"] = 0
    with pytest.raises(TableError):
        usage_from_counts(counts)


def test_usage_file_missing_codon(tmp_path):
    counts = _uniform_counts()
    del counts["GGG"]
    with pytest.raises(TableError, match="GGG"):
        load_usage_table(_write_table(tmp_path / "u.tsv", counts))


def test_usage_file_negative_and_garbage(tmp_path):
    counts = _uniform_counts()
    counts["GGG"] = -1
    with pytest.raises(TableError):
        load_usage_table(_write_table(tmp_path / "neg.tsv", counts))
    (tmp_path / "bad.tsv").write_text("GCT\tabc\n")
    with pytest.raises(TableError):
        load_usage_table(tmp_path / "bad.tsv")


def test_usage_file_accepts_rna_letters(tmp_path):
    rows = {c.replace("T", "U"): 1.0 for c in SENSE}
    usage = load_usage_table(_write_table(tmp_path / "rna.tsv", rows))
    assert usage.freq["GCT"] == pytest.approx(0.25)


def test_adaptiveness_examples():
    counts = _uniform_counts()
    # Ala: 0.5 / 0.25 / 0.25 / (tiny) -> 1, .5, .5
    counts.update(GCT=0.5, GCC=0.25, GCA=0.25, GCG=1e-12)
    w = adaptiveness_from_usage(usage_from_counts(counts)).w
    assert (w["GCT"], w["GCC"], w["GCA"]) == (1.0, 0.5, 0.5)
    assert w["ATG"] == 1.0
    assert all(w[c] == 1.0 for c in ("GGT", "GGC", "GGA", "GGG"))


def test_adaptiveness_family_max_is_exactly_one():
    w = adaptiveness_from_usage(load_usage_table()).w
    for codons in STANDARD_CODE.synonym_families.values():
        assert max(w[c] for c in codons) == 1.0
        assert all(0 < w[c] <= 1 for c in codons)


@settings(max_examples=50)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_adaptiveness_scale_invariant(k):
    rng = random.Random(7)
    counts = {c: rng.uniform(0.1, 50) for c in SENSE}
    scaled = dict(counts)
    for c in STANDARD_CODE.synonym_families["L"]:
        scaled[c] *= k
    a = adaptiveness_from_usage(usage_from_counts(counts)).w
    b = adaptiveness_from_usage(usage_from_counts(scaled)).w
    for c in SENSE:
        assert a[c] == pytest.approx(b[c], rel=1e-12)


def test_bundled_tai_max_is_one():
    s = load_tai_table().s
    assert max(s.values()) == 1.0
    assert len(s) == 61 and all(0 < v <= 1 for v in s.values())


def test_tai_renormalization_and_zero(tmp_path):
    rows = {c: 0.25 for c in SENSE}
    rows["GCT"] = 0.5
    t = load_tai_table(_write_table(tmp_path / "t.tsv", rows))
    assert t.s["GCT"] == 1.0 and t.s["GCC"] == 0.5
    rows["GCC"] = 0
    with pytest.raises(TableError):
        load_tai_table(_write_table(tmp_path / "z.tsv", rows))


def test_tai_from_trna_wobble_rules():
    # one tRNA decoding GCN: anticodon AGC (wobble A read as inosine) decodes GCT, GCC, GCA
    w = tai_weights_from_trna({"AGC": 10, "GCC": 10})
    assert w["GCT"] == pytest.approx(1.0)                 # GCT <- AGC (I:U)
    assert w["GCC"] == pytest.approx(1 - 0.28)            # GCC <- AGC (I:C)
    assert w["GCA"] == pytest.approx(1 - 0.9999)          # GCA <- AGC (I:A)
    assert w["GGC"] == pytest.approx(1.0)                 # GGC <- GCC (G:C)
    assert w["GGT"] == pytest.approx(1 - 0.41)            # GGT <- GCC (G:U)


TOY_CORPUS = ["ATGGCTGCCAAATAA", "ATGAAAGCTGCTTGA"]


def test_pair_counts_match_independent_counter():
    assert dict(count_codon_pairs(TOY_CORPUS)) == oracles.codon_pairs_by_hand(TOY_CORPUS)


def _cps_by_hand(corpus, pc):
    obs = oracles.codon_pairs_by_hand(corpus)
    n = {(a, b): obs.get((a, b), 0) + pc for a in SENSE for b in SENSE}
    aa = oracles.CODON_TABLE
    na = {c: sum(n[c, b] for b in SENSE) for c in SENSE}
    nb = {c: sum(n[a, c] for a in SENSE) for c in SENSE}
    nx = {}
    ny = {}
    nxy = {}
    for (a, b), v in n.items():
        nxy[aa[a], aa[b]] = nxy.get((aa[a], aa[b]), 0) + v
    for c in SENSE:
        nx[aa[c]] = nx.get(aa[c], 0) + na[c]
        ny[aa[c]] = ny.get(aa[c], 0) + nb[c]

    def cps(a, b):
        return math.log(n[a, b] / (na[a] / nx[aa[a]] * nb[b] / ny[aa[b]] * nxy[aa[a], aa[b]]))
    return cps


def test_cps_toy_corpus_against_hand_formula():
    table = build_cps_table(TOY_CORPUS, pseudocount=0.5)
    hand = _cps_by_hand(TOY_CORPUS, 0.5)
    for pair in [("GCT", "GCC"), ("AAA", "GCT"), ("GCT", "GCT"), ("TTT", "GGG"), ("ATG", "AAA")]:
        assert table.cps[pair] == pytest.approx(hand(*pair), abs=1e-12)
    # frozen value of the hand formula for the observed pair GCT-GCC
    assert table.cps["GCT", "GCC"] == pytest.approx(0.8362480242006185, abs=1e-12)
    assert len(table.cps) == 61 * 61
    assert table.pair_count_total == 6


def test_cps_expected_frequency_corpus_is_zero():
    table = build_cps_table([oracles.eulerian_pair_corpus()], pseudocount=0.5)
    assert max(abs(v) for v in table.cps.values()) < 1e-9


def test_cps_order_invariant():
    a = build_cps_table(TOY_CORPUS)
    b = build_cps_table(TOY_CORPUS[::-1])
    assert a.cps == b.cps


def test_cps_errors():
    with pytest.raises(TableError):
        build_cps_table([])
    with pytest.raises(SequenceError):
        build_cps_table(["ATGTAAGCTTAA"])


def test_cps_file_round_trip(tmp_path):
    table = build_cps_table(TOY_CORPUS)
    write_cps_table(table, tmp_path / "cps.tsv")
    back = load_cps_table(tmp_path / "cps.tsv")
    assert back.cps == table.cps
    assert back.pair_count_total == table.pair_count_total


def test_cps_file_missing_pair(tmp_path):
    write_cps_table(neutral_cps_table(), tmp_path / "cps.tsv")
    lines = (tmp_path / "cps.tsv").read_text().splitlines()
    (tmp_path / "short.tsv").write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(TableError, match="missing"):
        load_cps_table(tmp_path / "short.tsv")
