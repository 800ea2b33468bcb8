"""Command-line entry point: score, optimize, fold, seed, corpus build-cps."""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .codon_data import TableError, build_cps_table, load_usage_table, write_cps_table
from .config import RunConfig, apply_overrides, load_config
from .fasta import FastaError, format_fasta, parse_fasta, parse_fasta_text
from .folding import FoldingError, StructureError, format_fold_output
from .ga import ConfigError, fitness, import_population, normalize_metrics, run, seed_population
from .metrics import MetricConfig, MetricVector, evaluate_construct
from .report import csv_text, write_run
from .seq import Construct, ProteinSequence, SequenceError, translate, validate_cds

log = logging.getLogger("mrnaga")

EXPECTED_ERRORS = (ConfigError, SequenceError, FastaError, TableError, FoldingError, StructureError, OSError)


class CliError(Exception):
    pass


def _records(arg: str) -> list[tuple[str, str]]:
    """A literal sequence, a FASTA path, or '-' for FASTA/plain text on stdin."""
    if arg == "-":
        text = sys.stdin.read()
        if text.lstrip().startswith(">"):
            return parse_fasta_text(text, "<stdin>")
        return parse_fasta_text(">seq1\n" + text, "<stdin>")
    if os.path.isfile(arg):
        return parse_fasta(arg)
    return parse_fasta_text(">seq1\n" + arg, "<argument>")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    return apply_overrides(cfg, seed=getattr(args, "seed", None), backend=getattr(args, "backend", None),
                           out=getattr(args, "out", None), top_k=getattr(args, "top_k", None),
                           fold_command=getattr(args, "fold_command", None))


# ------------------------------------------------------------------ score

def cmd_score(args) -> int:
    cfg = _config(args)
    records = [(h, s.replace("U", "T")) for h, s in _records(args.input)]
    target = cfg.target or None
    bad = 0
    for header, seq in records:
        problems = validate_cds(seq, target)
        if problems:
            bad += 1
            print(f"{header}: invalid CDS: {', '.join(problems)}", file=sys.stderr)
    if bad:
        raise CliError(f"{bad} of {len(records)} record(s) failed validation")

    tables, folder = cfg.tables(), cfg.folder()
    mc = MetricConfig(cfg.upa_weight, cfg.window_radius, cfg.reference_cds() or records[0][1])
    names = MetricVector.names()
    rows = []
    for header, seq in records:
        ev = evaluate_construct(Construct(cfg.utr5, seq, cfg.utr3), tables, folder, mc)
        m = ev.metrics
        row = {"id": header.split()[0] if header else header, **m.as_dict()}
        row.update({f"norm_{k}": v for k, v in normalize_metrics(m, cfg.bands).items()})
        row["fitness"] = fitness(m, cfg.weights, cfg.bands)
        rows.append(row)

    cols = ["id"] + names + ["fitness"]
    print("\t".join(cols))
    for row in rows:
        print("\t".join(f"{row[c]:.6f}" if isinstance(row[c], float) else str(row[c]) for c in cols))
    if args.csv:
        norm = [k for k in rows[0] if k.startswith("norm_")]
        with open(args.csv, "w") as fh:
            fh.write(csv_text(["id"] + names + norm + ["fitness"], rows))
    return 0


# --------------------------------------------------------------- optimize

def cmd_optimize(args) -> int:
    cfg = _config(args)
    if args.workers is not None:
        cfg.workers = args.workers
    try:
        os.makedirs(cfg.out_dir, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {cfg.out_dir!r}: {exc.strerror}") from None
    if not os.access(cfg.out_dir, os.W_OK):
        raise CliError(f"output directory {cfg.out_dir!r} is not writable")
    problem = cfg.problem()
    initial = import_population(cfg.init_fasta, problem.target) if cfg.init_fasta else None

    def progress(g, pop, row):
        log.info("gen %3d  size %4d  best %.5f  mean %.5f  CAI %.4f  GC %.3f",
                 g, row.pop_size, row.fitness_max, row.fitness_mean, row.means["cai"], row.means["gc"])

    result = run(problem, cfg.ga, initial, workers=cfg.workers, top=cfg.top_k, on_generation=progress)
    out = write_run(cfg.out_dir, result, cfg.echo(), cfg.bands)
    best = result.top[0][0]
    print(f"{len(result.stats)} generation(s), stopped by {result.stop_reason}; "
          f"best fitness {best.fitness:.5f}; results in {out}")
    return 0


# ------------------------------------------------------------------- fold

def cmd_fold(args) -> int:
    cfg = _config(args)
    records = _records(args.sequence)
    folder = cfg.folder()
    for _, seq in records:
        sys.stdout.write(format_fold_output(folder.fold(seq)))
    return 0


# ------------------------------------------------------------------- seed

def cmd_seed(args) -> int:
    if os.path.isfile(args.target):
        target = parse_fasta(args.target, protein=True)[0][1]
    else:
        target = args.target
    target = ProteinSequence(target).residues
    usage = load_usage_table(args.usage)
    rng = np.random.default_rng([args.seed, 0])
    pop = seed_population(target, usage, args.n, rng)
    width = len(str(args.n))
    text = format_fasta([(f"seed{i:0{width}d}", ind.cds) for i, ind in enumerate(pop, 1)])
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ----------------------------------------------------------------- corpus

def cmd_build_cps(args) -> int:
    records = parse_fasta(args.corpus)
    corpus = []
    for header, seq in records:
        seq = seq.replace("U", "T")
        try:
            translate(seq)
        except SequenceError as exc:
            raise CliError(f"{header}: {exc}") from None
        corpus.append(seq)
    table = build_cps_table(corpus, args.pseudocount)
    write_cps_table(table, args.output)
    print(f"wrote {len(table.cps)} codon pairs from {len(corpus)} sequence(s) to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mrnaga", description="Codon-level mRNA sequence optimization.")
    ap.add_argument("-v", "--verbose", action="store_true", help="progress and diagnostics on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def backend_flags(p):
        p.add_argument("--config", help="key = value run configuration")
        p.add_argument("--backend", choices=["builtin", "external"])
        p.add_argument("--fold-command", help="external folding command (sequence on stdin)")

    p = sub.add_parser("score", help="compute metrics and fitness for sequences")
    p.add_argument("input", help="CDS, FASTA file of CDS, or '-' for stdin")
    backend_flags(p)
    p.add_argument("--csv", help="also write a CSV with normalized scores")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("optimize", help="run the genetic algorithm")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--backend", choices=["builtin", "external"])
    p.add_argument("--out", help="output directory")
    p.add_argument("--top-k", type=int)
    p.add_argument("--workers", type=int, help="evaluation processes")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("fold", help="fold a sequence; prints sequence and 'STRUCTURE (ENERGY)'")
    p.add_argument("sequence", help="sequence, FASTA file, or '-' for stdin")
    backend_flags(p)
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("seed", help="usage-weighted back-translations of a protein")
    p.add_argument("target", help="protein sequence or protein FASTA file")
    p.add_argument("-n", type=int, default=220, help="number of records (default 220)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--usage", help="codon usage table (default: bundled human table)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("corpus", help="reference-corpus utilities")
    csub = p.add_subparsers(dest="corpus_command", required=True)
    q = csub.add_parser("build-cps", help="codon-pair score table from a CDS corpus")
    q.add_argument("corpus", help="FASTA of coding sequences")
    q.add_argument("output")
    q.add_argument("--pseudocount", type=float, default=0.5)
    q.set_defaults(func=cmd_build_cps)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError, *EXPECTED_ERRORS) as exc:
        print(f"mrnaga: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
