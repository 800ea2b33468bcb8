"""Result files written by ``optimize`` and ``score``.

generations.csv  one row per executed generation (GENERATION_COLUMNS)
report.json      config echo, stats series and the top-K entries
topk.fasta       top-K CDS, fitness descending
dbn/*.dbn        global and start-window structures per top-K candidate
radar.csv        normalized metric axes plus fitness per top-K candidate
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .fasta import write_fasta
from .folding import format_fold_output
from .ga import METRIC_KEYS, Bands, FitnessWeights, RunResult, fitness, normalize_metrics
from .metrics import MetricVector

GENERATION_COLUMNS = (["generation", "pop_size", "fitness_mean", "fitness_max", "fitness_min"]
                      + [f"mean_{k}" for k in MetricVector.names()] + ["mean_immune_motifs"])
RADAR_COLUMNS = ["id"] + list(METRIC_KEYS) + ["fitness"]


def _cell(v) -> str:
    # repr keeps floats exact and locale-free
    return repr(float(v)) if isinstance(v, float) else str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def candidate_id(rank: int) -> str:
    return f"cand{rank:02d}"


def top_entries(result: RunResult, bands: Bands) -> list[dict]:
    out = []
    for rank, (ind, ev) in enumerate(result.top, 1):
        g, w = ev.global_structure, ev.window_structure
        out.append({
            "id": candidate_id(rank),
            "rank": rank,
            "cds": ind.cds,
            "fitness": ind.fitness,
            "metrics": ev.metrics.as_dict(),
            "normalized": normalize_metrics(ev.metrics, bands),
            "structure_global": g.dot_bracket,
            "energy_global": g.energy,
            "structure_window": w.dot_bracket,
            "energy_window": w.energy,
            "window": list(ev.window),
        })
    return out


def build_report(result: RunResult, config_echo: dict, bands: Bands) -> dict:
    return {
        "config": config_echo,
        "stop_reason": result.stop_reason,
        "generations": len(result.stats),
        "initial_best_fitness": result.initial_best,
        "stats": [s.row() for s in result.stats],
        "top": top_entries(result, bands),
    }


def recompute_fitness(entry: dict, weights: FitnessWeights, bands: Bands) -> float:
    return fitness(MetricVector(**entry["metrics"]), weights, bands)


def write_run(out_dir, result: RunResult, config_echo: dict, bands: Bands) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "dbn").mkdir(exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {str(out)!r}: {exc.strerror}") from None
    report = build_report(result, config_echo, bands)
    (out / "generations.csv").write_text(csv_text(GENERATION_COLUMNS, report["stats"]))
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    write_fasta([(f"{e['id']} fitness={e['fitness']!r}", e["cds"]) for e in report["top"]],
                out / "topk.fasta")
    radar = []
    for (ind, ev), e in zip(result.top, report["top"]):
        (out / "dbn" / f"{e['id']}_global.dbn").write_text(format_fold_output(ev.global_structure))
        (out / "dbn" / f"{e['id']}_window.dbn").write_text(format_fold_output(ev.window_structure))
        radar.append({"id": e["id"], **e["normalized"], "fitness": e["fitness"]})
    (out / "radar.csv").write_text(csv_text(RADAR_COLUMNS, radar))
    return out
