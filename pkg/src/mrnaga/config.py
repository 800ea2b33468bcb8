"""Run configuration: a flat ``key = value`` text file.

Blank lines and lines starting with '#' are ignored. Unknown keys, repeated
keys and unparsable values are errors. Relative paths are resolved against
the directory holding the config file.

Keys
  target            literal protein sequence (starting with M)
  target_fasta      FASTA file whose first record is the target protein
  utr5, utr3        fixed flanking UTR sequences (default empty)
  pop_init, pop_cap, growth_step, mutation_rate, per_codon_rate,
  crossover_rate, tournament_size, elitism, plateau_eps, plateau_window,
  max_generations   GA settings
  seed              RNG seed (default 0)
  weight_<name>     fitness weight for cai, tai, cpb, mfe_global, unpaired30,
                    gc, immune, utr_balance, motif, embed; given values
                    replace the defaults and the full set must sum to 1
  gc_lo, gc_hi, gc_halfwidth, mfe_lo, mfe_hi, mfe_halfwidth, immune_max,
  motif_lo, motif_hi, motif_halfwidth, utr_lo, utr_hi, utr_halfwidth,
  cpb_scale         normalization bands
  upa_weight        weight of UpA relative to CpG in the immune score
  window_radius     half-width of the start-codon window (default 30)
  usage_table, tai_table, cps_table, energy_model
                    data files (bundled defaults when absent)
  reference_fasta   reference CDS for the embedding similarity
  init_fasta        initial population to import
  backend           builtin | external
  fold_command      command line of the external engine
  fold_timeout      seconds per external fold (default 600)
  max_fold_length   length limit of the built-in folder (default 2000)
  workers           evaluation processes (default 1)
  out_dir           output directory for optimize (default "results")
  top_k             candidates to report (default 10)
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .codon_data import CodonTables
from .fasta import parse_fasta
from .folding import BuiltinFolder, ExternalFolder, default_model, load_energy_model
from .folding.fold import DEFAULT_MAX_LENGTH
from .ga import DEFAULT_WEIGHTS, METRIC_KEYS, Bands, ConfigError, FitnessWeights, GaConfig, Problem
from .metrics import MetricConfig
from .seq import DNA_ALPHABET, ProteinSequence, SequenceError

_GA_KEYS = {f.name: f.type for f in fields(GaConfig) if f.name != "rng_seed"}
_BAND_KEYS = [f.name for f in fields(Bands)]
_PATH_KEYS = ("target_fasta", "usage_table", "tai_table", "cps_table", "energy_model",
              "reference_fasta", "init_fasta")


@dataclass
class RunConfig:
    target: str = ""
    utr5: str = ""
    utr3: str = ""
    ga: GaConfig = field(default_factory=GaConfig)
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    bands: Bands = field(default_factory=Bands)
    upa_weight: float = 1.0
    window_radius: int = 30
    usage_table: Optional[str] = None
    tai_table: Optional[str] = None
    cps_table: Optional[str] = None
    energy_model: Optional[str] = None
    reference_fasta: Optional[str] = None
    init_fasta: Optional[str] = None
    backend: str = "builtin"
    fold_command: Optional[str] = None
    fold_timeout: float = 600.0
    max_fold_length: int = DEFAULT_MAX_LENGTH
    workers: int = 1
    out_dir: str = "results"
    top_k: int = 10

    def __post_init__(self):
        if self.backend not in ("builtin", "external"):
            raise ConfigError(f"backend must be 'builtin' or 'external', not {self.backend!r}")
        if self.backend == "external" and not self.fold_command:
            raise ConfigError("backend 'external' needs fold_command")
        if self.workers < 1 or self.top_k < 1 or self.window_radius < 1:
            raise ConfigError("workers, top_k and window_radius must be >= 1")
        for name in ("utr5", "utr3"):
            setattr(self, name, _nucleotides(getattr(self, name), name))

    def folder(self):
        if self.backend == "external":
            return ExternalFolder(self.fold_command, self.fold_timeout)
        model = load_energy_model(self.energy_model) if self.energy_model else default_model()
        return BuiltinFolder(model, self.max_fold_length)

    def tables(self) -> CodonTables:
        return CodonTables.load(self.usage_table, self.tai_table, self.cps_table)

    def reference_cds(self) -> Optional[str]:
        if not self.reference_fasta:
            return None
        return parse_fasta(self.reference_fasta)[0][1].replace("U", "T")

    def problem(self, tables: Optional[CodonTables] = None) -> Problem:
        if not self.target:
            raise ConfigError("no target protein configured (target or target_fasta)")
        mc = MetricConfig(self.upa_weight, self.window_radius, self.reference_cds())
        return Problem(self.target, tables or self.tables(), self.folder(), self.utr5, self.utr3,
                       self.weights, self.bands, mc)

    def echo(self) -> dict:
        """Plain-dict view for reports."""
        out = {k: getattr(self, k) for k in ("target", "utr5", "utr3", "upa_weight", "window_radius",
                                             *_PATH_KEYS[1:], "backend", "fold_command",
                                             "max_fold_length", "top_k")}
        out["ga"] = {f.name: getattr(self.ga, f.name) for f in fields(GaConfig)}
        out["weights"] = dict(self.weights.w)
        out["bands"] = {k: getattr(self.bands, k) for k in _BAND_KEYS}
        return out


def _nucleotides(s: str, what: str) -> str:
    s = "".join(s.split()).upper().replace("U", "T")
    bad = sorted(set(s) - DNA_ALPHABET)
    if bad:
        raise ConfigError(f"{what}: illegal character(s) {''.join(bad)!r}")
    return s


def _convert(key: str, raw: str, typ):
    try:
        if typ in (int, "int"):
            return int(raw)
        if typ in (float, "float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {getattr(typ, '__name__', typ)}") from None
    return raw


def read_pairs(text: str, source: str = "<config>") -> dict:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if key in pairs:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def build_config(pairs: dict, base_dir=".") -> RunConfig:
    pairs = dict(pairs)
    base = Path(base_dir)
    kw, ga_kw, band_kw, weights = {}, {}, {}, dict(DEFAULT_WEIGHTS)
    for key, raw in pairs.items():
        if key in _GA_KEYS:
            ga_kw[key] = _convert(key, raw, _GA_KEYS[key])
        elif key == "seed":
            ga_kw["rng_seed"] = _convert(key, raw, int)
        elif key.startswith("weight_") and key[7:] in METRIC_KEYS:
            weights[key[7:]] = _convert(key, raw, float)
        elif key in _BAND_KEYS:
            band_kw[key] = _convert(key, raw, float)
        elif key in _PATH_KEYS:
            path = base / raw
            if not path.is_file():
                raise ConfigError(f"{key}: no such file {str(path)!r}")
            kw[key] = str(path)
        elif key in ("upa_weight", "fold_timeout"):
            kw[key] = _convert(key, raw, float)
        elif key in ("window_radius", "max_fold_length", "workers", "top_k"):
            kw[key] = _convert(key, raw, int)
        elif key in ("target", "utr5", "utr3", "backend", "fold_command", "out_dir"):
            kw[key] = raw
        else:
            raise ConfigError(f"unknown config key {key!r}")

    if "target" in kw and "target_fasta" in kw:
        raise ConfigError("give either target or target_fasta, not both")
    if "target_fasta" in kw:
        records = parse_fasta(kw.pop("target_fasta"), protein=True)
        kw["target"] = records[0][1]
    if kw.get("target"):
        try:
            kw["target"] = ProteinSequence(kw["target"]).residues
        except SequenceError as exc:
            raise ConfigError(f"target: {exc}") from None
    if "out_dir" in kw:
        kw["out_dir"] = str(base / kw["out_dir"])
    return RunConfig(ga=GaConfig(**ga_kw), weights=FitnessWeights(weights), bands=Bands(**band_kw), **kw)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return build_config(read_pairs(text, str(path)), path.parent)


def apply_overrides(cfg: RunConfig, seed=None, backend=None, out=None, top_k=None,
                    fold_command=None) -> RunConfig:
    """Command-line flags take precedence over the file."""
    if fold_command is not None:
        cfg = replace(cfg, fold_command=fold_command)
    if seed is not None:
        cfg = replace(cfg, ga=replace(cfg.ga, rng_seed=seed))
    if backend is not None:
        cfg = replace(cfg, backend=backend)
    if out is not None:
        cfg = replace(cfg, out_dir=out)
    if top_k is not None:
        cfg = replace(cfg, top_k=top_k)
    return cfg
