from .energy import EnergyModel, eval_energy, load_energy_model
from .fold import (
    KERNEL_BACKEND,
    BuiltinFolder,
    ExternalFolder,
    FoldingError,
    default_model,
    fold_external,
    fold_mfe,
    fold_nussinov,
    format_fold_output,
    parse_fold_output,
    split_structure_line,
)
from .structure import (
    SecondaryStructure,
    StructureError,
    check_pairs,
    count_motifs,
    paired_fraction,
    parse_dot_bracket,
    window_around_start,
)
