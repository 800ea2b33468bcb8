"""Secondary-structure prediction: Nussinov pair maximisation, MFE folding, external engines."""
from __future__ import annotations

import logging
import os
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels_py
from .energy import INF, PTYPE, EnergyModel, encode, load_energy_model
from .structure import SecondaryStructure, StructureError, parse_dot_bracket, to_dot_bracket

log = logging.getLogger(__name__)

if os.environ.get("MRNAGA_PURE_PYTHON"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _kernels_py

KERNEL_BACKEND = "python" if kernels is _kernels_py else "compiled"

DEFAULT_MAX_LENGTH = 2000


class FoldingError(RuntimeError):
    pass


def _rna(seq) -> str:
    s = seq.bases if hasattr(seq, "bases") else "".join(str(seq).split())
    return s.upper().replace("T", "U")


def fold_nussinov(seq, hairpin_min: int = 3, kernel=None) -> SecondaryStructure:
    """Maximise the number of AU/GC/GU pairs with ``j - i > hairpin_min``.

    Traceback preference at each (i, j): pair i with j, then pair i with
    the smallest feasible partner k < j, then leave i unpaired.
    """
    s = _rna(seq)
    n = len(s)
    if n == 0:
        raise FoldingError("empty sequence")
    codes = encode(s)
    N = (kernel or kernels).fill_nussinov(codes, PTYPE, hairpin_min).tolist()

    def get(a, b):
        return N[a][b] if a < b else 0

    pairs = []
    todo = [(0, n - 1)]
    while todo:
        i, j = todo.pop()
        if j - i <= hairpin_min or N[i][j] == 0:
            continue
        val = N[i][j]
        if PTYPE[codes[i], codes[j]] and 1 + get(i + 1, j - 1) == val:
            pairs.append((i, j))
            todo.append((i + 1, j - 1))
            continue
        for k in range(i + hairpin_min + 1, j):
            if PTYPE[codes[i], codes[k]] and 1 + get(i + 1, k - 1) + get(k + 1, j) == val:
                pairs.append((i, k))
                todo.extend([(k + 1, j), (i + 1, k - 1)])
                break
        else:
            todo.append((i + 1, j))
    return SecondaryStructure(s, to_dot_bracket(pairs, n), energy=None, pair_count=len(pairs))


def _mfe_arrays(codes, model: EnergyModel, kernel):
    bulge, interior = model.loop_arrays()
    return kernel.fill_mfe(
        codes, PTYPE, model.stack, model.hairpin_array(len(codes)), bulge, interior,
        model.ninio, model.ninio_max, model.ml_closing, model.ml_branch, model.ml_unpaired,
        model.max_loop, model.hairpin_min)


def fold_mfe(seq, model: Optional[EnergyModel] = None, max_length: Optional[int] = DEFAULT_MAX_LENGTH,
             kernel=None) -> SecondaryStructure:
    """Minimum free energy structure under ``model`` (kcal/mol).

    Traceback preference: pair the current base over leaving it unpaired,
    smaller partners first; inside a pair, hairpin, then stacks and interior
    loops (inner 5' base ascending, inner 3' base descending), then multiloop
    splits ascending. Within a multiloop, branches are placed 3' end first,
    the branch start ascending, unpaired 5' flank before a further split.
    """
    model = model or default_model()
    s = _rna(seq)
    n = len(s)
    if n == 0:
        raise FoldingError("empty sequence")
    if max_length is not None and n > max_length:
        raise FoldingError(f"sequence of {n} nt exceeds the built-in folding limit of {max_length} nt; "
                           "use the external engine or raise max_length")
    codes = encode(s)
    V_arr, WM_arr, F_arr = _mfe_arrays(codes, model, kernel or kernels)
    V, WM = memoryview(V_arr), memoryview(WM_arr)
    F = F_arr.tolist()
    c = codes.tolist()
    pt = PTYPE.tolist()
    hmin = model.hairpin_min
    mlc, mlb, mlu = model.ml_closing, model.ml_branch, model.ml_unpaired

    pairs = []
    todo = []
    i = 0
    while i < n:
        # first partner k with V(i, k) + F(k + 1) == F(i)
        hits = np.flatnonzero(V_arr[i, i + hmin + 1:] + F_arr[i + hmin + 2:] == F[i])
        if hits.size and F[i] < INF:
            k = i + hmin + 1 + int(hits[0])
            todo.append(("V", i, k))
            i = k + 1
        else:
            i += 1

    while todo:
        kind, i, j = todo.pop()
        if kind == "V":
            pairs.append((i, j))
            target = V[i, j]
            if model.hairpin(j - i - 1) == target:
                continue
            found = False
            t1 = pt[c[i]][c[j]]
            pmax = min(i + model.max_loop + 1, j - hmin - 2)
            for p in range(i + 1, pmax + 1):
                for q in range(j - 1, p + hmin, -1):
                    if (p - i - 1) + (j - q - 1) > model.max_loop:
                        break
                    t2 = pt[c[p]][c[q]]
                    if t2 and V[p, q] < INF and \
                            model.internal_loop(p - i - 1, j - q - 1, t1, t2) + V[p, q] == target:
                        todo.append(("V", p, q))
                        found = True
                        break
                if found:
                    break
            if found:
                continue
            for k in range(i + 2, j):
                if WM[i + 1, k - 1] + WM[k, j - 1] + mlc + mlb == target:
                    todo.extend([("M", k, j - 1), ("M", i + 1, k - 1)])
                    break
            else:
                raise FoldingError(f"traceback failed at pair ({i},{j})")
        else:
            target = WM[i, j]
            for k in range(i, j - hmin):
                v = V[k, j]
                if v >= INF:
                    continue
                if mlu * (k - i) + v + mlb == target:
                    todo.append(("V", k, j))
                    break
                if k > i and WM[i, k - 1] + v + mlb == target:
                    todo.extend([("V", k, j), ("M", i, k - 1)])
                    break
            else:
                if j > i and WM[i, j - 1] + mlu == target:
                    todo.append(("M", i, j - 1))
                else:
                    raise FoldingError(f"multiloop traceback failed at ({i},{j})")
    energy = F[0] / 100.0 + 0.0
    return SecondaryStructure(s, to_dot_bracket(pairs, n), energy=round(energy, 2))


_DEFAULT_MODEL = None


def default_model() -> EnergyModel:
    global _DEFAULT_MODEL
    if _DEFAULT_MODEL is None:
        _DEFAULT_MODEL = load_energy_model()
    return _DEFAULT_MODEL


_STRUCT_LINE = re.compile(r"^(\S+)\s*\(\s*([-+]?\d+(?:\.\d*)?)\s*\)\s*$")


def split_structure_line(line: str) -> tuple[str, float]:
    """Split ``STRUCTURE (ENERGY)`` into its parts; energy in kcal/mol."""
    m = _STRUCT_LINE.match(line.strip())
    if not m:
        raise FoldingError(f"malformed structure line: {line!r}")
    return m.group(1), float(m.group(2)) + 0.0


def parse_fold_output(text: str, seq: str) -> SecondaryStructure:
    """Parse engine output: a sequence echo line then ``STRUCTURE (ENERGY)``.

    FASTA-style header lines are skipped.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith(">")]
    if len(lines) < 2:
        raise FoldingError(f"malformed engine output: expected 2 lines, got {len(lines)}")
    structure, energy = split_structure_line(lines[1])
    s = _rna(seq)
    if len(structure) != len(s):
        raise FoldingError(f"malformed engine output: structure length {len(structure)} "
                           f"!= sequence length {len(s)}")
    try:
        parse_dot_bracket(structure)
    except StructureError as exc:
        raise FoldingError(f"malformed engine output: {exc}") from None
    return SecondaryStructure(s, structure, energy=energy)


def format_fold_output(ss: SecondaryStructure) -> str:
    energy = ss.energy if ss.energy is not None else 0.0
    return f"{ss.sequence}\n{ss.dot_bracket} ({energy:.2f})\n"


@dataclass
class BuiltinFolder:
    model: EnergyModel = field(default_factory=default_model)
    max_length: Optional[int] = DEFAULT_MAX_LENGTH
    name = "builtin"

    def fold(self, seq) -> SecondaryStructure:
        return fold_mfe(seq, self.model, self.max_length)


@dataclass
class ExternalFolder:
    """Runs an RNAfold-compatible command; the sequence goes to its stdin."""

    command: str
    timeout: Optional[float] = 600.0
    name = "external"

    def fold(self, seq) -> SecondaryStructure:
        return fold_external(seq, self.command, self.timeout)


def fold_external(seq, command, timeout: Optional[float] = 600.0) -> SecondaryStructure:
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    s = _rna(seq)
    try:
        proc = subprocess.run(argv, input=s + "\n", capture_output=True, text=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise FoldingError(f"could not run folding engine {argv[0]!r}: {exc}") from None
    if proc.returncode != 0:
        raise FoldingError(f"folding engine exited with status {proc.returncode}: {proc.stderr.strip()}")
    return parse_fold_output(proc.stdout, s)
