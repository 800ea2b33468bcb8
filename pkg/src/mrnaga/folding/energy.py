"""Reduced nearest-neighbour energy model (integer dcal/mol internally)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

INF = 10_000_000

BASE_CODE = {"A": 0, "C": 1, "G": 2, "U": 3, "T": 3}
PAIR_NAMES = ("", "CG", "GC", "GU", "UG", "AU", "UA")

# pair type by (5' base code, 3' base code); 0 = cannot pair
PTYPE = np.zeros((4, 4), dtype=np.int8)
for _t, _name in enumerate(PAIR_NAMES[1:], 1):
    PTYPE[BASE_CODE[_name[0]], BASE_CODE[_name[1]]] = _t


def encode(seq: str) -> np.ndarray:
    try:
        return np.fromiter((BASE_CODE[b] for b in seq.upper()), dtype=np.int8, count=len(seq))
    except KeyError as exc:
        raise ValueError(f"cannot fold base {exc.args[0]!r}") from None


def can_pair(a: str, b: str) -> bool:
    return bool(PTYPE[BASE_CODE[a], BASE_CODE[b]])


@dataclass(frozen=True, eq=False)
class EnergyModel:
    stack: np.ndarray          # int32 [7, 7], outer pair type x inner pair type
    hairpin_table: tuple       # index = loop size; None = forbidden
    bulge_table: tuple
    interior_table: tuple
    ninio: int
    ninio_max: int
    ml_closing: int
    ml_branch: int
    ml_unpaired: int
    loop_extrapolation: float
    max_loop: int
    hairpin_min: int = 3
    description: str = ""

    def hairpin(self, size: int) -> int:
        if size < self.hairpin_min:
            return INF
        last = len(self.hairpin_table) - 1
        if size <= last:
            e = self.hairpin_table[size]
            return INF if e is None else e
        return self.hairpin_table[last] + round(self.loop_extrapolation * math.log(size / last))

    def hairpin_array(self, n: int) -> np.ndarray:
        return np.array([self.hairpin(s) for s in range(n + 1)], dtype=np.int32)

    def _tab(self, table, size):
        e = table[size] if size < len(table) else None
        return INF if e is None else e

    def internal_loop(self, l1: int, l2: int, outer: int, inner: int) -> int:
        """Energy of the loop between an outer and an inner pair (types as in PTYPE)."""
        size = l1 + l2
        if size > self.max_loop:
            return INF
        if size == 0:
            return int(self.stack[outer, inner])
        if l1 == 0 or l2 == 0:
            e = self._tab(self.bulge_table, size)
            return e + int(self.stack[outer, inner]) if size == 1 else e
        return self._tab(self.interior_table, size) + min(self.ninio_max, self.ninio * abs(l1 - l2))

    def loop_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        size = self.max_loop + 1
        bulge = np.array([self._tab(self.bulge_table, s) for s in range(size)], dtype=np.int32)
        interior = np.array([self._tab(self.interior_table, s) for s in range(size)], dtype=np.int32)
        return bulge, interior


def load_energy_model(path=None, hairpin_min: int = 3) -> EnergyModel:
    path = path or Path(str(resources.files("mrnaga") / "data" / "energy_reduced.json"))
    with open(path) as fh:
        raw = json.load(fh)
    stack = np.full((7, 7), INF, dtype=np.int32)
    for key, value in raw["stack"].items():
        outer, inner = key.split("/")
        stack[PAIR_NAMES.index(outer), PAIR_NAMES.index(inner)] = int(value)
    if (stack[1:, 1:] >= INF).any():
        raise ValueError(f"{path}: incomplete stacking table")
    loops = [v for k in ("hairpin", "bulge", "interior") for v in raw[k] if v is not None]
    if min(loops) < 0:
        raise ValueError(f"{path}: negative loop penalty")
    return EnergyModel(
        stack=stack,
        hairpin_table=tuple(raw["hairpin"]),
        bulge_table=tuple(raw["bulge"]),
        interior_table=tuple(raw["interior"]),
        ninio=int(raw["ninio"]),
        ninio_max=int(raw["ninio_max"]),
        ml_closing=int(raw["ml_closing"]),
        ml_branch=int(raw["ml_branch"]),
        ml_unpaired=int(raw["ml_unpaired"]),
        loop_extrapolation=float(raw["loop_extrapolation"]),
        max_loop=int(raw["max_loop"]),
        hairpin_min=hairpin_min,
        description=raw.get("description", ""),
    )


def eval_energy(seq: str, pairs, model: EnergyModel) -> int:
    """Energy (dcal/mol) of a given structure by explicit loop decomposition.

    Returns INF for structures the model forbids (interior loop above
    ``max_loop``, hairpin below ``hairpin_min``). Raises on illegal pairs.
    """
    n = len(seq)
    partner = [-1] * n
    for i, j in pairs:
        if i > j:
            i, j = j, i
        if not can_pair(seq[i], seq[j]):
            raise ValueError(f"illegal pair {seq[i]}{seq[j]} at ({i},{j})")
        partner[i], partner[j] = j, i
    codes = encode(seq)
    total = 0
    for i in range(n):
        j = partner[i]
        if j < i:
            continue
        inner = []
        unpaired = 0
        x = i + 1
        while x < j:
            if partner[x] > x:
                inner.append((x, partner[x]))
                x = partner[x] + 1
            else:
                unpaired += 1
                x += 1
        outer_t = PTYPE[codes[i], codes[j]]
        if not inner:
            e = model.hairpin(j - i - 1)
        elif len(inner) == 1:
            p, q = inner[0]
            e = model.internal_loop(p - i - 1, j - q - 1, outer_t, PTYPE[codes[p], codes[q]])
        else:
            e = model.ml_closing + model.ml_branch * (len(inner) + 1) + model.ml_unpaired * unpaired
        if e >= INF:
            return INF
        total += e
    return total
