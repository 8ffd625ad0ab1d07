"""Backward enumeration of weight-truncated Pauli paths.

A path for a depth-L circuit is a word sequence (s_0, ..., s_L).  Working
backward from each observable term s_L, every layer maps a successor word
to its possible predecessors:

  * letters outside all gate supports are copied verbatim;
  * a Clifford support is conjugated through the gate, Vdag s V, with the
    resulting sign recorded as a unit factor;
  * a rotation support with generator G either commutes with the successor
    (one predecessor, unit factor) or anti-commutes (two predecessors: the
    successor itself with a cos factor, and the word w from sigma w = i G s
    with factor sigma sin, sigma in {+1, -1}).

Only sequences whose total weight sum_i |s_i| stays within the truncation
order M survive; the branch-and-bound rule prunes a partial sequence as
soon as the weight already spent exceeds M minus the number of words still
to be generated (each must weigh at least 1).  Candidates for s_0 must
additionally overlap the initial state.

Enumeration order is deterministic: observable terms in trie order, then
depth first with layer gates processed in ascending order of their least
support qubit, Cliffords before rotations, and the cos branch before the
sin branch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator

from .circuit import (
    CONJUGATION_TABLES,
    Circuit,
    CliffordGate,
    Layer,
    RotationGate,
    require_valid,
)
from .observables import Hamiltonian, SparseDensity
from .pauli import _LETTER_BITS, PauliWord, multiply

DEFAULT_PATH_LIMIT = 10_000_000
DEFAULT_NODE_LIMIT = 100_000_000


class ResourceLimitError(RuntimeError):
    """Raised when enumeration exceeds a configured path or node limit."""


@dataclass(frozen=True, slots=True)
class FactorAtom:
    """One multiplicative factor of a path value.

    kind "unit" contributes sign alone; "cos"/"sin" contribute
    sign * cos(theta) or sign * sin(theta) where theta is looked up by
    `param` (a symbol) or taken literally (a bound float).
    """

    kind: str  # "unit" | "cos" | "sin"
    sign: int  # +1 | -1
    param: str | float | None = None


_UNIT_PLUS = FactorAtom("unit", 1)
_UNIT_MINUS = FactorAtom("unit", -1)


@dataclass(frozen=True, slots=True)
class PauliPath:
    """A surviving path: words (s_0, ..., s_L), its factor atoms in layer
    order, and the total weight sum_i |s_i|."""

    words: tuple[PauliWord, ...]
    atoms: tuple[FactorAtom, ...]
    total_weight: int


@dataclass(frozen=True, slots=True)
class WeightBudget:
    """Branch-and-bound budget state while generating word index `remaining`.

    A candidate with weight w survives when spent + w <= m - remaining:
    each of the `remaining` words still to be generated costs at least 1.
    """

    m: int
    spent: int
    remaining: int

    def allows(self, weight: int) -> bool:
        return self.spent + weight <= self.m - self.remaining


@dataclass
class EnumerationStats:
    nodes_visited: int = 0
    paths_emitted: int = 0
    pruned_budget: int = 0
    pruned_zero_weight: int = 0
    pruned_zero_overlap: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "nodes_visited": self.nodes_visited,
            "paths_emitted": self.paths_emitted,
            "pruned_budget": self.pruned_budget,
            "pruned_zero_weight": self.pruned_zero_weight,
            "pruned_zero_overlap": self.pruned_zero_overlap,
        }


def rotation_predecessors(
    gen: PauliWord, succ: PauliWord, param: str | float | None = None
) -> list[tuple[PauliWord, FactorAtom]]:
    """Predecessors of `succ` through one rotation, on support-restricted
    words.

    Commuting successor: [(succ, unit +1)].  Anti-commuting successor:
    [(succ, cos), (w, sigma sin)] with sigma w = i * gen * succ; the sign
    convention is pinned by dense conjugation,
    exp(+i theta G / 2) s exp(-i theta G / 2) = cos(theta) s + sigma sin(theta) w.
    """
    if gen.is_identity:
        raise ValueError("rotation generator must be non-identity")
    prod = multiply(gen, succ)
    if (prod.phase.exponent % 2) == 0:  # i^0 or i^2: gen and succ commute
        return [(succ, _UNIT_PLUS)]
    sigma_exponent = (1 + prod.phase.exponent) % 4  # phase of i * gen * succ
    sign = 1 if sigma_exponent == 0 else -1
    return [
        (succ, FactorAtom("cos", 1, param)),
        (prod.word, FactorAtom("sin", sign, param)),
    ]


# --- compiled per-layer transition programs ---------------------------------

# bit-indexed backward conjugation tables derived from the letter tables:
# 1-qubit entry index (x << 1) | z, 2-qubit (xc << 3) | (zc << 2) | (xt << 1) | zt
def _bit_table_1q(kind: str) -> tuple[tuple[int, int, int], ...]:
    table = CONJUGATION_TABLES[(kind, "backward")]
    out: list[tuple[int, int, int]] = [(0, 0, 0)] * 4
    for letter, (sign, mapped) in table.items():
        xb, zb = _LETTER_BITS[letter]
        mx, mz = _LETTER_BITS[mapped]
        out[(xb << 1) | zb] = (sign, mx, mz)
    return tuple(out)


def _bit_table_cnot() -> tuple[tuple[int, int, int, int, int], ...]:
    table = CONJUGATION_TABLES[("CNOT", "backward")]
    out: list[tuple[int, int, int, int, int]] = [(0, 0, 0, 0, 0)] * 16
    for letters, (sign, mapped) in table.items():
        cx, cz = _LETTER_BITS[letters[0]]
        tx, tz = _LETTER_BITS[letters[1]]
        mcx, mcz = _LETTER_BITS[mapped[0]]
        mtx, mtz = _LETTER_BITS[mapped[1]]
        out[(cx << 3) | (cz << 2) | (tx << 1) | tz] = (sign, mcx, mcz, mtx, mtz)
    return tuple(out)


_BACKWARD_1Q = {kind: _bit_table_1q(kind) for kind in ("H", "S")}
_BACKWARD_CNOT = _bit_table_cnot()


class _RotOp:
    __slots__ = ("mask", "gx", "gz", "atom_cos", "atom_sin_plus", "atom_sin_minus")

    def __init__(self, gate: RotationGate) -> None:
        gen = gate.generator
        self.mask = gen.x | gen.z
        self.gx = gen.x
        self.gz = gen.z
        key = gate.param if gate.param is not None else gate.angle
        self.atom_cos = FactorAtom("cos", 1, key)
        self.atom_sin_plus = FactorAtom("sin", 1, key)
        self.atom_sin_minus = FactorAtom("sin", -1, key)


class _LayerProgram:
    """One layer compiled to bit operations on (x, z) masks."""

    __slots__ = ("cliffords", "rotations")

    def __init__(self, layer: Layer) -> None:
        cliffords = sorted(layer.cliffords, key=lambda g: min(g.qubits))
        self.cliffords: list[tuple] = []
        for gate in cliffords:
            if gate.kind == "CNOT":
                self.cliffords.append((None, gate.qubits[0] - 1, gate.qubits[1] - 1))
            else:
                self.cliffords.append((_BACKWARD_1Q[gate.kind], gate.qubits[0] - 1, 0))
        self.rotations = sorted(
            (_RotOp(g) for g in layer.rotations), key=lambda r: r.mask & -r.mask
        )

    def children(self, x: int, z: int) -> list[tuple[int, int, tuple[FactorAtom, ...]]]:
        """All predecessors of the word (x, z) with their atoms."""
        base_atoms: list[FactorAtom] = []
        for table, b0, b1 in self.cliffords:
            if table is None:  # CNOT
                idx = (
                    (((x >> b0) & 1) << 3)
                    | (((z >> b0) & 1) << 2)
                    | (((x >> b1) & 1) << 1)
                    | ((z >> b1) & 1)
                )
                sign, mcx, mcz, mtx, mtz = _BACKWARD_CNOT[idx]
                x = (x & ~(1 << b0) & ~(1 << b1)) | (mcx << b0) | (mtx << b1)
                z = (z & ~(1 << b0) & ~(1 << b1)) | (mcz << b0) | (mtz << b1)
            else:
                idx = (((x >> b0) & 1) << 1) | ((z >> b0) & 1)
                sign, mx, mz = table[idx]
                x = (x & ~(1 << b0)) | (mx << b0)
                z = (z & ~(1 << b0)) | (mz << b0)
            base_atoms.append(_UNIT_PLUS if sign == 1 else _UNIT_MINUS)
        states = [(x, z, tuple(base_atoms))]
        for rot in self.rotations:
            sxr = x & rot.mask
            szr = z & rot.mask
            anti = ((rot.gx & szr).bit_count() + (rot.gz & sxr).bit_count()) % 2
            if not anti:
                states = [(sx, sz, atoms + (_UNIT_PLUS,)) for sx, sz, atoms in states]
                continue
            px = sxr ^ rot.gx
            pz = szr ^ rot.gz
            exp = (
                1
                + (rot.gx & rot.gz).bit_count()
                + (sxr & szr).bit_count()
                - (px & pz).bit_count()
                + 2 * (rot.gz & sxr).bit_count()
            ) % 4
            sin_atom = rot.atom_sin_plus if exp == 0 else rot.atom_sin_minus
            keep = ~rot.mask
            states = [
                branch
                for sx, sz, atoms in states
                for branch in (
                    (sx, sz, atoms + (rot.atom_cos,)),
                    ((sx & keep) | px, (sz & keep) | pz, atoms + (sin_atom,)),
                )
            ]
        return states


def layer_predecessors(
    layer: Layer, succ: PauliWord, budget: WeightBudget | None = None
) -> list[tuple[PauliWord, tuple[FactorAtom, ...]]]:
    """Predecessors of a full word through one layer, optionally pruned.

    With a budget, candidates whose weight is zero or that violate
    budget.allows are dropped, mirroring the enumeration walk.
    """
    program = _LayerProgram(layer)
    out = []
    for x, z, atoms in program.children(succ.x, succ.z):
        weight = (x | z).bit_count()
        if budget is not None and (weight == 0 or not budget.allows(weight)):
            continue
        out.append((PauliWord(succ.n, x, z), atoms))
    return out


class PathEnumeration:
    """Iterable stream of surviving paths for (circuit, H, rho, M).

    Iterating yields PauliPath objects in the canonical order; `stats` is
    reset at the start of each iteration and holds the counters of the
    most recent (possibly still running) pass.  `term_indices` restricts
    the walk to a subset of observable terms, which is how parallel
    workers split the tree.
    """

    def __init__(
        self,
        circuit: Circuit,
        h: Hamiltonian,
        rho: SparseDensity,
        m: int | None,
        *,
        path_limit: int = DEFAULT_PATH_LIMIT,
        node_limit: int = DEFAULT_NODE_LIMIT,
        term_indices: list[int] | None = None,
        warn: bool = True,
    ) -> None:
        require_valid(circuit)
        if h.n != circuit.n:
            raise ValueError(f"observable on {h.n} qubits, circuit has {circuit.n}")
        if rho.n != circuit.n:
            raise ValueError(f"state on {rho.n} qubits, circuit has {circuit.n}")
        depth = circuit.depth
        max_weight = circuit.n * (depth + 1)
        if m is None:
            m = max_weight
        elif m < 0:
            raise ValueError(f"truncation order must be non-negative, got {m}")
        if warn and m < depth + 1:
            warnings.warn(
                f"truncation order {m} is below depth + 1 = {depth + 1};"
                " every path is truncated away",
                stacklevel=2,
            )
        self.circuit = circuit
        self.h = h
        self.rho = rho
        self.m = m
        self.path_limit = path_limit
        self.node_limit = node_limit
        self.term_indices = term_indices
        self.stats = EnumerationStats()
        self._programs = [_LayerProgram(layer) for layer in circuit.layers]

    def __iter__(self) -> Iterator[PauliPath]:
        stats = EnumerationStats()
        self.stats = stats
        n = self.circuit.n
        depth = self.circuit.depth
        m = self.m
        programs = self._programs
        rho = self.rho
        terms = self.h.terms()
        if self.term_indices is not None:
            terms = [terms[i] for i in self.term_indices]
        # frame: (word index, x, z, spent weight, parent frame, atoms added)
        for word, _ in terms:
            stats.nodes_visited += 1
            weight = word.weight
            if weight > m - depth:
                stats.pruned_budget += 1
                continue
            stack = [(depth, word.x, word.z, weight, None, ())]
            while stack:
                frame = stack.pop()
                idx, x, z, spent, parent, _ = frame
                if idx == 0:
                    if rho.overlap_masks(x, z) == 0.0:
                        stats.pruned_zero_overlap += 1
                        continue
                    stats.paths_emitted += 1
                    if stats.paths_emitted > self.path_limit:
                        raise ResourceLimitError(
                            f"more than {self.path_limit} paths survive truncation"
                        )
                    yield self._build_path(frame, n)
                    continue
                children = programs[idx - 1].children(x, z)
                next_idx = idx - 1
                for child in reversed(children):
                    cx, cz, atoms = child
                    stats.nodes_visited += 1
                    if stats.nodes_visited > self.node_limit:
                        raise ResourceLimitError(
                            f"more than {self.node_limit} enumeration nodes visited"
                        )
                    cw = (cx | cz).bit_count()
                    if cw == 0:
                        stats.pruned_zero_weight += 1
                        continue
                    if spent + cw > m - next_idx:
                        stats.pruned_budget += 1
                        continue
                    stack.append((next_idx, cx, cz, spent + cw, frame, atoms))

    @staticmethod
    def _build_path(frame: tuple, n: int) -> PauliPath:
        words: list[PauliWord] = []
        atom_groups: list[tuple[FactorAtom, ...]] = []
        total = frame[3]
        cursor = frame
        while cursor is not None:
            words.append(PauliWord(n, cursor[1], cursor[2]))
            atom_groups.append(cursor[5])
            cursor = cursor[4]
        atoms: list[FactorAtom] = []
        for group in atom_groups:
            atoms.extend(group)
        return PauliPath(tuple(words), tuple(atoms), total)


def enumerate_paths(
    circuit: Circuit,
    h: Hamiltonian,
    rho: SparseDensity,
    m: int | None,
    **kwargs,
) -> PathEnumeration:
    return PathEnumeration(circuit, h, rho, m, **kwargs)


def enumeration_stats(run: PathEnumeration) -> EnumerationStats:
    """Counters of the most recent pass over `run`."""
    return run.stats
