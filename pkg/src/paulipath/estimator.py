"""Truncated path-sum estimation with certified truncation error bounds.

The estimator sums damped path values

    value = c_I + sum_paths (1 - lam)^|s| * coeff(s_L) * prod(atoms) * Tr(s_0 rho)

over all paths of total weight |s| <= M.  Under single-qubit depolarizing
noise at rate lam, and when the effected rotation generators generate the
full Pauli group (the generation check), the mean squared truncation error
over uniform angles is bounded by (1 - lam)^(2M) * |H|^2 where |H| bounds
the spectral norm of the traceless part.  When the generation check fails
the same numbers are still reported but flagged as not certified.

Accumulation is per observable term, then folded in canonical term order,
so results are independent of the worker count; the optional compensated
mode runs Kahan summation inside and across terms.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, circuit_generation_certified, require_valid
from .engine import (
    DEFAULT_NODE_LIMIT,
    DEFAULT_PATH_LIMIT,
    EnumerationStats,
    FactorAtom,
    PathEnumeration,
    PauliPath,
)
from .observables import (
    DEFAULT_EXACT_NORM_QUBITS,
    Hamiltonian,
    NormBound,
    SparseDensity,
    norm_bound,
)

ParameterAssignment = Mapping[str, float]


@dataclass(frozen=True, slots=True)
class NoiseModel:
    """Single-qubit depolarizing noise at a uniform rate."""

    lam: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"noise rate must lie in [0, 1], got {self.lam}")


def atom_value(atom: FactorAtom, assignment: ParameterAssignment) -> float:
    """Numeric value of one factor atom at a parameter assignment."""
    if atom.kind == "unit":
        return float(atom.sign)
    if isinstance(atom.param, str):
        if atom.param not in assignment:
            raise ValueError(f"no angle bound for parameter {atom.param!r}")
        angle = assignment[atom.param]
    else:
        angle = atom.param
    base = math.cos(angle) if atom.kind == "cos" else math.sin(angle)
    return atom.sign * base


def path_value(
    path: PauliPath,
    assignment: ParameterAssignment,
    h: Hamiltonian,
    rho: SparseDensity,
) -> float:
    """Noiseless value: coeff(s_L) * prod(atoms) * Tr(s_0 rho)."""
    factor = h.coeff(path.words[-1])
    for atom in path.atoms:
        factor *= atom_value(atom, assignment)
    return factor * rho.overlap(path.words[0])


def damping(path: PauliPath, lam: float) -> float:
    """(1 - lam) ** total path weight."""
    return (1.0 - lam) ** path.total_weight


def describe_factors(path: PauliPath) -> str:
    """Human-readable product of the path's factor atoms."""
    sign = 1
    parts: list[str] = []
    for atom in path.atoms:
        sign *= atom.sign
        if atom.kind != "unit":
            arg = atom.param if isinstance(atom.param, str) else f"{atom.param!r}"
            parts.append(f"{atom.kind}({arg})")
    body = "*".join(parts) if parts else "1"
    return ("-" if sign < 0 else "") + body


class _Accumulator:
    """Plain or Kahan-compensated running sum."""

    __slots__ = ("total", "_carry", "_kahan")

    def __init__(self, kahan: bool) -> None:
        self.total = 0.0
        self._carry = 0.0
        self._kahan = kahan

    def add(self, value: float) -> None:
        if not self._kahan:
            self.total += value
            return
        y = value - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t


def _term_sums(
    circuit: Circuit,
    h: Hamiltonian,
    rho: SparseDensity,
    m: int | None,
    term_indices: Sequence[int],
    assignment: ParameterAssignment,
    lam: float,
    deterministic_sum: bool,
    path_limit: int,
    node_limit: int,
) -> tuple[list[tuple[int, float]], dict[str, int], int]:
    """Damped path sums per observable term, in the given term order."""
    max_weight = circuit.n * (circuit.depth + 1)
    damp = [1.0]
    for _ in range(max_weight):
        damp.append(damp[-1] * (1.0 - lam))
    terms = h.terms()
    atom_cache: dict[FactorAtom, float] = {}
    sums: list[tuple[int, float]] = []
    stats_total = EnumerationStats()
    emitted = 0
    for ti in term_indices:
        coeff = terms[ti][1]
        run = PathEnumeration(
            circuit,
            h,
            rho,
            m,
            path_limit=path_limit - emitted,
            node_limit=node_limit - stats_total.nodes_visited,
            term_indices=[ti],
            warn=False,
        )
        acc = _Accumulator(deterministic_sum)
        for path in run:
            factor = damp[path.total_weight]
            for atom in path.atoms:
                value = atom_cache.get(atom)
                if value is None:
                    value = atom_value(atom, assignment)
                    atom_cache[atom] = value
                factor *= value
            acc.add(factor * rho.overlap_masks(path.words[0].x, path.words[0].z))
        sums.append((ti, coeff * acc.total))
        stats = run.stats
        emitted += stats.paths_emitted
        stats_total.nodes_visited += stats.nodes_visited
        stats_total.paths_emitted += stats.paths_emitted
        stats_total.pruned_budget += stats.pruned_budget
        stats_total.pruned_zero_weight += stats.pruned_zero_weight
        stats_total.pruned_zero_overlap += stats.pruned_zero_overlap
    return sums, stats_total.as_dict(), emitted


def _worker_entry(args: tuple) -> tuple[list[tuple[int, float]], dict[str, int], int]:
    return _term_sums(*args)


@dataclass(frozen=True)
class EstimateReport:
    """Result of one truncated estimation run."""

    value: float
    identity_offset: float
    m: int
    untruncated: bool
    lam: float
    norm: NormBound
    mse_bound: float
    mse_bound_exp: float
    eps_delta: tuple[float, float] | None
    generation_certified: bool
    paths_used: int
    stats: dict[str, int]
    elapsed_seconds: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "identity_offset": self.identity_offset,
            "m": self.m,
            "untruncated": self.untruncated,
            "lambda": self.lam,
            "norm_bound": {"value": self.norm.value, "kind": self.norm.kind},
            "mse_bound": self.mse_bound,
            "mse_bound_exp": self.mse_bound_exp,
            "eps_delta": (
                None
                if self.eps_delta is None
                else {"epsilon": self.eps_delta[0], "delta": self.eps_delta[1]}
            ),
            "generation_certified": self.generation_certified,
            "paths_used": self.paths_used,
            "stats": dict(self.stats),
            "elapsed_seconds": self.elapsed_seconds,
        }


def _check_assignment(circuit: Circuit, assignment: ParameterAssignment) -> None:
    missing = [p for p in circuit.parameters() if p not in assignment]
    if missing:
        raise ValueError(f"no angle bound for parameter(s): {', '.join(missing)}")


def estimate(
    circuit: Circuit,
    h: Hamiltonian,
    rho: SparseDensity,
    assignment: ParameterAssignment,
    lam: float,
    m: int | None = None,
    *,
    workers: int = 1,
    deterministic_sum: bool = False,
    path_limit: int = DEFAULT_PATH_LIMIT,
    node_limit: int = DEFAULT_NODE_LIMIT,
    exact_norm_threshold: int = DEFAULT_EXACT_NORM_QUBITS,
    eps_delta: tuple[float, float] | None = None,
) -> EstimateReport:
    """Truncated path-sum estimate of the noisy mean value.

    `m` is the truncation order; None runs untruncated (M = n(L+1), the
    largest possible total weight).  The report carries both MSE bound
    forms, the norm bound used, and enumeration statistics.  Results are
    independent of `workers`; `deterministic_sum` switches the per-term
    accumulators to compensated summation.
    """
    started = time.perf_counter()
    require_valid(circuit)
    NoiseModel(lam)
    _check_assignment(circuit, assignment)
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    max_weight = circuit.n * (circuit.depth + 1)
    untruncated = m is None or m >= max_weight
    m_eff = max_weight if m is None else m
    if m_eff < circuit.depth + 1 and h.term_count > 0:
        warnings.warn(
            f"truncation order {m_eff} is below depth + 1 = {circuit.depth + 1};"
            " every path is truncated away",
            stacklevel=2,
        )
    norm = norm_bound(h, exact_norm_threshold)
    certified = circuit_generation_certified(circuit)
    if not certified:
        warnings.warn(
            "effected rotation generators do not generate the full Pauli"
            " group; MSE bounds are reported but not certified",
            stacklevel=2,
        )
        eps_delta = None
    identity_offset = h.identity_coeff * rho.overlap_masks(0, 0)
    term_count = h.term_count
    if lam == 1.0 or term_count == 0:
        # every non-identity word is fully damped (or there is none)
        value = identity_offset
        stats = EnumerationStats().as_dict()
        total = 0.0
        paths = 0
    else:
        chunks: list[list[int]] = []
        if workers == 1:
            chunks = [list(range(term_count))]
        else:
            size = math.ceil(term_count / workers)
            chunks = [
                list(range(lo, min(lo + size, term_count)))
                for lo in range(0, term_count, size)
            ]
        args = [
            (
                circuit,
                h,
                rho,
                m_eff,
                chunk,
                dict(assignment),
                lam,
                deterministic_sum,
                path_limit,
                node_limit,
            )
            for chunk in chunks
        ]
        if len(chunks) == 1:
            results = [_worker_entry(args[0])]
        else:
            with get_context().Pool(processes=min(workers, len(chunks))) as pool:
                results = pool.map(_worker_entry, args)
        acc = _Accumulator(deterministic_sum)
        stats_all = EnumerationStats()
        paths = 0
        for sums, stat_dict, _ in results:
            for _, term_sum in sums:  # chunks preserve canonical term order
                acc.add(term_sum)
            stats_all.nodes_visited += stat_dict["nodes_visited"]
            stats_all.paths_emitted += stat_dict["paths_emitted"]
            stats_all.pruned_budget += stat_dict["pruned_budget"]
            stats_all.pruned_zero_weight += stat_dict["pruned_zero_weight"]
            stats_all.pruned_zero_overlap += stat_dict["pruned_zero_overlap"]
        total = acc.total
        paths = stats_all.paths_emitted
        stats = stats_all.as_dict()
        value = identity_offset + total
    decay = (1.0 - lam) ** (2 * m_eff)
    return EstimateReport(
        value=value,
        identity_offset=identity_offset,
        m=m_eff,
        untruncated=untruncated,
        lam=lam,
        norm=norm,
        mse_bound=decay * norm.value**2,
        mse_bound_exp=math.exp(-2.0 * lam * m_eff) * norm.value**2,
        eps_delta=eps_delta,
        generation_certified=certified,
        paths_used=paths,
        stats=stats,
        elapsed_seconds=time.perf_counter() - started,
    )


@dataclass(frozen=True)
class MSelection:
    """A truncation order choice; m is None when lam = 0 (untruncated)."""

    m: int | None
    path_ceiling: int | None
    note: str

    def to_dict(self) -> dict:
        return {"m": self.m, "path_ceiling": self.path_ceiling, "note": self.note}


def choose_m(
    lam: float,
    norm: float,
    *,
    target_mse: float | None = None,
    epsilon: float | None = None,
    delta: float | None = None,
    floor: int | None = None,
    term_count: int | None = None,
) -> MSelection:
    """Smallest truncation order meeting a target MSE or an (eps, delta)
    guarantee, using the exp(-2 lam M) relaxation.

    target_mse nu:          M = ceil(ln(norm^2 / nu) / (2 lam))
    (epsilon, delta):       M = ceil(ln(norm / (eps sqrt(delta))) / lam)

    lam = 0 yields the untruncated sentinel m=None: without noise no finite
    truncation is certified.  `floor` (depth + 1) lifts choices below the
    smallest weight any path can have.
    """
    NoiseModel(lam)
    have_mse = target_mse is not None
    have_eps = epsilon is not None or delta is not None
    if have_mse == have_eps:
        raise ValueError("need exactly one of target_mse or (epsilon, delta)")
    if have_eps and (epsilon is None or delta is None):
        raise ValueError("epsilon and delta must be given together")
    if norm < 0:
        raise ValueError(f"norm bound must be non-negative, got {norm}")
    if lam == 0.0:
        return MSelection(
            None,
            None,
            "no noise: truncation error cannot be certified, run untruncated",
        )
    if norm == 0.0:
        return MSelection(0, _ceiling(term_count, 0), "observable has no traceless part")
    if have_mse:
        if target_mse <= 0:
            raise ValueError(f"target MSE must be positive, got {target_mse}")
        raw = math.log(norm**2 / target_mse) / (2.0 * lam)
    else:
        if epsilon <= 0 or not 0 < delta < 1:
            raise ValueError("need epsilon > 0 and 0 < delta < 1")
        raw = math.log(norm / (epsilon * math.sqrt(delta))) / lam
    m = max(0, math.ceil(raw))
    note = ""
    if floor is not None and m < floor:
        m = floor
        note = f"raised to the depth + 1 floor of {floor}"
    return MSelection(m, _ceiling(term_count, m), note)


def _ceiling(term_count: int | None, m: int) -> int | None:
    return None if term_count is None else term_count * (1 << m)


# --- sampled benchmarks ------------------------------------------------------


def _require_distinct_params(circuit: Circuit) -> list[str]:
    """Sampling modes need every rotation angle free and independent."""
    params: list[str] = []
    seen: set[str] = set()
    for li, layer in enumerate(circuit.layers, start=1):
        for gate in layer.rotations:
            if gate.param is None:
                raise ValueError(
                    f"layer {li}: bound-angle rotation cannot be sampled over"
                )
            if gate.param in seen:
                raise ValueError(
                    f"layer {li}: parameter {gate.param!r} is shared;"
                    " sampled runs need one symbol per rotation"
                )
            seen.add(gate.param)
            params.append(gate.param)
    return params


def _compile_path(
    path: PauliPath,
    h: Hamiltonian,
    rho: SparseDensity,
    lam: float,
    param_index: Mapping[str, int],
) -> tuple[float, tuple[int, ...], tuple[int, ...]]:
    """(constant, cos param indices, sin param indices) for vector runs.

    Unit signs, sin signs, the damping factor, the term coefficient, the
    state overlap, and any bound-angle factors all fold into the constant.
    """
    const = (
        h.coeff(path.words[-1])
        * rho.overlap(path.words[0])
        * (1.0 - lam) ** path.total_weight
    )
    cos_idx: list[int] = []
    sin_idx: list[int] = []
    for atom in path.atoms:
        const *= atom.sign
        if atom.kind == "unit":
            continue
        if isinstance(atom.param, str):
            (cos_idx if atom.kind == "cos" else sin_idx).append(param_index[atom.param])
        else:
            angle = atom.param
            const *= math.cos(angle) if atom.kind == "cos" else math.sin(angle)
    return const, tuple(cos_idx), tuple(sin_idx)


def _evaluate_compiled(
    compiled: Sequence[tuple[float, tuple[int, ...], tuple[int, ...]]],
    cos_table: np.ndarray,
    sin_table: np.ndarray,
    base: float,
) -> np.ndarray:
    """Sum of compiled path values per sample; tables are (samples, params)."""
    values = np.full(cos_table.shape[0], base, dtype=float)
    for const, cos_idx, sin_idx in compiled:
        term = np.full(cos_table.shape[0], const, dtype=float)
        for p in cos_idx:
            term *= cos_table[:, p]
        for p in sin_idx:
            term *= sin_table[:, p]
        values += term
    return values


def _sample_thetas(
    seed: int, samples: int, params: Sequence[str]
) -> tuple[list[int], np.ndarray]:
    """Per-sample child seeds and a (samples, params) matrix of angles."""
    rng = np.random.default_rng(seed)
    sample_seeds = [int(s) for s in rng.integers(0, 2**63, size=samples)]
    thetas = np.empty((samples, len(params)), dtype=float)
    for i, child in enumerate(sample_seeds):
        thetas[i] = np.random.default_rng(child).uniform(0.0, 2.0 * math.pi, len(params))
    return sample_seeds, thetas


@dataclass(frozen=True)
class MseBenchmarkReport:
    """Empirical truncation MSE against the dense oracle, with its bound."""

    samples: int
    m: int
    lam: float
    empirical_mse: float
    std_error: float
    bound: float
    bound_exp: float
    passed: bool
    generation_certified: bool
    norm: NormBound
    seed: int
    sample_seeds: list[int]

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "m": self.m,
            "lambda": self.lam,
            "empirical_mse": self.empirical_mse,
            "std_error": self.std_error,
            "bound": self.bound,
            "bound_exp": self.bound_exp,
            "passed": self.passed,
            "generation_certified": self.generation_certified,
            "norm_bound": {"value": self.norm.value, "kind": self.norm.kind},
            "seed": self.seed,
            "sample_seeds": self.sample_seeds,
        }


def mse_benchmark(
    circuit: Circuit,
    h: Hamiltonian,
    rho: SparseDensity,
    lam: float,
    m: int,
    samples: int,
    seed: int,
    *,
    oracle_cap: int | None = None,
    exact_norm_threshold: int = DEFAULT_EXACT_NORM_QUBITS,
    path_limit: int = DEFAULT_PATH_LIMIT,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> MseBenchmarkReport:
    """Empirical E|estimate - oracle|^2 over uniformly sampled angles.

    Draws `samples` assignments theta ~ U[0, 2pi) per parameter from
    per-sample derived seeds, evaluates the truncated estimator through a
    compiled path table and the exact noisy value through the dense
    oracle, and compares the mean squared difference against the certified
    bound (pass means empirical <= bound + 3 standard errors).
    """
    from . import oracle

    require_valid(circuit)
    NoiseModel(lam)
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    params = _require_distinct_params(circuit)
    certified = circuit_generation_certified(circuit)
    if not certified:
        warnings.warn(
            "generation check failed: empirical MSE is reported but the"
            " bound is not certified",
            stacklevel=2,
        )
    norm = norm_bound(h, exact_norm_threshold)
    if m < circuit.depth + 1 and h.term_count > 0:
        warnings.warn(
            f"truncation order {m} is below depth + 1 = {circuit.depth + 1};"
            " every path is truncated away",
            stacklevel=2,
        )
    param_index = {p: i for i, p in enumerate(params)}
    run = PathEnumeration(
        circuit, h, rho, m, path_limit=path_limit, node_limit=node_limit, warn=False
    )
    compiled = [_compile_path(p, h, rho, lam, param_index) for p in run]
    base = h.identity_coeff * rho.overlap_masks(0, 0)
    sample_seeds, thetas = _sample_thetas(seed, samples, params)
    estimates = _evaluate_compiled(compiled, np.cos(thetas), np.sin(thetas), base)
    cap = oracle.DEFAULT_ORACLE_CAP if oracle_cap is None else oracle_cap
    exact = np.empty(samples, dtype=float)
    for i in range(samples):
        assignment = {p: float(thetas[i, j]) for j, p in enumerate(params)}
        exact[i] = oracle.noisy_mean_value(circuit, h, rho, assignment, lam, cap=cap)
    squared = (estimates - exact) ** 2
    empirical = float(np.mean(squared))
    std_error = float(np.std(squared, ddof=1) / math.sqrt(samples))
    bound = (1.0 - lam) ** (2 * m) * norm.value**2
    return MseBenchmarkReport(
        samples=samples,
        m=m,
        lam=lam,
        empirical_mse=empirical,
        std_error=std_error,
        bound=bound,
        bound_exp=math.exp(-2.0 * lam * m) * norm.value**2,
        passed=bool(empirical <= bound + 3.0 * std_error),
        generation_certified=certified,
        norm=norm,
        seed=seed,
        sample_seeds=sample_seeds,
    )


@dataclass(frozen=True)
class CrossTermResult:
    """Monte-Carlo mean of f * f' for two paths over uniform angles."""

    mean: float
    std_error: float
    samples: int
    generation_certified: bool

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "generation_certified": self.generation_certified,
        }


def cross_term_check(
    circuit: Circuit,
    h: Hamiltonian,
    rho: SparseDensity,
    path_a: PauliPath,
    path_b: PauliPath,
    samples: int,
    seed: int,
) -> CrossTermResult:
    """Estimate E[f_a * f_b] over theta ~ U[0, 2pi)^P.

    For certified circuits the expectation vanishes for distinct paths;
    an uncertified circuit is still measured, just flagged.
    """
    if path_a == path_b:
        raise ValueError("cross-term check needs two distinct paths")
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    params = _require_distinct_params(circuit)
    certified = circuit_generation_certified(circuit)
    param_index = {p: i for i, p in enumerate(params)}
    compiled = [
        _compile_path(p, h, rho, 0.0, param_index) for p in (path_a, path_b)
    ]
    _, thetas = _sample_thetas(seed, samples, params)
    cos_table, sin_table = np.cos(thetas), np.sin(thetas)
    products = _evaluate_compiled(compiled[:1], cos_table, sin_table, 0.0) * (
        _evaluate_compiled(compiled[1:], cos_table, sin_table, 0.0)
    )
    mean = float(np.mean(products))
    std_error = float(np.std(products, ddof=1) / math.sqrt(samples))
    return CrossTermResult(mean, std_error, samples, certified)
