"""Sequential Stern-Gerlach chains: analytic Born probabilities and Monte Carlo.

Random numbers come from numpy's Philox4x64 counter-based generator.  The run
is cut into fixed-size blocks; block ``b`` draws from
``Philox(SeedSequence(seed, spawn_key=(b,)))``, so counts do not depend on how
blocks are spread over workers.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .amplitude_engine import general_table, probabilities
from .spin_algebra import Direction, Spin, SpinError

DEFAULT_SEED = 0xC0FFEE
RNG_ALGORITHM = "Philox4x64-10 (numpy.random.Philox), SeedSequence(seed, spawn_key=(block,))"
BLOCK_SIZE = 1 << 16
Z_FLAG = 5.0
MAX_SEQUENCES = 1 << 20

Outcome = tuple[Fraction, ...]


class ChainError(ValueError):
    """Malformed chain description; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Stage:
    direction: Direction
    select: Optional[Fraction] = None


@dataclass(frozen=True)
class MeasurementChain:
    spin: Spin
    prepare_direction: Direction
    prepare_m: Fraction
    stages: tuple[Stage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ChainError("stages", "at least one stage is required")
        ms = self.spin.projections()
        try:
            object.__setattr__(self, "prepare_m", ms[self.spin.index(self.prepare_m)])
        except ValueError as exc:
            raise ChainError("prepare.m", str(exc)) from exc
        stages = []
        for k, stage in enumerate(self.stages):
            if stage.select is not None:
                try:
                    stage = Stage(stage.direction, ms[self.spin.index(stage.select)])
                except ValueError as exc:
                    raise ChainError(f"stages[{k}].select", str(exc)) from exc
            stages.append(stage)
        object.__setattr__(self, "stages", tuple(stages))

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], degrees: bool = False) -> MeasurementChain:
        """Build a chain from ``{spin, prepare: {theta, phi, m}, stages: [{theta, phi, select?}]}``."""
        if not isinstance(doc, Mapping):
            raise ChainError("<root>", "chain document must be a JSON object")
        if "spin" not in doc:
            raise ChainError("spin", "missing")
        try:
            spin = Spin(doc["spin"])
        except SpinError as exc:
            raise ChainError("spin", str(exc)) from exc
        prep = doc.get("prepare")
        if not isinstance(prep, Mapping):
            raise ChainError("prepare", "missing or not an object")
        direction = _direction(prep, "prepare", degrees)
        m = _projection(spin, prep, "m", "prepare.m", required=True)
        raw_stages = doc.get("stages")
        if not isinstance(raw_stages, list) or not raw_stages:
            raise ChainError("stages", "must be a non-empty array")
        stages = []
        for k, raw in enumerate(raw_stages):
            where = f"stages[{k}]"
            if not isinstance(raw, Mapping):
                raise ChainError(where, "must be an object")
            select = _projection(spin, raw, "select", f"{where}.select", required=False)
            stages.append(Stage(_direction(raw, where, degrees), select))
        return cls(spin, direction, m, tuple(stages))

    def to_dict(self) -> dict:
        return {
            "spin": format_m(self.spin.j),
            "prepare": {"theta": self.prepare_direction.theta, "phi": self.prepare_direction.phi,
                        "m": format_m(self.prepare_m)},
            "stages": [
                {"theta": s.direction.theta, "phi": s.direction.phi,
                 **({} if s.select is None else {"select": format_m(s.select)})}
                for s in self.stages
            ],
        }


def _direction(raw: Mapping, where: str, degrees: bool) -> Direction:
    angles = []
    for name in ("theta", "phi"):
        if name not in raw:
            if name == "phi":
                angles.append(0.0)
                continue
            raise ChainError(f"{where}.{name}", "missing")
        value = raw[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ChainError(f"{where}.{name}", f"expected a finite number, got {value!r}")
        angles.append(math.radians(value) if degrees else float(value))
    return Direction(*angles)


def _projection(spin: Spin, raw: Mapping, key: str, where: str, required: bool) -> Optional[Fraction]:
    if key not in raw or raw[key] is None:
        if required:
            raise ChainError(where, "missing")
        return None
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ChainError(where, f"expected a number, got {value!r}")
    try:
        return spin.projections()[spin.index(value)]
    except ValueError as exc:
        raise ChainError(where, str(exc)) from exc


def format_m(m) -> str | int | float:
    """Integers as int, half-integers as float (exact in binary)."""
    m = Fraction(m)
    return int(m) if m.denominator == 1 else float(m)


def outcome_key(outcome: Sequence[Fraction]) -> str:
    return ",".join(str(Fraction(m)) for m in outcome)


def _stage_tables(chain: MeasurementChain) -> list[np.ndarray]:
    """Probability matrices P[m_f, m_i] for each consecutive pair of directions."""
    tables = []
    prev = chain.prepare_direction
    for stage in chain.stages:
        tables.append(probabilities(general_table(chain.spin, prev, stage.direction)).entries)
        prev = stage.direction
    return tables


def analytic_chain_probabilities(chain: MeasurementChain) -> dict[Outcome, float]:
    """Joint probability of every full outcome sequence, ignoring ``select``."""
    joint = _sequence_probabilities(chain)
    ms = chain.spin.projections()
    return {tuple(ms[i] for i in idx): float(p) for idx, p in joint}


def _sequence_probabilities(chain: MeasurementChain) -> list[tuple[tuple[int, ...], float]]:
    dim = chain.spin.dim
    n = len(chain.stages)
    if dim**n > MAX_SEQUENCES:
        raise ValueError(f"chain has more than {MAX_SEQUENCES} outcome sequences; too long to enumerate")
    tables = _stage_tables(chain)
    start = chain.spin.index(chain.prepare_m)
    out = []
    for idx in itertools.product(range(dim), repeat=n):
        p = 1.0
        prev = start
        for table, nxt in zip(tables, idx):
            p *= table[nxt, prev]
            prev = nxt
        out.append((idx, p))
    return out


def accepts(chain: MeasurementChain, outcome: Sequence[Fraction]) -> bool:
    return all(s.select is None or s.select == m for s, m in zip(chain.stages, outcome))


def postselected_probabilities(chain: MeasurementChain) -> dict[Outcome, float]:
    """Conditional probabilities of the sequences that pass every ``select`` filter."""
    joint = analytic_chain_probabilities(chain)
    kept = {k: p for k, p in joint.items() if accepts(chain, k)}
    total = sum(kept.values())
    if total == 0.0:
        return {k: 0.0 for k in kept}
    return {k: p / total for k, p in kept.items()}


@dataclass(frozen=True)
class SimulationResult:
    chain: MeasurementChain
    samples: int
    seed: int
    counts: dict[Outcome, int]
    analytic: dict[Outcome, float]
    conditional: dict[Outcome, float]
    discarded: int
    rng: str = field(default=RNG_ALGORITHM)

    @property
    def acceptance_probability(self) -> float:
        return sum(p for k, p in self.analytic.items() if accepts(self.chain, k))


def _cdf_columns(table: np.ndarray) -> np.ndarray:
    """Column-wise CDF over outcomes, pinned to 1 from the last possible outcome on."""
    cdf = np.cumsum(table, axis=0)
    for col in range(table.shape[1]):
        nonzero = np.nonzero(table[:, col] > 0.0)[0]
        last = nonzero[-1] if len(nonzero) else table.shape[0] - 1
        cdf[last:, col] = 1.0
    return cdf


def _run_block(chain: MeasurementChain, cdfs: list[np.ndarray], size: int, seed: int, block: int):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    dim = chain.spin.dim
    state = np.full(size, chain.spin.index(chain.prepare_m), dtype=np.int64)
    alive = np.ones(size, dtype=bool)
    code = np.zeros(size, dtype=np.int64)
    for stage, cdf in zip(chain.stages, cdfs):
        u = rng.random(size)
        outcome = np.sum(u[:, None] >= cdf[:, state].T, axis=1)
        np.minimum(outcome, dim - 1, out=outcome)
        if stage.select is not None:
            alive &= outcome == chain.spin.index(stage.select)
        state = outcome
        code = code * dim + outcome
    codes, counts = np.unique(code[alive], return_counts=True)
    return dict(zip(codes.tolist(), counts.tolist())), int(size - alive.sum())


def run_chain(
    chain: MeasurementChain,
    samples: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> SimulationResult:
    """Sample ``samples`` runs through the chain; deterministic given ``seed`` and ``block_size``."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    cdfs = [_cdf_columns(t) for t in _stage_tables(chain)]
    sizes = [min(block_size, samples - start) for start in range(0, samples, block_size)]
    jobs = [(size, block) for block, size in enumerate(sizes)]

    def work(job):
        return _run_block(chain, cdfs, job[0], seed, job[1])

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, jobs))
    else:
        parts = [work(job) for job in jobs]

    merged: dict[int, int] = {}
    discarded = 0
    for part, dropped in parts:
        discarded += dropped
        for code, count in part.items():
            merged[code] = merged.get(code, 0) + count

    dim = chain.spin.dim
    n = len(chain.stages)
    ms = chain.spin.projections()
    counts: dict[Outcome, int] = {}
    for code, count in sorted(merged.items()):
        digits = []
        for _ in range(n):
            code, d = divmod(code, dim)
            digits.append(d)
        counts[tuple(ms[d] for d in reversed(digits))] = count
    return SimulationResult(
        chain, samples, seed, counts,
        analytic_chain_probabilities(chain), postselected_probabilities(chain), discarded,
    )


@dataclass(frozen=True)
class ComparisonRow:
    outcome: Optional[Outcome]  # None stands for the discarded runs
    count: int
    expected: float
    probability: float
    frequency: float
    z: float
    flagged: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    max_deviation: float

    @property
    def flags(self) -> list[ComparisonRow]:
        return [r for r in self.rows if r.flagged]

    @property
    def ok(self) -> bool:
        return not self.flags


def z_score(count: int, n: int, p: float) -> float:
    """Binomial z-score; infinite when a count is impossible under ``p``."""
    expected = n * p
    var = n * p * (1.0 - p)
    if var <= 0.0:
        return 0.0 if count == expected else math.copysign(math.inf, count - expected)
    return (count - expected) / math.sqrt(var)


def compare(result: SimulationResult, threshold: float = Z_FLAG) -> ComparisonReport:
    """z-scores of every accepted outcome (and the discard count) against the Born rule."""
    n = result.samples
    keys = [k for k in result.analytic if accepts(result.chain, k)]
    keys += [k for k in result.counts if k not in result.analytic]
    rows = []
    for key in keys:
        p = result.analytic.get(key, 0.0)
        c = result.counts.get(key, 0)
        if p == 0.0 and c == 0:
            continue
        z = z_score(c, n, p)
        rows.append(ComparisonRow(key, c, n * p, p, c / n, z, abs(z) > threshold))
    if any(s.select is not None for s in result.chain.stages):
        p = 1.0 - result.acceptance_probability
        z = z_score(result.discarded, n, max(p, 0.0))
        rows.append(ComparisonRow(None, result.discarded, n * p, p, result.discarded / n, z, abs(z) > threshold))
    max_dev = max((abs(r.frequency - r.probability) for r in rows), default=0.0)
    return ComparisonReport(tuple(rows), max_dev)
