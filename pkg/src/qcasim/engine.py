"""Bistable relaxation engine with four-phase adiabatic clocking.

Every free cell responds to the field of its neighbors through the
saturating transfer function P = x / sqrt(1 + x^2), where x is the
kink-energy-weighted sum of neighbor polarizations divided by twice the
cell's current clock barrier energy gamma.  Gamma follows a trapezoid
waveform per clock zone (switch, hold, release, relax quarters), zones
offset by a quarter cycle.  Relaxation is plain Gauss-Seidel in layout
order, which keeps runs exactly reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .electrostatics import kink_energy
from .model import Cell, Layout, RoleKind

__all__ = [
    "TRUTH_MARGIN",
    "ClockShape",
    "ClockConfig",
    "ConvergenceFailure",
    "NoOutputError",
    "InputSchedule",
    "TraceSample",
    "Trace",
    "OutputReading",
    "Measurement",
    "OutputVerdict",
    "VectorVerdict",
    "TruthResult",
    "bistable_response",
    "gamma_at",
    "coupling_map",
    "relax",
    "simulate",
    "measure",
    "truth_check",
]

# Minimum |steady polarization| for a logic level to count as resolved.
TRUTH_MARGIN = 0.5

Vector = tuple[tuple[str, int], ...]  # ((label, +-1), ...) sorted by label


class ConvergenceFailure(RuntimeError):
    """Relaxation did not settle below tolerance within max_iters sweeps."""

    def __init__(
        self,
        residual: float,
        vector_index: int | None = None,
        sample_index: int | None = None,
    ) -> None:
        where = ""
        if vector_index is not None:
            where = f" (vector {vector_index}, sample {sample_index})"
        super().__init__(f"relaxation residual {residual:.3e} above tolerance{where}")
        self.residual = residual
        self.vector_index = vector_index
        self.sample_index = sample_index


class NoOutputError(ValueError):
    """The layout has no output cells to measure."""


class ClockShape(Enum):
    TRAPEZOID = "trapezoid"


@dataclass(frozen=True)
class ClockConfig:
    """Four-phase clock: barrier energies in joules, cycle length in samples."""

    gamma_high: float = 9.8e-22  # barriers low, cell free to repolarize
    gamma_low: float = 3.8e-23   # barriers high, cell latched
    samples_per_cycle: int = 128
    shape: ClockShape = ClockShape.TRAPEZOID

    def __post_init__(self) -> None:
        if not (self.gamma_high > self.gamma_low > 0):
            raise ValueError("need gamma_high > gamma_low > 0")
        n = self.samples_per_cycle
        if not isinstance(n, int) or n < 8 or n % 4 != 0:
            raise ValueError("samples_per_cycle must be an integer >= 8, multiple of 4")


def gamma_at(clock: ClockConfig, zone: int, sample: int) -> float:
    """Barrier energy of ``zone`` at integer ``sample`` (wraps mod cycle).

    Zone 0 quarters: ramp gamma_high -> gamma_low (switch), hold at
    gamma_low, ramp back up (release), hold at gamma_high (relax).  Zone z
    sees the same waveform delayed by z quarter-cycles.
    """
    if zone not in (0, 1, 2, 3):
        raise ValueError("zone must be 0..3")
    n = clock.samples_per_cycle
    quarter = n // 4
    s = (sample - zone * quarter) % n
    gh, gl = clock.gamma_high, clock.gamma_low
    if s < quarter:
        t = s / quarter
        return gh + (gl - gh) * t
    if s < 2 * quarter:
        return gl
    if s < 3 * quarter:
        t = (s - 2 * quarter) / quarter
        return gl + (gh - gl) * t
    return gh


@dataclass(frozen=True)
class InputSchedule:
    """The input vectors a simulation steps through, one clock cycle each."""

    labels: tuple[str, ...]
    vectors: tuple[Vector, ...]

    @classmethod
    def exhaustive(cls, labels: Iterable[str]) -> "InputSchedule":
        """All 2^n assignments in binary order; first sorted label is the
        most significant bit, with -1 as the 0 bit."""
        names = tuple(sorted(labels))
        if not names:
            raise ValueError("need at least one input label")
        n = len(names)
        vectors = []
        for value in range(2 ** n):
            bits = tuple(
                (names[i], +1 if (value >> (n - 1 - i)) & 1 else -1) for i in range(n)
            )
            vectors.append(bits)
        return cls(names, tuple(vectors))

    @classmethod
    def explicit(
        cls, labels: Iterable[str], vectors: Iterable[Mapping[str, int]]
    ) -> "InputSchedule":
        """A caller-chosen vector list; every vector must assign every label."""
        names = tuple(sorted(labels))
        rows: list[Vector] = []
        for i, vec in enumerate(vectors):
            if set(vec) != set(names):
                raise ValueError(f"vector {i} must assign exactly the labels {names}")
            if any(v not in (-1, 1) for v in vec.values()):
                raise ValueError(f"vector {i}: values must be -1 or +1")
            rows.append(tuple((name, vec[name]) for name in names))
        if not rows:
            raise ValueError("need at least one vector")
        return cls(names, tuple(rows))


def bistable_response(x: float) -> float:
    """Saturating cell response, odd in x and strictly inside (-1, 1)."""
    return x / math.sqrt(1.0 + x * x)


def coupling_map(layout: Layout) -> tuple[tuple[tuple[int, float], ...], ...]:
    """Per-cell neighbor list: (neighbor index, kink energy J) within
    radius_of_effect, under the layout's configured charge model."""
    cells = layout.cells
    radius = layout.geometry.radius_of_effect
    neighbors: list[list[tuple[int, float]]] = [[] for _ in cells]
    for i, a in enumerate(cells):
        for j in range(i + 1, len(cells)):
            b = cells[j]
            if math.hypot(b.x - a.x, b.y - a.y) > radius:
                continue
            e = kink_energy(a, b, layout.geometry)
            neighbors[i].append((j, e))
            neighbors[j].append((i, e))
    return tuple(tuple(row) for row in neighbors)


def _pinned_map(layout: Layout, assignments: Mapping[str, int]) -> dict[int, float]:
    """Resolve fixed roles plus explicit assignments into index -> value."""
    index = {cell.id: i for i, cell in enumerate(layout.cells)}
    pinned: dict[int, float] = {}
    for i, cell in enumerate(layout.cells):
        if cell.role.kind is RoleKind.FIXED:
            pinned[i] = float(cell.role.polarization)
    for cell_id, value in assignments.items():
        if cell_id not in index:
            raise ValueError(f"assignment names unknown cell {cell_id!r}")
        if value not in (-1, 1):
            raise ValueError(f"assignment for {cell_id!r} must be -1 or +1")
        i = index[cell_id]
        if i in pinned and pinned[i] != float(value):
            raise ValueError(f"assignment contradicts fixed cell {cell_id!r}")
        pinned[i] = float(value)
    for i, cell in enumerate(layout.cells):
        if cell.role.kind is RoleKind.INPUT and i not in pinned:
            raise ValueError(f"input cell {cell.id!r} ({cell.role.label}) not assigned")
    return pinned


def relax(
    layout: Layout,
    assignments: Mapping[str, int],
    gamma_per_zone: Sequence[float],
    initial_p: Sequence[float] | None = None,
    tolerance: float = 1e-7,
    max_iters: int = 1000,
    couplings: tuple[tuple[tuple[int, float], ...], ...] | None = None,
) -> tuple[list[float], int]:
    """Gauss-Seidel relaxation to a bistable fixed point at fixed gammas.

    ``assignments`` pins cells by id (every input must be covered; fixed
    cells are pinned automatically).  Sweeps update free cells in layout
    order until the largest per-sweep change drops below ``tolerance``.
    Returns (polarizations, sweeps used); raises ConvergenceFailure if
    ``max_iters`` sweeps are not enough.
    """
    cells = layout.cells
    if len(gamma_per_zone) != 4 or any(g <= 0 for g in gamma_per_zone):
        raise ValueError("gamma_per_zone must be four positive energies")
    if couplings is None:
        couplings = coupling_map(layout)
    pinned = _pinned_map(layout, assignments)

    if initial_p is None:
        p = [0.0] * len(cells)
    else:
        if len(initial_p) != len(cells):
            raise ValueError("initial_p length must match cell count")
        p = list(initial_p)
    for i, value in pinned.items():
        p[i] = value

    free = [i for i in range(len(cells)) if i not in pinned]
    residual = 0.0
    for sweep in range(1, max_iters + 1):
        residual = 0.0
        for i in free:
            total = 0.0
            for j, e_kink in couplings[i]:
                total += e_kink * p[j]
            x = total / (2.0 * gamma_per_zone[cells[i].zone])
            new = bistable_response(x)
            delta = abs(new - p[i])
            if delta > residual:
                residual = delta
            p[i] = new
        if residual < tolerance:
            return p, sweep
    raise ConvergenceFailure(residual)


@dataclass(frozen=True)
class TraceSample:
    """State after relaxing one clock sample of one vector."""

    vector_index: int
    sample_index: int
    gammas: tuple[float, float, float, float]
    polarizations: tuple[float, ...]
    iterations: int


@dataclass(frozen=True)
class Trace:
    """Full per-sample history of a simulation run."""

    cell_ids: tuple[str, ...]
    vectors: tuple[Vector, ...]
    samples_per_cycle: int
    samples: tuple[TraceSample, ...]


def simulate(
    layout: Layout,
    clock: ClockConfig,
    schedule: InputSchedule,
) -> Trace:
    """Run one clock cycle per input vector and record every sample.

    Inputs stay pinned at the vector's values for the whole cycle while the
    zone gammas sweep through the four phases.  Every vector anneals from
    unpolarized free cells: at the default permittivity the cell coupling
    dwarfs even the lowered barrier energy, so state carried across a
    vector boundary would latch a stable domain wall against the flipped
    input instead of following it.  Per-vector annealing also makes the
    vectors order independent.
    """
    labels = set(layout.input_labels())
    if set(schedule.labels) != labels:
        raise ValueError(f"schedule labels {schedule.labels} do not match layout inputs")
    by_label = {c.role.label: c.id for c in layout.inputs()}
    couplings = coupling_map(layout)
    n = len(layout.cells)
    samples: list[TraceSample] = []
    for vi, vector in enumerate(schedule.vectors):
        p = [0.0] * n
        assignments = {by_label[label]: value for label, value in vector}
        for s in range(clock.samples_per_cycle):
            gammas = (
                gamma_at(clock, 0, s),
                gamma_at(clock, 1, s),
                gamma_at(clock, 2, s),
                gamma_at(clock, 3, s),
            )
            try:
                p, iters = relax(
                    layout,
                    assignments,
                    gammas,
                    initial_p=p,
                    couplings=couplings,
                )
            except ConvergenceFailure as fail:
                raise ConvergenceFailure(fail.residual, vi, s) from None
            samples.append(TraceSample(vi, s, gammas, tuple(p), iters))
    return Trace(
        cell_ids=tuple(c.id for c in layout.cells),
        vectors=schedule.vectors,
        samples_per_cycle=clock.samples_per_cycle,
        samples=tuple(samples),
    )


@dataclass(frozen=True)
class OutputReading:
    """Steady and peak polarization of one output during one vector."""

    output: str
    vector_index: int
    steady: float
    max_abs: float


@dataclass(frozen=True)
class Measurement:
    vectors: tuple[Vector, ...]
    readings: tuple[OutputReading, ...]

    def reading(self, output: str, vector_index: int) -> OutputReading:
        for r in self.readings:
            if r.output == output and r.vector_index == vector_index:
                return r
        raise KeyError((output, vector_index))


def measure(trace: Trace, layout: Layout) -> Measurement:
    """Reduce a trace to per-output, per-vector steady and peak values.

    The steady value is taken at the last sample of the output zone's hold
    quarter (wrapping into the next quarter-cycle for zones 3 and up would
    leave the vector, so the index is reduced mod the cycle).
    """
    outputs = [(i, c) for i, c in enumerate(layout.cells) if c.role.kind is RoleKind.OUTPUT]
    if not outputs:
        raise NoOutputError("layout has no output cells")
    n = trace.samples_per_cycle
    quarter = n // 4
    readings: list[OutputReading] = []
    for i, cell in outputs:
        steady_sample = (2 * quarter - 1 + cell.zone * quarter) % n
        for vi in range(len(trace.vectors)):
            rows = trace.samples[vi * n : (vi + 1) * n]
            steady = rows[steady_sample].polarizations[i]
            peak = max(abs(row.polarizations[i]) for row in rows)
            readings.append(OutputReading(cell.role.label, vi, steady, peak))
    return Measurement(vectors=trace.vectors, readings=tuple(readings))


@dataclass(frozen=True)
class OutputVerdict:
    output: str
    expected: bool
    steady: float
    passed: bool  # sign matches expectation and |steady| >= TRUTH_MARGIN


@dataclass(frozen=True)
class VectorVerdict:
    vector_index: int
    inputs: Vector
    outputs: tuple[OutputVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outputs)


@dataclass(frozen=True)
class TruthResult:
    verdicts: tuple[VectorVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def truth_check(
    measurement: Measurement, expected: Callable[[Mapping[str, bool]], bool]
) -> TruthResult:
    """Compare measured output signs against a boolean truth function.

    ``expected`` maps input labels (True for +1) to the wanted output
    level; every output cell must show that level with at least
    TRUTH_MARGIN of steady polarization.
    """
    verdicts: list[VectorVerdict] = []
    outputs = sorted({r.output for r in measurement.readings})
    for vi, vector in enumerate(measurement.vectors):
        input_bits = {label: value > 0 for label, value in vector}
        want = bool(expected(input_bits))
        rows = []
        for name in outputs:
            r = measurement.reading(name, vi)
            sign_ok = (r.steady > 0) == want and r.steady != 0
            margin_ok = abs(r.steady) >= TRUTH_MARGIN
            rows.append(OutputVerdict(name, want, r.steady, sign_ok and margin_ok))
        verdicts.append(VectorVerdict(vi, vector, tuple(rows)))
    return TruthResult(tuple(verdicts))
