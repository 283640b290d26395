"""Core data model for quantum-dot cellular automata layouts.

A cell is a square of four quantum dots holding two mobile electrons.  The
electrons occupy one of the two diagonals, and that choice encodes one bit:
polarization P = +1 (logic 1) puts them on the main diagonal (top-right and
bottom-left dots), P = -1 (logic 0) on the anti-diagonal.  A layout places
cells in the plane (nm units, y axis pointing up), gives each a role and a
clock zone, and fixes the cell order that the relaxation engine sweeps in.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

__all__ = [
    "TOKEN_RE",
    "ChargeModel",
    "GeometryParams",
    "RoleKind",
    "Role",
    "Cell",
    "Layout",
    "Violation",
    "dot_positions",
    "electron_positions",
    "validate",
]

# Legal form for cell ids and input/output labels.  Restricting these to a
# safe token alphabet is what lets the text format round-trip every valid
# layout (no whitespace, '=', '#' or ',' can appear inside a token).
TOKEN_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.+:-]*\Z")


class ChargeModel(Enum):
    """Charge placement used when a cell is reduced to point charges."""

    BARE = "bare"                # -e on each occupied dot, empty dots omitted
    NEUTRALIZED = "neutralized"  # -e/2 on occupied dots, +e/2 on empty dots


@dataclass(frozen=True)
class GeometryParams:
    """Cell geometry and electrostatic environment.  Lengths are in nm.

    ``radius_of_effect`` is the maximum center-to-center distance at which
    two cells interact at all; pairs further apart are skipped both in kink
    reports and in the relaxation engine.
    """

    cell_size: float = 18.0
    dot_diameter: float = 5.0
    pitch: float = 20.0
    relative_permittivity: float = 1.0
    charge_model: ChargeModel = ChargeModel.NEUTRALIZED
    radius_of_effect: float = 65.0

    def __post_init__(self) -> None:
        numbers = (
            self.cell_size,
            self.dot_diameter,
            self.pitch,
            self.relative_permittivity,
            self.radius_of_effect,
        )
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in numbers):
            raise ValueError("geometry parameters must be finite numbers")
        if not isinstance(self.charge_model, ChargeModel):
            raise ValueError("charge_model must be a ChargeModel")
        if not self.dot_diameter > 0:
            raise ValueError("dot_diameter must be positive")
        if not self.cell_size > self.dot_diameter:
            raise ValueError("cell_size must exceed dot_diameter")
        if self.pitch < self.cell_size:
            raise ValueError("pitch must be at least cell_size")
        if self.relative_permittivity <= 0:
            raise ValueError("relative_permittivity must be positive")
        if self.radius_of_effect < self.pitch:
            raise ValueError("radius_of_effect must be at least pitch")

    @property
    def dot_offset(self) -> float:
        """Distance from the cell center to each dot center, per axis."""
        return (self.cell_size - self.dot_diameter) / 2.0


class RoleKind(Enum):
    INPUT = "input"    # polarization pinned per test vector; labeled
    OUTPUT = "output"  # free cell that is read out; labeled
    FIXED = "fixed"    # permanently pinned driver
    NORMAL = "normal"  # free cell


@dataclass(frozen=True)
class Role:
    """Role of a cell, with the label or pinned polarization it requires."""

    kind: RoleKind
    label: str | None = None
    polarization: int | None = None

    def __post_init__(self) -> None:
        if self.kind in (RoleKind.INPUT, RoleKind.OUTPUT):
            if self.label is None or not TOKEN_RE.match(self.label):
                raise ValueError(f"{self.kind.value} role needs a token label")
            if self.polarization is not None:
                raise ValueError(f"{self.kind.value} role takes no polarization")
        elif self.kind is RoleKind.FIXED:
            if self.polarization not in (-1, 1):
                raise ValueError("fixed role needs polarization -1 or +1")
            if self.label is not None:
                raise ValueError("fixed role takes no label")
        else:
            if self.label is not None or self.polarization is not None:
                raise ValueError("normal role takes no label or polarization")

    @classmethod
    def input(cls, label: str) -> "Role":
        return cls(RoleKind.INPUT, label=label)

    @classmethod
    def output(cls, label: str) -> "Role":
        return cls(RoleKind.OUTPUT, label=label)

    @classmethod
    def fixed(cls, polarization: int) -> "Role":
        return cls(RoleKind.FIXED, polarization=polarization)

    @classmethod
    def normal(cls) -> "Role":
        return cls(RoleKind.NORMAL)


@dataclass(frozen=True)
class Cell:
    """One four-dot cell: identity, center position (nm), role, clock zone."""

    id: str
    x: float
    y: float
    role: Role
    zone: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not TOKEN_RE.match(self.id):
            raise ValueError(f"cell id {self.id!r} is not a valid token")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"cell {self.id}: position must be finite")
        if not isinstance(self.role, Role):
            raise ValueError(f"cell {self.id}: role must be a Role")
        if self.zone not in (0, 1, 2, 3):
            raise ValueError(f"cell {self.id}: clock zone must be 0..3")


@dataclass(frozen=True)
class Layout:
    """An ordered collection of cells sharing one geometry.

    Cell order is meaningful: it is the sweep order of the relaxation
    engine and the serialization order of the text format.
    """

    geometry: GeometryParams
    cells: tuple[Cell, ...]

    def __init__(self, geometry: GeometryParams, cells: Iterable[Cell]) -> None:
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "cells", tuple(cells))

    def __len__(self) -> int:
        return len(self.cells)

    def inputs(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.role.kind is RoleKind.INPUT)

    def outputs(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.role.kind is RoleKind.OUTPUT)

    def fixed_cells(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.role.kind is RoleKind.FIXED)

    def input_labels(self) -> tuple[str, ...]:
        """Input labels in sorted order (the vector bit order)."""
        return tuple(sorted(c.role.label for c in self.inputs()))

    def find(self, cell_id: str) -> Cell | None:
        for cell in self.cells:
            if cell.id == cell_id:
                return cell
        return None


def dot_positions(cell: Cell, geometry: GeometryParams) -> tuple[tuple[float, float], ...]:
    """Centers of the four dots: top-right, top-left, bottom-left, bottom-right."""
    h = geometry.dot_offset
    return (
        (cell.x + h, cell.y + h),
        (cell.x - h, cell.y + h),
        (cell.x - h, cell.y - h),
        (cell.x + h, cell.y - h),
    )


def electron_positions(
    cell: Cell, p: int, geometry: GeometryParams
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Occupied dot centers for polarization ``p``.

    P = +1 occupies the main diagonal (top-right, bottom-left), P = -1 the
    anti-diagonal (top-left, bottom-right).
    """
    if p not in (-1, 1):
        raise ValueError("polarization must be -1 or +1")
    h = geometry.dot_offset
    if p == 1:
        return ((cell.x + h, cell.y + h), (cell.x - h, cell.y - h))
    return ((cell.x - h, cell.y + h), (cell.x + h, cell.y - h))


@dataclass(frozen=True)
class Violation:
    """One layout rule broken, naming the rule and the offending cells."""

    rule: str
    cell_ids: tuple[str, ...]
    message: str


def validate(layout: Layout) -> list[Violation]:
    """Check layout-level rules; returns violations as data, never raises.

    Rules: cell ids unique; input/output labels unique per role; no two
    cell centers closer than cell_size; at least one input or fixed driver
    whenever a free (normal/output) cell exists.
    """
    out: list[Violation] = []
    cells = layout.cells

    seen: dict[str, int] = {}
    for cell in cells:
        seen[cell.id] = seen.get(cell.id, 0) + 1
    for cid, count in seen.items():
        if count > 1:
            out.append(Violation("duplicate-id", (cid,), f"cell id {cid!r} appears {count} times"))

    for kind in (RoleKind.INPUT, RoleKind.OUTPUT):
        by_label: dict[str, list[str]] = {}
        for cell in cells:
            if cell.role.kind is kind:
                by_label.setdefault(cell.role.label, []).append(cell.id)
        for label, ids in by_label.items():
            if len(ids) > 1:
                out.append(
                    Violation(
                        "duplicate-label",
                        tuple(ids),
                        f"{kind.value} label {label!r} used by cells {', '.join(ids)}",
                    )
                )

    min_gap = layout.geometry.cell_size
    for i, a in enumerate(cells):
        for b in cells[i + 1 :]:
            if math.hypot(b.x - a.x, b.y - a.y) < min_gap:
                out.append(
                    Violation(
                        "overlap",
                        (a.id, b.id),
                        f"cells {a.id} and {b.id} are closer than cell_size",
                    )
                )

    has_free = any(c.role.kind in (RoleKind.NORMAL, RoleKind.OUTPUT) for c in cells)
    has_driver = any(c.role.kind in (RoleKind.INPUT, RoleKind.FIXED) for c in cells)
    if has_free and not has_driver:
        free_ids = tuple(c.id for c in cells if c.role.kind in (RoleKind.NORMAL, RoleKind.OUTPUT))
        out.append(
            Violation(
                "no-driver",
                free_ids,
                "layout has free cells but no input or fixed cell to drive them",
            )
        )

    return out
