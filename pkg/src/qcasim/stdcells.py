"""Generators for the standard test circuits.

All generators are pure: same arguments, same layout.  Cells are listed in
signal-flow order (drivers first), which is also the engine's sweep order.
Ids are c0, c1, ... in that order; inputs are labeled a (then b, c), the
output is labeled b for two-terminal circuits and m for the majority gate.
"""

from __future__ import annotations

from .model import Cell, GeometryParams, Layout, Role

__all__ = [
    "gen_wire",
    "gen_majority",
    "gen_conventional_inverter",
    "gen_minimal_inverter",
]


def gen_wire(n: int, geometry: GeometryParams | None = None) -> Layout:
    """Straight horizontal wire of ``n`` >= 2 cells along +x."""
    if n < 2:
        raise ValueError("a wire needs at least 2 cells")
    geometry = geometry or GeometryParams()
    step = geometry.pitch
    cells = [Cell("c0", 0.0, 0.0, Role.input("a"))]
    for i in range(1, n - 1):
        cells.append(Cell(f"c{i}", i * step, 0.0, Role.normal()))
    cells.append(Cell(f"c{n - 1}", (n - 1) * step, 0.0, Role.output("b")))
    return Layout(geometry, cells)


def gen_majority(geometry: GeometryParams | None = None) -> Layout:
    """Five-cell majority gate: three inputs around a device cell, one output.

    Output follows the majority of inputs a, b, c.
    """
    geometry = geometry or GeometryParams()
    step = geometry.pitch
    cells = [
        Cell("c0", -step, 0.0, Role.input("a")),
        Cell("c1", 0.0, step, Role.input("b")),
        Cell("c2", 0.0, -step, Role.input("c")),
        Cell("c3", 0.0, 0.0, Role.normal()),
        Cell("c4", step, 0.0, Role.output("m")),
    ]
    return Layout(geometry, cells)


def gen_conventional_inverter(geometry: GeometryParams | None = None) -> Layout:
    """Eleven-cell split-and-reconverge inverter.

    A three-cell input wire forks into two parallel branches one pitch above
    and below; both branch ends sit diagonally to a convergence cell, whose
    anti-aligning coupling performs the single inversion; a final cell reads
    it out.
    """
    geometry = geometry or GeometryParams()
    s = geometry.pitch
    cells = [
        Cell("c0", 0.0, 0.0, Role.input("a")),
        Cell("c1", s, 0.0, Role.normal()),
        Cell("c2", 2 * s, 0.0, Role.normal()),
        Cell("c3", 2 * s, s, Role.normal()),
        Cell("c4", 3 * s, s, Role.normal()),
        Cell("c5", 4 * s, s, Role.normal()),
        Cell("c6", 2 * s, -s, Role.normal()),
        Cell("c7", 3 * s, -s, Role.normal()),
        Cell("c8", 4 * s, -s, Role.normal()),
        Cell("c9", 5 * s, 0.0, Role.normal()),
        Cell("c10", 6 * s, 0.0, Role.output("b")),
    ]
    return Layout(geometry, cells)


def gen_minimal_inverter(extra: int, geometry: GeometryParams | None = None) -> Layout:
    """Minimal diagonal inverter family, ``extra`` >= -1 (2 or more cells).

    The base (extra = 0) is input -> coupler -> diagonally offset inverting
    cell, which is the output.  Positive ``extra`` appends that many cells
    along +x after the inverting cell and moves the output label to the last
    one.  extra = -1 drops only the coupler, leaving the inverting cell in
    place; the input then drives it across the longer offset, so the output
    still inverts but settles at noticeably lower polarization.
    """
    if extra < -1:
        raise ValueError("extra must be at least -1")
    geometry = geometry or GeometryParams()
    s = geometry.pitch
    if extra == -1:
        cells = [
            Cell("c0", 0.0, 0.0, Role.input("a")),
            Cell("c1", 2 * s, s, Role.output("b")),
        ]
        return Layout(geometry, cells)
    cells = [
        Cell("c0", 0.0, 0.0, Role.input("a")),
        Cell("c1", s, 0.0, Role.normal()),
        Cell("c2", 2 * s, s, Role.normal()),
    ]
    for i in range(extra):
        cells.append(Cell(f"c{3 + i}", (3 + i) * s, s, Role.normal()))
    last = cells.pop()
    cells.append(Cell(last.id, last.x, last.y, Role.output("b"), last.zone))
    return Layout(geometry, cells)
