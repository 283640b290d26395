"""Plain-text layout format (.qcl) and the CSV export schemas.

A document is line based: a ``qcl 1`` header, an optional ``geometry`` line,
an optional ``clock`` line, then one ``cell`` line per cell in layout order.
Fields are ``key=value`` tokens separated by whitespace; ``#`` starts a
comment; blank lines are ignored.  Parsing either returns a layout or raises
ParseError with a 1-based line number -- any text input must end in one of
those two outcomes.  Serialization is canonical: fixed key order, shortest
exact decimals for nm values, 6-significant-digit scientific notation for
energies, so equal layouts produce byte-identical documents.
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping, Sequence

from .engine import ClockConfig, Measurement, Trace
from .electrostatics import KinkReport
from .model import Cell, ChargeModel, GeometryParams, Layout, Role, RoleKind

__all__ = [
    "ParseError",
    "parse_qcl",
    "serialize_qcl",
    "parse_vectors",
    "kink_report_csv",
    "trace_csv",
    "measurement_csv",
    "format_energy",
    "format_polarization",
]


class ParseError(ValueError):
    """Malformed .qcl or vector-file input; carries the 1-based line number."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


_GEOMETRY_KEYS = ("cell_size", "dot_diameter", "pitch", "epsilon_r", "charge_model", "radius")
_CLOCK_KEYS = ("high", "low", "samples")
_CELL_KEYS = ("id", "x", "y", "role", "label", "p", "zone")
_ROLE_NAMES = {kind.value: kind for kind in RoleKind}


def _significant_lines(text: str) -> Iterator[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def _key_values(tokens: Sequence[str], line: int, allowed: Sequence[str]) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key or not value:
            raise ParseError(line, f"expected key=value, got {token!r}")
        if key not in allowed:
            raise ParseError(line, f"unknown key {key!r}")
        if key in pairs:
            raise ParseError(line, f"duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _number(pairs: Mapping[str, str], key: str, line: int, default: float) -> float:
    if key not in pairs:
        return default
    try:
        value = float(pairs[key])
    except ValueError:
        raise ParseError(line, f"bad number for {key!r}: {pairs[key]!r}") from None
    if not math.isfinite(value):
        raise ParseError(line, f"{key!r} must be finite")
    return value


def _integer(pairs: Mapping[str, str], key: str, line: int, default: int) -> int:
    if key not in pairs:
        return default
    try:
        return int(pairs[key], 10)
    except ValueError:
        raise ParseError(line, f"bad integer for {key!r}: {pairs[key]!r}") from None


def _parse_geometry(tokens: Sequence[str], line: int) -> GeometryParams:
    pairs = _key_values(tokens, line, _GEOMETRY_KEYS)
    defaults = GeometryParams()
    model = defaults.charge_model
    if "charge_model" in pairs:
        try:
            model = ChargeModel(pairs["charge_model"])
        except ValueError:
            raise ParseError(line, f"unknown charge_model {pairs['charge_model']!r}") from None
    try:
        return GeometryParams(
            cell_size=_number(pairs, "cell_size", line, defaults.cell_size),
            dot_diameter=_number(pairs, "dot_diameter", line, defaults.dot_diameter),
            pitch=_number(pairs, "pitch", line, defaults.pitch),
            relative_permittivity=_number(pairs, "epsilon_r", line, defaults.relative_permittivity),
            charge_model=model,
            radius_of_effect=_number(pairs, "radius", line, defaults.radius_of_effect),
        )
    except ValueError as err:
        raise ParseError(line, str(err)) from None


def _parse_clock(tokens: Sequence[str], line: int) -> ClockConfig:
    pairs = _key_values(tokens, line, _CLOCK_KEYS)
    defaults = ClockConfig()
    try:
        return ClockConfig(
            gamma_high=_number(pairs, "high", line, defaults.gamma_high),
            gamma_low=_number(pairs, "low", line, defaults.gamma_low),
            samples_per_cycle=_integer(pairs, "samples", line, defaults.samples_per_cycle),
        )
    except ValueError as err:
        raise ParseError(line, str(err)) from None


def _parse_cell(tokens: Sequence[str], line: int) -> Cell:
    pairs = _key_values(tokens, line, _CELL_KEYS)
    for key in ("id", "x", "y", "role"):
        if key not in pairs:
            raise ParseError(line, f"cell line missing required key {key!r}")
    role_name = pairs["role"]
    if role_name not in _ROLE_NAMES:
        raise ParseError(line, f"unknown role {role_name!r}")
    kind = _ROLE_NAMES[role_name]
    label = pairs.get("label")
    if kind in (RoleKind.INPUT, RoleKind.OUTPUT):
        if label is None:
            raise ParseError(line, f"role {role_name!r} requires label=")
    elif label is not None:
        raise ParseError(line, f"role {role_name!r} takes no label")
    polarization = None
    if kind is RoleKind.FIXED:
        if "p" not in pairs:
            raise ParseError(line, "role 'fixed' requires p=")
        polarization = _integer(pairs, "p", line, 0)
    elif "p" in pairs:
        raise ParseError(line, f"role {role_name!r} takes no p")
    try:
        role = Role(kind, label=label, polarization=polarization)
        return Cell(
            id=pairs["id"],
            x=_number(pairs, "x", line, 0.0),
            y=_number(pairs, "y", line, 0.0),
            role=role,
            zone=_integer(pairs, "zone", line, 0),
        )
    except ParseError:
        raise
    except ValueError as err:
        raise ParseError(line, str(err)) from None


def parse_qcl(text: str) -> tuple[Layout, ClockConfig | None]:
    """Parse a .qcl document into (layout, clock-or-None).

    The geometry and clock lines are optional (defaults apply) but must
    appear at most once each and before any cell line.
    """
    lines = _significant_lines(text)
    try:
        line, header = next(lines)
    except StopIteration:
        raise ParseError(1, "empty document, expected 'qcl 1' header") from None
    if header.split() != ["qcl", "1"]:
        raise ParseError(line, f"expected 'qcl 1' header, got {header!r}")

    geometry: GeometryParams | None = None
    clock: ClockConfig | None = None
    cells: list[Cell] = []
    ids: set[str] = set()
    for line, content in lines:
        directive, *tokens = content.split()
        if directive == "geometry":
            if geometry is not None:
                raise ParseError(line, "duplicate geometry line")
            if cells:
                raise ParseError(line, "geometry line must precede cell lines")
            geometry = _parse_geometry(tokens, line)
        elif directive == "clock":
            if clock is not None:
                raise ParseError(line, "duplicate clock line")
            if cells:
                raise ParseError(line, "clock line must precede cell lines")
            clock = _parse_clock(tokens, line)
        elif directive == "cell":
            cell = _parse_cell(tokens, line)
            if cell.id in ids:
                raise ParseError(line, f"duplicate cell id {cell.id!r}")
            ids.add(cell.id)
            cells.append(cell)
        else:
            raise ParseError(line, f"unknown directive {directive!r}")
    return Layout(geometry or GeometryParams(), cells), clock


def _format_length(value: float) -> str:
    # Shortest exact decimal: integers drop the trailing .0, anything else
    # uses repr, which round-trips doubles exactly.
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_energy(value: float) -> str:
    """Scientific notation with 6 significant digits, for joule columns."""
    return f"{value:.5e}"


def format_polarization(value: float) -> str:
    """Fixed point with 9 decimals, for polarization columns."""
    return f"{value:.9f}"


def serialize_qcl(layout: Layout, clock: ClockConfig | None = None) -> str:
    """Canonical text form; parse(serialize(layout)) reproduces the layout."""
    g = layout.geometry
    lines = [
        "qcl 1",
        "geometry"
        f" cell_size={_format_length(g.cell_size)}"
        f" dot_diameter={_format_length(g.dot_diameter)}"
        f" pitch={_format_length(g.pitch)}"
        f" epsilon_r={_format_length(g.relative_permittivity)}"
        f" charge_model={g.charge_model.value}"
        f" radius={_format_length(g.radius_of_effect)}",
    ]
    if clock is not None:
        lines.append(
            "clock"
            f" high={format_energy(clock.gamma_high)}"
            f" low={format_energy(clock.gamma_low)}"
            f" samples={clock.samples_per_cycle}"
        )
    for cell in layout.cells:
        parts = [
            f"cell id={cell.id}",
            f"x={_format_length(cell.x)}",
            f"y={_format_length(cell.y)}",
            f"role={cell.role.kind.value}",
        ]
        if cell.role.label is not None:
            parts.append(f"label={cell.role.label}")
        if cell.role.polarization is not None:
            parts.append(f"p={cell.role.polarization:+d}")
        parts.append(f"zone={cell.zone}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_vectors(text: str, labels: Sequence[str]) -> list[dict[str, int]]:
    """Parse an explicit vector file: one vector per line, ``label=+-1``
    tokens, every input label assigned on every line."""
    wanted = set(labels)
    vectors: list[dict[str, int]] = []
    for line, content in _significant_lines(text):
        row: dict[str, int] = {}
        for token in content.split():
            key, sep, value = token.partition("=")
            if not sep or not key or not value:
                raise ParseError(line, f"expected label=value, got {token!r}")
            if key not in wanted:
                raise ParseError(line, f"unknown input label {key!r}")
            if key in row:
                raise ParseError(line, f"duplicate label {key!r}")
            try:
                number = int(value, 10)
            except ValueError:
                raise ParseError(line, f"bad value for {key!r}: {value!r}") from None
            if number not in (-1, 1):
                raise ParseError(line, f"value for {key!r} must be -1 or +1")
            row[key] = number
        missing = wanted - set(row)
        if missing:
            raise ParseError(line, f"vector missing input label(s) {sorted(missing)}")
        vectors.append(row)
    if not vectors:
        raise ParseError(1, "vector file has no vectors")
    return vectors


def kink_report_csv(report: KinkReport) -> str:
    """Pair table with a trailing TOTAL row, energies in 6-digit scientific."""
    rows = ["id_a,id_b,distance_nm,ekink_bare_J,ekink_neut_J"]
    for pair in report.pairs:
        rows.append(
            f"{pair.id_a},{pair.id_b},{pair.distance_nm:.6g},"
            f"{format_energy(pair.bare)},{format_energy(pair.neutralized)}"
        )
    rows.append(f"TOTAL,,,{format_energy(report.total_bare)},{format_energy(report.total_neutralized)}")
    return "\n".join(rows) + "\n"


def trace_csv(trace: Trace) -> str:
    """One row per sample: vector, sample, the four zone gammas, every cell's P."""
    header = ["vector", "sample", "gamma_z0", "gamma_z1", "gamma_z2", "gamma_z3"]
    header.extend(trace.cell_ids)
    rows = [",".join(header)]
    for sample in trace.samples:
        cols = [str(sample.vector_index), str(sample.sample_index)]
        cols.extend(format_energy(g) for g in sample.gammas)
        cols.extend(format_polarization(p) for p in sample.polarizations)
        rows.append(",".join(cols))
    return "\n".join(rows) + "\n"


def measurement_csv(measurement: Measurement) -> str:
    """One row per (output, vector): steady and peak polarization."""
    rows = ["output,vector,steady_P,max_abs_P"]
    for r in measurement.readings:
        rows.append(
            f"{r.output},{r.vector_index},"
            f"{format_polarization(r.steady)},{format_polarization(r.max_abs)}"
        )
    return "\n".join(rows) + "\n"
