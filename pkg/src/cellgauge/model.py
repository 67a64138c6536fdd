"""Workbook model: sheets, sparse cell grids, defined names, cell taxonomy.

All model values are treated as immutable once a Workbook is constructed;
they are safe to share across threads and processes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

from .expressions import Expr, ValueType

if TYPE_CHECKING:
    from .graph import DependencyGraph

__all__ = [
    "Cell",
    "CellCoordinate",
    "CellKind",
    "DefinedName",
    "Formula",
    "ValueType",
    "VisualProperty",
    "Workbook",
    "Worksheet",
    "classify_cells",
]


class CellCoordinate(NamedTuple):
    """Absolute cell position; all components are 1-based."""

    sheet: int
    row: int
    col: int


class CellKind(enum.Enum):
    EMPTY = "empty"
    LABEL = "label"
    INPUT_VALUE = "input"
    FORMULA = "formula"


@dataclass(frozen=True, slots=True)
class VisualProperty:
    key: str
    value: str


@dataclass(frozen=True, slots=True)
class Formula:
    """Formula content of a cell; text survives even when parsing fails."""

    text: str  # formula body, without the leading "="
    expr: Expr | None
    error: str | None = None


@dataclass(frozen=True, slots=True)
class Cell:
    coordinate: CellCoordinate
    value: float | str | bool | None = None
    value_type: ValueType | None = None
    formula: Formula | None = None
    visual_properties: tuple[VisualProperty, ...] = ()

    def __post_init__(self) -> None:
        if self.value is not None and self.formula is not None:
            raise ValueError(f"cell {self.coordinate} has both a literal and a formula")
        if self.value is not None and self.value_type is None:
            raise ValueError(f"cell {self.coordinate} has a literal without a value type")

    @property
    def has_content(self) -> bool:
        return self.value is not None or self.formula is not None


@dataclass(frozen=True, slots=True)
class DefinedName:
    name: str
    target: str  # target text as found in the workbook, e.g. "Sheet1!$A$1:$B$2"
    expr: Expr | None  # parsed target; None when unparseable (uses dangle)


class Worksheet:
    """Sparse grid of non-default cells; index is the 1-based workbook ordinal."""

    __slots__ = ("name", "index", "cells", "_used_box")

    def __init__(self, name: str, index: int, cells: dict[tuple[int, int], Cell]):
        if index < 1:
            raise ValueError(f"sheet index must be >= 1, got {index}")
        self.name = name
        self.index = index
        self.cells = cells
        self._used_box: tuple[int, int, int, int] | None | bool = False

    def used_box(self) -> tuple[int, int, int, int] | None:
        """(min_row, min_col, max_row, max_col) of stored cells, or None if empty."""
        if self._used_box is False:
            if self.cells:
                rows = [rc[0] for rc in self.cells]
                cols = [rc[1] for rc in self.cells]
                self._used_box = (min(rows), min(cols), max(rows), max(cols))
            else:
                self._used_box = None
        return self._used_box  # type: ignore[return-value]

    def __repr__(self) -> str:
        return f"Worksheet({self.name!r}, index={self.index}, cells={len(self.cells)})"


class Workbook:
    __slots__ = ("name", "sheets", "defined_names", "_sheet_index_by_name")

    def __init__(
        self,
        name: str,
        sheets: tuple[Worksheet, ...],
        defined_names: dict[str, DefinedName] | None = None,
    ):
        seen: dict[str, int] = {}
        for sheet in sheets:
            key = sheet.name.casefold()
            if key in seen:
                raise ValueError(f"duplicate sheet name {sheet.name!r}")
            seen[key] = sheet.index
        self.name = name
        self.sheets = sheets
        self.defined_names = defined_names or {}
        self._sheet_index_by_name = seen

    def sheet_index(self, sheet_name: str) -> int | None:
        """1-based index for a sheet name (case-insensitive), or None."""
        return self._sheet_index_by_name.get(sheet_name.casefold())

    def sheet(self, index: int) -> Worksheet:
        return self.sheets[index - 1]

    def defined_name(self, name: str) -> DefinedName | None:
        return self.defined_names.get(name.casefold())

    def iter_cells(self):
        for sheet in self.sheets:
            yield from sheet.cells.values()

    def __repr__(self) -> str:
        return f"Workbook({self.name!r}, sheets={len(self.sheets)})"


def classify_cells(
    workbook: Workbook, graph: "DependencyGraph"
) -> dict[CellCoordinate, CellKind]:
    """Assign exactly one CellKind to every stored or referenced coordinate.

    Formula wins outright; any other referenced cell is an input cell even
    when it holds nothing (blank cells pulled into ranges are data entry
    points); remaining non-empty cells are labels.
    """
    kinds: dict[CellCoordinate, CellKind] = {}
    referenced = graph.reverse
    for sheet in workbook.sheets:
        for cell in sheet.cells.values():
            coord = cell.coordinate
            if cell.formula is not None:
                kinds[coord] = CellKind.FORMULA
            elif coord in referenced:
                kinds[coord] = CellKind.INPUT_VALUE
            elif cell.has_content:
                kinds[coord] = CellKind.LABEL
            else:
                kinds[coord] = CellKind.EMPTY
    for coord in referenced:
        if coord not in kinds:
            kinds[coord] = CellKind.INPUT_VALUE
    return kinds
