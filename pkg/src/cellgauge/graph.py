"""Cell dependency graph: reference resolution, fan-in/fan-out.

References resolve to concrete coordinate sets with ranges fully expanded;
unresolvable targets (unknown names, missing sheets, external workbooks,
#REF!) are counted as dangling instead of failing.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .expressions import CellLocator, Expr, Range, Reference, walk
from .model import Cell, CellCoordinate, Workbook, Worksheet
from .tokens import MAX_COL, MAX_ROW


class NotAFormulaCellError(LookupError):
    pass


@dataclass(frozen=True, slots=True)
class ResolvedReferences:
    cells: frozenset[CellCoordinate]
    dangling: int
    # Single-cell targets plus the four corners of every expanded range;
    # sufficient for the maximal pairwise distance over the full cell set.
    anchor_points: tuple[CellCoordinate, ...]


@dataclass(frozen=True, slots=True)
class DependencyGraph:
    forward: dict[CellCoordinate, frozenset[CellCoordinate]]
    reverse: dict[CellCoordinate, frozenset[CellCoordinate]]
    dangling: dict[CellCoordinate, int]
    anchors: dict[CellCoordinate, tuple[CellCoordinate, ...]]

    def formula_cells(self):
        return self.forward.keys()

    def fan_out(self, coordinate: CellCoordinate) -> int:
        try:
            return len(self.forward[coordinate])
        except KeyError:
            raise NotAFormulaCellError(coordinate) from None

    def fan_in(self, coordinate: CellCoordinate) -> int:
        if coordinate not in self.forward:
            raise NotAFormulaCellError(coordinate)
        targets = self.reverse.get(coordinate)
        return len(targets) if targets is not None else 0


def _clip(lo: int, hi: int, bound_lo: int, bound_hi: int) -> tuple[int, int] | None:
    lo, hi = max(lo, bound_lo), min(hi, bound_hi)
    if lo > hi:
        return None
    return lo, hi


class _Resolver:
    def __init__(self, workbook: Workbook, own_sheet: int):
        self.workbook = workbook
        self.own_sheet = own_sheet
        self.cells: set[CellCoordinate] = set()
        self.anchor_points: set[CellCoordinate] = set()
        self.dangling = 0

    def _sheet_index(self, sheet_name: str | None) -> int | None:
        if sheet_name is None:
            return self.own_sheet
        return self.workbook.sheet_index(sheet_name)

    def _worksheet(self, index: int) -> Worksheet:
        return self.workbook.sheet(index)

    def add_reference(self, ref: Reference) -> None:
        if ref.ref_error or ref.external:
            self.dangling += 1
            return
        if ref.by_name:
            self._add_defined_name(ref.name)  # type: ignore[arg-type]
            return
        self._add_single(ref.sheet, ref.locator)  # type: ignore[arg-type]

    def _add_defined_name(self, name: str) -> None:
        defined = self.workbook.defined_name(name)
        target = defined.expr if defined is not None else None
        if isinstance(target, Reference):
            # Only a concrete sheet-qualified grid target resolves; nested
            # names, externals and #REF! targets dangle.
            if (
                target.sheet is not None
                and target.locator is not None
                and not target.external
                and not target.ref_error
            ):
                self._add_single(target.sheet, target.locator)
                return
        elif isinstance(target, Range):
            if target.sheet is not None and not target.external:
                self._add_range(target.sheet, target.start, target.end)
                return
        self.dangling += 1

    def _add_single(self, sheet_name: str | None, locator: CellLocator) -> None:
        sheet = self._sheet_index(sheet_name)
        if (
            sheet is None
            or locator.row is None
            or locator.col is None
            or not 1 <= locator.row <= MAX_ROW
            or not 1 <= locator.col <= MAX_COL
        ):
            self.dangling += 1
            return
        coord = CellCoordinate(sheet, locator.row, locator.col)
        self.cells.add(coord)
        self.anchor_points.add(coord)

    def add_range(self, rng: Range) -> None:
        if rng.external:
            self.dangling += 1
            return
        self._add_range(rng.sheet, rng.start, rng.end)

    def _add_range(self, sheet_name: str | None, start: CellLocator, end: CellLocator) -> None:
        sheet = self._sheet_index(sheet_name)
        if sheet is None:
            self.dangling += 1
            return
        rows: tuple[int, int] | None
        cols: tuple[int, int] | None
        if start.row is not None and end.row is not None:
            rows = _clip(min(start.row, end.row), max(start.row, end.row), 1, MAX_ROW)
        else:
            # Full-column range: rows clip to the sheet's used bounding box.
            box = self._worksheet(sheet).used_box()
            rows = (box[0], box[2]) if box is not None else None
        if start.col is not None and end.col is not None:
            cols = _clip(min(start.col, end.col), max(start.col, end.col), 1, MAX_COL)
        else:
            box = self._worksheet(sheet).used_box()
            cols = (box[1], box[3]) if box is not None else None
        if rows is None or cols is None:
            return  # resolvable but empty (e.g. full-column range on an empty sheet)
        r1, r2 = rows
        c1, c2 = cols
        add_cell = self.cells.add
        for r in range(r1, r2 + 1):
            for c in range(c1, c2 + 1):
                add_cell(CellCoordinate(sheet, r, c))
        self.anchor_points.update(
            (
                CellCoordinate(sheet, r1, c1),
                CellCoordinate(sheet, r1, c2),
                CellCoordinate(sheet, r2, c1),
                CellCoordinate(sheet, r2, c2),
            )
        )

    def result(self) -> ResolvedReferences:
        return ResolvedReferences(
            cells=frozenset(self.cells),
            dangling=self.dangling,
            anchor_points=tuple(sorted(self.anchor_points)),
        )


def resolve_expr(expr: Expr, own_sheet: int, workbook: Workbook) -> ResolvedReferences:
    resolver = _Resolver(workbook, own_sheet)
    for node in walk(expr):
        if isinstance(node, Reference):
            resolver.add_reference(node)
        elif isinstance(node, Range):
            resolver.add_range(node)
    return resolver.result()


def resolve_references(formula_cell: Cell, workbook: Workbook) -> ResolvedReferences:
    """Expand a formula cell's references to concrete coordinates."""
    formula = formula_cell.formula
    if formula is None or formula.expr is None:
        raise ValueError(f"cell {formula_cell.coordinate} has no parsed formula")
    return resolve_expr(formula.expr, formula_cell.coordinate.sheet, workbook)


def build_graph(workbook: Workbook) -> DependencyGraph:
    """Resolve every successfully parsed formula cell; cycles are legal."""
    forward: dict[CellCoordinate, frozenset[CellCoordinate]] = {}
    dangling: dict[CellCoordinate, int] = {}
    anchors: dict[CellCoordinate, tuple[CellCoordinate, ...]] = {}
    reverse_sets: dict[CellCoordinate, set[CellCoordinate]] = defaultdict(set)
    for sheet in workbook.sheets:
        for cell in sheet.cells.values():
            formula = cell.formula
            if formula is None or formula.expr is None:
                continue
            resolved = resolve_expr(formula.expr, sheet.index, workbook)
            coord = cell.coordinate
            forward[coord] = resolved.cells
            dangling[coord] = resolved.dangling
            anchors[coord] = resolved.anchor_points
    for source, targets in forward.items():
        for target in targets:
            reverse_sets[target].add(source)
    reverse = {coord: frozenset(sources) for coord, sources in reverse_sets.items()}
    return DependencyGraph(forward=forward, reverse=reverse, dangling=dangling, anchors=anchors)
