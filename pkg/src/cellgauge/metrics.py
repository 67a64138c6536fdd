"""Per-formula complexity measures and their per-workbook aggregation.

The public record carries 22 metric values under the stable column ids
M01..M22 plus bookkeeping counts. Averages over an empty formula set and
ratios with a zero denominator are absent (None), never zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean

from .expressions import Expr, Function, reference_wildcard_text, tree_depth, walk
from .graph import DependencyGraph, NotAFormulaCellError
from .model import Cell, CellCoordinate, CellKind, Workbook, classify_cells

DEFAULT_CONDITIONAL_FUNCTIONS = frozenset(
    {
        "IF",
        "IFS",
        "IFERROR",
        "IFNA",
        "COUNTIF",
        "COUNTIFS",
        "SUMIF",
        "SUMIFS",
        "AVERAGEIF",
        "AVERAGEIFS",
    }
)

METRIC_IDS = tuple(f"M{i:02d}" for i in range(1, 23))

METRIC_NAMES = {
    "M01": "avgAstDepth",
    "M02": "maxAstDepth",
    "M03": "formulaCellCount",
    "M04": "formulaToNonEmptyRatio",
    "M05": "inputCellCount",
    "M06": "inputToNonEmptyRatio",
    "M07": "formulaToInputRatio",
    "M08": "distinctFormulaCount",
    "M09": "avgFanOut",
    "M10": "maxFanOut",
    "M11": "avgFanIn",
    "M12": "maxFanIn",
    "M13": "avgConditionals",
    "M14": "maxConditionals",
    "M15": "avgSpreadingFactor",
    "M16": "maxSpreadingFactor",
    "M17": "avgFunctions",
    "M18": "maxFunctions",
    "M19": "avgDistinctFunctions",
    "M20": "maxDistinctFunctions",
    "M21": "avgElements",
    "M22": "maxElements",
}


def ast_depth(expr: Expr) -> int:
    """Depth of the tree; a lone leaf has depth 1, parentheses add a level."""
    return tree_depth(expr)


def element_count(expr: Expr) -> int:
    """Total node count, every variant included."""
    return sum(1 for _ in walk(expr))


def function_counts(expr: Expr) -> tuple[int, int]:
    """(total function nodes, distinct uppercase function names)."""
    names = [node.name for node in walk(expr) if isinstance(node, Function)]
    return len(names), len(set(names))


def conditional_count(expr: Expr, conditional_functions: frozenset[str] = DEFAULT_CONDITIONAL_FUNCTIONS) -> int:
    return sum(
        1
        for node in walk(expr)
        if isinstance(node, Function) and node.name in conditional_functions
    )


def normalized_key(expr: Expr) -> str:
    """Copy-equivalence key: serialization with references wildcarded.

    Formulas that share a key have identical structure and differ at most in
    which cells they point at.
    """
    return reference_wildcard_text(expr)


def spreading_factor(coordinate: CellCoordinate, graph: DependencyGraph) -> float:
    """Maximal Euclidean distance between the formula's referenced cells.

    Coordinates are (row, column, sheet index) points in a 3-D grid. The
    maximum over a set of expanded rectangles is attained at rectangle
    corners, so only the stored anchor points need to be compared.
    """
    try:
        points = graph.anchors[coordinate]
    except KeyError:
        raise NotAFormulaCellError(coordinate) from None
    best = 0.0
    count = len(points)
    for i in range(count - 1):
        s1, r1, c1 = points[i]
        for j in range(i + 1, count):
            s2, r2, c2 = points[j]
            d = math.sqrt((r1 - r2) ** 2 + (c1 - c2) ** 2 + (s1 - s2) ** 2)
            if d > best:
                best = d
    return best


@dataclass(frozen=True, slots=True)
class FormulaMetrics:
    ast_depth: int
    element_count: int
    function_count: int
    distinct_function_count: int
    conditional_count: int
    fan_out: int
    fan_in: int
    spreading_factor: float
    normalized_key: str


def formula_metrics(
    cell: Cell,
    graph: DependencyGraph,
    conditional_functions: frozenset[str] = DEFAULT_CONDITIONAL_FUNCTIONS,
) -> FormulaMetrics:
    formula = cell.formula
    if formula is None or formula.expr is None:
        raise ValueError(f"cell {cell.coordinate} has no parsed formula")
    expr = formula.expr
    total, distinct = function_counts(expr)
    return FormulaMetrics(
        ast_depth=ast_depth(expr),
        element_count=element_count(expr),
        function_count=total,
        distinct_function_count=distinct,
        conditional_count=conditional_count(expr, conditional_functions),
        fan_out=graph.fan_out(cell.coordinate),
        fan_in=graph.fan_in(cell.coordinate),
        spreading_factor=spreading_factor(cell.coordinate, graph),
        normalized_key=normalized_key(expr),
    )


@dataclass(frozen=True)
class MetricRecord:
    workbook_id: str
    sheet_count: int
    non_empty_cells: int
    input_cells: int
    formula_cells: int
    parse_failures: int
    metrics: dict[str, float | int | None]  # keyed by M01..M22


def _ratio(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator else None


def compute_record(
    workbook: Workbook,
    graph: DependencyGraph,
    classification: dict[CellCoordinate, CellKind] | None = None,
    *,
    conditional_functions: frozenset[str] = DEFAULT_CONDITIONAL_FUNCTIONS,
    workbook_id: str | None = None,
) -> MetricRecord:
    """All 22 metrics for one workbook.

    Formula cells that failed to parse count toward the formula-cell tally
    and its ratios but are excluded from AST-derived statistics.
    """
    if classification is None:
        classification = classify_cells(workbook, graph)
    non_empty = 0
    all_formula_cells = 0
    parsed_cells: list[Cell] = []
    for cell in workbook.iter_cells():
        if cell.has_content:
            non_empty += 1
        if cell.formula is not None:
            all_formula_cells += 1
            if cell.formula.expr is not None:
                parsed_cells.append(cell)
    input_cells = sum(1 for kind in classification.values() if kind is CellKind.INPUT_VALUE)

    metrics: dict[str, float | int | None] = dict.fromkeys(METRIC_IDS)
    metrics["M03"] = all_formula_cells
    metrics["M04"] = _ratio(all_formula_cells, non_empty)
    metrics["M05"] = input_cells
    metrics["M06"] = _ratio(input_cells, non_empty)
    metrics["M07"] = _ratio(all_formula_cells, input_cells)

    if parsed_cells:
        per_formula = [
            formula_metrics(cell, graph, conditional_functions) for cell in parsed_cells
        ]
        pairs = (
            ("M01", "M02", [m.ast_depth for m in per_formula]),
            ("M09", "M10", [m.fan_out for m in per_formula]),
            ("M11", "M12", [m.fan_in for m in per_formula]),
            ("M13", "M14", [m.conditional_count for m in per_formula]),
            ("M15", "M16", [m.spreading_factor for m in per_formula]),
            ("M17", "M18", [m.function_count for m in per_formula]),
            ("M19", "M20", [m.distinct_function_count for m in per_formula]),
            ("M21", "M22", [m.element_count for m in per_formula]),
        )
        for avg_id, max_id, values in pairs:
            metrics[avg_id] = fmean(values)
            metrics[max_id] = max(values)
        metrics["M08"] = len({m.normalized_key for m in per_formula})

    return MetricRecord(
        workbook_id=workbook_id if workbook_id is not None else workbook.name,
        sheet_count=len(workbook.sheets),
        non_empty_cells=non_empty,
        input_cells=input_cells,
        formula_cells=all_formula_cells,
        parse_failures=all_formula_cells - len(parsed_cells),
        metrics=metrics,
    )
