"""cellgauge: spreadsheet complexity analyzer.

Parses spreadsheet formulas into ASTs, resolves cell dependencies, computes
22 per-workbook complexity metrics, and aggregates them over corpora.
"""

from .analytics import (
    CorrelationMatrix,
    CorpusSummary,
    Histogram,
    HistogramSpec,
    aggregate,
    correlation_matrix,
    histogram,
    pearson,
    spearman,
)
from .expressions import (
    CellLocator,
    Constant,
    Expr,
    Function,
    OpKind,
    Operator,
    Parenthesis,
    Range,
    Reference,
    ValueType,
    column_index_to_letter,
    column_letter_to_index,
    serialize,
)
from .graph import (
    DependencyGraph,
    NotAFormulaCellError,
    build_graph,
    resolve_references,
)
from .interchange import (
    SchemaError,
    read_interchange,
    read_interchange_file,
    write_interchange,
    write_interchange_file,
)
from .lexer import BACKEND, tokenize
from .metrics import (
    DEFAULT_CONDITIONAL_FUNCTIONS,
    METRIC_IDS,
    METRIC_NAMES,
    FormulaMetrics,
    MetricRecord,
    ast_depth,
    compute_record,
    conditional_count,
    element_count,
    formula_metrics,
    function_counts,
    normalized_key,
    spreading_factor,
)
from .model import (
    Cell,
    CellCoordinate,
    CellKind,
    DefinedName,
    Formula,
    VisualProperty,
    Workbook,
    Worksheet,
    classify_cells,
)
from .parser import ParseError, parse, parse_formula, parse_text
from .tokens import LexError, Token, TokenKind
from .xlsx import (
    MalformedSheetXmlError,
    MissingWorkbookPartError,
    NotAZipError,
    XlsxError,
    read_xlsx,
)

__version__ = "0.1.0"
