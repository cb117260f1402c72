"""jsoniqml: a single-node JSONiq-subset engine with columnar frames and
declarative ML pipelines built from higher-order function items."""

from .engine import compile_query, evaluate_query, run_query, run_query_lines
from .errors import (
    DynamicError,
    EngineError,
    MaterializationCapError,
    QueryParseError,
    ResolutionError,
    SourceIOError,
)
from .items import (
    ArrayItem,
    AtomicValue,
    FunctionItem,
    Item,
    ObjectItem,
    SequenceValue,
    atomic_cast,
    canonical_serialize,
    deep_equal,
    effective_boolean_value,
    from_py,
    parse_canonical,
)
from .modes import POLICY_AUTO, POLICY_FORCE_LOCAL, POLICY_FRAME

__version__ = "0.1.0"

__all__ = [
    "ArrayItem",
    "AtomicValue",
    "DynamicError",
    "EngineError",
    "FunctionItem",
    "Item",
    "MaterializationCapError",
    "ObjectItem",
    "POLICY_AUTO",
    "POLICY_FORCE_LOCAL",
    "POLICY_FRAME",
    "QueryParseError",
    "ResolutionError",
    "SequenceValue",
    "SourceIOError",
    "atomic_cast",
    "canonical_serialize",
    "compile_query",
    "deep_equal",
    "effective_boolean_value",
    "evaluate_query",
    "from_py",
    "parse_canonical",
    "run_query",
    "run_query_lines",
]
