"""Контракти даних: вирази, символи, функціонали, звіти та помилки."""

from src.contracts.enums import (
    ConstraintKind,
    OrderPolicy,
    OutputFormat,
    SpecialKind,
    VariationClass,
    Verdict,
    Wrt,
)
from src.contracts.errors import (
    AdmClosureError,
    CancelledError,
    LocalizationError,
    OracleError,
    ParseError,
    ResourceLimitError,
    SignatureError,
    SpecInvariantError,
    StructureError,
    UnsupportedSymbolError,
)
from src.contracts.functional import ConstraintSpec, SmearedFunctional
from src.contracts.report import (
    BracketOutcome,
    GradeBucket,
    LinearConditionReport,
    ObstructionReport,
    ReductionSite,
)
from src.contracts.symbol import TensorSymbol
from src.contracts.tensor import Expression, Factor, Index, Term

__all__ = [
    "AdmClosureError",
    "BracketOutcome",
    "CancelledError",
    "ConstraintKind",
    "ConstraintSpec",
    "Expression",
    "Factor",
    "GradeBucket",
    "Index",
    "LinearConditionReport",
    "LocalizationError",
    "ObstructionReport",
    "OracleError",
    "OrderPolicy",
    "OutputFormat",
    "ParseError",
    "ReductionSite",
    "ResourceLimitError",
    "SignatureError",
    "SmearedFunctional",
    "SpecInvariantError",
    "SpecialKind",
    "StructureError",
    "TensorSymbol",
    "Term",
    "UnsupportedSymbolError",
    "VariationClass",
    "Verdict",
    "Wrt",
]
