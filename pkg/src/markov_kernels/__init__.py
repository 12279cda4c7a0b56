"""Exact conditional expectation of one Markov kernel given another, on finite spaces."""

from .analysis import AnalysisReport, analyze, verify_paper
from .core import (
    Distribution,
    Embedding,
    FiniteSpace,
    MarkovKernel,
    PartialVectorFunction,
    Theorem1Report,
    VectorMeasure,
    are_independent,
    conditional_expectation,
    diagonal_product,
    dot_measure,
    expectation,
    image_distribution,
    lemma1_functional_check,
    theorem1_report,
)
from .diagnosis import (
    PAPER_TABLES,
    Category,
    ScenarioTable,
    classify,
    induced_model,
    parse_table,
    parse_table_text,
)
from .errors import (
    EnumerationBudgetError,
    InconsistencyError,
    MarkovKernelError,
    MaskedPointError,
    ParseError,
    StructuralError,
    ValidationError,
)
from .randgen import GenConfig, InstanceGenerator, SplitMix64, search_category

__version__ = "0.1.0"
