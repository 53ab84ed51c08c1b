"""Data-driven similarity measures and case retrieval for case-based reasoning."""

from .errors import CBRError, DegenerateSpreadWarning
from .evaluation import EvalReport, euclidean_baseline, loo_eval
from .io import SchemaConfig, ingest_csv, infer_schema, load_bundle, load_model, load_schema_config, save_model
from .model import AttributeSpec, Case, CaseBase, Kind, Query, build_casebase, validate_case, validate_query
from .profiler import CategoryInventory, StatsProfile, categorical_profile, numeric_profile, quantile
from .retrieval import RetrievalResult, retrieve, retrieve_batch
from .similarity import (
    ExactMatchMeasure,
    OrdinalTableMeasure,
    PolynomialMeasure,
    SimilarityModel,
    derive_degree,
    exact_match_similarity,
    global_similarity,
    numeric_similarity,
    ordinal_similarity,
    synthesize_model,
)

__all__ = [
    "AttributeSpec",
    "CBRError",
    "Case",
    "CaseBase",
    "CategoryInventory",
    "DegenerateSpreadWarning",
    "EvalReport",
    "ExactMatchMeasure",
    "Kind",
    "OrdinalTableMeasure",
    "PolynomialMeasure",
    "Query",
    "RetrievalResult",
    "SchemaConfig",
    "SimilarityModel",
    "StatsProfile",
    "build_casebase",
    "categorical_profile",
    "derive_degree",
    "euclidean_baseline",
    "exact_match_similarity",
    "global_similarity",
    "infer_schema",
    "ingest_csv",
    "load_bundle",
    "load_model",
    "load_schema_config",
    "loo_eval",
    "numeric_profile",
    "numeric_similarity",
    "ordinal_similarity",
    "quantile",
    "retrieve",
    "retrieve_batch",
    "save_model",
    "synthesize_model",
    "validate_case",
    "validate_query",
]

__version__ = "0.1.0"
