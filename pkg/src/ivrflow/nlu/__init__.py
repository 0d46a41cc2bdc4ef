from .classify import (
    ClassificationResult,
    ClassifierBackendConfig,
    classify,
    keyword_scores,
    mock_classify,
)
from .confirm import Confirmation, ConfirmationLexicon, parse_confirmation
from .prompt import DEFAULT_TEMPLATE, build_prompt, check_template
from .retrieval import KnowledgeDoc, KnowledgeStore, retrieve
from .taxonomy import IntentClass, IntentTaxonomy

__all__ = [
    "ClassificationResult",
    "ClassifierBackendConfig",
    "Confirmation",
    "ConfirmationLexicon",
    "DEFAULT_TEMPLATE",
    "IntentClass",
    "IntentTaxonomy",
    "KnowledgeDoc",
    "KnowledgeStore",
    "build_prompt",
    "check_template",
    "classify",
    "keyword_scores",
    "mock_classify",
    "parse_confirmation",
    "retrieve",
]
