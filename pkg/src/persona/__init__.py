"""Personalized search re-ranking engine.

Builds a multidimensional user profile from browsing history, search
queries, click feedback, and local documents, then re-ranks externally
fetched search results by blending six profile-derived signals.
"""

from .model import (
    GradeCoefficients,
    KeywordEntry,
    KeywordTree,
    Profile,
    TopicGraph,
    TopicNode,
    Transition,
    UrlGrade,
    VisitRecord,
    WobConfig,
    load_profile,
    rotate_wob,
    save_profile,
)
from .rerank import (
    FixtureProvider,
    ResultGrade,
    SearchBank,
    SearchResult,
    compare_rankings,
    fetch_results,
    grade_result,
    record_click,
    rerank,
)

__all__ = [
    "GradeCoefficients",
    "KeywordEntry",
    "KeywordTree",
    "Profile",
    "TopicGraph",
    "TopicNode",
    "Transition",
    "UrlGrade",
    "VisitRecord",
    "WobConfig",
    "load_profile",
    "rotate_wob",
    "save_profile",
    "FixtureProvider",
    "ResultGrade",
    "SearchBank",
    "SearchResult",
    "compare_rankings",
    "fetch_results",
    "grade_result",
    "record_click",
    "rerank",
]

__version__ = "0.1.0"
