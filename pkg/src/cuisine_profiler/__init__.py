"""Cuisine preference profiles from food-photo recognition labels."""

from .corpus import Corpus, Recipe, cuisine_counts, load_corpus, split
from .distinctive import DistinctiveTable, build_distinctive_table
from .knn import KnnModel, KnnPrediction, evaluate, predict, set_distance, sweep_k
from .labels import Embedding, LabelAnnotation, PhotoRecord, embedding_similarity
from .normalize import NormalizationConfig, match_tokens, normalize_phrase
from .pipeline import FoodKnowledgeBase, PipelineReport, build_knowledge_base, run_pipeline
from .porter import porter_stem
from .profile import CuisineProfile, aggregate, load_profile, render_radar, save_profile
from .rules import DishNameTable, RuleClassification, classify
from .runner import RunConfig, StageError, load_config, run_end_to_end

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CuisineProfile",
    "DishNameTable",
    "DistinctiveTable",
    "Embedding",
    "FoodKnowledgeBase",
    "KnnModel",
    "KnnPrediction",
    "LabelAnnotation",
    "NormalizationConfig",
    "PhotoRecord",
    "PipelineReport",
    "Recipe",
    "RuleClassification",
    "RunConfig",
    "StageError",
    "aggregate",
    "build_distinctive_table",
    "build_knowledge_base",
    "classify",
    "cuisine_counts",
    "embedding_similarity",
    "evaluate",
    "load_config",
    "load_corpus",
    "load_profile",
    "match_tokens",
    "normalize_phrase",
    "porter_stem",
    "predict",
    "render_radar",
    "run_end_to_end",
    "run_pipeline",
    "save_profile",
    "set_distance",
    "split",
    "sweep_k",
]
