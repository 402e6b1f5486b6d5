"""Data-driven, explainable chart recommendation from knowledge-graph embeddings."""

__version__ = "0.1.0"
