"""Exact distance oracles for directed planar graphs."""

from .graph import (
    INF,
    DistanceLabel,
    EmbeddedGraph,
    build_embedding,
    dual,
    generate,
    sssp_baseline,
)

__all__ = [
    "INF",
    "DistanceLabel",
    "EmbeddedGraph",
    "build_embedding",
    "dual",
    "generate",
    "sssp_baseline",
]

__version__ = "0.1.0"
