"""Shipped graph corpus (``nlsg-graph v1`` files under ``corpus/``)."""

from __future__ import annotations

from importlib import resources

from ..multigraph import Multigraph, from_text


def _root():
    return resources.files(__name__) / "corpus"


def corpus_names() -> list[str]:
    return sorted(p.name[:-len(".graph")] for p in _root().iterdir() if p.name.endswith(".graph"))


def corpus_graph(name: str) -> Multigraph:
    path = _root() / f"{name}.graph"
    if not path.is_file():
        raise KeyError(f"no corpus graph named {name!r}; available: {', '.join(corpus_names())}")
    return from_text(path.read_text())


def corpus() -> dict[str, Multigraph]:
    return {name: corpus_graph(name) for name in corpus_names()}
