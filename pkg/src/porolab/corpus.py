"""The bundled corpus of set definitions."""

from __future__ import annotations

from importlib import resources

from .germ import elaborate, parse_specs


def corpus_texts() -> list[tuple[str, str]]:
    """(file name, text) pairs in a fixed order."""
    root = resources.files("porolab").joinpath("data/corpus")
    files = sorted(p for p in root.iterdir() if p.name.endswith(".germ"))
    return [(p.name, p.read_text()) for p in files]


def load_corpus():
    """Elaborated sets, one per definition, in file order."""
    out = []
    for _, text in corpus_texts():
        for spec in parse_specs(text):
            out.append(elaborate(spec))
    return out


def get(name: str):
    for E in load_corpus():
        if E.name == name:
            return E
    raise KeyError(name)
