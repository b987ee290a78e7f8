"""Shared corpus-building helpers."""

import pytest

from spantag.corpus import Document, Sentence, Span, make_token


def enumerate_span_sets(n):
    """All sets of non-overlapping, in-order [start, end) pairs over n tokens."""
    def walk(pos):
        if pos >= n:
            yield []
            return
        yield from walk(pos + 1)  # position left unlabeled
        for end in range(pos + 1, n + 1):
            for rest in walk(end):
                yield [(pos, end)] + rest
    return list(walk(0))


def build_sentence(*cells):
    """Sentence from (surface, pos, chunk) triples; offsets space-joined."""
    tokens = []
    offset = 0
    for surface, pos, chunk in cells:
        tokens.append(make_token(surface, offset, pos=pos, chunk=chunk))
        offset += len(surface) + 1
    return Sentence(tokens)


def build_doc(doc_id, sentences, spans=()):
    return Document(doc_id, list(sentences), list(spans))


@pytest.fixture
def tiny_doc():
    """Two sentences, one PROBLEM span and one TEST span."""
    s0 = build_sentence(("the", "DT", "B-NP"), ("chest", "NN", "I-NP"),
                        ("pain", "NN", "I-NP"), ("subsided", "VB", "O"))
    s1 = build_sentence(("an", "DT", "B-NP"), ("ecg", "NN", "I-NP"),
                        ("was", "VB", "O"), ("ordered", "VB", "O"))
    return build_doc("doc-a", [s0, s1],
                     [Span(0, 1, 3, "PROBLEM"), Span(1, 1, 2, "TEST")])
