"""Boundary post-processing: label adjustment and the boundary expander.

`adjust_labels` bridges a single-O gap between two predicted segments
and merges segments that touch, then re-encodes — the step that turns a
trained IOBW model into the IOBW+ configuration.  `expand_boundaries`
then grows each span over adjacent noun/noun-phrase tokens and
determiners.
"""

from dataclasses import dataclass

from .corpus import Document, Sentence, Span, decode_document
from .errors import ParseError
from .schemes import Scheme
from .textprep import token_kind

POST_MODES = ("none", "iobw+")

DEFAULT_NOUN_POS = frozenset({"NN", "NNS", "NNP", "NNPS"})
DEFAULT_NP_CHUNKS = frozenset({"B-NP", "I-NP"})
DEFAULT_DETERMINERS = frozenset(
    {"a", "an", "the", "this", "that", "these", "those",
     "his", "her", "its", "their"})
DEFAULT_EXPANDED_TYPES = frozenset({"PROBLEM", "TEST", "TREATMENT"})


@dataclass(frozen=True)
class ExpanderConfig:
    noun_pos_tags: frozenset[str] = DEFAULT_NOUN_POS
    np_chunk_tags: frozenset[str] = DEFAULT_NP_CHUNKS
    determiner_lexicon: frozenset[str] = DEFAULT_DETERMINERS
    enabled_event_types: frozenset[str] = DEFAULT_EXPANDED_TYPES


_CONFIG_KEYS = ("noun_pos_tags", "np_chunk_tags", "determiner_lexicon",
                "enabled_event_types")


def parse_expander_config(text: str) -> ExpanderConfig:
    """Read `key = a,b,c` lines; unset keys keep their defaults."""
    values = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _CONFIG_KEYS:
            raise ParseError(f"bad expander config line {line!r}", line_no)
        items = frozenset(v.strip() for v in value.split(",") if v.strip())
        if not items:
            raise ParseError(f"empty set for {key!r}", line_no)
        values[key] = items
    return ExpanderConfig(**values)


def adjust_labels(labels: list[str], scheme: Scheme) -> list[str]:
    """Bridge single-O gaps between segments and merge touching segments.

    Total over the scheme alphabet (ungrammatical input is segmented
    leniently first), idempotent, and on valid input never drops an I.
    """
    merged: list[tuple[int, int]] = []
    for start, end in scheme.lenient_segments(labels):
        if merged and start - merged[-1][1] <= 1:
            merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return scheme.encode(merged, len(labels))


def expand_boundaries(spans: list[Span], sentence: Sentence,
                      config: ExpanderConfig) -> list[Span]:
    """Grow spans over adjacent noun/NP/determiner tokens.

    Left side first, one token at a time; expansion stops at sentence
    bounds, punctuation-kind tokens, and the edge of any same-type span.
    Only configured event types expand; every output span contains its
    input span.
    """
    occupied: dict[str, set[int]] = {}
    for span in spans:
        occupied.setdefault(span.event_type, set()).update(
            range(span.start, span.end))

    def can_take(position: int, occ: set[int]) -> bool:
        if position in occ:
            return False
        token = sentence.tokens[position]
        if token_kind(token.surface) == "punctuation":
            return False
        return (token.pos in config.noun_pos_tags
                or token.chunk in config.np_chunk_tags
                or token.surface.lower() in config.determiner_lexicon)

    out = []
    for span in sorted(spans):
        if span.event_type not in config.enabled_event_types:
            out.append(span)
            continue
        occ = occupied[span.event_type]
        start, end = span.start, span.end
        while start > 0 and can_take(start - 1, occ):
            start -= 1
            occ.add(start)
        while end < len(sentence) and can_take(end, occ):
            occ.add(end)
            end += 1
        out.append(Span(span.sentence_index, start, end, span.event_type))
    return sorted(out)


def pipeline_spans(label_rows: list[list[str]], doc: Document, scheme: Scheme,
                   event_type: str, mode: str = "none",
                   config: ExpanderConfig = ExpanderConfig()) -> list[Span]:
    """Predicted label rows -> spans: repair, then (for "iobw+") adjust,
    decode, and expand."""
    if mode not in POST_MODES:
        raise ValueError(f"unknown post-processing mode {mode!r}")
    rows = [scheme.repair(row) for row in label_rows]
    if mode == "iobw+":
        rows = [adjust_labels(row, scheme) for row in rows]
    spans = decode_document(rows, scheme, event_type)
    if mode != "iobw+":
        return spans
    out = []
    for idx, sentence in enumerate(doc.sentences):
        here = [s for s in spans if s.sentence_index == idx]
        out.extend(expand_boundaries(here, sentence, config))
    return sorted(out)
