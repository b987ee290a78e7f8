"""Annotated-document data model, column-file and standoff I/O, and
corpus profile statistics.

Column format (UTF-8): lines beginning "#!" are directives, a blank
line ends a sentence, and every other line is one token with
tab-separated cells matching the declared columns:

    #! columns = surface stem pos chunk label:IOB:PROBLEM label:IOB:TEST
    #! doc = report-0001
    chest	chest	NN	B-NP	B	O
    pain	pain	NN	I-NP	I	O

`label:<SCHEME>:<TYPE>` columns carry bare scheme labels for one event
type (the canonical form); a single `label:<SCHEME>` column carries
type-suffixed labels ("B-PROBLEM") for all types jointly.  A missing
stem column is recomputed at load; missing pos/chunk cells fall back to
the placeholder "_NIL_".

Standoff span format: one span per line,
`doc_id<TAB>sentence_index<TAB>start<TAB>end<TAB>type`.
"""

import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import ParseError, SchemeValidityError
from .schemes import Scheme, get_scheme
from .textprep import porter_stem, tokenize

PLACEHOLDER = "_NIL_"

EVENT_TYPES = ("PROBLEM", "TEST", "TREATMENT", "OCCURRENCE", "EVIDENTIAL")

_TYPE_RE = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    char_start: int
    char_end: int
    stem: str = PLACEHOLDER
    pos: str = PLACEHOLDER
    chunk: str = PLACEHOLDER

    def __post_init__(self):
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"bad token surface {self.surface!r}")
        if not self.char_start < self.char_end:
            raise ValueError(
                f"bad offsets [{self.char_start},{self.char_end}) "
                f"for {self.surface!r}")


@dataclass(frozen=True, order=True, slots=True)
class Span:
    sentence_index: int
    start: int
    end: int
    event_type: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span [{self.start},{self.end})")
        if not _TYPE_RE.match(self.event_type):
            raise ValueError(f"bad event type {self.event_type!r}")


@dataclass
class Sentence:
    tokens: list[Token]

    def __len__(self):
        return len(self.tokens)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass
class Document:
    id: str
    sentences: list[Sentence]
    gold_spans: list[Span] = field(default_factory=list)

    def __post_init__(self):
        self.gold_spans = sorted(self.gold_spans)
        for span in self.gold_spans:
            if span.sentence_index >= len(self.sentences):
                raise ValueError(f"span {span} beyond document {self.id!r}")
            if span.end > len(self.sentences[span.sentence_index]):
                raise ValueError(f"span {span} beyond its sentence")

    def spans_of(self, event_type: str, sentence_index: int | None = None):
        return [s for s in self.gold_spans
                if s.event_type == event_type
                and (sentence_index is None or s.sentence_index == sentence_index)]

    def event_types(self) -> list[str]:
        return sorted({s.event_type for s in self.gold_spans})


def make_token(surface: str, char_start: int, stem: str | None = None,
               pos: str = PLACEHOLDER, chunk: str = PLACEHOLDER) -> Token:
    if stem is None:
        stem = porter_stem(surface)
    return Token(surface, char_start, char_start + len(surface), stem, pos, chunk)


def document_from_text(doc_id: str, text: str, keep_hyphens: bool = False) -> Document:
    """Tokenize raw text into an unannotated document with real offsets."""
    sentences = [
        Sentence([Token(surf, start, end, porter_stem(surf))
                  for surf, start, end in sent])
        for sent in tokenize(text, keep_hyphens=keep_hyphens)
    ]
    return Document(doc_id, sentences)


def encode_document(doc: Document, scheme: Scheme, event_type: str) -> list[list[str]]:
    """Per-sentence label sequences for one event type."""
    out = []
    for idx, sentence in enumerate(doc.sentences):
        pairs = [(s.start, s.end) for s in doc.spans_of(event_type, idx)]
        out.append(scheme.encode(pairs, len(sentence)))
    return out


def decode_document(label_rows: list[list[str]], scheme: Scheme,
                    event_type: str) -> list[Span]:
    """Spans from per-sentence label sequences (strict decode)."""
    spans = []
    for idx, labels in enumerate(label_rows):
        for start, end in scheme.decode(labels):
            spans.append(Span(idx, start, end, event_type))
    return spans


# --- column files -----------------------------------------------------

@dataclass
class _LabelColumn:
    index: int            # cell index within a body line
    scheme: Scheme
    event_type: str | None  # None = joint type-suffixed column


@dataclass
class _ColumnSpec:
    names: list[str]
    surface: int
    stem: int | None
    pos: int | None
    chunk: int | None
    labels: list[_LabelColumn]


def _parse_columns_decl(value: str, line_no: int) -> _ColumnSpec:
    names = value.split()
    plain: dict[str, int] = {}
    labels: list[_LabelColumn] = []
    for idx, name in enumerate(names):
        if name.startswith("label:"):
            parts = name.split(":")
            if len(parts) not in (2, 3) or not parts[1]:
                raise ParseError(f"bad label column {name!r}", line_no)
            try:
                scheme = get_scheme(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from None
            event_type = parts[2] if len(parts) == 3 else None
            if event_type is not None and not _TYPE_RE.match(event_type):
                raise ParseError(f"bad event type in {name!r}", line_no)
            if any(lc.event_type == event_type for lc in labels):
                raise ParseError(f"duplicate label column {name!r}", line_no)
            labels.append(_LabelColumn(idx, scheme, event_type))
        elif name in ("surface", "stem", "pos", "chunk"):
            if name in plain:
                raise ParseError(f"duplicate column {name!r}", line_no)
            plain[name] = idx
        else:
            raise ParseError(f"unknown column {name!r}", line_no)
    if "surface" not in plain:
        raise ParseError("columns must include 'surface'", line_no)
    if len([lc for lc in labels if lc.event_type is None]) > 1:
        raise ParseError("at most one joint label column", line_no)
    if any(lc.event_type is None for lc in labels) and len(labels) > 1:
        raise ParseError("joint label column excludes per-type columns", line_no)
    return _ColumnSpec(names, plain["surface"], plain.get("stem"),
                       plain.get("pos"), plain.get("chunk"), labels)


_DIRECTIVE_RE = re.compile(r"^#!\s*(\w+)\s*=\s*(.*?)\s*$")


class _DocBuilder:
    def __init__(self, doc_id: str):
        self.id = doc_id
        self.sentences: list[Sentence] = []
        self.spans: list[Span] = []

    def finish(self) -> Document:
        return Document(self.id, self.sentences, self.spans)


def _project_joint(label: str, event_type: str) -> str:
    if label == "O":
        return "O"
    prefix, _, suffix = label.partition("-")
    return prefix if suffix == event_type else "O"


def parse_column_file(text: str) -> list[Document]:
    """Parse a column-format stream into documents.

    Tokens appearing before any `#! doc` directive go into an implicit
    document with id "doc0".
    """
    spec: _ColumnSpec | None = None
    docs: list[Document] = []
    builder: _DocBuilder | None = None
    rows: list[tuple[int, list[str]]] = []

    def flush_sentence():
        nonlocal rows
        if not rows:
            return
        if builder is None:
            raise AssertionError("rows without document")
        tokens = []
        offset = 0
        for line_no, cells in rows:
            surface = cells[spec.surface]
            if not surface:
                raise ParseError("empty surface cell", line_no)
            stem = cells[spec.stem] if spec.stem is not None else porter_stem(surface)
            pos = cells[spec.pos] if spec.pos is not None else PLACEHOLDER
            chunk = cells[spec.chunk] if spec.chunk is not None else PLACEHOLDER
            try:
                tokens.append(Token(surface, offset, offset + len(surface),
                                    stem or PLACEHOLDER, pos or PLACEHOLDER,
                                    chunk or PLACEHOLDER))
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from None
            offset += len(surface) + 1
        sent_index = len(builder.sentences)
        builder.sentences.append(Sentence(tokens))
        first_line = rows[0][0]
        for lc in spec.labels:
            column = [cells[lc.index] for _, cells in rows]
            if lc.event_type is not None:
                _decode_label_column(column, lc.scheme, lc.event_type,
                                     sent_index, first_line, builder.spans)
            else:
                for i, lab in enumerate(column):
                    if lab != "O" and "-" not in lab:
                        raise ParseError(
                            f"joint label {lab!r} missing type suffix",
                            first_line + i)
                types = sorted({lab.partition("-")[2] for lab in column
                                if lab != "O"})
                for event_type in types:
                    projected = [_project_joint(lab, event_type)
                                 for lab in column]
                    _decode_label_column(projected, lc.scheme, event_type,
                                         sent_index, first_line, builder.spans)
        rows = []

    def flush_doc():
        nonlocal builder
        flush_sentence()
        if builder is not None:
            docs.append(builder.finish())
            builder = None

    for line_no, raw in enumerate(text.splitlines(), 1):
        if raw.startswith("#!"):
            m = _DIRECTIVE_RE.match(raw)
            if not m:
                raise ParseError(f"malformed directive {raw!r}", line_no)
            key, value = m.groups()
            if key == "columns":
                if spec is not None:
                    raise ParseError("duplicate columns directive", line_no)
                spec = _parse_columns_decl(value, line_no)
            elif key == "doc":
                if not value:
                    raise ParseError("empty document id", line_no)
                flush_doc()
                builder = _DocBuilder(value)
            else:
                raise ParseError(f"unknown directive {key!r}", line_no)
        elif not raw.strip():
            flush_sentence()
        else:
            if spec is None:
                raise ParseError("token line before columns directive", line_no)
            cells = raw.split("\t")
            if len(cells) != len(spec.names):
                raise ParseError(
                    f"expected {len(spec.names)} columns, got {len(cells)}",
                    line_no)
            if builder is None:
                builder = _DocBuilder("doc0")
            rows.append((line_no, cells))
    flush_doc()
    return docs


def _decode_label_column(column, scheme, event_type, sent_index, first_line, out):
    for i, lab in enumerate(column):
        if lab not in scheme.labels:
            raise ParseError(
                f"label {lab!r} not in scheme {scheme.name}", first_line + i)
    try:
        pairs = scheme.decode(column)
    except SchemeValidityError as exc:
        raise ParseError(
            f"{scheme.name} violation for {event_type}: {exc.rule}",
            first_line + exc.position) from None
    for start, end in pairs:
        out.append(Span(sent_index, start, end, event_type))


def ordered_event_types(types) -> list[str]:
    """Known event types in their conventional order, then others sorted."""
    known = [t for t in EVENT_TYPES if t in types]
    extra = sorted(t for t in types if t not in EVENT_TYPES)
    return known + extra


def write_column_file(docs: list[Document], scheme: Scheme,
                      event_types: list[str] | None = None) -> str:
    """Serialize documents in the canonical per-type column layout.

    Byte-deterministic; raises a representability error when the scheme
    cannot express some document's spans.
    """
    if event_types is None:
        event_types = ordered_event_types(
            {s.event_type for d in docs for s in d.gold_spans})
    header = "#! columns = surface stem pos chunk" + "".join(
        f" label:{scheme.name}:{t}" for t in event_types)
    lines = [header]
    for doc in docs:
        lines.append(f"#! doc = {doc.id}")
        for idx, sentence in enumerate(doc.sentences):
            label_rows = []
            for event_type in event_types:
                pairs = [(s.start, s.end) for s in doc.spans_of(event_type, idx)]
                label_rows.append(scheme.encode(pairs, len(sentence)))
            for t_idx, token in enumerate(sentence.tokens):
                cells = [token.surface, token.stem, token.pos, token.chunk]
                cells.extend(labels[t_idx] for labels in label_rows)
                lines.append("\t".join(cells))
            lines.append("")
    return "\n".join(lines) + "\n"


# --- standoff spans -----------------------------------------------------

def write_standoff(spans_by_doc: dict[str, list[Span]]) -> str:
    lines = []
    for doc_id in sorted(spans_by_doc):
        for span in sorted(spans_by_doc[doc_id]):
            lines.append(f"{doc_id}\t{span.sentence_index}\t{span.start}"
                         f"\t{span.end}\t{span.event_type}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_standoff(text: str) -> dict[str, list[Span]]:
    out: dict[str, list[Span]] = {}
    for line_no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        cells = raw.split("\t")
        if len(cells) != 5:
            raise ParseError(f"expected 5 fields, got {len(cells)}", line_no)
        doc_id, sent, start, end, event_type = cells
        try:
            span = Span(int(sent), int(start), int(end), event_type)
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from None
        out.setdefault(doc_id, []).append(span)
    return out


# --- corpus profile -----------------------------------------------------

def _is_acronym(surface: str) -> bool:
    return 2 <= len(surface) <= 6 and surface.isalpha() and surface.isupper()


@dataclass
class EventProfile:
    count: int
    proportion: float
    length_hist: dict[int, float]
    unique_word_fraction: float
    acronym_fraction: float


@dataclass
class CorpusProfile:
    events: dict[str, EventProfile]
    total_count: int

    def report(self) -> str:
        lines = [f"total.count = {self.total_count}"]
        for event_type in ordered_event_types(self.events):
            prof = self.events[event_type]
            lines.append(f"{event_type}.count = {prof.count}")
            lines.append(f"{event_type}.proportion = {prof.proportion!r}")
            for k in sorted(prof.length_hist):
                lines.append(f"{event_type}.length.{k} = {prof.length_hist[k]!r}")
            lines.append(f"{event_type}.unique_word_fraction = "
                         f"{prof.unique_word_fraction!r}")
            lines.append(f"{event_type}.acronym_fraction = "
                         f"{prof.acronym_fraction!r}")
        return "\n".join(lines) + "\n"


def compute_profile(docs: list[Document]) -> CorpusProfile:
    """Mention statistics per event type.

    The length histogram is the fraction of mentions with k tokens;
    unique_word_fraction is distinct lowercased mention tokens over all
    mention tokens; acronym_fraction is the fraction of mentions whose
    tokens are all short all-capital words.  Types with no mentions are
    omitted.
    """
    mentions: dict[str, list[list[str]]] = {}
    for doc in docs:
        for span in doc.gold_spans:
            words = [t.surface for t in
                     doc.sentences[span.sentence_index].tokens[span.start:span.end]]
            mentions.setdefault(span.event_type, []).append(words)
    total = sum(len(v) for v in mentions.values())
    events = {}
    for event_type in ordered_event_types(mentions):
        rows = mentions[event_type]
        count = len(rows)
        lengths = Counter(len(r) for r in rows)
        vocab = {w.lower() for r in rows for w in r}
        n_tokens = sum(len(r) for r in rows)
        n_acronym = sum(1 for r in rows if all(_is_acronym(w) for w in r))
        events[event_type] = EventProfile(
            count=count,
            proportion=count / total,
            length_hist={k: lengths[k] / count for k in sorted(lengths)},
            unique_word_fraction=len(vocab) / n_tokens,
            acronym_fraction=n_acronym / count,
        )
    return CorpusProfile(events, total)
