"""Tagging schemes: span <-> label-sequence codecs and label repair.

Four schemes over one event type per sequence:

    IO     entities are maximal I runs           labels (O, I)
    IOB    entities are B I*                     labels (O, B, I)
    IOBW   entities are W or B I+                labels (O, B, I, W)
    IOBEW  entities are W or B I* E              labels (O, B, I, E, W)

IOB is the variant where every entity starts with B.  ``decode`` is
strict (grammar violations raise), ``repair`` is the total fixer that
turns any label sequence into a grammar-valid one by lenient
segmentation followed by re-encoding.
"""

from .errors import RepresentabilityError, SchemeValidityError

SpanPair = tuple[int, int]


def _check_spans(spans: list[SpanPair], length: int) -> list[SpanPair]:
    ordered = sorted(spans)
    prev_end = None
    for start, end in ordered:
        if not (0 <= start < end <= length):
            raise ValueError(f"span ({start},{end}) out of range for length {length}")
        if prev_end is not None and start < prev_end:
            raise ValueError(f"span ({start},{end}) overlaps previous span")
        prev_end = end
    return ordered


class Scheme:
    """One tagging scheme; stateless, shared via the SCHEMES registry."""

    def __init__(self, name: str, labels: tuple[str, ...]):
        self.name = name
        self.labels = labels  # canonical order, fixed for model indexing

    def __repr__(self):
        return f"Scheme({self.name})"

    # --- encoding ---------------------------------------------------

    def encode(self, spans: list[SpanPair], length: int) -> list[str]:
        """Label the ``length`` tokens of one sentence for these spans."""
        ordered = _check_spans(spans, length)
        out = ["O"] * length
        prev_end = None
        for start, end in ordered:
            if self.name == "IO":
                if prev_end is not None and start == prev_end:
                    raise RepresentabilityError(
                        f"adjacent spans (..,{start}) and ({start},{end}) "
                        "merge under IO")
                out[start:end] = ["I"] * (end - start)
            elif self.name == "IOB":
                out[start] = "B"
                out[start + 1:end] = ["I"] * (end - start - 1)
            elif self.name == "IOBW":
                if end - start == 1:
                    out[start] = "W"
                else:
                    out[start] = "B"
                    out[start + 1:end] = ["I"] * (end - start - 1)
            else:  # IOBEW
                if end - start == 1:
                    out[start] = "W"
                else:
                    out[start] = "B"
                    out[start + 1:end - 1] = ["I"] * (end - start - 2)
                    out[end - 1] = "E"
            prev_end = end
        return out

    # --- strict decoding ---------------------------------------------

    def decode(self, labels: list[str]) -> list[SpanPair]:
        """Spans of a grammar-valid sequence; violations raise."""
        self._check_alphabet(labels)
        handler = getattr(self, f"_decode_{self.name.lower()}")
        return handler(labels)

    def is_valid(self, labels: list[str]) -> bool:
        try:
            self.decode(labels)
            return True
        except SchemeValidityError:
            return False

    def _check_alphabet(self, labels: list[str]) -> None:
        for lab in labels:
            if lab not in self.labels:
                raise ValueError(f"label {lab!r} not in scheme {self.name}")

    @staticmethod
    def _decode_io(labels):
        spans = []
        start = None
        for i, lab in enumerate(labels):
            if lab == "I":
                if start is None:
                    start = i
            elif start is not None:
                spans.append((start, i))
                start = None
        if start is not None:
            spans.append((start, len(labels)))
        return spans

    @staticmethod
    def _decode_iob(labels):
        spans = []
        start = None
        for i, lab in enumerate(labels):
            if lab == "B":
                if start is not None:
                    spans.append((start, i))
                start = i
            elif lab == "I":
                if start is None:
                    prev = labels[i - 1] if i else "start"
                    raise SchemeValidityError(i, f"I follows {prev}")
            else:  # O
                if start is not None:
                    spans.append((start, i))
                    start = None
        if start is not None:
            spans.append((start, len(labels)))
        return spans

    @staticmethod
    def _decode_iobw(labels):
        spans = []
        start = None
        for i, lab in enumerate(labels):
            if lab == "B":
                if start is not None:
                    spans.append((start, i))
                if i + 1 >= len(labels) or labels[i + 1] != "I":
                    raise SchemeValidityError(i, "B not followed by I")
                start = i
            elif lab == "I":
                if start is None:
                    prev = labels[i - 1] if i else "start"
                    raise SchemeValidityError(i, f"I follows {prev}")
            elif lab == "W":
                if start is not None:
                    spans.append((start, i))
                    start = None
                spans.append((i, i + 1))
            else:  # O
                if start is not None:
                    spans.append((start, i))
                    start = None
        if start is not None:
            spans.append((start, len(labels)))
        return spans

    @staticmethod
    def _decode_iobew(labels):
        spans = []
        start = None
        for i, lab in enumerate(labels):
            if start is None:
                if lab == "B":
                    start = i
                elif lab == "W":
                    spans.append((i, i + 1))
                elif lab in ("I", "E"):
                    prev = labels[i - 1] if i else "start"
                    raise SchemeValidityError(i, f"{lab} follows {prev}")
            else:
                if lab == "I":
                    pass
                elif lab == "E":
                    spans.append((start, i + 1))
                    start = None
                else:  # O, B, W interrupt an unclosed segment
                    raise SchemeValidityError(
                        i, f"unclosed segment: {lab} before E")
        if start is not None:
            raise SchemeValidityError(
                len(labels) - 1, "unclosed segment at end (missing E)")
        return spans

    # --- repair (label fixer) -----------------------------------------

    def lenient_segments(self, labels: list[str]) -> list[SpanPair]:
        """Segment any label sequence without grammar checks.

        B, W, and I-after-gap open a segment; I (and E) extend it; W and
        E close it; B over an open segment closes that one first.  An E
        with nothing open marks no segment.
        """
        self._check_alphabet(labels)
        segments = []
        start = None
        for i, lab in enumerate(labels):
            if lab == "O":
                if start is not None:
                    segments.append((start, i))
                    start = None
            elif lab == "B":
                if start is not None:
                    segments.append((start, i))
                start = i
            elif lab == "W":
                if start is not None:
                    segments.append((start, i))
                    start = None
                segments.append((i, i + 1))
            elif lab == "I":
                if start is None:
                    start = i
            else:  # E
                if start is not None:
                    segments.append((start, i + 1))
                    start = None
        if start is not None:
            segments.append((start, len(labels)))
        return segments

    def repair(self, labels: list[str]) -> list[str]:
        """Total fixer: lenient segmentation re-encoded in this scheme.

        Idempotent; grammar-valid input comes back unchanged.
        """
        return self.encode(self.lenient_segments(labels), len(labels))


SCHEMES = {
    "IO": Scheme("IO", ("O", "I")),
    "IOB": Scheme("IOB", ("O", "B", "I")),
    "IOBW": Scheme("IOBW", ("O", "B", "I", "W")),
    "IOBEW": Scheme("IOBEW", ("O", "B", "I", "E", "W")),
}

SCHEME_NAMES = tuple(SCHEMES)


def get_scheme(name: str) -> Scheme:
    try:
        return SCHEMES[name.upper()]
    except KeyError:
        raise ValueError(
            f"unknown scheme {name!r}; expected one of {', '.join(SCHEMES)}"
        ) from None
