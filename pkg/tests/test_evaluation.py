"""Span scoring: strict equality and side-wise any-overlap."""

import numpy as np
import pytest

from spantag.corpus import Span
from spantag.evaluation import EvalReport, evaluate, f1_scores, match_spans


P = "PROBLEM"
T = "TEST"


class TestStrict:
    def test_hand_counts(self):
        gold = [Span(0, 1, 3, P), Span(0, 4, 5, P)]
        system = [Span(0, 1, 3, P), Span(0, 4, 6, P)]
        c = match_spans(gold, system, "strict")
        assert (c.tp_sys, c.fp, c.tp_gold, c.fn) == (1, 1, 1, 1)
        assert c.precision == 0.5 and c.recall == 0.5 and c.f1 == 0.5

    def test_exact_match_requires_all_four_fields(self):
        gold = [Span(0, 1, 3, P)]
        for wrong in [Span(1, 1, 3, P), Span(0, 0, 3, P),
                      Span(0, 1, 4, P), Span(0, 1, 3, T)]:
            c = match_spans(gold, [wrong], "strict")
            assert c.tp_sys == 0 and c.fp == 1 and c.fn == 1

    def test_empty_sides_score_zero(self):
        c = match_spans([], [], "strict")
        assert c.precision == 0.0 and c.recall == 0.0 and c.f1 == 0.0
        c = match_spans([Span(0, 0, 1, P)], [], "strict")
        assert c.precision == 0.0 and c.recall == 0.0 and c.fn == 1


class TestLenient:
    def test_partial_overlap_counts_both_sides(self):
        gold = [Span(0, 1, 3, P), Span(0, 4, 5, P)]
        system = [Span(0, 1, 3, P), Span(0, 4, 6, P)]
        c = match_spans(gold, system, "lenient")
        assert (c.tp_sys, c.fp, c.tp_gold, c.fn) == (2, 0, 2, 0)
        assert c.f1 == 1.0

    def test_one_system_span_can_cover_two_gold_spans(self):
        gold = [Span(0, 0, 1, P), Span(0, 3, 4, P)]
        system = [Span(0, 0, 5, P)]
        c = match_spans(gold, system, "lenient")
        assert (c.tp_sys, c.fp, c.tp_gold, c.fn) == (1, 0, 2, 0)
        assert c.precision == 1.0 and c.recall == 1.0

    def test_two_system_spans_on_one_gold_span(self):
        gold = [Span(0, 0, 6, P)]
        system = [Span(0, 0, 2, P), Span(0, 4, 6, P)]
        c = match_spans(gold, system, "lenient")
        assert (c.tp_sys, c.fp, c.tp_gold, c.fn) == (2, 0, 1, 0)

    def test_touching_spans_do_not_overlap(self):
        c = match_spans([Span(0, 0, 2, P)], [Span(0, 2, 4, P)], "lenient")
        assert c.tp_sys == 0 and c.tp_gold == 0

    def test_type_and_sentence_must_agree(self):
        gold = [Span(0, 0, 3, P)]
        for wrong in [Span(0, 0, 3, T), Span(1, 0, 3, P)]:
            c = match_spans(gold, [wrong], "lenient")
            assert c.tp_sys == 0 and c.tp_gold == 0


def random_side(rng, n_sentences, n_tokens, types):
    spans = []
    for sent in range(n_sentences):
        for event_type in types:
            position = 0
            while position < n_tokens:
                if rng.random() < 0.4:
                    end = min(position + int(rng.integers(1, 4)), n_tokens)
                    spans.append(Span(sent, position, end, event_type))
                    position = end
                position += 1
    return spans


def occupancy(spans):
    occupied = {}
    for s in spans:
        occupied.setdefault((s.sentence_index, s.event_type),
                            set()).update(range(s.start, s.end))
    return occupied


def lenient_oracle(gold, system):
    """Token-occupancy formulation of side-wise any-overlap counts."""
    gold_occ, sys_occ = occupancy(gold), occupancy(system)

    def hits(spans, other):
        return sum(1 for s in spans
                   if set(range(s.start, s.end))
                   & other.get((s.sentence_index, s.event_type), set()))
    tp_sys = hits(system, gold_occ)
    tp_gold = hits(gold, sys_occ)
    return tp_sys, len(system) - tp_sys, tp_gold, len(gold) - tp_gold


class TestLenientAgainstOracle:
    def test_random_span_sets(self):
        rng = np.random.default_rng(424242)
        for _ in range(100):
            gold = random_side(rng, 2, 8, (P, T))
            system = random_side(rng, 2, 8, (P, T))
            for event_type in (None, P, T):
                c = match_spans(gold, system, "lenient", event_type)
                g = [s for s in gold
                     if event_type in (None, s.event_type)]
                s = [x for x in system
                     if event_type in (None, x.event_type)]
                assert (c.tp_sys, c.fp, c.tp_gold, c.fn) == \
                    lenient_oracle(g, s)


class TestValidation:
    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            match_spans([], [], "fuzzy")

    def test_same_type_overlap_within_side_rejected(self):
        bad = [Span(0, 0, 3, P), Span(0, 2, 5, P)]
        with pytest.raises(ValueError):
            match_spans(bad, [], "strict")
        with pytest.raises(ValueError):
            match_spans([], bad, "lenient")

    def test_cross_type_overlap_within_side_allowed(self):
        spans = [Span(0, 0, 3, P), Span(0, 2, 5, T)]
        c = match_spans(spans, spans, "strict")
        assert c.f1 == 1.0

    def test_touching_spans_within_side_allowed(self):
        spans = [Span(0, 0, 2, P), Span(0, 2, 4, P)]
        assert match_spans(spans, spans, "strict").f1 == 1.0


class TestEvaluate:
    def gold(self):
        return {"d0": [Span(0, 1, 3, P), Span(1, 0, 1, T)],
                "d1": [Span(0, 2, 4, P)]}

    def system(self):
        return {"d0": [Span(0, 1, 3, P), Span(1, 0, 2, T)],
                "d2": [Span(0, 0, 1, P)]}

    def test_rows_cover_types_and_modes_with_micro_last(self):
        report = evaluate(self.gold(), self.system())
        keys = [(c.event_type, c.mode) for c in report.rows]
        assert keys == [(P, "strict"), (P, "lenient"),
                        (T, "strict"), (T, "lenient"),
                        ("micro", "strict"), ("micro", "lenient")]

    def test_micro_sums_type_counts(self):
        report = evaluate(self.gold(), self.system())
        by_key = {(c.event_type, c.mode): c for c in report.rows}
        for mode in ("strict", "lenient"):
            micro = by_key[("micro", mode)]
            assert micro.tp_sys == sum(by_key[(t, mode)].tp_sys for t in (P, T))
            assert micro.fp == sum(by_key[(t, mode)].fp for t in (P, T))
            assert micro.fn == sum(by_key[(t, mode)].fn for t in (P, T))

    def test_one_sided_documents_count_as_misses(self):
        report = evaluate(self.gold(), self.system())
        by_key = {(c.event_type, c.mode): c for c in report.rows}
        strict_p = by_key[(P, "strict")]
        # d1's gold span is a miss, d2's system span a false alarm
        assert strict_p.tp_sys == 1 and strict_p.fp == 1 and strict_p.fn == 1

    def test_explicit_type_list_controls_rows(self):
        report = evaluate(self.gold(), self.system(), [T])
        assert {c.event_type for c in report.rows} == {T, "micro"}

    def test_f1_scores_match_report(self):
        strict, lenient = f1_scores(self.gold(), self.system(), T)
        report = evaluate(self.gold(), self.system(), [T])
        by_mode = {c.mode: c for c in report.rows if c.event_type == T}
        assert strict == by_mode["strict"].f1
        assert lenient == by_mode["lenient"].f1
        assert strict == 0.0  # (1,0,2) != (1,0,1)
        assert lenient == 1.0


class TestReportFormats:
    def test_text_has_header_and_one_line_per_row(self):
        report = evaluate({"d": [Span(0, 0, 1, P)]}, {"d": [Span(0, 0, 1, P)]})
        text = report.text()
        lines = text.splitlines()
        assert lines[1].split() == ["type", "mode", "gold", "sys",
                                    "P", "R", "F1"]
        assert len(lines) == 3 + len(report.rows)

    def test_tsv_round_trips_floats(self):
        counts = match_spans([Span(0, 0, 1, P)] * 1,
                             [Span(0, 0, 2, P)], "lenient")
        report = EvalReport([counts])
        field = report.tsv().strip().split("\t")[2]
        assert float(field) == counts.precision
