"""Statistics: pinned references, identities, and the CV harness."""

import math

import numpy as np
import pytest

from spantag.corpus import Span
from spantag.crf import TrainerConfig
from spantag.errors import ConfigError, ParseError
from spantag.stats import (
    CvConfig,
    RunMatrix,
    anova_oneway,
    crossval,
    experiment_report,
    f_sf,
    fold_sizes,
    make_folds,
    parse_matrix,
    reg_inc_beta,
    t_two_tailed,
    ttest_unpaired,
)

from conftest import build_doc, build_sentence


# Frozen outputs of a widely used independent statistics library for the
# exact inputs below.
ANOVA_SMALL = ([[1.0, 2.0, 3.0, 4.0],
                [2.0, 3.0, 4.0, 5.0],
                [6.0, 7.0, 8.0, 9.0]],
               16.8, 0.0009156892095688853)
ANOVA_SCORES = ([[0.74, 0.77, 0.72, 0.75, 0.78],
                 [0.80, 0.79, 0.82, 0.78, 0.81],
                 [0.79, 0.83, 0.80, 0.84, 0.82],
                 [0.90, 0.86, 0.88, 0.87, 0.89]],
                37.26222222222227, 1.9010386429449274e-07)
TTEST_SMALL = ([1.0, 2.0, 3.0, 4.0, 5.0], [2.0, 3.0, 4.0, 5.0, 6.0],
               -1.0, 0.34659350708733416)
TTEST_SCORES = ([0.81, 0.83, 0.79, 0.86, 0.80, 0.84],
                [0.85, 0.88, 0.84, 0.90, 0.87, 0.83],
                -2.6248718355588454, 0.02538458793117156)
BETAINC_REFERENCE = [
    ((2.5, 3.5, 0.4), 0.4869041915261176),
    ((0.5, 0.5, 0.3), 0.36901011956554536),
    ((12.0, 1.0, 0.9), 0.282429536481),
    ((1.0, 1.0, 0.7), 0.7),
    ((50.0, 50.0, 0.5), 0.5000000000000004),
    ((5.0, 2.0, 0.05), 1.7968750000000005e-06),
]
TAIL_REFERENCE = [
    ("t", (2.0, 10), 0.07338803477074039),
    ("t", (0.5, 48), 0.6193596576930802),
    ("f", (3.5, 3, 16), 0.040052541494826094),
    ("f", (0.25, 4, 20), 0.906252898083978),
]


class TestPinnedReferences:
    @pytest.mark.parametrize("groups,f_ref,p_ref", [ANOVA_SMALL, ANOVA_SCORES])
    def test_anova(self, groups, f_ref, p_ref):
        result = anova_oneway(groups)
        assert result.statistic == pytest.approx(f_ref, rel=1e-9)
        assert result.p_value == pytest.approx(p_ref, rel=1e-9)
        k, n = len(groups), len(groups[0])
        assert result.df == (k - 1, k * (n - 1))

    @pytest.mark.parametrize("a,b,t_ref,p_ref", [TTEST_SMALL, TTEST_SCORES])
    def test_ttest(self, a, b, t_ref, p_ref):
        result = ttest_unpaired(a, b)
        assert result.statistic == pytest.approx(t_ref, rel=1e-9)
        assert result.p_value == pytest.approx(p_ref, rel=1e-9)
        assert result.df == (len(a) + len(b) - 2,)

    @pytest.mark.parametrize("args,want", BETAINC_REFERENCE)
    def test_incomplete_beta(self, args, want):
        assert reg_inc_beta(*args) == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("kind,args,want", TAIL_REFERENCE)
    def test_distribution_tails(self, kind, args, want):
        got = t_two_tailed(*args) if kind == "t" else f_sf(*args)
        assert got == pytest.approx(want, rel=1e-12)


class TestIdentities:
    def test_f_equals_t_squared_for_two_groups(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            n = int(rng.integers(3, 9))
            a = rng.normal(0.0, 1.0, n).tolist()
            b = rng.normal(0.3, 1.2, n).tolist()
            tt = ttest_unpaired(a, b)
            av = anova_oneway([a, b])
            assert av.statistic == pytest.approx(tt.statistic ** 2, rel=1e-9)
            assert av.p_value == pytest.approx(tt.p_value, rel=1e-9)

    def test_beta_uniform_case_is_identity(self):
        for x in np.linspace(0.0, 1.0, 41):
            assert reg_inc_beta(1.0, 1.0, float(x)) == pytest.approx(
                float(x), abs=1e-10)

    def test_beta_reflection_symmetry(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            a = float(rng.uniform(0.2, 20.0))
            b = float(rng.uniform(0.2, 20.0))
            x = float(rng.uniform(0.0, 1.0))
            lhs = reg_inc_beta(a, b, x)
            rhs = 1.0 - reg_inc_beta(b, a, 1.0 - x)
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_beta_boundaries_and_midpoint(self):
        assert reg_inc_beta(3.0, 4.0, 0.0) == 0.0
        assert reg_inc_beta(3.0, 4.0, 1.0) == 1.0
        for a in (0.5, 1.0, 2.0, 7.5):
            assert reg_inc_beta(a, a, 0.5) == pytest.approx(0.5, abs=1e-10)

    def test_beta_monotone_in_x(self):
        xs = np.linspace(0.0, 1.0, 51)
        values = [reg_inc_beta(2.0, 5.0, float(x)) for x in xs]
        assert all(v2 >= v1 - 1e-14 for v1, v2 in zip(values, values[1:]))

    def test_t_symmetry_in_sample_order(self):
        a = [0.1, 0.4, 0.3]
        b = [0.2, 0.6, 0.5, 0.4]
        ab, ba = ttest_unpaired(a, b), ttest_unpaired(b, a)
        assert ab.statistic == -ba.statistic
        assert ab.p_value == ba.p_value

    def test_null_statistics_give_p_one(self):
        assert t_two_tailed(0.0, 12) == 1.0
        assert f_sf(0.0, 3, 16) == 1.0
        assert f_sf(-1.0, 3, 16) == 1.0

    def test_p_values_live_in_unit_interval(self):
        for t in np.linspace(-30, 30, 31):
            p = t_two_tailed(float(t), 7)
            assert 0.0 <= p <= 1.0
        assert t_two_tailed(50.0, 7) < 1e-9


class TestDegenerateInputs:
    def test_zero_variance_equal_means(self):
        result = ttest_unpaired([0.5, 0.5], [0.5, 0.5])
        assert result.statistic == 0.0 and result.p_value == 1.0
        assert not result.degenerate
        result = anova_oneway([[1.0, 1.0], [1.0, 1.0]])
        assert result.statistic == 0.0 and result.p_value == 1.0

    def test_zero_variance_different_means(self):
        result = ttest_unpaired([0.4, 0.4], [0.6, 0.6])
        assert math.isinf(result.statistic) and result.statistic < 0
        assert result.p_value == 0.0 and result.degenerate
        result = ttest_unpaired([0.6, 0.6], [0.4, 0.4])
        assert result.statistic > 0
        result = anova_oneway([[1.0, 1.0], [2.0, 2.0]])
        assert math.isinf(result.statistic) and result.degenerate

    def test_validation(self):
        with pytest.raises(ValueError):
            anova_oneway([[1.0, 2.0]])
        with pytest.raises(ValueError):
            anova_oneway([[1.0], [2.0]])
        with pytest.raises(ValueError):
            anova_oneway([[1.0, 2.0], [1.0, 2.0, 3.0]])
        with pytest.raises(ValueError):
            ttest_unpaired([1.0], [2.0, 3.0])
        with pytest.raises(ValueError):
            reg_inc_beta(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            reg_inc_beta(1.0, 1.0, 1.5)


def small_matrix():
    matrix = RunMatrix(repeats=2, folds=3, models=("IO", "IOB"),
                       event_types=("PROBLEM",))
    matrix.scores[("PROBLEM", "IO")] = [
        (0.70, 0.80), (0.72, 0.82), (0.68, 0.78),
        (0.71, 0.81), (0.69, 0.79), (0.73, 0.83)]
    matrix.scores[("PROBLEM", "IOB")] = [
        (0.75, 0.85), (0.77, 0.87), (0.73, 0.83),
        (0.76, 0.86), (0.74, 0.84), (0.78, 0.88)]
    return matrix


class TestRunMatrix:
    def test_values_select_criterion(self):
        matrix = small_matrix()
        assert matrix.values("PROBLEM", "IO", "strict")[0] == 0.70
        assert matrix.values("PROBLEM", "IO", "lenient")[0] == 0.80

    def test_tsv_parse_round_trip(self):
        matrix = small_matrix()
        back = parse_matrix(matrix.tsv())
        assert back.repeats == matrix.repeats
        assert back.folds == matrix.folds
        assert back.models == matrix.models
        assert back.event_types == matrix.event_types
        assert back.scores == matrix.scores
        assert back.tsv() == matrix.tsv()

    def test_parse_rejects_missing_header(self):
        with pytest.raises(ParseError) as exc:
            parse_matrix("nope\n")
        assert exc.value.line == 1

    def test_parse_rejects_short_row(self):
        text = small_matrix().tsv().splitlines()
        text[1] = "\t".join(text[1].split("\t")[:5])
        with pytest.raises(ParseError) as exc:
            parse_matrix("\n".join(text) + "\n")
        assert exc.value.line == 2

    def test_parse_rejects_bad_number(self):
        text = small_matrix().tsv().replace("0.7\t", "seven\t", 1)
        with pytest.raises(ParseError):
            parse_matrix(text)

    def test_parse_rejects_incomplete_cells(self):
        lines = small_matrix().tsv().splitlines()
        with pytest.raises(ParseError) as exc:
            parse_matrix("\n".join(lines[:-1]) + "\n")
        assert "has 5 of 6 values" in str(exc.value)


class TestFolds:
    def test_fold_sizes_partition_documents(self):
        for n in range(2, 40):
            for k in range(2, 8):
                sizes = fold_sizes(n, k)
                assert sum(sizes) == n
                assert len(sizes) == k
                assert max(sizes) - min(sizes) <= 1

    def test_make_folds_partitions_indices(self):
        folds = make_folds(11, 4, seed=3)
        flat = [i for fold in folds for i in fold]
        assert sorted(flat) == list(range(11))
        assert [len(f) for f in folds] == fold_sizes(11, 4)
        assert all(fold == sorted(fold) for fold in folds)

    def test_make_folds_deterministic_and_seed_sensitive(self):
        assert make_folds(20, 5, seed=1) == make_folds(20, 5, seed=1)
        assert make_folds(20, 5, seed=1) != make_folds(20, 5, seed=2)


class TestCvConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            CvConfig(folds=1, event_types=("PROBLEM",))
        with pytest.raises(ConfigError):
            CvConfig(repeats=0, event_types=("PROBLEM",))
        with pytest.raises(ConfigError):
            CvConfig(models=("IO", "BILOU"), event_types=("PROBLEM",))
        with pytest.raises(ConfigError):
            CvConfig(event_types=())


def tiny_corpus(n_docs=8):
    docs = []
    for i in range(n_docs):
        s0 = build_sentence(("the", "DT", "B-NP"), ("fever", "NN", "I-NP"),
                            ("subsided", "VB", "O"))
        s1 = build_sentence(("an", "DT", "B-NP"), ("ecg", "NN", "I-NP"),
                            ("was", "VB", "O"), ("ordered", "VB", "O"))
        docs.append(build_doc(f"d{i}", [s0, s1],
                              [Span(0, 0, 2, "PROBLEM"), Span(1, 1, 2, "TEST")]))
    return docs


FAST_TRAINER = TrainerConfig(max_iterations=60)


class TestCrossval:
    def test_matrix_shape_and_score_range(self):
        cv = CvConfig(repeats=1, folds=2, seed=5, models=("IO", "IOB"),
                      event_types=("PROBLEM",))
        matrix = crossval(tiny_corpus(), cv, FAST_TRAINER)
        assert set(matrix.scores) == {("PROBLEM", "IO"), ("PROBLEM", "IOB")}
        for values in matrix.scores.values():
            assert len(values) == 2
            assert all(0.0 <= v <= 1.0 for pair in values for v in pair)

    def test_same_seed_reproduces_bytes(self):
        cv = CvConfig(repeats=1, folds=2, seed=7, models=("IOB",),
                      event_types=("PROBLEM",))
        a = crossval(tiny_corpus(), cv, FAST_TRAINER).tsv()
        b = crossval(tiny_corpus(), cv, FAST_TRAINER).tsv()
        assert a == b

    def test_worker_count_does_not_change_results(self):
        cv = CvConfig(repeats=1, folds=2, seed=7, models=("IOB",),
                      event_types=("PROBLEM",))
        serial = crossval(tiny_corpus(), cv, FAST_TRAINER, jobs=1).tsv()
        parallel = crossval(tiny_corpus(), cv, FAST_TRAINER, jobs=2).tsv()
        assert serial == parallel

    def test_too_few_documents_rejected(self):
        cv = CvConfig(repeats=1, folds=5, event_types=("PROBLEM",))
        with pytest.raises(ConfigError):
            crossval(tiny_corpus(3), cv, FAST_TRAINER)


class TestExperimentReport:
    def test_report_sections(self):
        report = experiment_report(small_matrix())
        assert "== PROBLEM / strict F1 (n = 6 folds per model) ==" in report
        assert "ANOVA across models: F(1, 10)" in report
        assert "IO vs IOB: t(10)" in report
        assert "== directional summary (descriptive, not asserted) ==" in report
        assert "strict-F1 ordering: IOB" in report

    def test_report_matches_direct_computation(self):
        matrix = small_matrix()
        report = experiment_report(matrix)
        io = matrix.values("PROBLEM", "IO", "strict")
        iob = matrix.values("PROBLEM", "IOB", "strict")
        tt = ttest_unpaired(io, iob)
        assert f"t(10) = {tt.statistic:.4f}, p = {tt.p_value:.6g}" in report

    def test_degenerate_groups_reported_not_crashing(self):
        matrix = RunMatrix(repeats=1, folds=2, models=("IO", "IOB"),
                           event_types=("TEST",))
        matrix.scores[("TEST", "IO")] = [(0.5, 0.5), (0.5, 0.5)]
        matrix.scores[("TEST", "IOB")] = [(0.9, 0.9), (0.9, 0.9)]
        report = experiment_report(matrix)
        assert "degenerate" in report

    def test_lenient_delta_line_requires_both_iobw_models(self):
        report = experiment_report(small_matrix())
        assert "IOBW+ minus IOBW" not in report
