import numpy as np
import pytest

from renyi_combining import analysis
from renyi_combining.channels import channel_to_joint, random_channel
from renyi_combining.combining import check_bounds
from renyi_combining.core import KKKind
from renyi_combining.errors import DomainError


class TestClassify:
    @pytest.mark.parametrize("kind,alpha,expected", [
        (KKKind.KK_H, 1.5, "concave"),
        (KKKind.KK_H, 2.5, "convex"),
        (KKKind.KK_H, 4, "concave"),
        (KKKind.KK_H, 2, "linear"),
        (KKKind.KK_H, 3, "linear"),
        (KKKind.KK_A, 1.7, "neither"),
        (KKKind.KK_A, "inf", "linear"),
    ])
    def test_known_shapes(self, kind, alpha, expected):
        assert analysis.classify_convexity(kind, alpha).classification == expected

    @pytest.mark.parametrize("kind,alpha", [
        (KKKind.KK_H, 1.5), (KKKind.KK_H, 2.5), (KKKind.KK_H, 4), (KKKind.KK_H, 2),
        (KKKind.KK_A, 1.7), (KKKind.KK_A, 0.5), (KKKind.HH, 2.5),
    ])
    def test_stable_under_refinement(self, kind, alpha):
        coarse = analysis.classify_convexity(kind, alpha, grid_n=32)
        fine = analysis.classify_convexity(kind, alpha, grid_n=64)
        assert coarse.classification == fine.classification

    def test_evidence_is_symmetric(self):
        v = analysis.classify_convexity(KKKind.KK_H, 2.5, grid_n=24)
        assert len(v.slice_min) == 24
        assert min(v.slice_min) == v.min_second_diff
        assert "slice_min" not in v.to_dict()
        assert "slice_min" in v.to_dict(slices=True)

    def test_grid_too_small(self):
        with pytest.raises(DomainError):
            analysis.classify_convexity(KKKind.KK_H, 2.5, grid_n=8)

    def test_extended_backend(self):
        v = analysis.classify_convexity(KKKind.KK_H, "2.5", grid_n=16, prec="extended")
        assert v.classification == "convex" and v.precision == "extended"


class TestDirectionsFollowShape:
    # where the grid says convex/concave, random pairs respect the implied direction
    @pytest.mark.parametrize("fn,kind,alpha", [
        (KKKind.KK_H, "H", 1.5), (KKKind.KK_H, "H", 2.5), (KKKind.KK_H, "H", 4),
        (KKKind.KK_H, "J", 2.5), (KKKind.KK_A, "A", 2.5), (KKKind.KK_A, "A", 0.5),
        (KKKind.HH, "C", 2.5), (KKKind.HH, "C", 1.2),
    ])
    def test_1000_pairs(self, fn, kind, alpha):
        shape = analysis.classify_convexity(fn, alpha).classification
        assert shape in ("convex", "concave")
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(1000):
            j1 = channel_to_joint(random_channel(rng))
            j2 = channel_to_joint(random_channel(rng))
            r = check_bounds(j1, j2, alpha, kind)
            worst = min(worst, r.bsc_slack, r.bec_slack)
        assert worst >= -1e-10


class TestCounterexamples:
    def test_a_double(self):
        rep = analysis.verify_counterexample_A("double")
        assert rep.passed, rep.to_text()
        assert rep.data["neither_window"] == ["1.581", "1.966"]

    def test_c_double(self):
        rep = analysis.verify_counterexample_C("double")
        assert rep.passed, rep.to_text()

    def test_edge_probe_near_suggested_values(self):
        a = analysis.verify_counterexample_A("extended").data["edge_probe"]["crossing_alpha"]
        c = analysis.verify_counterexample_C("extended").data["edge_probe"]["crossing_alpha"]
        assert abs(a["0.4999"] - 1.5783) < 1e-3
        assert abs(c["0.4999"] - 1.3863) < 1e-3

    def test_gap_curve(self):
        rows = analysis.gap_curve(1e-3, "A", analysis.alpha_grid("1.1", "1.2", "0.05"))
        assert [str(a) for a, _ in rows] == ["1.1", "1.15"]


class TestLinearity:
    @pytest.mark.parametrize("case", sorted(analysis.LINEAR_CASES))
    def test_cases(self, case):
        rep = analysis.verify_linearity(case, n_pairs=500)
        assert rep.passed, rep.to_text()

    def test_unknown_case(self):
        with pytest.raises(DomainError):
            analysis.verify_linearity("kkA@2")

    def test_nonlinear_defect(self):
        assert analysis.midpoint_defect(KKKind.KK_H, 2.5, grid_n=10) > 1e-6


class TestAppendix:
    def test_suite(self):
        rep = analysis.verify_appendix_identities()
        assert rep.passed, rep.to_text()
        assert len(rep.checks) == 5

    def test_concavity_direction_at_one_and_half(self):
        assert analysis.g_criterion_shape(1.5) == "concave"


class TestScan:
    def test_conjecture_evidence(self):
        assert analysis.conjecture_scan(KKKind.KK_A, ["0.5"], grid_n=32).rows[0]["classification"] == "convex"
        t = analysis.conjecture_scan(KKKind.HH, ["2.5"], grid_n=32)
        assert t.rows[0]["classification"] == "concave"
        assert t.label == "numerical evidence"

    def test_transition_reported(self):
        t = analysis.conjecture_scan(KKKind.KK_A, analysis.alpha_grid("1.5", "1.65", "0.05"), grid_n=32)
        assert t.transitions
        assert t.transitions[0]["to"] == "neither"


def test_alpha_grid_end_exclusive():
    g = analysis.alpha_grid("1.0", "1.2", "0.05")
    assert [str(a) for a in g] == ["1.0", "1.05", "1.10", "1.15"]
    with pytest.raises(DomainError):
        analysis.alpha_grid("1", "2", "0")


def test_report_text_and_dict():
    rep = analysis.Report("demo", "double", [analysis.Check("a", True, 1.0, 2.0), analysis.Check("b", False)])
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["b"]
    assert "FAIL" in rep.to_text()
    assert rep.to_dict()["passed"] is False
