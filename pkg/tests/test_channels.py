import json
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from renyi_combining import core
from renyi_combining.channels import (
    BinaryChannel,
    JointDistribution,
    channel_entropy,
    channel_to_joint,
    compress_identical_outputs,
    cond_entropy,
    cond_entropy_decomposed,
    dumps_channel,
    joint_to_channel,
    k_cond,
    k_cond_decomposed,
    load_channel,
    loads_channel,
    make_bec,
    make_bsc,
    merge_equivalent_outputs,
    product_joint,
    random_channel,
    random_joint,
    save_channel,
    tilt,
)
from renyi_combining.errors import ChannelParseError, DomainError, UnsupportedOrderError

LN2 = math.log(2)
KINDS = ["A", "H", "J", "C"]
ALPHAS = [0.5, 1.5, 2.0, 3.0]

seeds = st.integers(0, 2**32 - 1)


def brute_entropy(table, alpha, kind):
    """Loop-level evaluation of the four definitions (independent of the vectorized code)."""
    nx, ny = len(table), len(table[0])
    py = [sum(table[x][y] for x in range(nx)) for y in range(ny)]
    ys = [y for y in range(ny) if py[y] > 0]
    post = {y: [table[x][y] / py[y] for x in range(nx)] for y in ys}
    a = alpha
    if kind == "A":
        s = sum(py[y] * sum(q**a for q in post[y]) ** (1 / a) for y in ys)
        return a / (1 - a) * math.log(s)
    if kind == "H":
        return math.log(sum(py[y] * sum(q**a for q in post[y]) for y in ys)) / (1 - a)
    if kind == "J":
        joint = sum(table[x][y] ** a for x in range(nx) for y in ys)
        return (math.log(joint) - math.log(sum(py[y] ** a for y in ys))) / (1 - a)
    if kind == "C":
        return sum(py[y] * math.log(sum(q**a for q in post[y])) for y in ys) / (1 - a)
    raise ValueError(kind)


def brute_shannon(table):
    nx, ny = len(table), len(table[0])
    out = 0.0
    for y in range(ny):
        py = sum(table[x][y] for x in range(nx))
        for x in range(nx):
            if table[x][y] > 0:
                out -= table[x][y] * math.log(table[x][y] / py)
    return out


# ---------------------------------------------------------------------------
# data model


class TestBinaryChannel:
    def test_bsc_bec_shapes(self):
        W = make_bsc(0.1)
        assert W.pairs() == [(0.9, 0.1), (0.1, 0.9)]
        E = make_bec(0.25)
        assert E.pairs() == [(0.75, 0.0), (0.0, 0.75), (0.25, 0.25)]

    @pytest.mark.parametrize("pairs", [[(0.5, 0.5), (0.6, 0.5)], [(1.2, 1.0), (-0.2, 0.0)], []])
    def test_invalid(self, pairs):
        with pytest.raises(DomainError):
            BinaryChannel.from_pairs(pairs)

    def test_domain(self):
        with pytest.raises(DomainError):
            make_bsc(1.5)

    def test_immutable(self):
        W = make_bsc(0.1)
        with pytest.raises(ValueError):
            W.w0[0] = 0.3

    def test_joint_roundtrip(self):
        W = make_bsc(0.1)
        j = channel_to_joint(W)
        assert j.table[0, 0] == pytest.approx(0.45)
        assert np.allclose(j.p_y, (W.w0 + W.w1) / 2)
        back = joint_to_channel(j)
        assert np.allclose(back.w0, W.w0) and np.allclose(back.w1, W.w1)

    def test_joint_validation(self):
        with pytest.raises(DomainError):
            JointDistribution(np.array([[0.5, 0.2], [0.2, 0.2]]))


# ---------------------------------------------------------------------------
# entropies


class TestCondEntropy:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_bsc_equals_binary_entropy(self, kind, alpha):
        for p in (0.0, 0.05, 0.11, 0.3, 0.5):
            assert channel_entropy(make_bsc(p), alpha, kind) == pytest.approx(
                core.binary_renyi(p, alpha), abs=1e-13)

    @pytest.mark.parametrize("kind", KINDS + ["shannon"])
    def test_extremes(self, kind):
        assert channel_entropy(make_bsc(0.0), 2, kind) == pytest.approx(0.0, abs=1e-15)
        assert channel_entropy(make_bsc(0.5), 2, kind) == pytest.approx(LN2, abs=1e-15)
        assert channel_entropy(make_bec(1.0), 2, kind) == pytest.approx(LN2, abs=1e-15)

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_bec_closed_forms(self, alpha):
        for eps in (0.1, 0.4, 0.9):
            E = make_bec(eps)
            assert channel_entropy(E, alpha, "C") == pytest.approx(eps * LN2, abs=1e-14)
            ref = alpha / (1 - alpha) * math.log(1 - eps + eps * 2 ** ((1 - alpha) / alpha))
            assert channel_entropy(E, alpha, "A") == pytest.approx(ref, abs=1e-14)

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS), kind=st.sampled_from(KINDS))
    @settings(max_examples=200, deadline=None)
    def test_brute_force_oracle(self, seed, alpha, kind):
        j = random_joint(np.random.default_rng(seed))
        assert cond_entropy(j, alpha, kind) == pytest.approx(
            brute_entropy(j.table.tolist(), alpha, kind), abs=1e-12)

    def test_shannon_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            j = random_joint(rng)
            assert cond_entropy(j, 1, "shannon") == pytest.approx(brute_shannon(j.table.tolist()), abs=1e-13)

    def test_zero_mass_outputs_skipped(self):
        t = np.array([[0.3, 0.0, 0.2], [0.1, 0.0, 0.4]])
        j = JointDistribution(t)
        for kind in KINDS:
            assert cond_entropy(j, 2, kind) == pytest.approx(cond_entropy(j.support(), 2, kind), abs=1e-15)

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS), kind=st.sampled_from(KINDS))
    @settings(max_examples=100, deadline=None)
    def test_additivity(self, seed, alpha, kind):
        rng = np.random.default_rng(seed)
        j1, j2 = random_joint(rng), random_joint(rng)
        lhs = cond_entropy(product_joint(j1, j2), alpha, kind)
        rhs = cond_entropy(j1, alpha, kind) + cond_entropy(j2, alpha, kind)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    @given(seed=seeds, kind=st.sampled_from(KINDS))
    @settings(max_examples=100, deadline=None)
    def test_shannon_limit(self, seed, kind):
        j = random_joint(np.random.default_rng(seed))
        ref = cond_entropy(j, 1, "shannon")
        assert cond_entropy(j, 1, kind) == ref
        for a in (1 - 1e-6, 1 + 1e-6):
            assert abs(cond_entropy(j, a, kind) - ref) < 1e-5

    def test_min_entropy_limit(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            j = random_joint(rng)
            assert abs(cond_entropy(j, 1e6, "A") - cond_entropy(j, "inf", "min")) < 1e-5
            assert cond_entropy(j, "inf", "A") == pytest.approx(cond_entropy(j, None, "min"))

    @pytest.mark.parametrize("kind", ["H", "J", "C"])
    def test_infinite_order_unsupported(self, kind):
        with pytest.raises(UnsupportedOrderError):
            channel_entropy(make_bsc(0.1), "inf", kind)

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS), kind=st.sampled_from(["A", "H"]))
    @settings(max_examples=100, deadline=None)
    def test_conditioning_reduces_entropy(self, seed, alpha, kind):
        rng = np.random.default_rng(seed)
        ny, nz = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t = rng.dirichlet(np.ones(2 * ny * nz)).reshape(2, ny, nz)
        full = JointDistribution(t.reshape(2, -1))
        side = JointDistribution(t.sum(axis=1))
        assert cond_entropy(full, alpha, kind) <= cond_entropy(side, alpha, kind) + 1e-10

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS))
    @settings(max_examples=100, deadline=None)
    def test_chain_rule_j(self, seed, alpha):
        rng = np.random.default_rng(seed)
        ny, nz = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t = rng.dirichlet(np.ones(2 * ny * nz)).reshape(2, ny, nz)
        x_given_yz = cond_entropy(JointDistribution(t.reshape(2, -1)), alpha, "J")
        xy_given_z = cond_entropy(JointDistribution(t.reshape(2 * ny, nz)), alpha, "J")
        y_given_z = cond_entropy(JointDistribution(t.sum(axis=0)), alpha, "J")
        assert x_given_yz == pytest.approx(xy_given_z - y_given_z, abs=1e-10)

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS + ["inf"]), kind=st.sampled_from(KINDS))
    @settings(max_examples=200, deadline=None)
    def test_range(self, seed, alpha, kind):
        if alpha == "inf" and kind != "A":
            return
        j = channel_to_joint(random_channel(np.random.default_rng(seed)))
        h = cond_entropy(j, alpha, kind)
        assert -1e-12 <= h <= LN2 + 1e-12


class TestKValues:
    @pytest.mark.parametrize("alpha", [0.5, 2.5])
    def test_endpoints(self, alpha):
        useless = channel_to_joint(make_bsc(0.5))
        noiseless = channel_to_joint(make_bsc(0.0))
        assert k_cond(useless, alpha, "A") == pytest.approx(core.delta_const(alpha, "A"))
        assert k_cond(useless, alpha, "H") == pytest.approx(core.delta_const(alpha, "H"))
        assert k_cond(useless, alpha, "J") == pytest.approx(core.delta_const(alpha, "H"))
        for kind in ("A", "H", "J"):
            assert k_cond(noiseless, alpha, kind) == pytest.approx(1.0)

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS), kind=st.sampled_from(["A", "H", "J"]))
    @settings(max_examples=200, deadline=None)
    def test_decomposition(self, seed, alpha, kind):
        j = random_joint(np.random.default_rng(seed))
        assert k_cond_decomposed(j, alpha, kind) == pytest.approx(k_cond(j, alpha, kind), abs=1e-12)
        assert cond_entropy_decomposed(j, alpha, kind) == pytest.approx(cond_entropy(j, alpha, kind), abs=1e-12)

    def test_tilt(self):
        assert np.allclose(tilt([0.25] * 4, 3), 0.25)
        assert np.allclose(tilt([0.8, 0.2], 1), [0.8, 0.2])
        assert np.allclose(tilt([0.8, 0.2], 2), [0.64 / 0.68, 0.04 / 0.68])
        with pytest.raises(DomainError):
            tilt([0.0, 0.0], 2)


# ---------------------------------------------------------------------------
# output reduction


def _j_witness():
    # outputs 0 and 2 share the posterior (1/4, 3/4) but have different masses
    return BinaryChannel.from_pairs([(0.05, 0.15), (0.55, 0.05), (0.2, 0.6), (0.2, 0.2)])


class TestMerge:
    @given(seed=seeds, alpha=st.sampled_from(ALPHAS))
    @settings(max_examples=100, deadline=None)
    def test_preserves_a_h_c_shannon_min(self, seed, alpha):
        rng = np.random.default_rng(seed)
        base = random_channel(rng, n_outputs=3)
        # duplicate outputs with scaled copies so that merging has work to do
        s = rng.uniform(0.2, 0.8, size=3)
        W = BinaryChannel(np.concatenate([base.w0 * s, base.w0 * (1 - s)]),
                          np.concatenate([base.w1 * s, base.w1 * (1 - s)]))
        M = merge_equivalent_outputs(W)
        assert len(M) == 3
        for kind in ("A", "H", "C", "shannon"):
            assert channel_entropy(M, alpha, kind) == pytest.approx(channel_entropy(W, alpha, kind), abs=1e-12)
        assert channel_entropy(M, "inf", "min") == pytest.approx(channel_entropy(W, "inf", "min"), abs=1e-12)

    def test_changes_j(self):
        W = _j_witness()
        M = merge_equivalent_outputs(W)
        assert len(M) == 3
        assert abs(channel_entropy(M, 2, "J") - channel_entropy(W, 2, "J")) > 1e-3

    def test_random_search_finds_j_change(self):
        rng = np.random.default_rng(0)
        best = 0.0
        for _ in range(200):
            base = random_channel(rng, n_outputs=3)
            # split output 0 into two proportional pieces
            s = rng.uniform(0.05, 0.95)
            scale = np.array([s, 1, 1, 1 - s])
            W = BinaryChannel(np.append(base.w0, base.w0[0]) * scale,
                              np.append(base.w1, base.w1[0]) * scale)
            M = merge_equivalent_outputs(W)
            best = max(best, abs(channel_entropy(M, 2, "J") - channel_entropy(W, 2, "J")))
        assert best > 1e-3

    def test_bsc_unchanged(self):
        M = merge_equivalent_outputs(make_bsc(0.2))
        assert len(M) == 2

    def test_drops_zero_mass(self):
        W = BinaryChannel.from_pairs([(0.5, 0.5), (0.0, 0.0), (0.5, 0.5)])
        assert len(merge_equivalent_outputs(W)) == 1

    @given(seed=seeds, alpha=st.sampled_from(ALPHAS), kind=st.sampled_from(KINDS))
    @settings(max_examples=100, deadline=None)
    def test_compress_exact_all_kinds(self, seed, alpha, kind):
        base = random_channel(np.random.default_rng(seed), n_outputs=3)
        W = BinaryChannel(np.tile(base.w0, 2) / 2, np.tile(base.w1, 2) / 2)
        C = compress_identical_outputs(W)
        assert len(C) == 3 and C.n_outputs == 6
        assert channel_entropy(C, alpha, kind) == pytest.approx(channel_entropy(W, alpha, kind), abs=1e-13)


# ---------------------------------------------------------------------------
# serialization


class TestSerialization:
    def test_shorthand(self):
        assert load_channel("bsc:0.11").pairs() == make_bsc(0.11).pairs()
        assert load_channel("bec:0.5").pairs() == make_bec(0.5).pairs()
        with pytest.raises(ChannelParseError):
            load_channel("bsc:x")
        with pytest.raises(ChannelParseError):
            load_channel("bsc:2")

    @pytest.mark.parametrize("suffix", [".json", ".csv"])
    @given(seed=seeds)
    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    def test_roundtrip(self, tmp_path, suffix, seed):
        W = random_channel(np.random.default_rng(seed))
        path = tmp_path / f"w{suffix}"
        save_channel(W, path)
        assert load_channel(path).pairs() == W.pairs()

    def test_json_format(self):
        doc = json.loads(dumps_channel(make_bsc(0.25)))
        assert doc == {"outputs": [{"w0": 0.75, "w1": 0.25}, {"w0": 0.25, "w1": 0.75}]}

    def test_csv_header_required(self):
        with pytest.raises(ChannelParseError, match="header"):
            loads_channel("a,b\n0.5,0.5\n0.5,0.5\n", "csv")

    def test_row_index_in_error(self):
        with pytest.raises(ChannelParseError, match="row 1"):
            loads_channel("w0,w1\n0.5,0.5\nx,0.5\n", "csv")
        with pytest.raises(ChannelParseError, match="row 0"):
            loads_channel('{"outputs": [{"w0": 1}]}', "json")
        with pytest.raises(ChannelParseError, match="row 1"):
            loads_channel("w0,w1\n0.5,0.5\n-0.5,0.5\n", "csv")

    def test_invariant_violation(self):
        with pytest.raises(ChannelParseError):
            loads_channel('{"outputs": [{"w0": 0.5, "w1": 0.5}]}', "json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ChannelParseError):
            load_channel(tmp_path / "nope.json")
