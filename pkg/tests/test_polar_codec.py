import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fecbench.llr import OpLedger
from fecbench.polar.codec import (
    build_pruned_tree,
    count_ops_sc,
    count_ops_ssc,
    polar_encode,
    sc_decode,
    ssc_decode,
)
from fecbench.polar.construction import (
    M_INF,
    CodeConstruction,
    construct_ga,
    make_shortening,
)


def manual_construction(n_mother, info, shortening=None):
    if shortening is None:
        shortening = make_shortening(n_mother, n_mother, "full")
    return CodeConstruction(
        n_mother=n_mother, k=len(info), design_ebno_db=0.0,
        info_set=np.array(sorted(info), dtype=np.int64), shortening=shortening)


class TestEncode:
    def test_n2(self):
        assert polar_encode(np.array([1, 1], dtype=np.uint8)).tolist() == [0, 1]
        assert polar_encode(np.array([1, 0], dtype=np.uint8)).tolist() == [1, 0]

    def test_single_top_bit_gives_all_ones(self):
        for n in (2, 8, 32):
            u = np.zeros(n, dtype=np.uint8)
            u[n - 1] = 1
            assert polar_encode(u).tolist() == [1] * n

    def test_batched(self):
        u = np.array([[1, 1, 0, 0], [0, 0, 0, 1]], dtype=np.uint8)
        x = polar_encode(u)
        assert x.shape == (2, 4)
        assert x[0].tolist() == [0, 1, 0, 0]
        assert x[1].tolist() == [1, 1, 1, 1]

    @settings(deadline=None)
    @given(st.integers(1, 8), st.data())
    def test_involution(self, n, data):
        u = np.array(data.draw(st.lists(st.integers(0, 1), min_size=2**n,
                                        max_size=2**n)), dtype=np.uint8)
        assert np.array_equal(polar_encode(polar_encode(u)), u)


class TestScDecode:
    def test_hand_trace_n2(self):
        cons = manual_construction(2, [1])
        led = OpLedger()
        u_hat, x_hat = sc_decode(np.array([1.0, -2.0]), cons, led)
        assert u_hat.tolist() == [0, 1]
        assert x_hat.tolist() == [1, 1]
        assert (led.add_count, led.min_count) == (1, 1)

    def test_frozen_bits_stay_zero(self):
        cons = manual_construction(8, [5, 6, 7])
        rng = np.random.default_rng(0)
        u_hat, _ = sc_decode(rng.normal(size=(16, 8)), cons, OpLedger())
        frozen = np.setdiff1d(np.arange(8), cons.info_set)
        assert not u_hat[:, frozen].any()

    def test_ledger_law(self):
        for n_mother, b in ((2, 1), (8, 3), (64, 5)):
            cons = manual_construction(n_mother, list(range(n_mother // 2, n_mother)))
            led = OpLedger()
            sc_decode(np.random.default_rng(1).normal(size=(b, n_mother)), cons, led)
            half_law = b * (n_mother // 2) * int(np.log2(n_mother))
            assert led.add_count == half_law
            assert led.min_count == half_law
            assert led.total == b * count_ops_sc(n_mother)

    def test_decodes_clean_codeword(self):
        cons = construct_ga(64, 32, 3.0, rate_for_noise=0.5)
        rng = np.random.default_rng(2)
        msg = rng.integers(0, 2, size=32).astype(np.uint8)
        u = np.zeros(64, dtype=np.uint8)
        u[cons.info_set] = msg
        x = polar_encode(u)
        llr = (1.0 - 2.0 * x.astype(float)) * 10.0
        u_hat, x_hat = sc_decode(llr, cons, OpLedger())
        assert np.array_equal(u_hat, u)
        assert np.array_equal(x_hat, x)


class TestPrunedTree:
    def test_leaf_kinds(self):
        assert build_pruned_tree(manual_construction(4, [])).root.kind == "rate0"
        assert build_pruned_tree(manual_construction(4, [0, 1, 2, 3])).root.kind == "rate1"
        assert build_pruned_tree(manual_construction(4, [3])).root.kind == "rep"
        assert build_pruned_tree(manual_construction(4, [1, 2, 3])).root.kind == "spc"
        root = build_pruned_tree(manual_construction(4, [2, 3])).root
        assert root.kind == "branch"
        assert root.left.kind == "rate0" and root.right.kind == "rate1"

    def test_branch_cost_is_span_width(self):
        tree = build_pruned_tree(manual_construction(4, [2, 3]))
        assert tree.root.add_ops == 2 and tree.root.min_ops == 2
        assert count_ops_ssc(tree) == 4

    def test_rep_and_spc_cost(self):
        assert count_ops_ssc(build_pruned_tree(manual_construction(8, [7]))) == 7
        assert count_ops_ssc(build_pruned_tree(manual_construction(8, list(range(1, 8))))) == 7

    def test_rate_extremes_cost_nothing(self):
        assert count_ops_ssc(build_pruned_tree(manual_construction(16, []))) == 0
        assert count_ops_ssc(build_pruned_tree(manual_construction(16, list(range(16))))) == 0

    def test_shortening_reduces_cost(self):
        short = make_shortening(16, 12, "natural")
        info = [5, 6, 7, 9, 10, 11]
        full_tree = build_pruned_tree(manual_construction(16, info))
        short_tree = build_pruned_tree(manual_construction(16, info, short))
        assert count_ops_ssc(short_tree) < count_ops_ssc(full_tree)

    def test_rejects_unfrozen_shortened_index(self):
        short = make_shortening(8, 6, "natural")
        with pytest.raises(ValueError):
            build_pruned_tree(manual_construction(8, [5, 6, 7], short))


class TestSscLeaves:
    def test_spc_flips_least_reliable(self):
        cons = manual_construction(4, [1, 2, 3])
        tree = build_pruned_tree(cons)
        led = OpLedger()
        _, x_hat = ssc_decode(np.array([0.5, -1.0, 0.2, 2.0]), tree, led)
        assert x_hat.tolist() == [0, 1, 1, 0]
        assert led.min_count == 3 and led.add_count == 0

    def test_spc_keeps_even_parity_input(self):
        cons = manual_construction(4, [1, 2, 3])
        tree = build_pruned_tree(cons)
        _, x_hat = ssc_decode(np.array([0.5, -1.0, -0.2, 2.0]), tree, OpLedger())
        assert x_hat.tolist() == [0, 1, 1, 0]

    def test_rep_broadcasts_sum_sign(self):
        cons = manual_construction(4, [3])
        tree = build_pruned_tree(cons)
        led = OpLedger()
        u_hat, x_hat = ssc_decode(np.array([1.0, -3.0, 0.5, 0.5]), tree, led)
        assert x_hat.tolist() == [1, 1, 1, 1]
        assert u_hat.tolist() == [0, 0, 0, 1]
        assert led.add_count == 3 and led.min_count == 0


class TestSscEquivalence:
    @settings(deadline=None, max_examples=40)
    @given(st.integers(3, 8), st.data())
    def test_matches_sc_bit_for_bit(self, n, data):
        n_mother = 2**n
        k = data.draw(st.integers(1, n_mother - 1))
        seed = data.draw(st.integers(0, 2**31))
        cons = construct_ga(n_mother, k, 2.0, rate_for_noise=0.5)
        tree = build_pruned_tree(cons)
        rng = np.random.default_rng(seed)
        llrs = rng.normal(0.8, 1.5, size=(4, n_mother))
        led_sc, led_ssc = OpLedger(), OpLedger()
        u_sc, x_sc = sc_decode(llrs, cons, led_sc)
        u_ssc, x_ssc = ssc_decode(llrs, tree, led_ssc)
        assert np.array_equal(u_sc, u_ssc)
        assert np.array_equal(x_sc, x_ssc)
        assert led_ssc.total == 4 * count_ops_ssc(tree)

    def test_shortened_equivalence_with_known_tail(self):
        for variant in ("natural", "bit_reverse"):
            short = make_shortening(64, 48, variant)
            cons = construct_ga(64, 24, 3.0, rate_for_noise=0.5, shortening=short)
            tree = build_pruned_tree(cons)
            rng = np.random.default_rng(9)
            llrs = rng.normal(0.5, 2.0, size=(8, 64))
            llrs[:, 48:] = M_INF  # known wires in internal order
            u_sc, x_sc = sc_decode(llrs, cons, OpLedger())
            led = OpLedger()
            u_ssc, x_ssc = ssc_decode(llrs, tree, led)
            assert np.array_equal(u_sc, u_ssc)
            assert np.array_equal(x_sc, x_ssc)
            assert led.total == 8 * count_ops_ssc(tree)
            assert not x_ssc[:, 48:].any()  # known-zero wires decode to zero


class TestCodewordTwist:
    def test_decoding_commutes_with_codeword_offset(self):
        # decode(L * (1-2c)) == decode(L) xor c for any codeword c; this is
        # the property that justifies all-zero-codeword simulation, and it
        # covers shortened codes where the all-ones twist is unavailable
        for variant, n_target in (("full", 64), ("natural", 48), ("bit_reverse", 48)):
            short = make_shortening(64, n_target, variant)
            cons = construct_ga(64, 24, 3.0, rate_for_noise=0.5, shortening=short)
            tree = build_pruned_tree(cons)
            rng = np.random.default_rng(31)
            u = np.zeros((16, 64), dtype=np.uint8)
            u[:, cons.info_set] = rng.integers(0, 2, size=(16, 24))
            c = polar_encode(u)
            llrs = rng.normal(0.9, 1.4, size=(16, 64))
            if n_target < 64:
                llrs[:, n_target:] = M_INF
            twisted = llrs * (1.0 - 2.0 * c.astype(float))
            u_base, x_base = ssc_decode(llrs, tree, OpLedger())
            u_tw, x_tw = ssc_decode(twisted, tree, OpLedger())
            assert np.array_equal(x_tw, x_base ^ c)
            assert np.array_equal(u_tw, u_base ^ u)


class TestWagnerOptimality:
    def test_spc_equals_ml_small(self):
        rng = np.random.default_rng(3)
        s = 8
        cons = manual_construction(s, list(range(1, s)))
        tree = build_pruned_tree(cons)
        # all even-weight words of length s
        words = np.array([[int(b) for b in format(w, f"0{s}b")]
                          for w in range(2**s)], dtype=np.uint8)
        words = words[words.sum(axis=1) % 2 == 0]
        signs = 1.0 - 2.0 * words.astype(float)
        for _ in range(200):
            llr = rng.normal(0, 2.0, size=s)
            _, x_hat = ssc_decode(llr, tree, OpLedger())
            best = (signs @ llr).max()
            got = float((1.0 - 2.0 * x_hat.astype(float)) @ llr)
            assert got == pytest.approx(best, abs=1e-9)
