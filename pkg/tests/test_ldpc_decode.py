import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fecbench.llr import FLOAT, FixedMode, LlrValue, OpLedger
from fecbench.ldpc import (
    LmsBatchDecoder,
    SparseParityCheck,
    cn_update_minsum,
    count_ops_lms,
    derive_layers,
    expand_protograph,
    lms_decode,
    parse_protograph,
    spa_decode,
    syndrome_ok,
    systematic_encoder,
)

CODES = Path(__file__).resolve().parents[1] / "data" / "codes"


def load_reg36():
    base = parse_protograph((CODES / "reg36_z16.txt").read_text())
    code = expand_protograph(base)
    return code, derive_layers(code, base.z)


def random_code(rng, n_checks, n_vars, max_deg=8):
    cn = []
    for _ in range(n_checks):
        d = int(rng.integers(2, min(max_deg, n_vars) + 1))
        cn.append(rng.choice(n_vars, size=d, replace=False))
    return SparseParityCheck.from_cn_adj(n_checks, n_vars, cn)


class TestCheckNodeUpdate:
    def test_oracle_degree_three(self):
        led = OpLedger()
        out = cn_update_minsum([1.0, -2.0, 0.5], alpha=0.75, ledger=led)
        assert out == pytest.approx([-0.375, 0.375, -0.75])
        assert (led.min_count, led.add_count) == (3, 3)

    def test_op_charge_scales_with_degree(self):
        for d in (2, 4, 7):
            led = OpLedger()
            cn_update_minsum([1.0] * d, ledger=led)
            assert (led.min_count, led.add_count) == (2 * d - 3, d)

    def test_degree_below_two_rejected(self):
        with pytest.raises(ValueError, match="degree"):
            cn_update_minsum([1.0])

    def test_llr_value_float_mode(self):
        out = cn_update_minsum([LlrValue(1.0, FLOAT), LlrValue(-2.0, FLOAT)])
        assert all(isinstance(v, LlrValue) for v in out)
        assert [v.value for v in out] == pytest.approx([-1.5, 0.75])

    def test_fixed_mode_shift_attenuation(self):
        mode = FixedMode(bits=6, step=0.5)
        out = cn_update_minsum([LlrValue(1.0, mode), LlrValue(-2.0, mode),
                                LlrValue(0.5, mode)])
        # magnitudes k=1 -> 1, k=2 -> 2 after k - (k >> 2); times step
        assert [v.value for v in out] == pytest.approx([-0.5, 0.5, -1.0])
        assert all(v.mode is mode for v in out)

    def test_fixed_mode_requires_three_quarters(self):
        mode = FixedMode(bits=6, step=0.5)
        with pytest.raises(ValueError, match="0.75"):
            cn_update_minsum([LlrValue(1.0, mode), LlrValue(2.0, mode)], alpha=0.5)

    def test_mode_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            cn_update_minsum([LlrValue(1.0, FLOAT),
                              LlrValue(1.0, FixedMode(bits=5, step=1.0))])

    @settings(deadline=None, max_examples=60)
    @given(st.lists(st.tuples(st.floats(0.01, 20.0), st.booleans()),
                    min_size=2, max_size=8))
    def test_dominates_exact_boxplus(self, draws):
        vals = [(-m if s else m) for m, s in draws]
        out = cn_update_minsum(vals, alpha=1.0)
        t = [np.tanh(v / 2.0) for v in vals]
        for j, got in enumerate(out):
            prod = float(np.prod([x for i, x in enumerate(t) if i != j]))
            exact = 2.0 * np.arctanh(np.clip(prod, -1 + 1e-15, 1 - 1e-15))
            assert abs(got) >= abs(exact) - 1e-9
            if abs(exact) > 1e-9:
                assert np.sign(got) == np.sign(exact)


class TestLayeredMinSum:
    def test_noiseless_converges_in_one_iteration(self):
        code, layers = load_reg36()
        _, encode = systematic_encoder(code)
        x = encode(np.ones(systematic_encoder(code)[0].size, dtype=np.uint8))
        llr = (1.0 - 2.0 * x.astype(float)) * 8.0
        out = lms_decode(llr, code, layers)
        assert out.syndrome_ok and out.iterations_used == 1
        assert np.array_equal(out.hard_bits, x)
        assert out.ledger.total == count_ops_lms(code, 1)

    def test_ledger_matches_five_e_minus_three_m(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            code = random_code(rng, int(rng.integers(2, 7)), int(rng.integers(8, 16)))
            layers = derive_layers(code, int(rng.integers(1, code.m + 1)))
            t = int(rng.integers(1, 5))
            llr = rng.normal(size=code.n)
            out = lms_decode(llr, code, layers, max_iter=t, early_stop=False)
            assert out.iterations_used == t
            assert out.ledger.total == count_ops_lms(code, t) == t * (5 * code.e - 3 * code.m)
            assert out.ledger.add_count == t * 3 * code.e

    def test_corrects_single_flip(self):
        code, layers = load_reg36()
        llr = np.full(code.n, 4.0)
        llr[13] = -1.5
        out = lms_decode(llr, code, layers)
        assert out.syndrome_ok and not out.hard_bits.any()

    def test_puncture_ignores_channel_value(self):
        code, layers = load_reg36()
        rng = np.random.default_rng(11)
        llr = rng.normal(0.8, 1.0, size=code.n)
        poisoned = llr.copy()
        poisoned[[4, 40]] = 1e6
        a = lms_decode(poisoned, code, layers, puncture=(4, 40), max_iter=8)
        clean = llr.copy()
        clean[[4, 40]] = 0.0
        b = lms_decode(clean, code, layers, max_iter=8)
        assert np.array_equal(a.hard_bits, b.hard_bits)
        assert a.iterations_used == b.iterations_used

    def test_layering_must_cover_checks(self):
        code, layers = load_reg36()
        with pytest.raises(ValueError, match="cover"):
            lms_decode(np.zeros(code.n), code, layers[:-1])
        with pytest.raises(ValueError, match="cover"):
            lms_decode(np.zeros(code.n), code, layers + [layers[0]])

    def test_wrong_llr_length(self):
        code, layers = load_reg36()
        with pytest.raises(ValueError, match="LLR"):
            lms_decode(np.zeros(code.n + 1), code, layers)


class TestBatchDecoder:
    def test_bit_identical_to_scalar(self):
        code, layers = load_reg36()
        dec = LmsBatchDecoder(code, layers)
        rng = np.random.default_rng(3)
        llrs = rng.normal(0.7, 1.2, size=(16, code.n))
        bits, iters, ok = dec.decode(llrs, max_iter=12)
        for b in range(16):
            ref = lms_decode(llrs[b], code, layers, max_iter=12)
            assert np.array_equal(bits[b], ref.hard_bits)
            assert iters[b] == ref.iterations_used
            assert bool(ok[b]) == ref.syndrome_ok

    def test_no_early_stop_runs_full_budget(self):
        code, layers = load_reg36()
        dec = LmsBatchDecoder(code, layers)
        llrs = np.random.default_rng(4).normal(0.2, 1.0, size=(5, code.n))
        _, iters, _ = dec.decode(llrs, max_iter=3, early_stop=False)
        assert (iters == 3).all()

    def test_rejects_mixed_degree_layer(self):
        code = SparseParityCheck.from_cn_adj(2, 6, [[0, 1], [2, 3, 4]])
        with pytest.raises(ValueError, match="degrees"):
            LmsBatchDecoder(code, [np.array([0, 1])])

    def test_rejects_shared_variable_layer(self):
        code = SparseParityCheck.from_cn_adj(2, 5, [[0, 1, 2], [2, 3, 4]])
        with pytest.raises(ValueError, match="sharing"):
            LmsBatchDecoder(code, [np.array([0, 1])])

    def test_rejects_incomplete_layering(self):
        code, layers = load_reg36()
        with pytest.raises(ValueError, match="cover"):
            LmsBatchDecoder(code, layers[:-1])

    def test_requires_batch_shape(self):
        code, layers = load_reg36()
        dec = LmsBatchDecoder(code, layers)
        with pytest.raises(ValueError, match="batch"):
            dec.decode(np.zeros(code.n), max_iter=2)


class TestIterationBudget:
    def test_more_iterations_never_hurt_much(self):
        # paired noise: the 8-iteration decoder should beat the 2-iteration
        # one frame for frame up to rare flips
        code, layers = load_reg36()
        dec = LmsBatchDecoder(code, layers)
        rng = np.random.default_rng(99)
        sigma2 = 1.0 / (2 * 0.5 * 10 ** (2.0 / 10))
        n_frames = 400
        y = 1.0 + rng.normal(scale=np.sqrt(sigma2), size=(n_frames, code.n))
        llr = 2.0 * y / sigma2
        bits2, _, _ = dec.decode(llr, max_iter=2)
        bits8, _, _ = dec.decode(llr, max_iter=8)
        err2 = int((bits2.any(axis=1)).sum())
        err8 = int((bits8.any(axis=1)).sum())
        assert err8 <= err2 + max(3, int(0.15 * err2))
        assert err2 > 0  # the operating point actually exercises the decoder


class TestSumProduct:
    def test_clean_codeword_one_iteration(self):
        code, _ = load_reg36()
        _, encode = systematic_encoder(code)
        x = encode(np.arange(systematic_encoder(code)[0].size, dtype=np.uint8) % 2)
        out = spa_decode((1.0 - 2.0 * x.astype(float)) * 6.0, code)
        assert out.syndrome_ok and out.iterations_used == 1
        assert np.array_equal(out.hard_bits, x)
        assert out.ledger.total == 0  # reference decoder: outside the op model

    def test_matches_enumerated_bitwise_map_on_tree(self):
        code = SparseParityCheck.from_cn_adj(2, 5, [[0, 1, 2], [2, 3, 4]])
        h = code.to_dense()
        words = np.array(list(itertools.product((0, 1), repeat=5)), dtype=np.uint8)
        words = words[~((words @ h.T) % 2).any(axis=1)]
        rng = np.random.default_rng(17)
        compared = 0
        for _ in range(400):
            llr = rng.normal(0.0, 2.0, size=5)
            out = spa_decode(llr, code, max_iter=10)
            if out.iterations_used < 2:
                continue  # early stop before messages reach the whole tree
            # bitwise posterior by enumeration: weight(x) = exp(-sum L_i x_i)
            w = np.exp(-(words @ llr))
            skip = False
            map_bits = np.zeros(5, dtype=np.uint8)
            for j in range(5):
                p1 = w[words[:, j] == 1].sum()
                p0 = w[words[:, j] == 0].sum()
                if abs(p1 - p0) <= 1e-9 * (p1 + p0):
                    skip = True
                    break
                map_bits[j] = 1 if p1 > p0 else 0
            if skip:
                continue
            assert np.array_equal(out.hard_bits, map_bits)
            compared += 1
        assert compared >= 100

    def test_disjoint_checks_exact_after_one_iteration(self):
        code = SparseParityCheck.from_cn_adj(2, 6, [[0, 1, 2], [3, 4, 5]])
        rng = np.random.default_rng(23)
        for _ in range(100):
            llr = rng.normal(0.0, 3.0, size=6)
            out = spa_decode(llr, code, max_iter=10)
            for j in range(6):
                others = [t for t in ([0, 1, 2] if j < 3 else [3, 4, 5]) if t != j]
                ext = 2 * np.arctanh(np.prod(np.tanh(llr[others] / 2.0)))
                post = llr[j] + ext
                if abs(post) > 1e-9:
                    assert out.hard_bits[j] == (1 if post < 0 else 0)


class TestCodewordTwist:
    def test_decoding_commutes_with_codeword_offset(self):
        # decode(L * (1-2c)) == decode(L) xor c for any codeword c — holds
        # for min-sum regardless of check-degree parity, and justifies
        # all-zero simulation on codes where negate-all does not apply
        from fecbench.ldpc import build_ar4ja_protograph
        proto = build_ar4ja_protograph("1/2", 128, seed=0)
        code = expand_protograph(proto)
        layers = derive_layers(code, proto.z)
        punct = proto.puncture_vars()
        _, encode = systematic_encoder(code)
        dec = LmsBatchDecoder(code, layers)
        rng = np.random.default_rng(41)
        c = encode(rng.integers(0, 2, size=(12, 128)).astype(np.uint8))
        llrs = rng.normal(0.8, 1.1, size=(12, code.n))
        llrs[:, punct] = 0.0
        twisted = llrs * (1.0 - 2.0 * c.astype(float))
        bits, iters, ok = dec.decode(llrs, max_iter=8)
        bits_tw, iters_tw, ok_tw = dec.decode(twisted, max_iter=8)
        assert np.array_equal(bits_tw, bits ^ c)
        assert np.array_equal(iters_tw, iters)
        assert np.array_equal(ok_tw, ok)


class TestSyndrome:
    def test_zero_word_and_flip(self):
        code, _ = load_reg36()
        zero = np.zeros(code.n, dtype=np.uint8)
        assert syndrome_ok(code, zero)
        flipped = zero.copy()
        flipped[5] = 1
        assert not syndrome_ok(code, flipped)

    def test_wrong_length(self):
        code, _ = load_reg36()
        with pytest.raises(ValueError, match="bits"):
            syndrome_ok(code, np.zeros(3, dtype=np.uint8))

    def test_count_ops_rejects_negative(self):
        code, _ = load_reg36()
        with pytest.raises(ValueError):
            count_ops_lms(code, -1)
