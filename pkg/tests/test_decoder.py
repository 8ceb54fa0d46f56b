from fractions import Fraction

import numpy as np
import pytest

from lutldpc.channel import llr_channel
from lutldpc.decoder import (Decoder, DecoderConfig, DecoderConfigError, cn_update_minsum,
                             cn_update_naive, decide, decode, default_fixed_scale, fixed_channel,
                             fixed_channel_mi, vn_update_lut, vn_update_ms)
from lutldpc.ldpc import ParityCheckMatrix, build_tanner_graph

from oracles import naive_leave_one_out

RATE = Fraction(13, 16)


def configs(art):
    return {"float": DecoderConfig("float_ms", art.iterations),
            "fixed": DecoderConfig("fixed_ms", art.iterations, 4, 4, fixed_scale=0.9),
            "lut": DecoderConfig.lut(art)}


def mirror_channel(dec, ch):
    if dec.cfg.variant == "lut":
        return dec.n_ch_labels - 1 - ch
    return -ch


# -- single-node operations -----------------------------------------------------------

def test_cn_update_example():
    assert cn_update_minsum([1.0, -2.0, 3.0]).tolist() == [-2.0, 1.0, -1.0]
    assert cn_update_minsum([5, 5, -1]).tolist() == [-1, -1, 5]
    with pytest.raises(ValueError):
        cn_update_minsum([1.0])


def test_two_min_equals_naive_with_ties(rng):
    for _ in range(300):
        v = rng.integers(-4, 5, size=int(rng.integers(2, 12))) * 2 + 1
        assert np.array_equal(cn_update_minsum(v), naive_leave_one_out(v))
        assert np.array_equal(cn_update_naive(v), naive_leave_one_out(v))


def test_vn_update_examples():
    assert vn_update_ms(2.0, [1.0, -3.0, 1.0, 1.0, -1.0]) == 1.0
    # fixed point: odd half-LSB values, an even sum rounds toward zero to odd
    assert vn_update_ms(3, [1, -3, 1, 1, -1], msg_max=7) == 1
    assert vn_update_ms(-1, [1], msg_max=7) == -1           # zero sum keeps channel sign
    assert vn_update_ms(1, [-1], msg_max=7) == 1
    assert vn_update_ms(15, [15, 15], msg_max=7) == 7        # saturation
    assert vn_update_ms(-15, [-15, 5], msg_max=7) == -7


def test_decide_examples(toy_art):
    f = DecoderConfig("float_ms")
    x = DecoderConfig("fixed_ms", 5, 4, 4, fixed_scale=1.0)
    assert decide(-0.5, [0.25], f) == 1
    assert decide(0.0, [1.0, -1.0], f) == 0
    assert decide(-1, [1], x) == 1
    assert decide(1, [-1], x) == 0
    lut = DecoderConfig.lut(toy_art)
    assert decide(15, [7, 7, 7], lut) == 0
    assert decide(0, [0, 0, 0], lut) == 1


def test_vn_update_lut_mirror(toy_art, rng):
    tree = toy_art.vn_trees[2]
    for _ in range(200):
        ch = int(rng.integers(0, 16))
        msgs = [int(v) for v in rng.integers(0, 8, size=2)]
        out = vn_update_lut(ch, msgs, tree)
        assert vn_update_lut(15 - ch, [7 - m for m in msgs], tree) == 7 - out
    with pytest.raises(IndexError):
        vn_update_lut(16, [0, 0], tree)
    with pytest.raises(IndexError):
        vn_update_lut(0, [8, 0], tree)
    with pytest.raises(ValueError):
        vn_update_lut(0, [0], tree)


# -- fixed-point channel -------------------------------------------------------------

def test_fixed_channel_mid_rise():
    got = fixed_channel([0.0, 0.4, 1.0, -0.1, -2.5, 99.0, -99.0], 3, 1.0)
    assert got.tolist() == [1, 1, 3, -1, -5, 7, -7]


def test_default_fixed_scale_maximizes_channel_mi():
    s = default_fixed_scale(4.5, RATE, 4, points=400)
    best = fixed_channel_mi(4.5, RATE, 4, s)
    for f in (0.8, 1.25):
        assert fixed_channel_mi(4.5, RATE, 4, s * f) <= best
    assert 0 < best < 1


# -- whole decoders -------------------------------------------------------------------

@pytest.mark.parametrize("variant", ["float", "fixed", "lut"])
def test_noiseless_all_zero(variant, toy_graph, toy_art, shipped_graph, shipped_art):
    for graph, art in ((toy_graph, toy_art), (shipped_graph, shipped_art)):
        dec = Decoder(configs(art)[variant], graph)
        bits, diag = dec.decode_batch(dec.channel_input(np.full((2, graph.n_vn), 6.0)))
        assert not bits.any()
        assert diag.syndrome_ok.all()


@pytest.mark.parametrize("variant", ["float", "fixed", "lut"])
def test_single_error_corrected(variant, toy_graph, toy_art):
    dec = Decoder(configs(toy_art)[variant], toy_graph)
    llr = np.full((96, 96), 5.0)
    np.fill_diagonal(llr, -5.0)
    bits, diag = dec.decode_batch(dec.channel_input(llr))
    assert not bits.any()
    assert diag.syndrome_ok.all()


@pytest.mark.parametrize("variant", ["float", "fixed", "lut"])
def test_channel_negation_flips_every_bit(variant, toy_graph, toy_art):
    dec = Decoder(configs(toy_art)[variant], toy_graph)
    gen = np.random.default_rng(9)
    llr = llr_channel(2.0, 0.5, gen.integers(0, 2, (1000, 96)), gen.standard_normal((1000, 96)))
    ch = dec.channel_input(llr)
    b1, _ = dec.decode_batch(ch)
    b2, _ = dec.decode_batch(mirror_channel(dec, ch))
    assert np.array_equal(b1, 1 - b2)


def test_float_scale_invariance(toy_graph):
    dec = Decoder(DecoderConfig("float_ms", 8), toy_graph)
    gen = np.random.default_rng(10)
    llr = llr_channel(2.0, 0.5, 0, gen.standard_normal((200, 96)))
    ref, _ = dec.decode_batch(llr)
    for a in (0.25, 8.0, 3.0):
        assert np.array_equal(dec.decode_batch(a * llr)[0], ref)


def test_wide_fixed_point_tracks_float(shipped_graph):
    # at the design point; frames float cannot decode diverge chaotically
    gen = np.random.default_rng(11)
    llr = llr_channel(4.5, RATE, 0, gen.standard_normal((100, 2048)))
    fl, diag = Decoder(DecoderConfig("float_ms"), shipped_graph).decode_batch(llr)
    fx_dec = Decoder(DecoderConfig("fixed_ms", 5, 12, 12, fixed_scale=0.02), shipped_graph)
    fx, _ = fx_dec.decode_batch(fx_dec.channel_input(llr))
    assert np.mean(fl == fx) >= 0.999
    ok = diag.syndrome_ok
    assert np.array_equal(fl[ok], fx[ok])


def test_saturation_counted(toy_graph):
    dec = Decoder(DecoderConfig("fixed_ms", 3, 4, 3, fixed_scale=1.0), toy_graph)
    _, diag = dec.decode_batch(dec.channel_input(np.full((1, 96), 50.0)))
    assert diag.saturations > 0
    dec = Decoder(DecoderConfig("fixed_ms", 3, 3, 8, fixed_scale=1.0), toy_graph)
    _, diag = dec.decode_batch(dec.channel_input(np.full((1, 96), 0.5)))
    assert diag.saturations == 0


def test_decode_single_frame(toy_graph, toy_art):
    bits, diag = decode(DecoderConfig("float_ms"), toy_graph, np.full(96, 3.0))
    assert bits.shape == (96,) and diag.syndrome_ok[0]
    with pytest.raises(ValueError):
        decode(DecoderConfig("float_ms"), toy_graph, np.zeros((2, 96)))


# -- validation -----------------------------------------------------------------------

def test_config_errors(toy_art, shipped_art):
    with pytest.raises(DecoderConfigError):
        DecoderConfig("bp")
    with pytest.raises(DecoderConfigError):
        DecoderConfig("float_ms", 0)
    with pytest.raises(DecoderConfigError):
        DecoderConfig("fixed_ms", 5, 4, 4)
    with pytest.raises(DecoderConfigError):
        DecoderConfig("fixed_ms", 5, 4, 1, fixed_scale=1.0)
    with pytest.raises(DecoderConfigError):
        DecoderConfig("lut", 5, 4, 3)
    with pytest.raises(DecoderConfigError, match="artifact has I=5"):
        DecoderConfig("lut", 4, 4, 3, shipped_art)
    assert DecoderConfig.lut(shipped_art).describe()["artifact_sha256"] == shipped_art.sha256()


def test_decoder_graph_checks(toy_art, shipped_graph, toy_graph):
    with pytest.raises(DecoderConfigError, match="designed for"):
        Decoder(DecoderConfig.lut(toy_art), shipped_graph)
    irregular = build_tanner_graph(ParityCheckMatrix.from_column_supports(2, [[0, 1], [0], [1]]))
    with pytest.raises(DecoderConfigError, match="regular"):
        Decoder(DecoderConfig("float_ms"), irregular)


def test_decode_batch_input_checks(toy_graph, toy_art):
    dec = Decoder(DecoderConfig("float_ms"), toy_graph)
    with pytest.raises(ValueError, match="96"):
        dec.decode_batch(np.zeros((1, 95)))
    fx = Decoder(DecoderConfig("fixed_ms", 5, 4, 4, fixed_scale=1.0), toy_graph)
    with pytest.raises(ValueError, match="odd"):
        fx.decode_batch(np.full((1, 96), 2))
    with pytest.raises(ValueError, match="odd"):
        fx.decode_batch(np.full((1, 96), 17))
    lut = Decoder(DecoderConfig.lut(toy_art), toy_graph)
    with pytest.raises(IndexError):
        lut.decode_batch(np.full((1, 96), 16))
