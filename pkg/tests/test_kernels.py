import numpy as np
import pytest

from lutldpc import _kernels_py, kernels
from lutldpc.decoder import Decoder, DecoderConfig
from lutldpc.kernels import available_backends, compile_tree, get_backend, label_cn_tables

needs_cython = pytest.mark.skipif("cython" not in available_backends(),
                                  reason="compiled extension not built")


def test_backend_selection(monkeypatch):
    assert "python" in available_backends()
    assert get_backend("python") is _kernels_py
    monkeypatch.setenv("LUTLDPC_PURE_PYTHON", "1")
    assert kernels.default_backend_name() == "python"
    monkeypatch.setenv("LUTLDPC_PURE_PYTHON", "0")
    expected = "cython" if "cython" in available_backends() else "python"
    assert kernels.default_backend_name() == expected
    with pytest.raises(ValueError, match="unavailable"):
        get_backend("fortran")


def test_label_cn_tables():
    sign_of, mag_of, label_of = label_cn_tables(8)
    assert sign_of.tolist() == [1, 1, 1, 1, 0, 0, 0, 0]
    assert mag_of.tolist() == [3, 2, 1, 0, 0, 1, 2, 3]
    for lab in range(8):
        assert label_of[sign_of[lab], mag_of[lab]] == lab
    with pytest.raises(ValueError):
        label_cn_tables(7)


def test_compiled_tree_matches_tree(shipped_art):
    gen = np.random.default_rng(0)
    for tree in list(shipped_art.vn_trees[1:]) + [shipped_art.decision_tree]:
        ct = compile_tree(tree)
        assert ct.n_nodes == len(tree.tables())
        k = tree.n_cn_leaves
        ch = gen.integers(0, 16, size=(3, 40)).astype(np.uint8)
        c2v = gen.integers(0, 8, size=(3, 40 * 6)).astype(np.uint8)
        if k == 6:
            got = _kernels_py.decide_lut(ch, c2v, 6, ct)
            ref = tree.evaluate(ch, [c2v[:, j::6] for j in range(6)])
        else:
            got = np.empty_like(c2v)
            _kernels_py.vn_stage_lut(ch, c2v, got, 6, ct)
            # edge j of every VN reads the other five edges in order
            j = 2
            others = [c2v[:, e::6] for e in range(6) if e != j]
            ref = tree.evaluate(ch, others)
            got = got[:, j::6]
        assert np.array_equal(got, ref)


def _random_buffers(gen, f, n, d_v, kind):
    e = n * d_v
    if kind == "float":
        return gen.normal(0, 3, (f, n)), gen.normal(0, 3, (f, e))
    if kind == "fixed":
        return (2 * gen.integers(-8, 8, (f, n)) + 1).astype(np.int32), \
               (2 * gen.integers(-16, 16, (f, e)) + 1).astype(np.int32)
    return gen.integers(0, 16, (f, n)).astype(np.uint8), gen.integers(0, 8, (f, e)).astype(np.uint8)


@needs_cython
def test_stage_kernels_agree(shipped_graph, shipped_art):
    py, cy = get_backend("python"), get_backend("cython")
    gen = np.random.default_rng(3)
    g = shipped_graph
    cn = np.ascontiguousarray(g.cn_edge_ids.reshape(g.n_cn, g.d_c))
    f, n, e = 4, g.n_vn, g.edge_count
    ch, c2v = _random_buffers(gen, f, n, 6, "float")
    outs = []
    for mod in (py, cy):
        v2c = np.empty((f, e))
        mod.vn_stage_float(ch, c2v, v2c, 6)
        c = np.empty((f, e))
        mod.cn_stage_float(v2c, c, cn)
        outs.append((v2c, c, mod.decide_float(ch, c2v, 6)))
    for a, b in zip(*outs):
        assert np.array_equal(a, b)

    ch, c2v = _random_buffers(gen, f, n, 6, "fixed")
    outs = []
    for mod in (py, cy):
        v2c = np.empty((f, e), dtype=np.int32)
        sat = mod.vn_stage_fixed(ch, c2v, v2c, 6, 15)
        c = np.empty((f, e), dtype=np.int32)
        mod.cn_stage_int(v2c, c, cn)
        outs.append((v2c, c, mod.decide_fixed(ch, c2v, 6), sat))
    for a, b in zip(*outs):
        assert np.array_equal(a, b)

    ch, c2v = _random_buffers(gen, f, n, 6, "lut")
    tables = label_cn_tables(8)
    outs = []
    for mod in (py, cy):
        v2c = np.empty((f, e), dtype=np.uint8)
        mod.vn_stage_lut(ch, c2v, v2c, 6, compile_tree(shipped_art.vn_trees[2]))
        c = np.empty((f, e), dtype=np.uint8)
        mod.cn_stage_label(v2c, c, cn, *tables)
        outs.append((v2c, c, mod.decide_lut(ch, c2v, 6, compile_tree(shipped_art.decision_tree))))
    for a, b in zip(*outs):
        assert np.array_equal(a, b)


@needs_cython
@pytest.mark.parametrize("variant", ["float", "fixed", "lut"])
def test_full_decode_backends_identical(variant, shipped_graph, shipped_art):
    if variant == "float":
        cfg = DecoderConfig("float_ms")
    elif variant == "fixed":
        cfg = DecoderConfig("fixed_ms", 5, 4, 4, fixed_scale=0.9)
    else:
        cfg = DecoderConfig.lut(shipped_art)
    gen = np.random.default_rng(4)
    llr = 4.0 + 3.0 * gen.standard_normal((16, 2048))
    res = []
    for name in ("python", "cython"):
        dec = Decoder(cfg, shipped_graph, name)
        bits, diag = dec.decode_batch(dec.channel_input(llr))
        res.append((bits, diag.syndrome_ok, diag.saturations))
    assert np.array_equal(res[0][0], res[1][0])
    assert np.array_equal(res[0][1], res[1][1])
    assert res[0][2] == res[1][2]


def test_lut_path_does_no_label_arithmetic(shipped_graph, shipped_art):
    dec = Decoder(DecoderConfig.lut(shipped_art), shipped_graph, "python")
    gen = np.random.default_rng(5)
    ch = dec.channel_input(3.0 + 3.0 * gen.standard_normal((2, 2048)))
    with _kernels_py.count_label_arithmetic() as count:
        dec.decode_batch(ch)
        assert count() == 0
        # the counter does see arithmetic when it happens
        _kernels_py._lab(np.arange(3, dtype=np.uint8)) + 1
        assert count() == 1


def test_fallback_when_extension_missing():
    import subprocess
    import sys
    code = ("import sys; sys.modules['lutldpc._ckernels'] = None\n"
            "from lutldpc import kernels\n"
            "print(kernels.available_backends(), kernels.default_backend_name())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "['python'] python"
