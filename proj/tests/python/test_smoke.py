import pytest

import chaoslink as cl


def test_codec_vectors():
    assert cl.to_bitword(1032) == "1000010000001000"
    assert cl.to_bitword(-3107) == "0000110000100011"
    assert cl.to_bitword(0) == "1000000000000000"
    for raw in (-32767, -1, 0, 1, 32767):
        assert cl.from_bitword(cl.to_bitword(raw)) == raw
    with pytest.raises(ValueError):
        cl.from_bitword("101")


def test_quantize():
    assert cl.quantize(1.0) == 3107
    assert cl.quantize(100.0) == 32767
    assert cl.dequantize(3107) == 1.0


def test_simulate_starts_at_initial_condition():
    states = cl.simulate((1032, -3107, 0), 100)
    assert len(states) == 101
    assert states[0] == (1032, -3107, 0)
    assert states == cl.simulate((1032, -3107, 0), 100)


def test_sync_trace_and_settling():
    cfg = cl.LinkConfig()
    trace = cl.run_sync(cfg, 1000)
    assert len(trace) == 1000
    assert trace[0] == (-1032, -1553, 1553)
    assert cl.settling_time(trace, 10) is None
    assert cl.run_sync(cfg, 0) == []


def test_noise_free_bits():
    cfg = cl.LinkConfig()
    cal = cl.calibrate(cfg)
    assert cal.settled
    msg = cl.random_bits(200, 5)
    r = cl.run_bits(cfg, cal, msg)
    assert r.errors == 0
    assert r.recovered == msg
    assert r.binding == "none"
    pts = cl.sweep(cfg, cal, [35.0], [10.0], bits_per_trial=200, threads=2)
    assert len(pts) == 1
    assert pts[0].bits == 200
    assert pts[0].binding == "ebn0"
