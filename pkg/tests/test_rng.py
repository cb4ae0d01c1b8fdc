import numpy as np

from pathmc.rng import draw, stream_key, tuple_at, tuple_buffer
from pathmc.weights import build_weight_table


def test_draws_are_deterministic_and_in_range():
    for t in (-5, -1, 0, 1, 2**40):
        u, up, plus = draw(11, t)
        assert (u, up, plus) == draw(11, t)
        assert 0.0 <= u < 1.0


def test_negative_times_differ_from_positive():
    assert draw(3, -1) != draw(3, 1)
    assert stream_key(3) != stream_key(4)


def test_seed_reduced_mod_two_to_the_64():
    assert stream_key(-1) == stream_key(2**64 - 1)


def test_bits_are_balanced():
    d = [draw(5, t) for t in range(20000)]
    u = np.array([x[0] for x in d])
    ups = np.mean([x[1] for x in d])
    plus = np.mean([x[2] for x in d])
    # 4 standard errors of a fair bit over 20000 draws is about 0.014
    assert abs(ups - 0.5) < 0.015 and abs(plus - 0.5) < 0.015
    assert abs(u.mean() - 0.5) < 0.01


def test_tuple_buffer_matches_tuple_at():
    t = build_weight_table(9)
    buf = tuple_buffer(2, -8, 4, t)
    assert buf == [tuple_at(2, s, t) for s in range(-8, 4)]
    assert all(1 <= f.i <= 9 for f in buf)
