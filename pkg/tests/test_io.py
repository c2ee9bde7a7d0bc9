import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from colemantrace import io
from colemantrace.eigen import MembershipReport
from colemantrace.errors import SerializationError
from colemantrace.series import Series

C3_REF = io.TowerRef(3, [-3, 0, 1], [[0, -1], 0, 1], 24)
TOWER = io.build_tower(C3_REF)


def test_minimal_config_defaults():
    cfg = io.parse_config("tower: {p: 3}\n")
    assert (cfg.D, cfg.N, cfg.seed) == (32, 16, 0)
    assert cfg.e_KL == 1
    # internal precision is inflated by the budgeting rule
    assert cfg.tower.prec == io.working_precision(32, 16, 3) == 64


def test_two_level_config_echoes_ramification():
    cfg = io.parse_config(json.dumps({"tower": {"p": 3, "g_L": [-3, 0, 1],
                                                "g_K": [[0, -1], 0, 1]},
                                      "D": 8, "N": 4}))
    assert cfg.e_KL == 2
    assert io.parse_config("tower: C3\nD: 8\nN: 4").tower == cfg.tower


@pytest.mark.parametrize("text, path", [
    ("D: -1", "D"),
    ("N: 0", "N"),
    ("D: 2.5", "D"),
    ("bogus: 1", "bogus"),
    ("tower: {p: 3, h: 1}", "tower"),
    ("tower: C9", "tower"),
    ("seed: -3", "seed"),
    ("tower: {p: 4}", "tower"),
])
def test_schema_errors_name_the_key(text, path):
    with pytest.raises(io.ConfigError) as exc:
        io.parse_config(text)
    assert exc.value.path == path


def test_malformed_text():
    with pytest.raises(io.ConfigError):
        io.parse_config("D: [1")
    with pytest.raises(io.ConfigError):
        io.parse_config("- 1\n- 2")


coords = st.integers(0, 3 ** 12)


@given(st.integers(0, 6), st.sampled_from(["K", "L"]), st.data())
def test_series_round_trip(D, level, data):
    ring = TOWER.O_K if level == "K" else TOWER.O_L
    c = np.array([[data.draw(coords) for _ in range(ring.n)] for _ in range(D + 1)],
                 dtype=object)
    p = np.array([data.draw(st.integers(0, ring.cap)) for _ in range(D + 1)])
    s = Series(ring, c, p, poly=data.draw(st.booleans()), canonical=False)
    text = io.serialize(s, TOWER)
    back = io.deserialize(text)
    assert back.ring is ring
    assert np.array_equal(back.c, s.c) and np.array_equal(back.p, s.p)
    assert back.poly == s.poly
    assert io.serialize(back, TOWER) == text


def test_other_objects_round_trip():
    from colemantrace.eigen import Context
    ctx = Context.build(TOWER, 6, 4)
    F = ctx.G_K.law(5)
    back = io.deserialize(io.serialize(F, TOWER))
    assert np.array_equal(back.c, F.c) and np.array_equal(back.p, F.p)
    lg = ctx.G_K.log_series(6)
    back = io.deserialize(io.serialize(lg, TOWER))
    assert back.shift == lg.shift and back.num == lg.num
    rep = MembershipReport("indeterminate", 5, 3, kind="C", detail="x")
    assert io.deserialize(io.serialize(rep)) == rep
    items = io.deserialize(io.serialize([Series.x(TOWER.O_K, 3)], TOWER))
    assert len(items) == 1 and items[0] == Series.x(TOWER.O_K, 3)


def test_corrupted_and_wrong_version():
    text = io.serialize(Series.x(TOWER.O_K, 3), TOWER)
    with pytest.raises(SerializationError):
        io.deserialize(text[: len(text) // 2])
    d = json.loads(text)
    d["version"] = 99
    with pytest.raises(SerializationError, match="version"):
        io.deserialize(json.dumps(d))
    d = json.loads(text)
    d["coeffs"] = d["coeffs"][:-1]
    with pytest.raises(SerializationError):
        io.deserialize(json.dumps(d))
    d = json.loads(text)
    del d["level"]
    with pytest.raises(SerializationError, match="level"):
        io.deserialize(json.dumps(d))


def test_file_helpers(tmp_path):
    s = Series.from_coeffs(TOWER.O_L, [0, 1, 2], D=4)
    path = tmp_path / "s.json"
    io.write(str(path), s, TOWER)
    assert io.read(str(path)) == s
