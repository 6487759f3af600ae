import pytest

from covertower.errors import ConfigError, ExplicitLimitExceeded
from covertower.graph import check_bidirectional, check_cover
from covertower.tower import (
    Tower, TowerConfig, VertexRef, build_tower, load_config, monotonicity_violations, parse_config,
)


def recurrence_lengths(depth, top=2, mult=2):
    """Lengths from the rewrite rule, independent of the tower's own table."""
    table = {0: {}}
    for n in range(1, depth + 1):
        row = {n: top}
        for i in range(1, n):
            row[i] = 2 + sum(mult * table[n - 1][k] for k in range(i, n))
        table[n] = row
    return table


def test_lengths_match_recurrence_and_closed_form():
    t = build_tower(30)
    table = recurrence_lengths(30)
    for n in range(1, 31):
        for i in range(1, n + 1):
            assert t.circuit_length(n, i) == table[n][i] == 2 * 3 ** (n - i)


def test_lengths_are_exact_past_64_bits():
    t = build_tower(45)
    assert t.circuit_length(45, 1) == 2 * 3**44
    assert t.circuit_length(45, 1) > 2**63


@pytest.mark.parametrize("n", range(9))
def test_vertex_counts(n):
    t = build_tower(8)
    g = t.materialize_level(n)
    assert t.vertex_count(n) == g.n_vertices == 3**n - n
    assert g.n_edges == g.n_vertices + n


def test_level_zero_and_depth_zero():
    t = build_tower(0)
    g = t.materialize_level(0)
    assert g.n_vertices == 1 and g.edges == {(0, 0)}
    assert t.lengths(0) == ()


def test_templates():
    t = build_tower(4)
    tokens, starts = t.template(2, 1)
    assert tokens == ((0, 1), (1, 2), (2, 2), (0, 1))
    assert starts == (0, 1, 13, 17, 18)
    assert t.template(2, 3)[0] == ((0, 2),)
    assert str(t.rewrite_template(2, 1)) == "E + C_1^2 + C_2^2 + E"


def test_descend_and_vertices():
    t = build_tower(4)
    assert t.descend(3, 1, 2) == (1, 1)
    assert t.descend(3, 1, 1) == (0, 0)
    assert t.vertex(3, 1, 0) == t.vertex(3, 1, 18) == VertexRef(3)
    with pytest.raises(ValueError):
        t.vertex(3, 1, 19)
    with pytest.raises(IndexError):
        t.circuit_length(3, 4)
    with pytest.raises(IndexError):
        t.circuit_length(5, 1)


def test_vertex_ids_round_trip():
    t = build_tower(4)
    for n in range(5):
        for vid in range(t.vertex_count(n)):
            assert t.vertex_id(t.vertex_ref(n, vid)) == vid


def test_vertex_ref_str_and_validation():
    assert str(VertexRef(3, 1, 2)) == "v_{3,1,2}"
    assert str(VertexRef(2)) == "v_{2,0}"
    assert VertexRef(2).is_base


@pytest.mark.parametrize("n", range(6))
def test_default_covers(n):
    h = build_tower(6).materialize_cover(n)
    assert check_cover(h) and check_bidirectional(h)


def test_custom_schedule_covers():
    cfg = TowerConfig(depth=4, top_length=(2, 3, 2, 4), mult=(3, (2, 3), (2, 2, 4)))
    t = Tower(cfg)
    assert t.circuit_length(1, 1) == 2
    assert t.circuit_length(2, 2) == 3
    assert t.circuit_length(2, 1) == 2 + 3 * 2
    for n in range(4):
        h = t.materialize_cover(n)
        assert check_cover(h) and check_bidirectional(h)
    assert not monotonicity_violations(t)


def test_explicit_limit():
    t = Tower(TowerConfig(depth=8), limit=100)
    with pytest.raises(ExplicitLimitExceeded) as err:
        t.materialize_level(5)
    assert err.value.size > 100 and err.value.limit == 100


def test_monotonicity_default():
    assert monotonicity_violations(build_tower(12)) == []


def test_parse_config():
    cfg = parse_config("depth = 5\ntop_length = 3  # constant\nmult = 2, 3, 2, 2\nmult[2] = 4, 5\n")
    assert cfg.depth == 5
    assert cfg.top(4) == 3
    assert cfg.multiplicity(1, 1) == 2
    assert cfg.multiplicity(2, 2) == 5
    assert cfg.multiplicity(3, 1) == 2


@pytest.mark.parametrize("text, line", [
    ("depth = 4\nbogus = 1\n", 2),
    ("depth = x\n", 1),
    ("depth 4\n", 1),
    ("mult[2] = 2\n", 1),
])
def test_config_errors_name_the_line(text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


@pytest.mark.parametrize("text", ["mult = 1\n", "top_length = 1\n", "depth = -1\n"])
def test_config_rejects_degenerate_values(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_config(tmp_path):
    path = tmp_path / "t.cfg"
    path.write_text("depth = 3\n")
    assert load_config(path).depth == 3


def test_build_tower_accepts_int_or_config():
    assert build_tower(3).depth == 3
    assert build_tower(TowerConfig(depth=2)).depth == 2
