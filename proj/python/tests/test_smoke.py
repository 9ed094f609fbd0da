import json
from itertools import product

import pytest

import klr_lab as kl


def brute_count(g, h):
    edges = {(i, u, j, v) for i, u, j, v in g.edges()}
    n = g.n
    total = 0
    for asg in product(range(n), repeat=h.k):
        if all((a, asg[a], b, asg[b]) in edges for a, b in h.edges):
            total += 1
    return total


def test_pattern_roundtrip():
    h = kl.Pattern("k=3;edges=0-1,1-2,0-2")
    assert h.k == 3
    assert sorted(h.edges) == [(0, 1), (0, 2), (1, 2)]
    assert kl.Pattern(h.spec()) == h
    assert kl.two_density(kl.complete(3)) == (2, 1, False)


def test_bad_pattern_raises():
    with pytest.raises(ValueError):
        kl.Pattern("k=3;edges=0-0")


def test_sample_is_reproducible():
    a = kl.sample("k=3;edges=0-1,1-2,0-2", 6, 10, 42)
    b = kl.sample("k=3;edges=0-1,1-2,0-2", 6, 10, 42)
    c = kl.sample("k=3;edges=0-1,1-2,0-2", 6, 10, 43)
    assert a == b
    assert a != c
    assert [a.block_edge_count(i, j) for i, j in [(0, 1), (0, 2), (1, 2)]] == [10, 10, 10]
    assert kl.BlowupGraph.from_json(a.to_json()) == a


@pytest.mark.parametrize("seed", range(5))
def test_count_matches_brute_force(seed):
    g = kl.sample("k=3;edges=0-1,1-2,0-2", 4, 9, seed)
    assert kl.count(g) == brute_count(g, g.pattern)
    deg = kl.degrees(g, 0, 1)
    assert sum(map(sum, deg)) == kl.count(g)
    squares, glued = kl.glued_identity(g, g.pattern, 0, 1)
    assert squares == glued == sum(d * d for row in deg for d in row)


def test_regularity_block():
    full = [[1] * 6 for _ in range(6)]
    assert kl.check_block(full, 0.25, 0.5)["status"] == "certified-regular"
    split = kl.adversarial_split(6, 18, 1)
    v = kl.check_graph(split, 0.5, 0.5)
    assert v["any_irregular"]


def test_constants_and_wilson():
    c = kl.derive_constants("k=3;edges=0-1,1-2,0-2", "k=3;edges=0-1,1-2", 0.5, 0.5, 0.1, 0.25, 0.5, 0.5, 4.0, 100, 1000)
    assert c["z"] == 64
    lo, hi = kl.wilson_interval(5, 10)
    assert 0 < lo < 0.5 < hi < 1
    assert kl.wilson_interval(0, 0) == (0.0, 1.0)


def test_run_config(tmp_path):
    cfg = {"pattern": "k=3;edges=0-1,1-2,0-2", "n": 8, "m": 20, "eps": 0.25, "lambda": 0.5, "gamma": 0.5,
           "samples": 20, "seed": 7, "mode": "spectral"}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    r1 = kl.run_config(str(path), str(tmp_path / "a"), True)
    r2 = kl.run_config(str(path), str(tmp_path / "b"))
    assert r1["report"]["total"] == 20
    assert (tmp_path / "a" / "samples.csv").read_text() == (tmp_path / "b" / "samples.csv").read_text()
    assert json.loads(r1["manifest"])["m_used"] == 20


def test_multi_exposure_shrinks():
    t = kl.multi_exposure("k=3;edges=0-1,1-2,0-2", 10, 100, 2, 3)
    assert t["rounds"] == 4
    assert t["d_sizes"][0] == 100
    assert all(x >= y for x, y in zip(t["d_sizes"], t["d_sizes"][1:]))
