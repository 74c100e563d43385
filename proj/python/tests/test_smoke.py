import json

import numpy as np
import pytest

import holointerp as hi


def small_problem():
    p = hi.Problem.seeded(3, 4)
    p.stages = 5
    return p


def test_word_roundtrip_and_inverse():
    w = hi.Word.identity(2)
    assert len(w) == 0
    z = np.array([1 + 2j, -0.5j])
    assert np.allclose(w(z), z)
    assert hi.Word.from_json(w.to_json()).to_json() == w.to_json()


def test_solve_matches_and_verifies():
    p = small_problem()
    r = hi.solve(p)
    assert sorted(r.matched) == [0, 1, 2, 3]
    assert r.residual <= 1e-8
    for a, b in zip(p.sources, p.targets):
        assert np.linalg.norm(r.word(a) - b) <= 1e-8
    back = r.word.eval_inverse(r.word.eval(p.sources))
    assert max(np.linalg.norm(x - a) for x, a in zip(back, p.sources)) <= 1e-9

    rep = hi.verify(r.word, p)
    assert rep["format_version"] == 1
    assert rep["pass"] is True
    assert len(rep["stages"]) == 5
    sched = r.word.schedule
    assert all(b - a > 1 for a, b in zip(sched, sched[1:]))


def test_problem_json_roundtrip():
    p = small_problem()
    doc = json.loads(p.to_json())
    assert doc["format_version"] == 1
    q = hi.Problem.from_json(p.to_json())
    assert q.stages == 5
    assert np.allclose(q.targets, p.targets)


def test_bad_problem_raises_value_errors():
    doc = json.loads(small_problem().to_json())
    doc["epsilon"] = 2.0
    with pytest.raises(hi.ValidationError):
        hi.Problem.from_json(json.dumps(doc))
    with pytest.raises(ValueError):
        hi.Problem.from_json("{")


def test_tame_normalize_hyperplane():
    pts = [np.array([complex(x, -x / 2), 0.3 + 0.1j]) for x in (1.5, -2.0, 3.25, 4.0)]
    w = hi.tame_normalize(pts)
    for j, z in enumerate(pts, start=1):
        assert np.linalg.norm(w(z) - np.array([j, 0])) <= 1e-9
    with pytest.raises(hi.Error):
        hi.tame_normalize([np.array([0, 0]), np.array([1, 1]), np.array([2, 5j])])


def test_orbit_csv_header_and_size():
    r = hi.solve(small_problem())
    csv = hi.orbit_csv(r.word, (3.0, 5.0, -1.0, 1.0), 0.5)
    lines = csv.strip().split("\n")
    assert lines[0] == "re,im,escape_stage"
    assert len(lines) == 1 + 25
    assert "4,0,0" in lines
