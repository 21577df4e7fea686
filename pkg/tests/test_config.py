import json
from fractions import Fraction

import pytest

from determinacy.carleman import GevreyLog, Tabulated
from determinacy.config import (
    ConfigError,
    exact,
    load_problem,
    parse_plan,
    parse_problem,
    parse_sequence,
    parse_set,
)
from determinacy.lojasiewicz import Arc, Origin, Subspace

BASE = {"variables": ["x1", "x2"], "f": "(x1^2+x2^4)^2"}


def test_defaults():
    spec = parse_problem(BASE)
    assert [str(p) for p in spec.psi] == ["x1", "x2"]
    assert isinstance(spec.Y.pieces[0], Origin)
    assert spec.M == GevreyLog(1, 0)
    assert spec.strategy == "lowest-degree-minor"
    assert spec.distance_method == "penalty"


def test_exact_numbers():
    assert exact("4/3", "x") == Fraction(4, 3)
    assert exact(0.1, "x") == Fraction(1, 10)
    assert exact(2, "x") == 2
    for bad in (True, None, [1], "abc", "1/0"):
        with pytest.raises(ConfigError):
            exact(bad, "x")


def test_sequences():
    M = parse_sequence({"family": "gevrey_log", "alpha": "3/2", "beta": 1})
    assert M == GevreyLog(Fraction(3, 2), 1) and isinstance(M.beta, int)
    T = parse_sequence({"family": "tabulated", "values": [1, 2, 6]})
    assert isinstance(T, Tabulated) and T.jmax == 2
    for bad in ({"family": "weird"}, {"alpha": -1}, {"family": "tabulated", "values": [1, -2]}, []):
        with pytest.raises(ConfigError):
            parse_sequence(bad)


def test_sets():
    Y = parse_set([{"type": "subspace", "vanishing": [1]}, {"type": "power_curve", "mu": "3/2"}], 2)
    assert isinstance(Y.pieces[0], Subspace) and Y.pieces[0].vanishing == (0,)
    assert isinstance(Y.pieces[1], Arc)
    arc = parse_set({"type": "arc", "components": [{"power": 2, "signed": True}, {}]}, 2)
    assert arc.pieces[0].components[0].power == 2.0
    for bad in ({"type": "subspace", "vanishing": [3]}, {"type": "arc", "components": [{}]},
                {"type": "power_curve", "mu": 0}, {"type": "blob"}):
        with pytest.raises(ConfigError):
            parse_set(bad, 2)


def test_plan():
    plan = parse_plan({"radii": {"hi": 0.0625, "lo": 0.0625 / 16, "count": 5}, "directions": 8, "seed": 3})
    assert plan.radii == pytest.approx((0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625))
    assert plan.directions == 8 and plan.seed == 3
    for bad in ({"radii": {"hi": 0.1, "lo": 0.2}}, {"radii": [0.9]}):
        with pytest.raises(ConfigError):
            parse_plan(bad)


@pytest.mark.parametrize("patch,match", [
    ({"variables": []}, "variables"),
    ({"f": "x1 + y"}, "unknown identifier"),
    ({"f": "x1 + 1"}, "vanish"),
    ({"psi": ["x1 + 1"]}, "psi"),
    ({"strategy": "magic"}, "strategy"),
    ({"strategy": "user"}, "needs a polynomial g"),
    ({"method": "newton"}, "method"),
    ({"branches": [{"params": ["u"], "z": ["u"]}]}, "components"),
    ({"branches": [{"params": ["I"], "z": ["I", "I"]}]}, "reserved"),
])
def test_problem_errors(patch, match):
    with pytest.raises(ConfigError, match=match):
        parse_problem({**BASE, **patch})


def test_missing_f():
    with pytest.raises(ConfigError, match="missing field f"):
        parse_problem({"variables": ["x1"]})


def test_load_problem_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_problem(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_problem(bad)
    arr = tmp_path / "arr.json"
    arr.write_text(json.dumps([1, 2]))
    with pytest.raises(ConfigError, match="object"):
        load_problem(arr)
