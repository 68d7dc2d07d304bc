from __future__ import annotations

import numpy as np
import pytest

from gridgame import chronics
from gridgame.errors import ImbalanceError, LengthMismatch, UnknownChronic


def test_builtin_crisis_rows(grid4):
    chronic = chronics.load_chronic("case4gs-crisis", grid4)
    assert len(chronic) == 2
    t0 = chronic.next()
    np.testing.assert_array_equal(t0.prod_p, [150.0, 50.0])
    np.testing.assert_array_equal(t0.load_p, [50.0, 150.0])
    np.testing.assert_array_equal(t0.load_q, [0.0, 0.0])
    t1 = chronic.next()
    np.testing.assert_array_equal(t1.prod_p, [200.0, 50.0])
    np.testing.assert_array_equal(t1.load_p, [100.0, 150.0])
    assert chronic.next() is None
    assert chronic.next() is None  # exhausted stays exhausted


def test_reload_reproduces_sequence(grid4):
    first = chronics.load_chronic("case4gs-crisis", grid4)
    a = [first.next() for _ in range(2)]
    again = first.reload()
    b = [again.next() for _ in range(2)]
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.prod_p, y.prod_p)
        np.testing.assert_array_equal(x.load_p, y.load_p)


def test_case118_nominal_loads(grid118):
    chronic = chronics.load_chronic("case118-nominal", grid118)
    assert len(chronic) == 50
    step = chronic.next()
    assert step.prod_p.shape == (56,)
    assert step.load_p.shape == (99,)
    assert abs(step.prod_p.sum() - step.load_p.sum()) < 1e-6


def test_missing_column_is_length_mismatch(grid4):
    text = "prod_p_1,load_p_2,load_p_3,load_q_2,load_q_3\n150,50,100,0,0\n"
    with pytest.raises(LengthMismatch):
        chronics.parse_chronic_csv(text, grid4, "broken")


def test_imbalance_names_the_row(grid4):
    text = (
        "prod_p_1,prod_p_4,load_p_2,load_p_3,load_q_2,load_q_3\n"
        "150,50,50,150,0,0\n"
        "150,50,50,149,0,0\n"
    )
    with pytest.raises(ImbalanceError) as err:
        chronics.parse_chronic_csv(text, grid4, "broken")
    assert err.value.details["timestep"] == 1
    assert err.value.details["residual"] == pytest.approx(1.0)


def test_unknown_chronic(grid4):
    with pytest.raises(UnknownChronic):
        chronics.load_chronic("no-such-chronic", grid4)


def test_file_path_loading(tmp_path, grid4):
    path = tmp_path / "mini.csv"
    path.write_text(
        "prod_p_1,prod_p_4,load_p_2,load_p_3,load_q_2,load_q_3\n"
        "10,10,5,15,0,0\n"
    )
    chronic = chronics.load_chronic(str(path), grid4)
    assert len(chronic) == 1
    np.testing.assert_array_equal(chronic.next().prod_p, [10.0, 10.0])


def test_builtin_listing():
    names = chronics.builtin_chronics_for("case4gs")
    assert "case4gs-crisis" in names and "case4gs-relief" in names
    assert chronics.builtin_chronics_for("case118") == ["case118-nominal"]
