import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kirchhoff_singular.reports import dumps, fmt_float, from_plain, loads, profile_csv, scalar_fields, to_plain


@given(st.floats(allow_nan=False))
def test_float_text_round_trips(x):
    assert float(fmt_float(x)) == x
    assert loads(dumps({"x": x}))["x"] == x


def test_nonfinite_encoding():
    d = to_plain({"a": math.inf, "b": -math.inf, "c": [np.float64(1.5), np.nan]})
    assert d == {"a": "inf", "b": "-inf", "c": [1.5, "nan"]}
    back = from_plain(d)
    assert back["a"] == math.inf and math.isnan(back["c"][1])


def test_profile_csv_layout():
    text = profile_csv([1e-6, 1.0], [2.0, 0.0], [-1.0, -0.1], [0.0, 1e-17])
    assert text == "r,u,du_dr,residual\n1e-06,2.0,-1.0,0.0\n1.0,0.0,-0.1,1e-17\n"


def test_scalar_fields_flatten():
    rep = {"a": 1.0, "inner": {"b": True, "c": [1, 2]}, "profile": {"values": [1.0], "n_nodes": 1}}
    assert scalar_fields(rep) == {"a": 1.0, "inner.b": True}
