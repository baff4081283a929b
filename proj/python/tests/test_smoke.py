import math
import os
import sys
from pathlib import Path

import pytest

if "HSAT_PYTHON_DIR" in os.environ:
    sys.path.insert(0, os.environ["HSAT_PYTHON_DIR"])

import hankel_saturate as hs  # noqa: E402

GOLDEN = (1 + math.sqrt(5)) / 2
ONE_PLUS_Z = {"outer": {"kind": "formula", "payload": {"factors": [{"type": "poly", "coeffs": [{"re": 1}, {"re": 1}]}]}}}


def test_version():
    assert hs.__version__.count(".") == 2


def test_exact_norm():
    assert hs.hankel_norm_exact([1, 1]) == pytest.approx(GOLDEN, abs=1e-12)
    assert hs.hankel_norm_exact([0, 0, 0, 1j]) == pytest.approx(1.0, abs=1e-12)


def test_conjugate_cos_to_sin():
    n = 256
    t = [2 * math.pi * (j + 0.5) / n for j in range(n)]
    v = hs.conjugate([math.cos(3 * x) for x in t])
    assert max(abs(a - math.sin(3 * x)) for a, x in zip(v, t)) < 1e-12
    with pytest.raises(hs.ConfigError):
        hs.conjugate([1.0, 2.0, 3.0])


def test_norm_report():
    r = hs.norm(ONE_PLUS_Z, grid_exponent=12, n_max=64, timings=False)
    g = r["result"]
    assert g["norm"] == pytest.approx(GOLDEN, abs=1e-8)
    assert g["classification"] == "strict_interior"
    assert "timings" not in r


def test_saturation_verdicts():
    z3 = {"blaschke": {"zeros": [{"re": 0, "im": 0, "mult": 3}]}}
    assert hs.saturation(z3)["result"]["basis"] == "constant_modulus"
    atom = dict(ONE_PLUS_Z, singular={"atoms": [{"angle": 0, "mass": 1}]})
    assert hs.saturation(atom)["result"]["verdict"] == "saturated"
    assert hs.saturation(ONE_PLUS_Z)["result"]["verdict"] == "not_saturated"


def test_claim():
    u = {"family": {"dyadic": {"a": 1, "b": 0.25, "count": 12}}}
    assert hs.claim(u, kappa=1.0)["result"]["pass"]


def test_errors():
    with pytest.raises(hs.ParseError, match="/bogus"):
        hs.norm({"bogus": 1})
    with pytest.raises(hs.ConfigError):
        hs.norm(ONE_PLUS_Z, n_min=8, n_max=4)
    with pytest.raises(hs.ParseError):
        hs.norm(ONE_PLUS_Z, not_a_key=1)
    with pytest.raises(ValueError):
        hs.run("nope")
    assert issubclass(hs.ParseError, hs.HsatError)
