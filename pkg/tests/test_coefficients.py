import math

import numpy as np
import pytest

from shiftconv.coefficients import (
    CoefficientFileError, CoefficientRangeError, DoubleCoefficients, builtin, ingest_coefficients,
    ingest_double_coefficients, write_coefficients, write_double_coefficients,
)

import oracles


def test_builtins_match_oracles():
    assert builtin("tau3", 30).window(1, 30).tolist() == [oracles.tau3(n) for n in range(1, 31)]
    assert builtin("tau", 30).window(1, 30).tolist() == [oracles.divisor_count(n) for n in range(1, 31)]
    assert builtin("ones", 5).window(2, 4).tolist() == [1, 1, 1]
    assert not np.any(builtin("zero", 5).window(1, 5))
    with pytest.raises(ValueError):
        builtin("mu", 5)


def test_window_out_of_range():
    with pytest.raises(CoefficientRangeError):
        builtin("ones", 10).window(5, 11)
    with pytest.raises(CoefficientRangeError):
        builtin("ones", 10)(np.array([0]))


def test_small_file(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("# n_min=1 n_max=2\n1,0.5\n2,-1.25\n")
    seq = ingest_coefficients(p)
    assert (seq.n_min, seq.n_max) == (1, 2) and seq.values.tolist() == [0.5, -1.25]


def test_gap_names_missing_index(tmp_path):
    p = tmp_path / "gap.txt"
    p.write_text("# n_min=1 n_max=9\n" + "".join(f"{n},1.0\n" for n in range(1, 10) if n != 7))
    with pytest.raises(CoefficientRangeError, match="n=7"):
        ingest_coefficients(p)


@pytest.mark.parametrize("body, match", [
    ("1,nan\n", "non-finite"),
    ("1,inf\n", "non-finite"),
    ("1,2,3\n", "expected"),
    ("1,abc\n", "cannot parse"),
    ("1,1\n1,2\n", "duplicate"),
])
def test_malformed_records(tmp_path, body, match):
    p = tmp_path / "bad.txt"
    p.write_text("# n_min=1 n_max=1\n" + body)
    with pytest.raises(CoefficientFileError, match=match):
        ingest_coefficients(p)


def test_missing_header_and_file(tmp_path):
    p = tmp_path / "nohead.txt"
    p.write_text("1,1.0\n")
    with pytest.raises(CoefficientFileError, match="header"):
        ingest_coefficients(p)
    with pytest.raises(CoefficientFileError):
        ingest_coefficients(tmp_path / "absent.txt")


def test_round_trip(tmp_path):
    seq = builtin("tau3", 50)
    p = tmp_path / "t.txt"
    write_coefficients(seq, p)
    back = ingest_coefficients(p)
    assert back.values.tolist() == seq.values.astype(float).tolist()


def test_double_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    tab = {(a, b): complex(*rng.normal(size=2)) for a in range(1, 4) for b in range(1, 4)}
    dc = DoubleCoefficients(0.1 + 2j, 0.1 - 2j, tab)
    p = tmp_path / "d.txt"
    write_double_coefficients(dc, p)
    back = ingest_double_coefficients(p)
    assert back.mu1 == dc.mu1 and back.mu2 == dc.mu2 and back.table == tab
    assert back.mu3 == -0.2
    with pytest.raises(CoefficientRangeError):
        back(5, 5)


def test_double_rejects_nan(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("# mu1=0 mu2=0\n1,1,nan,0\n")
    with pytest.raises(CoefficientFileError, match="non-finite"):
        ingest_double_coefficients(p)
