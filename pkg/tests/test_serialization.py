import math

import numpy as np
import pytest

from mubrelation import serialization as ser
from mubrelation.exceptions import NotOrthonormal
from mubrelation.measure import sample_measurements
from mubrelation.mub import generate_mub
from mubrelation.qmat import random_density
from mubrelation.relation import trial_states, verify_relation
from mubrelation.serialization import FormatError


def round_trip(doc):
    return ser.loads(ser.dumps(doc))


def test_matrix_round_trip_is_exact():
    m = random_density(4, "mixed", 0)
    back = ser.matrix_from_dict(round_trip(ser.matrix_to_dict(m)))
    assert back.tobytes() == np.asarray(m, dtype=complex).tobytes()


def test_seventeen_digits():
    text = ser.dumps({"x": 1 / 3})
    assert "0.33333333333333331" in text
    assert float(ser.loads(text)["x"]) == 1 / 3


def test_nan_is_null():
    assert ser.loads(ser.dumps({"x": float("nan")}))["x"] is None


def test_dumps_deterministic():
    doc = ser.mubset_to_dict(generate_mub(5))
    assert ser.dumps(doc) == ser.dumps(ser.mubset_to_dict(generate_mub(5)))


@pytest.mark.parametrize("dim", [2, 3, 7])
def test_mubset_round_trip(dim):
    mubs = generate_mub(dim)
    back = ser.mubset_from_dict(round_trip(ser.mubset_to_dict(mubs)))
    for a, b in zip(mubs.bases, back.bases):
        np.testing.assert_array_equal(a.vectors, b.vectors)


def test_record_round_trip():
    rec = sample_measurements(random_density(3, "pure", 1), generate_mub(3), 100, seed=2)
    back = ser.record_from_dict(round_trip(ser.record_to_dict(rec)))
    assert (back.seed, back.shots) == (rec.seed, rec.shots)
    np.testing.assert_array_equal(back.counts, rec.counts)


def test_relation_report_fields():
    rep = verify_relation(trial_states(3, 30, seed=0), generate_mub(3))
    doc = round_trip(ser.relation_report_to_dict(rep))
    assert set(doc) >= {"dim", "lambda_fit", "residual", "holds", "worst_state", "trials"}
    assert doc["holds"] is True
    assert math.isclose(doc["lambda_fit"], 0.75, abs_tol=1e-9)
    ser.matrix_from_dict(doc["worst_state"])


@pytest.mark.parametrize("text", ["{", "[1, 2", "not json"])
def test_malformed_json(text):
    with pytest.raises(FormatError):
        ser.loads(text)


@pytest.mark.parametrize("doc", [{}, {"dim": 2, "re": [1, 0, 0], "im": [0, 0, 0, 0]}, {"dim": "x", "re": [], "im": []}])
def test_bad_matrix(doc):
    with pytest.raises(FormatError):
        ser.matrix_from_dict(doc)


def test_bad_mubset():
    with pytest.raises(FormatError):
        ser.bases_from_dict({"dim": 2, "bases": [[{"re": [1, 0]}]]})
    with pytest.raises(FormatError):
        ser.bases_from_dict({"dim": 3, "bases": [[{"re": [1, 0], "im": [0, 0]}] * 2]})
    with pytest.raises(NotOrthonormal):
        ser.bases_from_dict({"dim": 2, "bases": [[{"re": [1, 0], "im": [0, 0]}] * 2]})


def test_bad_record():
    with pytest.raises(FormatError):
        ser.record_from_dict({"seed": 0, "shots": 2})
    with pytest.raises(FormatError):
        ser.record_from_dict({"seed": 0, "shots": 2, "counts": [[1, 0], [2, 0]]})
