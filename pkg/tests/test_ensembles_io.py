import json
import math

import numpy as np
import pytest

from logmaj.ensembles import case_rng, haar_unitary, random_psd, random_weights
from logmaj.io import dumps, matrix_from_obj, read_matrices, read_matrix, write_matrices
from logmaj.linalg import RANK_TOL, commutator_norm


def test_random_psd_kinds():
    A = random_psd(1, seed=3)
    assert A.shape == (1, 1) and A[0, 0].real > 0
    A1, A2 = random_psd(4, seed=5, kind="commuting-family-2")
    assert commutator_norm(A1, A2) <= 1e-12
    P = random_psd(3, seed=7, kind="psd-rank-1")
    w = np.linalg.eigvalsh(P)
    assert np.sum(w > RANK_TOL * w.max()) == 1
    assert np.all(np.linalg.eigvalsh(random_psd(5, seed=1)) >= 1e-3 - 1e-12)
    for bad in ("spd", "psd-rank-", "commuting-family"):
        with pytest.raises(ValueError):
            random_psd(3, kind=bad)
    with pytest.raises(ValueError):
        random_psd(0)


def test_seeding_is_per_case():
    a = case_rng(42, "araki", 7).standard_normal(3)
    b = case_rng(42, "araki", 7).standard_normal(3)
    c = case_rng(42, "araki", 8).standard_normal(3)
    d = case_rng(42, "extended", 7).standard_normal(3)
    assert np.array_equal(a, b) and not np.array_equal(a, c) and not np.array_equal(a, d)


def test_haar_unitary_and_weights():
    rng = np.random.default_rng(0)
    U = haar_unitary(rng, 5)
    assert np.allclose(U.conj().T @ U, np.eye(5), atol=1e-13)
    w = random_weights(rng, 4)
    assert np.all(w > 0) and math.fsum(w) == 1.0


def test_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    B = rng.standard_normal((3, 3))
    write_matrices(tmp_path / "one.json", [A])
    assert np.array_equal(read_matrix(tmp_path / "one.json"), A)
    write_matrices(tmp_path / "two.json", [A, B])
    back = read_matrices(tmp_path / "two.json")
    assert len(back) == 2 and np.array_equal(back[1], B)
    with pytest.raises(ValueError):
        read_matrix(tmp_path / "two.json")


def test_matrix_object_validation():
    assert np.array_equal(matrix_from_obj({"dim": 2, "re": [[1, 2], [3, 4]]}), [[1, 2], [3, 4]])
    for bad in ({"re": [[1, 2]]}, {"dim": 3, "re": [[1]]}, {"im": [[1]]}, [[1]]):
        with pytest.raises(ValueError):
            matrix_from_obj(bad)


def test_dumps_handles_numpy_and_infinity():
    out = json.loads(dumps({"a": np.float64(1.5), "b": np.array([1, 2]), "c": math.inf,
                            "d": np.bool_(True), "e": -math.inf}))
    assert out == {"a": 1.5, "b": [1, 2], "c": "+inf", "d": True, "e": "-inf"}
