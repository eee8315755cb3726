import gzip
import io
import math

import numpy as np
import pytest

from apcg.data import (DatasetMeta, SparseColMatrix, column_stats,
                       parse_libsvm, spectral_norm, synth_binary, write_libsvm)
from apcg.errors import LabelError, ParseError

import oracles


def random_sparse(d, n, seed, density=0.4):
    rng = np.random.Generator(np.random.PCG64(seed))
    dense = rng.standard_normal((d, n)) * (rng.uniform(size=(d, n)) < density)
    return SparseColMatrix.from_dense(dense)


# ---------------------------------------------------------------------------
# matrix container
# ---------------------------------------------------------------------------

def test_dense_round_trip_and_products():
    A = random_sparse(7, 5, seed=0)
    dense = A.to_dense()
    rng = np.random.Generator(np.random.PCG64(1))
    x = rng.standard_normal(5)
    w = rng.standard_normal(7)
    assert np.allclose(A.dot(x), dense @ x, atol=1e-13)
    assert np.allclose(A.tdot(w), dense.T @ w, atol=1e-13)
    assert np.allclose(A.col_norms_sq(), (dense ** 2).sum(axis=0), atol=1e-13)
    again = SparseColMatrix.from_dense(dense)
    assert np.array_equal(again.indices, A.indices)
    assert np.array_equal(again.values, A.values)


def test_matrix_rejects_invalid_structure():
    with pytest.raises(ValueError):  # decreasing indices within a column
        SparseColMatrix(d=3, n=1, indptr=np.array([0, 2]),
                        indices=np.array([2, 1]), values=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):  # duplicate index
        SparseColMatrix(d=3, n=1, indptr=np.array([0, 2]),
                        indices=np.array([1, 1]), values=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):  # stored zero
        SparseColMatrix(d=3, n=1, indptr=np.array([0, 1]),
                        indices=np.array([0]), values=np.array([0.0]))
    with pytest.raises(ValueError):  # index out of range
        SparseColMatrix(d=3, n=1, indptr=np.array([0, 1]),
                        indices=np.array([3]), values=np.array([1.0]))
    with pytest.raises(ValueError):  # bad indptr
        SparseColMatrix(d=3, n=2, indptr=np.array([0, 1]),
                        indices=np.array([0]), values=np.array([1.0]))


def test_scale_columns():
    A = random_sparse(4, 3, seed=2)
    B = A.scale_columns(np.array([1.0, -1.0, 2.0]))
    assert np.allclose(B.to_dense(), A.to_dense() * np.array([1.0, -1.0, 2.0]))
    with pytest.raises(ValueError):
        A.scale_columns(np.array([1.0, 0.0, 1.0]))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def test_parse_simple_line():
    A, labels = parse_libsvm(io.StringIO("+1 1:2.0 3:-1.0\n"))
    assert A.d == 3 and A.n == 1
    assert np.array_equal(A.to_dense()[:, 0], [2.0, 0.0, -1.0])
    assert labels.tolist() == [1.0]


def test_parse_empty_stream():
    A, labels = parse_libsvm(io.StringIO(""))
    assert A.d == 0 and A.n == 0 and labels.size == 0


def test_parse_multiple_lines_and_label_signs():
    text = "+1 1:1.5\n-1 2:0.25 4:-3.0\n+1 1:1.0 2:2.0 3:3.0\n"
    A, labels = parse_libsvm(io.StringIO(text))
    assert A.d == 4 and A.n == 3
    assert labels.tolist() == [1.0, -1.0, 1.0]
    dense = A.to_dense()
    assert dense[1, 1] == 0.25 and dense[3, 1] == -3.0


def test_parse_drops_explicit_zeros():
    A, _ = parse_libsvm(io.StringIO("+1 1:0.0 2:5.0\n"))
    assert A.nnz == 1
    assert A.d == 2  # the zero still advances the inferred dimension


@pytest.mark.parametrize("line,line_no", [
    ("+1 1:2.0\n*5 1:1.0\n", 2),       # unparseable label
    ("+2 1:1.0\n", 1),                  # label not +-1
    ("0 1:1.0\n", 1),
    ("+1 1:1.0 1:2.0\n", 1),            # duplicate index
    ("+1 3:1.0 2:2.0\n", 1),            # out of order
    ("+1 0:1.0\n", 1),                  # 1-based indices on disk
    ("+1 abc\n", 1),                    # token without colon
    ("+1 a:1.0\n", 1),                  # non-integer index
    ("+1 1:xyz\n", 1),                  # non-numeric value
    ("+1 1:inf\n", 1),                  # non-finite value
    ("+1 1:1.0\n\n+1 1:1.0\n", 2),      # blank line mid-file
])
def test_parse_rejects_malformed_lines_with_line_numbers(line, line_no):
    with pytest.raises(ParseError) as err:
        parse_libsvm(io.StringIO(line))
    assert err.value.line_no == line_no


def test_parse_label_error_is_specific():
    with pytest.raises(LabelError):
        parse_libsvm(io.StringIO("3 1:1.0\n"))


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.Generator(np.random.PCG64(3))
    for trial in range(5):
        A = random_sparse(10, 8, seed=trial, density=0.3)
        labels = np.where(rng.uniform(size=8) < 0.5, 1.0, -1.0)
        path = tmp_path / f"rt{trial}.txt"
        write_libsvm(A, labels, path)
        B, lab2 = parse_libsvm(path, n_features=10)
        assert np.array_equal(lab2, labels)
        assert B.d == A.d and B.n == A.n
        assert np.array_equal(B.indices, A.indices)
        assert np.array_equal(B.values, A.values)  # bit exact


def test_round_trip_gzip(tmp_path):
    A = random_sparse(6, 4, seed=9, density=0.5)
    labels = np.array([1.0, -1.0, 1.0, 1.0])
    buf = io.StringIO()
    write_libsvm(A, labels, buf)
    path = tmp_path / "data.txt.gz"
    with gzip.open(path, "wt", encoding="ascii") as fh:
        fh.write(buf.getvalue())
    B, lab2 = parse_libsvm(path, n_features=6)
    assert np.array_equal(B.values, A.values)
    assert np.array_equal(lab2, labels)


def test_parse_respects_explicit_feature_count():
    A, _ = parse_libsvm(io.StringIO("+1 2:1.0\n"), n_features=10)
    assert A.d == 10
    with pytest.raises(ParseError):
        parse_libsvm(io.StringIO("+1 12:1.0\n"), n_features=10)


# ---------------------------------------------------------------------------
# synthetic generator
# ---------------------------------------------------------------------------

def test_synth_same_seed_identical():
    A1, l1 = synth_binary(50, 20, 0.2, seed=7)
    A2, l2 = synth_binary(50, 20, 0.2, seed=7)
    assert np.array_equal(A1.values, A2.values)
    assert np.array_equal(A1.indices, A2.indices)
    assert np.array_equal(l1, l2)
    A3, _ = synth_binary(50, 20, 0.2, seed=8)
    assert not np.array_equal(A1.values, A3.values)


def test_synth_normalization_gives_unit_R():
    A, _ = synth_binary(100, 30, 0.3, seed=1, normalize=True, min_nnz=1)
    norms = np.sqrt(A.col_norms_sq())
    assert np.max(np.abs(norms - 1.0)) <= 1e-12
    R, _ = column_stats(A)
    assert abs(R - 1.0) <= 1e-12


def test_synth_nnz_concentration():
    A, _ = synth_binary(1000, 100, 0.01, seed=2)
    expected = 0.01 * 1000 * 100
    assert abs(A.nnz - expected) <= 0.10 * expected


def test_synth_labels_are_signs():
    _, labels = synth_binary(40, 10, 0.5, seed=3, noise=0.3)
    assert set(np.unique(labels)) <= {1.0, -1.0}


def test_synth_condition_knob_scales_rows():
    A, _ = synth_binary(200, 50, 0.5, seed=4, normalize=False, condition=100.0)
    dense = np.abs(A.to_dense())
    top = dense[:5].mean()
    bottom = dense[-5:].mean()
    assert top > 10 * bottom


def test_synth_rejects_bad_sparsity():
    with pytest.raises(ValueError):
        synth_binary(10, 5, 0.0)
    with pytest.raises(ValueError):
        synth_binary(10, 5, 1.5)


# ---------------------------------------------------------------------------
# column stats
# ---------------------------------------------------------------------------

def test_column_stats_identity():
    A = SparseColMatrix.from_dense(np.eye(3))
    R, sigma = column_stats(A)
    assert R == pytest.approx(1.0)
    assert sigma == pytest.approx(1.0, rel=1e-6)


def test_column_stats_single_column():
    A = SparseColMatrix.from_dense(np.array([[3.0], [4.0]]))
    R, sigma = column_stats(A)
    assert R == pytest.approx(5.0)
    assert sigma == pytest.approx(5.0, rel=1e-9)


def test_spectral_norm_matches_dense_svd():
    for seed in range(4):
        A = random_sparse(20, 50, seed=seed, density=0.3)
        want = oracles.dense_spectral_norm(A)
        assert spectral_norm(A) == pytest.approx(want, rel=1e-5)


def test_norm_chain_inequality():
    # ||A||_2 <= ||A||_F <= sqrt(n) R
    for seed in range(3):
        A, _ = synth_binary(60, 25, 0.4, seed=seed, min_nnz=1)
        R, sigma = column_stats(A)
        frob = math.sqrt(float(np.sum(A.values ** 2)))
        assert sigma <= frob * (1 + 1e-9)
        assert frob <= math.sqrt(A.n) * R * (1 + 1e-12)


def test_dataset_meta():
    A = random_sparse(10, 4, seed=5, density=0.5)
    meta = DatasetMeta.from_matrix("toy", A)
    assert meta.n == 4 and meta.d == 10
    assert meta.sparsity == pytest.approx(A.nnz / 40.0)
    assert 0.0 < meta.sparsity <= 1.0
