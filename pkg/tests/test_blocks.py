import numpy as np
import pytest

from gerk.blocks import (
    BlockPartition,
    column_partition,
    contiguous_blocks,
    paired_blocks,
    row_partition,
)
from gerk.errors import DimensionMismatch, ZeroMatrix
from gerk.linalg import embed_complex_as_real
from gerk.rng import RngStream


def test_row_partition_default_norms():
    rng = RngStream(200)
    A = rng.normal_array(20).reshape(5, 4)
    part = row_partition(A)
    assert len(part) == 5
    assert part.trivial
    for i in range(5):
        assert abs(part.block_sq_norms[i] - np.dot(A[i], A[i])) <= 1e-12


def test_column_partition_complex_norms():
    rng = RngStream(201)
    A = rng.complex_normal_array(24).reshape(4, 6)
    part = column_partition(A)
    for j in range(6):
        expected = float(np.real(np.vdot(A[:, j], A[:, j])))
        assert abs(part.block_sq_norms[j] - expected) <= 1e-12


def test_multi_index_block_norm_is_spectral():
    rng = RngStream(202)
    A = rng.normal_array(42).reshape(7, 6)
    blocks = [np.array([0, 1, 2]), np.array([3]), np.array([4, 5, 6])]
    part = row_partition(A, blocks=blocks)
    assert not part.trivial
    for i, blk in enumerate(blocks):
        expected = np.linalg.svd(A[blk, :], compute_uv=False)[0] ** 2
        assert abs(part.block_sq_norms[i] - expected) <= 1e-10


def test_partition_validation():
    A = np.eye(4)
    with pytest.raises(ValueError):
        row_partition(A, blocks=[np.array([0, 1]), np.array([1, 2, 3])])  # overlap
    with pytest.raises(ValueError):
        row_partition(A, blocks=[np.array([0, 1]), np.array([2])])  # no cover
    with pytest.raises(ValueError):
        row_partition(A, blocks=[np.array([0, 1, 2, 3]), np.array([], dtype=int)])
    with pytest.raises(DimensionMismatch):
        row_partition(A, blocks=[np.array([0, 1, 2]), np.array([3, 4])])
    with pytest.raises(ValueError):
        BlockPartition("diag", 4, [np.arange(4)], [1.0])


def test_zero_block_rejected():
    A = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ZeroMatrix):
        row_partition(A)
    # column 1 is zero too
    with pytest.raises(ZeroMatrix):
        column_partition(A)


def test_probability_validation():
    A = np.eye(3)
    with pytest.raises(ValueError):
        row_partition(A, probabilities=[0.5, 0.5, 0.0])
    with pytest.raises(ValueError):
        row_partition(A, probabilities=[0.5, 0.6, 0.1])
    with pytest.raises(DimensionMismatch):
        row_partition(A, probabilities=[0.5, 0.5])


def test_sampling_follows_probabilities():
    A = np.eye(3)
    part = row_partition(A, probabilities=[0.2, 0.3, 0.5])
    rng = RngStream(203)
    counts = np.zeros(3)
    draws = 30000
    for _ in range(draws):
        counts[part.sample(rng)] += 1
    assert np.all(np.abs(counts / draws - part.probabilities) < 0.02)


def test_uniform_default_probabilities():
    part = row_partition(np.eye(4))
    assert np.allclose(part.probabilities, 0.25)


def test_contiguous_blocks_cover():
    blocks = contiguous_blocks(10, 3)
    assert len(blocks) == 3
    assert np.array_equal(np.concatenate(blocks), np.arange(10))
    sizes = [b.size for b in blocks]
    assert max(sizes) - min(sizes) <= 1
    with pytest.raises(ValueError):
        contiguous_blocks(3, 4)


def test_paired_blocks_layout():
    blocks = paired_blocks(3)
    assert [b.tolist() for b in blocks] == [[0, 3], [1, 4], [2, 5]]


def test_embedded_pair_norms_match_complex():
    # paired rows of the real embedding carry the complex row norm
    rng = RngStream(204)
    A = rng.complex_normal_array(15).reshape(5, 3)
    E = embed_complex_as_real(A)
    rows = row_partition(E, blocks=paired_blocks(5))
    cols = column_partition(E, blocks=paired_blocks(3))
    for i in range(5):
        assert abs(rows.block_sq_norms[i] - np.real(np.vdot(A[i], A[i]))) <= 1e-10
    for j in range(3):
        expected = float(np.real(np.vdot(A[:, j], A[:, j])))
        assert abs(cols.block_sq_norms[j] - expected) <= 1e-10
