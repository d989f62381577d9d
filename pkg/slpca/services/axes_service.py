import logging
from typing import List, Tuple

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist

from slpca.models.data_matrix import DataMatrix
from slpca.models.projection import AxesSource, CompletedBasis, ContiguityMatrix, ProjectionBasis
from slpca.services.data_core import total_covariance
from slpca.utils.errors import (
    DimensionMismatchError,
    NumericalError,
    ParameterRangeError,
    SingularMatrixError,
    ZeroVarianceError,
)

logger = logging.getLogger(__name__)

# rows of the distance matrix computed at once
KNN_BLOCK_SIZE = 1024


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip each row so that its largest-magnitude component is positive"""
    vectors = np.array(vectors, dtype=float)
    for row in vectors:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return vectors


def knn_contiguity(data: DataMatrix, k: int) -> ContiguityMatrix:
    """Row-wise k-nearest-neighbor contiguity, ties broken by lower index"""
    n = data.n
    if not 1 <= k <= n - 1:
        raise ParameterRangeError(f"k must be in [1, {n - 1}] for n = {n}, got {k}")

    neighbors = np.empty((n, k), dtype=np.intp)
    for start in range(0, n, KNN_BLOCK_SIZE):
        stop = min(start + KNN_BLOCK_SIZE, n)
        distances = cdist(data.values[start:stop], data.values, metric="euclidean")
        distances[np.arange(stop - start), np.arange(start, stop)] = np.inf
        # stable sort keeps the lower index first among equal distances
        order = np.argsort(distances, axis=1, kind="stable")
        neighbors[start:stop] = order[:, :k]

    logger.debug(f"Built {k}-neighbor contiguity graph on {n} points")
    return ContiguityMatrix(n=n, k=k, neighbors=neighbors)


def local_covariance(data: DataMatrix, M: ContiguityMatrix, k: int = None) -> np.ndarray:
    """Local covariance V* = 1/(2kn) sum_ij m_ij (y_i - y_j)(y_i - y_j)'"""
    if M.n != data.n:
        raise DimensionMismatchError(
            f"Contiguity matrix has {M.n} nodes but data has {data.n} rows"
        )
    k = M.k if k is None else k
    if k != M.k:
        raise DimensionMismatchError(f"k = {k} does not match the contiguity matrix (k = {M.k})")

    diffs = (data.values[:, None, :] - data.values[M.neighbors]).reshape(-1, data.p)
    Vstar = diffs.T @ diffs / (2.0 * k * data.n)
    return (Vstar + Vstar.T) / 2


def _check_square_symmetric(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {matrix.shape}")
    scale = max(np.max(np.abs(matrix)), 1.0)
    if np.max(np.abs(matrix - matrix.T)) > 1e-10 * scale:
        raise NumericalError(f"{name} is not symmetric")
    return matrix


def _check_d_max(d_max: int, p: int):
    if not 1 <= d_max <= p:
        raise ParameterRangeError(f"d_max must be in [1, {p}], got {d_max}")


def contiguity_axes(Vstar: np.ndarray, V: np.ndarray, d_max: int) -> ProjectionBasis:
    """Leading eigenvectors of V*^-1 V, re-orthonormalized in eigenvalue order"""
    Vstar = _check_square_symmetric(Vstar, "V*")
    V = _check_square_symmetric(V, "V")
    if Vstar.shape != V.shape:
        raise DimensionMismatchError(f"V* {Vstar.shape} and V {V.shape} differ in shape")
    p = V.shape[0]
    _check_d_max(d_max, p)

    trace = np.trace(Vstar)
    if trace <= 0 or np.min(linalg.eigvalsh(Vstar)) <= 1e-10 * trace:
        raise SingularMatrixError(
            "Local covariance V* is singular",
            hint="Increase the number of neighbors k",
        )

    # symmetric-definite reduction: V* = L L', solve L^-1 V L^-T
    L = linalg.cholesky(Vstar, lower=True)
    half = linalg.solve_triangular(L, V, lower=True)
    reduced = linalg.solve_triangular(L, half.T, lower=True)
    asymmetry = np.max(np.abs(reduced - reduced.T))
    if asymmetry > 1e-8 * max(np.max(np.abs(reduced)), 1.0):
        raise NumericalError(f"Reduced contiguity problem is not symmetric ({asymmetry:.3g})")
    reduced = (reduced + reduced.T) / 2

    eigenvalues, vectors = linalg.eigh(reduced)
    order = np.argsort(eigenvalues)[::-1][:d_max]
    directions = linalg.solve_triangular(L.T, vectors[:, order], lower=False)

    # Gram-Schmidt in eigenvalue order
    orthonormal, _ = linalg.qr(directions, mode="economic")
    axes = apply_sign_convention(orthonormal.T)
    logger.info(f"Contiguity axes: leading eigenvalues {np.round(eigenvalues[order], 6).tolist()}")
    return ProjectionBasis(axes=axes, source=AxesSource.CONTIGUITY, eigenvalues=eigenvalues[order])


def pca_axes(V: np.ndarray, d_max: int) -> ProjectionBasis:
    """Leading eigenvectors of the total covariance"""
    V = _check_square_symmetric(V, "V")
    _check_d_max(d_max, V.shape[0])
    eigenvalues, vectors = linalg.eigh(V)
    order = np.argsort(eigenvalues)[::-1][:d_max]
    axes = apply_sign_convention(vectors[:, order].T)
    logger.info(f"PCA axes: leading eigenvalues {np.round(eigenvalues[order], 6).tolist()}")
    return ProjectionBasis(axes=axes, source=AxesSource.PCA, eigenvalues=eigenvalues[order])


def contiguity_index(axes: np.ndarray, Vstar: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Per-axis ratio a'Va / a'V*a, the quantity the contiguity eigen-solution maximizes"""
    axes = np.atleast_2d(axes)
    return np.einsum("ij,jk,ik->i", axes, V, axes) / np.einsum("ij,jk,ik->i", axes, Vstar, axes)


def estimate_axes(
    centered: DataMatrix, method: AxesSource, d_max: int, k: int = 3
) -> ProjectionBasis:
    """Build V (and V* for contiguity) from centered data and solve for the axes"""
    method = AxesSource(method)
    V = total_covariance(centered)
    if method == AxesSource.PCA:
        return pca_axes(V, d_max)
    if method == AxesSource.CONTIGUITY:
        M = knn_contiguity(centered, k)
        return contiguity_axes(local_covariance(centered, M, k), V, d_max)
    raise ParameterRangeError(f"Cannot estimate axes with method '{method.value}'")


def complete_basis(P_axes: np.ndarray, p: int = None) -> CompletedBasis:
    """Complete d orthonormal axes to an orthonormal basis of R^p"""
    P_axes = np.atleast_2d(np.asarray(P_axes, dtype=float))
    d, width = P_axes.shape
    p = width if p is None else p
    if width != p:
        raise DimensionMismatchError(f"Axes have {width} components, expected p = {p}")
    if d > p:
        raise ParameterRangeError(f"Cannot take d = {d} axes in dimension p = {p}")
    if np.max(np.abs(P_axes @ P_axes.T - np.eye(d))) > 1e-8:
        raise NumericalError("Input axes are not orthonormal")

    if d == p:
        return CompletedBasis(P=P_axes, Pbar=np.empty((0, p)))

    # Householder QR; trailing columns of the orthogonal factor span the complement
    full, _ = linalg.qr(P_axes.T, mode="full")
    complement = apply_sign_convention(full[:, d:].T)
    return CompletedBasis(P=P_axes, Pbar=complement)


def project(data: DataMatrix, basis: CompletedBasis) -> Tuple[np.ndarray, np.ndarray]:
    """X = Y P', Z = Y Pbar'"""
    if data.p != basis.p:
        raise DimensionMismatchError(f"Data has {data.p} columns, basis expects {basis.p}")
    return data.values @ basis.P.T, data.values @ basis.Pbar.T


def axis_correlations(X: np.ndarray, data: DataMatrix) -> np.ndarray:
    """Pearson correlation between projected coordinates (rows) and original variables (columns)"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] != data.n:
        raise DimensionMismatchError(f"X has {X.shape[0]} rows, data has {data.n}")

    Xc = X - X.mean(axis=0)
    Yc = data.values - data.values.mean(axis=0)
    x_sd = np.sqrt(np.sum(Xc**2, axis=0))
    y_sd = np.sqrt(np.sum(Yc**2, axis=0))
    for j, sd in enumerate(x_sd):
        if sd == 0:
            raise ZeroVarianceError(f"Proj{j + 1}")
    for name, sd in zip(data.column_names, y_sd):
        if sd == 0:
            raise ZeroVarianceError(name)

    correlations = (Xc.T @ Yc) / np.outer(x_sd, y_sd)
    return np.clip(correlations, -1.0, 1.0)


def neighbor_edges(M: ContiguityMatrix) -> List[Tuple[int, int]]:
    """Edges (i, j) of the neighbor graph"""
    return [(i, int(j)) for i in range(M.n) for j in M.neighbors[i]]


def projected_variances(X: np.ndarray) -> np.ndarray:
    """Empirical variance of each projected coordinate, denominator n"""
    return np.atleast_2d(X).var(axis=0)
