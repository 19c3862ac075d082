"""Shift basis Q_k = U(tau)^k |target> and closed-form detection prediction.

On a graph passing the search conditions these n states are orthonormal and
complete, the survival operator acts on them as a pure shift with
annihilation at the last member, and the full first-detection record of any
initial state reduces to overlaps with the basis.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import HermitianGraph, check_search_conditions, default_tau
from .monitored import survival_matrix, unitary


@dataclass(frozen=True, eq=False)
class QBasis:
    """Rows of ``vectors`` are the shift-basis states; row 0 is the target."""

    vectors: np.ndarray
    tau: float
    target: np.ndarray

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.vectors[k]


@dataclass(frozen=True)
class ShiftReport:
    shift_residual: float
    annihilation_residual: float


def build_qbasis(
    graph: HermitianGraph,
    target: np.ndarray,
    tau: float | None = None,
    warn: bool = True,
) -> QBasis:
    """Construct the basis by repeated application of U(tau) to the target.

    Off the exceptional point the construction still runs (the Gram
    deviation is then a useful distance-from-exceptional diagnostic) but a
    warning is emitted.
    """
    target = np.asarray(target, dtype=complex)
    if tau is None:
        tau = default_tau(graph)
    if warn:
        report = check_search_conditions(graph, target, tau)
        if not report.passed:
            warnings.warn(
                "graph does not satisfy the search conditions; "
                "shift basis will not be orthonormal",
                stacklevel=2,
            )
    u = unitary(graph, tau)
    vectors = np.empty((graph.n, graph.n), dtype=complex)
    vectors[0] = target
    for k in range(1, graph.n):
        vectors[k] = u @ vectors[k - 1]
    return QBasis(vectors=vectors, tau=tau, target=target)


def gram_check(basis: QBasis) -> float:
    """Max deviation of the basis Gram matrix from the identity."""
    gram = basis.vectors.conj() @ basis.vectors.T
    return float(np.abs(gram - np.eye(basis.n)).max())


def shift_action_check(graph: HermitianGraph, basis: QBasis, tau: float | None = None) -> ShiftReport:
    """Residuals of S Q_k = Q_{k+1} (k < n-1) and S Q_{n-1} = 0."""
    if tau is None:
        tau = basis.tau
    s = survival_matrix(graph, basis.target, tau)
    shifted = basis.vectors @ s.T
    shift_res = float(
        np.linalg.norm(shifted[:-1] - basis.vectors[1:], axis=1).max()
    )
    annihilation_res = float(np.linalg.norm(shifted[-1]))
    return ShiftReport(shift_residual=shift_res, annihilation_residual=annihilation_res)


def predict_detection(basis: QBasis, psi0: np.ndarray) -> np.ndarray:
    """Predicted first-detection probabilities: attempt n succeeds with
    probability |<Q_{n_nodes - n}|psi0>|^2.

    Returns F_1..F_{n_nodes}; all later attempts have probability zero on
    a passing graph.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    overlaps = basis.vectors.conj() @ psi0
    # attempt n pairs with basis index n_nodes - n, so the reversed overlap
    # list is exactly F_1..F_n
    return np.abs(overlaps[::-1]) ** 2


def write_overlap_csv(basis: QBasis, psi0: np.ndarray, path: str) -> None:
    """Write `k,|<Q_k|psi0>|^2` rows."""
    psi0 = np.asarray(psi0, dtype=complex)
    overlaps = np.abs(basis.vectors.conj() @ psi0) ** 2
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "|<Q_k|psi0>|^2"])
        for k, val in enumerate(overlaps):
            writer.writerow([k, f"{val:.17g}"])
