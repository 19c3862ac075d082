"""Construction and spectral analysis of search-graph Hamiltonians.

Three graph families are provided: the crawl graph (translation-invariant
complex hoppings, packet moves one node per sampling interval), the funnel
graph (real symmetric, on-site energies steer every state to node 0), and a
Sherrington-Kirkpatrick reference graph with random Gaussian couplings.
Arbitrary Hamiltonians can also be synthesized from a prescribed spectrum.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

FAMILIES = ("crawl", "funnel", "sk", "custom")


def node_state(n: int, index: int) -> np.ndarray:
    """Return the normalized state localized on a single graph node."""
    if not 0 <= index < n:
        raise ValueError(f"node index {index} out of range for {n} nodes")
    state = np.zeros(n, dtype=complex)
    state[index] = 1.0
    return state


def hermiticity_deviation(matrix: np.ndarray) -> float:
    """Max absolute elementwise deviation of a matrix from its adjoint."""
    return float(np.abs(matrix - matrix.conj().T).max())


@dataclass(frozen=True, eq=False)
class HermitianGraph:
    """An n-node graph Hamiltonian with energy scale gamma.

    The matrix is validated as Hermitian on construction and stored
    read-only; the eigendecomposition is computed once and cached.
    """

    n: int
    gamma: float
    matrix: np.ndarray
    family: str

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("graph must have at least 2 nodes")
        if self.gamma < 0:
            raise ValueError("energy scale gamma must be non-negative")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (self.n, self.n):
            raise ValueError("matrix shape does not match node count")
        scale = max(self.gamma, float(np.abs(matrix).max()), 1e-300)
        if hermiticity_deviation(matrix) > 1e-12 * scale * self.n:
            raise ValueError("matrix is not Hermitian within tolerance")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @cached_property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues ascending and eigenvector columns with fixed phases."""
        energies, vectors = np.linalg.eigh(self.matrix)
        return energies, _fix_phases(vectors)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Rotate each column so its first non-negligible entry is real positive;
    # makes repeated diagonalizations bit-reproducible.
    vectors = vectors.copy()
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        idx = np.argmax(np.abs(col) > 1e-8 * np.abs(col).max())
        phase = col[idx] / abs(col[idx])
        vectors[:, k] = col * phase.conjugate()
    return vectors


def default_tau(graph: HermitianGraph, j: int = 0) -> float:
    """Sampling interval 2*pi/(n*gamma), optionally extended by full periods.

    The extension adds j whole revolutions (2*pi*j/gamma) per interval,
    which leaves every sampled phase unchanged.
    """
    if graph.gamma <= 0:
        raise ValueError("default tau undefined for gamma = 0")
    if j < 0:
        raise ValueError("period index j must be non-negative")
    return 2 * np.pi / (graph.n * graph.gamma) + 2 * np.pi * j / graph.gamma


def build_crawl(n: int, gamma: float, reverse: bool = False) -> HermitianGraph:
    """Build the crawl Hamiltonian: zero diagonal, off-diagonal (j, m) entry
    gamma / (1 - exp(2i*pi*((j-m) mod n)/n)).

    Under stroboscopic sampling at tau = 2*pi/(n*gamma) a packet on node x
    moves to node x-1, so a monitored search for node 0 started on node x
    succeeds at exactly the x-th attempt.  With ``reverse=True`` the
    elementwise conjugate is returned and the packet moves from x to x+1.
    """
    if n < 2:
        raise ValueError("crawl graph needs n >= 2")
    sign = 1 if reverse else -1
    j, m = np.indices((n, n))
    theta = 2 * np.pi * (sign * (m - j) % n) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        matrix = gamma / (1 - np.exp(1j * theta))
    np.fill_diagonal(matrix, 0.0)
    return HermitianGraph(n=n, gamma=gamma, matrix=matrix, family="crawl")


def build_funnel(n: int, gamma: float) -> HermitianGraph:
    """Build the funnel Hamiltonian (gamma/2 times a real symmetric matrix).

    The scaled matrix has diagonal {n-1, 1, 3, ..., 2n-3}; row 0 entries
    sqrt((n-m)(n-m+1)/n) and interior entries (j < m)
    sqrt((n-m)(n-m+1)/((n-j+1)(n-j))).  Its eigenvalues are exactly
    0, gamma, 2*gamma, ..., (n-1)*gamma.
    """
    if n < 2:
        raise ValueError("funnel graph needs n >= 2")
    scaled = np.zeros((n, n))
    scaled[0, 0] = n - 1
    for j in range(1, n):
        scaled[j, j] = 2 * j - 1
    for m in range(1, n):
        scaled[0, m] = scaled[m, 0] = np.sqrt((n - m) * (n - m + 1) / n)
    for j in range(1, n):
        for m in range(j + 1, n):
            val = np.sqrt((n - m) * (n - m + 1) / ((n - j + 1) * (n - j)))
            scaled[j, m] = scaled[m, j] = val
    return HermitianGraph(n=n, gamma=gamma, matrix=gamma / 2 * scaled, family="funnel")


def funnel_eigenvectors(n: int) -> np.ndarray:
    """Closed-form orthonormal eigenvectors of the funnel graph, as columns.

    Column k is the eigenvector for energy k*gamma.  Every column has first
    component 1/sqrt(n); the last column equals the second-to-last with the
    sign of its final entry flipped.
    """
    if n < 2:
        raise ValueError("funnel graph needs n >= 2")
    vectors = np.zeros((n, n))
    for i in range(n - 1):
        vectors[0, i] = 1 / np.sqrt(n)
        for j in range(1, i + 1):
            vectors[j, i] = 1 / np.sqrt((n + 1 - j) * (n - j))
        vectors[i + 1, i] = -np.sqrt((n - 1 - i) / (n - i))
    vectors[:, n - 1] = vectors[:, n - 2]
    vectors[n - 1, n - 1] = -vectors[n - 1, n - 2]
    return vectors


def build_sk(n: int, seed: int, coupling_scale: float = 1.0) -> HermitianGraph:
    """Build a Sherrington-Kirkpatrick reference graph.

    Off-diagonal couplings are independent Gaussians with standard deviation
    coupling_scale/sqrt(n), symmetrized, zero diagonal.  Output is
    bit-identical for equal (n, seed, coupling_scale).
    """
    if n < 2:
        raise ValueError("sk graph needs n >= 2")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    matrix = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    matrix[iu] = rng.normal(scale=coupling_scale / np.sqrt(n), size=len(iu[0]))
    matrix = matrix + matrix.T
    return HermitianGraph(n=n, gamma=coupling_scale, matrix=matrix, family="sk")


def synthesize_from_spectrum(
    energies: Sequence[float],
    eigenvectors: np.ndarray,
    family: str = "custom",
    gamma: float | None = None,
) -> HermitianGraph:
    """Assemble the Hermitian matrix with the given eigenvalues and
    orthonormal eigenvector columns.

    Rejects eigenvector sets whose Gram matrix deviates from the identity
    by more than 1e-8.  When gamma is omitted it is taken as max|energy|.
    """
    energies = np.asarray(energies, dtype=float)
    vectors = np.asarray(eigenvectors, dtype=complex)
    n = len(energies)
    if vectors.shape != (n, n):
        raise ValueError("eigenvector array must be square and match energies")
    gram_dev = np.abs(vectors.conj().T @ vectors - np.eye(n)).max()
    if gram_dev > 1e-8:
        raise ValueError(f"eigenvectors not orthonormal (gram deviation {gram_dev:.2e})")
    matrix = (vectors * energies) @ vectors.conj().T
    matrix = (matrix + matrix.conj().T) / 2
    if gamma is None:
        gamma = float(np.abs(energies).max()) if n else 0.0
    return HermitianGraph(n=n, gamma=gamma, matrix=matrix, family=family)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues, eigenvector columns, and target overlaps of a graph."""

    energies: np.ndarray
    eigenvectors: np.ndarray
    overlaps: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.energies)


def diagonalize(graph: HermitianGraph, target: np.ndarray | None = None) -> SpectralData:
    """Diagonalize a graph, attaching overlaps |<E_k|target>|^2 if given."""
    energies, vectors = graph.eig
    overlaps = None
    if target is not None:
        target = np.asarray(target, dtype=complex)
        overlaps = np.abs(vectors.conj().T @ target) ** 2
    return SpectralData(energies=energies, eigenvectors=vectors, overlaps=overlaps)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the efficient-search condition check.

    A graph passes when the target overlaps with all eigenstates are
    uniform (1/n each) and the sampled phases exp(-i*E_k*tau) form the n
    distinct n-th roots of unity up to one common phase factor.
    """

    overlaps_uniform: bool
    overlap_deviation: float
    phases_equispaced: bool
    phase_deviation: float
    degenerate_phases: bool
    global_phase: float
    tau: float
    tol: float
    passed: bool

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def check_search_conditions(
    graph: HermitianGraph,
    target: np.ndarray,
    tau: float | None = None,
    tol: float = 1e-8,
) -> ConditionReport:
    """Test whether (graph, target, tau) supports a guaranteed search.

    Overlap uniformity is measured as max_k |p_k - 1/n|.  Phase equispacing
    is measured on the sorted cyclic gaps of the sampled phases, which must
    all equal 2*pi/n; a uniform energy shift only rotates all phases
    together and is reported via ``global_phase``.  Any two phases closer
    than ``tol`` count as degenerate (potential dark state) and fail the
    check outright.
    """
    target = np.asarray(target, dtype=complex)
    if abs(np.linalg.norm(target) - 1.0) > 1e-10:
        raise ValueError("target state must be normalized")
    if tau is None:
        tau = default_tau(graph)
    n = graph.n
    spectral = diagonalize(graph, target)

    overlap_dev = float(np.abs(spectral.overlaps - 1 / n).max())
    overlaps_uniform = overlap_dev <= tol

    angles = np.sort(np.angle(np.exp(-1j * spectral.energies * tau)))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
    phase_dev = float(np.abs(gaps - 2 * np.pi / n).max())
    degenerate = bool(gaps.min() < tol)
    phases_equispaced = (phase_dev <= tol) and not degenerate

    # For equispaced phases exp(-i*E_k*tau) = exp(i*beta) * (n-th roots of
    # unity), the n-th power of every phase collapses to exp(i*n*beta).
    beta = float(np.angle(np.mean(np.exp(-1j * spectral.energies * tau * n))) / n)
    global_phase = beta % (2 * np.pi)

    return ConditionReport(
        overlaps_uniform=overlaps_uniform,
        overlap_deviation=overlap_dev,
        phases_equispaced=phases_equispaced,
        phase_deviation=phase_dev,
        degenerate_phases=degenerate,
        global_phase=global_phase,
        tau=tau,
        tol=tol,
        passed=overlaps_uniform and phases_equispaced,
    )


def graph_to_dict(graph: HermitianGraph) -> dict:
    """JSON-serializable representation with split real/imaginary parts."""
    return {
        "n": graph.n,
        "gamma": graph.gamma,
        "family": graph.family,
        "re": graph.matrix.real.tolist(),
        "im": graph.matrix.imag.tolist(),
    }


def graph_from_dict(data: dict) -> HermitianGraph:
    matrix = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return HermitianGraph(
        n=int(data["n"]),
        gamma=float(data["gamma"]),
        matrix=matrix,
        family=str(data["family"]),
    )


def save_graph(graph: HermitianGraph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(graph), fh)
        fh.write("\n")


def load_graph(path: str) -> HermitianGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))


def write_spectrum_csv(spectral: SpectralData, path: str) -> None:
    """Write `k,energy,p_k` rows; p_k column is empty without a target."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "energy", "p_k"])
        for k, energy in enumerate(spectral.energies):
            p_k = "" if spectral.overlaps is None else f"{spectral.overlaps[k]:.17g}"
            writer.writerow([k, f"{energy:.17g}", p_k])
