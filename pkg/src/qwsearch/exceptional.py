"""Survival-operator spectra and exceptional-point verification.

The survival operator S = (1 - |d><d|) U(tau) governs the conditional
no-detection evolution.  On a graph meeting the search conditions all of
its eigenvalues coalesce at zero and S is nilpotent of index n; because a
defective zero eigenvalue of multiplicity n scatters numerically on a
circle of radius ~eps^(1/n), the robust detector is the norm of S^n, not
the raw eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import HermitianGraph, SpectralData
from .monitored import DARK_MODULUS, survival_matrix


@dataclass(frozen=True, eq=False)
class SurvivalOperator:
    """Survival matrix together with the protocol data that produced it."""

    matrix: np.ndarray
    tau: float
    target: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class ExceptionalReport:
    eigenvalues: np.ndarray
    nilpotency_norm: float
    max_abs_eig: float
    is_exceptional: bool
    dark_states: list[tuple[int, float]]


def survival_operator(graph: HermitianGraph, target: np.ndarray, tau: float) -> SurvivalOperator:
    """Build S = (1 - |target><target|) exp(-i*H*tau)."""
    target = np.asarray(target, dtype=complex)
    if abs(np.linalg.norm(target) - 1.0) > 1e-10:
        raise ValueError("target state must be normalized")
    return SurvivalOperator(
        matrix=survival_matrix(graph, target, tau), tau=tau, target=target
    )


def survival_spectrum(op: SurvivalOperator, tol_nil: float | None = None) -> ExceptionalReport:
    """Eigenvalues, nilpotency norm ||S^n||_2, and dark-state flags.

    The default nilpotency tolerance 1e-6*n absorbs the roundoff
    accumulated by the repeated-squaring matrix powers.
    """
    n = op.n
    if tol_nil is None:
        tol_nil = 1e-6 * n
    eigenvalues = np.linalg.eigvals(op.matrix)
    power = np.linalg.matrix_power(op.matrix, n)
    nilpotency_norm = float(np.linalg.norm(power, 2))
    moduli = np.abs(eigenvalues)
    dark = [(int(k), float(moduli[k])) for k in np.flatnonzero(moduli >= DARK_MODULUS)]
    return ExceptionalReport(
        eigenvalues=eigenvalues,
        nilpotency_norm=nilpotency_norm,
        max_abs_eig=float(moduli.max()),
        is_exceptional=nilpotency_norm <= tol_nil,
        dark_states=dark,
    )


def characteristic_identity_check(
    spectral: SpectralData,
    tau: float,
    xi_samples: Sequence[complex],
    pole_distance: float = 1e-3,
) -> float:
    """Max residual of the reduced eigenvalue identity on sample points.

    For uniform overlaps and root-of-unity phases the weighted resolvent sum
    xi * sum_k p_k/(xi - exp(-i*E_k*tau)) collapses to -xi^n/(1 - xi^n);
    the residual between the two evaluations is returned.  Samples closer
    than ``pole_distance`` to any phase factor are rejected.
    """
    if spectral.overlaps is None:
        raise ValueError("spectral data must carry target overlaps")
    xi = np.asarray(xi_samples, dtype=complex)
    n = spectral.n
    poles = np.exp(-1j * spectral.energies * tau)
    if np.abs(xi[:, None] - poles[None, :]).min() < pole_distance:
        raise ValueError("xi sample too close to a resolvent pole")
    lhs = xi * (spectral.overlaps[None, :] / (xi[:, None] - poles[None, :])).sum(axis=1)
    rhs = -(xi**n) / (1 - xi**n)
    return float(np.abs(lhs - rhs).max())


@dataclass(frozen=True)
class NecessaryConditionReport:
    """Grid-search evidence that uniform overlaps and equispaced phases are
    forced, not merely sufficient, for the full eigenvalue collapse."""

    n: int
    admissible_deltas: tuple[tuple[float, ...], ...]
    admissible_overlaps: tuple[tuple[float, ...], ...]
    expected_deltas: tuple[float, ...]
    expected_overlaps: tuple[float, ...]
    matches_theory: bool
    max_delta_deviation: float
    max_overlap_deviation: float


def necessary_condition_probe(
    n: int, tol: float = 1e-9, grid_points: int = 240
) -> NecessaryConditionReport:
    """Sweep phase differences for 2- and 3-state systems, solve the linear
    constraints for the overlaps, and keep only real, positive solutions.

    The admissible set must coincide with equispaced phase differences
    2*pi*k/n and uniform overlaps 1/n.  The grid size should be divisible
    by n so the exact solution is a grid point.
    """
    if n not in (2, 3):
        raise ValueError("probe implemented for n = 2 or 3 only")
    if grid_points % n:
        raise ValueError("grid_points must be divisible by n")
    step = 2 * np.pi / grid_points
    deltas_found: list[tuple[float, ...]] = []
    overlaps_found: list[tuple[float, ...]] = []

    def admissible(ps: np.ndarray) -> bool:
        if np.abs(ps.imag).max() > tol:
            return False
        re = ps.real
        return bool((re > tol).all() and (re < 1 - tol).all())

    if n == 2:
        expected_deltas = (np.pi,)
        for k in range(1, grid_points):
            d21 = k * step
            e21 = np.exp(1j * d21)
            p1 = e21 / (e21 - 1)
            ps = np.array([p1, 1 - p1])
            if admissible(ps):
                deltas_found.append((d21,))
                overlaps_found.append(tuple(ps.real))
    else:
        # Overlaps solve the Vandermonde system {sum p = 1, sum p*e = 0,
        # sum p*e^2 = 0} with e in {1, exp(i*d21), exp(i*d31)}:
        #   p1 = a*b/((a-1)(b-1)),  p2 = -b/((a-1)(b-a)).
        expected_deltas = (2 * np.pi / 3, 4 * np.pi / 3)
        for k1 in range(1, grid_points):
            for k2 in range(1, grid_points):
                if k1 == k2:
                    continue
                d21, d31 = k1 * step, k2 * step
                a, b = np.exp(1j * d21), np.exp(1j * d31)
                p1 = a * b / ((a - 1) * (b - 1))
                p2 = -b / ((a - 1) * (b - a))
                ps = np.array([p1, p2, 1 - p1 - p2])
                if admissible(ps):
                    deltas_found.append((d21, d31))
                    overlaps_found.append(tuple(ps.real))

    expected_overlaps = tuple([1.0 / n] * n)
    if deltas_found:
        # Labels of the non-reference energies are interchangeable, so the
        # phase differences are compared as sorted sets.
        delta_dev = max(
            max(abs(d - e) for d, e in zip(sorted(ds), expected_deltas))
            for ds in deltas_found
        )
        overlap_dev = max(
            max(abs(p - 1.0 / n) for p in ps) for ps in overlaps_found
        )
    else:
        delta_dev = float("inf")
        overlap_dev = float("inf")
    matches = bool(deltas_found) and delta_dev <= tol and overlap_dev <= tol
    return NecessaryConditionReport(
        n=n,
        admissible_deltas=tuple(deltas_found),
        admissible_overlaps=tuple(overlaps_found),
        expected_deltas=expected_deltas,
        expected_overlaps=expected_overlaps,
        matches_theory=matches,
        max_delta_deviation=float(delta_dev),
        max_overlap_deviation=float(overlap_dev),
    )


def exceptional_report_dict(report: ExceptionalReport) -> dict:
    """JSON-serializable form of an exceptional-point report."""
    return {
        "eigenvalues": [[z.real, z.imag] for z in report.eigenvalues],
        "nilpotency_norm": report.nilpotency_norm,
        "max_abs_eig": report.max_abs_eig,
        "is_exceptional": report.is_exceptional,
        "dark_states": [[k, m] for k, m in report.dark_states],
    }
