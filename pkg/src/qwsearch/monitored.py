"""Stroboscopic first-detection protocol: amplitudes, probabilities, statistics.

The protocol evolves a state unitarily for an interval tau, asks a yes/no
projective question about the target state, and repeats until the first yes.
Two independent evaluation paths are provided for the first-detection
amplitudes: a state-projection loop (the fast path) and explicit powers of
the survival matrix (the verification path).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .graphs import HermitianGraph

#: detection probability below which statistics need a truncation flag
STATS_THRESHOLD = 0.999

#: total detected probability below which leakage diagnostics run
LEAK_THRESHOLD = 1 - 1e-6

#: survival eigenvalue modulus above which a state counts as dark
DARK_MODULUS = 1 - 1e-8


@dataclass(frozen=True, eq=False)
class Protocol:
    """Sampling interval, normalized detection target, and step budget."""

    tau: float
    target: np.ndarray
    n_max: int

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("sampling interval tau must be positive")
        if self.n_max < 1:
            raise ValueError("step budget n_max must be at least 1")
        target = np.asarray(self.target, dtype=complex)
        if abs(np.linalg.norm(target) - 1.0) > 1e-12:
            raise ValueError("target state must be normalized")
        target.setflags(write=False)
        object.__setattr__(self, "target", target)


@dataclass(frozen=True, eq=False)
class DetectionSeries:
    """First-detection amplitudes phi_n, probabilities F_n = |phi_n|^2, and
    derived statistics.

    mean_n / var_n / mean_t are None when the detected probability is below
    the reporting threshold (see ``detection_statistics`` for conditional
    statistics of truncated runs).  ``dark_state_suspected`` is set when the
    cumulative detection probability plateaus below one, in which case
    ``survival_top_modulus`` carries the largest survival-eigenvalue
    modulus as a diagnostic.
    """

    phi: np.ndarray
    f: np.ndarray
    p_det: float
    mean_n: float | None
    var_n: float | None
    mean_t: float | None
    truncated: bool
    tail_estimate: float
    dark_state_suspected: bool
    survival_top_modulus: float | None


@dataclass(frozen=True)
class DetectionStatistics:
    p_det: float
    mean_n: float | None
    var_n: float | None
    mean_t: float | None
    truncated: bool


def unitary(graph: HermitianGraph, t: float) -> np.ndarray:
    """Evolution matrix exp(-i*H*t) assembled from the cached spectrum."""
    energies, vectors = graph.eig
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def evolve(graph: HermitianGraph, state: np.ndarray, t: float) -> np.ndarray:
    """Evolve a normalized state for time t via the spectral decomposition."""
    state = np.asarray(state, dtype=complex)
    energies, vectors = graph.eig
    coeffs = vectors.conj().T @ state
    return vectors @ (np.exp(-1j * energies * t) * coeffs)


def survival_matrix(graph: HermitianGraph, target: np.ndarray, tau: float) -> np.ndarray:
    """(1 - |target><target|) exp(-i*H*tau), without the operator wrapper."""
    target = np.asarray(target, dtype=complex)
    u = unitary(graph, tau)
    return u - np.outer(target, target.conj() @ u)


def first_detection_series(
    graph: HermitianGraph, protocol: Protocol, psi0: np.ndarray
) -> DetectionSeries:
    """Run the stroboscopic protocol and collect the full amplitude record.

    Each step evolves by tau, records the overlap with the target as the
    detection amplitude, then removes the target component (measurement
    back-action).  Statistics are attached when the detected probability
    reaches the reporting threshold; otherwise the run is marked truncated
    and, if the arrivals have already plateaued, flagged as a dark-state
    leak with a survival-spectrum diagnostic.
    """
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    target = protocol.target
    u = unitary(graph, protocol.tau)
    phi = np.empty(protocol.n_max, dtype=complex)
    for n in range(protocol.n_max):
        psi = u @ psi
        amp = target.conj() @ psi
        phi[n] = amp
        psi -= target * amp
    f = np.abs(phi) ** 2

    stats = detection_statistics_from_f(f, protocol.tau)
    tail = _geometric_tail_estimate(f)
    dark = False
    top_modulus = None
    if stats.p_det < LEAK_THRESHOLD:
        # Plateaued arrivals indicate leakage into an undetectable
        # component rather than plain truncation.
        last_decade = f[-max(1, len(f) // 10):]
        if last_decade.sum() < 1e-9 * max(stats.p_det, 1e-12) or tail < 1e-12:
            dark = True
            s = survival_matrix(graph, target, protocol.tau)
            top_modulus = float(np.abs(np.linalg.eigvals(s)).max())
    return DetectionSeries(
        phi=phi,
        f=f,
        p_det=stats.p_det,
        mean_n=stats.mean_n,
        var_n=stats.var_n,
        mean_t=stats.mean_t,
        truncated=stats.truncated,
        tail_estimate=tail,
        dark_state_suspected=dark,
        survival_top_modulus=top_modulus,
    )


def detection_amplitude_direct(
    graph: HermitianGraph, protocol: Protocol, psi0: np.ndarray, n: int
) -> complex:
    """n-th first-detection amplitude <target| U S^(n-1) |psi0> by explicit
    survival-matrix powers; independent oracle for the projection loop."""
    if n < 1:
        raise ValueError("measurement index n starts at 1")
    psi = np.asarray(psi0, dtype=complex)
    s = survival_matrix(graph, protocol.target, protocol.tau)
    u = unitary(graph, protocol.tau)
    for _ in range(n - 1):
        psi = s @ psi
    return complex(protocol.target.conj() @ (u @ psi))


def detection_statistics_from_f(
    f: np.ndarray,
    tau: float,
    threshold: float = STATS_THRESHOLD,
    allow_truncated: bool = False,
) -> DetectionStatistics:
    """Detection statistics from a probability record.

    p_det is the plain sum of F_n.  The conditional moments (normalized by
    p_det) are reported when p_det reaches ``threshold``; below it they are
    suppressed unless ``allow_truncated`` marks them as deliberately
    truncation-corrected.
    """
    f = np.asarray(f, dtype=float)
    p_det = float(f.sum())
    truncated = p_det < threshold
    if p_det <= 0 or (truncated and not allow_truncated):
        return DetectionStatistics(p_det, None, None, None, truncated)
    ns = np.arange(1, len(f) + 1, dtype=float)
    mean_n = float((ns * f).sum() / p_det)
    var_n = float((ns**2 * f).sum() / p_det - mean_n**2)
    return DetectionStatistics(p_det, mean_n, var_n, tau * mean_n, truncated)


def detection_statistics(
    series: DetectionSeries,
    tau: float,
    threshold: float = STATS_THRESHOLD,
    allow_truncated: bool = False,
) -> DetectionStatistics:
    return detection_statistics_from_f(series.f, tau, threshold, allow_truncated)


def _geometric_tail_estimate(f: np.ndarray) -> float:
    """Estimate the undetected mass beyond the record by fitting a geometric
    decay to the last decade of F_n.  Returns 0 for (numerically) finished
    series and inf when the record is still growing."""
    window = f[-max(2, len(f) // 10):]
    if window.max() < 1e-280:
        return 0.0
    positive = window[window > 0]
    if len(positive) < 2:
        return 0.0
    logs = np.log(positive)
    slope = np.polyfit(np.arange(len(positive), dtype=float), logs, 1)[0]
    if slope >= 0:
        return float("inf")
    ratio = float(np.exp(slope))
    return float(f[-1] * ratio / (1 - ratio)) if f[-1] > 0 else 0.0


def write_detection_csv(series: DetectionSeries, path: str) -> None:
    """Write `n,F_n,re_phi,im_phi` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "F_n", "re_phi", "im_phi"])
        for n, (fn, amp) in enumerate(zip(series.f, series.phi), start=1):
            writer.writerow(
                [n, f"{fn:.17g}", f"{amp.real:.17g}", f"{amp.imag:.17g}"]
            )


def detection_summary(series: DetectionSeries) -> dict:
    """Summary dict matching the JSON interface of the detection command."""
    return {
        "p_det": series.p_det,
        "mean_n": series.mean_n,
        "var_n": series.var_n,
        "mean_t": series.mean_t,
        "truncated": series.truncated,
    }
