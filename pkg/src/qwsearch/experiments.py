"""Comparative and robustness experiments: noisy sampling intervals,
slow-search baselines on random graphs, and non-monitored evolution.

All Monte Carlo draws run on counter-derived substreams (master seed plus
realization index), so realizations are order-independent and ensemble
statistics are bit-reproducible per seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .graphs import HermitianGraph, default_tau, node_state
from .monitored import Protocol, detection_statistics_from_f, first_detection_series


@dataclass(frozen=True)
class NoiseConfig:
    """Noisy-interval Monte Carlo parameters.

    Each sampled interval is tau_design * (1 + a*uniform[-0.5, 0.5]).  With
    ``per_step`` (the default) every inter-measurement interval draws a
    fresh value; otherwise one draw per realization is reused for all
    steps.  ``n_detect_window`` is the attempt window whose summed F_n
    counts as the detection probability (defaults to the node count);
    ``n_record`` attempts are recorded in total (defaults to twice the
    window).
    """

    magnitude_a: float
    realizations: int
    seed: int
    n_detect_window: int | None = None
    n_record: int | None = None
    per_step: bool = True

    def __post_init__(self):
        if self.magnitude_a < 0:
            raise ValueError("noise magnitude must be non-negative")
        if self.realizations < 1:
            raise ValueError("need at least one realization")


@dataclass(frozen=True, eq=False)
class NoiseResult:
    magnitude_a: float
    mean_p_det: float
    std_p_det: float
    p_det: np.ndarray
    mean_f: np.ndarray
    n_detect_window: int


def noise_run(graph: HermitianGraph, psi0: np.ndarray, config: NoiseConfig) -> NoiseResult:
    """Monitored search under noisy sampling intervals.

    Runs ``realizations`` independent searches, each drawing its intervals
    from the substream (seed, realization index), and returns the ensemble
    mean and standard deviation of the windowed detection probability plus
    the ensemble-averaged F_n record.
    """
    n = graph.n
    window = config.n_detect_window or n
    n_record = config.n_record or max(2 * n, window)
    if n_record < window:
        raise ValueError("n_record must cover the detection window")
    tau_design = default_tau(graph)
    energies, vectors = graph.eig
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")

    p_det = np.empty(config.realizations)
    mean_f = np.zeros(n_record)
    for r in range(config.realizations):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=config.seed, spawn_key=(r,))
        )
        if config.per_step:
            taus = tau_design * (
                1 + config.magnitude_a * rng.uniform(-0.5, 0.5, size=n_record)
            )
        else:
            taus = np.full(
                n_record,
                tau_design * (1 + config.magnitude_a * rng.uniform(-0.5, 0.5)),
            )
        coeffs = vectors.conj().T @ psi0
        f = np.empty(n_record)
        for step in range(n_record):
            coeffs = coeffs * np.exp(-1j * energies * taus[step])
            psi = vectors @ coeffs
            f[step] = abs(psi[0]) ** 2
            psi[0] = 0.0
            coeffs = vectors.conj().T @ psi
        p_det[r] = f[:window].sum()
        mean_f += f
    mean_f /= config.realizations
    return NoiseResult(
        magnitude_a=config.magnitude_a,
        mean_p_det=float(p_det.mean()),
        std_p_det=float(p_det.std()),
        p_det=p_det,
        mean_f=mean_f,
        n_detect_window=window,
    )


def default_tau_grid(points: int = 60, low: float = 0.2, high: float = 4.0) -> np.ndarray:
    """Log-spaced sampling-interval grid for the random-graph sweep."""
    return np.geomspace(low, high, points)


@dataclass(frozen=True, eq=False)
class SweepResult:
    taus: np.ndarray
    mean_n: np.ndarray
    p_det_at_nmax: np.ndarray
    n_max: int
    heavy_truncation: np.ndarray  # True where p_det at the budget is < 0.99


def sk_sweep(
    n: int,
    taus: np.ndarray | None = None,
    seed: int = 0,
    n_max: int = 100_000,
    coupling_scale: float = 1.0,
    start_node: int = 1,
    target_node: int = 0,
) -> SweepResult:
    """Mean attempt count versus sampling interval on a random SK graph.

    The detection target is a node state and every interval reuses the same
    seeded graph.  Attempt records are truncated at ``n_max`` (at least
    10^4); intervals whose detection probability has not reached 0.99 by
    the budget are flagged and their conditional mean is reported anyway.
    """
    from .graphs import build_sk

    if n_max < 10_000:
        raise ValueError("n_max below 10^4 truncates the slow-search statistics")
    if taus is None:
        taus = default_tau_grid()
    taus = np.asarray(taus, dtype=float)
    graph = build_sk(n, seed, coupling_scale)
    target = node_state(n, target_node)
    psi0 = node_state(n, start_node)
    mean_n = np.empty(len(taus))
    p_det = np.empty(len(taus))
    for i, tau in enumerate(taus):
        series = first_detection_series(
            graph, Protocol(tau=float(tau), target=target, n_max=n_max), psi0
        )
        stats = detection_statistics_from_f(series.f, float(tau), allow_truncated=True)
        mean_n[i] = np.nan if stats.mean_n is None else stats.mean_n
        p_det[i] = stats.p_det
    return SweepResult(
        taus=taus,
        mean_n=mean_n,
        p_det_at_nmax=p_det,
        n_max=n_max,
        heavy_truncation=p_det < 0.99,
    )


@dataclass(frozen=True, eq=False)
class EvolutionProfile:
    """Non-monitored node-probability record with recurrence diagnostics.

    ``strobe_peaks[k]`` is the largest node probability at time (k+1)*tau;
    ``revival_overlap`` is |<psi0|psi(n*tau)>|^2.
    """

    times: np.ndarray
    probabilities: np.ndarray
    strobe_peaks: np.ndarray
    revival_overlap: float


def non_monitored_profile(
    graph: HermitianGraph,
    psi0: np.ndarray,
    t_grid: np.ndarray,
    tau: float | None = None,
) -> EvolutionProfile:
    """Node probabilities |<x|psi(t)>|^2 over a time grid, without any
    measurement back-action."""
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) > 1 and (np.diff(t_grid) < 0).any():
        raise ValueError("time grid must be ascending")
    psi0 = np.asarray(psi0, dtype=complex)
    if tau is None:
        tau = default_tau(graph)
    energies, vectors = graph.eig
    coeffs = vectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(t_grid, energies))
    states = (phases * coeffs) @ vectors.T
    probabilities = np.abs(states) ** 2

    strobe_times = tau * np.arange(1, graph.n + 1)
    strobe_states = (np.exp(-1j * np.outer(strobe_times, energies)) * coeffs) @ vectors.T
    strobe_peaks = (np.abs(strobe_states) ** 2).max(axis=1)
    revival_overlap = float(np.abs(psi0.conj() @ strobe_states[-1]) ** 2)
    return EvolutionProfile(
        times=t_grid,
        probabilities=probabilities,
        strobe_peaks=strobe_peaks,
        revival_overlap=revival_overlap,
    )


def state_transfer_check(
    graph: HermitianGraph,
    x0: int,
    xf: int,
    tau: float | None = None,
    samples_per_interval: int = 10,
    threshold: float = 1 - 1e-8,
) -> float:
    """Earliest grid time at which the walker sits on node xf with
    probability at least ``threshold``.

    The grid samples every interval at ``samples_per_interval`` points up
    to n intervals.  Raises if the transfer never completes on the grid.
    """
    if x0 == xf:
        raise ValueError("start and final nodes must differ")
    if tau is None:
        tau = default_tau(graph)
    psi0 = node_state(graph.n, x0)
    steps = graph.n * samples_per_interval
    times = tau / samples_per_interval * np.arange(1, steps + 1)
    energies, vectors = graph.eig
    coeffs = vectors.conj().T @ psi0
    amps = (np.exp(-1j * np.outer(times, energies)) * coeffs) @ vectors.T[:, xf]
    hits = np.flatnonzero(np.abs(amps) ** 2 >= threshold)
    if not len(hits):
        raise ValueError(f"no transfer from node {x0} to node {xf} within {graph.n} intervals")
    return float(times[hits[0]])


def write_noise_csv(result: NoiseResult, path: str) -> None:
    """Write `a,realization,p_det` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "realization", "p_det"])
        for r, val in enumerate(result.p_det):
            writer.writerow([f"{result.magnitude_a:.17g}", r, f"{val:.17g}"])


def write_sweep_csv(result: SweepResult, path: str) -> None:
    """Write `tau,mean_n,p_det_at_nmax` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau", "mean_n", "p_det_at_nmax"])
        for tau, mean_n, p in zip(result.taus, result.mean_n, result.p_det_at_nmax):
            writer.writerow([f"{tau:.17g}", f"{mean_n:.17g}", f"{p:.17g}"])


def write_profile_csv(profile: EvolutionProfile, path: str) -> None:
    """Write `t,node,prob` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "node", "prob"])
        for i, t in enumerate(profile.times):
            for x, prob in enumerate(profile.probabilities[i]):
                writer.writerow([f"{t:.17g}", x, f"{prob:.17g}"])
