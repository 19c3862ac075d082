"""Laplace-domain generating function, winding number, and integral statistics.

The detection amplitudes phi_n are resummed on the unit circle,
Phi(theta) = sum_n exp(i*n*theta) phi_n.  On a graph passing the search
conditions this curve closes after one sweep of theta and its integer
winding around the origin equals the number of measurements until certain
detection.  The curve is evaluated by two independent strategies that must
agree: a resolvent ratio in the energy eigenbasis and a truncated amplitude
sum from the simulation path.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .graphs import HermitianGraph, check_search_conditions, diagonalize
from .monitored import Protocol, first_detection_series

logger = logging.getLogger(__name__)

#: curves passing closer than this to the origin have no defined winding
MIN_MODULUS = 1e-6

#: truncation length of the amplitude-sum strategy off the exceptional point
DEFAULT_N_TRUNC = 10_000


class StrategyDisagreementError(ValueError):
    """The resolvent and truncated-sum evaluations of Phi(theta) differ by
    more than the agreement tolerance plus the estimated truncation tail."""


@dataclass(frozen=True, eq=False)
class ThetaSeries:
    """Sampled generating function on a uniform midpoint theta grid.

    ``unwrapped_phase`` is continuous across samples; ``phase_change``
    includes the closing jump back to the first sample and equals
    2*pi*winding for quantized curves.  ``winding`` is None when the curve
    approaches the origin (min_modulus below threshold) or when the total
    phase change is not close to an integer multiple of 2*pi.
    """

    thetas: np.ndarray
    values: np.ndarray
    unwrapped_phase: np.ndarray
    winding: int | None
    min_modulus: float
    phase_change: float
    strategy_deviation: float
    tail_bound: float
    nudged_samples: int


def _wrap(angles: np.ndarray | float) -> np.ndarray | float:
    return (angles + np.pi) % (2 * np.pi) - np.pi


def generating_function(
    graph: HermitianGraph,
    protocol: Protocol,
    psi0: np.ndarray,
    m_samples: int | None = None,
    epsilon: float = 1e-9,
    n_trunc: int | None = None,
    agreement_tol: float = 1e-6,
) -> ThetaSeries:
    """Evaluate Phi(theta) on a uniform grid by both strategies.

    Strategy (a) evaluates the resolvent ratio
    <d|W(theta)|psi0> / (1 + <d|W(theta)|d>) with
    W(theta) = z U/(1 - z U) in the energy eigenbasis, where
    z = exp(i*theta - epsilon); the convergence regulator epsilon pushes
    the unit-circle poles slightly inside.  Strategy (b) sums the simulated
    amplitudes phi_n z^n up to ``n_trunc`` (the node count on passing
    graphs, where the sum terminates exactly; 10^4 otherwise).  The two
    evaluations must agree within ``agreement_tol`` plus the estimated
    truncation tail.

    The midpoint grid never collides with the resolvent poles of the
    designed families; any sample that still lands within 1e-6 of a pole is
    nudged away and the event is logged.
    """
    n = graph.n
    if m_samples is None:
        m_samples = max(1024, 64 * n)
    if m_samples < 64 * n:
        raise ValueError("m_samples must be at least 64 per node")
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")

    spectral = diagonalize(graph, protocol.target)
    lam = np.exp(-1j * spectral.energies * protocol.tau)
    d_k = spectral.eigenvectors.conj().T @ protocol.target
    c_k = spectral.eigenvectors.conj().T @ psi0
    p_k = np.abs(d_k) ** 2

    thetas = 2 * np.pi * (np.arange(m_samples) + 0.5) / m_samples
    pole_angles = np.angle(lam.conj())  # z*lam crosses 1 at theta = -arg(lam)
    dist = np.abs(_wrap(thetas[:, None] - pole_angles[None, :])).min(axis=1)
    nudge_idx = np.flatnonzero(dist < 1e-6)
    if len(nudge_idx):
        thetas = thetas.copy()
        thetas[nudge_idx] += 2e-6
        logger.warning(
            "nudged %d theta samples off resolvent poles", len(nudge_idx)
        )

    z = np.exp(1j * thetas - epsilon)

    # strategy (a): resolvent ratio, chunked over theta
    values_a = np.empty(m_samples, dtype=complex)
    weight = np.conj(d_k) * c_k
    for lo in range(0, m_samples, 8192):
        zz = z[lo : lo + 8192, None] * lam[None, :]
        w = zz / (1 - zz)
        values_a[lo : lo + 8192] = (w * weight).sum(axis=1) / (1 + w @ p_k)

    # strategy (b): truncated amplitude sum from the simulation path
    passing = check_search_conditions(graph, protocol.target, protocol.tau).passed
    if n_trunc is None:
        n_trunc = n if passing else DEFAULT_N_TRUNC
    series = first_detection_series(
        graph, Protocol(tau=protocol.tau, target=protocol.target, n_max=n_trunc), psi0
    )
    # On a passing graph the amplitude sum terminates exactly at n attempts;
    # otherwise bound the truncation error by the geometric amplitude tail.
    if passing and n_trunc >= n:
        tail_bound = 0.0
    else:
        tail_bound = _amplitude_tail(series.phi)
    values_b = _amplitude_sum(series.phi, thetas, epsilon, nudge_idx)

    deviation = float(np.abs(values_a - values_b).max())
    allowed = agreement_tol + 3 * tail_bound
    if np.isinf(tail_bound):
        logger.warning(
            "amplitude record still growing at n_trunc=%d; strategy "
            "agreement unverifiable (deviation %.3e)", n_trunc, deviation
        )
    elif deviation > allowed:
        raise StrategyDisagreementError(
            f"generating-function strategies disagree by {deviation:.3e} "
            f"(allowed {allowed:.3e})"
        )

    moduli = np.abs(values_a)
    min_modulus = float(moduli.min())
    unwrapped = np.unwrap(np.angle(values_a))
    if min_modulus >= MIN_MODULUS:
        margin = float(np.abs(_wrap(np.diff(np.angle(values_a)))).max())
        if margin > 0.9 * np.pi:
            logger.warning(
                "adjacent phase jumps reach %.2f rad; unwrapping may be "
                "ambiguous, increase m_samples", margin
            )
    closing = float(_wrap(np.angle(values_a[0]) - np.angle(values_a[-1])))
    phase_change = float(unwrapped[-1] - unwrapped[0] + closing)

    winding = None
    if min_modulus >= MIN_MODULUS:
        candidate = phase_change / (2 * np.pi)
        if abs(candidate - round(candidate)) <= 0.1:
            winding = int(round(candidate))

    return ThetaSeries(
        thetas=thetas,
        values=values_a,
        unwrapped_phase=unwrapped,
        winding=winding,
        min_modulus=min_modulus,
        phase_change=phase_change,
        strategy_deviation=deviation,
        tail_bound=tail_bound,
        nudged_samples=len(nudge_idx),
    )


def _amplitude_tail(phi: np.ndarray) -> float:
    """Bound sum |phi_n| beyond the record by a geometric fit to the last
    decade; inf when the record has not started decaying."""
    window = np.abs(phi[-max(2, len(phi) // 10):])
    positive = window[window > 1e-150]
    if len(positive) < 2:
        return 0.0
    slope = np.polyfit(np.arange(len(positive), dtype=float), np.log(positive), 1)[0]
    if slope >= 0:
        return float("inf")
    ratio = float(np.exp(slope))
    return float(np.abs(phi[-1]) * ratio / (1 - ratio))


def _amplitude_sum(
    phi: np.ndarray, thetas: np.ndarray, epsilon: float, nudge_idx: np.ndarray
) -> np.ndarray:
    """Sum phi_n z^n over the grid, by FFT on the uniform midpoint grid with
    direct evaluation at any nudged samples."""
    m = len(thetas)
    nt = len(phi)
    ns = np.arange(1, nt + 1)
    damped = phi * np.exp(-ns * epsilon)
    if nt < m:
        padded = np.zeros(m, dtype=complex)
        padded[1 : nt + 1] = damped * np.exp(1j * ns * np.pi / m)
        values = m * np.fft.ifft(padded)
    else:
        values = np.empty(m, dtype=complex)
        for lo in range(0, m, 512):
            block = np.exp(1j * np.outer(thetas[lo : lo + 512], ns))
            values[lo : lo + 512] = block @ damped
        return values
    for i in nudge_idx:
        values[i] = np.exp(1j * thetas[i] * ns) @ damped
    return values


def winding_number(series: ThetaSeries) -> int:
    """Integer winding of the sampled curve around the origin.

    Requires the curve to stay at least MIN_MODULUS away from the origin
    and the accumulated phase to sit within 0.1 revolutions of an integer.
    """
    if series.min_modulus < MIN_MODULUS:
        raise ValueError(
            "winding undefined: curve passes through the origin "
            f"(min modulus {series.min_modulus:.2e})"
        )
    revolutions = series.phase_change / (2 * np.pi)
    residual = abs(revolutions - round(revolutions))
    if residual > 0.1:
        raise ValueError(
            f"accumulated phase is {residual:.3f} revolutions away from an "
            "integer; increase the sample count"
        )
    return int(round(revolutions))


@dataclass(frozen=True)
class IntegralStatistics:
    p_det: float
    mean_t: float


def integral_statistics(series: ThetaSeries, tau: float) -> IntegralStatistics:
    """Detection probability and mean search time as theta integrals.

    p_det = (1/2pi) * integral |Phi|^2 and
    mean_t = tau/(2pi*i) * integral conj(Phi) dPhi/dtheta, with trapezoidal
    quadrature (exact mean on the uniform periodic grid) and FFT spectral
    differentiation.
    """
    values = series.values
    m = len(values)
    p_det = float(np.mean(np.abs(values) ** 2))
    freqs = np.fft.fftfreq(m, d=1.0 / m)
    derivative = np.fft.ifft(1j * freqs * np.fft.fft(values))
    mean_t = float(tau * np.real(np.mean(values.conj() * derivative / 1j)))
    return IntegralStatistics(p_det=p_det, mean_t=mean_t)


def write_theta_csv(series: ThetaSeries, path: str) -> None:
    """Write `theta,re,im,abs,unwrapped_phase` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "re", "im", "abs", "unwrapped_phase"])
        for theta, val, phase in zip(series.thetas, series.values, series.unwrapped_phase):
            writer.writerow(
                [
                    f"{theta:.17g}",
                    f"{val.real:.17g}",
                    f"{val.imag:.17g}",
                    f"{abs(val):.17g}",
                    f"{phase:.17g}",
                ]
            )


def winding_summary(series: ThetaSeries, tau: float) -> dict:
    """Summary dict matching the JSON interface of the winding command."""
    stats = integral_statistics(series, tau)
    return {
        "winding": series.winding,
        "p_det": stats.p_det,
        "mean_t": stats.mean_t,
        "min_modulus": series.min_modulus,
    }
