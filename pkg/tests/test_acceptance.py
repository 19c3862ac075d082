"""Acceptance suite: one test per acceptance criterion, stated tolerances.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``); the
test outcome itself carries the same verdict.  One clause is an expected
failure by construction: the transfer law t = ((xf-x0) mod n)*tau presumes
a packet walking x -> x+1, while the arrival convention adopted throughout
this package (detection from node x at exactly attempt x, criterion 1)
requires x -> x-1, and no single Hermitian matrix satisfies both.  The
companion test pins the orientation-consistent transfer law that does
hold, for both crawl orientations.
"""

import numpy as np
import pytest

from qwsearch.exceptional import (
    characteristic_identity_check,
    survival_operator,
    survival_spectrum,
)
from qwsearch.experiments import (
    NoiseConfig,
    default_tau_grid,
    noise_run,
    non_monitored_profile,
    sk_sweep,
    state_transfer_check,
)
from qwsearch.graphs import (
    HermitianGraph,
    build_crawl,
    build_funnel,
    default_tau,
    diagonalize,
    node_state,
)
from qwsearch.monitored import (
    Protocol,
    detection_amplitude_direct,
    first_detection_series,
    survival_matrix,
    unitary,
)
from qwsearch.qbasis import build_qbasis, predict_detection
from qwsearch.topology import generating_function, integral_statistics


def report(name: str, ok: bool, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{suffix}")
    assert ok, f"{name}{suffix}"


def random_state(rng, n):
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return vec / np.linalg.norm(vec)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    matrix = (a + a.conj().T) / 2
    return HermitianGraph(n=n, gamma=float(np.abs(matrix).max()), matrix=matrix, family="custom")


def test_criterion_01_crawl_deterministic_detection():
    graph = build_crawl(50, 1.0)
    protocol = Protocol(tau=default_tau(graph), target=node_state(50, 0), n_max=60)
    worst_peak, worst_rest = 1.0, 0.0
    for x in range(50):
        series = first_detection_series(graph, protocol, node_state(50, x))
        arrival = 50 if x == 0 else x
        peak = series.f[arrival - 1]
        rest = series.f.sum() - peak
        worst_peak = min(worst_peak, peak)
        worst_rest = max(worst_rest, rest)
    ok = abs(worst_peak - 1) <= 1e-8 and worst_rest <= 1e-8
    report(
        "crawl deterministic detection",
        ok,
        f"min F_x {worst_peak:.12f}, max residual {worst_rest:.2e}",
    )


def test_criterion_02_funnel_guaranteed_search():
    graph = build_funnel(50, 1.0)
    protocol = Protocol(tau=default_tau(graph), target=node_state(50, 0), n_max=500)
    worst_sum, worst_late = 1.0, 0.0
    for x in range(50):
        series = first_detection_series(graph, protocol, node_state(50, x))
        worst_sum = min(worst_sum, series.f[:50].sum())
        worst_late = max(worst_late, series.f[50:].max())
    ok = abs(worst_sum - 1) <= 1e-8 and worst_late <= 1e-10
    report(
        "funnel guaranteed search",
        ok,
        f"min sum F {worst_sum:.12f}, max late F {worst_late:.2e}",
    )


def test_criterion_03_return_problem_peak():
    ok = True
    details = []
    for builder in (build_crawl, build_funnel):
        graph = builder(50, 1.0)
        target = node_state(50, 0)
        protocol = Protocol(tau=default_tau(graph), target=target, n_max=60)
        series = first_detection_series(graph, protocol, target)
        ok = ok and abs(series.f[49] - 1) <= 1e-8 and abs(series.var_n) <= 1e-9
        details.append(f"{graph.family}: F_50={series.f[49]:.12f} var={series.var_n:.1e}")
    report("return problem peak", ok, "; ".join(details))


def test_criterion_04_exceptional_point_all_sizes():
    worst_norm, worst_small = 0.0, 0.0
    eps = np.finfo(float).eps
    for n in range(2, 65):
        for builder in (build_crawl, build_funnel):
            graph = builder(n, 1.0)
            op = survival_operator(graph, node_state(n, 0), default_tau(graph))
            result = survival_spectrum(op)
            worst_norm = max(worst_norm, result.nilpotency_norm)
            if n <= 8:
                scatter = result.max_abs_eig / (10 * eps ** (1 / n))
                worst_small = max(worst_small, scatter)
    ok = worst_norm <= 1e-6 and worst_small <= 1.0
    report(
        "exceptional point order n",
        ok,
        f"max ||S^n|| {worst_norm:.2e}, scatter/bound {worst_small:.3f}",
    )


def test_criterion_05_winding_quantization():
    ok = True
    worst_residual = 0.0
    graph3 = build_crawl(3, 1.0)
    basis3 = build_qbasis(graph3, node_state(3, 0))
    protocol3 = Protocol(tau=default_tau(graph3), target=node_state(3, 0), n_max=3)
    for k, expected in ((0, 3), (1, 2), (2, 1)):
        series = generating_function(graph3, protocol3, basis3[k])
        ok = ok and series.winding == expected
    for n in (4, 8, 16):
        graph = build_crawl(n, 1.0)
        basis = build_qbasis(graph, node_state(n, 0))
        protocol = Protocol(tau=default_tau(graph), target=node_state(n, 0), n_max=n)
        for k in range(n):
            series = generating_function(graph, protocol, basis[k])
            ok = ok and series.winding == n - k
            worst_residual = max(
                worst_residual, abs(series.phase_change / (2 * np.pi) - (n - k))
            )
    ok = ok and worst_residual <= 1e-3
    report("winding quantization", ok, f"max pre-rounding residual {worst_residual:.2e}")


def test_criterion_06_noise_robustness():
    graph = build_funnel(50, 1.0)
    psi0 = node_state(50, 49)
    noisy = noise_run(graph, psi0, NoiseConfig(magnitude_a=0.10, realizations=1000, seed=20260810))
    clean = noise_run(graph, psi0, NoiseConfig(magnitude_a=0.0, realizations=1000, seed=20260810))
    ok = 0.95 <= noisy.mean_p_det <= 1.0 and np.abs(clean.p_det - 1).max() <= 1e-9
    report(
        "noise robustness",
        ok,
        f"mean P_det(a=0.1) {noisy.mean_p_det:.4f}, max |1-P_det(a=0)| "
        f"{np.abs(clean.p_det - 1).max():.1e}",
    )


def test_criterion_07_sk_contrast():
    taus = default_tau_grid()
    result = sk_sweep(50, taus=taus, seed=20260810, n_max=100_000)
    median = float(np.median(result.mean_n))
    zeno = sk_sweep(50, taus=np.array([0.01]), seed=20260810, n_max=100_000)
    ok = median >= 10 * 50 and zeno.mean_n[0] > median
    report(
        "sk contrast",
        ok,
        f"median <n> {median:.0f}, zeno <n> {zeno.mean_n[0]:.0f}",
    )


def test_criterion_08_revival():
    ok = True
    details = []
    rng = np.random.default_rng(5)
    for builder in (build_crawl, build_funnel):
        graph = builder(20, 1.0)
        tau = default_tau(graph)
        for psi0 in (node_state(20, 0), node_state(20, 13), random_state(rng, 20)):
            profile = non_monitored_profile(graph, psi0, np.array([0.0]), tau=tau)
            ok = ok and abs(profile.revival_overlap - 1) <= 1e-8
        details.append(f"{graph.family} revival {profile.revival_overlap:.10f}")
    report("revival at n*tau", ok, "; ".join(details))


def test_criterion_08_transfer_consistent_orientation():
    # The orientation-consistent transfer law: the search-oriented crawl
    # walks x -> x-1 per interval, its conjugate walks x -> x+1.
    graph = build_crawl(20, 1.0)
    reversed_graph = build_crawl(20, 1.0, reverse=True)
    tau = default_tau(graph)
    ok = True
    for x0, xf in ((0, 7), (3, 11), (15, 2), (19, 0)):
        t_default = state_transfer_check(graph, x0, xf, tau=tau)
        t_reversed = state_transfer_check(reversed_graph, x0, xf, tau=tau)
        ok = ok and abs(t_default - ((x0 - xf) % 20) * tau) <= 1e-9
        ok = ok and abs(t_reversed - ((xf - x0) % 20) * tau) <= 1e-9
    report("crawl transfer (orientation-consistent)", ok)


@pytest.mark.xfail(
    strict=True,
    reason="documented convention conflict: the transfer law t = "
    "((xf-x0) mod n)*tau presumes the packet walks x -> x+1, while "
    "criterion 1 (monitored arrival at attempt x) requires x -> x-1; "
    "one crawl orientation cannot satisfy both, and this package "
    "standardizes on the arrival convention. reverse=True restores the "
    "x -> x+1 orientation where this law holds.",
)
def test_criterion_08_transfer_literal_clause():
    graph = build_crawl(20, 1.0)
    tau = default_tau(graph)
    ok = True
    for x0, xf in ((0, 7), (3, 11), (15, 2)):
        t = state_transfer_check(graph, x0, xf, tau=tau)
        ok = ok and abs(t - ((xf - x0) % 20) * tau) <= 1e-9
    report("crawl transfer (literal clause)", ok)


def test_criterion_09_cross_path_oracles():
    rng = np.random.default_rng(77)

    # (a) projection loop vs survival-matrix powers, 100 random cases
    worst_amp = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        graph = random_hermitian(rng, n)
        tau = float(rng.uniform(0.3, 2.5))
        target = random_state(rng, n)
        psi0 = random_state(rng, n)
        protocol = Protocol(tau=tau, target=target, n_max=40)
        series = first_detection_series(graph, protocol, psi0)
        n_probe = int(rng.integers(1, 41))
        direct = detection_amplitude_direct(graph, protocol, psi0, n_probe)
        worst_amp = max(worst_amp, abs(direct - series.phi[n_probe - 1]))

    # (b) shift-basis prediction vs simulation
    worst_pred = 0.0
    for builder in (build_crawl, build_funnel):
        graph = builder(20, 1.0)
        target = node_state(20, 0)
        tau = default_tau(graph)
        basis = build_qbasis(graph, target, tau)
        protocol = Protocol(tau=tau, target=target, n_max=20)
        for _ in range(50):
            psi0 = random_state(rng, 20)
            predicted = predict_detection(basis, psi0)
            simulated = first_detection_series(graph, protocol, psi0).f
            worst_pred = max(worst_pred, np.abs(predicted - simulated).max())

    # (c) theta integrals vs monitored statistics
    worst_int = 0.0
    graph = build_funnel(20, 1.0)
    target = node_state(20, 0)
    tau = default_tau(graph)
    protocol = Protocol(tau=tau, target=target, n_max=40)
    for psi0 in (node_state(20, 5), random_state(rng, 20)):
        series = generating_function(graph, protocol, psi0)
        stats = integral_statistics(series, tau)
        simulated = first_detection_series(graph, protocol, psi0)
        worst_int = max(
            worst_int,
            abs(stats.p_det - simulated.p_det),
            abs(stats.mean_t - simulated.mean_t),
        )

    # (d) determinant lemma, relative residual off the poles
    worst_det = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        graph = random_hermitian(rng, n)
        tau = float(rng.uniform(0.3, 2.5))
        target = random_state(rng, n)
        u = unitary(graph, tau)
        s = survival_matrix(graph, target, tau)
        eigs_u = np.linalg.eigvals(u)
        for _ in range(8):
            xi = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if np.abs(xi - eigs_u).min() < 1e-2:
                continue
            lhs = np.linalg.det(xi * np.eye(n) - s)
            shifted = xi * np.eye(n) - u
            rhs = xi * np.linalg.det(shifted) * (
                target.conj() @ np.linalg.solve(shifted, target)
            )
            worst_det = max(worst_det, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30))

    # (e) reduced eigenvalue identity on the exact funnel spectrum
    spectral = diagonalize(build_funnel(5, 1.0), node_state(5, 0))
    xi = 0.5 * np.exp(2j * np.pi * np.arange(32) / 32)
    identity_residual = characteristic_identity_check(spectral, 2 * np.pi / 5, xi)

    ok = (
        worst_amp <= 1e-10
        and worst_pred <= 1e-9
        and worst_int <= 1e-6
        and worst_det <= 1e-8
        and identity_residual <= 1e-10
    )
    report(
        "cross-path oracle suite",
        ok,
        f"amp {worst_amp:.1e}, predict {worst_pred:.1e}, integral {worst_int:.1e}, "
        f"det-lemma {worst_det:.1e}, identity {identity_residual:.1e}",
    )


def test_criterion_10_return_time_quantization():
    # candidate stream screened by the no-dark-state precondition: spectra
    # whose survival radius sits within 2e-4 of the unit circle cannot
    # converge in 1e5 attempts and are near-dark, so they are skipped
    accepted = 0
    case = 0
    worst = 0.0
    while accepted < 50:
        rng = np.random.default_rng(np.random.SeedSequence(20260810, spawn_key=(case,)))
        case += 1
        n = int(rng.integers(2, 7))
        graph = random_hermitian(rng, n)
        tau = float(rng.uniform(0.5, 3.0))
        target = node_state(n, 0)
        s = survival_matrix(graph, target, tau)
        if 1 - np.abs(np.linalg.eigvals(s)).max() < 2e-4:
            continue
        protocol = Protocol(tau=tau, target=target, n_max=100_000)
        series = first_detection_series(graph, protocol, target)
        energies, vectors = graph.eig
        p_k = np.abs(vectors.conj().T @ target) ** 2
        angles = np.sort(np.angle(np.exp(-1j * energies[p_k > 1e-12] * tau)))
        distinct = 1 + int((np.diff(angles) > 1e-9).sum())
        worst = max(worst, abs(series.mean_n - distinct))
        accepted += 1
    ok = worst <= 1e-3
    report(
        "return-time quantization",
        ok,
        f"50 graphs from {case} candidates, max deviation {worst:.2e}",
    )
