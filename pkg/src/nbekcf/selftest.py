"""Randomized equivalence checks of the fast paths against the brute-force oracles."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acsii import autocorrelation
from .ccim import correlate_from_integral, fundamental_matrices, integral_matrix, realignment_shifts
from .kernel import KernelConfig, kernel_matrix
from .oracle import brute_autocorrelation, brute_circulant_correlation, brute_kernel_matrix
from .regression import direct_multiframe_solution, init_model, update_model

MAX_DIM = 10


@dataclass
class SuiteResult:
    name: str
    total: int = 0
    passed: int = 0
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class SelftestReport:
    suites: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    @property
    def first_failure(self):
        return next((s for s in self.suites if not s.ok), None)


def relative_deviation(got, ref) -> float:
    got = np.asarray(got, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    diff = float(np.max(np.abs(got - ref))) if ref.size else 0.0
    scale = float(np.max(np.abs(ref))) if ref.size else 0.0
    if diff == 0.0:
        return 0.0
    return diff / scale if scale > 0 else float("inf")


def random_instance(rng: np.random.Generator, integer: bool, max_dim: int = MAX_DIM):
    """Random ``(X0, Z)`` with ``1 <= m <= M <= max_dim``, ``1 <= n <= N <= max_dim``, ``D in {1,2,3}``."""
    M = int(rng.integers(1, max_dim + 1))
    N = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, M + 1))
    n = int(rng.integers(1, N + 1))
    D = int(rng.integers(1, 4))
    if integer:
        x = rng.integers(-5, 6, size=(m, n, D)).astype(np.float64)
        z = rng.integers(-5, 6, size=(M, N, D)).astype(np.float64)
    else:
        x = rng.standard_normal((m, n, D))
        z = rng.standard_normal((M, N, D))
    return x, z


def _dims(x, z):
    m, n, D = x.shape
    M, N, _ = z.shape
    return f"m={m} n={n} M={M} N={N} D={D}"


def faulty_shifts(ip, jp, m, n):
    """Realignment with the L block's shift sign flipped (for fault-injection runs)."""
    sh = realignment_shifts(ip, jp, m, n)
    di, dj = sh["L"]
    sh["L"] = (-di, -dj)
    return sh


def run_acsii(cases: int, rng, tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("acsii")
    for k in range(cases):
        integer = k % 2 == 0
        x, z = random_instance(rng, integer)
        m, n = x.shape[:2]
        got = autocorrelation(z, m, n)
        ref = brute_autocorrelation(z, m, n)
        dev = relative_deviation(got, ref)
        res.total += 1
        if (integer and dev != 0.0) or dev > tol:
            res.failure = f"case {k}: {_dims(x, z)} max relative deviation {dev:.3e}"
            return res
        res.passed += 1
    return res


def run_ccim(cases: int, rng, tol: float = 1e-9, shifts=realignment_shifts) -> SuiteResult:
    res = SuiteResult("ccim")
    for k in range(cases):
        integer = k % 2 == 0
        x, z = random_instance(rng, integer)
        m, n = x.shape[:2]
        M, N = z.shape[:2]
        im = integral_matrix(fundamental_matrices(x, z))
        got = correlate_from_integral(im, M - m + 1, N - n + 1, shifts=shifts)
        ref = brute_circulant_correlation(x, z)
        res.total += 1
        dev = relative_deviation(got, ref)
        if (integer and dev != 0.0) or dev > tol:
            per_map = np.max(np.abs(got - ref), axis=(2, 3))
            ip, jp = np.unravel_index(int(np.argmax(per_map)), per_map.shape)
            res.failure = (f"case {k}: {_dims(x, z)} i'={ip} j'={jp} "
                           f"max deviation {per_map[ip, jp]:.6g} (relative {dev:.3e})")
            return res
        res.passed += 1
    return res


def run_kernel(cases: int, rng, tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("kernel")
    for k in range(cases):
        x, z = random_instance(rng, integer=False)
        cfg = KernelConfig(sigma=4.0, normalize_by_dim=bool(k % 2))
        got = kernel_matrix(x, z, cfg).values
        ref = brute_kernel_matrix(x, z, cfg)
        dev = relative_deviation(got, ref)
        res.total += 1
        if dev > tol or not (np.all(got > 0) and np.all(got <= 1)):
            res.failure = (f"case {k}: {_dims(x, z)} normalize_by_dim={cfg.normalize_by_dim} "
                           f"max relative deviation {dev:.3e}")
            return res
        res.passed += 1
    return res


def run_recursion(cases: int, rng, tol: float = 1e-10) -> SuiteResult:
    res = SuiteResult("recursion")
    for k in range(cases):
        Q = int(rng.integers(2, 9))
        gamma = (0.01, 0.25)[k % 2]
        P = int(rng.integers(4, 13))
        mn = int(rng.integers(1, P + 1))
        lam = 10.0 ** rng.uniform(-4, 0)
        y = rng.random(P)
        Ks = [rng.standard_normal((P, mn)) for _ in range(Q)]
        state = init_model(Ks[0], y, lam, gamma)
        for K in Ks[1:]:
            state = update_model(state, K, y)
        ref = direct_multiframe_solution(Ks, y, lam, gamma)
        dev = relative_deviation(state.alpha, ref)
        res.total += 1
        if dev > tol:
            res.failure = (f"case {k}: Q={Q} gamma={gamma} P={P} mn={mn} lambda={lam:.3g} "
                           f"max relative deviation {dev:.3e}")
            return res
        res.passed += 1
    return res


def run_selftest(cases: int = 100, seed: int = 42, inject_fault: bool = False) -> SelftestReport:
    rng = np.random.default_rng(seed)
    shifts = faulty_shifts if inject_fault else realignment_shifts
    report = SelftestReport()
    report.suites.append(run_acsii(cases, rng))
    report.suites.append(run_ccim(cases, rng, shifts=shifts))
    report.suites.append(run_kernel(cases, rng))
    report.suites.append(run_recursion(cases, rng))
    return report
