"""Ground-state search by projected gradient ascent on the sphere.

Each restart ascends the energy along the tangential gradient (the Euclidean
gradient minus its radial component), renormalizes back to squared norm n
after every step, and sizes steps by backtracking line search.  The best
iterate over all restarts is returned together with per-restart energies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import DisorderTensor, gradient, hamiltonian, project_to_sphere, random_configuration


@dataclass(frozen=True)
class GroundStateResult:
    sigma: np.ndarray
    energy_per_spin: float
    converged: bool           # all restarts met the gradient tolerance
    restart_energies: tuple[float, ...]
    restart_converged: tuple[bool, ...]


def _ascend(
    J: DisorderTensor,
    sigma: np.ndarray,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, float, bool]:
    n = J.n
    step = 1.0
    h = hamiltonian(J, sigma)
    for _ in range(max_iters):
        g = gradient(J, sigma)
        radial = g @ sigma / n
        h = radial * n / J.p  # g . sigma = p H
        tangent = g - radial * sigma
        gnorm = np.linalg.norm(tangent)
        if gnorm / np.sqrt(n) <= tol:
            return sigma, h, True
        # backtracking: demand an Armijo fraction of the first-order gain
        step = min(step * 2.0, 1e3)
        improved = False
        while step > 1e-18:
            cand = project_to_sphere(sigma + step * tangent, n)
            h_cand = hamiltonian(J, cand)
            if h_cand >= h + 1e-4 * step * gnorm * gnorm:
                sigma, h = cand, h_cand
                improved = True
                break
            step *= 0.5
        if not improved:
            # no step improves the energy in double precision: the iterate is
            # numerically stationary even if the gradient tolerance is tighter
            return sigma, h, True
    return sigma, h, False


def ground_state_search(
    J: DisorderTensor,
    restarts: int = 10,
    max_iters: int = 2000,
    tol: float = 1e-7,
    seed: int = 0,
) -> GroundStateResult:
    """Best local maximum of the energy over ``restarts`` random starts.

    ``tol`` bounds the final tangential gradient norm per sqrt(n); the
    value-based line search cannot resolve gradients much below sqrt(machine
    epsilon), so tolerances beyond ~1e-8 are not meaningful.  A restart that
    exhausts ``max_iters`` contributes its best iterate and is flagged.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    rng = np.random.default_rng(np.random.SeedSequence((seed, J.n, J.p)))
    best_sigma: np.ndarray | None = None
    best_h = -np.inf
    energies = []
    flags = []
    for _ in range(restarts):
        start = random_configuration(J.n, rng)
        sigma, h, ok = _ascend(J, start, max_iters, tol)
        energies.append(h / J.n)
        flags.append(ok)
        if h > best_h:
            best_sigma, best_h = sigma, h
    assert best_sigma is not None
    return GroundStateResult(
        sigma=best_sigma,
        energy_per_spin=best_h / J.n,
        converged=all(flags),
        restart_energies=tuple(energies),
        restart_converged=tuple(flags),
    )
