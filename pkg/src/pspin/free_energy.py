"""Free energy of the pure p-spin model at every inverse temperature.

Below the critical temperature the free energy is the replica-symmetric value
beta^2 nu(1)/2.  Above it, the dominant overlap q_beta is the larger root of
beta q^(p/2-1)(1-q) = t_minus in (ell, 1) with ell = (p-2)/p, where t_minus is
the smaller root of the quadratic p(p-1)t^2 - p e_star t + 1 = 0, and the free
energy follows from the TAP value at q_beta.  The 2-spin model has closed
forms for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .critical import solve_critical
from .mixtures import Mixture, e_infinity, eval_nu_derivs, shifted_total
from .roots import bisect_secant

Q_CAP = 1.0 - 1e-12

# branch labels recorded by free_energy()/sweep()
BRANCH_RS = "rs"            # replica-symmetric value, beta < beta_c
BRANCH_CRITICAL = "critical"  # exactly at beta_c (q_beta = q_c tie-break)
BRANCH_TAP = "tap"          # TAP value at q_beta, beta > beta_c


@dataclass(frozen=True)
class TapSolution:
    p: int
    beta: float
    q_beta: float
    t_minus: float
    t_plus: float
    free_energy: float
    ell: float
    branch: str


@dataclass(frozen=True)
class TapFunctionalSample:
    q: float
    g_value: float
    g_derivative: float


def t_pm(p: int, e_star: float) -> tuple[float, float]:
    """Both roots of p(p-1)t^2 - p e_star t + 1 = 0, ascending.

    The larger root is computed by the standard stable formula and the smaller
    recovered from the product identity t_minus t_plus = 1/(p(p-1)), so neither
    suffers cancellation.  A discriminant within 1e-14 of zero collapses to the
    double root 1/sqrt(p(p-1)).
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    e_inf = e_infinity(p)
    ratio = e_star / e_inf
    disc = ratio * ratio - 1.0
    if disc < 0.0:
        if disc < -1e-14:
            raise ValueError(
                f"e_star={e_star} below the threshold e_inf={e_inf}: no real roots"
            )
        disc = 0.0
    scale = 1.0 / math.sqrt(p * (p - 1))
    t_plus = scale * (ratio + math.sqrt(disc))
    t_minus = 1.0 / (p * (p - 1) * t_plus)
    return t_minus, t_plus


def overlap_polynomial(p: int, q: float) -> float:
    """f(q) = q^(p/2-1)(1-q): zero at both endpoints, peaked at ell=(p-2)/p."""
    return q ** (p / 2.0 - 1.0) * (1.0 - q)


def solve_q_beta(p: int, beta: float, e_star: float, tol: float = 1e-12) -> float:
    """Larger root of f(q) = t_minus/beta on (ell, 1), for beta >= beta_c.

    f is strictly decreasing there from f(ell) > t_minus/beta down to f(1)=0,
    so bisection is safe.
    """
    if not 0.0 < tol <= 1e-6:
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")
    beta_c = solve_critical(p).beta_c
    if beta < beta_c:
        raise ValueError(f"beta={beta} below beta_c={beta_c}; no shifted overlap")
    t_minus, _ = t_pm(p, e_star)
    target = t_minus / beta
    ell = (p - 2) / p
    if target > overlap_polynomial(p, ell):
        raise ValueError(
            f"t_minus/beta={target} exceeds the peak f(ell)="
            f"{overlap_polynomial(p, ell)}: inconsistent e_star"
        )
    lo = ell if p > 2 else 1e-15
    return bisect_secant(
        lambda q: overlap_polynomial(p, q) - target, lo, Q_CAP,
        bracket_tol=1e-15, value_tol=0.0,
    )


def tap_value(p: int, beta: float, e_star: float, q: float) -> float:
    """beta e_star q^(p/2) + log(1-q)/2 + Onsager value at q."""
    return (beta * e_star * q ** (p / 2.0)
            + 0.5 * math.log1p(-q)
            + 0.5 * beta * beta * shifted_total(p, q))


def free_energy(p: int, beta: float) -> TapSolution:
    """Free energy and dominant overlap at inverse temperature beta.

    The critical temperature itself is reported on its own branch with
    q_beta = q_c (the largest overlap consistent with the critical value), at
    which the TAP value coincides with beta^2 nu(1)/2 anyway.
    """
    if not math.isfinite(beta) or beta < 0.0:
        raise ValueError(f"beta must be finite and nonnegative, got {beta}")
    cp = solve_critical(p)
    t_minus, t_plus = t_pm(p, cp.e_star)
    ell = (p - 2) / p

    if beta < cp.beta_c:
        f = 0.5 * beta * beta
        return TapSolution(p, beta, 0.0, t_minus, t_plus, f, ell, BRANCH_RS)
    if beta == cp.beta_c:
        f = 0.5 * beta * beta
        return TapSolution(p, beta, cp.q_c, t_minus, t_plus, f, ell, BRANCH_CRITICAL)

    if p == 2:
        q = 1.0 - 1.0 / (math.sqrt(2.0) * beta)
        f = (math.sqrt(2.0) * beta - 0.5 * math.log(beta)
             - 0.25 * math.log(2.0) - 0.75)
    else:
        q = solve_q_beta(p, beta, cp.e_star)
        f = tap_value(p, beta, cp.e_star, q)
    return TapSolution(p, beta, q, t_minus, t_plus, f, ell, BRANCH_TAP)


def tap_functional(p: int, beta: float, e_star: float, q: float) -> TapFunctionalSample:
    """Diagnostic TAP functional g(beta, q) and its analytic q-derivative.

    dg/dq = beta e_star (p/2) q^(p/2-1) - 1/(2(1-q)) - beta^2 (1-q) nu''(q)/2;
    it vanishes at q_beta and equals -1/2 from the right at q=0 (p >= 3).
    """
    if beta < 0.0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    _, _, nu2 = eval_nu_derivs(Mixture.pure(p), q)
    g = tap_value(p, beta, e_star, q)
    dg = (beta * e_star * (p / 2.0) * q ** (p / 2.0 - 1.0)
          - 0.5 / (1.0 - q)
          - 0.5 * beta * beta * (1.0 - q) * nu2)
    return TapFunctionalSample(q=q, g_value=g, g_derivative=dg)


def lemma_bound_check(p: int, beta: float, q_beta: float) -> bool:
    """True iff beta q^(p/2-1)(1-q) <= 1/sqrt(p(p-1)) with slack >= -1e-12."""
    if p < 3:
        raise ValueError(f"bound applies to p >= 3, got {p}")
    slack = 1.0 / math.sqrt(p * (p - 1)) - beta * overlap_polynomial(p, q_beta)
    return slack >= -1e-12


def sweep(p: int, betas: Iterable[float]) -> list[TapSolution]:
    """free_energy at each beta of a strictly increasing nonnegative grid."""
    grid = list(betas)
    if any(b < 0.0 for b in grid):
        raise ValueError("beta grid must be nonnegative")
    if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
        raise ValueError("beta grid must be strictly increasing")
    out = []
    for beta in grid:
        try:
            out.append(free_energy(p, beta))
        except Exception as exc:
            raise RuntimeError(f"sweep failed at beta={beta}: {exc}") from exc
    return out
