"""Critical point of the spherical pure p-spin model.

For p >= 3 the critical overlap q_c is the unique interior root of

    a(q) = p(1-q)log(1-q) + pq - (p-1)q^2,

from which the critical inverse temperature and the ground-state energy per
spin follow in closed form.  For p = 2 the model is replica symmetric at all
temperatures and the triple degenerates to (q_c, beta_c, e_star) =
(0, 1/sqrt(2), sqrt(2)).

The solved triple can be validated through ``residuals_prop``, the
stationarity/consistency system it must satisfy.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from .mixtures import Mixture, e_infinity, eval_nu_derivs
from .roots import bisect_secant

Q_CAP = 1.0 - 1e-12  # keep log(1-q) finite: clamp solver domain away from q=1


@dataclass(frozen=True)
class CriticalPoint:
    p: int
    q_c: float
    beta_c: float
    e_star: float
    e_inf: float


@dataclass(frozen=True)
class ResidualTriple:
    """Signed left-minus-right residuals of the three critical-point equations."""

    r_I: float
    r_IIa: float
    r_IIb: float

    def max_abs(self) -> float:
        return max(abs(self.r_I), abs(self.r_IIa), abs(self.r_IIb))


def aux_a(p: int, q: float) -> float:
    """The overlap equation a(q) whose interior root is q_c (p >= 3)."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    return p * (1.0 - q) * math.log1p(-q) + p * q - (p - 1) * q * q


def aux_b(p: int, q: float) -> float:
    """-log(1-q)/q, strictly increasing on (0,1); continued to 1 at q=0."""
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    if q == 0.0:
        return 1.0
    return -math.log1p(-q) / q


def solve_qc(p: int, tol: float = 1e-13) -> float:
    """Interior root q_c of a(q) for p >= 3.

    a decreases from a(0)=0 until q*, the point where b(q) = 2(p-1)/p, and
    increases to 1 as q -> 1, so [q*, 1) brackets the single sign change.
    q* is found first by bisection on the increasing b.
    """
    if p < 3:
        raise ValueError(f"interior root exists only for p >= 3, got {p}")
    if not 0.0 < tol <= 1e-6:
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")

    level = 2.0 * (p - 1) / p
    q_star = bisect_secant(lambda q: aux_b(p, q) - level, 1e-12, Q_CAP)

    a_lo, a_hi = aux_a(p, q_star), aux_a(p, Q_CAP)
    if not (a_lo < 0.0 < a_hi):
        raise RuntimeError(
            f"bracket construction failed for p={p}: "
            f"a({q_star})={a_lo}, a({Q_CAP})={a_hi}"
        )
    q_c = bisect_secant(lambda q: aux_a(p, q), q_star, Q_CAP)
    if abs(aux_a(p, q_c)) > tol:
        raise RuntimeError(f"root polish failed for p={p}: |a(q_c)|={abs(aux_a(p, q_c))}")
    return q_c


@functools.lru_cache(maxsize=None)
def solve_critical(p: int) -> CriticalPoint:
    """Critical triple (q_c, beta_c, e_star) plus the threshold energy e_inf."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    e_inf = e_infinity(p)
    if p == 2:
        return CriticalPoint(p=2, q_c=0.0, beta_c=1.0 / math.sqrt(2.0),
                             e_star=math.sqrt(2.0), e_inf=e_inf)
    q_c = solve_qc(p)
    beta_c = q_c ** (1.0 - p / 2.0) / math.sqrt(p * (1.0 - q_c))
    root = math.sqrt((p - 1) * (1.0 - q_c))
    e_star = 0.5 * e_inf * (1.0 / root + root)
    return CriticalPoint(p=p, q_c=q_c, beta_c=beta_c, e_star=e_star, e_inf=e_inf)


def residuals_prop(p: int, beta: float, q: float, E: float) -> ResidualTriple:
    """Residuals of the three equations the solved triple must satisfy.

    r_I   : 1/(1-q) + beta^2 (1-q) nu''(q) - beta p q^(p/2-1) E
    r_IIa : beta^2 (nu(q) + (1-q) nu'(q)) - beta q^(p/2) E
    r_IIb : beta q^(p/2) E + log(1-q)
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    nu, nu1, nu2 = eval_nu_derivs(Mixture.pure(p), q)
    q_half = q ** (p / 2.0)
    r_I = 1.0 / (1.0 - q) + beta * beta * (1.0 - q) * nu2 - beta * p * q ** (p / 2.0 - 1.0) * E
    r_IIa = beta * beta * (nu + (1.0 - q) * nu1) - beta * q_half * E
    r_IIb = beta * q_half * E + math.log1p(-q)
    return ResidualTriple(r_I=r_I, r_IIa=r_IIa, r_IIb=r_IIb)


def p2_betac_residual(beta: float) -> float:
    """Matching condition for the 2-spin critical temperature.

    Left minus right of  beta^2/2 = sqrt(2) beta - log(beta)/2 - log(2)/4 - 3/4,
    strictly monotone in beta with its unique zero at 1/sqrt(2).
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    return (0.5 * beta * beta
            - math.sqrt(2.0) * beta
            + 0.5 * math.log(beta)
            + 0.25 * math.log(2.0)
            + 0.75)
