"""Closed-form main terms for the second and fourth moments."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .arith import euler_phi, euler_product_theorem1, factorize, phi_star

EULER_GAMMA = 0.57721566490153286


def theorem1_main(q: int, T: float) -> float:
    """``phi*(q) T / (2 pi^2) * prod_{p|q} (1-1/p)^3/(1+1/p) * (log qT)^4``."""
    f = factorize(q)
    return phi_star(f) * T / (2 * math.pi**2) * euler_product_theorem1(f) * math.log(q * T) ** 4


# Same main term under an alternative name.
rane_main = theorem1_main


def eq7_main(q: int, T: float) -> float:
    """Main term of the mean square of the short part A; a quarter of :func:`theorem1_main`."""
    return theorem1_main(q, T) / 4


def motohashi_main(q: int, T: float) -> float:
    """Mean square of a single L(1/2 + it, chi) over [0, T]:
    ``(phi(q) T / q) (log(qT / 2 pi) + 2 gamma + 2 sum_{p|q} log p / (p - 1))``.
    """
    f = factorize(q)
    prime_sum = sum(math.log(p) / (p - 1) for p in f.primes)
    return euler_phi(f) * T / q * (math.log(q * T / (2 * math.pi)) + 2 * EULER_GAMMA + 2 * prime_sum)


def second_moment_main(q: int, T: float) -> float:
    """Family version of :func:`motohashi_main`, summed over the phi*(q) primitive characters."""
    return phi_star(q) * motohashi_main(q, T)


def montgomery_scale(q: int, T: float) -> float:
    return euler_phi(q) * T * math.log(q * T) ** 4


def in_hypothesis(q: int, T: float) -> bool:
    """Whether (q, T) satisfies q, T >= 2, the range the asymptotics are stated for."""
    return q >= 2 and T >= 2


@dataclass(frozen=True)
class PredictionTable:
    q: int
    T: float
    theorem1: float
    eq7: float
    motohashi: float
    montgomery_scale: float
    nonprim_ratio: float
    in_hypothesis: bool

    def as_dict(self) -> dict:
        return asdict(self)


def prediction_table(q: int, T: float) -> PredictionTable:
    if q < 1 or not T > 0:
        raise ValueError(f"need q >= 1 and T > 0, got q={q}, T={T}")
    t1 = theorem1_main(q, T)
    return PredictionTable(
        q=q,
        T=T,
        theorem1=t1,
        eq7=t1 / 4,
        motohashi=motohashi_main(q, T),
        montgomery_scale=montgomery_scale(q, T),
        nonprim_ratio=(q / euler_phi(q)) ** 5,
        in_hypothesis=in_hypothesis(q, T),
    )
