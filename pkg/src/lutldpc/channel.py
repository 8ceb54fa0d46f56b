"""BI-AWGN channel with BPSK, seen through its LLR."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy import integrate, special


def noise_variance(snr_db: float, rate) -> float:
    """sigma^2 for Eb/N0 = snr_db, Eb counted per information bit."""
    rate = float(Fraction(rate)) if isinstance(rate, (str, Fraction)) else float(rate)
    if not 0 < rate < 1:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0))


def llr_channel(snr_db: float, rate, bit, noise):
    """Channel LLR 2y/sigma^2 for y = (1 - 2 bit) + sigma * noise."""
    s2 = noise_variance(snr_db, rate)
    y = (1.0 - 2.0 * np.asarray(bit, dtype=float)) + np.sqrt(s2) * np.asarray(noise, dtype=float)
    return 2.0 * y / s2


def llr_moments(snr_db: float, rate) -> tuple[float, float]:
    """Mean and standard deviation of the LLR given bit 0."""
    mu = 2.0 / noise_variance(snr_db, rate)
    return mu, np.sqrt(2.0 * mu)


def interval_prob(lo, hi, mean: float, std: float):
    """P(lo <= X < hi) for X ~ N(mean, std^2), accurate in both tails."""
    a = (np.asarray(lo, dtype=float) - mean) / std
    b = (np.asarray(hi, dtype=float) - mean) / std
    upper = a >= 0
    return np.where(upper, special.ndtr(-a) - special.ndtr(-b), special.ndtr(b) - special.ndtr(a))


def mixture_quantiles(probs, snr_db: float, rate) -> np.ndarray:
    """Quantiles of the LLR distribution under a uniform bit prior, probs >= 0.5."""
    mu, sd = llr_moments(snr_db, rate)
    probs = np.asarray(probs, dtype=float)
    # survival of the mixture, evaluated without cancellation
    target = 1.0 - probs
    lo = np.zeros_like(probs)
    hi = np.full_like(probs, mu + 40.0 * sd)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        sf = 0.5 * (special.ndtr((mu - mid) / sd) + special.ndtr((-mu - mid) / sd))
        above = sf > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def biawgn_mi(snr_db: float, rate) -> float:
    """I(L; x) of the unquantized channel in bits."""
    mu, sd = llr_moments(snr_db, rate)

    def integrand(z):
        llr = mu + sd * z
        return np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi) * np.logaddexp(0.0, -llr) / np.log(2)

    loss, _ = integrate.quad(integrand, -40, 40, limit=400, epsabs=1e-13)
    return 1.0 - loss
