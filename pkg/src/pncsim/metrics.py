"""GSNR / MSUE framework.

Any relay or end-node output ``y`` is written as ``g (x + e_u)`` with ``e_u``
uncorrelated to the desired signal ``x``. The mean square of ``e_u`` (MSUE)
and ``E|x|^2 / MSUE`` (GSNR) are the figures of merit; :func:`decompose` is the
empirical ground truth against which every closed form is checked.
"""
import math
from dataclasses import dataclass

import numpy as np

from .relay import SchemeId, map_pncf
from .signal import draw_symbols, xor_code
from .channel import uplink

INF = math.inf


class DegenerateCorrelationError(ValueError):
    """Output has no empirical correlation with the desired signal."""


@dataclass(frozen=True)
class UncorrelatedDecomposition:
    gain: complex
    msue: float
    gsnr: float
    n_samples: int
    signal_power: float


def decompose(x, y):
    x = np.asarray(x, dtype=np.complex128).ravel()
    y = np.asarray(y, dtype=np.complex128).ravel()
    if x.shape != y.shape or x.size == 0:
        raise ValueError(f"need equal nonempty sequences, got {x.shape} and {y.shape}")
    sxx = float(np.mean(x.real ** 2 + x.imag ** 2))
    syy = float(np.mean(y.real ** 2 + y.imag ** 2))
    sxy = complex(np.mean(np.conj(x) * y))
    if not np.isfinite(sxy) or abs(sxy) <= 1e-14 * math.sqrt(sxx * syy):
        raise DegenerateCorrelationError("output is uncorrelated with the desired signal")
    gain = sxy / sxx
    e_u = y / gain - x
    msue = float(np.mean(e_u.real ** 2 + e_u.imag ** 2))
    gsnr = sxx / msue if msue > 0 else INF
    return UncorrelatedDecomposition(gain, msue, gsnr, x.size, sxx)


@dataclass(frozen=True)
class PacketDecomposition:
    """Per-packet decompositions averaged over packets.

    The channel (and the relay scaling) is constant within a packet only, so
    gains are fitted packet by packet; ``msue`` is the mean of the per-packet
    MSUEs and ``msue_sigma`` its standard error across packets.
    """
    msue: float
    gsnr: float
    msue_sigma: float
    per_packet: np.ndarray
    n_samples: int


def decompose_packets(x, y):
    x = np.atleast_2d(np.asarray(x, dtype=np.complex128))
    y = np.atleast_2d(np.asarray(y, dtype=np.complex128))
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    parts = [decompose(xp, yp) for xp, yp in zip(x, y)]
    per = np.array([p.msue for p in parts])
    msue = float(np.mean(per))
    power = float(np.mean([p.signal_power for p in parts]))
    sigma = float(np.std(per, ddof=1) / math.sqrt(per.size)) if per.size > 1 else INF
    return PacketDecomposition(msue, power / msue if msue > 0 else INF, sigma, per, x.size)


def to_db(v):
    if v == INF:
        return INF
    if v <= 0:
        raise ValueError(f"cannot express {v!r} in dB")
    return 10.0 * math.log10(v)


@dataclass(frozen=True)
class EpsilonTriple:
    """MAP relay error probabilities: imaginary part only, real part only, both."""
    eps0: float
    eps1: float
    eps2: float

    def __post_init__(self):
        vals = (self.eps0, self.eps1, self.eps2)
        if any(not 0.0 <= v <= 1.0 for v in vals) or sum(vals) > 1.0 + 1e-12:
            raise ValueError(f"invalid error probabilities {vals}")


def classify_errors(estimate, truth):
    est = np.asarray(estimate).ravel()
    ref = np.asarray(truth).ravel()
    re_bad = np.sign(est.real) != np.sign(ref.real)
    im_bad = np.sign(est.imag) != np.sign(ref.imag)
    n = est.size
    return EpsilonTriple(
        eps0=np.count_nonzero(im_bad & ~re_bad) / n,
        eps1=np.count_nonzero(re_bad & ~im_bad) / n,
        eps2=np.count_nonzero(re_bad & im_bad) / n,
    )


def epsilon_monte_carlo(cs, n, rng):
    """Estimate the MAP error triple at channel state ``cs`` from ``n`` uplink draws."""
    if n < 10_000:
        raise ValueError("epsilon estimation needs at least 10^4 draws")
    x1 = draw_symbols(rng, n)
    x2 = draw_symbols(rng, n)
    y3 = uplink(x1, x2, cs, rng)
    return classify_errors(map_pncf(y3, cs.h13, cs.h23), xor_code(x1, x2))


def msue_map_closed(eps, variant="resolved"):
    """Relay MSUE of the MAP scheme from its error triple.

    ``"resolved"`` uses the correlation factor 1 - (eps0 + eps1 + 2 eps2);
    ``"paper_printed"`` squares 1 - eps0 - eps1 - eps2 instead.
    """
    if variant == "paper_printed":
        corr = 1.0 - eps.eps0 - eps.eps1 - eps.eps2
    else:
        corr = 1.0 - eps.eps0 - eps.eps1 - 2.0 * eps.eps2
    if corr <= 0:
        raise ValueError(f"correlation factor {corr} is not positive")
    return 2.0 / corr ** 2 - 2.0


def msue_linear_pnci():
    # the uncorrelated error is exactly the receiver noise, E|n|^2 = 2
    return 2.0


@dataclass(frozen=True)
class MmseAnalyticTerms:
    lambda_: complex
    second_moment: float
    # sample E|target|^2; None means use the nominal power of the scheme
    signal_power: float | None = None


def mmse_terms(target, estimate, target_power=None):
    """Monte Carlo estimate of lambda and E|estimate|^2 for an unscaled conditional mean.

    With ``target_power=None`` the sample power of ``target`` is used, which keeps
    every expectation in the closed form on the same samples; the nominal power
    leaves an O(P * lambda) error when P is large.
    """
    target = np.asarray(target).ravel()
    estimate = np.asarray(estimate).ravel()
    if target_power is None:
        target_power = float(np.mean(target.real ** 2 + target.imag ** 2))
    corr = complex(np.mean(np.conj(target) * estimate))
    lam_conj = target_power / corr - 1.0
    second = float(np.mean(estimate.real ** 2 + estimate.imag ** 2))
    return MmseAnalyticTerms(lambda_=lam_conj.conjugate(), second_moment=second, signal_power=target_power)


def _target_power(scheme, cs):
    return 2.0 if scheme.is_pncf else cs.uplink_power


def msue_mmse_closed(terms, scheme, cs=None):
    """Relay MSUE of an MMSE scheme from its lambda terms. Clipped at zero, since
    the expression cancels to rounding noise in the vanishing-noise limit."""
    scheme = SchemeId.parse(scheme)
    if not scheme.is_mmse:
        raise ValueError(f"{scheme.value} is not an MMSE scheme")
    if scheme is SchemeId.MMSE_PNCI and cs is None and terms.signal_power is None:
        raise ValueError("MMSE-PNCI needs the channel state")
    p = terms.signal_power if terms.signal_power is not None else _target_power(scheme, cs)
    lam = terms.lambda_
    val = p * (2.0 * lam.real + 1.0) - abs(lam.conjugate() + 1.0) ** 2 * terms.second_moment
    return max(val, 0.0)


def gsnr_dest_pncf(msue_relay, h_down, variant="resolved"):
    """Predicted end-node GSNR behind a PNCF relay."""
    if msue_relay < 0:
        raise ValueError("msue must be nonnegative")
    hd2 = abs(h_down) ** 2
    if variant == "paper_printed":
        b2 = 4.0 / (2.0 + msue_relay)
        return 2.0 * b2 * hd2 / (b2 * hd2 * msue_relay + 1.0)
    b2 = 2.0 / (2.0 + msue_relay)
    return 2.0 * b2 * hd2 / (b2 * hd2 * msue_relay + 2.0)


def gsnr_dest_pnci(msue_relay, h_down, h_partner_up, cs, variant="resolved"):
    """Predicted end-node GSNR behind a PNCI relay."""
    if msue_relay < 0:
        raise ValueError("msue must be nonnegative")
    hd2 = abs(h_down) ** 2
    hp2 = abs(h_partner_up) ** 2
    if variant == "paper_printed":
        b2 = 4.0 / (cs.uplink_power + msue_relay)
        return b2 * hd2 * hp2 / (b2 * hd2 * msue_relay + 1.0)
    b2 = 2.0 / (cs.uplink_power + msue_relay)
    return 2.0 * b2 * hd2 * hp2 / (b2 * hd2 * msue_relay + 2.0)


def relay_gsnr(msue_relay, scheme, cs):
    scheme = SchemeId.parse(scheme)
    if msue_relay < 0:
        raise ValueError("msue must be nonnegative")
    if msue_relay == 0:
        return INF
    return _target_power(scheme, cs) / msue_relay
