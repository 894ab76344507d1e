"""PNC relay mappings.

Four schemes turn the superimposed uplink sample ``y3`` into the relayed value:

* ``MAP_PNCF``    - MAP decision on the XOR symbol x1 (+) x2
* ``MMSE_PNCF``   - posterior mean of x1 (+) x2
* ``LINEAR_PNCI`` - scaled y3 (amplify-and-forward / ANC)
* ``MMSE_PNCI``   - posterior mean of h13*x1 + h23*x2

The general (unsynchronized) kernels live in :mod:`pncsim.kernels`; the
``*_sync`` functions are the closed forms for h13 = h23 = h0 real, kept as
independent cross-checks.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .signal import gaussian_pdf


class SchemeId(enum.Enum):
    MAP_PNCF = "map-pncf"
    MMSE_PNCF = "mmse-pncf"
    LINEAR_PNCI = "linear-pnci"
    MMSE_PNCI = "mmse-pnci"

    @property
    def is_pncf(self):
        return self in (SchemeId.MAP_PNCF, SchemeId.MMSE_PNCF)

    @property
    def is_mmse(self):
        return self in (SchemeId.MMSE_PNCF, SchemeId.MMSE_PNCI)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for s in cls:
            if s.value == key:
                return s
        raise ValueError(f"unknown scheme {value!r}; expected one of {[s.value for s in cls]}")


@dataclass
class RelayOutput:
    """A relayed packet.

    ``norm_gain`` is the scale applied to the raw estimates. ``signal_gain`` is
    the coefficient of the network-coded target inside the transmitted packet
    (x3 ~ signal_gain * (target + uncorrelated error)); end nodes use it to
    cancel self-information.
    """
    symbols: np.ndarray
    norm_gain: float
    scheme: SchemeId
    signal_gain: float


def _as_array(y3):
    y = np.asarray(y3, dtype=np.complex128)
    return y, y.ndim == 0


def _scalar_or_array(out, scalar):
    return complex(out[0]) if scalar else out


def pair_likelihood(y3, h13, h23, a, b, c, d):
    """Likelihood of y3 under x1 = a + jb, x2 = c + jd."""
    for s in (a, b, c, d):
        if s not in (1, -1):
            raise ValueError("hypothesis signs must be +1 or -1")
    return gaussian_pdf(np.asarray(y3) - h13 * (a + 1j * b) - h23 * (c + 1j * d), 1.0)


def map_pncf(y3, h13, h23):
    y, scalar = _as_array(y3)
    return _scalar_or_array(kernels.map_pncf(y.ravel(), h13, h23).reshape(y.shape or (1,)), scalar)


def mmse_pncf_posterior_mean(y3, h13, h23):
    """E{x1 (+) x2 | y3} under uniform priors; each component in [-1, 1]."""
    y, scalar = _as_array(y3)
    return _scalar_or_array(kernels.mmse_pncf(y.ravel(), h13, h23).reshape(y.shape or (1,)), scalar)


def mmse_pnci_posterior_mean(y3, h13, h23):
    """E{h13 x1 + h23 x2 | y3} under uniform priors."""
    y, scalar = _as_array(y3)
    return _scalar_or_array(kernels.mmse_pnci(y.ravel(), h13, h23).reshape(y.shape or (1,)), scalar)


def linear_pnci_gain(h13, h23, noise_convention="resolved"):
    """Closed-form power scaling of the linear scheme.

    ``"resolved"`` uses the noise power 2 of the unit-variance-per-dimension
    convention; ``"paper_printed"`` keeps the printed ``+1``.
    """
    noise = {"resolved": 2.0, "paper_printed": 1.0}[noise_convention]
    return math.sqrt(2.0 / (2.0 * (abs(h13) ** 2 + abs(h23) ** 2) + noise))


def linear_pnci(y3, h13, h23, noise_convention="resolved"):
    out = linear_pnci_gain(h13, h23, noise_convention) * np.asarray(y3, dtype=np.complex128)
    return complex(out) if out.ndim == 0 else out


# Closed forms for h13 = h23 = h0 real. Each works per real component.

def _log_phi1(u):
    # log of the 1-D argument form exp(-u^2/2)/(2 pi)
    return -0.5 * u * u - math.log(2.0 * math.pi)


def _map_sync_component(u, h0, flip=False):
    # sign(phi(u-2h0) + phi(u+2h0) - 2 phi(u)), compared in the log domain
    lhs = np.logaddexp(_log_phi1(u - 2 * h0), _log_phi1(u + 2 * h0))
    rhs = math.log(2.0) + _log_phi1(u)
    diff = rhs - lhs if flip else lhs - rhs
    return np.where(diff >= 0, 1.0, -1.0)


def map_pncf_sync(y3, h0, _flip_threshold=False):
    """Per-component threshold rule for phase-synchronized equal-gain uplinks.

    ``_flip_threshold`` inverts the decision; it exists only for mutation checks.
    """
    y = np.asarray(y3, dtype=np.complex128)
    out = _map_sync_component(y.real, h0, _flip_threshold) + 1j * _map_sync_component(y.imag, h0, _flip_threshold)
    return complex(out) if out.ndim == 0 else out


def _logcosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _mmse_sync_component(u, h0):
    # (cosh(2 h0 u) - e^{2 h0^2}) / (cosh(2 h0 u) + e^{2 h0^2}) / 2, as a tanh of a log ratio
    return 0.5 * np.tanh(0.5 * (_logcosh(2.0 * h0 * u) - 2.0 * h0 * h0))


def mmse_pncf_sync(y3, h0):
    """Synchronized MMSE-PNCF closed form; half the posterior mean."""
    y = np.asarray(y3, dtype=np.complex128)
    out = _mmse_sync_component(y.real, h0) + 1j * _mmse_sync_component(y.imag, h0)
    return complex(out) if out.ndim == 0 else out


_SUM_LEVELS = np.array([1.0, 0.0, -1.0])
# a + c = 0 is reached by two sign pairs, +-2 by one each
_SUM_MULT = np.array([1.0, 2.0, 1.0])


def _pnci_sync_component(u, h0):
    u = np.asarray(u, dtype=float)[..., None]
    ll = -0.5 * (u - 2.0 * _SUM_LEVELS * h0) ** 2 + np.log(_SUM_MULT)
    ll -= ll.max(axis=-1, keepdims=True)
    w = np.exp(ll)
    return (w @ _SUM_LEVELS) / w.sum(axis=-1)


def mmse_pnci_sync(y3, h0):
    """Synchronized MMSE-PNCI form over the 3x3 grid of per-component sums.

    Returns ``2 * E[(a + jb) | y3]`` with a, b in {1, 0, -1}, i.e. the posterior
    mean of h0(x1 + x2) divided by h0.
    """
    y = np.asarray(y3, dtype=np.complex128)
    out = 2.0 * (_pnci_sync_component(y.real, h0) + 1j * _pnci_sync_component(y.imag, h0))
    return complex(out) if out.ndim == 0 else out


def normalize_packet(raw):
    """Scale a packet to mean power 2. Returns ``(scaled, gain)``."""
    raw = np.asarray(raw, dtype=np.complex128)
    if raw.size == 0:
        raise ValueError("cannot normalize an empty packet")
    power = float(np.mean(raw.real ** 2 + raw.imag ** 2))
    if power == 0.0:
        raise ValueError("cannot normalize an all-zero packet")
    g = math.sqrt(2.0 / power)
    return raw * g, g


def relay_map(scheme, packet_y3, cs):
    """Map one received packet to the relayed packet for ``scheme``."""
    scheme = SchemeId.parse(scheme)
    y = np.asarray(packet_y3, dtype=np.complex128).ravel()
    if y.size == 0:
        raise ValueError("empty packet")
    if scheme is SchemeId.MAP_PNCF:
        return RelayOutput(kernels.map_pncf(y, cs.h13, cs.h23), 1.0, scheme, 1.0)
    if scheme is SchemeId.LINEAR_PNCI:
        scaled, g = normalize_packet(y)
        return RelayOutput(scaled, g, scheme, g)
    if scheme is SchemeId.MMSE_PNCF:
        raw = kernels.mmse_pncf(y, cs.h13, cs.h23)
        target_power = 2.0
    else:
        raw = kernels.mmse_pnci(y, cs.h13, cs.h23)
        target_power = cs.uplink_power
    scaled, g = normalize_packet(raw)
    # a conditional mean satisfies E[target* est] = E|est|^2, so the target
    # gain inside the estimate is E|est|^2 / E|target|^2
    bias = 2.0 / (g * g) / target_power
    return RelayOutput(scaled, g, scheme, g * bias)
