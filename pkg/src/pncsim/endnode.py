"""Destination processing with self-information.

All functions are vectorized: ``y`` and ``own_symbol`` may be arrays, and the
coefficients in :class:`SelfInfo` may be scalars or per-sample arrays.
"""
from dataclasses import dataclass

import numpy as np

from .signal import demodulate, xor_code, xor_demap


@dataclass
class SelfInfo:
    own_symbol: object
    h_down: object
    h_self_up: object
    h_partner_up: object
    relay_gain: object


@dataclass
class DetectionResult:
    partner_symbol: object
    processed_sample: object


def _sign(u):
    # sign(0) = +1 so exact ties resolve to the first alphabet entry
    return np.where(u >= 0, 1.0, -1.0)


def _hard_qpsk(z):
    z = np.asarray(z)
    return _sign(z.real) + 1j * _sign(z.imag)


def _out(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


def detect_partner_pncf(y, info):
    """Coherent detection of the relayed XOR symbol, then XOR with the own symbol.

    The processed sample is the coherent sample scaled back to unit target gain
    and XOR-demapped, so the partner symbol appears linearly in it.
    """
    h = np.asarray(info.h_down)
    z = np.asarray(y) * np.conj(h)
    xor_hat = _hard_qpsk(z)
    partner = xor_code(xor_hat, info.own_symbol)
    scaled = z / (np.abs(h) ** 2 * np.asarray(info.relay_gain))
    processed = xor_demap(scaled, info.own_symbol)
    return DetectionResult(_out(partner), _out(processed))


def detect_partner_pnci(y, info):
    """Subtract the own contribution, then minimum-distance detect the partner."""
    h = np.asarray(info.h_down) * np.asarray(info.relay_gain)
    z = np.asarray(y) - h * np.asarray(info.h_self_up) * np.asarray(info.own_symbol)
    # nearest point of k*{+-1+-j} is k times the nearest QPSK point to z/k
    partner = _hard_qpsk(z / (h * np.asarray(info.h_partner_up)))
    return DetectionResult(_out(partner), _out(z))


def count_bit_errors(estimates, truth):
    """Return ``(bit_errors, bits)`` between two QPSK symbol sequences."""
    est = np.atleast_1d(np.asarray(estimates))
    ref = np.atleast_1d(np.asarray(truth))
    if est.shape != ref.shape:
        raise ValueError(f"length mismatch: {est.shape} vs {ref.shape}")
    er, ei = demodulate(est)
    rr, ri = demodulate(ref)
    errors = int(np.count_nonzero(er != rr) + np.count_nonzero(ei != ri))
    return errors, 2 * est.size
