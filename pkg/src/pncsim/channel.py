"""Two-phase relay channel: uplink multiple access and downlink broadcast.

SNR convention: QPSK power 2 over noise power 2, so the per-link SNR is |h|^2.
Passing ``rng=None`` suppresses the noise (test harness affordance only).
"""
import math
from dataclasses import dataclass

import numpy as np

from .signal import draw_noises


def snr_to_coeff(snr_db, phase_rad=0.0):
    """Complex coefficient with |h| = 10^(snr_db/20) and argument ``phase_rad``."""
    mag = 10.0 ** (snr_db / 20.0)
    return complex(mag * math.cos(phase_rad), mag * math.sin(phase_rad))


def coeff_to_snr_db(h):
    return 20.0 * math.log10(abs(h))


@dataclass(frozen=True)
class ChannelState:
    h13: complex
    h23: complex
    h31: complex
    h32: complex

    def __post_init__(self):
        for name in ("h13", "h23", "h31", "h32"):
            h = complex(getattr(self, name))
            if h == 0 or not (math.isfinite(h.real) and math.isfinite(h.imag)):
                raise ValueError(f"{name} must be finite and nonzero, got {h!r}")
            object.__setattr__(self, name, h)

    @property
    def uplink_power(self):
        """Power of the PNCI target h13*x1 + h23*x2."""
        return 2.0 * (abs(self.h13) ** 2 + abs(self.h23) ** 2)


@dataclass(frozen=True)
class OperatingPoint:
    uplink_snr_db: float
    downlink_snr_db: float
    phase13: float = 0.0
    phase23: float = 0.0
    phase31: float = 0.0
    phase32: float = 0.0
    symmetric: bool = True

    def channel_state(self, phase23=None):
        """Realize coefficients. Symmetric points use one SNR per hop for both
        end nodes; ``phase23`` overrides the stored value (per-packet draws)."""
        p23 = self.phase23 if phase23 is None else phase23
        return ChannelState(
            h13=snr_to_coeff(self.uplink_snr_db, self.phase13),
            h23=snr_to_coeff(self.uplink_snr_db, p23),
            h31=snr_to_coeff(self.downlink_snr_db, self.phase31),
            h32=snr_to_coeff(self.downlink_snr_db, self.phase32),
        )


def uplink(x1, x2, cs, rng):
    """Relay receive sample(s) ``h13*x1 + h23*x2 + n3``."""
    x1 = np.asarray(x1)
    y = cs.h13 * x1 + cs.h23 * np.asarray(x2)
    if rng is not None:
        y = y + draw_noises(rng, x1.size).reshape(x1.shape)
    return complex(y) if np.ndim(y) == 0 else y


def downlink(x3, h, rng):
    """End-node receive sample(s) ``h*x3 + n``."""
    x3 = np.asarray(x3)
    y = h * x3
    if rng is not None:
        y = y + draw_noises(rng, x3.size).reshape(x3.shape)
    return complex(y) if np.ndim(y) == 0 else y
