"""Complex baseband primitives: QPSK alphabet, the XOR symbol code, Gaussian
densities and the seeded random streams every stochastic operation draws from.

Symbols are plain ``complex`` values (or ``complex128`` arrays); a QPSK symbol
is any value whose real and imaginary parts are both ``+1`` or ``-1``.
"""
import hashlib

import numpy as np

# fixed alphabet order; also the MAP tie-break order
ALPHABET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])

IDENTITY = 1 + 1j


def modulate(b_re, b_im):
    """Map bit pair(s) to QPSK, bit -> 1 - 2*bit per component."""
    b_re = np.asarray(b_re)
    b_im = np.asarray(b_im)
    if np.any((b_re != 0) & (b_re != 1)) or np.any((b_im != 0) & (b_im != 1)):
        raise ValueError("bits must be 0 or 1")
    out = (1.0 - 2.0 * b_re) + 1j * (1.0 - 2.0 * b_im)
    return complex(out) if out.ndim == 0 else out


def demodulate(s):
    """Inverse of :func:`modulate`; returns ``(b_re, b_im)``."""
    s = np.asarray(s)
    b_re = (s.real < 0).astype(np.int8)
    b_im = (s.imag < 0).astype(np.int8)
    if s.ndim == 0:
        return int(b_re), int(b_im)
    return b_re, b_im


def is_qpsk(s):
    s = np.asarray(s)
    return bool(np.all(np.isin(s.real, (-1.0, 1.0)) & np.isin(s.imag, (-1.0, 1.0))))


def xor_code(s1, s2):
    """Network-code two QPSK symbols: componentwise product of real and
    imaginary parts, i.e. GF(2) addition of the underlying bits."""
    s1 = np.asarray(s1)
    s2 = np.asarray(s2)
    out = s1.real * s2.real + 1j * (s1.imag * s2.imag)
    return complex(out) if out.ndim == 0 else out


def xor_demap(z, own):
    """Continuous XOR-demap: multiply each component of ``z`` by the matching
    component of the QPSK symbol ``own``. Self-inverse."""
    z = np.asarray(z)
    own = np.asarray(own)
    return z.real * own.real + 1j * (z.imag * own.imag)


def gaussian_pdf(mu, sigma2=1.0):
    """Circular complex Gaussian density ``exp(-|mu|^2 / 2 sigma2) / (2 pi sigma2)``."""
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2!r}")
    mu = np.asarray(mu)
    out = np.exp(-np.abs(mu) ** 2 / (2.0 * sigma2)) / (2.0 * np.pi * sigma2)
    return float(out) if out.ndim == 0 else out


def _label_key(label):
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


class RandomStream:
    """Deterministic random source addressed by ``(seed, label)``.

    Streams with distinct labels are derived through ``SeedSequence`` spawn keys
    and are independent; a stream is not safe to share between threads, so
    derive one :meth:`substream` per task instead.
    """

    def __init__(self, seed, label="root", _key=()):
        self.seed = int(seed)
        self.label = label
        self._key = tuple(_key) if _key else tuple(_label_key(label))
        ss = np.random.SeedSequence(entropy=self.seed & ((1 << 64) - 1), spawn_key=self._key)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def substream(self, label):
        return RandomStream(self.seed, f"{self.label}/{label}", self._key + tuple(_label_key(label)))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, label={self.label!r})"

    def bits(self, size):
        return self._gen.integers(0, 2, size=size, dtype=np.int8)

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)


def draw_symbols(rng, n):
    """``n`` i.i.d. uniform QPSK symbols."""
    b = rng.bits((2, n))
    return modulate(b[0], b[1])


def draw_symbol(rng):
    return complex(draw_symbols(rng, 1)[0])


def draw_noises(rng, n):
    """``n`` complex noise samples, unit variance per real dimension (E|n|^2 = 2)."""
    w = rng.normal((2, n))
    return w[0] + 1j * w[1]


def draw_noise(rng):
    return complex(draw_noises(rng, 1)[0])
