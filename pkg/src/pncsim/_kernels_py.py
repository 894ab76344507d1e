"""Pure numpy relay kernels. Reference semantics for the compiled ``_ckernels``.

Each kernel takes a 1-D ``complex128`` array of relay samples and scalar uplink
coefficients and evaluates all 16 (x1, x2) hypotheses per sample, with the
largest log-likelihood factored out before exponentiation.
"""
import numpy as np

_SIGNS = np.array([1.0, -1.0])
_a, _b, _c, _d = (g.ravel() for g in np.meshgrid(_SIGNS, _SIGNS, _SIGNS, _SIGNS, indexing="ij"))
X1 = _a + 1j * _b
X2 = _c + 1j * _d
XOR = _a * _c + 1j * (_b * _d)
# alphabet index of each hypothesis' XOR symbol: (1+j, 1-j, -1+j, -1-j)
XOR_CLASS = (2 * (_a * _c < 0) + (_b * _d < 0)).astype(np.intp)
_CLASS_ONEHOT = np.eye(4)[XOR_CLASS]
_ALPHABET = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])

CHUNK = 1 << 15


def _weights(y, h13, h23):
    points = h13 * X1 + h23 * X2
    r = y[:, None] - points[None, :]
    ll = -0.5 * (r.real ** 2 + r.imag ** 2)
    ll -= ll.max(axis=1, keepdims=True)
    return np.exp(ll), points


def _chunked(fn, y, h13, h23):
    y = np.ascontiguousarray(y, dtype=np.complex128).ravel()
    out = np.empty_like(y)
    for lo in range(0, y.size, CHUNK):
        out[lo:lo + CHUNK] = fn(y[lo:lo + CHUNK], complex(h13), complex(h23))
    return out


def _map_chunk(y, h13, h23):
    w, _ = _weights(y, h13, h23)
    # argmax returns the first maximum, which is the alphabet-order tie-break
    return _ALPHABET[np.argmax(w @ _CLASS_ONEHOT, axis=1)]


def _mmse_pncf_chunk(y, h13, h23):
    w, _ = _weights(y, h13, h23)
    return (w @ XOR) / w.sum(axis=1)


def _mmse_pnci_chunk(y, h13, h23):
    w, points = _weights(y, h13, h23)
    return (w @ points) / w.sum(axis=1)


def map_pncf(y, h13, h23):
    return _chunked(_map_chunk, y, h13, h23)


def mmse_pncf(y, h13, h23):
    return _chunked(_mmse_pncf_chunk, y, h13, h23)


def mmse_pnci(y, h13, h23):
    return _chunked(_mmse_pnci_chunk, y, h13, h23)
