import math

import numpy as np
import pytest

from pncsim.endnode import SelfInfo, count_bit_errors, detect_partner_pncf, detect_partner_pnci
from pncsim.signal import RandomStream, draw_symbols, xor_code


def test_pncf_noiseless_recovers_partner():
    rng = RandomStream(0, "pncf")
    x1, x2 = draw_symbols(rng, 256), draw_symbols(rng, 256)
    h = 0.8 * np.exp(0.9j)
    y = h * xor_code(x1, x2)
    res = detect_partner_pncf(y, SelfInfo(x1, h, None, None, 1.0))
    np.testing.assert_array_equal(res.partner_symbol, x2)
    np.testing.assert_allclose(res.processed_sample, x2)


def test_pnci_noiseless_recovers_partner():
    rng = RandomStream(0, "pnci")
    x1, x2 = draw_symbols(rng, 256), draw_symbols(rng, 256)
    h13, h23, h31, g = 1.2, 0.7 * np.exp(2.1j), 0.5 * np.exp(-0.4j), 0.6
    y = h31 * g * (h13 * x1 + h23 * x2)
    res = detect_partner_pnci(y, SelfInfo(x1, h31, h13, h23, g))
    np.testing.assert_array_equal(res.partner_symbol, x2)
    np.testing.assert_allclose(res.processed_sample, h31 * g * h23 * x2)


def test_scalar_inputs():
    res = detect_partner_pncf(0.3 - 2j, SelfInfo(-1 + 1j, 1.0, None, None, 1.0))
    assert res.partner_symbol == -1 - 1j
    assert isinstance(res.processed_sample, complex)


@pytest.mark.parametrize("theta", [0.3, 1.7, -2.9])
def test_detection_invariant_to_downlink_phase(theta):
    rng = RandomStream(1, "phase")
    x1, x2 = draw_symbols(rng, 2000), draw_symbols(rng, 2000)
    n = rng.normal(2000) + 1j * rng.normal(2000)
    x3 = xor_code(x1, x2)
    a = detect_partner_pncf(x3 + n, SelfInfo(x1, 1.0, None, None, 1.0))
    rot = np.exp(1j * theta)
    b = detect_partner_pncf(rot * x3 + rot * n, SelfInfo(x1, rot, None, None, 1.0))
    np.testing.assert_array_equal(a.partner_symbol, b.partner_symbol)


def test_count_bit_errors():
    assert count_bit_errors([1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]) == (2, 4)
    assert count_bit_errors([1 - 1j], [1 + 1j]) == (1, 2)
    assert count_bit_errors(np.array([1 + 1j] * 5), np.array([1 + 1j] * 5)) == (0, 10)
    with pytest.raises(ValueError):
        count_bit_errors([1 + 1j], [1 + 1j, 1 + 1j])


def test_pncf_ber_matches_qpsk_theory():
    # unit-gain relay, downlink SNR 5 dB: per-bit error Q(h) with unit noise per dimension
    rng = RandomStream(2, "ber")
    n = 400_000
    x1, x2 = draw_symbols(rng, n), draw_symbols(rng, n)
    h = 10 ** 0.25
    y = h * xor_code(x1, x2) + rng.normal(n) + 1j * rng.normal(n)
    res = detect_partner_pncf(y, SelfInfo(x1, h, None, None, 1.0))
    errs, bits = count_bit_errors(res.partner_symbol, x2)
    q = 0.5 * math.erfc(h / math.sqrt(2))
    assert errs / bits == pytest.approx(q, rel=0.03)
