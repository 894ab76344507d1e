"""Experiment runner: operating-point simulation, sweeps, presets and CSV output."""
import csv
import io
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import metrics
from .channel import ChannelState, OperatingPoint, downlink, snr_to_coeff, uplink
from .endnode import SelfInfo, count_bit_errors, detect_partner_pncf, detect_partner_pnci
from .relay import SchemeId, relay_map
from .signal import RandomStream, draw_symbols, xor_code

log = logging.getLogger(__name__)

DEFAULT_PACKET_SYMBOLS = 4096
DEFAULT_PACKETS = 256
SWEEP_GRID = tuple(float(v) for v in range(-5, 16, 2))


class PointError(RuntimeError):
    """A point produced a non-finite or undefined metric."""


@dataclass
class ExperimentSpec:
    schemes: tuple = tuple(SchemeId)
    uplink_snr_db: tuple = (5.0,)
    downlink_snr_db: tuple = (5.0,)
    # None = relative uplink phase drawn uniformly per packet
    phase13: float | None = None
    phase23: float | None = None
    packet_symbols: int = DEFAULT_PACKET_SYMBOLS
    packets: int = DEFAULT_PACKETS
    master_seed: int = 0
    noise_convention: str = "resolved"

    def __post_init__(self):
        self.schemes = tuple(SchemeId.parse(s) for s in self.schemes)
        self.uplink_snr_db = tuple(float(v) for v in self.uplink_snr_db)
        self.downlink_snr_db = tuple(float(v) for v in self.downlink_snr_db)
        if not self.schemes or not self.uplink_snr_db or not self.downlink_snr_db:
            raise ValueError("schemes and SNR lists must be nonempty")
        if self.packet_symbols < 256:
            raise ValueError("packet_symbols must be at least 256")
        if self.packets < 1:
            raise ValueError("packets must be positive")
        if (self.phase13 is None) != (self.phase23 is None):
            raise ValueError("give both uplink phases or neither")
        if self.noise_convention not in ("resolved", "paper_printed"):
            raise ValueError(f"unknown noise convention {self.noise_convention!r}")

    @property
    def synchronized(self):
        return self.phase13 == 0.0 and self.phase23 == 0.0


def preset(name, sync=False, seed=0, packet_symbols=DEFAULT_PACKET_SYMBOLS, packets=DEFAULT_PACKETS):
    """Figure presets: fig2/fig3 sweep the uplink at 5 dB downlink, fig4 the reverse."""
    if name in ("fig2", "fig3"):
        up, down = SWEEP_GRID, (5.0,)
    elif name == "fig4":
        up, down = (5.0,), SWEEP_GRID
    else:
        raise ValueError(f"unknown preset {name!r}")
    phase = 0.0 if sync else None
    return ExperimentSpec(uplink_snr_db=up, downlink_snr_db=down, phase13=phase, phase23=phase,
                          packet_symbols=packet_symbols, packets=packets, master_seed=seed)


@dataclass
class ResultRow:
    scheme: str
    uplink_snr_db: float
    downlink_snr_db: float
    phase13_rad: float | None
    phase23_rad: float | None
    msue_relay: float | None = None
    msue_relay_closed: float | None = None
    gsnr_relay_db: float | None = None
    gsnr_n1_db: float | None = None
    gsnr_n1_predicted_db: float | None = None
    gsnr_n2_db: float | None = None
    ber_n1: float | None = None
    ber_n2: float | None = None
    eps0: float | None = None
    eps1: float | None = None
    eps2: float | None = None
    n_symbols: int = 0
    seed: int = 0


CSV_FIELDS = [f.name for f in fields(ResultRow)]


@dataclass
class PointSamples:
    """Every signal of one simulated operating point, shaped (packets, symbols)."""
    scheme: SchemeId
    point: OperatingPoint
    random_phase: bool
    x1: np.ndarray
    x2: np.ndarray
    h13: np.ndarray
    h23: np.ndarray
    y3: np.ndarray
    x3: np.ndarray
    raw: np.ndarray
    norm_gain: np.ndarray
    signal_gain: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    partner_n1: np.ndarray = field(default=None)
    processed_n1: np.ndarray = field(default=None)
    partner_n2: np.ndarray = field(default=None)
    processed_n2: np.ndarray = field(default=None)

    @property
    def n_symbols(self):
        return self.x1.size

    @property
    def relay_target(self):
        if self.scheme.is_pncf:
            return xor_code(self.x1, self.x2)
        return self.h13[:, None] * self.x1 + self.h23[:, None] * self.x2

    def channel_state(self, packet=0):
        return ChannelState(self.h13[packet], self.h23[packet],
                            snr_to_coeff(self.point.downlink_snr_db, self.point.phase31),
                            snr_to_coeff(self.point.downlink_snr_db, self.point.phase32))


def _fmt_phase(p):
    return "random" if p is None else repr(float(p))


def uplink_label(uplink_db, phase13, phase23):
    return f"uplink|{float(uplink_db)!r}|{_fmt_phase(phase13)}|{_fmt_phase(phase23)}"


def simulate_point(scheme, uplink_db, downlink_db, phase13=None, phase23=None, *,
                   packet_symbols=DEFAULT_PACKET_SYMBOLS, packets=DEFAULT_PACKETS, seed=0,
                   noiseless=False):
    """Simulate one operating point end to end.

    Sources and uplink noise come from a substream keyed only by the uplink
    parameters and downlink noise from one keyed by both hops, so every scheme
    (and every preset) sees the same realizations at the same point.
    """
    scheme = SchemeId.parse(scheme)
    random_phase = phase13 is None
    point = OperatingPoint(uplink_db, downlink_db, 0.0 if random_phase else phase13,
                           0.0 if random_phase else phase23)
    root = RandomStream(seed, "pncsim")
    up = root.substream(uplink_label(uplink_db, phase13, phase23))
    down = root.substream(f"downlink|{float(downlink_db)!r}|" + uplink_label(uplink_db, phase13, phase23))
    shape = (packets, packet_symbols)
    n = packets * packet_symbols

    x1 = draw_symbols(up.substream("x1"), n).reshape(shape)
    x2 = draw_symbols(up.substream("x2"), n).reshape(shape)
    if random_phase:
        p23 = up.substream("phase").uniform(0.0, 2.0 * math.pi, packets)
    else:
        p23 = np.full(packets, float(phase23))
    states = [point.channel_state(phase23=p) for p in p23]
    h13 = np.array([cs.h13 for cs in states])
    h23 = np.array([cs.h23 for cs in states])
    noise_up = None if noiseless else up.substream("n3")

    y3 = np.empty(shape, dtype=np.complex128)
    x3 = np.empty(shape, dtype=np.complex128)
    norm_gain = np.empty(packets)
    signal_gain = np.empty(packets)
    for p, cs in enumerate(states):
        y3[p] = uplink(x1[p], x2[p], cs, noise_up)
        out = relay_map(scheme, y3[p], cs)
        x3[p] = out.symbols
        norm_gain[p] = out.norm_gain
        signal_gain[p] = out.signal_gain
    raw = x3 / norm_gain[:, None]

    h31, h32 = states[0].h31, states[0].h32
    y1 = downlink(x3, h31, None if noiseless else down.substream("n1"))
    y2 = downlink(x3, h32, None if noiseless else down.substream("n2"))

    s = PointSamples(scheme, point, random_phase, x1, x2, h13, h23, y3, x3, raw,
                     norm_gain, signal_gain, y1, y2)
    detect = detect_partner_pncf if scheme.is_pncf else detect_partner_pnci
    g = signal_gain[:, None]
    r1 = detect(y1, SelfInfo(x1, h31, h13[:, None], h23[:, None], g))
    r2 = detect(y2, SelfInfo(x2, h32, h23[:, None], h13[:, None], g))
    s.partner_n1, s.processed_n1 = r1.partner_symbol, r1.processed_sample
    s.partner_n2, s.processed_n2 = r2.partner_symbol, r2.processed_sample
    return s


def point_metrics(s, noise_convention="resolved"):
    """Metrics of simulated samples, as a partially filled :class:`ResultRow`."""
    scheme = s.scheme
    cs = s.channel_state()
    target = s.relay_target
    relay = metrics.decompose_packets(target, s.x3)
    eps = None
    if scheme is SchemeId.MAP_PNCF:
        eps = metrics.classify_errors(s.x3, target)
        closed = float(np.mean([metrics.msue_map_closed(metrics.classify_errors(e, t))
                                for e, t in zip(s.x3, target)]))
    elif scheme is SchemeId.LINEAR_PNCI:
        closed = metrics.msue_linear_pnci()
    else:
        closed = float(np.mean([metrics.msue_mmse_closed(metrics.mmse_terms(t, r), scheme, cs)
                                for t, r in zip(target, s.raw)]))

    dest1 = metrics.decompose_packets(s.x2, s.processed_n1)
    dest2 = metrics.decompose_packets(s.x1, s.processed_n2)
    if scheme.is_pncf:
        pred1 = metrics.gsnr_dest_pncf(relay.msue, cs.h31, noise_convention)
    else:
        pred1 = metrics.gsnr_dest_pnci(relay.msue, cs.h31, cs.h23, cs, noise_convention)
    e1, b1 = count_bit_errors(s.partner_n1, s.x2)
    e2, b2 = count_bit_errors(s.partner_n2, s.x1)

    row = ResultRow(
        scheme=scheme.value,
        uplink_snr_db=s.point.uplink_snr_db,
        downlink_snr_db=s.point.downlink_snr_db,
        phase13_rad=None if s.random_phase else s.point.phase13,
        phase23_rad=None if s.random_phase else s.point.phase23,
        msue_relay=relay.msue,
        msue_relay_closed=closed,
        gsnr_relay_db=metrics.to_db(metrics.relay_gsnr(relay.msue, scheme, cs)),
        gsnr_n1_db=metrics.to_db(dest1.gsnr),
        gsnr_n1_predicted_db=metrics.to_db(pred1),
        gsnr_n2_db=metrics.to_db(dest2.gsnr),
        ber_n1=e1 / b1,
        ber_n2=e2 / b2,
        eps0=eps.eps0 if eps else None,
        eps1=eps.eps1 if eps else None,
        eps2=eps.eps2 if eps else None,
        n_symbols=s.n_symbols,
    )
    for name in CSV_FIELDS:
        v = getattr(row, name)
        if isinstance(v, float) and math.isnan(v):
            raise PointError(f"{scheme.value} at ({row.uplink_snr_db}, {row.downlink_snr_db}) dB: {name} is NaN")
    return row


def run_point(scheme, uplink_db, downlink_db, phase13=None, phase23=None, *,
              packet_symbols=DEFAULT_PACKET_SYMBOLS, packets=DEFAULT_PACKETS, seed=0,
              noise_convention="resolved", noiseless=False):
    try:
        s = simulate_point(scheme, uplink_db, downlink_db, phase13, phase23,
                           packet_symbols=packet_symbols, packets=packets, seed=seed, noiseless=noiseless)
        row = point_metrics(s, noise_convention)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise PointError(f"{SchemeId.parse(scheme).value} at ({uplink_db}, {downlink_db}) dB: {exc}") from exc
    row.seed = seed
    return row


def _threads():
    raw = os.environ.get("PNCSIM_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("PNCSIM_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def sweep_points(spec):
    """Grid points in output order: (scheme name, uplink, downlink)."""
    schemes = sorted(spec.schemes, key=lambda s: s.value)
    return [(s, u, d) for s in schemes for u in sorted(spec.uplink_snr_db) for d in sorted(spec.downlink_snr_db)]


def run_sweep(spec, threads=None):
    """Run every grid point; rows come back in grid order whatever the thread count.

    A point that fails yields a row with empty metric cells and a logged error.
    """
    pts = sweep_points(spec)

    def one(p):
        scheme, u, d = p
        try:
            return run_point(scheme, u, d, spec.phase13, spec.phase23, packet_symbols=spec.packet_symbols,
                             packets=spec.packets, seed=spec.master_seed,
                             noise_convention=spec.noise_convention)
        except PointError as exc:
            log.error("point failed: %s", exc)
            return ResultRow(scheme.value, u, d, spec.phase13, spec.phase23,
                             n_symbols=spec.packet_symbols * spec.packets, seed=spec.master_seed)

    workers = threads if threads is not None else _threads()
    if workers <= 1:
        return [one(p) for p in pts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, pts))


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), ".9g")
    return str(v)


def format_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_cell(getattr(r, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def write_csv(rows, destination):
    """Write rows to a path (``"-"`` for stdout) or a text file object."""
    text = format_csv(rows)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    if str(destination) == "-":
        import sys
        sys.stdout.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_LIST_KEYS = {"schemes", "uplink_snr_db", "downlink_snr_db"}
_INT_KEYS = {"packet_symbols", "packets", "master_seed"}
_FLOAT_KEYS = {"phase13", "phase23"}


def parse_config(text):
    """Flat ``key = value`` config; lists comma-separated, ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _LIST_KEYS:
            items = [v.strip() for v in value.split(",") if v.strip()]
            out[key] = tuple(items) if key == "schemes" else tuple(float(v) for v in items)
        elif key in _INT_KEYS:
            out[key] = int(value)
        elif key in _FLOAT_KEYS:
            out[key] = None if value.lower() in ("random", "none", "") else float(value)
        elif key == "noise_convention":
            out[key] = value
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    return out


def spec_with(spec, **overrides):
    return replace(spec, **{k: v for k, v in overrides.items() if v is not None})
