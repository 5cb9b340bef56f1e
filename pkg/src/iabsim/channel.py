"""Physical-layer model for the mmWave backhaul links.

Covers planar-array steering vectors, two-level beam codebooks with a
hierarchical (sector sweep + refinement) search, 3GPP TR 38.901 UMi street
canyon pathloss with optional log-normal shadowing, SINR with explicit
interferer superposition, the SINR-to-rate map, and a two-state Markov
blockage process over the candidate edges.

Conventions: azimuth is measured in the horizontal plane, elevation is the
polar angle from the vertical axis (pi/2 = horizontal link). Element spacing
is in wavelengths, so the steering phase is 2*pi*d*(i_h*sin(az)*sin(el) +
i_v*cos(el)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AntennaArray",
    "Sector",
    "BeamVector",
    "Codebook",
    "LinkGeometry",
    "SinrSample",
    "MarkovBlockage",
    "steering_vector",
    "beam_gain",
    "build_codebook",
    "hierarchical_beam_search",
    "pathloss",
    "los_probability",
    "sinr",
    "link_rate",
    "thermal_noise_mw",
    "received_power_mw",
]


@dataclass(frozen=True)
class AntennaArray:
    """Uniform planar array: n_h x n_v elements, spacing in wavelengths."""

    n_h: int
    n_v: int
    spacing: float = 0.5
    gain_db: float = 0.0

    def __post_init__(self):
        if self.n_h < 1 or self.n_v < 1:
            raise ValueError("antenna array needs at least one element per axis")
        if self.spacing <= 0:
            raise ValueError("element spacing must be positive")

    @property
    def size(self):
        return self.n_h * self.n_v


@dataclass(frozen=True)
class Sector:
    """Angular span scanned by a codebook, [az_lo, az_hi] x [el_lo, el_hi]."""

    az_lo: float
    az_hi: float
    el_lo: float
    el_hi: float


@dataclass(frozen=True)
class BeamVector:
    weights: np.ndarray
    direction: tuple  # (azimuth, elevation)


@dataclass
class Codebook:
    level: str  # "wide" | "narrow"
    beams: list
    sector: Sector
    n_az: int
    n_el: int

    def cell_of(self, direction):
        """Grid cell (i_az, i_el) that contains a direction."""
        az, el = direction
        return (
            _grid_index(az, self.sector.az_lo, self.sector.az_hi, self.n_az),
            _grid_index(el, self.sector.el_lo, self.sector.el_hi, self.n_el),
        )


@dataclass(frozen=True)
class LinkGeometry:
    """Departure direction at the transmitter and arrival direction at the
    receiver for one directed link."""

    az_tx: float
    el_tx: float
    az_rx: float
    el_rx: float


@dataclass(frozen=True)
class SinrSample:
    signal_mw: float
    interference_mw: float
    noise_mw: float
    value: float


def _grid_index(x, lo, hi, n):
    if n <= 1 or hi <= lo:
        return 0
    step = (hi - lo) / n
    return min(max(int((x - lo) / step), 0), n - 1)


def steering_vector(array, azimuth, elevation):
    """Steering vector of the planar array toward (azimuth, elevation);
    unit-modulus entries, length n_h * n_v, horizontal index major."""
    i_h = np.arange(array.n_h)
    i_v = np.arange(array.n_v)
    phase = (
        2.0
        * math.pi
        * array.spacing
        * (
            i_h[:, None] * (math.sin(azimuth) * math.sin(elevation))
            + i_v[None, :] * math.cos(elevation)
        )
    )
    return np.exp(1j * phase).reshape(-1)


def beam_gain(weights, steering):
    """Beamforming gain |w^H a|^2 of a unit-norm beam toward a direction."""
    return float(abs(np.vdot(weights, steering)) ** 2)


def build_codebook(array, sector, n_az, n_el, level="narrow", subarray=None):
    """Codebook of normalised steering vectors on the regular cell-centre grid
    of the sector.

    `subarray=(m_h, m_v)` activates only a corner block of elements (zero
    weights elsewhere), which physically broadens the beams; sector-sweep
    codebooks use this so that each wide beam actually covers its grid cell.
    """
    if n_az * n_el < 1:
        raise ValueError("codebook needs at least one beam")
    m_h, m_v = subarray if subarray is not None else (array.n_h, array.n_v)
    m_h, m_v = min(m_h, array.n_h), min(m_v, array.n_v)
    mask = np.zeros((array.n_h, array.n_v))
    mask[:m_h, :m_v] = 1.0
    mask = mask.reshape(-1)
    scale = 1.0 / math.sqrt(m_h * m_v)
    az_span = sector.az_hi - sector.az_lo
    el_span = sector.el_hi - sector.el_lo
    beams = []
    for i_az in range(n_az):
        az = sector.az_lo + (i_az + 0.5) * az_span / n_az
        for i_el in range(n_el):
            el = sector.el_lo + (i_el + 0.5) * el_span / n_el
            weights = scale * mask * steering_vector(array, az, el)
            beams.append(BeamVector(weights, (az, el)))
    return Codebook(level=level, beams=beams, sector=sector, n_az=n_az, n_el=n_el)


def hierarchical_beam_search(tx_array, rx_array, geometry, wide_tx, narrow_tx, wide_rx, narrow_rx):
    """Two-stage beam selection for one link.

    Stage 1 exhaustively scores every wide tx/rx beam pair against the true
    geometric directions; stage 2 widens the candidate pool with the narrow
    beams that fall inside each winner's wide cell, keeping the stage-1 winner
    itself, so refinement can only improve. Returns (tx beam, rx beam,
    combined gain).
    """
    a_tx = steering_vector(tx_array, geometry.az_tx, geometry.el_tx)
    a_rx = steering_vector(rx_array, geometry.az_rx, geometry.el_rx)

    def side_winner(wide, narrow, a):
        gains = [beam_gain(b.weights, a) for b in wide.beams]
        i_best = int(np.argmax(gains))
        sector_cell = wide.cell_of(wide.beams[i_best].direction)
        best_beam, best_gain = wide.beams[i_best], gains[i_best]
        for beam in narrow.beams:
            if wide.cell_of(beam.direction) != sector_cell:
                continue
            g = beam_gain(beam.weights, a)
            if g > best_gain:
                best_beam, best_gain = beam, g
        return best_beam, best_gain

    # per-side sweeps realise the exhaustive pair search: the pair score
    # factors into independent tx and rx gains
    tx_beam, tx_gain = side_winner(wide_tx, narrow_tx, a_tx)
    rx_beam, rx_gain = side_winner(wide_rx, narrow_rx, a_rx)
    return tx_beam, rx_beam, tx_gain * rx_gain


def panel_local_azimuth(azimuth, n_panels=3):
    """Azimuth relative to the boresight of the nearest of `n_panels` equally
    spaced panels; the result lies in [-pi/n_panels, pi/n_panels].

    A single planar panel cannot disambiguate az from pi - az (the steering
    phase depends on sin az), so full-circle coverage is modelled as panels
    each scanning a limited sector in their own frame.
    """
    return math.remainder(azimuth, 2.0 * math.pi / n_panels)


def pathloss(distance_3d, fc_ghz, los, shadowing_db=0.0):
    """TR 38.901 UMi street canyon pathloss in dB.

    NLOS takes the max of the LOS curve and the NLOS curve; shadowing is an
    additive term the caller draws per edge per coherence period.
    """
    if distance_3d <= 0:
        raise ValueError("distance must be positive")
    pl_los = 32.4 + 21.0 * math.log10(distance_3d) + 20.0 * math.log10(fc_ghz)
    if los:
        return pl_los + shadowing_db
    pl_nlos = 35.3 * math.log10(distance_3d) + 22.4 + 21.3 * math.log10(fc_ghz)
    return max(pl_los, pl_nlos) + shadowing_db


def los_probability(distance_2d):
    """UMi line-of-sight probability as a function of ground distance."""
    if distance_2d <= 18.0:
        return 1.0
    return 18.0 / distance_2d + math.exp(-distance_2d / 36.0) * (1.0 - 18.0 / distance_2d)


def sinr(signal_mw, interferers_mw, noise_mw):
    """Signal to interference-plus-noise ratio via interferer superposition."""
    if noise_mw <= 0:
        raise ValueError("noise power must be positive")
    interference = float(sum(interferers_mw))
    return SinrSample(
        signal_mw=float(signal_mw),
        interference_mw=interference,
        noise_mw=float(noise_mw),
        value=float(signal_mw) / (interference + noise_mw),
    )


def link_rate(sinr_value, bandwidth_hz, slot_duration_s, symbol_fraction=1.0):
    """Transmissible volume of one slot in bits (Shannon spectral efficiency
    over the slot's backhaul symbol share, floored to whole bits)."""
    if sinr_value < 0:
        raise ValueError("SINR must be non-negative")
    return int(bandwidth_hz * slot_duration_s * math.log2(1.0 + sinr_value) * symbol_fraction)


def thermal_noise_mw(bandwidth_hz, noise_figure_db):
    """Thermal noise power over the band (-174 dBm/Hz) plus noise figure."""
    n_dbm = -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** (n_dbm / 10.0)


def received_power_mw(tx_power_dbm, fixed_gain_db, gain_tx, gain_rx, pathloss_db):
    """Link budget: tx power and fixed antenna gain in dB, beamforming gains
    linear, pathloss in dB."""
    base = 10.0 ** ((tx_power_dbm + fixed_gain_db - pathloss_db) / 10.0)
    return base * gain_tx * gain_rx


class MarkovBlockage:
    """Independent two-state (available <-> blocked) Markov chain per edge.

    `p_block` may be a scalar or a per-edge array, so obstruction-prone links
    (e.g. NLOS) can carry a higher blocking rate than clear ones.
    """

    def __init__(self, edges, p_block, p_recover, initially_available=True):
        self._edges = list(edges)
        self._p_block = np.broadcast_to(np.asarray(p_block, dtype=float), (len(self._edges),))
        self._p_recover = float(p_recover)
        self._avail = np.full(len(self._edges), bool(initially_available))
        self._cached = None

    def step(self, rng):
        """Advance one slot; returns the set of edges available afterwards."""
        if self._edges:
            u = rng.random(len(self._edges))
            to_block = self._avail & (u < self._p_block)
            to_recover = ~self._avail & (u < self._p_recover)
            flips = to_block | to_recover
            if flips.any():
                self._avail ^= flips
                self._cached = None
        return self.available_edges()

    def available_edges(self):
        if self._cached is None:
            self._cached = {e for e, ok in zip(self._edges, self._avail) if ok}
        return self._cached

    def is_available(self, edge):
        return edge in self.available_edges()
