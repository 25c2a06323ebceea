"""Link classification, path-loss models, shadowing, and link gains.

Outdoor links use the street-canyon LOS curves (lower/median/upper bound
around a breakpoint distance) and the over-rooftop NLOS composition of free
space, rooftop-to-street diffraction, and multi-screen diffraction.  Indoor
links use a multi-wall-and-floor loss whose per-obstacle increments shrink
geometrically.  Mixed links cascade the two with a fixed building entry loss
per envelope crossing.  Shadowing is one log-normal draw per undirected node
pair, derived by hashing (seed, link ids) so draws never depend on evaluation
order or on unrelated populations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.special import ndtri

from .geometry import Topology, count_separations, _clip_segment_to_box, _building_box
from .model import PropagationParams

SPEED_OF_LIGHT = 299792458.0


class LinkClass(Enum):
    INDOOR_SAME_BUILDING = "indoor-same-building"
    INDOOR_INTER_BUILDING = "indoor-inter-building"
    OUTDOOR_LOS = "outdoor-los"
    OUTDOOR_NLOS = "outdoor-nlos"
    INDOOR_TO_OUTDOOR = "indoor-to-outdoor"

    @property
    def is_indoor_indoor(self) -> bool:
        return self in (LinkClass.INDOOR_SAME_BUILDING,
                        LinkClass.INDOOR_INTER_BUILDING)


def _segment_crosses_footprint_2d(p, q, building) -> bool:
    x0, y0, x1, y1 = building.footprint()
    box = (x0, y0, -1.0, x1, y1, 1.0)
    clip = _clip_segment_to_box((p[0], p[1], 0.0), (q[0], q[1], 0.0), box)
    return clip is not None and clip[1] > clip[0]


def classify_link(topology: Topology, tx_pos, rx_pos) -> LinkClass:
    """Pure geometric classification of one TX-RX pair."""
    bt = topology.locate_building(tx_pos)
    br = topology.locate_building(rx_pos)
    if bt is not None and br is not None:
        if bt == br:
            return LinkClass.INDOOR_SAME_BUILDING
        return LinkClass.INDOOR_INTER_BUILDING
    if bt is None and br is None:
        for b in topology.buildings:
            if _segment_crosses_footprint_2d(tx_pos, rx_pos, b):
                return LinkClass.OUTDOOR_NLOS
        return LinkClass.OUTDOOR_LOS
    return LinkClass.INDOOR_TO_OUTDOOR


def path_loss_outdoor(d_m: float, f_hz: float, los: bool,
                      params: PropagationParams = PropagationParams(),
                      h_tx_m: float | None = None,
                      h_rx_m: float | None = None) -> float:
    """Street-canyon LOS / over-rooftop NLOS median path loss in dB."""
    if d_m <= 0.0:
        raise ValueError("distance must be positive")
    d = max(d_m, params.min_distance_m)
    if los:
        return _los_street_canyon(d, f_hz, params, h_tx_m, h_rx_m)
    return _nlos_over_rooftop(d, f_hz, params, h_rx_m)


def _los_street_canyon(d, f_hz, params, h_tx_m=None, h_rx_m=None) -> float:
    h1 = params.ap_height_m if h_tx_m is None else h_tx_m
    h2 = params.user_height_m if h_rx_m is None else h_rx_m
    h1 = max(h1, 0.5)
    h2 = max(h2, 0.5)
    lam = SPEED_OF_LIGHT / f_hz
    r_bp = 4.0 * h1 * h2 / lam
    l_bp = abs(20.0 * math.log10(lam * lam / (8.0 * math.pi * h1 * h2)))
    ratio = d / r_bp
    if params.los_variant == "lower":
        if d <= r_bp:
            return l_bp + 20.0 * math.log10(ratio)
        return l_bp + 40.0 * math.log10(ratio)
    if params.los_variant == "median":
        if d <= r_bp:
            return l_bp + 6.0 + 20.0 * math.log10(ratio)
        return l_bp + 6.0 + 40.0 * math.log10(ratio)
    # upper bound
    if d <= r_bp:
        return l_bp + 20.0 + 25.0 * math.log10(ratio)
    return l_bp + 20.0 + 40.0 * math.log10(ratio)


def _nlos_over_rooftop(d, f_hz, params, h_rx_m=None) -> float:
    """Over-rooftop composition; falls back to free space when diffraction < 0."""
    f_mhz = f_hz / 1e6
    d_km = d / 1000.0
    h_m = params.user_height_m if h_rx_m is None else h_rx_m
    h_b = params.ap_height_m
    h_r = params.rooftop_height_m
    w = params.street_width_m
    b = params.building_separation_m
    phi = params.street_orientation_deg

    l_bf = 32.4 + 20.0 * math.log10(d_km) + 20.0 * math.log10(f_mhz)

    if phi < 35.0:
        l_ori = -10.0 + 0.354 * phi
    elif phi < 55.0:
        l_ori = 2.5 + 0.075 * (phi - 35.0)
    else:
        l_ori = 4.0 - 0.114 * (phi - 55.0)
    dh_m = max(h_r - h_m, 0.5)
    l_rts = (-8.2 - 10.0 * math.log10(w) + 10.0 * math.log10(f_mhz)
             + 20.0 * math.log10(dh_m) + l_ori)

    dh_b = h_b - h_r
    if h_b > h_r:
        l_bsh = -18.0 * math.log10(1.0 + dh_b)
        k_a = 71.4 if f_mhz > 2000.0 else 54.0
        k_d = 18.0
    else:
        l_bsh = 0.0
        k_a = 54.0 - (0.8 * dh_b if d >= 500.0 else 1.6 * dh_b * d_km)
        k_d = 18.0 - 15.0 * dh_b / h_r
    k_f = -8.0 if f_mhz > 2000.0 else -4.0 + 0.7 * (f_mhz / 925.0 - 1.0)
    l_msd = (l_bsh + k_a + k_d * math.log10(d_km)
             + k_f * math.log10(f_mhz) - 9.0 * math.log10(b))

    diffraction = l_rts + l_msd
    return l_bf + diffraction if diffraction > 0.0 else l_bf


def free_space_at_1m_db(f_hz: float) -> float:
    return 20.0 * math.log10(4.0 * math.pi * f_hz / SPEED_OF_LIGHT)


def mwf_wall_sum_db(walls: int, params: PropagationParams) -> float:
    """Total wall attenuation with geometrically diminishing increments."""
    if walls <= 0:
        return 0.0
    g = params.wall_decay
    if abs(1.0 - g) < 1e-12:
        return params.wall_loss_db * walls
    return params.wall_loss_db * (1.0 - g ** walls) / (1.0 - g)


def mwf_floor_sum_db(floors: int, params: PropagationParams) -> float:
    if floors <= 0:
        return 0.0
    g = params.floor_decay
    if abs(1.0 - g) < 1e-12:
        return params.floor_loss_db * floors
    return params.floor_loss_db * (1.0 - g ** floors) / (1.0 - g)


def path_loss_mwf(d_m: float, f_hz: float, walls: int, floors: int,
                  params: PropagationParams = PropagationParams()) -> float:
    """Multi-wall-and-floor indoor path loss in dB."""
    if d_m <= 0.0:
        raise ValueError("distance must be positive")
    if walls < 0 or floors < 0:
        raise ValueError("wall/floor counts must be >= 0")
    d = max(d_m, params.min_distance_m)
    return (free_space_at_1m_db(f_hz)
            + 10.0 * params.mwf_exponent * math.log10(d)
            + mwf_wall_sum_db(walls, params)
            + mwf_floor_sum_db(floors, params))


_M64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def shadowing_db(seed: int, realization: int, uid_a: int, uid_b: int,
                 sigma_db: float) -> float:
    """Deterministic per-undirected-link log-normal shadowing draw in dB."""
    lo, hi = (uid_a, uid_b) if uid_a <= uid_b else (uid_b, uid_a)
    h = _splitmix64(seed & _M64)
    h = _splitmix64(h ^ ((realization + 0x51ED2701) & _M64))
    h = _splitmix64(h ^ ((lo * 0x100000001B3 + 0x9E37) & _M64))
    h = _splitmix64(h ^ ((hi * 0xC2B2AE3D27D4EB4F + 0x79B9) & _M64))
    u = (h + 0.5) / 2.0 ** 64
    return sigma_db * float(ndtri(u))


def _outdoor_sub_los(topology: Topology, p, q, skip_buildings: set[int]) -> bool:
    """LOS test for an outdoor sub-segment, ignoring the endpoint buildings."""
    for i, b in enumerate(topology.buildings):
        if i in skip_buildings:
            continue
        if _segment_crosses_footprint_2d(p, q, b):
            return False
    return True


def median_loss_db(topology: Topology, tx_pos, rx_pos,
                   params: PropagationParams) -> float:
    """Class-appropriate median path loss (no shadowing) for one link."""
    f = params.frequency_hz
    d_total = math.dist(tx_pos, rx_pos)
    d_total = max(d_total, params.min_distance_m)
    cls = classify_link(topology, tx_pos, rx_pos)
    sep = count_separations(topology, tx_pos, rx_pos)

    if cls is LinkClass.INDOOR_SAME_BUILDING:
        return path_loss_mwf(d_total, f, sep.walls_crossed, sep.floors_crossed,
                             params)
    if cls is LinkClass.OUTDOOR_LOS:
        return path_loss_outdoor(d_total, f, True, params,
                                 h_tx_m=tx_pos[2], h_rx_m=rx_pos[2])
    if cls is LinkClass.OUTDOOR_NLOS:
        return path_loss_outdoor(d_total, f, False, params, h_rx_m=rx_pos[2])

    bt = topology.locate_building(tx_pos)
    br = topology.locate_building(rx_pos)
    if cls is LinkClass.INDOOR_TO_OUTDOOR:
        inside_idx = bt if bt is not None else br
        indoor_pos = tx_pos if bt is not None else rx_pos
        outdoor_pos = rx_pos if bt is not None else tx_pos
        building = topology.buildings[inside_idx]
        clip = _clip_segment_to_box(indoor_pos, outdoor_pos,
                                    _building_box(building))
        t_exit = clip[1] if clip is not None else 0.0
        d_in = max(t_exit * d_total, params.min_distance_m)
        d_out = max(d_total - t_exit * d_total, params.min_distance_m)
        exit_point = tuple(indoor_pos[i] + t_exit * (outdoor_pos[i] - indoor_pos[i])
                           for i in range(3))
        los = _outdoor_sub_los(topology, exit_point, outdoor_pos, {inside_idx})
        indoor = path_loss_mwf(d_in, f, sep.walls_crossed, sep.floors_crossed,
                               params)
        outdoor = path_loss_outdoor(d_out, f, los, params,
                                    h_tx_m=max(exit_point[2], 0.5),
                                    h_rx_m=outdoor_pos[2])
        return indoor + outdoor + params.entry_loss_db

    # indoor endpoints in two different buildings: wall/floor terms at both
    # ends, a LOS street segment in between, and two envelope crossings
    ba = topology.buildings[bt]
    bb = topology.buildings[br]
    clip_a = _clip_segment_to_box(tx_pos, rx_pos, _building_box(ba))
    clip_b = _clip_segment_to_box(tx_pos, rx_pos, _building_box(bb))
    ta = clip_a[1] if clip_a is not None else 0.0
    tb = clip_b[0] if clip_b is not None else 1.0
    d_in_a = max(ta * d_total, params.min_distance_m)
    d_in_b = max((1.0 - tb) * d_total, params.min_distance_m)
    d_out = max((tb - ta) * d_total, params.min_distance_m)
    walls_a, floors_a, _ = count_separations(
        Topology(topology.scenario, [ba]), tx_pos, rx_pos)
    walls_b, floors_b, _ = count_separations(
        Topology(topology.scenario, [bb]), tx_pos, rx_pos)
    return (path_loss_mwf(d_in_a, f, walls_a, floors_a, params)
            + path_loss_outdoor(d_out, f, True, params)
            + path_loss_mwf(d_in_b, f, walls_b, floors_b, params)
            + 2.0 * params.entry_loss_db)


def link_sigma_db(cls: LinkClass, params: PropagationParams) -> float:
    return (params.shadowing_indoor_db if cls.is_indoor_indoor
            else params.shadowing_other_db)


def link_loss_db(topology: Topology, tx_pos, rx_pos, uid_a: int, uid_b: int,
                 params: PropagationParams, base_seed: int,
                 realization: int) -> float:
    """Median loss plus the per-link shadowing draw, clamped non-negative."""
    cls = classify_link(topology, tx_pos, rx_pos)
    loss = median_loss_db(topology, tx_pos, rx_pos, params)
    loss += shadowing_db(base_seed, realization, uid_a, uid_b,
                         link_sigma_db(cls, params))
    return max(loss, 0.0)


def link_gain(topology: Topology, tx_pos, rx_pos, uid_a: int, uid_b: int,
              params: PropagationParams, base_seed: int,
              realization: int) -> float:
    """Linear power gain in (0, 1] for one link."""
    return 10.0 ** (-link_loss_db(topology, tx_pos, rx_pos, uid_a, uid_b,
                                  params, base_seed, realization) / 10.0)


class GainTable:
    """Lazy per-realization cache of link gains, keyed by node uid pair."""

    def __init__(self, topology: Topology, params: PropagationParams,
                 base_seed: int, realization: int):
        self.topology = topology
        self.params = params
        self.base_seed = base_seed
        self.realization = realization
        self._cache: dict[tuple[int, int], float] = {}
        self._pos: dict[int, tuple[float, float, float]] = {}
        for ap in topology.aps:
            self._pos[ap.uid] = ap.pos
        for user in topology.users:
            self._pos[user.uid] = user.pos

    def gain(self, uid_a: int, uid_b: int) -> float:
        key = (uid_a, uid_b) if uid_a <= uid_b else (uid_b, uid_a)
        g = self._cache.get(key)
        if g is None:
            g = link_gain(self.topology, self._pos[key[0]], self._pos[key[1]],
                          key[0], key[1], self.params, self.base_seed,
                          self.realization)
            self._cache[key] = g
        return g

    def loss_db(self, uid_a: int, uid_b: int) -> float:
        return -10.0 * math.log10(self.gain(uid_a, uid_b))
