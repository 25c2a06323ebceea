"""Network topology generation: buildings, AP and user placement.

Indoor layouts follow the dual-stripe convention: two parallel rows of
10 m x 10 m x 3 m apartments separated by a 10 m corridor, so a building of
length L holds 2*L apartments per floor.  Outdoor APs sit on fixed pico-cell
site coordinates shipped as a data file.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .model import ScenarioConfig, Scenario, TechVariant, N_PICO_SITES

log = logging.getLogger(__name__)

APARTMENT_SIZE_M = 10.0
CORRIDOR_WIDTH_M = 10.0
FLOOR_HEIGHT_M = 3.0
DEVICE_HEIGHT_M = 1.5          # above the local floor level
OUTDOOR_AP_HEIGHT_M = 5.0
USER_MAX_DISTANCE_M = 50.0
STUDY_AREA_M = (346.0, 389.0)  # outdoor scenarios
COVERAGE_THRESHOLD_DBM = -82.0
MAX_USER_RESAMPLES = 100
MAX_BUILDING_ATTEMPTS = 1000

# RNG purpose tags: child streams are spawned from (base_seed, realization, tag)
# so incumbent draws never move when the entrant population changes.
TAG_TOPOLOGY_INC = 1
TAG_TOPOLOGY_ENT = 2
TAG_CHANNELS_INC = 3
TAG_CHANNELS_ENT = 4
TAG_SHADOWING = 5


def stream(base_seed: int, realization: int, tag: int) -> np.random.Generator:
    """Deterministic child RNG stream for one (realization, purpose) pair."""
    return np.random.default_rng(np.random.SeedSequence((base_seed, realization, tag)))


@dataclass(frozen=True)
class Building:
    """Dual-stripe building: 2 rows x n_apartments_per_stripe x n_floors."""

    origin: tuple[float, float]
    n_apartments_per_stripe: int
    n_floors: int

    @property
    def length_m(self) -> float:
        return self.n_apartments_per_stripe * APARTMENT_SIZE_M

    @property
    def width_m(self) -> float:
        return 2.0 * APARTMENT_SIZE_M + CORRIDOR_WIDTH_M

    @property
    def height_m(self) -> float:
        return self.n_floors * FLOOR_HEIGHT_M

    @property
    def n_apartments(self) -> int:
        return 2 * self.n_apartments_per_stripe * self.n_floors

    def footprint(self) -> tuple[float, float, float, float]:
        ox, oy = self.origin
        return (ox, oy, ox + self.length_m, oy + self.width_m)

    def apartment_box(self, index: int) -> tuple[float, float, float, float, float, float]:
        """Axis-aligned box of one apartment; index runs floor-major, row-major."""
        if not 0 <= index < self.n_apartments:
            raise IndexError(f"apartment {index} out of range")
        per_floor = 2 * self.n_apartments_per_stripe
        floor, rem = divmod(index, per_floor)
        row, col = divmod(rem, self.n_apartments_per_stripe)
        ox, oy = self.origin
        x0 = ox + col * APARTMENT_SIZE_M
        y0 = oy + row * (APARTMENT_SIZE_M + CORRIDOR_WIDTH_M)
        z0 = floor * FLOOR_HEIGHT_M
        return (x0, y0, z0, x0 + APARTMENT_SIZE_M, y0 + APARTMENT_SIZE_M,
                z0 + FLOOR_HEIGHT_M)

    def contains(self, pos: tuple[float, float, float]) -> bool:
        """Point inside the building volume (corridor included)."""
        x, y, z = pos
        x0, y0, x1, y1 = self.footprint()
        return x0 <= x <= x1 and y0 <= y <= y1 and 0.0 <= z <= self.height_m

    def footprint_overlaps(self, other: "Building") -> bool:
        a = self.footprint()
        b = other.footprint()
        return not (a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1])


@dataclass(frozen=True)
class AccessPoint:
    id: int
    role: str                       # "incumbent" | "entrant"
    variant: TechVariant
    pos: tuple[float, float, float]
    tx_power_dbm: float
    apartment: tuple[int, int] | None = None   # (building index, apartment index)

    @property
    def uid(self) -> int:
        return self.id


@dataclass(frozen=True)
class UserTerminal:
    ap_id: int
    pos: tuple[float, float, float]
    apartment: tuple[int, int] | None = None

    @property
    def uid(self) -> int:
        return 1000 + self.ap_id


@dataclass
class Topology:
    """One network realization's geometry; users[i] is served by aps[i]."""

    scenario: Scenario
    buildings: list[Building] = field(default_factory=list)
    aps: list[AccessPoint] = field(default_factory=list)
    users: list[UserTerminal] = field(default_factory=list)
    study_area: tuple[float, float] = STUDY_AREA_M

    def locate_building(self, pos: tuple[float, float, float]) -> int | None:
        for i, b in enumerate(self.buildings):
            if b.contains(pos):
                return i
        return None

    def user_of(self, ap_id: int) -> UserTerminal:
        return self.users[ap_id]


class Separations(NamedTuple):
    walls_crossed: int
    floors_crossed: int
    external_walls_crossed: int


def _axis_crossing_ts(p: float, q: float, plane: float) -> float | None:
    """Parameter t where segment coordinate crosses `plane`, if strictly between."""
    if (p - plane) * (q - plane) >= 0.0:
        return None
    return (plane - p) / (q - p)


def _clip_segment_to_box(p, q, box) -> tuple[float, float] | None:
    """Slab-clip [t0, t1] of the segment p->q against an axis-aligned box."""
    (x0, y0, z0, x1, y1, z1) = box
    t0, t1 = 0.0, 1.0
    for pc, qc, lo, hi in ((p[0], q[0], x0, x1), (p[1], q[1], y0, y1),
                           (p[2], q[2], z0, z1)):
        d = qc - pc
        if abs(d) < 1e-12:
            if pc < lo or pc > hi:
                return None
            continue
        ta = (lo - pc) / d
        tb = (hi - pc) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 >= t1:
            return None
    return (t0, t1)


def _building_box(b: Building) -> tuple[float, float, float, float, float, float]:
    x0, y0, x1, y1 = b.footprint()
    return (x0, y0, 0.0, x1, y1, b.height_m)


def count_separations(topology: Topology, tx_pos, rx_pos) -> Separations:
    """Interior walls, floors, and building-envelope planes crossed by a segment."""
    walls = 0
    floors = 0
    ext = 0
    p, q = tx_pos, rx_pos
    for b in topology.buildings:
        box = _building_box(b)
        clip = _clip_segment_to_box(p, q, box)
        if clip is None:
            continue
        t0, t1 = clip
        ext += int(t0 > 0.0) + int(t1 < 1.0)
        ox, oy = b.origin
        # interior x-walls between adjacent apartments, inside each stripe only
        for k in range(1, b.n_apartments_per_stripe):
            t = _axis_crossing_ts(p[0], q[0], ox + k * APARTMENT_SIZE_M)
            if t is None:
                continue
            y = p[1] + t * (q[1] - p[1])
            z = p[2] + t * (q[2] - p[2])
            in_row_a = oy < y < oy + APARTMENT_SIZE_M
            in_row_b = (oy + APARTMENT_SIZE_M + CORRIDOR_WIDTH_M < y
                        < b.footprint()[3])
            if (in_row_a or in_row_b) and 0.0 < z < b.height_m:
                walls += 1
        # corridor-facing walls (two y-planes spanning the footprint)
        for yw in (oy + APARTMENT_SIZE_M, oy + APARTMENT_SIZE_M + CORRIDOR_WIDTH_M):
            t = _axis_crossing_ts(p[1], q[1], yw)
            if t is None:
                continue
            x = p[0] + t * (q[0] - p[0])
            z = p[2] + t * (q[2] - p[2])
            if ox < x < ox + b.length_m and 0.0 < z < b.height_m:
                walls += 1
        # floor slabs
        for k in range(1, b.n_floors):
            t = _axis_crossing_ts(p[2], q[2], k * FLOOR_HEIGHT_M)
            if t is None:
                continue
            x = p[0] + t * (q[0] - p[0])
            y = p[1] + t * (q[1] - p[1])
            x0, y0, x1, y1 = b.footprint()
            if x0 < x < x1 and y0 < y < y1:
                floors += 1
    return Separations(walls, floors, ext)


def _uniform_in_apartment(rng: np.random.Generator, box) -> tuple[float, float, float]:
    x0, y0, z0, x1, y1, _ = box
    return (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)),
            z0 + DEVICE_HEIGHT_M)


def load_pico_sites(path: str | Path | None = None) -> np.ndarray:
    """20 outdoor site coordinates, one "x y" pair per line (metres)."""
    if path is None:
        ref = resources.files("coexsim").joinpath("data/pico_sites.txt")
        text = ref.read_text()
    else:
        text = Path(path).read_text()
    rows = [line.split() for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")]
    sites = np.array([[float(a), float(b)] for a, b in rows])
    if sites.shape != (N_PICO_SITES, 2):
        raise ValueError(f"expected {N_PICO_SITES} pico sites, got {sites.shape[0]}")
    return sites


LossFn = Callable[[float], float]   # 3-D distance -> median outdoor path loss (dB)


def _place_outdoor_user(rng: np.random.Generator, ap: AccessPoint,
                        buildings: list[Building],
                        loss_db: LossFn | None) -> tuple[float, float, float]:
    """User uniform in the 50 m disc, outdoors, with a coverage check.

    Resamples until the serving AP's median received power clears the coverage
    threshold; after MAX_USER_RESAMPLES the nearest sampled outdoor point wins.
    """
    ax, ay, az = ap.pos
    best = None
    best_d = math.inf
    for _ in range(MAX_USER_RESAMPLES):
        r = USER_MAX_DISTANCE_M * math.sqrt(float(rng.uniform()))
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        pos = (ax + r * math.cos(phi), ay + r * math.sin(phi), DEVICE_HEIGHT_M)
        if any(b.contains(pos) for b in buildings):
            continue
        d3 = math.dist(pos, ap.pos)
        if d3 < best_d:
            best, best_d = pos, d3
        if loss_db is None or ap.tx_power_dbm - loss_db(d3) >= COVERAGE_THRESHOLD_DBM:
            return pos
    if best is None:
        # fully enclosed by buildings is not expected; fall back beside the AP
        return (ax + 1.0, ay, DEVICE_HEIGHT_M)
    return best


def gen_indoor_indoor(cfg: ScenarioConfig, rng_inc: np.random.Generator,
                      rng_ent: np.random.Generator) -> Topology:
    """Single 20-apartment single-floor building; one AP or fewer per apartment."""
    n_total = cfg.n_incumbent + cfg.n_entrant
    building = Building(origin=(0.0, 0.0), n_apartments_per_stripe=10, n_floors=1)
    if n_total > building.n_apartments:
        raise ValueError("more APs than apartments")
    topo = Topology(scenario=Scenario.INDOOR_INDOOR, buildings=[building],
                    study_area=(building.length_m, building.width_m))

    inc_apts = rng_inc.choice(building.n_apartments, size=cfg.n_incumbent,
                              replace=False)
    remaining = np.setdiff1d(np.arange(building.n_apartments), inc_apts)
    ent_apts = rng_ent.choice(remaining, size=cfg.n_entrant, replace=False)

    def add(ap_id, role, variant, power, apt, rng):
        box = building.apartment_box(int(apt))
        topo.aps.append(AccessPoint(ap_id, role, variant,
                                    _uniform_in_apartment(rng, box), power,
                                    apartment=(0, int(apt))))
        topo.users.append(UserTerminal(ap_id, _uniform_in_apartment(rng, box),
                                       apartment=(0, int(apt))))

    for i, apt in enumerate(inc_apts):
        add(i, "incumbent", TechVariant.WIFI, cfg.incumbent_tx_power_dbm, apt, rng_inc)
    for j, apt in enumerate(ent_apts):
        add(cfg.n_incumbent + j, "entrant", cfg.entrant_variant,
            cfg.entrant_tx_power_dbm, apt, rng_ent)
    return topo


def gen_outdoor_outdoor(cfg: ScenarioConfig, rng_inc: np.random.Generator,
                        rng_ent: np.random.Generator,
                        sites: np.ndarray | None = None,
                        loss_db: LossFn | None = None) -> Topology:
    """All APs on distinct pico sites; users uniform in a 50 m outdoor disc."""
    sites = load_pico_sites(cfg.pico_sites_file) if sites is None else sites
    n_total = cfg.n_incumbent + cfg.n_entrant
    if n_total > len(sites):
        raise ValueError("more APs than pico sites")
    topo = Topology(scenario=Scenario.OUTDOOR_OUTDOOR)

    inc_sites = rng_inc.choice(len(sites), size=cfg.n_incumbent, replace=False)
    remaining = np.setdiff1d(np.arange(len(sites)), inc_sites)
    ent_sites = rng_ent.choice(remaining, size=cfg.n_entrant, replace=False)

    def add(ap_id, role, variant, power, site_idx, rng):
        x, y = sites[int(site_idx)]
        ap = AccessPoint(ap_id, role, variant, (float(x), float(y),
                                                OUTDOOR_AP_HEIGHT_M), power)
        topo.aps.append(ap)
        topo.users.append(UserTerminal(ap_id, _place_outdoor_user(rng, ap, [],
                                                                  loss_db)))

    for i, s in enumerate(inc_sites):
        add(i, "incumbent", TechVariant.WIFI, cfg.incumbent_tx_power_dbm, s, rng_inc)
    for j, s in enumerate(ent_sites):
        add(cfg.n_incumbent + j, "entrant", cfg.entrant_variant,
            cfg.entrant_tx_power_dbm, s, rng_ent)
    return topo


def _target_incumbents(cfg: ScenarioConfig) -> int:
    if cfg.incumbent_density_per_km2 is None:
        return cfg.n_incumbent
    area_km2 = STUDY_AREA_M[0] * STUDY_AREA_M[1] * 1e-6
    return int(round(cfg.incumbent_density_per_km2 * area_km2))


def gen_indoor_outdoor(cfg: ScenarioConfig, rng_inc: np.random.Generator,
                       rng_ent: np.random.Generator,
                       sites: np.ndarray | None = None,
                       loss_db: LossFn | None = None) -> Topology:
    """Indoor incumbents in random dual-stripe buildings, outdoor entrants on sites."""
    sites = load_pico_sites(cfg.pico_sites_file) if sites is None else sites
    if cfg.n_entrant > len(sites):
        raise ValueError("more entrant APs than pico sites")
    topo = Topology(scenario=Scenario.INDOOR_OUTDOOR)
    n_inc = _target_incumbents(cfg)

    # drop random buildings until the incumbent population fits
    capacity = 0
    while capacity < n_inc:
        placed = False
        for _ in range(MAX_BUILDING_ATTEMPTS):
            stripe_len = int(rng_inc.integers(3, 11))
            floors = int(rng_inc.integers(3, 6))
            b = Building(origin=(0.0, 0.0), n_apartments_per_stripe=stripe_len,
                         n_floors=floors)
            ox = float(rng_inc.uniform(0.0, STUDY_AREA_M[0] - b.length_m))
            oy = float(rng_inc.uniform(0.0, STUDY_AREA_M[1] - b.width_m))
            b = Building(origin=(ox, oy), n_apartments_per_stripe=stripe_len,
                         n_floors=floors)
            if not any(b.footprint_overlaps(o) for o in topo.buildings):
                topo.buildings.append(b)
                capacity += b.n_apartments
                placed = True
                break
        if not placed:
            log.warning("building placement failed after %d attempts; "
                        "reducing incumbents from %d to %d",
                        MAX_BUILDING_ATTEMPTS, n_inc, capacity)
            n_inc = capacity
            break

    # incumbents in distinct apartments across all buildings
    apt_index = [(bi, ai) for bi, b in enumerate(topo.buildings)
                 for ai in range(b.n_apartments)]
    chosen = rng_inc.choice(len(apt_index), size=n_inc, replace=False)
    for i, k in enumerate(chosen):
        bi, ai = apt_index[int(k)]
        box = topo.buildings[bi].apartment_box(ai)
        topo.aps.append(AccessPoint(i, "incumbent", TechVariant.WIFI,
                                    _uniform_in_apartment(rng_inc, box),
                                    cfg.incumbent_tx_power_dbm, apartment=(bi, ai)))
        topo.users.append(UserTerminal(i, _uniform_in_apartment(rng_inc, box),
                                       apartment=(bi, ai)))

    ent_sites = rng_ent.choice(len(sites), size=cfg.n_entrant, replace=False)
    for j, s in enumerate(ent_sites):
        x, y = sites[int(s)]
        ap = AccessPoint(n_inc + j, "entrant", cfg.entrant_variant,
                         (float(x), float(y), OUTDOOR_AP_HEIGHT_M),
                         cfg.entrant_tx_power_dbm)
        topo.aps.append(ap)
        topo.users.append(UserTerminal(ap.id, _place_outdoor_user(
            rng_ent, ap, topo.buildings, loss_db)))
    return topo


def generate_topology(cfg: ScenarioConfig, base_seed: int, realization: int,
                      sites: np.ndarray | None = None,
                      loss_db: LossFn | None = None) -> Topology:
    """Dispatch to the scenario generator with per-population RNG streams."""
    rng_inc = stream(base_seed, realization, TAG_TOPOLOGY_INC)
    rng_ent = stream(base_seed, realization, TAG_TOPOLOGY_ENT)
    if cfg.scenario is Scenario.INDOOR_INDOOR:
        return gen_indoor_indoor(cfg, rng_inc, rng_ent)
    if cfg.scenario is Scenario.OUTDOOR_OUTDOOR:
        return gen_outdoor_outdoor(cfg, rng_inc, rng_ent, sites, loss_db)
    return gen_indoor_outdoor(cfg, rng_inc, rng_ent, sites, loss_db)
