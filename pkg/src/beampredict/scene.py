"""
Synthetic 2-D multipath generator.

Specular paths are found with the image method over the walls of
axis-aligned rectangular buildings. Angles are azimuths measured from the
array broadside (+y) toward +x, wrapped to [0, 2*pi), so ``sin(angle)`` is
the direction cosine along an x-oriented ULA.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .beamspace import SPEED_OF_LIGHT
from .errors import ConfigError, DegenerateGeometry, EmptyDataset

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
_SIDE_EPS = 1e-9
_SEG_EPS = 1e-12


@dataclass(frozen=True)
class Building:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def contains(self, point, closed: bool = True) -> bool:
        x, y = point
        if closed:
            return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax
        return self.xmin < x < self.xmax and self.ymin < y < self.ymax


@dataclass(frozen=True)
class UserGrid:
    origin: Tuple[float, float]
    spacing: float
    rows: int
    cols: int

    def points(self) -> np.ndarray:
        """Grid points in row-major order, shape (rows*cols, 2)."""
        r, c = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing="ij")
        x = self.origin[0] + c.ravel() * self.spacing
        y = self.origin[1] + r.ravel() * self.spacing
        return np.column_stack([x, y])


@dataclass(frozen=True)
class Scene:
    bounds: Tuple[float, float]
    buildings: Tuple[Building, ...]
    bs_sites: Tuple[Tuple[float, float], ...]
    user_grid: UserGrid
    carrier_frequency: float = 28e9
    max_reflections: int = 2
    reflection_loss_db: float = 6.0
    rss_floor_db: float = -160.0
    blockage: bool = False
    shadowing_std_db: float = 0.0
    max_paths: Optional[int] = None

    def __post_init__(self):
        _validate_scene(self)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    def user_spots(self) -> List[Tuple[int, np.ndarray]]:
        """(user_id, position) for grid points outside every building.

        The user id is the row-major grid index, so ids stay stable when
        buildings knock out grid points.
        """
        spots = []
        for uid, p in enumerate(self.user_grid.points()):
            if not any(b.contains(p) for b in self.buildings):
                spots.append((uid, p))
        return spots


@dataclass(frozen=True)
class PathRecord:
    rss_db: float
    delay_s: float
    aoa_rad: float
    aod_rad: float
    reflections: int


@dataclass(frozen=True)
class ChannelSample:
    bs_id: int
    user_id: int
    user_position: Tuple[float, float]
    paths: Tuple[PathRecord, ...]

    def to_dict(self) -> dict:
        return {
            "bs_id": self.bs_id,
            "user_id": self.user_id,
            "user_position": list(self.user_position),
            "paths": [asdict(p) for p in self.paths],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelSample":
        paths = tuple(
            PathRecord(
                float(p["rss_db"]), float(p["delay_s"]), float(p["aoa_rad"]),
                float(p["aod_rad"]), int(p["reflections"]),
            )
            for p in d["paths"]
        )
        return cls(int(d["bs_id"]), int(d["user_id"]),
                   tuple(float(v) for v in d["user_position"]), paths)


def _validate_scene(scene: Scene) -> None:
    w, h = scene.bounds
    if not (w > 0 and h > 0):
        raise ConfigError("bounds", "width and height must be positive")
    for i, b in enumerate(scene.buildings):
        if not (b.xmin < b.xmax and b.ymin < b.ymax):
            raise ConfigError(f"buildings[{i}]", "rectangle must have xmin<xmax and ymin<ymax")
        if b.xmin < 0 or b.ymin < 0 or b.xmax > w or b.ymax > h:
            raise ConfigError(f"buildings[{i}]", "rectangle lies outside the scene bounds")
    for i, s in enumerate(scene.bs_sites):
        if not (0 <= s[0] <= w and 0 <= s[1] <= h):
            raise ConfigError(f"bs_sites[{i}]", "site lies outside the scene bounds")
        if any(b.contains(s) for b in scene.buildings):
            raise ConfigError(f"bs_sites[{i}]", "site lies inside a building")
    g = scene.user_grid
    if not g.spacing > 0:
        raise ConfigError("user_grid.spacing", "must be positive")
    if g.rows < 1 or g.cols < 1:
        raise ConfigError("user_grid", "rows and cols must be at least 1")
    pts = g.points()
    if pts[:, 0].min() < 0 or pts[:, 1].min() < 0 or pts[:, 0].max() > w or pts[:, 1].max() > h:
        raise ConfigError("user_grid", "grid extends outside the scene bounds")
    if not scene.carrier_frequency > 0:
        raise ConfigError("carrier_frequency", "must be positive")
    if scene.max_reflections < 0:
        raise ConfigError("max_reflections", "must be non-negative")
    if scene.reflection_loss_db < 0:
        raise ConfigError("reflection_loss_db", "must be non-negative")
    if scene.shadowing_std_db < 0:
        raise ConfigError("shadowing_std_db", "must be non-negative")
    if scene.max_paths is not None and scene.max_paths < 1:
        raise ConfigError("max_paths", "must be at least 1 when given")


# --------------------------------------------------------------------------
# Walls and image sources
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Walls:
    """Building faces as segments with outward unit normals.

    A point ``x`` is on the exterior side of wall ``i`` when
    ``normal[i] @ x - offset[i] > 0``.
    """

    start: np.ndarray
    end: np.ndarray
    normal: np.ndarray
    offset: np.ndarray

    def __len__(self):
        return len(self.offset)


def building_walls(buildings: Sequence[Building]) -> Walls:
    start, end, normal, offset = [], [], [], []
    for b in buildings:
        faces = [
            ((b.xmin, b.ymin), (b.xmin, b.ymax), (-1.0, 0.0), -b.xmin),
            ((b.xmax, b.ymin), (b.xmax, b.ymax), (1.0, 0.0), b.xmax),
            ((b.xmin, b.ymin), (b.xmax, b.ymin), (0.0, -1.0), -b.ymin),
            ((b.xmin, b.ymax), (b.xmax, b.ymax), (0.0, 1.0), b.ymax),
        ]
        for s, e, n, c in faces:
            start.append(s)
            end.append(e)
            normal.append(n)
            offset.append(c)
    return Walls(
        np.array(start, dtype=float).reshape(-1, 2),
        np.array(end, dtype=float).reshape(-1, 2),
        np.array(normal, dtype=float).reshape(-1, 2),
        np.array(offset, dtype=float),
    )


def reflect_points(points: np.ndarray, normal: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Mirror points across wall lines (broadcast over leading axes)."""
    dist = np.sum(points * normal, axis=-1) - offset
    return points - 2 * dist[..., None] * normal


def direction_angle(vec) -> np.ndarray:
    """Azimuth from +y toward +x, wrapped to [0, 2*pi)."""
    vec = np.asarray(vec, dtype=float)
    ang = np.mod(np.arctan2(vec[..., 0], vec[..., 1]), TWO_PI)
    return np.where(ang >= TWO_PI, 0.0, ang)


class ImageTree:
    """Image sources of one transmitter for every admissible wall sequence.

    Sequences never repeat a wall back to back, and the first wall must
    face the source. Later walls are kept only if some part of the previous
    wall lies on their exterior side.
    """

    def __init__(self, walls: Walls, source, max_order: int):
        self.walls = walls
        self.source = np.asarray(source, dtype=float)
        self.orders = []  # list of (sequences (M,k), images (M,k,2))
        if len(walls) == 0:
            return
        w = np.arange(len(walls))
        faces = walls.normal @ self.source - walls.offset > _SIDE_EPS
        seq = w[faces][:, None]
        img = reflect_points(self.source, walls.normal[seq[:, 0]], walls.offset[seq[:, 0]])[:, None, :]
        # wall j can follow wall i if an endpoint of i lies strictly outside j
        s_side = walls.start @ walls.normal.T - walls.offset
        e_side = walls.end @ walls.normal.T - walls.offset
        follows = (np.maximum(s_side, e_side) > _SIDE_EPS) & ~np.eye(len(walls), dtype=bool)
        for order in range(1, max_order + 1):
            if order > 1:
                prev, nxt = np.nonzero(follows[seq[:, -1]])
                seq = np.column_stack([seq[prev], nxt])
                new = reflect_points(img[prev, -1], walls.normal[nxt], walls.offset[nxt])
                img = np.concatenate([img[prev], new[:, None, :]], axis=1)
            if len(seq) == 0:
                break
            self.orders.append((seq, img))

    def trace(self, target) -> List[Tuple[int, float, np.ndarray, np.ndarray]]:
        """Valid specular paths from the source to ``target``.

        Returns (order, length, first_hop_point, last_hop_point) tuples where
        the hop points are the reflection points adjacent to the source and
        to the target respectively.
        """
        walls = self.walls
        target = np.asarray(target, dtype=float)
        out = []
        for seq, img in self.orders:
            m, k = seq.shape
            t = np.broadcast_to(target, (m, 2)).copy()
            ok = np.ones(m, dtype=bool)
            last_hop = None
            for j in range(k - 1, -1, -1):
                wid = seq[:, j]
                n, c = walls.normal[wid], walls.offset[wid]
                src = img[:, j]
                d_t = np.sum(n * t, axis=1) - c
                d_s = np.sum(n * src, axis=1) - c
                ok &= (d_t > _SIDE_EPS) & (d_s < -_SIDE_EPS)
                denom = np.where(ok, d_s - d_t, -1.0)
                s = d_s / denom
                p = src + s[:, None] * (t - src)
                a, b = walls.start[wid], walls.end[wid]
                ab = b - a
                u = np.sum((p - a) * ab, axis=1) / np.sum(ab * ab, axis=1)
                ok &= (u >= -_SEG_EPS) & (u <= 1 + _SEG_EPS)
                t = p
                if last_hop is None:
                    last_hop = p
            ok &= np.hypot(*(t - self.source).T) > _SIDE_EPS
            if not ok.any():
                continue
            lengths = np.hypot(*(img[ok, -1] - target).T)
            for length, first, last in zip(lengths, t[ok], last_hop[ok]):
                out.append((k, float(length), first, last))
        return out


def _segment_blocked(p, q, buildings: Sequence[Building]) -> bool:
    """True if segment p-q passes through the open interior of a building."""
    d = q - p
    for b in buildings:
        t0, t1 = 0.0, 1.0
        inside = True
        for dd, pp, lo, hi in ((d[0], p[0], b.xmin, b.xmax), (d[1], p[1], b.ymin, b.ymax)):
            lo, hi = lo + 1e-7, hi - 1e-7
            if abs(dd) < 1e-15:
                if not lo < pp < hi:
                    inside = False
                    break
                continue
            a, c = (lo - pp) / dd, (hi - pp) / dd
            t0, t1 = max(t0, min(a, c)), min(t1, max(a, c))
            if t0 >= t1:
                inside = False
                break
        if inside and t0 < t1:
            return True
    return False


def _path_points(walls: Walls, seq: Sequence[int], source, target) -> List[np.ndarray]:
    """Reflection points for one known-valid wall sequence (used for blockage)."""
    imgs = [np.asarray(source, dtype=float)]
    for w in seq:
        imgs.append(reflect_points(imgs[-1], walls.normal[w], walls.offset[w]))
    pts = [np.asarray(target, dtype=float)]
    t = pts[0]
    for j in range(len(seq) - 1, -1, -1):
        w = seq[j]
        d_t = walls.normal[w] @ t - walls.offset[w]
        d_s = walls.normal[w] @ imgs[j + 1] - walls.offset[w]
        t = imgs[j + 1] + d_s / (d_s - d_t) * (t - imgs[j + 1])
        pts.append(t)
    pts.append(np.asarray(source, dtype=float))
    return pts[::-1]


def _finalize_paths(raw, bs, user, scene: Scene, rng: Optional[np.random.Generator]) -> List[PathRecord]:
    if not raw:
        return []
    order = np.array([r[0] for r in raw])
    length = np.array([r[1] for r in raw])
    first = np.array([r[2] for r in raw])
    last = np.array([r[3] for r in raw])
    rss = -20 * np.log10(4 * np.pi * length / scene.wavelength) - order * scene.reflection_loss_db
    if rng is not None and scene.shadowing_std_db > 0:
        rss = rss + rng.normal(0.0, scene.shadowing_std_db, size=rss.shape)
    delay = length / SPEED_OF_LIGHT
    aoa = direction_angle(first - bs)
    aod = direction_angle(last - user)

    keep = np.nonzero(rss >= scene.rss_floor_db)[0]
    if scene.max_paths is not None and len(keep) > scene.max_paths:
        strongest = np.lexsort((delay[keep], -rss[keep]))[: scene.max_paths]
        keep = keep[strongest]
    keep = keep[np.lexsort((aod[keep], aoa[keep], -rss[keep], delay[keep]))]
    return [
        PathRecord(float(rss[i]), float(delay[i]), float(aoa[i]), float(aod[i]), int(order[i]))
        for i in keep
    ]


class Tracer:
    """Reusable tracer for one scene; caches image trees per source point."""

    def __init__(self, scene: Scene):
        self.scene = scene
        self.walls = building_walls(scene.buildings)
        self._trees = {}

    def tree(self, source) -> ImageTree:
        key = tuple(float(v) for v in source)
        if key not in self._trees:
            self._trees[key] = ImageTree(self.walls, key, self.scene.max_reflections)
        return self._trees[key]

    def raw_paths(self, bs, user):
        bs = np.asarray(bs, dtype=float)
        user = np.asarray(user, dtype=float)
        if np.hypot(*(bs - user)) < 1e-9:
            raise DegenerateGeometry(f"BS {bs.tolist()} and user {user.tolist()} coincide")
        raw = [(0, float(np.hypot(*(user - bs))), user, bs)]
        raw.extend(self.tree(bs).trace(user))
        if self.scene.blockage:
            raw = [r for r in raw if not self._blocked(r, bs, user)]
        return raw

    def _blocked(self, r, bs, user) -> bool:
        order, _, first, last = r
        if order == 0:
            pts = [bs, user]
        elif order == 1:
            pts = [bs, first, user]
        else:
            seq = self._sequence_for(r, bs, user)
            pts = _path_points(self.walls, seq, bs, user)
        return any(_segment_blocked(pts[i], pts[i + 1], self.scene.buildings) for i in range(len(pts) - 1))

    def _sequence_for(self, r, bs, user):
        order, length, first, last = r
        seq, img = self.tree(bs).orders[order - 1]
        cand = np.nonzero(np.abs(np.hypot(*(img[:, -1] - user).T) - length) < 1e-9)[0]
        for i in cand:
            pts = _path_points(self.walls, seq[i], bs, user)
            if np.allclose(pts[1], first, atol=1e-9) and np.allclose(pts[-2], last, atol=1e-9):
                return seq[i]
        raise AssertionError("traced path has no matching wall sequence")

    def trace(self, bs, user, rng: Optional[np.random.Generator] = None) -> List[PathRecord]:
        bs = np.asarray(bs, dtype=float)
        user = np.asarray(user, dtype=float)
        return _finalize_paths(self.raw_paths(bs, user), bs, user, self.scene, rng)


def trace_paths(scene: Scene, bs, user) -> List[PathRecord]:
    """LOS plus specular paths up to ``scene.max_reflections`` bounces, sorted by delay."""
    return Tracer(scene).trace(bs, user)


def link_rng(seed: int, bs_id: int, user_id: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, bs_id, user_id])


def generate_dataset(scene: Scene, seed: int = 0, bs_ids: Optional[Iterable[int]] = None) -> List[ChannelSample]:
    """One ChannelSample per (BS, user spot) link that keeps at least one path.

    Randomness (shadowing only) is drawn per link from ``(seed, bs_id, user_id)``.
    """
    tracer = Tracer(scene)
    ids = range(len(scene.bs_sites)) if bs_ids is None else list(bs_ids)
    samples, dropped = [], 0
    spots = scene.user_spots()
    for bs_id in ids:
        bs = np.asarray(scene.bs_sites[bs_id], dtype=float)
        for uid, pos in spots:
            paths = tracer.trace(bs, pos, rng=link_rng(seed, bs_id, uid))
            if not paths:
                dropped += 1
                continue
            samples.append(ChannelSample(bs_id, uid, (float(pos[0]), float(pos[1])), tuple(paths)))
    if dropped:
        logger.info("omitted %d links with no path above the RSS floor", dropped)
    if not samples:
        raise EmptyDataset("no link produced any path")
    return samples


# --------------------------------------------------------------------------
# Default scene and persistence
# --------------------------------------------------------------------------

def default_scene(seed: int = 2018, num_buildings: int = 20, rows: int = 30, cols: int = 40,
                  spacing: float = 3.0, **physics) -> Scene:
    """Desk-scale street scene: 150 m x 120 m, one BS on the south edge.

    Buildings are placed at random without overlap, all north of the BS,
    so every path reaches the BS from its front half-plane.
    """
    rng = np.random.default_rng(seed)
    width, height = 150.0, 120.0
    bs = (75.0, 2.0)
    buildings: List[Building] = []
    attempts = 0
    while len(buildings) < num_buildings:
        attempts += 1
        if attempts > 10000:
            raise RuntimeError("could not place buildings; reduce num_buildings")
        w, h = rng.uniform(6.0, 16.0, size=2)
        x0 = rng.uniform(2.0, width - 2.0 - w)
        y0 = rng.uniform(10.0, height - 2.0 - h)
        cand = Building(round(x0, 3), round(y0, 3), round(x0 + w, 3), round(y0 + h, 3))
        gap = 4.0
        if any(cand.xmin < b.xmax + gap and b.xmin < cand.xmax + gap
               and cand.ymin < b.ymax + gap and b.ymin < cand.ymax + gap for b in buildings):
            continue
        buildings.append(cand)
    origin = ((width - (cols - 1) * spacing) / 2, 16.0)
    return Scene(
        bounds=(width, height),
        buildings=tuple(buildings),
        bs_sites=(bs,),
        user_grid=UserGrid(origin, spacing, rows, cols),
        **physics,
    )


def scene_to_dict(scene: Scene) -> dict:
    return {
        "bounds": list(scene.bounds),
        "buildings": [[b.xmin, b.ymin, b.xmax, b.ymax] for b in scene.buildings],
        "bs_sites": [list(s) for s in scene.bs_sites],
        "user_grid": {
            "origin": list(scene.user_grid.origin),
            "spacing": scene.user_grid.spacing,
            "rows": scene.user_grid.rows,
            "cols": scene.user_grid.cols,
        },
        "carrier_frequency": scene.carrier_frequency,
        "max_reflections": scene.max_reflections,
        "reflection_loss_db": scene.reflection_loss_db,
        "rss_floor_db": scene.rss_floor_db,
        "blockage": scene.blockage,
        "shadowing_std_db": scene.shadowing_std_db,
        "max_paths": scene.max_paths,
    }


def _pair(d, key):
    v = d[key]
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(key, "expected a pair of numbers")
    try:
        return (float(v[0]), float(v[1]))
    except (TypeError, ValueError):
        raise ConfigError(key, "expected a pair of numbers") from None


def _number(d, key, kind=float, default=None):
    if key not in d:
        if default is None:
            raise ConfigError(key, "missing required field")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {type(v).__name__}")
    if kind is int and int(v) != v:
        raise ConfigError(key, "expected an integer")
    return kind(v)


def scene_from_dict(d) -> Scene:
    """Parse a scene document, raising ConfigError that names the bad field."""
    if not isinstance(d, dict):
        raise ConfigError("<root>", "scene document must be a JSON object")
    for key in ("bounds", "buildings", "bs_sites", "user_grid"):
        if key not in d:
            raise ConfigError(key, "missing required field")
    bounds = _pair(d, "bounds")
    if not isinstance(d["buildings"], list):
        raise ConfigError("buildings", "expected a list of [xmin, ymin, xmax, ymax]")
    buildings = []
    for i, b in enumerate(d["buildings"]):
        if not isinstance(b, (list, tuple)) or len(b) != 4:
            raise ConfigError(f"buildings[{i}]", "expected [xmin, ymin, xmax, ymax]")
        try:
            buildings.append(Building(*(float(v) for v in b)))
        except (TypeError, ValueError):
            raise ConfigError(f"buildings[{i}]", "coordinates must be numbers") from None
    if not isinstance(d["bs_sites"], list) or not d["bs_sites"]:
        raise ConfigError("bs_sites", "expected a non-empty list of [x, y]")
    sites = tuple(_pair({"bs_sites": s}, "bs_sites") for s in d["bs_sites"])
    g = d["user_grid"]
    if not isinstance(g, dict):
        raise ConfigError("user_grid", "expected an object")
    try:
        grid = UserGrid(_pair(g, "origin"), _number(g, "spacing"),
                        _number(g, "rows", int), _number(g, "cols", int))
    except ConfigError as e:
        raise ConfigError(f"user_grid.{e.field}", str(e).split(": ", 1)[1]) from None
    except KeyError as e:
        raise ConfigError(f"user_grid.{e.args[0]}", "missing required field") from None
    max_paths = d.get("max_paths")
    if max_paths is not None:
        max_paths = _number(d, "max_paths", int)
    blockage = d.get("blockage", False)
    if not isinstance(blockage, bool):
        raise ConfigError("blockage", "expected true or false")
    return Scene(
        bounds=bounds,
        buildings=tuple(buildings),
        bs_sites=sites,
        user_grid=grid,
        carrier_frequency=_number(d, "carrier_frequency", default=28e9),
        max_reflections=_number(d, "max_reflections", int, default=2),
        reflection_loss_db=_number(d, "reflection_loss_db", default=6.0),
        rss_floor_db=_number(d, "rss_floor_db", default=-160.0),
        blockage=blockage,
        shadowing_std_db=_number(d, "shadowing_std_db", default=0.0),
        max_paths=max_paths,
    )


def load_scene(path) -> Scene:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError("<json>", f"not valid JSON ({e.msg} at line {e.lineno})") from None
    return scene_from_dict(doc)


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2) + "\n")


def dumps_samples(samples: Iterable[ChannelSample]) -> str:
    return "".join(json.dumps(s.to_dict(), separators=(",", ":")) + "\n" for s in samples)


def save_dataset(samples: Iterable[ChannelSample], path) -> None:
    Path(path).write_text(dumps_samples(samples))


def load_dataset(path) -> List[ChannelSample]:
    with open(path) as fh:
        return [ChannelSample.from_dict(json.loads(line)) for line in fh if line.strip()]
