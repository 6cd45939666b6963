"""Geographic binning of geotagged records into named regions.

Regions are coarse lat/lon polygon rings loaded from a data file, checked
by even-odd ray casting with boundaries counting as inside. Points falling
in no region land in the fallback bin ("Mid-Ocean" by default). Coordinate
order is (lat, lon) everywhere, including bounding boxes.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus

Point = tuple[float, float]  # (lat, lon)
Ring = tuple[Point, ...]


@dataclass(frozen=True)
class Region:
    name: str
    polygons: tuple[Ring, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("region name must be nonempty")
        for ring in self.polygons:
            if len(ring) < 4:
                raise ValueError(f"region {self.name!r}: ring needs >= 4 vertices (closed)")
            if ring[0] != ring[-1]:
                raise ValueError(f"region {self.name!r}: ring is not closed")


@dataclass(frozen=True)
class RegionSet:
    """Ordered named regions; first containing region wins, else the fallback."""

    regions: tuple[Region, ...]
    fallback: str = "Mid-Ocean"

    def __post_init__(self) -> None:
        names = [r.name for r in self.regions]
        if len(names) != len(set(names)):
            raise ValueError("region names must be unique")
        if self.fallback in names:
            raise ValueError(f"fallback name {self.fallback!r} collides with a region")

    def names(self) -> list[str]:
        return [r.name for r in self.regions] + [self.fallback]


def _on_segment(point: Point, a: Point, b: Point) -> bool:
    (py, px), (ay, ax), (by, bx) = point, a, b
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if cross != 0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def point_in_ring(point: Point, ring: Ring) -> bool:
    """Even-odd ray-casting containment; boundary points count as inside."""
    py, px = point
    inside = False
    for a, b in zip(ring, ring[1:]):
        if _on_segment(point, a, b):
            return True
        (ay, ax), (by, bx) = a, b
        if (ay > py) != (by > py):
            x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_cross:
                inside = not inside
    return inside


def assign_region(point: Point, regions: RegionSet) -> str:
    """The first declared region containing the point, or the fallback name."""
    for region in regions.regions:
        for ring in region.polygons:
            if point_in_ring(point, ring):
                return region.name
    return regions.fallback


def load_regions(lines: Iterable[str], fallback: str = "Mid-Ocean") -> RegionSet:
    """Parse the region file format: name line, then "lat,lon" vertex lines,
    blocks separated by blank lines. A repeated name adds another polygon
    to that region."""
    polygons: dict[str, list[Ring]] = {}
    order: list[str] = []
    name: str | None = None
    ring: list[Point] = []

    def flush() -> None:
        nonlocal name, ring
        if name is None:
            return
        if name not in polygons:
            polygons[name] = []
            order.append(name)
        polygons[name].append(tuple(ring))
        name, ring = None, []

    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            flush()
            continue
        if name is None:
            name = line
        else:
            lat_s, lon_s = line.split(",")
            ring.append((float(lat_s), float(lon_s)))
    flush()
    return RegionSet(
        regions=tuple(Region(n, tuple(polygons[n])) for n in order),
        fallback=fallback,
    )


def load_regions_file(path: str | Path, fallback: str = "Mid-Ocean") -> RegionSet:
    with open(path, encoding="utf-8") as f:
        return load_regions(f, fallback=fallback)


def write_regions(regions: RegionSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for region in regions.regions:
            for ring in region.polygons:
                f.write(region.name + "\n")
                for lat, lon in ring:
                    f.write(f"{lat!r},{lon!r}\n")
                f.write("\n")


def default_regions(fallback: str = "Mid-Ocean") -> RegionSet:
    """The coarse continent rings shipped with the package."""
    text = resources.files("streamaudit").joinpath("data/continents.txt").read_text("utf-8")
    return load_regions(text.splitlines(), fallback=fallback)


def filter_geotagged(corpus: Corpus) -> Corpus:
    """The subset of records carrying a geo point."""
    return Corpus(
        label=corpus.label,
        records=tuple(r for r in corpus if r.geo is not None),
        tz_offset_hours=corpus.tz_offset_hours,
    )


# the default collection box (sw, ne) in (lat, lon) order
DEFAULT_COLLECTION_BBOX: tuple[Point, Point] = ((32.8, 35.9), (37.3, 42.3))


def exclude_bbox(
    corpus: Corpus,
    sw: Point = DEFAULT_COLLECTION_BBOX[0],
    ne: Point = DEFAULT_COLLECTION_BBOX[1],
) -> Corpus:
    """Drop geotagged records inside the box (boundaries inclusive).

    Records without a geo point are dropped too: this operation works on
    geotagged subsets. The default box is the collection bounding box,
    whose records would otherwise dominate the regional distribution.
    """
    if sw[0] > ne[0] or sw[1] > ne[1]:
        raise ValueError(f"inverted bounding box: sw={sw}, ne={ne}")

    def keep(r) -> bool:
        if r.geo is None:
            return False
        lat, lon = r.geo
        return not (sw[0] <= lat <= ne[0] and sw[1] <= lon <= ne[1])

    return Corpus(
        label=corpus.label,
        records=tuple(r for r in corpus if keep(r)),
        tz_offset_hours=corpus.tz_offset_hours,
    )


@dataclass(frozen=True)
class GeoRegionRow:
    region: str
    reference_count: int
    reference_pct: float
    sample_count: int
    sample_pct: float
    error_pct: float


@dataclass(frozen=True)
class GeoReport:
    """Per-region counts and percentages; error = sample_pct - reference_pct."""

    rows: tuple[GeoRegionRow, ...]
    total_reference: int
    total_sample: int


def geo_report_from_counts(
    reference_counts: Mapping[str, int],
    sample_counts: Mapping[str, int],
    region_order: Sequence[str],
    total_reference: int | None = None,
    total_sample: int | None = None,
) -> GeoReport:
    """Percentage table from per-region counts.

    Totals default to the row sums; explicit totals let externally
    tabulated data be reproduced even when its rows and total disagree.
    """
    total_ref = total_reference if total_reference is not None \
        else sum(reference_counts.get(r, 0) for r in region_order)
    total_sample = total_sample if total_sample is not None \
        else sum(sample_counts.get(r, 0) for r in region_order)
    if total_ref == 0:
        raise ValueError("reference has no geotagged records to bin")
    rows = []
    for region in region_order:
        ref_n = reference_counts.get(region, 0)
        sample_n = sample_counts.get(region, 0)
        ref_pct = round(100.0 * ref_n / total_ref, 2)
        sample_pct = round(100.0 * sample_n / total_sample, 2) if total_sample else 0.0
        rows.append(GeoRegionRow(region, ref_n, ref_pct, sample_n, sample_pct,
                                 round(sample_pct - ref_pct, 2)))
    return GeoReport(rows=tuple(rows), total_reference=total_ref, total_sample=total_sample)


def geo_report(
    reference: Corpus,
    sample: Corpus,
    regions: RegionSet,
    exclude: tuple[Point, Point] | None = None,
) -> GeoReport:
    """Bin both corpora's geotagged records by region and compare shares."""
    ref = filter_geotagged(reference)
    samp = filter_geotagged(sample)
    if exclude is not None:
        sw, ne = exclude
        ref = exclude_bbox(ref, sw, ne)
        samp = exclude_bbox(samp, sw, ne)
    if len(ref) == 0:
        raise ValueError("reference has no geotagged records to bin")

    order = regions.names()
    ref_counts = {name: 0 for name in order}
    for r in ref:
        ref_counts[assign_region(r.geo, regions)] += 1
    sample_counts = {name: 0 for name in order}
    for r in samp:
        sample_counts[assign_region(r.geo, regions)] += 1
    return geo_report_from_counts(ref_counts, sample_counts, order)
