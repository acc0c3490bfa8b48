"""Finite causal structures: event sets, precedence relations, closure, generators.

Events are a finite labeled set; a causal relation is a boolean incidence
structure stored as one bitmask per row (bit ``j`` of ``rows[i]`` means event
``i`` precedes event ``j``).  The closure of a raw relation is its smallest
reflexive and transitive superset; with finitely many events every set is
topologically closed, so no separate closure step is needed or modeled.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BoundExceededError, InputError

__all__ = [
    "EventSet",
    "CausalRelation",
    "CausalSpace",
    "GeneratorSpec",
    "kplus_closure",
    "future_set",
    "past_set",
    "is_upset",
    "lemma_complement_check",
    "enumerate_upsets",
    "find_cycle_pair",
    "explicit_space",
    "minkowski_space",
    "sprinkle_space",
    "random_dag_space",
    "generate",
    "generator_spec_from_jsonable",
    "space_from_jsonable",
    "space_to_jsonable",
]

# Sprinkled coordinates are drawn on this per-dimension rational grid, which
# keeps every coordinate an exact rational while remaining effectively uniform.
SPRINKLE_GRID = 10**6

DEFAULT_UPSET_BOUND = 20


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _as_fraction(value) -> Fraction:
    """Exact conversion at the I/O boundary.

    Decimal or ``p/q`` strings become the exact rational they denote; binary
    floats become the exact rational value of the float.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"expected a number, got {value!r}")
    if isinstance(value, (int, str, float)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a valid rational: {value!r}") from exc
    raise InputError(f"expected a number, got {value!r}")


@dataclass(frozen=True)
class EventSet:
    """Ordered finite set of labeled events, optionally with coordinates.

    Coordinates, when present, put the time component first and share one
    dimension ``d+1 >= 2`` across all events.
    """

    labels: tuple[str, ...]
    coords: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self):
        if not self.labels:
            raise InputError("event set must contain at least one event")
        if any(not isinstance(lab, str) or not lab for lab in self.labels):
            raise InputError("event labels must be nonempty strings")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("event labels must be pairwise distinct")
        if self.coords is not None:
            if len(self.coords) != len(self.labels):
                raise InputError("coords must match the number of events")
            dims = {len(point) for point in self.coords}
            if len(dims) > 1:
                raise InputError("all coordinate vectors must share one dimension")
            if dims and min(dims) < 2:
                raise InputError("coordinate dimension must be at least 2 (time plus space)")

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def index_of(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise InputError(f"unknown event label: {label!r}") from None

    def mask_of(self, subset: Iterable[str]) -> int:
        mask = 0
        for label in subset:
            mask |= 1 << self.index_of(label)
        return mask

    def labels_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.labels[i] for i in iter_bits(mask))


@dataclass(frozen=True)
class CausalRelation:
    """Boolean incidence structure over ``n`` events; row = cause, column = effect."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError("relation needs at least one event")
        if len(self.rows) != self.n:
            raise InputError("relation must have one row per event")
        limit = 1 << self.n
        if any(row < 0 or row >= limit for row in self.rows):
            raise InputError("relation rows must fit the event count")

    def has(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.rows):
            for j in iter_bits(row):
                yield i, j

    @cached_property
    def reflexive(self) -> bool:
        return all(row >> i & 1 for i, row in enumerate(self.rows))

    @cached_property
    def transitive(self) -> bool:
        for row in self.rows:
            through = 0
            for j in iter_bits(row):
                through |= self.rows[j]
            if through & ~row:
                return False
        return True

    @cached_property
    def antisymmetric(self) -> bool:
        for i, row in enumerate(self.rows):
            for j in iter_bits(row):
                if j != i and self.rows[j] >> i & 1:
                    return False
        return True

    @cached_property
    def transpose(self) -> "CausalRelation":
        cols = [0] * self.n
        for i, row in enumerate(self.rows):
            bit = 1 << i
            for j in iter_bits(row):
                cols[j] |= bit
        return CausalRelation(self.n, tuple(cols))


def kplus_closure(raw: CausalRelation) -> CausalRelation:
    """Smallest reflexive and transitive relation containing ``raw``.

    Warshall's closure over bit-packed rows; correct for arbitrary relations,
    cycles included, and idempotent.
    """
    n = raw.n
    rows = list(raw.rows)
    for k in range(n):
        bit = 1 << k
        row_k = rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= row_k
    for i in range(n):
        rows[i] |= 1 << i
    return CausalRelation(n, tuple(rows))


@dataclass(frozen=True)
class CausalSpace:
    """A finite event set together with a raw relation and its closure."""

    events: EventSet
    raw: CausalRelation
    kplus: CausalRelation

    def __post_init__(self):
        if self.raw.n != len(self.events) or self.kplus.n != len(self.events):
            raise InputError("relation size must match the event count")

    @classmethod
    def from_raw(cls, events: EventSet, raw: CausalRelation) -> "CausalSpace":
        return cls(events=events, raw=raw, kplus=kplus_closure(raw))

    @property
    def n(self) -> int:
        return len(self.events)

    def future_mask(self, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= self.kplus.rows[i]
        return out

    def past_mask(self, mask: int) -> int:
        cols = self.kplus.transpose.rows
        out = 0
        for j in iter_bits(mask):
            out |= cols[j]
        return out

    def is_upset_mask(self, mask: int) -> bool:
        return not (self.future_mask(mask) & ~mask)


def future_set(space: CausalSpace, X: Iterable[str]) -> frozenset[str]:
    """All events some member of ``X`` precedes (``X`` included, by reflexivity)."""
    return space.events.labels_of(space.future_mask(space.events.mask_of(X)))


def past_set(space: CausalSpace, X: Iterable[str]) -> frozenset[str]:
    """All events preceding some member of ``X``; mirror of :func:`future_set`."""
    return space.events.labels_of(space.past_mask(space.events.mask_of(X)))


def is_upset(space: CausalSpace, X: Iterable[str]) -> bool:
    """True iff ``X`` already contains its own future."""
    return space.is_upset_mask(space.events.mask_of(X))


def lemma_complement_check(space: CausalSpace, X: Iterable[str]) -> bool:
    """Self-test: ``X`` is future-closed exactly when its complement is past-closed.

    Holds for every subset of every space; exercised exhaustively in tests.
    """
    mask = space.events.mask_of(X)
    comp = space.events.full_mask & ~mask
    left = space.is_upset_mask(mask)
    right = not (space.past_mask(comp) & ~comp)
    return left == right


def enumerate_upsets(space: CausalSpace, max_events: int = DEFAULT_UPSET_BOUND) -> list[frozenset[str]]:
    """All future-closed subsets, as label sets, in increasing mask order."""
    return [space.events.labels_of(mask) for mask in upset_masks(space, max_events)]


def upset_masks(space: CausalSpace, max_events: int = DEFAULT_UPSET_BOUND) -> Iterator[int]:
    n = space.n
    if n > max_events:
        raise BoundExceededError(f"up-set enumeration refuses n={n} events (bound {max_events})")
    return _upset_masks(space)


def _upset_masks(space: CausalSpace) -> Iterator[int]:
    # An up-set must contain the future of each of its members, so membership
    # is one mask comparison per member.
    rows = space.kplus.rows
    for mask in range(1 << space.n):
        closed = True
        rest = mask
        while rest:
            low = rest & -rest
            if rows[low.bit_length() - 1] & ~mask:
                closed = False
                break
            rest ^= low
        if closed:
            yield mask


def find_cycle_pair(space: CausalSpace) -> tuple[str, str] | None:
    """A pair of distinct events preceding each other, if any."""
    rows = space.kplus.rows
    for i in range(space.n):
        for j in iter_bits(rows[i]):
            if j != i and rows[j] >> i & 1:
                return (space.events.labels[i], space.events.labels[j])
    return None


# ---------------------------------------------------------------------------
# Generators


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative recipe for a causal space.

    ``kind`` is one of ``explicit`` (labels plus a pair list), ``minkowski``
    (coordinate points under the closed cone rule), ``sprinkle`` (seeded
    uniform points in a box, then the cone rule), or ``random-dag`` (seeded
    random edges respecting the vertex order).
    """

    kind: str
    labels: tuple[str, ...] | None = None
    pairs: tuple[tuple[str, str], ...] | None = None
    points: tuple[tuple[Fraction, ...], ...] | None = None
    n: int | None = None
    dim: int | None = None
    box: tuple[tuple[Fraction, Fraction], ...] | None = None
    edge_prob: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind == "explicit":
            if self.labels is None or self.pairs is None:
                raise InputError("explicit generator needs labels and pairs")
        elif self.kind == "minkowski":
            if self.points is None:
                raise InputError("minkowski generator needs points")
        elif self.kind == "sprinkle":
            if self.n is None or self.dim is None or self.box is None or self.seed is None:
                raise InputError("sprinkle generator needs n, dim, box, and seed")
        elif self.kind == "random-dag":
            if self.n is None or self.edge_prob is None or self.seed is None:
                raise InputError("random-dag generator needs n, edge probability, and seed")
        else:
            raise InputError(f"unknown generator kind: {self.kind!r}")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")


def default_labels(n: int) -> tuple[str, ...]:
    width = len(str(n - 1)) if n > 1 else 1
    return tuple(f"e{i:0{width}d}" for i in range(n))


def explicit_space(labels: Sequence[str], pairs: Iterable[tuple[str, str]]) -> CausalSpace:
    events = EventSet(labels=tuple(labels))
    rows = [0] * len(events)
    for cause, effect in pairs:
        rows[events.index_of(cause)] |= 1 << events.index_of(effect)
    return CausalSpace.from_raw(events, CausalRelation(len(events), tuple(rows)))


def _cone_rows(points: Sequence[tuple[Fraction, ...]]) -> tuple[int, ...]:
    """Closed-cone incidence: p precedes q iff the time gap covers the spatial gap.

    Decided exactly as ``dt >= 0 and dt^2 >= sum(dx_i^2)`` after scaling all
    coordinates to a common integer denominator, so no square root is taken.
    """
    n = len(points)
    dim = len(points[0])
    den = lcm(*(c.denominator for point in points for c in point)) if points else 1
    scaled = [[int(c * den) for c in point] for point in points]
    peak = max((abs(c) for row in scaled for c in row), default=0)
    rows = [0] * n
    if n > 1 and (2 * peak) ** 2 * max(dim - 1, 1) < 2**62:
        arr = np.array(scaled, dtype=np.int64)
        dt = arr[None, :, 0] - arr[:, None, 0]
        sq = np.zeros((n, n), dtype=np.int64)
        for axis in range(1, dim):
            dx = arr[None, :, axis] - arr[:, None, axis]
            sq += dx * dx
        rel = (dt >= 0) & (dt * dt >= sq)
        for i in range(n):
            packed = np.packbits(rel[i], bitorder="little").tobytes()
            rows[i] = int.from_bytes(packed, "little")
    else:
        for i in range(n):
            pi = scaled[i]
            for j in range(n):
                dt = scaled[j][0] - pi[0]
                if dt < 0:
                    continue
                sq = sum((scaled[j][a] - pi[a]) ** 2 for a in range(1, dim))
                if dt * dt >= sq:
                    rows[i] |= 1 << j
    return tuple(rows)


def minkowski_space(points: Sequence[Sequence], labels: Sequence[str] | None = None) -> CausalSpace:
    pts = tuple(tuple(_as_fraction(c) for c in point) for point in points)
    if not pts:
        raise InputError("minkowski generator needs at least one point")
    if len({len(p) for p in pts}) != 1 or len(pts[0]) < 2:
        raise InputError("points must share one dimension of at least 2")
    labs = tuple(labels) if labels is not None else default_labels(len(pts))
    events = EventSet(labels=labs, coords=pts)
    return CausalSpace.from_raw(events, CausalRelation(len(pts), _cone_rows(pts)))


def sprinkle_space(
    n: int,
    dim: int,
    box: Sequence[Sequence],
    seed: int,
    labels: Sequence[str] | None = None,
) -> CausalSpace:
    if n < 1:
        raise InputError("sprinkle needs at least one event")
    if dim < 2:
        raise InputError("sprinkle dimension must be at least 2 (time plus space)")
    bounds = tuple((_as_fraction(lo), _as_fraction(hi)) for lo, hi in box)
    if len(bounds) != dim:
        raise InputError("box must provide one [lo, hi] interval per dimension")
    if any(lo > hi for lo, hi in bounds):
        raise InputError("box intervals must satisfy lo <= hi")
    rng = random.Random(seed)
    points = [
        tuple(lo + (hi - lo) * Fraction(rng.randrange(SPRINKLE_GRID + 1), SPRINKLE_GRID) for lo, hi in bounds)
        for _ in range(n)
    ]
    return minkowski_space(points, labels=labels if labels is not None else default_labels(n))


def random_dag_space(
    n: int,
    edge_prob: float,
    seed: int,
    labels: Sequence[str] | None = None,
) -> CausalSpace:
    if n < 1:
        raise InputError("random-dag needs at least one event")
    if not 0.0 <= edge_prob <= 1.0:
        raise InputError("edge probability must lie in [0, 1]")
    rng = random.Random(seed)
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                rows[i] |= 1 << j
    events = EventSet(labels=tuple(labels) if labels is not None else default_labels(n))
    return CausalSpace.from_raw(events, CausalRelation(n, tuple(rows)))


def generate(spec: GeneratorSpec) -> CausalSpace:
    """Materialize a generator recipe; deterministic for a fixed seed."""
    if spec.kind == "explicit":
        return explicit_space(spec.labels, spec.pairs)
    if spec.kind == "minkowski":
        return minkowski_space(spec.points, labels=spec.labels)
    if spec.kind == "sprinkle":
        return sprinkle_space(spec.n, spec.dim, spec.box, spec.seed, labels=spec.labels)
    if spec.kind == "random-dag":
        return random_dag_space(spec.n, spec.edge_prob, spec.seed, labels=spec.labels)
    raise InputError(f"unknown generator kind: {spec.kind!r}")


# ---------------------------------------------------------------------------
# JSON formats


def generator_spec_from_jsonable(obj) -> GeneratorSpec:
    if not isinstance(obj, dict):
        raise InputError("spacetime spec must be a JSON object")
    if "kind" in obj:
        kind = obj["kind"]
        labels = tuple(obj["events"]) if "events" in obj else None
        if kind == "minkowski":
            points = obj.get("points")
            if not isinstance(points, list):
                raise InputError("minkowski spec needs a list of points")
            return GeneratorSpec(
                kind="minkowski",
                labels=labels,
                points=tuple(tuple(_as_fraction(c) for c in point) for point in points),
            )
        if kind == "sprinkle":
            try:
                box = tuple((_as_fraction(lo), _as_fraction(hi)) for lo, hi in obj["box"])
                return GeneratorSpec(
                    kind="sprinkle",
                    labels=labels,
                    n=int(obj["n"]),
                    dim=int(obj["dim"]),
                    box=box,
                    seed=int(obj["seed"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"malformed sprinkle spec: {exc}") from exc
        if kind == "random-dag":
            try:
                return GeneratorSpec(
                    kind="random-dag",
                    labels=labels,
                    n=int(obj["n"]),
                    edge_prob=float(_as_fraction(obj["p"])),
                    seed=int(obj["seed"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"malformed random-dag spec: {exc}") from exc
        if kind == "explicit":
            return _explicit_spec(obj.get("events"), obj.get("pairs"))
        raise InputError(f"unknown generator kind: {kind!r}")
    if "events" in obj and "relation" in obj:
        relation = obj["relation"]
        if not isinstance(relation, dict) or relation.get("kind") != "explicit":
            raise InputError("embedded relation must have kind 'explicit'")
        return _explicit_spec(obj["events"], relation.get("pairs"))
    raise InputError("spacetime spec needs either a 'kind' or 'events' plus 'relation'")


def _explicit_spec(events, pairs) -> GeneratorSpec:
    if not isinstance(events, list) or not isinstance(pairs, list):
        raise InputError("explicit spec needs an event list and a pair list")
    clean = []
    for pair in pairs:
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError(f"malformed relation pair: {pair!r}")
        clean.append((str(pair[0]), str(pair[1])))
    return GeneratorSpec(kind="explicit", labels=tuple(str(e) for e in events), pairs=tuple(clean))


def space_from_jsonable(obj) -> CausalSpace:
    return generate(generator_spec_from_jsonable(obj))


def space_to_jsonable(space: CausalSpace, relation: str = "raw") -> dict:
    """Explicit spacetime object; pair list sorted by (cause, effect) label."""
    rel = space.raw if relation == "raw" else space.kplus
    labels = space.events.labels
    pairs = sorted([labels[i], labels[j]] for i, j in rel.pairs())
    return {"events": list(labels), "relation": {"kind": "explicit", "pairs": pairs}}
