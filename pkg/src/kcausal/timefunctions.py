"""Strictly monotone time labelings and the order-theoretic feasibility checks.

A time function assigns rational values to events so that values strictly
increase along the closed causal order.  On a finite space every such
labeling induces the same superlevel structure as some linear extension, so
enumeration runs over linear extensions and sampling over random topological
sorts.  Spaces whose closure has a two-way pair admit no time function at
all; every operation here fails loudly on them instead of returning vacuous
answers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import BoundExceededError, InputError, NotStablyCausalError
from .measures import Measure, format_rational, integrate, parse_rational
from .structure import CausalSpace, EventSet, find_cycle_pair, iter_bits, upset_masks

__all__ = [
    "TimeFunction",
    "time_function",
    "is_stably_causal",
    "is_strictly_monotone",
    "rank_time_function",
    "enumerate_time_functions",
    "sample_time_function",
    "future_volume_timefn",
    "indicator_time_function",
    "condition4_check",
    "condition5_check",
    "minguzzi_check",
    "timefn_from_jsonable",
    "timefn_to_jsonable",
]

DEFAULT_ENUMERATION_BOUND = 8

SEED_SPAN = 2**64


@dataclass(frozen=True)
class TimeFunction:
    """Rational value per event, aligned with the event order."""

    events: EventSet
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != len(self.events):
            raise InputError("one value per event required")
        if any(not isinstance(v, Fraction) for v in self.values):
            object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def value_of(self, label: str) -> Fraction:
        return self.values[self.events.index_of(label)]

    def superlevel_mask(self, threshold: Fraction, closed: bool = False) -> int:
        """Bit mask of events with value above (or at, if closed) the threshold."""
        mask = 0
        for i, v in enumerate(self.values):
            if v > threshold or (closed and v == threshold):
                mask |= 1 << i
        return mask


def is_stably_causal(space: CausalSpace) -> bool:
    """True iff the closure is antisymmetric, i.e. admits time functions."""
    return space.kplus.antisymmetric


def _require_stably_causal(space: CausalSpace):
    pair = find_cycle_pair(space)
    if pair is not None:
        raise NotStablyCausalError(pair)


def _require_measures_on(space: CausalSpace, mu: Measure, nu: Measure):
    if mu.events.labels != space.events.labels or nu.events.labels != space.events.labels:
        raise InputError("measures live on a different event set than the space")


def is_strictly_monotone(space: CausalSpace, timefn: TimeFunction) -> bool:
    if timefn.events.labels != space.events.labels:
        return False
    values = timefn.values
    for i, row in enumerate(space.kplus.rows):
        for j in iter_bits(row):
            if j != i and values[i] >= values[j]:
                return False
    return True


def time_function(space: CausalSpace, values: Mapping[str, object]) -> TimeFunction:
    """Validated time function from a label-to-value mapping."""
    _require_stably_causal(space)
    labels = space.events.labels
    missing = [x for x in labels if x not in values]
    if missing:
        raise InputError(f"missing time values for events {sorted(missing)}")
    extra = [x for x in values if x not in space.events.index]
    if extra:
        raise InputError(f"time values for unknown events {sorted(extra)}")
    timefn = TimeFunction(
        events=space.events,
        values=tuple(parse_rational(values[x]) for x in labels),
    )
    if not is_strictly_monotone(space, timefn):
        raise InputError("values do not strictly increase along the causal order")
    return timefn


def _strict_predecessor_masks(space: CausalSpace) -> list[int]:
    cols = space.kplus.transpose.rows
    return [cols[j] & ~(1 << j) for j in range(space.n)]


def _linear_extensions(space: CausalSpace) -> Iterator[tuple[int, ...]]:
    # Streams extensions in lexicographic order of event indices; the first
    # one is the greedy minimal-index topological order.
    n = space.n
    preds = _strict_predecessor_masks(space)
    order: list[int] = []

    def extend(placed: int) -> Iterator[tuple[int, ...]]:
        if len(order) == n:
            yield tuple(order)
            return
        for j in range(n):
            bit = 1 << j
            if placed & bit or preds[j] & ~placed:
                continue
            order.append(j)
            yield from extend(placed | bit)
            order.pop()

    return extend(0)


def _rank_values(space: CausalSpace, order: tuple[int, ...]) -> TimeFunction:
    values = [Fraction(0)] * space.n
    for rank, j in enumerate(order):
        values[j] = Fraction(rank)
    return TimeFunction(events=space.events, values=tuple(values))


def rank_time_function(space: CausalSpace) -> TimeFunction:
    """Canonical integer-valued time function (first linear extension)."""
    _require_stably_causal(space)
    return _rank_values(space, next(iter(_linear_extensions(space))))


def enumerate_time_functions(
    space: CausalSpace,
    max_events: int = DEFAULT_ENUMERATION_BOUND,
) -> list[TimeFunction]:
    """All linear extensions as rank-valued time functions.

    Complete up to order-isomorphism of value assignments: any time function
    induces the same superlevel sets as one of these.
    """
    _require_stably_causal(space)
    if space.n > max_events:
        raise BoundExceededError(
            f"extension enumeration refuses n={space.n} events (bound {max_events})"
        )
    return [_rank_values(space, order) for order in _linear_extensions(space)]


def sample_time_function(space: CausalSpace, seed: int) -> TimeFunction:
    """Random linear extension with strictly increasing random rational values."""
    _require_stably_causal(space)
    rng = random.Random(seed)
    n = space.n
    preds = _strict_predecessor_masks(space)
    placed = 0
    level = Fraction(rng.randrange(0, 24), 24)
    values = [Fraction(0)] * n
    for _ in range(n):
        ready = [j for j in range(n) if not placed >> j & 1 and not preds[j] & ~placed]
        j = rng.choice(ready)
        values[j] = level
        placed |= 1 << j
        level += Fraction(rng.randrange(1, 25), 24)
    return TimeFunction(events=space.events, values=tuple(values))


def future_volume_timefn(space: CausalSpace, eta: Measure, lam, y: Iterable[str]) -> TimeFunction:
    """Time function ``t(p) = -eta(F(p) & Y) - lam * eta(F(p) - Y)``.

    ``F(p)`` is the reflexive causal future of ``p`` and ``Y`` must be closed
    under causal pasts.  With full-support ``eta`` and ``lam`` in (0, 1] the
    result is strictly monotone, and ``eta(F(p) & Y) > 0`` exactly when
    ``p`` lies in ``Y``.
    """
    _require_stably_causal(space)
    if eta.events.labels != space.events.labels:
        raise InputError("reference measure lives on a different event set")
    if not eta.admissible:
        raise InputError("reference measure must put positive weight on every event")
    lam = parse_rational(lam)
    if not 0 < lam <= 1:
        raise InputError(f"mixing coefficient must lie in (0, 1], got {lam}")
    y_mask = space.events.mask_of(y)
    if space.past_mask(y_mask) & ~y_mask:
        raise InputError("the region must be closed under causal pasts")
    rows = space.kplus.rows
    values = tuple(
        -eta.mass_of_mask(rows[i] & y_mask) - lam * eta.mass_of_mask(rows[i] & ~y_mask)
        for i in range(space.n)
    )
    return TimeFunction(events=space.events, values=values)


def indicator_time_function(space: CausalSpace, subset: Iterable[str], epsilon=None) -> TimeFunction:
    """Strictly monotone perturbation ``chi_U + epsilon * t0`` of an up-set indicator.

    ``t0`` is the canonical rank extension.  The default epsilon,
    ``1 / (2 * (1 + max t0 - min t0))``, keeps the perturbation below 1/2, so
    the superlevel set above 1/2 recovers ``U`` exactly.
    """
    _require_stably_causal(space)
    mask = space.events.mask_of(subset)
    if not space.is_upset_mask(mask):
        raise InputError("indicator construction needs a future-closed subset")
    t0 = rank_time_function(space)
    spread = max(t0.values) - min(t0.values)
    if epsilon is None:
        epsilon = Fraction(1, 2) / (1 + spread)
    else:
        epsilon = parse_rational(epsilon)
    if not (epsilon > 0 and epsilon * spread < Fraction(1, 2)):
        raise InputError("epsilon must be positive and keep the perturbation below 1/2")
    values = tuple(
        (1 if mask >> i & 1 else 0) + epsilon * t0.values[i] for i in range(space.n)
    )
    return TimeFunction(events=space.events, values=values)


def _thresholds(values: tuple[Fraction, ...], closed: bool) -> list[Fraction]:
    # Superlevel sets are piecewise constant in the threshold: midpoints plus
    # one value past each end cover every open half-line; closed half-lines
    # additionally change at the values themselves.
    distinct = sorted(set(values))
    out = [distinct[0] - 1]
    out.extend((lo + hi) / 2 for lo, hi in zip(distinct, distinct[1:]))
    out.append(distinct[-1] + 1)
    if closed:
        out.extend(distinct)
    return out


def _superlevels_dominated(mu: Measure, nu: Measure, timefn: TimeFunction, closed: bool) -> bool:
    for alpha in _thresholds(timefn.values, closed):
        mask = timefn.superlevel_mask(alpha, closed=closed)
        if mu.mass_of_mask(mask) > nu.mass_of_mask(mask):
            return False
    return True


def _sampled_timefns(space: CausalSpace, samples: int, seed: int) -> Iterator[TimeFunction]:
    if samples < 1:
        raise InputError("sample count must be positive")
    rng = random.Random(seed)
    for _ in range(samples):
        yield sample_time_function(space, rng.randrange(SEED_SPAN))


def condition4_check(
    space: CausalSpace,
    mu: Measure,
    nu: Measure,
    half_line: str = "open",
    mode: str = "exhaustive",
    samples: int = 32,
    seed: int = 0,
    max_events: int = DEFAULT_ENUMERATION_BOUND,
) -> bool:
    """Superlevel-set mass inequality over time functions.

    Exhaustive mode quantifies over all linear extensions and all
    threshold-distinct half-lines; sampled mode is a seeded falsifier.  The
    open and closed half-line variants agree on every instance.
    """
    if half_line not in ("open", "closed"):
        raise InputError(f"unknown half-line variant: {half_line!r}")
    _require_stably_causal(space)
    _require_measures_on(space, mu, nu)
    closed = half_line == "closed"
    if mode == "exhaustive":
        timefns: Iterable[TimeFunction] = enumerate_time_functions(space, max_events)
    elif mode == "sampled":
        timefns = _sampled_timefns(space, samples, seed)
    else:
        raise InputError(f"unknown mode: {mode!r}")
    return all(_superlevels_dominated(mu, nu, t, closed) for t in timefns)


def condition5_check(
    space: CausalSpace,
    mu: Measure,
    nu: Measure,
    mode: str = "exact",
    samples: int = 32,
    seed: int = 0,
    max_events: int = 20,
) -> bool:
    """Integral inequality ``integrate(mu, t) <= integrate(nu, t)`` over time functions.

    Sampled mode is a falsifier over seeded samples.  Exact mode decides the
    full quantified statement: it holds iff every up-set satisfies the mass
    inequality, because superlevel sets of time functions are up-sets and any
    violating up-set yields a violating perturbed indicator, which exact mode
    constructs and verifies before answering false.
    """
    _require_stably_causal(space)
    _require_measures_on(space, mu, nu)
    if mode == "sampled":
        return all(
            integrate(mu, t) <= integrate(nu, t)
            for t in _sampled_timefns(space, samples, seed)
        )
    if mode != "exact":
        raise InputError(f"unknown mode: {mode!r}")
    for mask in upset_masks(space, max_events):
        gap = mu.mass_of_mask(mask) - nu.mass_of_mask(mask)
        if gap > 0:
            t0 = rank_time_function(space)
            spread = max(t0.values) - min(t0.values)
            witness = indicator_time_function(
                space,
                space.events.labels_of(mask),
                epsilon=gap * Fraction(1, 2) / (1 + spread),
            )
            if integrate(mu, witness) <= integrate(nu, witness):
                raise AssertionError("perturbed indicator failed to witness the violation")
            return False
    return True


def minguzzi_check(
    space: CausalSpace,
    p: str,
    q: str,
    max_events: int = DEFAULT_ENUMERATION_BOUND,
) -> bool:
    """True iff every enumerated time function puts ``p`` no later than ``q``.

    On a stably causal space this holds exactly when ``q`` lies in the closed
    causal future of ``p``.
    """
    _require_stably_causal(space)
    if space.n > max_events:
        raise BoundExceededError(
            f"extension enumeration refuses n={space.n} events (bound {max_events})"
        )
    i = space.events.index_of(p)
    j = space.events.index_of(q)
    if i == j:
        return True
    for order in _linear_extensions(space):
        if order.index(i) > order.index(j):
            return False
    return True


# ---------------------------------------------------------------------------
# JSON formats


def timefn_to_jsonable(timefn: TimeFunction) -> dict:
    labels = timefn.events.labels
    return {"values": {labels[i]: format_rational(v) for i, v in enumerate(timefn.values)}}


def timefn_from_jsonable(obj, space: CausalSpace) -> TimeFunction:
    if not isinstance(obj, dict) or not isinstance(obj.get("values"), dict):
        raise InputError("time function must be an object with a 'values' mapping")
    return time_function(space, obj["values"])
