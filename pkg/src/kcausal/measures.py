"""Exact-rational probability measures over a finite event set.

All weights are :class:`fractions.Fraction`; feasibility questions downstream
are decided without any tolerance.  Total-variation distance stands in for
narrow convergence, which it coincides with on a finite discrete space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Mapping

from .errors import InputError
from .structure import EventSet, iter_bits, _as_fraction

__all__ = [
    "Measure",
    "parse_rational",
    "format_rational",
    "measure",
    "dirac",
    "uniform_measure",
    "measure_of",
    "tv_distance",
    "convex_combination",
    "integrate",
    "measure_from_jsonable",
    "measure_to_jsonable",
]


def parse_rational(value) -> Fraction:
    """Exact rational from a ``"p/q"``, integer, or decimal string, or a number.

    Binary floats convert to the exact rational value of the float.
    """
    return _as_fraction(value)


def format_rational(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class Measure:
    """Probability vector over an event set; weights nonnegative and sum to 1."""

    events: EventSet
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.events):
            raise InputError("measure needs one weight per event")
        if any(not isinstance(w, Fraction) for w in self.weights):
            object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        negatives = [self.events.labels[i] for i, w in enumerate(self.weights) if w < 0]
        if negatives:
            raise InputError(f"negative weight on {negatives[0]!r}")
        total = sum(self.weights)
        if total != 1:
            raise InputError(f"weights sum to {total}, expected exactly 1")

    @cached_property
    def admissible(self) -> bool:
        """Full support: positive weight on every event."""
        return all(w > 0 for w in self.weights)

    @cached_property
    def _common_denominator(self) -> int:
        return lcm(*(w.denominator for w in self.weights))

    @cached_property
    def _scaled(self) -> tuple[int, ...]:
        den = self._common_denominator
        return tuple(int(w * den) for w in self.weights)

    def weight(self, label: str) -> Fraction:
        return self.weights[self.events.index_of(label)]

    def mass_of_mask(self, mask: int) -> Fraction:
        scaled = self._scaled
        return Fraction(sum(scaled[i] for i in iter_bits(mask)), self._common_denominator)

    def support_mask(self) -> int:
        mask = 0
        for i, w in enumerate(self.weights):
            if w > 0:
                mask |= 1 << i
        return mask


def _require_same_events(mu: Measure, nu: Measure):
    if mu.events.labels != nu.events.labels:
        raise InputError("measures live on different event sets")


def measure(events: EventSet, weights: Mapping[str, object]) -> Measure:
    """Measure from a label-to-weight mapping; absent labels carry zero."""
    vec = [Fraction(0)] * len(events)
    for label, value in weights.items():
        vec[events.index_of(label)] = parse_rational(value)
    return Measure(events=events, weights=tuple(vec))


def dirac(events: EventSet, label: str) -> Measure:
    return measure(events, {label: 1})


def uniform_measure(events: EventSet) -> Measure:
    n = len(events)
    return Measure(events=events, weights=tuple(Fraction(1, n) for _ in range(n)))


def measure_of(mu: Measure, X: Iterable[str]) -> Fraction:
    """Exact mass of a subset of events."""
    return mu.mass_of_mask(mu.events.mask_of(X))


def tv_distance(mu: Measure, nu: Measure) -> Fraction:
    """Total-variation distance, ``(1/2) * sum |mu(p) - nu(p)|``."""
    _require_same_events(mu, nu)
    return sum(abs(a - b) for a, b in zip(mu.weights, nu.weights)) / 2


def convex_combination(lam, mu: Measure, nu: Measure) -> Measure:
    """Pointwise mixture ``lam * mu + (1 - lam) * nu`` for ``lam`` in [0, 1]."""
    lam = parse_rational(lam)
    if not 0 <= lam <= 1:
        raise InputError(f"mixture coefficient {lam} outside [0, 1]")
    _require_same_events(mu, nu)
    weights = tuple(lam * a + (1 - lam) * b for a, b in zip(mu.weights, nu.weights))
    return Measure(events=mu.events, weights=weights)


def integrate(mu: Measure, f) -> Fraction:
    """Expectation of a per-event function; exact when values are rational.

    ``f`` may be a mapping from label to value or an object with per-event
    ``values`` aligned with the event order (e.g. a time function).
    """
    if isinstance(f, Mapping):
        missing = [lab for lab in mu.events.labels if lab not in f]
        if missing:
            raise InputError(f"integrand missing value for {missing[0]!r}")
        vec = [f[lab] for lab in mu.events.labels]
    else:
        vec = list(getattr(f, "values", f))
        if len(vec) != len(mu.events):
            raise InputError("integrand must provide one value per event")
    return sum(v * w for v, w in zip(vec, mu.weights) if w)


def measure_from_jsonable(obj, events: EventSet) -> Measure:
    if not isinstance(obj, dict) or not isinstance(obj.get("weights"), dict):
        raise InputError("measure must be an object with a 'weights' mapping")
    return measure(events, obj["weights"])


def measure_to_jsonable(mu: Measure) -> dict:
    return {
        "weights": {
            lab: format_rational(w) for lab, w in zip(mu.events.labels, mu.weights) if w
        }
    }
