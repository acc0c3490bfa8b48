"""Couplings and the decision procedure for causal precedence of measures.

``decide_k_causal`` answers whether one measure can be transported onto
another along the closed causal order, by exact max-flow over the bipartite
support graph.  A feasible answer carries a witness coupling; an infeasible
one carries a violating event subset extracted from the min cut, falsifying
the marginal inequality ``mu(B) <= nu(future of B)``.  ``strassen_check`` is
the independent brute-force oracle: it tests that inequality and its dual on
every subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import lcm
from typing import Iterable, Mapping

from .errors import BoundExceededError, InputError
from .measures import Measure, format_rational, parse_rational
from .structure import CausalSpace, EventSet, upset_masks

__all__ = [
    "Coupling",
    "Certificate",
    "coupling",
    "identity_coupling",
    "product_coupling",
    "marginals",
    "verify_coupling",
    "compose_couplings",
    "mix_couplings",
    "decide_k_causal",
    "strassen_check",
    "condition2_check",
    "condition3_check",
    "coupling_from_jsonable",
    "coupling_to_jsonable",
    "certificate_to_jsonable",
]

DEFAULT_ORACLE_BOUND = 20


@dataclass(frozen=True)
class Coupling:
    """Sparse joint probability vector over ordered event pairs.

    ``entries`` holds ``(cause index, effect index, weight)`` triples with
    strictly positive weights, sorted by index pair; total mass is exactly 1.
    """

    events: EventSet
    entries: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        n = len(self.events)
        seen = set()
        total = Fraction(0)
        for i, j, w in self.entries:
            if not (0 <= i < n and 0 <= j < n):
                raise InputError("coupling entry outside the event set")
            if (i, j) in seen:
                raise InputError(f"duplicate coupling entry for pair ({i}, {j})")
            seen.add((i, j))
            if w <= 0:
                raise InputError("coupling entries must carry positive weight")
            total += w
        if total != 1:
            raise InputError(f"coupling mass is {total}, expected exactly 1")
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    def weight(self, cause: str, effect: str) -> Fraction:
        i = self.events.index_of(cause)
        j = self.events.index_of(effect)
        for a, b, w in self.entries:
            if (a, b) == (i, j):
                return w
        return Fraction(0)

    @cached_property
    def _marginals(self) -> tuple[Measure, Measure]:
        n = len(self.events)
        rows = [Fraction(0)] * n
        cols = [Fraction(0)] * n
        for i, j, w in self.entries:
            rows[i] += w
            cols[j] += w
        return (
            Measure(events=self.events, weights=tuple(rows)),
            Measure(events=self.events, weights=tuple(cols)),
        )

    def support_pairs(self) -> Iterable[tuple[int, int]]:
        return ((i, j) for i, j, _ in self.entries)


def coupling(
    events: EventSet,
    weights: Mapping[tuple[str, str], object],
    mu: Measure | None = None,
    nu: Measure | None = None,
) -> Coupling:
    """Coupling from a pair-to-weight mapping, checked against declared marginals."""
    entries = []
    for (cause, effect), value in weights.items():
        w = parse_rational(value)
        if w < 0:
            raise InputError(f"negative weight on pair ({cause!r}, {effect!r})")
        if w:
            entries.append((events.index_of(cause), events.index_of(effect), w))
    omega = Coupling(events=events, entries=tuple(entries))
    first, second = omega._marginals
    if mu is not None and first.weights != mu.weights:
        raise InputError("first marginal does not match the declared measure")
    if nu is not None and second.weights != nu.weights:
        raise InputError("second marginal does not match the declared measure")
    return omega


def identity_coupling(mu: Measure) -> Coupling:
    entries = tuple((i, i, w) for i, w in enumerate(mu.weights) if w)
    return Coupling(events=mu.events, entries=entries)


def product_coupling(mu: Measure, nu: Measure) -> Coupling:
    if mu.events.labels != nu.events.labels:
        raise InputError("measures live on different event sets")
    entries = tuple(
        (i, j, a * b)
        for i, a in enumerate(mu.weights)
        if a
        for j, b in enumerate(nu.weights)
        if b
    )
    return Coupling(events=mu.events, entries=entries)


def marginals(omega: Coupling) -> tuple[Measure, Measure]:
    """Row-sum and column-sum measures of a coupling."""
    return omega._marginals


def verify_coupling(space: CausalSpace, omega: Coupling, mu: Measure, nu: Measure) -> bool:
    """True iff the marginals match exactly and all mass sits inside the closure."""
    if omega.events.labels != space.events.labels:
        return False
    first, second = omega._marginals
    if first.weights != mu.weights or second.weights != nu.weights:
        return False
    rows = space.kplus.rows
    return all(rows[i] >> j & 1 for i, j, _ in omega.entries)


def compose_couplings(omega1: Coupling, omega2: Coupling) -> Coupling:
    """Glue two couplings along their shared middle marginal.

    ``weight(p, r) = sum_q w1(p, q) * w2(q, r) / m(q)`` over intermediate
    events with positive mass ``m``; zero-mass intermediates are skipped.
    """
    if omega1.events.labels != omega2.events.labels:
        raise InputError("couplings live on different event sets")
    middle_out = omega1._marginals[1]
    middle_in = omega2._marginals[0]
    if middle_out.weights != middle_in.weights:
        raise InputError("intermediate marginals do not match")
    by_middle: dict[int, list[tuple[int, Fraction]]] = {}
    for q, r, w in omega2.entries:
        by_middle.setdefault(q, []).append((r, w))
    glued: dict[tuple[int, int], Fraction] = {}
    for p, q, w1 in omega1.entries:
        m = middle_out.weights[q]
        for r, w2 in by_middle.get(q, []):
            key = (p, r)
            glued[key] = glued.get(key, Fraction(0)) + w1 * w2 / m
    entries = tuple((p, r, w) for (p, r), w in glued.items() if w)
    return Coupling(events=omega1.events, entries=entries)


def mix_couplings(lam, omega1: Coupling, omega2: Coupling) -> Coupling:
    """Entrywise mixture ``lam * omega1 + (1 - lam) * omega2``.

    Mixtures of couplings supported inside the closure stay supported inside
    the closure, which is what makes convex interpolation preserve
    feasibility.
    """
    lam = parse_rational(lam)
    if not 0 <= lam <= 1:
        raise InputError(f"mixture coefficient {lam} outside [0, 1]")
    if omega1.events.labels != omega2.events.labels:
        raise InputError("couplings live on different event sets")
    mixed: dict[tuple[int, int], Fraction] = {}
    for i, j, w in omega1.entries:
        mixed[(i, j)] = lam * w
    for i, j, w in omega2.entries:
        key = (i, j)
        mixed[key] = mixed.get(key, Fraction(0)) + (1 - lam) * w
    entries = tuple((i, j, w) for (i, j), w in mixed.items() if w)
    return Coupling(events=omega1.events, entries=entries)


@dataclass(frozen=True)
class Certificate:
    """Outcome of a precedence decision: a witness coupling or a violating subset."""

    verdict: str
    witness: Coupling | None = None
    violator: frozenset[str] | None = None
    mu_B: Fraction | None = None
    nu_kplus_B: Fraction | None = None

    def __post_init__(self):
        if self.verdict not in ("feasible", "infeasible"):
            raise InputError(f"unknown verdict: {self.verdict!r}")
        if self.verdict == "feasible" and self.witness is None:
            raise InputError("feasible certificate needs a witness coupling")
        if self.verdict == "infeasible" and (
            self.violator is None or self.mu_B is None or self.nu_kplus_B is None
        ):
            raise InputError("infeasible certificate needs a violator and both masses")

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"


def _require_measures_on(space: CausalSpace, mu: Measure, nu: Measure):
    if mu.events.labels != space.events.labels or nu.events.labels != space.events.labels:
        raise InputError("measures live on a different event set than the space")


def decide_k_causal(space: CausalSpace, mu: Measure, nu: Measure) -> Certificate:
    """Decide whether ``mu`` precedes ``nu`` along the closure, with certificate.

    Max-flow on source -> cause (capacity ``mu``), cause -> effect for related
    pairs (capacity above total mass, so cuts never cross the middle), effect
    -> sink (capacity ``nu``).  Feasible iff the max flow is exactly 1; the
    witness reads off the middle-arc flows, the violator reads off the events
    on the source side of the residual min cut.  All arithmetic is integer
    after scaling by the common denominator of both measures.
    """
    _require_measures_on(space, mu, nu)
    den = lcm(mu._common_denominator, nu._common_denominator)
    supply = [int(w * den) for w in mu.weights]
    demand = [int(w * den) for w in nu.weights]
    lefts = [i for i, s in enumerate(supply) if s]
    rights = [j for j, d in enumerate(demand) if d]
    right_pos = {j: k for k, j in enumerate(rights)}

    # Node ids: 0 source, 1 sink, then left nodes, then right nodes.
    node_count = 2 + len(lefts) + len(rights)
    source, sink = 0, 1
    left_id = {i: 2 + k for k, i in enumerate(lefts)}
    right_id = {j: 2 + len(lefts) + k for k, j in enumerate(rights)}

    graph: list[list[int]] = [[] for _ in range(node_count)]
    arc_to: list[int] = []
    arc_cap: list[int] = []

    def add_arc(u: int, v: int, cap: int):
        graph[u].append(len(arc_to))
        arc_to.append(v)
        arc_cap.append(cap)
        graph[v].append(len(arc_to))
        arc_to.append(u)
        arc_cap.append(0)

    for i in lefts:
        add_arc(source, left_id[i], supply[i])
    for j in rights:
        add_arc(right_id[j], sink, demand[j])
    middle_arc: dict[int, tuple[int, int]] = {}
    sentinel = 2 * den
    rows = space.kplus.rows
    for i in lefts:
        row = rows[i]
        for j in rights:
            if row >> j & 1:
                middle_arc[len(arc_to)] = (i, j)
                add_arc(left_id[i], right_id[j], sentinel)

    flow_total = _dinic(graph, arc_to, arc_cap, source, sink)

    if flow_total == den:
        entries = tuple(
            (i, j, Fraction(arc_cap[arc ^ 1], den))
            for arc, (i, j) in middle_arc.items()
            if arc_cap[arc ^ 1]
        )
        witness = Coupling(events=space.events, entries=entries)
        return Certificate(verdict="feasible", witness=witness)

    reachable = _residual_reachable(graph, arc_to, arc_cap, source)
    violator_mask = 0
    for i in lefts:
        if left_id[i] in reachable:
            violator_mask |= 1 << i
    mu_B = mu.mass_of_mask(violator_mask)
    nu_kplus_B = nu.mass_of_mask(space.future_mask(violator_mask))
    if mu_B <= nu_kplus_B:
        raise AssertionError("min-cut extraction produced a non-violating subset")
    return Certificate(
        verdict="infeasible",
        violator=space.events.labels_of(violator_mask),
        mu_B=mu_B,
        nu_kplus_B=nu_kplus_B,
    )


def _dinic(graph, arc_to, arc_cap, source: int, sink: int) -> int:
    total = 0
    n = len(graph)
    while True:
        level = [-1] * n
        level[source] = 0
        queue = [source]
        for u in queue:
            for arc in graph[u]:
                v = arc_to[arc]
                if arc_cap[arc] and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[sink] < 0:
            return total
        ptr = [0] * n
        while True:
            pushed = _augment(graph, arc_to, arc_cap, level, ptr, source, sink)
            if not pushed:
                break
            total += pushed


def _augment(graph, arc_to, arc_cap, level, ptr, source: int, sink: int) -> int:
    # Iterative depth-first search for one augmenting path in the level graph.
    path: list[int] = []
    u = source
    while True:
        if u == sink:
            bottleneck = min(arc_cap[arc] for arc in path)
            for arc in path:
                arc_cap[arc] -= bottleneck
                arc_cap[arc ^ 1] += bottleneck
            return bottleneck
        advanced = False
        while ptr[u] < len(graph[u]):
            arc = graph[u][ptr[u]]
            v = arc_to[arc]
            if arc_cap[arc] and level[v] == level[u] + 1:
                path.append(arc)
                u = v
                advanced = True
                break
            ptr[u] += 1
        if not advanced:
            level[u] = -1
            if not path:
                return 0
            arc = path.pop()
            u = arc_to[arc ^ 1]
            ptr[u] += 1


def _residual_reachable(graph, arc_to, arc_cap, source: int) -> set[int]:
    seen = {source}
    queue = [source]
    for u in queue:
        for arc in graph[u]:
            v = arc_to[arc]
            if arc_cap[arc] and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def strassen_check(
    space: CausalSpace,
    mu: Measure,
    nu: Measure,
    max_events: int = DEFAULT_ORACLE_BOUND,
) -> tuple[bool, frozenset[str] | None]:
    """Brute-force feasibility oracle over every event subset.

    Checks ``mu(B) <= nu(future of B)`` and ``mu(past of B) >= nu(B)`` for all
    ``B``; returns the first violating subset in increasing-size,
    label-lexicographic order.  Intentionally exponential.
    """
    _require_measures_on(space, mu, nu)
    n = space.n
    if n > max_events:
        raise BoundExceededError(f"subset oracle refuses n={n} events (bound {max_events})")
    order = sorted(range(n), key=lambda i: space.events.labels[i])
    for size in range(n + 1):
        for combo in combinations(order, size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if mu.mass_of_mask(mask) > nu.mass_of_mask(space.future_mask(mask)):
                return False, space.events.labels_of(mask)
            if mu.mass_of_mask(space.past_mask(mask)) < nu.mass_of_mask(mask):
                return False, space.events.labels_of(mask)
    return True, None


def condition2_check(
    space: CausalSpace,
    mu: Measure,
    nu: Measure,
    max_events: int = DEFAULT_ORACLE_BOUND,
) -> bool:
    """Future-mass inequality ``mu(future of C) <= nu(future of C)`` over all subsets.

    Every subset of a finite space is compact, so the quantifier runs over the
    full power set.
    """
    _require_measures_on(space, mu, nu)
    n = space.n
    if n > max_events:
        raise BoundExceededError(f"subset check refuses n={n} events (bound {max_events})")
    for mask in range(1 << n):
        future = space.future_mask(mask)
        if mu.mass_of_mask(future) > nu.mass_of_mask(future):
            return False
    return True


def condition3_check(
    space: CausalSpace,
    mu: Measure,
    nu: Measure,
    max_events: int = DEFAULT_ORACLE_BOUND,
) -> bool:
    """Up-set mass inequality ``mu(X) <= nu(X)`` over all future-closed subsets."""
    _require_measures_on(space, mu, nu)
    for mask in upset_masks(space, max_events):
        if mu.mass_of_mask(mask) > nu.mass_of_mask(mask):
            return False
    return True


# ---------------------------------------------------------------------------
# JSON formats


def coupling_to_jsonable(omega: Coupling) -> dict:
    labels = omega.events.labels
    pairs = sorted([labels[i], labels[j], format_rational(w)] for i, j, w in omega.entries)
    return {"pairs": pairs}


def coupling_from_jsonable(obj, events: EventSet) -> Coupling:
    if not isinstance(obj, dict) or not isinstance(obj.get("pairs"), list):
        raise InputError("coupling must be an object with a 'pairs' list")
    weights: dict[tuple[str, str], Fraction] = {}
    for entry in obj["pairs"]:
        if not isinstance(entry, list) or len(entry) != 3:
            raise InputError(f"malformed coupling entry: {entry!r}")
        cause, effect, value = entry
        key = (str(cause), str(effect))
        weights[key] = weights.get(key, Fraction(0)) + parse_rational(value)
    return coupling(events, weights)


def certificate_to_jsonable(cert: Certificate) -> dict:
    if cert.feasible:
        return {"verdict": "feasible", "witness": coupling_to_jsonable(cert.witness)}
    return {
        "verdict": "infeasible",
        "violator": sorted(cert.violator),
        "mu_B": format_rational(cert.mu_B),
        "nu_KplusB": format_rational(cert.nu_kplus_B),
    }
