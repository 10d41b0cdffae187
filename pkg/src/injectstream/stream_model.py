"""The adversarial-injections input model.

An instance is split into a good set and a noise set.  The good elements are
permuted uniformly at random; the adversary commits, before seeing that
permutation, to an injection plan that places each noise element at a slot
relative to the good sequence.  Realizing (permutation, plan) yields the
stream the algorithm actually consumes: a flat element order with no
good/noise labels.

Slot convention: slot i means "inject before the (i+1)-th good element", so
slot 0 is the stream front and slot len(good) is the end.  Noise elements
assigned to the same slot appear in the plan's list order.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Hashable, Iterator, Optional, Sequence

from .errors import InvalidInstanceError, PlanValidationError, SizeLimitError
from .rng import CounterRNG, MixedRadixRNG, PhiloxRNG, fisher_yates

ENUMERATION_LIMIT = 8


@dataclass(frozen=True)
class Element:
    """A stream element: an opaque id plus a role-specific payload.

    The payload is a ground-set member reference for submodular instances and
    an edge for matching instances.  It must be hashable and is never mutated.
    """

    id: Hashable
    payload: Any = None


@dataclass(frozen=True)
class InstanceSplit:
    """The good/noise split of an instance (good doubles as the optimum)."""

    good: tuple[Element, ...]
    noise: tuple[Element, ...] = ()

    def __post_init__(self) -> None:
        ids = [e.id for e in self.good] + [e.id for e in self.noise]
        if len(set(ids)) != len(ids):
            raise InvalidInstanceError("element ids must be unique across good and noise")

    @property
    def n_good(self) -> int:
        return len(self.good)

    def noise_by_id(self) -> dict[Hashable, Element]:
        return {e.id: e for e in self.noise}


@dataclass(frozen=True)
class InjectionPlan:
    """Adversary's committed injections: (slot, noise id) pairs in injection order.

    The plan may only depend on the number of good elements, the noise set,
    and the adversary's own randomness.  Nothing here references the
    permutation, which is what makes the adversary blind.
    """

    entries: tuple[tuple[int, Hashable], ...] = ()

    def validate(self, split: InstanceSplit) -> None:
        noise_ids = [e.id for e in split.noise]
        planned = [nid for _, nid in self.entries]
        if Counter(planned) != Counter(noise_ids):
            raise PlanValidationError(
                "plan must place every noise element exactly once "
                f"(planned {planned!r}, noise {noise_ids!r})"
            )
        for slot, nid in self.entries:
            if not 0 <= slot <= split.n_good:
                raise PlanValidationError(
                    f"slot {slot} for noise {nid!r} outside [0, {split.n_good}]"
                )


@dataclass(frozen=True)
class InjectedStream:
    """A realized stream.

    ``order`` is what algorithms consume: elements only, no labels.  The
    realized ``permutation`` of the good elements is recorded for oracles and
    tests; algorithm code must not read it.  ``seed`` is the RNG seed that
    produced the permutation (None for enumerated streams).
    """

    order: tuple[Element, ...]
    permutation: tuple[Element, ...]
    seed: Optional[int] = None

    def __iter__(self) -> Iterator[Element]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


def sample_permutation(
    good: Sequence[Element],
    seed: int,
    rng_factory: type[CounterRNG] = PhiloxRNG,
) -> tuple[Element, ...]:
    """Uniformly permute the good elements, deterministically in the seed.

    ``rng_factory`` defaults to the counter-based production generator; tests
    pass :class:`MixedRadixRNG` to enumerate permutations by seed.
    """
    if len(good) == 0:
        raise InvalidInstanceError("cannot permute an empty good set")
    return tuple(fisher_yates(good, rng_factory(seed)))


def realize_stream(
    split: InstanceSplit,
    plan: InjectionPlan,
    permutation: Sequence[Element],
    seed: Optional[int] = None,
) -> InjectedStream:
    """Interleave a concrete permutation with a validated plan."""
    plan.validate(split)
    if Counter(e.id for e in permutation) != Counter(e.id for e in split.good):
        raise InvalidInstanceError("permutation is not a permutation of the good set")
    noise_of = split.noise_by_id()
    per_slot: list[list[Element]] = [[] for _ in range(split.n_good + 1)]
    for slot, nid in plan.entries:
        per_slot[slot].append(noise_of[nid])
    order: list[Element] = []
    for i, g in enumerate(permutation):
        order.extend(per_slot[i])
        order.append(g)
    order.extend(per_slot[split.n_good])
    return InjectedStream(order=tuple(order), permutation=tuple(permutation), seed=seed)


def build_stream(split: InstanceSplit, plan: InjectionPlan, seed: int) -> InjectedStream:
    """Sample a permutation for the split and realize the plan against it."""
    perm = sample_permutation(split.good, seed)
    return realize_stream(split, plan, perm, seed=seed)


def enumerate_streams(split: InstanceSplit, plan: InjectionPlan) -> list[InjectedStream]:
    """One realized stream per permutation of the good set, in seed order.

    Stream i is the one :func:`build_stream` would produce under the
    mixed-radix test RNG with seed i, so the list covers all |good|!
    permutations exactly once.  Guarded to |good| <= 8.
    """
    n = split.n_good
    if n > ENUMERATION_LIMIT:
        raise SizeLimitError(
            f"enumerate_streams is limited to |good| <= {ENUMERATION_LIMIT}, got {n}"
        )
    if n == 0:
        raise InvalidInstanceError("cannot enumerate permutations of an empty good set")
    streams = []
    for seed in range(math.factorial(n)):
        perm = sample_permutation(split.good, seed, rng_factory=MixedRadixRNG)
        streams.append(realize_stream(split, plan, perm, seed=seed))
    return streams
