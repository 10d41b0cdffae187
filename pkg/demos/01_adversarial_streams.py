"""The input model: a permuted good set with blind noise injections.

The adversary commits (slot, noise-id) pairs knowing only how many good
elements there are.  The good permutation is sampled afterwards, so noise
position in the realized stream is relative, never reactive.
"""

from injectstream import (
    Element,
    InjectionPlan,
    InstanceSplit,
    build_stream,
    enumerate_streams,
    make_plan,
)

split = InstanceSplit(
    good=tuple(Element(f"g{i}") for i in range(4)),
    noise=tuple(Element(f"n{i}") for i in range(3)),
)

print("good:", [e.id for e in split.good])
print("noise:", [e.id for e in split.noise])

for strategy in ("front", "back", "spread"):
    plan = make_plan(split, strategy)
    print(f"\n{strategy:>6} plan:", plan.entries)
    for seed in (0, 1):
        stream = build_stream(split, plan, seed=seed)
        print(f"  seed {seed}:", " ".join(e.id for e in stream))

# the front plan puts all noise before slot 0 for every permutation
plan = InjectionPlan(tuple((0, e.id) for e in split.noise))
streams = enumerate_streams(split, plan)
print(f"\nenumerated {len(streams)} permutations; noise prefix is invariant:")
for s in streams[:4]:
    print("  ", " ".join(e.id for e in s))
