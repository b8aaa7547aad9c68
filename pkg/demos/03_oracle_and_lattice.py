"""Every stable outcome at once, and how they fit together.

On small markets we can simply enumerate every matching, every contract
selection, and keep the ones no pair wants to break.  That brute-force
oracle is the ground truth the solvers are tested against, and it lets
us look at the *set* of stable outcomes rather than a single run.

The set has structure.  Take two stable profiles: letting every
designer keep the better of his two situations yields another stable
profile (the join), as long as nobody is exactly indifferent between
two different partners.  In purely competitive markets the two sides'
interests are exactly opposed, so the best profile for one side is the
worst for the other.
"""

import itertools
from fractions import Fraction as F

from matchgames import (
    Side,
    ZeroSumGame,
    build_instance,
    enumerate_stable,
    extremal_profile,
    genericity_holds,
    is_externally_stable,
    join,
    meet_competitive,
)


def show(inst, profile, indent="  "):
    pairs = profile.matched_pairs()
    if not pairs:
        print(indent + "everyone stays single")
    for i, j in pairs:
        c = profile.chosen[(i, j)]
        print(f"{indent}{inst.men[i]} with {inst.women[j]} on ({c.u}, {c.v})")


games = {
    (0, 0): ZeroSumGame([[3, 1], [0, 2]], 1),
    (0, 1): ZeroSumGame([[2, -1], [1, 1]], 1),
    (1, 0): ZeroSumGame([[1, 0], [-2, 2]], 1),
    (1, 1): ZeroSumGame([[4, 2], [1, 3]], 1),
}
inst = build_instance(
    ["ada", "ben"], ["acme", "zeta"], [F(-2)] * 2, [F(-2)] * 2, games
)

stable = list(enumerate_stable(inst, F(0), "external"))
print(f"== The oracle finds {len(stable)} exactly-stable profiles")
for k, profile in enumerate(stable[:3]):
    print(f"  profile {k}:")
    show(inst, profile, indent="    ")
print(f"  ... and {len(stable) - 3} more")

# Pick two generic stable profiles and merge them both ways.
a, b = next(
    (p, q)
    for p, q in itertools.combinations(stable, 2)
    if genericity_holds(inst, p, q)
)
print("\n== Join of profiles 0 and 1, designers' way and studios' way")
for side, label in ((Side.MAN, "designers pick"), (Side.WOMAN, "studios pick")):
    merged = join(inst, a, b, side)
    assert is_externally_stable(inst, merged, F(0)).holds
    print(f"  {label}:")
    show(inst, merged, indent="    ")

# Zero-sum menus make the market purely competitive: the studios' best
# outcome is simultaneously the designers' worst.
women_best = meet_competitive(inst, a, b)
men_worst = extremal_profile(inst, a, b, Side.MAN, best=False)
agree = women_best.matches == men_worst.matches and all(
    women_best.chosen[key].id == c.id for key, c in men_worst.chosen.items()
)
print("\n== Opposed interests")
print(f"  studios' join equals designers' meet: {agree}")
