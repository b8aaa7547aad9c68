"""Three classic market models, imported as matching games.

Textbook two-sided markets are special cases of games-on-the-menu: a
preference list is a market whose menus have one cell each; a housing
market is one whose menus are price ladders; a contracts market shares
one set of named contracts between both sides.  The adapters build the
corresponding instance, after which every solver and verifier in the
package applies unchanged.
"""

from fractions import Fraction as F

from matchgames import (
    Side,
    enumerate_stable,
    from_hatfield_milgrom,
    from_ordinal,
    from_shapley_shubik,
    run_propose_dispose,
)

# -- Preference lists ------------------------------------------------
# A rotation market: three stable matchings, one per "tier".
prefs_men = {
    "m0": ["w0", "w1", "w2"],
    "m1": ["w1", "w2", "w0"],
    "m2": ["w2", "w0", "w1"],
}
prefs_women = {
    "w0": ["m1", "m2", "m0"],
    "w1": ["m2", "m0", "m1"],
    "w2": ["m0", "m1", "m2"],
}
inst = from_ordinal(prefs_men, prefs_women)

print("== Preference-list market")
print(f"  stable matchings: {sum(1 for _ in enumerate_stable(inst, F(0), 'external'))}")
for side, label in ((Side.MAN, "men propose "), (Side.WOMAN, "women propose")):
    profile, _ = run_propose_dispose(inst, F(1), proposing_side=side)
    pairs = ", ".join(
        f"{inst.men[i]}-{inst.women[j]}" for i, j in profile.matched_pairs()
    )
    print(f"  {label}: {pairs}")

# -- Unit-price trading ----------------------------------------------
# Sellers with costs, buyers with valuations, integer prices.  A sale
# at price p is the contract where the seller nets p - cost and the
# buyer nets valuation - p.
costs = {"alice": 2, "bob": 5}
valuations = {
    "alice": {"carol": 8, "dora": 6},
    "bob": {"carol": 9, "dora": 4},
}
market = from_shapley_shubik(costs, valuations, (0, 12, 1))

print("\n== Housing market")
profile, _ = run_propose_dispose(market, F(1))
for i, j in profile.matched_pairs():
    c = profile.chosen[(i, j)]
    print(f"  {market.men[i]} sells to {market.women[j]} at price {c.strategy_a}"
          f" (seller nets {c.u}, buyer nets {c.v})")

# Across all exactly-stable outcomes, prices move inside a window.
prices = {}
for profile in enumerate_stable(market, F(0), "external"):
    for i, j in profile.matched_pairs():
        c = profile.chosen[(i, j)]
        prices.setdefault((market.men[i], market.women[j]), set()).add(c.strategy_a)
for (seller, buyer), window in sorted(prices.items()):
    lo, hi = min(window), max(window)
    print(f"  stable prices {seller}->{buyer}: {lo} to {hi}")

# -- Named contracts -------------------------------------------------
# One shared pool of contracts; each relates one man and one woman, and
# each agent ranks the contracts naming them (EMPTY = stay out).
contract_set = ["junior", "senior"]
relations = {"junior": ("m0", "w0"), "senior": ("m0", "w0")}
prefs = {
    "m0": ["senior", "junior", "EMPTY"],
    "w0": ["senior", "junior", "EMPTY"],
}
pool = from_hatfield_milgrom(contract_set, relations, prefs)

print("\n== Contracts market")
profile, _ = run_propose_dispose(pool, F(1))
for i, j in profile.matched_pairs():
    c = profile.chosen[(i, j)]
    print(f"  {pool.men[i]} and {pool.women[j]} sign "
          f"{contract_set[c.strategy_a]!r}")
