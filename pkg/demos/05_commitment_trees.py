"""Sequential play under a walk-away constraint.

Inside a couple, play may be sequential: one side moves, the other
responds.  Each player still holds an outside option, and any line of
play that drops someone below their outside option is off the table --
they would simply leave.

Backward induction then runs over the *admissible* part of the tree:
at each node the mover picks the best child whose outcome keeps every
player whole.  Raising one player's outside option can flip choices
far away in the tree.
"""

from fractions import Fraction as F

from matchgames import (
    GameTree,
    InternalNode,
    TerminalNode,
    constrained_spe,
    is_admissible,
    play,
)

# Market entry: the entrant stays out (0, 4) or enters, after which the
# incumbent fights (-1, -1) or accommodates (2, 2).
tree = GameTree(
    ["entrant", "incumbent"],
    {
        0: InternalNode(0, (1, 2)),
        1: TerminalNode((F(0), F(4))),
        2: InternalNode(1, (3, 4)),
        3: TerminalNode((F(-1), F(-1))),
        4: TerminalNode((F(2), F(2))),
    },
    root=0,
)


def solve(outs):
    print(f"\n== Outside options ({outs[0]}, {outs[1]})")
    if not is_admissible(tree, outs):
        print("  no admissible line of play: the couple never forms")
        return
    choices = constrained_spe(tree, outs)
    for node, child in sorted(choices.items()):
        mover = tree.players[tree.nodes[node].player]
        print(f"  at node {node}, {mover} goes to node {child}")
    outcome = play(tree, choices)
    print(f"  outcome: ({outcome[0]}, {outcome[1]})")


# Unconstrained: the usual subgame-perfect answer, enter/accommodate.
solve((F(0), F(0)))

# Raise the incumbent's floor to 3: accommodation (2, 2) now violates
# it, so entering guarantees an inadmissible end; the entrant stays out.
solve((F(0), F(3)))

# Floors nobody can meet: the game is never worth playing.
solve((F(5), F(5)))
