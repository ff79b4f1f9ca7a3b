"""Run-time assertions for lockstep tests of order-sensitive mode.

Positions in the search tree are compared by branch path: the clause index
taken at each choice-point, root first. Two agents working on disjoint
parts of the tree diverge at some shared choice-point, and the smaller
index there is the left one.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class LeftmostChecker:
    """Records every side-effect executed while some live work lay to its left."""

    agents: list = field(default_factory=list)
    in_flight: list = field(default_factory=list)  # (receiver, receiver epoch, key)
    violations: list = field(default_factory=list)
    effects: int = 0

    def attach(self, team, ctx):
        self.agents = team
        ctx.on_effect = self.on_effect
        previous = ctx.on_share

        def on_share(agent, requester, payload, plan):
            self.in_flight.append((requester, payload.receiver_epoch, payload.receiver_key))
            if previous is not None:
                previous(agent, requester, payload, plan)

        ctx.on_share = on_share
        return self

    def on_effect(self, agent):
        self.effects += 1
        here = agent.engine.branch_path()
        self.in_flight = [f for f in self.in_flight if self.agents[f[0]].epoch < f[1]]
        for other in self.agents:
            if other is agent or other.halted or other.engine.stopped is not None:
                continue
            there = other.engine.branch_path()
            if there < here:
                self.violations.append((agent.rank, other.rank, here, there))
        for receiver, _, key in self.in_flight:
            if key < here:
                self.violations.append((agent.rank, receiver, here, key))


def vectors_converged(team) -> bool:
    """All linear vectors agree on the relative order of the ranks they share."""
    vectors = [a.vector for a in team]
    return all(a.relative_order_agrees(b) for i, a in enumerate(vectors) for b in vectors[i + 1 :])
