"""Exact minimum-cost flow over integer capacities and signed integer costs.

Successive shortest augmenting paths with node potentials: one
label-correcting pass establishes initial potentials (the reduction
networks contain negative-cost arcs), after which Dijkstra on reduced
costs finds each augmenting path.  Each augmentation pushes the full path
bottleneck.  Parallel arcs are kept distinct.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .errors import GraphError, NegativeCycleError

INF_CAP = 1 << 60


class FlowNetwork:
    """Directed network with integer arc capacities/costs and node supplies
    (positive = source, negative = demand)."""

    def __init__(self, node_count: int = 0):
        self.node_count = node_count
        self.tail: list[int] = []
        self.head: list[int] = []
        self.capacity: list[int] = []
        self.cost: list[int] = []
        self.supply: list[int] = [0] * node_count

    def add_node(self) -> int:
        self.supply.append(0)
        self.node_count += 1
        return self.node_count - 1

    def add_arc(self, tail: int, head: int, capacity: int, cost: int) -> int:
        if not (0 <= tail < self.node_count and 0 <= head < self.node_count):
            raise GraphError(f"arc ({tail},{head}) references unknown node")
        if capacity < 0:
            raise GraphError(f"arc capacity must be >= 0, got {capacity}")
        self.tail.append(tail)
        self.head.append(head)
        self.capacity.append(int(capacity))
        self.cost.append(int(cost))
        return len(self.tail) - 1

    def set_supply(self, node: int, amount: int) -> None:
        self.supply[node] = int(amount)

    @property
    def arc_count(self) -> int:
        return len(self.tail)


@dataclass
class FlowResult:
    flow: list[int]
    total_cost: int
    feasible: bool
    potentials: list[int]


def _initial_potentials(n: int, first: list[int], nxt: list[int], to: list[int],
                        cap: list[int], cost: list[int]) -> list[int]:
    """Label-correcting pass from a virtual source connected to every node
    with cost 0.  The resulting distances make every residual reduced cost
    nonnegative; a node relaxed >= n times witnesses a negative cycle."""
    dist = [0] * n
    in_queue = [True] * n
    relax_count = [0] * n
    queue = deque(range(n))
    while queue:
        u = queue.popleft()
        in_queue[u] = False
        du = dist[u]
        a = first[u]
        while a != -1:
            if cap[a] > 0:
                v = to[a]
                nd = du + cost[a]
                if nd < dist[v]:
                    dist[v] = nd
                    relax_count[v] += 1
                    if relax_count[v] >= n + 1:
                        raise NegativeCycleError(
                            "negative-cost cycle of positive capacity detected"
                        )
                    if not in_queue[v]:
                        in_queue[v] = True
                        queue.append(v)
            a = nxt[a]
    return dist


def solve_min_cost_flow(net: FlowNetwork) -> FlowResult:
    """Minimum-cost integral flow satisfying all node supplies.

    Returns ``feasible=False`` (with the best partial routing's flow values)
    when the supplies cannot be met.  Raises NegativeCycleError when the
    input network contains a negative-cost cycle of positive capacity.
    """
    if sum(net.supply) != 0:
        raise GraphError("node supplies must sum to zero")
    n = net.node_count + 2
    s, t = net.node_count, net.node_count + 1

    # Residual representation: arc 2k is the k-th forward arc, 2k+1 its reverse.
    to: list[int] = []
    cap: list[int] = []
    cost: list[int] = []
    first = [-1] * n
    nxt: list[int] = []

    def residual_arc(u: int, v: int, c: int, w: int) -> None:
        for (a, b, cc, ww) in ((u, v, c, w), (v, u, 0, -w)):
            to.append(b)
            cap.append(cc)
            cost.append(ww)
            nxt.append(first[a])
            first[a] = len(to) - 1

    for k in range(net.arc_count):
        residual_arc(net.tail[k], net.head[k], net.capacity[k], net.cost[k])
    total_supply = 0
    for node, sup in enumerate(net.supply):
        if sup > 0:
            residual_arc(s, node, sup, 0)
            total_supply += sup
        elif sup < 0:
            residual_arc(node, t, -sup, 0)

    pot = _initial_potentials(n, first, nxt, to, cap, cost)

    # Costs and potentials are all integers, so Dijkstra labels are too:
    # each heap entry packs (label << shift) | node into one int, which
    # compares faster than a tuple.  Once the sink is settled every
    # unsettled label is >= dist[t], so the loop can stop there (the
    # potential update caps those labels at dist[t] anyway).
    shift = n.bit_length()
    node_mask = (1 << shift) - 1
    big = 1 << 62
    dist = [0] * n
    parent_arc = [-1] * n
    heappush, heappop = heapq.heappush, heapq.heappop
    routed = 0
    while routed < total_supply:
        for i in range(n):
            dist[i] = big
            parent_arc[i] = -1
        dist[s] = 0
        done = [False] * n
        heap = [s]
        while heap:
            ent = heappop(heap)
            u = ent & node_mask
            if done[u]:
                continue
            done[u] = True
            if u == t:
                break
            d = ent >> shift
            pu = pot[u]
            a = first[u]
            while a != -1:
                if cap[a] > 0:
                    v = to[a]
                    if not done[v]:
                        nd = d + cost[a] + pu - pot[v]
                        if nd < dist[v]:
                            dist[v] = nd
                            parent_arc[v] = a
                            heappush(heap, (nd << shift) | v)
                a = nxt[a]
        if not done[t]:
            break
        dt = dist[t]
        for i in range(n):
            pot[i] += dist[i] if dist[i] < dt else dt
        # Push the path bottleneck, not unit flow.
        bottleneck = total_supply - routed
        v = t
        while v != s:
            a = parent_arc[v]
            if cap[a] < bottleneck:
                bottleneck = cap[a]
            v = to[a ^ 1]
        v = t
        while v != s:
            a = parent_arc[v]
            cap[a] -= bottleneck
            cap[a ^ 1] += bottleneck
            v = to[a ^ 1]
        routed += bottleneck

    flow = [cap[2 * k + 1] for k in range(net.arc_count)]
    total_cost = sum(f * c for f, c in zip(flow, net.cost))
    return FlowResult(
        flow=flow,
        total_cost=total_cost,
        feasible=(routed == total_supply),
        potentials=pot[: net.node_count],
    )


def validate_flow(net: FlowNetwork, result: FlowResult) -> bool:
    """Capacity bounds and conservation, recomputed from scratch."""
    if len(result.flow) != net.arc_count:
        raise GraphError("flow vector length does not match arc count")
    for k, f in enumerate(result.flow):
        if f < 0 or f > net.capacity[k]:
            return False
    balance = [0] * net.node_count
    for k, f in enumerate(result.flow):
        balance[net.tail[k]] -= f
        balance[net.head[k]] += f
    for node in range(net.node_count):
        if balance[node] != -net.supply[node]:
            return False
    if result.total_cost != sum(f * c for f, c in zip(result.flow, net.cost)):
        return False
    return True


def to_dimacs(net: FlowNetwork) -> str:
    """DIMACS min-cost-flow text (1-based nodes), for debugging fixtures."""
    lines = [f"p min {net.node_count} {net.arc_count}"]
    for node, sup in enumerate(net.supply):
        if sup != 0:
            lines.append(f"n {node + 1} {sup}")
    for k in range(net.arc_count):
        lines.append(
            f"a {net.tail[k] + 1} {net.head[k] + 1} 0 {net.capacity[k]} {net.cost[k]}"
        )
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> FlowNetwork:
    net: FlowNetwork | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "min":
                raise GraphError(f"bad DIMACS problem line {lineno}: {raw!r}")
            net = FlowNetwork(int(parts[2]))
        elif parts[0] == "n":
            if net is None:
                raise GraphError("DIMACS node line before problem line")
            net.set_supply(int(parts[1]) - 1, int(parts[2]))
        elif parts[0] == "a":
            if net is None:
                raise GraphError("DIMACS arc line before problem line")
            tail, head, low, capacity, cost = parts[1:6]
            if int(low) != 0:
                raise GraphError("nonzero lower bounds are not supported")
            net.add_arc(int(tail) - 1, int(head) - 1, int(capacity), int(cost))
        else:
            raise GraphError(f"unrecognized DIMACS line {lineno}: {raw!r}")
    if net is None:
        raise GraphError("empty DIMACS input")
    return net
