"""Plain-Python brute force for the corpus instances, independent of the Prolog code."""

import itertools
import re

import networkx as nx

MAP_EDGES = [
    (1, 2), (1, 3), (1, 4), (2, 3), (2, 5), (3, 4), (3, 5), (3, 6), (4, 6), (4, 7), (5, 6), (5, 8),
    (6, 7), (6, 8), (6, 9), (7, 9), (7, 10), (8, 9), (8, 11), (9, 10), (9, 11), (9, 12), (10, 12), (11, 12),
]


def parse_list(text: str) -> list:
    inner = text[text.index("[") + 1 : text.rindex("]")]
    return [int(x) if re.fullmatch(r"-?\d+", x) else x for x in inner.split(",")] if inner else []


def queens_ok(cols) -> bool:
    n = len(cols)
    return sorted(cols) == list(range(1, n + 1)) and all(
        abs(cols[i] - cols[j]) != j - i for i in range(n) for j in range(i + 1, n)
    )


def queens_count(n: int) -> int:
    return sum(1 for p in itertools.permutations(range(1, n + 1)) if queens_ok(p))


def costas_ok(perm) -> bool:
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        return False
    for d in range(1, n):
        diffs = [perm[i + d] - perm[i] for i in range(n - d)]
        if len(set(diffs)) != len(diffs):
            return False
    return True


def costas_count(n: int) -> int:
    # extend prefixes, pruning as soon as a displacement repeats
    count = 0

    def extend(prefix, used):
        nonlocal count
        if len(prefix) == n:
            count += 1
            return
        for v in range(1, n + 1):
            if v in used:
                continue
            cand = prefix + [v]
            k = len(cand) - 1
            if all(cand[k] - cand[k - d] not in {cand[i + d] - cand[i] for i in range(k - d)} for d in range(1, k + 1)):
                extend(cand, used | {v})

    extend([], frozenset())
    return count


def knight_tours(rows=5, cols=5, start=(1, 1), end=(1, 5)) -> list:
    """Every open tour start -> end visiting all squares, as square numbers row by row."""
    idx = lambda r, c: (r - 1) * cols + c  # noqa: E731
    moves = [(-2, -1), (-2, 1), (-1, -2), (-1, 2), (1, -2), (1, 2), (2, -1), (2, 1)]
    total = rows * cols
    tours = []
    path = [start]
    seen = {start}

    def go():
        r, c = path[-1]
        if len(path) == total:
            if path[-1] == end:
                tours.append([idx(*p) for p in path])
            return
        for dr, dc in moves:
            nxt = (r + dr, c + dc)
            if 1 <= nxt[0] <= rows and 1 <= nxt[1] <= cols and nxt not in seen:
                if nxt == end and len(path) != total - 1:
                    continue
                seen.add(nxt)
                path.append(nxt)
                go()
                path.pop()
                seen.discard(nxt)

    go()
    return tours


def dodecahedron_edges() -> set:
    g = nx.dodecahedral_graph()
    return {(u + 1, v + 1) for u, v in g.edges()} | {(v + 1, u + 1) for u, v in g.edges()}


def hamilton_cycles(edges: set, start: int = 1) -> list:
    nodes = {u for u, _ in edges}
    adj = {u: sorted(v for x, v in edges if x == u) for u in nodes}
    out = []

    def go(path, seen):
        if len(path) == len(nodes):
            if start in adj[path[-1]]:
                out.append(path + [start])
            return
        for v in adj[path[-1]]:
            if v not in seen:
                go(path + [v], seen | {v})

    go([start], {start})
    return out


def map_colorings(colors=("red", "green", "blue", "yellow")) -> list:
    neighbours = {r: [a for a, b in MAP_EDGES if b == r] for r in range(1, 13)}
    out = []

    def go(assign):
        r = len(assign) + 1
        if r == 13:
            out.append(list(assign))
            return
        for col in colors:
            if all(assign[n - 1] != col for n in neighbours[r]):
                go(assign + [col])

    go([])
    return out


def sendmore_solutions() -> list:
    sols = []
    for digits in itertools.permutations(range(10), 8):
        s, e, n, d, m, o, r, y = digits
        if s == 0 or m == 0:
            continue
        send = 1000 * s + 100 * e + 10 * n + d
        more = 1000 * m + 100 * o + 10 * r + e
        money = 10000 * m + 1000 * o + 100 * n + 10 * e + y
        if send + more == money:
            sols.append(list(digits))
    return sols


def stable_models() -> list:
    """Stable models of p :- not q. q :- not p. r :- p. r :- q. s :- not r."""
    rules = [("p", [], ["q"]), ("q", [], ["p"]), ("r", ["p"], []), ("r", ["q"], []), ("s", [], ["r"])]
    atoms = ["p", "q", "r", "s"]
    models = []
    for bits in itertools.product([True, False], repeat=4):
        cand = {a for a, b in zip(atoms, bits) if b}
        reduct = [(h, pos) for h, pos, neg in rules if not any(n in cand for n in neg)]
        least = set()
        changed = True
        while changed:
            changed = False
            for h, pos in reduct:
                if h not in least and all(p in least for p in pos):
                    least.add(h)
                    changed = True
        if least == cand:
            models.append(tuple("t" if a in cand else "f" for a in atoms))
    return models


def queens_count_fast(n: int) -> int:
    def place(row, cols, d1, d2):
        if row == n:
            return 1
        total = 0
        for c in range(n):
            if c not in cols and row + c not in d1 and row - c not in d2:
                total += place(row + 1, cols | {c}, d1 | {row + c}, d2 | {row - c})
        return total

    return place(0, frozenset(), frozenset(), frozenset())
