"""Reference d-separation by enumerating every simple path in the skeleton."""

import itertools


def descendants(edges, v):
    out, stack = set(), [v]
    while stack:
        u = stack.pop()
        for p, c in edges:
            if p == u and c not in out:
                out.add(c)
                stack.append(c)
    return out


def simple_paths(nodes, edges, x, y):
    adj = {v: set() for v in nodes}
    for p, c in edges:
        adj[p].add(c)
        adj[c].add(p)

    def walk(path):
        if path[-1] == y:
            yield list(path)
            return
        for nb in sorted(adj[path[-1]]):
            if nb not in path:
                yield from walk(path + [nb])

    yield from walk([x])


def path_active(path, edges, z):
    es = set(edges)
    for a, b, c in zip(path, path[1:], path[2:]):
        collider = (a, b) in es and (c, b) in es
        if collider:
            if b not in z and not (descendants(edges, b) & z):
                return False
        elif b in z:
            return False
    return True


def d_separated(nodes, edges, x, y, z):
    z = set(z)
    return not any(path_active(p, edges, z) for p in simple_paths(nodes, edges, x, y))


def all_ci_triples(nodes, edges):
    """Every (x, y, Z) with x, y outside Z that the graph d-separates."""
    for x, y in itertools.permutations(nodes, 2):
        rest = [v for v in nodes if v not in (x, y)]
        for k in range(len(rest) + 1):
            for z in itertools.combinations(rest, k):
                if d_separated(nodes, edges, x, y, z):
                    yield x, y, frozenset(z)


def blanket(nodes, edges, x):
    """Smallest S with x d-separated from every node outside S given S."""
    rest = [v for v in nodes if v != x]
    for k in range(len(rest) + 1):
        for s in itertools.combinations(rest, k):
            others = [v for v in rest if v not in s]
            if all(d_separated(nodes, edges, x, y, s) for y in others):
                return frozenset(s)
    raise AssertionError("unreachable")


def expected_ci_relations(nodes, edges):
    out = set()
    for x in nodes:
        s = blanket(nodes, edges, x)
        for y in nodes:
            if y != x and y not in s:
                assert d_separated(nodes, edges, x, y, s)
                out.add((x, y, s))
    return out
