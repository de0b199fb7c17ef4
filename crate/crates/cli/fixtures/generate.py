"""Writes default.json: fixture cases with expected tensors computed by brute
force, independently of the Rust code.

    python3 generate.py > default.json
"""

import itertools
import json
import random


def graph(n, edges):
    return {"n": n, "edges": [list(e) for e in edges]}


def adjacency(g):
    adj = set()
    for u, v in g["edges"]:
        adj.add((u, v))
        adj.add((v, u))
    return adj


def flat(digits, n):
    x = 0
    for d in digits:
        x = x * n + d
    return x


def count(host, d, injective):
    n = host["n"]
    adj = adjacency(host)
    g = d["graph"]
    k, l = len(d["inputs"]), len(d["outputs"])
    entries = [0] * n ** (k + l)
    for phi in itertools.product(range(n), repeat=g["n"]):
        if injective and len(set(phi)) != len(phi):
            continue
        if all((phi[u], phi[v]) in adj for u, v in g["edges"]):
            i = [phi[v] for v in d["inputs"]]
            j = [phi[v] for v in d["outputs"]]
            entries[flat(j, n) * n ** k + flat(i, n)] += 1
    return {"n": n, "k": k, "l": l, "entries": entries}


def kernel(values):
    seen = {}
    return tuple(seen.setdefault(x, len(seen)) for x in values)


def partition_that(n, k, l, blocks):
    label = [None] * (k + l)
    for b, block in enumerate(blocks):
        for p in block:
            label[p] = b
    pattern = kernel(label)
    entries = [0] * n ** (k + l)
    for j in itertools.product(range(n), repeat=l):
        for i in itertools.product(range(n), repeat=k):
            if kernel(i + j) == pattern:
                entries[flat(j, n) * n ** k + flat(i, n)] = 1
    return {"n": n, "k": k, "l": l, "entries": entries}


def random_diagram(rng, max_n, k, l):
    n = rng.randint(1, max_n)
    edges = [(u, v) for u in range(n) for v in range(u, n)
             if rng.random() < (0.15 if u == v else 0.45)]
    return {
        "graph": graph(n, edges),
        "inputs": [rng.randrange(n) for _ in range(k)],
        "outputs": [rng.randrange(n) for _ in range(l)],
    }


def set_partitions(points):
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for b in range(len(p)):
            yield p[:b] + [[first] + p[b]] + p[b + 1:]


HOSTS = [
    graph(3, [(0, 1), (1, 2), (0, 2)]),
    graph(3, [(0, 1), (1, 2)]),
    graph(3, [(0, 1), (2, 2)]),
    graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
]

GROUPS = [
    {"symmetric": 3},
    {"automorphisms": graph(3, [(0, 1), (1, 2)])},
    {"automorphisms": graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])},
    {"trivial": 2},
]


def main():
    rng = random.Random(20260101)
    out = {"functor": [], "that": [], "moebius": [], "thpart": []}
    for host in HOSTS:
        for _ in range(6):
            left = random_diagram(rng, 3, rng.randint(0, 2), rng.randint(0, 2))
            right = random_diagram(rng, 3, len(left["outputs"]), rng.randint(0, 2))
            for law, injective in (("functor", False), ("that", True)):
                out[law].append({
                    "graph": host,
                    "left": left,
                    "right": right,
                    "expected": {
                        "left": count(host, left, injective),
                        "right": count(host, right, injective),
                    },
                })
        for _ in range(5):
            d = random_diagram(rng, 5, rng.randint(0, 2), rng.randint(0, 2))
            out["moebius"].append({"graph": host, "diagram": d, "expected": count(host, d, False)})
    for group in GROUPS:
        n = group.get("symmetric") or group.get("trivial") or group["automorphisms"]["n"]
        for k, l in ((0, 2), (1, 1), (2, 1)):
            for blocks in set_partitions(list(range(k + l))):
                out["thpart"].append({
                    "group": group,
                    "partition": {"k": k, "l": l, "blocks": blocks},
                    "expected": partition_that(n, k, l, blocks),
                })
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
