"""Independent reference computations used by the test-suite.

Nothing here imports the fusion or hyper-power code: propositions are plain
frozensets of labels and every sum is a literal loop over the whole power set.
"""

import random
from itertools import chain, combinations, product


def power_set(labels):
    """All non-empty subsets of ``labels`` as frozensets."""
    return [frozenset(c) for c in chain.from_iterable(combinations(labels, r) for r in range(1, len(labels) + 1))]


def conjunctive(m1, m2, labels):
    out = {x: 0.0 for x in power_set(labels)}
    out[frozenset()] = 0.0
    for x1, v1 in m1.items():
        for x2, v2 in m2.items():
            out[x1 & x2] += v1 * v2
    return out


def dempster(m1, m2, labels):
    m12 = conjunctive(m1, m2, labels)
    k = m12.pop(frozenset())
    return {x: v / (1.0 - k) for x, v in m12.items() if v > 0}


def pcr5(m1, m2, labels):
    """Two-source PCR5 evaluated per proposition X, with Y over all of 2^Theta."""
    subsets = power_set(labels)
    m12 = conjunctive(m1, m2, labels)
    out = {}
    for x in subsets:
        total = m12[x]
        for y in subsets:
            if y == x or x & y:
                continue
            a, b = m1.get(x, 0.0), m2.get(y, 0.0)
            if a + b != 0:
                total += a * a * b / (a + b)
            a, b = m2.get(x, 0.0), m1.get(y, 0.0)
            if a + b != 0:
                total += a * a * b / (a + b)
        if total > 0:
            out[x] = total
    return out


def random_mass(rng: random.Random, labels):
    subsets = power_set(labels)
    focal = rng.sample(subsets, rng.randint(1, len(subsets)))
    weights = [rng.random() for _ in focal]
    s = sum(weights)
    return {x: w / s for x, w in zip(focal, weights)}


def random_corpus(n=1000, seed=12345):
    """``n`` seeded BBA pairs over frames of size 2 and 3 (alternating)."""
    rng = random.Random(seed)
    frames = (("A", "B"), ("A", "B", "C"))
    out = []
    for i in range(n):
        labels = frames[i % 2]
        out.append((labels, random_mass(rng, labels), random_mass(rng, labels)))
    return out


def monotone_function_count(m):
    """Monotone Boolean functions on m variables that are false on the empty input.

    Truth tables are enumerated exhaustively (2^(2^m) candidates) and checked
    for monotonicity on every covering pair.
    """
    points = list(range(1 << m))
    covers = [(p, p | (1 << i)) for p in points for i in range(m) if not p >> i & 1]
    count = 0
    for table in product((0, 1), repeat=len(points)):
        if table[0]:
            continue
        if all(table[lo] <= table[hi] for lo, hi in covers):
            count += 1
    return count


def regions(terms, m):
    """Venn regions (non-empty index sets) covered by a union of intersection terms."""
    out = set()
    for s in range(1, 1 << m):
        if any(t & ~s == 0 for t in terms):
            out.add(s)
    return frozenset(out)
