"""Independent brute-force reference for critical pairs in small abelian groups.

Usage: python3 tools/brute.py counts MAX_ORDER   (per group: #(I), #(I and II), #(I and II with any-order SP4))
       python3 tools/brute.py converse MAX_ORDER [MIN_ORDER] (per group: #(not I, II), #(not I, II with critical quotient))
       python3 tools/brute.py pair SPEC A B      (e.g. pair Z2xZ3 "0,1,3" "0,1,2,3")
"""
import itertools
import sys


def groups_up_to(n):
    out = []

    def rec(prefix, prod, lo):
        if prefix:
            out.append((prod, tuple(prefix)))
        for f in range(lo, n // prod + 1):
            if f >= 2 and prod * f <= n:
                rec(prefix + [f], prod * f, f)

    rec([], 1, 2)
    out.sort()
    return [d for _, d in out]


class G:
    def __init__(self, dims):
        self.dims = dims
        self.elts = list(itertools.product(*[range(d) for d in dims]))
        self.n = len(self.elts)
        self.idx = {e: i for i, e in enumerate(self.elts)}

    def add(self, x, y):
        return self.idx[tuple((a + b) % d for a, b, d in zip(self.elts[x], self.elts[y], self.dims))]

    def neg(self, x):
        return self.idx[tuple((-a) % d for a, d in zip(self.elts[x], self.dims))]

    def order(self, x):
        k, y = 1, x
        while y != 0:
            y, k = self.add(y, x), k + 1
        return k

    def subgroups(self):
        res = []
        for m in range(1, 1 << self.n):
            s = {i for i in range(self.n) if m >> i & 1}
            if 0 in s and all(self.add(x, y) in s for x in s for y in s):
                res.append(frozenset(s))
        return res

    def sumset(self, a, b):
        return frozenset(self.add(x, y) for x in a for y in b)

    def translate(self, a, t):
        return frozenset(self.add(x, t) for x in a)


def is_prime(n):
    return n >= 2 and all(n % d for d in range(2, n))


def rep(g, a, b, c):
    return sum(1 for x in a for y in b if g.add(x, y) == c)


def is_ap(g, s, d):
    if len(s) == 1:
        return True
    for start in s:
        prog, x = [], start
        for _ in range(len(s)):
            prog.append(x)
            x = g.add(x, d)
        if set(prog) == set(s) and len(set(prog)) == len(s):
            return True
    return False


def period(g, s):
    return frozenset(h for h in range(g.n) if g.translate(s, h) == frozenset(s))


def elementary(g, a, b, subs, any_order=False):
    if min(len(a), len(b)) == 1:
        return "SP2"
    bound = len(a) + len(b) - 1
    if any(g.order(d) >= bound and is_ap(g, a, d) and is_ap(g, b, d) for d in range(g.n)):
        return "SP1"
    counts = [rep(g, a, b, c) for c in range(g.n)]
    for h in subs:
        ca = g.sumset(a, h)
        cb = g.sumset(b, h)
        if len(ca) != len(h) or len(cb) != len(h):
            continue
        if len(period(g, a)) == 1 and 1 not in counts and len(h) == len(a) + len(b):
            comp = ca - frozenset(a)
            negb = frozenset(g.neg(x) for x in b)
            if any(g.translate(negb, t) == comp for t in range(g.n)):
                return "SP3"
        if (any_order or is_prime(len(h))) and len(a) + len(b) == len(h) + 1 and counts.count(1) == 1:
            return "SP4"
    return None


def condition_i(g, a, b):
    s = g.sumset(a, b)
    if len(s) != len(a) + len(b) - 1:
        return False
    if len(period(g, s)) == 1:
        return True
    return any(rep(g, a, b, c) == 1 for c in range(g.n))


def decompositions(g, s, h):
    cosets = {g.translate(h, x) for x in range(g.n)}
    for c in cosets:
        s1 = frozenset(s) & c
        s0 = frozenset(s) - c
        if s1 and g.sumset(s0, h) == s0:
            yield s0, s1


def condition_ii(g, a, b, subs, any_order=False, critical_quotient=False):
    for h in subs:
        if len(h) == 1:
            continue
        for a0, a1 in decompositions(g, a, h):
            for b0, b1 in decompositions(g, b, h):
                if elementary(g, a1, b1, subs, any_order) is None:
                    continue
                u = g.add(min(a1), min(b1))
                ah = g.sumset(a, h)
                bh = g.sumset(b, h)
                if critical_quotient and len(g.sumset(ah, bh)) + len(h) != len(ah) + len(bh):
                    continue
                # cosets beta in B+H with u - beta in A+H
                hits = {g.sumset(frozenset([y]), h) for y in bh if g.add(u, g.neg(y)) in ah}
                if len(hits) == 1:
                    return True
    return False


def counts(max_order):
    for dims in groups_up_to(max_order):
        g = G(dims)
        subs = g.subgroups()
        sets = [frozenset(i for i in range(g.n) if m >> i & 1) for m in range(1, 1 << g.n)]
        n1 = n2 = n3 = 0
        for a in sets:
            for b in sets:
                c1 = condition_i(g, a, b)
                n1 += c1
                if c1:
                    n2 += condition_ii(g, a, b, subs)
                    n3 += condition_ii(g, a, b, subs, True)
        name = "x".join(f"Z{d}" for d in dims)
        print(f"{name} {n1} {n2} {n3}", flush=True)


def converse(max_order, min_order=1):
    for dims in groups_up_to(max_order):
        g = G(dims)
        if g.n < min_order:
            continue
        subs = g.subgroups()
        sets = [frozenset(i for i in range(g.n) if m >> i & 1) for m in range(1, 1 << g.n)]
        n1 = n2 = 0
        for a in sets:
            for b in sets:
                if not condition_i(g, a, b):
                    n1 += condition_ii(g, a, b, subs)
                    n2 += condition_ii(g, a, b, subs, critical_quotient=True)
        name = "x".join(f"Z{d}" for d in dims)
        print(f"{name} {n1} {n2}", flush=True)


def main():
    if sys.argv[1] == "counts":
        counts(int(sys.argv[2]))
    elif sys.argv[1] == "converse":
        converse(*map(int, sys.argv[2:4]))
    else:
        dims = tuple(int(p[1:]) for p in sys.argv[2].split("x"))
        g = G(dims)
        a = frozenset(int(x) for x in sys.argv[3].split(","))
        b = frozenset(int(x) for x in sys.argv[4].split(","))
        print("I:", condition_i(g, a, b), "II:", condition_ii(g, a, b, g.subgroups()))


if __name__ == "__main__":
    main()
