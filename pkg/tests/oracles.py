"""Independent oracles used to derive expected values.

Everything here is deliberately primitive and separate from the library:
plain 2x2 rational matrix products, Laurent-polynomial expansion, brute
force closures.  Tests compute expected values through these routes and
compare the library against them.
"""

from fractions import Fraction


def mat_mul(m, n):
    """2x2 rational matrix product on ((a,b),(c,d)) nests."""
    (a1, b1), (c1, d1) = m
    (a2, b2), (c2, d2) = n
    return ((a1 * a2 + b1 * c2, a1 * b2 + b1 * d2),
            (c1 * a2 + d1 * c2, c1 * b2 + d1 * d2))


def mat_inv_det1(m):
    (a, b), (c, d) = m
    assert a * d - b * c == 1
    return ((d, -b), (-c, a))


def aff_to_mat(b, a):
    return ((Fraction(1), Fraction(b)), (Fraction(0), Fraction(a)))


def laurent_mul(f, g):
    """Product of Laurent polynomials given as {exponent: coeff}."""
    out = {}
    for i, c in f.items():
        for j, d in g.items():
            out[i + j] = out.get(i + j, 0) + c * d
    return {k: v for k, v in out.items() if v}


def laurent_power(f, n):
    out = {0: 1}
    for _ in range(n):
        out = laurent_mul(out, f)
    return out


def central_trinomial(n):
    """[x^0] (x^{-1} + 1 + x)^n by direct expansion."""
    return laurent_power({-1: 1, 0: 1, 1: 1}, n).get(0, 0)


def dih_mul(x, y):
    """Infinite dihedral composition on (shift, flip) pairs, applying x
    first: (x*y)(t) = y(x(t))."""
    n1, f1 = x
    n2, f2 = y
    return (n2 + (-n1 if f2 else n1), f1 ^ f2)


def dih_inv(x):
    n, f = x
    return (n, True) if f else (-n, False)


def perm_mul(x, y):
    """(x*y)(i) = y(x(i))."""
    return tuple(y[i] for i in x)


def perm_inv(x):
    out = [0] * len(x)
    for i, j in enumerate(x):
        out[j] = i
    return tuple(out)


def group_closure(gens, mul, identity, cap=100000):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    assert len(seen) <= cap
        frontier = nxt
    return seen


def right_cosets(elements, h_set, mul):
    """Partition a finite element set into right cosets of h_set."""
    cosets = []
    seen = set()
    for x in sorted(elements):
        if x in seen:
            continue
        coset = frozenset(mul(h, x) for h in h_set)
        seen |= coset
        cosets.append(coset)
    return cosets


def double_coset(x, h_set, mul):
    return frozenset(mul(mul(a, x), b) for a in h_set for b in h_set)
