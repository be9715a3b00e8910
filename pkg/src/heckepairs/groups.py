"""Concrete group arithmetic and subgroup membership for the catalog pairs.

Every pair (G, H) is packaged as a :class:`HeckePair`: exact group
operations, an exact H-membership predicate, generator lists for G and H,
and optional coset fingerprints used by the enumeration engine to bucket
interning candidates.  All scalar arithmetic is over arbitrary-precision
rationals; there is no floating point in this module.

Element payloads
----------------
* :class:`Mat2`  -- 2x2 matrix with det 1 and entries in Z[1/p], stored as
  an integer numerator matrix over a power of p (exposed as `Fraction`s).
  Used plain (SL2) or modulo +-1 (PSL2, sign-canonicalized).
* :class:`Aff`   -- upper-triangular [[1, b], [0, a]] with a > 0; the ax+b
  style groups (Bost-Connes full pair and its finitely generated p-version).
* :class:`Perm`  -- permutation of {0..n-1} as a tuple of images.
* :class:`Vec`   -- integer vector (Z^d with the trivial subgroup).
* :class:`Dih`   -- infinite dihedral element x -> +-x + n as (shift, flip).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import DomainError, HeckeError, MixedKinds, ParseError

__all__ = [
    "Mat2", "Aff", "Perm", "Vec", "Dih",
    "HeckePair", "SL2ZpPair", "AffinePair", "ZPair", "PermPair",
    "DihedralPair",
    "get_pair", "catalog_labels", "load_pair_spec",
    "parse_element", "render_element",
]


# ---------------------------------------------------------------------------
# element payloads


class Mat2:
    """Matrix ``num / p**k`` with integer ``num`` and det(num) = p**(2k).

    ``num`` is reduced: unless k = 0, not all entries are divisible by p,
    which makes the representation unique (up to sign; the projective pairs
    canonicalize the sign separately).  Plain slots class: this sits on the
    enumeration hot path.
    """

    __slots__ = ("num", "k", "p")

    def __init__(self, num: tuple[int, int, int, int], k: int, p: int):
        self.num = num
        self.k = k
        self.p = p

    def __eq__(self, other):
        return (isinstance(other, Mat2) and self.num == other.num
                and self.k == other.k and self.p == other.p)

    def __hash__(self):
        return hash((self.num, self.k, self.p))

    def __repr__(self):
        return f"Mat2({self.num}, k={self.k}, p={self.p})"

    @property
    def a(self) -> Fraction:
        return Fraction(self.num[0], self.p ** self.k)

    @property
    def b(self) -> Fraction:
        return Fraction(self.num[1], self.p ** self.k)

    @property
    def c(self) -> Fraction:
        return Fraction(self.num[2], self.p ** self.k)

    @property
    def d(self) -> Fraction:
        return Fraction(self.num[3], self.p ** self.k)

    def to_fractions(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True, slots=True)
class Aff:
    """The matrix [[1, b], [0, a]] with a > 0."""

    b: Fraction
    a: Fraction


@dataclass(frozen=True, slots=True)
class Perm:
    images: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Vec:
    coords: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Dih:
    """The isometry x -> -x + shift (flip) or x -> x + shift (no flip)."""

    shift: int
    flip: bool


def _p_exponent(n: int, p: int) -> Optional[int]:
    """Exponent k with n = p**k, or None if n is not a power of p."""
    if n < 1:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k if n == 1 else None


def _reduce_mat(num: tuple[int, int, int, int], k: int, p: int) -> tuple[tuple[int, int, int, int], int]:
    while k > 0 and all(x % p == 0 for x in num):
        num = (num[0] // p, num[1] // p, num[2] // p, num[3] // p)
        k -= 1
    return num, k


def _mat_from_fractions(fa: Fraction, fb: Fraction, fc: Fraction, fd: Fraction, p: int) -> Mat2:
    k = 0
    for f in (fa, fb, fc, fd):
        e = _p_exponent(f.denominator, p)
        if e is None:
            raise DomainError(
                f"denominator {f.denominator} is not a power of {p}")
        k = max(k, e)
    scale = p ** k
    num = tuple(int(f * scale) for f in (fa, fb, fc, fd))
    num, k = _reduce_mat(num, k, p)
    det = num[0] * num[3] - num[1] * num[2]
    if det != p ** (2 * k):
        raise DomainError("matrix determinant is not 1")
    return Mat2(num, k, p)


def _hnf_2x2(rows: tuple[int, int, int, int], det: int) -> tuple[int, int, int]:
    """Canonical basis (alpha, beta, delta) of the row lattice of an
    integer 2x2 matrix with det > 0: {(alpha, beta), (0, delta)} with
    alpha, delta > 0 and 0 <= beta < delta."""
    a, b, c, d = rows
    # half-extended euclid: g = gcd(a, c) with x*a = g (mod c)
    old_r, r = a, c
    old_x, x = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
    if old_r < 0:
        old_r, old_x = -old_r, -old_x
    y = (old_r - old_x * a) // c if c else 0
    delta = det // old_r
    beta = (old_x * b + y * d) % delta if delta else 0
    return (old_r, beta, delta)


# ---------------------------------------------------------------------------
# rational token helpers


def _parse_rational(tok: str, pos: int) -> Fraction:
    try:
        if "/" in tok:
            n, d = tok.split("/", 1)
            den = int(d)
            if den <= 0:
                raise ParseError(f"denominator must be positive: {tok!r}", pos)
            return Fraction(int(n), den)
        return Fraction(int(tok))
    except ValueError:
        raise ParseError(f"not a rational: {tok!r}", pos) from None


def _parse_int(tok: str, pos: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"not an integer: {tok!r}", pos) from None


# ---------------------------------------------------------------------------
# the pair interface


class HeckePair:
    """A concrete group instance with a designated Hecke subgroup H.

    Elements handed to the methods must come from this instance; all
    returned elements are canonical representatives, so ``==`` on payloads
    is exact equality in the group.
    """

    label: str
    kind: str
    payload_type: type
    #: None for pairs without a finite generating set (ball enumeration off).
    g_generators: Optional[list]
    h_generators: list
    #: implementer conventions for this catalog entry, surfaced in reports
    notes: str = ""
    #: description of the supplied reduction kernel / canonicalization rule
    reduction_note: str = ""

    def __init__(self):
        self._shat = None
        self._h_sym = None
        if self.h_generators is not None:
            for h in self.h_generators:
                if not self.in_h(h):
                    raise HeckeError(
                        f"{self.label}: subgroup generator outside H")

    # -- group law ---------------------------------------------------------

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def canon(self, x):
        """Canonical representative (identity map unless the instance is a
        quotient such as PSL2, where the sign rule applies)."""
        return x

    def in_h(self, x) -> bool:
        raise NotImplementedError

    def validate(self, x) -> None:
        """Raise DomainError if x is not a well-formed element."""
        raise NotImplementedError

    def word(self, letters):
        """Product of generator letters (ints indexing ``shat()``)."""
        g = self.identity()
        shat = self.shat()
        for i in letters:
            g = self.mul(g, shat[i])
        return g

    def _check_payload(self, x):
        if not isinstance(x, self.payload_type):
            raise MixedKinds(
                f"expected {self.payload_type.__name__}, got {type(x).__name__}")

    # -- generators --------------------------------------------------------

    @property
    def finitely_generated(self) -> bool:
        return self.g_generators is not None

    def shat(self) -> list:
        """S union S^{-1} with duplicates removed (the identity is treated
        as the BFS start, not listed)."""
        if not self.finitely_generated:
            from .errors import NotFinitelyGenerated
            raise NotFinitelyGenerated(f"{self.label} has no finite generating set")
        if self._shat is None:
            out = []
            for s in self.g_generators:
                for t in (self.canon(s), self.canon(self.inv(s))):
                    if t not in out and t != self.identity():
                        out.append(t)
            self._shat = out
        return self._shat

    def h_gens_sym(self) -> list:
        if self._h_sym is None:
            out = []
            for s in self.h_generators:
                for t in (self.canon(s), self.canon(self.inv(s))):
                    if t not in out and t != self.identity():
                        out.append(t)
            self._h_sym = out
        return self._h_sym

    def h_elements(self) -> Optional[list]:
        """All of H when H is finite, else None."""
        return None

    def unimod_probes(self) -> list:
        """Elements whose relative modular values decide (or witness
        failure of) relative unimodularity."""
        if self.finitely_generated:
            return list(self.g_generators)
        raise NotImplementedError

    # -- fingerprints ------------------------------------------------------

    def coset_fingerprint(self, x):
        """Hashable invariant of the right coset Hx, or None.  Fingerprints
        only bucket candidates; the membership test remains the arbiter."""
        return None

    def left_coset_fingerprint(self, x):
        """Hashable invariant of the left coset xH, or None."""
        return None

    # -- coset equality (the arbiter; overridable as a fast path) ----------

    def same_right_coset(self, x, y) -> bool:
        """Hx == Hy, decided by the membership test x y^{-1} in H."""
        return self.in_h(self.mul(x, self.inv(y)))

    def same_left_coset(self, x, y) -> bool:
        """xH == yH, decided by the membership test x^{-1} y in H."""
        return self.in_h(self.mul(self.inv(x), y))

    # -- optional exact word length on G (used by H-averaging checks) ------

    def word_length_on_g(self, x) -> Optional[int]:
        return None

    # -- text --------------------------------------------------------------

    def parse(self, text: str):
        raise NotImplementedError

    def render(self, x) -> str:
        raise NotImplementedError

    def describe(self) -> dict:
        """Pair metadata for reports (labels the generator conventions)."""
        gens = None
        if self.finitely_generated:
            gens = [self.render(s) for s in self.g_generators]
        return {
            "label": self.label,
            "kind": self.kind,
            "g_generators": gens,
            "h_generators": [self.render(s) for s in self.h_generators],
            "reduction": self.reduction_note,
            "notes": self.notes,
        }

    def __repr__(self):
        return f"<HeckePair {self.label}>"


# ---------------------------------------------------------------------------
# SL2(Z[1/p]) / PSL2(Z[1/p]) over SL2(Z) / PSL2(Z)


class SL2ZpPair(HeckePair):
    """(SL2(Z[1/p]), SL2(Z)) and its reduction mod {+-I}.

    Generators: S = [[0,-1],[1,0]], T = [[1,1],[0,1]], g_p = diag(p, 1/p);
    H is generated by {S, T}.  Together with the elementary-matrix identity
    g_p^{-k} T g_p^k = E12(p^{2k}) these generate the full group; the choice
    is a convention of this catalog, not forced by the pair.
    """

    payload_type = Mat2

    def __init__(self, p: int, projective: bool):
        if not _is_prime(p):
            raise HeckeError(f"p must be prime, got {p}")
        self.p = p
        self.projective = projective
        self.kind = "psl2z1p" if projective else "sl2z1p"
        self.label = f"{self.kind}:{p}"
        s = Mat2((0, -1, 1, 0), 0, p)
        t = Mat2((1, 1, 0, 1), 0, p)
        gp = Mat2((p * p, 0, 0, 1), 1, p)
        self.g_generators = [self.canon(s), self.canon(t), gp]
        self.h_generators = [self.canon(s), self.canon(t)]
        self.notes = ("S, T generate the integral subgroup; diag(p,1/p) "
                      "moves along the tree")
        self.reduction_note = (
            "kernel {+-I}; representative has its first nonzero entry positive"
            if projective else "none (pair is not reduced; -I lies in H)")
        super().__init__()

    def mul(self, x, y):
        p = self.p
        try:
            if x.p != p or y.p != p:
                raise MixedKinds(
                    "matrix belongs to a different Z[1/p] instance")
            a1, b1, c1, d1 = x.num
            a2, b2, c2, d2 = y.num
            k = x.k + y.k
        except AttributeError:
            self._check_payload(x)
            self._check_payload(y)
            raise
        a = a1 * a2 + b1 * c2
        b = a1 * b2 + b1 * d2
        c = c1 * a2 + d1 * c2
        d = c1 * b2 + d1 * d2
        while k and not (a % p or b % p or c % p or d % p):
            a //= p
            b //= p
            c //= p
            d //= p
            k -= 1
        if self.projective:
            v = a or b or c or d
            if v < 0:
                a, b, c, d = -a, -b, -c, -d
        return Mat2((a, b, c, d), k, p)

    def inv(self, x):
        self._check_payload(x)
        a, b, c, d = x.num
        # num/p^k has inverse (d,-b,-c,a)/p^k since det(num) = p^{2k}
        num, k = _reduce_mat((d, -b, -c, a), x.k, self.p)
        if self.projective:
            num = _canon_sign(num)
        return Mat2(num, k, self.p)

    def identity(self):
        return Mat2((1, 0, 0, 1), 0, self.p)

    def canon(self, x):
        self._check_payload(x)
        if self.projective:
            num = _canon_sign(x.num)
            if num != x.num:
                return Mat2(num, x.k, x.p)
        return x

    def in_h(self, x) -> bool:
        self._check_payload(x)
        return x.k == 0

    def validate(self, x) -> None:
        self._check_payload(x)
        if x.p != self.p:
            raise DomainError(f"entries must lie in Z[1/{self.p}]")
        det = x.num[0] * x.num[3] - x.num[1] * x.num[2]
        if det != self.p ** (2 * x.k):
            raise DomainError("matrix determinant is not 1")

    def coset_fingerprint(self, x):
        # Hx <-> the row lattice Z^2 * x; (exponent, HNF) pins it exactly.
        return (x.k, _hnf_2x2(x.num, self.p ** (2 * x.k)))

    def left_coset_fingerprint(self, x):
        a, b, c, d = x.num
        return (x.k, _hnf_2x2((a, c, b, d), self.p ** (2 * x.k)))

    def same_right_coset(self, x, y) -> bool:
        # x y^{-1} = (num_x adj(num_y)) / p^(k_x + k_y): in H iff integral
        a1, b1, c1, d1 = x.num
        a2, b2, c2, d2 = y.num
        m = self.p ** (x.k + y.k)
        return ((a1 * d2 - b1 * c2) % m == 0
                and (b1 * a2 - a1 * b2) % m == 0
                and (c1 * d2 - d1 * c2) % m == 0
                and (d1 * a2 - c1 * b2) % m == 0)

    def same_left_coset(self, x, y) -> bool:
        # x^{-1} y = (adj(num_x) num_y) / p^(k_x + k_y): in H iff integral
        a1, b1, c1, d1 = x.num
        a2, b2, c2, d2 = y.num
        m = self.p ** (x.k + y.k)
        return ((d1 * a2 - b1 * c2) % m == 0
                and (d1 * b2 - b1 * d2) % m == 0
                and (a1 * c2 - c1 * a2) % m == 0
                and (a1 * d2 - c1 * b2) % m == 0)

    def parse(self, text: str):
        toks = text.split()
        if len(toks) != 5 or toks[0] != "mat":
            raise ParseError("expected 'mat a b c d'", 0)
        fr = [_parse_rational(t, i + 1) for i, t in enumerate(toks[1:])]
        m = _mat_from_fractions(*fr, p=self.p)
        return self.canon(m)

    def render(self, x) -> str:
        return "mat " + " ".join(str(f) for f in x.to_fractions())


def _canon_sign(num: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    for v in num:
        if v > 0:
            return num
        if v < 0:
            return (-num[0], -num[1], -num[2], -num[3])
    return num


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# ---------------------------------------------------------------------------
# the ax+b style pairs (Bost-Connes and its finitely generated p-version)


class AffinePair(HeckePair):
    """(G, Z) with G the [[1,b],[0,a]] matrices.

    With p = None this is the full pair: b ranges over Q, a over Q_{>0};
    G is not finitely generated, so ball enumeration is disabled and only
    pointwise queries (membership, L, R, modular values) are supported.
    With a prime p it is the finitely generated pair with b in Z[1/p] and
    a a power of p, generated by {(b=1,a=1), (b=0,a=p)}.
    """

    payload_type = Aff

    def __init__(self, p: Optional[int]):
        self.p = p
        u = Aff(Fraction(1), Fraction(1))
        if p is None:
            self.kind = "bc"
            self.label = "bc"
            self.g_generators = None
            self.notes = ("full pair: infinitely generated, pointwise "
                          "queries only; probe element (0,2)")
        else:
            if not _is_prime(p):
                raise HeckeError(f"p must be prime, got {p}")
            self.kind = "bcp"
            self.label = f"bcp:{p}"
            self.g_generators = [u, Aff(Fraction(0), Fraction(p))]
            self.notes = "generated by the unit translation and scaling by p"
        self.h_generators = [u]
        self.reduction_note = "none"
        super().__init__()

    def mul(self, x, y):
        self._check_payload(x)
        self._check_payload(y)
        # [[1,b1],[0,a1]] * [[1,b2],[0,a2]] = [[1, b2 + b1*a2], [0, a1*a2]]
        return Aff(y.b + x.b * y.a, x.a * y.a)

    def inv(self, x):
        self._check_payload(x)
        return Aff(-x.b / x.a, 1 / x.a)

    def identity(self):
        return Aff(Fraction(0), Fraction(1))

    def in_h(self, x) -> bool:
        self._check_payload(x)
        return x.a == 1 and x.b.denominator == 1

    def validate(self, x) -> None:
        self._check_payload(x)
        if x.a <= 0:
            raise DomainError("a must be positive")
        if self.p is not None:
            if _p_exponent(x.b.denominator, self.p) is None:
                raise DomainError(
                    f"denominator {x.b.denominator} is not a power of {self.p}")
            if (_p_exponent(x.a.numerator, self.p) is None
                    or _p_exponent(x.a.denominator, self.p) is None
                    or (x.a.numerator > 1 and x.a.denominator > 1)):
                raise DomainError(f"a must be a power of {self.p}")

    def unimod_probes(self) -> list:
        if self.p is not None:
            return list(self.g_generators)
        # a single witness disproves unimodularity for the full pair
        return [Aff(Fraction(0), Fraction(2))]

    def coset_fingerprint(self, x):
        # H(b,a) = {(b + n*a, a)} <-> (a, b mod aZ)
        return (x.a, x.b - (x.b / x.a).__floor__() * x.a)

    def left_coset_fingerprint(self, x):
        # (b,a)H = {(b + n, a)} <-> (a, b mod Z)
        return (x.a, x.b - x.b.__floor__())

    def same_right_coset(self, x, y) -> bool:
        return x.a == y.a and ((x.b - y.b) / y.a).denominator == 1

    def same_left_coset(self, x, y) -> bool:
        return x.a == y.a and (y.b - x.b).denominator == 1

    def parse(self, text: str):
        toks = text.split()
        if len(toks) != 3 or toks[0] != "aff":
            raise ParseError("expected 'aff b a'", 0)
        b = _parse_rational(toks[1], 1)
        a = _parse_rational(toks[2], 2)
        g = Aff(b, a)
        self.validate(g)
        return g

    def render(self, x) -> str:
        return f"aff {x.b} {x.a}"


# ---------------------------------------------------------------------------
# Z^d with the trivial subgroup


class ZPair(HeckePair):
    """(Z^d, {0}) with the standard unit generators."""

    payload_type = Vec

    def __init__(self, d: int):
        if d < 1:
            raise HeckeError("dimension must be >= 1")
        self.d = d
        self.kind = "z"
        self.label = f"z:{d}"
        self.g_generators = [
            Vec(tuple(1 if j == i else 0 for j in range(d))) for i in range(d)
        ]
        self.h_generators = []
        self.notes = "free abelian pair; every coset is a single element"
        self.reduction_note = "none"
        super().__init__()

    def mul(self, x, y):
        self._check_payload(x)
        self._check_payload(y)
        return Vec(tuple(a + b for a, b in zip(x.coords, y.coords)))

    def inv(self, x):
        self._check_payload(x)
        return Vec(tuple(-a for a in x.coords))

    def identity(self):
        return Vec((0,) * self.d)

    def in_h(self, x) -> bool:
        self._check_payload(x)
        return all(a == 0 for a in x.coords)

    def validate(self, x) -> None:
        self._check_payload(x)
        if len(x.coords) != self.d:
            raise DomainError(f"expected {self.d} coordinates")

    def h_elements(self):
        return [self.identity()]

    def coset_fingerprint(self, x):
        return x.coords

    def left_coset_fingerprint(self, x):
        return x.coords

    def word_length_on_g(self, x) -> int:
        return sum(abs(a) for a in x.coords)

    def parse(self, text: str):
        toks = text.split()
        if len(toks) < 2 or toks[0] != "zvec":
            raise ParseError("expected 'zvec n1 ... nd'", 0)
        v = Vec(tuple(_parse_int(t, i + 1) for i, t in enumerate(toks[1:])))
        self.validate(v)
        return v

    def render(self, x) -> str:
        return "zvec " + " ".join(str(a) for a in x.coords)


# ---------------------------------------------------------------------------
# finite permutation pairs


class PermPair(HeckePair):
    """A finite permutation group with a designated subgroup.

    Products compose left to right: (x*y)(i) = y(x(i)).
    """

    payload_type = Perm

    def __init__(self, label: str, n: int, g_gens: list[tuple[int, ...]],
                 h_gens: list[tuple[int, ...]]):
        self.n = n
        self.kind = "perm"
        self.label = label
        self.g_generators = [Perm(tuple(g)) for g in g_gens]
        self.h_generators = [Perm(tuple(h)) for h in h_gens]
        for g in self.g_generators + self.h_generators:
            self.validate(g)
        self._h_set = frozenset(
            p.images for p in _perm_closure(self.h_generators, self))
        self.notes = "finite pair; exhaustive oracle available"
        self.reduction_note = "none"
        super().__init__()

    def mul(self, x, y):
        self._check_payload(x)
        self._check_payload(y)
        return Perm(tuple(y.images[i] for i in x.images))

    def inv(self, x):
        self._check_payload(x)
        out = [0] * len(x.images)
        for i, j in enumerate(x.images):
            out[j] = i
        return Perm(tuple(out))

    def identity(self):
        return Perm(tuple(range(self.n)))

    def in_h(self, x) -> bool:
        self._check_payload(x)
        return x.images in self._h_set

    def validate(self, x) -> None:
        self._check_payload(x)
        if sorted(x.images) != list(range(self.n)):
            raise DomainError(f"not a permutation of 0..{self.n - 1}")

    def h_elements(self):
        return [Perm(t) for t in sorted(self._h_set)]

    def coset_fingerprint(self, x):
        return min(self.mul(Perm(h), x).images for h in self._h_set)

    def left_coset_fingerprint(self, x):
        return min(self.mul(x, Perm(h)).images for h in self._h_set)

    def parse(self, text: str):
        toks = text.split()
        if len(toks) < 2 or toks[0] != "perm":
            raise ParseError("expected 'perm i0 i1 ... ik'", 0)
        v = Perm(tuple(_parse_int(t, i + 1) for i, t in enumerate(toks[1:])))
        self.validate(v)
        return v

    def render(self, x) -> str:
        return "perm " + " ".join(str(a) for a in x.images)


def _perm_closure(gens: list, pair: PermPair, cap: int = 10 ** 4) -> list:
    seen = {pair.identity()}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = pair.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise HeckeError("subgroup closure exceeded cap")
        frontier = nxt
    return sorted(seen, key=lambda q: q.images)


# ---------------------------------------------------------------------------
# infinite dihedral over Z/2


class DihedralPair(HeckePair):
    """(D_inf, Z/2): isometries of Z over the reflection at the origin."""

    payload_type = Dih

    def __init__(self):
        self.kind = "dinf"
        self.label = "dinf"
        self.g_generators = [Dih(1, False), Dih(0, True)]
        self.h_generators = [Dih(0, True)]
        self.notes = "generated by the unit translation and the reflection"
        self.reduction_note = "none"
        super().__init__()

    def mul(self, x, y):
        self._check_payload(x)
        self._check_payload(y)
        # apply y after x: (x*y)(t) = y(x(t))  -- composition left to right
        shift = y.shift + (-x.shift if y.flip else x.shift)
        return Dih(shift, x.flip ^ y.flip)

    def inv(self, x):
        self._check_payload(x)
        return x if x.flip else Dih(-x.shift, False)

    def identity(self):
        return Dih(0, False)

    def in_h(self, x) -> bool:
        self._check_payload(x)
        return x.shift == 0

    def validate(self, x) -> None:
        self._check_payload(x)

    def h_elements(self):
        return [Dih(0, False), Dih(0, True)]

    def coset_fingerprint(self, x):
        # H(n,f) = {(n,f), (n, not f)}: the shift is a perfect invariant
        return (x.shift,)

    def left_coset_fingerprint(self, x):
        # (n,f)H = {(n,f), (-n, not f)}
        if x.shift == 0:
            return (0,)
        if x.shift > 0:
            return (x.shift, x.flip)
        return (-x.shift, not x.flip)

    def word_length_on_g(self, x) -> int:
        return abs(x.shift) + (1 if x.flip else 0)

    def parse(self, text: str):
        toks = text.split()
        if len(toks) != 3 or toks[0] != "dih":
            raise ParseError("expected 'dih n f' with f in {1,-1}", 0)
        n = _parse_int(toks[1], 1)
        f = _parse_int(toks[2], 2)
        if f not in (1, -1):
            raise ParseError("flip must be 1 or -1", 2)
        return Dih(n, f == -1)

    def render(self, x) -> str:
        return f"dih {x.shift} {-1 if x.flip else 1}"


# ---------------------------------------------------------------------------
# catalog


def _preset_perm_pairs() -> dict[str, Callable[[], HeckePair]]:
    return {
        "s3-h12": lambda: PermPair(
            "s3-h12", 3, [(1, 0, 2), (1, 2, 0)], [(1, 0, 2)]),
        "s4-h12": lambda: PermPair(
            "s4-h12", 4, [(1, 0, 2, 3), (1, 2, 3, 0)], [(1, 0, 2, 3)]),
        "s4-h12-34": lambda: PermPair(
            "s4-h12-34", 4,
            [(1, 0, 2, 3), (0, 1, 3, 2), (1, 2, 3, 0)],
            [(1, 0, 2, 3), (0, 1, 3, 2)]),
    }


def catalog_labels() -> list[str]:
    return ["z:1", "z:2", "dinf", "s3-h12", "s4-h12", "s4-h12-34",
            "bc", "bcp:2", "bcp:3", "bcp:5", "sl2z1p:2", "psl2z1p:2"]


def get_pair(label: str) -> HeckePair:
    """Resolve a catalog label such as 'psl2z1p:2', 'bcp:3', 'z:2'."""
    presets = _preset_perm_pairs()
    if label in presets:
        return presets[label]()
    if label == "bc":
        return AffinePair(None)
    if label == "dinf":
        return DihedralPair()
    if ":" in label:
        head, _, arg = label.partition(":")
        try:
            n = int(arg)
        except ValueError:
            raise HeckeError(f"bad pair label {label!r}") from None
        if head == "z":
            return ZPair(n)
        if head == "bcp":
            return AffinePair(n)
        if head == "sl2z1p":
            return SL2ZpPair(n, projective=False)
        if head == "psl2z1p":
            return SL2ZpPair(n, projective=True)
    raise HeckeError(
        f"unknown pair label {label!r}; known: {', '.join(catalog_labels())} "
        "or a custom spec file")


def load_pair_spec(path: str) -> HeckePair:
    """Build a custom finite-H pair from a line-oriented key=value file.

    Supported keys: kind (perm|zvec), label, n (perm degree) or d (zvec
    dimension), g_gen (repeatable, element text), h_gen (repeatable).
    """
    kind = None
    label = None
    n = None
    g_texts: list[str] = []
    h_texts: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise HeckeError(f"bad pair-spec line {line!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key == "kind":
                kind = val
            elif key == "label":
                label = val
            elif key in ("n", "d"):
                n = int(val)
            elif key == "g_gen":
                g_texts.append(val)
            elif key == "h_gen":
                h_texts.append(val)
            else:
                raise HeckeError(f"unknown pair-spec key {key!r}")
    if kind == "perm":
        if n is None or not g_texts:
            raise HeckeError("perm spec needs n and at least one g_gen")
        scratch = PermPair(label or "custom-perm", n,
                           [tuple(range(n))], [tuple(range(n))])
        g = [scratch.parse(t).images for t in g_texts]
        h = [scratch.parse(t).images for t in h_texts] or [tuple(range(n))]
        return PermPair(label or "custom-perm", n, g, h)
    if kind == "zvec":
        if n is None:
            raise HeckeError("zvec spec needs d")
        return ZPair(n)
    raise HeckeError(f"unsupported custom pair kind {kind!r}")


# module-level aliases matching the operation names used elsewhere

def parse_element(pair: HeckePair, text: str):
    return pair.parse(text)


def render_element(pair: HeckePair, x) -> str:
    return pair.render(x)
