"""Exact arithmetic in the Hecke algebra of a pair.

Elements are finite rational linear combinations of double-coset
indicators T_d over a coset store.  Products are computed classwise: the
structure constants of a basis product T_{d1} * T_{d2} are obtained by
multiplying member-coset representatives and counting hits per target
coset; the count must come out constant on every target class (a loud
internal check) and is cached on the store, so repeated convolutions are
dictionary arithmetic.

Coefficients are rationals, not complex: every computation in scope uses
real data, so conjugation is the identity.  A complex payload would be a
mechanical extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .cosets import CosetStore
from .errors import (LengthUndefinedOnSupport, NonBiInvariantResult,
                     NotSelfAdjoint, StoreMismatch)

__all__ = [
    "HeckeElement", "NormReport",
    "basis_element", "identity_element", "convolve", "involution",
    "norms", "power_moments", "convolution_power_moment",
    "structure_constants", "structure_constants_csv",
]


class HeckeElement:
    """Finite map DoubleCosetId -> exact rational coefficient."""

    __slots__ = ("store", "coeffs")

    def __init__(self, store: CosetStore, coeffs: dict[int, Fraction]):
        self.store = store
        self.coeffs = {d: Fraction(c) for d, c in coeffs.items() if c != 0}

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, HeckeElement)
                and self.store is other.store
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((id(self.store), tuple(sorted(self.coeffs.items()))))

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        _same_store(self, other)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, Fraction(0)) + c
        return HeckeElement(self.store, out)

    def __sub__(self, other: "HeckeElement") -> "HeckeElement":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "HeckeElement":
        s = Fraction(scalar)
        return HeckeElement(self.store,
                            {d: s * c for d, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, HeckeElement):
            return convolve(self, other)
        return NotImplemented

    def __repr__(self):
        terms = " + ".join(f"{c}*T[{d}]" for d, c in sorted(self.coeffs.items()))
        return f"<HeckeElement {terms or '0'}>"

    def to_text(self) -> str:
        return "\n".join(f"dc={d} coeff={c}"
                         for d, c in sorted(self.coeffs.items()))

    @classmethod
    def from_text(cls, store: CosetStore, text: str) -> "HeckeElement":
        coeffs: dict[int, Fraction] = {}
        for ln, raw in enumerate(text.splitlines()):
            line = raw.strip()
            if not line:
                continue
            parts = dict(p.split("=", 1) for p in line.split())
            coeffs[int(parts["dc"])] = (coeffs.get(int(parts["dc"]), Fraction(0))
                                        + Fraction(parts["coeff"]))
        return cls(store, coeffs)

    def to_json(self) -> dict:
        return {str(d): str(c) for d, c in sorted(self.coeffs.items())}

    @classmethod
    def from_json(cls, store: CosetStore, obj: dict) -> "HeckeElement":
        return cls(store, {int(d): Fraction(c) for d, c in obj.items()})


def _same_store(f: HeckeElement, g: HeckeElement) -> None:
    if f.store is not g.store:
        raise StoreMismatch("elements live over different stores")


def basis_element(store: CosetStore, dcid: int) -> HeckeElement:
    return HeckeElement(store, {dcid: Fraction(1)})


def identity_element(store: CosetStore) -> HeckeElement:
    return basis_element(store, store.identity_class())


def structure_constants(store: CosetStore, d1: int, d2: int) -> dict[int, int]:
    """Coefficients of T_{d1} * T_{d2} in the double-coset basis.

    (T_{d1} * T_{d2})(Hx) counts the pairs (a, b) of member-coset
    representatives with H a b = Hx; the result is verified to be constant
    across each target class before packing.
    """
    key = (d1, d2)
    cached = store.sc_cache.get(key)
    if cached is not None:
        return cached
    pair = store.pair
    reps_a = [store.reps[c] for c in store.class_members(d1)]
    reps_b = [store.reps[c] for c in store.class_members(d2)]
    counter: dict[int, int] = {}
    intern = store._intern
    mul = pair.mul
    for a in reps_a:
        for b in reps_b:
            t = intern(mul(a, b))
            counter[t] = counter.get(t, 0) + 1
    out: dict[int, int] = {}
    for cid in sorted(counter):
        d = store.dc(cid)
        if d in out:
            continue
        vals = {counter.get(m, 0) for m in store.class_members(d)}
        if len(vals) != 1:
            raise NonBiInvariantResult(
                f"product T[{d1}]*T[{d2}] not constant on class {d}: {vals}")
        out[d] = counter[cid]
    store.sc_cache[key] = out
    return out


def convolve(f: HeckeElement, g: HeckeElement) -> HeckeElement:
    """(f * g)(Hx) = sum_y f(H x y^{-1}) g(Hy) under the counting
    normalization (mass 1 per right coset)."""
    _same_store(f, g)
    store = f.store
    out: dict[int, Fraction] = {}
    for d1, c1 in f.coeffs.items():
        for d2, c2 in g.coeffs.items():
            w = c1 * c2
            for d, n in structure_constants(store, d1, d2).items():
                out[d] = out.get(d, Fraction(0)) + w * n
    return HeckeElement(store, out)


def involution(f: HeckeElement) -> HeckeElement:
    """f*(Hx) = Delta(x^{-1}) f(Hx^{-1}); on the basis this sends T_d to
    Delta(d) T_{inv(d)} (Delta is constant on classes)."""
    store = f.store
    out: dict[int, Fraction] = {}
    for d, c in f.coeffs.items():
        e = store.class_inverse(d)
        out[e] = out.get(e, Fraction(0)) + store.class_delta(d) * c
    return HeckeElement(store, out)


def is_self_adjoint(f: HeckeElement) -> bool:
    return involution(f) == f


@dataclass
class NormReport:
    l1_exact: Fraction
    l2_sq_exact: Fraction
    weighted_s: Optional[float] = None
    weighted: Optional[float] = None

    @property
    def l1(self) -> float:
        return float(self.l1_exact)

    @property
    def l2(self) -> float:
        return math.sqrt(self.l2_sq_exact)


def norms(f: HeckeElement, l=None, s: Optional[float] = None) -> NormReport:
    """l1 = sum |c_d| R(d); l2^2 = sum c_d^2 R(d); the weighted norm uses
    the weight (1 + l(d))^(2s) inside the l2 sum."""
    store = f.store
    l1 = Fraction(0)
    l2sq = Fraction(0)
    wsq = 0.0
    for d, c in f.coeffs.items():
        r = store.class_R(d)
        l1 += abs(c) * r
        l2sq += c * c * r
        if l is not None and s is not None:
            if not l.defined_on(d):
                raise LengthUndefinedOnSupport(
                    f"length undefined on support class {d}")
            wsq += float(c * c * r) * (1.0 + float(l(d))) ** (2.0 * s)
    report = NormReport(l1, l2sq)
    if l is not None and s is not None:
        report.weighted_s = float(s)
        report.weighted = math.sqrt(wsq)
    return report


def _pairing_at_identity(u: HeckeElement, v: HeckeElement) -> Fraction:
    """(u * v)(HeH) = sum_d R(d) u(inv d) v(d), avoiding the full product."""
    store = u.store
    total = Fraction(0)
    for d, cv in v.coeffs.items():
        cu = u.coeffs.get(store.class_inverse(d))
        if cu:
            total += store.class_R(d) * cu * cv
    return total


def power_moments(f: HeckeElement, n_max: int) -> list[Fraction]:
    """a_n = (f^{*2n})(HeH) for n = 1..n_max; requires f* = f.

    Computed as a_n = (f^{*n} * f^{*n})(HeH), so supports only grow to the
    n_max-fold product.
    """
    if not is_self_adjoint(f):
        raise NotSelfAdjoint("moments need f* = f")
    out: list[Fraction] = []
    g = f
    for n in range(1, n_max + 1):
        if n > 1:
            g = convolve(g, f)
        a_n = _pairing_at_identity(g, g)
        if a_n < 0:
            raise NonBiInvariantResult(f"moment a_{n} negative: {a_n}")
        out.append(a_n)
    return out


def convolution_power_moment(f: HeckeElement, n: int) -> Fraction:
    return power_moments(f, n)[-1]


def structure_constants_csv(store: CosetStore, dcids: list[int]) -> str:
    """CSV dump 'd1,d2,d,coeff' for all ordered pairs from ``dcids``."""
    lines = ["d1,d2,d,coeff"]
    for d1 in dcids:
        for d2 in dcids:
            sc = structure_constants(store, d1, d2)
            for d in sorted(sc):
                lines.append(f"{d1},{d2},{d},{sc[d]}")
    return "\n".join(lines) + "\n"
