"""Right-coset interning, ball enumeration and double-coset structure.

The store interns right cosets Hx.  Equality of cosets is decided by the
membership test x y^{-1} in H; instances may supply a fingerprint (an
invariant constant on Hx) that buckets candidates so interning stays near
O(1), but the membership test remains the arbiter.

Build phase is single-writer.  A sealed store no longer accepts
user-driven interning, but analysis operations (double-coset orbits,
class inverses, resumed BFS) may still append cosets; those appends are
deterministic and append-only, so concurrent readers of previously
returned data are never invalidated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (BallIncomplete, CapExceeded, EmptyStore, HeckeError,
                     OrbitCapExceeded, StoreSealed)
from .groups import HeckePair

__all__ = [
    "Caps", "DoubleCoset", "CosetStore",
    "enumerate_ball", "intern_right_coset", "right_H_orbit",
    "left_L_count", "relative_modular", "unimodularity_check",
    "invert_double_coset", "verify_hecke", "check_interning_soundness",
]

DEFAULT_MAX_COSETS = 2_000_000
DEFAULT_MAX_ORBIT = 100_000


@dataclass(frozen=True)
class Caps:
    max_cosets: int = DEFAULT_MAX_COSETS
    max_orbit: int = DEFAULT_MAX_ORBIT


@dataclass
class DoubleCoset:
    id: int
    rep_cid: int
    member_cids: tuple[int, ...]
    R: int
    L: Optional[int] = None
    inv: Optional[int] = None

    @property
    def delta(self) -> Optional[Fraction]:
        return None if self.L is None else Fraction(self.L, self.R)


class CosetStore:
    """Interned right cosets of one pair, with Schreier adjacency and the
    partition into double cosets."""

    def __init__(self, pair: HeckePair, caps: Caps = Caps()):
        self.pair = pair
        self.caps = caps
        self.reps: list = []                  # cid -> representative element
        self.wl: list[Optional[int]] = []     # cid -> BFS depth (None: > radius_complete)
        self.adj: list[Optional[list[int]]] = []   # cid -> per-generator neighbor ids
        self.dc_of: list[Optional[int]] = []  # cid -> double coset id
        self.dcs: list[DoubleCoset] = []
        self.radius_complete: int = -1
        self.sealed: bool = False
        self.saturated: bool = False          # BFS exhausted the coset space
        self.sc_cache: dict = {}              # (d1, d2) -> {d: int}; see algebra
        self._buckets: dict = {}
        self._frontier: list[int] = []

    # -- interning ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.reps)

    def _intern(self, g, insert: bool = True) -> Optional[int]:
        """Id of Hg, interning if new.  ``g`` must already be canonical
        (every pair operation returns canonical representatives; the public
        wrappers canonicalize)."""
        pair = self.pair
        fp = pair.coset_fingerprint(g)
        bucket = self._buckets.get(fp)
        if bucket is not None:
            same = pair.same_right_coset
            reps = self.reps
            for cid in bucket:
                if same(g, reps[cid]):
                    return cid
        if not insert:
            return None
        if len(self.reps) >= self.caps.max_cosets:
            raise CapExceeded(
                f"coset store exceeded max_cosets={self.caps.max_cosets}",
                cap=self.caps.max_cosets)
        cid = len(self.reps)
        self.reps.append(g)
        self.wl.append(None)
        self.adj.append(None)
        self.dc_of.append(None)
        if bucket is None:
            self._buckets[fp] = [cid]
        else:
            bucket.append(cid)
        return cid

    def intern(self, g) -> int:
        """Public interning; refused once the store is sealed."""
        if self.sealed:
            raise StoreSealed("store is sealed")
        return self._intern(self.pair.canon(g))

    def lookup(self, g) -> Optional[int]:
        """Id of the coset Hg if it is already interned, else None."""
        return self._intern(self.pair.canon(g), insert=False)

    # -- ball enumeration ----------------------------------------------------

    def enumerate_to(self, r_max: int) -> None:
        """Run (or resume) the Schreier BFS until the ball of radius
        ``r_max`` is complete."""
        pair = self.pair
        shat = pair.shat()
        if not self.reps:
            base = self._intern(pair.identity())
            self.wl[base] = 0
            self._frontier = [base]
            self.radius_complete = 0
        while self.radius_complete < r_max and not self.saturated:
            nxt: list[int] = []
            depth = self.radius_complete + 1
            for cid in self._frontier:
                rep = self.reps[cid]
                nbrs = []
                for s in shat:
                    tid = self._intern(pair.mul(rep, s))
                    nbrs.append(tid)
                    if self.wl[tid] is None:
                        self.wl[tid] = depth
                        nxt.append(tid)
                self.adj[cid] = nbrs
            self._frontier = nxt
            self.radius_complete = depth
            if not nxt:
                self.saturated = True
        if self.saturated:
            self.radius_complete = max(self.radius_complete, r_max)

    def seal(self) -> None:
        self.sealed = True

    def ball_ids(self, r: int) -> list[int]:
        if r > self.radius_complete:
            raise BallIncomplete(
                f"ball complete to {self.radius_complete}, requested {r}")
        return [cid for cid, w in enumerate(self.wl)
                if w is not None and w <= r]

    def depth_histogram(self) -> list[int]:
        """Count of cosets per BFS depth 0..radius_complete."""
        if self.radius_complete < 0:
            raise EmptyStore("no enumerated cosets")
        counts = [0] * (self.radius_complete + 1)
        for w in self.wl:
            if w is not None:
                counts[w] += 1
        return counts

    def wl_lower_bound(self, cid: int) -> int:
        w = self.wl[cid]
        return w if w is not None else self.radius_complete + 1

    # -- double cosets -------------------------------------------------------

    def dc(self, cid: int) -> int:
        """Double-coset id of a coset, computing the right-H orbit on
        first use."""
        d = self.dc_of[cid]
        if d is None:
            d = self._compute_orbit(cid)
        return d

    def _compute_orbit(self, start: int) -> int:
        pair = self.pair
        hs = pair.h_gens_sym()
        members = [start]
        seen = {start}
        i = 0
        while i < len(members):
            x = members[i]
            i += 1
            rep = self.reps[x]
            for h in hs:
                tid = self._intern(pair.mul(rep, h))
                if tid not in seen:
                    if len(members) >= self.caps.max_orbit:
                        raise OrbitCapExceeded(
                            f"right-H orbit exceeded max_orbit="
                            f"{self.caps.max_orbit}", cap=self.caps.max_orbit)
                    seen.add(tid)
                    members.append(tid)
        dcid = len(self.dcs)
        ordered = tuple(sorted(seen))
        for m in ordered:
            if self.dc_of[m] is not None:
                raise HeckeError(
                    "interning bug: coset already assigned to a double coset")
            self.dc_of[m] = dcid
        self.dcs.append(DoubleCoset(dcid, ordered[0], ordered, R=len(ordered)))
        return dcid

    def class_R(self, dcid: int) -> int:
        return self.dcs[dcid].R

    def class_L(self, dcid: int) -> int:
        obj = self.dcs[dcid]
        if obj.L is None:
            obj.L = left_L_count(self.pair, self.reps[obj.rep_cid],
                                 self.caps.max_orbit)
        return obj.L

    def class_delta(self, dcid: int) -> Fraction:
        return Fraction(self.class_L(dcid), self.class_R(dcid))

    def class_inverse(self, dcid: int) -> int:
        obj = self.dcs[dcid]
        if obj.inv is None:
            g = self.pair.inv(self.reps[obj.rep_cid])
            other = self.dc(self._intern(g))
            obj.inv = other
            self.dcs[other].inv = dcid
        return obj.inv

    def class_members(self, dcid: int) -> tuple[int, ...]:
        return self.dcs[dcid].member_cids

    def identity_class(self) -> int:
        if not self.reps:
            raise EmptyStore("no enumerated cosets")
        return self.dc(0)

    def classes_in_ball(self, r: int) -> list[int]:
        """Double-coset ids met by the radius-r ball, in id order."""
        out: list[int] = []
        for cid in self.ball_ids(r):
            d = self.dc(cid)
            if d not in out:
                out.append(d)
        return sorted(out)

    # -- export --------------------------------------------------------------

    def snapshot(self, compute_classes: bool = True) -> dict:
        """JSON-ready snapshot, deterministically ordered by id."""
        pair = self.pair
        if compute_classes:
            i = 0
            while i < len(self.reps):
                self.dc(i)
                i += 1
            for d in range(len(self.dcs)):
                self.class_L(d)
                self.class_inverse(d)
        cosets = []
        for cid, rep in enumerate(self.reps):
            cosets.append({
                "id": cid,
                "rep": pair.render(rep),
                "wl": self.wl[cid],
                "dc": self.dc_of[cid],
            })
        dcs = []
        for obj in self.dcs:
            dcs.append({
                "id": obj.id,
                "rep": pair.render(self.reps[obj.rep_cid]),
                "R": obj.R,
                "L": obj.L,
                "delta": None if obj.delta is None else str(obj.delta),
                "inv": obj.inv,
            })
        return {
            "pair": pair.describe(),
            "radius_complete": self.radius_complete,
            "saturated": self.saturated,
            "cosets": cosets,
            "double_cosets": dcs,
        }


# ---------------------------------------------------------------------------
# module-level operations


def enumerate_ball(pair: HeckePair, r_max: int,
                   caps: Caps = Caps()) -> CosetStore:
    """Enumerate the full ball {H s1..sk : k <= r_max, s in S-hat} and seal
    the store."""
    store = CosetStore(pair, caps)
    store.enumerate_to(r_max)
    store.seal()
    return store


def intern_right_coset(store: CosetStore, g) -> int:
    return store.intern(g)


def right_H_orbit(store: CosetStore, cid: int,
                  max_orbit: Optional[int] = None) -> int:
    if max_orbit is not None and max_orbit != store.caps.max_orbit:
        old = store.caps
        store.caps = Caps(old.max_cosets, max_orbit)
        try:
            return store.dc(cid)
        finally:
            store.caps = old
    return store.dc(cid)


def left_L_count(pair: HeckePair, g, max_orbit: int = DEFAULT_MAX_ORBIT) -> int:
    """L(g) = number of left cosets of H inside HgH, computed as the orbit
    of gH under left H-multiplication (xH = yH iff x^{-1} y in H)."""
    hs = pair.h_gens_sym()
    reps = [pair.canon(g)]
    buckets: dict = {pair.left_coset_fingerprint(reps[0]): [0]}
    i = 0
    while i < len(reps):
        x = reps[i]
        i += 1
        for h in hs:
            t = pair.canon(pair.mul(h, x))
            fp = pair.left_coset_fingerprint(t)
            bucket = buckets.get(fp)
            if bucket is not None:
                if any(pair.same_left_coset(t, reps[j]) for j in bucket):
                    continue
            if len(reps) >= max_orbit:
                raise OrbitCapExceeded(
                    f"left-H orbit exceeded max_orbit={max_orbit}",
                    cap=max_orbit)
            idx = len(reps)
            reps.append(t)
            if bucket is None:
                buckets[fp] = [idx]
            else:
                bucket.append(idx)
    return len(reps)


def relative_modular(pair: HeckePair, g,
                     max_orbit: int = DEFAULT_MAX_ORBIT) -> Fraction:
    """Delta(g) = L(g) / R(g) with R(g) = L(g^{-1}); exactly 1 on H."""
    if pair.in_h(pair.canon(g)):
        return Fraction(1)
    left = left_L_count(pair, g, max_orbit)
    right = left_L_count(pair, pair.inv(g), max_orbit)
    return Fraction(left, right)


@dataclass
class UnimodularityReport:
    verdict: bool
    witnesses: list  # (element, Fraction) per probed generator

    def as_dict(self, pair: HeckePair) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": [
                {"element": pair.render(g), "delta": str(d)}
                for g, d in self.witnesses
            ],
        }


def unimodularity_check(pair: HeckePair,
                        max_orbit: int = DEFAULT_MAX_ORBIT) -> UnimodularityReport:
    """Decide relative unimodularity from the modular values of the
    generators (Delta is a homomorphism trivial on H, so generators
    suffice).  For pairs without a finite generating set a failing probe
    still soundly yields a False verdict."""
    witnesses = []
    verdict = True
    for s in pair.unimod_probes():
        delta = relative_modular(pair, s, max_orbit)
        witnesses.append((s, delta))
        if delta != 1:
            verdict = False
    if verdict and not pair.finitely_generated:
        from .errors import NotFinitelyGenerated
        raise NotFinitelyGenerated(
            f"{pair.label}: cannot certify unimodularity without a finite "
            "generating set")
    return UnimodularityReport(verdict, witnesses)


def invert_double_coset(store: CosetStore, dcid: int) -> int:
    return store.class_inverse(dcid)


@dataclass
class HeckeVerification:
    verdict: str                      # "hecke" | "inconclusive"
    depth: int
    n_cosets: int
    n_classes: int
    max_L: Optional[int]
    max_R: Optional[int]
    cap_hits: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "depth": self.depth,
            "n_cosets": self.n_cosets,
            "n_classes": self.n_classes,
            "max_L": self.max_L,
            "max_R": self.max_R,
            "cap_hits": list(self.cap_hits),
        }


def verify_hecke(pair: HeckePair, depth: int,
                 caps: Caps = Caps()) -> HeckeVerification:
    """Compute L and R for every double coset met in the depth-ball.  A cap
    hit yields the verdict 'inconclusive', never 'false'."""
    cap_hits: list[str] = []
    try:
        store = enumerate_ball(pair, depth, caps)
    except CapExceeded as exc:
        return HeckeVerification("inconclusive", depth, 0, 0, None, None,
                                 [str(exc)])
    ball = list(range(len(store)))
    max_l = 0
    max_r = 0
    classes: set[int] = set()
    for cid in ball:
        try:
            d = store.dc(cid)
        except CapExceeded as exc:
            cap_hits.append(str(exc))
            continue
        if d in classes:
            continue
        classes.add(d)
        max_r = max(max_r, store.class_R(d))
        try:
            max_l = max(max_l, store.class_L(d))
        except CapExceeded as exc:
            cap_hits.append(str(exc))
    verdict = "inconclusive" if cap_hits else "hecke"
    return HeckeVerification(verdict, depth, len(ball), len(classes),
                             max_l or None, max_r or None, cap_hits)


def check_interning_soundness(store: CosetStore,
                              limit: int = 10_000) -> list[tuple[int, int]]:
    """Exhaustively re-test that distinct ids hold distinct cosets.
    Returns offending id pairs (empty on a sound store).  Quadratic;
    intended for stores of at most ``limit`` cosets."""
    n = len(store)
    if n > limit:
        raise HeckeError(f"store too large for exhaustive check ({n} cosets)")
    pair = store.pair
    bad = []
    invs = [pair.inv(r) for r in store.reps]
    for i in range(n):
        gi = store.reps[i]
        for j in range(i + 1, n):
            if pair.in_h(pair.mul(gi, invs[j])):
                bad.append((i, j))
    return bad
