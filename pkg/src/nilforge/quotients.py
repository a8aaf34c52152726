"""Finite quotients of the free nilpotent groups by normal closures.

`make_quotient` turns a relator set into a power-commutator style reduction
system over the ambient Hall basis:

* a relator whose normal form carries some symbol with exponent +-1 (the
  last letter, or any central letter) *eliminates* that symbol: the symbol
  gets modulus 1 and a substitution word over the remaining symbols;
* the remaining relators, together with saturated generator-conjugates of
  everything, are triangularized by leading symbol with exact integer gcd
  combinations, giving each surviving symbol a modulus and a power-rule tail.

Canonical representatives are exponent vectors with each entry in
``[0, modulus)`` and zero at eliminated symbols; `FiniteQuotient.reduce`
maps any element onto its representative by fixpoint rewriting, which only
ever multiplies by members of the normal closure, so cosets are preserved
by construction and correctness is then attested by `consistency_check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .hall import (
    BasisError,
    FreeNilElement,
    NilpotentBasis,
    _collect_letters,
    builtin_basis,
    collect,
    inverse,
    multiply,
    power,
)

__all__ = [
    "QuotientError",
    "InfiniteIndexError",
    "RelatorSet",
    "PcElement",
    "FiniteQuotient",
    "standard_relators",
    "make_quotient",
    "standard_quotient",
    "reduce_element",
    "membership",
    "consistency_check",
    "ConsistencyReport",
    "is_prime",
]


class QuotientError(RuntimeError):
    """Inconsistent or non-terminating elimination; never silently patched."""


class InfiniteIndexError(QuotientError):
    """The normal closure does not have finite index."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


@dataclass(frozen=True)
class RelatorSet:
    """Normal-closure generators over an ambient basis, with a campaign tag."""

    basis: NilpotentBasis
    relators: tuple[FreeNilElement, ...]
    label: str

    def __post_init__(self):
        for rel in self.relators:
            if rel.basis is not self.basis:
                raise BasisError("relator over the wrong basis")


def standard_relators(kind: str, p: int, r: int | None = None) -> RelatorSet:
    """The named relator families.

    ``N_r``  in F23: x^(p^2), y^p, x^(-rp)*[y,x,x], [y,x,y]
    ``K``    in F23: x^(p^2), y^p, [y,x,y]
    ``M``    in F23: x^p, y
    ``DH_M_r`` in F32: the p-th powers of the three brackets, the three mixed
    relators x^(rp)*[y,x], y^(rp)*[z,x], z^(rp)*[z,x]^-1*[z,y], and the
    p^2-th powers of the generators.  The p^2-th powers are forced by the
    quotient's exponent; without them the subgroup would depend on the
    integer r rather than on r mod p and the index would be r^3 * p^6.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if kind in ("N_r", "K", "M"):
        if p <= 3:
            raise ValueError(f"kind {kind} needs a prime greater than 3")
        basis = builtin_basis("F23")
        x, y = basis.gens()
        d = basis.generator(3)
        e = basis.generator(4)
        if kind == "K":
            rels = (power(x, p * p), power(y, p), e)
            return RelatorSet(basis, rels, f"K(p={p})")
        if kind == "M":
            rels = (power(x, p), y)
            return RelatorSet(basis, rels, f"M(p={p})")
        if r is None or not 1 <= r <= p - 1:
            raise ValueError("r must satisfy 1 <= r <= p-1")
        rels = (power(x, p * p), power(y, p),
                multiply(power(x, -r * p), d), e)
        return RelatorSet(basis, rels, f"N_r(p={p},r={r})")
    if kind == "DH_M_r":
        if p == 2:
            raise ValueError("kind DH_M_r needs an odd prime")
        if r is None or not 1 <= r <= p - 1:
            raise ValueError("r must satisfy 1 <= r <= p-1")
        basis = builtin_basis("F32")
        x, y, z = basis.gens()
        c1, c2, c3 = (basis.generator(i) for i in (3, 4, 5))
        rels = (
            power(x, p * p), power(y, p * p), power(z, p * p),
            power(c1, p), power(c2, p), power(c3, p),
            multiply(power(x, r * p), c1),
            multiply(power(y, r * p), c2),
            multiply(multiply(power(z, r * p), inverse(c2)), c3),
        )
        return RelatorSet(basis, rels, f"M_r(p={p},r={r})")
    raise ValueError(f"unknown relator kind {kind!r}")


# ---------------------------------------------------------------------------
# quotient construction
# ---------------------------------------------------------------------------

_REWRITE_CAP = 120
_SATURATION_CAP = 24


class _Builder:
    def __init__(self, relset: RelatorSet):
        self.basis = relset.basis
        self.relset = relset
        self.subs: dict[int, FreeNilElement] = {}
        self.slots: dict[int, FreeNilElement] = {}
        self.dirty = False

    # substitution + modular rewriting with the live rule state
    def _rule(self, s: int):
        tail = self.subs.get(s)
        if tail is not None:
            return 1, tail
        slot = self.slots.get(s)
        if slot is not None:
            lead_exp = slot.exponents[s]
            suffix = [(t, e) for t, e in slot.letters() if t != s]
            return lead_exp, inverse(collect(self.basis, suffix))
        return None

    def normalize(self, elem: FreeNilElement) -> FreeNilElement:
        # A small cap: with an incomplete rule table a downward substitution
        # can fail to stabilize; the caller then retries the element after
        # more rules have been found.
        return _rewrite_fixpoint(self.basis, elem, self._rule, {}, cap=30)

    def insert(self, elem: FreeNilElement) -> None:
        if elem.is_identity():
            return
        if self._try_eliminate(elem):
            return
        elem = self.normalize(elem)
        if self._try_eliminate(elem):
            return
        self._lattice_insert(elem)

    def _try_eliminate(self, elem: FreeNilElement) -> bool:
        letters = elem.letters()
        klass = self.basis.nilpotency_class
        for pos in range(len(letters) - 1, -1, -1):
            s, e = letters[pos]
            if abs(e) != 1 or s in self.subs:
                continue
            central = self.basis.symbols[s].weight == klass
            if pos != len(letters) - 1 and not central:
                continue
            rest = collect(self.basis, letters[:pos] + letters[pos + 1:])
            tail = inverse(rest) if e == 1 else rest
            if s in _power_support_closure(self.basis, tail):
                # powers of this tail would regenerate the symbol, making
                # the substitution non-terminating; leave it to the lattice
                continue
            self.subs[s] = tail
            self.dirty = True
            # every slot reducer may mention the eliminated symbol: requeue
            requeued = list(self.slots.values())
            self.slots.clear()
            for other in requeued:
                self.insert(other)
            return True
        return False

    def _lattice_insert(self, elem: FreeNilElement) -> None:
        while not elem.is_identity():
            s, e = elem.letters()[0]
            if e < 0:
                elem = inverse(elem)
                e = -e
            slot = self.slots.get(s)
            if slot is None:
                self.slots[s] = elem
                self.dirty = True
                return
            m = slot.exponents[s]
            if e % m == 0:
                elem = self.normalize(multiply(power(slot, -(e // m)), elem))
                continue
            g, a, b = _xgcd(m, e)
            merged = self.normalize(multiply(power(slot, a), power(elem, b)))
            rest = self.normalize(multiply(power(slot, -(e // g)), power(elem, m // g)))
            if merged.exponents[s] != g:  # pragma: no cover - sanity
                raise QuotientError("gcd combination lost its leading exponent")
            self.slots[s] = merged
            self.dirty = True
            elem = rest

    def sub_relators(self) -> list[FreeNilElement]:
        return [multiply(self.basis.generator(s), inverse(tail))
                for s, tail in self.subs.items()]


def _emit(s, e, rule, out, cache, depth, limit) -> bool:
    """Append the reduction of one letter s^e, exponent kept inside the
    symbol's modulus; overflow is routed through the symbol's tail.  Returns
    whether anything was rewritten.  Reducing an emitted exponent only drops
    powers of relators, so the coset is preserved wherever the letter sits.

    ``limit`` bounds the bit size of recursively emitted exponents: a sound
    rule table keeps them within a constant of the input, while a divergent
    substitution chain doubles them per level and is cut off while powers
    are still cheap to form.
    """
    if e == 0:
        return False
    if depth > 40 or (depth and abs(e).bit_length() > limit):
        raise QuotientError("substitution chains did not stabilize")
    r = rule(s)
    if r is None:
        out.append((s, e))
        return False
    m, tail = r
    if m == 1:
        if not tail.is_identity():
            for t, k in _tail_power_letters(tail, e, s, m, cache):
                _emit(t, k, rule, out, cache, depth + 1, limit)
        return True
    q, rem = divmod(e, m)
    if rem:
        out.append((s, rem))
    if q:
        if not tail.is_identity():
            for t, k in _tail_power_letters(tail, q, s, m, cache):
                _emit(t, k, rule, out, cache, depth + 1, limit)
        return True
    return False


def _power_support_closure(basis, tail: FreeNilElement) -> set[int]:
    """Symbols that can occur in normal forms of powers of ``tail``: its
    support closed under taking defining brackets."""
    supp = {s for s, _e in tail.letters()}
    for _ in range(basis.nilpotency_class):
        new = set()
        for a in supp:
            for b in supp:
                if a > b:
                    for sym, _c in basis.bracket_entries(a, b):
                        if sym not in supp:
                            new.add(sym)
        if not new:
            break
        supp |= new
    return supp


def _rewrite_fixpoint(basis, elem, rule, tailpow_cache, cap=_REWRITE_CAP) -> FreeNilElement:
    # Exponent sizes may square once (cross terms of the input letters) and
    # then grow additively; doubling round over round means a divergent rule
    # table, caught here while the integers are still small.
    bits = max((abs(e).bit_length() for _s, e in elem.letters()), default=1)
    allowed = 2 * bits + 8192
    for _ in range(cap):
        changed = False
        letters: list[tuple[int, int]] = []
        for s, e in elem.letters():
            if _emit(s, e, rule, letters, tailpow_cache, 0, allowed):
                changed = True
        if not changed:
            return elem
        elem = FreeNilElement(basis, _collect_letters(basis, letters))
        if max((abs(e).bit_length() for _s, e in elem.letters()),
               default=1) > allowed:
            raise QuotientError("rewriting exponents grow without bound")
    raise QuotientError("rewriting did not reach a fixpoint")


def _tail_power_letters(tail, q, s, m, cache):
    key = (s, m, q)
    got = cache.get(key)
    if got is None:
        got = power(tail, q).letters()
        if len(cache) < 4096:
            cache[key] = got
    return got


def make_quotient(relset: RelatorSet) -> "FiniteQuotient":
    basis = relset.basis
    builder = _Builder(relset)
    seen: set[tuple[int, ...]] = set()
    worklist: list[FreeNilElement] = []
    for rel in relset.relators:
        nf = collect(basis, rel.letters())
        if nf.exponents not in seen:
            seen.add(nf.exponents)
            worklist.append(nf)

    gens = range(basis.rank)
    deferred: list[FreeNilElement] = []
    for round_no in range(_SATURATION_CAP):
        builder.dirty = False
        while worklist:
            elem = worklist.pop(0)
            try:
                builder.insert(elem)
            except QuotientError:
                # not yet reducible with the current partial rule table
                deferred.append(elem)
        if deferred and builder.dirty:
            worklist, deferred = deferred, []
            continue
        if round_no > 0 and not builder.dirty and not deferred:
            break
        sources = (list(relset.relators) + list(builder.slots.values())
                   + builder.sub_relators())
        for src in sources:
            for g in gens:
                for sign in (1, -1):
                    conj_letters = ([(g, -sign)] + src.letters() + [(g, sign)])
                    conj = collect(basis, conj_letters)
                    if conj.exponents not in seen:
                        seen.add(conj.exponents)
                        worklist.append(conj)
        worklist.extend(deferred)
        deferred = []
    else:  # pragma: no cover - safety net
        raise QuotientError("saturation did not stabilize")
    if deferred:
        raise QuotientError(
            f"{len(deferred)} relator consequence(s) of {relset.label} could "
            "not be reduced to the rule table")

    missing = [basis.symbols[s].name for s in range(basis.size)
               if s not in builder.subs and s not in builder.slots]
    if missing:
        raise InfiniteIndexError(
            f"no modulus for symbol(s) {', '.join(missing)}: "
            f"the normal closure of {relset.label} has infinite index")

    moduli = [1] * basis.size
    tails: list[FreeNilElement] = [basis.identity] * basis.size
    for s, tail in builder.subs.items():
        tails[s] = tail
    for s, slot in builder.slots.items():
        moduli[s] = slot.exponents[s]
        suffix = [(t, e) for t, e in slot.letters() if t != s]
        tails[s] = inverse(collect(basis, suffix))

    quotient = FiniteQuotient(basis, relset, tuple(moduli),
                              tuple(t.exponents for t in tails))
    quotient._canonicalize_tails()

    for src in list(relset.relators) + builder.sub_relators():
        if not quotient.reduce(src).is_identity():
            raise QuotientError(
                f"inconsistent elimination for {relset.label}: relator "
                f"{src!r} does not reduce to the identity")
    return quotient


class PcElement:
    """A canonical representative in a finite quotient."""

    __slots__ = ("quotient", "vector")

    def __init__(self, quotient: "FiniteQuotient", vector: tuple[int, ...]):
        self.quotient = quotient
        self.vector = vector

    def letters(self) -> list[tuple[int, int]]:
        return [(i, e) for i, e in enumerate(self.vector) if e]

    def lift(self) -> FreeNilElement:
        return FreeNilElement(self.quotient.basis, self.vector)

    def is_identity(self) -> bool:
        return not any(self.vector)

    def index(self) -> int:
        return self.quotient.encode(self.vector)

    def __mul__(self, other: "PcElement") -> "PcElement":
        return self.quotient.pc_multiply(self, other)

    def __pow__(self, n: int) -> "PcElement":
        return self.quotient.pc_power(self, n)

    def inverse(self) -> "PcElement":
        return self.quotient.pc_inverse(self)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PcElement)
                and self.quotient is other.quotient
                and self.vector == other.vector)

    def __hash__(self) -> int:
        return hash((id(self.quotient), self.vector))

    def __repr__(self) -> str:
        if self.is_identity():
            return "1"
        basis = self.quotient.basis
        return " ".join(
            f"{basis.symbols[i].name}^{e}" if e != 1 else basis.symbols[i].name
            for i, e in self.letters())


class FiniteQuotient:
    """A finite quotient presented by per-symbol moduli and rewrite tails.

    ``moduli[s] == 1`` marks an eliminated symbol whose occurrences are
    replaced by ``tails[s]``; otherwise ``s^moduli[s]`` rewrites to
    ``tails[s]``.  The group order is the product of the moduli.
    """

    def __init__(self, basis: NilpotentBasis, relator_set: RelatorSet,
                 moduli: tuple[int, ...], tails: tuple[tuple[int, ...], ...]):
        if len(moduli) != basis.size or len(tails) != basis.size:
            raise QuotientError("rule table shape mismatch")
        self.basis = basis
        self.relator_set = relator_set
        self.label = relator_set.label
        self.moduli = tuple(int(m) for m in moduli)
        self.tails = tuple(tuple(int(e) for e in t) for t in tails)
        self.order = 1
        for m in self.moduli:
            self.order *= m
        self.pc_symbols = tuple(s for s, m in enumerate(self.moduli) if m > 1)
        strides = [0] * basis.size
        acc = 1
        for s in reversed(self.pc_symbols):
            strides[s] = acc
            acc *= self.moduli[s]
        self._strides = tuple(strides)
        self._tailpow: dict = {}
        self._rebuild_rules()
        self.identity = PcElement(self, (0,) * basis.size)

    def _rebuild_rules(self) -> None:
        self._rules = tuple(
            (self.moduli[s], FreeNilElement(self.basis, self.tails[s]))
            for s in range(self.basis.size))
        self._tailpow.clear()

    # -- prime of a p-group quotient ----------------------------------------

    @property
    def prime(self) -> int:
        n = self.order
        if n == 1:
            raise QuotientError("trivial quotient has no prime")
        p = 2
        while n % p:
            p += 1
        while n % p == 0:
            n //= p
        if n != 1:
            raise QuotientError(f"order {self.order} is not a prime power")
        return p

    # -- reduction -----------------------------------------------------------

    def reduce(self, elem: FreeNilElement) -> PcElement:
        if elem.basis is not self.basis:
            raise BasisError("element over the wrong basis")
        out = _rewrite_fixpoint(self.basis, elem, self._rules.__getitem__,
                                self._tailpow)
        return PcElement(self, out.exponents)

    def reduce_letters(self, letters) -> PcElement:
        elem = FreeNilElement(self.basis, _collect_letters(self.basis, letters))
        return self.reduce(elem)

    def membership(self, elem: FreeNilElement) -> bool:
        return self.reduce(elem).is_identity()

    def _canonicalize_tails(self) -> None:
        # Rewrite the power-rule tails to canonical representatives so the
        # rule table serializes deterministically.  Substitution tails are
        # kept exactly as eliminated: the builder produces them in a form
        # whose free-group powers stay closed (e.g. a central cofactor), and
        # the canonical representative may lose that property.
        for _ in range(_REWRITE_CAP):
            new_tails = []
            changed = False
            for s in range(self.basis.size):
                tail = self.tails[s]
                if self.moduli[s] == 1 or not any(tail):
                    new_tails.append(tail)
                    continue
                reduced = self.reduce(FreeNilElement(self.basis, tail)).vector
                if reduced != tail:
                    changed = True
                new_tails.append(reduced)
            self.tails = tuple(new_tails)
            self._rebuild_rules()
            if not changed:
                return
        raise QuotientError("tail canonicalization did not stabilize")

    # -- canonical arithmetic --------------------------------------------------

    def element(self, vector: Sequence[int]) -> PcElement:
        vec = tuple(int(v) for v in vector)
        if len(vec) != self.basis.size:
            raise QuotientError("vector length mismatch")
        return self.reduce(FreeNilElement(self.basis, vec))

    def pc_multiply(self, a: PcElement, b: PcElement) -> PcElement:
        if a.quotient is not self or b.quotient is not self:
            raise QuotientError("elements from a different quotient")
        return self.reduce_letters(a.letters() + b.letters())

    def pc_inverse(self, a: PcElement) -> PcElement:
        letters = [(s, -e) for s, e in reversed(a.letters())]
        return self.reduce_letters(letters)

    def pc_power(self, a: PcElement, n: int) -> PcElement:
        if n == 0:
            return self.identity
        base = a if n > 0 else self.pc_inverse(a)
        n = abs(n)
        result = None
        while n:
            if n & 1:
                result = base if result is None else self.pc_multiply(result, base)
            n >>= 1
            if n:
                base = self.pc_multiply(base, base)
        return result

    def pc_commutator(self, a: PcElement, b: PcElement) -> PcElement:
        ai = [(s, -e) for s, e in reversed(a.letters())]
        bi = [(s, -e) for s, e in reversed(b.letters())]
        return self.reduce_letters(ai + bi + a.letters() + b.letters())

    def generator_image(self, s: int) -> PcElement:
        return self.reduce(self.basis.generator(s))

    # -- dense indexing --------------------------------------------------------

    def encode(self, vector: Sequence[int]) -> int:
        idx = 0
        for s in self.pc_symbols:
            idx += vector[s] * self._strides[s]
        return idx

    def decode(self, index: int) -> tuple[int, ...]:
        vec = [0] * self.basis.size
        for s in self.pc_symbols:
            vec[s], index = divmod(index, self._strides[s])
        return tuple(vec)

    def all_elements(self) -> Iterable[PcElement]:
        for idx in range(self.order):
            yield PcElement(self, self.decode(idx))

    # -- serialization ---------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "format": "nilforge-quotient/1",
            "basis": self.basis.name,
            "label": self.label,
            "moduli": list(self.moduli),
            "tails": [list(t) for t in self.tails],
            "relators": [list(r.exponents) for r in self.relator_set.relators],
            "order": str(self.order),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "FiniteQuotient":
        if payload.get("format") != "nilforge-quotient/1":
            raise QuotientError("unknown quotient payload format")
        basis = builtin_basis(payload["basis"])
        relators = tuple(FreeNilElement(basis, tuple(map(int, r)))
                         for r in payload["relators"])
        relset = RelatorSet(basis, relators, payload["label"])
        q = cls(basis, relset, tuple(map(int, payload["moduli"])),
                tuple(tuple(map(int, t)) for t in payload["tails"]))
        if str(q.order) != payload["order"]:
            raise QuotientError("stored order does not match the moduli")
        return q

    def __repr__(self) -> str:
        return f"FiniteQuotient({self.label}, order={self.order})"


def reduce_element(q: FiniteQuotient, a: FreeNilElement) -> PcElement:
    return q.reduce(a)


def membership(q: FiniteQuotient, a: FreeNilElement) -> bool:
    return q.membership(a)


def standard_quotient(kind: str, p: int, r: int | None = None) -> FiniteQuotient:
    """Memoized quotient for one of the standard relator families."""
    return _standard_quotient(kind, p, r)


@lru_cache(maxsize=None)
def _standard_quotient(kind, p, r):
    return make_quotient(standard_relators(kind, p, r))


# ---------------------------------------------------------------------------
# consistency checking
# ---------------------------------------------------------------------------

@dataclass
class ConsistencyReport:
    label: str
    order: int
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _name, ok, _d in self.checks)

    def failures(self) -> list[str]:
        return [f"{name}: {detail}" for name, ok, detail in self.checks if not ok]


def consistency_check(q: FiniteQuotient, seed: int = 0,
                      pair_samples: int = 100_000,
                      triple_samples: int = 100_000) -> ConsistencyReport:
    """Validate the reduction system of a quotient.

    Checks, with exhaustive scopes on small orders and seeded samples above:
    the modulus product, retraction of reduce on canonical representatives,
    vanishing of the relators and sampled conjugates, agreement of the dense
    translation tables with direct reduction, bijectivity of all left and
    right translations, and associativity of the quotient multiplication.
    """
    import random

    import numpy as np

    from .lab import dense_group

    rng = random.Random(seed)
    rep = ConsistencyReport(q.label, q.order)
    n = q.order
    basis = q.basis

    prod = 1
    for m in q.moduli:
        prod *= m
    rep.record("order-is-modulus-product", prod == n, f"{prod} vs {n}")

    try:
        return _consistency_body(q, rng, rep, pair_samples, triple_samples)
    except QuotientError as ex:
        rep.record("reduction-system", False, f"rewriting failed: {ex}")
        return rep


def _consistency_body(q, rng, rep, pair_samples, triple_samples):
    import random

    import numpy as np

    from .lab import dense_group

    n = q.order
    basis = q.basis

    # retraction on canonical representatives
    if n <= 10_000:
        idxs = range(n)
        scope = "all"
    else:
        idxs = (rng.randrange(n) for _ in range(10_000))
        scope = "sampled"
    bad = 0
    for idx in idxs:
        vec = q.decode(idx)
        got = q.reduce(FreeNilElement(basis, vec)).vector
        if got != vec or q.encode(got) != idx:
            bad += 1
    rep.record("reduce-retraction", bad == 0, f"{scope}, {bad} failures")

    # relators and their sampled conjugates vanish
    bad = 0
    total = 0
    for rel in q.relator_set.relators:
        if not q.membership(rel):
            bad += 1
        total += 1
        for _ in range(25):
            w = [(rng.randrange(basis.size), rng.randrange(-4, 5)) for _ in range(4)]
            g = collect(basis, w)
            conj = multiply(multiply(inverse(g), rel), g)
            total += 1
            if not q.membership(conj):
                bad += 1
    rep.record("relators-vanish", bad == 0, f"{total} instances, {bad} failures")

    dense = dense_group(q)

    # dense translation tables agree with direct reduction on a seeded sample
    sample = min(pair_samples, 10_000, n * n)
    bad = 0
    for _ in range(sample):
        i, j = rng.randrange(n), rng.randrange(n)
        a = PcElement(q, q.decode(i))
        b = PcElement(q, q.decode(j))
        if dense.mult(i, j) != (a * b).index():
            bad += 1
    rep.record("dense-bridge", bad == 0, f"{sample} sampled pairs, {bad} failures")

    # every translation is a bijection (all-pairs multiplicativity scope)
    if n <= 10_000:
        ok = True
        all_idx = np.arange(n, dtype=np.int64)
        chunk = max(1, 2_000_000 // max(n, 1))
        for start in range(0, n, chunk):
            block = all_idx[start:start + chunk]
            rows = dense.mult(block[:, None], all_idx[None, :])
            if not (np.sort(rows, axis=1) == all_idx[None, :]).all():
                ok = False
                break
            cols = dense.mult(all_idx[None, :], block[:, None])
            if not (np.sort(cols, axis=1) == all_idx[None, :]).all():
                ok = False
                break
        rep.record("translations-bijective", ok, "all pairs")
    else:
        ok = True
        idx = np.array([rng.randrange(n) for _ in range(1024)], dtype=np.int64)
        prods = dense.mult(idx[:, None], idx[None, :])
        ok = bool((prods < n).all())
        rep.record("translations-bijective", ok, "sampled")

    # associativity
    if n <= 625:
        table = dense.mult(np.arange(n, dtype=np.int64)[:, None],
                           np.arange(n, dtype=np.int64)[None, :])
        ok = True
        for a in range(n):
            lhs = table[table[a, :], :]
            rhs = table[a, table]
            if not (lhs == rhs).all():
                ok = False
                break
        rep.record("associativity", ok, f"exhaustive, {n}^3 triples")
    else:
        k = triple_samples
        aa = np.array([rng.randrange(n) for _ in range(k)], dtype=np.int64)
        bb = np.array([rng.randrange(n) for _ in range(k)], dtype=np.int64)
        cc = np.array([rng.randrange(n) for _ in range(k)], dtype=np.int64)
        lhs = dense.mult(dense.mult(aa, bb), cc)
        rhs = dense.mult(aa, dense.mult(bb, cc))
        ok = bool((lhs == rhs).all())
        rep.record("associativity", ok, f"{k} sampled triples")

    return rep
