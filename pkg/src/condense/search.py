"""Bounded enumeration of condensable values V(S) with witness reconstruction.

Two complementary strategies share one memo per (caps, rules):

* :meth:`Condenser.table` computes the full closure for a multiset: every
  split ``A + B = S``, every operation in both operand orders, then repeated
  factorials.  Each value keeps a back-pointer to the first way it was made.
* :meth:`Condenser.find` answers "is ``t`` condensable from ``S``?" without
  materialising V(S).  For each split it enumerates the values of the smaller
  side and solves for the single value the bigger side would have to produce
  (``t - a``, ``t / a``, an exact root, ...), recursing only on those.

Negative answers are always relative to the caps, never proofs.
"""

from __future__ import annotations

import logging
import math
import os
import tempfile
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, islice
from pathlib import Path

from .arith import (
    ADD, DIV, EXCEEDS, MUL, POW, SUB, UNDEFINED,
    DEFAULT_CAPS, DEFAULT_RULES, RuleSet, SearchCaps, arith_for, exact,
)
from .expr import (
    Binary, DigitMultiset, Expr, Factorial, Leaf,
    as_multiset, leaves, parse, render, try_evaluate,
)

log = logging.getLogger(__name__)

Key = tuple  # the ten multiplicities of a digit multiset

_COMMUTATIVE = (ADD, MUL)
_ORDERED = (SUB, DIV, POW)


class BudgetExhausted(Exception):
    """Raised internally when a bounded search runs out of nodes."""


def submultisets(counts: Key, size: int) -> Iterator[Key]:
    """Sub-count-vectors of exactly ``size`` elements, small digits first."""
    out = [0] * 10
    rest = [0] * 11
    for d in range(9, -1, -1):
        rest[d] = rest[d + 1] + counts[d]

    def rec(d, left):
        if left == 0:
            yield tuple(out)
            return
        if d == 10 or rest[d] < left:
            return
        for c in range(min(left, counts[d]), -1, -1):
            out[d] = c
            yield from rec(d + 1, left - c)
        out[d] = 0

    yield from rec(0, size)


def partitions(counts: Key) -> Iterator[tuple[Key, Key]]:
    """Unordered splits ``{A, B}`` with ``|A| <= |B|``, smaller parts first."""
    n = sum(counts)
    for s in range(1, n // 2 + 1):
        for a in submultisets(counts, s):
            b = tuple(x - y for x, y in zip(counts, a))
            if 2 * s == n and a > b:
                continue
            yield a, b


def _quot(x, y):
    if type(x) is int and type(y) is int and x % y == 0:
        return x // y
    return exact(Fraction(x) / y)


def _key_size(key: Key) -> int:
    return sum(key)


def _iroot(n: int, m: int) -> int | None:
    """Exact non-negative integer m-th root of ``n >= 0``, or None."""
    if n < 2:
        return n
    r = round(n ** (1.0 / m)) if n.bit_length() < 1000 else 1 << (n.bit_length() // m)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**m == n:
            return cand
    return None


def _roots(t, m: int) -> list:
    """All rationals r with r**m == t, for integer m >= 1."""
    if t == 0:
        return [0]
    if type(t) is int:
        p, q = t, 1
    else:
        p, q = t.numerator, t.denominator
    rp, rq = _iroot(abs(p), m), _iroot(q, m)
    if rp is None or rq is None:
        return []
    r = exact(Fraction(rp, rq))
    if p < 0:
        return [-r] if m % 2 else []
    return [r, -r] if m % 2 == 0 else [r]


@dataclass
class ValueTable:
    """V(S) for one multiset under one configuration.

    Maps each value to a back-pointer; :meth:`witness` rebuilds the tree.
    """

    multiset: DigitMultiset
    entries: dict
    engine: Condenser = field(repr=False)

    def __contains__(self, value) -> bool:
        return exact(value) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def values(self) -> list:
        return list(self.entries)

    def witness(self, value) -> Expr:
        return self.engine._rebuild(self.multiset.counts, exact(value))

    def items(self) -> Iterator[tuple[object, Expr]]:
        for v in self.entries:
            yield v, self.witness(v)


class Condenser:
    """Memoised condensing engine for one (caps, rules) configuration.

    ``table_size`` is the largest multiset for which :meth:`find` consults the
    full closure instead of searching by inverse operations.  ``use_lemmas``
    lets :meth:`find` try the constructive "make a 1 from the rest" shortcut
    first on multisets of five or more digits.
    """

    def __init__(self, caps: SearchCaps | None = None, rules: RuleSet | None = None,
                 *, table_size: int = 3, use_lemmas: bool = True):
        self.caps = caps or DEFAULT_CAPS
        self.rules = rules or DEFAULT_RULES
        self.ar = arith_for(self.caps, self.rules)
        self.table_size = table_size
        self.use_lemmas = use_lemmas
        self._ops = self.rules.binary_ops
        self._tables: dict[Key, dict] = {}
        self._memo: dict[tuple[Key, object], Expr | None] = {}
        self._budget: int | None = None
        self._nodes = 0
        self._fact_of = {}
        if self.rules.allow_fact:
            f = 1
            for m in range(1, self.caps.max_factorial_arg + 1):
                f *= m
                if f != m and self.caps.admits(f):
                    self._fact_of[f] = m
            if self.rules.zero_fact_is_one:
                self._fact_of.setdefault(1, 0)

    # ----- full closure -------------------------------------------------

    def table(self, s) -> ValueTable:
        ms = as_multiset(s)
        if ms.size == 0:
            raise ValueError("V(S) needs a non-empty multiset")
        return ValueTable(ms, self._table(ms.counts), self)

    def _table(self, key: Key) -> dict:
        entries = self._tables.get(key)
        if entries is not None:
            return entries
        entries = {}
        if _key_size(key) == 1:
            d = key.index(1)
            entries[d] = ("L", d)
        else:
            ar = self.ar
            ordered = [(op, ar.ops[op]) for op in self._ops if op in _ORDERED]
            commutative = [(op, ar.ops[op]) for op in self._ops if op in _COMMUTATIVE]
            for ka, kb in partitions(key):
                ta, tb = self._table(ka), self._table(kb)
                for a in ta:
                    for b in tb:
                        for op, f in commutative:
                            r = f(a, b)
                            if r.__class__ is not _FAIL and r not in entries:
                                entries[r] = (op, ka, a, kb, b)
                        for op, f in ordered:
                            r = f(a, b)
                            if r.__class__ is not _FAIL and r not in entries:
                                entries[r] = (op, ka, a, kb, b)
                            r = f(b, a)
                            if r.__class__ is not _FAIL and r not in entries:
                                entries[r] = (op, kb, b, ka, a)
        self._close_factorials(entries)
        self._tables[key] = entries
        return entries

    def _close_factorials(self, entries: dict) -> None:
        if not self.rules.allow_fact:
            return
        changed = True
        while changed:
            changed = False
            for m in range(self.caps.max_factorial_arg + 1):
                if m in entries:
                    r = self.ar.factorial(m)
                    if r.__class__ is not _FAIL and r not in entries:
                        entries[r] = ("!", m)
                        changed = True

    def _rebuild(self, key: Key, value) -> Expr:
        bp = self._table(key)[value]
        if bp[0] == "L":
            return Leaf(bp[1])
        if bp[0] == "!":
            return Factorial(self._rebuild(key, bp[1]))
        op, ka, a, kb, b = bp
        return Binary(op, self._rebuild(ka, a), self._rebuild(kb, b))

    # ----- target-directed search ----------------------------------------

    def find(self, s, target, *, max_nodes: int | None = None) -> Expr | None:
        """A witness for ``target`` using all of ``s``, or None if none was
        found within the caps (and within ``max_nodes`` search nodes)."""
        ms = as_multiset(s)
        if ms.size == 0:
            raise ValueError("condensing needs a non-empty multiset")
        t = exact(target)
        if not self.caps.admits(t):
            return None
        self._budget = max_nodes
        self._nodes = 0
        try:
            return self._find(ms.counts, t)
        except BudgetExhausted:
            log.debug("search budget of %s nodes exhausted for %r -> %s", max_nodes, ms, t)
            return None
        finally:
            self._budget = None

    def _find(self, key: Key, t) -> Expr | None:
        mk = (key, t)
        if mk in self._memo:
            return self._memo[mk]
        if _key_size(key) <= self.table_size:
            tab = self._table(key)
            w = self._rebuild(key, t) if t in tab else None
        else:
            if self._budget is not None:
                self._nodes += 1
                if self._nodes > self._budget:
                    raise BudgetExhausted
            w = self._search(key, t)
        self._memo[mk] = w
        return w

    def _search(self, key: Key, t) -> Expr | None:
        n = _key_size(key)
        if self.use_lemmas and n >= 5:
            w = self._lemma_shortcut(key, t)
            if w is not None:
                return w
        for ka, kb in partitions(key):
            for a in self._table(ka):
                for op, a_left, need in self._inverses(a, t):
                    if type(need) is str:
                        wb = self._find_any(kb, need)
                    else:
                        if not self.caps.admits(need):
                            continue
                        wb = self._find(kb, need)
                    if wb is None:
                        continue
                    wa = self._rebuild(ka, a)
                    w = Binary(op, wa, wb) if a_left else Binary(op, wb, wa)
                    if try_evaluate(w, self.caps, self.rules) == t:
                        return w
        m = self._fact_of.get(t)
        if m is not None:
            w = self._find(key, m)
            if w is not None:
                return Factorial(w)
        return None

    def _lemma_shortcut(self, key: Key, t) -> Expr | None:
        if MUL not in self._ops:
            return None
        from .bounds import lemma_condense

        n = _key_size(key)
        for s in range(1, min(3, n - 4) + 1):
            for ka in submultisets(key, s):
                tab = self._table(ka)
                if t not in tab:
                    continue
                rest = DigitMultiset(x - y for x, y in zip(key, ka))
                w = Binary(MUL, self._rebuild(ka, t), lemma_condense(1, rest))
                if try_evaluate(w, self.caps, self.rules) == t:
                    return w
        return None

    def _inverses(self, a, t) -> Iterator[tuple[str, bool, object]]:
        """(op, a_is_left, needed) triples such that ``op`` applied to ``a``
        and a value ``b == needed`` gives ``t``.  ``needed`` may be a string
        naming a predicate ("any", "nonzero", "int", ...) when many b work."""
        ops = self._ops
        if ADD in ops:
            yield ADD, True, t - a
        if SUB in ops:
            yield SUB, True, a - t
            yield SUB, False, t + a
        if MUL in ops:
            if a != 0:
                yield MUL, True, _quot(t, a)
            elif t == 0:
                yield MUL, True, "any"
        if DIV in ops:
            if t != 0:
                if a != 0:
                    yield DIV, True, _quot(a, t)
            elif a == 0:
                yield DIV, True, "nonzero"
            if a != 0:
                yield DIV, False, t * a
        if POW in ops:
            yield from self._pow_inverses(a, t)

    def _pow_inverses(self, a, t):
        cap = self.caps.max_exponent_abs
        zpz = self.rules.zero_pow_zero_is_one
        # a as the base
        if a == 0:
            if t == 0:
                yield POW, True, "posint"
            elif t == 1 and zpz:
                yield POW, True, 0
        elif a == 1:
            if t == 1:
                yield POW, True, "int"
        elif a == -1:
            if t == 1:
                yield POW, True, "even"
            elif t == -1:
                yield POW, True, "odd"
        elif t != 0:
            e = self._int_log(a, t)
            if e is not None:
                yield POW, True, e
        # a as the exponent
        if type(a) is int and abs(a) <= cap:
            if a == 0:
                if t == 1:
                    yield POW, False, "any" if zpz else "nonzero"
            elif a > 0:
                for r in _roots(t, a):
                    yield POW, False, r
            elif t != 0:
                for r in _roots(exact(1 / Fraction(t)), -a):
                    yield POW, False, r

    def _int_log(self, a, t) -> int | None:
        if t == 1:
            return 0
        try:
            guess = math.log(abs(t)) / math.log(abs(a))
        except (ValueError, ZeroDivisionError):
            return None
        g = round(guess)
        cap = self.caps.max_exponent_abs
        for e in (g, g - 1, g + 1):
            if e != 0 and abs(e) <= cap and self.ar.pow(a, e) == t:
                return e
        return None

    def _accepts(self, kind: str, v) -> bool:
        cap = self.caps.max_exponent_abs
        if kind == "any":
            return True
        if kind == "nonzero":
            return v != 0
        if type(v) is not int or abs(v) > cap:
            return False
        if kind == "int":
            return True
        if kind == "posint":
            return v > 0
        if kind == "even":
            return v % 2 == 0
        return v % 2 == 1

    def _find_any(self, key: Key, kind: str) -> Expr | None:
        mk = (key, kind)
        if mk in self._memo:
            return self._memo[mk]
        w = None
        if _key_size(key) <= self.table_size:
            tab = self._table(key)
            for v in tab:
                if self._accepts(kind, v):
                    w = self._rebuild(key, v)
                    break
        else:
            for c in self._small_candidates():
                if self._accepts(kind, c):
                    w = self._find(key, c)
                    if w is not None:
                        break
        self._memo[mk] = w
        return w

    def _small_candidates(self):
        yield 1
        yield 0
        for i in range(2, self.caps.max_exponent_abs + 1):
            yield i
            yield 1 - i

    # ----- witness enumeration ---------------------------------------------

    def iter_witnesses(self, s, target) -> Iterator[Expr]:
        """Lazily yield structurally distinct witnesses in deterministic order."""
        ms = as_multiset(s)
        if ms.size == 0:
            raise ValueError("condensing needs a non-empty multiset")
        t = exact(target)
        seen = set()
        for w in self._all(ms.counts, t):
            text = render(w)
            if text not in seen and try_evaluate(w, self.caps, self.rules) == t:
                seen.add(text)
                yield w

    def _all(self, key: Key, t) -> Iterator[Expr]:
        if not self.caps.admits(t):
            return
        if _key_size(key) == 1:
            if t in self._table(key):
                yield self._rebuild(key, t)
            return
        for ka, kb in partitions(key):
            for a in self._table(ka):
                for op, a_left, need in self._inverses(a, t):
                    if type(need) is str:
                        bs = self._values_matching(kb, need)
                    elif self.caps.admits(need):
                        bs = [need]
                    else:
                        continue
                    for b in bs:
                        for wb in self._all(kb, b):
                            for wa in self._all(ka, a):
                                yield Binary(op, wa, wb) if a_left else Binary(op, wb, wa)
        m = self._fact_of.get(t)
        if m is not None:
            for w in self._all(key, m):
                yield Factorial(w)

    def _values_matching(self, key: Key, kind: str) -> Iterable:
        if _key_size(key) <= self.table_size:
            return [v for v in self._table(key) if self._accepts(kind, v)]
        return [c for c in self._small_candidates() if self._accepts(kind, c)]

    # ----- certificates ---------------------------------------------------

    def certificates(self) -> Iterator[tuple[Key, object, Expr]]:
        """Every positive search result memoised so far."""
        for (key, t), w in self._memo.items():
            if w is not None and type(t) is not str:
                yield key, t, w

    def seed(self, records: Iterable[tuple[Key, object, Expr]]) -> int:
        """Insert externally produced witnesses after re-validating them."""
        accepted = 0
        for key, t, w in records:
            if leaves(w).counts == tuple(key) and try_evaluate(w, self.caps, self.rules) == t:
                self._memo.setdefault((tuple(key), t), w)
                accepted += 1
        return accepted


_FAIL = UNDEFINED.__class__
assert EXCEEDS.__class__ is _FAIL


@lru_cache(maxsize=None)
def engine(caps: SearchCaps | None = None, rules: RuleSet | None = None) -> Condenser:
    """The shared engine (and memo) for one configuration."""
    return Condenser(caps, rules)


def value_set(s, caps: SearchCaps | None = None, rules: RuleSet | None = None) -> ValueTable:
    """V(S): every value condensable from all of ``s`` within the caps."""
    return engine(caps, rules).table(s)


def contains(s, target, caps: SearchCaps | None = None, rules: RuleSet | None = None,
             *, max_nodes: int | None = None) -> Expr | None:
    """A witness for ``target`` from ``s``; None means not found within caps."""
    return engine(caps, rules).find(s, target, max_nodes=max_nodes)


WITNESS_POOL_FACTOR = 20


def enumerate_witnesses(s, target, caps: SearchCaps | None = None,
                        rules: RuleSet | None = None, limit: int = 10) -> list[Expr]:
    """Up to ``limit`` distinct witnesses, simplest first.

    A bounded batch of candidates is drawn in search order and then ranked by
    factorial count and rendered length (ties keep search order).
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    batch = list(islice(engine(caps, rules).iter_witnesses(s, target), limit * WITNESS_POOL_FACTOR))
    batch.sort(key=lambda w: (render(w).count("!"), len(render(w))))
    return batch[:limit]


def all_multisets(k: int) -> Iterator[DigitMultiset]:
    """All C(k+9, 9) multisets of k decimal digits, in lexicographic order."""
    for combo in combinations_with_replacement(range(10), k):
        yield DigitMultiset.of(combo)


@dataclass
class DeltaCertificate:
    """Witnesses showing ``target`` is condensable from every k-digit multiset."""

    target: int
    k: int
    witnesses: dict[DigitMultiset, Expr]

    def complete(self) -> bool:
        return len(self.witnesses) == math.comb(self.k + 9, 9)

    def validate(self, caps: SearchCaps | None = None, rules: RuleSet | None = None) -> bool:
        return self.complete() and all(
            leaves(w) == ms and try_evaluate(w, caps, rules) == self.target
            for ms, w in self.witnesses.items())


def certify(target, k: int, caps: SearchCaps | None = None,
            rules: RuleSet | None = None, jobs: int = 1) -> DeltaCertificate | None:
    """Certificate that ``target`` is in E_k, or None if some multiset failed."""
    t = exact(target)
    multisets = list(all_multisets(k))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            found = list(pool.map(_contains_job, [(ms.counts, t, caps, rules) for ms in multisets],
                                  chunksize=64))
    else:
        eng = engine(caps, rules)
        found = []
        for ms in multisets:
            w = eng.find(ms, t)
            if w is None:
                return None
            found.append(w)
    if any(w is None for w in found):
        return None
    return DeltaCertificate(t, k, dict(zip(multisets, found)))


def _contains_job(args):
    counts, t, caps, rules = args
    return engine(caps, rules).find(DigitMultiset(counts), t)


def e_k_members(k: int, lo: int, hi: int, caps: SearchCaps | None = None,
                rules: RuleSet | None = None, jobs: int = 1) -> dict[int, DeltaCertificate]:
    """Integers in ``[lo, hi]`` certified to lie in every V(S) with |S| = k.

    Absence from the result means "not certified within caps", not a proof of
    non-membership.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > 7:
        log.warning("E_%d spans %d multisets; this may take a long time", k, math.comb(k + 9, 9))
    out = {}
    for t in range(lo, hi + 1):
        cert = certify(t, k, caps, rules, jobs)
        if cert is not None:
            out[t] = cert
    return out


# ----- multiset reduction by pairwise subtraction ---------------------------

def reduce_multiset(s, target_size: int) -> tuple[DigitMultiset, list[tuple[int, int, int]]]:
    """Shrink ``s`` to ``target_size`` digits by replacing the two largest
    entries ``a >= b`` with ``a - b`` (which is again a digit)."""
    ms = as_multiset(s)
    if not 1 <= target_size <= ms.size:
        raise ValueError(f"cannot reduce {ms.size} digits to {target_size}")
    counts = list(ms.counts)
    steps = []
    for _ in range(ms.size - target_size):
        a = max(d for d in range(10) if counts[d])
        counts[a] -= 1
        b = max(d for d in range(10) if counts[d])
        counts[b] -= 1
        counts[a - b] += 1
        steps.append((a, b, a - b))
    return DigitMultiset(counts), steps


def splice_reduction(w: Expr, steps: list[tuple[int, int, int]]) -> Expr:
    """Turn a witness over the reduced multiset into one over the original.

    Each reduced digit is replaced by the subtraction tree that produced it.
    Equal digits are interchangeable, so trees are handed out first-in
    first-out, which keeps them shallow.
    """
    if not steps:
        return w
    counts = list(leaves(w).counts)
    for a, b, c in steps:
        counts[c] -= 1
        counts[a] += 1
        counts[b] += 1
    pools = [deque(Leaf(d) for _ in range(counts[d])) for d in range(10)]
    for a, b, c in steps:
        if b == 0 and a == c and len(pools[0]) >= 2:
            # d - 0 leaves the pools as 0 - 0 does; pairing zeros keeps depth logarithmic
            a = c = 0
        ea = pools[a].popleft()
        eb = pools[b].popleft()
        pools[c].append(Binary(SUB, ea, eb))

    def sub(node):
        if type(node) is Leaf:
            return pools[node.digit].popleft()
        if type(node) is Factorial:
            return Factorial(sub(node.inner))
        return Binary(node.op, sub(node.left), sub(node.right))

    return sub(w)


# ----- certificate cache file ------------------------------------------------

CACHE_HEADER = "# condense certificate cache v1"


def load_certificates(path) -> list[tuple[Key, object, Expr]]:
    """Read a cache file; malformed lines are skipped with a warning."""
    path = Path(path)
    if not path.exists():
        return []
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != CACHE_HEADER:
        raise ValueError(f"{path} is not a version-1 certificate cache")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            counts, value, text = (part.strip() for part in line.split(";"))
            key = tuple(int(c) for c in counts.split(","))
            if len(key) != 10:
                raise ValueError("expected ten counts")
            records.append((key, exact(value), parse(text)))
        except ValueError as exc:
            log.warning("%s:%d: skipping bad record (%s)", path, lineno, exc)
    return records


def save_certificates(path, records: Iterable[tuple[Key, object, Expr]]) -> None:
    """Write records atomically (temporary file, then rename)."""
    path = Path(path)
    body = sorted({f"{','.join(map(str, key))};{t};{render(w)}" for key, t, w in records})
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(CACHE_HEADER + "\n")
            fh.writelines(line + "\n" for line in body)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
