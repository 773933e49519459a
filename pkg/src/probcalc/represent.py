"""Representability of comparative and quadratic probability orders.

A comparative order lives on the powerset of n sample points.  Finding a
representing measure is a linear feasibility problem over the atom
weights (one weak/strict row per consecutive pair in the ranking); an
infeasibility certificate converts into a pair of balanced event
sequences, every comparison of which the order holds with at least one
strict - a finite-cancellation violation.

Quadratic orders compare pairs of events against products of
probabilities.  The axiom checkers (Q1-Q6) and the complete |Omega|=2
classification live here as well.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from math import lcm

from .linsolve import lin_sat
from .normalize import EQ, GE, GT, LinSystem, lin_constraint


def all_events(n: int) -> list:
    out = []
    for size in range(n + 1):
        from itertools import combinations

        for c in combinations(range(n), size):
            out.append(frozenset(c))
    return sorted(out, key=_event_key)


def _event_key(ev):
    return (len(ev), tuple(sorted(ev)))


def event_label(ev) -> str:
    return "{" + ",".join(str(i) for i in sorted(ev)) + "}"


def parse_event(spec, n) -> frozenset:
    if isinstance(spec, str):
        body = spec.strip().strip("{}")
        items = [int(x) for x in body.split(",") if x.strip() != ""]
    else:
        items = [int(x) for x in spec]
    ev = frozenset(items)
    if any(i < 0 or i >= n for i in ev):
        raise ValueError(f"atom out of range in {spec!r}")
    return ev


def indicator(ev, n) -> tuple:
    return tuple(1 if i in ev else 0 for i in range(n))


# ---------------------------------------------------------------------------
# Comparative orders


class NonTotalOrderError(ValueError):
    pass


class CompOrder:
    """Total preorder on all events (rank map), or a partial comparison list."""

    def __init__(self, n_atoms, ranks=None, comparisons=None):
        self.n_atoms = n_atoms
        self.ranks = None
        self.comparisons = None
        if ranks is not None:
            self.ranks = {frozenset(ev): int(r) for ev, r in ranks.items()}
            missing = [ev for ev in all_events(n_atoms) if ev not in self.ranks]
            if missing:
                raise ValueError(f"rank map misses {event_label(missing[0])}")
        elif comparisons is not None:
            self.comparisons = [(frozenset(a), frozenset(b), rel)
                                for a, b, rel in comparisons]
        else:
            raise ValueError("need ranks or comparisons")

    # -- construction --------------------------------------------------------

    @classmethod
    def from_measure(cls, weights) -> "CompOrder":
        weights = [Fraction(w) for w in weights]
        n = len(weights)
        values = {ev: sum((weights[i] for i in ev), Fraction(0))
                  for ev in all_events(n)}
        distinct = sorted(set(values.values()))
        return cls(n, ranks={ev: distinct.index(v) for ev, v in values.items()})

    @classmethod
    def from_dict(cls, d) -> "CompOrder":
        n = int(d["atoms"])
        if "ranks" in d:
            ranks = {parse_event(k, n): int(v) for k, v in d["ranks"].items()}
            return cls(n, ranks=ranks)
        comps = [(parse_event(a, n), parse_event(b, n), rel)
                 for a, b, rel in d["comparisons"]]
        return cls(n, comparisons=comps)

    @classmethod
    def from_json(cls, text) -> "CompOrder":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        if self.ranks is not None:
            return {"atoms": self.n_atoms,
                    "ranks": {event_label(ev): r
                              for ev, r in sorted(self.ranks.items(),
                                                  key=lambda kv: _event_key(kv[0]))}}
        return {"atoms": self.n_atoms,
                "comparisons": [[event_label(a), event_label(b), rel]
                                for a, b, rel in self.comparisons]}

    # -- relation ------------------------------------------------------------

    @property
    def total(self) -> bool:
        return self.ranks is not None

    def geq(self, a, b) -> bool:
        if not self.total:
            raise NonTotalOrderError("order is partial")
        return self.ranks[frozenset(a)] >= self.ranks[frozenset(b)]

    def gt(self, a, b) -> bool:
        if not self.total:
            raise NonTotalOrderError("order is partial")
        return self.ranks[frozenset(a)] > self.ranks[frozenset(b)]

    def is_linear(self) -> bool:
        """Strict linear: no two distinct events share a rank."""
        if not self.total:
            return False
        seen = set()
        for r in self.ranks.values():
            if r in seen:
                return False
            seen.add(r)
        return True

    def listed_comparisons(self) -> list:
        """Comparisons defining the order: consecutive chain for rank maps."""
        if not self.total:
            return list(self.comparisons)
        chain = sorted(self.ranks, key=lambda ev: (self.ranks[ev], _event_key(ev)))
        out = []
        for prev, nxt in zip(chain, chain[1:]):
            if self.ranks[nxt] == self.ranks[prev]:
                out.append((nxt, prev, ">="))
                out.append((prev, nxt, ">="))
            else:
                out.append((nxt, prev, ">"))
        return out


# -- de Finetti axioms -------------------------------------------------------


def check_definetti_axioms(o: CompOrder) -> dict:
    """Tot, NonDeg, NonTriv, Quasi with a witness tuple on failure."""
    n = o.n_atoms
    events = all_events(n)
    empty, omega = frozenset(), frozenset(range(n))
    report = {}

    report["Tot"] = {"holds": o.total}
    if not o.total:
        report["Tot"]["witness"] = "order given as a partial comparison list"
        for name in ("NonDeg", "NonTriv", "Quasi"):
            report[name] = {"holds": None, "witness": "order not total"}
        return report

    holds = not o.geq(empty, omega)
    report["NonDeg"] = {"holds": holds}
    if not holds:
        report["NonDeg"]["witness"] = (event_label(empty), event_label(omega))

    bad = next((ev for ev in events if not o.geq(ev, empty)), None)
    report["NonTriv"] = {"holds": bad is None}
    if bad is not None:
        report["NonTriv"]["witness"] = (event_label(bad), event_label(empty))

    witness = None
    for a in events:
        for b in events:
            if o.geq(a, b) != o.geq(a - b, b - a):
                witness = (event_label(a), event_label(b))
                break
        if witness:
            break
    report["Quasi"] = {"holds": witness is None}
    if witness:
        report["Quasi"]["witness"] = witness
    return report


# -- representability --------------------------------------------------------


@dataclass
class BalancedCertificate:
    """Balanced sequences (A_i), (B_i) with every A_i >= B_i, some strict."""

    entries: list  # (A: frozenset, B: frozenset, strict: bool, multiplicity: int)
    n_atoms: int

    def distinct_pairs(self) -> int:
        return len({(a, b) for a, b, _, _ in self.entries})

    def max_multiplicity(self) -> int:
        return max(m for _, _, _, m in self.entries)

    def to_dict(self) -> dict:
        return {"atoms": self.n_atoms,
                "entries": [[event_label(a), event_label(b), s, m]
                            for a, b, s, m in self.entries]}

    def render(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def verify_balanced_certificate(cert: BalancedCertificate, o: CompOrder) -> bool:
    """Independent balance and direction check of a FinCan violation."""
    n = cert.n_atoms
    if not cert.entries:
        return False
    total_a = [0] * n
    total_b = [0] * n
    any_strict = False
    for a, b, strict, mult in cert.entries:
        if mult <= 0:
            return False
        for i in range(n):
            total_a[i] += mult * (1 if i in a else 0)
            total_b[i] += mult * (1 if i in b else 0)
        if strict:
            if not o.gt(a, b):
                return False
            any_strict = True
        else:
            if not o.geq(a, b):
                return False
    return total_a == total_b and any_strict


@dataclass
class RepresentYes:
    weights: list  # atom weights, normalized Fractions

    @property
    def representable(self):
        return True


@dataclass
class RepresentNo:
    certificate: BalancedCertificate | None
    reason: str

    @property
    def representable(self):
        return False


def _comparison_rows(comps, n):
    rows = []
    for a, b, rel in comps:
        coeffs = {}
        for i in range(n):
            c = (1 if i in a else 0) - (1 if i in b else 0)
            if c:
                coeffs[i] = Fraction(c)
        rows.append((lin_constraint(coeffs, GT if rel == ">" else GE, 0), (a, b, rel)))
    return rows


def _shrink_to_iis(rows, n):
    """Greedy irreducible infeasible subsystem; at most n+1 rows by Helly."""
    core = list(rows)
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        res = lin_sat(LinSystem(n, [r for r, _ in trial]))
        if not res.is_sat:
            core = trial
        else:
            i += 1
    return core


def _certificate_from_rows(rows, n) -> BalancedCertificate | None:
    res = lin_sat(LinSystem(n, [r for r, _ in rows]))
    if res.is_sat:
        return None
    mults = res.trace.certificate_multipliers()
    scale = lcm(*(m.denominator for m in mults.values())) if mults else 1
    entries = []
    for idx, m in sorted(mults.items()):
        m = m * scale
        if m <= 0:
            continue
        row, (a, b, rel) = rows[idx]
        entries.append((a, b, rel == ">", int(m)))
    if not entries or not any(s for _, _, s, _ in entries):
        return None
    return BalancedCertificate(entries, n)


def representable(o: CompOrder):
    """Measure representation, or a verified balanced-sequence certificate.

    Partial input is treated as a query for a representable total
    extension (unknown comparisons free); its rows then need explicit
    nonnegativity helpers, so a refutation may come without a
    certificate when the helpers carry weight in the contradiction.
    """
    n = o.n_atoms
    empty, omega = frozenset(), frozenset(range(n))

    if o.total:
        if o.geq(empty, omega):
            return RepresentNo(None, "NonDeg fails")
        if any(not o.geq(ev, empty) for ev in all_events(n)):
            return RepresentNo(None, "NonTriv fails")
        rows = _comparison_rows(o.listed_comparisons(), n)
        res = lin_sat(LinSystem(n, [r for r, _ in rows]))
        if res.is_sat:
            return RepresentYes(_normalize_weights(res.witness, n))
        core = _shrink_to_iis(rows, n)
        cert = _certificate_from_rows(core, n)
        if cert is None:  # pragma: no cover - chain rows always certify
            return RepresentNo(None, "infeasible linear system")
        return RepresentNo(cert, "finite cancellation violated")

    rows = _comparison_rows(o.comparisons, n)
    helpers = [(lin_constraint({i: 1}, GE, 0), None) for i in range(n)]
    helpers.append((lin_constraint({i: 1 for i in range(n)}, GT, 0), None))
    res = lin_sat(LinSystem(n, [r for r, _ in rows + helpers]))
    if res.is_sat:
        return RepresentYes(_normalize_weights(res.witness, n))
    core = _shrink_to_iis(rows + helpers, n)
    if any(tag is None for _, tag in core):
        return RepresentNo(None, "infeasible with nonnegativity helpers")
    cert = _certificate_from_rows(core, n)
    if cert is None:
        return RepresentNo(None, "infeasible linear system")
    return RepresentNo(cert, "finite cancellation violated")


def _normalize_weights(witness, n) -> list:
    w = [witness.get(i, Fraction(0)) for i in range(n)]
    total = sum(w, Fraction(0))
    if total <= 0:
        raise AssertionError("degenerate solution escaped the order rows")
    return [x / total for x in w]


def measure_order(weights) -> CompOrder:
    return CompOrder.from_measure(weights)


def order_reproduced(o: CompOrder, weights) -> bool:
    """A >= B in o  iff  P(A) >= P(B), over all event pairs."""
    weights = [Fraction(w) for w in weights]
    events = all_events(o.n_atoms)
    value = {ev: sum((weights[i] for i in ev), Fraction(0)) for ev in events}
    return all((value[a] >= value[b]) == o.geq(a, b)
               for a in events for b in events)


# -- bounded cancellation audit (S_k) ----------------------------------------


@dataclass
class SkResult:
    status: str  # "holds", "holds-up-to-budget", "violated"
    certificate: BalancedCertificate | None = None
    note: str = ""


def check_sk(o: CompOrder, k: int, multiplicity_budget: int = 3) -> SkResult:
    """Audit property S_k: no all-strict balanced pair with <= k distinct pairs.

    A representable order holds S_k for every k; a refutation of
    representability on a linear order yields an all-strict certificate,
    reported when it fits the (k, multiplicity) budget.  Otherwise a
    direct bounded enumeration over difference vectors runs.
    """
    if not o.total:
        raise NonTotalOrderError("S_k audit needs a total order")
    rep = representable(o)
    if rep.representable:
        return SkResult("holds", note="order is representable")
    cert = rep.certificate
    if cert is not None and all(s for _, _, s, _ in cert.entries):
        if cert.distinct_pairs() <= k and cert.max_multiplicity() <= multiplicity_budget:
            return SkResult("violated", cert)
    found = _search_sk_violation(o, k, multiplicity_budget)
    if found is not None:
        return SkResult("violated", found)
    return SkResult("holds-up-to-budget",
                    note=f"no violation with <= {k} distinct pairs and "
                         f"multiplicity <= {multiplicity_budget}")


def _search_sk_violation(o: CompOrder, k: int, budget: int):
    """DFS over strict-pair difference vectors; small k only."""
    n = o.n_atoms
    events = all_events(n)
    vectors = {}
    for a in events:
        for b in events:
            if o.gt(a, b):
                d = tuple((1 if i in a else 0) - (1 if i in b else 0)
                          for i in range(n))
                vectors.setdefault(d, (a, b))
    items = sorted(vectors.items())

    best = None

    def dfs(start, current, chosen):
        nonlocal best
        if best is not None:
            return
        if chosen and all(c == 0 for c in current):
            best = chosen[:]
            return
        if len(chosen) >= k:
            return
        for idx in range(start, len(items)):
            d, pair = items[idx]
            for mult in range(1, budget + 1):
                nxt = tuple(c + mult * dc for c, dc in zip(current, d))
                if any(abs(c) > budget * k for c in nxt):
                    continue
                dfs(idx + 1, nxt, chosen + [(pair, mult)])
                if best is not None:
                    return

    dfs(0, (0,) * n, [])
    if best is None:
        return None
    entries = [(a, b, True, mult) for (a, b), mult in best]
    return BalancedCertificate(entries, n)


# ---------------------------------------------------------------------------
# Quadratic structures


def pair_key(a, b):
    ka, kb = sorted((_event_key(a), _event_key(b)))
    return (ka, kb)


class QuadOrder:
    """Total preorder on unordered pairs of events (Q3 symmetry built in)."""

    def __init__(self, n_atoms, ranks):
        self.n_atoms = n_atoms
        self.ranks = dict(ranks)
        for a, b in combinations_with_replacement(all_events(n_atoms), 2):
            if pair_key(a, b) not in self.ranks:
                raise ValueError(f"missing pair {event_label(a)},{event_label(b)}")

    @classmethod
    def from_values(cls, n_atoms, value_fn) -> "QuadOrder":
        events = all_events(n_atoms)
        values = {}
        for a, b in combinations_with_replacement(events, 2):
            values[pair_key(a, b)] = value_fn(a, b)
        distinct = sorted(set(values.values()))
        return cls(n_atoms, {k: distinct.index(v) for k, v in values.items()})

    @classmethod
    def from_measure(cls, weights) -> "QuadOrder":
        weights = [Fraction(w) for w in weights]

        def value(a, b):
            pa = sum((weights[i] for i in a), Fraction(0))
            pb = sum((weights[i] for i in b), Fraction(0))
            return pa * pb

        return cls.from_values(len(weights), value)

    def rank(self, a, b):
        return self.ranks[pair_key(a, b)]

    def geq(self, ab, cd) -> bool:
        return self.rank(*ab) >= self.rank(*cd)

    def gt(self, ab, cd) -> bool:
        return self.rank(*ab) > self.rank(*cd)

    def canonical_ranks(self) -> tuple:
        keys = sorted(self.ranks)
        distinct = sorted(set(self.ranks.values()))
        return tuple(distinct.index(self.ranks[k]) for k in keys)

    def to_dict(self) -> dict:
        out = {}
        for (ka, kb), r in sorted(self.ranks.items()):
            label = event_label(frozenset(ka[1])) + "x" + event_label(frozenset(kb[1]))
            out[label] = r
        return {"atoms": self.n_atoms, "pair_ranks": out}

    @classmethod
    def from_dict(cls, d) -> "QuadOrder":
        n = int(d["atoms"])
        ranks = {}
        for label, r in d["pair_ranks"].items():
            left, right = label.split("x")
            ranks[pair_key(parse_event(left, n), parse_event(right, n))] = int(r)
        return cls(n, ranks)


# -- bilinear matrices -------------------------------------------------------


def matrix_rank(m) -> int:
    rows = [[Fraction(x) for x in row] for row in m]
    n_rows, n_cols = len(rows), len(rows[0])
    rank = 0
    col = 0
    for col in range(n_cols):
        pivot = next((i for i in range(rank, n_rows) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(n_rows):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def order_from_matrix(m) -> tuple:
    """(QuadOrder induced by the bilinear form, rank of the matrix)."""
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)

    def value(a, b):
        return sum(m[i][j] for i in a for j in b) + Fraction(0)

    return QuadOrder.from_values(n, value), matrix_rank(m)


# -- Domotor axioms ----------------------------------------------------------


def quad_check_axioms(q: QuadOrder, bound: int = 3) -> dict:
    """Q1-Q4 exhaustively; Q5_m and Q6_m for 2 <= m <= bound.

    The strictness rule of Q5 is applied with the positivity proviso on
    the concluding pair (without it the scheme rejects orders induced by
    genuine product measures with null events).
    """
    n = q.n_atoms
    events = all_events(n)
    empty, omega = frozenset(), frozenset(range(n))
    zero_pair = (empty, omega)
    report = {}

    holds = q.gt((omega, omega), zero_pair)
    report["Q1"] = {"holds": holds}

    witness = None
    for b, c in combinations_with_replacement(events, 2):
        for a in events:
            if not q.geq((b, c), (empty, a)):
                witness = (event_label(b), event_label(c), event_label(a))
                break
        if witness:
            break
    report["Q2"] = {"holds": witness is None}
    if witness:
        report["Q2"]["witness"] = witness

    report["Q3"] = {"holds": True, "note": "pairs stored unordered"}
    report["Q4"] = {"holds": True, "note": "rank map is total"}

    for m in range(2, bound + 1):
        w = _q5_violation(q, m)
        report[f"Q5_{m}"] = {"holds": w is None}
        if w:
            report[f"Q5_{m}"]["witness"] = w
        w = _q6_violation(q, m)
        report[f"Q6_{m}"] = {"holds": w is None}
        if w:
            report[f"Q6_{m}"]["witness"] = w
    return report


def _pair_label(p):
    return event_label(p[0]) + "x" + event_label(p[1])


class _PairIndex:
    """Integer ids for unordered pairs plus precompiled instance tables."""

    def __init__(self, n):
        self.n = n
        self.events = all_events(n)
        keys = sorted(pair_key(a, b) for a, b in
                      combinations_with_replacement(self.events, 2))
        self.key_id = {k: i for i, k in enumerate(keys)}
        self.keys = keys
        self.ordered = list(product(self.events, repeat=2))
        self.ordered_id = [self.key_id[pair_key(a, b)] for a, b in self.ordered]
        empty, omega = frozenset(), frozenset(range(n))
        self.zero_id = self.key_id[pair_key(empty, omega)]
        self.omega_id = self.key_id[pair_key(omega, omega)]
        self._q5_tables = {}
        self._q6_tables = {}

    def q5_table(self, m):
        """Rows (seq ids, mixed ids, seq ordered-pair indices) per instance."""
        if m not in self._q5_tables:
            rows = []
            perms = list(permutations(range(m)))
            indices = range(len(self.ordered))
            for seq in product(indices, repeat=m):
                sids = tuple(self.ordered_id[i] for i in seq)
                for pi in perms:
                    for tau in perms:
                        mids = tuple(
                            self.key_id[pair_key(self.ordered[seq[pi[i]]][0],
                                                 self.ordered[seq[tau[i]]][1])]
                            for i in range(m))
                        rows.append((sids, mids, seq, pi, tau))
            self._q5_tables[m] = rows
        return self._q5_tables[m]

    def q6_table(self, m):
        """Balanced multiset pairs (left ids, right ids, ordered indices)."""
        if m not in self._q6_tables:
            mats = []
            for a, b in self.ordered:
                mats.append(tuple((1 if i in a else 0) * (1 if j in b else 0)
                                  for i in range(self.n) for j in range(self.n)))
            buckets = {}
            for combo in combinations_with_replacement(
                    range(len(self.ordered)), m):
                total = tuple(sum(x) for x in zip(*(mats[i] for i in combo)))
                buckets.setdefault(total, []).append(combo)
            rows = []
            for combos in buckets.values():
                for left in combos:
                    for right in combos:
                        if left == right:
                            continue  # equal multisets cannot violate
                        lids = tuple(self.ordered_id[i] for i in left)
                        rids = tuple(self.ordered_id[i] for i in right)
                        rows.append((lids, rids, left, right))
            self._q6_tables[m] = rows
        return self._q6_tables[m]


_PAIR_INDEX = {}


def _pair_index(n) -> _PairIndex:
    if n not in _PAIR_INDEX:
        _PAIR_INDEX[n] = _PairIndex(n)
    return _PAIR_INDEX[n]


def _rank_vector(q: QuadOrder, idx: _PairIndex) -> list:
    return [q.ranks[k] for k in idx.keys]


def _q5_violation_fast(ranks, idx: _PairIndex, m: int):
    zero = ranks[idx.zero_id]
    for sids, mids, seq, pi, tau in idx.q5_table(m):
        ok = True
        some_strict = False
        for i in range(m - 1):
            rs = ranks[sids[i]]
            if rs <= zero or ranks[mids[i]] < rs:
                ok = False
                break
            if ranks[mids[i]] > rs:
                some_strict = True
        if not ok:
            continue
        last, mixed = ranks[sids[m - 1]], ranks[mids[m - 1]]
        if last < mixed:
            return {"sequence": [_pair_label(idx.ordered[i]) for i in seq],
                    "pi": list(pi), "tau": list(tau), "kind": "weak"}
        if some_strict and last > zero and last == mixed:
            return {"sequence": [_pair_label(idx.ordered[i]) for i in seq],
                    "pi": list(pi), "tau": list(tau), "kind": "strict"}
    return None


def _q6_violation_fast(ranks, idx: _PairIndex, m: int):
    perms = list(permutations(range(m)))
    for lids, rids, left, right in idx.q6_table(m):
        for sigma in perms:
            ok = True
            some_strict = False
            for i in range(m):
                rl, rr = ranks[lids[i]], ranks[rids[sigma[i]]]
                if rl < rr:
                    ok = False
                    break
                if rl > rr:
                    some_strict = True
            if ok and some_strict:
                return {"left": [_pair_label(idx.ordered[i]) for i in left],
                        "right": [_pair_label(idx.ordered[i]) for i in right]}
    return None


def _q5_violation(q: QuadOrder, m: int):
    idx = _pair_index(q.n_atoms)
    return _q5_violation_fast(_rank_vector(q, idx), idx, m)


def _q6_violation(q: QuadOrder, m: int):
    idx = _pair_index(q.n_atoms)
    return _q6_violation_fast(_rank_vector(q, idx), idx, m)


# ---------------------------------------------------------------------------
# Exact arithmetic in Q(sqrt 5) for the boundary sample points


@dataclass(frozen=True)
class Q5Num:
    """a + b*sqrt(5) with rational a, b."""

    a: Fraction
    b: Fraction

    def __add__(self, other):
        other = _q5(other)
        return Q5Num(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __mul__(self, other):
        other = _q5(other)
        return Q5Num(self.a * other.a + 5 * self.b * other.b,
                     self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def sign(self) -> int:
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return (self.b > 0) - (self.b < 0)
        if self.a > 0 and self.b > 0:
            return 1
        if self.a < 0 and self.b < 0:
            return -1
        big = self.a * self.a - 5 * self.b * self.b  # sign of |a| vs |b*sqrt5|
        dominant = 1 if self.a > 0 else -1
        if big == 0:
            return 0
        return dominant if big > 0 else -dominant

    def __lt__(self, other):
        return (self + _q5(other) * -1).sign() < 0

    def __eq__(self, other):
        other = _q5(other)
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __le__(self, other):
        return self < other or self == other

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other


def _q5(x):
    if isinstance(x, Q5Num):
        return x
    return Q5Num(Fraction(x), Fraction(0))


_SQRT5 = Q5Num(Fraction(0), Fraction(1))
GOLDEN_LOWER = (_SQRT5 + (-1)) * Fraction(1, 2)   # (sqrt5 - 1)/2
GOLDEN_UPPER = (_SQRT5 + 1) * Fraction(1, 2)      # (sqrt5 + 1)/2


# -- the nine representable preorders for |Omega| = 2 -------------------------


def _rank1_order(x) -> QuadOrder:
    """Order induced by the rank-1 form with atom values (1, x)."""

    def value(a, b):
        fa = sum((_q5(1) if i == 0 else _q5(x) for i in a), _q5(0))
        fb = sum((_q5(1) if i == 0 else _q5(x) for i in b), _q5(0))
        return fa * fb

    events = all_events(2)
    values = {}
    for a, b in combinations_with_replacement(events, 2):
        values[pair_key(a, b)] = value(a, b)
    distinct = []
    for v in values.values():
        if not any(v == d for d in distinct):
            distinct.append(v)
    distinct.sort()
    ranks = {k: next(i for i, d in enumerate(distinct) if d == v)
             for k, v in values.items()}
    return QuadOrder(2, ranks)


def _degenerate_order() -> QuadOrder:
    order, _ = order_from_matrix([[0, 0], [0, 1]])
    return order


def n2_catalog() -> list:
    """The nine representable preorders with their witness descriptions."""
    catalog = []

    def measure_for(x: Fraction):
        return [1 / (1 + x), x / (1 + x)]

    samples = [
        (Fraction(0), "x = 0", measure_for(Fraction(0))),
        (Fraction(1, 2), "0 < x < (sqrt(5)-1)/2", measure_for(Fraction(1, 2))),
        (GOLDEN_LOWER, "x = (sqrt(5)-1)/2", None),
        (Fraction(4, 5), "(sqrt(5)-1)/2 < x < 1", measure_for(Fraction(4, 5))),
        (Fraction(1), "x = 1", measure_for(Fraction(1))),
        (Fraction(5, 4), "1 < x < (sqrt(5)+1)/2", measure_for(Fraction(5, 4))),
        (GOLDEN_UPPER, "x = (sqrt(5)+1)/2", None),
        (Fraction(3), "x > (sqrt(5)+1)/2", measure_for(Fraction(3))),
    ]
    for x, interval, measure in samples:
        catalog.append({
            "order": _rank1_order(x),
            "interval": interval,
            "measure": measure,
            "matrix": "[[1, x], [x, x^2]] normalized",
        })
    catalog.append({
        "order": _degenerate_order(),
        "interval": "degenerate (x = infinity)",
        "measure": [Fraction(0), Fraction(1)],
        "matrix": "[[0, 0], [0, 1]]",
    })
    return catalog


def quad_representable_n2(q: QuadOrder):
    """Match a total symmetric preorder on the n=2 pair space against the
    nine product-representable preorders; Yes carries the witness."""
    if q.n_atoms != 2:
        raise ValueError("classification applies to two-atom spaces only")
    target = q.canonical_ranks()
    for entry in n2_catalog():
        if entry["order"].canonical_ranks() == target:
            return {"representable": True,
                    "interval": entry["interval"],
                    "measure": entry["measure"],
                    "matrix": entry["matrix"]}
    return {"representable": False}


def sweep_n2(q6_bound: int = 3) -> dict:
    """Enumerate total symmetric preorders on the n=2 pair space and filter
    by Q1-Q4, Q5 (n=2 instance), Q6 up to the bound.

    Q2 forces the four pairs containing the empty event into one common
    bottom class, so the enumeration quotients by that class; orders
    violating the quotient shape fail Q2 outright and are accounted for
    by construction.
    """
    idx = _pair_index(2)
    empty = frozenset()
    nonempty_ids = [i for i, k in enumerate(idx.keys)
                    if frozenset(k[0][1]) != empty and frozenset(k[1][1]) != empty]
    empty_ids = [i for i in range(len(idx.keys)) if i not in nonempty_ids]

    seen = set()
    for assignment in product(range(7), repeat=len(nonempty_ids)):
        distinct = sorted(set(assignment) | {0})
        canon = tuple(distinct.index(v) for v in assignment)
        seen.add(canon)

    survivors = []
    for canon in sorted(seen):
        ranks = [0] * len(idx.keys)
        for i, r in zip(nonempty_ids, canon):
            ranks[i] = r
        # Q2 holds by the quotient construction; Q3/Q4 by representation
        if ranks[idx.omega_id] <= ranks[idx.zero_id]:
            continue  # Q1
        if _q5_violation_fast(ranks, idx, 2) is not None:
            continue
        violated = False
        for m in range(2, q6_bound + 1):
            if _q6_violation_fast(ranks, idx, m) is not None:
                violated = True
                break
        if violated:
            continue
        survivors.append(QuadOrder(2, dict(zip(idx.keys, ranks))))
    return {"candidates": len(seen), "survivors": survivors,
            "q6_bound": q6_bound}


# ---------------------------------------------------------------------------
# Search for a non-representable de Finetti order (fixture generator)


def _linear_order_from_signs(n, sign_of):
    """Build the rank map of a linear order from a sign table on difference
    vectors; None if the induced tournament is not transitive."""
    events = all_events(n)

    def beats(a, b):
        d = tuple((1 if i in a else 0) - (1 if i in b else 0) for i in range(n))
        if all(c == 0 for c in d):
            return None
        first = next(c for c in d if c != 0)
        if first < 0:
            d = tuple(-c for c in d)
            return not sign_of[d]
        return sign_of[d]

    order = sorted(events, key=_event_key)
    # insertion sort by the tournament; verify transitivity afterwards
    chain = []
    for ev in order:
        lo, hi = 0, len(chain)
        while lo < hi:
            mid = (lo + hi) // 2
            if beats(ev, chain[mid]):
                lo = mid + 1
            else:
                hi = mid
        chain.insert(lo, ev)
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            if not beats(chain[j], chain[i]):
                return None
    return {ev: i for i, ev in enumerate(chain)}


def find_nonrepresentable_definetti(n_atoms=5, seed=0, attempts=4000):
    """Search linear quasi-additive orders for a representability failure.

    Starts from measure-induced sign tables on difference vectors (which
    satisfy quasi-additivity by construction) and flips one vector class
    at a time, keeping candidates whose event tournament stays
    transitive; the linear-programming refutation is the oracle.
    """
    import random

    rng = random.Random(seed)
    n = n_atoms
    diffs = [d for d in product((-1, 0, 1), repeat=n)
             if any(d) and next(c for c in d if c) > 0]
    while attempts > 0:
        weights = [rng.randint(1, 60) for _ in range(n)]
        base = {}
        degenerate = False
        for d in diffs:
            v = sum(w * c for w, c in zip(weights, d))
            if v == 0:
                degenerate = True
                break
            base[d] = v > 0
        if degenerate:
            continue
        margins = sorted(diffs, key=lambda d: abs(sum(w * c for w, c in
                                                      zip(weights, d))))
        for d_star in margins[:12]:
            attempts -= 1
            signs = dict(base)
            signs[d_star] = not signs[d_star]
            ranks = _linear_order_from_signs(n, signs)
            if ranks is None:
                continue
            o = CompOrder(n, ranks=ranks)
            axioms = check_definetti_axioms(o)
            if not all(v["holds"] for v in axioms.values()):
                continue
            res = representable(o)
            if not res.representable and res.certificate is not None:
                if verify_balanced_certificate(res.certificate, o):
                    return o, res.certificate
    return None
