"""Executable reductions between fragments and to existential real form.

`same_cond_to_comp` strips shared conditions from conditional atoms.

`etr_inverse_to_ind` translates inverse-constraint systems (equations
x_i + x_j = x_k and x_i * x_j = 1 over variables confined to [1/2, 2])
into conjunctions of equality and independence atoms, via the scaling
p_i = x_i / (2n).  Rational thresholds are carried by equal-weight cell
partitions of the sample space; lower/upper bounds become equalities
against padded/truncated events with fresh slack letters.

`poly_to_etr` emits the expanded polynomial system as an existential
sentence and enumerates small supports deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, lcm, log2

from .normalize import (EQ, GE, GT, NE, PolyConstraint, PolySystem, dnf,
                        expand, state_descriptions)
from .polynomial import Polynomial
from .semantics import Model
from .syntax import (
    And, Atom, Basic, BoolExpr, Cond, Eq, Formula, Geq, Gt, Indep,
    LanguageTag, Letter, Not, atoms_of, classify, conj, disj, fand,
    free_letters, parse_formula,
)


class WrongFragmentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# same_cond -> comp


def same_cond_to_comp(f: Formula) -> Formula:
    """Replace each P(a|c) REL P(b|c) with P(a & c) REL P(b & c).

    Equisatisfiable; witness models transfer unchanged.
    """
    tag = classify(f)
    if tag not in (LanguageTag.SAME_COND, LanguageTag.COMP):
        raise WrongFragmentError(f"expected a same-condition formula, got {tag}")

    def rec(g):
        from .syntax import FAnd, FImplies, FNot, FOr

        if isinstance(g, Atom):
            a = g.atom
            if isinstance(a, (Geq, Gt, Eq)) and isinstance(a.lhs, Cond):
                if not isinstance(a.rhs, Cond) or a.lhs.given != a.rhs.given:
                    raise WrongFragmentError("atom conditions differ")
                return Atom(type(a)(Basic(And(a.lhs.target, a.lhs.given)),
                                    Basic(And(a.rhs.target, a.rhs.given))))
            return g
        if isinstance(g, FNot):
            return FNot(rec(g.arg))
        if isinstance(g, (FAnd, FOr, FImplies)):
            return type(g)(rec(g.left), rec(g.right))
        raise TypeError(f"not a Formula: {g!r}")

    return rec(f)


# ---------------------------------------------------------------------------
# ETR-inverse -> L_ind


@dataclass(frozen=True)
class EtrInverseSystem:
    """Equations x_i+x_j=x_k ("add", i, j, k) and x_i*x_j=1 ("inv", i, j)
    over n variables, each confined to [1/2, 2]."""

    n: int
    constraints: tuple

    def __post_init__(self):
        for c in self.constraints:
            kind = c[0]
            if kind == "add":
                _, i, j, k = c
                idx = (i, j, k)
            elif kind == "inv":
                _, i, j = c
                idx = (i, j)
            else:
                raise ValueError(f"malformed constraint {c!r}")
            if any(not 0 <= x < self.n for x in idx):
                raise ValueError(f"variable out of range in {c!r}")

    def holds(self, x) -> bool:
        if any(not Fraction(1, 2) <= x[i] <= 2 for i in range(self.n)):
            return False
        for c in self.constraints:
            if c[0] == "add":
                _, i, j, k = c
                if x[i] + x[j] != x[k]:
                    return False
            else:
                _, i, j = c
                if x[i] * x[j] != 1:
                    return False
        return True

    def to_poly_system(self) -> PolySystem:
        """Direct polynomial form over the box [1/2, 2]^n."""
        xs = [Polynomial.variable(i) for i in range(self.n)]
        rows = []
        for c in self.constraints:
            if c[0] == "add":
                _, i, j, k = c
                rows.append(PolyConstraint(xs[i] + xs[j] - xs[k], EQ))
            else:
                _, i, j = c
                rows.append(PolyConstraint(xs[i] * xs[j] - 1, EQ))
        bounds = [(Fraction(1, 2), Fraction(2))] * self.n
        return PolySystem(self.n, rows, [f"x{i}" for i in range(self.n)],
                          bounds=bounds)

    def to_dict(self):
        return {"n": self.n, "constraints": [list(c) for c in self.constraints]}


@dataclass
class IndTranslation:
    """L_ind formula plus the event dictionary and transport maps."""

    formula: Formula
    system: EtrInverseSystem
    cells: int                       # master partition size 4n^2
    var_events: list                 # BoolExpr for each delta_i
    letters: list
    cell_events: list                # the 4n^2 partition cells
    aux: dict                        # role -> letters, for auditing

    @property
    def n(self):
        return self.system.n

    def scale(self) -> int:
        return 2 * self.system.n

    def forward_value(self, x):
        """x_i -> p_i = x_i / 2n."""
        return [Fraction(v) / self.scale() for v in x]

    def backward(self, model: Model):
        """model -> candidate x_i = 2n * P(delta_i)."""
        from .semantics import prob

        return [prob(model, e) * self.scale() for e in self.var_events]


def _bit_letters(prefix, count):
    return [f"{prefix}{i}" for i in range(count)]


def _state_expr(letters, index):
    bits = []
    for pos, name in enumerate(letters):
        bits.append(Letter(name) if index >> pos & 1 else Not(Letter(name)))
    return conj(bits)


def _cell_groups(n_states, n_cells):
    """Group state indices into n_cells consecutive nonempty groups."""
    per, extra = divmod(n_states, n_cells)
    groups = []
    idx = 0
    for c in range(n_cells):
        size = per + (1 if c < extra else 0)
        groups.append(list(range(idx, idx + size)))
        idx += size
    return groups


def etr_inverse_to_ind(sys: EtrInverseSystem) -> IndTranslation:
    """Build the independence-language formula realizing the system.

    Product constraints become an independence atom plus an intersection
    pinned to a 1/(4n^2) cell; a squared variable gets an equal-weight
    duplicate event first.  Sum constraints use per-constraint disjoint
    copies.  The bounds 1/(4n) <= p_i <= 1/n are equalities against a
    union-with-slack (lower) and an intersection-with-slack (upper).
    """
    from .syntax import BOT

    n = sys.n
    cells = 4 * n * n
    n_bits = max(1, ceil(log2(cells)))
    part_letters = _bit_letters("E", n_bits)
    groups = _cell_groups(1 << n_bits, cells)
    cell_events = [disj([_state_expr(part_letters, s) for s in g])
                   for g in groups]

    var_letters = _bit_letters("D", n)
    var_events = [Letter(x) for x in var_letters]
    letters = list(part_letters) + var_letters
    atoms = []
    aux = {}

    # equal-weight partition: consecutive cells equal (coverage and
    # disjointness hold by construction on the letter cube)
    for a, b in zip(cell_events, cell_events[1:]):
        atoms.append(Atom(Eq(Basic(a), Basic(b))))

    def cell_union(k):
        return disj(cell_events[:k])

    low_event = cell_union(n)          # probability n/(4n^2) = 1/(4n)
    high_event = cell_union(4 * n)     # probability 4n/(4n^2) = 1/n
    unit_cell = cell_events[0]         # probability 1/(4n^2)

    for i, d in enumerate(var_events):
        s = Letter(f"L{i}")
        t = Letter(f"U{i}")
        letters += [s.name, t.name]
        # P(d) = P(low  or  slack-outside-low)  >= 1/(4n)
        atoms.append(Atom(Eq(Basic(d),
                             Basic(disj([low_event, And(s, Not(low_event))])))))
        # P(d) = P(high and slack)  <= 1/n
        atoms.append(Atom(Eq(Basic(d), Basic(And(high_event, t)))))
        aux[f"lower_slack_{i}"] = s.name
        aux[f"upper_slack_{i}"] = t.name

    dup_count = 0
    add_count = 0
    for c in sys.constraints:
        if c[0] == "inv":
            _, i, j = c
            left = var_events[i]
            if i == j:
                dup = Letter(f"Q{dup_count}")
                dup_count += 1
                letters.append(dup.name)
                atoms.append(Atom(Eq(Basic(dup), Basic(left))))
                aux[f"square_duplicate_{i}"] = dup.name
                right = dup
            else:
                right = var_events[j]
            atoms.append(Atom(Indep(left, right)))
            atoms.append(Atom(Eq(Basic(And(left, right)), Basic(unit_cell))))
        else:
            _, i, j, k = c
            pa = Letter(f"S{add_count}a")
            pb = Letter(f"S{add_count}b")
            add_count += 1
            letters += [pa.name, pb.name]
            atoms.append(Atom(Eq(Basic(pa), Basic(var_events[i]))))
            atoms.append(Atom(Eq(Basic(pb), Basic(var_events[j]))))
            atoms.append(Atom(Eq(Basic(And(pa, pb)), Basic(BOT))))
            atoms.append(Atom(Eq(Basic(disj([pa, pb])), Basic(var_events[k]))))
            aux[f"sum_parts_{add_count - 1}"] = (pa.name, pb.name)

    return IndTranslation(fand(atoms), sys, cells, var_events, letters,
                          cell_events, aux)


# -- forward witness transport ------------------------------------------------


def transport_witness(tr: IndTranslation, x) -> Model:
    """Construct a model of the translated formula from an exact solution x.

    The sample space is Q equal-mass atoms refining the cell partition.
    Only the constrained intersections are controlled: product pairs
    share one cell-mass block, everything else is padded from a fresh
    pool.  Mass-only constraints (bound slacks, sum parts) draw freely.
    """
    n = tr.n
    p = tr.forward_value(x)
    if not tr.system.holds([Fraction(v) for v in x]):
        raise ValueError("x does not solve the inverse-constraint system")
    q = lcm(tr.cells, *(v.denominator for v in p)) if p else tr.cells
    cs = q // tr.cells
    sizes = [int(v * q) for v in p]

    pool = iter(range(q))

    def take(k):
        return {next(pool) for _ in range(k)}

    sets = {}
    deltas = [set() for _ in range(n)]
    dups = {}
    for c in tr.system.constraints:
        if c[0] != "inv":
            continue
        _, i, j = c
        block = take(cs)
        deltas[i] |= block
        if i == j:
            dups.setdefault(i, set()).update(block)
        else:
            deltas[j] |= block
    for i in range(n):
        deltas[i] |= take(sizes[i] - len(deltas[i]))
        sets[f"D{i}"] = deltas[i]
    dup_names = [name for name in tr.letters if name.startswith("Q")]
    for (i, seed), name in zip(sorted(dups.items()), dup_names):
        seed |= take(sizes[i] - len(seed))
        sets[name] = seed

    low_atoms = set(range(n * cs))
    high_atoms = set(range(4 * n * cs))
    outside_low = [a for a in range(q) if a not in low_atoms]
    high_sorted = sorted(high_atoms)
    for i in range(n):
        sets[f"L{i}"] = set(outside_low[: sizes[i] - len(low_atoms)])
        sets[f"U{i}"] = set(high_sorted[: sizes[i]])

    add_idx = 0
    for c in tr.system.constraints:
        if c[0] != "add":
            continue
        _, i, j, k = c
        sets[f"S{add_idx}a"] = set(range(sizes[i]))
        sets[f"S{add_idx}b"] = set(range(sizes[i], sizes[i] + sizes[j]))
        add_idx += 1

    groups = _cell_groups(1 << sum(1 for l in tr.letters
                                   if l.startswith("E")), tr.cells)
    state_of_atom = [0] * q
    for cell, states in enumerate(groups):
        for a in range(cell * cs, (cell + 1) * cs):
            state_of_atom[a] = states[0]

    weights = {}
    unit_w = Fraction(1, q)
    for atom in range(q):
        val = []
        for name in tr.letters:
            if name.startswith("E"):
                pos = int(name[1:])
                val.append(bool(state_of_atom[atom] >> pos & 1))
            else:
                val.append(atom in sets.get(name, ()))
        val = tuple(val)
        weights[val] = weights.get(val, Fraction(0)) + unit_w
    return Model(tuple(tr.letters), weights)


# -- translation-side decision -------------------------------------------------


def extract_scalar_constraints(tr: IndTranslation):
    """Re-read the scaled constraint system off the formula's atoms.

    Inverts the translation by structural pattern matching; a translator
    defect surfaces as an extraction failure or a different system.
    Returns ("prodcell", i, j) and ("sum", i, j, k) tuples.
    """
    from .syntax import Or

    n = tr.n
    name_to_var = {f"D{i}": i for i in range(n)}
    dup_to_var = {}
    sum_parts = {}
    out = []

    def var_of(e):
        if isinstance(e, Letter):
            if e.name in name_to_var:
                return name_to_var[e.name]
            if e.name in dup_to_var:
                return dup_to_var[e.name]
        return None

    atoms = list(atoms_of(tr.formula))
    for a in atoms:  # resolve duplicates and sum parts first
        if isinstance(a, Eq) and isinstance(a.lhs, Basic) and \
                isinstance(a.rhs, Basic):
            l, r = a.lhs.expr, a.rhs.expr
            if isinstance(l, Letter) and isinstance(r, Letter):
                if l.name.startswith("Q") and r.name in name_to_var:
                    dup_to_var[l.name] = name_to_var[r.name]
                if l.name.startswith("S") and r.name in name_to_var:
                    sum_parts[l.name] = name_to_var[r.name]

    unit_cell = tr.cell_events[0]
    for a in atoms:
        if isinstance(a, Indep):
            i, j = var_of(a.left), var_of(a.right)
            if i is None or j is None:
                raise WrongFragmentError("independence atom off the dictionary")
            out.append(("prodcell", min(i, j), max(i, j)))
        elif isinstance(a, Eq) and isinstance(a.lhs, Basic) and \
                isinstance(a.rhs, Basic) and isinstance(a.lhs.expr, Or):
            o = a.lhs.expr
            if isinstance(o.left, Letter) and o.left.name.startswith("S") and \
                    isinstance(o.right, Letter) and o.right.name.startswith("S"):
                i = sum_parts.get(o.left.name)
                j = sum_parts.get(o.right.name)
                k = var_of(a.rhs.expr)
                if None in (i, j, k):
                    raise WrongFragmentError("sum atoms off the dictionary")
                out.append(("sum", i, j, k))
    # cross-check the pinned intersections against the unit cell
    pinned = set()
    for a in atoms:
        if isinstance(a, Eq) and isinstance(a.lhs, Basic) and \
                isinstance(a.lhs.expr, And) and isinstance(a.rhs, Basic) and \
                a.rhs.expr == unit_cell:
            i = var_of(a.lhs.expr.left)
            j = var_of(a.lhs.expr.right)
            if i is not None and j is not None:
                pinned.add(("prodcell", min(i, j), max(i, j)))
    if pinned != {c for c in out if c[0] == "prodcell"}:
        raise WrongFragmentError("independence atoms lack matching cell pins")
    return out


def decide_translation(tr: IndTranslation, config=None):
    """Verdict for the translated formula via its scalar content.

    The translation's events are carved over disjoint letter groups, so
    the formula is satisfiable exactly when the scaled scalar system
    (p_i in [1/(4n), 1/n], pinned products, exact sums) is; that system
    is decided by the polynomial pipeline.
    """
    from .polysolve import DEFAULT_CONFIG, solve_system

    n = tr.n
    scalars = extract_scalar_constraints(tr)
    xs = [Polynomial.variable(i) for i in range(n)]
    rows = []
    for c in scalars:
        if c[0] == "prodcell":
            _, i, j = c
            rows.append(PolyConstraint(xs[i] * xs[j] - Fraction(1, 4 * n * n),
                                       EQ))
        else:
            _, i, j, k = c
            rows.append(PolyConstraint(xs[i] + xs[j] - xs[k], EQ))
    bounds = [(Fraction(1, 4 * n), Fraction(1, n))] * n
    system = PolySystem(n, rows, [f"p{i}" for i in range(n)], bounds=bounds)
    return solve_system(system, config or DEFAULT_CONFIG)


# ---------------------------------------------------------------------------
# poly -> ETR


@dataclass
class EtrSentence:
    variables: list
    plain: str
    smtlib: str


def poly_to_etr(f: Formula):
    """Existential-real sentences (one per disjunct) for the formula."""
    letters = tuple(free_letters(f))
    out = []
    for conjunct in dnf(f):
        system = expand(conjunct, letters)
        out.append(system_to_etr(system))
    return out


def system_to_etr(system) -> EtrSentence:
    from .normalize import LinSystem

    if isinstance(system, LinSystem):
        names = [system.name(v) for v in range(system.n_vars)]
        rows = [c.render(lambda v: f"x_{v}") for c in system.constraints]
        smt_rows = [_smt_lin(c) for c in system.constraints]
    else:
        names = [system.name(v) for v in range(system.n_vars)]
        rows = [c.render(lambda v: f"x_{v}") for c in system.constraints]
        smt_rows = [_smt_poly(c) for c in system.constraints]
    var_list = ", ".join(f"x_{v}" for v in range(len(names)))
    plain = f"exists {var_list} . " + " and ".join(rows) if rows else "true"
    smt = ["(set-logic QF_NRA)"]
    smt += [f"(declare-const x_{v} Real)" for v in range(len(names))]
    smt += [f"(assert {r})" for r in smt_rows]
    smt.append("(check-sat)")
    return EtrSentence(names, plain, "\n".join(smt))


def _smt_frac(c: Fraction) -> str:
    c = Fraction(c)
    if c < 0:
        return f"(- {_smt_frac(-c)})"
    if c.denominator == 1:
        return f"{c.numerator}.0"
    return f"(/ {c.numerator}.0 {c.denominator}.0)"


def _smt_lin(c) -> str:
    terms = [f"(* {_smt_frac(k)} x_{v})" for v, k in c.coeffs]
    lhs = terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")" \
        if terms else "0.0"
    op = {EQ: "=", GE: ">=", GT: ">"}[c.rel]
    return f"({op} {lhs} {_smt_frac(c.rhs)})"


def _smt_poly(c) -> str:
    parts = []
    for mono, coeff in sorted(c.poly.terms.items()):
        factors = [_smt_frac(coeff)]
        for v, e in mono:
            factors.extend([f"x_{v}"] * e)
        parts.append("(* " + " ".join(factors) + ")" if len(factors) > 1
                     else factors[0])
    lhs = parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")" \
        if parts else "0.0"
    if c.rel == NE:
        return f"(not (= {lhs} 0.0))"
    op = {EQ: "=", GE: ">=", GT: ">"}[c.rel]
    return f"({op} {lhs} 0.0)"


def small_support_sat(f: Formula, config=None):
    """Decide satisfiability by enumerating candidate supports.

    Realizes the small-model guess deterministically: for each disjunct,
    the support size is bounded by the number of distinct basic events
    mentioned, and the restricted systems go through the usual pipeline.
    """
    from .polysolve import (DEFAULT_CONFIG, SatNumeric, SatRational, Unknown,
                            solve_system)
    from .normalize import LinSystem

    config = config or DEFAULT_CONFIG
    letters = tuple(free_letters(f))
    any_unknown = False
    for conjunct in dnf(f):
        system = expand(conjunct, letters)
        if isinstance(system, LinSystem):
            verdict = solve_system(system, config)
            if isinstance(verdict, (SatRational, SatNumeric)):
                return verdict
            continue
        events = set()
        for a, _ in conjunct:
            for atom_event in _basic_events(a):
                events.add(atom_event)
        support_bound = max(1, len(events))
        n = system.n_vars
        for size in range(1, min(support_bound, n) + 1):
            for keep in combinations(range(n), size):
                zero = [v for v in range(n) if v not in keep]
                restricted = PolySystem(
                    n,
                    [PolyConstraint(c.poly.substitute_zero(zero), c.rel)
                     for c in system.constraints] +
                    [PolyConstraint(Polynomial.variable(v), EQ) for v in zero],
                    system.var_names)
                verdict = solve_system(restricted, config)
                if isinstance(verdict, (SatRational, SatNumeric)):
                    return verdict
                if isinstance(verdict, Unknown):
                    any_unknown = True
    if any_unknown:
        return Unknown("support enumeration exhausted with unknowns")
    from .polysolve import UnsatCertified

    return UnsatCertified([("support-enumeration", None)])


def _basic_events(a):
    from .syntax import term_letters

    out = []

    def walk_term(t):
        if isinstance(t, Basic):
            out.append(t.expr)
        elif isinstance(t, Cond):
            out.append(t.target)
            out.append(t.given)
        else:
            walk_term(t.left)
            walk_term(t.right)

    if isinstance(a, (Geq, Gt, Eq)):
        walk_term(a.lhs)
        walk_term(a.rhs)
    elif isinstance(a, Indep):
        out.extend([a.left, a.right])
    else:
        out.extend([a.target, a.evidence])
    return [repr(e) for e in out]
