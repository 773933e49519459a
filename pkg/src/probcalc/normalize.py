"""State descriptions, DNF over atoms, and expansion into constraint systems.

Expansion replaces every basic probability term by the sum of weight
variables of the state descriptions entailing it, yielding a linear
system for the additive languages and a polynomial system (degree 2 for
the conditional/independence/quadratic atoms) otherwise.  Every system
carries the simplex rows: the variables sum to 1 and are nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .polynomial import Polynomial
from .syntax import (
    And, Atom, Basic, BoolExpr, Cond, ConfirmGeq, Eq, FAnd, FImplies, FNot,
    FOr, Formula, Geq, Gt, Indep, Letter, Not, Sum, Prod, Term, TOP,
    COND_OVER_UNCOND, conj, eval_bool, free_letters,
)

EQ = "="
GE = ">="
GT = ">"
NE = "!="

_NEG = {EQ: NE, NE: EQ, GE: GT, GT: GE}


# ---------------------------------------------------------------------------
# State descriptions


@dataclass(frozen=True)
class StateDescription:
    letters: tuple
    valuation: tuple  # bools aligned with letters

    @property
    def expr(self) -> BoolExpr:
        return conj(Letter(n) if b else Not(Letter(n))
                    for n, b in zip(self.letters, self.valuation))

    def key(self) -> str:
        if not self.letters:
            return "T"
        return "&".join(n if b else "~" + n
                        for n, b in zip(self.letters, self.valuation))

    def __str__(self):
        return self.key()


def state_descriptions(letters) -> list:
    """All complete state descriptions, first letter varying fastest."""
    letters = tuple(letters)
    out = []
    for bits in product((True, False), repeat=len(letters)):
        out.append(StateDescription(letters, tuple(reversed(bits))))
    return out


def states_entailing(letters, e: BoolExpr) -> list:
    """Indices of state descriptions entailing the event."""
    out = []
    for i, sd in enumerate(state_descriptions(letters)):
        if eval_bool(e, dict(zip(sd.letters, sd.valuation))):
            out.append(i)
    return out


# ---------------------------------------------------------------------------
# Constraint systems


@dataclass(frozen=True)
class LinConstraint:
    """sum_i coeffs[i] * x_i  REL  rhs"""

    coeffs: tuple  # tuple of (var index, Fraction), sorted by var
    rel: str
    rhs: Fraction

    def evaluate(self, point):
        return sum(c * point[v] for v, c in self.coeffs)

    def holds(self, point) -> bool:
        lhs = self.evaluate(point)
        if self.rel == EQ:
            return lhs == self.rhs
        if self.rel == GE:
            return lhs >= self.rhs
        if self.rel == GT:
            return lhs > self.rhs
        raise ValueError(self.rel)

    def render(self, var_name) -> str:
        if not self.coeffs:
            lhs = "0"
        else:
            parts = []
            for v, c in self.coeffs:
                parts.append(f"{c}*{var_name(v)}" if c != 1 else var_name(v))
            lhs = " + ".join(parts).replace("+ -", "- ")
        return f"{lhs} {self.rel} {self.rhs}"


def lin_constraint(coeffs: dict, rel: str, rhs) -> LinConstraint:
    items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c))
    return LinConstraint(items, rel, Fraction(rhs))


@dataclass
class LinSystem:
    n_vars: int
    constraints: list
    var_names: list = None

    def name(self, v) -> str:
        return self.var_names[v] if self.var_names else f"x{v}"

    def holds(self, point) -> bool:
        return all(c.holds(point) for c in self.constraints)

    def render(self) -> str:
        return "\n".join(c.render(lambda v: f"x[{self.name(v)}]")
                         for c in self.constraints)


@dataclass(frozen=True)
class PolyConstraint:
    """poly REL 0"""

    poly: Polynomial
    rel: str

    def holds(self, point) -> bool:
        v = self.poly.evaluate(point)
        if self.rel == EQ:
            return v == 0
        if self.rel == GE:
            return v >= 0
        if self.rel == GT:
            return v > 0
        if self.rel == NE:
            return v != 0
        raise ValueError(self.rel)

    def render(self, var_name) -> str:
        return f"{self.poly.render(var_name)} {self.rel} 0"


@dataclass
class PolySystem:
    n_vars: int
    constraints: list
    var_names: list = None
    # per-variable closed bounds; expansion confines weights to [0, 1]
    bounds: list = None

    def name(self, v) -> str:
        return self.var_names[v] if self.var_names else f"x{v}"

    def var_bounds(self) -> list:
        if self.bounds is not None:
            return list(self.bounds)
        return [(Fraction(0), Fraction(1))] * self.n_vars

    def holds(self, point) -> bool:
        return all(c.holds(point) for c in self.constraints)

    def max_degree(self) -> int:
        return max((c.poly.degree() for c in self.constraints), default=0)

    def render(self) -> str:
        return "\n".join(c.render(lambda v: f"x[{self.name(v)}]")
                         for c in self.constraints)


# ---------------------------------------------------------------------------
# DNF over signed atoms


def _nnf(f: Formula, positive: bool):
    if isinstance(f, Atom):
        a = f.atom
        if positive:
            return [[(a, True)]]
        # push the negation into the atom
        if isinstance(a, Geq):
            return [[(Gt(a.rhs, a.lhs), True)]]
        if isinstance(a, Gt):
            return [[(Geq(a.rhs, a.lhs), True)]]
        if isinstance(a, Eq):
            return [[(Gt(a.lhs, a.rhs), True)], [(Gt(a.rhs, a.lhs), True)]]
        # independence and confirmation negations stay as signed atoms
        return [[(a, False)]]
    if isinstance(f, FNot):
        return _nnf(f.arg, not positive)
    if isinstance(f, FAnd):
        if positive:
            left, right = _nnf(f.left, True), _nnf(f.right, True)
            return [l + r for l in left for r in right]
        return _nnf(f.left, False) + _nnf(f.right, False)
    if isinstance(f, FOr):
        if positive:
            return _nnf(f.left, True) + _nnf(f.right, True)
        left, right = _nnf(f.left, False), _nnf(f.right, False)
        return [l + r for l in left for r in right]
    if isinstance(f, FImplies):
        if positive:
            return _nnf(f.left, False) + _nnf(f.right, True)
        return [l + r for l in _nnf(f.left, True) for r in _nnf(f.right, False)]
    raise TypeError(f"not a Formula: {f!r}")


def dnf(f: Formula) -> list:
    """List of conjuncts; each conjunct is a list of (atom, sign) pairs.

    Negated comparisons are rewritten into strict comparisons with the
    sides swapped, so additive conjuncts carry only =, >=, > atoms.
    """
    return _nnf(f, True)


# ---------------------------------------------------------------------------
# Expansion


def _term_poly(t: Term, letters, state_vars) -> Polynomial:
    if isinstance(t, Basic):
        return _event_poly(t.expr, letters, state_vars)
    if isinstance(t, Sum):
        return _term_poly(t.left, letters, state_vars) + \
            _term_poly(t.right, letters, state_vars)
    if isinstance(t, Prod):
        return _term_poly(t.left, letters, state_vars) * \
            _term_poly(t.right, letters, state_vars)
    raise ValueError("conditional term outside a comparison")


def _event_poly(e: BoolExpr, letters, state_vars) -> Polynomial:
    out = Polynomial()
    for i in states_entailing(letters, e):
        out = out + state_vars[i]
    return out


def _cond_pair(t: Term):
    if isinstance(t, Cond):
        return t.target, t.given
    if isinstance(t, Basic):
        return t.expr, TOP
    raise ValueError("conditional comparison against a compound term")


def _atom_polys(a, sign, letters, state_vars):
    """Yield (Polynomial, rel) rows for one signed atom."""
    from .syntax import has_cond

    if isinstance(a, (Geq, Gt, Eq)):
        if has_cond(a.lhs) or has_cond(a.rhs):
            at, ag = _cond_pair(a.lhs)
            bt, bg = _cond_pair(a.rhs)
            lhs = _event_poly(And(at, ag), letters, state_vars) * \
                _event_poly(bg, letters, state_vars)
            rhs = _event_poly(And(bt, bg), letters, state_vars) * \
                _event_poly(ag, letters, state_vars)
        else:
            lhs = _term_poly(a.lhs, letters, state_vars)
            rhs = _term_poly(a.rhs, letters, state_vars)
        rel = {Geq: GE, Gt: GT, Eq: EQ}[type(a)]
        if not sign:
            lhs, rhs, rel = rhs, lhs, _NEG[rel]
            if rel == NE:  # negated equality: handled by dnf, kept for safety
                yield (lhs - rhs, NE)
                return
        yield (lhs - rhs, rel)
        return
    if isinstance(a, Indep):
        joint = _event_poly(And(a.left, a.right), letters, state_vars)
        prod = _event_poly(a.left, letters, state_vars) * \
            _event_poly(a.right, letters, state_vars)
        yield (joint - prod, EQ if sign else NE)
        return
    if isinstance(a, ConfirmGeq):
        joint = _event_poly(And(a.target, a.evidence), letters, state_vars)
        prod = _event_poly(a.target, letters, state_vars) * \
            _event_poly(a.evidence, letters, state_vars)
        diff = joint - prod if a.direction == COND_OVER_UNCOND else prod - joint
        yield (diff, GE) if sign else ((-diff), GT)
        return
    raise TypeError(f"not an atom: {a!r}")


def expand(conjunct, letters):
    """Expand a dnf conjunct into a LinSystem or PolySystem over x_delta.

    Returns a LinSystem when every row is linear, else a PolySystem.
    Simplex rows (sum = 1, x >= 0) are always included.
    """
    letters = tuple(letters)
    states = state_descriptions(letters)
    n = len(states)
    state_vars = [Polynomial.variable(i) for i in range(n)]
    names = [sd.key() for sd in states]

    rows = []
    for a, sign in conjunct:
        rows.extend(_atom_polys(a, sign, letters, state_vars))

    simplex = [(sum(state_vars, Polynomial()) - 1, EQ)]
    simplex += [(state_vars[i], GE) for i in range(n)]
    rows = rows + simplex

    if all(p.is_linear() and rel != NE for p, rel in rows):
        constraints = []
        for p, rel in rows:
            coeffs, const = p.linear_parts()
            constraints.append(lin_constraint(coeffs, rel, -const))
        return LinSystem(n, constraints, names)
    constraints = [PolyConstraint(p, rel) for p, rel in rows]
    return PolySystem(n, constraints, names)


def expand_formula(f: Formula, letters=None):
    """dnf + expand for every disjunct; returns (letters, [systems])."""
    letters = tuple(letters) if letters is not None else tuple(free_letters(f))
    return letters, [expand(c, letters) for c in dnf(f)]
