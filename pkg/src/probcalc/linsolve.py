"""Exact Fourier-Motzkin decision procedure for linear systems.

Strict inequalities travel through elimination natively: combining a
strict row with any row yields a strict row, no epsilon perturbation.
Every row carries its provenance as a linear combination of input rows,
so an infeasibility ends in a contradictory ground row whose multipliers
form a Motzkin-style certificate (used for balanced-sequence extraction
by the representability module).

Equality rows eliminate variables by substitution; because weight systems
carry explicit nonnegativity rows, the substitution step leaves exactly
the residual comparisons the elimination calls for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .normalize import (EQ, GE, GT, LinConstraint, LinSystem, dnf, expand,
                        lin_constraint, state_descriptions)
from .syntax import Formula, LanguageTag, classify, free_letters


class WrongFragmentError(ValueError):
    pass


@dataclass
class _Row:
    coeffs: dict          # var -> Fraction, no zero entries
    rel: str              # EQ, GE, GT
    rhs: Fraction
    prov: dict            # input row index -> Fraction multiplier

    def scaled(self, k: Fraction) -> "_Row":
        if k <= 0 and self.rel != EQ:
            raise ValueError("inequalities scale by positive factors only")
        return _Row({v: c * k for v, c in self.coeffs.items()}, self.rel,
                    self.rhs * k, {i: m * k for i, m in self.prov.items()})

    def plus(self, other: "_Row") -> "_Row":
        coeffs = dict(self.coeffs)
        for v, c in other.coeffs.items():
            cur = coeffs.get(v, Fraction(0)) + c
            if cur:
                coeffs[v] = cur
            else:
                coeffs.pop(v, None)
        prov = dict(self.prov)
        for i, m in other.prov.items():
            cur = prov.get(i, Fraction(0)) + m
            if cur:
                prov[i] = cur
            else:
                prov.pop(i, None)
        rel = EQ
        if self.rel != EQ or other.rel != EQ:
            rel = GT if GT in (self.rel, other.rel) else GE
        return _Row(coeffs, rel, self.rhs + other.rhs, prov)

    def ground_consistent(self) -> bool:
        if self.coeffs:
            return True
        if self.rel == EQ:
            return self.rhs == 0
        if self.rel == GE:
            return self.rhs <= 0
        return self.rhs < 0  # GT: 0 > rhs

    def to_constraint(self) -> LinConstraint:
        return lin_constraint(self.coeffs, self.rel, self.rhs)


def _rows_from_system(s: LinSystem):
    rows = []
    for i, c in enumerate(s.constraints):
        rows.append(_Row(dict(c.coeffs), c.rel, Fraction(c.rhs), {i: Fraction(1)}))
    return rows


def _eliminate_rows(rows, v):
    """One elimination step; returns (new rows, rows that mentioned v)."""
    with_v = [r for r in rows if v in r.coeffs]
    without_v = [r for r in rows if v not in r.coeffs]

    eqs = [r for r in with_v if r.rel == EQ]
    if eqs:
        pivot = min(eqs, key=lambda r: abs(r.coeffs[v]))
        c_p = pivot.coeffs[v]
        out = list(without_v)
        for r in with_v:
            if r is pivot:
                continue
            out.append(r.plus(pivot.scaled(Fraction(-r.coeffs[v], 1) / c_p)))
        return out, with_v

    lowers = [r for r in with_v if r.coeffs[v] > 0]
    uppers = [r for r in with_v if r.coeffs[v] < 0]
    out = list(without_v)
    for lo in lowers:
        for up in uppers:
            # scale so the v coefficients cancel; both factors positive
            out.append(lo.scaled(-up.coeffs[v]).plus(up.scaled(lo.coeffs[v])))
    return out, with_v


@dataclass
class EliminationTrace:
    order: list                    # eliminated variable indices in order
    contradiction: _Row | None     # inconsistent ground row, if any
    var_names: list | None = None

    def certificate_multipliers(self) -> dict:
        """Input-row multipliers of the contradictory combination."""
        if self.contradiction is None:
            return {}
        return dict(self.contradiction.prov)

    def render(self) -> str:
        lines = [f"eliminated: {self.order}"]
        if self.contradiction is not None:
            c = self.contradiction.to_constraint()
            lines.append(f"contradiction: {c.render(lambda v: f'x{v}')}")
            mults = ", ".join(f"row[{i}]*{m}" for i, m in
                              sorted(self.contradiction.prov.items()))
            lines.append(f"combination: {mults}")
        return "\n".join(lines)


@dataclass
class LinSat:
    witness: dict  # var -> Fraction

    @property
    def is_sat(self):
        return True


@dataclass
class LinUnsat:
    trace: EliminationTrace

    @property
    def is_sat(self):
        return False


def fm_eliminate(s: LinSystem, v: int) -> LinSystem:
    """Project the variable out; solution set is the projection of s's."""
    if not any(v in dict(c.coeffs) for c in s.constraints):
        raise ValueError(f"variable {v} does not occur")
    rows, _ = _eliminate_rows(_rows_from_system(s), v)
    return LinSystem(s.n_vars, [r.to_constraint() for r in rows], s.var_names)


def _elimination_order(rows, n_vars):
    def occurrences(v):
        return sum(1 for r in rows if v in r.coeffs)

    present = [v for v in range(n_vars) if occurrences(v)]
    return sorted(present, key=lambda v: (occurrences(v), v))


def _pick_value(rows, v, values):
    """Choose a rational value for v given rows at its level."""
    eqs = [r for r in rows if r.rel == EQ]
    if eqs:
        r = eqs[0]
        rest = sum((c * values[w] for w, c in r.coeffs.items() if w != v),
                   Fraction(0))
        return (r.rhs - rest) / r.coeffs[v]
    lo = hi = None
    lo_strict = hi_strict = False
    for r in rows:
        rest = sum((c * values[w] for w, c in r.coeffs.items() if w != v),
                   Fraction(0))
        bound = (r.rhs - rest) / r.coeffs[v]
        if r.coeffs[v] > 0:  # lower bound
            if lo is None or bound > lo or (bound == lo and r.rel == GT):
                lo, lo_strict = bound, r.rel == GT
        else:                # upper bound
            if hi is None or bound < hi or (bound == hi and r.rel == GT):
                hi, hi_strict = bound, r.rel == GT
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo == hi:
        return lo
    return (lo + hi) / 2


def lin_sat(s: LinSystem):
    """Decide the system; Sat carries a verified witness, Unsat a trace."""
    rows = _rows_from_system(s)
    stack = []
    order = []
    while True:
        ground_bad = next((r for r in rows if not r.ground_consistent()), None)
        if ground_bad is not None:
            return LinUnsat(EliminationTrace(order, ground_bad, s.var_names))
        remaining = _elimination_order(rows, s.n_vars)
        if not remaining:
            break
        v = remaining[0]
        rows, level_rows = _eliminate_rows(rows, v)
        stack.append((v, level_rows))
        order.append(v)

    values = {v: Fraction(0) for v in range(s.n_vars)}
    for v, level_rows in reversed(stack):
        values[v] = _pick_value(level_rows, v, values)
    if not s.holds(values):  # witness hygiene: never expose an unverified model
        raise AssertionError("back-substitution produced a bad witness")
    return LinSat(values)


# ---------------------------------------------------------------------------
# Additive satisfiability over formulas


@dataclass
class AdditiveSat:
    model: object
    disjunct: int

    @property
    def is_sat(self):
        return True


@dataclass
class AdditiveUnsat:
    traces: list

    @property
    def is_sat(self):
        return False


def _additive_form(f: Formula) -> Formula:
    tag = classify(f)
    if tag in (LanguageTag.COMP, LanguageTag.ADD):
        return f
    if tag == LanguageTag.SAME_COND:
        from .reductions import same_cond_to_comp

        return same_cond_to_comp(f)
    raise WrongFragmentError(f"sat_additive does not handle {tag}")


def sat_additive(f: Formula):
    """Disjunct-wise linear decision; Sat returns a full verified Model."""
    from .semantics import Model, satisfies

    g = _additive_form(f)
    letters = tuple(free_letters(g))
    traces = []
    for k, conjunct in enumerate(dnf(g)):
        system = expand(conjunct, letters)
        res = lin_sat(system)
        if res.is_sat:
            model = Model.from_state_weights(letters, res.witness)
            if not satisfies(model, f):
                raise AssertionError("solver witness failed re-verification")
            return AdditiveSat(model, k)
        traces.append(res.trace)
    return AdditiveUnsat(traces)


def _conjunct_holds(model, conjunct) -> bool:
    from .semantics import _atom_holds

    return all(_atom_holds(model, a) == sign for a, sign in conjunct)


def minimize_support(f: Formula, witness) -> object:
    """Shrink a witness's support by forcing weights to zero and re-solving.

    The result supports at most (atoms in the satisfied disjunct) + 1
    states; on any failure the input witness is returned unchanged.
    """
    from .semantics import Model, satisfies

    try:
        g = _additive_form(f)
    except WrongFragmentError:
        return witness
    if not satisfies(witness, f):
        return witness
    letters = tuple(free_letters(g))
    if tuple(witness.letters) != letters:
        return witness
    conjunct = next((c for c in dnf(g) if _conjunct_holds(witness, c)), None)
    if conjunct is None:
        return witness

    system = expand(conjunct, letters)
    states = state_descriptions(letters)
    current = {i: witness.weights.get(sd.valuation, Fraction(0))
               for i, sd in enumerate(states)}
    extra = []
    for v in sorted(current, key=lambda v: (current[v], v)):
        if current[v] == 0:
            continue
        trial = system.constraints + extra + [lin_constraint({v: 1}, EQ, 0)]
        res = lin_sat(LinSystem(system.n_vars, trial, system.var_names))
        if res.is_sat:
            extra.append(lin_constraint({v: 1}, EQ, 0))
            current = res.witness
    model = Model.from_state_weights(letters, current)
    if not satisfies(model, f):
        return witness
    return model
