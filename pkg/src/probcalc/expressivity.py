"""Distinguishing formulas between models, per language fragment.

For fixed finite models the atom spaces of the comparison fragments are
finite (events are subsets of the valuation cube), so the search is
exact: a None answer means no distinguishing formula of that fragment's
atomic shape exists.  For the additive fragment a difference in any
event probability is always distinguishable by a repeated-sum
comparison through a separating fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .semantics import Model, prob, satisfies
from .syntax import (
    Atom, Basic, BoolExpr, Cond, ConfirmGeq, Eq, Formula, Geq, Gt, Indep,
    LanguageTag, Letter, Not, ONE, Prod, TOP, COND_OVER_UNCOND,
    UNCOND_OVER_COND, conj, disj, repeated_sum,
)


class LetterMismatchError(ValueError):
    pass


def _event_expr(mask: int, states) -> BoolExpr:
    """Canonical Boolean expression for a subset of the valuation cube."""
    chosen = [sd.expr for i, sd in enumerate(states) if mask >> i & 1]
    return disj(chosen)


def _mass_vector(m: Model, states):
    """Integer event masses over a common denominator, indexed by bitmask."""
    from math import lcm

    weights = [m.weights.get(sd.valuation, Fraction(0)) for sd in states]
    denom = lcm(*(w.denominator for w in weights)) if weights else 1
    ints = [int(w * denom) for w in weights]
    n = len(states)
    mass = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        mass[mask] = mass[mask ^ low] + ints[low.bit_length() - 1]
    return mass


def stern_brocot_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Fraction with minimal denominator strictly between lo and hi."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    lo_n, lo_d = lo.numerator, lo.denominator
    hi_n, hi_d = hi.numerator, hi.denominator
    # walk the Stern-Brocot tree
    a, b, c, d = 0, 1, 1, 0
    while True:
        med = Fraction(a + c, b + d)
        if med <= lo:
            a, b = med.numerator, med.denominator
        elif med >= hi:
            c, d = med.numerator, med.denominator
        else:
            return med


def distinguishable(m1: Model, m2: Model, lang: LanguageTag,
                    budget=None) -> Formula | None:
    """A formula of the fragment true in exactly one model, or None.

    Exact for comp/ind/confirm/cond/quad on fixed models (finite atom
    spaces enumerated over the event lattice) and for add/poly (the
    separating-fraction construction distinguishes any distinct
    measures).
    """
    from .normalize import state_descriptions

    if tuple(m1.letters) != tuple(m2.letters):
        raise LetterMismatchError("models must share a letter set")
    states = state_descriptions(m1.letters)
    u = _mass_vector(m1, states)
    v = _mass_vector(m2, states)
    nu, nv = u[-1], v[-1]  # total masses (denominators differ between models)
    masks = range(len(u))

    out = None
    if lang == LanguageTag.COMP:
        out = _search_comp(u, v, masks, states)
    elif lang in (LanguageTag.ADD, LanguageTag.POLY):
        out = _additive_witness(u, v, nu, nv, masks, states)
    elif lang == LanguageTag.IND:
        out = _search_ind(u, v, nu, nv, masks, states)
    elif lang == LanguageTag.CONFIRM:
        out = _search_confirm(u, v, nu, nv, masks, states)
    elif lang == LanguageTag.COND:
        out = _search_cond(u, v, masks, states)
    elif lang == LanguageTag.QUAD:
        out = _search_quad(u, v, nu, nv, masks, states)
    else:
        raise ValueError(f"no distinguishability search for {lang}")
    if out is not None and satisfies(m1, out) == satisfies(m2, out):
        raise AssertionError("distinguishing formula failed re-verification")
    return out


def _search_comp(u, v, masks, states):
    for a in masks:
        for b in masks:
            if (u[a] >= u[b]) != (v[a] >= v[b]):
                return Atom(Geq(Basic(_event_expr(a, states)),
                                Basic(_event_expr(b, states))))
    return None


def _search_ind(u, v, nu, nv, masks, states):
    for a in masks:
        for b in masks:
            if (u[a] == u[b]) != (v[a] == v[b]):
                return Atom(Eq(Basic(_event_expr(a, states)),
                               Basic(_event_expr(b, states))))
    for a in masks:
        for b in masks:
            # P(ab) = P(a)P(b), cleared to integers: m[ab]*total = m[a]*m[b]
            if (u[a & b] * nu == u[a] * u[b]) != (v[a & b] * nv == v[a] * v[b]):
                return Atom(Indep(_event_expr(a, states),
                                  _event_expr(b, states)))
    return None


def _search_confirm(u, v, nu, nv, masks, states):
    for a in masks:
        for b in masks:
            if (u[a] == u[b]) != (v[a] == v[b]):
                return Atom(Eq(Basic(_event_expr(a, states)),
                               Basic(_event_expr(b, states))))
    for a in masks:
        for b in masks:
            du, dv = u[a & b] * nu - u[a] * u[b], v[a & b] * nv - v[a] * v[b]
            if (du >= 0) != (dv >= 0):
                return Atom(ConfirmGeq(_event_expr(a, states),
                                       _event_expr(b, states),
                                       COND_OVER_UNCOND))
            if (du <= 0) != (dv <= 0):
                return Atom(ConfirmGeq(_event_expr(a, states),
                                       _event_expr(b, states),
                                       UNCOND_OVER_COND))
    return None


def _search_cond(u, v, masks, states):
    for a in masks:
        for b in masks:
            ab_u, ab_v = u[a & b], v[a & b]
            bu, bv = u[b], v[b]
            for c in masks:
                for d in masks:
                    tu = ab_u * u[d] >= u[c & d] * bu
                    tv = ab_v * v[d] >= v[c & d] * bv
                    if tu != tv:
                        return Atom(Geq(
                            Cond(_event_expr(a, states), _event_expr(b, states)),
                            Cond(_event_expr(c, states), _event_expr(d, states))))
    return None


def _search_quad(u, v, nu, nv, masks, states):
    # term values scaled to the common denominator total^2
    def build(i):
        if i < len(u):
            return Basic(_event_expr(i, states))
        a, b = divmod(i - len(u), len(u))
        return Prod(Basic(_event_expr(a, states)), Basic(_event_expr(b, states)))

    vals_u = [u[m] * nu for m in masks] + [u[a] * u[b] for a in masks
                                           for b in masks]
    vals_v = [v[m] * nv for m in masks] + [v[a] * v[b] for a in masks
                                           for b in masks]
    for i, (xu, xv) in enumerate(zip(vals_u, vals_v)):
        for j, (yu, yv) in enumerate(zip(vals_u, vals_v)):
            if (xu >= yu) != (xv >= yv):
                return Atom(Geq(build(i), build(j)))
    return None


def _additive_witness(u, v, nu, nv, masks, states):
    """Fact-style construction: a repeated-sum comparison through a
    separating fraction between differing probabilities."""
    for e in masks:
        p1, p2 = Fraction(u[e], nu), Fraction(v[e], nv)
        if p1 == p2:
            continue
        lo, hi = sorted((p1, p2))
        sep = stern_brocot_between(lo, hi)
        n, m = sep.numerator, sep.denominator
        lhs = repeated_sum(Basic(_event_expr(e, states)), m)
        rhs = repeated_sum(ONE, n)
        return Atom(Geq(lhs, rhs))
    return None


# ---------------------------------------------------------------------------
# The fixture pack


def _model(weights: dict) -> Model:
    return Model.from_dict({"mode": "prob", "letters": ["A", "B"],
                            "weights": weights})


def fixture_models() -> dict:
    """The measure pairs of the expressivity walkthrough, by block name."""
    one_letter = lambda p: Model(("A",), {(True,): Fraction(p),
                                          (False,): 1 - Fraction(p)})
    return {
        "comp-vs-add": (one_letter("2/3"), one_letter("3/5")),
        "comp-vs-ind": (
            _model({"A&B": "25/36", "A&~B": "5/36", "~A&B": "5/36",
                    "~A&~B": "1/36"}),
            _model({"A&B": "27/36", "A&~B": "4/36", "~A&B": "4/36",
                    "~A&~B": "1/36"})),
        "ind-vs-confirm": (
            _model({"A&B": "23/36", "A&~B": "6/36", "~A&B": "6/36",
                    "~A&~B": "1/36"}),
            _model({"A&B": "27/36", "A&~B": "4/36", "~A&B": "4/36",
                    "~A&~B": "1/36"})),
        "confirm-vs-comp": (
            _model({"A&B": "1/9", "A&~B": "1/3", "~A&B": "5/9", "~A&~B": "0"}),
            _model({"A&B": "1/9", "A&~B": "5/9", "~A&B": "1/3", "~A&~B": "0"})),
        "cond-vs-quad": (
            _model({"A&B": "3/20", "A&~B": "4/20", "~A&B": "13/20",
                    "~A&~B": "0"}),
            _model({"A&B": "12/100", "A&~B": "19/100", "~A&B": "69/100",
                    "~A&~B": "0"})),
        "quad-vs-poly": (one_letter("2/3"), one_letter("3/4")),
    }


EXPECTED_VERDICTS = {
    # block: (indistinguishable in, distinguishable in)
    "comp-vs-add": (LanguageTag.COMP, LanguageTag.ADD),
    "comp-vs-ind": (LanguageTag.COMP, LanguageTag.IND),
    "ind-vs-confirm": (LanguageTag.IND, LanguageTag.CONFIRM),
    "confirm-vs-comp": (LanguageTag.CONFIRM, LanguageTag.COMP),
    "cond-vs-quad": (LanguageTag.COND, LanguageTag.QUAD),
    "quad-vs-poly": (LanguageTag.QUAD, LanguageTag.POLY),
}


@dataclass
class HierarchyEntry:
    block: str
    lower: str
    upper: str
    lower_formula: object
    upper_formula: object
    ok: bool


def hierarchy_report() -> list:
    """Run every fixture pair; each block must be indistinguishable in the
    weaker fragment and distinguishable in the stronger one."""
    out = []
    models = fixture_models()
    for block, (lower, upper) in EXPECTED_VERDICTS.items():
        m1, m2 = models[block]
        f_low = distinguishable(m1, m2, lower)
        f_up = distinguishable(m1, m2, upper)
        ok = f_low is None and f_up is not None
        out.append(HierarchyEntry(block, str(lower), str(upper), f_low, f_up, ok))
    return out
