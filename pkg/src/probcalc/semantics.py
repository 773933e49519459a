"""Finite probability models with exact rational weights.

A model assigns a nonnegative rational weight to every valuation of a
finite letter set.  Probability mode requires the weights to sum to 1;
counting mode keeps raw nonnegative integer weights with a positive sum
and evaluates additive comparisons over the unnormalized sums.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product

from .syntax import (
    Atom, ConfirmGeq, Cond, Eq, FAnd, FImplies, FNot, FOr, FOr as _FOr,
    Formula, Geq, Gt, Indep, Basic, BoolExpr, Prod, Sum, Term,
    COND_OVER_UNCOND, classify, eval_bool, free_letters, has_cond,
    LanguageTag, ADDITIVE_TAGS,
)


class UnknownLetterError(KeyError):
    pass


class CondTermError(ValueError):
    """Conditional terms have no standalone rational value."""


def _as_fraction(x) -> Fraction:
    f = Fraction(x)
    if f < 0:
        raise ValueError(f"negative weight {x}")
    return f


class Model:
    """Weights over the full valuation cube of `letters`.

    Valuations are tuples of bools aligned with `letters`; missing keys
    mean weight zero.
    """

    def __init__(self, letters, weights, mode="prob"):
        if mode not in ("prob", "count"):
            raise ValueError(f"bad mode {mode!r}")
        self.letters = tuple(letters)
        self.mode = mode
        self.weights = {}
        for val, w in weights.items():
            val = tuple(bool(b) for b in val)
            if len(val) != len(self.letters):
                raise ValueError("valuation arity mismatch")
            w = _as_fraction(w)
            if w:
                self.weights[val] = w
        total = sum(self.weights.values(), Fraction(0))
        if mode == "prob":
            if total != 1:
                raise ValueError(f"probability weights sum to {total}, not 1")
        else:
            if total <= 0:
                raise ValueError("counting model needs positive total weight")
            if any(w.denominator != 1 for w in self.weights.values()):
                raise ValueError("counting model needs integer weights")
        self.total = total

    # -- construction helpers ------------------------------------------------

    @classmethod
    def uniform(cls, letters):
        letters = tuple(letters)
        n = len(letters)
        w = Fraction(1, 2 ** n)
        return cls(letters, {v: w for v in product((True, False), repeat=n)})

    @classmethod
    def from_state_weights(cls, letters, state_weights, mode="prob"):
        """state_weights maps state index (per `state_descriptions`) to weight."""
        from .normalize import state_descriptions

        states = state_descriptions(letters)
        weights = {}
        for idx, w in state_weights.items():
            weights[states[idx].valuation] = w
        return cls(letters, weights, mode=mode)

    def normalize(self) -> "Model":
        """Counting model scaled to a probability model."""
        if self.mode == "prob":
            return self
        return Model(self.letters,
                     {v: w / self.total for v, w in self.weights.items()})

    def to_counting(self) -> "Model":
        """Probability model scaled by the lcm of denominators."""
        from math import lcm

        scale = lcm(*(w.denominator for w in self.weights.values())) \
            if self.weights else 1
        return Model(self.letters,
                     {v: w * scale for v, w in self.weights.items()},
                     mode="count")

    # -- serialization -------------------------------------------------------

    def _valuation_key(self, val) -> str:
        parts = []
        for name, b in zip(self.letters, val):
            parts.append(name if b else "~" + name)
        return "&".join(parts) if parts else "T"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "letters": list(self.letters),
            "weights": {self._valuation_key(v): str(w)
                        for v, w in sorted(self.weights.items(), reverse=True)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d) -> "Model":
        letters = tuple(d["letters"])
        index = {name: i for i, name in enumerate(letters)}
        weights = {}
        for key, w in d["weights"].items():
            val = [None] * len(letters)
            if key not in ("T", ""):
                for part in key.split("&"):
                    part = part.strip()
                    neg = part.startswith("~")
                    name = part[1:] if neg else part
                    if name not in index:
                        raise UnknownLetterError(name)
                    val[index[name]] = not neg
            if any(v is None for v in val):
                raise ValueError(f"incomplete valuation key {key!r}")
            weights[tuple(val)] = Fraction(w)
        return cls(letters, weights, mode=d.get("mode", "prob"))

    @classmethod
    def from_json(cls, text) -> "Model":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"Model({self.letters!r}, {len(self.weights)} states, {self.mode})"

    def __eq__(self, other):
        return (isinstance(other, Model) and self.letters == other.letters
                and self.mode == other.mode and self.weights == other.weights)

    # -- measure -------------------------------------------------------------

    def _check_letters(self, e: BoolExpr):
        from .syntax import bool_letters

        missing = bool_letters(e) - set(self.letters)
        if missing:
            raise UnknownLetterError(sorted(missing)[0])

    def mass(self, e: BoolExpr) -> Fraction:
        """Unnormalized weight of the event."""
        self._check_letters(e)
        out = Fraction(0)
        for val, w in self.weights.items():
            if eval_bool(e, dict(zip(self.letters, val))):
                out += w
        return out


def prob(m: Model, e: BoolExpr) -> Fraction:
    """Probability of the event; counting models divide by total weight."""
    mass = m.mass(e)
    return mass if m.mode == "prob" else mass / m.total


def eval_term(m: Model, t: Term) -> Fraction:
    if isinstance(t, Basic):
        return prob(m, t.expr)
    if isinstance(t, Cond):
        raise CondTermError(
            "conditional terms are evaluated by cross-multiplication inside"
            " comparisons, not standalone")
    if isinstance(t, Sum):
        return eval_term(m, t.left) + eval_term(m, t.right)
    if isinstance(t, Prod):
        return eval_term(m, t.left) * eval_term(m, t.right)
    raise TypeError(f"not a Term: {t!r}")


def _cond_sides(m: Model, lhs: Term, rhs: Term):
    """Cross-multiplied values for P(a|b) REL P(c|d); bare sides read as |T."""

    def split(t):
        if isinstance(t, Cond):
            return t.target, t.given
        if isinstance(t, Basic):
            return t.expr, None
        raise CondTermError("conditional comparison against a compound term")

    a, b = split(lhs)
    c, d = split(rhs)
    pab = prob(m, a if b is None else _and(a, b))
    pcd = prob(m, c if d is None else _and(c, d))
    pb = Fraction(1) if b is None else prob(m, b)
    pd = Fraction(1) if d is None else prob(m, d)
    return pab * pd, pcd * pb


def _and(x, y):
    from .syntax import And

    return And(x, y)


def _atom_holds(m: Model, a) -> bool:
    if isinstance(a, (Geq, Gt, Eq)):
        if has_cond(a.lhs) or has_cond(a.rhs):
            l, r = _cond_sides(m, a.lhs, a.rhs)
        else:
            l, r = eval_term(m, a.lhs), eval_term(m, a.rhs)
        if isinstance(a, Geq):
            return l >= r
        if isinstance(a, Gt):
            return l > r
        return l == r
    if isinstance(a, Indep):
        return prob(m, _and(a.left, a.right)) == prob(m, a.left) * prob(m, a.right)
    if isinstance(a, ConfirmGeq):
        joint = prob(m, _and(a.target, a.evidence))
        indep = prob(m, a.target) * prob(m, a.evidence)
        return joint >= indep if a.direction == COND_OVER_UNCOND else joint <= indep
    raise TypeError(f"not an atom: {a!r}")


def satisfies(m: Model, f: Formula) -> bool:
    if isinstance(f, Atom):
        return _atom_holds(m, f.atom)
    if isinstance(f, FNot):
        return not satisfies(m, f.arg)
    if isinstance(f, FAnd):
        return satisfies(m, f.left) and satisfies(m, f.right)
    if isinstance(f, _FOr):
        return satisfies(m, f.left) or satisfies(m, f.right)
    if isinstance(f, FImplies):
        return (not satisfies(m, f.left)) or satisfies(m, f.right)
    raise TypeError(f"not a Formula: {f!r}")


class WrongFragmentError(ValueError):
    pass


def eval_counting(m: Model, f: Formula) -> bool:
    """Additive comparison over raw integer sums of a counting model."""
    if m.mode != "count":
        raise WrongFragmentError("eval_counting needs a counting-mode model")
    if classify(f) not in ADDITIVE_TAGS:
        raise WrongFragmentError("counting semantics covers the additive languages")

    def term_mass(t):
        if isinstance(t, Basic):
            return m.mass(t.expr)
        if isinstance(t, Sum):
            return term_mass(t.left) + term_mass(t.right)
        raise WrongFragmentError("non-additive term")

    def rec(g):
        if isinstance(g, Atom):
            a = g.atom
            l, r = term_mass(a.lhs), term_mass(a.rhs)
            if isinstance(a, Geq):
                return l >= r
            if isinstance(a, Gt):
                return l > r
            return l == r
        if isinstance(g, FNot):
            return not rec(g.arg)
        if isinstance(g, FAnd):
            return rec(g.left) and rec(g.right)
        if isinstance(g, _FOr):
            return rec(g.left) or rec(g.right)
        if isinstance(g, FImplies):
            return (not rec(g.left)) or rec(g.right)
        raise TypeError(f"not a Formula: {g!r}")

    return rec(f)


def model_covers(m: Model, f: Formula) -> bool:
    return set(free_letters(f)) <= set(m.letters)
