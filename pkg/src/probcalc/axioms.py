"""Axiom schemas, instantiation, semantic validity, and polarization.

Schemas are exercised semantically: an instance is checked valid by
refuting its negation with the solvers (the completeness theorems let
validity stand in for derivability), and fuzzed against random models.
No syntactic proof search is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
import random

from .normalize import state_descriptions
from .semantics import Model, satisfies
from .syntax import (
    And, Atom, Basic, BoolExpr, Cond, Eq, FAnd, FImplies, FNot, FOr, Formula,
    Geq, Gt, Letter, Not, ONE, Or, Prod, Sum, Term, TOP, ZERO, LanguageTag,
    atoms_of, classify, conj, disj, entails, fand, free_letters, iff,
    iff_expr, term_letters,
)


class ArityError(ValueError):
    pass


class DistPreconditionError(ValueError):
    """Dist requires the tautology beta -> alpha."""


@dataclass
class Schema:
    name: str
    arg_kinds: tuple  # 'bool' | 'term' | 'formula' | 'int'
    build: callable
    note: str = ""

    def instantiate(self, *args) -> Formula:
        if self.arg_kinds and self.arg_kinds[-1] == "*":
            fixed = self.arg_kinds[:-1]
            if len(args) < len(fixed):
                raise ArityError(f"{self.name} needs >= {len(fixed)} arguments")
        elif len(args) != len(self.arg_kinds):
            raise ArityError(
                f"{self.name} expects {len(self.arg_kinds)} arguments, got {len(args)}")
        return self.build(*args)


def P(e: BoolExpr) -> Term:
    return Basic(e)


def geq(a, b) -> Formula:
    return Atom(Geq(a, b))


def gt(a, b) -> Formula:
    return Atom(Gt(a, b))


def eq(a, b) -> Formula:
    return Atom(Eq(a, b))


# -- schema builders ----------------------------------------------------------


def _lin_trans(a, b, c):
    return FImplies(FAnd(geq(a, b), geq(b, c)), geq(a, c))


def _lin_total(a, b):
    return FOr(geq(a, b), geq(b, a))


def _bool_excluded_middle(a, b):
    f = geq(a, b)
    return FOr(f, FNot(f))


def _dist(alpha, beta):
    if not entails(beta, alpha):
        raise DistPreconditionError("Dist needs |= beta -> alpha")
    return geq(P(alpha), P(beta))


def _nondeg():
    return FNot(geq(ZERO, ONE))


def _add(alpha, beta):
    return eq(P(alpha), Sum(P(And(alpha, beta)), P(And(alpha, Not(beta)))))


def _assoc_add(a, b, c):
    return eq(Sum(a, Sum(b, c)), Sum(Sum(a, b), c))


def _comm_add(a, b):
    return eq(Sum(a, b), Sum(b, a))


def _zero_add(a):
    return eq(Sum(a, ZERO), a)


def _two_canc(a, b, c, d, e, f):
    return FImplies(FAnd(geq(Sum(a, e), Sum(c, f)), geq(Sum(b, f), Sum(d, e))),
                    geq(Sum(a, b), Sum(c, d)))


def _contr(a, b, c, d):
    return FImplies(FAnd(geq(Sum(a, b), Sum(c, d)), geq(d, b)), geq(a, c))


def _assoc_mul(a, b, c):
    return eq(Prod(a, Prod(b, c)), Prod(Prod(a, b), c))


def _comm_mul(a, b):
    return eq(Prod(a, b), Prod(b, a))


def _zero_mul(a):
    return eq(Prod(a, ZERO), ZERO)


def _one_mul(a):
    return eq(Prod(a, ONE), a)


def _canc(a, b, c):
    return FImplies(gt(c, ZERO), iff(geq(Prod(a, c), Prod(b, c)), geq(a, b)))


def _dist_mul(a, b, c):
    return eq(Prod(a, Sum(b, c)), Sum(Prod(a, b), Prod(a, c)))


def _sub(a, b, c, d):
    return FImplies(FAnd(geq(a, b), geq(c, d)),
                    geq(Sum(Prod(a, c), Prod(b, d)),
                        Sum(Prod(a, d), Prod(b, c))))


def _quasi(alpha, beta):
    return iff(geq(P(alpha), P(beta)),
               geq(P(And(alpha, Not(beta))), P(And(beta, Not(alpha)))))


def _ext(a1, a2, b1, b2):
    prem = FAnd(geq(P(iff_expr(a1, a2)), ONE), geq(P(iff_expr(b1, b2)), ONE))
    return FImplies(prem, FImplies(geq(P(a1), P(b1)), geq(P(a2), P(b2))))


def balanced_states(alphas, betas):
    """State descriptions over the 2n formulas-as-atoms with equally many
    alphas and betas unnegated."""
    n = len(alphas)
    out = []
    for bits in product((True, False), repeat=2 * n):
        if sum(bits[:n]) == sum(bits[n:]):
            lits = [f if keep else Not(f)
                    for f, keep in zip(list(alphas) + list(betas), bits)]
            out.append(conj(lits))
    return out


def _fincan(*forms):
    if len(forms) % 2 or not forms:
        raise ArityError("FinCan takes two equal-length formula lists")
    n = len(forms) // 2
    alphas, betas = list(forms[:n]), list(forms[n:])
    balanced = balanced_states(alphas, betas)
    antecedent = eq(P(disj(balanced)), ONE)
    for a, b in zip(alphas[:-1], betas[:-1]):
        antecedent = FAnd(antecedent, geq(P(a), P(b)))
    return FImplies(antecedent, geq(P(betas[-1]), P(alphas[-1])))


# -- derived lemmas -----------------------------------------------------------


def _nonnull(a):
    return geq(a, ZERO)


def _refl(a):
    return geq(a, a)


def _mono(a, b):
    return geq(Sum(a, b), a)


def _one_canc(a, b, c):
    return iff(geq(Sum(a, c), Sum(b, c)), geq(a, b))


def _dupl(a, b):
    return iff(geq(Sum(a, a), Sum(b, b)), geq(a, b))


def _comb(a, b, c, d):
    return FImplies(FAnd(geq(a, b), geq(c, d)), geq(Sum(a, c), Sum(b, d)))


def _sub1(a, b, c, d, e):
    return FImplies(eq(Sum(e, c), a),
                    iff(geq(Sum(a, d), Sum(b, c)), geq(Sum(e, d), b)))


def _sub2(a, b, c, d, e):
    return FImplies(eq(Sum(e, c), a),
                    iff(geq(Sum(b, c), Sum(a, d)), geq(b, Sum(e, d))))


def _elim(a, b, c, d, e):
    return FImplies(FAnd(gt(Sum(e, a), b), gt(c, Sum(e, d))),
                    gt(Sum(a, c), Sum(b, d)))


def replace_term(f: Formula, old: Term, new: Term, positions=None) -> Formula:
    """Replace occurrences of a term; `positions` selects which (all if None)."""
    counter = {"i": 0}

    def sub_term(t):
        if t == old:
            i = counter["i"]
            counter["i"] += 1
            if positions is None or i in positions:
                return new
            return t
        if isinstance(t, Sum):
            return Sum(sub_term(t.left), sub_term(t.right))
        if isinstance(t, Prod):
            return Prod(sub_term(t.left), sub_term(t.right))
        return t

    def sub_formula(g):
        if isinstance(g, Atom):
            a = g.atom
            if isinstance(a, (Geq, Gt, Eq)):
                return Atom(type(a)(sub_term(a.lhs), sub_term(a.rhs)))
            return g
        if isinstance(g, FNot):
            return FNot(sub_formula(g.arg))
        if isinstance(g, (FAnd, FOr, FImplies)):
            return type(g)(sub_formula(g.left), sub_formula(g.right))
        raise TypeError(f"not a Formula: {g!r}")

    return sub_formula(f)


def _repl(a, b, phi, positions=None):
    return FImplies(eq(a, b), iff(phi, replace_term(phi, a, b, positions)))


SCHEMAS = {}


def _register(name, kinds, build, note=""):
    SCHEMAS[name] = Schema(name, tuple(kinds), build, note)


_register("LinTrans", ("term", "term", "term"), _lin_trans)
_register("LinTotal", ("term", "term"), _lin_total)
_register("Bool", ("term", "term"), _bool_excluded_middle,
          "representative propositional tautology over an atom")
_register("Dist", ("bool", "bool"), _dist, "requires |= beta -> alpha")
_register("NonDeg", (), _nondeg)
_register("Add", ("bool", "bool"), _add)
_register("AssocAdd", ("term", "term", "term"), _assoc_add)
_register("CommAdd", ("term", "term"), _comm_add)
_register("ZeroAdd", ("term",), _zero_add)
_register("2Canc", ("term",) * 6, _two_canc)
_register("Contr", ("term",) * 4, _contr)
_register("AssocMul", ("term", "term", "term"), _assoc_mul)
_register("CommMul", ("term", "term"), _comm_mul)
_register("ZeroMul", ("term",), _zero_mul)
_register("One", ("term",), _one_mul)
_register("Canc", ("term", "term", "term"), _canc)
_register("DistMul", ("term", "term", "term"), _dist_mul)
_register("Sub", ("term",) * 4, _sub)
_register("Quasi", ("bool", "bool"), _quasi)
_register("Ext", ("bool",) * 4, _ext,
          "instances are Dist-derivable under this semantics")
_register("FinCan", ("bool", "*"), _fincan)
_register("NonNull", ("term",), _nonnull)
_register("Refl", ("term",), _refl)
_register("Mono", ("term", "term"), _mono)
_register("1Canc", ("term", "term", "term"), _one_canc)
_register("Dupl", ("term", "term"), _dupl)
_register("Comb", ("term",) * 4, _comb)
_register("Sub1", ("term",) * 5, _sub1)
_register("Sub2", ("term",) * 5, _sub2)
_register("Elim", ("term",) * 5, _elim)

DERIVED_LEMMAS = ["NonNull", "Refl", "Mono", "1Canc", "Dupl", "Comb",
                  "Sub1", "Sub2", "Elim"]
FIG1 = ["LinTrans", "LinTotal", "Bool", "Dist", "NonDeg"]
FIG2 = ["Add", "AssocAdd", "CommAdd", "ZeroAdd", "2Canc", "Contr"]
FIG3 = ["AssocMul", "CommMul", "ZeroMul", "One", "Canc", "DistMul", "Sub"]


def instantiate(name: str, *args) -> Formula:
    """Instantiate a schema by name; FinCan also accepts "FinCan:n"."""
    if name.startswith("FinCan"):
        return SCHEMAS["FinCan"].instantiate(*args)
    if name == "Repl":
        return _repl(*args)
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}")
    return SCHEMAS[name].instantiate(*args)


# -- validity -----------------------------------------------------------------


@dataclass
class ValidityResult:
    status: str  # "valid", "countermodel", "unknown"
    countermodel: Model | None = None


def validity(f: Formula, config=None) -> ValidityResult:
    """Valid iff the negation is unsatisfiable; dispatched by fragment."""
    from .linsolve import sat_additive
    from .polysolve import (DEFAULT_CONFIG, SatNumeric, SatRational, Unknown,
                            sat_multiplicative)

    neg = FNot(f)
    tag = classify(neg)
    if tag in (LanguageTag.COMP, LanguageTag.ADD, LanguageTag.SAME_COND):
        res = sat_additive(neg)
        if res.is_sat:
            return ValidityResult("countermodel", res.model)
        return ValidityResult("valid")
    verdict = sat_multiplicative(neg, config or DEFAULT_CONFIG)
    if isinstance(verdict, SatRational):
        return ValidityResult("countermodel", verdict.model)
    if isinstance(verdict, SatNumeric):
        return ValidityResult("unknown")  # numeric evidence is not a model
    if isinstance(verdict, Unknown):
        return ValidityResult("unknown")
    return ValidityResult("valid")


# -- randomized soundness -----------------------------------------------------


def random_bool(rng, letters, depth=2) -> BoolExpr:
    if depth == 0 or rng.random() < 0.3:
        choices = [Letter(l) for l in letters] + [TOP] + [Letter(l) for l in letters]
        return rng.choice(choices)
    op = rng.random()
    if op < 0.25:
        return Not(random_bool(rng, letters, depth - 1))
    if op < 0.65:
        return And(random_bool(rng, letters, depth - 1),
                   random_bool(rng, letters, depth - 1))
    return Or(random_bool(rng, letters, depth - 1),
              random_bool(rng, letters, depth - 1))


def random_term(rng, letters, depth=1, multiplicative=False) -> Term:
    if depth == 0 or rng.random() < 0.45:
        return Basic(random_bool(rng, letters, 1))
    if multiplicative and rng.random() < 0.4:
        return Prod(random_term(rng, letters, depth - 1, multiplicative),
                    random_term(rng, letters, depth - 1, multiplicative))
    return Sum(random_term(rng, letters, depth - 1, multiplicative),
               random_term(rng, letters, depth - 1, multiplicative))


def random_model(rng, letters, max_denom=12) -> Model:
    states = list(product((True, False), repeat=len(letters)))
    raw = [rng.randint(0, max_denom) for _ in states]
    if sum(raw) == 0:
        raw[0] = 1
    total = sum(raw)
    return Model(letters, {s: Fraction(r, total) for s, r in zip(states, raw)})


def _random_args(rng, schema: Schema, letters):
    multiplicative = schema.name in FIG3
    args = []
    kinds = schema.arg_kinds
    if kinds and kinds[-1] == "*":
        n = rng.randint(1, 3)
        return ([random_bool(rng, letters, 1) for _ in range(2 * n)])
    for kind in kinds:
        if kind == "bool":
            args.append(random_bool(rng, letters, 2))
        elif kind == "term":
            args.append(random_term(rng, letters, 1, multiplicative))
        else:
            raise ArityError(f"cannot randomize kind {kind}")
    return args


def soundness_fuzz(schema_name: str, trials: int, seed: int = 0,
                   letters=("A", "B")):
    """Random instances x random rational models; first violation or None."""
    schema = SCHEMAS[schema_name]
    rng = random.Random(seed)
    for _ in range(trials):
        args = _random_args(rng, schema, letters)
        try:
            inst = schema.instantiate(*args)
        except DistPreconditionError:
            continue
        model = random_model(rng, letters)
        if not satisfies(model, inst):
            return inst, model
    return None


# -- polarization -------------------------------------------------------------


class LetterCollisionError(ValueError):
    pass


def relativize(f: Formula, fresh: str):
    """(f with every comparison relativized to the fresh letter, premise pi)."""
    if fresh in free_letters(f):
        raise LetterCollisionError(f"{fresh} occurs in the formula")
    a = Letter(fresh)

    def rel_term(t):
        if isinstance(t, Basic):
            return Basic(And(t.expr, a))
        raise ValueError("relativization applies to bare comparative atoms")

    def rec(g):
        if isinstance(g, Atom):
            at = g.atom
            if not isinstance(at, (Geq, Gt, Eq)):
                raise ValueError("relativization applies to comparative formulas")
            return Atom(type(at)(rel_term(at.lhs), rel_term(at.rhs)))
        if isinstance(g, FNot):
            return FNot(rec(g.arg))
        if isinstance(g, (FAnd, FOr, FImplies)):
            return type(g)(rec(g.left), rec(g.right))
        raise TypeError(f"not a Formula: {g!r}")

    letters = free_letters(f)
    premise = None
    for sd in state_descriptions(letters):
        d = sd.expr
        clause = eq(P(And(d, a)), P(And(d, Not(a))))
        premise = clause if premise is None else FAnd(premise, clause)
    return rec(f), premise


def polarize_model(m: Model, alpha: BoolExpr, fresh: str) -> Model:
    """Extend the model by a fresh letter splitting alpha into two
    equiprobable halves; every alpha-free event keeps its probability."""
    from .syntax import bool_letters, eval_bool

    if fresh in m.letters:
        raise LetterCollisionError(f"{fresh} already interpreted")
    if not bool_letters(alpha) <= set(m.letters):
        raise ValueError("alpha must be over the model's letters")
    letters = m.letters + (fresh,)
    weights = {}
    for val, w in m.weights.items():
        assignment = dict(zip(m.letters, val))
        if eval_bool(alpha, assignment):
            weights[val + (True,)] = w / 2
            weights[val + (False,)] = w / 2
        else:
            weights[val + (True,)] = w
    return Model(letters, weights, mode=m.mode)
