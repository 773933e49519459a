"""Abstract syntax, concrete grammar, and language classification.

The term language splits into an additive family (bare probability terms,
sums of them) and a multiplicative family (conditional terms, products,
independence and confirmation atoms).  Formulas are Boolean combinations
of atomic comparisons.  `classify` places a formula at the lowest point
of the fragment lattice whose grammar generates it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import total_ordering


# ---------------------------------------------------------------------------
# Boolean expressions


class BoolExpr:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Letter(BoolExpr):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("letter name must be nonempty")


@dataclass(frozen=True)
class Not(BoolExpr):
    arg: BoolExpr


@dataclass(frozen=True)
class And(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Or(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Top(BoolExpr):
    pass


@dataclass(frozen=True)
class Bot(BoolExpr):
    pass


TOP = Top()
BOT = Bot()


def conj(exprs) -> BoolExpr:
    """Left-associated conjunction; empty conjunction is Top."""
    exprs = list(exprs)
    if not exprs:
        return TOP
    out = exprs[0]
    for e in exprs[1:]:
        out = And(out, e)
    return out


def disj(exprs) -> BoolExpr:
    """Left-associated disjunction; empty disjunction is Bot."""
    exprs = list(exprs)
    if not exprs:
        return BOT
    out = exprs[0]
    for e in exprs[1:]:
        out = Or(out, e)
    return out


def iff_expr(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    return Or(And(a, b), And(Not(a), Not(b)))


def bool_letters(e: BoolExpr) -> set:
    if isinstance(e, Letter):
        return {e.name}
    if isinstance(e, Not):
        return bool_letters(e.arg)
    if isinstance(e, (And, Or)):
        return bool_letters(e.left) | bool_letters(e.right)
    return set()


def eval_bool(e: BoolExpr, assignment: dict) -> bool:
    """Evaluate under a truth assignment mapping letter name -> bool."""
    if isinstance(e, Letter):
        return assignment[e.name]
    if isinstance(e, Not):
        return not eval_bool(e.arg, assignment)
    if isinstance(e, And):
        return eval_bool(e.left, assignment) and eval_bool(e.right, assignment)
    if isinstance(e, Or):
        return eval_bool(e.left, assignment) or eval_bool(e.right, assignment)
    if isinstance(e, Top):
        return True
    if isinstance(e, Bot):
        return False
    raise TypeError(f"not a BoolExpr: {e!r}")


def is_tautology(e: BoolExpr) -> bool:
    from itertools import product

    names = sorted(bool_letters(e))
    for bits in product((True, False), repeat=len(names)):
        if not eval_bool(e, dict(zip(names, bits))):
            return False
    return True


def entails(beta: BoolExpr, alpha: BoolExpr) -> bool:
    """Propositional entailment beta |= alpha."""
    return is_tautology(Or(Not(beta), alpha))


# ---------------------------------------------------------------------------
# Probability terms


class Term:
    __slots__ = ()

    def __add__(self, other):
        return Sum(self, other)

    def __mul__(self, other):
        return Prod(self, other)


@dataclass(frozen=True)
class Basic(Term):
    expr: BoolExpr


@dataclass(frozen=True)
class Cond(Term):
    target: BoolExpr
    given: BoolExpr


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Prod(Term):
    left: Term
    right: Term


ZERO = Basic(BOT)
ONE = Basic(TOP)


def term_letters(t: Term) -> set:
    if isinstance(t, Basic):
        return bool_letters(t.expr)
    if isinstance(t, Cond):
        return bool_letters(t.target) | bool_letters(t.given)
    if isinstance(t, (Sum, Prod)):
        return term_letters(t.left) | term_letters(t.right)
    raise TypeError(f"not a Term: {t!r}")


def has_cond(t: Term) -> bool:
    if isinstance(t, Cond):
        return True
    if isinstance(t, (Sum, Prod)):
        return has_cond(t.left) or has_cond(t.right)
    return False


def sum_terms(terms) -> Term:
    """Left-associated sum; empty sum is 0."""
    terms = list(terms)
    if not terms:
        return ZERO
    out = terms[0]
    for t in terms[1:]:
        out = Sum(out, t)
    return out


def repeated_sum(t: Term, k: int) -> Term:
    if k < 1:
        return ZERO
    return sum_terms([t] * k)


# ---------------------------------------------------------------------------
# Atomic constraints and formulas

COND_OVER_UNCOND = "cond-over-uncond"
UNCOND_OVER_COND = "uncond-over-cond"


class AtomicConstraint:
    __slots__ = ()


@dataclass(frozen=True)
class Geq(AtomicConstraint):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Gt(AtomicConstraint):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Eq(AtomicConstraint):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Indep(AtomicConstraint):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class ConfirmGeq(AtomicConstraint):
    """P(target|evidence) vs P(target), compared per `direction`."""

    target: BoolExpr
    evidence: BoolExpr
    direction: str  # COND_OVER_UNCOND or UNCOND_OVER_COND

    def __post_init__(self):
        if self.direction not in (COND_OVER_UNCOND, UNCOND_OVER_COND):
            raise ValueError(f"bad direction {self.direction!r}")


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return FAnd(self, other)

    def __or__(self, other):
        return FOr(self, other)

    def __invert__(self):
        return FNot(self)


@dataclass(frozen=True)
class Atom(Formula):
    atom: AtomicConstraint


@dataclass(frozen=True)
class FNot(Formula):
    arg: Formula


@dataclass(frozen=True)
class FAnd(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class FOr(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class FImplies(Formula):
    left: Formula
    right: Formula


def fand(fs) -> Formula:
    fs = list(fs)
    if not fs:
        raise ValueError("empty conjunction has no Formula representation")
    out = fs[0]
    for f in fs[1:]:
        out = FAnd(out, f)
    return out


def iff(a: Formula, b: Formula) -> Formula:
    return FAnd(FImplies(a, b), FImplies(b, a))


def atoms_of(f: Formula) -> list:
    if isinstance(f, Atom):
        return [f.atom]
    if isinstance(f, FNot):
        return atoms_of(f.arg)
    if isinstance(f, (FAnd, FOr, FImplies)):
        return atoms_of(f.left) + atoms_of(f.right)
    raise TypeError(f"not a Formula: {f!r}")


def free_letters(f: Formula) -> list:
    """Letters occurring in f, sorted (deterministic order)."""
    out = set()
    for a in atoms_of(f):
        if isinstance(a, (Geq, Gt, Eq)):
            out |= term_letters(a.lhs) | term_letters(a.rhs)
        elif isinstance(a, Indep):
            out |= bool_letters(a.left) | bool_letters(a.right)
        elif isinstance(a, ConfirmGeq):
            out |= bool_letters(a.target) | bool_letters(a.evidence)
        else:
            raise TypeError(f"not an atom: {a!r}")
    return sorted(out)


# ---------------------------------------------------------------------------
# Language tags


@total_ordering
class LanguageTag(Enum):
    COMP = "comp"
    ADD = "add"
    IND = "ind"
    CONFIRM = "confirm"
    SAME_COND = "same_cond"
    COND = "cond"
    QUAD = "quad"
    POLY = "poly"

    def __le__(self, other):
        if not isinstance(other, LanguageTag):
            return NotImplemented
        return (self, other) in _LEQ

    def __str__(self):
        return self.value


_ORDER_EDGES = [
    (LanguageTag.COMP, LanguageTag.ADD),
    (LanguageTag.ADD, LanguageTag.POLY),
    (LanguageTag.IND, LanguageTag.CONFIRM),
    (LanguageTag.CONFIRM, LanguageTag.COND),
    (LanguageTag.COND, LanguageTag.QUAD),
    (LanguageTag.QUAD, LanguageTag.POLY),
    (LanguageTag.COMP, LanguageTag.COND),
    (LanguageTag.SAME_COND, LanguageTag.COND),
]


def _transitive_closure(edges):
    leq = {(t, t) for t in LanguageTag}
    leq |= set(edges)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(leq):
            for (c, d) in list(leq):
                if b == c and (a, d) not in leq:
                    leq.add((a, d))
                    changed = True
    return leq


_LEQ = _transitive_closure(_ORDER_EDGES)

# Tie-break when a formula sits in incomparable fragments: prefer the more
# qualitative reading.
_CANONICAL = [
    LanguageTag.COMP,
    LanguageTag.IND,
    LanguageTag.CONFIRM,
    LanguageTag.SAME_COND,
    LanguageTag.COND,
    LanguageTag.ADD,
    LanguageTag.QUAD,
    LanguageTag.POLY,
]

ADDITIVE_TAGS = {LanguageTag.COMP, LanguageTag.ADD}
MULTIPLICATIVE_TAGS = {
    LanguageTag.IND,
    LanguageTag.CONFIRM,
    LanguageTag.COND,
    LanguageTag.QUAD,
    LanguageTag.POLY,
}


class NotInFamilyError(ValueError):
    """Formula is outside every language of the family."""


def _term_shape(t: Term) -> str:
    """One of basic / sum / quadprod / poly / cond; rejects Cond under +,*."""
    if isinstance(t, Basic):
        return "basic"
    if isinstance(t, Cond):
        return "cond"
    if has_cond(t):
        raise NotInFamilyError("conditional term nested inside a sum or product")
    if isinstance(t, Sum):
        if _only_sums_of_basics(t):
            return "sum"
        return "poly"
    if isinstance(t, Prod):
        if isinstance(t.left, Basic) and isinstance(t.right, Basic):
            return "quadprod"
        return "poly"
    raise TypeError(f"not a Term: {t!r}")


def _only_sums_of_basics(t: Term) -> bool:
    if isinstance(t, Basic):
        return True
    if isinstance(t, Sum):
        return _only_sums_of_basics(t.left) and _only_sums_of_basics(t.right)
    return False


def _atom_tags(a: AtomicConstraint) -> set:
    """Set of language tags whose grammar generates the atom."""
    if isinstance(a, Indep):
        return {LanguageTag.IND}
    if isinstance(a, ConfirmGeq):
        return {LanguageTag.CONFIRM, LanguageTag.COND}
    if isinstance(a, (Geq, Gt, Eq)):
        ls, rs = _term_shape(a.lhs), _term_shape(a.rhs)
        shapes = {ls, rs}
        if shapes == {"basic"}:
            # bare comparisons also read as conditioned on T (cond) and as
            # degree-one products (quad); both are standard abbreviations
            tags = {LanguageTag.COMP, LanguageTag.ADD, LanguageTag.POLY,
                    LanguageTag.QUAD, LanguageTag.COND}
            if isinstance(a, Eq):
                # equality between bare terms is primitive in ind and confirm
                tags |= {LanguageTag.IND, LanguageTag.CONFIRM}
            return tags
        if "cond" in shapes:
            if shapes == {"cond"}:
                tags = {LanguageTag.COND}
                if _same_condition(a):
                    tags.add(LanguageTag.SAME_COND)
                return tags
            # mixed Cond/Basic comparison: read the bare side as conditioned
            # on Top; confirmation shapes are detected at parse time.
            if "basic" in shapes:
                return {LanguageTag.COND}
            raise NotInFamilyError("conditional term compared with a compound term")
        if shapes <= {"basic", "sum"}:
            return {LanguageTag.ADD, LanguageTag.POLY}
        if shapes <= {"basic", "quadprod"}:
            return {LanguageTag.QUAD, LanguageTag.POLY}
        return {LanguageTag.POLY}
    raise TypeError(f"not an atom: {a!r}")


def _same_condition(a) -> bool:
    return (isinstance(a.lhs, Cond) and isinstance(a.rhs, Cond)
            and a.lhs.given == a.rhs.given)


def classify(f: Formula) -> LanguageTag:
    """Least fragment whose grammar generates f.

    Ties between incomparable fragments (e.g. an equality of bare terms lies
    in both comp and ind) resolve toward the more qualitative tag.
    """
    candidates = None
    for a in atoms_of(f):
        tags = _atom_tags(a)
        candidates = tags if candidates is None else candidates & tags
    if candidates is None:
        raise NotInFamilyError("formula has no atoms")
    if not candidates:
        raise NotInFamilyError("atoms do not fit a common language")
    minimal = [t for t in candidates if not any(u != t and u <= t for u in candidates)]
    for t in _CANONICAL:
        if t in minimal:
            return t
    raise NotInFamilyError("no minimal tag")  # pragma: no cover


# ---------------------------------------------------------------------------
# Lexer / parser

_TWO_CHAR = ("&&", "||", "=>", ">=", "|:")
_ONE_CHAR = "()&|~!>=+*,"


class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR:
            toks.append((two, i))
            i += 2
            continue
        if c in _ONE_CHAR:
            toks.append((c, i))
            i += 1
            continue
        if c.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("ident", text[i:j], i))
            i = j
            continue
        if c in "01":
            toks.append(("const", c, i))
            i += 1
            continue
        raise ParseError(f"unknown token {c!r}", i)
    toks.append(("eof", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def kind(self):
        return self.toks[self.k][0]

    def pos(self):
        return self.toks[self.k][-1]

    def take(self, kind=None):
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[-1])
        self.k += 1
        return tok

    # formula := implication (right assoc on =>)
    def formula(self):
        lhs = self.f_or()
        if self.kind() == "=>":
            self.take()
            return FImplies(lhs, self.formula())
        return lhs

    def f_or(self):
        out = self.f_and()
        while self.kind() == "||":
            self.take()
            out = FOr(out, self.f_and())
        return out

    def f_and(self):
        out = self.f_not()
        while self.kind() == "&&":
            self.take()
            out = FAnd(out, self.f_not())
        return out

    def f_not(self):
        if self.kind() == "!":
            self.take()
            return FNot(self.f_not())
        return self.f_atom()

    def f_atom(self):
        if self.kind() == "(":
            # could open a parenthesized formula or a parenthesized term;
            # try formula first, fall back to a comparison
            save = self.k
            try:
                self.take("(")
                f = self.formula()
                self.take(")")
                if self.kind() in (">=", ">", "=", "+", "*"):
                    raise ParseError("term context", self.pos())
                return f
            except ParseError:
                self.k = save
        if self.kind() == "ident" and self.peek()[1] == "indep":
            self.take()
            self.take("(")
            a = self.bool_expr()
            self.take(",")
            b = self.bool_expr()
            self.take(")")
            return Atom(Indep(a, b))
        lhs = self.term()
        op = self.kind()
        if op not in (">=", ">", "="):
            raise ParseError("expected a comparison operator", self.pos())
        self.take()
        rhs = self.term()
        return Atom(_make_comparison(op, lhs, rhs))

    # term := sum of products
    def term(self):
        out = self.t_prod()
        while self.kind() == "+":
            self.take()
            out = Sum(out, self.t_prod())
        return out

    def t_prod(self):
        out = self.t_atom()
        while self.kind() == "*":
            self.take()
            out = Prod(out, self.t_atom())
        return out

    def t_atom(self):
        if self.kind() == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        if self.kind() == "const":
            tok = self.take()
            return ZERO if tok[1] == "0" else ONE
        tok = self.peek()
        if tok[0] == "ident" and tok[1] == "P":
            self.take()
            self.take("(")
            target = self.bool_expr()
            if self.kind() == "|:":
                self.take()
                given = self.bool_expr()
                self.take(")")
                return Cond(target, given)
            self.take(")")
            return Basic(target)
        raise ParseError("expected a probability term", self.pos())

    # bool := disjunction of conjunctions of negations
    def bool_expr(self):
        out = self.b_and()
        while self.kind() == "|":
            self.take()
            out = Or(out, self.b_and())
        return out

    def b_and(self):
        out = self.b_not()
        while self.kind() == "&":
            self.take()
            out = And(out, self.b_not())
        return out

    def b_not(self):
        if self.kind() == "~":
            self.take()
            return Not(self.b_not())
        return self.b_atom()

    def b_atom(self):
        if self.kind() == "(":
            self.take()
            e = self.bool_expr()
            self.take(")")
            return e
        tok = self.peek()
        if tok[0] == "ident":
            name = tok[1]
            self.take()
            if name == "T":
                return TOP
            if name == "F":
                return BOT
            return Letter(name)
        raise ParseError("expected a Boolean expression", self.pos())


def _make_comparison(op, lhs, rhs) -> AtomicConstraint:
    # canonicalize the two confirmation shapes so classify sees them
    if op == ">=":
        if isinstance(lhs, Cond) and rhs == Basic(lhs.target):
            return ConfirmGeq(lhs.target, lhs.given, COND_OVER_UNCOND)
        if isinstance(rhs, Cond) and lhs == Basic(rhs.target):
            return ConfirmGeq(rhs.target, rhs.given, UNCOND_OVER_COND)
        return Geq(lhs, rhs)
    if op == ">":
        return Gt(lhs, rhs)
    return Eq(lhs, rhs)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.kind() != "eof":
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return f


def parse_bool(text: str) -> BoolExpr:
    p = _Parser(text)
    e = p.bool_expr()
    if p.kind() != "eof":
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return e


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.kind() != "eof":
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return t


# ---------------------------------------------------------------------------
# Rendering (inverse of the parser under the stated precedences)

_B_PREC = {"or": 1, "and": 2, "not": 3, "atom": 4}


def render_bool(e: BoolExpr, prec=0) -> str:
    if isinstance(e, Letter):
        return e.name
    if isinstance(e, Top):
        return "T"
    if isinstance(e, Bot):
        return "F"
    if isinstance(e, Not):
        s = "~" + render_bool(e.arg, _B_PREC["not"])
        return s if prec <= _B_PREC["not"] else f"({s})"
    if isinstance(e, And):
        s = f"{render_bool(e.left, _B_PREC['and'])} & {render_bool(e.right, _B_PREC['and'] + 1)}"
        return s if prec <= _B_PREC["and"] else f"({s})"
    if isinstance(e, Or):
        s = f"{render_bool(e.left, _B_PREC['or'])} | {render_bool(e.right, _B_PREC['or'] + 1)}"
        return s if prec <= _B_PREC["or"] else f"({s})"
    raise TypeError(f"not a BoolExpr: {e!r}")


def render_term(t: Term, prec=0) -> str:
    if isinstance(t, Basic):
        return f"P({render_bool(t.expr)})"
    if isinstance(t, Cond):
        return f"P({render_bool(t.target)} |: {render_bool(t.given)})"
    if isinstance(t, Sum):
        s = f"{render_term(t.left, 1)} + {render_term(t.right, 2)}"
        return s if prec <= 1 else f"({s})"
    if isinstance(t, Prod):
        s = f"{render_term(t.left, 2)} * {render_term(t.right, 3)}"
        return s if prec <= 2 else f"({s})"
    raise TypeError(f"not a Term: {t!r}")


def render_atom(a: AtomicConstraint) -> str:
    if isinstance(a, Geq):
        return f"{render_term(a.lhs)} >= {render_term(a.rhs)}"
    if isinstance(a, Gt):
        return f"{render_term(a.lhs)} > {render_term(a.rhs)}"
    if isinstance(a, Eq):
        return f"{render_term(a.lhs)} = {render_term(a.rhs)}"
    if isinstance(a, Indep):
        return f"indep({render_bool(a.left)}, {render_bool(a.right)})"
    if isinstance(a, ConfirmGeq):
        cond = render_term(Cond(a.target, a.evidence))
        bare = render_term(Basic(a.target))
        if a.direction == COND_OVER_UNCOND:
            return f"{cond} >= {bare}"
        return f"{bare} >= {cond}"
    raise TypeError(f"not an atom: {a!r}")


_F_PREC = {"implies": 1, "or": 2, "and": 3, "not": 4}


def render(f: Formula, prec=0) -> str:
    if isinstance(f, Atom):
        return render_atom(f.atom)
    if isinstance(f, FNot):
        s = "!" + render(f.arg, _F_PREC["not"])
        return s if prec <= _F_PREC["not"] else f"({s})"
    if isinstance(f, FAnd):
        s = f"{render(f.left, _F_PREC['and'])} && {render(f.right, _F_PREC['and'] + 1)}"
        return s if prec <= _F_PREC["and"] else f"({s})"
    if isinstance(f, FOr):
        s = f"{render(f.left, _F_PREC['or'])} || {render(f.right, _F_PREC['or'] + 1)}"
        return s if prec <= _F_PREC["or"] else f"({s})"
    if isinstance(f, FImplies):
        s = f"{render(f.left, _F_PREC['implies'] + 1)} => {render(f.right, _F_PREC['implies'])}"
        return s if prec <= _F_PREC["implies"] else f"({s})"
    raise TypeError(f"not a Formula: {f!r}")


# ---------------------------------------------------------------------------
# Hierarchy embeddings (used to property-test that classify respects the
# expressivity order: a formula classified at t can be regenerated at t' >= t)


def _embed_atom(a: AtomicConstraint, target: LanguageTag) -> AtomicConstraint:
    def to_cond(t):
        return t if isinstance(t, Cond) else Cond(t.expr, TOP)

    def cross_mult(lhs: Cond, rhs: Cond):
        return (Prod(Basic(And(lhs.target, lhs.given)), Basic(rhs.given)),
                Prod(Basic(And(rhs.target, rhs.given)), Basic(lhs.given)))

    if isinstance(a, Indep):
        # alpha independent of beta <-> P(alpha|beta) ~ P(alpha)
        if target == LanguageTag.IND:
            return a
        if target == LanguageTag.CONFIRM:
            raise _NeedsConjunction(
                [ConfirmGeq(a.left, a.right, COND_OVER_UNCOND),
                 ConfirmGeq(a.left, a.right, UNCOND_OVER_COND)])
        if target == LanguageTag.COND:
            return Eq(Cond(a.left, a.right), Cond(a.left, TOP))
        a = Eq(Prod(Basic(a.left), Basic(a.right)), Basic(And(a.left, a.right)))
        return a
    if isinstance(a, ConfirmGeq):
        if target in (LanguageTag.CONFIRM,):
            return a
        lhs = Cond(a.target, a.evidence)
        rhs = Cond(a.target, TOP)
        if a.direction == UNCOND_OVER_COND:
            lhs, rhs = rhs, lhs
        if target in (LanguageTag.COND, LanguageTag.SAME_COND):
            return Geq(lhs, rhs)
        l, r = cross_mult(lhs, rhs)
        return Geq(l, r)
    if isinstance(a, (Geq, Gt, Eq)):
        kind = type(a)
        if isinstance(a.lhs, Cond) or isinstance(a.rhs, Cond):
            if target in (LanguageTag.COND, LanguageTag.SAME_COND):
                return kind(to_cond(a.lhs), to_cond(a.rhs))
            l, r = cross_mult(to_cond(a.lhs), to_cond(a.rhs))
            return kind(l, r)
        if target == LanguageTag.COND:
            if _term_shape(a.lhs) == "basic" and _term_shape(a.rhs) == "basic":
                return kind(to_cond(a.lhs), to_cond(a.rhs))
        if target == LanguageTag.QUAD:
            def lift(t):
                return Prod(t, ONE) if isinstance(t, Basic) else t
            if _term_shape(a.lhs) in ("basic", "quadprod") and \
               _term_shape(a.rhs) in ("basic", "quadprod"):
                return kind(lift(a.lhs), lift(a.rhs))
        return a
    raise TypeError(f"not an atom: {a!r}")


class _NeedsConjunction(Exception):
    def __init__(self, atoms):
        self.atoms = atoms


def embed(f: Formula, target: LanguageTag) -> Formula:
    """Rewrite f into an equivalent formula generable at `target`.

    Only defined along the hierarchy: classify(f) <= target required.
    """
    if not classify(f) <= target:
        raise NotInFamilyError(f"cannot embed {classify(f)} into {target}")
    if isinstance(f, Atom):
        try:
            return Atom(_embed_atom(f.atom, target))
        except _NeedsConjunction as nc:
            return fand([Atom(x) for x in nc.atoms])
    if isinstance(f, FNot):
        return FNot(embed(f.arg, target))
    if isinstance(f, FAnd):
        return FAnd(embed(f.left, target), embed(f.right, target))
    if isinstance(f, FOr):
        return FOr(embed(f.left, target), embed(f.right, target))
    if isinstance(f, FImplies):
        return FImplies(embed(f.left, target), embed(f.right, target))
    raise TypeError(f"not a Formula: {f!r}")
