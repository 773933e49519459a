"""Desk-scale decision machinery for polynomial constraint systems.

Verdicts are honest: a satisfiability claim is either exact (rational
witness, re-verified) or numeric (residuals within tolerance, margins on
strict constraints); an unsatisfiability claim always carries evidence
that replays independently (a linear elimination trace, an interval
prune tree, or a Positivstellensatz certificate).  Budget exhaustion
yields Unknown, never a guess.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .linsolve import LinSat, LinUnsat, lin_sat
from .normalize import (EQ, GE, GT, NE, LinSystem, PolyConstraint, PolySystem,
                        dnf, expand, lin_constraint)
from .polynomial import Polynomial
from .syntax import Formula, MULTIPLICATIVE_TAGS, classify, free_letters


@dataclass
class SolverConfig:
    max_denom: int = 64
    bp_depth: int = 24
    bp_nodes: int = 4000
    numeric_restarts: int = 8
    tolerance: float = 1e-9
    psatz_degree: int = 3
    psatz_factors: int = 3
    psatz_power: int = 1
    seed: int = 0
    rational_budget: int = 4000


DEFAULT_CONFIG = SolverConfig()


# ---------------------------------------------------------------------------
# Exact rational interval arithmetic


def _imul(a, b):
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(products), max(products))


def _ipow(iv, e):
    if e == 0:
        return (Fraction(1), Fraction(1))
    out = iv
    for _ in range(e - 1):
        out = _imul(out, iv)
    # even powers of an interval straddling zero still bound below by zero
    if e % 2 == 0 and iv[0] < 0 < iv[1]:
        out = (Fraction(0), out[1])
    return out


def _iadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _iscale(iv, c):
    return (iv[0] * c, iv[1] * c) if c >= 0 else (iv[1] * c, iv[0] * c)


def _naive_range(poly: Polynomial, box):
    out = (Fraction(0), Fraction(0))
    for mono, coeff in poly.terms.items():
        t = (Fraction(1), Fraction(1))
        for v, e in mono:
            t = _imul(t, _ipow(box[v], e))
        out = _iadd(out, _iscale(t, coeff))
    return out


def _horner_range(poly: Polynomial, box):
    vs = sorted(poly.variables())
    if not vs:
        c = poly.constant_term()
        return (c, c)
    v = vs[0]
    levels = poly.by_powers_of(v)  # descending powers
    acc = None
    prev_e = None
    for e, coeff_poly in levels:
        c_iv = _horner_range(coeff_poly, box)
        if acc is None:
            acc = c_iv
        else:
            acc = _iadd(_imul(acc, _ipow(box[v], prev_e - e)), c_iv)
        prev_e = e
    if prev_e:
        acc = _imul(acc, _ipow(box[v], prev_e))
    return acc


def interval_eval(poly: Polynomial, box) -> tuple:
    """Sound enclosure of the polynomial's range over the box."""
    a = _naive_range(poly, box)
    b = _horner_range(poly, box)
    return (max(a[0], b[0]), min(a[1], b[1]))


def _constraint_infeasible(c: PolyConstraint, box) -> bool:
    lo, hi = interval_eval(c.poly, box)
    if c.rel == EQ:
        return lo > 0 or hi < 0
    if c.rel == GE:
        return hi < 0
    if c.rel == GT:
        return hi <= 0
    if c.rel == NE:
        return lo == 0 and hi == 0
    raise ValueError(c.rel)


# ---------------------------------------------------------------------------
# Branch and prune


@dataclass
class PruneTree:
    box: list
    pruned_by: int | None = None     # violated constraint index at a leaf
    split_var: int | None = None
    children: list = field(default_factory=list)
    unknown: bool = False

    def all_pruned(self) -> bool:
        if self.pruned_by is not None:
            return True
        if self.unknown:
            return False
        return bool(self.children) and all(c.all_pruned() for c in self.children)

    def unknown_boxes(self) -> list:
        if self.pruned_by is not None:
            return []
        if self.unknown:
            return [self.box]
        out = []
        for c in self.children:
            out.extend(c.unknown_boxes())
        return out

    def to_dict(self) -> dict:
        d = {"box": [[str(l), str(h)] for l, h in self.box]}
        if self.pruned_by is not None:
            d["pruned_by"] = self.pruned_by
        elif self.unknown:
            d["unknown"] = True
        else:
            d["split_var"] = self.split_var
            d["children"] = [c.to_dict() for c in self.children]
        return d

    def render(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class BpUnsat:
    tree: PruneTree


@dataclass
class BpUnknown:
    tree: PruneTree
    hint_boxes: list


def branch_and_prune(s: PolySystem, depth_budget=None, node_budget=None,
                     config: SolverConfig = DEFAULT_CONFIG):
    """Certified UNSAT by exhaustive interval pruning, else Unknown + hints.

    A strict constraint prunes a box when its enclosure's upper end is
    <= 0 (no point of the box can satisfy it); this is sound and covers
    infeasibilities the plain closure relaxation would miss.
    """
    depth_budget = config.bp_depth if depth_budget is None else depth_budget
    node_budget = config.bp_nodes if node_budget is None else node_budget
    budget = {"nodes": node_budget}

    def explore(box, depth):
        if budget["nodes"] <= 0:
            return PruneTree(box, unknown=True)
        budget["nodes"] -= 1
        for i, c in enumerate(s.constraints):
            if _constraint_infeasible(c, box):
                return PruneTree(box, pruned_by=i)
        if depth >= depth_budget:
            return PruneTree(box, unknown=True)
        widths = [h - l for l, h in box]
        v = max(range(len(box)), key=lambda i: (widths[i], -i))
        if widths[v] == 0:
            return PruneTree(box, unknown=True)
        mid = (box[v][0] + box[v][1]) / 2
        left = list(box)
        right = list(box)
        left[v] = (box[v][0], mid)
        right[v] = (mid, box[v][1])
        node = PruneTree(box, split_var=v)
        node.children = [explore(left, depth + 1), explore(right, depth + 1)]
        return node

    root_box = [tuple(map(Fraction, b)) for b in s.var_bounds()]
    tree = explore(root_box, 0)
    if tree.all_pruned():
        return BpUnsat(tree)
    return BpUnknown(tree, tree.unknown_boxes())


def replay_prune_tree(s: PolySystem, tree: PruneTree) -> bool:
    """Independent check that a prune tree witnesses infeasibility."""
    if tree.pruned_by is not None:
        return _constraint_infeasible(s.constraints[tree.pruned_by], tree.box)
    if tree.unknown or not tree.children:
        return False
    v = tree.split_var
    lo, hi = tree.box[v]
    left, right = tree.children
    mid = (lo + hi) / 2
    if left.box[v] != (lo, mid) or right.box[v] != (mid, hi):
        return False
    for child in (left, right):
        for w in range(len(tree.box)):
            if w != v and child.box[w] != tree.box[w]:
                return False
    return replay_prune_tree(s, left) and replay_prune_tree(s, right)


# ---------------------------------------------------------------------------
# Rational witness search


def _violation(s: PolySystem, point):
    """(total slack violation, count of strict/ne constraints at boundary)."""
    total = Fraction(0)
    boundary = 0
    for c in s.constraints:
        v = c.poly.evaluate(point)
        if c.rel == EQ:
            total += abs(v)
        elif c.rel == GE:
            if v < 0:
                total += -v
        elif c.rel == GT:
            if v < 0:
                total += -v
            elif v == 0:
                boundary += 1
        elif c.rel == NE:
            if v == 0:
                boundary += 1
    return (total, boundary)


def _is_simplex_system(s: PolySystem) -> bool:
    if s.bounds is not None:
        return False
    target = sum((Polynomial.variable(i) for i in range(s.n_vars)),
                 Polynomial()) - 1
    return any(c.rel == EQ and c.poly == target for c in s.constraints)


def _simplex_candidates(n, budget):
    seen = set()
    for q in (1, 2, 3, 4, 6, 8):
        if len(seen) >= budget:
            break
        for comp in _compositions(q, n):
            pt = tuple(Fraction(k, q) for k in comp)
            if pt not in seen:
                seen.add(pt)
                if len(seen) >= budget:
                    break
    return [dict(enumerate(pt)) for pt in seen]


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _box_candidates(bounds, budget):
    n = len(bounds)
    out = []
    for q in (1, 2, 3, 4, 6):
        axes = []
        for lo, hi in bounds:
            axes.append(sorted({lo + Fraction(j, q) * (hi - lo)
                                for j in range(q + 1)}))
        count = 1
        for a in axes:
            count *= len(a)
        if count > budget and out:
            break
        for pt in itertools.product(*axes):
            out.append(dict(enumerate(pt)))
            if len(out) >= budget:
                return out
    return out


_STEPS = [Fraction(1, q) for q in (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)]


def _hill_climb(s: PolySystem, point, bounds, simplex, max_denom, budget):
    score = _violation(s, point)
    evals = 0
    improved = True
    while improved and score != (0, 0) and evals < budget:
        improved = False
        for step in _STEPS:
            if step.denominator > max_denom:
                break
            moves = []
            if simplex:
                for i in range(s.n_vars):
                    for j in range(s.n_vars):
                        if i != j and point[i] >= step and \
                                point[j] + step <= bounds[j][1]:
                            moves.append((i, -step, j, step))
            else:
                for i in range(s.n_vars):
                    if point[i] + step <= bounds[i][1]:
                        moves.append((i, step, None, None))
                    if point[i] - step >= bounds[i][0]:
                        moves.append((i, -step, None, None))
            for i, di, j, dj in moves:
                trial = dict(point)
                trial[i] += di
                if j is not None:
                    trial[j] += dj
                evals += 1
                sc = _violation(s, trial)
                if sc < score:
                    point, score = trial, sc
                    improved = True
                    break
                if evals >= budget:
                    break
            if improved or evals >= budget:
                break
    return point, score


def search_rational(s: PolySystem, config: SolverConfig = DEFAULT_CONFIG):
    """Exact witness search: coarse grid plus unit-fraction hill-climbing."""
    bounds = [tuple(map(Fraction, b)) for b in s.var_bounds()]
    simplex = _is_simplex_system(s)
    if s.n_vars == 0:
        pt = {}
        return pt if _violation(s, pt) == (0, 0) else None
    if simplex:
        candidates = _simplex_candidates(s.n_vars, config.rational_budget)
    else:
        candidates = _box_candidates(bounds, config.rational_budget)
    if not candidates:
        return None
    scored = sorted(((_violation(s, p), k) for k, p in enumerate(candidates)))
    for sc, k in scored[:3]:
        if sc == (0, 0):
            return candidates[k]
        point, score = _hill_climb(s, candidates[k], bounds, simplex,
                                   config.max_denom, config.rational_budget)
        if score == (0, 0):
            return point
    return None


# ---------------------------------------------------------------------------
# Numeric search (penalty least-squares with deterministic restarts)


def _compile_system(s: PolySystem):
    rows = []
    for c in s.constraints:
        terms = [(float(coeff), mono) for mono, coeff in c.poly.terms.items()]
        rows.append((terms, c.rel))
    return rows


def _residuals(rows, x, margin):
    out = []
    for terms, rel in rows:
        v = 0.0
        for coeff, mono in terms:
            t = coeff
            for var, e in mono:
                t *= x[var] ** e
            v += t
        if rel == EQ:
            out.append(v)
        elif rel == GE:
            out.append(min(v, 0.0))
        elif rel == GT:
            out.append(min(v - margin, 0.0))
        elif rel == NE:
            out.append(max(0.0, margin - abs(v)))
    return out


def search_numeric(s: PolySystem, seeds=None, config: SolverConfig = DEFAULT_CONFIG):
    """Float witness by penalty least-squares; verified against `tolerance`."""
    import numpy as np
    from scipy.optimize import least_squares

    if s.n_vars == 0:
        return None
    rows = _compile_system(s)
    bounds = s.var_bounds()
    lo = np.array([float(b[0]) for b in bounds])
    hi = np.array([float(b[1]) for b in bounds])
    margin = max(config.tolerance * 100, 1e-7)

    rng = np.random.default_rng(config.seed)
    starts = []
    if seeds:
        starts.extend(np.clip(np.array(p, dtype=float), lo, hi) for p in seeds)
    starts.append((lo + hi) / 2)
    for _ in range(config.numeric_restarts):
        starts.append(lo + rng.random(s.n_vars) * (hi - lo))

    best = None
    for start in starts:
        res = least_squares(lambda x: _residuals(rows, x, margin), start,
                            bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=400)
        x = res.x
        rmax = _max_violation(rows, x, config.tolerance)
        if rmax is not None and (best is None or rmax < best[1]):
            best = (x, rmax)
            if rmax <= config.tolerance:
                break
    if best is None:
        return None
    x, rmax = best
    if rmax > config.tolerance:
        return None
    return {i: float(xi) for i, xi in enumerate(x)}, rmax


def _max_violation(rows, x, tol):
    """Max nonstrict violation, or None if a strict margin fails."""
    worst = 0.0
    for terms, rel in rows:
        v = 0.0
        for coeff, mono in terms:
            t = coeff
            for var, e in mono:
                t *= x[var] ** e
            v += t
        if rel == EQ:
            worst = max(worst, abs(v))
        elif rel == GE:
            worst = max(worst, -v)
        elif rel == GT:
            if v < tol:
                return None
        elif rel == NE:
            if abs(v) < tol:
                return None
    return worst


# ---------------------------------------------------------------------------
# Verdicts and the per-system pipeline


@dataclass
class SatRational:
    assignment: dict          # var -> Fraction
    model: object = None      # filled by sat_multiplicative

    @property
    def kind(self):
        return "sat-rational"


@dataclass
class SatNumeric:
    assignment: dict          # var -> float
    residual: float
    var_names: list = None

    @property
    def kind(self):
        return "sat-numeric"


@dataclass
class UnsatCertified:
    evidence: list            # (label, payload) pairs, one per disjunct

    @property
    def kind(self):
        return "unsat"


@dataclass
class Unknown:
    report: str

    @property
    def kind(self):
        return "unknown"


def _scalar_pair_contradiction(s: PolySystem):
    """Find rows (i, j) with poly_j == c * poly_i whose relations conflict.

    Catches equality-vs-strict and opposed-strict contradictions that
    interval pruning cannot certify (the closure stays feasible).
    Returns (i, j, c) or None; replayable by re-checking the identity.
    """
    rows = [(c.poly, c.rel) for c in s.constraints]
    for i, (p, rel_i) in enumerate(rows):
        if not p:
            continue
        lead, lead_c = next(iter(sorted(p.terms.items())))
        for j, (q, rel_j) in enumerate(rows):
            if i == j or not q:
                continue
            c = q.terms.get(lead)
            if c is None:
                continue
            c = c / lead_c
            if q != p * c:
                continue
            if rel_i == EQ and rel_j in (GT, NE):
                return (i, j, c)
            if c < 0 and rel_j == GT and rel_i in (GE, GT):
                return (i, j, c)
    return None


def _linear_subsystem(s: PolySystem):
    rows = []
    for c in s.constraints:
        if c.rel != NE and c.poly.is_linear():
            coeffs, const = c.poly.linear_parts()
            rows.append(lin_constraint(coeffs, c.rel, -const))
    for v, (lo, hi) in enumerate(s.var_bounds()):
        rows.append(lin_constraint({v: 1}, GE, lo))
        rows.append(lin_constraint({v: -1}, GE, -hi))
    return LinSystem(s.n_vars, rows, s.var_names)


def solve_system(s, config: SolverConfig = DEFAULT_CONFIG):
    """Pipeline for one constraint system; returns a PolyVerdict."""
    if isinstance(s, LinSystem):
        res = lin_sat(s)
        if res.is_sat:
            return SatRational(res.witness)
        return UnsatCertified([("linear", res.trace)])

    # contradictions among the linear rows (e.g. an equality against a
    # strict inequality) are decided exactly before any interval work
    lin_part = _linear_subsystem(s)
    lin_res = lin_sat(lin_part)
    if not lin_res.is_sat:
        return UnsatCertified([("linear", lin_res.trace)])
    pair = _scalar_pair_contradiction(s)
    if pair is not None:
        return UnsatCertified([("pair", pair)])

    point = search_rational(s, config)
    if point is not None:
        return SatRational(point)

    # cheap prune pass first; the full budget only runs when numeric search
    # fails, so satisfiable systems do not pay for exhaustive pruning
    bp = branch_and_prune(s, depth_budget=min(config.bp_depth, 10),
                          node_budget=min(config.bp_nodes, 300), config=config)
    if isinstance(bp, BpUnsat):
        return UnsatCertified([("prune", bp.tree)])

    seeds = [[float((l + h) / 2) for l, h in box] for box in bp.hint_boxes[:4]]
    seeds.append([float(lin_res.witness.get(i, 0)) for i in range(s.n_vars)])
    numeric = search_numeric(s, seeds, config)
    if numeric is not None:
        x, rmax = numeric
        exact = {v: Fraction(xv).limit_denominator(config.max_denom)
                 for v, xv in x.items()}
        if s.holds(exact):
            return SatRational(exact)
        return SatNumeric(x, rmax, s.var_names)

    bp = branch_and_prune(s, config=config)
    if isinstance(bp, BpUnsat):
        return UnsatCertified([("prune", bp.tree)])
    return Unknown("search and prune budgets exhausted")


class WrongFragmentError(ValueError):
    pass


def sat_multiplicative(f: Formula, config: SolverConfig = DEFAULT_CONFIG):
    """Disjunct-wise pipeline; first conclusive verdict by fixed priority."""
    from .semantics import Model, satisfies

    if classify(f) not in MULTIPLICATIVE_TAGS:
        raise WrongFragmentError(f"{classify(f)} is not a multiplicative fragment")
    letters = tuple(free_letters(f))
    evidence = []
    numeric = None
    unknown = False
    for conjunct in dnf(f):
        system = expand(conjunct, letters)
        verdict = solve_system(system, config)
        if isinstance(verdict, SatRational):
            model = Model.from_state_weights(letters, verdict.assignment)
            if not satisfies(model, f):
                raise AssertionError("rational witness failed re-verification")
            verdict.model = model
            return verdict
        if isinstance(verdict, SatNumeric):
            if numeric is None:
                numeric = verdict
        elif isinstance(verdict, UnsatCertified):
            evidence.extend(verdict.evidence)
        else:
            unknown = True
    if numeric is not None:
        return numeric
    if unknown:
        return Unknown("some disjunct exhausted its budgets")
    return UnsatCertified(evidence)


# ---------------------------------------------------------------------------
# Positivstellensatz certificates


@dataclass
class PsatzCertificate:
    """Witness of g + h + scale * (prod F)^(2*power) = 0.

    cone terms: (coefficient >= 0, tuple of G indices, square-root monomial)
      contributing coefficient * square^2 * prod(G[i]).
    ideal terms: (multiplier polynomial, H index).
    """

    cone: list
    ideal: list
    power: int
    scale: Fraction

    def to_dict(self):
        return {
            "cone": [[str(c), list(gs), sq.render()] for c, gs, sq in self.cone],
            "ideal": [[mult.render(), h] for mult, h in self.ideal],
            "power": self.power,
            "scale": str(self.scale),
        }

    def render(self):
        return json.dumps(self.to_dict(), indent=2)


class MalformedCertificate(ValueError):
    pass


def system_to_psatz(s: PolySystem):
    """Translate a system into the (F, G, H) sets of the certificate setup.

    Equalities go to H, weak inequalities to G; a strict row contributes
    its closure to G and its polynomial to F (nonvanishing).
    """
    F, G, H = [], [], []
    constraints = s.constraints
    if isinstance(s, LinSystem):
        constraints = []
        for c in s.constraints:
            poly = Polynomial({((v, 1),): k for v, k in c.coeffs}) - c.rhs
            constraints.append(PolyConstraint(poly, c.rel))
        s = PolySystem(s.n_vars, constraints, s.var_names)
    for c in s.constraints:
        if c.rel == EQ:
            H.append(c.poly)
        elif c.rel == GE:
            G.append(c.poly)
        elif c.rel == GT:
            G.append(c.poly)
            F.append(c.poly)
        elif c.rel == NE:
            F.append(c.poly)
    return F, G, H


def _product(polys):
    out = Polynomial.constant(1)
    for p in polys:
        out = out * p
    return out


def psatz_verify(cert: PsatzCertificate, F, G, H) -> bool:
    """Exact check of the certificate identity g + h + scale*f^(2n) = 0."""
    if cert.scale <= 0 or cert.power < 0:
        raise MalformedCertificate("scale must be positive, power nonnegative")
    total = Polynomial()
    for coeff, g_indices, square in cert.cone:
        coeff = Fraction(coeff)
        if coeff < 0:
            raise MalformedCertificate("cone coefficients must be nonnegative")
        for i in g_indices:
            if not 0 <= i < len(G):
                raise MalformedCertificate(f"bad G index {i}")
        term = Polynomial.constant(coeff) * (square * square)
        term = term * _product(G[i] for i in g_indices)
        total = total + term
    for mult, h_index in cert.ideal:
        if not 0 <= h_index < len(H):
            raise MalformedCertificate(f"bad H index {h_index}")
        total = total + mult * H[h_index]
    f = _product(F)
    total = total + Polynomial.constant(cert.scale) * f ** (2 * cert.power)
    return not total


def _monomials_upto(variables, degree):
    variables = sorted(variables)
    out = [()]
    for _ in range(degree):
        new = set()
        for m in out:
            for v in variables:
                new.add(tuple(sorted(_merge(m, v))))
        out = list(set(out) | new)
    return sorted(set(out))


def _merge(mono, v):
    d = dict(mono)
    d[v] = d.get(v, 0) + 1
    return d.items()


def _mono_poly(mono):
    return Polynomial({tuple(mono): Fraction(1)})


def psatz_search(F, G, H, d_max=None, k_max=None, n_max=None,
                 config: SolverConfig = DEFAULT_CONFIG):
    """Search a restricted certificate class by exact linear fitting.

    Cone atoms are products of at most k_max G-members times squares of
    monomials of degree <= d_max; ideal multipliers are monomials of
    degree <= d_max with free-sign coefficients.  Feasible coefficient
    fits come from an LP relaxation and are re-solved exactly; every
    returned certificate passes psatz_verify.  The full cone needs sums
    of general squares, so a None here is not an infeasibility proof.
    """
    d_max = config.psatz_degree if d_max is None else d_max
    k_max = config.psatz_factors if k_max is None else k_max
    n_max = config.psatz_power if n_max is None else n_max

    variables = set()
    for p in list(F) + list(G) + list(H):
        variables |= p.variables()
    f = _product(F)

    for power in range(0, n_max + 1):
        target = Polynomial.constant(1) * f ** (2 * power)
        if not F and power > 0:
            break
        for k in range(0, k_max + 1):
            for d in range(0, d_max + 1):
                cert = _fit_certificate(G, H, target, variables, k, d, power)
                if cert is not None and psatz_verify(cert, F, G, H):
                    return cert
    return None


def _cone_atoms(G, variables, k_max, d_max):
    atoms = []
    squares = [_mono_poly(m) for m in _monomials_upto(variables, d_max)]
    for size in range(0, k_max + 1):
        for combo in itertools.combinations_with_replacement(range(len(G)), size):
            base = _product(G[i] for i in combo)
            for sq in squares:
                poly = base * sq * sq
                if poly:
                    atoms.append((combo, sq, poly))
    # drop duplicate polynomials, keeping the syntactically smallest atom
    seen = {}
    for combo, sq, poly in atoms:
        key = frozenset(poly.terms.items())
        if key not in seen:
            seen[key] = (combo, sq, poly)
    return list(seen.values())


def _fit_certificate(G, H, target, variables, k_max, d_max, power):
    import numpy as np
    from scipy.optimize import linprog

    cone_atoms = _cone_atoms(G, variables, k_max, d_max)
    ideal_atoms = []
    for h_index in range(len(H)):
        for m in _monomials_upto(variables, d_max):
            ideal_atoms.append((h_index, _mono_poly(m), _mono_poly(m) * H[h_index]))
    if not cone_atoms and not ideal_atoms:
        return None

    monomials = set(target.terms)
    for _, _, p in cone_atoms:
        monomials |= set(p.terms)
    for _, _, p in ideal_atoms:
        monomials |= set(p.terms)
    monomials = sorted(monomials)
    row_of = {m: i for i, m in enumerate(monomials)}

    n_cone, n_ideal = len(cone_atoms), len(ideal_atoms)
    a_eq = np.zeros((len(monomials), n_cone + n_ideal))
    for j, (_, _, p) in enumerate(cone_atoms):
        for m, c in p.terms.items():
            a_eq[row_of[m], j] = float(c)
    for j, (_, _, p) in enumerate(ideal_atoms):
        for m, c in p.terms.items():
            a_eq[row_of[m], n_cone + j] = float(c)
    b_eq = np.zeros(len(monomials))
    for m, c in target.terms.items():
        b_eq[row_of[m]] = -float(c)

    bounds = [(0, None)] * n_cone + [(None, None)] * n_ideal
    res = linprog(np.ones(n_cone + n_ideal), A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if not res.success:
        return None

    support = [j for j in range(n_cone + n_ideal)
               if abs(res.x[j]) > 1e-9 or j >= n_cone]
    coeffs = _exact_fit(cone_atoms, ideal_atoms, target, monomials, support)
    if coeffs is None:
        # retry with the full column set
        coeffs = _exact_fit(cone_atoms, ideal_atoms, target, monomials,
                            list(range(n_cone + n_ideal)))
        if coeffs is None:
            return None
    cone = []
    ideal = []
    for j, val in coeffs.items():
        if not val:
            continue
        if j < len(cone_atoms):
            if val < 0:
                return None
            combo, sq, _ = cone_atoms[j]
            cone.append((val, combo, sq))
        else:
            h_index, mult, _ = ideal_atoms[j - len(cone_atoms)]
            ideal.append((mult * val, h_index))
    # merge ideal terms per H member
    merged = {}
    for mult, h_index in ideal:
        merged[h_index] = merged.get(h_index, Polynomial()) + mult
    ideal = [(p, h) for h, p in merged.items() if p]
    scale = 1
    for c, _, _ in cone:
        scale = _lcm(scale, Fraction(c).denominator)
    for p, _ in ideal:
        for coeff in p.terms.values():
            scale = _lcm(scale, coeff.denominator)
    cone = [(Fraction(c) * scale, combo, sq) for c, combo, sq in cone]
    ideal = [(p * scale, h) for p, h in ideal]
    return PsatzCertificate(cone, ideal, power, Fraction(scale))


def _lcm(a, b):
    from math import gcd

    return a * b // gcd(a, b)


def _exact_fit(cone_atoms, ideal_atoms, target, monomials, support):
    """Solve the equality system exactly on the given column support."""
    atoms = cone_atoms + ideal_atoms
    cols = [atoms[j][2] for j in support]
    rows = len(monomials)
    row_of = {m: i for i, m in enumerate(monomials)}
    a = [[Fraction(0)] * len(cols) for _ in range(rows)]
    for jj, p in enumerate(cols):
        for m, c in p.terms.items():
            a[row_of[m]][jj] = c
    b = [Fraction(0)] * rows
    for m, c in target.terms.items():
        b[row_of[m]] = -c

    # Gaussian elimination to a particular solution with free vars at zero
    pivots = []
    r = 0
    for col in range(len(cols)):
        pivot = next((i for i in range(r, rows) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        b[r], b[pivot] = b[pivot], b[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        b[r] = b[r] * inv
        for i in range(rows):
            if i != r and a[i][col]:
                factor = a[i][col]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
                b[i] = b[i] - factor * b[r]
        pivots.append((r, col))
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if b[i]:
            return None
    sol = {j: Fraction(0) for j in support}
    for row, col in pivots:
        sol[support[col]] = b[row]
    # validity (nonnegativity of cone coefficients) is checked by the caller
    return sol
