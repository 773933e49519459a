"""Random formula generation per fragment and an observational timing harness.

The harness records verdicts and wall time per instance; it asserts
nothing about asymptotics (the additive/multiplicative divide is shown,
not tested).
"""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass

from .syntax import (
    Atom, Basic, Cond, ConfirmGeq, Eq, FAnd, FNot, FOr, Formula, Geq, Gt,
    Indep, LanguageTag, Prod, Sum, COND_OVER_UNCOND, UNCOND_OVER_COND,
    classify,
)


def _letters(n):
    return [chr(ord("A") + i) for i in range(n)]


def _random_event(rng, letters, depth=2):
    from .axioms import random_bool

    return random_bool(rng, letters, depth)


def _random_sum(rng, letters, max_len=4):
    k = rng.randint(1, max_len)
    out = Basic(_random_event(rng, letters))
    for _ in range(k - 1):
        out = Sum(out, Basic(_random_event(rng, letters)))
    return out


def _random_poly_term(rng, letters, depth=2):
    if depth == 0 or rng.random() < 0.4:
        return Basic(_random_event(rng, letters))
    if rng.random() < 0.5:
        return Sum(_random_poly_term(rng, letters, depth - 1),
                   _random_poly_term(rng, letters, depth - 1))
    return Prod(_random_poly_term(rng, letters, depth - 1),
                _random_poly_term(rng, letters, depth - 1))


def _random_atom(rng, lang, letters):
    cmp_kind = rng.choice([Geq, Geq, Gt, Eq])
    if lang == LanguageTag.COMP:
        return cmp_kind(Basic(_random_event(rng, letters)),
                        Basic(_random_event(rng, letters)))
    if lang == LanguageTag.ADD:
        return cmp_kind(_random_sum(rng, letters), _random_sum(rng, letters))
    if lang == LanguageTag.IND:
        if rng.random() < 0.5:
            return Indep(_random_event(rng, letters),
                         _random_event(rng, letters))
        return Eq(Basic(_random_event(rng, letters)),
                  Basic(_random_event(rng, letters)))
    if lang == LanguageTag.CONFIRM:
        if rng.random() < 0.3:
            return Eq(Basic(_random_event(rng, letters)),
                      Basic(_random_event(rng, letters)))
        direction = rng.choice([COND_OVER_UNCOND, UNCOND_OVER_COND])
        return ConfirmGeq(_random_event(rng, letters),
                          _random_event(rng, letters), direction)
    if lang == LanguageTag.SAME_COND:
        given = _random_event(rng, letters)
        return cmp_kind(Cond(_random_event(rng, letters), given),
                        Cond(_random_event(rng, letters), given))
    if lang == LanguageTag.COND:
        return cmp_kind(Cond(_random_event(rng, letters),
                             _random_event(rng, letters)),
                        Cond(_random_event(rng, letters),
                             _random_event(rng, letters)))
    if lang == LanguageTag.QUAD:
        def term():
            if rng.random() < 0.5:
                return Prod(Basic(_random_event(rng, letters)),
                            Basic(_random_event(rng, letters)))
            return Basic(_random_event(rng, letters))

        return cmp_kind(term(), term())
    if lang == LanguageTag.POLY:
        return cmp_kind(_random_poly_term(rng, letters),
                        _random_poly_term(rng, letters))
    raise ValueError(f"no generator for {lang}")


def generate(lang: LanguageTag, n_letters: int, k_atoms: int,
             seed: int = 0) -> Formula:
    """Deterministic random formula with classify(result) <= lang."""
    if n_letters < 1 or k_atoms < 1:
        raise ValueError("need at least one letter and one atom")
    rng = random.Random((str(lang), n_letters, k_atoms, seed).__repr__())
    letters = _letters(n_letters)
    leaves = [Atom(_random_atom(rng, lang, letters)) for _ in range(k_atoms)]
    while len(leaves) > 1:
        b = leaves.pop(rng.randrange(len(leaves)))
        a = leaves.pop(rng.randrange(len(leaves)))
        op = rng.random()
        if op < 0.5:
            leaves.append(FAnd(a, b))
        elif op < 0.8:
            leaves.append(FOr(a, b))
        else:
            leaves.append(FAnd(a, FNot(b)))
    out = leaves[0]
    assert classify(out) <= lang
    return out


CSV_COLUMNS = ["lang", "n", "k", "instance", "verdict", "verdict_kind",
               "wall_ms", "budget_note"]


@dataclass
class PlanItem:
    lang: LanguageTag
    n: int
    k: int
    count: int
    timeout_ms: int = 10000
    seed: int = 0


def _decide(f: Formula, config):
    from .linsolve import sat_additive
    from .polysolve import (SatNumeric, SatRational, Unknown, UnsatCertified,
                            sat_multiplicative)
    from .syntax import ADDITIVE_TAGS, LanguageTag as LT

    tag = classify(f)
    if tag in ADDITIVE_TAGS or tag == LT.SAME_COND:
        res = sat_additive(f)
        return ("sat" if res.is_sat else "unsat"), "exact"
    verdict = sat_multiplicative(f, config)
    if isinstance(verdict, SatRational):
        return "sat", "exact"
    if isinstance(verdict, SatNumeric):
        return "sat", "numeric"
    if isinstance(verdict, UnsatCertified):
        return "unsat", "exact"
    return "unknown", "unknown"


def run_bench(plan, config=None) -> list:
    """Run the plan sequentially; returns CSV-shaped row dicts."""
    from .polysolve import DEFAULT_CONFIG

    config = config or DEFAULT_CONFIG
    rows = []
    for item in plan:
        for i in range(item.count):
            f = generate(item.lang, item.n, item.k, seed=item.seed + i)
            t0 = time.perf_counter()
            note = ""
            try:
                verdict, kind = _decide(f, config)
            except Exception as exc:  # pragma: no cover - harness robustness
                verdict, kind = "error", "error"
                note = type(exc).__name__
            wall = (time.perf_counter() - t0) * 1000
            if wall > item.timeout_ms:
                note = (note + ";" if note else "") + "over-timeout"
            rows.append({"lang": str(item.lang), "n": item.n, "k": item.k,
                         "instance": i, "verdict": verdict,
                         "verdict_kind": kind, "wall_ms": round(wall, 3),
                         "budget_note": note})
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()
