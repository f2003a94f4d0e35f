"""Tropical-specific algebra: sorted hypersums, the product box of linear
factors, root multiset extraction, and exact reducibility at small degree.

Over T = (Q union {-inf}, max-style hyperaddition, +), the hypersum of a
list is {max} when the maximum is attained once and the interval
[-inf, max] when it ties, so products of linear factors have per-coefficient
value sets given by subset sums of the roots."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Optional, Sequence

from .carriers import Element, ElementSet, Hyperfield, UndecidedError, by_name
from .divide import mult_at
from .linear import Constraint, eq, lt, feasible_point as lp_feasible_point
from .polyalg import (Polynomial, PolyBox, boxprod, monic_decompose,
                      solve_linear_chain, chain_witness)
from .sets import ExtRat, NEG_INF


def _trop() -> Hyperfield:
    return by_name("T")


def trop_hypersum_sorted(values: Sequence[Element]) -> ElementSet:
    """Hypersum of a list over T from its sorted order: {max} when the
    maximum is strict, [-inf, max] when the top two entries tie."""
    hf = _trop()
    if not values:
        raise ValueError("hypersum of an empty list")
    ordered = sorted(v.payload for v in values)
    top = ordered[-1]
    if len(ordered) == 1 or ordered[-2] < top:
        if top == NEG_INF:
            return hf.singleton(hf.zero())
        return hf.singleton(Element(hf.name, top))
    return hf.hyperadd(Element(hf.name, top), Element(hf.name, top))


def linear_product_box(roots: Sequence[Element]) -> PolyBox:
    """The product set of the monic linear factors (0T + a_i) as a box:
    cell n-s is the hypersum of all s-subset sums of the roots."""
    hf = _trop()
    if not roots:
        raise ValueError("no roots given")
    n = len(roots)
    cells: list[ElementSet] = [None] * (n + 1)
    cells[n] = hf.singleton(hf.one())
    for s in range(1, n + 1):
        sums = []
        for combo in itertools.combinations(range(n), s):
            total = roots[combo[0]].payload
            for t in combo[1:]:
                total = total + roots[t].payload
            sums.append(Element(hf.name, total))
        cells[n - s] = trop_hypersum_sorted(sums)
    return PolyBox(hf, tuple(cells))


def iterated_linear_product(roots: Sequence[Element]) -> str:
    """Description of S_k = union over p in S_{k-1} of (0T+a_k) (x) p."""
    hf = _trop()
    box = linear_product_box(roots)
    chain = " -> ".join(f"(0T+{hf.format_element(a)})" for a in roots)
    return f"S_n from {chain}; equals the box {box}"


def _linear_factor(a: Element) -> Polynomial:
    hf = _trop()
    return Polynomial(hf, (a, hf.one()))


@dataclass(frozen=True)
class BoxEquivalence:
    """Certificate that the iterated union of linear products equals the
    subset-sum box: forward inclusion holds cellwise at every growth step,
    and sampled members of each box factor back through the constraint
    chain into the previous box."""

    roots: tuple[str, ...]
    equal: bool
    steps: tuple[str, ...]
    samples_checked: int
    failure: Optional[str] = None


def box_equivalence(roots: Sequence[Element],
                    samples_per_step: int = 24) -> BoxEquivalence:
    hf = _trop()
    names = tuple(hf.format_element(a) for a in roots)
    steps: list[str] = []
    checked = 0
    prev = linear_product_box(roots[:1])
    steps.append(f"S_1 = {prev}")
    for k in range(2, len(roots) + 1):
        a = roots[k - 1]
        cur = linear_product_box(roots[:k])
        # forward: coefficient i of (0T+a)(x)p is a*p_i (+) p_{i-1}, so the
        # union over p in the previous box stays inside these cell sets
        for i in range(cur.nominal_degree + 1):
            reach = hf.set_hyperadd(hf.scale_set(a, prev.cell(i)),
                                    prev.cell(i - 1)) \
                if i >= 1 else hf.scale_set(a, prev.cell(0))
            if not cur.cell(i).includes(reach):
                return BoxEquivalence(names, False, tuple(steps), checked,
                                      f"step {k}: cell {i} reach {reach} "
                                      f"escapes {cur.cell(i)}")
        # reverse: sampled members of the bigger box factor through the
        # chain back into the previous box
        ell = _linear_factor(a)
        for p in cur.sample_members(samples_per_step, seed=k):
            if p.degree != cur.nominal_degree:
                continue
            cells = list(prev.cells)
            domains, _ = solve_linear_chain(p, ell, cells)
            if domains is None:
                return BoxEquivalence(names, False, tuple(steps), checked,
                                      f"step {k}: member {p} does not factor "
                                      f"through the previous box")
            witness = chain_witness(p, ell, domains)
            if not prev.contains(witness):
                return BoxEquivalence(names, False, tuple(steps), checked,
                                      f"step {k}: factor {witness} escapes "
                                      f"the previous box")
            checked += 1
        steps.append(f"S_{k} = {cur}; forward cells included, "
                     f"sampled members factored")
        prev = cur
    return BoxEquivalence(names, True, tuple(steps), checked)


# ---------------------------------------------------------------------------
# root multisets via the upper concave hull of (i, c_i)


@dataclass(frozen=True)
class RootMultiset:
    roots: tuple[Element, ...]  # descending

    def counts(self) -> dict:
        out: dict = {}
        for a in self.roots:
            out[a] = out.get(a, 0) + 1
        return out

    def __str__(self) -> str:
        hf = _trop()
        return "{" + ", ".join(hf.format_element(a) for a in self.roots) + "}"


def root_multiset(p: Polynomial, verify: bool = True) -> RootMultiset:
    """The unique root multiset of a monic tropical polynomial, from the
    upper concave hull of the finite coefficient points (i, c_i): each unit
    step of a hull edge of slope s contributes one root -s; trailing -inf
    coefficients contribute roots -inf.  Verified in-process against the
    subset-sum box and the recursive multiplicity."""
    hf = _trop()
    if p.hf != hf:
        raise ValueError("root_multiset is tropical-only")
    if not p.is_monic():
        raise ValueError("root_multiset needs a monic polynomial")
    shift = 0
    while hf.is_zero(p.coeff(shift)):
        shift += 1
    pts = [(i, p.coeff(i).payload.q)
           for i in range(shift, p.degree + 1)
           if not hf.is_zero(p.coeff(i))]
    hull = _upper_hull(pts)
    roots: list[Element] = []
    for (i1, c1), (i2, c2) in zip(hull, hull[1:]):
        slope = Fraction(c1 - c2, i2 - i1)  # negated edge slope
        roots.extend(hf.element(slope) for _ in range(i2 - i1))
    roots.extend(hf.zero() for _ in range(shift))
    roots.sort(key=lambda a: a.payload, reverse=True)
    result = RootMultiset(tuple(roots))
    if verify:
        box = linear_product_box(result.roots)
        if not box.contains(p):
            raise AssertionError(f"hull roots {result} fail the box check")
        for a, count in result.counts().items():
            if mult_at(p, a) != count:
                raise AssertionError(
                    f"mult_at({p}, {hf.format_element(a)}) != {count}")
    return result


def _upper_hull(pts: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


# ---------------------------------------------------------------------------
# reducibility: is {p} exactly a hyperproduct of two positive-degree
# polynomials?


@dataclass(frozen=True)
class ReducibilityCertificate:
    poly: str
    reducible: Optional[bool]  # None = undecided
    factors: Optional[tuple[str, str]]
    trace: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def __str__(self) -> str:
        head = {True: "REDUCIBLE", False: "IRREDUCIBLE",
                None: "UNDECIDED"}[self.reducible]
        lines = [f"{head}: {self.poly}"]
        if self.factors:
            lines.append(f"  factors: {self.factors[0]} and {self.factors[1]}")
        lines.extend(f"  {t}" for t in self.trace)
        return "\n".join(lines)


def is_reducible(p: Polynomial, search_bound: int = 4) -> ReducibilityCertificate:
    hf = p.hf
    if p.degree < 2:
        raise ValueError("reducibility needs degree >= 2")
    if hf.is_finite():
        return _reducible_finite(p)
    if hf.kind != "tropical":
        return ReducibilityCertificate(
            str(p), None, None,
            (f"no exact factor analysis for {hf.name}",))
    if p.degree > search_bound:
        return ReducibilityCertificate(
            str(p), None, None,
            (f"degree {p.degree} above the exact-analysis bound "
             f"{search_bound}",))
    lead, p0 = monic_decompose(p)
    trace: list[str] = []
    found = _tropical_factor_search(p0, trace)
    if found is not None:
        q0, r0 = found
        q = Polynomial(hf, tuple(hf.mul(lead, c) for c in q0.coeffs))
        box = boxprod(q, r0)
        if not (box.is_singleton() and box.the_polynomial() == p):
            raise AssertionError("constructed factors fail verification")
        trace.append(f"verified ({q})*({r0}) = {{{p}}} cellwise")
        return ReducibilityCertificate(str(p), True, (str(q), str(r0)),
                                       tuple(trace))
    return ReducibilityCertificate(str(p), False, None, tuple(trace))


def _tropical_factor_search(p: Polynomial,
                            trace: list[str]) -> Optional[tuple[Polynomial, Polynomial]]:
    """Monic factor pair with singleton product, by exact case analysis:
    choose which coefficients are -inf, then which product term is the
    strict maximum at every index, and solve the linear system."""
    hf = p.hf
    n = p.degree
    for k in range(1, n // 2 + 1):
        m = n - k
        # variables: q_0..q_{k-1}, r_0..r_{m-1}; leading coefficients are 0
        nq, nr = k, m
        names = [f"q{j}" for j in range(nq)] + [f"r{j}" for j in range(nr)]
        for pattern in itertools.product((False, True), repeat=nq + nr):
            reason = _try_pattern(p, k, pattern, names)
            if isinstance(reason, tuple):
                return reason
            trace.append(f"split ({k},{m}), " + reason)
    return None


def _try_pattern(p: Polynomial, k: int, pattern: tuple[bool, ...],
                 names: list[str]):
    """One -inf pattern: returns (q, r) on success, else a failure line."""
    hf = p.hf
    n, m = p.degree, p.degree - k
    inf_desc = ", ".join(f"{nm}=-inf" for nm, z in zip(names, pattern) if z) \
        or "all coefficients finite"

    def var_index(side: str, j: int) -> Optional[int]:
        # None marks a unit leading coefficient (constant 0)
        if side == "q":
            return None if j == k else j
        return None if j == m else k + j

    def is_dead(side: str, j: int) -> bool:
        idx = var_index(side, j)
        return idx is not None and pattern[idx]

    finite_vars = [i for i, z in enumerate(pattern) if not z]
    pos_of = {v: i for i, v in enumerate(finite_vars)}
    nvars = len(finite_vars)

    def term_coeffs(s: int, t: int) -> Optional[tuple[list[Fraction], Fraction]]:
        """Linear form of q_s + r_t over the finite variables, or None if
        the term is -inf under the pattern."""
        coeffs = [Fraction(0)] * nvars
        const = Fraction(0)
        for side, j in (("q", s), ("r", t)):
            if is_dead(side, j):
                return None
            idx = var_index(side, j)
            if idx is None:
                continue  # unit leading coefficient contributes 0
            coeffs[pos_of[idx]] += 1
        return coeffs, const

    constraints: list[Constraint] = []
    choice_sets: list[list[tuple[int, int]]] = []
    fixed: list[tuple[int, tuple[int, int]]] = []
    for i in range(n + 1):
        pairs = [(s, i - s) for s in range(max(0, i - m), min(i, k) + 1)]
        live = [(s, t) for (s, t) in pairs if term_coeffs(s, t) is not None]
        ci = p.coeff(i)
        if hf.is_zero(ci):
            if live:
                s, t = live[0]
                return (f"pattern {inf_desc}: the target coefficient of T^{i} "
                        f"is -inf but the product term q{s}+r{t} stays finite")
            continue
        if not live:
            return (f"pattern {inf_desc}: every product term at T^{i} is "
                    f"-inf, but the target coefficient is "
                    f"{hf.format_element(ci)}")
        if len(live) == 1:
            fixed.append((i, live[0]))
        else:
            choice_sets.append([(i, s, t) for (s, t) in live])
    for i, (s, t) in fixed:
        coeffs, const = term_coeffs(s, t)
        constraints.extend(eq(coeffs, p.coeff(i).payload.q - const))
    base = constraints
    for choices in itertools.product(*choice_sets):
        constraints = list(base)
        ok = True
        for (i, s, t) in choices:
            target = p.coeff(i).payload.q
            coeffs, const = term_coeffs(s, t)
            constraints.extend(eq(coeffs, target - const))
            pairs = [(s2, i - s2) for s2 in range(max(0, i - (n - k)),
                                                  min(i, k) + 1)]
            for (s2, t2) in pairs:
                if (s2, t2) == (s, t):
                    continue
                other = term_coeffs(s2, t2)
                if other is None:
                    continue
                oc, oconst = other
                constraints.append(lt(oc, target - oconst))
        point = lp_feasible_point(constraints, nvars)
        if point is None:
            continue
        values: list = []
        for idx in range(len(pattern)):
            if pattern[idx]:
                values.append(NEG_INF)
            else:
                values.append(ExtRat(point[pos_of[idx]]))
        q = Polynomial(hf, tuple(Element(hf.name, v) for v in values[:k])
                       + (hf.one(),))
        r = Polynomial(hf, tuple(Element(hf.name, v) for v in values[k:])
                       + (hf.one(),))
        box = boxprod(q, r)
        if box.is_singleton() and box.the_polynomial() == p:
            return q, r
    return f"pattern {inf_desc}: no strict-maximum assignment is consistent"


def _reducible_finite(p: Polynomial) -> ReducibilityCertificate:
    hf = p.hf
    n = p.degree
    elems = [Element(hf.name, v) for v in
             sorted(hf.full_set().finite, key=lambda x: str(x))]
    nonzero = [e for e in elems if not hf.is_zero(e)]

    def all_polys(deg: int):
        for combo in itertools.product(elems, repeat=deg):
            for lead in nonzero:
                yield Polynomial(hf, combo + (lead,))

    for k in range(1, n // 2 + 1):
        for q in all_polys(k):
            for r in all_polys(n - k):
                box = boxprod(q, r)
                if box.is_singleton() and box.the_polynomial() == p:
                    return ReducibilityCertificate(
                        str(p), True, (str(q), str(r)),
                        (f"verified ({q})*({r}) = {{{p}}} by enumeration",))
    return ReducibilityCertificate(
        str(p), False, None,
        ("no positive-degree factor pair has singleton product equal "
         "to the polynomial",))
