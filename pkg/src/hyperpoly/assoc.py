"""Associativity of iterated hyperproducts: triple checks, exhaustive scans
over finite carriers, the 1+1 singleton criterion, and pointwise evaluation
comparisons.

Since the set-level product is commutative, every bracketing of an ordered
triple equals one of the three "outer choice" forms x (x) (y (x) z) with
{x,y,z} the underlying multiset, so a triple is associative exactly when
those three sets coincide."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .carriers import Element, Hyperfield, UndecidedError
from .polyalg import (CertStep, EqualCertificate, Expr, MemberCertificate,
                      Polynomial, PolyLeaf, ProdNode, boxprod, expr_equal,
                      expr_member, format_expr, resolve)


def _fmt_key(hf: Hyperfield):
    def key(x: Element):
        s = hf.format_element(x)
        return (len(s), s)
    return key


def _outer_form(outer: Polynomial, a: Polynomial, b: Polynomial) -> Expr:
    return ProdNode(PolyLeaf(outer), ProdNode(PolyLeaf(a), PolyLeaf(b)))


@dataclass(frozen=True)
class AssocReport:
    hyperfield: str
    triple: tuple[str, str, str]
    associative: Optional[bool]  # None when some comparison is undecided
    comparisons: tuple[EqualCertificate, ...]

    @property
    def counterexample(self) -> Optional[EqualCertificate]:
        for cert in self.comparisons:
            if cert.verdict == "unequal":
                return cert
        return None

    def __str__(self) -> str:
        head = {True: "ASSOCIATIVE", False: "NOT ASSOCIATIVE",
                None: "UNDECIDED"}[self.associative]
        lines = [f"{head}: ({', '.join(self.triple)}) over {self.hyperfield}"]
        for cert in self.comparisons:
            lines.extend("  " + ln for ln in str(cert).splitlines())
        return "\n".join(lines)


def assoc_check(p: Polynomial, q: Polynomial, r: Polynomial) -> AssocReport:
    """Compare the direct bracketings p*(q*r) vs (p*q)*r, then the other
    outer choices of the multiset {p,q,r}."""
    hf = p.hf
    direct = expr_equal(
        _outer_form(p, q, r),
        ProdNode(ProdNode(PolyLeaf(p), PolyLeaf(q)), PolyLeaf(r)), hf)
    comparisons = [direct]
    if direct.verdict != "unequal":
        comparisons.append(expr_equal(_outer_form(p, q, r),
                                      _outer_form(q, p, r), hf))
    if all(c.verdict != "unequal" for c in comparisons):
        comparisons.append(expr_equal(_outer_form(q, p, r),
                                      _outer_form(r, p, q), hf))
    verdicts = {c.verdict for c in comparisons}
    associative: Optional[bool]
    if "unequal" in verdicts:
        associative = False
    elif "undecided" in verdicts:
        associative = None
    else:
        associative = True
    return AssocReport(hf.name, (str(p), str(q), str(r)), associative,
                       tuple(comparisons))


@dataclass(frozen=True)
class ScanReport:
    hyperfield: str
    max_deg: int
    monic_only: bool
    polynomials: int
    triples_checked: int
    counterexamples: tuple[AssocReport, ...]

    def __str__(self) -> str:
        head = (f"scan over {self.hyperfield}, degrees 1..{self.max_deg}"
                f"{' (monic)' if self.monic_only else ''}: "
                f"{self.polynomials} polynomials, "
                f"{self.triples_checked} triples, "
                f"{len(self.counterexamples)} counterexample(s)")
        lines = [head]
        for rep in self.counterexamples:
            lines.extend("  " + ln for ln in str(rep).splitlines())
        return "\n".join(lines)


def _scan_polys(hf: Hyperfield, max_deg: int,
                monic_only: bool) -> list[Polynomial]:
    elems = sorted(hf.elements(), key=_fmt_key(hf))
    nonzero = [e for e in elems if not hf.is_zero(e)]
    leads = [hf.one()] if monic_only else nonzero
    out = []
    for deg in range(1, max_deg + 1):
        for lead in leads:
            for lower in itertools.product(elems, repeat=deg):
                out.append(Polynomial.of(hf, list(lower) + [lead]))
    return out


def _singleton_add_tables(hf: Hyperfield):
    """Index tables when every single hyperaddition is a singleton (then all
    product boxes are singletons and set comparison is tuple comparison);
    None as soon as one hypersum is set-valued."""
    elems = sorted(hf.elements(), key=_fmt_key(hf))
    pos = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    add1 = [[0] * n for _ in range(n)]
    mul = [[0] * n for _ in range(n)]
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            s = hf.hyperadd(x, y)
            if not s.is_singleton():
                return None
            add1[i][j] = pos[s.the_element()]
            mul[i][j] = pos[hf.mul(x, y)]
    return elems, pos, add1, mul, pos[hf.zero()]


def assoc_scan(hf: Hyperfield, max_deg: int, monic_only: bool = False,
               stop_after: Optional[int] = 1) -> ScanReport:
    """Exhaustive associativity scan over all positive-degree polynomial
    multisets of size three with degrees up to max_deg.  Scalar factors
    distribute exactly over hypersums, so constants cannot contribute a
    counterexample and are omitted.  Enumeration is by ascending degree and
    lexicographic coefficients; commutativity of the set product is the only
    deduplication (unordered multisets cover all bracketings)."""
    if not hf.is_finite():
        raise UndecidedError(f"cannot scan the infinite carrier {hf.name}")
    polys = _scan_polys(hf, max_deg, monic_only)
    tables = _singleton_add_tables(hf)
    found: list[AssocReport] = []
    checked = 0

    def certify(i: int, j: int, k: int, d1: tuple, d2: tuple) -> None:
        e1 = _outer_form(polys[d1[0]], polys[d1[1]], polys[d1[2]])
        e2 = _outer_form(polys[d2[0]], polys[d2[1]], polys[d2[2]])
        cert = expr_equal(e1, e2, hf)
        if cert.verdict != "unequal":
            raise AssertionError(
                f"scan mismatch not confirmed by expr_equal: "
                f"{format_expr(e1)} vs {format_expr(e2)}")
        found.append(AssocReport(
            hf.name, (str(polys[i]), str(polys[j]), str(polys[k])),
            False, (cert,)))

    if tables is not None:
        elems, pos, add1, mul, zero_i = tables
        enc = [tuple(pos[c] for c in p.coeffs) for p in polys]

        def conv(u: tuple, v: tuple) -> tuple:
            out = [zero_i] * (len(u) + len(v) - 1)
            for a, ua in enumerate(u):
                if ua == zero_i:
                    continue
                row = mul[ua]
                for b, vb in enumerate(v):
                    if vb == zero_i:
                        continue
                    t = a + b
                    out[t] = add1[out[t]][row[vb]]
            return tuple(out)

        pair: dict = {}

        def pp(a: int, b: int) -> tuple:
            key = (a, b) if a <= b else (b, a)
            got = pair.get(key)
            if got is None:
                got = pair[key] = conv(enc[key[0]], enc[key[1]])
            return got

        for i, j, k in itertools.combinations_with_replacement(
                range(len(polys)), 3):
            checked += 1
            decomps = []
            for d in ((i, j, k), (j, i, k), (k, i, j)):
                if d not in decomps:
                    decomps.append(d)
            if len(decomps) < 2:
                continue
            vals = [conv(enc[m], pp(a, b)) for (m, a, b) in decomps]
            for t in range(len(vals) - 1):
                if vals[t] != vals[t + 1]:
                    certify(i, j, k, decomps[t], decomps[t + 1])
                    break
            if stop_after is not None and len(found) >= stop_after:
                break
        return ScanReport(hf.name, max_deg, monic_only, len(polys), checked,
                          tuple(found))

    pair_members: dict = {}
    variant_cache: dict = {}

    def members(a: int, b: int) -> tuple:
        key = (a, b) if a <= b else (b, a)
        got = pair_members.get(key)
        if got is None:
            got = pair_members[key] = tuple(
                boxprod(polys[key[0]], polys[key[1]]).enumerate_members())
        return got

    def variant(m: int, a: int, b: int) -> frozenset:
        key = (m, (a, b) if a <= b else (b, a))
        got = variant_cache.get(key)
        if got is None:
            out = set()
            for inner in members(*key[1]):
                out.update(boxprod(polys[m], inner).enumerate_members())
            got = variant_cache[key] = frozenset(out)
        return got

    for i, j, k in itertools.combinations_with_replacement(
            range(len(polys)), 3):
        checked += 1
        decomps = []
        for d in ((i, j, k), (j, i, k), (k, i, j)):
            if d not in decomps:
                decomps.append(d)
        if len(decomps) < 2:
            continue
        vals = [variant(*d) for d in decomps]
        for t in range(len(vals) - 1):
            if vals[t] != vals[t + 1]:
                certify(i, j, k, decomps[t], decomps[t + 1])
                break
        if stop_after is not None and len(found) >= stop_after:
            break
    return ScanReport(hf.name, max_deg, monic_only, len(polys), checked,
                      tuple(found))


# ---------------------------------------------------------------------------
# the 1+1 criterion


@dataclass(frozen=True)
class OnePlusOneReport:
    """When 1 (+) 1 = B is not a singleton, the products
    (T^2+1)(x)((T+1)(x)(T+1)) and (T+1)(x)((T^2+1)(x)(T+1)) differ: the
    first couples the T^3 and T coefficients through a shared b in B, the
    second leaves them free, so any witness with two distinct values from B
    at those positions separates the two sets."""

    hyperfield: str
    b_set: str
    applicable: bool
    coupled_expr: Optional[str] = None
    free_expr: Optional[str] = None
    coupled_shape: Optional[str] = None
    free_shape: Optional[str] = None
    witness: Optional[str] = None
    free_cert: Optional[MemberCertificate] = None
    coupled_cert: Optional[MemberCertificate] = None

    def certificate(self) -> EqualCertificate:
        if not self.applicable:
            raise ValueError("criterion inapplicable: 1 (+) 1 is a singleton")
        return EqualCertificate(
            "unequal", self.hyperfield, self.free_expr, self.coupled_expr,
            self.witness, 1, self.free_cert, self.coupled_cert,
            (CertStep("shape", None, f"side 1 resolves to {self.free_shape}"),
             CertStep("shape", None,
                      f"side 2 resolves to {self.coupled_shape}")))

    def __str__(self) -> str:
        if not self.applicable:
            return (f"{self.hyperfield}: 1 (+) 1 = {self.b_set} is a "
                    f"singleton; criterion inapplicable")
        return (f"{self.hyperfield}: 1 (+) 1 = {self.b_set} is not a "
                f"singleton\n" + str(self.certificate()))


def one_plus_one_criterion(hf: Hyperfield) -> OnePlusOneReport:
    one = hf.one()
    b = hf.hyperadd(one, one)
    if b.is_singleton():
        return OnePlusOneReport(hf.name, str(b), False)
    lin = Polynomial.of(hf, [one, one])
    quad = Polynomial.of(hf, [one, hf.zero(), one])
    coupled_expr = _outer_form(quad, lin, lin)
    free_expr = _outer_form(lin, quad, lin)
    samples = hf.sample_elements(b)
    d1 = one if b.contains(one) else samples[-1]
    rest = [s for s in samples if s != d1]
    nonzero = [s for s in rest if not hf.is_zero(s)]
    d2 = (nonzero or rest)[0]
    witness = Polynomial.of(hf, [one, d2, d1, d1, one])
    free_cert = expr_member(witness, free_expr)
    coupled_cert = expr_member(witness, coupled_expr)
    if free_cert.verdict != "yes" or coupled_cert.verdict != "no":
        raise AssertionError(
            f"1+1 witness construction failed over {hf.name}: "
            f"{free_cert.verdict}/{coupled_cert.verdict}")
    return OnePlusOneReport(
        hf.name, str(b), True,
        format_expr(coupled_expr), format_expr(free_expr),
        resolve(coupled_expr, hf).describe(),
        resolve(free_expr, hf).describe(),
        str(witness), free_cert, coupled_cert)


# ---------------------------------------------------------------------------
# pointwise evaluation


@dataclass(frozen=True)
class PointwiseReport:
    hyperfield: str
    triple: tuple[str, str, str]
    rows: tuple[tuple[str, str, str, str, bool], ...]
    equal: bool

    def __str__(self) -> str:
        lines = [f"pointwise products of ({', '.join(self.triple)}) "
                 f"over {self.hyperfield}: "
                 f"{'equal' if self.equal else 'NOT equal'}"]
        for a, s1, s2, s3, ok in self.rows:
            mark = "=" if ok else "!="
            lines.append(f"  a={a}: {s1} {mark} {s2} {mark} {s3}")
        return "\n".join(lines)


def pointwise_products_equal(p: Polynomial, q: Polynomial, r: Polynomial,
                             points: Sequence[Element]) -> PointwiseReport:
    """Elementwise products of the evaluation sets p(a), q(a), r(a) under
    the three outer choices, for each sample point a."""
    hf = p.hf
    rows = []
    all_ok = True
    for a in points:
        pa, qa, ra = p.eval(a), q.eval(a), r.eval(a)
        s1 = hf.set_mul(pa, hf.set_mul(qa, ra))
        s2 = hf.set_mul(hf.set_mul(pa, qa), ra)
        s3 = hf.set_mul(qa, hf.set_mul(pa, ra))
        ok = s1 == s2 == s3
        all_ok = all_ok and ok
        rows.append((hf.format_element(a), str(s1), str(s2), str(s3), ok))
    return PointwiseReport(hf.name, (str(p), str(q), str(r)),
                           tuple(rows), all_ok)
