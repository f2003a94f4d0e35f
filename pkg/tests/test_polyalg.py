"""Polynomial algebra: parsing, boxes, expression resolution, certificates."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperpoly import (
    EqualCertificate,
    MemberCertificate,
    PolyBox,
    Polynomial,
    ProdNode,
    PolyLeaf,
    SumNode,
    UndecidedError,
    boxprod,
    boxsum,
    box_hyperadd,
    box_of,
    by_name,
    expr_equal,
    expr_member,
    format_expr,
    format_poly,
    gf,
    max_degree,
    monic_decompose,
    monomial,
    parse_expr,
    parse_poly,
    replay_member,
    resolve,
    resolved_members,
    scalar_prod,
    scale_box,
)
from hyperpoly.polyalg import chain_witness, solve_linear_chain

FINITE_NAMES = ["K", "S", "W", "GF(3)", "GF(5)"]


@st.composite
def finite_polys(draw, names=FINITE_NAMES, max_deg=4):
    hf = by_name(draw(st.sampled_from(names)))
    deg = draw(st.integers(0, max_deg))
    elems = hf.elements()
    nonzero = [e for e in elems if not hf.is_zero(e)]
    coeffs = [draw(st.sampled_from(elems)) for _ in range(deg)]
    coeffs.append(draw(st.sampled_from(nonzero)))
    return Polynomial.of(hf, coeffs)


@st.composite
def tropical_polys(draw, max_deg=4):
    T = by_name("T")
    deg = draw(st.integers(0, max_deg))
    vals = st.one_of(st.just("-inf"),
                     st.fractions(min_value=-6, max_value=6, max_denominator=4))
    coeffs = [T.element(draw(vals)) for _ in range(deg)]
    coeffs.append(T.element(draw(
        st.fractions(min_value=-6, max_value=6, max_denominator=4))))
    return Polynomial.of(T, coeffs)


# ---------------------------------------------------------------------------
# polynomials and text forms


class TestPolynomialBasics:
    def test_trailing_zeros_are_stripped(self):
        S = by_name("S")
        p = Polynomial.of(S, [1, 0, 0])
        assert p.degree == 0 and p.coeff(5) == S.zero()

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            Polynomial.of(by_name("S"), [0, 0])

    def test_monic_decompose(self):
        hf = gf(5)
        p = parse_poly("3T^2+4T+2", hf)
        lead, p0 = monic_decompose(p)
        assert lead.payload == 3 and p0.is_monic()
        assert boxprod(Polynomial.of(hf, [lead]), p0).the_polynomial() == p

    def test_monomial_and_scalar_prod(self):
        S = by_name("S")
        m = monomial(S, 3)
        assert format_poly(m) == "T^3"
        sp = scalar_prod(S.element(-1), parse_poly("T+1", S))
        assert format_poly(sp) == "-T-1"
        with pytest.raises(ValueError):
            scalar_prod(S.zero(), m)

    @given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 4), min_size=1,
                                                max_size=5))
    def test_gf_eval_matches_classical(self, p, raws):
        hf = gf(p)
        if all(r % p == 0 for r in raws):
            raws = raws + [1]
        poly = Polynomial.of(hf, [hf.element(r % p) for r in raws])
        for a in range(p):
            classical = sum(c.payload * a ** i
                            for i, c in enumerate(poly.coeffs)) % p
            assert poly.eval(hf.element(a)) == hf.singleton(hf.element(classical))

    def test_signs_eval_spans_full_set(self):
        S = by_name("S")
        p = parse_poly("T^2-T", S)
        assert p.eval(S.one()) == S.full_set()


class TestTextForms:
    @given(finite_polys())
    @settings(max_examples=200)
    def test_round_trip_finite(self, p):
        assert parse_poly(format_poly(p), p.hf) == p

    @given(tropical_polys())
    @settings(max_examples=200)
    def test_round_trip_tropical(self, p):
        assert parse_poly(format_poly(p), p.hf) == p

    def test_sign_join_and_parenthesized_negatives(self):
        S = by_name("S")
        p = parse_poly("T^3-1", S)
        assert p.coeff(0) == S.element(-1) and p.coeff(3) == S.one()
        assert format_poly(p) == "T^3-1"
        T = by_name("T")
        q = parse_poly("1T^3+(-2)", T)
        assert q.coeff(0).payload.q == -2
        assert format_poly(q) == "1T^3+(-2)"

    def test_tropical_unit_coefficient_is_explicit(self):
        T = by_name("T")
        assert format_poly(parse_poly("0T^2+2", T)) == "0T^2+2"

    def test_phase_literals(self):
        P = by_name("P")
        p = parse_poly("T^2+ph(1/2)T+ph(1)", P)
        assert p.coeff(1).payload == Fraction(1, 2)
        assert parse_poly(format_poly(p), P) == p
        assert parse_poly("e^{i pi}", P) == parse_poly("ph(1)", P)

    @pytest.mark.parametrize("bad", [
        "", "+", "T+T", "T^-1", "T^", "2x+1", "0T^2+1", "T^99",
    ])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            parse_poly(bad, by_name("S"))

    def test_degree_cap_env_override(self, monkeypatch):
        S = by_name("S")
        with pytest.raises(ValueError):
            parse_poly("T^7", S)
        monkeypatch.setenv("HYPERPOLY_MAX_DEGREE", "9")
        assert max_degree() == 9
        assert parse_poly("T^7", S).degree == 7
        monkeypatch.setenv("HYPERPOLY_MAX_DEGREE", "notanumber")
        assert max_degree() == 6


class TestExpressionGrammar:
    def test_plus_binds_to_literal_inside_segment(self):
        S = by_name("S")
        e = parse_expr("(T+1)*(T^2+1)", S)
        assert isinstance(e, ProdNode)
        assert isinstance(e.left, PolyLeaf) and e.left.poly.degree == 1

    def test_plus_at_atom_boundary_is_set_sum(self):
        S = by_name("S")
        e = parse_expr("(T+1)+T", S)
        assert isinstance(e, SumNode)
        assert isinstance(e.right, PolyLeaf) and e.right.poly == parse_poly("T", S)

    def test_format_round_trip(self):
        S = by_name("S")
        for text in ["(T+1)*(T^2+1)", "(T+1)+T", "(T+1)*((T+1)+(1))*(T)"]:
            e = parse_expr(text, S)
            assert parse_expr(format_expr(e), S) == e

    @pytest.mark.parametrize("bad", ["(T+1", "T+1)", "()", "(T+1)*", "*T"])
    def test_grammar_errors(self, bad):
        with pytest.raises(ValueError):
            parse_expr(bad, by_name("S"))


# ---------------------------------------------------------------------------
# boxes


class TestBoxProduct:
    @given(finite_polys(max_deg=3), finite_polys(max_deg=3))
    @settings(max_examples=150)
    def test_commutative(self, p, q):
        if p.hf != q.hf:
            q = Polynomial.of(p.hf, [p.hf.one()] * (q.degree + 1))
        assert boxprod(p, q).cells == boxprod(q, p).cells

    @given(st.sampled_from([2, 3, 5]),
           st.lists(st.integers(0, 4), min_size=1, max_size=4),
           st.lists(st.integers(0, 4), min_size=1, max_size=4))
    def test_gf_product_is_classical_convolution(self, m, araw, braw):
        hf = gf(m)
        if all(r % m == 0 for r in araw):
            araw = araw + [1]
        if all(r % m == 0 for r in braw):
            braw = braw + [1]
        p = Polynomial.of(hf, [r % m for r in araw])
        q = Polynomial.of(hf, [r % m for r in braw])
        box = boxprod(p, q)
        assert box.is_singleton()
        prod = box.the_polynomial()
        for i in range(p.degree + q.degree + 1):
            conv = sum(p.coeff(k).payload * q.coeff(i - k).payload
                       for k in range(max(0, i - q.degree),
                                      min(i, p.degree) + 1)) % m
            assert prod.coeff(i).payload == conv

    def test_middle_cells_by_carrier(self):
        # (T+1) (x) (T+1): the T cell is 1(+)1, which separates the carriers.
        expected = {"S": {1}, "W": {-1, 1}, "K": {0, 1}}
        for name, mid in expected.items():
            hf = by_name(name)
            p = parse_poly("T+1", hf)
            box = boxprod(p, p)
            assert box.cell(1).finite == frozenset(mid)
            assert box.cell(0) == hf.singleton(hf.one())
            assert box.cell(2) == hf.singleton(hf.one())

    @given(finite_polys(max_deg=3))
    @settings(max_examples=100)
    def test_top_cell_is_lead_product(self, p):
        hf = p.hf
        box = boxprod(p, p)
        lead = hf.mul(p.coeffs[-1], p.coeffs[-1])
        assert box.cell(2 * p.degree) == hf.singleton(lead)


class TestBoxSum:
    def test_cancellation_excludes_zero_selection(self):
        S = by_name("S")
        p = parse_poly("T+1", S)
        q = scalar_prod(S.element(-1), p)
        box = boxsum(p, q)
        assert box.zero_excluded
        assert str(box).endswith("(zero selection excluded)")
        members = box.enumerate_members()
        assert parse_poly("T-1", S) in members
        assert parse_poly("1", S) in members
        assert len(members) == 8

    def test_unequal_degrees_align_low_coefficients(self):
        S = by_name("S")
        box = boxsum(parse_poly("T^2+1", S), parse_poly("-1", S))
        assert box.cell(0) == S.full_set()
        assert box.cell(2) == S.singleton(S.one())
        assert not box.zero_excluded

    def test_box_hyperadd_matches_pairwise_sums(self):
        W = by_name("W")
        a = boxsum(parse_poly("T+1", W), parse_poly("T-1", W))
        b = box_of(parse_poly("T", W))
        combined = box_hyperadd(a, b)
        expected = set()
        for p in a.enumerate_members():
            for q in b.enumerate_members():
                expected.update(boxsum(p, q).enumerate_members())
        assert set(combined.enumerate_members()) == expected


class TestCanonical:
    def test_phantom_zero_top_cell_is_trimmed(self):
        S = by_name("S")
        box = PolyBox(S, (S.singleton(S.one()), S.singleton(S.zero())))
        assert box.canonical().nominal_degree == 0
        assert box.contains(parse_poly("1", S))

    def test_top_only_box_loses_zero_choice(self):
        S = by_name("S")
        box = PolyBox(S, (S.singleton(S.zero()), S.full_set()))
        canon = box.canonical()
        assert canon.cell(1).finite == frozenset({-1, 1})
        assert box.contains(parse_poly("T", S))
        assert not box.contains(parse_poly("T+1", S))
        assert not box.contains(parse_poly("1", S))

    @given(finite_polys(max_deg=3), finite_polys(max_deg=3))
    @settings(max_examples=100)
    def test_idempotent(self, p, q):
        if p.hf != q.hf:
            q = scalar_prod(p.hf.one(), p)
        box = boxsum(p, q).canonical()
        assert box.canonical() == box

    def test_sample_members_deterministic_and_contained(self):
        V = by_name("V")
        box = boxprod(parse_poly("T+1", V), parse_poly("T+2", V))
        one = box.sample_members(50, seed=7)
        two = box.sample_members(50, seed=7)
        assert one == two and one
        for p in one:
            assert box.contains(p)

    @given(finite_polys(max_deg=3))
    @settings(max_examples=100)
    def test_scale_box_maps_members(self, p):
        hf = p.hf
        nonzero = [e for e in hf.elements() if not hf.is_zero(e)]
        box = boxprod(p, p)
        for a in nonzero:
            scaled = scale_box(a, box)
            for q in box.sample_members(20):
                assert scaled.contains(scalar_prod(a, q))


# ---------------------------------------------------------------------------
# resolution shapes


class TestResolve:
    def test_singleton_product_is_a_box(self):
        K = by_name("K")
        value = resolve(parse_expr("(T+1)*(T^2+1)", K), K)
        assert value.kind == "box"

    def test_deeper_product_is_coupled(self):
        K = by_name("K")
        value = resolve(parse_expr("(T+1)*((T+1)*(T+1))", K), K)
        assert value.kind == "coupled"
        assert value.outer == parse_poly("T+1", K)

    def test_monomial_outer_stays_a_box(self):
        S = by_name("S")
        value = resolve(parse_expr("(T)*((T+1)*(T+1))", S), S)
        assert value.kind == "box"
        assert value.box.cell(0) == S.singleton(S.zero())
        assert resolved_members(value) == [parse_poly("T^3+T^2+T", S)]

    def test_scalar_outer_rescales(self):
        S = by_name("S")
        value = resolve(parse_expr("(-1)*((T+1)*(T+1))", S), S)
        assert value.kind == "box"
        assert resolved_members(value) == [parse_poly("-T^2-T-1", S)]

    def test_sum_of_coupled_values_needs_enumeration(self):
        W = by_name("W")
        e = parse_expr("((T+1)*((T+1)*(T+1)))+(1)", W)
        assert resolve(e, W).kind == "finite"
        T = by_name("T")
        with pytest.raises(UndecidedError):
            resolve(parse_expr("((T^2+1)*((T+1)*(T+1)))+(1)", T), T)

    def test_degree_cap_applies_to_products(self):
        S = by_name("S")
        with pytest.raises(ValueError):
            resolve(parse_expr("(T^3+1)*(T^4+1)", S), S)


# ---------------------------------------------------------------------------
# membership certificates


class TestExprMember:
    def test_chain_yes_with_witness(self):
        K = by_name("K")
        e = parse_expr("(T+1)*((T+1)*(T+1))", K)
        cert = expr_member(parse_poly("T^3+T^2+T+1", K), e)
        assert cert.verdict == "yes" and cert.method == "chain"
        assert cert.witness == "T^2+1"
        assert replay_member(cert)

    def test_root_obstruction_no(self):
        W = by_name("W")
        e = parse_expr("(T+1)*((T+1)*(T+1))", W)
        cert = expr_member(parse_poly("T^3-T^2", W), e)
        assert cert.verdict == "no" and cert.method == "root-obstruction"
        texts = [s.text for s in cert.steps]
        assert any("does not contain 0" in t for t in texts)
        assert any("{-1,1}" in t for t in texts)
        # the chain derivation still follows the obstruction steps
        assert any("pins d0" in t for t in texts)
        assert replay_member(cert)

    def test_single_unknown_paths(self):
        W = by_name("W")
        e = parse_expr("(T^2+1)*((T+1)*(T+1))", W)
        yes = expr_member(parse_poly("T^4+T^3-T^2+T+1", W), e)
        assert yes.verdict == "yes" and yes.method == "single-unknown"
        assert yes.witness == "T^2+T+1"
        no = expr_member(parse_poly("T^4+1", W), e)
        assert no.verdict == "no" and no.method == "single-unknown"
        assert replay_member(yes) and replay_member(no)

    def test_degree_mismatch_is_refused_early(self):
        K = by_name("K")
        e = parse_expr("(T+1)*((T+1)*(T+1))", K)
        cert = expr_member(parse_poly("T^4", K), e)
        assert cert.verdict == "no" and cert.method == "degree"

    @given(st.data())
    @settings(max_examples=120, deadline=None)
    def test_verdict_matches_enumeration(self, data):
        hf = by_name(data.draw(st.sampled_from(["K", "S", "W", "GF(3)"])))
        texts = data.draw(st.sampled_from([
            "(T+1)*((T+1)*(T+1))",
            "(T-1)*((T+1)*(T-1))",
            "(T^2+1)*((T+1)*(T+1))",
            "((T+1)*(T+1))*(T+1)",
            "(T+1)+((T+1)*(T+1))",
        ]))
        e = parse_expr(texts, hf)
        members = set(resolved_members(resolve(e, hf)))
        if members and data.draw(st.booleans()):
            p = data.draw(st.sampled_from(sorted(members, key=Polynomial.sort_key)))
        else:
            deg = data.draw(st.integers(0, 4))
            elems = hf.elements()
            nonzero = [x for x in elems if not hf.is_zero(x)]
            coeffs = [data.draw(st.sampled_from(elems)) for _ in range(deg)]
            coeffs.append(data.draw(st.sampled_from(nonzero)))
            p = Polynomial.of(hf, coeffs)
        cert = expr_member(p, e)
        assert cert.verdict == ("yes" if p in members else "no")
        assert replay_member(cert)

    def test_certificate_json_round_trip(self):
        K = by_name("K")
        e = parse_expr("(T+1)*((T+1)*(T+1))", K)
        cert = expr_member(parse_poly("T^3+T^2+T+1", K), e)
        again = MemberCertificate.from_dict(json.loads(cert.to_json()))
        assert again == cert
        assert replay_member(again)


class TestLinearChain:
    def test_agrees_with_brute_force(self):
        W = by_name("W")
        ell = parse_poly("T+1", W)
        cells = [W.full_set(), W.full_set()]
        elems = W.elements()
        nonzero = [x for x in elems if not W.is_zero(x)]
        for c0 in elems:
            for c1 in elems:
                for c2 in nonzero:
                    p = Polynomial.of(W, [c0, c1, c2])
                    domains, _ = solve_linear_chain(p, ell, list(cells))
                    witnesses = [
                        Polynomial.of(W, [d0, d1])
                        for d0 in elems for d1 in nonzero
                        if boxprod(ell, Polynomial.of(W, [d0, d1])).contains(p)
                    ]
                    if domains is None:
                        assert not witnesses, str(p)
                    else:
                        assert witnesses, str(p)
                        w = chain_witness(p, ell, domains)
                        assert boxprod(ell, w).contains(p), str(p)

    def test_trace_records_pins_and_failures(self):
        V = by_name("V")
        ell = parse_poly("T+1", V)
        inner = boxprod(parse_poly("T+2", V), parse_poly("T+3", V))
        p = parse_poly("T^3+6T^2+11T+6", V)
        domains, steps = solve_linear_chain(p, ell, list(inner.cells))
        assert domains is not None
        assert any("pins d0" in s.text for s in steps)


# ---------------------------------------------------------------------------
# set equality


class TestExprEqual:
    def test_box_equality_is_cellwise(self):
        hf = gf(5)
        cert = expr_equal(parse_expr("(T+1)*(T+2)", hf),
                          parse_expr("(T+2)*(T+1)", hf), hf)
        assert cert.verdict == "equal"

    def test_unequal_boxes_carry_replayable_witness(self):
        K = by_name("K")
        cert = expr_equal(parse_expr("(T+1)*(T+1)", K),
                          parse_expr("(T^2+1)", K), K)
        assert cert.verdict == "unequal"
        assert cert.witness == "T^2+T+1" and cert.witness_side == 1
        assert cert.member_in.verdict == "yes"
        assert cert.member_out.verdict == "no"
        assert replay_member(cert.member_in) and replay_member(cert.member_out)

    def test_witness_side_tracks_the_larger_side(self):
        K = by_name("K")
        cert = expr_equal(parse_expr("(T^2+1)", K),
                          parse_expr("(T+1)*(T+1)", K), K)
        assert cert.verdict == "unequal" and cert.witness_side == 2

    def test_coupled_self_comparison_is_undecided(self):
        T = by_name("T")
        e = "(T^2+1)*((T+1)*(T+1))"
        cert = expr_equal(parse_expr(e, T), parse_expr(e, T), T)
        assert cert.verdict == "undecided"

    def test_coupled_vs_box_separator_over_tropical(self):
        T = by_name("T")
        cert = expr_equal(parse_expr("(T^2+1)*((T+1)*(T+1))", T),
                          parse_expr("(0)*((T+1)*(T+1))", T), T)
        assert cert.verdict == "unequal"
        assert cert.witness is not None

    def test_json_round_trip(self):
        K = by_name("K")
        cert = expr_equal(parse_expr("(T+1)*(T+1)", K),
                          parse_expr("(T^2+1)", K), K)
        again = EqualCertificate.from_dict(json.loads(cert.to_json()))
        assert again == cert
