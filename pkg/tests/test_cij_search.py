import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cgindex.cij_search import (
    Claim3PreconditionError,
    SearchExhausted,
    VerificationFailure,
    admissible_chi,
    claim3_check,
    claim3_threshold,
    find_paired_tuple,
    find_tuple,
    first_admissible_cf,
    search_parameters,
)
from cgindex.config import parse_config
from cgindex.exact_field import ExactScalar
from cgindex.index_iteration import GeodesicRecord
from cgindex.normal_form import PoincareDecomposition, RotationBlock
from cgindex.synthesize import synthesize_config

from oracles import first_admissible_reference, to_mp

EPS = Fraction(3, 100)


def test_parameters(s2_config):
    p = search_parameters(s2_config)
    assert (p.growth_threshold, p.n_divisor, p.rational_period) == (1, 2, 1)
    s3 = synthesize_config(3, 1, seed=0).config
    assert search_parameters(s3).n_divisor == 2


def test_rational_period_from_angles():
    text = """
    [manifold]
    d = 2
    n = 1
    [[geodesic]]
    name = "c"
    initial_index = 1
    blocks = [{ type = "R", angle = "1/3" }]
    """
    cfg = parse_config(text)
    assert search_parameters(cfg).rational_period == 3


def test_anchor_tuple(s2_config):
    t = find_tuple(s2_config, EPS, 10**6, m0=1)
    assert (t.N, t.m, t.chi, t.deltas, t.jump_constants) == (17, (12, 5), (0, 1), (0, 1), (1, 1))
    assert t.index_at_2m == (33, 35)
    c1, c2 = s2_config.geodesics
    assert [c1.index(m) for m in (23, 24, 25)] == [33, 33, 35]
    assert [c2.index(m) for m in (9, 10, 11)] == [31, 35, 37]
    assert t.fracs[0] == ExactScalar.parse("-12+17/2√2")
    assert abs(float(t.fracs[0]) - 0.0208) < 1e-4


def test_anchor_matches_brute_force(s2_config):
    means = [g.mean_index for g in s2_config.geodesics]
    assert first_admissible_reference(means, EPS, 100) == (17, (0, 1))
    assert first_admissible_reference(means, EPS, 100, m0=2) == (24, (1, 0))
    assert find_tuple(s2_config, EPS, 10**6).N == 24


def test_exhaustion(s2_config):
    with pytest.raises(SearchExhausted):
        find_tuple(s2_config, EPS, 16, m0=1)


def test_large_epsilon_makes_m0_admissible(s2_config):
    inv = [g.mean_index.reciprocal() for g in s2_config.geodesics]
    for m0 in (1, 2, 3):
        assert admissible_chi(m0, inv, Fraction(1, 2)) is not None
        assert admissible_chi(m0, inv, Fraction(3, 4)) is not None
    # strict mode insists the first admissible N verifies
    with pytest.raises(VerificationFailure):
        find_tuple(s2_config, Fraction(1, 2), 1000, m0=1, strict=True)
    t = find_tuple(s2_config, Fraction(1, 2), 1000, m0=1)
    assert t.rejected > 0


def test_chi_prefers_zero_on_ties():
    x = ExactScalar.parse("1/3√2")
    f = x.frac_of_multiple(1)
    chi, _ = admissible_chi(1, [x], Fraction(9, 10))
    assert chi == (0,) and f < Fraction(9, 10) and 1 - f < Fraction(9, 10)


def test_paired_tuple(s2_config):
    first = find_tuple(s2_config, EPS, 10**6, m0=1)
    pair = find_paired_tuple(s2_config, first, EPS, 10**6)
    assert pair.N == 24 and pair.deltas == (1, 0)
    assert all(a + b == c for a, b, c in zip(first.deltas, pair.deltas, first.jump_constants))
    with pytest.raises(SearchExhausted):
        find_paired_tuple(s2_config, first, EPS, 20)


def test_claim3(s2_config):
    t = find_tuple(s2_config, EPS, 10**6, m0=1)
    res = claim3_check(s2_config, t)
    assert res.passed and res.lhs == -34 == res.rhs
    assert claim3_threshold(s2_config.geodesics, 1) == Fraction(1, 5)
    bad = dataclasses.replace(t, m=(13, 5))
    out = claim3_check(s2_config, bad)
    assert not out.passed and out.lhs == -36
    with pytest.raises(Claim3PreconditionError):
        claim3_check(s2_config, dataclasses.replace(t, epsilon=Fraction(1, 4)))


def test_claim3_precondition_resonance(s2_config):
    from cgindex.loop_betti import resonance_check
    broken = s2_config.with_geodesics([s2_config.geodesics[0]])
    t = find_tuple(broken, EPS, 10**6, m0=1)
    with pytest.raises(Claim3PreconditionError):
        claim3_check(broken, t, resonance_check(broken.geodesics, broken.manifold))


@settings(max_examples=60)
@given(st.integers(1, 400), st.integers(1, 400), st.sampled_from([2, 3, 5, 7]),
       st.sampled_from([Fraction(1, 10), Fraction(3, 100), Fraction(1, 1000)]))
def test_cf_matches_scan(p, q, D, eps):
    alpha = ExactScalar(0, Fraction(p, q), D)
    limit = 20000
    t_cf = first_admissible_cf(alpha, eps, limit)
    a = to_mp(alpha)
    t_ref = None
    for t in range(1, limit + 1):
        f = t * a - int(t * a)
        if f < float(eps) or 1 - f < float(eps):
            if admissible_chi(t, [alpha], eps) is not None:
                t_ref = t
                break
    assert t_cf == t_ref


def _two_geodesic(mu1):
    """S^2-type pair with 1/mu1 + 1/mu2 = 1, realized by single R blocks."""
    recs = []
    for name, mu in (("a", mu1), ("b", mu1 / (mu1 - 1))):
        i = mu.floor()
        i = i if i % 2 else i + 1
        if not i - 1 < mu < i + 1:
            i -= 2
        x = (mu - i + 1) / 2
        recs.append(GeodesicRecord(name, i, PoincareDecomposition([RotationBlock(x)])))
    return recs


@pytest.mark.parametrize("workers", ["1", "4"])
def test_scan_is_deterministic_across_workers(monkeypatch, s2_config, workers):
    monkeypatch.setenv("CGINDEX_WORKERS", workers)
    cfg = synthesize_config(3, 1, seed=11).config
    t = find_tuple(cfg, Fraction(1, 20), 10**6, strategy="scan")
    monkeypatch.setenv("CGINDEX_WORKERS", "1")
    assert find_tuple(cfg, Fraction(1, 20), 10**6, strategy="scan").N == t.N


def test_scan_and_cf_agree_single_geodesic(s2_config):
    one = s2_config.with_geodesics(s2_config.geodesics[:1])
    a = find_tuple(one, EPS, 10**5, m0=1, strategy="cf")
    b = find_tuple(one, EPS, 10**5, m0=1, strategy="scan")
    assert a.N == b.N
    means = [one.geodesics[0].mean_index]
    assert first_admissible_reference(means, EPS, 10**4)[0] <= a.N


@settings(max_examples=20)
@given(st.integers(1, 60), st.integers(61, 150), st.sampled_from([2, 3, 5]))
def test_first_admissible_matches_reference(p, q, D):
    mu1 = 1 + ExactScalar(0, Fraction(p, q), D)
    if not 1 < mu1 < 2:
        return
    recs = _two_geodesic(mu1)
    from cgindex.config import GeodesicConfig
    from cgindex.loop_betti import ManifoldClass
    cfg = GeodesicConfig(ManifoldClass(2, 1), D, tuple(recs))
    eps = Fraction(1, 20)
    params = search_parameters(cfg, 1)
    ref = first_admissible_reference([r.mean_index for r in recs], eps, 20000)
    from cgindex.cij_search import _candidates
    got = next(iter(_candidates(cfg, params, eps, 20000, "scan")), None)
    assert (got[0], got[1]) == ref if ref else got is None
