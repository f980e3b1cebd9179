import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import birkhoff_value, lp_transport, random_instance
from weakkam_ot.action import FREE, PENDULUM, fundamental_table
from weakkam_ot.errors import DomainError, PreconditionError
from weakkam_ot.fixtures import cosine, sine
from weakkam_ot.space_core import ProbMeasure, TorusGrid
from weakkam_ot.transport import (dirac_construction, dirac_support_condition,
                                  finite_mixture_construction, integerize, k_minus_from_pair,
                                  k_minus_value, k_plus_from_pair, k_plus_value, monge_check,
                                  net_approximation, net_of_support, pair_from_k_minus,
                                  pair_from_k_plus, reachable_covectors, recover_covector_measure,
                                  slack_table, solve_K_minus, solve_K_plus, solve_kantorovich,
                                  support_characterization)

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])
G = TorusGrid(1, 64)


def pm(w):
    return ProbMeasure(np.asarray(w, dtype=float))


# --------------------------------------------------------------- solver

def test_integerize_preserves_total():
    w = np.array([1 / 3, 1 / 3, 1 / 3])
    a = integerize(w, 10**12)
    assert a.sum() == 10**12 and a.max() - a.min() <= 1


def test_identity_instance(rng):
    c = rng.random((5, 5))
    np.fill_diagonal(c, 0)
    mu = ProbMeasure.normalized(rng.random(5) + 0.1)
    kr = solve_kantorovich(mu, mu, c)
    assert kr.value == pytest.approx(0, abs=1e-12) and kr.certified
    assert np.allclose(kr.plan.matrix, np.diag(mu.weights))


def test_two_point_forced_plan():
    kr = solve_kantorovich(pm([1, 0]), pm([0, 1]), C2)
    assert kr.value == pytest.approx(1.0) and kr.certified
    assert kr.plan.matrix.tolist() == [[0, 1], [0, 0]]


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_birkhoff_oracle(n, rng):
    for _ in range(10):
        c = rng.random((n, n)) * 10
        kr = solve_kantorovich(ProbMeasure.uniform(n), ProbMeasure.uniform(n), c)
        assert kr.value == pytest.approx(birkhoff_value(c), abs=1e-9)
        assert kr.certified


def test_lp_oracle(rng):
    for _ in range(20):
        mu, nu, c = random_instance(rng, rng.integers(1, 15), rng.integers(1, 15), sparse=0.3)
        kr = solve_kantorovich(pm(mu), pm(nu), c)
        assert abs(kr.value - lp_transport(mu, nu, c)) <= 1e-8
        assert kr.certified and abs(kr.gap) <= 1e-9 and kr.feasibility <= 1e-9
        assert kr.plan.is_coupling_of(pm(mu), pm(nu))
        assert kr.dual_value(pm(mu), pm(nu)) == pytest.approx(kr.value, abs=1e-9)


def test_shape_mismatch():
    with pytest.raises(DomainError):
        solve_kantorovich(pm([1, 0]), pm([0, 0, 1]), C2)


@given(st.integers(0, 2**32 - 1))
def test_weak_duality_for_admissible_pairs(seed):
    rng = np.random.default_rng(seed)
    mu, nu, c = random_instance(rng, 4, 5)
    phi = rng.normal(size=4)
    psi = (phi[:, None] + c).min(axis=0)          # admissible by construction
    assert psi @ nu - phi @ mu <= solve_kantorovich(pm(mu), pm(nu), c).value + 1e-9


# ----------------------------------------------------------------- (K-)/(K+)

def test_k_minus_trivial(rng):
    c = rng.random((4, 4))
    np.fill_diagonal(c, 0)
    mu = ProbMeasure.uniform(4)
    cert = solve_K_minus(mu, mu, c)
    assert cert.transform_side == pytest.approx(cert.potential @ mu.weights, abs=1e-9)
    assert k_minus_value(np.zeros(4), mu, mu, c) == pytest.approx(0.0)


def test_k_minus_two_point():
    cert = solve_K_minus(pm([1, 0]), pm([0, 1]), C2)
    phi = cert.potential
    assert cert.transform_side == pytest.approx(1 + phi[0], abs=1e-9)
    assert cert.plan_side == pytest.approx(1 + phi[0], abs=1e-9)
    cert = solve_K_plus(pm([1, 0]), pm([0, 1]), C2)
    assert cert.cost_side == pytest.approx(cert.potential[1] - 1, abs=1e-9)


def test_k_certificates_random(rng):
    for _ in range(20):
        mu, nu, c = random_instance(rng, 6, 6)
        for solve in (solve_K_minus, solve_K_plus):
            cert = solve(pm(mu), pm(nu), c)
            assert cert.certified
            assert abs(cert.transform_side - cert.plan_side) <= 1e-9
            assert abs(cert.plan_side - cert.cost_side) <= 1e-9


def test_conversions(rng):
    for _ in range(10):
        mu, nu, c = random_instance(rng, 7, 5)
        kr = solve_kantorovich(pm(mu), pm(nu), c)
        phi = k_minus_from_pair(kr.phi, kr.psi, pm(mu), pm(nu), c)
        phi2, psi2 = pair_from_k_minus(phi, pm(mu), pm(nu), c)
        assert psi2 @ nu - phi2 @ mu == pytest.approx(kr.value, abs=1e-9)
        psi = k_plus_from_pair(kr.phi, kr.psi, pm(mu), pm(nu), c)
        phi3, psi3 = pair_from_k_plus(psi, pm(mu), pm(nu), c)
        assert psi3 @ nu - phi3 @ mu == pytest.approx(kr.value, abs=1e-9)
        assert k_plus_value(psi, pm(mu), pm(nu), c) == pytest.approx(kr.value, abs=1e-9)


def test_conversion_rejects_bad_input(rng):
    mu, nu, c = random_instance(rng, 5, 5)
    kr = solve_kantorovich(pm(mu), pm(nu), c)
    with pytest.raises(PreconditionError):
        k_minus_from_pair(kr.phi - 1.0, kr.psi, pm(mu), pm(nu), c)
    with pytest.raises(PreconditionError):
        pair_from_k_minus(kr.phi + rng.normal(size=5), pm(mu), pm(nu), c)


# ------------------------------------------------------------ support law

def test_support_trivial(rng):
    c = rng.random((4, 4))
    np.fill_diagonal(c, 0)
    mu = ProbMeasure.uniform(4)
    rep = support_characterization(np.zeros(4), mu, mu, c)
    assert rep.supported and rep.worst_slack == 0


def test_support_two_point():
    kr = solve_kantorovich(pm([1, 0]), pm([0, 1]), C2)
    rep = support_characterization(kr.phi, pm([1, 0]), pm([0, 1]), C2)
    assert rep.supported and rep.solves_k_minus
    assert slack_table(kr.phi, C2).values[0, 1] == pytest.approx(0, abs=1e-12)


def test_support_perturbation(rng):
    rejected = 0
    for _ in range(30):
        mu, nu, c = random_instance(rng, 6, 6)
        kr = solve_kantorovich(pm(mu), pm(nu), c)
        bad = kr.phi + rng.normal(scale=1.0, size=6)
        rep = support_characterization(bad, pm(mu), pm(nu), c)
        assert rep.supported == rep.solves_k_minus or not rep.solves_k_minus
        if not rep.solves_k_minus:
            rejected += 1
            assert not rep.supported
    assert rejected >= 25


def test_dirac_support_condition():
    phi = np.array([0.0, 0.0, 1.0])
    c = np.array([[0.0], [0.0], [0.5]])
    assert dirac_support_condition(phi, pm([1, 0, 0]), 0, c)
    assert dirac_support_condition(phi, pm([0.5, 0.5, 0]), 0, c)
    assert not dirac_support_condition(phi, pm([0.5, 0, 0.5]), 0, c)


# ------------------------------------------------------------------ Dirac

DIRAC_CASES = [(FREE, sine(G, 0.1), 10, 1), (FREE, cosine(G, 0.2), 32, 2),
               (PENDULUM, sine(G, 0.1), 10, 1), (PENDULUM, cosine(G, 0.2), 32, 2)]


@pytest.mark.parametrize("model,phi,y0,k", DIRAC_CASES)
def test_dirac_round_trip(model, phi, y0, k):
    cov = reachable_covectors(model, G, phi, y0, 0.5)
    assert cov.size == k
    res = dirac_construction(model, G, phi, y0, 0.5, cov)
    assert res.certified and res.mu.support.size == k
    back = recover_covector_measure(model, G, phi, y0, 0.5, res.mu)
    assert back.in_hull and back.roundtrip_ok
    assert np.abs(np.sort(back.covectors) - np.sort(cov)).max() <= 0.1


@pytest.mark.parametrize("model", [FREE, PENDULUM])
def test_dirac_extreme_gradient(model):
    phi = cosine(G, 0.2)
    cov = reachable_covectors(model, G, phi, 32, 0.5)
    one = dirac_construction(model, G, phi, 32, 0.5, cov, [1.0, 0.0])
    assert one.certified and one.mu.support.size == 1


def test_dirac_rejects_unreachable_covector():
    phi = cosine(G, 0.2)
    with pytest.raises(PreconditionError):
        dirac_construction(FREE, G, phi, 32, 0.5, [0.0])
    with pytest.raises(PreconditionError):
        recover_covector_measure(FREE, G, phi, 32, 0.5, ProbMeasure.dirac(64, 32))


def test_mixture(rng):
    phi = sine(G, 0.1)
    single = finite_mixture_construction(FREE, G, phi, [10], [1.0], 0.5)
    d = dirac_construction(FREE, G, phi, 10, 0.5, reachable_covectors(FREE, G, phi, 10, 0.5))
    assert np.allclose(single.mu.weights, d.mu.weights)
    mix = finite_mixture_construction(FREE, G, phi, [10, 40], [0.5, 0.5], 0.5)
    assert mix.certified and mix.union_ok and mix.mu.support.size == 2
    c = fundamental_table(FREE, G, 0, 0.5).values
    parts = [k_minus_value(phi, comp.mu, ProbMeasure.dirac(64, y), c)
             for comp, y in zip(mix.components, [10, 40])]
    assert mix.value == pytest.approx(0.5 * sum(parts), abs=1e-9)


def test_net_of_support():
    nu = ProbMeasure.uniform(64, on=[0, 8, 16, 24, 32, 40, 48, 56])
    centers, r = net_of_support(G, nu, 8)
    assert centers.tolist() == [0, 8, 16, 24, 32, 40, 48, 56] and np.allclose(r, 1 / 8)
    centers, r = net_of_support(G, nu, 2)
    assert centers.tolist() == [0, 32] and r.sum() == pytest.approx(1)


def test_net_approximation_free():
    nu = ProbMeasure.uniform(64, on=[0, 8, 16, 24, 32, 40, 48, 56])
    res = net_approximation(FREE, G, sine(G, 0.1), nu, 0.5)
    assert res.w1_ok and res.stable_values and all(res.membership.values())
    assert [s.w1 for s in res.steps][2:] == [0, 0, 0]
    assert all(s.mixture.certified for s in res.steps)


# ------------------------------------------------------------------ Monge

def test_monge_identity(rng):
    c = rng.random((4, 4))
    np.fill_diagonal(c, 0)
    mu = ProbMeasure.uniform(4)
    rep = monge_check([0, 1, 2, 3], mu, mu, c, phi=np.zeros(4))
    assert rep.optimal and rep.integral_identity and rep.in_subdiff and rep.implications_ok


def test_monge_cyclic_shift():
    c = np.array([[5.0, 0.0, 5.0], [5.0, 5.0, 0.0], [0.0, 5.0, 5.0]])
    mu = ProbMeasure.uniform(3)
    rep = monge_check([1, 2, 0], mu, mu, c)
    assert rep.optimal and rep.integral_identity and rep.in_subdiff and rep.implications_ok
    assert rep.map_cost == pytest.approx(0.0)


def test_monge_suboptimal():
    c = np.array([[5.0, 0.0, 5.0], [5.0, 5.0, 0.0], [0.0, 5.0, 5.0]])
    mu = ProbMeasure.uniform(3)
    rep = monge_check([0, 1, 2], mu, mu, c)
    assert not rep.optimal and not rep.in_subdiff and rep.implications_ok
    kr = solve_kantorovich(mu, mu, c)
    for phi in (kr.phi, kr.phi + 1.0, np.zeros(3)):
        assert not monge_check([0, 1, 2], mu, mu, c, phi=phi).in_subdiff


def test_monge_surrogate_and_precondition(rng):
    n = 16
    x = np.arange(n) / n
    c = np.abs(x[:, None] - x[None, :]) ** 2
    mu = ProbMeasure.uniform(n)
    rep = monge_check(np.arange(n), mu, mu, c)
    assert rep.atomless_surrogate and rep.optimal
    with pytest.raises(PreconditionError):
        monge_check(np.zeros(n, dtype=int), mu, mu, c)
