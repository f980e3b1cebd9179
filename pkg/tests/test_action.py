import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakkam_ot.action import (FREE, PENDULUM, LagrangianModel, PhasePoint,
                               aubry_and_static_classes, fundamental_solution, fundamental_table,
                               hamiltonian_flow, lax_oleinik_evolve, leapfrog, mane_critical_value,
                               markov_defect, min_plus, peierls_table, static_class_in_superdiff,
                               weak_kam_pair)
from weakkam_ot.errors import DomainError
from weakkam_ot.space_core import TorusGrid, torus_distance_1d

G32 = TorusGrid(1, 32)


# ------------------------------------------------------------------- model

def test_model_validation():
    with pytest.raises(DomainError):
        LagrangianModel("pendulum")
    with pytest.raises(DomainError):
        LagrangianModel(dim=3)
    with pytest.raises(DomainError):
        LagrangianModel(dt=0)


def test_potential_and_force():
    x = np.linspace(0, 1, 9)
    assert np.allclose(PENDULUM.V(x), np.cos(2 * np.pi * x))
    h = 1e-6
    assert np.allclose(PENDULUM.force(x), -(PENDULUM.V(x + h) - PENDULUM.V(x - h)) / (2 * h), atol=1e-6)
    assert LagrangianModel("shifted_cosine").V(0.0) == pytest.approx(6.0)
    assert PENDULUM.oscillation() == 2.0 and FREE.oscillation() == 0.0


# -------------------------------------------------------------------- flow

@given(st.floats(0, 1, exclude_max=True), st.floats(-3, 3), st.floats(0.01, 2))
def test_free_flow_closed_form(x0, p0, t):
    end = hamiltonian_flow(FREE, PhasePoint(x0, p0), 0.0, t).end
    assert abs(torus_distance_1d(end.x, x0 + p0 * t)) <= 1e-9
    assert end.p == pytest.approx(p0)


def test_pendulum_equilibrium():
    end = hamiltonian_flow(PENDULUM, PhasePoint(0.0, 0.0), 0.0, 1.0).end
    assert float(end.x) == 0.0 and float(end.p) == 0.0


def test_pendulum_self_convergence():
    start = PhasePoint(0.13, 0.7)
    a = hamiltonian_flow(PENDULUM, start, 0.0, 1.0, dt=1e-3).end
    b = hamiltonian_flow(PENDULUM, start, 0.0, 1.0, dt=1e-4).end
    assert torus_distance_1d(a.x, b.x) <= 1e-6 and abs(a.p - b.p) <= 1e-6


@given(st.floats(0, 1, exclude_max=True), st.floats(-3, 3))
def test_energy_drift(x0, p0):
    orbit = hamiltonian_flow(PENDULUM, PhasePoint(x0, p0), 0.0, 1.0, dt=1e-3)
    assert orbit.energy_drift(PENDULUM) <= 1e-6


def test_second_order_mode_converges():
    start = PhasePoint(0.13, 0.7)
    ends = [hamiltonian_flow(PENDULUM, start, 0, 1, dt=dt, order=2).end.p for dt in (4e-3, 2e-3, 1e-3)]
    ratio = abs(ends[0] - ends[1]) / abs(ends[1] - ends[2])
    assert 3.5 <= ratio <= 4.5


def test_flow_composition():
    start = PhasePoint(0.2, -0.4)
    whole = hamiltonian_flow(PENDULUM, start, 0.0, 1.0).end
    mid = hamiltonian_flow(PENDULUM, start, 0.0, 0.4).end
    two = hamiltonian_flow(PENDULUM, mid, 0.4, 1.0).end
    assert torus_distance_1d(whole.x, two.x) <= 1e-6 and abs(whole.p - two.p) <= 1e-6


def test_backward_flow_inverts():
    x, v, _ = leapfrog(PENDULUM, 0.3, 0.5, 0.7)
    xb, vb, _ = leapfrog(PENDULUM, x, v, -0.7)
    assert abs(xb - 0.3) <= 1e-10 and abs(vb - 0.5) <= 1e-10


# ------------------------------------------------------- fundamental solution

def test_free_fundamental_solution_examples():
    assert fundamental_solution(FREE, 0, 1, 0.0, 0.5).value == pytest.approx(0.125, abs=1e-12)
    assert fundamental_solution(FREE, 0, 1, 0.3, 0.3).value == pytest.approx(0.0, abs=1e-12)
    a = fundamental_solution(FREE, 0, 1, 0.1, 0.35).value
    b = fundamental_solution(FREE, 0, 2, 0.1, 0.35).value
    assert b <= a


@given(st.integers(0, 31), st.integers(0, 31), st.sampled_from([0.25, 0.5, 1.0]))
def test_free_table_closed_form(i, j, t):
    tab = fundamental_table(FREE, G32, 0.0, t)
    d = torus_distance_1d(G32.coords[i], G32.coords[j])
    assert abs(tab.values[i, j] - d**2 / (2 * t)) <= 1e-9


def test_two_dimensional_free_table():
    g = TorusGrid(2, 8)
    tab = fundamental_table(LagrangianModel(dim=2), g, 0, 0.5)
    assert tab.values[0, 9] == pytest.approx((2 / 64) / (2 * 0.5))


def test_pendulum_curve_is_minimizer():
    r = fundamental_solution(PENDULUM, 0, 0.5, 0.1, 0.3)
    assert abs(r.xs[0] - 0.1) <= 1e-12 and torus_distance_1d(r.xs[-1], 0.3) <= 1e-8
    # a straight competitor pays more
    t = np.linspace(0, 0.5, 2001)
    line = 0.1 + 0.2 * t / 0.5
    L = 0.5 * 0.4**2 - PENDULUM.V(line)
    assert r.value <= np.trapezoid(L, t) + 1e-9


def test_markov_defect():
    assert markov_defect(FREE, G32, 0.5, 1.0) <= 2 / 32
    assert markov_defect(PENDULUM, G32, 0.5, 1.0) <= 2 / 32


def test_min_plus():
    a = np.array([[0.0, 2.0], [1.0, 0.0]])
    assert min_plus(a, a).tolist() == [[0.0, 2.0], [1.0, 0.0]]


def test_table_csv(tmp_path):
    fundamental_table(FREE, G32, 0, 1).to_csv(tmp_path / "h.csv")
    head = (tmp_path / "h.csv").read_text().splitlines()
    assert head[0] == "t1,t2,x_index,y_index,h,v0" and len(head) == 1 + 32 * 32


# ----------------------------------------------------------- Lax-Oleinik

def test_lax_oleinik_constant():
    for d in "-+":
        assert np.allclose(lax_oleinik_evolve(FREE, G32, np.full(32, 2.5), 0, 1, d), 2.5)


def test_lax_oleinik_roundtrip_smooth():
    g = TorusGrid(1, 64)
    phi = 0.05 * np.sin(2 * np.pi * g.coords)
    up = lax_oleinik_evolve(FREE, g, phi, 0, 0.05, "+")
    back = lax_oleinik_evolve(FREE, g, up, 0, 0.05, "-")
    assert np.abs(back - phi).max() <= 2e-3


def test_lax_oleinik_semigroup():
    phi = np.random.default_rng(1).random(32)
    one = lax_oleinik_evolve(FREE, G32, phi, 0, 1.0)
    two = lax_oleinik_evolve(FREE, G32, lax_oleinik_evolve(FREE, G32, phi, 0, 0.5), 0.5, 1.0)
    assert np.abs(one - two).max() <= 2 / 32


# --------------------------------------------------- critical value, Peierls

def test_mane_values():
    assert mane_critical_value(FREE).value == 0.0
    assert mane_critical_value(PENDULUM).value == pytest.approx(1.0, abs=1e-9)
    assert mane_critical_value(LagrangianModel("shifted_cosine")).value == pytest.approx(6.0, abs=1e-9)


@pytest.fixture(scope="module")
def pendulum_peierls():
    return peierls_table(PENDULUM, G32)


def test_peierls_pendulum(pendulum_peierls):
    h = pendulum_peierls.values
    assert h[0, 0] == pytest.approx(0.0, abs=1e-2)
    # triangle inequality on all triples
    tri = h[:, :, None] + h[None, :, :]      # h(x,z) + h(z,y) indexed [x, z, y]
    assert np.all(h <= tri.min(axis=1) + 1e-2)
    part = aubry_and_static_classes(pendulum_peierls)
    assert part.aubry.tolist() == [0] and len(part.classes) == 1
    assert np.all(part.d[np.ix_(part.aubry, part.aubry)] >= -1e-3)


def test_weak_kam_pendulum(pendulum_peierls):
    pair = weak_kam_pair(PENDULUM, G32)
    assert pair.fixed_point_defect <= 1e-4
    assert pair.u_minus[0] - pair.u_plus[0] == pytest.approx(pendulum_peierls.values[0, 0], abs=1e-2)
    part = aubry_and_static_classes(pendulum_peierls)
    assert static_class_in_superdiff(pair, pendulum_peierls, part, 0)


def test_weak_kam_free():
    pair = weak_kam_pair(FREE, G32)
    assert np.abs(pair.u_minus).max() <= 1e-6 and np.abs(pair.u_plus).max() <= 1e-6
