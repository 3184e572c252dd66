import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biharm import catalog, jets
from biharm import geometry as geo
from biharm.bcv import BCVParams, bcv_frame
from biharm.errors import InvalidSubmersion, RankDeficient, StructureViolation
from biharm.geometry import euclidean, whole_space
from biharm.submersion import (
    FrameTriple,
    SubmersionSpec,
    base_curvature_direct,
    base_gauss_curvature,
    build_frame,
    differential,
    integrability_data,
    is_riemannian_submersion,
    require_riemannian,
    rotate_frame,
    tension,
    vertical_direction,
)

ENTRIES = catalog.all_entries()
IDS = [f"{e.name}{e.params}" for e in ENTRIES]
one = lambda c: (1.0, 0.0)  # noqa: E731
two = lambda c: (0.0, 1.0)  # noqa: E731


def flat_spec(scale=1.0, projection=lambda c: (c[0], c[1])):
    return SubmersionSpec("flat", projection, euclidean(3), euclidean(2, scale), (one, two), whole_space(3))


def vecs(V, P):
    c = geo.as_coords(P)
    return geo._vec_values(V(c), c)


# -- differential and vertical direction ----------------------------------------


def test_differential_coordinate_projection():
    np.testing.assert_array_equal(differential(flat_spec(), (0.3, 0.1, -0.4)), [[1, 0, 0], [0, 1, 0]])


def test_differential_nil():
    J = differential(catalog.nil_example().spec, (1.0, 2.0, 3.0))
    np.testing.assert_allclose(J, [[1, 0, 0], [1, 0.5, 1]])


@pytest.mark.parametrize("entry", ENTRIES, ids=IDS)
def test_rank_two(entry):
    J = differential(entry.spec, entry.spec.domain.sample(100, 11))
    assert np.min(np.linalg.svd(J, compute_uv=False)[:, -1]) > 1e-6


def test_rank_deficient():
    spec = flat_spec(projection=lambda c: (c[0], 2 * c[0]))
    with pytest.raises(RankDeficient):
        vertical_direction(spec, (0.1, 0.2, 0.3))


def test_vertical_flat_is_plus_z():
    np.testing.assert_allclose(vertical_direction(flat_spec(), (0.2, 0.4, 0.1)), [0, 0, 1])


def test_vertical_nil():
    e = catalog.nil_example()
    P = e.spec.domain.sample(20, 2)
    x = P[:, 0]
    E = bcv_frame(BCVParams(0.0, 1.0))
    s = np.sqrt(1 + x * x)[:, None]
    want = vecs(E[1], P) / s - x[:, None] * vecs(E[2], P) / s
    got = vertical_direction(e.spec, P)
    sign = np.sign(np.sum(got * want, axis=-1))[:, None]
    np.testing.assert_allclose(got, sign * want, atol=1e-13)
    assert np.all(sign == sign[0])


@pytest.mark.parametrize("entry", ENTRIES, ids=IDS)
def test_adapted_frame_orthonormal(entry):
    spec = entry.spec
    P = spec.domain.sample(100, 12)
    G = geo.gram(spec.metric, tuple(build_frame(spec)), P)
    np.testing.assert_allclose(G, np.broadcast_to(np.eye(3), G.shape), atol=1e-10)


# -- Riemannian submersion test --------------------------------------------------


def test_flat_is_riemannian():
    ok, dev = is_riemannian_submersion(flat_spec(), whole_space(3).sample(10))
    assert ok and dev == 0.0


def test_pr1_is_riemannian():
    spec = catalog.pr1_family(2.0, 1.0).spec
    ok, dev = is_riemannian_submersion(spec, spec.domain.sample(50, 1))
    assert ok and dev < 1e-10


def test_scaled_base_fails():
    ok, dev = is_riemannian_submersion(flat_spec(4.0), whole_space(3).sample(10))
    assert not ok
    assert dev == pytest.approx(3.0)
    with pytest.raises(InvalidSubmersion) as info:
        require_riemannian(flat_spec(4.0), whole_space(3).sample(10))
    assert info.value.deviation == pytest.approx(3.0)


# -- frames ----------------------------------------------------------------------


@pytest.mark.parametrize("a, b", [(1.0, 0.0), (2.0, 1.0), (0.5, 3.0)])
def test_pr1_frame(a, b):
    spec = catalog.pr1_family(a, b).spec
    P = spec.domain.sample(20, 3)
    y = P[:, 1]
    s = np.sqrt(1 + b * b)
    z = np.zeros_like(y)
    want = [
        np.stack([z, y / a, z], -1),
        np.stack([-b * y / (a * s), z, z + s], -1),
        np.stack([y / (a * s), z, z], -1),
    ]
    for e, w in zip(build_frame(spec), want):
        np.testing.assert_allclose(vecs(e, P), w, atol=1e-13)


def test_h2r_exp_frame():
    m = -0.25
    spec = catalog.h2r_exp_family(m).spec
    P = spec.domain.sample(20, 4)
    e1, e2, e3 = (vecs(e, P) for e in build_frame(spec))
    np.testing.assert_allclose(e1, np.broadcast_to([0, 1, 0], e1.shape), atol=1e-14)
    np.testing.assert_allclose(e2, np.broadcast_to([0, 0, 1], e2.shape), atol=1e-14)
    np.testing.assert_allclose(e3[:, 0], np.exp(-np.sqrt(-4 * m) * P[:, 1]), rtol=1e-13)


def test_nil_frame_matches_closed_form():
    spec = catalog.nil_example().spec
    P = spec.domain.sample(20, 5)
    x = P[:, 0]
    s = np.sqrt(1 + x * x)[:, None]
    E = [vecs(Ei, P) for Ei in bcv_frame(BCVParams(0.0, 1.0))]
    e1, e2 = (vecs(e, P) for e in build_frame(spec)[:2])
    np.testing.assert_allclose(e1, E[0], atol=1e-13)
    np.testing.assert_allclose(e2, -(x[:, None] / s) * E[1] - E[2] / s, atol=1e-13)


# -- integrability data ---------------------------------------------------------


def test_pr1_data():
    spec = catalog.pr1_family(2.0, 1.0).spec
    fr = build_frame(spec)
    d = integrability_data(fr, spec.metric).at(spec.domain.sample(30, 6))
    np.testing.assert_allclose(d["kappa1"], 0.5, atol=1e-13)
    np.testing.assert_allclose(d["sigma"], 0.25, atol=1e-13)
    for k in ("f1", "f2", "f3", "kappa2"):
        np.testing.assert_allclose(d[k], 0.0, atol=1e-13)


def test_nil_data_at_x_one():
    spec = catalog.nil_example().spec
    P = np.array([[1.0, 0.3, -0.5], [1.0, -0.8, 0.9]])
    d = integrability_data(build_frame(spec), spec.metric).at(P)
    np.testing.assert_allclose(d["f2"], 0.5, atol=1e-14)
    np.testing.assert_allclose(d["kappa1"], -0.5, atol=1e-14)
    for k in ("sigma", "f1", "kappa2", "f3"):
        np.testing.assert_allclose(d[k], 0.0, atol=1e-14)


def test_h2r_exp_data():
    spec = catalog.h2r_exp_family(-0.25).spec
    d = integrability_data(build_frame(spec), spec.metric).at(spec.domain.sample(30, 7))
    np.testing.assert_allclose(d["kappa1"], -1.0, atol=1e-13)
    for k in ("f1", "f2", "sigma", "kappa2", "f3"):
        np.testing.assert_allclose(d[k], 0.0, atol=1e-13)


@settings(max_examples=15)
@given(st.floats(0.3, 3.0), st.floats(-3.0, 3.0), st.integers(0, 1000))
def test_pr1_data_constant(a, b, seed):
    spec = catalog.pr1_family(a, b).spec
    d = integrability_data(build_frame(spec), spec.metric).at(spec.domain.sample(5, seed))
    np.testing.assert_allclose(d["kappa1"], 1 / a, rtol=1e-11)
    np.testing.assert_allclose(d["sigma"], b / (2 * a), atol=1e-11)


def test_natural_frame_f3():
    """Rotating the horizontal pair by an angle field t gives f3 = -e3(t)."""
    spec = catalog.nil_example().spec
    t = lambda c: 0.3 * c[2] + 0.2 * c[0] * c[1]  # noqa: E731
    fr = rotate_frame(build_frame(spec), t)
    assert fr.flag == "natural"
    P = spec.domain.sample(20, 8)
    c = geo.as_coords(P)
    data = integrability_data(fr, spec.metric, check_at=c)
    e3t = geo.values(geo.derivative_field(fr.e3, t)(c), (20,))
    np.testing.assert_allclose(data.at(c)["f3"], -e3t, atol=1e-13)
    assert np.max(np.abs(e3t)) > 1e-2


def test_structure_violation():
    def e2(c):
        return (0.0, jets.cos(c[0]), jets.sin(c[0]))

    def e3(c):
        return (0.0, -jets.sin(c[0]), jets.cos(c[0]))

    fr = FrameTriple(lambda c: (1.0, 0.0, 0.0), e2, e3)
    with pytest.raises(StructureViolation):
        integrability_data(fr, euclidean(), check_at=whole_space(3).sample(5))


# -- tension and base curvature ----------------------------------------------------


def test_flat_tension_zero():
    spec = flat_spec()
    tau, n = tension(spec, build_frame(spec), whole_space(3).sample(5))
    assert np.all(tau == 0.0) and np.all(n == 0.0)


@pytest.mark.parametrize("entry, norm", [(catalog.pr1_family(1.0, 0.0), 1.0), (catalog.h2r_exp_family(-0.25), 1.0),
                                         (catalog.pr1_family(0.5, 3.0), 2.0), (catalog.h2r_exp_family(-1.0), 2.0)])
def test_tension_norm(entry, norm):
    spec = entry.spec
    _, n = tension(spec, build_frame(spec), spec.domain.sample(30, 9))
    np.testing.assert_allclose(n, norm, rtol=1e-12)


def test_base_curvature():
    for entry, want in [(catalog.pr1_family(1.0, 1.0), 0.0), (catalog.flat_projection(), 0.0)]:
        spec = entry.spec
        fr = build_frame(spec)
        K = base_gauss_curvature(integrability_data(fr, spec.metric), fr, spec.domain.sample(10))
        np.testing.assert_allclose(K, want, atol=1e-12)
    spec = catalog.nil_example().spec
    fr = build_frame(spec)
    P = np.array([[1.0, 0.5, 0.5]])
    np.testing.assert_allclose(base_gauss_curvature(integrability_data(fr, spec.metric), fr, P), -0.25, atol=1e-13)
    np.testing.assert_allclose(base_curvature_direct(spec, P), -0.25, atol=1e-13)


def test_bcv_z_base_curvature():
    spec = catalog.bcv_z_projection(-0.25, 0.0).spec
    np.testing.assert_allclose(base_curvature_direct(spec, spec.domain.sample(10)), -1.0, atol=1e-12)
