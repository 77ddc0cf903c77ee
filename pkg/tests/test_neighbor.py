import pytest

from ifskel.errors import NotSingleMatrix
from ifskel.geometry import Similitude, approx_eq, canonical_key, compose, inverse
from ifskel.ifs import bounding_ball
from ifskel.neighbor import (
    CAP_EXCEEDED,
    FINITE_TYPE,
    ball_overlap_prune,
    basic_neighbor_maps,
    build_neighbor_graph,
    dstar_discreteness_check,
    is_feasible,
    label_str,
    successors,
)

from corpus import (
    PROPERTY_CORPUS,
    TERDRAGON_DELTA_EDGES,
    TERDRAGON_F,
    get_delta,
    get_ifs,
)
from oracles import basic_map_touches


def test_basic_neighbor_maps_counts():
    assert len(basic_neighbor_maps(get_ifs("interval"))) == 2
    assert len(basic_neighbor_maps(get_ifs("terdragon"))) == 6
    vs = basic_neighbor_maps(get_ifs("fourstar"))
    assert len(vs) == 12
    # f_1 = S_1^-1 o S_2 (translation by 2i) and f_6 = f_1^-1 both occur.
    by_wit = {v.witness: v for v in vs}
    f1 = by_wit[((2,), (1,))].map
    f6 = by_wit[((1,), (2,))].map
    assert approx_eq(inverse(f1), f6, 1e-9)
    assert abs(f1.t - 2j) < 1e-12


def test_feasibility_window():
    carpet = get_ifs("carpet")  # r_min = 1/3
    assert is_feasible(carpet, Similitude(1.0))
    assert is_feasible(carpet, Similitude(3.0))       # equals 1/r_min: kept
    assert not is_feasible(carpet, Similitude(1.0 / 3.0))  # equals r_min: strict
    assert not is_feasible(carpet, Similitude(0.2))
    assert not is_feasible(carpet, Similitude(3.5))


def test_ball_overlap_prune():
    interval = get_ifs("interval")
    ball = bounding_ball(interval)
    slack = 1e-9 * ball.radius
    assert ball_overlap_prune(Similitude.identity(), ball, slack)

    far = Similitude(1.0, tx=10.0 * ball.radius)
    assert not ball_overlap_prune(far, ball, slack)

    carpet_ball = bounding_ball(get_ifs("carpet"))
    near = Similitude(1.0, tx=1.0)
    assert ball_overlap_prune(near, carpet_ball, 1e-9 * carpet_ball.radius)


def test_terdragon_delta_golden():
    """The published neighbor graph: 6 vertices and exactly 12 labeled edges."""
    delta = get_delta("terdragon")
    assert delta.status == FINITE_TYPE
    assert delta.vertex_count == 6
    assert delta.edge_count == 12

    key_of = {name: delta.basic_keys[pair] for name, pair in TERDRAGON_F.items()}
    assert all(k in delta.vertices for k in key_of.values())
    expected = {
        (key_of[src], label, key_of[dst]) for src, label, dst in TERDRAGON_DELTA_EDGES
    }
    got = {(e.src, e.label, e.dst) for e in delta.edges}
    assert got == expected


def test_terdragon_successors_include_published_moves():
    delta = get_delta("terdragon")
    ifs = get_ifs("terdragon")
    f1 = delta.vertices[delta.basic_keys[(2, 3)]]
    moves = {}
    for label, g, _ in successors(ifs, f1, uniform=True):
        if ball_overlap_prune(g, delta.ball, 1e-9 * delta.ball.radius):
            moves[label] = canonical_key(g, delta.quantum)
    assert moves[(3, 1)] == f1.key
    assert moves[(3, 2)] == delta.basic_keys[(1, 3)]


def test_carpet_survivors_match_brute_force():
    """Basic-map survival agrees with the sample-overlap oracle (depth 5)."""
    delta = get_delta("carpet")
    assert delta.status == FINITE_TYPE
    carpet = get_ifs("carpet")
    for i in range(1, 9):
        for j in range(1, 9):
            if i == j:
                continue
            assert delta.basic_survives(j, i) == basic_map_touches(carpet, i, j, depth=5)


def test_carpet_survivors_are_grid_translations():
    delta = get_delta("carpet")
    # True neighbors of the carpet are the eight unit translations between
    # touching sub-squares.
    expected = {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}
    got = set()
    for v in delta.vertices.values():
        assert v.map.scale == pytest.approx(1.0, rel=1e-9)
        got.add((round(v.map.t.real), round(v.map.t.imag)))
        assert abs(v.map.t - complex(round(v.map.t.real), round(v.map.t.imag))) < 1e-9
    assert got == expected


def test_kenyon_hits_cap():
    delta = get_delta("kenyon")
    assert delta.status == CAP_EXCEEDED
    assert delta.vertex_count > 20_000


def test_cap_applies_to_seed_vertices_too():
    delta = build_neighbor_graph(get_ifs("interval"), max_vertices=1)
    assert delta.status == CAP_EXCEEDED


@pytest.mark.parametrize("name", PROPERTY_CORPUS + ("interval3",))
def test_witness_words_are_non_comparable_and_recompose(name):
    ifs = get_ifs(name)
    delta = get_delta(name)
    for v in delta.vertices.values():
        assert v.witness is not None
        direct, inv = v.witness
        shorter = min(len(direct), len(inv))
        assert direct[:shorter] != inv[:shorter]  # non-comparable words
        recomposed = compose(inverse(ifs.word_map(inv)), ifs.word_map(direct))
        assert approx_eq(recomposed, v.map, 1e-6 * delta.ball.radius)


@pytest.mark.parametrize("name", PROPERTY_CORPUS + ("interval3",))
def test_every_vertex_has_out_degree(name):
    delta = get_delta(name)
    assert delta.status == FINITE_TYPE
    for key in delta.vertices:
        assert len(delta.out_edges(key)) >= 1


@pytest.mark.parametrize("name", PROPERTY_CORPUS + ("interval3",))
def test_edge_recomposition_consistency(name):
    """Recomposing along each label reproduces the target map."""
    ifs = get_ifs(name)
    delta = get_delta(name)
    inv_maps = [inverse(m) for m in ifs.maps]
    tol = 16.0 * delta.quantum
    for e in delta.edges:
        f = delta.vertices[e.src].map
        j, i = e.label
        g = f
        if i:
            g = compose(g, ifs.maps[i - 1])
        if j:
            g = compose(inv_maps[j - 1], g)
        assert approx_eq(g, delta.vertices[e.dst].map, tol), label_str(e.label)


@pytest.mark.parametrize("name", PROPERTY_CORPUS)
def test_vertex_inverse_symmetry(name):
    """h survives iff h^-1 does, whenever h^-1 is feasible too.

    All corpus survivors here have ratio 1, so the window is symmetric.
    """
    ifs = get_ifs(name)
    delta = get_delta(name)
    for v in delta.vertices.values():
        inv = inverse(v.map)
        assert is_feasible(ifs, inv)
        assert canonical_key(inv, delta.quantum) in delta.vertices


@pytest.mark.parametrize("name", ("terdragon", "carpet", "interval3"))
def test_build_is_deterministic(name):
    a = build_neighbor_graph(get_ifs(name))
    b = build_neighbor_graph(get_ifs(name))
    assert list(a.vertices) == list(b.vertices)
    assert a.edges == b.edges
    assert a.status == b.status


def test_general_mode_window_blocks_right_moves_near_lower_bound():
    # From a map of scale 2*r_min, right-composition lands on or below r_min
    # (strict bound), so only inverse-side moves survive.
    ifs = get_ifs("interval3")  # ratios 1/2, 1/4, 1/4
    delta = get_delta("interval3")
    for v in delta.vertices.values():
        if v.map.scale == pytest.approx(0.5):
            labels = [lab for lab, _, _ in successors(ifs, v, uniform=False)]
            assert labels and all(lab[1] == 0 for lab in labels)


def test_general_mode_on_uneven_interval():
    delta = get_delta("interval3")
    assert delta.status == FINITE_TYPE
    assert not delta.uniform
    # Touching translations x -> a*x + b with image meeting [0, 1] at an
    # endpoint: b = 1 (right neighbors) or b = -a (left neighbors).
    for v in delta.vertices.values():
        a, b = v.map.scale, v.map.t.real
        assert abs(v.map.t.imag) < 1e-9
        assert abs(b - 1.0) < 1e-9 or abs(b + a) < 1e-9
    assert delta.vertex_count == 8


def test_dstar_terdragon_lattice_gap():
    # Difference sums live in 3*(Z + Z*omega): 7 elements of norm <= 4,
    # minimum gap 3.
    report = dstar_discreteness_check(get_ifs("terdragon"), horizon=6, bound=4.0)
    assert report.count == 7
    assert report.min_gap >= 1.0
    assert report.min_gap == pytest.approx(3.0, rel=1e-9)


def test_dstar_carpet_integer_lattice():
    report = dstar_discreteness_check(get_ifs("carpet"), horizon=6)
    assert report.min_gap >= 1.0 - 1e-9


def test_dstar_kenyon_gap_collapses():
    report = dstar_discreteness_check(get_ifs("kenyon"), horizon=8)
    assert report.min_gap < 1e-2


def test_dstar_requires_single_matrix():
    with pytest.raises(NotSingleMatrix):
        dstar_discreteness_check(get_ifs("interval3"))


def test_dstar_reflective_single_matrix():
    # Reflections go through the conjugated expansion; the mirrored interval
    # still lives on the integer lattice.
    report = dstar_discreteness_check(get_ifs("mirror"), horizon=6)
    assert report.min_gap >= 1.0 - 1e-9
