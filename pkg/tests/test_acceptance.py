"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; tolerances are fixed here and nowhere else.
"""

import json
import random

import pytest

from ifskel.cli import main
from ifskel.geometry import Point
from ifskel.graphs import hata_graph, is_connected
from ifskel.neighbor import FINITE_TYPE, dstar_discreteness_check
from ifskel.skeleton import build_skeleton, check_zipper, verify_iteration_invariance, verify_skeleton
from ifskel.symbolic import EPCoding, pi_eval

from corpus import (
    CARPET_B124,
    CARPET_CORNERS,
    CARPET_MIDPOINTS,
    FOURSTAR_SKELETON,
    PROPERTY_CORPUS,
    TERDRAGON_DELTA_EDGES,
    TERDRAGON_F,
    TERDRAGON_SKELETON_1,
    TERDRAGON_SKELETON_2,
    data_file,
    get_delta,
    get_ifs,
    points_match,
)
from oracles import sample_overlap_hata_edges

POINT_TOL = 1e-9
RESIDUAL_TOL = 1e-12
EQUIVARIANCE_TOL = 1e-10


def announce(criterion: str, ok: bool) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {criterion}")
    assert ok


def run_json(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_criterion_1_terdragon_neighbor_graph_golden(capsys):
    code, payload = run_json(capsys, "analyze", data_file("terdragon"), "--json")
    delta = get_delta("terdragon")
    key_of = {name: delta.basic_keys[pair] for name, pair in TERDRAGON_F.items()}
    expected = {
        (key_of[a], label, key_of[b]) for a, label, b in TERDRAGON_DELTA_EDGES
    }
    got = {(e.src, e.label, e.dst) for e in delta.edges}
    ok = (
        code == 0
        and payload["status"] == "finite_type"
        and payload["vertices"] == 6
        and payload["edges"] == 12
        and delta.status == FINITE_TYPE
        and got == expected
    )
    announce("criterion 1: terdragon neighbor graph is the published 6x12 graph", ok)


def test_criterion_2_terdragon_first_skeleton(capsys):
    code, payload = run_json(
        capsys, "skeleton", data_file("terdragon"),
        "--spanning", "full", "--policy", "self-loop",
    )
    ok = (
        code == 0
        and len(payload["points"]) == 3
        and points_match(payload["points"], TERDRAGON_SKELETON_1, tol=POINT_TOL)
    )
    announce("criterion 2: terdragon self-loop skeleton equals the 3 fixed points", ok)


def test_criterion_3_terdragon_second_skeleton(capsys):
    code, payload = run_json(
        capsys, "skeleton", data_file("terdragon"),
        "--policy", "cycle:32,31,21,23,13,12",
    )
    ok = (
        code == 0
        and len(payload["points"]) == 6
        and points_match(payload["points"], TERDRAGON_SKELETON_2, tol=POINT_TOL)
    )
    announce("criterion 3: terdragon six-cycle skeleton equals the published 6 points", ok)


def test_criterion_4_fourstar_skeleton_and_pairs(capsys):
    code, payload = run_json(
        capsys, "skeleton", data_file("fourstar"), "--spanning", "tree",
    )
    pairs = {(tuple(p["edge"]), p["omega"], p["gamma"]) for p in payload["pairs"]}
    ok = (
        code == 0
        and points_match(payload["points"], FOURSTAR_SKELETON, tol=POINT_TOL)
        and pairs == {
            ((1, 2), "1(12)", "2(21)"),
            ((1, 3), "1(13)", "3(31)"),
            ((1, 4), "1(14)", "4(41)"),
        }
    )
    announce("criterion 4: four-tile star skeleton and bifurcation pairs", ok)


def test_criterion_5_carpet_verification(capsys, tmp_path):
    carpet = data_file("carpet")
    results = []
    for label, pts in (
        ("corners", CARPET_CORNERS),
        ("midpoints", CARPET_MIDPOINTS),
        ("b1b2b4", CARPET_B124),
    ):
        path = tmp_path / f"{label}.json"
        path.write_text(json.dumps([[p.x, p.y] for p in pts]))
        code, payload = run_json(
            capsys, "verify", carpet, "--points", str(path), "--json"
        )
        results.append(
            code == 0 and payload["ok"] and payload["stability_residual"] <= RESIDUAL_TOL
        )

    rng = random.Random(12)
    bad = [[rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)] for _ in range(4)]
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    code, payload = run_json(capsys, "verify", carpet, "--points", str(bad_path), "--json")
    results.append(code == 1 and not payload["ok"])

    announce("criterion 5: carpet corner/midpoint/3-point sets verify, interior set fails",
             all(results))


def test_criterion_6_kenyon_inconclusive_with_collapsing_gaps(capsys):
    code = main(["analyze", data_file("kenyon"), "--json"])
    capsys.readouterr()
    report = dstar_discreteness_check(get_ifs("kenyon"), horizon=8)
    ok = code == 2 and report.min_gap < 1e-2
    announce(
        "criterion 6: kenyon reptile is inconclusive at the cap and its "
        f"difference-set gap {report.min_gap:.2e} < 1e-2 by horizon 8",
        ok,
    )


def test_criterion_7_property_suite():
    rng = random.Random(13)
    failures = []

    for name in PROPERTY_CORPUS:
        ifs = get_ifs(name)
        delta = get_delta(name)

        # (a) coding map equivariance on 200 random codings.
        for _ in range(200):
            pre = tuple(rng.randint(1, ifs.n) for _ in range(rng.randint(0, 3)))
            per = tuple(rng.randint(1, ifs.n) for _ in range(rng.randint(1, 4)))
            c = EPCoding(pre, per)
            pc = pi_eval(ifs, c).as_complex()
            for k in range(1, ifs.n + 1):
                lhs = pi_eval(ifs, c.prepend(k)).as_complex()
                if abs(lhs - ifs.maps[k - 1](pc)) > EQUIVARIANCE_TOL:
                    failures.append(f"{name}: equivariance at {c}")

        # (b) emitted skeleton verifies and survives iteration squared.
        skel = build_skeleton(ifs, delta=delta)
        if not skel.report.ok:
            failures.append(f"{name}: emitted skeleton failed verification")
        if not verify_iteration_invariance(ifs, list(skel.points), 2):
            failures.append(f"{name}: skeleton not stable for the squared system")

        # (c) trimmed graph has no sinks.
        if any(len(delta.out_edges(k)) < 1 for k in delta.vertices):
            failures.append(f"{name}: vertex with out-degree 0")

        # (d) Hata edges agree with the depth-6 sample-overlap oracle.
        h = hata_graph(ifs, delta)
        if set(h.edges) != sample_overlap_hata_edges(ifs, depth=6):
            failures.append(f"{name}: Hata edges disagree with the oracle")
        if not is_connected(h):
            failures.append(f"{name}: disconnected")

        # (e) the spanning graph is a subgraph of the skeleton's Hata graph.
        if not set(skel.spanning_edges) <= set(skel.report.hata_edges):
            failures.append(f"{name}: spanning graph not inside H(A)")

    announce(
        "criterion 7: property suite (equivariance, verified skeletons, "
        "sink-free graphs, oracle agreement, spanning containment) on "
        f"{len(PROPERTY_CORPUS)} systems",
        not failures,
    )
    assert not failures, failures


def test_criterion_8_zipper_endpoints():
    interval = get_ifs("interval")
    vertices = [Point(0, 0), Point(0.5, 0), Point(1, 0)]
    ok = (
        check_zipper(interval, vertices, [1, 1])
        and verify_skeleton(interval, [Point(0, 0), Point(1, 0)]).ok
    )
    announce("criterion 8: interval zipper passes and its endpoints verify", ok)
