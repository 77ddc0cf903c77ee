"""Command line interface: analyze | skeleton | verify | render | export-dot.

Exit codes: 0 success (finite type and connected, or verification passed),
1 disconnected attractor or failed verification, 2 neighbor-graph cap
exceeded (inconclusive), 3 unreadable or invalid input.

IFS documents are JSON with either a "maps" list (records of kind "complex"
for z -> lambda*z + t, or kind "matrix" for scale/angle_deg/reflect/tx/ty)
or a "single_matrix" object expanding S_i(z) = lambda*(z + d_i). Angles are
degrees in files, radians internally. The FRACTAL_SKELETON_EPS environment
variable overrides the default tolerance 1e-9.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import xml.etree.ElementTree as ET
from typing import Any

from .errors import (
    Inconclusive,
    IfskelError,
    NotConnected,
    ParseError,
    ValidationError,
)
from .geometry import Point, Similitude
from .ifs import (
    IFS,
    MAX_CONTRACTION,
    bounding_ball,
    detect_single_matrix,
    is_uniform_ratio,
    sample_attractor,
)
from .neighbor import (
    FINITE_TYPE,
    Label,
    NeighborGraph,
    build_neighbor_graph,
    dstar_discreteness_check,
    label_str,
)
from .graphs import hata_graph, is_connected
from .skeleton import Skeleton, build_skeleton, verify_skeleton

DEFAULT_EPS = 1e-9
EPS_ENV_VAR = "FRACTAL_SKELETON_EPS"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_PARSE = 3


def _require_number(obj: dict, field: str, path: str) -> float:
    if field not in obj:
        raise ValidationError(f"{path}.{field}: missing required field")
    value = obj[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}.{field}: expected a number, got {value!r}")
    return float(value)


def _map_from_record(rec: Any, path: str) -> Similitude:
    if not isinstance(rec, dict):
        raise ValidationError(f"{path}: expected an object, got {type(rec).__name__}")
    kind = rec.get("kind")
    if kind == "complex":
        lam = complex(
            _require_number(rec, "lambda_re", path), _require_number(rec, "lambda_im", path)
        )
        t = complex(_require_number(rec, "t_re", path), _require_number(rec, "t_im", path))
        if abs(lam) <= 0.0:
            raise ValidationError(f"{path}.lambda_re: linear part must be nonzero")
        return Similitude.from_linear(lam, t, reflect=False)
    if kind == "matrix":
        scale = _require_number(rec, "scale", path)
        if scale <= 0.0:
            raise ValidationError(f"{path}.scale: must be positive, got {scale}")
        angle = math.radians(_require_number(rec, "angle_deg", path))
        reflect = rec.get("reflect", False)
        if not isinstance(reflect, bool):
            raise ValidationError(f"{path}.reflect: expected true/false")
        tx = _require_number(rec, "tx", path)
        ty = _require_number(rec, "ty", path)
        return Similitude(scale, angle, reflect, tx, ty)
    raise ValidationError(f"{path}.kind: expected 'complex' or 'matrix', got {kind!r}")


def parse_ifs_document(doc: Any, name_hint: str = "ifs") -> IFS:
    """Validate a parsed JSON document and build the IFS."""
    if not isinstance(doc, dict):
        raise ValidationError("document: expected a JSON object at top level")
    name = doc.get("name", name_hint)
    if not isinstance(name, str):
        raise ValidationError("name: expected a string")
    has_maps = "maps" in doc
    has_single = "single_matrix" in doc
    if has_maps == has_single:
        raise ValidationError("document: exactly one of 'maps'/'single_matrix' required")

    maps: list[Similitude] = []
    if has_maps:
        records = doc["maps"]
        if not isinstance(records, list):
            raise ValidationError("maps: expected a list")
        for idx, rec in enumerate(records):
            maps.append(_map_from_record(rec, f"maps[{idx}]"))
    else:
        sm = doc["single_matrix"]
        if not isinstance(sm, dict):
            raise ValidationError("single_matrix: expected an object")
        lam = complex(
            _require_number(sm, "lambda_re", "single_matrix"),
            _require_number(sm, "lambda_im", "single_matrix"),
        )
        if abs(lam) <= 0.0:
            raise ValidationError("single_matrix.lambda_re: linear part must be nonzero")
        digits = sm.get("digits")
        if not isinstance(digits, list) or not digits:
            raise ValidationError("single_matrix.digits: expected a nonempty list")
        for idx, d in enumerate(digits):
            if not (
                isinstance(d, list)
                and len(d) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in d)
            ):
                raise ValidationError(
                    f"single_matrix.digits[{idx}]: expected a [re, im] number pair"
                )
            t = lam * complex(float(d[0]), float(d[1]))
            maps.append(Similitude.from_linear(lam, t, reflect=False))

    field = "single_matrix.digits" if has_single else "maps"
    for idx, m in enumerate(maps):
        if m.scale > MAX_CONTRACTION:
            raise ValidationError(
                f"{field}[{idx}]: scale {m.scale!r} exceeds the contraction "
                f"certification bound {MAX_CONTRACTION}"
            )
    return IFS(maps, name=name)


def parse_ifs_file(path: str) -> IFS:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    stem = os.path.splitext(os.path.basename(path))[0]
    return parse_ifs_document(doc, name_hint=stem)


def _load_points(path: str) -> list[Point]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and "points" in doc:
        doc = doc["points"]
    if not isinstance(doc, list) or not doc:
        raise ValidationError("points: expected a nonempty JSON list of [x, y] pairs")
    out = []
    for idx, item in enumerate(doc):
        if not (isinstance(item, list) and len(item) == 2):
            raise ValidationError(f"points[{idx}]: expected an [x, y] pair")
        out.append(Point(float(item[0]), float(item[1])))
    return out


def parse_cycle_labels(text: str) -> list[Label]:
    """Parse "32,31,21" style label lists; 'e' stands for the empty side."""
    labels: list[Label] = []
    for token in text.split(","):
        token = token.strip()
        parts = token.split(".") if "." in token else list(token)
        if len(parts) != 2:
            raise ValidationError(f"cycle label {token!r}: expected two letters")
        try:
            j = 0 if parts[0] == "e" else int(parts[0])
            i = 0 if parts[1] == "e" else int(parts[1])
        except ValueError as exc:
            raise ValidationError(f"cycle label {token!r}: bad letter") from exc
        labels.append((j, i))
    return labels


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _point_list(points) -> list[list[float]]:
    return [[p.x, p.y] for p in points]


def _analyze_payload(ifs: IFS, delta: NeighborGraph, dstar_horizon: int) -> dict:
    payload: dict[str, Any] = {
        "name": ifs.name,
        "status": delta.status,
        "vertices": delta.vertex_count,
        "edges": delta.edge_count,
        "uniform_ratio": is_uniform_ratio(ifs),
        "hata_edges": None,
        "connected": None,
        "single_matrix": None,
        "dstar": None,
    }
    smf = detect_single_matrix(ifs)
    if smf is not None:
        payload["single_matrix"] = {
            "lambda": [smf.linear.a.real, smf.linear.a.imag],
            "reflect": smf.linear.reflect,
            "digits": _point_list(smf.digits),
        }
        report = dstar_discreteness_check(ifs, horizon=dstar_horizon)
        payload["dstar"] = {
            "horizon": report.horizon,
            "bound": report.bound,
            "count": report.count,
            "min_gap": report.min_gap if math.isfinite(report.min_gap) else None,
        }
    if delta.status == FINITE_TYPE:
        h = hata_graph(ifs, delta)
        payload["hata_edges"] = [list(e) for e in sorted(h.edges)]
        payload["connected"] = is_connected(h)
    return payload


def cmd_analyze(args: argparse.Namespace) -> int:
    ifs = parse_ifs_file(args.file)
    delta = build_neighbor_graph(ifs, max_vertices=args.cap)
    payload = _analyze_payload(ifs, delta, args.dstar_horizon)
    if args.json:
        print(_dumps(payload))
    else:
        print(f"name: {payload['name']}")
        ratio = "uniform" if payload["uniform_ratio"] else "mixed"
        print(f"ratios: {ratio} (r_min={ifs.r_min:.6g}, r_max={ifs.r_max:.6g})")
        if payload["single_matrix"] is not None:
            lam = payload["single_matrix"]["lambda"]
            print(f"single-matrix form: lambda = {lam[0]:.6g}{lam[1]:+.6g}i")
        if payload["status"] == FINITE_TYPE:
            print(
                f"neighbor graph: finite type, {payload['vertices']} vertices, "
                f"{payload['edges']} edges"
            )
            edges = " ".join("{%d,%d}" % (a, b) for a, b in payload["hata_edges"])
            print(f"Hata graph: {edges if edges else '(no edges)'}")
            verdict = "connected" if payload["connected"] else "disconnected"
            print(f"attractor: {verdict}")
        else:
            print(
                f"neighbor graph: inconclusive, cap exceeded at "
                f"{payload['vertices']} vertices"
            )
        if payload["dstar"] is not None:
            d = payload["dstar"]
            gap = "inf" if d["min_gap"] is None else f"{d['min_gap']:.6g}"
            print(
                f"difference-set evidence: {d['count']} elements within "
                f"{d['bound']:.4g}, min gap {gap} (horizon {d['horizon']})"
            )
    if payload["status"] != FINITE_TYPE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if payload["connected"] else EXIT_FAIL


def skeleton_payload(skel: Skeleton, name: str) -> dict:
    return {
        "name": name,
        "points": _point_list(skel.points),
        "codings": [[str(c) for c in cs] for cs in skel.codings],
        "pairs": [
            {
                "edge": list(p.edge),
                "omega": str(p.omega),
                "gamma": str(p.gamma),
                "point": [p.point.x, p.point.y],
            }
            for p in skel.pairs
        ],
        "spanning": [list(e) for e in skel.spanning_edges],
        "verification": {
            "ok": skel.report.ok,
            "stable": skel.report.stable,
            "stability_residual": skel.report.stability_residual,
            "connected": skel.report.connected,
            "hata_edges": [list(e) for e in skel.report.hata_edges],
        },
    }


def cmd_skeleton(args: argparse.Namespace) -> int:
    ifs = parse_ifs_file(args.file)
    policy, labels = args.policy, None
    if policy.startswith("cycle:"):
        labels = parse_cycle_labels(policy[len("cycle:") :])
        policy = "cycle"
    elif policy not in ("self-loop", "shortest"):
        raise ValidationError(f"policy: unknown policy {args.policy!r}")
    skel = build_skeleton(
        ifs,
        spanning=args.spanning,
        policy=policy,
        cycle_labels=labels,
        eps=args.eps,
        max_vertices=args.cap,
    )
    text = _dumps(skeleton_payload(skel, ifs.name))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    ifs = parse_ifs_file(args.file)
    points = _load_points(args.points)
    report = verify_skeleton(ifs, points, eps=args.eps)
    payload = {
        "ok": report.ok,
        "stable": report.stable,
        "stability_residual": report.stability_residual,
        "connected": report.connected,
        "hata_edges": [list(e) for e in report.hata_edges],
        "singleton": report.singleton,
    }
    if args.json:
        print(_dumps(payload))
    else:
        print(f"stable under iteration: {report.stable} "
              f"(max residual {report.stability_residual:.3g})")
        edges = " ".join("{%d,%d}" % (a, b) for a, b in report.hata_edges)
        print(f"Hata graph of the set: {edges if edges else '(no edges)'}")
        print(f"Hata graph connected: {report.connected}")
        if report.singleton:
            print("note: a one-point skeleton means the attractor is a single point")
        print(f"verdict: {'PASS' if report.ok else 'FAIL'}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _render_svg(ifs: IFS, depth: int, skel: Skeleton | None, size: int = 800) -> str:
    ball = bounding_ball(ifs)
    samples = sample_attractor(ifs, depth)
    margin = 0.05 * size
    span = 2.0 * ball.radius

    def to_px(p: Point) -> tuple[float, float]:
        x = margin + (p.x - (ball.center.x - ball.radius)) / span * (size - 2 * margin)
        y = margin + ((ball.center.y + ball.radius) - p.y) / span * (size - 2 * margin)
        return x, y

    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(size),
        height=str(size),
        viewBox=f"0 0 {size} {size}",
    )
    ET.SubElement(root, "rect", x="0", y="0", width=str(size), height=str(size), fill="white")
    group = ET.SubElement(root, "g")
    for p in samples:
        x, y = to_px(p)
        ET.SubElement(
            group,
            "circle",
            {"cx": f"{x:.2f}", "cy": f"{y:.2f}", "r": "1.2", "fill": "#33557a",
             "class": "sample"},
        )
    if skel is not None:
        marks = ET.SubElement(root, "g")
        for idx, p in enumerate(skel.points, start=1):
            x, y = to_px(p)
            ET.SubElement(
                marks,
                "circle",
                {"cx": f"{x:.2f}", "cy": f"{y:.2f}", "r": "5", "fill": "#c0392b",
                 "class": "skeleton"},
            )
            label = ET.SubElement(
                marks,
                "text",
                {"x": f"{x + 7:.2f}", "y": f"{y - 7:.2f}", "fill": "#c0392b",
                 "font-size": "16"},
            )
            label.text = f"a{idx}"
    return ET.tostring(root, encoding="unicode")


def cmd_render(args: argparse.Namespace) -> int:
    ifs = parse_ifs_file(args.file)
    skel = None
    if args.skeleton:
        skel = build_skeleton(ifs, eps=args.eps, max_vertices=args.cap)
    svg = _render_svg(ifs, args.depth, skel)
    try:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg + "\n")
    except OSError as exc:
        raise ParseError(f"{args.svg}: {exc}") from exc
    return EXIT_OK


def _neighbor_dot(delta: NeighborGraph) -> str:
    names = {key: f"f{idx}" for idx, key in enumerate(delta.vertices)}
    lines = ["digraph neighbor {"]
    for key, vertex in delta.vertices.items():
        m = vertex.map
        desc = (
            f"scale={m.scale:.6g} angle={m.angle:.6g} "
            f"t=({m.t.real:.6g},{m.t.imag:.6g})"
        )
        if m.reflect:
            desc += " reflect"
        shape = "doublecircle" if vertex.is_basic else "circle"
        lines.append(f'  {names[key]} [shape={shape} label="{names[key]}\\n{desc}"];')
    for e in delta.edges:
        lines.append(
            f'  {names[e.src]} -> {names[e.dst]} [label="{label_str(e.label)}"];'
        )
    lines.append("}")
    return "\n".join(lines)


def _hata_dot(ifs: IFS, delta: NeighborGraph) -> str:
    h = hata_graph(ifs, delta)
    lines = ["graph hata {"]
    for i in range(1, h.n + 1):
        lines.append(f"  S{i};")
    for a, b in sorted(h.edges):
        lines.append(f"  S{a} -- S{b};")
    lines.append("}")
    return "\n".join(lines)


def cmd_export_dot(args: argparse.Namespace) -> int:
    ifs = parse_ifs_file(args.file)
    delta = build_neighbor_graph(ifs, max_vertices=args.cap)
    if args.graph == "neighbor":
        text = _neighbor_dot(delta)
    else:
        text = _hata_dot(ifs, delta)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _default_eps() -> float:
    raw = os.environ.get(EPS_ENV_VAR)
    if raw is None:
        return DEFAULT_EPS
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"{EPS_ENV_VAR}: not a number: {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifskel",
        description="Neighbor graphs, connectivity and skeletons of planar IFS attractors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", help="IFS document (JSON)")
        p.add_argument("--cap", type=int, default=20_000,
                       help="neighbor graph vertex cap (default 20000)")
        p.add_argument("--eps", type=float, default=None,
                       help="tolerance (default 1e-9, or FRACTAL_SKELETON_EPS)")

    p = sub.add_parser("analyze", help="neighbor graph, finite type, connectivity")
    common(p)
    p.add_argument("--json", action="store_true", help="machine readable output")
    p.add_argument("--dstar-horizon", type=int, default=6,
                   help="difference-set enumeration depth (default 6)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("skeleton", help="construct and verify a skeleton")
    common(p)
    p.add_argument("--spanning", choices=("tree", "full"), default="tree")
    p.add_argument("--policy", default="self-loop",
                   help="self-loop | shortest | cycle:<labels> (e.g. cycle:32,31,21)")
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("verify", help="check the two skeleton axioms for a point set")
    common(p)
    p.add_argument("--points", required=True, help="JSON list of [x, y] pairs")
    p.add_argument("--json", action="store_true", help="machine readable output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="SVG of attractor samples, optionally a skeleton")
    common(p)
    p.add_argument("--depth", type=int, default=6, help="sampling depth (default 6)")
    p.add_argument("--skeleton", action="store_true", help="overlay the skeleton")
    p.add_argument("--svg", required=True, help="output SVG path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("export-dot", help="neighbor or Hata graph in DOT format")
    common(p)
    p.add_argument("--graph", choices=("neighbor", "hata"), default="neighbor")
    p.add_argument("--out", default=None, help="write DOT here instead of stdout")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "eps", None) is None:
            args.eps = _default_eps()
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except NotConnected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except IfskelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
