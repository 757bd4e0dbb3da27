"""Text schemas: graph/system descriptions and experiment configs.

All numerics are exact fractions ("3/2"); the dump/load pair round-trips
bit-exactly (dump(load(dump(x))) == dump(x)).

System schema (header ``entrolab-system v1``)::

    [graph]
    vertex: v0
    edge: e0 v0 v1 1

    [points]
    point: p0 = v0
    point: p1 = e0 @ 1/2

    [splitting]
    piece: A0 = e0[0:1/2]

    [map]
    image: A0 -> e0[1/2:1] e0[1:1/2]

Config schema (header ``entrolab-config v1``): ``key: value`` lines
(kind/k/m/n/exact/shape/eps/nmax/grid/budget/analyses/kept/resolution/range),
plus the system sections inline when ``kind: inline``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Edge, GraphPoint, MetricGraph, Piece, Segment, Splitting
from .markov import PLMarkovMap

GRAPH_HEADER = "entrolab-graph v1"
SYSTEM_HEADER = "entrolab-system v1"
CONFIG_HEADER = "entrolab-config v1"


class SchemaError(ValueError):
    """Malformed description file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__("line %s: %s" % (line, message) if line else message)


_SEG_RE = re.compile(r"^([A-Za-z0-9_.-]+)\[([^:\]]+):([^:\]]+)\]$")


def _frac(text: str, line: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise SchemaError("expected an exact fraction, got %r" % text, line) from None


def _parse_segment(tok: str, line: int) -> Segment:
    m = _SEG_RE.match(tok)
    if not m:
        raise SchemaError("expected segment like e0[0:1/2], got %r" % tok, line)
    return Segment(m.group(1), _frac(m.group(2), line), _frac(m.group(3), line))


def _dump_segment(s: Segment) -> str:
    return "%s[%s:%s]" % (s.edge, s.a, s.b)


def _parse_point(text: str, g: MetricGraph, line: int) -> GraphPoint:
    text = text.strip()
    if "@" in text:
        eid, off = text.split("@", 1)
        return g.point(eid.strip(), _frac(off, line))
    if text in g.vertices:
        return GraphPoint.at_vertex(text)
    raise SchemaError("unknown point %r (vertex id or 'edge @ offset')" % text, line)


def _dump_point(p: GraphPoint) -> str:
    return p.vertex if p.is_vertex() else "%s @ %s" % (p.edge, p.offset)


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield i, line.strip()


def _split_sections(rows):
    """Return (header_rows, {section: rows}) preserving order."""
    head: list = []
    sections: dict[str, list] = {}
    cur = None
    for i, line in rows:
        if line.startswith("[") and line.endswith("]"):
            cur = line[1:-1]
            if cur in sections:
                raise SchemaError("duplicate section [%s]" % cur, i)
            sections[cur] = []
        elif cur is None:
            head.append((i, line))
        else:
            sections[cur].append((i, line))
    return head, sections


def _kv(line: str, i: int) -> tuple[str, str]:
    if ":" not in line:
        raise SchemaError("expected 'key: value', got %r" % line, i)
    k, v = line.split(":", 1)
    return k.strip(), v.strip()


def parse_graph_section(rows) -> MetricGraph:
    vertices: list[str] = []
    edges: list[Edge] = []
    for i, line in rows:
        k, v = _kv(line, i)
        if k == "vertex":
            vertices.append(v)
        elif k == "edge":
            parts = v.split()
            if len(parts) != 4:
                raise SchemaError("edge needs 'id u v length', got %r" % v, i)
            edges.append(Edge(parts[0], parts[1], parts[2], _frac(parts[3], i)))
        else:
            raise SchemaError("unknown graph key %r" % k, i)
    return MetricGraph(vertices, edges)


def load_graph(text: str) -> MetricGraph:
    rows = list(_lines(text))
    if not rows or rows[0][1] not in (GRAPH_HEADER, SYSTEM_HEADER):
        raise SchemaError("missing '%s' header" % GRAPH_HEADER,
                          rows[0][0] if rows else 1)
    head, sections = _split_sections(rows[1:])
    if head or "graph" not in sections:
        raise SchemaError("graph files need a [graph] section", rows[0][0])
    return parse_graph_section(sections["graph"])


def dump_graph(g: MetricGraph) -> str:
    out = [GRAPH_HEADER, "", "[graph]"]
    out += ["vertex: %s" % v for v in g.vertices]
    out += ["edge: %s %s %s %s" % (e.id, e.u, e.v, e.length) for e in g.edges]
    return "\n".join(out) + "\n"


def _parse_system_sections(sections, name: str) -> PLMarkovMap:
    for needed in ("graph", "points", "splitting", "map"):
        if needed not in sections:
            raise SchemaError("system needs a [%s] section" % needed)
    g = parse_graph_section(sections["graph"])
    points: dict[str, GraphPoint] = {}
    for i, line in sections["points"]:
        k, v = _kv(line, i)
        if k != "point" or "=" not in v:
            raise SchemaError("expected 'point: name = location'", i)
        nm, loc = v.split("=", 1)
        points[nm.strip()] = _parse_point(loc, g, i)
    pieces: list[Piece] = []
    for i, line in sections["splitting"]:
        k, v = _kv(line, i)
        if k != "piece" or "=" not in v:
            raise SchemaError("expected 'piece: name = segments'", i)
        nm, segs = v.split("=", 1)
        pieces.append(Piece(nm.strip(),
                            [_parse_segment(t, i) for t in segs.split()]))
    images: dict[str, list[Segment]] = {}
    for i, line in sections["map"]:
        k, v = _kv(line, i)
        if k != "image" or "->" not in v:
            raise SchemaError("expected 'image: piece -> segments'", i)
        nm, segs = v.split("->", 1)
        images[nm.strip()] = [_parse_segment(t, i) for t in segs.split()]
    splitting = Splitting(g, pieces, list(points.values()))
    return PLMarkovMap(splitting, images, name=name)


def load_system(text: str, name: str = "inline") -> PLMarkovMap:
    rows = list(_lines(text))
    if not rows or rows[0][1] != SYSTEM_HEADER:
        raise SchemaError("missing '%s' header" % SYSTEM_HEADER,
                          rows[0][0] if rows else 1)
    _head, sections = _split_sections(rows[1:])
    return _parse_system_sections(sections, name)


def dump_system(f: PLMarkovMap) -> str:
    g = f.graph
    out = [SYSTEM_HEADER, "", "[graph]"]
    out += ["vertex: %s" % v for v in g.vertices]
    out += ["edge: %s %s %s %s" % (e.id, e.u, e.v, e.length) for e in g.edges]
    out += ["", "[points]"]
    out += ["point: p%d = %s" % (i, _dump_point(p))
            for i, p in enumerate(f.boundary)]
    out += ["", "[splitting]"]
    for a in f.splitting.pieces:
        out.append("piece: %s = %s" % (a.name, " ".join(_dump_segment(s)
                                                        for s in a.segments)))
    out += ["", "[map]"]
    for i, a in enumerate(f.splitting.pieces):
        out.append("image: %s -> %s" % (a.name, " ".join(
            _dump_segment(s) for s in f.image_path(i).segments)))
    return "\n".join(out) + "\n"


# -- experiment configs ---------------------------------------------------------


_CONSTRUCTION_KEYS = {"k", "m", "n", "exact", "shape", "loop_length"}
_INT_KEYS = {"k", "m", "n", "nmax", "budget", "targets"}


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    system_text: str | None = None
    eps_list: list[Fraction] | None = None
    n_max: int | None = None
    grid: Fraction = Fraction(1, 4)
    budget: int = 120_000
    analyses: tuple[str, ...] = ("bounds", "bowen", "classify")
    kept: list[str] | None = None
    resolution: Fraction = Fraction(1, 1000)
    targets: int = 3
    sweep_range: tuple[int, int] | None = None

    def build_system(self) -> PLMarkovMap:
        from .constructions import build_construction
        if self.kind == "inline":
            return load_system(self.system_text or "")
        return build_construction(self.kind, **self.params)


def parse_config(text: str) -> ExperimentConfig:
    rows = list(_lines(text))
    if not rows or rows[0][1] != CONFIG_HEADER:
        raise SchemaError("missing '%s' header" % CONFIG_HEADER,
                          rows[0][0] if rows else 1)
    head, sections = _split_sections(rows[1:])
    kv: dict[str, tuple[int, str]] = {}
    for i, line in head:
        k, v = _kv(line, i)
        if k in kv:
            raise SchemaError("duplicate key %r" % k, i)
        kv[k] = (i, v)
    if "kind" not in kv:
        raise SchemaError("config needs a 'kind' key")
    kind = kv.pop("kind")[1]
    cfg = ExperimentConfig(kind=kind)
    params: dict = {}
    for key, (i, v) in kv.items():
        if key in _CONSTRUCTION_KEYS:
            if key == "exact":
                params[key] = v.lower() in ("1", "true", "yes")
            elif key == "shape":
                params[key] = v
            elif key == "loop_length":
                params[key] = _frac(v, i)
            else:
                params[key] = _int(v, i)
        elif key == "eps":
            cfg.eps_list = [_frac(t, i) for t in v.split()]
        elif key == "nmax":
            cfg.n_max = _int(v, i)
        elif key == "grid":
            cfg.grid = _frac(v, i)
        elif key == "budget":
            cfg.budget = _int(v, i)
        elif key == "analyses":
            cfg.analyses = tuple(v.split())
            bad = set(cfg.analyses) - {"bounds", "bowen", "classify"}
            if bad:
                raise SchemaError("unknown analyses %s" % ", ".join(sorted(bad)), i)
        elif key == "kept":
            cfg.kept = v.split()
        elif key == "resolution":
            cfg.resolution = _frac(v, i)
        elif key == "targets":
            cfg.targets = _int(v, i)
        elif key == "range":
            m = re.match(r"^(\d+)\s*\.\.\s*(\d+)$", v)
            if not m:
                raise SchemaError("range must look like 2..32, got %r" % v, i)
            cfg.sweep_range = (int(m.group(1)), int(m.group(2)))
        else:
            raise SchemaError("unknown config key %r" % key, i)
    cfg.params = params
    if kind == "inline":
        if not sections:
            raise SchemaError("kind: inline needs the system sections")
        body = [SYSTEM_HEADER]
        for name, srows in sections.items():
            body.append("[%s]" % name)
            body += [line for _i, line in srows]
        cfg.system_text = "\n".join(body) + "\n"
    elif sections:
        raise SchemaError("system sections are only allowed with kind: inline")
    return cfg


def _int(v: str, line: int) -> int:
    try:
        return int(v)
    except ValueError:
        raise SchemaError("expected an integer, got %r" % v, line) from None
