"""Writers for run artifacts: community TSV, decision-graph CSV and SVG, JSON."""

from __future__ import annotations

import io
import json
import os
import xml.etree.ElementTree as ET
from typing import Sequence

from .centrality import DecisionPoint
from .errors import ConfigError, ParseError


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def format_communities(node_names: Sequence[str], assignment) -> str:
    return "".join(f"{name}\t{int(c)}\n" for name, c in zip(node_names, assignment))


def parse_communities(text) -> dict[str, str]:
    """Read ``name<TAB>community`` lines into a name -> community mapping."""
    if isinstance(text, str):
        text = io.StringIO(text)
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'name<TAB>community'", lineno)
        out[parts[0].strip()] = parts[1].strip()
    return out


def format_decision_graph(points: Sequence[DecisionPoint], centers, node_names: Sequence[str]) -> str:
    centers = set(centers)
    rows = ["node,c,delta,gamma,is_center"]
    for p in points:
        name = node_names[p.node]
        if any(ch in name for ch in ',"\n'):
            name = '"' + name.replace('"', '""') + '"'
        rows.append(f"{name},{p.c!r},{p.delta!r},{p.gamma!r},{int(p.node in centers)}")
    return "\n".join(rows) + "\n"


def emit_decision_graph_svg(points: Sequence[DecisionPoint], centers, path=None, node_names=None, width=480, height=360):
    """Scatter of centrality (x) against minimum distance (y).

    Ordinary nodes are drawn as ``circle.point``, centers as larger red
    ``circle.center``. Returns the SVG text and writes it to ``path`` when
    one is given.
    """
    if len(points) < 2:
        raise ConfigError("decision graph needs at least two points")
    centers = set(centers)
    margin = 40
    cs = [p.c for p in points]
    ds = [p.delta for p in points]

    def scale(v, lo, hi, a, b):
        return a + (b - a) * ((v - lo) / (hi - lo) if hi > lo else 0.5)

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width), height=str(height))
    ET.SubElement(svg, "title").text = "Decision graph"
    ET.SubElement(svg, "rect", x="0", y="0", width=str(width), height=str(height), fill="white")
    x0, x1, y0, y1 = margin, width - margin / 2, height - margin, margin / 2
    ET.SubElement(svg, "line", x1=str(x0), y1=str(y0), x2=str(x1), y2=str(y0), stroke="black")
    ET.SubElement(svg, "line", x1=str(x0), y1=str(y0), x2=str(x0), y2=str(y1), stroke="black")
    xlabel = ET.SubElement(svg, "text", x=str((x0 + x1) / 2), y=str(height - 8), attrib={"text-anchor": "middle"})
    xlabel.text = "Laplacian centrality c"
    ylabel = ET.SubElement(svg, "text", x="12", y=str((y0 + y1) / 2), transform=f"rotate(-90 12 {(y0 + y1) / 2})")
    ylabel.text = "minimum distance δ"
    # centers last so they sit on top
    for p in sorted(points, key=lambda p: p.node in centers):
        is_center = p.node in centers
        dot = ET.SubElement(
            svg,
            "circle",
            attrib={
                "class": "center" if is_center else "point",
                "cx": f"{scale(p.c, min(cs), max(cs), x0, x1):.2f}",
                "cy": f"{scale(p.delta, min(ds), max(ds), y0, y1):.2f}",
                "r": "6" if is_center else "3",
                "fill": "#d62728" if is_center else "#1f77b4",
            },
        )
        label = node_names[p.node] if node_names is not None else str(p.node)
        ET.SubElement(dot, "title").text = label
    text = ET.tostring(svg, encoding="unicode") + "\n"
    if path is not None:
        write_text(os.fspath(path), text)
    return text
