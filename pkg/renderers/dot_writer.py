"""
Graphviz DOT text for spaces, étale spaces and groupoids.

Only text is produced; rendering is left to the `dot` tool.
"""

import logging
from pathlib import Path
from typing import Iterable, List

from topology.finspace import FiniteSpace, hasse_edges
from topology.sheaves import EtaleSpaceBundle
from groupoids.groupoid import TopGroupoid
from utils.helpers import describe, format_open

logger = logging.getLogger(__name__)

SPACE_KIND = 'space'
ETALE_KIND = 'etale'
GROUPOID_KIND = 'groupoid'
DOT_KINDS = (SPACE_KIND, ETALE_KIND, GROUPOID_KIND)


def _quote(text: str) -> str:
    return '"' + str(text).replace('\\', '\\\\').replace('"', '\\"') + '"'


def _graph(kind: str, name: str, body: Iterable[str]) -> str:
    lines = [f"{kind} {_quote(name or 'G')} {{"]
    lines.extend(f"  {line}" for line in body)
    lines.append("}")
    return "\n".join(lines) + "\n"


def space_to_dot(space: FiniteSpace) -> str:
    """Hasse diagram of the specialization order; an edge x -> y means x ∈ U_y."""
    body: List[str] = ['rankdir=BT;', 'node [shape=circle];']
    for x in space.points:
        body.append(f"{x} [label={_quote(x)}, tooltip={_quote('U = ' + format_open(space.minimal[x]))}];")
    for x, y in hasse_edges(space):
        body.append(f"{x} -> {y};")
    return _graph('digraph', space.name, body)


def etale_to_dot(bundle: EtaleSpaceBundle) -> str:
    """Germs as nodes, grouped in one cluster per distinct basic open [s, U]."""
    body: List[str] = ['compound=true;', 'node [shape=ellipse];']
    for i, germ in enumerate(bundle.germs):
        body.append(f"g{i} [label={_quote(f'{germ.base}: {describe(germ.value, 20)}')}];")

    seen = {}
    for U, s, members in bundle.basic_opens:
        seen.setdefault(members, (U, s))
    for k, (members, (U, s)) in enumerate(sorted(seen.items(), key=lambda item: sorted(item[0]))):
        label = f"[{describe(s, 16)}, {format_open(U)}]"
        nodes = ' '.join(f"g{i};" for i in sorted(members))
        body.append(f"subgraph cluster_{k} {{ label={_quote(label)}; {nodes} }}")

    for i, germ in enumerate(bundle.germs):
        body.append(f"g{i} -> p{germ.base} [style=dotted, arrowhead=none];")
    for x in bundle.presheaf.space.points:
        body.append(f"p{x} [shape=box, label={_quote(x)}];")
    return _graph('digraph', bundle.total.name, body)


def groupoid_to_dot(G: TopGroupoid) -> str:
    """Objects as boxes, one labelled edge per arrow (loops included)."""
    body: List[str] = ['node [shape=box];']
    for x in G.base.points:
        body.append(f"{x} [label={_quote(x)}];")
    for a in G.arrows.points:
        body.append(f"{G.s(a)} -> {G.t(a)} [label={_quote(G.label(a))}];")
    return _graph('digraph', G.name, body)


def write_dot(text: str, path: str) -> str:
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding='utf-8')
    logger.info(f"DOT graph written to {output}")
    return str(output)
