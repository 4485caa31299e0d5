"""
JSON readers and writers for spaces, presheaves, pre-pseudogroups and
groupoids.

Opens are keyed by their sorted point list ("[0,1]"); hom-set keys join
open keys with '/'. Hom elements and sections are string ids in files.
Internally built elements are relabelled to ids on export, with a
`labels` section recording what each id stood for.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Hashable, Iterable, Mapping, Tuple

from topology.finspace import FiniteSpace, build_space
from topology.sheaves import Presheaf
from pseudogroups.pseudogroup import PrePseudogroup
from groupoids.groupoid import TopGroupoid
from corpus.generators import SPACE, PRESHEAF, PSEUDOGROUP, GROUPOID
from utils.errors import ParseError, SchemaError
from utils.helpers import format_open, parse_open, describe
from utils.reporting import stable_digest

logger = logging.getLogger(__name__)

KIND_MARKERS = (('base', GROUPOID), ('homs', PSEUDOGROUP), ('sections', PRESHEAF), ('points', SPACE))


# ----------------------------------------------------------------------
# Low-level helpers
# ----------------------------------------------------------------------

def read_json(path: str) -> Any:
    """
    Raises:
        ParseError: unreadable file or malformed JSON (with line and column).
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e.strerror or e}", path=str(path))
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Malformed JSON in {path}: {e.msg}", path=str(path), line=e.lineno, column=e.colno)


def write_json(data: Any, path: str) -> str:
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
    return str(output)


def _field(data: Mapping, key: str, kind: type, where: str) -> Any:
    if not isinstance(data, dict):
        raise SchemaError(f"{where} must be an object", field=where)
    if key not in data:
        raise SchemaError(f"{where} is missing '{key}'", field=f"{where}.{key}")
    value = data[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{where}.{key} must be a {kind.__name__}", field=f"{where}.{key}")
    return value


def _open(space: FiniteSpace, text: str, where: str):
    try:
        U = parse_open(text)
    except ValueError as e:
        raise SchemaError(str(e), field=where)
    if U not in space.opens:
        raise SchemaError(f"{text} is not an open of the space", field=where, open=text)
    return U


def _opens_key(space: FiniteSpace, key: str, arity: int, where: str) -> Tuple:
    parts = key.split('/')
    if len(parts) != arity:
        raise SchemaError(f"Key {key!r} must join {arity} open keys with '/'", field=where)
    return tuple(_open(space, part, where) for part in parts)


def _int_map(data: Mapping, where: str) -> Dict[int, int]:
    try:
        return {int(k): int(v) for k, v in data.items()}
    except (TypeError, ValueError, AttributeError):
        raise SchemaError(f"{where} must map integer ids to integers", field=where)


def _declared(item: str, ids: Iterable[str], where: str, what: str) -> str:
    if item not in ids:
        raise SchemaError(f"{where} names undeclared {what} {item!r}", field=where, id=item)
    return item


def _labeller(items: Iterable[Hashable], prefix: str) -> Dict[Hashable, str]:
    """String elements keep their text; anything else gets '<prefix><k>' in first-seen order."""
    ids: Dict[Hashable, str] = {}
    taken = set()
    for item in items:
        if item in ids:
            continue
        if isinstance(item, str) and ',' not in item and item not in taken:
            ids[item] = item
        else:
            label = f"{prefix}{len(ids)}"
            while label in taken:
                label += "'"
            ids[item] = label
        taken.add(ids[item])
    return ids


# ----------------------------------------------------------------------
# Spaces
# ----------------------------------------------------------------------

def space_from_dict(data: Mapping, where: str = 'space') -> FiniteSpace:
    """
    Raises:
        SchemaError: wrong structure.
        ToolkitError: the topology axioms fail (UnknownPoint, NotClosedUnderUnion, ...).
    """
    points = _field(data, 'points', list, where)
    opens = _field(data, 'opens', list, where)
    if not all(isinstance(p, int) for p in points):
        raise SchemaError(f"{where}.points must be integers", field=f"{where}.points")
    if not all(isinstance(U, list) and all(isinstance(p, int) for p in U) for U in opens):
        raise SchemaError(f"{where}.opens must be lists of integers", field=f"{where}.opens")
    return build_space(points, opens, name=str(data.get('name', '')))


def space_to_dict(space: FiniteSpace) -> dict:
    data = space.to_dict()
    if space.name:
        data['name'] = space.name
    return data


# ----------------------------------------------------------------------
# Presheaves
# ----------------------------------------------------------------------

def presheaf_from_dict(data: Mapping) -> Presheaf:
    space = space_from_dict(_field(data, 'space', dict, 'presheaf'))
    raw_sections = _field(data, 'sections', dict, 'presheaf')
    raw_restrictions = _field(data, 'restrictions', dict, 'presheaf')

    sections = {}
    for key, ids in raw_sections.items():
        U = _open(space, key, 'presheaf.sections')
        if not isinstance(ids, list) or not all(isinstance(s, str) for s in ids):
            raise SchemaError("Sections must be lists of string ids", field=f"presheaf.sections.{key}")
        sections[U] = tuple(ids)

    restrictions = {}
    for key, table in raw_restrictions.items():
        U, W = _opens_key(space, key, 2, 'presheaf.restrictions')
        if not isinstance(table, dict):
            raise SchemaError("Restriction tables must be objects", field=f"presheaf.restrictions.{key}")
        where = f"presheaf.restrictions.{key}"
        restrictions[(U, W)] = {_declared(str(s), sections.get(U, ()), where, 'section'):
                                _declared(str(v), sections.get(W, ()), where, 'section')
                                for s, v in table.items()}
    for U, ids in sections.items():
        restrictions.setdefault((U, U), {s: s for s in ids})
    return Presheaf(space=space, sections=sections, restrictions=restrictions, name=str(data.get('name', '')))


def presheaf_to_dict(P: Presheaf) -> dict:
    space = P.space
    ids = _labeller((s for U in space.opens for s in P.sections[U]), 's')
    data = {
        'space': space_to_dict(space),
        'sections': {format_open(U): [ids[s] for s in P.sections[U]] for U in space.opens},
        'restrictions': {
            f"{format_open(U)}/{format_open(W)}": {ids[s]: ids[v] for s, v in table.items()}
            for (U, W), table in P.restrictions.items()
        },
    }
    relabelled = {label: describe(s) for s, label in ids.items() if label != s}
    if relabelled:
        data['labels'] = relabelled
    if P.name:
        data['name'] = P.name
    return data


# ----------------------------------------------------------------------
# Pre-pseudogroups
# ----------------------------------------------------------------------

def pseudogroup_from_dict(data: Mapping) -> PrePseudogroup:
    space = space_from_dict(_field(data, 'space', dict, 'pseudogroup'))
    raw_homs = _field(data, 'homs', dict, 'pseudogroup')
    raw_compose = _field(data, 'compose', dict, 'pseudogroup')
    raw_incl = _field(data, 'incl', dict, 'pseudogroup')

    homs = {(U, V): () for U in space.opens for V in space.opens}
    for key, ids in raw_homs.items():
        pair = _opens_key(space, key, 2, 'pseudogroup.homs')
        if not isinstance(ids, list) or not all(isinstance(f, str) for f in ids):
            raise SchemaError("Hom-sets must be lists of string ids", field=f"pseudogroup.homs.{key}")
        homs[pair] = tuple(ids)

    compose = {}
    for key, table in raw_compose.items():
        triple = _opens_key(space, key, 3, 'pseudogroup.compose')
        if not isinstance(table, dict):
            raise SchemaError("Composition tables must be objects", field=f"pseudogroup.compose.{key}")
        U, V, W = triple
        where = f"pseudogroup.compose.{key}"
        entries = {}
        for pair_key, h in table.items():
            parts = pair_key.split(',')
            if len(parts) != 2:
                raise SchemaError(f"Composition key {pair_key!r} must be 'g,f'", field=where)
            g = _declared(parts[0], homs[(V, W)], where, 'morphism')
            f = _declared(parts[1], homs[(U, V)], where, 'morphism')
            entries[(g, f)] = _declared(str(h), homs[(U, W)], where, 'morphism')
        compose[triple] = entries

    incl = {}
    for key, f in raw_incl.items():
        pair = _opens_key(space, key, 2, 'pseudogroup.incl')
        incl[pair] = _declared(str(f), homs[pair], f"pseudogroup.incl.{key}", 'morphism')

    underlying = None
    if data.get('underlying') is not None:
        raw_underlying = _field(data, 'underlying', dict, 'pseudogroup')
        underlying = {pair: {} for pair in homs}
        for key, table in raw_underlying.items():
            pair = _opens_key(space, key, 2, 'pseudogroup.underlying')
            where = f"pseudogroup.underlying.{key}"
            if not isinstance(table, dict):
                raise SchemaError("Underlying tables must be objects", field=where)
            underlying[pair] = {_declared(str(f), homs[pair], where, 'morphism'): _int_map(m, f"{where}.{f}")
                                for f, m in table.items()}
        for (U, V), ids in homs.items():
            missing = [f for f in ids if f not in underlying[(U, V)]]
            if missing:
                raise SchemaError("Every morphism needs an underlying map",
                                  field=f"pseudogroup.underlying.{format_open(U)}/{format_open(V)}", id=missing[0])

    return PrePseudogroup.from_tables(space, homs, compose, incl, underlying, name=str(data.get('name', '')))


def pseudogroup_to_dict(C: PrePseudogroup) -> dict:
    homs, compose, incl, underlying = C.tabulate()
    space = C.space
    ids = _labeller((f for U in space.opens for V in space.opens for f in homs[(U, V)]), 'm')
    data = {
        'space': space_to_dict(space),
        'homs': {f"{format_open(U)}/{format_open(V)}": [ids[f] for f in homs[(U, V)]]
                 for U in space.opens for V in space.opens},
        'compose': {
            '/'.join(format_open(W) for W in triple): {f"{ids[g]},{ids[f]}": ids[h] for (g, f), h in table.items()}
            for triple, table in compose.items()
        },
        'incl': {f"{format_open(U)}/{format_open(V)}": ids[f] for (U, V), f in incl.items()},
    }
    if underlying is not None:
        data['underlying'] = {
            f"{format_open(U)}/{format_open(V)}": {ids[f]: {str(x): y for x, y in sorted(m.items())}
                                                   for f, m in table.items()}
            for (U, V), table in underlying.items() if table
        }
    relabelled = {label: describe(f) for f, label in ids.items() if label != f}
    if relabelled:
        data['labels'] = relabelled
    if C.name:
        data['name'] = C.name
    return data


# ----------------------------------------------------------------------
# Groupoids
# ----------------------------------------------------------------------

def groupoid_from_dict(data: Mapping) -> TopGroupoid:
    base = space_from_dict(_field(data, 'base', dict, 'groupoid'), 'groupoid.base')
    arrows = space_from_dict(_field(data, 'arrows', dict, 'groupoid'), 'groupoid.arrows')
    maps = {name: _int_map(_field(data, name, dict, 'groupoid'), f"groupoid.{name}")
            for name in ('s', 't', 'i', 'inv')}
    comp = {}
    for key, h in _field(data, 'comp', dict, 'groupoid').items():
        parts = key.split(',')
        try:
            comp[(int(parts[0]), int(parts[1]))] = int(h)
        except (IndexError, ValueError, TypeError):
            raise SchemaError(f"Composition key {key!r} must be 'g,f' with integer arrows", field='groupoid.comp')
    labels = {}
    if 'labels' in data:
        for k, v in _field(data, 'labels', dict, 'groupoid').items():
            try:
                labels[int(k)] = str(v)
            except ValueError:
                raise SchemaError(f"Label key {k!r} must be an integer arrow", field='groupoid.labels')
    return TopGroupoid.from_tables(base, arrows, maps['s'], maps['t'], maps['i'], maps['inv'], comp,
                                   labels, name=str(data.get('name', '')))


def groupoid_to_dict(G: TopGroupoid) -> dict:
    data = G.to_dict()
    data['base'] = space_to_dict(G.base)
    data['arrows'] = space_to_dict(G.arrows)
    if G.name:
        data['name'] = G.name
    return data


# ----------------------------------------------------------------------
# Dispatch
# ----------------------------------------------------------------------

READERS = {
    SPACE: space_from_dict,
    PRESHEAF: presheaf_from_dict,
    PSEUDOGROUP: pseudogroup_from_dict,
    GROUPOID: groupoid_from_dict,
}

WRITERS = {
    SPACE: space_to_dict,
    PRESHEAF: presheaf_to_dict,
    PSEUDOGROUP: pseudogroup_to_dict,
    GROUPOID: groupoid_to_dict,
}


def detect_kind(data: Any) -> str:
    if isinstance(data, dict):
        for marker, kind in KIND_MARKERS:
            if marker in data:
                return kind
    raise SchemaError("Cannot tell which kind of instance this is",
                      expected=[marker for marker, _ in KIND_MARKERS])


def instance_from_dict(data: Any) -> Tuple[str, Any]:
    kind = detect_kind(data)
    return kind, READERS[kind](data)


def load_instance(path: str) -> Tuple[str, Any]:
    """
    Read a JSON instance file and return (kind, value).

    Raises:
        ParseError: unreadable or malformed file.
        SchemaError: structure does not match any instance schema.
        ToolkitError: the space fails the topology axioms.
    """
    kind, value = instance_from_dict(read_json(path))
    logger.info(f"Loaded {kind} from {path}")
    return kind, value


def instance_to_dict(kind: str, value: Any) -> dict:
    return WRITERS[kind](value)


def dump_instance(kind: str, value: Any, path: str) -> str:
    output = write_json(instance_to_dict(kind, value), path)
    logger.info(f"Wrote {kind} to {output}")
    return output


def instance_digest(kind: str, value: Any) -> str:
    return stable_digest({'kind': kind, 'value': instance_to_dict(kind, value)})
