"""
Morphisms of pre-pseudogroups and their sheafification.

C#(U, V) is the set of germ families (a_x)_{x ∈ U} with a_x ∈ C(U_x, V),
stored sparsely as tuples of (x, a_x). Ĉ is the least part of C# that
contains the image of C and is closed under both composition and gluing.
"""

import logging
import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Set, Tuple

from topology.finspace import Open
from topology.sheaves import (
    sheafify, check_morphism_stalkwise_iso, inclusion_morphism,
)
from utils.errors import (
    NotT1Space, DecompositionViolated, NoFactorization, EnumerationBudgetExceeded, WitnessFailed,
)
from utils.helpers import ordered, format_open, timed
from utils.reporting import CheckReport, Verdict
from .pseudogroup import (
    PrePseudogroup, Hom, T1,
    check_decomposition, germ_at, hom_presheaf, is_pseudogroup_sheaf, _classify_unique,
)

logger = logging.getLogger(__name__)

COMPOSE_FIRST = 'compose_first'
GLUE_FIRST = 'glue_first'

DEFAULT_MAX_HOM_SIZE = 8
DEFAULT_MAX_ENUM_OPENS = 6
DEFAULT_NODE_BUDGET = 200000

HomKey = Tuple[Open, Open]


@dataclass(frozen=True, eq=False)
class PpgMorphism:
    """Per-hom maps φ_{U,V}: C(U, V) → D(U, V)."""

    source: PrePseudogroup
    target: PrePseudogroup
    components: Mapping[HomKey, Mapping[Hom, Hom]]

    def apply(self, U: Open, V: Open, f: Hom) -> Hom:
        return self.components[(U, V)][f]


def identity_ppg_morphism(C: PrePseudogroup) -> PpgMorphism:
    return PpgMorphism(C, C, {key: {f: f for f in elements} for key, elements in C.homs.items()})


def compose_morphisms(psi: PpgMorphism, phi: PpgMorphism) -> PpgMorphism:
    """ψ ∘ φ."""
    components = {key: {f: psi.apply(*key, v) for f, v in table.items()}
                  for key, table in phi.components.items()}
    return PpgMorphism(phi.source, psi.target, components)


def check_ppg_morphism(phi: PpgMorphism, C: Optional[PrePseudogroup] = None,
                       D: Optional[PrePseudogroup] = None) -> CheckReport:
    """Functoriality and preservation of inclusions."""
    C = phi.source if C is None else C
    D = phi.target if D is None else D
    report = CheckReport('ppg_morphism')
    for kind in ('totality', 'inclusions', 'composition'):
        report.mark(kind)
    if C.space != D.space:
        report.add('totality', "Source and target live on different spaces")
        return report
    opens = C.space.opens

    for U in opens:
        for V in opens:
            table = phi.components.get((U, V), {})
            for f in C.hom(U, V):
                if f not in table:
                    report.add('totality', f"φ undefined on {f!r}", pair=(U, V), element=f)
                elif table[f] not in D.hom(U, V):
                    report.add('totality', "φ lands outside the target hom-set", pair=(U, V), element=f)
    if not report.ok:
        return report

    for (U, V), e in C.incl.items():
        if phi.apply(U, V, e) != D.inclusion(U, V):
            report.add('inclusions', "Inclusion is not preserved", pair=(U, V))

    for U, V, W in itertools.product(opens, repeat=3):
        for f in C.hom(U, V):
            for g in C.hom(V, W):
                lhs = phi.apply(U, W, C.compose(U, V, W, g, f))
                rhs = D.compose(U, V, W, phi.apply(V, W, g), phi.apply(U, V, f))
                if lhs != rhs:
                    report.add('composition', "Composition square does not commute",
                               chain=(U, V, W), elements=(g, f))
    return report


# ----------------------------------------------------------------------
# C#
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SharpPseudogroup:
    """C# together with the unit C → C#."""

    base: PrePseudogroup
    pseudogroup: PrePseudogroup
    unit: PpgMorphism

    def restrict_family(self, W: Open, t: Tuple[Tuple[int, Hom], ...]) -> Tuple[Tuple[int, Hom], ...]:
        return tuple((x, a) for x, a in t if x in W)


def _germ_family(C: PrePseudogroup, U: Open, V: Open, f: Hom) -> Tuple[Tuple[int, Hom], ...]:
    return tuple((x, germ_at(C, x, U, V, f)) for x in sorted(U))


def ppg_sharp(C: PrePseudogroup, verify: bool = False) -> SharpPseudogroup:
    """
    Build C#. A germ a_x ∈ C_x(V) is classified into its unique C_x^y, say
    a_x = incl(U_y, V) ∘ a', and (b ∘ a)_x = b_y ∘ a'.

    Raises:
        NotT1Space: C lives on a non-T1 space.
        DecompositionViolated: the germ classification is not unique.
    """
    space = C.space
    if not space.is_t1:
        raise NotT1Space("C# is built in the T1 dialect", space=space.name)
    verdict = check_decomposition(C)
    if not verdict:
        raise DecompositionViolated("Germ decomposition fails", **verdict.witness)

    opens = space.opens
    homs = {}
    for U in opens:
        points = sorted(U)
        for V in opens:
            stalks = [C.hom(space.minimal[x], V) for x in points]
            homs[(U, V)] = tuple(tuple(zip(points, combo)) for combo in itertools.product(*stalks))
    incl = {(U, V): tuple((x, C.inclusion(space.minimal[x], V)) for x in sorted(U))
            for U in opens for V in opens if U <= V}

    def composer(U, V, W, b, a):
        bd = dict(b)
        result = []
        for x, ax in a:
            y, factor = _classify_unique(C, x, V, ax)
            result.append((x, C.compose(space.minimal[x], space.minimal[y], W, bd[y], factor)))
        return tuple(result)

    sharp = PrePseudogroup(space=space, homs=homs, incl=incl, composer=composer,
                           name=f"{C.name or 'C'}#")
    unit = PpgMorphism(C, sharp, {(U, V): {f: _germ_family(C, U, V, f) for f in C.hom(U, V)}
                                  for U in opens for V in opens})
    result = SharpPseudogroup(base=C, pseudogroup=sharp, unit=unit)

    if verify:
        report = is_pseudogroup_sheaf(sharp, T1)
        if not report.ok:
            v = report.first()
            raise WitnessFailed(f"C# is not a pseudogroup sheaf: {v.message}", kind=v.kind, **v.witness)
        morphism = check_ppg_morphism(unit)
        if not morphism.ok:
            v = morphism.first()
            raise WitnessFailed(f"Unit C → C# is not a morphism: {v.message}", kind=v.kind, **v.witness)
    return result


def _compose_step(sharp: SharpPseudogroup, sub: Dict[HomKey, Set]) -> bool:
    P = sharp.pseudogroup
    opens = P.space.opens
    changed = False
    for U, V, W in itertools.product(opens, repeat=3):
        left, right = sub[(U, V)], sub[(V, W)]
        if not left or not right:
            continue
        target = sub[(U, W)]
        for a in list(left):
            for b in list(right):
                h = P.compose(U, V, W, b, a)
                if h not in target:
                    target.add(h)
                    changed = True
    return changed


def _glue_step(sharp: SharpPseudogroup, sub: Dict[HomKey, Set]) -> bool:
    P = sharp.pseudogroup
    space = P.space
    changed = False
    for U in reversed(space.opens):
        for V in space.opens:
            target = sub[(U, V)]
            for t in P.hom(U, V):
                if t in target:
                    continue
                if all(sharp.restrict_family(space.minimal[x], t) in sub[(space.minimal[x], V)] for x in U):
                    target.add(t)
                    changed = True
    return changed


def sheafify_closure(sharp: SharpPseudogroup, order: str = COMPOSE_FIRST,
                     compose: bool = True, glue: bool = True) -> Tuple[Dict[HomKey, Set], int]:
    """Alternate the enabled closure operators from the unit image until nothing changes."""
    C = sharp.base
    sub: Dict[HomKey, Set] = {key: set(table.values()) for key, table in sharp.unit.components.items()}
    for key, e in sharp.pseudogroup.incl.items():
        sub[key].add(e)

    steps: List[Callable[[SharpPseudogroup, Dict[HomKey, Set]], bool]] = []
    if compose:
        steps.append(_compose_step)
    if glue:
        steps.append(_glue_step)
    if order == GLUE_FIRST:
        steps.reverse()

    rounds = 0
    changed = True
    while changed:
        rounds += 1
        changed = False
        for step in steps:
            if step(sharp, sub):
                changed = True
    logger.debug(f"Closure of {C!r} ({order}) stabilised after {rounds} rounds")
    return sub, rounds


def _restrict_sharp(sharp: SharpPseudogroup, sub: Mapping[HomKey, Set], name: str) -> PrePseudogroup:
    P = sharp.pseudogroup
    return PrePseudogroup(space=P.space, homs={key: ordered(values) for key, values in sub.items()},
                          incl=P.incl, composer=P.composer, name=name)


@timed()
def ppg_sheafify(C: PrePseudogroup, order: str = COMPOSE_FIRST) -> Tuple[PrePseudogroup, PpgMorphism]:
    """
    Returns (Ĉ, unit) where Ĉ is the least sub-structure of C# that
    contains the unit image and is closed under composition and gluing.
    """
    sharp = ppg_sharp(C)
    sub, _rounds = sheafify_closure(sharp, order)
    chat = _restrict_sharp(sharp, sub, f"{C.name or 'C'}^")
    unit = PpgMorphism(C, chat, sharp.unit.components)
    logger.debug(f"Sheafified {C!r}: |Ĉ(X,X)| = {len(chat.hom(C.space.full, C.space.full))}")
    return chat, unit


def sheafification_deltas(C: PrePseudogroup, chat: PrePseudogroup) -> Dict[str, Tuple[int, int]]:
    """Per-hom cardinalities before and after, for hom-sets that changed."""
    deltas = {}
    for U in C.space.opens:
        for V in C.space.opens:
            before, after = len(C.hom(U, V)), len(chat.hom(U, V))
            if before != after:
                deltas[f"{format_open(U)}/{format_open(V)}"] = (before, after)
    return deltas


def check_unit_germ_bijection(C: PrePseudogroup, chat: PrePseudogroup, unit: PpgMorphism) -> Verdict:
    """C_x(V) → Ĉ_x(V) is a bijection for every x and V."""
    space = C.space
    for x in space.points:
        Ux = space.minimal[x]
        for V in space.opens:
            images = [unit.apply(Ux, V, f) for f in C.hom(Ux, V)]
            if len(set(images)) != len(images) or set(images) != set(chat.hom(Ux, V)):
                return Verdict(False, {'point': x, 'open': V, 'source': len(images),
                                       'target': len(chat.hom(Ux, V))})
    return Verdict(True)


def check_order_independence(C: PrePseudogroup) -> Verdict:
    sharp = ppg_sharp(C)
    first, _ = sheafify_closure(sharp, COMPOSE_FIRST)
    second, _ = sheafify_closure(sharp, GLUE_FIRST)
    for key in first:
        if first[key] != second[key]:
            return Verdict(False, {'pair': key, 'compose_first': len(first[key]), 'glue_first': len(second[key])})
    return Verdict(True)


# ----------------------------------------------------------------------
# Hom-presheaves of Ĉ are sheafifications
# ----------------------------------------------------------------------

def _sparse(points: Tuple[int, ...], U: Open, dense: Tuple) -> Tuple[Tuple[int, Hom], ...]:
    return tuple((x, value) for x, value in zip(points, dense) if x in U)


def check_prop45(C: PrePseudogroup) -> Verdict:
    """
    For every V, sheafify(C(-, V)) matches Ĉ(-, V) compatibly with the
    units, and the gluing closure alone already yields Ĉ.
    """
    sharp = ppg_sharp(C)
    full, _ = sheafify_closure(sharp, COMPOSE_FIRST)
    glue_only, _ = sheafify_closure(sharp, compose=False)
    chat = _restrict_sharp(sharp, full, 'chat')
    space = C.space
    points = space.points

    for key in full:
        if full[key] != glue_only[key]:
            return Verdict(False, {'reason': 'composition_adds_sections', 'pair': key,
                                   'with_composition': len(full[key]), 'gluing_only': len(glue_only[key])})

    for V in space.opens:
        result = sheafify(hom_presheaf(C, V))
        for U in space.opens:
            expected = set(chat.hom(U, V))
            computed = {_sparse(points, U, t) for t in result.sheaf.sections[U]}
            if computed != expected:
                return Verdict(False, {'reason': 'sheafification_differs', 'target': V, 'open': U,
                                       'presheaf': len(computed), 'pseudogroup': len(expected)})
            for f in C.hom(U, V):
                if _sparse(points, U, result.unit.apply(U, f)) != sharp.unit.apply(U, V, f):
                    return Verdict(False, {'reason': 'units_differ', 'target': V, 'open': U, 'element': f})
    return Verdict(True)


# ----------------------------------------------------------------------
# Universality
# ----------------------------------------------------------------------

def enumerate_ppg_morphisms(C: PrePseudogroup, D: PrePseudogroup,
                            constraint: Optional[Callable[[Open, Open, Hom, Hom], bool]] = None,
                            bijective: bool = False,
                            node_budget: int = DEFAULT_NODE_BUDGET) -> Iterator[PpgMorphism]:
    """
    Backtracking search over per-hom maps C → D preserving inclusions and
    composition. Each composition square is checked as soon as its last
    slot is filled.
    """
    opens = C.space.opens
    keys = [(U, V) for U in opens for V in opens]
    if bijective and any(len(C.hom(U, V)) != len(D.hom(U, V)) for U, V in keys):
        return
    slots = [(U, V, f) for (U, V) in keys for f in C.hom(U, V)]
    position = {slot: i for i, slot in enumerate(slots)}

    squares: Dict[int, List[Tuple[Tuple, Tuple, Tuple, Tuple[Open, Open, Open]]]] = {}
    for U, V, W in itertools.product(opens, repeat=3):
        for f in C.hom(U, V):
            for g in C.hom(V, W):
                sf, sg, sh = (U, V, f), (V, W, g), (U, W, C.compose(U, V, W, g, f))
                last = max(position[sf], position[sg], position[sh])
                squares.setdefault(last, []).append((sf, sg, sh, (U, V, W)))

    chosen: Dict[Tuple, Hom] = {}
    used: Dict[HomKey, Set[Hom]] = {key: set() for key in keys}
    nodes = [0]

    def allowed(i: int) -> bool:
        for sf, sg, sh, (U, V, W) in squares.get(i, ()):
            if D.compose(U, V, W, chosen[sg], chosen[sf]) != chosen[sh]:
                return False
        return True

    def extend(i: int) -> Iterator[PpgMorphism]:
        if i == len(slots):
            components: Dict[HomKey, Dict[Hom, Hom]] = {key: {} for key in keys}
            for (U, V, f), v in chosen.items():
                components[(U, V)][f] = v
            yield PpgMorphism(C, D, components)
            return
        U, V, f = slots[i]
        if (U, V) in C.incl and f == C.incl[(U, V)]:
            candidates = (D.inclusion(U, V),)
        else:
            candidates = D.hom(U, V)
        for v in candidates:
            nodes[0] += 1
            if nodes[0] > node_budget:
                raise EnumerationBudgetExceeded("Morphism search exceeded its node budget", budget=node_budget)
            if bijective and v in used[(U, V)]:
                continue
            if constraint is not None and not constraint(U, V, f, v):
                continue
            chosen[(U, V, f)] = v
            used[(U, V)].add(v)
            if allowed(i):
                yield from extend(i + 1)
            used[(U, V)].discard(v)
            del chosen[(U, V, f)]

    yield from extend(0)


def find_ppg_isomorphism(C: PrePseudogroup, D: PrePseudogroup,
                         node_budget: int = DEFAULT_NODE_BUDGET) -> Optional[PpgMorphism]:
    """Search oracle: some morphism bijective on every hom-set, or None."""
    if C.space != D.space:
        return None
    for phi in enumerate_ppg_morphisms(C, D, bijective=True, node_budget=node_budget):
        return phi
    return None


def _check_budget(C: PrePseudogroup, D: PrePseudogroup, max_hom_size: int, max_opens: int) -> None:
    opens = len(C.space.opens)
    largest = max([len(v) for v in C.homs.values()] + [len(v) for v in D.homs.values()] + [0])
    if opens > max_opens or largest > max_hom_size:
        raise EnumerationBudgetExceeded(
            "Uniqueness certificate is over budget",
            opens=opens, largest_hom=largest, max_opens=max_opens, max_hom_size=max_hom_size)


def check_universality(C: PrePseudogroup, D: PrePseudogroup, phi: PpgMorphism,
                       max_hom_size: int = DEFAULT_MAX_HOM_SIZE,
                       max_opens: int = DEFAULT_MAX_ENUM_OPENS,
                       node_budget: int = DEFAULT_NODE_BUDGET) -> Tuple[PpgMorphism, dict]:
    """
    Factor φ: C → D through the unit C → Ĉ.

    ψ is built germwise: a family (a_x) goes to the unique element of D
    whose germs are φ(a_x). Uniqueness is certified by enumerating every
    morphism Ĉ → D that agrees with φ on the unit image.

    Raises:
        NoFactorization: the germwise values do not glue uniquely in D.
        EnumerationBudgetExceeded: the certificate search is over budget.
    """
    phi_report = check_ppg_morphism(phi, C, D)
    if not phi_report.ok:
        v = phi_report.first()
        raise WitnessFailed(f"φ is not a morphism: {v.message}", kind=v.kind, **v.witness)

    chat, unit = ppg_sheafify(C)
    space = C.space
    components: Dict[HomKey, Dict[Hom, Hom]] = {}
    for U in space.opens:
        for V in space.opens:
            table = {}
            for t in chat.hom(U, V):
                local = {space.minimal[x]: phi.apply(space.minimal[x], V, ax) for x, ax in t}
                glued = [d for d in D.hom(U, V)
                         if all(D.restrict(U, W, V, d) == value for W, value in local.items())]
                if len(glued) != 1:
                    raise NoFactorization("Germwise values do not glue uniquely in the target",
                                          pair=(U, V), family=t, candidates=len(glued))
                table[t] = glued[0]
            components[(U, V)] = table
    psi = PpgMorphism(chat, D, components)

    psi_report = check_ppg_morphism(psi, chat, D)
    if not psi_report.ok:
        v = psi_report.first()
        raise NoFactorization(f"Germwise factorization is not a morphism: {v.message}", **v.witness)
    for (U, V), table in unit.components.items():
        for f, t in table.items():
            if psi.apply(U, V, t) != phi.apply(U, V, f):
                raise NoFactorization("Factorization does not extend φ", pair=(U, V), element=f)

    _check_budget(chat, D, max_hom_size, max_opens)
    fixed: Dict[Tuple[Open, Open, Hom], Hom] = {}
    for (U, V), table in unit.components.items():
        for f, t in table.items():
            fixed[(U, V, t)] = phi.apply(U, V, f)

    def agrees(U: Open, V: Open, t: Hom, value: Hom) -> bool:
        expected = fixed.get((U, V, t))
        return expected is None or expected == value

    count = 0
    for _ in enumerate_ppg_morphisms(chat, D, agrees, node_budget=node_budget):
        count += 1
        if count > 1:
            break
    return psi, {'candidates': count, 'unique': count == 1}


# ----------------------------------------------------------------------
# Supporting properties of the construction
# ----------------------------------------------------------------------

def check_coproduct_distribution(C: PrePseudogroup) -> CheckReport:
    """
    Composition commutes with the germwise classification: for a ∈ C(U_x, V)
    classified as incl(U_y, V) ∘ a' and any b ∈ C(V, W),
    b ∘ a = b_y ∘ a' where b_y is the germ of b at y.
    """
    report = CheckReport('coproduct_distribution')
    report.mark('coproduct_distribution')
    space = C.space
    for x in space.points:
        Ux = space.minimal[x]
        for V in space.opens:
            for a in C.hom(Ux, V):
                try:
                    y, factor = _classify_unique(C, x, V, a)
                except DecompositionViolated as e:
                    report.add('coproduct_distribution', str(e), **e.witness)
                    continue
                Uy = space.minimal[y]
                for W in space.opens:
                    for b in C.hom(V, W):
                        whole = C.compose(Ux, V, W, b, a)
                        germwise = C.compose(Ux, Uy, W, germ_at(C, y, V, W, b), factor)
                        if whole != germwise:
                            report.add('coproduct_distribution',
                                       "Composite differs from the composite of germs",
                                       point=x, target=y, source=V, open=W, first=a, second=b)
    return report


def check_construction_properties(C: PrePseudogroup) -> CheckReport:
    """
    The two facts the construction leans on, checked concretely:
    composition distributes over the germ coproduct, and a morphism of
    sheaves is an isomorphism iff it is one on every stalk.
    """
    report = CheckReport('construction_properties')
    report.merge(check_coproduct_distribution(C))
    report.mark('enough_points')
    space = C.space

    chat, _ = ppg_sheafify(C)
    for V in space.opens:
        result = sheafify(hom_presheaf(chat, V))
        verdict = check_morphism_stalkwise_iso(result.unit)
        if not verdict.stalkwise or not verdict.equivalent:
            report.add('enough_points', "Unit of a sheaf is not detected as an isomorphism",
                       target=V, **verdict.witness)
        inclusion = check_morphism_stalkwise_iso(inclusion_morphism(result.sheaf, result.sharp))
        if not inclusion.equivalent:
            report.add('enough_points', "Stalkwise and openwise verdicts disagree",
                       target=V, **inclusion.witness)
    return report
