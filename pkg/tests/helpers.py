"""Shared test utilities: random term generators and independent oracles.

Every oracle here is deliberately implemented without the hook pipeline, the
matcher or the prover search, so tests can cross-check the package against a
second, simpler computation of the same answer.
"""

from __future__ import annotations

import itertools

from gomterm import OpPattern, StarVar, SurfaceTerm, Var, Wildcard, positions, print_term

STRUCT_WRAP = {"par": "concPar", "cop": "concCop", "seq": "concSeq"}
STRUCT_UNWRAP = {v: k for k, v in STRUCT_WRAP.items()}


# -- generators --------------------------------------------------------------


def gen_bool_surface(rng, depth: int) -> SurfaceTerm:
    if depth <= 0 or rng.random() < 0.25:
        return SurfaceTerm(rng.choice(("True", "False")))
    op = rng.choice(("not", "and", "or"))
    if op == "not":
        return SurfaceTerm("not", (gen_bool_surface(rng, depth - 1),))
    return SurfaceTerm(op, (gen_bool_surface(rng, depth - 1), gen_bool_surface(rng, depth - 1)))


def gen_struct_surface(rng, depth: int) -> SurfaceTerm:
    """Random structure: atoms a-d, negation on atoms only, unit included."""
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.12:
            return SurfaceTerm("o")
        atom = SurfaceTerm(rng.choice("abcd"))
        if r < 0.45:
            return SurfaceTerm("neg", (atom,))
        return atom
    kind = rng.choice(("par", "cop", "seq"))
    n = rng.randint(0, 4)
    kids = tuple(gen_struct_surface(rng, depth - 1) for _ in range(n))
    return SurfaceTerm(kind, (SurfaceTerm(STRUCT_WRAP[kind], kids),))


# -- boolean oracle -----------------------------------------------------------


def bool_eval(t: SurfaceTerm) -> bool:
    """Direct recursive evaluation of an unnormalized boolean surface term."""
    if t.head == "True":
        return True
    if t.head == "False":
        return False
    if t.head == "not":
        return not bool_eval(t.children[0])
    if t.head == "and":
        return bool_eval(t.children[0]) and bool_eval(t.children[1])
    if t.head == "or":
        return bool_eval(t.children[0]) or bool_eval(t.children[1])
    raise AssertionError(t.head)


def negations_on_atoms(node) -> bool:
    """True iff every negation in the canonical term applies to a constant."""
    if node.operator == "not":
        if node.children[0].operator not in ("True", "False"):
            return False
    return all(negations_on_atoms(c) for c in node.children)


def eval_canonical_bool(node) -> bool:
    if node.operator == "True":
        return True
    if node.operator == "False":
        return False
    if node.operator == "not":
        return not eval_canonical_bool(node.children[0])
    if node.operator == "and":
        return eval_canonical_bool(node.children[0]) and eval_canonical_bool(node.children[1])
    return eval_canonical_bool(node.children[0]) or eval_canonical_bool(node.children[1])


# -- struct oracle ------------------------------------------------------------


def surface_str(t: SurfaceTerm) -> str:
    """Same rendering as print_term: constants bare, otherwise op(children)."""
    if not t.children and t.head not in STRUCT_UNWRAP:
        return t.head
    return f"{t.head}({','.join(surface_str(c) for c in t.children)})"


def canon_struct(t: SurfaceTerm) -> SurfaceTerm:
    """Independent recursive canonicalizer: drop units, flatten nested
    same-kind wrappers, sort par/cop contents, collapse empty and singleton
    wrappers.  Used as the oracle for the hook pipeline."""
    if t.head in STRUCT_WRAP:
        conc = t.children[0]
        elems: list[SurfaceTerm] = []
        for child in conc.children:
            n = canon_struct(child)
            if n.head == "o":
                continue
            if n.head == t.head:
                elems.extend(n.children[0].children)
            else:
                elems.append(n)
        if t.head in ("par", "cop"):
            elems.sort(key=surface_str)
        if not elems:
            return SurfaceTerm("o")
        if len(elems) == 1:
            return elems[0]
        return SurfaceTerm(t.head, (SurfaceTerm(STRUCT_WRAP[t.head], tuple(elems)),))
    if t.children:
        return SurfaceTerm(t.head, tuple(canon_struct(c) for c in t.children))
    return t


def canon_struct_str(t: SurfaceTerm) -> str:
    return surface_str(canon_struct(t))


def struct_canonical_form(node) -> bool:
    """The four canonical-form clauses: unit-free lists, flattened lists,
    sorted par/cop lists, no empty or singleton wrapped list."""
    for _, n in positions(node):
        if n.operator in STRUCT_UNWRAP:
            kids = n.children
            if any(c.operator == "o" for c in kids):
                return False
            if any(c.operator == STRUCT_UNWRAP[n.operator] for c in kids):
                return False
            if n.operator in ("concPar", "concCop"):
                printed = [print_term(c) for c in kids]
                if printed != sorted(printed):
                    return False
        if n.operator in STRUCT_WRAP:
            if len(n.children[0].children) < 2:
                return False
    return True


def node_to_surface(node) -> SurfaceTerm:
    return SurfaceTerm(node.operator, tuple(node_to_surface(c) for c in node.children))


# -- list matching oracle ------------------------------------------------------


def segment_oracle(items, subject):
    """All ways to segment ``subject`` over the pattern ``items``.

    ``items`` is a sequence of ("star", name) or ("const", name); ``subject``
    a tuple of constant names.  Solutions are dicts from star name to bound
    segment, enumerated in cut-point order (leftmost segment shortest first),
    with repeated star names required to bind equal segments.
    """
    n, k = len(subject), len(items)
    if k == 0:
        return [{}] if n == 0 else []
    solutions = []
    for cuts in itertools.combinations_with_replacement(range(n + 1), k - 1):
        bounds = (0,) + cuts + (n,)
        env: dict = {}
        ok = True
        for (kind, name), lo, hi in zip(items, bounds, bounds[1:]):
            seg = subject[lo:hi]
            if kind == "const":
                if hi - lo != 1 or seg[0] != name:
                    ok = False
                    break
            else:
                if name in env:
                    if env[name] != seg:
                        ok = False
                        break
                else:
                    env[name] = seg
        if ok:
            solutions.append(env)
    return solutions


# -- raw instantiation (matcher soundness witness) ------------------------------


def raw_instantiate(pattern, subst, store):
    """Rebuild a pattern under a substitution with plain interning only.

    Valid as a soundness witness because matched subjects are already
    canonical.  Patterns containing wildcards cannot be instantiated.
    """
    if isinstance(pattern, Var):
        return subst.bindings[pattern.name]
    if isinstance(pattern, OpPattern):
        kids = []
        for child in pattern.children:
            if isinstance(child, StarVar):
                kids.extend(subst.star_bindings[child.name])
            else:
                kids.append(raw_instantiate(child, subst, store))
        return store._intern(pattern.op, kids)
    if isinstance(pattern, Wildcard):
        raise AssertionError("cannot instantiate a wildcard")
    raise AssertionError(pattern)


# -- exhaustive prover oracle ----------------------------------------------------


def provable_by_exhaustion(factory, goal, depth: int = 10) -> bool:
    """Plain layered breadth-first reachability of the unit, pruning disabled.

    Reuses only the rule successor functions, not the prover's search,
    bookkeeping or bounds.
    """
    from gomterm.prover import SearchConfig, successors

    cfg = SearchConfig(can_react_pruning=False)
    if goal.operator == "o":
        return True
    seen = {id(goal)}
    layer = [goal]
    for _ in range(depth):
        nxt = []
        for node in layer:
            for _, _, succ in successors(factory, node, cfg):
                if id(succ) in seen:
                    continue
                if succ.operator == "o":
                    return True
                seen.add(id(succ))
                nxt.append(succ)
        if not nxt:
            return False
        layer = nxt
    return False
