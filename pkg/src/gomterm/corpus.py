"""Builtin signature modules, embedded so the CLI works with no file arguments.

The same texts ship as ``corpus/*.gom`` files in the repository; a test keeps
the two in sync.
"""

from __future__ import annotations

from .factory import Factory
from .parser import parse_module
from .signature import SignatureModule, resolve_imports, validate

BOOLEAN_GOM = """\
module Boolean
  sorts Bool
  abstract syntax
    True                   -> Bool
    False                  -> Bool
    not(b:Bool)            -> Bool
    and(lhs:Bool,rhs:Bool) -> Bool
    or(lhs:Bool,rhs:Bool)  -> Bool

    // Negation normal form: push negations to the atoms and drop double
    // negations.  Constructions that match no clause fall through to the
    // plain constructor.
    not:make(arg) {
      not(x)   -> x;
      and(l,r) -> or(not(l),not(r));
      or(l,r)  -> and(not(l),not(r));
    }
"""

STRUCT_GOM = """\
module Struct
  imports
  public
    sorts Struc StrucPar StrucCop StrucSeq
  abstract syntax
    o -> Struc
    a -> Struc
    b -> Struc
    c -> Struc
    d -> Struc
    ... // further atom constants would go here
    neg(a:Struc) -> Struc
    concPar( Struc* )  -> StrucPar
    concCop( Struc* )  -> StrucCop
    concSeq( Struc* )  -> StrucSeq
    cop(copl:StrucCop) -> Struc
    par(parl:StrucPar) -> Struc
    seq(seql:StrucSeq) -> Struc

    // Wrappers of empty or singleton lists reduce to the unit or the content.
    par:make(l) {
      concPar()  -> o;
      concPar(x) -> x;
    }
    cop:make(l) {
      concCop()  -> o;
      concCop(x) -> x;
    }
    seq:make(l) {
      concSeq()  -> o;
      concSeq(x) -> x;
    }

    // Seq lists are associative with the unit as neutral element: drop units,
    // flatten nested seq.
    concSeq:make_insert(e,l) {
      o, rest                -> rest;
      seq(concSeq(L*)), rest -> concSeq(L*,rest*);
    }

    // Par and cop lists are also commutative: on top of unit removal and
    // flattening, insertion keeps the element list sorted, which picks one
    // canonical representative per equivalence class.
    concPar:make_insert(e,l) {
      o, rest                -> rest;
      par(concPar(L*)), rest -> concPar(L*,rest*);
      x, concPar(head,tail*) where geq(x,head) -> raw(concPar(head,concPar(x,tail*)));
    }
    concCop:make_insert(e,l) {
      o, rest                -> rest;
      cop(concCop(L*)), rest -> concCop(L*,rest*);
      x, concCop(head,tail*) where geq(x,head) -> raw(concCop(head,concCop(x,tail*)));
    }
"""

NAT_GOM = """\
module Nat
  sorts Nat NatList
  abstract syntax
    zero         -> Nat
    suc(n:Nat)   -> Nat
    conc( Nat* ) -> NatList
"""

BUILTIN_MODULES = {
    "boolean": BOOLEAN_GOM,
    "struct": STRUCT_GOM,
    "nat": NAT_GOM,
}

_loaded: dict[str, SignatureModule] = {}


def load_builtin(name: str) -> SignatureModule:
    """Parse, resolve and validate a builtin module; the result is cached
    (modules are immutable)."""
    module = _loaded.get(name)
    if module is None:
        module = resolve_imports(parse_module(BUILTIN_MODULES[name]), ())
        report = validate(module)
        if not report.accepted:
            raise AssertionError(f"builtin module {name} failed validation:\n{report.format(name)}")
        _loaded[name] = module
    return module


def builtin_factory(name: str) -> Factory:
    """A factory over a fresh store for a builtin module."""
    return Factory(load_builtin(name))
