"""Forcing instances: a poset, a root name t, a transitive HF set X.

File format (JSON, UTF-8)::

    {"conditions": ["p0", "p1", "top"], "top": "top",
     "order": [["p0", "top"], ["p1", "top"]],
     "names": {"e": [], "b": [["e", "p0"]], "t": [["e", "top"], ["b", "top"]]},
     "root": "t", "X": "{{}}"}

``order`` lists generating pairs ``[stronger, weaker]``; the closure is
computed on load. A name may only refer to names defined before it; a child
may also be written inline as ``"check:{...}"``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Any

from .config import DEFAULT_CAPS, Caps
from .errors import (
    DanglingName,
    NoMutationFound,
    NonTransitiveT,
    NonTransitiveX,
    ParamError,
    ParseError,
    SizeCapExceeded,
    UnknownCondition,
)
from .forcing import ForcingRelation, forcing_for
from .kernel import Filter, Poset, all_generic_filters, validate_poset
from .names import (
    EMPTY,
    HFSet,
    PName,
    check_name,
    check_value,
    format_hf,
    format_name,
    hf_rank,
    interpret,
    is_transitive,
    kpair,
    name_rank,
    non_transitive_witness,
    ordinal,
    parse_hf,
    potential_elements,
    sorted_hf,
    subnames,
    transitive_closure,
    transitive_sets,
)

CHECK_PREFIX = "check:"
FAMILIES = ("trivial", "two_branch", "cohen_trunc", "product_cohen_trunc", "random")


@dataclass(eq=False)
class Instance:
    poset: Poset
    root: PName
    X: HFSet
    names: dict[str, PName]
    root_id: str = "t"
    caps: Caps = DEFAULT_CAPS
    memo: dict = field(default_factory=dict, repr=False)

    @cached_property
    def pe(self) -> list[PName]:
        return potential_elements(self.root)

    @cached_property
    def generics(self) -> list[Filter]:
        return all_generic_filters(self.poset)

    @property
    def forcing(self) -> ForcingRelation:
        return forcing_for(self.poset)

    @cached_property
    def _labels(self) -> dict[PName, str]:
        labels: dict[PName, str] = {}
        for ident, s in self.names.items():
            labels.setdefault(s, ident)
        return labels

    def label(self, s: PName) -> str:
        """Identifier of a name, ``check:{..}`` for check-names, else structure."""
        if s in self._labels:
            return self._labels[s]
        v = check_value(s, self.poset)
        if v is not None:
            return CHECK_PREFIX + format_hf(v)
        return format_name(s)

    def lookup(self, ident: str) -> PName:
        if ident.startswith(CHECK_PREFIX):
            return check_name(parse_hf(ident[len(CHECK_PREFIX):]), self.poset)
        try:
            return self.names[ident]
        except KeyError:
            raise DanglingName(f"unknown name {ident!r}", name=ident) from None

    def all_names(self) -> list[PName]:
        """Every name reachable from the root or the name table."""
        seen = set(subnames(self.root))
        for s in self.names.values():
            seen.update(subnames(s))
        return sorted(seen, key=lambda s: (s.rank, self.label(s)))

    def realizing_generics(self) -> list[Filter]:
        return [G for G in self.generics if interpret(self.root, G) == self.X]

    def with_x(self, X: HFSet) -> Instance:
        return dataclasses.replace(self, X=X, memo={})

    def variant(self, X: HFSet) -> Instance:
        """Like :meth:`with_x` but memoised, so derived results are shared."""
        if X == self.X:
            return self
        key = ("variant", X)
        if key not in self.memo:
            self.memo[key] = self.with_x(X)
        return self.memo[key]

    def to_dict(self) -> dict[str, Any]:
        P = self.poset
        order = sorted(
            (a, b) for a, b in P.leq
            if a != b and not any(c not in (a, b) and P.le(a, c) and P.le(c, b) for c in P.elements)
        )
        return {
            "conditions": list(P.elements),
            "top": P.top,
            "order": [list(pair) for pair in order],
            "names": {
                ident: sorted([self.label(c), p] for c, p in s)
                for ident, s in self.names.items()
            },
            "root": self.root_id,
            "X": format_hf(self.X),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=1)

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParseError(message)


def load_instance(source: str | Path | dict, caps: Caps = DEFAULT_CAPS) -> Instance:
    """Load and validate an instance from a path, JSON text or parsed dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = source
        if isinstance(source, Path) or not source.lstrip().startswith("{"):
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise ParseError(f"cannot read {source}: {exc}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    _require(isinstance(data, dict), "instance must be a JSON object")
    for key in ("conditions", "names", "root", "X"):
        _require(key in data, f"missing field {key!r}")
    conditions = data["conditions"]
    _require(isinstance(conditions, list) and all(isinstance(c, str) for c in conditions),
             "conditions must be a list of strings")
    order = data.get("order", [])
    _require(isinstance(order, list) and all(isinstance(o, list) and len(o) == 2 for o in order),
             "order must be a list of [stronger, weaker] pairs")
    conditions = list(dict.fromkeys(conditions))
    top = data.get("top")
    if top is None:
        # adjoin a fresh top above everything
        top = "top"
        while top in conditions:
            top += "'"
        conditions.append(top)
        order = order + [[c, top] for c in conditions if c != top]
    _require(isinstance(top, str), "top must be a string")
    known = set(conditions)
    for a, b in order:
        for c in (a, b):
            if c not in known:
                raise UnknownCondition(f"order mentions unknown condition {c!r}", condition=c)
    if top not in known:
        raise UnknownCondition(f"top {top!r} is not a listed condition", condition=top)
    if len(conditions) > caps.poset:
        raise SizeCapExceeded(f"|P| = {len(conditions)} exceeds cap {caps.poset}")
    poset = validate_poset([tuple(o) for o in order], conditions, top)

    raw_names = data["names"]
    _require(isinstance(raw_names, dict), "names must be an object")
    names: dict[str, PName] = {}
    for ident, entries in raw_names.items():
        _require(isinstance(entries, list), f"name {ident!r} must be a list of pairs")
        pairs = []
        for entry in entries:
            _require(isinstance(entry, list) and len(entry) == 2 and all(isinstance(v, str) for v in entry),
                     f"entry {entry!r} of name {ident!r} must be [child, condition]")
            child, cond = entry
            if cond not in known:
                raise UnknownCondition(f"name {ident!r} uses unknown condition {cond!r}", condition=cond, name=ident)
            if child.startswith(CHECK_PREFIX):
                pairs.append((check_name(parse_hf(child[len(CHECK_PREFIX):]), top), cond))
            elif child in names:
                pairs.append((names[child], cond))
            else:
                raise DanglingName(f"name {ident!r} refers to undefined name {child!r}", name=child)
        names[ident] = PName(pairs)
    root_id = data["root"]
    if root_id not in names:
        raise DanglingName(f"root {root_id!r} is not defined", name=root_id)
    _require(isinstance(data["X"], str), "X must be a braces string")
    X = parse_hf(data["X"])
    return make_instance(poset, names, root_id, X, caps)


def make_instance(poset: Poset, names: dict[str, PName], root_id: str, X: HFSet, caps: Caps = DEFAULT_CAPS) -> Instance:
    """Validate the instance invariants and build the Instance."""
    witness = non_transitive_witness(X)
    if witness is not None:
        member, missing = witness
        raise NonTransitiveX(f"X is not transitive: {format_hf(missing)} in {format_hf(member)} but not in X",
                             member=member, missing=missing)
    root = names[root_id]
    for s in names.values():
        for u in subnames(s):
            for _, p in u:
                if p not in poset:
                    raise UnknownCondition(f"unknown condition {p!r}", condition=p)
    pe = potential_elements(root)
    if len(pe) > caps.pe:
        raise SizeCapExceeded(f"|pe(t)| = {len(pe)} exceeds cap {caps.pe}")
    if len(X) > caps.x:
        raise SizeCapExceeded(f"|X| = {len(X)} exceeds cap {caps.x}")
    for G in all_generic_filters(poset):
        value = interpret(root, G)
        witness = non_transitive_witness(value)
        if witness is not None:
            raise NonTransitiveT(
                f"t[G] is not transitive for G = {sorted(G)}: {format_hf(witness[1])} missing",
                generic=sorted(G), element=witness[1])
    return Instance(poset=poset, root=root, X=X, names=dict(names), root_id=root_id, caps=caps)


class _NameTable:
    """Collects names for a generated instance in topological order."""

    def __init__(self, poset: Poset):
        self.poset = poset
        self.table: dict[str, PName] = {}
        self._ids: dict[PName, str] = {}
        self._auto = 0

    def add(self, ident: str | None, s: PName) -> str:
        for c, _ in sorted(s, key=lambda e: format_name(e[0])):
            if c not in self._ids and check_value(c, self.poset) is None:
                self.add(None, c)
        if s in self._ids and ident is None:
            return self._ids[s]
        if ident is None:
            ident = f"n{self._auto}"
            self._auto += 1
        self.table[ident] = s
        self._ids.setdefault(s, ident)
        return ident


def two_branch(X: HFSet | str | None = None, caps: Caps = DEFAULT_CAPS) -> Instance:
    """The fixture T1: two incompatible atoms below top.

    ``b = {(e, p0)}`` and ``t = {(e, top), (b, top)}``, so ``t[G0] = {∅, {∅}}``
    and ``t[G1] = {∅}``. X defaults to ``{∅}``.
    """
    poset = validate_poset([("p0", "top"), ("p1", "top")], ["top", "p0", "p1"], "top")
    e = PName()
    b = PName({(e, "p0")})
    t = PName({(e, "top"), (b, "top")})
    X = parse_hf("{{}}") if X is None else _as_hf(X)
    return make_instance(poset, {"e": e, "b": b, "t": t}, "t", X, caps)


def _as_hf(X) -> HFSet:
    return parse_hf(X) if isinstance(X, str) else X


def trivial(X: HFSet | str = "{}", caps: Caps = DEFAULT_CAPS) -> Instance:
    X = _as_hf(X)
    poset = validate_poset([], ["top"], "top")
    table = _NameTable(poset)
    table.add("t", check_name(X, poset))
    return make_instance(poset, table.table, "t", X, caps)


def _tree_poset(n: int) -> Poset:
    nodes = [""]
    for depth in range(n):
        nodes += ["".join(bits) for bits in product("01", repeat=depth + 1)]
    labels = {s: ("s" + s if s else "top") for s in nodes}
    pairs = [(labels[s], labels[s[:-1]]) for s in nodes if s]
    return validate_poset(pairs, labels.values(), "top")


def _bit_pairs(n: int) -> tuple[dict, HFSet]:
    """Kuratowski pairs <i, bit> for i < n, and the transitive set they generate."""
    pairs = {(i, r): kpair(ordinal(i), ordinal(r)) for i in range(n) for r in (0, 1)}
    values = frozenset(pairs.values())
    return pairs, HFSet(transitive_closure(HFSet(values)) | values)


def cohen_trunc(n: int, caps: Caps = DEFAULT_CAPS) -> Instance:
    """Full binary tree of height n; the generic branch is the function r.

    ``r = {<i, bit_i>}`` as Kuratowski pairs. The root is ``{r} ∪ U`` with U
    the check-named transitive closure of all possible pairs, so t[G] is
    transitive and differs for every branch.
    """
    if n < 0:
        raise ParamError("cohen_trunc needs n >= 0")
    poset = _tree_poset(n)
    bit_pairs, scaffold = _bit_pairs(n)
    table = _NameTable(poset)
    branch = PName(
        (check_name(bit_pairs[len(p) - 2, int(p[-1])], poset), p)
        for p in poset.elements if p != "top"
    )
    table.add("r", branch)
    root = PName({(branch, "top")} | {(check_name(u, poset), "top") for u in scaffold})
    table.add("t", root)
    generic = interpret(root, all_generic_filters(poset)[0])
    return make_instance(poset, table.table, "t", generic, caps)


def _grid_functions(n: int, m: int) -> list[dict]:
    cells = [(i, k) for i in range(n) for k in range(m)]
    out = []
    for values in product((None, 0, 1), repeat=len(cells)):
        out.append({c: v for c, v in zip(cells, values) if v is not None})
    return out


def _grid_label(f: dict) -> str:
    if not f:
        return "top"
    return "c" + ";".join(f"{i}.{k}={v}" for (i, k), v in sorted(f.items()))


def product_cohen_trunc(n: int, m: int, caps: Caps = DEFAULT_CAPS) -> Instance:
    """Finite-support product Cohen forcing truncated to an n x m grid.

    Conditions are partial maps grid -> {0, 1} ordered by extension; column k
    carries a real x_k with n bits, coded as the set of Kuratowski pairs
    <i, bit>. The root adds the check-named scaffolding U (the transitive
    closure of all such pairs) so that t[G] = {x_k[G]} ∪ U is transitive.
    """
    if n < 1 or m < 1:
        raise ParamError("product_cohen_trunc needs n >= 1 and m >= 1")
    funcs = _grid_functions(n, m)
    if len(funcs) > caps.poset:
        raise ParamError(f"product_cohen_trunc({n},{m}) has {len(funcs)} conditions, cap is {caps.poset}")
    labels = [_grid_label(f) for f in funcs]
    pairs = []
    for f, lf in zip(funcs, labels):
        for g, lg in zip(funcs, labels):
            if f is not g and len(g) + 1 == len(f) and g.items() <= f.items():
                pairs.append((lf, lg))
    poset = validate_poset(pairs, labels, "top")
    bit_pairs, scaffold = _bit_pairs(n)
    table = _NameTable(poset)
    reals = []
    for k in range(m):
        x_k = PName(
            (check_name(bit_pairs[i, r], poset), lf)
            for f, lf in zip(funcs, labels)
            for (i, col), r in f.items() if col == k
        )
        table.add(f"x{k}", x_k)
        reals.append(x_k)
    root = PName({(x, "top") for x in reals} | {(check_name(u, poset), "top") for u in scaffold})
    table.add("t", root)
    generic = interpret(root, all_generic_filters(poset)[0])
    return make_instance(poset, table.table, "t", generic, caps)


def random_instance(seed: int, *, max_conditions: int = 6, max_rank: int = 3, max_pe: int = 4,
                    max_x: int = 5, caps: Caps = DEFAULT_CAPS) -> Instance:
    """Random small instance; X is t[G] for a randomly chosen generic G.

    The root lists a child-closed family of names, which makes every t[G]
    transitive; some entries get non-top conditions when transitivity
    survives that.
    """
    rng = random.Random(seed)
    for _ in range(1000):
        k = rng.randint(1, max_conditions - 1)
        conds = [f"p{i}" for i in range(k)]
        pairs = [(c, "top") for c in conds]
        for j in range(k):
            for i in range(j):
                if rng.random() < 0.3:
                    pairs.append((conds[j], conds[i]))
        poset = validate_poset(pairs, conds + ["top"], "top")
        elems = poset.elements

        levels: list[list[PName]] = [[PName()]]
        for _rank in range(1, max_rank):
            fresh = []
            for _ in range(rng.randint(1, 3)):
                lower = [s for level in levels for s in level]
                children = {(rng.choice(levels[-1]), rng.choice(elems))}
                for _ in range(rng.randint(0, 2)):
                    children.add((rng.choice(lower), rng.choice(elems)))
                fresh.append(PName(children))
            levels.append(fresh)
        pool = [s for level in levels for s in level]
        chosen = set(subnames(rng.choice(pool)))
        for _ in range(rng.randint(0, 2)):
            chosen.update(subnames(rng.choice(pool)))
        if len(chosen) > max_pe:
            continue
        entries = {(s, "top") for s in chosen}
        if rng.random() < 0.6:
            loose = {(s, rng.choice(elems)) if rng.random() < 0.4 else (s, "top") for s in chosen}
            if all(is_transitive(interpret(PName(loose), G)) for G in all_generic_filters(poset)):
                entries = loose
        root = PName(entries)
        G = rng.choice(all_generic_filters(poset))
        X = interpret(root, G)
        if len(X) > max_x:
            continue
        table = _NameTable(poset)
        table.add("t", root)
        return make_instance(poset, table.table, "t", X, caps)
    raise ParamError(f"no random instance found for seed {seed}")


def gen(family: str, params: dict | None = None, seed: int = 0, caps: Caps = DEFAULT_CAPS) -> Instance:
    """Generate an instance of a named family; deterministic per arguments."""
    params = dict(params or {})
    try:
        if family == "trivial":
            return trivial(params.get("X", "{}"), caps=caps)
        if family == "two_branch":
            return two_branch(params.get("X"), caps=caps)
        if family == "cohen_trunc":
            return cohen_trunc(int(params.get("n", 2)), caps=caps)
        if family == "product_cohen_trunc":
            return product_cohen_trunc(int(params.get("n", 1)), int(params.get("m", 1)), caps=caps)
        if family == "random":
            return random_instance(seed, caps=caps, **{k: int(v) for k, v in params.items()})
    except (TypeError, ValueError) as exc:
        raise ParamError(f"bad parameters for {family}: {exc}") from None
    raise ParamError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def mutate_X(instance: Instance, seed: int = 0, rank_bound: int | None = None,
             max_size: int | None = None) -> tuple[Instance, list[tuple[list, HFSet]]]:
    """Replace X by a transitive set no generic filter realizes.

    Candidates are the transitive sets of rank <= ``rank_bound`` (default one
    above the larger of rank(X) and rank(t), at most 4) with at most ``max_size`` members. Returns the new
    instance and, per generic G, an element of the symmetric difference of
    the new X and t[G].
    """
    if rank_bound is None:
        rank_bound = min(max(hf_rank(instance.X), name_rank(instance.root)) + 1, 4)
    if max_size is None:
        max_size = instance.caps.x
    realized = {interpret(instance.root, G) for G in instance.generics}
    candidates = [x for x in transitive_sets(rank_bound, max_size) if x not in realized]
    if not candidates:
        raise NoMutationFound(f"every transitive set of rank <= {rank_bound} is some t[G]")
    X = random.Random(seed).choice(candidates)
    witnesses = []
    for G in instance.generics:
        diff = sorted_hf(X ^ interpret(instance.root, G))
        witnesses.append((sorted(G), diff[0]))
    return instance.with_x(X), witnesses


def realized_values(instance: Instance) -> list[HFSet]:
    return sorted_hf({interpret(instance.root, G) for G in instance.generics})


__all__ = [
    "EMPTY",
    "Instance",
    "gen",
    "load_instance",
    "make_instance",
    "mutate_X",
    "random_instance",
    "realized_values",
    "two_branch",
]
