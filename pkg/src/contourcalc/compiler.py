"""Reduction of compositions of products to single-function factors.

The driver ``derive_rule`` distributes internal labels over the target's
retarded and Matsubara sets, discards distributions containing a
disconnected retarded set, moves Matsubara markers onto the individual
sub-functions, and then reduces each surviving block by a fixpoint of:

* factoring out sub-functions whose surviving arguments sit in distinct
  top-level items (their contour order is fixed),
* splitting blocks whose sub-functions fall apart into disconnected groups,
* peeling two-point bridges off binary nested sets,
* a multilinear telescope over the sign dimensions of a single retarded
  set, which leaves one retarded-difference factor per dimension,
* nested-retarded expansion with the pivot chosen to maximise the number
  of immediately vanishing terms.

Blocks that none of these rules touch are expanded into step-weighted
words of plain components; the result is then exact but not compact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .ir import (
    ContourEquation,
    ContourError,
    Factor,
    Item,
    Mats,
    Plain,
    RealTimeExpression,
    RealTimeTerm,
    Ret,
    SubFunction,
    SuperIndex,
    canonicalize,
    connected,
    item_labels,
    top_label,
)
from .engine import (
    expand_retarded,
    enumerate_pivots,
    nested_expand,
    normalize_item,
    representation,
    _validate_target,
)


class NamingUnavailable(ContourError):
    """Langreth shorthand naming requested for a factor that has none."""


@dataclass(frozen=True)
class ProductComposition:
    """A composition super-index attached to a product of sub-functions."""

    product: tuple[SubFunction, ...]
    index: SuperIndex
    real_integrals: frozenset[str] = frozenset()
    imag_integrals: frozenset[str] = frozenset()


# a sub-function together with the subset of its arguments pinned to the
# Matsubara branch (order follows the global Matsubara label sequence)
BFunc = tuple[SubFunction, tuple[str, ...]]
PartTerm = tuple[int, tuple[tuple[str, ...], ...], tuple[Factor, ...]]


def _kargs(bf: BFunc) -> tuple[str, ...]:
    func, mats = bf
    return tuple(a for a in func.args if a not in mats)


def _kedges(funcs: Sequence[BFunc]) -> set[frozenset[str]]:
    edges: set[frozenset[str]] = set()
    for bf in funcs:
        ks = _kargs(bf)
        for x, y in itertools.combinations(ks, 2):
            edges.add(frozenset((x, y)))
    return edges


def _factor(bf: BFunc, real_items: Sequence[Item]) -> Factor:
    func, mats = bf
    items: tuple[Item, ...] = tuple(real_items)
    if mats:
        items = (Mats(mats),) + items
    return Factor(func, SuperIndex(items))


def disconnected_witness(items: Sequence[Item], edges: set[frozenset[str]]) -> Optional[Item]:
    """The first retarded set (outer or nested) that is disconnected."""

    def walk(item: Item) -> Optional[Item]:
        if not isinstance(item, Ret):
            return None
        if not connected(item_labels(item), edges):
            return item
        hit = walk(item.top)
        if hit is not None:
            return hit
        for e in item.rest:
            hit = walk(e)
            if hit is not None:
                return hit
        return None

    for item in items:
        hit = walk(item)
        if hit is not None:
            return hit
    return None


def _split_mats(pc: ProductComposition) -> tuple[tuple[BFunc, ...], tuple[Item, ...]]:
    m_order = pc.index.mats_labels()
    funcs = tuple(
        (f, tuple(l for l in m_order if l in set(f.args))) for f in pc.product
    )
    items = tuple(normalize_item(i) for i in pc.index.real_items())
    return funcs, items


def vanishes(pc: ProductComposition) -> tuple[bool, Optional[Item]]:
    """Does some retarded set of the composition have disconnected labels?

    Connectivity counts only arguments still on the horizontal branches;
    sub-functions with arguments in the Matsubara set provide edges only
    among their remaining arguments.
    """
    funcs, items = _split_mats(pc)
    witness = disconnected_witness(items, _kedges(funcs))
    return witness is not None, witness


def distribute_matsubara(pc: ProductComposition) -> tuple[tuple[Factor, ...], ProductComposition]:
    """Move the Matsubara set onto the individual sub-functions.

    Sub-functions left with at most one horizontal argument reduce to
    closed components and are factored out; the rest keep per-function
    Matsubara markers (their factors will carry the ``M(...)`` prefix).
    The returned composition has no Matsubara head.
    """
    funcs, items = _split_mats(pc)
    closed: list[Factor] = []
    remaining: list[SubFunction] = []
    for func, mats in funcs:
        ks = _kargs((func, mats))
        if len(ks) == 0:
            closed.append(_factor((func, mats), ()))
        elif len(ks) == 1 and mats:
            closed.append(_factor((func, mats), (Plain(ks[0]),)))
        else:
            remaining.append(func)
    kept_mats = tuple(
        l for l in pc.index.mats_labels() if any(l in f.args for f in remaining)
    )
    head: tuple[Item, ...] = (Mats(kept_mats),) if kept_mats else ()
    return tuple(closed), ProductComposition(
        tuple(remaining), SuperIndex(head + items), pc.real_integrals, pc.imag_integrals
    )


def component_of_product(
    product: Sequence[SubFunction] | Sequence[BFunc], full_order: Sequence[str]
) -> tuple[Factor, ...]:
    """Induced components of the sub-functions under one total ordering.

    Each sub-function keeps its own labels in the relative order given by
    ``full_order`` (latest first); Matsubara markers pass through.
    """
    word = tuple(full_order)
    out = []
    for entry in product:
        bf: BFunc = entry if isinstance(entry, tuple) else (entry, ())
        ks = set(_kargs(bf))
        induced = tuple(Plain(l) for l in word if l in ks)
        out.append(_factor(bf, induced))
    return tuple(out)


def commutator_prune(
    funcs: Sequence[BFunc] | Sequence[SubFunction], items: Sequence[Item] | SuperIndex
):
    """Step-weighted words of a composition, minus identically-zero terms.

    A commutator term dies when some entry (nested sets count as atoms) is
    not directly connected to any entry on its left; connections are shared
    horizontal arguments of the block's sub-functions.
    """
    bfuncs = tuple(bf if isinstance(bf, tuple) else (bf, ()) for bf in funcs)
    return expand_retarded(items, edges=_kedges(bfuncs))


def separate(pc: ProductComposition) -> tuple[tuple[Factor, ...], tuple[ProductComposition, ...]]:
    """One round of factoring and block splitting, without expansions.

    Returns the closed component factors pulled out of the product and the
    remaining independent blocks, each a smaller composition.
    """
    closed, rest = distribute_matsubara(pc)
    bfuncs, items = _split_mats(rest)
    got, blocks = _separate_once(bfuncs, items)
    pcs = []
    for bl_funcs, bl_items in blocks:
        mats = tuple(
            l for l in rest.index.mats_labels() if any(l in f.args for f, _ in bl_funcs)
        )
        head: tuple[Item, ...] = (Mats(mats),) if mats else ()
        pcs.append(
            ProductComposition(
                tuple(f for f, _ in bl_funcs), SuperIndex(head + tuple(bl_items))
            )
        )
    return closed + got, tuple(pcs)


# ---------------------------------------------------------------------------
# block reduction


def _item_positions(items: Sequence[Item]) -> dict[str, int]:
    pos = {}
    for i, item in enumerate(items):
        for l in item_labels(item):
            pos[l] = i
    return pos


def _determined(funcs: Sequence[BFunc], items: Sequence[Item]):
    """Split off functions whose arguments all sit in distinct items."""
    pos = _item_positions(items)
    factors: list[Factor] = []
    remaining: list[BFunc] = []
    for bf in funcs:
        ks = _kargs(bf)
        slots = [pos[a] for a in ks]
        if len(set(slots)) == len(slots):
            ordered = tuple(Plain(a) for a in sorted(ks, key=lambda a: pos[a]))
            factors.append(_factor(bf, ordered))
        else:
            remaining.append(bf)
    return tuple(factors), tuple(remaining)


def _components(funcs: Sequence[BFunc]) -> list[set[str]]:
    groups: list[set[str]] = []
    for bf in funcs:
        ks = set(_kargs(bf))
        merged = [g for g in groups if g & ks]
        for g in merged:
            ks |= g
            groups.remove(g)
        groups.append(ks)
    return groups


def _separate_once(funcs: Sequence[BFunc], items: Sequence[Item]):
    """Factor determined functions, drop orphan plains, split components."""
    factors, funcs = _determined(funcs, items)
    owned = set(l for bf in funcs for l in _kargs(bf))
    items = tuple(i for i in items if not (isinstance(i, Plain) and i.label not in owned))
    groups = _components(funcs)
    blocks = []
    for g in groups:
        bl_funcs = tuple(bf for bf in funcs if set(_kargs(bf)) <= g)
        bl_items = tuple(i for i in items if set(item_labels(i)) <= g)
        blocks.append((bl_funcs, bl_items))
    return factors, blocks


def _entry_at(items: Sequence[Item], path: tuple[int, ...]) -> Item:
    node: Item = items[path[0]]
    for step in path[1:]:
        assert isinstance(node, Ret)
        node = node.top if step == 0 else node.rest[step - 1]
    return node


def _try_bridge(funcs: Sequence[BFunc], items: Sequence[Item]):
    """Peel a two-point function joining the tops of a binary set.

    Applicable to a top-level item ``R(t, (u,))`` when one of ``t``/``u``
    is a plain label owned by exactly one remaining function, and that
    function's other horizontal argument is the other entry's top label.
    The function factors as ``R(top(t), top(u))`` and the item collapses
    onto the other entry.
    """
    for i, item in enumerate(items):
        if not (isinstance(item, Ret) and len(item.rest) == 1):
            continue
        t, u = item.top, item.rest[0]
        for solo, other in ((t, u), (u, t)):
            if not isinstance(solo, Plain):
                continue
            x = solo.label
            owners = [bf for bf in funcs if x in _kargs(bf)]
            if len(owners) != 1:
                continue
            bf = owners[0]
            ks = set(_kargs(bf))
            y = top_label(other)
            if ks != {x, y}:
                continue
            factor = _factor(bf, (Ret(Plain(top_label(t)), (Plain(top_label(u)),)),))
            new_items = items[:i] + (other,) + items[i + 1 :]
            new_funcs = tuple(b for b in funcs if b is not bf)
            return factor, new_funcs, new_items
    return None


def _pair_factor(bf: BFunc, block_word: Sequence[str], u: str, v: str) -> Factor:
    """Component difference of ``bf`` under swapping u (later) and v, with the
    step support absorbed: the composition with ``R(u, v)`` in place of the
    pair, other arguments at their fixed slots."""
    ks = set(_kargs(bf))
    items: list[Item] = []
    for l in block_word:
        if l not in ks:
            continue
        if l == u:
            items.append(Ret(Plain(u), (Plain(v),)))
        elif l != v:
            items.append(Plain(l))
    return _factor(bf, tuple(items))


# ---------------------------------------------------------------------------
# multilinear telescoping of a single retarded set
#
# The nested-commutator expansion of a binarized retarded set is a product
# of two-sided block swaps: every ordering of the retarded entries gives
# words  prod_d s_d  with one sign dimension per commutator level (outer
# and inside nested entries).  When each sub-function of the block straddles
# at most one swap, the sum factorizes per dimension and telescopes into a
# single retarded-difference factor per dimension.

_Tree = tuple  # ("leaf", label) | ("swap", dim_id, left, right)


def _tree_labels(tree: _Tree) -> tuple[str, ...]:
    if tree[0] == "leaf":
        return (tree[1],)
    return _tree_labels(tree[2]) + _tree_labels(tree[3])


def _tree_word(tree: _Tree, signs: dict[int, int]) -> tuple[str, ...]:
    if tree[0] == "leaf":
        return (tree[1],)
    left = _tree_word(tree[2], signs)
    right = _tree_word(tree[3], signs)
    return left + right if signs.get(tree[1], 1) > 0 else right + left


def _tree_dims(tree: _Tree, out: list):
    if tree[0] == "swap":
        out.append((tree[1], frozenset(_tree_labels(tree[2])), frozenset(_tree_labels(tree[3]))))
        _tree_dims(tree[2], out)
        _tree_dims(tree[3], out)


def _set_variants(item: Item, counter: list) -> list[tuple[tuple, _Tree]]:
    """Ordering variants of a retarded set as (step chains, swap tree)."""
    if isinstance(item, Plain):
        return [((), ("leaf", item.label))]
    assert isinstance(item, Ret)
    out = []
    for perm in itertools.permutations(item.rest):
        chain = (top_label(item.top),) + tuple(top_label(e) for e in perm)
        chain_part = (chain,) if len(chain) > 1 else ()
        for top_chains, top_tree in _set_variants(item.top, counter):
            partials = [(top_chains + chain_part, top_tree)]
            for entry in perm:
                nxt = []
                for e_chains, e_tree in _set_variants(entry, counter):
                    for p_chains, p_tree in partials:
                        counter[0] += 1
                        nxt.append(
                            (p_chains + e_chains, ("swap", counter[0], p_tree, e_tree))
                        )
                partials = nxt
            out.extend(partials)
    return out


def _closure(pairs: set[tuple[str, str]]) -> set[tuple[str, str]]:
    done = set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(done):
            for (c, d) in list(done):
                if b == c and (a, d) not in done:
                    done.add((a, d))
                    changed = True
    return done


def _chain_pairs(chains) -> set[tuple[str, str]]:
    return {(c[i], c[i + 1]) for c in chains for i in range(len(c) - 1)}


_SUPPORT_CACHE: dict[SuperIndex, frozenset] = {}


def _factor_support_pairs(factor: Factor) -> frozenset:
    """Order relations that hold wherever the factor is non-zero."""
    cached = _SUPPORT_CACHE.get(factor.index)
    if cached is not None:
        return cached
    common = None
    for _, chains, _ in expand_retarded(factor.index):
        cl = _closure(_chain_pairs(chains))
        common = cl if common is None else (common & cl)
    result = frozenset(common or set())
    _SUPPORT_CACHE[factor.index] = result
    return result


def _strip_implied(chains, factors) -> tuple:
    """Drop step pairs already enforced by the factors' supports."""
    implied = _closure(
        set().union(*(_factor_support_pairs(f) for f in factors)) if factors else set()
    )
    out = []
    for chain in chains:
        run: list[str] = []
        for a, b in zip(chain, chain[1:]):
            if (a, b) in implied:
                if len(run) > 1:
                    out.append(tuple(run))
                run = []
            elif run and run[-1] == a:
                run.append(b)
            else:
                if len(run) > 1:
                    out.append(tuple(run))
                run = [a, b]
        if len(run) > 1:
            out.append(tuple(run))
    return tuple(sorted(set(out)))


def _delta_candidate(word, deltas, support):
    """A single-function composition reproducing a multi-swap difference.

    ``deltas`` lists (left, right) label pairs restricted to the function,
    innermost first; the candidate nests them into retarded items and is
    accepted only if its own step support is implied by the variant's.
    """
    built_labels: set[str] = set()
    built: Item | None = None
    for left, right in deltas:
        if built is None:
            if len(left) == 1 and len(right) == 1:
                built = Ret(Plain(next(iter(left))), (Plain(next(iter(right))),))
                built_labels = set(left) | set(right)
                continue
            return None
        if built_labels == set(left) and len(right) == 1:
            built = Ret(built, (Plain(next(iter(right))),))
        elif built_labels == set(right) and len(left) == 1:
            built = Ret(Plain(next(iter(left))), (built,))
        else:
            return None
        built_labels |= set(left) | set(right)
    items: list[Item] = []
    placed = False
    for l in word:
        if l in built_labels:
            if not placed:
                items.append(built)
                placed = True
        else:
            items.append(Plain(l))
    index = tuple(items)
    for _, chains, _ in expand_retarded(index):
        if not _chain_pairs(chains) <= support:
            return None
    return index


def _multilinear_reduce(funcs: tuple[BFunc, ...], items: tuple[Item, ...]):
    """Compact reduction of a block with one retarded set among plain items.

    Each ordering variant of the set is a product of sign dimensions; the
    sum telescopes dimension by dimension, leaving one difference factor
    per dimension per term.  Differences whose nested structure matches a
    retarded composition (with its step support implied by the variant's)
    are absorbed; the rest stay as signed word pairs.  Returns None when
    the pattern does not apply.
    """
    set_idx = None
    for i, item in enumerate(items):
        if isinstance(item, Ret):
            if set_idx is not None:
                return None
            set_idx = i
    if set_idx is None:
        return None
    if len(item_labels(items[set_idx])) > 6:
        return None
    counter = [0]
    variants = _set_variants(items[set_idx], counter)
    if len(variants) > 8:
        return None

    out: list[PartTerm] = []
    for chains, tree in variants:
        dims: list = []
        _tree_dims(tree, dims)
        dim_ids = [d for d, _, _ in dims]
        sides = {d: (left, right) for d, left, right in dims}
        depth = {d: i for i, d in enumerate(dim_ids)}

        def block_word(signs: dict[int, int]) -> tuple[str, ...]:
            w: list[str] = []
            for i, item in enumerate(items):
                w.extend(_tree_word(tree, signs) if i == set_idx else item_labels(item))
            return tuple(w)

        dep: dict[int, list[int]] = {d: [] for d in dim_ids}
        for d in dim_ids:
            left, right = sides[d]
            for j, bf in enumerate(funcs):
                ks = set(_kargs(bf))
                if ks & left and ks & right:
                    dep[d].append(j)
        if any(not dep[d] for d in dim_ids):
            continue  # an invisible swap: the variant sums to zero
        if math.prod(len(dep[d]) for d in dim_ids) > 24:
            return None

        support = _closure(_chain_pairs(chains))

        # choose one difference carrier per dimension; everything else is
        # pinned to a telescope corner
        for choice in itertools.product(*(dep[d] for d in dim_ids)):
            pins: dict[int, dict[int, int]] = {j: {} for j in range(len(funcs))}
            delta_dims: dict[int, list[int]] = {j: [] for j in range(len(funcs))}
            for d, k in zip(dim_ids, choice):
                for j in dep[d]:
                    if j == k:
                        delta_dims[j].append(d)
                    else:
                        pins[j][d] = -1 if j < k else 1
            factor_lists: list[list[tuple[int, Factor]]] = []
            for j, bf in enumerate(funcs):
                ks = set(_kargs(bf))
                if not delta_dims[j]:
                    word = block_word(pins[j])
                    factor_lists.append([(1, component_of_product([bf], word)[0])])
                    continue
                ds = sorted(delta_dims[j], key=lambda d: depth[d], reverse=True)
                deltas = [
                    (frozenset(ks & sides[d][0]), frozenset(ks & sides[d][1]))
                    for d in ds
                ]
                plus_word = block_word({**pins[j], **{d: 1 for d in ds}})
                induced = tuple(l for l in plus_word if l in ks)
                candidate = _delta_candidate(induced, deltas, support)
                if candidate is not None:
                    mats = bf[1]
                    idx: tuple[Item, ...] = candidate
                    if mats:
                        idx = (Mats(mats),) + idx
                    factor_lists.append([(1, Factor(bf[0], SuperIndex(idx)))])
                    continue
                words: list[tuple[int, Factor]] = []
                for signs in itertools.product((1, -1), repeat=len(ds)):
                    sgn = 1
                    for s in signs:
                        sgn *= s
                    w = block_word({**pins[j], **dict(zip(ds, signs))})
                    words.append((sgn, component_of_product([bf], w)[0]))
                factor_lists.append(words)
            for picks in itertools.product(*factor_lists):
                sign = 1
                factors = []
                for s, f in picks:
                    sign *= s
                    factors.append(f)
                out.append((sign, chains, tuple(factors)))
    # cancel exact opposites; a surviving multiplicity means this
    # representation is not unit-coefficient, so decline and let the
    # caller expand into words instead
    merged: dict = {}
    for s, c, f in out:
        merged[(c, f)] = merged.get((c, f), 0) + s
    if any(abs(v) > 1 for v in merged.values()):
        return None
    out = [(v, c, f) for (c, f), v in merged.items() if v]
    stripped = [(s, _strip_implied(c, f), f) for s, c, f in out]
    return [(s, _strip_implied(c, f), f) for s, c, f in _merge_theta(stripped)]


def _merge_theta(parts: list[PartTerm]) -> list[PartTerm]:
    """Fuse step chains differing by one adjacent transposition.

    ``Theta(X a b Y) + Theta(X b a Y) = Theta(X a Y) Theta(X b Y)``;
    chains of one label drop out.  Applied to same-sign terms with equal
    factors until nothing fuses.
    """

    def clean(chains):
        return tuple(sorted({c for c in chains if len(c) > 1}))

    terms = [(s, clean(c), f) for s, c, f in parts]
    changed = True
    while changed:
        changed = False
        for a in range(len(terms)):
            s1, c1, f1 = terms[a]
            for b in range(a + 1, len(terms)):
                s2, c2, f2 = terms[b]
                if s1 != s2 or f1 != f2:
                    continue
                fused = _fuse_chain_sets(c1, c2)
                if fused is None:
                    continue
                terms[a] = (s1, clean(fused), f1)
                del terms[b]
                changed = True
                break
            if changed:
                break
    return terms


def _fuse_chain_sets(c1, c2):
    if len(c1) != len(c2):
        return None
    d1 = [c for c in c1 if c not in c2]
    d2 = [c for c in c2 if c not in c1]
    if len(d1) != 1 or len(d2) != 1:
        return None
    u, v = d1[0], d2[0]
    if len(u) != len(v):
        return None
    for i in range(len(u) - 1):
        if u[:i] == v[:i] and u[i] == v[i + 1] and u[i + 1] == v[i] and u[i + 2 :] == v[i + 2 :]:
            rest = tuple(c for c in c1 if c != u)
            return rest + (u[: i + 1] + u[i + 2 :], u[:i] + u[i + 1 :])
    return None


def _reduce_block(funcs: tuple[BFunc, ...], items: tuple[Item, ...], dropped=None) -> list[PartTerm]:
    items = tuple(normalize_item(i) for i in items)
    edges = _kedges(funcs)
    if disconnected_witness(items, edges) is not None:
        if dropped is not None:
            dropped.append((funcs, items))
        return []

    factors, blocks = _separate_once(funcs, items)
    if len(blocks) > 1 or factors:
        out: list[PartTerm] = [(1, (), factors)]
        for bl_funcs, bl_items in blocks:
            parts = _reduce_block(bl_funcs, bl_items, dropped)
            out = [
                (s1 * s2, c1 + c2, f1 + f2)
                for s1, c1, f1 in out
                for s2, c2, f2 in parts
            ]
        return out

    funcs, items = blocks[0] if blocks else ((), ())
    if not funcs:
        return [(1, (), ())]

    if len(funcs) == 1:
        return [(1, (), (_factor(funcs[0], items),))]

    bridged = _try_bridge(funcs, items)
    if bridged is not None:
        factor, new_funcs, new_items = bridged
        return [(s, c, (factor,) + f) for s, c, f in _reduce_block(new_funcs, new_items, dropped)]

    reduced = _multilinear_reduce(funcs, items)
    if reduced is not None:
        return reduced

    # nested expansion, pivot chosen to kill the most terms outright
    best = None
    for path in enumerate_pivots(items):
        children = nested_expand(items, path)
        kills = sum(
            1 for ch in children if disconnected_witness(ch, edges) is not None
        )
        if kills == 0:
            continue
        key = (-kills, str(top_label(_entry_at(items, path))), path)
        if best is None or key < best[0]:
            best = (key, children)
    if best is not None:
        out = []
        for ch in best[1]:
            out.extend(_reduce_block(funcs, ch, dropped))
        return out

    # irreducible: expand into step-weighted words of plain components
    out = []
    for sign, chains, word in expand_retarded(items, edges=edges):
        out.append((sign, chains, component_of_product(funcs, word)))
    return out


# ---------------------------------------------------------------------------
# the compiler driver


def derive_rule(
    eq: ContourEquation,
    target: SuperIndex,
    dropped=None,
) -> RealTimeExpression:
    """Compile the real-time rule for one component or composition target.

    Every factor of the result is a component or composition of a single
    sub-function; irreducible blocks contribute explicit step-function
    chains.  ``dropped``, when given, collects the ``(functions, items)``
    blocks discarded by the disconnected-set rule.
    """
    _validate_target(eq, target, allow_sets=True)
    rep = representation(eq, target)
    terms = []
    for rt in rep:
        pc = ProductComposition(eq.product, rt.index, rt.real_integrals, rt.imag_integrals)
        funcs, items = _split_mats(pc)
        closed: list[Factor] = []
        remaining: list[BFunc] = []
        for bf in funcs:
            if len(_kargs(bf)) == 0:
                closed.append(_factor(bf, ()))
            else:
                remaining.append(bf)
        for sign, chains, factors in _reduce_block(tuple(remaining), items, dropped):
            terms.append(
                RealTimeTerm(
                    sign,
                    chains,
                    tuple(closed) + factors,
                    rt.real_integrals,
                    rt.imag_integrals,
                )
            )
    return canonicalize(RealTimeExpression(tuple(terms)))


# ---------------------------------------------------------------------------
# emission


_LANGRETH_TEXT = {
    ">": ">",
    "<": "<",
    "R": "R",
    "A": "A",
    "rc": "⌉",  # right ceiling: mixed component with the second slot imaginary
    "lc": "⌈",
    "M": "M",
}

_LANGRETH_LATEX = {
    ">": ">",
    "<": "<",
    "R": "R",
    "A": "A",
    "rc": r"\rceil",
    "lc": r"\lceil",
    "M": "M",
}


def langreth_name(factor: Factor) -> Optional[str]:
    """Two-point shorthand key for a factor, or None if it has none."""
    if len(factor.func.args) != 2:
        return None
    x, y = factor.func.args
    items = factor.index.items
    patterns = {
        (Plain(x), Plain(y)): ">",
        (Plain(y), Plain(x)): "<",
        (Ret(Plain(x), (Plain(y),)),): "R",
        (Ret(Plain(y), (Plain(x),)),): "A",
        (Mats((y,)), Plain(x)): "rc",
        (Mats((x,)), Plain(y)): "lc",
        (Mats((x, y)),): "M",
        (Mats((y, x)),): "M",
    }
    return patterns.get(tuple(items))


def _latex_item(item: Item, hacek: bool) -> str:
    if isinstance(item, Plain):
        return str(item.label) if hacek else r"\check{%s}" % item.label
    if isinstance(item, Mats):
        inner = "".join(
            str(l) if hacek else r"\check{%s}" % l for l in item.labels
        )
        return "M(%s)" % inner
    rest = "".join(_latex_item(e, hacek) for e in item.rest)
    return "R(%s,%s)" % (_latex_item(item.top, hacek), rest)


def _render_factor(factor: Factor, fmt: str, naming: str) -> str:
    if naming == "langreth":
        key = langreth_name(factor)
        if key is None:
            raise NamingUnavailable(
                f"factor {factor} is not a two-point component; use hacek naming"
            )
        sup = _LANGRETH_LATEX[key] if fmt == "latex" else _LANGRETH_TEXT[key]
        return f"{factor.func.name}^{{{sup}}}"
    index = factor.hacek() if naming == "hacek" else factor.index
    if fmt == "latex":
        sup = "".join(_latex_item(i, naming == "hacek") for i in index.items)
        return f"{factor.func.name}^{{{sup}}}"
    return f"{factor.func.name}^{{{index}}}"


def _render_term(term: RealTimeTerm, fmt: str, naming: str) -> str:
    bits = []
    if term.real_integrals:
        bits.append(
            ("\\int_{%s}" if fmt == "latex" else "∫{%s}")
            % "".join(sorted(term.real_integrals))
        )
    if term.imag_integrals:
        bits.append(
            ("\\star_{%s}" if fmt == "latex" else "⋆{%s}")
            % "".join(sorted(term.imag_integrals))
        )
    for chain in term.steps:
        bits.append(
            (r"\Theta_{%s}" if fmt == "latex" else "Θ(%s)") % "".join(chain)
        )
    for f in term.factors:
        bits.append(_render_factor(f, fmt, naming))
    return " ".join(bits)


def emit(
    expr: RealTimeExpression,
    format: str = "text",
    naming: str = "hacek",
    lhs: str | None = None,
) -> str:
    """Deterministic rendering of a canonical expression.

    ``naming='langreth'`` uses the seven two-point shorthands and raises
    :class:`NamingUnavailable` on factors of higher arity; ``'hacek'``
    renders per-factor argument positions, ``'labeled'`` the label names.
    """
    if format not in ("text", "latex"):
        raise ValueError(f"unknown format {format!r}")
    if naming not in ("langreth", "hacek", "labeled"):
        raise ValueError(f"unknown naming {naming!r}")
    if not expr.terms:
        body = "0"
    else:
        parts = []
        for i, term in enumerate(expr.terms):
            rendered = _render_term(term, format, naming)
            if i == 0:
                parts.append(rendered if term.sign > 0 else "- " + rendered)
            else:
                parts.append(("+ " if term.sign > 0 else "- ") + rendered)
        body = " ".join(parts)
    if lhs is None:
        return body
    return f"{lhs} = {body}"
