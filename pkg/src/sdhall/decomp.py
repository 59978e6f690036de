"""Weight gradings, cuspidal vectors, and the highest weight decomposition.

The module splits as an orthogonal direct sum of submodules, each
generated by a cuspidal vector (one killed by every lowering operator
E_i) under the raising operators F_i.  This file computes the weight
grading, solves for the cuspidals exactly, builds the F-orbit spans,
and cross-checks them against closed-form generators available for
uniformly oriented reflection chains.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import selfdual as sdl
from .hallmodule import HallModule, ModuleVector


# -- grading -------------------------------------------------------------------


def gw_of_class(mod: HallModule, key):
    """Grothendieck-Witt class of a self-dual isometry class key."""
    return sdl.gw_class(mod.sd.by_key(key).sdrep)


def gw_text(gw) -> str:
    """Compact deterministic rendering of a Grothendieck-Witt class."""
    dims, decs = gw
    body = ",".join(str(x) for x in dims)
    for node, witt in decs:
        body += "|%s:%s" % (node, ".".join(str(p) for p in witt))
    return body


def weight_spaces(mod: HallModule, bound):
    """Basis keys of every weight space within the bound.

    Returns a dict mapping each Grothendieck-Witt class to the sorted
    list of isometry class keys it contains, the classes themselves
    ordered deterministically.
    """
    groups = {}
    for cls in mod.sd.classes_leq(bound):
        gw = sdl.gw_class(cls.sdrep)
        groups.setdefault(gw, []).append(cls.key)
    out = {}
    for gw in sorted(groups, key=_gw_order):
        out[gw] = sorted(groups[gw])
    return out


def _gw_order(gw):
    dims, decs = gw
    return (sum(dims), dims, decs)


def character(mod: HallModule, bound):
    """Rank of each weight space within the bound, keyed by GW class."""
    return {gw: len(keys) for gw, keys in weight_spaces(mod, bound).items()}


# -- exact linear algebra over the scalar field ---------------------------------


def scalar_kernel(sf, rows, ncols):
    """Right kernel of a matrix of scalars, reduced echelon convention.

    Elimination pivots are chosen in column order, so the output basis
    is canonical: one vector per free column, unit there, zero at the
    other free columns.
    """
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(mat))
                  if not mat[i][c].is_zero()), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        inv = mat[r][c].inv()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][c].is_zero():
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    piv = set(pivots)
    out = []
    for fc in range(ncols):
        if fc in piv:
            continue
        v = [sf.zero()] * ncols
        v[fc] = sf.one()
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        out.append(v)
    return out


class Span:
    """Incremental echelon span of module vectors over the scalar field."""

    def __init__(self, mod: HallModule, order):
        self.mod = mod
        self.order = order          # key -> column rank
        self.rows = {}              # lead column -> dict key -> Scalar

    def reduce(self, terms):
        terms = dict(terms)
        while terms:
            lead = min(terms, key=self.order.__getitem__)
            row = self.rows.get(self.order[lead])
            if row is None:
                return lead, terms
            f = terms[lead]
            for k, c in row.items():
                v = terms.get(k, self.mod.sf.zero()) - f * c
                if v.is_zero():
                    terms.pop(k, None)
                else:
                    terms[k] = v
        return None, None

    def insert(self, vec: ModuleVector):
        """Add a vector; the normalized new row, or None when dependent."""
        lead, terms = self.reduce(vec.terms)
        if lead is None:
            return None
        inv = terms[lead].inv()
        row = {k: c * inv for k, c in terms.items()}
        self.rows[self.order[lead]] = row
        return ModuleVector(self.mod, row)

    def contains(self, vec: ModuleVector) -> bool:
        lead, _ = self.reduce(vec.terms)
        return lead is None

    def dim(self) -> int:
        return len(self.rows)

    def vectors(self):
        return [ModuleVector(self.mod, self.rows[c])
                for c in sorted(self.rows)]


# -- cuspidals -------------------------------------------------------------------


class CuspidalElement:
    """A weight vector killed by every lowering operator."""

    __slots__ = ("vector", "gw", "weight")

    def __init__(self, vector: ModuleVector, gw, weight):
        self.vector = vector
        self.gw = gw
        self.weight = weight    # tuple of (node, Fraction) in node order

    def __repr__(self):
        return "CuspidalElement(%s @ %s)" % (self.vector.pretty(),
                                             gw_text(self.gw))


def _weight_of(quiver, dims):
    return tuple((node, quiver.t_weight(dims, node))
                 for node in quiver.nodes)


def cuspidals(mod: HallModule, bound):
    """Basis of the joint kernel of the E_i within the bound.

    Solved exactly per weight space, then orthogonalized against the
    Green form and normalized to a unit leading coefficient in key
    order.
    """
    sf = mod.sf
    quiver = mod.quiver
    out = []
    for gw, keys in weight_spaces(mod, bound).items():
        images = [mod.op_e(node, mod.basis_by_key(k))
                  for k in keys for node in quiver.nodes]
        rows = {}
        for col, k in enumerate(keys):
            for node_i, node in enumerate(quiver.nodes):
                img = images[col * quiver.n + node_i]
                for tk, c in img.terms.items():
                    rows.setdefault((node, tk), [sf.zero()] * len(keys))
                    rows[(node, tk)][col] = c
        matrix = [rows[r] for r in sorted(rows)]
        basis = scalar_kernel(sf, matrix, len(keys))
        vecs = [ModuleVector(mod, {k: c for k, c in zip(keys, v)
                                   if not c.is_zero()})
                for v in basis]
        for i in range(len(vecs)):
            for j in range(i):
                num = mod.green_form(vecs[i], vecs[j])
                if num.is_zero():
                    continue
                den = mod.green_form(vecs[j], vecs[j])
                vecs[i] = vecs[i] - vecs[j].scale(num * den.inv())
        dims = gw[0]
        weight = _weight_of(quiver, dims)
        for v in vecs:
            lead = min(v.terms)
            out.append(CuspidalElement(v.scale(v.terms[lead].inv()),
                                       gw, weight))
    return out


def cuspidal_alternative_check(mod: HallModule, xi: ModuleVector) -> bool:
    """Whether the coaction of xi is exactly [0] tensor xi."""
    unit_key = next(iter(mod.alg.one().terms))
    want = {(unit_key, k): c for k, c in xi.terms.items() if not c.is_zero()}
    return mod.coact_terms(xi) == want


# -- the decomposition -----------------------------------------------------------


class Summand:
    """One F-orbit span: a cuspidal generator and its graded basis."""

    __slots__ = ("index", "cuspidal", "rows", "graded", "hw_ok")

    def __init__(self, index, cuspidal, rows, graded, hw_ok):
        self.index = index
        self.cuspidal = cuspidal
        self.rows = rows
        self.graded = graded
        self.hw_ok = hw_ok

    @property
    def key(self):
        return (self.cuspidal.gw, self.cuspidal.weight)

    def text(self, mod) -> str:
        weight = " ".join("%s:%s" % (node, val)
                          for node, val in self.cuspidal.weight)
        graded = ", ".join("%s: %d" % (gw_text(gw), self.graded[gw])
                           for gw in sorted(self.graded, key=_gw_order))
        return ("summand %d: weight %s, cuspidal %s, graded dims {%s}"
                % (self.index, weight, self.cuspidal.vector.pretty(),
                   graded))


class Decomposition:
    """Summands plus the exhaustion and orthogonality bookkeeping."""

    def __init__(self, mod, bound):
        self.mod = mod
        self.bound = tuple(int(x) for x in bound)
        self.summands = []
        self.spaces = {}
        self.flagged = []          # weight spaces not fully decided
        self.unaccounted = {}      # gw -> list of class keys outside the sum
        self.orth_failures = []    # (summand i, summand j, scalar value)

    @property
    def ok(self) -> bool:
        return not self.orth_failures and not self.unaccounted

    def text(self, fmt="text") -> str:
        if fmt == "tsv":
            lines = []
            for s in self.summands:
                weight = " ".join("%s:%s" % (n, v)
                                  for n, v in s.cuspidal.weight)
                graded = ";".join("%s=%d" % (gw_text(g), s.graded[g])
                                  for g in sorted(s.graded, key=_gw_order))
                lines.append("summand\t%d\t%s\t%s\t%s"
                             % (s.index, weight,
                                s.cuspidal.vector.pretty(), graded))
            for gw, keys in sorted(self.unaccounted.items(),
                                   key=lambda kv: _gw_order(kv[0])):
                lines.append("unaccounted\t%s\t%s"
                             % (gw_text(gw),
                                " ".join(self.mod.name_of(k) for k in keys)))
            lines.append("status\t%s" % ("ok" if self.ok else "failed"))
            return "\n".join(lines)
        lines = ["decomposition within bound (%s): %d summand(s)"
                 % (",".join(str(x) for x in self.bound),
                    len(self.summands))]
        for s in self.summands:
            lines.append(s.text(self.mod))
        for gw in self.flagged:
            lines.append("flagged %s: boundary-limited, not counted"
                         % gw_text(gw))
        for gw, keys in sorted(self.unaccounted.items(),
                               key=lambda kv: _gw_order(kv[0])):
            lines.append("unaccounted %s: %s"
                         % (gw_text(gw),
                            " ".join(self.mod.name_of(k) for k in keys)))
        for i, j, val in self.orth_failures:
            lines.append("orthogonality failure: summands %d,%d pair to %s"
                         % (i, j, val))
        lines.append("status: %s" % ("ok" if self.ok else "failed"))
        return "\n".join(lines)


def _fully_decided(quiver, dims, bound, memo):
    """Whether every lowering chain from dims stays within the bound."""
    dims = tuple(dims)
    hit = memo.get(dims)
    if hit is not None:
        return hit
    ok = all(d <= b for d, b in zip(dims, bound))
    if ok:
        for node in quiver.nodes:
            low = quiver.sub_dim(
                dims, quiver.hyperbolic_dim(quiver.unit_dim(node)))
            if any(x < 0 for x in low):
                continue
            if not _fully_decided(quiver, low, bound, memo):
                ok = False
                break
    memo[dims] = ok
    return ok


def decompose(mod: HallModule, bound) -> Decomposition:
    """Split the truncated module into F-orbit spans of the cuspidals.

    Asserts pairwise Green orthogonality of the spans and, for every
    weight space all of whose lowering chains stay within the bound,
    that the spans jointly exhaust it.  Boundary-limited spaces are
    flagged rather than failed.
    """
    quiver = mod.quiver
    dec = Decomposition(mod, bound)
    dec.spaces = weight_spaces(mod, bound)
    order = {}
    for keys in dec.spaces.values():
        for k in keys:
            order[k] = (sum(mod.dims_of(k)), mod.dims_of(k), k)
    rank = {k: i for i, k in enumerate(sorted(order, key=order.get))}

    for idx, cusp in enumerate(cuspidals(mod, bound), start=1):
        span = Span(mod, rank)
        queue = [span.insert(cusp.vector)]
        while queue:
            vec = queue.pop(0)
            vdims = mod.dims_of(next(iter(vec.terms)))
            for node in quiver.nodes:
                target = quiver.add_dim(
                    vdims, quiver.hyperbolic_dim(quiver.unit_dim(node)))
                if any(t > b for t, b in zip(target, dec.bound)):
                    continue
                image = mod.op_f(node, vec)
                if image.is_zero():
                    continue
                fresh = span.insert(image)
                if fresh is not None:
                    queue.append(fresh)
        rows = span.vectors()
        graded = {}
        for row in rows:
            gws = {gw_of_class(mod, k) for k in row.terms}
            if len(gws) != 1:
                raise AssertionError("span row mixes weight spaces")
            gw = gws.pop()
            graded[gw] = graded.get(gw, 0) + 1
        hw_ok = _highest_weight_check(mod, cusp, rows)
        dec.summands.append(Summand(idx, cusp, rows, graded, hw_ok))

    for i, si in enumerate(dec.summands):
        for sj in dec.summands[i + 1:]:
            for vi in si.rows:
                for vj in sj.rows:
                    val = mod.green_form(vi, vj)
                    if not val.is_zero():
                        dec.orth_failures.append(
                            (si.index, sj.index, val))

    memo = {}
    for gw, keys in dec.spaces.items():
        decided = _fully_decided(quiver, gw[0], dec.bound, memo)
        if not decided:
            dec.flagged.append(gw)
            continue
        union = Span(mod, rank)
        for s in dec.summands:
            for row in s.rows:
                if gw_of_class(mod, next(iter(row.terms))) == gw:
                    union.insert(row)
        if union.dim() != len(keys):
            leads = {next(k for k in keys if rank[k] == c)
                     for c in union.rows}
            dec.unaccounted[gw] = [k for k in keys if k not in leads]
    return dec


def _highest_weight_check(mod, cusp, rows):
    """Within the span, the E-kernel must be the line through the cuspidal."""
    sf = mod.sf
    eqs = {}
    for ri, row in enumerate(rows):
        for node in mod.quiver.nodes:
            img = mod.op_e(node, row)
            for tk, c in img.terms.items():
                eqs.setdefault((node, tk), [sf.zero()] * len(rows))
                eqs[(node, tk)][ri] = c
    kernel = scalar_kernel(sf, [eqs[k] for k in sorted(eqs)], len(rows))
    if len(kernel) != 1:
        return False
    vec = {}
    for coeff, row in zip(kernel[0], rows):
        for k, c in row.terms.items():
            vec[k] = vec.get(k, sf.zero()) + coeff * c
    vec = {k: c for k, c in vec.items() if not c.is_zero()}
    got = ModuleVector(mod, vec)
    lead = min(got.terms) if vec else None
    if lead is None:
        return False
    return got.scale(got.terms[lead].inv()) == cusp.vector


# -- closed-form generators --------------------------------------------------------


def _reflected_chain(quiver):
    """Path order of the nodes with all arrows pointing forward.

    Requires a simple path whose involution is the end-for-end
    reflection, with every arrow oriented the same way along it.
    """
    nodes = list(quiver.nodes)
    if len(quiver.arrows) != len(nodes) - 1:
        raise sdl.UnsupportedError("underlying graph is not a path")
    neigh = {n: [] for n in nodes}
    for (a, t, h) in quiver.arrows:
        if t == h:
            raise sdl.UnsupportedError("loops have no chain order")
        neigh[t].append(h)
        neigh[h].append(t)
    if len(nodes) == 1:
        chain = nodes
    else:
        ends = [n for n in nodes if len(neigh[n]) == 1]
        if len(ends) != 2 or any(len(v) > 2 for v in neigh.values()):
            raise sdl.UnsupportedError("underlying graph is not a path")
        chain = [min(ends)]
        prev = None
        while True:
            cur = chain[-1]
            step = [x for x in neigh[cur] if x != prev]
            if not step:
                break
            prev = cur
            chain.append(step[0])
        if len(chain) != len(nodes):
            raise sdl.UnsupportedError("underlying graph is not connected")
    total = len(chain)
    if any(quiver.sigma_n[chain[k]] != chain[total - 1 - k]
           for k in range(total)):
        raise sdl.UnsupportedError(
            "the involution is not the chain reflection")
    idx = {n: i for i, n in enumerate(chain)}
    direction = set()
    for (a, t, h) in quiver.arrows:
        if idx[h] - idx[t] == 1:
            direction.add(1)
        elif idx[t] - idx[h] == 1:
            direction.add(-1)
        else:
            raise sdl.UnsupportedError("multiple arrows between neighbours")
    if direction == {-1}:
        chain.reverse()
    elif len(direction) > 1:
        raise sdl.UnsupportedError("mixed arrow orientation along the chain")
    return chain


def _interval_support(chain, j):
    """Chain nodes carrying the jth symmetric interval."""
    total = len(chain)
    if total % 2:
        m = total // 2
        return chain[m - j:m + j + 1]
    n = total // 2
    if j < 1:
        raise ValueError("even chains have no central node")
    return chain[n - j:n + j]


def _interval_classes(mod: HallModule, chain, j):
    """Formed self-dual classes on the jth interval, keyed by sign.

    The sign is the square class of the pairing of the composite map
    along the interval against the form at its first node; unitary
    dualities carry a single unlabeled class under key +1.
    """
    quiver = mod.quiver
    idx = quiver.node_index
    support = _interval_support(chain, j)
    dims = [0] * quiver.n
    for node in support:
        dims[idx[node]] = 1
    dims = tuple(dims)
    out = {}
    for cls in mod.sd.classes(dims):
        if not mod.table.classify(cls.sdrep.rep).indec:
            continue
        if quiver.iota_nontrivial:
            out[1] = cls
        else:
            out[_interval_sign(mod, cls, support)] = cls
    if not out:
        raise sdl.UnsupportedError(
            "no formed class on interval %d for this duality" % j)
    return out


def _interval_sign(mod: HallModule, scls, support):
    quiver = mod.quiver
    F = quiver.field
    by_pair = {(t, h): a for (a, t, h) in quiver.arrows}
    comp = F.encode(1)
    for x, y in zip(support, support[1:]):
        comp = F.mul(comp, scls.sdrep.rep.maps[by_pair[(x, y)]][0][0])
    val = F.mul(F.conj(comp), scls.sdrep.psi[support[0]][0][0])
    return F.quad_character(val)


def _nonsquare(F):
    return next(x for x in F.elements()
                if x != 0 and F.quad_character(x) == -1)


def _witt_of_signs(F, word):
    ns = _nonsquare(F)
    entries = [F.encode(1) if c == 1 else ns for c in word]
    return sdl.witt_of_entries(F, entries, 1, False)


def _summand_class(mod, signed, word, offset):
    """Isometry class of the direct sum R^word, slots offset..offset+len-1."""
    sd = None
    for slot, sign in enumerate(word):
        block = signed[offset + slot][sign].sdrep
        sd = block if sd is None else sdl.sd_direct_sum(sd, block)
    return mod.sd.classify(sd).key


def _center_anisotropic(mod: HallModule, center) -> ModuleVector:
    """The rank-two anisotropic class concentrated at the central node."""
    quiver = mod.quiver
    F = quiver.field
    dims = tuple(2 if n == center else 0 for n in quiver.nodes)
    zero = sdl.witt_zero(F, 1, False)
    for cls in mod.sd.classes(dims):
        if sdl.witt_class_at_node(cls.sdrep, center) != zero:
            return mod.basis(cls)
    raise sdl.UnsupportedError("no anisotropic plane at the central node")


def closed_form_cuspidals(mod: HallModule):
    """Construct the cuspidal generators of a reflection chain directly.

    For a uniformly oriented chain with the end-for-end involution:
    the unitary case yields the vacuum plus, on odd chains, the formed
    central simple; dualities with formed interval blocks yield signed
    sums over sign words, grouped on odd chains by the Witt class of
    the word and completed by the central anisotropic plane.  Anything
    else is unsupported.
    """
    quiver = mod.quiver
    sf = mod.sf
    chain = _reflected_chain(quiver)
    total = len(chain)
    out = [mod.vacuum()]
    if quiver.iota_nontrivial:
        if total % 2:
            classes = _interval_classes(mod, chain, 0)
            out.append(mod.basis(classes[1]))
        return out
    F = quiver.field
    if total % 2:
        # odd chain: words carry slots 0..j, grouped by Witt class
        n = total // 2
        center = chain[n]
        if quiver.s[center] != 1:
            raise sdl.UnsupportedError(
                "no formed class at the central node for this duality")
        signed = {j: _interval_classes(mod, chain, j) for j in range(n + 1)}
        for j in range(n + 1):
            groups = {}
            for word in itertools.product((1, -1), repeat=j + 1):
                coeff = 1
                for slot in range(1, j + 1, 2):
                    coeff *= word[slot]
                b = _witt_of_signs(F, word)
                key = _summand_class(mod, signed, word, 0)
                acc = groups.setdefault(b, {})
                acc[key] = acc.get(key, 0) + coeff
            for b in sorted(groups):
                terms = {k: sf.from_int(c)
                         for k, c in groups[b].items() if c}
                if terms:
                    out.append(ModuleVector(mod, terms))
        out.append(_center_anisotropic(mod, center))
        return out
    # even chain: words carry slots 1..j and a single generator per j
    n = total // 2
    signed = {j: _interval_classes(mod, chain, j) for j in range(1, n + 1)}
    for j in range(1, n + 1):
        acc = {}
        for word in itertools.product((1, -1), repeat=j):
            coeff = 1
            for slot in range(0, j, 2):
                coeff *= word[slot]
            key = _summand_class(mod, signed, word, 1)
            acc[key] = acc.get(key, 0) + coeff
        terms = {k: sf.from_int(c) for k, c in acc.items() if c}
        if not terms:
            raise AssertionError("signed interval sum collapsed")
        out.append(ModuleVector(mod, terms))
    return out
