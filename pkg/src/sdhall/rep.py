"""Finite-field quiver representations and their isomorphism classes.

Representations are stored as graded tuples of matrices over FF(q).
Enumeration of isomorphism classes runs one of two paths per dimension
vector, chosen by budget: a full orbit walk under the base-change group
(canonical representative = lexicographically least point of the
orbit), or a constructive path assembling classes from known
indecomposables, with extension middle terms exposing any new
indecomposable at that dimension.  Both paths feed one registry so
keys are stable across calls.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import ffield as fx


class BudgetError(RuntimeError):
    """Raised when an operation would exceed the configured budgets."""


RAW_BUDGET = 10 ** 7
GROUP_BUDGET = 10 ** 6


class Rep:
    """A representation: dimension vector plus one matrix per arrow.

    maps[a] has shape (dim at head, dim at tail); matrices are tuples
    of tuples of field encodings.
    """

    __slots__ = ("quiver", "dims", "maps")

    def __init__(self, quiver, dims, maps):
        self.quiver = quiver
        self.dims = tuple(int(x) for x in dims)
        self.maps = dict(maps)

    @property
    def total_dim(self):
        return sum(self.dims)

    def dim_at(self, node):
        return self.dims[self.quiver.node_index[str(node)]]

    def serialize(self) -> str:
        parts = ["dim:" + ",".join(str(d) for d in self.dims)]
        for (a, _, _) in self.quiver.arrows:
            m = self.maps[a]
            flat = ",".join(str(x) for row in m for x in row)
            parts.append("arrow%s:%s" % (a, flat))
        return ";".join(parts)

    def map_point(self):
        return tuple(self.maps[a] for (a, _, _) in self.quiver.arrows)

    def __eq__(self, other):
        return (self.dims == other.dims and
                self.map_point() == other.map_point())

    def __hash__(self):
        return hash((self.dims, self.map_point()))

    def __repr__(self):
        return "Rep(%s)" % self.serialize()


def zero_rep(quiver) -> Rep:
    return rep_from_maps(quiver, quiver.zero_dim(), {})


def simple_rep(quiver, node) -> Rep:
    return rep_from_maps(quiver, quiver.unit_dim(node), {})


def rep_from_maps(quiver, dims, maps) -> Rep:
    idx = quiver.node_index
    out = {}
    maps = maps or {}
    for (a, t, h) in quiver.arrows:
        m = maps.get(a)
        if m is None:
            m = fx.zeros(dims[idx[h]], dims[idx[t]])
        out[a] = tuple(tuple(int(x) for x in row) for row in m)
        rows, cols = fx.shape(out[a])
        want = (dims[idx[h]], dims[idx[t]])
        if rows != want[0] or (rows and cols != want[1]):
            raise ValueError("map %s has shape %r, expected %r" % (
                a, (rows, cols), want))
    return Rep(quiver, tuple(dims), out)


def direct_sum(u: Rep, v: Rep) -> Rep:
    quiver = u.quiver
    idx = quiver.node_index
    dims = quiver.add_dim(u.dims, v.dims)
    maps = {}
    for (a, t, h) in quiver.arrows:
        rt, rh = dims[idx[t]], dims[idx[h]]
        ut, uh = u.dims[idx[t]], u.dims[idx[h]]
        block = [[0] * rt for _ in range(rh)]
        for r in range(uh):
            for c in range(ut):
                block[r][c] = u.maps[a][r][c]
        for r in range(v.dims[idx[h]]):
            for c in range(v.dims[idx[t]]):
                block[uh + r][ut + c] = v.maps[a][r][c]
        maps[a] = tuple(tuple(row) for row in block)
    return Rep(quiver, dims, maps)


def direct_sum_list(quiver, reps) -> Rep:
    out = zero_rep(quiver)
    for r in reps:
        out = direct_sum(out, r)
    return out


# -- hom spaces ---------------------------------------------------------------

def hom_space(u: Rep, v: Rep):
    """Basis of intertwiners u -> v, each a tuple of matrices per node.

    An intertwiner is (phi_i) with phi_head m_alpha = n_alpha phi_tail.
    """
    quiver = u.quiver
    F = quiver.field
    n = quiver.n
    offs = []
    pos = 0
    for i in range(n):
        offs.append(pos)
        pos += v.dims[i] * u.dims[i]
    nvars = pos
    if nvars == 0:
        return []
    rows = []
    idx = quiver.node_index
    for (a, t, h) in quiver.arrows:
        ti, hi = idx[t], idx[h]
        ut, uh = u.dims[ti], u.dims[hi]
        vt, vh = v.dims[ti], v.dims[hi]
        mu, mv = u.maps[a], v.maps[a]
        for r in range(vh):
            for c in range(ut):
                row = [0] * nvars
                for k in range(uh):
                    slot = offs[hi] + r * u.dims[hi] + k
                    row[slot] = F.add(row[slot], mu[k][c])
                for k in range(vt):
                    slot = offs[ti] + k * u.dims[ti] + c
                    row[slot] = F.add(row[slot], F.neg(mv[r][k]))
                rows.append(tuple(row))
    if not rows:
        basis_vecs = [tuple(1 if j == i else 0 for j in range(nvars))
                      for i in range(nvars)]
    else:
        basis_vecs = fx.kernel_basis(F, tuple(rows))
    out = []
    for vec in basis_vecs:
        mats = []
        for i in range(n):
            mat = []
            for r in range(v.dims[i]):
                mat.append(tuple(vec[offs[i] + r * u.dims[i] + c]
                                 for c in range(u.dims[i])))
            mats.append(tuple(mat))
        out.append(tuple(mats))
    return out


def hom_dim(u: Rep, v: Rep) -> int:
    return len(hom_space(u, v))


def end_dim(u: Rep) -> int:
    return hom_dim(u, u)


def ext_dim(u: Rep, v: Rep) -> int:
    """dim Ext^1(u, v); the path algebra is hereditary."""
    return hom_dim(u, v) - u.quiver.euler_form(u.dims, v.dims)


def _combine(F, shapes, basis, coeffs):
    mats = None
    for c, b in zip(coeffs, basis):
        if c == 0:
            continue
        scaled = [fx.mat_scale(F, c, bm) for bm in b]
        if mats is None:
            mats = scaled
        else:
            mats = [fx.mat_add(F, m, s) for m, s in zip(mats, scaled)]
    if mats is None:
        mats = [fx.zeros(r, c) for (r, c) in shapes]
    return mats


def hom_elements(u: Rep, v: Rep, budget=RAW_BUDGET):
    """Iterate every intertwiner u -> v as a tuple of matrices."""
    F = u.quiver.field
    basis = hom_space(u, v)
    if F.q ** len(basis) > budget:
        raise BudgetError("hom space of size %d exceeds budget"
                          % (F.q ** len(basis)))
    shapes = [(v.dims[i], u.dims[i]) for i in range(u.quiver.n)]
    for coeffs in itertools.product(range(F.q), repeat=len(basis)):
        yield tuple(_combine(F, shapes, basis, coeffs))


def is_isomorphism(u: Rep, v: Rep, phis) -> bool:
    F = u.quiver.field
    if u.dims != v.dims:
        return False
    return all(d == 0 or fx.det_nonzero(F, m)
               for d, m in zip(u.dims, phis))


def iso_test(u: Rep, v: Rep) -> bool:
    """Exact isomorphism test by scanning the hom space for units."""
    if u.dims != v.dims:
        return False
    if u.total_dim == 0:
        return True
    for phis in hom_elements(u, v):
        if is_isomorphism(u, v, phis):
            return True
    return False


def is_indecomposable(rep: Rep, budget=RAW_BUDGET) -> bool:
    """No nontrivial idempotent endomorphism (scans End within budget)."""
    if rep.total_dim == 0:
        return False
    F = rep.quiver.field
    n = rep.quiver.n
    ident = tuple(fx.identity(d) for d in rep.dims)
    zero = tuple(fx.zeros(d, d) for d in rep.dims)
    for phis in hom_elements(rep, rep, budget):
        sq = tuple(fx.mat_mul(F, m, m) for m in phis)
        if sq == tuple(phis) and phis != ident and phis != zero:
            return False
    return True


# -- subrepresentations -------------------------------------------------------

def invariant_subspaces(rep: Rep, sub_dims):
    """Yield tuples of echelon bases (one per node) spanning subreps."""
    quiver = rep.quiver
    F = quiver.field
    n = quiver.n
    idx = quiver.node_index
    per_node = [list(fx.echelon_bases(F, rep.dims[i], sub_dims[i]))
                for i in range(n)]
    early = [[] for _ in range(n)]
    late = []
    for (a, t, h) in quiver.arrows:
        ti, hi = idx[t], idx[h]
        if ti <= hi:
            early[hi].append((a, ti))
        else:
            late.append((a, ti, hi))

    def spans(basis, vec):
        if all(x == 0 for x in vec):
            return True
        if not basis:
            return False
        aug = tuple(list(basis) + [tuple(vec)])
        return fx.rank(F, aug) == len(basis)

    def rec(i, chosen):
        if i == n:
            yield tuple(chosen)
            return
        for basis in per_node[i]:
            ok = True
            for (a, ti) in early[i]:
                src = basis if ti == i else chosen[ti]
                for vec in src:
                    if not spans(basis, fx.mat_vec(F, rep.maps[a], vec)):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            chosen.append(basis)
            yield from rec(i + 1, chosen)
            chosen.pop()

    for bases in rec(0, []):
        good = True
        for (a, ti, hi) in late:
            for vec in bases[ti]:
                if not spans(bases[hi], fx.mat_vec(F, rep.maps[a], vec)):
                    good = False
                    break
            if not good:
                break
        if good:
            yield bases


def sub_quotient(rep: Rep, bases):
    """(sub, quotient) of an invariant subspace, in canonical bases.

    The subobject is written in the echelon basis rows; the quotient in
    the standard-basis complement of the pivot coordinates.
    """
    quiver = rep.quiver
    F = quiver.field
    n = quiver.n
    idx = quiver.node_index
    sub_dims = tuple(len(b) for b in bases)
    quot_dims = tuple(rep.dims[i] - sub_dims[i] for i in range(n))
    pivots = []
    for i in range(n):
        piv = []
        for row in bases[i]:
            piv.append(next(c for c, x in enumerate(row) if x != 0))
        pivots.append(piv)
    complements = [tuple(c for c in range(rep.dims[i])
                         if c not in pivots[i]) for i in range(n)]
    basis_mats = []
    for i in range(n):
        cols = [list(row) for row in bases[i]] + \
               [[1 if r == c else 0 for r in range(rep.dims[i])]
                for c in complements[i]]
        A = tuple(tuple(cols[k][r] for k in range(len(cols)))
                  for r in range(rep.dims[i]))
        basis_mats.append(A)

    def express(i, vec):
        return fx.solve(F, basis_mats[i], tuple(vec))

    sub_maps, quot_maps = {}, {}
    for (a, t, h) in quiver.arrows:
        ti, hi = idx[t], idx[h]
        scols, qcols = [], []
        for vec in bases[ti]:
            coords = express(hi, fx.mat_vec(F, rep.maps[a], vec))
            scols.append(coords[: sub_dims[hi]])
        for c in complements[ti]:
            unit = tuple(1 if r == c else 0 for r in range(rep.dims[ti]))
            coords = express(hi, fx.mat_vec(F, rep.maps[a], unit))
            qcols.append(coords[sub_dims[hi]:])
        sub_maps[a] = tuple(
            tuple(scols[c][r] for c in range(sub_dims[ti]))
            for r in range(sub_dims[hi]))
        quot_maps[a] = tuple(
            tuple(qcols[c][r] for c in range(quot_dims[ti]))
            for r in range(quot_dims[hi]))
    return (Rep(quiver, sub_dims, sub_maps),
            Rep(quiver, quot_dims, quot_maps))


# -- class registry and enumeration -------------------------------------------

class RepClass:
    __slots__ = ("rep", "key", "dims", "aut", "summands", "indec",
                 "simple", "end_division_degree")

    def __init__(self, rep, key):
        self.rep = rep
        self.key = key
        self.dims = rep.dims
        self.aut = None
        self.summands = None      # sorted tuple of (indec key, mult)
        self.indec = None
        self.simple = None
        self.end_division_degree = None

    def __repr__(self):
        return "RepClass(%s)" % (self.key,)


class RepTable:
    """Isomorphism classes of representations, per dimension vector.

    Enumeration is lazy per dimension vector; all vectors of smaller
    total dimension are enumerated first, so the indecomposable list is
    complete below any vector under construction.
    """

    def __init__(self, quiver, raw_budget=RAW_BUDGET,
                 group_budget=GROUP_BUDGET):
        self.quiver = quiver
        self.raw_budget = raw_budget
        self.group_budget = group_budget
        self.by_dim = {}
        self.by_key = {}
        self.indec_keys = []
        self._probe_cache = {}
        self._hom_cache = {}
        self._fallback_counter = {}

    # .. budgets ..

    def group_order(self, dims):
        total = 1
        for d in dims:
            total *= fx.gl_order(self.quiver.q, d)
        return total

    def raw_size(self, dims):
        idx = self.quiver.node_index
        exp = 0
        for (_, t, h) in self.quiver.arrows:
            exp += dims[idx[t]] * dims[idx[h]]
        return self.quiver.q ** exp

    def brute_ok(self, dims):
        if self.raw_size(dims) == 1:
            # a single point regardless of the group: one class, and
            # its serialized form is the orbit minimum for free
            return True
        return (self.group_order(dims) <= self.group_budget and
                self.raw_size(dims) <= self.raw_budget)

    # .. public API ..

    def classes(self, dims):
        dims = tuple(dims)
        if dims not in self.by_dim:
            self._ensure_below(sum(dims))
            self._build_dim(dims)
        return self.by_dim[dims]

    def classes_leq(self, bound):
        out = []
        for dims in sorted(self.quiver.dims_leq(bound),
                           key=lambda d: (sum(d), d)):
            out.extend(self.classes(dims))
        return out

    def class_by_key(self, key):
        return self.by_key[key]

    def aut(self, cls):
        """|Aut| of a registered class."""
        return self._aut_lazy(cls)

    def zero_class(self):
        return self.classes(self.quiver.zero_dim())[0]

    def simple_class(self, node):
        rep = simple_rep(self.quiver, node)
        self.classes(rep.dims)
        return self.classify(rep)

    def classify(self, rep: Rep) -> RepClass:
        """The registered class of an arbitrary representation."""
        dims = rep.dims
        if dims not in self.by_dim:
            self.classes(dims)
        direct = self.by_key.get(rep.serialize())
        if direct is not None and direct.dims == dims:
            return direct
        mult = self._profile_solve(rep)
        if mult is not None:
            key = self._key_for_multiset(mult)
            if key is not None and key in self.by_key:
                return self.by_key[key]
        for cls in self.by_dim[dims]:
            if iso_test(rep, cls.rep):
                return cls
        raise RuntimeError("representation %r matches no registered "
                           "class" % (rep.serialize(),))

    def is_simple(self, cls: RepClass) -> bool:
        if cls.simple is None:
            cls.simple = self._simple_scan(cls.rep)
        return cls.simple

    # .. internals ..

    def _ensure_below(self, total):
        for t in range(total):
            for dims in self._dims_of_total(t):
                if dims not in self.by_dim:
                    self._build_dim(dims)

    def _dims_of_total(self, total):
        n = self.quiver.n
        out = [comp for comp in
               itertools.product(range(total + 1), repeat=n)
               if sum(comp) == total]
        return sorted(out)

    def _build_dim(self, dims):
        dims = tuple(dims)
        if sum(dims) == 0:
            rep = zero_rep(self.quiver)
            cls = self._register(rep, rep.serialize())
            cls.summands = ()
            cls.indec = False
            cls.simple = False
            cls.aut = 1
            self.by_dim[dims] = [cls]
            return
        if self.brute_ok(dims):
            classes = self._build_brute(dims)
        else:
            classes = self._build_constructive(dims)
        classes.sort(key=lambda c: c.key)
        self.by_dim[dims] = classes
        self._finish_dim(classes)

    def _register(self, rep, key):
        cls = RepClass(rep, key)
        self.by_key[key] = cls
        return cls

    def _mark_indec(self, cls):
        cls.indec = True
        cls.summands = ((cls.key, 1),)
        if cls.key not in self.indec_keys:
            self.indec_keys.append(cls.key)
            self._probe_cache.clear()

    # .. brute path: orbit walk ..

    def _gl_generators(self, d):
        F = self.quiver.field
        if d == 0:
            return []
        gens = []
        lam = F.least_generator()
        m = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
        m[0][0] = lam
        gens.append(fx.mat(m))
        if d >= 2:
            m = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
            m[0][1] = 1
            gens.append(fx.mat(m))
            m = [[0] * d for _ in range(d)]
            for r in range(d):
                m[r][(r + 1) % d] = 1
            gens.append(fx.mat(m))
        return gens

    def _build_brute(self, dims):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        shapes = [(a, dims[idx[h]], dims[idx[t]])
                  for (a, t, h) in quiver.arrows]
        spaces = []
        for (a, dh, dt) in shapes:
            mats = [tuple(tuple(flat[r * dt:(r + 1) * dt])
                          for r in range(dh))
                    for flat in itertools.product(range(F.q),
                                                  repeat=dh * dt)]
            spaces.append(mats)
        gens = []
        for i in range(quiver.n):
            for g in self._gl_generators(dims[i]):
                gens.append((i, g, fx.inverse(F, g)))
        visited = set()
        classes = []
        group = self.group_order(dims)
        for point in itertools.product(*spaces):
            if point in visited:
                continue
            orbit = self._orbit_walk(point, gens)
            visited.update(orbit)
            rep = self._point_to_rep(dims, min(orbit))
            cls = self._register(rep, rep.serialize())
            cls.aut = group // len(orbit)
            classes.append(cls)
        return classes

    def _point_to_rep(self, dims, point):
        maps = {a: point[k]
                for k, (a, _, _) in enumerate(self.quiver.arrows)}
        return Rep(self.quiver, dims, maps)

    def _orbit_walk(self, start, gens):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        arrows = quiver.arrows
        orbit = {start}
        frontier = [start]
        while frontier:
            new_frontier = []
            for point in frontier:
                for (i, g, ginv) in gens:
                    moved = []
                    for k, (a, t, h) in enumerate(arrows):
                        m = point[k]
                        if idx[h] == i:
                            m = fx.mat_mul(F, g, m)
                        if idx[t] == i:
                            m = fx.mat_mul(F, m, ginv)
                        moved.append(m)
                    moved = tuple(moved)
                    if moved not in orbit:
                        orbit.add(moved)
                        new_frontier.append(moved)
            frontier = new_frontier
        return orbit

    # .. constructive path ..

    def _build_constructive(self, dims):
        news = self._new_indecs_from_extensions(dims)
        classes = list(news)
        seen = {c.key for c in news}
        for multiset in self._indec_combos(dims):
            if len(multiset) == 1 and multiset[0][1] == 1:
                continue
            key = self._summand_key(multiset)
            if key in seen:
                continue
            seen.add(key)
            parts = []
            for ikey, mult in multiset:
                parts.extend([self.by_key[ikey].rep] * mult)
            rep = direct_sum_list(self.quiver, parts)
            cls = self._register(rep, key)
            cls.summands = tuple(sorted(multiset))
            cls.indec = False
            classes.append(cls)
        self._mass_check(dims, classes)
        return classes

    def _mass_check(self, dims, classes):
        """Orbit-counting certificate that no class is missing.

        The base-change orbits partition the raw point space, so
        sum over classes of |G(d)| / |Aut| must equal the number of
        raw map tuples at this dimension vector.
        """
        group = self.group_order(dims)
        total = 0
        for cls in classes:
            aut = cls.aut if cls.aut is not None else self._aut_lazy(cls)
            total += group // aut
        if total != self.raw_size(dims):
            raise BudgetError(
                "classification at %r is incomplete: orbit mass %d of %d"
                % (dims, total, self.raw_size(dims)))

    def _aut_lazy(self, cls):
        if cls.summands is None:
            mult = self._profile_solve(cls.rep)
            if mult is None:
                self._mark_indec(cls)
            else:
                cls.summands = mult
        if cls.aut is None:
            cls.aut = self._aut_fast(cls)
        return cls.aut

    def _new_indecs_from_extensions(self, dims):
        """Register indecomposables this dimension hides.

        Any class at dims that is not a sum of known indecs is itself a
        new indecomposable (all proper summands live at smaller total
        dimension, which is fully enumerated).  Every representation
        has a simple subobject, so middle terms of simple-by-smaller
        extensions reach every class.
        """
        news = []
        for cand in self._extension_candidates(dims):
            if self._profile_solve(cand) is not None:
                continue
            matched = False
            for cls in news:
                if iso_test(cand, cls.rep):
                    matched = True
                    break
            if matched:
                continue
            if not is_indecomposable(cand, self.raw_budget):
                raise BudgetError(
                    "class at %r escapes hom-profile classification"
                    % (dims,))
            key = self._fallback_key(cand)
            cls = self._register(cand, key)
            self._mark_indec(cls)
            news.append(cls)
        return news

    def _fallback_key(self, rep):
        probes = self._probe_set(rep.dims)
        profile = tuple(hom_dim(p.rep, rep) for p in probes)
        base = "d=%s;p=%s" % (",".join(str(x) for x in rep.dims),
                              ",".join(str(x) for x in profile))
        serial = self._fallback_counter.get(base, 0)
        self._fallback_counter[base] = serial + 1
        return "%s;k=%d" % (base, serial)

    def _indec_combos(self, dims):
        indecs = [self.by_key[k] for k in sorted(self.indec_keys)
                  if all(a <= b
                         for a, b in zip(self.by_key[k].dims, dims))]
        out = []

        def rec(pos, remaining, acc):
            if all(x == 0 for x in remaining):
                out.append(tuple(acc))
                return
            if pos == len(indecs):
                return
            cls = indecs[pos]
            caps = [r // d for r, d in zip(remaining, cls.dims) if d > 0]
            maxmult = min(caps) if caps else 0
            for mult in range(maxmult, -1, -1):
                if mult:
                    acc.append((cls.key, mult))
                rec(pos + 1,
                    tuple(r - mult * d
                          for r, d in zip(remaining, cls.dims)), acc)
                if mult:
                    acc.pop()

        rec(0, tuple(dims), [])
        return out

    def _summand_key(self, multiset):
        return "sum[" + "|".join(
            "%s*%d" % (k, m) for k, m in sorted(multiset)) + "]"

    def _extension_candidates(self, dims):
        yield from self._loop_simples(dims)
        for skey in list(self.indec_keys):
            scls = self.by_key[skey]
            if not self.is_simple(scls):
                continue
            rest = tuple(d - s for d, s in zip(dims, scls.dims))
            if any(x < 0 for x in rest):
                continue
            if rest not in self.by_dim:
                continue
            for vcls in list(self.by_dim[rest]):
                yield from self._middle_terms_grouped(scls, vcls)

    def _loop_simples(self, dims):
        """Simple classes invisible to extensions: loop-quiver case.

        On the one-loop quiver the simples of dimension d are the
        companion matrices of monic irreducible polynomials of degree
        d.  Acyclic quivers have no simples beyond the unit vectors, so
        nothing is yielded; any other cyclic shape relies on the
        orbit-mass certificate to refuse an incomplete enumeration.
        """
        quiver = self.quiver
        if quiver.n != 1 or len(quiver.arrows) != 1:
            return
        (a, t, h) = quiver.arrows[0]
        if t != h:
            return
        d = dims[0]
        if d < 2:
            return
        F = quiver.field
        if F.q ** d > self.raw_budget:
            raise BudgetError("polynomial space exceeds budget")
        for poly in _monic_irreducibles(F, d):
            comp = [[0] * d for _ in range(d)]
            for r in range(1, d):
                comp[r][r - 1] = 1
            for r in range(d):
                comp[r][d - 1] = F.neg(poly[r])
            yield Rep(quiver, dims, {a: fx.mat(comp)})

    def _simple_scan(self, rep):
        if rep.total_dim == 0:
            return False
        for sub_dims in self.quiver.dims_leq(rep.dims):
            if sum(sub_dims) in (0, rep.total_dim):
                continue
            for _ in invariant_subspaces(rep, sub_dims):
                return False
        return True

    def _middle_terms(self, s: Rep, v: Rep):
        """All extensions with subobject s and quotient v."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        cells = sum(s.dims[idx[h]] * v.dims[idx[t]]
                    for (a, t, h) in quiver.arrows)
        if F.q ** cells > self.raw_budget:
            raise BudgetError("extension space exceeds budget")
        dims = quiver.add_dim(s.dims, v.dims)
        for flat in itertools.product(range(F.q), repeat=cells):
            pos = 0
            maps = {}
            for (a, t, h) in quiver.arrows:
                ti, hi = idx[t], idx[h]
                st, sh = s.dims[ti], s.dims[hi]
                vt, vh = v.dims[ti], v.dims[hi]
                rows = []
                for r in range(sh):
                    rows.append(tuple(s.maps[a][r]) +
                                tuple(flat[pos + r * vt:
                                           pos + (r + 1) * vt]))
                pos += sh * vt
                for r in range(vh):
                    rows.append((0,) * st + tuple(v.maps[a][r]))
                maps[a] = tuple(rows)
            yield Rep(quiver, dims, maps)

    def _middle_terms_grouped(self, scls, vcls):
        """Extension middles over one cocycle per column-reduced pattern.

        The quotient is rebuilt as an ordered sum of indecomposable
        copies; within each isotypic block, scalar column operations on
        the cocycle columns come from automorphisms of the quotient and
        leave the middle's isomorphism class unchanged, so enumerating
        column spaces in echelon form still reaches every class.  The
        orbit-mass certificate checks the outcome per dimension vector.
        """
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        s = scls.rep
        parts = [(self.by_key[k], m)
                 for (k, m) in sorted(vcls.summands or ((vcls.key, 1),))]
        copies = []
        for (icls, m) in parts:
            copies.extend([icls.rep] * m)
        v = direct_sum_list(quiver, copies)
        dims = quiver.add_dim(s.dims, v.dims)
        block_sets = []
        total = 1
        for (icls, m) in parts:
            irep = icls.rep
            cells = sum(s.dims[idx[h]] * irep.dims[idx[t]]
                        for (a, t, h) in quiver.arrows)
            opts = []
            for r in range(min(m, cells) + 1):
                for basis in fx.echelon_bases(F, cells, r):
                    opts.append(list(basis) + [(0,) * cells] * (m - r))
            block_sets.append(opts)
            total *= len(opts)
            if total > self.raw_budget:
                raise BudgetError("extension scan exceeds budget")
        aoffs = []
        for irep in copies:
            offs = {}
            off = 0
            for (a, t, h) in quiver.arrows:
                offs[a] = off
                off += s.dims[idx[h]] * irep.dims[idx[t]]
            aoffs.append(offs)
        for combo in itertools.product(*block_sets):
            flats = []
            for cols in combo:
                flats.extend(cols)
            maps = {}
            for (a, t, h) in quiver.arrows:
                ti, hi = idx[t], idx[h]
                rows = []
                for r in range(s.dims[hi]):
                    seg = []
                    for irep, flat, offs in zip(copies, flats, aoffs):
                        it = irep.dims[ti]
                        base = offs[a] + r * it
                        seg.extend(flat[base:base + it])
                    rows.append(tuple(s.maps[a][r]) + tuple(seg))
                for r in range(v.dims[hi]):
                    rows.append((0,) * s.dims[ti] + tuple(v.maps[a][r]))
                maps[a] = tuple(rows)
            yield Rep(quiver, dims, maps)

    # .. hom-profile classification ..

    def _probe_set(self, dims):
        key = tuple(dims)
        hit = self._probe_cache.get(key)
        if hit is None:
            hit = [self.by_key[k] for k in self.indec_keys
                   if all(a <= b
                          for a, b in zip(self.by_key[k].dims, dims))]
            hit.sort(key=lambda c: (sum(c.dims), c.dims, c.key))
            self._probe_cache[key] = hit
        return hit

    def _hom_dim_cached(self, akey, bkey):
        hit = self._hom_cache.get((akey, bkey))
        if hit is None:
            hit = hom_dim(self.by_key[akey].rep, self.by_key[bkey].rep)
            self._hom_cache[(akey, bkey)] = hit
        return hit

    def _profile_solve(self, rep: Rep):
        """Indec multiset of rep from hom counts, or None.

        Solves H m = h with H the hom matrix over the probe set; the
        answer must be a nonnegative integer vector whose summands
        reproduce the dimension vector and the full profile.
        """
        if rep.total_dim == 0:
            return ()
        probes = self._probe_set(rep.dims)
        if not probes:
            return None
        h = [Fraction(hom_dim(p.rep, rep)) for p in probes]
        m = len(probes)
        H = [[Fraction(self._hom_dim_cached(probes[a].key,
                                            probes[b].key))
              for b in range(m)] for a in range(m)]
        sol = _solve_rational(H, h)
        if sol is None:
            return None
        mult = []
        for x, p in zip(sol, probes):
            if x.denominator != 1 or x < 0:
                return None
            if x:
                mult.append((p.key, int(x)))
        got = self.quiver.zero_dim()
        for k, c in mult:
            for _ in range(c):
                got = self.quiver.add_dim(got, self.by_key[k].dims)
        if got != rep.dims:
            return None
        for p, want in zip(probes, h):
            back = sum(c * self._hom_dim_cached(p.key, k)
                       for k, c in mult)
            if back != want:
                return None
        return tuple(sorted(mult))

    def _key_for_multiset(self, mult):
        if len(mult) == 1 and mult[0][1] == 1:
            return mult[0][0]
        dims = self.quiver.zero_dim()
        for k, c in mult:
            for _ in range(c):
                dims = self.quiver.add_dim(dims, self.by_key[k].dims)
        if dims in self.by_dim:
            for cls in self.by_dim[dims]:
                if cls.summands == tuple(sorted(mult)):
                    return cls.key
        return None

    # .. per-dimension finishing: decomposition, aut order ..

    def _finish_dim(self, classes):
        deferred = []
        for cls in classes:
            if cls.summands is not None:
                continue
            mult = self._profile_solve(cls.rep)
            if mult is None:
                deferred.append(cls)
            else:
                cls.summands = mult
                cls.indec = (len(mult) == 1 and mult[0][1] == 1 and
                             mult[0][0] == cls.key)
        for cls in deferred:
            # not a sum of known smaller indecs: certify and register
            if not is_indecomposable(cls.rep, self.raw_budget):
                raise RuntimeError(
                    "hom-profile classification failed on a "
                    "decomposable class at %r" % (cls.dims,))
            self._mark_indec(cls)
        for cls in classes:
            if cls.indec and cls.key not in self.indec_keys:
                self._mark_indec(cls)
            if cls.indec and cls.end_division_degree is None:
                cls.end_division_degree = self._division_degree(cls)
        for cls in classes:
            if cls.aut is None:
                cls.aut = self._aut_fast(cls)

    def _division_degree(self, cls):
        """Degree over F_q of End(I)/rad for an indecomposable I."""
        F = self.quiver.field
        singular = 0
        for phis in hom_elements(cls.rep, cls.rep, self.raw_budget):
            if not all(d == 0 or fx.det_nonzero(F, m)
                       for d, m in zip(cls.dims, phis)):
                singular += 1
        ed = end_dim(cls.rep)
        raddim = 0
        while F.q ** raddim < singular:
            raddim += 1
        if F.q ** raddim != singular:
            raise RuntimeError("endomorphism ring of %s is not local"
                               % cls.key)
        return ed - raddim

    def _aut_fast(self, cls):
        """|Aut M| = q^(dim rad End M) * prod_c |GL_{m_c}(q^{e_c})|."""
        if cls.rep.total_dim == 0:
            return 1
        q = self.quiver.q
        endd = 0
        for (ka, ca) in cls.summands:
            for (kb, cb) in cls.summands:
                endd += ca * cb * self._hom_dim_cached(ka, kb)
        semisimple = 0
        unitpart = 1
        for (k, c) in cls.summands:
            icls = self.by_key[k]
            if icls.end_division_degree is None:
                icls.end_division_degree = self._division_degree(icls)
            e = icls.end_division_degree
            semisimple += c * c * e
            unitpart *= fx.gl_order(q ** e, c)
        return (q ** (endd - semisimple)) * unitpart

    def aut_brute(self, cls):
        """|Aut| by scanning the endomorphism ring (cross-check)."""
        count = 0
        for phis in hom_elements(cls.rep, cls.rep, self.raw_budget):
            if is_isomorphism(cls.rep, cls.rep, phis):
                count += 1
        return count if cls.rep.total_dim else 1


def _monic_irreducibles(F, d):
    """Monic irreducible polynomials of degree d over F, as low-first
    coefficient tuples without the leading 1."""
    smaller = []
    for e in range(1, d // 2 + 1):
        for tail in itertools.product(range(F.q), repeat=e):
            poly = tail + (1,)
            if _poly_is_irreducible(F, poly, smaller):
                smaller.append(poly)
    out = []
    for tail in itertools.product(range(F.q), repeat=d):
        poly = tail + (1,)
        if _poly_is_irreducible(F, poly, smaller):
            out.append(tail)
    return out


def _poly_is_irreducible(F, poly, smaller_irreducibles):
    deg = len(poly) - 1
    if deg == 1:
        return True
    for g in smaller_irreducibles:
        if 2 * (len(g) - 1) > deg:
            break
        if _poly_rem(F, poly, g) is None:
            return False
    return True


def _poly_rem(F, num, den):
    """None when den divides num, else the nonzero remainder tuple."""
    num = list(num)
    while num and num[-1] == 0:
        num.pop()
    dd = len(den) - 1
    lead_inv = F.inv(den[-1])
    while num and len(num) - 1 >= dd:
        c = F.mul(num[-1], lead_inv)
        off = len(num) - 1 - dd
        for i, dc in enumerate(den):
            num[off + i] = F.sub(num[off + i], F.mul(c, dc))
        while num and num[-1] == 0:
            num.pop()
    return tuple(num) if num else None


def _solve_rational(H, h):
    """Solve the square system H x = h over Q; None unless unique."""
    m = len(H)
    A = [list(row) + [val] for row, val in zip(H, h)]
    rank = 0
    pivot_cols = []
    for col in range(m):
        piv = None
        for r in range(rank, m):
            if A[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = 1 / A[rank][col]
        A[rank] = [x * inv for x in A[rank]]
        for r in range(m):
            if r != rank and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[rank])]
        pivot_cols.append(col)
        rank += 1
    for r in range(rank, m):
        if A[r][m] != 0:
            return None
    if rank < m:
        return None
    x = [Fraction(0)] * m
    for r, col in enumerate(pivot_cols):
        x[col] = A[r][m]
    return x


# -- Hall numbers --------------------------------------------------------------

def hall_number(table: RepTable, xcls, ucls, vcls) -> int:
    """F^X_{U,V}: subobjects of X isomorphic to U with quotient V."""
    quiver = table.quiver
    X, U, V = xcls.rep, ucls.rep, vcls.rep
    if quiver.add_dim(U.dims, V.dims) != X.dims:
        return 0
    count = 0
    for bases in invariant_subspaces(X, U.dims):
        sub, quot = sub_quotient(X, bases)
        if table.classify(sub) is ucls and table.classify(quot) is vcls:
            count += 1
    return count
