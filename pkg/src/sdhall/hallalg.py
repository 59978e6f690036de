"""Twisted Hall algebra of a quiver.

Basis elements are isomorphism classes of representations.  The
product of two classes sums over extensions with a power-of-nu twist,
the coproduct enumerates subobject splittings, and the Green form
pairs a class with itself against its automorphism count.  A
verification suite checks the algebra laws exhaustively below a
dimension bound.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import ffield as fx
from . import rep as rp
from .rep import BudgetError


def compact_scalar(s) -> str:
    return str(s).replace(" ", "")


def format_term(coeff, dims, key) -> str:
    """One printed term: `coeff * [dim;key]`."""
    tail = key.split(";", 1)[1] if ";" in key else ""
    return "%s * [%s;%s]" % (
        compact_scalar(coeff), ",".join(str(d) for d in dims), tail)


class HallVector:
    """Finitely supported scalar combination of class keys."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms=None):
        self.alg = alg
        clean = {}
        for k, c in (terms or {}).items():
            if not c.is_zero():
                clean[k] = c
        self.terms = clean

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                out[k] = out[k] + c
            else:
                out[k] = c
        return HallVector(self.alg, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                out[k] = out[k] - c
            else:
                out[k] = -c
        return HallVector(self.alg, out)

    def scale(self, c):
        return HallVector(self.alg,
                          {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, HallVector) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coeff(self, key):
        return self.terms.get(key, self.alg.sf.zero())

    def sorted_terms(self):
        """(dims, key, coeff) triples sorted by (dims, key)."""
        out = []
        for k, c in self.terms.items():
            out.append((self.alg.dims_of(k), k, c))
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(format_term(c, d, k)
                          for (d, k, c) in self.sorted_terms())

    def __repr__(self):
        return "HallVector(%s)" % self.pretty()


class HallAlgebra:
    """Product, coproduct, and Green form over a class table."""

    def __init__(self, table: rp.RepTable):
        self.table = table
        self.quiver = table.quiver
        self.sf = table.quiver.scalars
        self._fnum_cache = {}
        self._split_cache = {}

    # -- vectors ----------------------------------------------------------

    def zero(self) -> HallVector:
        return HallVector(self, {})

    def one(self) -> HallVector:
        return self.basis(self.table.zero_class())

    def basis(self, cls) -> HallVector:
        return HallVector(self, {cls.key: self.sf.one()})

    def basis_by_key(self, key) -> HallVector:
        return self.basis(self.table.class_by_key(key))

    def simple(self, node) -> HallVector:
        return self.basis(self.table.simple_class(node))

    def dims_of(self, key):
        return self.table.class_by_key(key).dims

    def aut_of(self, key) -> int:
        return self.table.aut(self.table.class_by_key(key))

    # -- structure constants ----------------------------------------------

    def extension_middle_counts(self, vcls, ucls):
        """For sequences 0 -> U -> X -> V -> 0: class-count per middle X.

        Counts elements of the extension group of V by U whose middle
        term lies in each isomorphism class.
        """
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        u, v = ucls.rep, vcls.rep
        aoffs = []
        pos = 0
        for (a, t, h) in quiver.arrows:
            aoffs.append(pos)
            pos += u.dims[idx[h]] * v.dims[idx[t]]
        nvars = pos
        noffs = []
        pos = 0
        for i in range(quiver.n):
            noffs.append(pos)
            pos += u.dims[i] * v.dims[i]
        image_rows = []
        for i in range(quiver.n):
            for r in range(u.dims[i]):
                for c in range(v.dims[i]):
                    row = [0] * nvars
                    # delta(f)_a = u_a f_t - f_h v_a on unit f at (i,r,c)
                    for k, (a, t, h) in enumerate(quiver.arrows):
                        ti, hi = idx[t], idx[h]
                        if ti == i:
                            for rr in range(u.dims[hi]):
                                slot = aoffs[k] + rr * v.dims[ti] + c
                                row[slot] = F.add(row[slot],
                                                  u.maps[a][rr][r])
                        if hi == i:
                            for cc in range(v.dims[ti]):
                                slot = aoffs[k] + r * v.dims[ti] + cc
                                row[slot] = F.add(
                                    row[slot], F.neg(v.maps[a][c][cc]))
                    image_rows.append(tuple(row))
        if nvars == 0:
            free = []
        elif image_rows:
            _, pivots = fx.rref(F, tuple(image_rows))
            free = [j for j in range(nvars) if j not in set(pivots)]
        else:
            free = list(range(nvars))
        if F.q ** len(free) > self.table.raw_budget:
            raise BudgetError("extension group of size %d exceeds budget"
                              % (F.q ** len(free),))
        xdims = quiver.add_dim(u.dims, v.dims)
        counts = {}
        for vals in itertools.product(range(F.q), repeat=len(free)):
            coords = [0] * nvars
            for j, val in zip(free, vals):
                coords[j] = val
            maps = {}
            for k, (a, t, h) in enumerate(quiver.arrows):
                ti, hi = idx[t], idx[h]
                rows = []
                for r in range(u.dims[hi]):
                    seg = coords[aoffs[k] + r * v.dims[ti]:
                                 aoffs[k] + (r + 1) * v.dims[ti]]
                    rows.append(tuple(u.maps[a][r]) + tuple(seg))
                for r in range(v.dims[hi]):
                    rows.append((0,) * u.dims[ti] + tuple(v.maps[a][r]))
                maps[a] = fx.mat(rows)
            x = rp.rep_from_maps(quiver, xdims, maps)
            xkey = self.table.classify(x).key
            counts[xkey] = counts.get(xkey, 0) + 1
        return counts

    def hall_constants(self, ucls, vcls):
        """dict X-key -> count of subobjects of X of class U with quotient V."""
        ck = (ucls.key, vcls.key)
        hit = self._fnum_cache.get(ck)
        if hit is not None:
            return hit
        q = self.quiver.q
        counts = self.extension_middle_counts(vcls, ucls)
        a_u = self.table.aut(ucls)
        a_v = self.table.aut(vcls)
        hom_vu = q ** rp.hom_dim(vcls.rep, ucls.rep)
        out = {}
        for xkey, m in counts.items():
            a_x = self.table.aut(self.table.class_by_key(xkey))
            val = Fraction(m * a_x, hom_vu * a_u * a_v)
            if val.denominator != 1:
                raise RuntimeError(
                    "non-integral subobject count for (%s, %s)" % ck)
            if val:
                out[xkey] = int(val)
        self._fnum_cache[ck] = out
        return out

    def splittings(self, xcls):
        """dict (U-key, V-key) -> subobject count, scanning X directly."""
        hit = self._split_cache.get(xcls.key)
        if hit is not None:
            return hit
        quiver = self.quiver
        q = quiver.q
        x = xcls.rep
        work = 1
        for d in x.dims:
            work *= sum(fx.gaussian_binomial(d, k, q) for k in range(d + 1))
        if work > self.table.raw_budget:
            raise BudgetError("subspace scan of size %d exceeds budget"
                              % (work,))
        out = {}
        for sub_dims in quiver.dims_leq(x.dims):
            for bases in rp.invariant_subspaces(x, sub_dims):
                sub, quot = rp.sub_quotient(x, bases)
                pair = (self.table.classify(sub).key,
                        self.table.classify(quot).key)
                out[pair] = out.get(pair, 0) + 1
        self._split_cache[xcls.key] = out
        return out

    # -- product, coproduct, Green form -------------------------------------

    def product_classes(self, ucls, vcls):
        """[U][V] as a dict key -> Scalar."""
        e = -Fraction(self.quiver.euler_form(vcls.dims, ucls.dims))
        tw = self.sf.nu_power(e)
        self.table.classes(self.quiver.add_dim(ucls.dims, vcls.dims))
        return {xkey: tw * m
                for xkey, m in self.hall_constants(ucls, vcls).items()}

    def product(self, x: HallVector, y: HallVector) -> HallVector:
        out = {}
        table = self.table
        for ku, cu in x.terms.items():
            for kv, cv in y.terms.items():
                c = cu * cv
                pc = self.product_classes(table.class_by_key(ku),
                                          table.class_by_key(kv))
                for kx, w in pc.items():
                    prev = out.get(kx)
                    out[kx] = c * w if prev is None else prev + c * w
        return HallVector(self, out)

    def coproduct_class(self, xcls):
        """dict (U-key, V-key) -> Scalar splitting coefficient."""
        out = {}
        a_x = self.table.aut(xcls)
        for (ukey, vkey), m in self.splittings(xcls).items():
            u = self.table.class_by_key(ukey)
            v = self.table.class_by_key(vkey)
            e = -Fraction(self.quiver.euler_form(v.dims, u.dims))
            coeff = self.sf.nu_power(e) * Fraction(
                self.table.aut(u) * self.table.aut(v) * m, a_x)
            out[(ukey, vkey)] = coeff
        return out

    def coproduct_terms(self, x: HallVector):
        """dict (U-key, V-key) -> Scalar for a whole vector."""
        out = {}
        for kx, c in x.terms.items():
            for pair, w in self.coproduct_class(
                    self.table.class_by_key(kx)).items():
                prev = out.get(pair)
                out[pair] = c * w if prev is None else prev + c * w
        return {p: v for p, v in out.items() if not v.is_zero()}

    def coproduct(self, x: HallVector):
        """Sorted list of (U-key, V-key, Scalar) triples."""
        terms = self.coproduct_terms(x)
        order = lambda pair: (self.dims_of(pair[0]), pair[0],
                              self.dims_of(pair[1]), pair[1])
        return [(u, v, terms[(u, v)])
                for (u, v) in sorted(terms, key=order)]

    def green_form(self, x: HallVector, y: HallVector):
        total = self.sf.zero()
        for k, c in x.terms.items():
            d = y.terms.get(k)
            if d is not None:
                total = total + c * d * self.sf.from_fraction(
                    Fraction(1, self.aut_of(k)))
        return total

    # -- tensor-square helpers ----------------------------------------------

    def tensor_multiply(self, tx, ty):
        """Product on the tensor square: (x (x) y)(z (x) w) picks up
        nu^{-(y,z)} with the symmetrized form of the inner gradings."""
        out = {}
        table = self.table
        for (k1u, k1v), c1 in tx.items():
            for (k2u, k2v), c2 in ty.items():
                tw = self.sf.nu_power(-Fraction(self.quiver.cartan_form(
                    self.dims_of(k1v), self.dims_of(k2u))))
                left = self.product_classes(table.class_by_key(k1u),
                                            table.class_by_key(k2u))
                right = self.product_classes(table.class_by_key(k1v),
                                             table.class_by_key(k2v))
                base = c1 * c2 * tw
                for ka, ca in left.items():
                    for kb, cb in right.items():
                        pair = (ka, kb)
                        add = base * ca * cb
                        prev = out.get(pair)
                        out[pair] = add if prev is None else prev + add
        return {p: v for p, v in out.items() if not v.is_zero()}

    def tensor_green(self, tx, ty):
        total = self.sf.zero()
        for pair, c in tx.items():
            d = ty.get(pair)
            if d is not None:
                total = total + c * d * self.sf.from_fraction(
                    Fraction(1, self.aut_of(pair[0]) * self.aut_of(pair[1])))
        return total

    def coproduct_pair_dict(self, x: HallVector):
        return self.coproduct_terms(x)


# -- structured check reports ------------------------------------------------

FIELD_NAMES = ("relation", "indices", "basis", "lhs", "rhs", "status")


class CheckLine:
    """One verified instance of a relation."""

    __slots__ = FIELD_NAMES

    def __init__(self, relation, indices, basis, lhs, rhs, status):
        self.relation = relation
        self.indices = indices
        self.basis = basis
        self.lhs = lhs
        self.rhs = rhs
        self.status = status

    def values(self):
        return (self.relation, self.indices, self.basis,
                self.lhs, self.rhs, self.status)

    def text(self) -> str:
        return " ".join("%s=%s" % (n, v)
                        for n, v in zip(FIELD_NAMES, self.values()))

    def tsv(self) -> str:
        return "\t".join(self.values())


class Report:
    """Deterministic list of check lines."""

    def __init__(self, title):
        self.title = title
        self.lines = []

    def add(self, relation, indices, basis, lhs, rhs, ok):
        self.lines.append(CheckLine(
            relation, indices, basis, compact_value(lhs),
            compact_value(rhs), "pass" if ok else "fail"))

    @property
    def ok(self) -> bool:
        return all(line.status == "pass" for line in self.lines)

    def failures(self):
        return [line for line in self.lines if line.status != "pass"]

    def text(self, fmt="text") -> str:
        if fmt == "tsv":
            body = [("\t".join(FIELD_NAMES))]
            body.extend(line.tsv() for line in self.lines)
            return "\n".join(body)
        body = ["%s: %d checks, %d failures"
                % (self.title, len(self.lines), len(self.failures()))]
        body.extend(line.text() for line in self.lines)
        return "\n".join(body)


def compact_value(v) -> str:
    if isinstance(v, HallVector):
        return v.pretty().replace(" ", "")
    if isinstance(v, str):
        return v.replace(" ", "").replace("\t", "")
    return compact_scalar(v)


def vector_text(terms_dict, alg) -> str:
    """Compact text for a tensor dict {(ku, kv): coeff}."""
    parts = []
    order = lambda p: (alg.dims_of(p[0]), p[0], alg.dims_of(p[1]), p[1])
    for pair in sorted(terms_dict, key=order):
        c = terms_dict[pair]
        parts.append("%s*[%s](x)[%s]" % (
            compact_scalar(c), pair[0], pair[1]))
    return "+".join(parts) if parts else "0"


def verify_bialgebra(alg: HallAlgebra, bound) -> Report:
    """Exhaustive law checks on basis elements below the bound."""
    rpt = Report("bialgebra suite bound=%s" % (",".join(map(str, bound))))
    basis = alg.table.classes_leq(bound)
    # product associativity
    for xc in basis:
        for yc in basis:
            for zc in basis:
                lhs = alg.product(alg.product(alg.basis(xc), alg.basis(yc)),
                                  alg.basis(zc))
                rhs = alg.product(alg.basis(xc),
                                  alg.product(alg.basis(yc), alg.basis(zc)))
                rpt.add("assoc", "-",
                        "%s|%s|%s" % (xc.key, yc.key, zc.key),
                        lhs, rhs, lhs == rhs)
    # grading of the product
    for xc in basis:
        for yc in basis:
            prod = alg.product(alg.basis(xc), alg.basis(yc))
            want = alg.quiver.add_dim(xc.dims, yc.dims)
            ok = all(alg.dims_of(k) == want for k in prod.terms)
            rpt.add("grading", "-", "%s|%s" % (xc.key, yc.key),
                    ",".join(map(str, want)), ",".join(map(str, want)), ok)
    # coassociativity
    for xc in basis:
        left = {}
        right = {}
        for (ku, kv), c in alg.coproduct_class(xc).items():
            for (ka, kb), w in alg.coproduct_class(
                    alg.table.class_by_key(ku)).items():
                trip = (ka, kb, kv)
                add = c * w
                left[trip] = left.get(trip, alg.sf.zero()) + add
            for (ka, kb), w in alg.coproduct_class(
                    alg.table.class_by_key(kv)).items():
                trip = (ku, ka, kb)
                add = c * w
                right[trip] = right.get(trip, alg.sf.zero()) + add
        left = {t: v for t, v in left.items() if not v.is_zero()}
        right = {t: v for t, v in right.items() if not v.is_zero()}
        ok = left == right
        rpt.add("coassoc", "-", xc.key,
                "%d terms" % len(left), "%d terms" % len(right), ok)
    # compatibility: coproduct of a product equals the twisted
    # tensor-square product of the coproducts
    for xc in basis:
        for yc in basis:
            lhs = alg.coproduct_terms(alg.product(alg.basis(xc),
                                                  alg.basis(yc)))
            rhs = alg.tensor_multiply(alg.coproduct_class(xc),
                                      alg.coproduct_class(yc))
            ok = lhs == rhs
            rpt.add("bialgebra", "-", "%s|%s" % (xc.key, yc.key),
                    vector_text(lhs, alg), vector_text(rhs, alg), ok)
    # adjointness of product and coproduct under the Green form
    for zc in basis:
        cop = alg.coproduct_class(zc)
        for xc in basis:
            for yc in basis:
                if alg.quiver.add_dim(xc.dims, yc.dims) != zc.dims:
                    continue
                tx = {(xc.key, yc.key): alg.sf.one()}
                lhs = alg.tensor_green(tx, cop)
                rhs = alg.green_form(alg.product(alg.basis(xc),
                                                 alg.basis(yc)),
                                     alg.basis(zc))
                rpt.add("pairing", "-",
                        "%s|%s|%s" % (xc.key, yc.key, zc.key),
                        lhs, rhs, lhs == rhs)
    return rpt


def product(x: HallVector, y: HallVector) -> HallVector:
    return x.alg.product(x, y)


def coproduct(x: HallVector):
    return x.alg.coproduct(x)


def green_form_alg(x: HallVector, y: HallVector):
    return x.alg.green_form(x, y)
