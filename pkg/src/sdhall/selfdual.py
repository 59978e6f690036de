"""Self-dual representations: duality functor, forms, isometry classes.

A self-dual structure on a representation M is a node-indexed family of
invertible pairing matrices psi_i coupling M_i with M_{sigma(i)},
subject to a symmetry constraint (with sign s_i and entrywise
conjugation when the field involution is nontrivial) and a
compatibility constraint against the structure maps (with signs
tau_alpha).  Isometry classes are enumerated per dimension vector by a
factored scheme: fix the standard node form in each Witt class and walk
orbits of compatible structure maps under the isometry group of that
form; beyond budget, classes are assembled from decorated
indecomposable blocks.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import ffield as fx
from .ffield import FF
from . import rep as rp
from .rep import Rep, BudgetError


# -- the duality functor -------------------------------------------------------

def dual_rep(u: Rep) -> Rep:
    """S(U): node i carries the conjugate dual of U at sigma(i)."""
    quiver = u.quiver
    F = quiver.field
    dims = quiver.sigma_dim(u.dims)
    maps = {}
    for (a, t, h) in quiver.arrows:
        sa = quiver.sigma_a[a]
        m = u.maps[sa]
        mct = fx.conj_transpose(F, m)
        maps[a] = fx.mat_scale(F, F.encode(quiver.tau[a]), mct)
    return Rep(quiver, dims, maps)


def dual_map(u: Rep, v: Rep, phis):
    """S(f): S(V) -> S(U) for an intertwiner f: U -> V."""
    quiver = u.quiver
    F = quiver.field
    idx = quiver.node_index
    out = []
    for i, node in enumerate(quiver.nodes):
        j = idx[quiver.sigma_n[node]]
        out.append(fx.conj_transpose(F, phis[j]))
    return tuple(out)


def star_hom(u: Rep, phis):
    """f* = S(f) Theta for f: U -> S(U); again a map U -> S(U)."""
    quiver = u.quiver
    F = quiver.field
    idx = quiver.node_index
    out = []
    for i, node in enumerate(quiver.nodes):
        j = idx[quiver.sigma_n[node]]
        m = fx.conj_transpose(F, phis[j])
        out.append(fx.mat_scale(F, F.encode(quiver.s[node]), m))
    return tuple(out)


class SelfDualRep:
    """A representation together with pairing matrices psi.

    psi[i] has shape (dim at sigma(i), dim at i); the pairing of
    v in M_i with w in M_{sigma(i)} is iota(w)^T psi_i v.
    """

    __slots__ = ("rep", "psi")

    def __init__(self, rep: Rep, psi):
        self.rep = rep
        self.psi = {str(k): fx.mat(v) for k, v in psi.items()}

    @property
    def quiver(self):
        return self.rep.quiver

    @property
    def dims(self):
        return self.rep.dims

    def pairing(self, node, v, w):
        """<v, w> for v at node, w at sigma(node)."""
        F = self.quiver.field
        node = str(node)
        col = fx.mat_vec(F, self.psi[node], v)
        total = 0
        for wk, ck in zip(w, col):
            total = F.add(total, F.mul(F.conj(wk), ck))
        return total

    def serialize(self) -> str:
        parts = [self.rep.serialize()]
        for node in self.quiver.nodes:
            m = self.psi[node]
            flat = ",".join(str(x) for row in m for x in row)
            parts.append("psi%s:%s" % (node, flat))
        return ";".join(parts)

    def validate(self):
        """List of invariant violations (empty when valid)."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        bad = []
        d = self.rep.dims
        if d != quiver.sigma_dim(d):
            bad.append("dimension vector is not sigma-symmetric")
            return bad
        for node in quiver.nodes:
            i = idx[node]
            si = idx[quiver.sigma_n[node]]
            m = self.psi.get(node)
            if m is None or fx.shape(m)[0] != d[si] or \
                    (d[si] and fx.shape(m)[1] != d[i]):
                bad.append("psi%s has the wrong shape" % node)
        if bad:
            return bad
        for node in quiver.nodes:
            i = idx[node]
            if d[i] and not fx.det_nonzero(F, self.psi[node]):
                bad.append("psi%s is degenerate" % node)
        for node in quiver.nodes:
            sn = quiver.sigma_n[node]
            want = fx.mat_scale(
                F, F.encode(quiver.s[node]),
                fx.conj_transpose(F, self.psi[node]))
            if self.psi[sn] != want:
                bad.append("symmetry fails at node %s" % node)
        for (a, t, h) in quiver.arrows:
            if d[idx[t]] == 0 or d[idx[h]] == 0:
                continue
            sa = quiver.sigma_a[a]
            lhs = fx.mat_mul(F, self.psi[h], self.rep.maps[a])
            rhs = fx.mat_mul(F, fx.conj_transpose(F, self.rep.maps[sa]),
                             self.psi[t])
            rhs = fx.mat_scale(F, F.encode(quiver.tau[a]), rhs)
            if lhs != rhs:
                bad.append("compatibility fails at arrow %s" % a)
        return bad

    def __repr__(self):
        return "SelfDualRep(%s)" % self.serialize()


def zero_sd(quiver) -> SelfDualRep:
    rep = rp.zero_rep(quiver)
    psi = {node: fx.zeros(0, 0) for node in quiver.nodes}
    return SelfDualRep(rep, psi)


def hyperbolic(u: Rep) -> SelfDualRep:
    """H(U) = U + S(U) with the canonical split pairing.

    At each node the first block of coordinates is U, the second is
    S(U); psi is antidiagonal with identity blocks, the lower one
    scaled by the node sign.
    """
    quiver = u.quiver
    F = quiver.field
    idx = quiver.node_index
    su = dual_rep(u)
    rep = rp.direct_sum(u, su)
    psi = {}
    for node in quiver.nodes:
        i = idx[node]
        si = idx[quiver.sigma_n[node]]
        du, dsu = u.dims[i], u.dims[si]
        # rows: dim at sigma(node) = dsu + du, cols: dim at node = du + dsu
        m = [[0] * (du + dsu) for _ in range(dsu + du)]
        s_enc = F.encode(quiver.s[node])
        for k in range(dsu):
            m[k][du + k] = 1
        for k in range(du):
            m[dsu + k][k] = s_enc
        psi[node] = fx.mat(m)
    return SelfDualRep(rep, psi)


def sd_direct_sum(m: SelfDualRep, n: SelfDualRep) -> SelfDualRep:
    quiver = m.quiver
    idx = quiver.node_index
    rep = rp.direct_sum(m.rep, n.rep)
    psi = {}
    for node in quiver.nodes:
        i = idx[node]
        si = idx[quiver.sigma_n[node]]
        rows = m.rep.dims[si] + n.rep.dims[si]
        cols = m.rep.dims[i] + n.rep.dims[i]
        blk = [[0] * cols for _ in range(rows)]
        for r in range(m.rep.dims[si]):
            for c in range(m.rep.dims[i]):
                blk[r][c] = m.psi[node][r][c]
        for r in range(n.rep.dims[si]):
            for c in range(n.rep.dims[i]):
                blk[m.rep.dims[si] + r][m.rep.dims[i] + c] = \
                    n.psi[node][r][c]
        psi[node] = fx.mat(blk)
    return SelfDualRep(rep, psi)


def transform(sd: SelfDualRep, g) -> SelfDualRep:
    """Base change by g = (g_i): maps conjugated, psi pulled back."""
    quiver = sd.quiver
    F = quiver.field
    idx = quiver.node_index
    ginv = [fx.inverse(F, gi) if sd.dims[i] else gi
            for i, gi in enumerate(g)]
    maps = {}
    for (a, t, h) in quiver.arrows:
        maps[a] = fx.mat_mul(F, fx.mat_mul(F, g[idx[h]],
                                           sd.rep.maps[a]), ginv[idx[t]])
    psi = {}
    for node in quiver.nodes:
        i = idx[node]
        si = idx[quiver.sigma_n[node]]
        mid = fx.mat_mul(F, sd.psi[node], ginv[i])
        psi[node] = fx.mat_mul(F, fx.conj_transpose(F, ginv[si]), mid)
    return SelfDualRep(Rep(quiver, sd.dims, maps), psi)


def is_isometry(m: SelfDualRep, n: SelfDualRep, phis) -> bool:
    """phis: underlying iso m.rep -> n.rep pulling n's form back to m's."""
    quiver = m.quiver
    F = quiver.field
    idx = quiver.node_index
    if not rp.is_isomorphism(m.rep, n.rep, phis):
        return False
    for node in quiver.nodes:
        i = idx[node]
        si = idx[quiver.sigma_n[node]]
        mid = fx.mat_mul(F, n.psi[node], phis[i])
        got = fx.mat_mul(F, fx.conj_transpose(F, phis[si]), mid)
        if got != m.psi[node]:
            return False
    return True


def isometry_test(m: SelfDualRep, n: SelfDualRep,
                  budget=rp.RAW_BUDGET) -> bool:
    if m.dims != n.dims:
        return False
    if m.rep.total_dim == 0:
        return True
    for phis in rp.hom_elements(m.rep, n.rep, budget):
        if is_isometry(m, n, phis):
            return True
    return False


def aut_s_count(m: SelfDualRep, budget=rp.RAW_BUDGET) -> int:
    """|Aut_S(M)| by iterating automorphisms of the underlying rep."""
    if m.rep.total_dim == 0:
        return 1
    count = 0
    for phis in rp.hom_elements(m.rep, m.rep, budget):
        if is_isometry(m, m, phis):
            count += 1
    return count


# -- Witt bookkeeping ----------------------------------------------------------

def eta(F: FF, u: int) -> int:
    return F.quad_character(u)


def witt_zero(F: FF, s: int, iota: bool):
    if iota:
        return ("WU", 0)
    if s == -1:
        return ("W0",)
    if F.q % 4 == 3:
        return ("W4", 0)
    return ("W2", 0, 1)


def witt_add(F: FF, a, b):
    if a[0] != b[0]:
        raise ValueError("incompatible Witt classes")
    if a[0] == "W0":
        return a
    if a[0] == "WU":
        return ("WU", (a[1] + b[1]) % 2)
    if a[0] == "W4":
        return ("W4", (a[1] + b[1]) % 4)
    return ("W2", (a[1] + b[1]) % 2, a[2] * b[2])


def diagonalize_form(F: FF, gram, hermitian=False):
    """Diagonal entries of a (possibly degenerate) s=+1 form.

    Symmetric bilinear when hermitian is False, iota-hermitian when
    True.  Returns the list of nonzero diagonal values after a
    Gram-Schmidt split; zero rows beyond the radical are impossible for
    symmetric forms in odd characteristic.
    """

    def inner(v, w):
        total = 0
        for r, wr in enumerate(w):
            if wr == 0:
                continue
            cw = F.conj(wr) if hermitian else wr
            for c, vc in enumerate(v):
                if vc:
                    total = F.add(total, F.mul(cw, F.mul(gram[r][c], vc)))
        return total

    n = len(gram)
    vecs = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    entries = []
    while vecs:
        pivot = None
        for v in vecs:
            if inner(v, v) != 0:
                pivot = v
                break
        if pivot is None:
            # every basis vector is isotropic; a pair with a nonzero
            # pairing still spans an anisotropic vector v + u w
            for v in vecs:
                for w in vecs:
                    if inner(v, w) == 0:
                        continue
                    for u in F.units():
                        cand = tuple(F.add(a, F.mul(u, b))
                                     for a, b in zip(v, w))
                        if inner(cand, cand) != 0:
                            pivot = cand
                            break
                    if pivot is None:
                        raise AssertionError(
                            "no anisotropic vector on a nonzero plane")
                    break
                if pivot is not None:
                    break
        if pivot is None:
            break
        val = inner(pivot, pivot)
        entries.append(val)
        inv = F.inv(val)
        new_vecs = []
        for v in vecs:
            coef = F.mul(inner(v, pivot), inv)
            w = tuple(F.sub(a, F.mul(coef, b))
                      for a, b in zip(v, pivot))
            if any(x != 0 for x in w):
                new_vecs.append(w)
        # keep an independent set: reduce to row space basis
        if new_vecs:
            R, piv = fx.rref(F, fx.mat(new_vecs))
            new_vecs = [R[k] for k in range(len(piv))]
        vecs = new_vecs
    return entries


def witt_of_entries(F: FF, entries, s: int, iota: bool):
    cls = witt_zero(F, s, iota)
    if s == -1 and not iota:
        return cls
    for val in entries:
        if iota:
            cls = witt_add(F, cls, ("WU", 1))
        elif F.q % 4 == 3:
            cls = witt_add(F, cls, ("W4", 1 if eta(F, val) == 1 else -1))
        else:
            cls = witt_add(F, cls, ("W2", 1, eta(F, val)))
    return cls


def witt_class_at_node(sd: SelfDualRep, node):
    """Witt class of the induced form at a sigma-fixed node."""
    quiver = sd.quiver
    F = quiver.field
    node = str(node)
    if quiver.sigma_n[node] != node:
        raise ValueError("node %s is not sigma-fixed" % node)
    gram = sd.psi[node]
    # gram[r][c] = <e_c, e_r>; symmetric/hermitian per s and iota
    entries = diagonalize_form(F, gram, hermitian=quiver.iota_nontrivial)
    return witt_of_entries(F, entries, quiver.s[node],
                           quiver.iota_nontrivial)


def gw_class(sd: SelfDualRep):
    """(dims, ((node, witt), ...)) over sigma-fixed s=+1 nodes."""
    quiver = sd.quiver
    decs = []
    for node in quiver.nodes:
        if quiver.sigma_n[node] == node and quiver.s[node] == 1:
            decs.append((node, witt_class_at_node(sd, node)))
    return (sd.dims, tuple(decs))


def gw_add(quiver, a, b):
    F = quiver.field
    dims = quiver.add_dim(a[0], b[0])
    decs = []
    for (na, wa), (nb, wb) in zip(a[1], b[1]):
        if na != nb:
            raise ValueError("misaligned decorations")
        decs.append((na, witt_add(F, wa, wb)))
    return (dims, tuple(decs))


# -- standard node forms -------------------------------------------------------

def standard_fixed_form(F: FF, d, s, iota, disc=1):
    """Gram matrix of the standard form in the given Witt class.

    s=+1, iota trivial: identity, or identity with one entry replaced
    by the least non-square when disc = -1.  s=-1: the block
    antidiagonal symplectic form (d even).  iota nontrivial: identity.
    """
    if d == 0:
        return fx.zeros(0, 0)
    if iota or s == 1:
        m = [[0] * d for _ in range(d)]
        for k in range(d):
            m[k][k] = 1
        if not iota and s == 1 and disc == -1:
            m[d - 1][d - 1] = F.least_nonsquare()
        return fx.mat(m)
    if d % 2:
        return None
    half = d // 2
    m = [[0] * d for _ in range(d)]
    for k in range(half):
        m[k][half + k] = 1
        m[half + k][k] = F.encode(-1)
    return fx.mat(m)


def _isotropic_echelon(F, psi, d, s):
    """Yield the RREF bases of the isotropic s-subspaces for the
    pairing (u, v) -> conj(u) psi v^T on F^d.

    The pairing matrix must be nondegenerate and hermitian up to sign,
    so vanishing against the earlier rows is a linear condition on each
    new row and only the row's pairing with itself needs a scan.
    """
    if s == 0:
        yield ()
        return
    if 2 * s > d:
        return
    for pivots in itertools.combinations(range(d), s):
        pivset = set(pivots)
        rows = []
        pair_rows = []

        def rec(i):
            if i == s:
                yield tuple(rows)
                return
            p = pivots[i]
            free = [c for c in range(p + 1, d) if c not in pivset]
            f = len(free)
            if rows:
                A = fx.mat([tuple(L[c] for c in free) for L in pair_rows])
                b = tuple(F.neg(L[p]) for L in pair_rows)
                x0 = fx.solve(F, A, b)
                if x0 is None:
                    return
                kern = fx.kernel_basis(F, A)
            else:
                x0 = (0,) * f
                kern = [tuple(1 if j == t else 0 for j in range(f))
                        for t in range(f)]
            for combo in itertools.product(F.elements(),
                                           repeat=len(kern)):
                x = list(x0)
                for kv, cval in zip(kern, combo):
                    if cval:
                        x = [F.add(xv, F.mul(cval, kx))
                             for xv, kx in zip(x, kv)]
                v = [0] * d
                v[p] = 1
                for c, xv in zip(free, x):
                    v[c] = xv
                pv = fx.mat_vec(F, psi, v)
                diag = 0
                for va, pa in zip(v, pv):
                    diag = F.add(diag, F.mul(F.conj(va), pa))
                if diag != 0:
                    continue
                rows.append(tuple(v))
                pair_rows.append(fx.mat_vec(
                    F, fx.transpose(psi),
                    tuple(F.conj(xv) for xv in v)))
                yield from rec(i + 1)
                rows.pop()
                pair_rows.pop()

        yield from rec(0)


def _kernel_restricted_bases(F, psi_partner, partner_basis, d, s):
    """Yield one basis per s-subspace of the kernel cut out at the
    second node of a swapped pair by the rows already fixed at the
    first, each basis in echelon position globally."""
    if s == 0:
        yield ()
        return
    if not partner_basis:
        yield from fx.echelon_bases(F, d, s)
        return
    M = fx.mat_mul(F, psi_partner,
                   fx.transpose(fx.mat(partner_basis)))
    kern = fx.kernel_basis(F, fx.transpose(M))
    rows = [tuple(F.conj(x) for x in v) for v in kern]
    if not rows:
        return
    R, piv = fx.rref(F, fx.mat(rows))
    W = [R[t] for t in range(len(piv))]
    if s > len(W):
        return
    for coeff in fx.echelon_bases(F, len(W), s):
        basis = []
        for crow in coeff:
            vec = [0] * d
            for t, c in enumerate(crow):
                if c:
                    vec = [F.add(xv, F.mul(c, wx))
                           for xv, wx in zip(vec, W[t])]
            basis.append(tuple(vec))
        yield tuple(basis)


class UnsupportedError(RuntimeError):
    """Raised for inputs outside the supported classification range."""


# orbit walks hold every compatible point in memory, so they are capped
# harder than the raw enumeration budget
SD_POINT_CAP = 250000


# -- classical group orders ----------------------------------------------------

def sp_order(q: int, d: int) -> int:
    if d % 2:
        raise ValueError("symplectic rank must be even")
    m = d // 2
    total = q ** (m * m)
    for i in range(1, m + 1):
        total *= q ** (2 * i) - 1
    return total


def o_order(F: FF, d: int, disc_eta: int) -> int:
    """Order of the orthogonal group of a form with eta(det) = disc_eta."""
    q = F.q
    if d == 0:
        return 1
    if d % 2:
        m = (d - 1) // 2
        total = 2 * q ** (m * m)
        for i in range(1, m + 1):
            total *= q ** (2 * i) - 1
        return total
    m = d // 2
    eps = disc_eta * (F.quad_character(F.encode(-1)) ** m)
    total = 2 * q ** (m * (m - 1)) * (q ** m - eps)
    for i in range(1, m):
        total *= q ** (2 * i) - 1
    return total


def u_order(q: int, d: int) -> int:
    root = 1
    while root * root < q:
        root += 1
    if root * root != q:
        raise ValueError("unitary groups need a square field size")
    total = root ** (d * (d - 1) // 2)
    for i in range(1, d + 1):
        total *= root ** i - (-1) ** i
    return total


# -- prime-field linear algebra for semilinear conditions ----------------------

def _fp_coords(F: FF, x: int):
    if F.e == 2:
        return (x % F.p, x // F.p)
    return (x % F.p,)


def semilinear_kernel(F: FF, nvars: int, cond_fn):
    """Kernel basis of a condition additive over the prime field.

    cond_fn maps an assignment (list of nvars field elements) to a list
    of field elements, and must be additive in the prime-field
    coordinates of the assignment with no constant term.  Returns a
    list of basis assignments; the solution set is the span over the
    prime field.
    """
    Fp = FF(F.p)
    e = F.e
    unit_vals = [F.encode(1), F.encode(0, 1)][:e]
    columns = []
    ncond = None
    for k in range(nvars):
        for uv in unit_vals:
            assign = [0] * nvars
            assign[k] = uv
            vals = cond_fn(assign)
            if ncond is None:
                ncond = len(vals)
            col = []
            for v in vals:
                col.extend(_fp_coords(F, v))
            columns.append(col)
    if nvars == 0 or ncond == 0:
        A = fx.zeros(0, e * nvars)
    else:
        A = fx.mat([tuple(columns[c][r] for c in range(len(columns)))
                    for r in range(e * ncond)])
    kb = fx.kernel_basis(Fp, A)
    basis = []
    for vec in kb:
        assign = []
        for k in range(nvars):
            if e == 2:
                assign.append(F.encode(vec[2 * k], vec[2 * k + 1]))
            else:
                assign.append(F.encode(vec[k]))
        basis.append(tuple(assign))
    return basis


def span_points(F: FF, basis):
    """All prime-field combinations of the basis assignments."""
    p = F.p
    nvars = len(basis[0]) if basis else 0
    scaled = []
    for vec in basis:
        row = []
        for c in range(p):
            ce = F.encode(c)
            row.append(tuple(F.mul(ce, x) for x in vec))
        scaled.append(row)
    for combo in itertools.product(range(p), repeat=len(basis)):
        out = [0] * nvars
        for j, c in enumerate(combo):
            if c:
                vec = scaled[j][c]
                for k in range(nvars):
                    out[k] = F.add(out[k], vec[k])
        yield tuple(out)


# -- isometry-group sites ------------------------------------------------------

def _gl_generators(F: FF, d: int):
    if d == 0:
        return []
    g0 = [[0] * d for _ in range(d)]
    for k in range(d):
        g0[k][k] = 1
    g0[0][0] = F.least_generator()
    gens = [fx.mat(g0)]
    if d > 1:
        t = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
        t[0][1] = 1
        gens.append(fx.mat(t))
        perm = [[0] * d for _ in range(d)]
        for k in range(d):
            perm[(k + 1) % d][k] = 1
        gens.append(fx.mat(perm))
    return gens


def _group_closure(F: FF, gens, budget):
    seen = {fx.identity(len(gens[0]))}
    queue = list(seen)
    while queue:
        g = queue.pop()
        for h in gens:
            gh = fx.mat_mul(F, g, h)
            if gh not in seen:
                if len(seen) >= budget:
                    raise BudgetError("group closure exceeds budget")
                seen.add(gh)
                queue.append(gh)
    return seen


def _reflections(F: FF, psi0, d):
    """All hyperplane reflections of a nondegenerate symmetric form."""
    psit = fx.transpose(psi0)
    two_inv = F.inv(F.encode(2))
    gens = []
    for v in _projective_vectors(F, d):
        row = fx.mat_vec(F, psit, v)          # row[j] = B(e_j, v)
        qv = 0
        for a, b in zip(v, row):
            qv = F.add(qv, F.mul(a, b))
        if qv == 0:
            continue
        scale = F.mul(F.encode(2), F.inv(qv))
        cols = []
        for j in range(d):
            coef = F.mul(scale, row[j])
            col = [F.sub(1 if r == j else 0, F.mul(coef, v[r]))
                   for r in range(d)]
            cols.append(col)
        gens.append(fx.mat([tuple(cols[c][r] for c in range(d))
                            for r in range(d)]))
    return gens


def _symplectic_transvections(F: FF, psi0, d):
    """x -> x + c B(x, v) v for all projective v and units c."""
    psit = fx.transpose(psi0)
    gens = []
    units = [u for u in F.units()]
    for v in _projective_vectors(F, d):
        row = fx.mat_vec(F, psit, v)
        for c in units:
            cols = []
            for j in range(d):
                coef = F.mul(c, row[j])
                col = [F.add(1 if r == j else 0, F.mul(coef, v[r]))
                       for r in range(d)]
                cols.append(col)
            gens.append(fx.mat([tuple(cols[cc][r] for cc in range(d))
                                for r in range(d)]))
    return gens


def _projective_vectors(F: FF, d):
    """One representative per line: first nonzero coordinate is 1."""
    for lead in range(d):
        prefix = (0,) * lead + (1,)
        for tail in itertools.product(F.elements(), repeat=d - lead - 1):
            yield prefix + tail


def _unitary_filter(F: FF, psi0, d, budget):
    """All isometries of a hermitian form, by filtering the full GL."""
    if fx.gl_order(F.q, d) > budget:
        raise BudgetError(
            "unitary node isometries at dimension %d exceed the group "
            "budget" % d)
    group = _group_closure(F, _gl_generators(F, d), budget)
    out = []
    for g in group:
        if fx.mat_mul(F, fx.conj_transpose(F, g),
                      fx.mat_mul(F, psi0, g)) == psi0:
            out.append(g)
    return out



# -- isometry classes ----------------------------------------------------------

class SDClass:
    """One isometry class: representative, canonical key, form data."""

    __slots__ = ("sdrep", "key", "dims", "a_s", "blocks", "label")

    def __init__(self, sdrep, key):
        self.sdrep = sdrep
        self.key = key
        self.dims = sdrep.dims
        self.a_s = None
        self.blocks = None       # tuple of block descriptors when known
        self.label = None

    def __repr__(self):
        return "SDClass(%s)" % (self.key,)


class SDTable:
    """Registry of self-dual isometry classes per dimension vector.

    Within budget, classes come from a breadth-first orbit walk of
    compatible structure maps under the isometry group of a standard
    node form, and the class key is the orbit-minimal serialization.
    Beyond budget, classes are assembled from decorated indecomposable
    blocks and keyed by the block multiset.
    """

    def __init__(self, table):
        self.table = table
        self.quiver = table.quiver
        self._classes = {}
        self._by_key = {}
        self._point_class = {}
        self._eps_cache = {}
        self._dual_key_cache = {}

    # ---- public registry

    def classes(self, dims):
        dims = tuple(int(x) for x in dims)
        if dims in self._classes:
            return self._classes[dims]
        quiver = self.quiver
        if dims != quiver.sigma_dim(dims):
            self._classes[dims] = []
            return []
        if sum(dims) == 0:
            sd = zero_sd(quiver)
            cls = SDClass(sd, sd.serialize())
            cls.a_s = 1
            cls.blocks = ()
            self._classes[dims] = [cls]
            self._by_key[cls.key] = cls
            return self._classes[dims]
        try:
            out = self._build_bfs(dims)
        except BudgetError:
            out = self._build_decorated(dims)
        out.sort(key=lambda c: c.key)
        self._classes[dims] = out
        for cls in out:
            self._by_key[cls.key] = cls
        return out

    def classes_leq(self, bound):
        bound = tuple(int(x) for x in bound)
        out = []
        for dims in itertools.product(*[range(b + 1) for b in bound]):
            out.extend(self.classes(dims))
        return out

    def by_key(self, key):
        return self._by_key[key]

    def zero_class(self):
        return self.classes(self.quiver.zero_dim())[0]

    def classify(self, sd: SelfDualRep) -> SDClass:
        dims = sd.dims
        self.classes(dims)
        if sum(dims) == 0:
            return self.zero_class()
        if dims in self._point_class:
            std = self._standardize(sd)
            tag = tuple(std.psi[node] for node in self.quiver.nodes)
            return self._point_class[dims][(tag, std.rep.map_point())]
        return self._classify_decorated(sd)

    # ---- node-form sites

    def _node_kind(self, node):
        quiver = self.quiver
        if quiver.iota_nontrivial:
            return "unit"
        return "orth" if quiver.s[node] == 1 else "sympl"

    def _form_variants(self, dims):
        """(psi0 dict, isometry order, generators) per node-form class.

        Raises BudgetError when a needed generator set is unavailable;
        returns [] when no form exists at these dims.
        """
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        fixed, plus = quiver.node_partition()
        disc_nodes = [n for n in fixed
                      if self._node_kind(n) == "orth" and dims[idx[n]] > 0]
        for n in fixed:
            if self._node_kind(n) == "sympl" and dims[idx[n]] % 2:
                return []
        variants = []
        for discs in itertools.product((1, -1), repeat=len(disc_nodes)):
            disc_of = dict(zip(disc_nodes, discs))
            psi0 = {}
            order = 1
            gens = []
            for n in plus:
                d = dims[idx[n]]
                sn = quiver.sigma_n[n]
                psi0[n] = fx.identity(d)
                psi0[sn] = fx.mat_scale(F, F.encode(quiver.s[n]),
                                        fx.identity(d))
                order *= fx.gl_order(F.q, d)
                for g in _gl_generators(F, d):
                    ginv = fx.inverse(F, g)
                    full = [fx.identity(dims[k]) for k in range(quiver.n)]
                    full[idx[n]] = g
                    full[idx[sn]] = fx.conj_transpose(F, ginv)
                    gens.append(tuple(full))
            for n in fixed:
                d = dims[idx[n]]
                kind = self._node_kind(n)
                if kind == "orth":
                    psi0[n] = standard_fixed_form(
                        F, d, 1, False, disc_of.get(n, 1))
                    order *= o_order(F, d, disc_of.get(n, 1))
                    site_gens = _reflections(F, psi0[n], d) if d else []
                elif kind == "sympl":
                    psi0[n] = standard_fixed_form(F, d, -1, False)
                    order *= sp_order(F.q, d)
                    site_gens = _symplectic_transvections(F, psi0[n], d) \
                        if d else []
                else:
                    psi0[n] = standard_fixed_form(F, d, 1, True)
                    order *= u_order(F.q, d)
                    site_gens = _unitary_filter(
                        F, psi0[n], d, self.table.group_budget) if d else []
                for g in site_gens:
                    full = [fx.identity(dims[k]) for k in range(quiver.n)]
                    full[idx[n]] = g
                    gens.append(tuple(full))
            variants.append((psi0, order, gens))
        return variants

    # ---- compatible structure maps

    def _arrow_split(self):
        quiver = self.quiver
        fixed, plus = quiver.arrow_partition()
        return fixed, plus

    def _partner_map(self, psi0, arrow, m):
        """The sigma-partner map determined by compatibility."""
        quiver = self.quiver
        F = quiver.field
        name, t, h = arrow
        rows_out = fx.shape(psi0[t])[0]
        cols_out = fx.shape(psi0[h])[0]
        if rows_out == 0 or cols_out == 0:
            return fx.zeros(rows_out, cols_out)
        tau_inv = F.inv(F.encode(quiver.tau[name]))
        pt_inv = fx.inverse(F, psi0[t])
        x = fx.mat_scale(F, tau_inv,
                         fx.mat_mul(F, psi0[h], fx.mat_mul(F, m, pt_inv)))
        return fx.conj_transpose(F, x)

    def _fixed_arrow_kernel(self, psi0, arrow, dims):
        """Basis of self-compatible maps on a sigma-fixed arrow."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        name, t, h = arrow
        dt, dh = dims[idx[t]], dims[idx[h]]
        if dt == 0 or dh == 0:
            return [], (dh, dt)
        tau = F.encode(quiver.tau[name])
        ph, pt = psi0[h], psi0[t]

        def cond(assign):
            m = fx.mat([tuple(assign[r * dt + c] for c in range(dt))
                        for r in range(dh)])
            lhs = fx.mat_mul(F, ph, m)
            rhs = fx.mat_scale(F, tau, fx.mat_mul(
                F, fx.conj_transpose(F, m), pt))
            diff = fx.mat_sub(F, lhs, rhs)
            return [x for row in diff for x in row]

        basis = semilinear_kernel(F, dh * dt, cond)
        return basis, (dh, dt)

    def _point_iter(self, dims, psi0):
        """(count, iterator of maps dicts) of compatible points."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        fixed_arrows, plus_arrows = self._arrow_split()
        arrow_of = {a: (a, t, h) for (a, t, h) in quiver.arrows}
        free_cells = []
        for a in plus_arrows:
            (_, t, h) = arrow_of[a]
            free_cells.append((a, dims[idx[h]], dims[idx[t]]))
        fixed_data = []
        count = 1
        for a in fixed_arrows:
            basis, shp = self._fixed_arrow_kernel(psi0, arrow_of[a], dims)
            fixed_data.append((a, basis, shp))
            count *= F.p ** len(basis)
        for (_, r, c) in free_cells:
            count *= F.q ** (r * c)

        def gen():
            free_spaces = []
            for (a, r, c) in free_cells:
                free_spaces.append([
                    fx.mat([tuple(vals[i * c + j] for j in range(c))
                            for i in range(r)])
                    for vals in itertools.product(F.elements(),
                                                  repeat=r * c)])
            fixed_spaces = []
            for (a, basis, (r, c)) in fixed_data:
                mats = []
                for vals in span_points(F, basis) if basis else [()]:
                    if basis:
                        mats.append(fx.mat(
                            [tuple(vals[i * c + j] for j in range(c))
                             for i in range(r)]))
                    else:
                        mats.append(fx.zeros(r, c))
                fixed_spaces.append((a, mats))
            free_names = [a for (a, _, _) in free_cells]
            for free_choice in itertools.product(*free_spaces):
                base = {}
                for a, m in zip(free_names, free_choice):
                    base[a] = m
                    sa = quiver.sigma_a[a]
                    base[sa] = self._partner_map(psi0, arrow_of[a], m)
                for fixed_choice in itertools.product(
                        *[mats for (_, mats) in fixed_spaces]):
                    maps = dict(base)
                    for (a, _), m in zip(fixed_spaces, fixed_choice):
                        maps[a] = m
                    yield maps

        return count, gen

    # ---- breadth-first enumeration

    def _build_bfs(self, dims):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        variants = self._form_variants(dims)
        prepared = []
        for (psi0, order, gens) in variants:
            count, gen = self._point_iter(dims, psi0)
            work = count * max(1, len(gens))
            if count > min(self.table.raw_budget, SD_POINT_CAP) or \
                    work > 4 * self.table.raw_budget:
                raise BudgetError(
                    "self-dual enumeration at %r exceeds the raw budget"
                    % (dims,))
            prepared.append((psi0, order, gens, gen))
        classes = []
        point_class = {}
        for (psi0, order, gens, gen) in prepared:
            tag = tuple(psi0[node] for node in quiver.nodes)
            gen_pairs = []
            for g in gens:
                ginv = tuple(fx.inverse(F, gi) if fx.shape(gi)[0] else gi
                             for gi in g)
                gen_pairs.append((g, ginv))
            pending = {}
            for maps in gen():
                r = Rep(quiver, dims, maps)
                pending[r.map_point()] = r
            while pending:
                start_key = next(iter(pending))
                start = pending[start_key]
                orbit = {start_key}
                queue = [start]
                best_key, best = start_key, start
                while queue:
                    r = queue.pop()
                    for (g, ginv) in gen_pairs:
                        maps2 = {}
                        for (a, t, h) in quiver.arrows:
                            maps2[a] = fx.mat_mul(
                                F, g[idx[h]],
                                fx.mat_mul(F, r.maps[a], ginv[idx[t]]))
                        r2 = Rep(quiver, dims, maps2)
                        k2 = r2.map_point()
                        if k2 not in orbit:
                            if k2 not in pending:
                                raise AssertionError(
                                    "isometry left the compatible set")
                            orbit.add(k2)
                            queue.append(r2)
                            if k2 < best_key:
                                best_key, best = k2, r2
                for k in orbit:
                    del pending[k]
                if order % len(orbit):
                    raise AssertionError("orbit size does not divide the "
                                         "isometry group order")
                sd = SelfDualRep(best, psi0)
                cls = SDClass(sd, sd.serialize())
                cls.a_s = order // len(orbit)
                classes.append(cls)
                for k in orbit:
                    point_class[(tag, k)] = cls
        self._point_class[dims] = point_class
        return classes

    # ---- decorated block data

    def _dual_key(self, cls):
        if cls.key in self._dual_key_cache:
            return self._dual_key_cache[cls.key]
        out = self.table.classify(dual_rep(cls.rep)).key
        self._dual_key_cache[cls.key] = out
        return out

    def _eps_data(self, cls):
        """(sign, normalized generator) for a duality-fixed indec class."""
        if cls.key in self._eps_cache:
            return self._eps_cache[cls.key]
        quiver = self.quiver
        F = quiver.field
        irep = cls.rep
        hb = rp.hom_space(irep, dual_rep(irep))
        if len(hb) != 1:
            raise BudgetError(
                "block decoration needs a one-dimensional dual hom space "
                "(class %r has %d)" % (cls.key, len(hb)))
        h = hb[0]
        hstar = star_hom(irep, h)
        c = _hom_ratio(F, h, hstar)
        if not quiver.iota_nontrivial:
            if c == F.encode(1):
                data = (1, h)
            elif c == F.neg(F.encode(1)):
                data = (-1, None)
            else:
                raise AssertionError("dual generator ratio must be a sign")
        else:
            mu = None
            for u in F.units():
                if F.mul(u, F.inv(F.conj(u))) == c:
                    mu = u
                    break
            if mu is None:
                raise AssertionError("norm-one ratio without a lift")
            hn = tuple(fx.mat_scale(F, mu, hi) for hi in h)
            if star_hom(irep, hn) != hn:
                raise AssertionError("normalized generator is not fixed")
            data = (1, hn)
        self._eps_cache[cls.key] = data
        return data

    def _r_block(self, cls, mult, disc):
        """I^mult with the form B (x) h, B of the requested class."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        eps, h = self._eps_data(cls)
        if eps != 1:
            raise ValueError("class %r carries no form" % cls.key)
        urep = rp.direct_sum_list(quiver, [cls.rep] * mult)
        b = [[0] * mult for _ in range(mult)]
        for k in range(mult):
            b[k][k] = 1
        if disc == -1 and not quiver.iota_nontrivial:
            b[mult - 1][mult - 1] = F.least_nonsquare()
        b = fx.mat(b)
        psi = {}
        for node in quiver.nodes:
            psi[node] = _kron(F, b, h[idx[node]])
        return SelfDualRep(urep, psi)

    def _block_parts(self, desc):
        """(sd part, piece records) for one block descriptor.

        Piece records are (rep, class key, per-node offsets) relative to
        the part, one per underlying isotypic chunk.
        """
        quiver = self.quiver
        kind = desc[0]
        if kind == "H":
            _, k1, k2, m = desc
            c1 = self.table.class_by_key(k1)
            u = rp.direct_sum_list(quiver, [c1.rep] * m)
            sd = hyperbolic(u)
            su = dual_rep(u)
            pieces = [(u, k1, tuple([0] * quiver.n)), (su, k2, u.dims)]
        elif kind == "Hf":
            _, k, half = desc
            c1 = self.table.class_by_key(k)
            u = rp.direct_sum_list(quiver, [c1.rep] * half)
            sd = hyperbolic(u)
            pieces = [(sd.rep, k, tuple([0] * quiver.n))]
        elif kind == "R":
            _, k, m, disc = desc
            sd = self._r_block(self.table.class_by_key(k), m, disc)
            pieces = [(sd.rep, k, tuple([0] * quiver.n))]
        else:
            _, k, m = desc
            sd = self._r_block(self.table.class_by_key(k), m, 1)
            pieces = [(sd.rep, k, tuple([0] * quiver.n))]
        return sd, pieces

    def _assemble_blocks(self, blocks):
        quiver = self.quiver
        total = None
        pieces = []
        base = [0] * quiver.n
        for desc in blocks:
            sd, part_pieces = self._block_parts(desc)
            for (prep, key, rel) in part_pieces:
                pieces.append((prep, key,
                               tuple(base[i] + rel[i]
                                     for i in range(quiver.n))))
            total = sd if total is None else sd_direct_sum(total, sd)
            for i in range(quiver.n):
                base[i] += sd.dims[i]
        if total is None:
            total = zero_sd(quiver)
        return total, pieces

    def _block_reductive_order(self, desc):
        F = self.quiver.field
        kind = desc[0]
        if kind == "H":
            return fx.gl_order(F.q, desc[3])
        if kind == "Hf":
            return sp_order(F.q, 2 * desc[2])
        if kind == "R":
            return o_order(F, desc[2], desc[3])
        return u_order(F.q, desc[2])

    def _radical_minus_order(self, sd, pieces):
        """|{x in rad End : x* = -x}| for a block-assembled rep."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        dims = sd.dims
        emb = []
        for (r1, k1, off1) in pieces:
            for (r2, k2, off2) in pieces:
                if k1 == k2:
                    continue
                for phi in rp.hom_space(r1, r2):
                    x = []
                    for i in range(quiver.n):
                        m = [[0] * dims[i] for _ in range(dims[i])]
                        block = phi[i]
                        for r in range(r2.dims[i]):
                            for c in range(r1.dims[i]):
                                m[off2[i] + r][off1[i] + c] = block[r][c]
                        x.append(fx.mat(m))
                    emb.append(tuple(x))
        if not emb:
            return 1
        psi_inv = {}
        for node in quiver.nodes:
            i = idx[node]
            psi_inv[node] = fx.inverse(F, sd.psi[node]) if dims[i] \
                else sd.psi[node]

        def star(x):
            out = []
            for node in quiver.nodes:
                i = idx[node]
                si = idx[quiver.sigma_n[node]]
                m = fx.mat_mul(F, psi_inv[node], fx.mat_mul(
                    F, fx.conj_transpose(F, x[si]), sd.psi[node]))
                out.append(m)
            return tuple(out)

        def cond(assign):
            x = None
            for coef, e in zip(assign, emb):
                if coef == 0:
                    continue
                term = tuple(fx.mat_scale(F, coef, ei) for ei in e)
                x = term if x is None else tuple(
                    fx.mat_add(F, a, b) for a, b in zip(x, term))
            if x is None:
                x = tuple(fx.zeros(dims[i], dims[i])
                          for i in range(quiver.n))
            xs = star(x)
            out = []
            for a, b in zip(x, xs):
                s = fx.mat_add(F, a, b)
                out.extend([v for row in s for v in row])
            return out

        kb = semilinear_kernel(F, len(emb), cond)
        return F.p ** len(kb)

    def _decorated_key(self, blocks):
        return "sd{" + ",".join(_block_name(d) for d in blocks) + "}"

    def _block_types(self, bound):
        """Available block item descriptions within the bound."""
        quiver = self.quiver
        items = []
        skip = set()
        for cls in self.table.classes_leq(bound):
            if not cls.indec or cls.key in skip:
                continue
            ks = self._dual_key(cls)
            if ks != cls.key:
                kmin, kmax = min(cls.key, ks), max(cls.key, ks)
                skip.add(kmax)
                if kmin != cls.key:
                    cls = self.table.class_by_key(kmin)
                unit = quiver.add_dim(cls.dims, quiver.sigma_dim(cls.dims))
                if all(u <= b for u, b in zip(unit, bound)):
                    items.append(("H", kmin, kmax, unit))
            else:
                eps, _ = self._eps_data(cls)
                if eps == -1:
                    unit = quiver.add_dim(cls.dims, cls.dims)
                    if all(u <= b for u, b in zip(unit, bound)):
                        items.append(("Hf", cls.key, unit))
                else:
                    items.append(("R", cls.key, cls.dims))
        items.sort(key=lambda it: (it[0], it[1]))
        return items

    def _build_decorated(self, dims):
        quiver = self.quiver
        items = self._block_types(dims)
        found = []

        def rec(i, residual, acc):
            if i == len(items):
                if all(x == 0 for x in residual):
                    found.append(tuple(sorted(acc, key=_block_name)))
                return
            kind = items[i][0]
            unit = items[i][-1]
            m = 0
            while True:
                if m > 0:
                    if any(u > r for u, r in zip(unit, residual)):
                        break
                    residual = tuple(r - u for r, u in zip(residual, unit))
                if m == 0:
                    rec(i + 1, residual, acc)
                elif kind == "H":
                    acc.append(("H", items[i][1], items[i][2], m))
                    rec(i + 1, residual, acc)
                    acc.pop()
                elif kind == "Hf":
                    acc.append(("Hf", items[i][1], m))
                    rec(i + 1, residual, acc)
                    acc.pop()
                else:
                    if quiver.iota_nontrivial:
                        acc.append(("RU", items[i][1], m))
                        rec(i + 1, residual, acc)
                        acc.pop()
                    else:
                        for disc in (1, -1):
                            acc.append(("R", items[i][1], m, disc))
                            rec(i + 1, residual, acc)
                            acc.pop()
                m += 1
                if all(u == 0 for u in unit):
                    break

        rec(0, dims, [])
        out = []
        for blocks in found:
            sd, pieces = self._assemble_blocks(blocks)
            cls = SDClass(sd, self._decorated_key(blocks))
            cls.blocks = blocks
            reductive = 1
            for desc in blocks:
                reductive *= self._block_reductive_order(desc)
            cls.a_s = reductive * self._radical_minus_order(sd, pieces)
            out.append(cls)
        return out

    def _isotypic_gram(self, sd, cls, h):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        fs = rp.hom_space(cls.rep, sd.rep)
        gram = []
        for fa in fs:
            row = []
            for fb in fs:
                comp = []
                for node in quiver.nodes:
                    i = idx[node]
                    si = idx[quiver.sigma_n[node]]
                    m = fx.mat_mul(F, fx.conj_transpose(F, fa[si]),
                                   fx.mat_mul(F, sd.psi[node], fb[i]))
                    comp.append(m)
                row.append(_hom_ratio(F, h, tuple(comp)))
            gram.append(tuple(row))
        gram = fx.mat(gram)
        for a in range(len(fs)):
            for b in range(len(fs)):
                want = F.conj(gram[a][b]) if quiver.iota_nontrivial \
                    else gram[a][b]
                if gram[b][a] != want:
                    raise AssertionError("isotypic pairing asymmetry")
        return gram

    def _classify_decorated(self, sd):
        quiver = self.quiver
        F = quiver.field
        ucls = self.table.classify(sd.rep)
        summ = dict(ucls.summands or ())
        blocks = []
        seen = set()
        for k in sorted(summ):
            if k in seen:
                continue
            m = summ[k]
            cls = self.table.class_by_key(k)
            ks = self._dual_key(cls)
            if ks != k:
                if summ.get(ks) != m:
                    raise ValueError("underlying rep is not self-dual")
                seen.add(k)
                seen.add(ks)
                blocks.append(("H", min(k, ks), max(k, ks), m))
                continue
            seen.add(k)
            eps, h = self._eps_data(cls)
            if eps == -1:
                if m % 2:
                    raise ValueError("odd multiplicity at a formless class")
                blocks.append(("Hf", k, m // 2))
                continue
            gram = self._isotypic_gram(sd, cls, h)
            entries = diagonalize_form(
                F, gram, hermitian=quiver.iota_nontrivial)
            if len(entries) != m:
                raise AssertionError("decoration rank mismatch")
            if quiver.iota_nontrivial:
                blocks.append(("RU", k, m))
            else:
                disc = 1
                for v in entries:
                    disc *= F.quad_character(v)
                blocks.append(("R", k, m, disc))
        key = self._decorated_key(sorted(blocks, key=_block_name))
        return self._by_key[key]

    # ---- standardizing a form to the reference node form

    def _standardize(self, sd):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        fixed, plus = quiver.node_partition()
        t_cols = [None] * quiver.n
        for n in plus:
            i, si = idx[n], idx[quiver.sigma_n[n]]
            d = sd.dims[i]
            t_cols[i] = fx.identity(d)
            t_cols[si] = fx.conj_transpose(F, fx.inverse(F, sd.psi[n])) \
                if d else fx.zeros(0, 0)
        for n in fixed:
            i = idx[n]
            d = sd.dims[i]
            if d == 0:
                t_cols[i] = fx.zeros(0, 0)
                continue
            kind = self._node_kind(n)
            if kind == "orth":
                t_cols[i] = _orth_basis(F, sd.psi[n], d)
            elif kind == "sympl":
                t_cols[i] = _sympl_basis(F, sd.psi[n], d)
            else:
                t_cols[i] = _herm_basis(F, sd.psi[n], d)
        g = tuple(fx.inverse(F, t) if fx.shape(t)[0] else t
                  for t in t_cols)
        return transform(sd, g)

    # ---- subobjects, reduction, structure counts

    def isotropic_subs(self, sd, sub_dims):
        """Echelon bases of the isotropic subrepresentations with the
        given dimension vector, one basis tuple per subobject.

        Subspaces are generated isotropy-first: at a node fixed by the
        involution the echelon rows are grown one at a time against the
        pairing, at a swapped pair the second node is confined to the
        kernel cut out by the first.  Arrow invariance is checked last.
        """
        out = []
        for bases in self._isotropic_tuples(sd, sub_dims):
            if self._arrows_invariant(sd, bases):
                out.append(bases)
        return out

    def isotropic_subs_scan(self, sd, sub_dims):
        """Reference enumeration: filter every invariant subspace."""
        out = []
        for bases in rp.invariant_subspaces(sd.rep, sub_dims):
            if self._is_isotropic(sd, bases):
                out.append(bases)
        return out

    def _isotropic_tuples(self, sd, sub_dims):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        n = quiver.n
        plan = []
        for node in quiver.nodes:
            i = idx[node]
            si = idx[quiver.sigma_n[node]]
            if si == i:
                plan.append(("fixed", node, i))
            elif i < si:
                plan.append(("free", node, i))
            else:
                plan.append(("kernel", node, i))
        chosen = [None] * n

        def rec(k):
            if k == n:
                yield tuple(chosen)
                return
            kind, node, i = plan[k]
            d = sd.dims[i]
            s = sub_dims[i]
            if s > d:
                return
            if kind == "fixed":
                gen = _isotropic_echelon(F, sd.psi[node], d, s)
            elif kind == "free":
                gen = fx.echelon_bases(F, d, s)
            else:
                partner = quiver.sigma_n[node]
                gen = _kernel_restricted_bases(
                    F, sd.psi[partner], chosen[idx[partner]], d, s)
            for basis in gen:
                chosen[i] = tuple(tuple(r) for r in basis)
                yield from rec(k + 1)
            chosen[i] = None

        yield from rec(0)

    def _arrows_invariant(self, sd, bases):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        for (a, t, h) in quiver.arrows:
            tgt = bases[idx[h]]
            for vec in bases[idx[t]]:
                img = fx.mat_vec(F, sd.rep.maps[a], vec)
                if all(x == 0 for x in img):
                    continue
                if not tgt:
                    return False
                aug = tuple(list(tgt) + [tuple(img)])
                if fx.rank(F, aug) != len(tgt):
                    return False
        return True

    def _is_isotropic(self, sd, bases):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        for node in quiver.nodes:
            i = idx[node]
            si = idx[quiver.sigma_n[node]]
            if not bases[i] or not bases[si]:
                continue
            bs = fx.mat([tuple(F.conj(x) for x in row)
                         for row in bases[si]])
            prod = fx.mat_mul(F, bs, fx.mat_mul(
                F, sd.psi[node], fx.transpose(fx.mat(bases[i]))))
            if any(x != 0 for row in prod for x in row):
                return False
        return True

    def reduce(self, sd, bases):
        """U-perp over U with the induced maps and pairing."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        perp = []
        comp = []
        for node in quiver.nodes:
            i = idx[node]
            si = idx[quiver.sigma_n[node]]
            if sd.dims[i] == 0:
                perp.append([])
                comp.append([])
                continue
            rows = []
            for w in bases[si]:
                cw = tuple(F.conj(x) for x in w)
                rows.append(fx.mat_vec(F, fx.transpose(sd.psi[node]), cw))
            if rows:
                kb = fx.kernel_basis(F, fx.mat(rows))
            else:
                kb = [tuple(1 if j == k else 0 for j in range(sd.dims[i]))
                      for k in range(sd.dims[i])]
            perp.append(kb)
            ech = _Echelon(F)
            for row in bases[i]:
                ech.add(row)
            chosen = []
            for v in kb:
                w = ech.add(v)
                if w is not None:
                    chosen.append(w)
            comp.append(chosen)
        new_dims = tuple(len(c) for c in comp)
        maps = {}
        for (a, t, h) in quiver.arrows:
            ti, hi = idx[t], idx[h]
            span = [list(r) for r in bases[hi]] + [list(r) for r in comp[hi]]
            cols = []
            for v in comp[ti]:
                img = fx.mat_vec(F, sd.rep.maps[a], v)
                coeffs = _express(F, span, img)
                cols.append(coeffs[len(bases[hi]):])
            m = fx.mat([tuple(cols[c][r] for c in range(len(cols)))
                        for r in range(new_dims[hi])]) if cols else \
                fx.zeros(new_dims[hi], 0)
            maps[a] = m
        psi = {}
        for node in quiver.nodes:
            i = idx[node]
            si = idx[quiver.sigma_n[node]]
            m = [[0] * new_dims[i] for _ in range(new_dims[si])]
            for r, w in enumerate(comp[si]):
                cw = tuple(F.conj(x) for x in w)
                row = fx.mat_vec(F, fx.transpose(sd.psi[node]), cw)
                for c, v in enumerate(comp[i]):
                    total = 0
                    for x, y in zip(row, v):
                        total = F.add(total, F.mul(x, y))
                    m[r][c] = total
            psi[node] = fx.mat(m)
        return SelfDualRep(Rep(quiver, new_dims, maps), psi)

    def sd_hall_number(self, ucls, mcls, ncls) -> int:
        """Number of isotropic subobjects of class U reducing to M."""
        count = 0
        nrep = ncls.sdrep
        for bases in self.isotropic_subs(nrep, ucls.dims):
            sub, _ = rp.sub_quotient(nrep.rep, bases)
            if self.table.classify(sub).key != ucls.key:
                continue
            red = self.reduce(nrep, bases)
            if self.classify(red).key == mcls.key:
                count += 1
        return count

    def selfdual_structures(self, urep: Rep):
        """All self-dual structures on a fixed rep, up to its isometries."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        dims = urep.dims
        if dims != quiver.sigma_dim(dims):
            return []
        if sum(dims) == 0:
            return [zero_sd(quiver)]
        fixed, plus = quiver.node_partition()
        layout = []
        nvars = 0
        for n in plus + fixed:
            i, si = idx[n], idx[quiver.sigma_n[n]]
            r, c = dims[si], dims[i]
            layout.append((n, r, c, nvars))
            nvars += r * c

        def build_psi(assign):
            psi = {}
            for (n, r, c, off) in layout:
                psi[n] = fx.mat([tuple(assign[off + rr * c + cc]
                                       for cc in range(c))
                                 for rr in range(r)])
            for n in plus:
                sn = quiver.sigma_n[n]
                psi[sn] = fx.mat_scale(
                    F, F.encode(quiver.s[n]),
                    fx.conj_transpose(F, psi[n]))
            return psi

        def cond(assign):
            psi = build_psi(assign)
            out = []
            for n in fixed:
                want = fx.mat_scale(F, F.encode(quiver.s[n]),
                                    fx.conj_transpose(F, psi[n]))
                diff = fx.mat_sub(F, psi[n], want)
                out.extend([x for row in diff for x in row])
            for (a, t, h) in quiver.arrows:
                sa = quiver.sigma_a[a]
                lhs = fx.mat_mul(F, psi[h], urep.maps[a])
                rhs = fx.mat_scale(F, F.encode(quiver.tau[a]), fx.mat_mul(
                    F, fx.conj_transpose(F, urep.maps[sa]), psi[t]))
                diff = fx.mat_sub(F, lhs, rhs)
                out.extend([x for row in diff for x in row])
            return out

        kb = semilinear_kernel(F, nvars, cond)
        if not kb:
            return []
        if F.p ** len(kb) > self.table.raw_budget:
            raise BudgetError("structure space is too large to scan")
        sols = {}
        for assign in span_points(F, kb):
            psi = build_psi(assign)
            if all(not dims[idx[n]] or fx.det_nonzero(F, psi[n])
                   for n in quiver.nodes):
                tag = tuple(psi[node] for node in quiver.nodes)
                sols[tag] = psi
        auts = [phis for phis in rp.hom_elements(urep, urep,
                                                 self.table.raw_budget)
                if rp.is_isomorphism(urep, urep, phis)]
        out = []
        while sols:
            tag = next(iter(sols))
            psi = sols.pop(tag)
            out.append(SelfDualRep(urep, psi))
            for g in auts:
                moved = {}
                for node in quiver.nodes:
                    i = idx[node]
                    si = idx[quiver.sigma_n[node]]
                    moved[node] = fx.mat_mul(
                        F, fx.conj_transpose(F, g[si]),
                        fx.mat_mul(F, psi[node], g[i]))
                mtag = tuple(moved[node] for node in quiver.nodes)
                sols.pop(mtag, None)
        return out

    # ---- indecomposable blocks and labels

    def finite_type(self) -> bool:
        """Positive definiteness of the symmetrized adjacency form."""
        quiver = self.quiver
        n = quiver.n
        idx = quiver.node_index
        C = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            C[i][i] = Fraction(2)
        for (a, t, h) in quiver.arrows:
            ti, hi = idx[t], idx[h]
            C[ti][hi] -= 1
            C[hi][ti] -= 1
        for k in range(1, n + 1):
            minor = [row[:k] for row in C[:k]]
            if _det_fraction(minor) <= 0:
                return False
        return True

    def sd_indecomposables(self, bound, labels=True):
        """Self-dual indecomposables with dims below the bound.

        Returns a list of SDClass objects with their labels attached.
        Hyperbolic blocks are labeled H(dims of the source indec before
        doubling); formed blocks R(support)^c, where c is the square
        class of the composite pairing at the first support node when
        the support is a one-dimensional chain, and the form's
        discriminant tag otherwise.
        """
        quiver = self.quiver
        if labels and not self.finite_type():
            raise UnsupportedError(
                "indecomposable labels are only assigned over a "
                "finite-type underlying quiver")
        out = []
        for cls in self.table.classes_leq(bound):
            if not cls.indec:
                continue
            ks = self._dual_key(cls)
            if ks != cls.key:
                if ks < cls.key:
                    continue
                hd = quiver.add_dim(cls.dims, quiver.sigma_dim(cls.dims))
                if any(u > b for u, b in zip(hd, bound)):
                    continue
                sd = hyperbolic(cls.rep)
                scls = self.classify(sd)
                scls.label = "H(%s)" % ",".join(str(x) for x in cls.dims)
                out.append(scls)
                continue
            eps, _ = self._eps_data(cls)
            if eps == -1:
                hd = quiver.add_dim(cls.dims, cls.dims)
                if any(u > b for u, b in zip(hd, bound)):
                    continue
                sd = hyperbolic(cls.rep)
                scls = self.classify(sd)
                scls.label = "H(%s)" % ",".join(str(x) for x in cls.dims)
                out.append(scls)
                continue
            discs = (1,) if quiver.iota_nontrivial else (1, -1)
            for disc in discs:
                sd = self._r_block(cls, 1, disc)
                scls = self.classify(sd)
                scls.label = self._r_label(cls, sd, disc)
                out.append(scls)
        out.sort(key=lambda c: (sum(c.dims), c.dims, c.label))
        names = {}
        for c in out:
            names.setdefault(c.label, []).append(c)
        for label, group in names.items():
            if len(group) > 1:
                for j, c in enumerate(group):
                    c.label = "%s#%d" % (label, j + 1)
        return out

    def _r_label(self, cls, sd, disc):
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        support = [n for n in quiver.nodes if cls.dims[idx[n]] > 0]
        name = ",".join(str(x) for x in cls.dims)
        if quiver.iota_nontrivial:
            return "R(%s)" % name
        sign = self._composite_sign(sd, support)
        if sign is None:
            return "R(%s)@%+d" % (name, disc)
        return "R(%s)^%+d" % (name, sign)

    def _composite_sign(self, sd, support):
        """Square class of the composite pairing along a support chain."""
        quiver = self.quiver
        F = quiver.field
        idx = quiver.node_index
        if any(sd.dims[idx[n]] != 1 for n in support):
            return None
        first = support[0]
        if quiver.sigma_n[first] != support[-1]:
            return None
        by_ends = {}
        for (a, t, h) in quiver.arrows:
            by_ends.setdefault(frozenset((t, h)), []).append((a, t, h))
        comp = F.encode(1)
        for k in range(len(support) - 1):
            x, y = support[k], support[k + 1]
            cand = by_ends.get(frozenset((x, y)), [])
            if len(cand) != 1:
                return None
            (a, t, h) = cand[0]
            val = sd.rep.maps[a][0][0]
            if val == 0:
                return None
            comp = F.mul(comp, val if t == x else F.inv(val))
        val = F.mul(F.conj(comp), sd.psi[first][0][0])
        return F.quad_character(val)


def _hom_ratio(F, h, comp):
    """The scalar c with comp = c h, for h nonzero."""
    c = None
    for hi, ci in zip(h, comp):
        for hr, cr in zip(hi, ci):
            for hv, cv in zip(hr, cr):
                if hv != 0:
                    c = F.mul(cv, F.inv(hv))
                    break
            if c is not None:
                break
        if c is not None:
            break
    if c is None:
        raise ValueError("zero generator")
    for hi, ci in zip(h, comp):
        want = fx.mat_scale(F, c, hi)
        if want != ci:
            raise AssertionError("composite is not a multiple of the "
                                 "generator")
    return c


def _block_name(desc):
    kind = desc[0]
    if kind == "H":
        return "H[%s]^%d" % (desc[1], desc[3])
    if kind == "Hf":
        return "H[%s]^%d" % (desc[1], desc[2])
    if kind == "R":
        return "R[%s;%s]^%d" % (desc[1], "+" if desc[3] == 1 else "-",
                                desc[2])
    return "R[%s]^%d" % (desc[1], desc[2])


def _kron(F, a, b):
    ra, ca = fx.shape(a)
    rb, cb = fx.shape(b)
    out = [[0] * (ca * cb) for _ in range(ra * rb)]
    for i in range(ra):
        for j in range(ca):
            v = a[i][j]
            if v == 0:
                continue
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k][j * cb + l] = F.mul(v, b[k][l])
    return fx.mat(out)


class _Echelon:
    """Incremental row-echelon set with full reduction on insert."""

    def __init__(self, F):
        self.F = F
        self.rows = {}

    def add(self, vec):
        """Insert; the new normalized row, or None when dependent."""
        F = self.F
        v = list(vec)
        while True:
            lead = next((k for k, x in enumerate(v) if x != 0), None)
            if lead is None:
                return None
            hit = self.rows.get(lead)
            if hit is None:
                inv = F.inv(v[lead])
                row = tuple(F.mul(inv, x) for x in v)
                self.rows[lead] = row
                return row
            coef = v[lead]
            for k in range(lead, len(v)):
                v[k] = F.sub(v[k], F.mul(coef, hit[k]))


def _express(F, span_rows, vec):
    """Coefficients writing vec in the given independent rows."""
    if not span_rows:
        if any(x != 0 for x in vec):
            raise ValueError("vector outside the span")
        return []
    A = fx.mat([tuple(span_rows[c][r] for c in range(len(span_rows)))
                for r in range(len(span_rows[0]))])
    sol = fx.solve(F, A, tuple(vec))
    if sol is None:
        raise ValueError("vector outside the span")
    return list(sol)


def _det_fraction(m):
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / inv
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def _orth_basis(F, psi, d):
    """Columns T with T^t psi T the standard diagonal pattern."""

    def bval(v, w):
        total = 0
        for r, wr in enumerate(w):
            if wr == 0:
                continue
            for c, vc in enumerate(v):
                if vc:
                    total = F.add(total, F.mul(wr, F.mul(psi[r][c], vc)))
        return total

    rows = [tuple(1 if j == k else 0 for j in range(d)) for k in range(d)]
    cols = []
    leftover = None
    while rows:
        if F.q ** len(rows) > 200000:
            raise BudgetError("orthogonal basis scan is too large")
        pick = None
        for coeffs in itertools.product(F.elements(), repeat=len(rows)):
            v = [0] * d
            for cf, row in zip(coeffs, rows):
                if cf:
                    for k in range(d):
                        v[k] = F.add(v[k], F.mul(cf, row[k]))
            if any(x != 0 for x in v) and bval(v, v) == F.encode(1):
                pick = tuple(v)
                break
        if pick is None:
            if len(rows) != 1:
                raise AssertionError("form fails to represent one on a "
                                     "space of rank above one")
            v = rows[0]
            q0 = bval(v, v)
            if q0 == 0:
                raise AssertionError("degenerate leftover line")
            target = F.least_nonsquare()
            ratio = F.mul(target, F.inv(q0))
            root = F.sqrt(ratio)
            if root is None:
                raise AssertionError("leftover line has a square value")
            leftover = tuple(F.mul(root, x) for x in v)
            rows = []
            continue
        cols.append(pick)
        newrows = []
        for row in rows:
            coef = bval(row, pick)
            w = tuple(F.sub(a, F.mul(coef, b)) for a, b in zip(row, pick))
            newrows.append(w)
        R, piv = fx.rref(F, fx.mat(newrows))
        rows = [R[k] for k in range(len(piv))]
    if leftover is not None:
        cols.append(leftover)
    return fx.mat([tuple(cols[c][r] for c in range(len(cols)))
                   for r in range(d)])


def _sympl_basis(F, psi, d):
    """Columns T with T^t psi T the standard antidiagonal pairs."""

    def bval(v, w):
        # pairing of v with w: w^t psi v
        total = 0
        for r, wr in enumerate(w):
            if wr == 0:
                continue
            for c, vc in enumerate(v):
                if vc:
                    total = F.add(total, F.mul(wr, F.mul(psi[r][c], vc)))
        return total

    rows = [tuple(1 if j == k else 0 for j in range(d)) for k in range(d)]
    es, fs = [], []
    while rows:
        v = rows[0]
        w = None
        for cand in rows[1:]:
            if bval(v, cand) != 0:
                w = cand
                break
        if w is None:
            raise AssertionError("degenerate symplectic block")
        c = F.neg(bval(v, w))
        f = tuple(F.mul(F.inv(c), x) for x in w)
        es.append(v)
        fs.append(f)
        newrows = []
        for u in rows:
            if u == v or u == w:
                continue
            a = bval(u, v)
            b = bval(u, f)
            un = tuple(F.add(F.sub(x, F.mul(a, y)), F.mul(b, z))
                       for x, y, z in zip(u, f, v))
            newrows.append(un)
        if newrows:
            R, piv = fx.rref(F, fx.mat(newrows))
            rows = [R[k] for k in range(len(piv))]
        else:
            rows = []
    cols = es + fs
    T = fx.mat([tuple(cols[c][r] for c in range(len(cols)))
                for r in range(d)])
    got = fx.mat_mul(F, fx.transpose(T), fx.mat_mul(F, psi, T))
    want = standard_fixed_form(F, d, -1, False)
    if got != want:
        raise AssertionError("symplectic reduction failed")
    return T


def _herm_basis(F, psi, d):
    """Columns T with conj(T)^t psi T the identity."""

    def hval(v, w):
        total = 0
        for r, wr in enumerate(w):
            if wr == 0:
                continue
            cw = F.conj(wr)
            for c, vc in enumerate(v):
                if vc:
                    total = F.add(total, F.mul(cw, F.mul(psi[r][c], vc)))
        return total

    rows = [tuple(1 if j == k else 0 for j in range(d)) for k in range(d)]
    cols = []
    while rows:
        pick = None
        for row in rows:
            if hval(row, row) != 0:
                pick = row
                break
        if pick is None:
            v, w = None, None
            for a in rows:
                for b in rows:
                    if hval(a, b) != 0:
                        v, w = a, b
                        break
                if v is not None:
                    break
            if v is None:
                raise AssertionError("degenerate hermitian block")
            for u in F.units():
                cand = tuple(F.add(x, F.mul(u, y)) for x, y in zip(v, w))
                if hval(cand, cand) != 0:
                    pick = cand
                    break
        q0 = hval(pick, pick)
        scale = None
        for u in F.units():
            if F.mul(u, F.conj(u)) == F.inv(q0):
                scale = u
                break
        if scale is None:
            raise AssertionError("norm equation has no solution")
        pick = tuple(F.mul(scale, x) for x in pick)
        cols.append(pick)
        newrows = []
        for row in rows:
            coef = hval(row, pick)
            w = tuple(F.sub(a, F.mul(coef, b)) for a, b in zip(row, pick))
            newrows.append(w)
        R, piv = fx.rref(F, fx.mat(newrows))
        rows = [R[k] for k in range(len(piv))]
    return fx.mat([tuple(cols[c][r] for c in range(len(cols)))
                   for r in range(d)])
