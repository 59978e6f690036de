"""Quivers with involution and duality data.

A quiver with duality carries a node involution sigma, an arrow
involution reversing orientation, signs s (per node) and tau (per
arrow), a duality kind, and the field size q.  The module provides the
Euler and Cartan forms, the twist function E on dimension vectors, the
operator weight exponents, and a plain-text config format.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .ffield import FF
from .scalar import ScalarField


class QuiverError(ValueError):
    pass


DUALITY_KINDS = ("orthogonal", "symplectic", "unitary")


class Quiver:
    """Quiver with involution, duality signs, and a fixed ground field."""

    def __init__(self, nodes, arrows, sigma_nodes=None, sigma_arrows=None,
                 s=None, tau=None, duality="orthogonal", q=3):
        self.nodes = tuple(str(n) for n in nodes)
        self.arrows = tuple((str(a), str(t), str(h)) for (a, t, h) in arrows)
        self.node_index = {n: i for i, n in enumerate(self.nodes)}
        self.arrow_index = {a: i for i, (a, _, _) in enumerate(self.arrows)}
        self.duality = duality
        self.q = q
        sigma_nodes = dict(sigma_nodes or {})
        sigma_arrows = dict(sigma_arrows or {})
        self.sigma_n = {}
        for n in self.nodes:
            self.sigma_n[n] = str(sigma_nodes.get(n, n))
        for a, b in list(sigma_nodes.items()):
            self.sigma_n[str(a)] = str(b)
            self.sigma_n[str(b)] = str(a)
        self.sigma_a = {}
        for (a, _, _) in self.arrows:
            self.sigma_a[a] = str(sigma_arrows.get(a, a))
        for a, b in list(sigma_arrows.items()):
            self.sigma_a[str(a)] = str(b)
            self.sigma_a[str(b)] = str(a)
        if duality not in DUALITY_KINDS:
            raise QuiverError("unknown duality kind %r" % (duality,))
        default_s = -1 if duality == "symplectic" else 1
        s = dict(s or {})
        self.s = {n: int(s.get(n, default_s)) for n in self.nodes}
        tau = dict(tau or {})
        self.tau = {a: int(tau.get(a, -1)) for (a, _, _) in self.arrows}
        self.iota_nontrivial = (duality == "unitary")
        self._field = None
        self._scalars = None
        self._etwist_cache = {}

    # -- derived objects -------------------------------------------------

    @property
    def field(self) -> FF:
        if self._field is None:
            self._field = FF(self.q)
        return self._field

    @property
    def scalars(self) -> ScalarField:
        if self._scalars is None:
            self._scalars = ScalarField(self.q)
        return self._scalars

    @property
    def n(self) -> int:
        return len(self.nodes)

    def arrow_tail(self, a):
        return self.arrows[self.arrow_index[a]][1]

    def arrow_head(self, a):
        return self.arrows[self.arrow_index[a]][2]

    # -- validation --------------------------------------------------------

    def validate(self):
        """Return the list of invariant violations (empty when valid)."""
        bad = []
        for n in self.nodes:
            sn = self.sigma_n.get(n)
            if sn not in self.node_index:
                bad.append("sigma sends node %s outside the quiver" % n)
            elif self.sigma_n.get(sn) != n:
                bad.append("sigma on nodes is not an involution at %s" % n)
        for (a, t, h) in self.arrows:
            sa = self.sigma_a.get(a)
            if sa not in self.arrow_index:
                bad.append("sigma sends arrow %s outside the quiver" % a)
                continue
            if self.sigma_a.get(sa) != a:
                bad.append("sigma on arrows is not an involution at %s" % a)
                continue
            _, st, sh = self.arrows[self.arrow_index[sa]]
            if st != self.sigma_n.get(h) or sh != self.sigma_n.get(t):
                bad.append(
                    "sigma(arrow %s) must run sigma(head)->sigma(tail)" % a)
            if self.sigma_n.get(t) == h and sa != a:
                bad.append("arrow %s joins sigma-paired nodes but is "
                           "not sigma-fixed" % a)
        for n in self.nodes:
            if self.s[n] not in (1, -1):
                bad.append("s[%s] must be +1 or -1" % n)
            sn = self.sigma_n.get(n)
            if sn in self.node_index and self.s[n] != self.s[sn]:
                bad.append("s is not sigma-invariant at node %s" % n)
        for (a, t, h) in self.arrows:
            if self.tau[a] not in (1, -1):
                bad.append("tau[%s] must be +1 or -1" % a)
            sa = self.sigma_a.get(a)
            if sa in self.arrow_index:
                if self.tau[a] * self.tau[sa] != self.s[h] * self.s[t]:
                    bad.append("tau[%s]*tau[sigma] != s_head*s_tail" % a)
        if self.iota_nontrivial:
            root = round(self.q ** 0.5)
            if root * root != self.q:
                bad.append("unitary duality requires q to be a square")
            if any(self.s[n] != 1 for n in self.nodes) or \
               any(self.tau[a] != -1 for (a, _, _) in self.arrows):
                bad.append("unitary duality requires (s, tau) = (1, -1)")
        try:
            FF(self.q)
        except ValueError as exc:
            bad.append(str(exc))
        return bad

    def check_valid(self):
        bad = self.validate()
        if bad:
            raise QuiverError("; ".join(bad))
        return self

    # -- dimension vectors ---------------------------------------------------

    def zero_dim(self):
        return (0,) * self.n

    def unit_dim(self, node):
        i = self.node_index[str(node)]
        return tuple(1 if j == i else 0 for j in range(self.n))

    def add_dim(self, d, e):
        return tuple(a + b for a, b in zip(d, e))

    def sub_dim(self, d, e):
        return tuple(a - b for a, b in zip(d, e))

    def sigma_dim(self, d):
        out = [0] * self.n
        for i, n in enumerate(self.nodes):
            out[self.node_index[self.sigma_n[n]]] = d[i]
        return tuple(out)

    def dims_leq(self, bound):
        """All dimension vectors 0 <= d <= bound componentwise."""
        return itertools.product(*[range(b + 1) for b in bound])

    def hyperbolic_dim(self, d):
        return self.add_dim(d, self.sigma_dim(d))

    # -- bilinear forms -------------------------------------------------------

    def euler_form(self, d, e):
        total = sum(di * ei for di, ei in zip(d, e))
        for (_, t, h) in self.arrows:
            total -= d[self.node_index[t]] * e[self.node_index[h]]
        return total

    def cartan_form(self, d, e):
        return self.euler_form(d, e) + self.euler_form(e, d)

    # -- node and arrow partitions under sigma ---------------------------------

    def node_partition(self):
        """(fixed, plus) where plus holds the first node of each 2-orbit."""
        fixed, plus = [], []
        seen = set()
        for n in self.nodes:
            if n in seen:
                continue
            sn = self.sigma_n[n]
            if sn == n:
                fixed.append(n)
            else:
                plus.append(n)
                seen.add(sn)
            seen.add(n)
        return tuple(fixed), tuple(plus)

    def arrow_partition(self):
        fixed, plus = [], []
        seen = set()
        for (a, _, _) in self.arrows:
            if a in seen:
                continue
            sa = self.sigma_a[a]
            if sa == a:
                fixed.append(a)
            else:
                plus.append(a)
                seen.add(sa)
            seen.add(a)
        return tuple(fixed), tuple(plus)

    # -- the twist function E ---------------------------------------------------

    def e_twist(self, d) -> Fraction:
        d = tuple(d)
        hit = self._etwist_cache.get(d)
        if hit is not None:
            return hit
        if self.iota_nontrivial:
            # With a nontrivial field involution the fixed part of any
            # conjugate-semilinear involution is exactly half the
            # space, so the sign corrections of the bilinear cases drop
            # out and only half the symmetrized Euler pairing is left.
            total = Fraction(self.euler_form(self.sigma_dim(d), d), 2)
            self._etwist_cache[d] = total
            return total
        fixed_n, plus_n = self.node_partition()
        fixed_a, plus_a = self.arrow_partition()
        idx = self.node_index
        total = Fraction(0)
        for n in fixed_n:
            u = d[idx[n]]
            total += Fraction(u * (u - self.s[n]), 2)
        for n in plus_n:
            total += d[idx[self.sigma_n[n]]] * d[idx[n]]
        for a in fixed_a:
            _, t, h = self.arrows[self.arrow_index[a]]
            u = d[idx[h]]
            total -= Fraction(u * (u + self.tau[a] * self.s[h]), 2)
        for a in plus_a:
            _, t, h = self.arrows[self.arrow_index[a]]
            total -= d[idx[self.sigma_n[t]]] * d[idx[h]]
        self._etwist_cache[d] = total
        return total

    def t_weight(self, d, node) -> Fraction:
        node = str(node)
        eps = self.unit_dim(node)
        eps_sigma = self.unit_dim(self.sigma_n[node])
        return (-Fraction(self.cartan_form(d, eps))
                - self.e_twist(eps) - self.e_twist(eps_sigma))

    def act_twist(self, m_dim, u_dim) -> Fraction:
        """The nu-exponent of [U] acting on [M]."""
        return -Fraction(self.euler_form(m_dim, u_dim)) - self.e_twist(u_dim)

    # -- config text -------------------------------------------------------------

    def serialize(self) -> str:
        lines = ["q %d" % self.q, "duality %s" % self.duality]
        for n in self.nodes:
            lines.append("node %s s=%+d" % (n, self.s[n]))
        for (a, t, h) in self.arrows:
            lines.append("arrow %s %s %s tau=%+d" % (a, t, h, self.tau[a]))
        for n in self.nodes:
            sn = self.sigma_n[n]
            if sn != n and n < sn:
                lines.append("sigma node %s %s" % (n, sn))
        for (a, _, _) in self.arrows:
            sa = self.sigma_a[a]
            if sa != a and a < sa:
                lines.append("sigma arrow %s %s" % (a, sa))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return "Quiver(%s, q=%d, nodes=%d, arrows=%d)" % (
            self.duality, self.q, len(self.nodes), len(self.arrows))


def _parse_sign(text, what):
    val = text.strip()
    if val in ("+1", "1"):
        return 1
    if val == "-1":
        return -1
    raise QuiverError("bad %s value %r" % (what, text))


def parse_config(text: str) -> Quiver:
    """Parse the quiver config format into a validated Quiver."""
    nodes, arrows = [], []
    s, tau = {}, {}
    sigma_nodes, sigma_arrows = {}, {}
    duality = None
    q = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "node":
            if len(parts) < 2:
                raise QuiverError("node line needs an id: %r" % raw)
            nodes.append(parts[1])
            for extra in parts[2:]:
                if extra.startswith("s="):
                    s[parts[1]] = _parse_sign(extra[2:], "s")
                else:
                    raise QuiverError("bad node attribute %r" % extra)
        elif kind == "arrow":
            if len(parts) < 4:
                raise QuiverError("arrow line needs id tail head: %r" % raw)
            arrows.append((parts[1], parts[2], parts[3]))
            for extra in parts[4:]:
                if extra.startswith("tau="):
                    tau[parts[1]] = _parse_sign(extra[4:], "tau")
                else:
                    raise QuiverError("bad arrow attribute %r" % extra)
        elif kind == "sigma":
            if len(parts) != 4 or parts[1] not in ("node", "arrow"):
                raise QuiverError("bad sigma line %r" % raw)
            if parts[1] == "node":
                sigma_nodes[parts[2]] = parts[3]
            else:
                sigma_arrows[parts[2]] = parts[3]
        elif kind == "duality":
            if len(parts) != 2 or parts[1] not in DUALITY_KINDS:
                raise QuiverError("bad duality line %r" % raw)
            duality = parts[1]
        elif kind == "q":
            if len(parts) != 2:
                raise QuiverError("bad q line %r" % raw)
            q = int(parts[1])
        else:
            raise QuiverError("unknown config directive %r" % kind)
    if duality is None:
        raise QuiverError("config must set a duality kind")
    if q is None:
        raise QuiverError("config must set q")
    quiv = Quiver(nodes, arrows, sigma_nodes, sigma_arrows, s, tau,
                  duality, q)
    bad = quiv.validate()
    if bad:
        raise QuiverError("; ".join(bad))
    return quiv


# -- standard constructors -------------------------------------------------

def single_node(duality="orthogonal", q=3) -> Quiver:
    return Quiver(["1"], [], duality=duality, q=q).check_valid()


def jordan(duality="symplectic", q=3) -> Quiver:
    return Quiver(["1"], [("a", "1", "1")], duality=duality,
                  q=q).check_valid()


def a2_swap(duality="orthogonal", q=3) -> Quiver:
    return Quiver(["1", "2"], [("a", "1", "2")],
                  sigma_nodes={"1": "2"}, sigma_arrows={},
                  duality=duality, q=q).check_valid()


def a_sigma(npairs: int, center: bool, forward: bool = True,
            duality="orthogonal", q=3) -> Quiver:
    """Type A chain with the reversal involution.

    Nodes are -npairs..npairs, including 0 exactly when center is True.
    With forward=True every arrow points from k toward k+1 (the vec
    orientation); otherwise all arrows are reversed.  The involution is
    k -> -k on nodes, forcing the matching arrow pairing.
    """
    labels = [str(k) for k in range(-npairs, npairs + 1)
              if center or k != 0]
    arrows = []
    for a, b in zip(labels, labels[1:]):
        name = "a%s_%s" % (a, b)
        arrows.append((name, a, b) if forward else (name, b, a))
    sigma_nodes = {}
    for k in labels:
        if int(k) > 0:
            sigma_nodes[str(-int(k))] = k
    sigma_arrows = {}
    for (name, t, h) in arrows:
        mt, mh = str(-int(h)), str(-int(t))
        for (name2, t2, h2) in arrows:
            if (t2, h2) == (mt, mh):
                sigma_arrows[name] = name2
    return Quiver(labels, arrows, sigma_nodes, sigma_arrows,
                  duality=duality, q=q).check_valid()


def vec_a(total_nodes: int, duality="orthogonal", q=3,
          forward: bool = True) -> Quiver:
    """vec-A_n: the A_n chain, reversal involution, all arrows one way."""
    if total_nodes % 2:
        return a_sigma(total_nodes // 2, True, forward, duality, q)
    return a_sigma(total_nodes // 2, False, forward, duality, q)


def a3_orientation(left_forward: bool, right_forward: bool,
                   duality="orthogonal", q=3) -> Quiver:
    """A_3 with nodes -1,0,1 and a sigma-admissible orientation.

    The involution forces the two arrows to mirror each other, so the
    right arrow's direction is determined by the left one; the two
    admissible orientations are (forward, forward) and (back, back).
    """
    if left_forward != right_forward:
        raise QuiverError("sigma-admissible A_3 orientations are "
                          "(forward, forward) or (back, back)")
    return a_sigma(1, True, left_forward, duality, q)


def disjoint_double(base_nodes, base_arrows, duality="orthogonal",
                    q=3) -> Quiver:
    """Q sqcup Q^op with the swap involution; s = +1 and tau = +1."""
    nodes = [n for n in base_nodes] + ["%s'" % n for n in base_nodes]
    arrows = []
    sigma_nodes = {n: "%s'" % n for n in base_nodes}
    sigma_arrows = {}
    for (a, t, h) in base_arrows:
        arrows.append((a, t, h))
        arrows.append(("%s'" % a, "%s'" % h, "%s'" % t))
        sigma_arrows[a] = "%s'" % a
    tau = {a: 1 for (a, _, _) in arrows}
    return Quiver(nodes, arrows, sigma_nodes, sigma_arrows, None, tau,
                  duality, q).check_valid()
