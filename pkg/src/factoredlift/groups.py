"""Finite groups as multiplication tables, subgroups, left cosets, and the group algebra."""

from __future__ import annotations

import itertools
import json
import re
from numbers import Integral, Number
from types import MappingProxyType

import numpy as np

from . import kernels
from .errors import (
    BadInverse,
    FormatError,
    GroupMismatch,
    GroupTooLarge,
    LabelCollision,
    NoIdentity,
    NonAssociative,
    NotASubgroup,
    UnknownElementLabel,
)

DEFAULT_MAX_ORDER = 512

_WORD_TOKEN = re.compile(r"\s*([A-Za-z])\s*(?:\^\s*(-?\d+))?\s*\*?")


class FiniteGroup:
    """A finite group given by its multiplication table.

    Element 0 is always the identity. ``family`` records how the group was
    built: ``("cyclic", n)``, ``("dihedral", n)``, ``("product", factors)``
    or ``("table",)``.
    """

    def __init__(self, elements, mult, family, generators=None, factors=()):
        self.elements = tuple(elements)
        mult = np.array(mult, dtype=np.int64)
        mult.setflags(write=False)
        self.mult = mult
        inv = np.argmin(mult, axis=1).astype(np.int64)
        inv.setflags(write=False)
        self.inv = inv
        self.family = family
        self.factors = tuple(factors)
        # generator names usable in word labels such as "a^2*b"
        self._word_generators = dict(generators or {})
        self._index = {lab: i for i, lab in enumerate(self.elements)}

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    @property
    def name(self):
        kind = self.family[0]
        if kind in ("cyclic", "dihedral"):
            return f"{kind}({self.family[1]})"
        if kind == "product":
            return "product(" + ",".join(f.name for f in self.factors) + ")"
        return f"table({self.order})"

    def same_as(self, other):
        return self is other or (
            isinstance(other, FiniteGroup)
            and self.elements == other.elements
            and np.array_equal(self.mult, other.mult)
        )

    def op(self, g, h):
        return int(self.mult[g, h])

    def inverse(self, g):
        return int(self.inv[g])

    def power(self, g, k):
        if k < 0:
            g, k = self.inverse(g), -k
        out = 0
        for _ in range(k):
            out = self.op(out, g)
        return out

    def product(self, seq):
        out = 0
        for g in seq:
            out = self.op(out, g)
        return out

    def element_order(self, g):
        x, k = g, 1
        while x != 0:
            x = self.op(x, g)
            k += 1
        return k

    def label(self, g):
        return self.elements[g]

    def index(self, label):
        """Element index for a label, an alias of it, or an integer index."""
        if isinstance(label, Integral) and not isinstance(label, bool):
            if 0 <= label < self.order:
                return int(label)
            raise UnknownElementLabel(f"element index {label} out of range for {self.name}")
        if not isinstance(label, str):
            raise UnknownElementLabel(f"bad element label {label!r}")
        s = label.strip()
        if s in self._index:
            return self._index[s]
        if s in ("e", "1", "id"):
            return 0
        if self.family[0] == "product":
            return self._parse_tuple(s)
        if self._word_generators:
            return self._parse_word(s)
        raise UnknownElementLabel(f"unknown element {label!r} in {self.name}")

    def _parse_word(self, s):
        pos, out = 0, 0
        compact = s.replace(" ", "")
        if not compact:
            raise UnknownElementLabel("empty element label")
        while pos < len(compact):
            m = _WORD_TOKEN.match(compact, pos)
            if not m or m.end() == pos:
                raise UnknownElementLabel(f"cannot parse element {s!r} in {self.name}")
            name, exp = m.group(1), m.group(2)
            if name == "e":
                g = 0
            elif name in self._word_generators:
                g = self._word_generators[name]
            else:
                raise UnknownElementLabel(f"unknown generator {name!r} in {s!r} for {self.name}")
            out = self.op(out, self.power(g, int(exp) if exp is not None else 1))
            pos = m.end()
        return out

    def _parse_tuple(self, s):
        if not (s.startswith("(") and s.endswith(")")):
            raise UnknownElementLabel(f"product element must look like (x,y): {s!r}")
        parts = _split_top_level(s[1:-1])
        if len(parts) != len(self.factors):
            raise UnknownElementLabel(f"expected {len(self.factors)} components in {s!r}")
        idx = [f.index(p) for f, p in zip(self.factors, parts)]
        return int(np.ravel_multi_index(idx, [f.order for f in self.factors]))


def _split_top_level(s):
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def cyclic_group(n):
    if n < 1:
        raise ValueError("cyclic group order must be >= 1")
    labels = ["e"] + [f"g^{k}" for k in range(1, n)]
    i = np.arange(n)
    mult = (i[:, None] + i[None, :]) % n
    gens = {"g": 1 % n}
    return FiniteGroup(labels, mult, ("cyclic", n), generators=gens)


def _dihedral_label(i, s):
    if s == 0:
        return "e" if i == 0 else f"a^{i}"
    return "b" if i == 0 else f"a^{i}*b"


def dihedral_group(n):
    """D_n of order 2n, elements a^i (index i) then a^i*b (index n + i)."""
    if n < 1:
        raise ValueError("dihedral parameter must be >= 1")
    labels = [_dihedral_label(i, 0) for i in range(n)] + [_dihedral_label(i, 1) for i in range(n)]
    mult = np.empty((2 * n, 2 * n), dtype=np.int64)
    for x in range(2 * n):
        i, s = x % n, x // n
        for y in range(2 * n):
            j, t = y % n, y // n
            # a^i b^s a^j b^t = a^(i + (-1)^s j) b^(s+t)
            mult[x, y] = (s ^ t) * n + (i + (j if s == 0 else -j)) % n
    gens = {"a": 1 % n, "b": n}
    return FiniteGroup(labels, mult, ("dihedral", n), generators=gens)


def direct_product(factors):
    factors = tuple(factors)
    if not factors:
        raise ValueError("direct product needs at least one factor")
    orders = [f.order for f in factors]
    combos = list(itertools.product(*[range(o) for o in orders]))
    labels = ["(" + ",".join(f.label(c) for f, c in zip(factors, combo)) + ")" for combo in combos]
    n = len(combos)
    mult = np.empty((n, n), dtype=np.int64)
    comp = np.array(combos, dtype=np.int64).reshape(n, len(factors))
    for x in range(n):
        prod = np.stack([factors[t].mult[comp[x, t], comp[:, t]] for t in range(len(factors))])
        mult[x] = np.ravel_multi_index(tuple(prod), orders)
    return FiniteGroup(labels, mult, ("product", len(factors)), factors=factors)


def group_from_table(elements, table, max_order=DEFAULT_MAX_ORDER):
    """Validate an arbitrary multiplication table and reorder it so the identity comes first."""
    elements = [str(x) for x in elements]
    n = len(elements)
    if n < 1:
        raise NoIdentity("empty group")
    if n > max_order:
        raise GroupTooLarge(f"order {n} exceeds the cap {max_order}")
    if len(set(elements)) != n:
        dup = sorted({x for x in elements if elements.count(x) > 1})
        raise LabelCollision(f"duplicate element labels {dup}")
    lookup = {lab: i for i, lab in enumerate(elements)}
    try:
        rows = [[lookup[x] if isinstance(x, str) else int(x) for x in row] for row in table]
    except KeyError as exc:
        raise FormatError(f"table entry {exc.args[0]!r} is not an element label") from None
    mult = np.array(rows, dtype=np.int64)
    if mult.shape != (n, n):
        raise FormatError(f"table must be {n}x{n}, got shape {mult.shape}")
    if mult.min() < 0 or mult.max() >= n:
        raise FormatError("table entries out of range")

    ids = [e for e in range(n) if np.array_equal(mult[e], np.arange(n)) and np.array_equal(mult[:, e], np.arange(n))]
    if not ids:
        raise NoIdentity("no two-sided identity in the table")
    e = ids[0]
    for x in range(n):
        if np.unique(mult[x]).size != n or np.unique(mult[:, x]).size != n:
            raise BadInverse(f"table is not a Latin square (element {elements[x]!r} has no unique inverse)")
        left = int(np.flatnonzero(mult[:, x] == e)[0])
        right = int(np.flatnonzero(mult[x] == e)[0])
        if left != right:
            raise BadInverse(f"left and right inverses of {elements[x]!r} differ")
    _check_associative(mult, elements)

    perm = [e] + [x for x in range(n) if x != e]
    pos = np.empty(n, dtype=np.int64)
    pos[perm] = np.arange(n)
    new = pos[mult[np.ix_(perm, perm)]]
    return FiniteGroup([elements[x] for x in perm], new, ("table",))


def _check_associative(mult, elements):
    for a in range(mult.shape[0]):
        # (a*b)*c versus a*(b*c) for all b, c
        lhs = mult[mult[a]]
        rhs = mult[a][mult]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            b, c = bad[0]
            raise NonAssociative(
                f"({elements[a]}*{elements[b]})*{elements[c]} != {elements[a]}*({elements[b]}*{elements[c]})"
            )


_DESCRIPTOR = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$")


def make_group(spec, max_order=DEFAULT_MAX_ORDER):
    """Build a group from a family descriptor.

    Accepts a dict (``{"family": "cyclic", "n": 4}``, ``{"family": "product",
    "factors": [...]}``, ``{"family": "table", "elements": [...], "table":
    [[...]]}``), a descriptor string such as ``"product(cyclic(2),dihedral(3))"``,
    or an existing :class:`FiniteGroup`.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, str):
        spec = _parse_descriptor(spec)
    if not isinstance(spec, dict) or "family" not in spec:
        raise FormatError(f"bad group descriptor {spec!r}")
    fam = spec["family"]
    if fam in ("cyclic", "dihedral"):
        try:
            n = int(spec["n"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"{fam} group needs an integer 'n'") from None
        if n < 1:
            raise FormatError(f"{fam} group needs n >= 1")
        order = n if fam == "cyclic" else 2 * n
        if order > max_order:
            raise GroupTooLarge(f"order {order} exceeds the cap {max_order}")
        return cyclic_group(n) if fam == "cyclic" else dihedral_group(n)
    if fam == "product":
        factors = [make_group(f, max_order) for f in spec.get("factors", [])]
        if not factors:
            raise FormatError("product group needs a non-empty 'factors' list")
        if int(np.prod([f.order for f in factors])) > max_order:
            raise GroupTooLarge("product order exceeds the cap")
        return direct_product(factors)
    if fam == "table":
        if "elements" not in spec or "table" not in spec:
            raise FormatError("table group needs 'elements' and 'table'")
        return group_from_table(spec["elements"], spec["table"], max_order)
    raise FormatError(f"unknown group family {fam!r}")


def _parse_descriptor(s):
    m = _DESCRIPTOR.match(s)
    if not m:
        raise FormatError(f"bad group descriptor {s!r}")
    fam, args = m.group(1), m.group(2)
    if fam in ("cyclic", "dihedral"):
        return {"family": fam, "n": args.strip()}
    if fam == "product":
        return {"family": "product", "factors": [_parse_descriptor(a) for a in _split_top_level(args)]}
    raise FormatError(f"unknown group family {fam!r}")


def group_descriptor(G):
    """Inverse of :func:`make_group` (JSON-serialisable)."""
    kind = G.family[0]
    if kind in ("cyclic", "dihedral"):
        return {"family": kind, "n": G.family[1]}
    if kind == "product":
        return {"family": "product", "factors": [group_descriptor(f) for f in G.factors]}
    return {
        "family": "table",
        "elements": list(G.elements),
        "table": [[G.elements[x] for x in row] for row in G.mult.tolist()],
    }


# subgroups and cosets


class Subgroup:
    """A subgroup of ``group``: sorted element indices plus a generating sequence."""

    def __init__(self, group, elements, generators):
        self.group = group
        self.elements = tuple(sorted(set(int(x) for x in elements)))
        self.generators = tuple(generators)
        self._set = frozenset(self.elements)

    @property
    def order(self):
        return len(self.elements)

    @property
    def index(self):
        return self.group.order // self.order

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.group.same_as(other.group) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return "Subgroup{" + ", ".join(self.group.label(g) for g in self.elements) + "}"

    def labels(self):
        return [self.group.label(g) for g in self.elements]

    @classmethod
    def from_elements(cls, G, elements):
        """Subgroup given by its full element list; raises NotASubgroup unless closed."""
        idx = sorted({G.index(x) for x in elements})
        if not idx:
            idx = [0]
        s = set(idx)
        if 0 not in s:
            raise NotASubgroup("element set does not contain the identity")
        for g in idx:
            if G.inverse(g) not in s:
                raise NotASubgroup(f"{G.label(g)} is present but its inverse is not")
            for h in idx:
                if G.op(g, h) not in s:
                    raise NotASubgroup(f"{G.label(g)}*{G.label(h)} leaves the set")
        return cls(G, idx, _greedy_generators(G, idx))


def _closure(G, gens):
    elems = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.op(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return elems


def _greedy_generators(G, elements):
    gens, span = [], {0}
    for g in sorted(elements, key=lambda x: (-G.element_order(x), x)):
        if g not in span:
            gens.append(g)
            span = _closure(G, gens)
    return tuple(gens)


def subgroup_generate(G, gens=()):
    """Smallest subgroup of G containing ``gens`` (labels or indices)."""
    idx = []
    for g in gens:
        i = G.index(g)
        if i != 0 and i not in idx:
            idx.append(i)
    elems = _closure(G, idx)
    H = Subgroup(G, elems, tuple(idx))
    assert G.order % H.order == 0, "Lagrange violated: table is not a group"
    return H


def trivial_subgroup(G):
    return Subgroup(G, [0], ())


def whole_group(G):
    return Subgroup(G, range(G.order), _greedy_generators(G, range(G.order)))


class CosetSpace:
    """Left cosets hH ordered by their smallest element; coset 0 is H itself."""

    def __init__(self, subgroup):
        G = subgroup.group
        self.subgroup = subgroup
        self.group = G
        coset_of = np.full(G.order, -1, dtype=np.int64)
        cosets = []
        for g in range(G.order):
            if coset_of[g] >= 0:
                continue
            members = sorted(G.op(g, h) for h in subgroup.elements)
            coset_of[members] = len(cosets)
            cosets.append(tuple(members))
        coset_of.setflags(write=False)
        self.cosets = tuple(cosets)
        self.coset_of = coset_of
        self.representatives = tuple(c[0] for c in cosets)

    def __len__(self):
        return len(self.cosets)

    def __repr__(self):
        return f"CosetSpace({len(self)} cosets of {self.subgroup!r})"


def left_cosets(G, H):
    if not H.group.same_as(G):
        raise NotASubgroup("subgroup belongs to a different group")
    return CosetSpace(H)


# group algebra


def _clean(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (Integral, np.integer)):
        return int(v)
    c = complex(v)
    if c.imag == 0 and c.real.is_integer():
        return int(c.real)
    return c


class GroupAlgebraElement:
    """A formal sum of group elements with complex (or exact integer) coefficients."""

    def __init__(self, group, coeffs=None):
        self.group = group
        clean = {}
        for g, c in (coeffs or {}).items():
            c = _clean(c)
            if c != 0:
                clean[int(g)] = clean.get(int(g), 0) + c
        self.coeffs = MappingProxyType({g: c for g, c in sorted(clean.items()) if c != 0})

    @classmethod
    def delta(cls, group, g=0):
        return cls(group, {group.index(g): 1})

    @classmethod
    def from_labels(cls, group, mapping):
        out = {}
        for lab, c in mapping.items():
            i = group.index(lab)
            out[i] = out.get(i, 0) + c
        return cls(group, out)

    @classmethod
    def from_dense(cls, group, vec):
        return cls(group, {i: v for i, v in enumerate(vec.tolist()) if v != 0})

    def to_dense(self, dtype=None):
        if dtype is None:
            dtype = np.int64 if self.is_integral() else np.complex128
        out = np.zeros(self.group.order, dtype=dtype)
        for g, c in self.coeffs.items():
            out[g] = c
        return out

    def is_integral(self):
        return all(isinstance(c, int) for c in self.coeffs.values())

    def coefficient(self, g):
        return self.coeffs.get(self.group.index(g), 0)

    @property
    def support(self):
        return tuple(self.coeffs)

    def coefficient_sum(self):
        return sum(self.coeffs.values())

    def _check(self, other):
        if not self.group.same_as(other.group):
            raise GroupMismatch("group algebra elements over different groups")

    def __add__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return GroupAlgebraElement(self.group, out)

    def __neg__(self):
        return GroupAlgebraElement(self.group, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            return algebra_mul(self, other)
        if isinstance(other, Number):
            return GroupAlgebraElement(self.group, {g: c * other for g, c in self.coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, GroupAlgebraElement):
            return self.group.same_as(other.group) and dict(self.coeffs) == dict(other.coeffs)
        if other == 0:
            return not self.coeffs
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for g, c in self.coeffs.items():
            lab = self.group.label(g)
            if c == 1:
                terms.append(lab)
            else:
                terms.append(f"{c}*{lab}")
        return " + ".join(terms)


def algebra_mul(x, y, backend=None):
    """Convolution product sum_{g,h} x_g y_h (gh)."""
    if not x.group.same_as(y.group):
        raise GroupMismatch("group algebra elements over different groups")
    G = x.group
    A = x.to_dense()[None, None, :]
    B = y.to_dense()[None, None, :]
    out = kernels.ga_matmul(A, B, G.mult, backend=backend)
    return GroupAlgebraElement.from_dense(G, out[0, 0])


def subgroup_sum(H):
    """G_u^+: the all-ones element supported on H."""
    return GroupAlgebraElement(H.group, {g: 1 for g in H.elements})


def load_group_json(path):
    with open(path) as fh:
        return make_group(json.load(fh))
