"""
Ring objects, augmented commutative algebras and coefficient specs.

Finite rings are carried by their addition and multiplication tables over the
carrier {0, ..., size-1}. The integers are only available symbolically.
"""
from __future__ import annotations

import json
import logging
import re
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import sympy

from barcalc.errors import InvalidInput, InvalidRing, InvalidAlgebra, InfiniteLevel
from barcalc.linalg import IntMatrix, FGAbelianGroup, invariant_factors

logger = logging.getLogger("barcalc")


def encode_tuple(digits, base):
    """Index of a tuple in the lexicographic enumeration of range(base)^len."""
    index = 0
    for d in digits:
        index = index * base + d
    return index


def decode_tuple(index, base, length):
    digits = [0] * length
    for pos in range(length - 1, -1, -1):
        index, digits[pos] = divmod(index, base)
    return tuple(digits)


########
# Finite rings
########
class FiniteRing:
    """
    Commutative ring with unit given by tables on {0, ..., size-1}.
    """

    def __init__(self, size, add, mul, zero, one, name=None, validate=True):
        self.size = size
        self.add = tuple(tuple(row) for row in add)
        self.mul = tuple(tuple(row) for row in mul)
        self.zero = zero
        self.one = one
        self.name = name or f"table({size})"
        if len(self.add) != size or len(self.mul) != size \
                or any(len(r) != size for r in self.add + self.mul):
            raise InvalidRing(f"tables of {self.name} are not {size}x{size}")
        if validate:
            violations = self.check_axioms()
            if violations:
                raise InvalidRing(f"{self.name}: {violations[0]}")
        self.neg = tuple(next((b for b in range(size) if self.add[a][b] == zero), zero) for a in range(size))

    @classmethod
    def cyclic(cls, m):
        if m < 1:
            raise InvalidRing(f"Z/{m} is not a ring")
        return cls(m,
                   [[(a + b) % m for b in range(m)] for a in range(m)],
                   [[(a * b) % m for b in range(m)] for a in range(m)],
                   0, 1 % m, name=f"Z/{m}")

    @classmethod
    def product(cls, left, right):
        n = right.size
        size = left.size * n
        pairs = [divmod(x, n) for x in range(size)]
        add = [[left.add[a1][b1] * n + right.add[a2][b2] for (b1, b2) in pairs] for (a1, a2) in pairs]
        mul = [[left.mul[a1][b1] * n + right.mul[a2][b2] for (b1, b2) in pairs] for (a1, a2) in pairs]
        return cls(size, add, mul, left.zero * n + right.zero, left.one * n + right.one,
                   name=f"{left.name} x {right.name}")

    @classmethod
    def from_table(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
            return cls(int(data["size"]), data["add"], data["mul"], int(data["zero"]), int(data["one"]),
                       name=f"table:{path}")
        except (OSError, KeyError, ValueError, TypeError) as e:
            raise InvalidInput(f"cannot read ring table {path}: {e}")

    def with_swapped_entry(self, a, b, c):
        """
        Copy whose product a·b (and b·a) is replaced by c, without validation.
        Used to inject faults into the axiom checkers.
        """
        mul = [list(row) for row in self.mul]
        mul[a][b] = c
        mul[b][a] = c
        return FiniteRing(self.size, self.add, mul, self.zero, self.one,
                          name=f"{self.name} (faulty)", validate=False)

    def elements(self):
        return range(self.size)

    def check_axioms(self):
        """Exhaustive commutative ring axioms; returns a list of violation strings."""
        add, mul, R = self.add, self.mul, range(self.size)
        if not all(0 <= v < self.size for row in add + mul for v in row):
            return ["table entry outside the carrier"]
        violations = []
        for a in R:
            if add[a][self.zero] != a:
                violations.append(f"{a} + 0 != {a}")
            if mul[a][self.one] != a:
                violations.append(f"{a} * 1 != {a}")
            if not any(add[a][b] == self.zero for b in R):
                violations.append(f"{a} has no additive inverse")
            for b in R:
                if add[a][b] != add[b][a]:
                    violations.append(f"{a} + {b} not commutative")
                if mul[a][b] != mul[b][a]:
                    violations.append(f"{a} * {b} not commutative")
                for c in R:
                    if add[add[a][b]][c] != add[a][add[b][c]]:
                        violations.append(f"({a} + {b}) + {c} not associative")
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                        violations.append(f"({a} * {b}) * {c} not associative")
                    if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                        violations.append(f"{a} * ({b} + {c}) not distributive")
                if len(violations) > 16:
                    return violations
        return violations

    def additive_group(self):
        """Canonical form of (S, +), from the presentation e_a + e_b = e_(a+b)."""
        relations = []
        for a in range(self.size):
            for b in range(a, self.size):
                col = {}
                for r, v in ((a, 1), (b, 1), (self.add[a][b], -1)):
                    col[r] = col.get(r, 0) + v
                relations.append(col)
        relations.append({self.zero: 1})
        inv = invariant_factors(IntMatrix.from_columns(self.size, relations))
        return FGAbelianGroup.from_cyclic([0] * (self.size - len(inv)) + [d for d in inv if d > 1])

    def __repr__(self):
        return f"FiniteRing({self.name})"


@dataclass(frozen=True)
class RingSpec:
    """
    Textual ring description: "Z" | "Z/<m>" | "<spec> x <spec>" | "table:<path>".
    """
    kind: str
    modulus: int = 0
    factors: tuple = ()
    path: str = ""

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text.startswith("table:"):
            return cls("table", path=text[len("table:"):])
        parts = re.split(r"\s+x\s+", text)
        if len(parts) > 1:
            return cls("product", factors=tuple(cls.parse(p) for p in parts))
        if text == "Z":
            return cls("Z")
        match = re.fullmatch(r"Z/(\d+)", text)
        if match and int(match.group(1)) >= 1:
            return cls("cyclic", modulus=int(match.group(1)))
        raise InvalidInput(f"cannot parse ring spec '{text}'")

    @property
    def is_finite(self):
        if self.kind == "product":
            return all(f.is_finite for f in self.factors)
        return self.kind != "Z"

    def finite_ring(self):
        if self.kind == "Z":
            raise InfiniteLevel("the ring Z has infinitely many elements")
        if self.kind == "cyclic":
            return FiniteRing.cyclic(self.modulus)
        if self.kind == "table":
            return FiniteRing.from_table(self.path)
        ring = self.factors[0].finite_ring()
        for f in self.factors[1:]:
            ring = FiniteRing.product(ring, f.finite_ring())
        return ring

    def additive_group(self):
        if self.kind == "Z":
            return FGAbelianGroup(1)
        if self.kind == "cyclic":
            return FGAbelianGroup.from_cyclic([self.modulus])
        if self.kind == "product":
            group = FGAbelianGroup()
            for f in self.factors:
                group = group.direct_sum(f.additive_group())
            return group
        return self.finite_ring().additive_group()

    def __str__(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "cyclic":
            return f"Z/{self.modulus}"
        if self.kind == "table":
            return f"table:{self.path}"
        return " x ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class Coefficients:
    """
    Coefficients for chains: Z (modulus 0), Z/m, or the prime field F_p.
    """
    modulus: int = 0
    field: bool = False

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "Z":
            return cls()
        match = re.fullmatch(r"F_?(\d+)", text)
        if match:
            p = int(match.group(1))
            if not sympy.isprime(p):
                raise InvalidInput(f"F{p}: {p} is not prime")
            return cls(p, True)
        match = re.fullmatch(r"Z/(\d+)", text)
        if match and int(match.group(1)) >= 2:
            return cls(int(match.group(1)), False)
        raise InvalidInput(f"cannot parse coefficients '{text}'")

    @classmethod
    def prime_field(cls, p):
        return cls.parse(f"F{p}")

    def __str__(self):
        if not self.modulus:
            return "Z"
        return f"F{self.modulus}" if self.field else f"Z/{self.modulus}"


########
# Augmented commutative algebras
########
def _add_into(target, vector, scale, modulus):
    for k, v in vector.items():
        x = target.get(k, 0) + scale * v
        if modulus:
            x %= modulus
        if x:
            target[k] = x
        else:
            target.pop(k, None)


def tensor_vectors(vectors, dims, modulus):
    """Tensor product of sparse vectors; factor i has dimension dims[i]."""
    result = {0: 1}
    for vec, dim in zip(vectors, dims):
        nxt = {}
        for k, a in result.items():
            for j, b in vec.items():
                x = a * b
                if modulus:
                    x %= modulus
                if x:
                    key = k * dim + j
                    nxt[key] = (nxt.get(key, 0) + x) % modulus if modulus else nxt.get(key, 0) + x
        result = {k: v for k, v in nxt.items() if v}
        if not result:
            break
    return result


@dataclass
class AugCommAlgebra:
    """
    Commutative augmented algebra over k = Z (modulus 0) or Z/m, on a finite
    basis that contains the unit as a basis vector.

    mul[i][j] is the product e_i·e_j as a sparse vector {k: coefficient}.
    Optional coalgebra data (comul, counit, antipode) and the linearized ring
    multiplication `circle` are present for group algebras k[S].
    """
    modulus: int
    dim: int
    mul: list
    unit_index: int
    augmentation: tuple
    name: str = "A"
    comul: list = None
    antipode: list = None
    circle: list = None
    labels: list = field(default=None, repr=False)

    def __post_init__(self):
        self.augmentation = tuple(self._reduce(x) for x in self.augmentation)
        if len(self.augmentation) != self.dim or len(self.mul) != self.dim:
            raise InvalidAlgebra(f"{self.name}: structure constants do not match dimension {self.dim}")
        violations = self.check_axioms()
        if violations:
            raise InvalidAlgebra(f"{self.name}: {violations[0]}")

    def _reduce(self, x):
        return x % self.modulus if self.modulus else x

    @property
    def counit(self):
        return self.augmentation

    def product(self, x, y):
        """Product of two sparse vectors."""
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                _add_into(out, self.mul[i][j], a * b, self.modulus)
        return out

    def check_axioms(self):
        violations = []
        R = range(self.dim)
        e = lambda i: {i: 1}
        for i in R:
            if self.mul[self.unit_index][i] != e(i) or self.mul[i][self.unit_index] != e(i):
                violations.append(f"unit fails on e_{i}")
            for j in R:
                if self.mul[i][j] != self.mul[j][i]:
                    violations.append(f"e_{i}·e_{j} not commutative")
                eps = sum(self.augmentation[k] * c for k, c in self.mul[i][j].items())
                if self._reduce(eps) != self._reduce(self.augmentation[i] * self.augmentation[j]):
                    violations.append(f"augmentation not multiplicative on e_{i}, e_{j}")
                for k in R:
                    if self.product(self.product(e(i), e(j)), e(k)) != self.product(e(i), self.product(e(j), e(k))):
                        violations.append(f"(e_{i}·e_{j})·e_{k} not associative")
        if self.augmentation[self.unit_index] != 1:
            violations.append("augmentation of the unit is not 1")
        return violations

    @classmethod
    def from_json(cls, path):
        """
        Structure-constant file:
        {"field": p, "dimension": d, "unit": i, "augmentation": [..],
         "mul": d x d x d nested list, mul[i][j][k] = coefficient of e_k in e_i e_j}
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text())
            modulus = int(data.get("field", 0))
            d = int(data["dimension"])
            mul = [[{k: c for k, c in enumerate(data["mul"][i][j]) if (c % modulus if modulus else c)}
                    for j in range(d)] for i in range(d)]
            if modulus:
                mul = [[{k: c % modulus for k, c in entry.items()} for entry in row] for row in mul]
            return cls(modulus, d, mul, int(data["unit"]), tuple(data["augmentation"]),
                       name=data.get("name", path.stem))
        except (OSError, KeyError, ValueError, TypeError, IndexError) as e:
            raise InvalidAlgebra(f"cannot read algebra {path}: {e}")


def ground_algebra(modulus):
    """k itself, the unit of augmented algebras."""
    return AugCommAlgebra(modulus, 1, [[{0: 1}]], 0, (1,), name="k",
                          comul=[{(0, 0): 1}], antipode=[{0: 1}])


def truncated_polynomial(p, degree):
    """F_p[x]/x^degree with basis 1, x, ..., x^(degree-1) and ε(x) = 0."""
    mul = [[({i + j: 1} if i + j < degree else {}) for j in range(degree)] for i in range(degree)]
    return AugCommAlgebra(p, degree, mul, 0, tuple(int(i == 0) for i in range(degree)),
                          name=f"F{p}[x]/x^{degree}")


def group_algebra(ring: FiniteRing, modulus):
    """
    k[S] for the additive group of S: e_a·e_b = e_(a+b), ε(e_a) = 1,
    Δ(e_a) = e_a ⊗ e_a and antipode e_a ↦ e_(-a). The circle product
    e_a ∘ e_b = e_(ab) linearizes the ring multiplication.
    """
    n = ring.size
    mul = [[{ring.add[a][b]: 1} for b in range(n)] for a in range(n)]
    return AugCommAlgebra(modulus, n, mul, ring.zero, (1,) * n, name=f"k[{ring.name}]",
                          comul=[{(a, a): 1} for a in range(n)],
                          antipode=[{ring.neg[a]: 1} for a in range(n)],
                          circle=[[{ring.mul[a][b]: 1} for b in range(n)] for a in range(n)])


class TensorPowerAlgebra:
    """
    A^{⊗N} with the componentwise structure; basis tensors are indexed
    lexicographically with the first factor most significant.
    """

    def __init__(self, algebra: AugCommAlgebra, factors: int):
        self.algebra = algebra
        self.factors = factors
        self.dim = algebra.dim ** factors
        self.unit_index = encode_tuple([algebra.unit_index] * factors, algebra.dim)

    def split(self, x):
        return decode_tuple(x, self.algebra.dim, self.factors)

    def multiply(self, x, y):
        A = self.algebra
        xs, ys = self.split(x), self.split(y)
        return tensor_vectors([A.mul[a][b] for a, b in zip(xs, ys)], [A.dim] * self.factors, A.modulus)

    def augment(self, x):
        value = 1
        for a in self.split(x):
            value *= self.algebra.augmentation[a]
        return value % self.algebra.modulus if self.algebra.modulus else value

    def comultiply(self, x):
        """Δ on a basis tensor, as {(left index, right index): coefficient}."""
        A = self.algebra
        if A.comul is None:
            raise InvalidAlgebra(f"{A.name} carries no comultiplication")
        out = {}
        for terms in itertools.product(*(A.comul[a].items() for a in self.split(x))):
            coeff = 1
            left, right = [], []
            for (l, r), c in terms:
                coeff *= c
                left.append(l)
                right.append(r)
            if A.modulus:
                coeff %= A.modulus
            if coeff:
                key = (encode_tuple(left, A.dim), encode_tuple(right, A.dim))
                out[key] = out.get(key, 0) + coeff
        return {k: (v % A.modulus if A.modulus else v) for k, v in out.items() if (v % A.modulus if A.modulus else v)}

    def antipode(self, x):
        A = self.algebra
        if A.antipode is None:
            raise InvalidAlgebra(f"{A.name} carries no antipode")
        return tensor_vectors([A.antipode[a] for a in self.split(x)], [A.dim] * self.factors, A.modulus)
