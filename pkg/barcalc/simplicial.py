"""
Simplicial sets, simplicial abelian groups, simplicial k-modules and their
bisimplicial versions, together with the diagonal, linearization, normalized
chains, homotopy and homology.

Every value is truncated: levels above `truncation` do not exist. Simplices
of level p are integers, their index in a canonical lexicographic
enumeration. Level tables are memoized on first use; two computations of the
same table produce the same tuple, so concurrent fills are harmless.
"""
from __future__ import annotations

import logging

import sympy
from dataclasses import dataclass, field

from barcalc.errors import (TruncationMismatch, TruncationTooLow, InfiniteLevel, InvalidInput, CompositionNotZero,
                            check_budget)
from barcalc.linalg import (IntMatrix, FGAbelianGroup, homology_z, homology_mod, homology_dims_fp)
from barcalc.rings import Coefficients, TensorPowerAlgebra, AugCommAlgebra, FiniteRing, decode_tuple, encode_tuple

logger = logging.getLogger("barcalc")

DEFAULT_CAP = 2 ** 22


def _check_level(p, truncation):
    if p < 0 or p > truncation:
        raise TruncationTooLow(f"level {p} is above truncation {truncation}")


########
# Simplicial sets
########
class FinSimplicialSet:
    """
    Simplicial set with finitely many simplices per level.

    Parameters
    ----------
    size: callable p -> number of p-simplices
    face: callable (p, i, x) -> index of d_i x in level p-1
    degen: callable (p, i, x) -> index of s_i x in level p+1
    truncation: highest stored level
    """

    def __init__(self, size, face, degen, truncation, name="X", cap=DEFAULT_CAP):
        self._size = size
        self._face = face
        self._degen = degen
        self.truncation = truncation
        self.name = name
        self.cap = cap
        self._overrides = {}
        self._cache = {}

    def size(self, p):
        _check_level(p, self.truncation)
        return self._size(p)

    def face(self, p, i, x):
        if (p, i, x) in self._overrides:
            return self._overrides[(p, i, x)]
        return self._face(p, i, x)

    def degen(self, p, i, x):
        return self._degen(p, i, x)

    def simplices(self, p):
        n = self.size(p)
        check_budget(n, self.cap, f"level {p} of {self.name}")
        return range(n)

    def face_table(self, p, i):
        key = ("face", p, i)
        if key not in self._cache:
            self._cache[key] = tuple(self.face(p, i, x) for x in self.simplices(p))
        return self._cache[key]

    def degenerate(self, p):
        """Degenerate p-simplices: the union of the images of s_0..s_{p-1}."""
        key = ("degenerate", p)
        if key not in self._cache:
            found = set()
            if p > 0:
                for x in self.simplices(p - 1):
                    for i in range(p):
                        found.add(self.degen(p - 1, i, x))
            self._cache[key] = frozenset(found)
        return self._cache[key]

    def nondegenerate(self, p):
        degenerate = self.degenerate(p)
        return [x for x in self.simplices(p) if x not in degenerate]

    def with_face(self, p, i, x, y):
        """Copy with d_i x replaced by y at level p (for fault injection)."""
        other = FinSimplicialSet(self._size, self._face, self._degen, self.truncation,
                                 name=f"{self.name} (corrupted)", cap=self.cap)
        other._overrides = dict(self._overrides)
        other._overrides[(p, i, x)] = y
        return other

    def __repr__(self):
        return f"FinSimplicialSet({self.name}, truncation={self.truncation})"


def point(truncation):
    return FinSimplicialSet(lambda p: 1, lambda p, i, x: 0, lambda p, i, x: 0, truncation, name="*")


########
# Simplicial abelian groups
########
class SimplicialAbGroup:
    """
    Simplicial abelian group whose level p is G^exponent(p), with structure
    maps given by integer matrices acting on coordinate vectors.
    """

    def __init__(self, coefficients: FGAbelianGroup, exponent, face_matrix, degen_matrix, truncation,
                 name="M", cap=DEFAULT_CAP):
        self.coefficients = coefficients
        self._exponent = exponent
        self._face_matrix = face_matrix
        self._degen_matrix = degen_matrix
        self.truncation = truncation
        self.name = name
        self.cap = cap
        self._cache = {}

    def exponent(self, p):
        _check_level(p, self.truncation)
        return self._exponent(p)

    def face_matrix(self, p, i):
        key = ("face", p, i)
        if key not in self._cache:
            _check_level(p, self.truncation)
            self._cache[key] = self._face_matrix(p, i)
        return self._cache[key]

    def degen_matrix(self, p, i):
        key = ("degen", p, i)
        if key not in self._cache:
            _check_level(p + 1, self.truncation)
            self._cache[key] = self._degen_matrix(p, i)
        return self._cache[key]

    def coordinate_module(self):
        """The free simplicial abelian group on the coordinates (G replaced by Z)."""
        def face_vector(p, i, x):
            return self._columns("face", p, i)[x]

        def degen_index(p, i, x):
            column = self._columns("degen", p, i)[x]
            if len(column) != 1 or next(iter(column.values())) != 1:
                raise InvalidInput(f"{self.name}: s_{i} at level {p} is not a basis map")
            return next(iter(column))

        return SimplicialKModule(0, self.exponent, face_vector, degen_index, self.truncation,
                                 name=f"Z-coordinates of {self.name}")

    def _columns(self, kind, p, i):
        key = ("columns", kind, p, i)
        if key not in self._cache:
            matrix = self.face_matrix(p, i) if kind == "face" else self.degen_matrix(p, i)
            self._cache[key] = matrix.columns()
        return self._cache[key]

    def as_set(self, cap=None):
        """Underlying simplicial set; elements are coordinate vectors over G."""
        G = self.coefficients
        order = G.order
        if order is None:
            raise InfiniteLevel(f"{self.name} has coefficients {G}, levels are infinite")
        cap = cap if cap is not None else self.cap
        moduli = G.torsion

        def size(p):
            return order ** self.exponent(p)

        def decode(p, x):
            coords = decode_tuple(x, order, self.exponent(p))
            return [_split_element(c, moduli) for c in coords]

        def act(p_out, columns, x, p_in):
            coords = decode(p_in, x)
            out = [[0] * len(moduli) for _ in range(self.exponent(p_out))]
            for c, column in enumerate(columns):
                for r, v in column.items():
                    target = out[r]
                    for k, m in enumerate(moduli):
                        target[k] = (target[k] + v * coords[c][k]) % m
            return encode_tuple([_join_element(e, moduli) for e in out], order)

        def face(p, i, x):
            return act(p - 1, self._columns("face", p, i), x, p)

        def degen(p, i, x):
            return act(p + 1, self._columns("degen", p, i), x, p)

        return FinSimplicialSet(size, face, degen, self.truncation, name=self.name, cap=cap)

    def __repr__(self):
        return f"SimplicialAbGroup({self.name}, G={self.coefficients}, truncation={self.truncation})"


def _split_element(code, moduli):
    parts = [0] * len(moduli)
    for k in range(len(moduli) - 1, -1, -1):
        code, parts[k] = divmod(code, moduli[k])
    return parts


def _join_element(parts, moduli):
    code = 0
    for v, m in zip(parts, moduli):
        code = code * m + v
    return code


########
# Simplicial k-modules
########
class SimplicialKModule:
    """
    Simplicial module over k = Z (modulus 0) or Z/m on finite bases.

    Faces act by sparse vectors; degeneracies map basis elements to basis
    elements, so degenerate elements span a sub-basis. A module built from a
    simplicial augmented commutative algebra also carries `level_algebra(p)`.
    """

    def __init__(self, modulus, dim, face_vector, degen_index, truncation, name="M",
                 level_algebra=None, comultiply=None, cap=DEFAULT_CAP):
        self.modulus = modulus
        self._dim = dim
        self._face_vector = face_vector
        self._degen_index = degen_index
        self.truncation = truncation
        self.name = name
        self._level_algebra = level_algebra
        self._comultiply = comultiply
        self.cap = cap
        self._cache = {}

    def dim(self, p):
        _check_level(p, self.truncation)
        return self._dim(p)

    def basis(self, p):
        n = self.dim(p)
        check_budget(n, self.cap, f"level {p} of {self.name}")
        return range(n)

    def face_vector(self, p, i, x):
        vector = self._face_vector(p, i, x)
        if self.modulus:
            vector = {k: v % self.modulus for k, v in vector.items() if v % self.modulus}
        return vector

    def degen_index(self, p, i, x):
        return self._degen_index(p, i, x)

    @property
    def is_algebra(self):
        return self._level_algebra is not None

    def level_algebra(self, p):
        if self._level_algebra is None:
            raise InvalidInput(f"{self.name} carries no levelwise algebra structure")
        return self._level_algebra(p)

    def comultiply(self, p, x):
        if self._comultiply is None:
            raise InvalidInput(f"{self.name} carries no comultiplication")
        return self._comultiply(p, x)

    def face_matrix(self, p, i):
        key = ("face", p, i)
        if key not in self._cache:
            self._cache[key] = IntMatrix.from_columns(self.dim(p - 1),
                                                      [self.face_vector(p, i, x) for x in self.basis(p)])
        return self._cache[key]

    def degen_matrix(self, p, i):
        key = ("degen", p, i)
        if key not in self._cache:
            self._cache[key] = IntMatrix.from_columns(self.dim(p + 1),
                                                      [{self.degen_index(p, i, x): 1} for x in self.basis(p)])
        return self._cache[key]

    def degenerate(self, p):
        key = ("degenerate", p)
        if key not in self._cache:
            found = set()
            if p > 0:
                for x in self.basis(p - 1):
                    for i in range(p):
                        found.add(self.degen_index(p - 1, i, x))
            self._cache[key] = frozenset(found)
        return self._cache[key]

    def nondegenerate(self, p):
        degenerate = self.degenerate(p)
        return [x for x in self.basis(p) if x not in degenerate]

    def __repr__(self):
        return f"SimplicialKModule({self.name}, k={Coefficients(self.modulus, False)}, truncation={self.truncation})"


def tensor_product(X: SimplicialKModule, Y: SimplicialKModule) -> SimplicialKModule:
    """Levelwise tensor product; the pair (a, b) has index a·dim Y_p + b."""
    if X.modulus != Y.modulus:
        raise InvalidInput("tensor product needs a shared base ring")
    truncation = min(X.truncation, Y.truncation)

    def face_vector(p, i, x):
        a, b = divmod(x, Y.dim(p))
        n = Y.dim(p - 1)
        out = {}
        for u, s in X.face_vector(p, i, a).items():
            for v, t in Y.face_vector(p, i, b).items():
                out[u * n + v] = out.get(u * n + v, 0) + s * t
        return out

    def degen_index(p, i, x):
        a, b = divmod(x, Y.dim(p))
        return X.degen_index(p, i, a) * Y.dim(p + 1) + Y.degen_index(p, i, b)

    return SimplicialKModule(X.modulus, lambda p: X.dim(p) * Y.dim(p), face_vector, degen_index, truncation,
                             name=f"{X.name} ⊗ {Y.name}")


########
# Bisimplicial objects
########
class BisimplicialSet:
    """
    Bisimplicial set; level (p, q) has horizontal degree p and vertical degree q.
    """

    def __init__(self, size, hface, vface, hdegen, vdegen, truncation, name="X", cap=DEFAULT_CAP):
        self._size = size
        self.hface = hface
        self.vface = vface
        self.hdegen = hdegen
        self.vdegen = vdegen
        self.truncation = truncation
        self.name = name
        self.cap = cap

    def size(self, p, q):
        _check_level(p, self.truncation)
        _check_level(q, self.truncation)
        return self._size(p, q)

    def simplices(self, p, q):
        n = self.size(p, q)
        check_budget(n, self.cap, f"level ({p}, {q}) of {self.name}")
        return range(n)


class BisimplicialAbGroup:
    """Bisimplicial abelian group in coordinates, structure maps as integer matrices."""

    def __init__(self, coefficients, exponent, hface, vface, hdegen, vdegen, truncation, name="M",
                 cap=DEFAULT_CAP):
        self.coefficients = coefficients
        self.exponent = exponent
        self._maps = {"hface": hface, "vface": vface, "hdegen": hdegen, "vdegen": vdegen}
        self.truncation = truncation
        self.name = name
        self.cap = cap
        self._cache = {}

    def matrix(self, kind, p, q, i):
        key = (kind, p, q, i)
        if key not in self._cache:
            self._cache[key] = self._maps[kind](p, q, i)
        return self._cache[key]

    def hface_matrix(self, p, q, i):
        return self.matrix("hface", p, q, i)

    def vface_matrix(self, p, q, i):
        return self.matrix("vface", p, q, i)

    def hdegen_matrix(self, p, q, i):
        return self.matrix("hdegen", p, q, i)

    def vdegen_matrix(self, p, q, i):
        return self.matrix("vdegen", p, q, i)

    def as_set(self, cap=None):
        G = self.coefficients
        order = G.order
        if order is None:
            raise InfiniteLevel(f"{self.name} has coefficients {G}, levels are infinite")
        moduli = G.torsion
        triplets = {}

        def act(kind, p, q, i, x):
            key = (kind, p, q, i)
            if key not in triplets:
                matrix = self.matrix(kind, p, q, i)
                triplets[key] = (matrix.rows, list(matrix.triplets()))
            rows, entries = triplets[key]
            coords = [_split_element(c, moduli) for c in decode_tuple(x, order, self.exponent(p, q))]
            out = [[0] * len(moduli) for _ in range(rows)]
            for r, c, v in entries:
                for k, m in enumerate(moduli):
                    out[r][k] = (out[r][k] + v * coords[c][k]) % m
            return encode_tuple([_join_element(e, moduli) for e in out], order)

        return BisimplicialSet(
            lambda p, q: order ** self.exponent(p, q),
            lambda p, q, i, x: act("hface", p, q, i, x),
            lambda p, q, i, x: act("vface", p, q, i, x),
            lambda p, q, i, x: act("hdegen", p, q, i, x),
            lambda p, q, i, x: act("vdegen", p, q, i, x),
            self.truncation, name=self.name, cap=cap if cap is not None else self.cap)


class BisimplicialModule:
    """Bisimplicial k-module; faces by sparse vectors, degeneracies as basis maps."""

    def __init__(self, modulus, dim, hface, vface, hdegen, vdegen, truncation, name="M", cap=DEFAULT_CAP):
        self.modulus = modulus
        self._dim = dim
        self._hface = hface
        self._vface = vface
        self.hdegen = hdegen
        self.vdegen = vdegen
        self.truncation = truncation
        self.name = name
        self.cap = cap

    def dim(self, p, q):
        _check_level(p, self.truncation)
        _check_level(q, self.truncation)
        return self._dim(p, q)

    def basis(self, p, q):
        n = self.dim(p, q)
        check_budget(n, self.cap, f"level ({p}, {q}) of {self.name}")
        return range(n)

    def _reduce(self, vector):
        if self.modulus:
            return {k: v % self.modulus for k, v in vector.items() if v % self.modulus}
        return {k: v for k, v in vector.items() if v}

    def hface(self, p, q, i, x):
        return self._reduce(self._hface(p, q, i, x))

    def vface(self, p, q, i, x):
        return self._reduce(self._vface(p, q, i, x))


def constant_bisimplicial(Y, direction="vertical"):
    """
    Bisimplicial object constant in one direction: with direction "vertical"
    level (p, q) is Y_p and the vertical maps are identities.
    """
    horizontal = direction == "vertical"

    def pick(p, q):
        return p if horizontal else q

    if isinstance(Y, FinSimplicialSet):
        ident = lambda p, q, i, x: x
        return BisimplicialSet(
            lambda p, q: Y.size(pick(p, q)),
            (lambda p, q, i, x: Y.face(p, i, x)) if horizontal else ident,
            ident if horizontal else (lambda p, q, i, x: Y.face(q, i, x)),
            (lambda p, q, i, x: Y.degen(p, i, x)) if horizontal else ident,
            ident if horizontal else (lambda p, q, i, x: Y.degen(q, i, x)),
            Y.truncation, name=f"c_{direction}({Y.name})", cap=Y.cap)
    if isinstance(Y, SimplicialKModule):
        ident_v = lambda p, q, i, x: {x: 1}
        ident = lambda p, q, i, x: x
        return BisimplicialModule(
            Y.modulus, lambda p, q: Y.dim(pick(p, q)),
            (lambda p, q, i, x: Y.face_vector(p, i, x)) if horizontal else ident_v,
            ident_v if horizontal else (lambda p, q, i, x: Y.face_vector(q, i, x)),
            (lambda p, q, i, x: Y.degen_index(p, i, x)) if horizontal else ident,
            ident if horizontal else (lambda p, q, i, x: Y.degen_index(q, i, x)),
            Y.truncation, name=f"c_{direction}({Y.name})", cap=Y.cap)
    raise InvalidInput(f"cannot make a bisimplicial constant from {type(Y).__name__}")


########
# Constructions
########
def constant(S, truncation=4):
    """
    Constant simplicial object: every level is S and every structure map is
    the identity.

    S may be a number of points, a FiniteRing (its underlying set), an
    FGAbelianGroup, or an AugCommAlgebra.
    """
    ident = lambda p, i, x: x
    if isinstance(S, int):
        return FinSimplicialSet(lambda p: S, ident, ident, truncation, name=f"c({S} points)")
    if isinstance(S, FiniteRing):
        return FinSimplicialSet(lambda p: S.size, ident, ident, truncation, name=f"c({S.name})")
    if isinstance(S, FGAbelianGroup):
        one = IntMatrix.identity(1)
        return SimplicialAbGroup(S, lambda p: 1, lambda p, i: one, lambda p, i: one, truncation,
                                 name=f"c({S})")
    if isinstance(S, AugCommAlgebra):
        return SimplicialKModule(S.modulus, lambda p: S.dim, lambda p, i, x: {x: 1}, ident, truncation,
                                 name=f"c({S.name})", level_algebra=lambda p: TensorPowerAlgebra(S, 1))
    raise InvalidInput(f"cannot build a constant simplicial object from {type(S).__name__}")


def cartesian_product(X: FinSimplicialSet, Y: FinSimplicialSet) -> FinSimplicialSet:
    """Levelwise product; the pair (x, y) has index x·|Y_p| + y."""
    if X.truncation != Y.truncation:
        raise TruncationMismatch(f"truncations {X.truncation} and {Y.truncation} differ")

    def face(p, i, z):
        x, y = divmod(z, Y.size(p))
        return X.face(p, i, x) * Y.size(p - 1) + Y.face(p, i, y)

    def degen(p, i, z):
        x, y = divmod(z, Y.size(p))
        return X.degen(p, i, x) * Y.size(p + 1) + Y.degen(p, i, y)

    return FinSimplicialSet(lambda p: X.size(p) * Y.size(p), face, degen, X.truncation,
                            name=f"{X.name} × {Y.name}", cap=min(X.cap, Y.cap))


def swap(X: FinSimplicialSet, Y: FinSimplicialSet, p, z):
    """The symmetry X × Y → Y × X on a p-simplex."""
    x, y = divmod(z, Y.size(p))
    return y * X.size(p) + x


def diagonal(X):
    """
    Diagonal of a bisimplicial object: level p is level (p, p),
    d_i = d_i^h ∘ d_i^v and s_i = s_i^h ∘ s_i^v.
    """
    if isinstance(X, BisimplicialSet):
        return FinSimplicialSet(
            lambda p: X.size(p, p),
            lambda p, i, x: X.hface(p, p - 1, i, X.vface(p, p, i, x)),
            lambda p, i, x: X.hdegen(p, p + 1, i, X.vdegen(p, p, i, x)),
            X.truncation, name=f"diag({X.name})", cap=X.cap)
    if isinstance(X, BisimplicialModule):
        def face_vector(p, i, x):
            out = {}
            for y, a in X.vface(p, p, i, x).items():
                for z, b in X.hface(p, p - 1, i, y).items():
                    out[z] = out.get(z, 0) + a * b
            return out

        return SimplicialKModule(
            X.modulus, lambda p: X.dim(p, p), face_vector,
            lambda p, i, x: X.hdegen(p, p + 1, i, X.vdegen(p, p, i, x)),
            X.truncation, name=f"diag({X.name})", cap=X.cap)
    if isinstance(X, BisimplicialAbGroup):
        return SimplicialAbGroup(
            X.coefficients, lambda p: X.exponent(p, p),
            lambda p, i: X.hface_matrix(p, p - 1, i) @ X.vface_matrix(p, p, i),
            lambda p, i: X.hdegen_matrix(p, p + 1, i) @ X.vdegen_matrix(p, p, i),
            X.truncation, name=f"diag({X.name})", cap=X.cap)
    raise InvalidInput(f"cannot take the diagonal of {type(X).__name__}")


def linearize(X, k=Coefficients()):
    """
    Free k-module functor k[-], applied levelwise. The result carries the
    diagonal comultiplication Δ(x) = x ⊗ x; the counit sends x to 1.
    """
    modulus = k.modulus if isinstance(k, Coefficients) else int(k)
    if isinstance(X, (SimplicialAbGroup, BisimplicialAbGroup)):
        X = X.as_set()
    if isinstance(X, FinSimplicialSet):
        return SimplicialKModule(modulus, X.size, lambda p, i, x: {X.face(p, i, x): 1}, X.degen,
                                 X.truncation, name=f"k[{X.name}]", comultiply=lambda p, x: {(x, x): 1},
                                 cap=X.cap)
    if isinstance(X, BisimplicialSet):
        return BisimplicialModule(modulus, X.size,
                                  lambda p, q, i, x: {X.hface(p, q, i, x): 1},
                                  lambda p, q, i, x: {X.vface(p, q, i, x): 1},
                                  X.hdegen, X.vdegen, X.truncation, name=f"k[{X.name}]", cap=X.cap)
    raise InfiniteLevel(f"cannot linearize {type(X).__name__}")


def counit(p, x):
    """Counit of a linearized simplicial set on a basis simplex."""
    return 1


########
# Chain complexes
########
@dataclass
class ChainComplex:
    """
    Nonnegatively graded complex over Z (modulus 0) or Z/m, stored through
    degree `top`. differentials[i] maps degree i to degree i-1.
    """
    modulus: int
    ranks: list
    differentials: dict
    name: str = "C"
    basis: list = field(default=None, repr=False)
    check: bool = True

    def __post_init__(self):
        for i in range(1, self.top + 1):
            d = self.differential(i)
            if d.shape != (self.ranks[i - 1], self.ranks[i]):
                raise InvalidInput(f"{self.name}: differential {i} has shape {d.shape}")
        if self.check:
            for i in range(2, self.top + 1):
                if not (self.differential(i - 1) @ self.differential(i)).mod(self.modulus).is_zero():
                    raise CompositionNotZero(f"{self.name}: ∂∂ != 0 in degree {i}")

    @property
    def top(self):
        return len(self.ranks) - 1

    def differential(self, i):
        if i <= 0:
            return IntMatrix.zero(0, self.ranks[0] if self.ranks else 0)
        if i > self.top:
            raise TruncationTooLow(f"{self.name} stops at degree {self.top}")
        return self.differentials.get(i, IntMatrix.zero(self.ranks[i - 1], self.ranks[i]))

    def homology(self, i, coefficients=None):
        """H_i with the given coefficients (default: the complex's own ring)."""
        if i + 1 > self.top:
            raise TruncationTooLow(f"H_{i} needs degree {i + 1}, {self.name} stops at {self.top}")
        coefficients = coefficients or Coefficients(self.modulus, False)
        d_in, d_out = self.differential(i + 1), self.differential(i)
        if coefficients.field:
            dim = homology_dims_fp(d_in, d_out, coefficients.modulus)
            return FGAbelianGroup.from_cyclic([coefficients.modulus] * dim)
        if coefficients.modulus:
            return homology_mod(d_in, d_out, coefficients.modulus)
        if self.modulus:
            raise InvalidInput(f"{self.name} is over Z/{self.modulus}, integral homology is undefined")
        return homology_z(d_in, d_out)

    def homology_dims(self, p, up_to=None):
        """F_p-dimensions of H_0..H_{up_to} (default top - 1)."""
        up_to = self.top - 1 if up_to is None else up_to
        return [homology_dims_fp(self.differential(i + 1), self.differential(i), p) for i in range(up_to + 1)]


def _chains(M, up_to, normalized):
    if isinstance(M, SimplicialAbGroup):
        M = M.coordinate_module()
    if up_to > M.truncation:
        raise TruncationTooLow(f"chains through degree {up_to} need truncation {up_to}, {M.name} has {M.truncation}")
    bases = [M.nondegenerate(p) if normalized else list(M.basis(p)) for p in range(up_to + 1)]
    differentials = {}
    for p in range(1, up_to + 1):
        position = {x: r for r, x in enumerate(bases[p - 1])}
        columns = []
        for x in bases[p]:
            column = {}
            for i in range(p + 1):
                sign = -1 if i % 2 else 1
                for y, v in M.face_vector(p, i, x).items():
                    r = position.get(y)
                    if r is not None:
                        column[r] = column.get(r, 0) + sign * v
            columns.append(column)
        differentials[p] = IntMatrix.from_columns(len(bases[p - 1]), columns).mod(M.modulus)
        logger.debug(f"{'normalized' if normalized else 'unnormalized'} chains of {M.name}: "
                     f"degree {p} rank {len(bases[p])}")
    return ChainComplex(M.modulus, [len(b) for b in bases], differentials,
                        name=f"{'N' if normalized else 'C'}({M.name})", basis=bases)


def normalized_chains(M, up_to) -> ChainComplex:
    """
    Normalized Moore complex: level p modulo the degenerate sub-basis, with
    the induced alternating-sum differential.
    """
    return _chains(M, up_to, normalized=True)


def unnormalized_chains(M, up_to) -> ChainComplex:
    return _chains(M, up_to, normalized=False)


def homotopy_groups(M, i_max):
    """
    π_0..π_{i_max} as homology of the normalized complex. For a simplicial
    abelian group the coordinate complex is computed once and tensored with
    each cyclic factor of G.
    """
    if M.truncation < i_max + 1:
        raise TruncationTooLow(f"π_{i_max} needs truncation {i_max + 1}, {M.name} has {M.truncation}")
    if isinstance(M, SimplicialAbGroup):
        C = normalized_chains(M, i_max + 1)
        result = []
        for i in range(i_max + 1):
            group = FGAbelianGroup()
            for m in M.coefficients.cyclic_factors():
                part = C.homology(i) if m == 0 else C.homology(i, Coefficients(m, False))
                group = group.direct_sum(part)
            result.append(group)
        return result
    C = normalized_chains(M, i_max + 1)
    k = Coefficients(M.modulus, _is_prime(M.modulus))
    return [C.homology(i, k) for i in range(i_max + 1)]


def _is_prime(m):
    return bool(m) and sympy.isprime(m)


def homology(X, coeff: Coefficients, i_max):
    """H_i(k[X]) for i ≤ i_max, through linearize and normalized chains."""
    if X.truncation < i_max + 1:
        raise TruncationTooLow(f"H_{i_max} needs truncation {i_max + 1}, {X.name} has {X.truncation}")
    # integer lift: Z/m and F_p homology are computed from the integral complex
    C = normalized_chains(linearize(X, Coefficients()), i_max + 1)
    return [C.homology(i, coeff) for i in range(i_max + 1)]


########
# Identity checking
########
@dataclass(frozen=True)
class Violation:
    level: object
    identity: str
    i: int
    j: int
    witness: object


@dataclass
class IdentityReport:
    name: str
    max_level: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _canonical(vector):
    return tuple(sorted((k, v) for k, v in vector.items() if v))


def _check_simplicial(elements, face, degen, d, report, level_label=lambda p: p):
    """Exhaustive check of the simplicial identities through level d."""
    def record(p, identity, i, j, x):
        report.violations.append(Violation(level_label(p), identity, i, j, x))

    for p in range(d + 1):
        for x in elements(p):
            if p >= 2:
                for j in range(1, p + 1):
                    for i in range(j):
                        if face(p - 1, i, face(p, j, x)) != face(p - 1, j - 1, face(p, i, x)):
                            record(p, "d_i d_j = d_(j-1) d_i", i, j, x)
            if p + 1 <= d:
                for j in range(p + 1):
                    y = degen(p, j, x)
                    for i in range(p + 2):
                        lhs = face(p + 1, i, y)
                        if i < j:
                            rhs = degen(p - 1, j - 1, face(p, i, x))
                            name = "d_i s_j = s_(j-1) d_i"
                        elif i in (j, j + 1):
                            rhs = x
                            name = "d_j s_j = d_(j+1) s_j = id"
                        else:
                            rhs = degen(p - 1, j, face(p, i - 1, x))
                            name = "d_i s_j = s_j d_(i-1)"
                        if lhs != rhs:
                            record(p, name, i, j, x)
            if p + 2 <= d:
                for j in range(p + 1):
                    for i in range(j + 1):
                        if degen(p + 1, i, degen(p, j, x)) != degen(p + 1, j + 1, degen(p, i, x)):
                            record(p, "s_i s_j = s_(j+1) s_i", i, j, x)


def _module_ops(face_vector, degen_index):
    """Lift basis-level maps to canonical sparse vectors."""
    def face(p, i, vec):
        out = {}
        for x, a in vec:
            for y, b in face_vector(p, i, x).items():
                out[y] = out.get(y, 0) + a * b
        return _canonical(out)

    def degen(p, i, vec):
        out = {}
        for x, a in vec:
            y = degen_index(p, i, x)
            out[y] = out.get(y, 0) + a
        return _canonical(out)

    return face, degen


def _matrix_ops(face_matrix, degen_matrix):
    def face(p, i, vec):
        return _canonical(face_matrix(p, i).apply(dict(vec)))

    def degen(p, i, vec):
        return _canonical(degen_matrix(p, i).apply(dict(vec)))

    return face, degen


def verify_identities(X, d) -> IdentityReport:
    """
    Exhaustively check the simplicial identities of X through level d; for
    bisimplicial X also the commutation of horizontal and vertical maps.
    Violations are returned as data.
    """
    if d > X.truncation:
        raise TruncationTooLow(f"cannot check level {d} of {X.name} (truncation {X.truncation})")
    report = IdentityReport(X.name, d)

    if isinstance(X, FinSimplicialSet):
        _check_simplicial(X.simplices, X.face, X.degen, d, report)
    elif isinstance(X, SimplicialKModule):
        mod = X.modulus
        face, degen = _module_ops(X.face_vector, X.degen_index)
        if mod:
            face = _reducing(face, mod)
        _check_simplicial(lambda p: [((x, 1),) for x in X.basis(p)], face, degen, d, report)
    elif isinstance(X, SimplicialAbGroup):
        face, degen = _matrix_ops(X.face_matrix, X.degen_matrix)
        _check_simplicial(lambda p: [((x, 1),) for x in range(X.exponent(p))], face, degen, d, report)
    elif isinstance(X, BisimplicialSet):
        _check_bisimplicial(lambda p, q: X.simplices(p, q), X.hface, X.vface, X.hdegen, X.vdegen, d, report)
    elif isinstance(X, BisimplicialModule):
        hf, hd = _module_ops_bi(X.hface, X.hdegen)
        vf, vd = _module_ops_bi(X.vface, X.vdegen)
        _check_bisimplicial(lambda p, q: [((x, 1),) for x in X.basis(p, q)], hf, vf, hd, vd, d, report)
    elif isinstance(X, BisimplicialAbGroup):
        def lift(matrix_fn):
            return lambda p, q, i, vec: _canonical(matrix_fn(p, q, i).apply(dict(vec)))
        _check_bisimplicial(lambda p, q: [((x, 1),) for x in range(X.exponent(p, q))],
                            lift(X.hface_matrix), lift(X.vface_matrix),
                            lift(X.hdegen_matrix), lift(X.vdegen_matrix), d, report)
    else:
        raise InvalidInput(f"cannot verify identities of {type(X).__name__}")
    if report.violations:
        logger.info(f"{X.name}: {len(report.violations)} simplicial identity violations")
    return report


def _reducing(op, mod):
    def reduced(p, i, vec):
        return _canonical({k: v % mod for k, v in op(p, i, vec)})
    return reduced


def _module_ops_bi(face_vector, degen_index):
    def face(p, q, i, vec):
        out = {}
        for x, a in vec:
            for y, b in face_vector(p, q, i, x).items():
                out[y] = out.get(y, 0) + a * b
        return _canonical(out)

    def degen(p, q, i, vec):
        out = {}
        for x, a in vec:
            y = degen_index(p, q, i, x)
            out[y] = out.get(y, 0) + a
        return _canonical(out)

    return face, degen


def _check_bisimplicial(elements, hface, vface, hdegen, vdegen, d, report):
    for q in range(d + 1):
        _check_simplicial(lambda p: elements(p, q),
                          lambda p, i, x: hface(p, q, i, x), lambda p, i, x: hdegen(p, q, i, x),
                          d, report, level_label=lambda p: ("horizontal", p, q))
    for p in range(d + 1):
        _check_simplicial(lambda q: elements(p, q),
                          lambda q, i, x: vface(p, q, i, x), lambda q, i, x: vdegen(p, q, i, x),
                          d, report, level_label=lambda q: ("vertical", p, q))
    for p in range(d + 1):
        for q in range(d + 1):
            for x in elements(p, q):
                for i in range(p + 1):
                    for j in range(q + 1):
                        if p >= 1 and q >= 1 and \
                                hface(p, q - 1, i, vface(p, q, j, x)) != vface(p - 1, q, j, hface(p, q, i, x)):
                            report.violations.append(Violation((p, q), "d^h d^v = d^v d^h", i, j, x))
                        if p + 1 <= d and q >= 1 and \
                                hdegen(p, q - 1, i, vface(p, q, j, x)) != vface(p + 1, q, j, hdegen(p, q, i, x)):
                            report.violations.append(Violation((p, q), "s^h d^v = d^v s^h", i, j, x))
                        if q + 1 <= d and p >= 1 and \
                                hface(p, q + 1, i, vdegen(p, q, j, x)) != vdegen(p - 1, q, j, hface(p, q, i, x)):
                            report.violations.append(Violation((p, q), "d^h s^v = s^v d^h", i, j, x))
                        if p + 1 <= d and q + 1 <= d and \
                                hdegen(p, q + 1, i, vdegen(p, q, j, x)) != vdegen(p + 1, q, j, hdegen(p, q, i, x)):
                            report.violations.append(Violation((p, q), "s^h s^v = s^v s^h", i, j, x))


def compare_modules(M: SimplicialKModule, N: SimplicialKModule, up_to, identify=None):
    """
    Compare faces and degeneracies of two simplicial modules through level
    up_to along a basis identification (default: the identity). Returns a
    list of mismatch descriptions.
    """
    identify = identify or (lambda p, x: x)
    mismatches = []
    for p in range(up_to + 1):
        if M.dim(p) != N.dim(p):
            mismatches.append(f"level {p}: dimensions {M.dim(p)} != {N.dim(p)}")
            continue
        for x in M.basis(p):
            y = identify(p, x)
            if p >= 1:
                for i in range(p + 1):
                    moved = {identify(p - 1, z): v for z, v in M.face_vector(p, i, x).items()}
                    if _canonical(moved) != _canonical(N.face_vector(p, i, y)):
                        mismatches.append(f"level {p}: d_{i} differs on basis element {x}")
            if p + 1 <= up_to:
                for i in range(p + 1):
                    if identify(p + 1, M.degen_index(p, i, x)) != N.degen_index(p, i, y):
                        mismatches.append(f"level {p}: s_{i} differs on basis element {x}")
    return mismatches
