"""
The simplicial bar construction B_• for abelian groups and augmented
commutative algebras, the realized bar B = diag ∘ B_• and its iterates B^n.

Level p of B^nS has p^n leaves, indexed by paths (j_1, ..., j_n) with j_1 the
outermost bar level and flattened lexicographically.
"""
import functools
import logging

from barcalc.errors import (TruncationTooLow, IndexOutOfRange, ShapeMismatch, InvalidInput, InfiniteLevel,
                            check_budget)
from barcalc.linalg import IntMatrix, FGAbelianGroup
from barcalc.rings import (RingSpec, FiniteRing, AugCommAlgebra, TensorPowerAlgebra, encode_tuple, decode_tuple,
                           tensor_vectors)
from barcalc.simplicial import (SimplicialAbGroup, SimplicialKModule, BisimplicialAbGroup, FinSimplicialSet,
                                constant, DEFAULT_CAP)

logger = logging.getLogger("barcalc")


########
# B_• on one level
########
@functools.lru_cache(maxsize=None)
def bar_face_matrix(p, i):
    """Face d_i : G^p → G^(p-1) of the nerve as a 0/1 matrix."""
    entries = []
    for j in range(p):
        if (i == 0 and j == 0) or (i == p and j == p - 1):
            continue
        entries.append((j if j < i else j - 1, j, 1))
    return IntMatrix(p - 1, p, entries)


@functools.lru_cache(maxsize=None)
def bar_degen_matrix(p, i):
    """Degeneracy s_i : G^p → G^(p+1); leaf i of the target is the inserted zero."""
    return IntMatrix(p + 1, p, [(j if j < i else j + 1, j, 1) for j in range(p)])


def _leaf_map(matrix):
    """Target leaf of every source leaf of a 0/1 structure matrix, -1 when dropped."""
    targets = [-1] * matrix.cols
    for r, c, v in matrix.triplets():
        if v != 1 or targets[c] != -1:
            raise InvalidInput("structure matrix is not a leaf map")
        targets[c] = r
    return tuple(targets)


def _group_of(G):
    if isinstance(G, RingSpec):
        return G.additive_group()
    if isinstance(G, FiniteRing):
        return G.additive_group()
    if isinstance(G, FGAbelianGroup):
        return G
    raise InvalidInput(f"cannot read an abelian group from {type(G).__name__}")


def bar_simplicial_group(G, truncation, cap=DEFAULT_CAP):
    """
    The nerve B_•G: level p is G^p, inner faces add neighbours, the outer
    faces drop an end, and s_i inserts 0 at position i.
    """
    if truncation < 1:
        raise TruncationTooLow("the nerve needs truncation at least 1")
    return iterated_bar(G, 1, truncation, cap=cap)


def bar_simplicial_algebra(A: AugCommAlgebra, truncation):
    """B_•A: level p is A^{⊗p}; d_0 and d_p apply ε, inner faces multiply."""
    if truncation < 1:
        raise TruncationTooLow("the bar construction needs truncation at least 1")
    return iterated_algebra_bar(A, 1, truncation)


def _bar_face_on_factors(L, factors, p, i):
    """
    Horizontal face d_i on a basis tensor x_1 ⊗ ... ⊗ x_p of L^{⊗p}, where L
    is a TensorPowerAlgebra; returns a sparse vector over L^{⊗(p-1)}.
    """
    modulus = L.algebra.modulus
    if i == 0:
        scale, rest = L.augment(factors[0]), [{x: 1} for x in factors[1:]]
    elif i == p:
        scale, rest = L.augment(factors[-1]), [{x: 1} for x in factors[:-1]]
    else:
        scale = 1
        rest = [{x: 1} for x in factors[:i - 1]] + [L.multiply(factors[i - 1], factors[i])] \
            + [{x: 1} for x in factors[i + 1:]]
    if modulus:
        scale %= modulus
    if not scale:
        return {}
    out = tensor_vectors(rest, [L.dim] * (p - 1), modulus)
    if scale != 1:
        out = {k: (v * scale) % modulus if modulus else v * scale for k, v in out.items()}
    return out


########
# Realized bar
########
def bar(M, truncation=None):
    """
    B(M) = diag(B_• M): level p is (M_p)^p with the diagonal structure maps.

    For a simplicial abelian group the result is again given by matrices,
    H ⊗ F with the bar index outermost. For a simplicial algebra each level
    is a tensor power of one augmented algebra.
    """
    truncation = M.truncation if truncation is None else truncation
    if truncation > M.truncation:
        raise TruncationTooLow(f"B({M.name}) through level {truncation} needs {M.name} through {truncation}")

    if isinstance(M, SimplicialAbGroup):
        return SimplicialAbGroup(
            M.coefficients, lambda p: p * M.exponent(p),
            lambda p, i: bar_face_matrix(p, i).kron(M.face_matrix(p, i)),
            lambda p, i: bar_degen_matrix(p, i).kron(M.degen_matrix(p, i)),
            truncation, name=f"B({M.name})", cap=M.cap)

    if isinstance(M, SimplicialKModule) and M.is_algebra:
        def level_algebra(p):
            inner = M.level_algebra(p)
            if not isinstance(inner, TensorPowerAlgebra):
                raise InvalidInput(f"{M.name} is not levelwise a tensor power algebra")
            return TensorPowerAlgebra(inner.algebra, inner.factors * p)

        def face_vector(p, i, x):
            factors = decode_tuple(x, M.dim(p), p)
            # vertical face on every factor, then the horizontal bar face
            out = {}
            for key, c in tensor_vectors([M.face_vector(p, i, f) for f in factors],
                                         [M.dim(p - 1)] * p, M.modulus).items():
                inner = decode_tuple(key, M.dim(p - 1), p)
                for y, v in _bar_face_on_factors(M.level_algebra(p - 1), inner, p, i).items():
                    out[y] = out.get(y, 0) + c * v
            return out

        def degen_index(p, i, x):
            factors = [M.degen_index(p, i, f) for f in decode_tuple(x, M.dim(p), p)]
            factors.insert(i, M.level_algebra(p + 1).unit_index)
            return encode_tuple(factors, M.dim(p + 1))

        comultiply = None
        if M.level_algebra(0).algebra.comul is not None:
            comultiply = lambda p, x: level_algebra(p).comultiply(x)
        return SimplicialKModule(M.modulus, lambda p: M.dim(p) ** p, face_vector, degen_index, truncation,
                                 name=f"B({M.name})", level_algebra=level_algebra, comultiply=comultiply,
                                 cap=M.cap)

    raise InvalidInput(f"{M.name} is not levelwise an augmented commutative monoid")


def levelwise_bar(M: SimplicialAbGroup) -> BisimplicialAbGroup:
    """
    B_• applied in every level of M: level (p, q) is (M_q)^p, horizontal maps
    from the bar construction and vertical maps from M.
    """
    def ident(n):
        return IntMatrix.identity(n)

    return BisimplicialAbGroup(
        M.coefficients, lambda p, q: p * M.exponent(q),
        lambda p, q, i: bar_face_matrix(p, i).kron(ident(M.exponent(q))),
        lambda p, q, i: ident(p).kron(M.face_matrix(q, i)),
        lambda p, q, i: bar_degen_matrix(p, i).kron(ident(M.exponent(q))),
        lambda p, q, i: ident(p).kron(M.degen_matrix(q, i)),
        M.truncation, name=f"B_•({M.name})", cap=M.cap)


########
# Iterated bar
########
class IteratedBar(SimplicialAbGroup):
    """
    B^n of the additive group of a ring, with the ring kept so that the set
    view encodes leaves as ring elements.
    """

    def __init__(self, base: SimplicialAbGroup, ring_spec, ring, n):
        super().__init__(base.coefficients, base.exponent, base.face_matrix, base.degen_matrix, base.truncation,
                         name=base.name, cap=base.cap)
        self.ring_spec = ring_spec
        self.ring = ring
        self.n = n

    def leaves(self, p):
        return p ** self.n

    def leaf_face_map(self, p, i):
        key = ("leaf-face", p, i)
        if key not in self._cache:
            self._cache[key] = _leaf_map(self.face_matrix(p, i))
        return self._cache[key]

    def leaf_degen_map(self, p, i):
        key = ("leaf-degen", p, i)
        if key not in self._cache:
            self._cache[key] = _leaf_map(self.degen_matrix(p, i))
        return self._cache[key]

    def as_set(self, cap=None):
        if self.ring is None:
            if self.coefficients.order is None:
                raise InfiniteLevel(f"{self.name} is built on Z, its levels are infinite")
            return super().as_set(cap)
        S = self.ring
        cap = cap if cap is not None else self.cap

        def apply(targets, x, n_in, n_out):
            out = [S.zero] * n_out
            for leaf, t in zip(decode_tuple(x, S.size, n_in), targets):
                if t >= 0:
                    out[t] = S.add[out[t]][leaf]
            return encode_tuple(out, S.size)

        def size(p):
            return S.size ** self.leaves(p)

        def face(p, i, x):
            return apply(self.leaf_face_map(p, i), x, self.leaves(p), self.leaves(p - 1))

        def degen(p, i, x):
            return apply(self.leaf_degen_map(p, i), x, self.leaves(p), self.leaves(p + 1))

        return FinSimplicialSet(size, face, degen, self.truncation, name=self.name, cap=cap)


def iterated_bar(S, n, truncation, cap=DEFAULT_CAP):
    """
    B^nS as a simplicial abelian group; B^0 is the constant object. Level p
    has exponent p^n. S may be a RingSpec, a FiniteRing or an FGAbelianGroup.
    """
    if n < 0:
        raise InvalidInput("n must be nonnegative")
    if truncation < 1:
        raise TruncationTooLow("iterated bar needs truncation at least 1")
    ring_spec = S if isinstance(S, RingSpec) else None
    ring = S if isinstance(S, FiniteRing) else None
    if ring_spec is not None and ring_spec.is_finite:
        ring = ring_spec.finite_ring()
    G = _group_of(S)
    M = constant(G, truncation)
    M.cap = cap
    for _ in range(n):
        M = bar(M)
    name = f"B^{n}({ring_spec or (ring.name if ring else G)})"
    M.name = name
    logger.debug(f"built {name} through level {truncation}")
    return IteratedBar(M, ring_spec, ring, n)


def iterated_algebra_bar(A: AugCommAlgebra, n, truncation, cap=DEFAULT_CAP):
    """B^nA as n-fold bar of the constant simplicial algebra; level p is A^{⊗p^n}."""
    if n < 0:
        raise InvalidInput("n must be nonnegative")
    M = constant(A, truncation)
    M.cap = cap
    for _ in range(n):
        M = bar(M)
    M.name = f"B^{n}({A.name})"
    return M


########
# Pointwise evaluation on nested tuples
########
def _zero(S, depth, p):
    if depth == 0:
        return S.zero
    return tuple(_zero(S, depth - 1, p) for _ in range(p))


def _add(S, depth, a, b):
    if depth == 0:
        return S.add[a][b]
    return tuple(_add(S, depth - 1, x, y) for x, y in zip(a, b))


def validate_nested(S: FiniteRing, n, p, t):
    """Raise ShapeMismatch unless t is a complete p-ary nesting of depth n over S."""
    if n == 0:
        if not isinstance(t, int) or not 0 <= t < S.size:
            raise ShapeMismatch(f"leaf {t!r} is not an element of {S.name}")
        return
    if not isinstance(t, (tuple, list)) or len(t) != p:
        raise ShapeMismatch(f"expected {p} components at depth {n}, got {t!r}")
    for x in t:
        validate_nested(S, n - 1, p, x)


def nested_leaves(n, t):
    """Leaves of a nested tuple in lexicographic path order."""
    if n == 0:
        return [t]
    return [leaf for x in t for leaf in nested_leaves(n - 1, x)]


def nest(leaves, n, p):
    """Inverse of nested_leaves for a level-p tuple of depth n."""
    leaves = list(leaves)
    if len(leaves) != p ** n:
        raise ShapeMismatch(f"{len(leaves)} leaves do not fill depth {n} at level {p}")
    if n == 0:
        return leaves[0]
    width = p ** (n - 1)
    return tuple(nest(leaves[k * width:(k + 1) * width], n - 1, p) for k in range(p))


def encode_nested(S: FiniteRing, n, t):
    return encode_tuple(nested_leaves(n, t), S.size)


def decode_nested(S: FiniteRing, n, p, x):
    return nest(decode_tuple(x, S.size, p ** n), n, p)


def _face(S, n, p, i, t):
    if n == 0:
        return t
    inner = [_face(S, n - 1, p, i, x) for x in t]
    if i == 0:
        return tuple(inner[1:])
    if i == p:
        return tuple(inner[:-1])
    return tuple(inner[:i - 1]) + (_add(S, n - 1, inner[i - 1], inner[i]),) + tuple(inner[i + 1:])


def _degen(S, n, p, i, t):
    if n == 0:
        return t
    inner = [_degen(S, n - 1, p, i, x) for x in t]
    inner.insert(i, _zero(S, n - 1, p + 1))
    return tuple(inner)


def face_eval(S: FiniteRing, n, p, i, t):
    """d_i of B^nS on one nested tuple, without materializing the level."""
    if p < 1 or not 0 <= i <= p:
        raise IndexOutOfRange(f"face d_{i} is undefined at level {p}")
    validate_nested(S, n, p, t)
    return _face(S, n, p, i, t)


def degen_eval(S: FiniteRing, n, p, i, t):
    """s_i of B^nS on one nested tuple."""
    if p < 0 or not 0 <= i <= p:
        raise IndexOutOfRange(f"degeneracy s_{i} is undefined at level {p}")
    validate_nested(S, n, p, t)
    return _degen(S, n, p, i, t)


def level_elements(S: FiniteRing, n, p, cap=DEFAULT_CAP):
    """All nested tuples of B^nS at level p, in index order."""
    size = S.size ** (p ** n)
    check_budget(size, cap, f"level {p} of B^{n}({S.name})")
    for x in range(size):
        yield decode_nested(S, n, p, x)
