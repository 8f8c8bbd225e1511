"""
Chain-level structure: tensor complexes of normalized chains, the shuffle
(Eilenberg–Zilber) and Alexander–Whitney maps, condensation of bisimplicial
modules, the dg bar construction with its shuffle product, and the
Dold–Puppe comparison.

Signs follow the Koszul rule. Tensor complexes use d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy,
total complexes of bicomplexes use d = d_h + (-1)^p d_v.
"""
import itertools
import logging
from dataclasses import dataclass, field

from barcalc.errors import TruncationTooLow, InvalidInput, VerificationFailed
from barcalc.linalg import IntMatrix, homology_dims_fp
from barcalc.rings import AugCommAlgebra
from barcalc.simplicial import (ChainComplex, SimplicialKModule, BisimplicialModule, normalized_chains,
                                tensor_product, diagonal)

logger = logging.getLogger("barcalc")


def _mod(vector, modulus):
    if modulus:
        return {k: v % modulus for k, v in vector.items() if v % modulus}
    return {k: v for k, v in vector.items() if v}


def _add_scaled(target, vector, scale):
    for k, v in vector.items():
        target[k] = target.get(k, 0) + scale * v


########
# Chain maps
########
@dataclass
class ChainMap:
    """Degreewise matrices f_i : source_i → target_i through min(top) degrees."""
    source: ChainComplex
    target: ChainComplex
    matrices: dict
    name: str = "f"

    @property
    def modulus(self):
        return self.target.modulus

    @property
    def top(self):
        return min(self.source.top, self.target.top)

    def failures(self):
        """Degrees where ∂f != f∂."""
        bad = []
        for i in range(1, self.top + 1):
            lhs = self.target.differential(i) @ self.matrices[i]
            rhs = self.matrices[i - 1] @ self.source.differential(i)
            if not (lhs - rhs).mod(self.modulus).is_zero():
                bad.append(i)
        return bad

    def __matmul__(self, other):
        """Composite self ∘ other."""
        top = min(self.top, other.top)
        return ChainMap(other.source, self.target,
                        {i: (self.matrices[i] @ other.matrices[i]).mod(self.modulus) for i in range(top + 1)},
                        name=f"{self.name}∘{other.name}")

    def is_identity(self):
        return all(self.matrices[i].mod(self.modulus) == IntMatrix.identity(self.source.ranks[i])
                   for i in range(self.top + 1))


def _checked(f):
    bad = f.failures()
    if bad:
        raise VerificationFailed(f"{f.name} does not commute with the differentials in degrees {bad}")
    return f


########
# Tensor complexes
########
@dataclass
class TensorComplex:
    """
    (C ⊗ D)_n = ⊕_{a+b=n} C_a ⊗ D_b; basis ordered by a, then (x, y) with x outer.
    """
    complex: ChainComplex
    labels: list = field(repr=False)
    positions: list = field(repr=False)


def tensor_complex(C: ChainComplex, D: ChainComplex, up_to) -> TensorComplex:
    if C.modulus != D.modulus:
        raise InvalidInput("tensor complex needs a shared base ring")
    if min(C.top, D.top) < up_to:
        raise TruncationTooLow(f"tensor complex through degree {up_to} needs both factors through {up_to}")
    labels, positions = [], []
    for n in range(up_to + 1):
        degree_labels = [(a, x, y) for a in range(n + 1)
                         for x in range(C.ranks[a]) for y in range(D.ranks[n - a])]
        labels.append(degree_labels)
        positions.append({label: r for r, label in enumerate(degree_labels)})
    c_columns = [C.differential(a).columns() for a in range(up_to + 1)]
    d_columns = [D.differential(b).columns() for b in range(up_to + 1)]
    differentials = {}
    for n in range(1, up_to + 1):
        columns = []
        for a, x, y in labels[n]:
            column = {}
            b = n - a
            if a >= 1:
                for r, v in c_columns[a][x].items():
                    column[positions[n - 1][(a - 1, r, y)]] = v
            if b >= 1:
                sign = -1 if a % 2 else 1
                for r, v in d_columns[b][y].items():
                    k = positions[n - 1][(a, x, r)]
                    column[k] = column.get(k, 0) + sign * v
            columns.append(column)
        differentials[n] = IntMatrix.from_columns(len(labels[n - 1]), columns).mod(C.modulus)
    complex_ = ChainComplex(C.modulus, [len(l) for l in labels], differentials, name=f"{C.name} ⊗ {D.name}")
    return TensorComplex(complex_, labels, positions)


########
# Shuffle and Alexander–Whitney maps
########
def shuffles(p, q):
    """
    (p, q)-shuffles as (sign, mu, nu): mu and nu partition range(p+q), mu has
    p entries, sign = (-1)^(Σ mu_k - k).
    """
    for mu in itertools.combinations(range(p + q), p):
        nu = tuple(k for k in range(p + q) if k not in mu)
        parity = sum(m - k for k, m in enumerate(mu))
        yield (-1 if parity % 2 else 1), mu, nu


def apply_degeneracies(degen, level, indices, x):
    """s_{indices[-1]} ... s_{indices[0]} x, lowest index applied first."""
    for i in indices:
        x = degen(level, i, x)
        level += 1
    return x


def ez_shuffle(X: SimplicialKModule, Y: SimplicialKModule, up_to) -> ChainMap:
    """
    Shuffle map ∇ : N(X) ⊗ N(Y) → N(X ⊗ Y),
    a ⊗ b ↦ Σ sign · (s_ν a, s_μ b) over (|a|, |b|)-shuffles (μ, ν).
    """
    if min(X.truncation, Y.truncation) < up_to:
        raise TruncationTooLow(f"shuffle map through degree {up_to} needs truncation {up_to}")
    NX, NY = normalized_chains(X, up_to), normalized_chains(Y, up_to)
    T = tensor_product(X, Y)
    NT = normalized_chains(T, up_to)
    source = tensor_complex(NX, NY, up_to)
    matrices = {}
    for n in range(up_to + 1):
        target_pos = {u: r for r, u in enumerate(NT.basis[n])}
        columns = []
        for a, xi, yi in source.labels[n]:
            b = n - a
            x, y = NX.basis[a][xi], NY.basis[b][yi]
            column = {}
            for sign, mu, nu in shuffles(a, b):
                u = apply_degeneracies(X.degen_index, a, nu, x)
                w = apply_degeneracies(Y.degen_index, b, mu, y)
                r = target_pos.get(u * Y.dim(n) + w)
                if r is not None:
                    column[r] = column.get(r, 0) + sign
            columns.append(column)
        matrices[n] = IntMatrix.from_columns(NT.ranks[n], columns).mod(X.modulus)
    return _checked(ChainMap(source.complex, NT, matrices, name="∇"))


def _iterate_faces(M, level, faces, x):
    """Apply the faces (level l, index i) in order to a basis element; sparse result."""
    vector = {x: 1}
    for l, i in faces:
        out = {}
        for y, c in vector.items():
            _add_scaled(out, M.face_vector(l, i, y), c)
        vector = _mod(out, M.modulus)
    return vector


def alexander_whitney(X: SimplicialKModule, Y: SimplicialKModule, up_to) -> ChainMap:
    """
    Alexander–Whitney map N(X ⊗ Y) → N(X) ⊗ N(Y),
    (x, y) ↦ Σ_a front_a(x) ⊗ back_(n-a)(y).
    """
    if min(X.truncation, Y.truncation) < up_to:
        raise TruncationTooLow(f"Alexander–Whitney map through degree {up_to} needs truncation {up_to}")
    NX, NY = normalized_chains(X, up_to), normalized_chains(Y, up_to)
    T = tensor_product(X, Y)
    NT = normalized_chains(T, up_to)
    target = tensor_complex(NX, NY, up_to)
    pos_x = [{s: r for r, s in enumerate(b)} for b in NX.basis]
    pos_y = [{s: r for r, s in enumerate(b)} for b in NY.basis]
    matrices = {}
    for n in range(up_to + 1):
        columns = []
        for u in NT.basis[n]:
            x, y = divmod(u, Y.dim(n))
            column = {}
            for a in range(n + 1):
                # front: keep vertices 0..a; back: keep vertices a..n
                front = _iterate_faces(X, n, [(l, l) for l in range(n, a, -1)], x)
                back = _iterate_faces(Y, n, [(l, 0) for l in range(n, n - a, -1)], y)
                for fx, cx in front.items():
                    rx = pos_x[a].get(fx)
                    if rx is None:
                        continue
                    for by, cy in back.items():
                        ry = pos_y[n - a].get(by)
                        if ry is None:
                            continue
                        k = target.positions[n][(a, rx, ry)]
                        column[k] = column.get(k, 0) + cx * cy
            columns.append(column)
        matrices[n] = IntMatrix.from_columns(target.complex.ranks[n], columns).mod(X.modulus)
    return _checked(ChainMap(NT, target.complex, matrices, name="AW"))


########
# Condensation and Dold–Puppe
########
def _bidegenerate(X: BisimplicialModule, p, q):
    found = set()
    for i in range(p):
        for x in X.basis(p - 1, q):
            found.add(X.hdegen(p - 1, q, i, x))
    for j in range(q):
        for x in X.basis(p, q - 1):
            found.add(X.vdegen(p, q - 1, j, x))
    return found


def condense(X: BisimplicialModule, up_to) -> ChainComplex:
    """
    Total complex of the doubly normalized bicomplex of X through total
    degree up_to, with d = d_h + (-1)^p d_v.
    """
    if X.truncation < up_to:
        raise TruncationTooLow(f"condensation through degree {up_to} needs truncation {up_to}")
    nondeg = {}
    for p in range(up_to + 1):
        for q in range(up_to + 1 - p):
            degenerate = _bidegenerate(X, p, q)
            nondeg[(p, q)] = [x for x in X.basis(p, q) if x not in degenerate]
    labels = [[(p, n - p, x) for p in range(n + 1) for x in nondeg[(p, n - p)]] for n in range(up_to + 1)]
    positions = [{(p, q, x): r for r, (p, q, x) in enumerate(l)} for l in labels]
    differentials = {}
    for n in range(1, up_to + 1):
        columns = []
        for p, q, x in labels[n]:
            column = {}
            for i in range(p + 1):
                sign = -1 if i % 2 else 1
                for y, v in X.hface(p, q, i, x).items():
                    r = positions[n - 1].get((p - 1, q, y))
                    if r is not None:
                        column[r] = column.get(r, 0) + sign * v
            for j in range(q + 1):
                sign = (-1 if j % 2 else 1) * (-1 if p % 2 else 1)
                for y, v in X.vface(p, q, j, x).items():
                    r = positions[n - 1].get((p, q - 1, y))
                    if r is not None:
                        column[r] = column.get(r, 0) + sign * v
            columns.append(column)
        differentials[n] = IntMatrix.from_columns(len(labels[n - 1]), columns).mod(X.modulus)
    logger.debug(f"condensation of {X.name}: ranks {[len(l) for l in labels]}")
    return ChainComplex(X.modulus, [len(l) for l in labels], differentials, name=f"C({X.name})", basis=labels)


@dataclass
class DoldPuppeReport:
    name: str
    prime: int
    diagonal_dims: list
    condensed_dims: list

    @property
    def agrees(self):
        return self.diagonal_dims == self.condensed_dims

    def mismatched_degrees(self):
        return [i for i, (a, b) in enumerate(zip(self.diagonal_dims, self.condensed_dims)) if a != b]


def dold_puppe_compare(X: BisimplicialModule, up_to, prime=None) -> DoldPuppeReport:
    """F_p homology dimensions of N(diag X) and of condense(X) in degrees ≤ up_to."""
    prime = prime or X.modulus
    if not prime:
        raise InvalidInput("the Dold–Puppe comparison needs a prime field")
    N = normalized_chains(diagonal(X), up_to + 1)
    C = condense(X, up_to + 1)
    report = DoldPuppeReport(X.name, prime, N.homology_dims(prime, up_to), C.homology_dims(prime, up_to))
    logger.info(f"Dold–Puppe {X.name}: diagonal {report.diagonal_dims}, condensed {report.condensed_dims}")
    return report


########
# Differential graded algebras
########
@dataclass
class DGAlgebra:
    """
    Augmented commutative dg algebra over Z or Z/m, stored through degree
    complex.top. products[(i, j)] maps C_i ⊗ C_j (index x·rank_j + y) to C_(i+j).
    """
    complex: ChainComplex
    products: dict
    unit: int
    augmentation: tuple
    name: str = "A"
    labels: list = field(default=None, repr=False)
    _columns_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def modulus(self):
        return self.complex.modulus

    @property
    def top(self):
        return self.complex.top

    def rank(self, i):
        return self.complex.ranks[i]

    def multiply(self, i, x, j, y):
        """Product of sparse vectors x in degree i and y in degree j."""
        if i + j > self.top:
            raise TruncationTooLow(f"{self.name} stops at degree {self.top}")
        columns = self._columns(i, j)
        out = {}
        r = self.rank(j)
        for a, s in x.items():
            for b, t in y.items():
                _add_scaled(out, columns[a * r + b], s * t)
        return _mod(out, self.modulus)

    def _columns(self, i, j):
        if (i, j) not in self._columns_cache:
            self._columns_cache[(i, j)] = self.products[(i, j)].columns()
        return self._columns_cache[(i, j)]

    def d(self, i, x):
        if i == 0:
            return {}
        out = {}
        columns = self.complex.differential(i).columns()
        for a, s in x.items():
            _add_scaled(out, columns[a], s)
        return _mod(out, self.modulus)

    def check_axioms(self):
        """
        Exhaustive Leibniz rule, graded commutativity, associativity and unit
        on basis elements; returns {axiom: [witness, ...]}.
        """
        report = {"leibniz": [], "graded commutativity": [], "associativity": [], "unit": []}
        top = self.top
        for i in range(top + 1):
            for x in range(self.rank(i)):
                ex = {x: 1}
                if self.multiply(0, {self.unit: 1}, i, ex) != _mod(ex, self.modulus):
                    report["unit"].append((i, x))
                for j in range(top + 1 - i):
                    for y in range(self.rank(j)):
                        ey = {y: 1}
                        xy = self.multiply(i, ex, j, ey)
                        yx = self.multiply(j, ey, i, ex)
                        sign = -1 if (i * j) % 2 else 1
                        if xy != _mod({k: sign * v for k, v in yx.items()}, self.modulus):
                            report["graded commutativity"].append(((i, x), (j, y)))
                        if i + j >= 1:
                            lhs = self.d(i + j, xy)
                            rhs = {}
                            if i >= 1:
                                _add_scaled(rhs, self.multiply(i - 1, self.d(i, ex), j, ey), 1)
                            if j >= 1:
                                _add_scaled(rhs, self.multiply(i, ex, j - 1, self.d(j, ey)), -1 if i % 2 else 1)
                            if lhs != _mod(rhs, self.modulus):
                                report["leibniz"].append(((i, x), (j, y)))
                        for l in range(top + 1 - i - j):
                            for z in range(self.rank(l)):
                                ez = {z: 1}
                                if self.multiply(i + j, xy, l, ez) != \
                                        self.multiply(i, ex, j + l, self.multiply(j, ey, l, ez)):
                                    report["associativity"].append(((i, x), (j, y), (l, z)))
        return report

    @classmethod
    def from_algebra(cls, A: AugCommAlgebra, top=0):
        """A concentrated in degree 0, stored through degree top."""
        ranks = [A.dim] + [0] * top
        products = {}
        for i in range(top + 1):
            for j in range(top + 1 - i):
                if i == 0 and j == 0:
                    products[(0, 0)] = IntMatrix.from_columns(
                        A.dim, [A.mul[a][b] for a in range(A.dim) for b in range(A.dim)]).mod(A.modulus)
                else:
                    products[(i, j)] = IntMatrix.zero(ranks[i + j], ranks[i] * ranks[j])
        C = ChainComplex(A.modulus, ranks, {}, name=A.name)
        return cls(C, products, A.unit_index, tuple(A.augmentation), name=A.name)


def dg_homology_dims(A, p, up_to=None):
    """F_p dimensions of H_0..H_{up_to} of a DGAlgebra or ChainComplex."""
    C = A.complex if isinstance(A, DGAlgebra) else A
    up_to = C.top - 1 if up_to is None else up_to
    return [homology_dims_fp(C.differential(i + 1), C.differential(i), p) for i in range(up_to + 1)]


def _ideal_basis(A: DGAlgebra):
    """
    Basis of the augmentation ideal: in degree 0 e'_j = e_j - ε(e_j)·1 for
    j != unit, in positive degrees the basis of A. Returns per-degree lists
    of (label, vector in A).
    """
    basis = []
    for g in range(A.top + 1):
        if g == 0:
            basis.append([(j, _mod({j: 1, A.unit: -A.augmentation[j]} if j != A.unit else {}, A.modulus))
                          for j in range(A.rank(0)) if j != A.unit])
        else:
            basis.append([(j, {j: 1}) for j in range(A.rank(g))])
    return basis


def _to_ideal(A: DGAlgebra, g, vector):
    """Coordinates of x - ε(x)·1 in the ideal basis (drop the unit coordinate in degree 0)."""
    if g != 0:
        return dict(vector)
    order = [j for j in range(A.rank(0)) if j != A.unit]
    position = {j: k for k, j in enumerate(order)}
    return {position[j]: v for j, v in vector.items() if j != A.unit}


def dg_bar(A, up_to) -> DGAlgebra:
    """
    Bar construction of an augmented commutative dg algebra through total
    degree up_to. Words [a_1|...|a_k] of augmentation-ideal basis elements
    have degree Σ(|a_i| + 1). The differential is
    -Σ (-1)^ε_i [..|da_i|..] + Σ (-1)^ε_(i+1) [..|a_i a_(i+1)|..] with
    ε_i = Σ_{j<i} (|a_j| + 1); the product is the shuffle product with Koszul
    signs on the suspended degrees.
    """
    if isinstance(A, AugCommAlgebra):
        A = DGAlgebra.from_algebra(A, max(up_to - 1, 0))
    if A.top < up_to - 1:
        raise TruncationTooLow(f"dg bar through degree {up_to} needs {A.name} through degree {up_to - 1}")
    modulus = A.modulus
    ideal = _ideal_basis(A)

    # words of total degree n: tuples of (internal degree, ideal index)
    words = [[] for _ in range(up_to + 1)]

    def extend(word, degree):
        words[degree].append(word)
        for g in range(min(A.top, up_to - degree - 1) + 1):
            for k in range(len(ideal[g])):
                extend(word + ((g, k),), degree + g + 1)

    extend((), 0)
    for n in range(up_to + 1):
        words[n].sort()
    position = [{w: r for r, w in enumerate(ws)} for ws in words]

    def degree_of(word):
        return sum(g + 1 for g, _ in word)

    differentials = {}
    for n in range(1, up_to + 1):
        columns = []
        for word in words[n]:
            column = {}
            eps = 0
            for i, (g, k) in enumerate(word):
                # internal part
                if g >= 1:
                    dv = _to_ideal(A, g - 1, A.d(g, ideal[g][k][1]))
                    for k2, v in dv.items():
                        target = word[:i] + ((g - 1, k2),) + word[i + 1:]
                        r = position[n - 1][target]
                        column[r] = column.get(r, 0) - (-1 if eps % 2 else 1) * v
                eps += g + 1
                # external part merges a_i and a_(i+1)
                if i + 1 < len(word):
                    g2, k2 = word[i + 1]
                    if g + g2 <= A.top:
                        prod = A.multiply(g, ideal[g][k][1], g2, ideal[g2][k2][1])
                        for k3, v in _to_ideal(A, g + g2, prod).items():
                            target = word[:i] + ((g + g2, k3),) + word[i + 2:]
                            r = position[n - 1][target]
                            column[r] = column.get(r, 0) + (-1 if eps % 2 else 1) * v
            columns.append(column)
        differentials[n] = IntMatrix.from_columns(len(words[n - 1]), columns).mod(modulus)

    products = {}
    for i in range(up_to + 1):
        for j in range(up_to + 1 - i):
            columns = []
            for u in words[i]:
                for w in words[j]:
                    column = {}
                    for sign, merged in _shuffle_words(u, w):
                        r = position[i + j][merged]
                        column[r] = column.get(r, 0) + sign
                    columns.append(column)
            products[(i, j)] = IntMatrix.from_columns(len(words[i + j]), columns).mod(modulus)

    C = ChainComplex(modulus, [len(ws) for ws in words], differentials, name=f"B({A.name})", basis=words)
    logger.debug(f"dg bar of {A.name}: ranks {C.ranks}")
    return DGAlgebra(C, products, position[0][()], tuple(1 if w == () else 0 for w in words[0]),
                     name=f"B({A.name})", labels=words)


def _shuffle_words(u, w):
    """Shuffles of two words with the Koszul sign of the suspended degrees."""
    k, l = len(u), len(w)
    for slots in itertools.combinations(range(k + l), k):
        merged, sign, a, b = [], 1, 0, 0
        slot_set = set(slots)
        for s in range(k + l):
            if s in slot_set:
                merged.append(u[a])
                a += 1
            else:
                # w[b] jumps over the remaining letters u[a:]
                moved = w[b][0] + 1
                for g, _ in u[a:]:
                    if (moved * (g + 1)) % 2:
                        sign = -sign
                merged.append(w[b])
                b += 1
        yield sign, tuple(merged)
