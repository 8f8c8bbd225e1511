"""
The graded multiplication ⌣_{n,m} : B^nS × B^mS → B^{n+m}S, its closed form,
the graded ring axioms, the induced circle product on homology, and the
comparison of k[B^nS] with B^n k[S] as simplicial coalgebraic rings.
"""
import itertools
import logging
from dataclasses import dataclass, field

from barcalc.errors import InvalidInput, check_budget
from barcalc.linalg import FpEchelon, kernel_fp
from barcalc.rings import (FiniteRing, Coefficients, TensorPowerAlgebra, group_algebra, encode_tuple, decode_tuple,
                           tensor_vectors)
from barcalc.simplicial import normalized_chains, linearize, compare_modules, DEFAULT_CAP
from barcalc.bar import (iterated_bar, iterated_algebra_bar, validate_nested, nested_leaves, nest, face_eval,
                         degen_eval, level_elements)
from barcalc.dg import shuffles, apply_degeneracies
from barcalc import utils

logger = logging.getLogger("barcalc")


########
# ⌣ on nested tuples
########
def _cup(S, n, m, y, x):
    if n == 0 and m == 0:
        return S.mul[y][x]
    if n == 0:
        return tuple(_cup(S, 0, m - 1, y, xk) for xk in x)
    return tuple(_cup(S, n - 1, m, yk, x) for yk in y)


def cup_eval(S: FiniteRing, n, m, p, Y, X):
    """
    ⌣_{n,m} at level p by the defining recursion: ⌣_{0,0} is the ring
    multiplication, a scalar distributes over the components of X, and the
    components of Y each multiply X.
    """
    validate_nested(S, n, p, Y)
    validate_nested(S, m, p, X)
    return _cup(S, n, m, Y, X)


def cup_closed_form(S: FiniteRing, n, m, p, Y, X):
    """Leaf (I, J) of the result is y_I · x_J."""
    validate_nested(S, n, p, Y)
    validate_nested(S, m, p, X)
    ys, xs = nested_leaves(n, Y), nested_leaves(m, X)
    return nest([S.mul[y][x] for y in ys for x in xs], n + m, p)


def cup_leaves(S: FiniteRing, ys, xs):
    """Closed form on flat leaf tuples."""
    return tuple(S.mul[y][x] for y in ys for x in xs)


def _transposed_cup_leaves(S, ys, xs):
    return tuple(S.mul[y][x] for x in xs for y in ys)


def _add_nested(S, depth, a, b):
    if depth == 0:
        return S.add[a][b]
    return tuple(_add_nested(S, depth - 1, x, y) for x, y in zip(a, b))


def _single_leaf_elements(S, n, p):
    """Elements with at most one nonzero leaf; they generate level p additively."""
    count = p ** n
    for position in range(count):
        for s in S.elements():
            leaves = [S.zero] * count
            leaves[position] = s
            yield nest(leaves, n, p)


########
# Graded ring axioms
########
@dataclass
class AxiomCheck:
    checked: int = 0
    failed: int = 0
    witnesses: list = field(default_factory=list)

    @property
    def passed(self):
        return self.failed == 0

    def record(self, ok, witness):
        self.checked += 1
        if not ok:
            self.failed += 1
            if len(self.witnesses) < 8:
                self.witnesses.append(witness)


@dataclass
class GradedRingReport:
    ring: str
    n_max: int
    p_max: int
    axioms: dict = field(default_factory=dict)
    measurements: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(check.passed for check in self.axioms.values())

    def failures(self):
        return {name: check.witnesses for name, check in self.axioms.items() if not check.passed}


def _budget(S, degrees, p, cap, what):
    size = 1
    for n in degrees:
        size *= S.size ** (p ** n)
    check_budget(size, cap, what)


# sweeps with more (element, element) pairs than this run on generators
EXHAUSTIVE_LIMIT = 2 ** 14


def _random_element(S, n, p, generator):
    return nest([int(v) for v in generator.integers(0, S.size, p ** n)], n, p)


def _sweep_elements(S, n, p, exhaustive, cap):
    if exhaustive:
        return list(level_elements(S, n, p, cap))
    return list(_single_leaf_elements(S, n, p))


def check_graded_ring_axioms(S: FiniteRing, n_max, p_max, cap=DEFAULT_CAP, exhaustive_limit=EXHAUSTIVE_LIMIT,
                             samples=32, seed=0) -> GradedRingReport:
    """
    Check, for n + m ≤ n_max and levels p ≤ p_max, that ⌣ is a simplicial
    map and that it is associative, unital and distributive over the
    levelwise addition. Distributivity is tested against single-leaf
    summands, which generate each level.

    Sweeps up to exhaustive_limit pairs run over every element. Larger ones
    run over single-leaf generators, which suffices for the multilinear
    axioms once ⌣ is biadditive; there distributivity also gets `samples`
    seeded random triples of full elements. report.measurements["sweeps"]
    records the mode of every sweep.
    """
    report = GradedRingReport(S.name, n_max, p_max)
    names = ["simplicial map", "associativity", "left unit", "right unit",
             "left distributivity", "right distributivity"]
    report.axioms = {name: AxiomCheck() for name in names}
    sweeps = {}
    commuting, compared = 0, 0
    generator = utils.rng(seed)

    for p in range(p_max + 1):
        for n, m in itertools.product(range(n_max + 1), repeat=2):
            if n + m > n_max:
                continue
            exhaustive = S.size ** (p ** n + p ** m) <= exhaustive_limit
            sweeps[f"⌣_{{{n},{m}}} at level {p}"] = "exhaustive" if exhaustive else "generators"
            if exhaustive:
                _budget(S, (n, m), p, cap, f"⌣_{{{n},{m}}} sweep at level {p}")
            Ys = _sweep_elements(S, n, p, exhaustive, cap)
            Xs = _sweep_elements(S, m, p, exhaustive, cap)
            for Y in Ys:
                for X in Xs:
                    YX = _cup(S, n, m, Y, X)
                    for i in range(p + 1):
                        if p >= 1:
                            ok = face_eval(S, n + m, p, i, YX) == \
                                _cup(S, n, m, face_eval(S, n, p, i, Y), face_eval(S, m, p, i, X))
                            report.axioms["simplicial map"].record(ok, ("d", n, m, p, i, Y, X))
                        ok = degen_eval(S, n + m, p, i, YX) == \
                            _cup(S, n, m, degen_eval(S, n, p, i, Y), degen_eval(S, m, p, i, X))
                        report.axioms["simplicial map"].record(ok, ("s", n, m, p, i, Y, X))
                    if n == m:
                        compared += 1
                        commuting += YX == _cup(S, m, n, X, Y)
            # units
            one = S.one
            for X in Xs:
                report.axioms["left unit"].record(_cup(S, 0, m, one, X) == X, (m, p, X))
            for Y in Ys:
                report.axioms["right unit"].record(_cup(S, n, 0, Y, one) == Y, (n, p, Y))
            # distributivity
            check_budget(len(Ys) * len(Xs) * (p ** max(n, m)) * S.size, cap,
                         f"distributivity sweep for ⌣_{{{n},{m}}} at level {p}")
            summands = list(itertools.zip_longest(_single_leaf_elements(S, m, p), _single_leaf_elements(S, n, p)))
            triples = ((Y, X, X2, Y2) for Y in Ys for X in Xs for X2, Y2 in summands)
            sampled = [] if exhaustive else \
                [tuple(_random_element(S, d, p, generator) for d in (n, m, m, n)) for _ in range(samples)]
            for Y, X, X2, Y2 in itertools.chain(triples, sampled):
                YX = _cup(S, n, m, Y, X)
                if X2 is not None:
                    ok = _cup(S, n, m, Y, _add_nested(S, m, X, X2)) == \
                        _add_nested(S, n + m, YX, _cup(S, n, m, Y, X2))
                    report.axioms["right distributivity"].record(ok, (n, m, p, Y, X, X2))
                if Y2 is not None:
                    ok = _cup(S, n, m, _add_nested(S, n, Y, Y2), X) == \
                        _add_nested(S, n + m, YX, _cup(S, n, m, Y2, X))
                    report.axioms["left distributivity"].record(ok, (n, m, p, Y2, Y, X))

        # associativity over triples of degrees
        for a, b, c in itertools.product(range(n_max + 1), repeat=3):
            if a + b + c > n_max:
                continue
            exhaustive = S.size ** (p ** a + p ** b + p ** c) <= exhaustive_limit
            sweeps[f"associativity ({a}, {b}, {c}) at level {p}"] = "exhaustive" if exhaustive else "generators"
            if exhaustive:
                _budget(S, (a, b, c), p, cap, f"associativity sweep at level {p}")
            Xs, Zs = _sweep_elements(S, b, p, exhaustive, cap), _sweep_elements(S, c, p, exhaustive, cap)
            for Y in _sweep_elements(S, a, p, exhaustive, cap):
                for X in Xs:
                    YX = _cup(S, a, b, Y, X)
                    for Z in Zs:
                        ok = _cup(S, a + b, c, YX, Z) == _cup(S, a, b + c, Y, _cup(S, b, c, X, Z))
                        report.axioms["associativity"].record(ok, (a, b, c, p, Y, X, Z))

    report.measurements["commutes without index transpose"] = f"{commuting}/{compared}"
    report.measurements["sweeps"] = sweeps
    for name, check in report.axioms.items():
        logger.debug(f"{S.name} {name}: {check.checked} checks, {len(check.witnesses)} failures")
    return report


########
# Circle product on homology
########
@dataclass
class HomologyPairing:
    source: tuple
    other: tuple
    target: tuple
    coefficients: str
    source_dims: tuple
    target_dim: int
    matrix: list
    representative_independent: bool = True
    trials: int = 0

    def to_dict(self):
        return {"source": list(self.source), "other": list(self.other), "target": list(self.target),
                "coefficients": self.coefficients, "source_dims": list(self.source_dims),
                "target_dim": self.target_dim, "matrix": self.matrix,
                "representative_independent": self.representative_independent, "trials": self.trials}


class _HomologyBasis:
    """
    F_p homology basis of N_deg: boundaries enter the echelon untagged, then
    the lowest-index kernel vectors that are new become tagged representatives.
    """

    def __init__(self, C, deg, p):
        self.p = p
        self.boundaries = [dict(col) for col in C.differential(deg + 1).mod(p).columns()]
        self.echelon = FpEchelon(p)
        for col in self.boundaries:
            self.echelon.insert(col)
        self.reps = []
        for v in kernel_fp(C.differential(deg).reduce(p)):
            if self.echelon.insert(v, {len(self.reps): 1}):
                self.reps.append(v)

    @property
    def dim(self):
        return len(self.reps)

    def coordinates(self, vector):
        c = self.echelon.express(vector)
        return [c.get(k, 0) for k in range(self.dim)]

    def perturbed(self, generator):
        """Representatives shifted by random boundaries."""
        out = []
        for rep in self.reps:
            v = dict(rep)
            for col in self.boundaries:
                s = int(generator.integers(0, self.p))
                for r, x in col.items():
                    v[r] = (v.get(r, 0) + s * x) % self.p
            out.append({r: x for r, x in v.items() if x})
        return out


def homology_circle_product(S: FiniteRing, k: Coefficients, n, m, i, j, seed=0, trials=10,
                            cap=DEFAULT_CAP) -> HomologyPairing:
    """
    H_i(B^nS; k) ⊗ H_j(B^mS; k) → H_{i+j}(B^{n+m}S; k): shuffle cross product
    of cycle representatives followed by k[⌣]. Column a·dim_j + b holds the
    image of the pair of basis classes (a, b).
    """
    if not k.field:
        raise InvalidInput("the circle product is computed over a prime field")
    p = k.modulus
    # cycles are degenerated up to level i + j before the product
    Xb = iterated_bar(S, n, max(i + 1, i + j), cap)
    Yb = iterated_bar(S, m, max(j + 1, i + j), cap)
    Tb = iterated_bar(S, n + m, i + j + 1, cap)
    X, Y, T = Xb.as_set(), Yb.as_set(), Tb.as_set()
    CX = normalized_chains(linearize(X), i + 1)
    CY = normalized_chains(linearize(Y), j + 1)
    CT = normalized_chains(linearize(T), i + j + 1)
    HX, HY, HT = _HomologyBasis(CX, i, p), _HomologyBasis(CY, j, p), _HomologyBasis(CT, i + j, p)
    target_pos = {u: r for r, u in enumerate(CT.basis[i + j])}
    leaves_x, leaves_y, leaves_t = Xb.leaves(i + j), Yb.leaves(i + j), Tb.leaves(i + j)
    terms = list(shuffles(i, j))

    def cross(a, b):
        """Chain-level image of cycles a (degree i) and b (degree j) in N_{i+j}(B^{n+m}S)."""
        out = {}
        for xpos, s in a.items():
            x = CX.basis[i][xpos]
            for ypos, t in b.items():
                y = CY.basis[j][ypos]
                for sign, mu, nu in terms:
                    u = apply_degeneracies(X.degen, i, nu, x)
                    w = apply_degeneracies(Y.degen, j, mu, y)
                    leaves = cup_leaves(S, decode_tuple(u, S.size, leaves_x), decode_tuple(w, S.size, leaves_y))
                    r = target_pos.get(encode_tuple(leaves, S.size))
                    if r is not None:
                        out[r] = (out.get(r, 0) + sign * s * t) % p
        return {r: v for r, v in out.items() if v}

    def pairing(reps_x, reps_y):
        columns = [HT.coordinates(cross(a, b)) for a in reps_x for b in reps_y]
        return [[col[r] for col in columns] for r in range(HT.dim)]

    matrix = pairing(HX.reps, HY.reps)
    generator = utils.rng(seed)
    independent = True
    for _ in range(trials):
        if pairing(HX.perturbed(generator), HY.perturbed(generator)) != matrix:
            independent = False
            break
    logger.info(f"circle product H_{i}(B^{n}) ⊗ H_{j}(B^{m}) → H_{i + j}(B^{n + m}) over {k}: {matrix}")
    return HomologyPairing((n, i), (m, j), (n + m, i + j), str(k), (HX.dim, HY.dim), HT.dim, matrix,
                           independent, trials)


########
# k[B^nS] against B^n k[S]
########
def _iterated_comultiply(T: TensorPowerAlgebra, x, copies):
    """Δ^(copies-1) of a basis tensor as {(x_1, ..., x_copies): coefficient}."""
    if copies == 0:
        return {(): T.augment(x)}
    if copies == 1:
        return {(x,): 1}
    out = {}
    for (left, right), c in T.comultiply(x).items():
        for rest, d in _iterated_comultiply(T, right, copies - 1).items():
            key = (left,) + rest
            out[key] = out.get(key, 0) + c * d
    return out


def algebra_cup(A, n, m, p, y, x):
    """
    ⌣_{n,m} on basis tensors of A^{⊗p^n} and A^{⊗p^m} for a coalgebraic ring
    A (an algebra with comultiplication and circle product), run through
    the recursion with copies made by the comultiplication. Returns a sparse
    vector over A^{⊗p^(n+m)}.
    """
    if A.circle is None or A.comul is None:
        raise InvalidInput(f"{A.name} carries no coalgebraic ring structure")
    modulus = A.modulus
    if n == 0 and m == 0:
        return {k: v % modulus if modulus else v for k, v in A.circle[y][x].items()}
    if n == 0:
        inner = TensorPowerAlgebra(A, p ** (m - 1))
        xs = decode_tuple(x, inner.dim, p)
        out = {}
        for ys, c in _iterated_comultiply(TensorPowerAlgebra(A, 1), y, p).items():
            parts = [algebra_cup(A, 0, m - 1, p, yk, xk) for yk, xk in zip(ys, xs)]
            dim = A.dim ** (p ** (m - 1))
            for key, v in tensor_vectors(parts, [dim] * p, modulus).items():
                out[key] = out.get(key, 0) + c * v
        return {k: v % modulus if modulus else v for k, v in out.items() if (v % modulus if modulus else v)}
    inner = TensorPowerAlgebra(A, p ** (n - 1))
    ys = decode_tuple(y, inner.dim, p)
    out = {}
    for xs, c in _iterated_comultiply(TensorPowerAlgebra(A, p ** m), x, p).items():
        parts = [algebra_cup(A, n - 1, m, p, yk, xk) for yk, xk in zip(ys, xs)]
        dim = A.dim ** (p ** (n - 1 + m))
        for key, v in tensor_vectors(parts, [dim] * p, modulus).items():
            out[key] = out.get(key, 0) + c * v
    return {k: v % modulus if modulus else v for k, v in out.items() if (v % modulus if modulus else v)}


@dataclass
class StructureReport:
    """Named checks with counts and mismatch descriptions."""
    name: str
    checks: dict = field(default_factory=dict)
    mismatches: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.mismatches

    def count(self, check, n=1):
        self.checks[check] = self.checks.get(check, 0) + n

    def mismatch(self, text):
        if len(self.mismatches) < 32:
            self.mismatches.append(text)


def naturality_check(S: FiniteRing, k: Coefficients, n_max, level_max, cap=DEFAULT_CAP,
                     transpose_fault=False) -> StructureReport:
    """
    Compare k[B^nS] with B^n k[S] along the basis identification
    k[S^(p^n)] = k[S]^{⊗p^n}: faces, degeneracies, products, comultiplication,
    counit and ⌣. With transpose_fault the set-level ⌣ uses the (J, I) leaf order.
    """
    report = StructureReport(f"naturality {S.name} over {k}")
    A = group_algebra(S, k.modulus)
    cup_set = _transposed_cup_leaves if transpose_fault else cup_leaves

    for n in range(n_max + 1):
        L = linearize(iterated_bar(S, n, level_max, cap).as_set(), k)
        B = iterated_algebra_bar(A, n, level_max, cap)
        for text in compare_modules(L, B, level_max):
            report.mismatch(f"B^{n}: {text}")
        report.count("faces and degeneracies", sum(L.dim(p) for p in range(level_max + 1)))
        for p in range(level_max + 1):
            T = B.level_algebra(p)
            N = p ** n
            elements = L.basis(p)
            for x in elements:
                if L.comultiply(p, x) != T.comultiply(x):
                    report.mismatch(f"B^{n} level {p}: Δ differs on {x}")
                if T.augment(x) != 1:
                    report.mismatch(f"B^{n} level {p}: counit differs on {x}")
            report.count("comultiplication and counit", len(elements))
            # products: all pairs when the domain fits, otherwise against single-leaf generators
            if len(elements) ** 2 <= cap:
                partners = list(elements)
            else:
                partners = sorted({encode_tuple([S.zero] * j + [s] + [S.zero] * (N - j - 1), S.size)
                                   for j in range(N) for s in S.elements()})
            for x in elements:
                xs = decode_tuple(x, S.size, N)
                for y in partners:
                    ys = decode_tuple(y, S.size, N)
                    expected = {encode_tuple([S.add[a][b] for a, b in zip(xs, ys)], S.size): 1}
                    if _reduced(T.multiply(x, y), k.modulus) != _reduced(expected, k.modulus):
                        report.mismatch(f"B^{n} level {p}: product differs on ({x}, {y})")
            report.count("products", len(elements) * len(partners))

    # ⌣ for n + m ≤ n_max
    for n, m in itertools.product(range(n_max + 1), repeat=2):
        if n + m > n_max:
            continue
        for p in range(level_max + 1):
            _budget(S, (n, m), p, cap, f"⌣ naturality sweep at level {p}")
            for y in range(S.size ** (p ** n)):
                ys = decode_tuple(y, S.size, p ** n)
                for x in range(S.size ** (p ** m)):
                    xs = decode_tuple(x, S.size, p ** m)
                    expected = {encode_tuple(cup_set(S, ys, xs), S.size): 1}
                    if _reduced(algebra_cup(A, n, m, p, y, x), k.modulus) != _reduced(expected, k.modulus):
                        report.mismatch(f"⌣_{{{n},{m}}} level {p}: differs on ({y}, {x})")
                report.count("cup", S.size ** (p ** m))
    logger.info(f"{report.name}: {sum(report.checks.values())} checks, {len(report.mismatches)} mismatches")
    return report


def _reduced(vector, modulus):
    if modulus:
        return {key: v % modulus for key, v in vector.items() if v % modulus}
    return {key: v for key, v in vector.items() if v}


def hopf_checks(S: FiniteRing, k: Coefficients, n, level_max, cap=DEFAULT_CAP) -> StructureReport:
    """
    Bicommutative Hopf algebra axioms on every level of k[B^nS] = B^n k[S],
    and the bialgebra-map property of every face and degeneracy.
    """
    report = StructureReport(f"Hopf structure of k[B^{n}({S.name})] over {k}")
    A = group_algebra(S, k.modulus)
    B = iterated_algebra_bar(A, n, level_max, cap)
    mod = k.modulus

    def r(v):
        return _reduced(v, mod)

    def multiply_pairs(T, u, v):
        """Product in T ⊗ T of sparse vectors keyed by (left, right)."""
        out = {}
        for (a, b), c in u.items():
            for (a2, b2), c2 in v.items():
                for l, x in T.multiply(a, a2).items():
                    for rr, y in T.multiply(b, b2).items():
                        out[(l, rr)] = out.get((l, rr), 0) + c * c2 * x * y
        return r(out)

    for p in range(level_max + 1):
        T = B.level_algebra(p)
        basis = range(T.dim)
        check_budget(T.dim ** 2, cap, f"Hopf sweep at level {p}")
        unit = T.unit_index
        if r(T.comultiply(unit)) != {(unit, unit): 1}:
            report.mismatch(f"level {p}: Δ(1) != 1 ⊗ 1")
        for x in basis:
            delta = r(T.comultiply(x))
            # counit
            left = r({b: c * T.augment(a) for (a, b), c in delta.items()})
            right = r({a: c * T.augment(b) for (a, b), c in delta.items()})
            if left != r({x: 1}) or right != r({x: 1}):
                report.mismatch(f"level {p}: counit axiom fails on {x}")
            # coassociativity and cocommutativity
            lhs, rhs = {}, {}
            for (a, b), c in delta.items():
                for (a1, a2), c1 in T.comultiply(a).items():
                    lhs[(a1, a2, b)] = lhs.get((a1, a2, b), 0) + c * c1
                for (b1, b2), c2 in T.comultiply(b).items():
                    rhs[(a, b1, b2)] = rhs.get((a, b1, b2), 0) + c * c2
            if r(lhs) != r(rhs):
                report.mismatch(f"level {p}: Δ not coassociative on {x}")
            if r({(b, a): c for (a, b), c in delta.items()}) != delta:
                report.mismatch(f"level {p}: Δ not cocommutative on {x}")
            # antipode
            eps = r({unit: T.augment(x)})
            for side in ("left", "right"):
                out = {}
                for (a, b), c in delta.items():
                    if side == "left":
                        for sa, s in T.antipode(a).items():
                            for key, v in T.multiply(sa, b).items():
                                out[key] = out.get(key, 0) + c * s * v
                    else:
                        for sb, s in T.antipode(b).items():
                            for key, v in T.multiply(a, sb).items():
                                out[key] = out.get(key, 0) + c * s * v
                if r(out) != eps:
                    report.mismatch(f"level {p}: {side} antipode identity fails on {x}")
            twice = {}
            for y, c in T.antipode(x).items():
                for z, d in T.antipode(y).items():
                    twice[z] = twice.get(z, 0) + c * d
            if r(twice) != r({x: 1}):
                report.mismatch(f"level {p}: antipode is not an involution on {x}")
            for y in basis:
                xy = r(T.multiply(x, y))
                if xy != r(T.multiply(y, x)):
                    report.mismatch(f"level {p}: product not commutative on ({x}, {y})")
                if r(_comultiply_vector(T, xy)) != \
                        multiply_pairs(T, delta, r(T.comultiply(y))):
                    report.mismatch(f"level {p}: Δ is not multiplicative on ({x}, {y})")
                if r({unit: sum(c * T.augment(z) for z, c in xy.items())}) != \
                        r({unit: T.augment(x) * T.augment(y)}):
                    report.mismatch(f"level {p}: counit is not multiplicative on ({x}, {y})")
        report.count("Hopf axioms", T.dim ** 2)

        # faces and degeneracies are bialgebra maps
        for i in range(p + 1):
            for kind in ("face", "degen"):
                if kind == "face" and p == 0:
                    continue
                if kind == "degen" and p + 1 > level_max:
                    continue
                target = B.level_algebra(p - 1 if kind == "face" else p + 1)
                f = (lambda x: r(B.face_vector(p, i, x))) if kind == "face" else (lambda x: {B.degen_index(p, i, x): 1})
                for x in basis:
                    fx = f(x)
                    image = {}
                    for (a, b), c in T.comultiply(x).items():
                        for fa, s in f(a).items():
                            for fb, t in f(b).items():
                                image[(fa, fb)] = image.get((fa, fb), 0) + c * s * t
                    if r(_comultiply_vector(target, fx)) != r(image):
                        report.mismatch(f"level {p}: {kind} {i} does not preserve Δ on {x}")
                    if r({0: sum(c * target.augment(z) for z, c in fx.items())}) != r({0: T.augment(x)}):
                        report.mismatch(f"level {p}: {kind} {i} does not preserve ε on {x}")
                    for y in basis:
                        lhs = {}
                        for z, c in T.multiply(x, y).items():
                            for w, d in f(z).items():
                                lhs[w] = lhs.get(w, 0) + c * d
                        rhs = {}
                        for a, c in fx.items():
                            for b, d in f(y).items():
                                for w, e in target.multiply(a, b).items():
                                    rhs[w] = rhs.get(w, 0) + c * d * e
                        if r(lhs) != r(rhs):
                            report.mismatch(f"level {p}: {kind} {i} is not multiplicative on ({x}, {y})")
                report.count("bialgebra maps", T.dim ** 2)
    logger.info(f"{report.name}: {sum(report.checks.values())} checks, {len(report.mismatches)} mismatches")
    return report


def _comultiply_vector(T, vector):
    out = {}
    for x, c in vector.items():
        for key, v in T.comultiply(x).items():
            out[key] = out.get(key, 0) + c * v
    return out
