"""
Self-verification suites. Each suite runs a set of named checks and returns
CheckRecords; a failing record carries a short witness in its detail.
"""
import itertools
import logging
from dataclasses import dataclass, asdict

from sympy.matrices import Matrix
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from barcalc import utils
from barcalc.errors import InvalidInput
from barcalc.linalg import IntMatrix, snf, invariant_factors, homology_mod, homology_dims_fp
from barcalc.rings import FiniteRing, Coefficients, RingSpec, truncated_polynomial, decode_tuple, encode_tuple
from barcalc.simplicial import (verify_identities, cartesian_product, linearize, tensor_product, compare_modules,
                                normalized_chains, unnormalized_chains, homotopy_groups, homology, diagonal)
from barcalc.bar import (bar, bar_simplicial_group, levelwise_bar, iterated_bar, iterated_algebra_bar, face_eval,
                         degen_eval, level_elements, encode_nested, decode_nested)
from barcalc.cup import (cup_eval, cup_closed_form, check_graded_ring_axioms, homology_circle_product,
                         naturality_check, hopf_checks)
from barcalc.dg import ez_shuffle, alexander_whitney, dold_puppe_compare, dg_bar, dg_homology_dims

logger = logging.getLogger("barcalc")

SUITES = ("linalg", "simplicial", "bar", "em", "cup", "naturality", "hopf", "dg")

# sweeps inside the suites stay below this many elements per level
SWEEP_BUDGET = 2 ** 12


@dataclass
class CheckRecord:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return asdict(self)


class _Suite:
    def __init__(self, name, records):
        self.name = name
        self.records = records

    def check(self, name, passed, detail=""):
        record = CheckRecord(self.name, name, bool(passed), detail)
        self.records.append(record)
        log = logger.info if record.passed else logger.error
        log(f"[{self.name}] {name}: {'ok' if record.passed else 'FAILED'}{' - ' + detail if detail else ''}")
        return record


def _levels_under(S, n, budget, highest):
    """Largest level d ≤ highest with |S|^(d^n) ≤ budget."""
    d = 1
    while d < highest and S.size ** ((d + 1) ** n) <= budget:
        d += 1
    return d


########
# linalg
########
def suite_linalg(suite, config):
    rng = utils.rng(config.seed)
    mismatches = []
    for trial in range(25):
        rows, cols = (int(v) for v in rng.integers(1, 7, size=2))
        dense = rng.integers(-4, 5, size=(rows, cols)).tolist()
        A = IntMatrix.from_dense(dense, cols)
        ours = invariant_factors(A)
        expected = [abs(int(f)) for f in sympy_invariant_factors(Matrix(dense)) if f != 0]
        result = snf(A)
        diagonal_ok = all(v == 0 or r == c for r, c, v in result.S.triplets())
        divides = all(b % a == 0 for a, b in zip(result.invariants, result.invariants[1:]))
        if ours != expected or result.U @ A @ result.V != result.S or not diagonal_ok or not divides:
            mismatches.append(f"trial {trial}: {dense}")
    suite.check("smith form agrees with sympy on random matrices", not mismatches, "; ".join(mismatches[:2]))

    # H_1 of C_1 --(·4)--> C_0 and Z/m versus F_p
    d1 = IntMatrix.from_dense([[4]])
    h0 = homology_mod(d1, IntMatrix.zero(0, 1), 6)
    suite.check("Z/6 homology of the multiplication-by-4 complex", str(h0) == "Z/2", str(h0))
    h1 = homology_mod(IntMatrix.zero(1, 0), d1, 6)
    suite.check("Z/6 kernel of multiplication by 4", str(h1) == "Z/2", str(h1))
    C = normalized_chains(linearize(bar_simplicial_group(RingSpec.parse("Z/2"), 5).as_set()), 5)
    dims_mod = [homology_mod(C.differential(i + 1), C.differential(i), 2).dimension() for i in range(4)]
    dims_fp = [homology_dims_fp(C.differential(i + 1), C.differential(i), 2) for i in range(4)]
    suite.check("Z/2 homology agrees with F_2 dimensions", dims_mod == dims_fp, f"{dims_mod} vs {dims_fp}")


########
# simplicial
########
def suite_simplicial(suite, config):
    nerve2 = bar_simplicial_group(RingSpec.parse("Z/2"), 4).as_set()
    nerve3 = bar_simplicial_group(RingSpec.parse("Z/3"), 4).as_set()
    for X in (nerve2, nerve3):
        if config.fault:
            X = X.with_face(2, 1, 1, 0)
        report = verify_identities(X, 3)
        suite.check(f"simplicial identities of {X.name}", report.ok, _violations(report))

    product = cartesian_product(nerve2, nerve3)
    report = verify_identities(product, 3)
    suite.check("simplicial identities of a product", report.ok, _violations(report))

    B2 = iterated_bar(RingSpec.parse("Z/2"), 2, 3).as_set()
    report = verify_identities(B2, 3)
    suite.check("simplicial identities of B^2(Z/2)", report.ok, _violations(report))

    levelwise = levelwise_bar(bar_simplicial_group(RingSpec.parse("Z/2"), 3))
    report = verify_identities(levelwise, 2)
    suite.check("bisimplicial identities of B_•(B(Z/2))", report.ok, _violations(report))

    L = linearize(cartesian_product(nerve2, nerve3), Coefficients.parse("F5"))
    R = tensor_product(linearize(nerve2, Coefficients.parse("F5")), linearize(nerve3, Coefficients.parse("F5")))
    mismatches = compare_modules(L, R, 3)
    suite.check("linearization takes products to tensor products", not mismatches, "; ".join(mismatches[:2]))

    for X, k, up_to in ((nerve2, Coefficients.parse("Z"), 3), (nerve3, Coefficients.parse("F3"), 3),
                        (B2, Coefficients.parse("F2"), 2)):
        M = linearize(X, k)
        N, C = normalized_chains(M, up_to + 1), unnormalized_chains(M, up_to + 1)
        field = Coefficients(k.modulus, True) if k.modulus else k
        n_groups = [str(N.homology(i, field)) for i in range(up_to + 1)]
        c_groups = [str(C.homology(i, field)) for i in range(up_to + 1)]
        suite.check(f"normalized and unnormalized homology of {X.name} over {k}", n_groups == c_groups,
                    f"{n_groups} vs {c_groups}")


def _violations(report):
    return "; ".join(f"{v.identity} at {v.level} (i={v.i}, j={v.j}, x={v.witness})"
                     for v in report.violations[:2])


########
# bar
########
def _nerve_face(S, t, i):
    """d_i of the nerve on a tuple: drop the first, add neighbours, or drop the last."""
    p = len(t)
    if i == 0:
        return t[1:]
    if i == p:
        return t[:-1]
    return t[:i - 1] + (S.add[t[i - 1]][t[i]],) + t[i + 1:]


def _nerve_degen(S, t, i):
    return t[:i] + (S.zero,) + t[i:]


def suite_bar(suite, config):
    # B(S) against the direct tuple formulas for cyclic groups of order ≤ 6
    for size in range(2, 7):
        S = FiniteRing.cyclic(size)
        X = bar_simplicial_group(S, 4).as_set()
        bad = []
        for p in range(5):
            for x in range(X.size(p)):
                t = tuple(decode_tuple(x, S.size, p))
                for i in range(p + 1):
                    if p >= 1 and X.face(p, i, x) != encode_tuple(_nerve_face(S, t, i), S.size):
                        bad.append(f"d_{i} on {t}")
                    if p < 4 and X.degen(p, i, x) != encode_tuple(_nerve_degen(S, t, i), S.size):
                        bad.append(f"s_{i} on {t}")
        suite.check(f"B(Z/{size}) agrees with the tuple formulas", not bad, "; ".join(bad[:2]))

    # B = diag ∘ B_•
    M = bar_simplicial_group(RingSpec.parse("Z/3"), 3)
    direct, diag = bar(M), diagonal(levelwise_bar(M))
    bad = [f"level {p} d_{i}" for p in range(1, 4) for i in range(p + 1)
           if direct.face_matrix(p, i) != diag.face_matrix(p, i)]
    bad += [f"level {p} s_{i}" for p in range(3) for i in range(p + 1)
            if direct.degen_matrix(p, i) != diag.degen_matrix(p, i)]
    suite.check("B is the diagonal of the levelwise bar", not bad, ", ".join(bad[:4]))

    # iterated bars
    for text in ("Z/2", "Z/3", "Z/4", "Z/2 x Z/2"):
        S = RingSpec.parse(text).finite_ring()
        for n in (1, 2, 3):
            d = _levels_under(S, n, SWEEP_BUDGET, 4)
            report = verify_identities(iterated_bar(S, n, d).as_set(), d)
            suite.check(f"simplicial identities of B^{n}({text}) through level {d}", report.ok, _violations(report))

    # pointwise evaluation agrees with the level tables
    S = FiniteRing.cyclic(3)
    X = iterated_bar(S, 2, 3).as_set()
    rng = utils.rng(config.seed)
    bad = []
    for p in range(1, 4):
        indices = range(X.size(p)) if X.size(p) <= SWEEP_BUDGET else [int(v) for v in rng.integers(0, X.size(p), 200)]
        for x in indices:
            t = decode_nested(S, 2, p, x)
            for i in range(p + 1):
                if encode_nested(S, 2, face_eval(S, 2, p, i, t)) != X.face(p, i, x):
                    bad.append(f"d_{i} on {t}")
                if p < 3 and encode_nested(S, 2, degen_eval(S, 2, p, i, t)) != X.degen(p, i, x):
                    bad.append(f"s_{i} on {t}")
    suite.check("pointwise face and degeneracy evaluation on B^2(Z/3)", not bad, "; ".join(bad[:2]))

    # structure maps are additive
    bad = []
    for p in range(1, 3):
        for x, y in itertools.product(range(X.size(p)), repeat=2):
            sx, sy = decode_tuple(x, S.size, p * p), decode_tuple(y, S.size, p * p)
            z = encode_tuple([S.add[a][b] for a, b in zip(sx, sy)], S.size)
            for i in range(p + 1):
                fx = decode_tuple(X.face(p, i, x), S.size, (p - 1) ** 2)
                fy = decode_tuple(X.face(p, i, y), S.size, (p - 1) ** 2)
                if X.face(p, i, z) != encode_tuple([S.add[a][b] for a, b in zip(fx, fy)], S.size):
                    bad.append(f"d_{i} on ({x}, {y}) at level {p}")
    suite.check("faces of B^2(Z/3) are additive", not bad, "; ".join(bad[:2]))


########
# em
########
EM_RINGS = ("Z/2", "Z/5", "Z/2 x Z/4", "Z")


def suite_em(suite, config):
    for text in EM_RINGS:
        spec = RingSpec.parse(text)
        G = spec.additive_group()
        for n in (0, 1, 2):
            groups = homotopy_groups(iterated_bar(spec, n, n + 2), n + 1)
            expected = [str(G) if i == n else "0" for i in range(n + 2)]
            got = [str(g) for g in groups]
            suite.check(f"π_* of B^{n}({text})", got == expected, f"{got} vs {expected}")
    groups = [str(g) for g in homotopy_groups(iterated_bar(RingSpec.parse("Z/2"), 3, 5), 4)]
    suite.check("π_* of B^3(Z/2)", groups == ["0", "0", "0", "Z/2", "0"], str(groups))

    K = iterated_bar(RingSpec.parse("Z/2"), 1, 6).as_set()
    groups = [str(g) for g in homology(K, Coefficients.parse("Z"), 5)]
    expected = ["Z", "Z/2", "0", "Z/2", "0", "Z/2"]
    suite.check("integral homology of K(Z/2, 1)", groups == expected, f"{groups} vs {expected}")

    K3 = iterated_bar(RingSpec.parse("Z/3"), 1, 5).as_set()
    dims = [g.dimension() for g in homology(K3, Coefficients.parse("F3"), 4)]
    suite.check("F_3 homology of K(Z/3, 1)", dims == [1, 1, 1, 1, 1], str(dims))


########
# cup
########
CUP_RINGS = ("Z/2", "Z/3", "Z/4", "Z/2 x Z/2")


def suite_cup(suite, config):
    for text in CUP_RINGS:
        S = RingSpec.parse(text).finite_ring()
        bad, skipped = [], 0
        for n, m in itertools.product(range(4), repeat=2):
            if n + m > 3:
                continue
            for p in range(4):
                if S.size ** (p ** n + p ** m) > SWEEP_BUDGET * 16:
                    skipped += 1
                    continue
                for Y in level_elements(S, n, p):
                    for X in level_elements(S, m, p):
                        if cup_eval(S, n, m, p, Y, X) != cup_closed_form(S, n, m, p, Y, X):
                            bad.append(f"⌣_{{{n},{m}}} at level {p} on ({Y}, {X})")
        detail = "; ".join(bad[:2]) or (f"{skipped} (n, m, p) cases above the sweep budget" if skipped else "")
        suite.check(f"⌣ recursion matches the closed form on {text}", not bad, detail)

    for text, n_max, p_max in (("Z/2", 2, 3), ("Z/4", 2, 3), ("Z/6", 2, 3)):
        S = RingSpec.parse(text).finite_ring()
        if config.fault:
            S = S.with_swapped_entry(1, 1, S.zero)
        report = check_graded_ring_axioms(S, n_max, p_max, config.cap, seed=config.seed)
        reduced = sum(mode == "generators" for mode in report.measurements["sweeps"].values())
        detail = "; ".join(f"{name}: {w[0]}" for name, w in report.failures().items()) or \
            (f"{reduced} sweeps on generators" if reduced else "")
        suite.check(f"graded ring axioms of B^*({S.name}) for n ≤ {n_max}, p ≤ {p_max}", report.passed, detail)

    S = FiniteRing.cyclic(2)
    pairing = homology_circle_product(S, Coefficients.parse("F2"), 1, 1, 1, 1, seed=config.seed, cap=config.cap)
    suite.check("H_1(B Z/2) ⊗ H_1(B Z/2) → H_2(B^2 Z/2) over F_2",
                pairing.matrix == [[1]] and pairing.representative_independent, str(pairing.to_dict()))


########
# naturality and hopf
########
def suite_naturality(suite, config):
    S = FiniteRing.cyclic(3)
    report = naturality_check(S, Coefficients.parse("F3"), 2, config.level_max, config.cap,
                              transpose_fault=config.fault)
    suite.check(f"k[B^nS] = B^n k[S] for Z/3 over F3 through level {config.level_max}", report.passed,
                "; ".join(report.mismatches[:2]))


def suite_hopf(suite, config):
    S = FiniteRing.cyclic(4)
    for n in (0, 1):
        report = hopf_checks(S, Coefficients.parse("F2"), n, config.level_max, config.cap)
        suite.check(f"Hopf algebra structure of F2[B^{n}(Z/4)]", report.passed, "; ".join(report.mismatches[:2]))


########
# dg
########
def suite_dg(suite, config):
    for size, prime in ((2, 2), (3, 3)):
        k = Coefficients(prime, True)
        X = linearize(bar_simplicial_group(FiniteRing.cyclic(size), 3).as_set(), k)
        ez, aw = ez_shuffle(X, X, 3), alexander_whitney(X, X, 3)
        suite.check(f"AW ∘ EZ is the identity on N(B(Z/{size}))⊗2 over F{prime}", (aw @ ez).is_identity())
        suite.check(f"EZ and AW are chain maps over F{prime}", not ez.failures() and not aw.failures(),
                    f"EZ {ez.failures()}, AW {aw.failures()}")

    for prime in (2, 3):
        A = truncated_polynomial(prime, 2)
        bar_dims = dg_homology_dims(dg_bar(A, 5), prime, 4)
        simplicial_dims = [g.dimension() for g in homotopy_groups(iterated_algebra_bar(A, 1, 5), 4)]
        suite.check(f"dg bar and simplicial bar homology of F{prime}[x]/x^2",
                    bar_dims == simplicial_dims == [1] * 5, f"{bar_dims} vs {simplicial_dims}")
        axioms = dg_bar(A, 4).check_axioms()
        suite.check(f"dg bar of F{prime}[x]/x^2 is a commutative dg algebra",
                    not any(axioms.values()), "; ".join(f"{k}: {v[0]}" for k, v in axioms.items() if v))

    for size in (2, 3):
        # the diagonal of B_•(B(Z/m)) has m^(p^2) simplices in level p
        up_to = 3
        while up_to > 0 and size ** ((up_to + 1) ** 2) > config.cap:
            up_to -= 1
        X = linearize(levelwise_bar(bar_simplicial_group(FiniteRing.cyclic(size), up_to + 2)).as_set(),
                      Coefficients(size, True))
        report = dold_puppe_compare(X, up_to, size)
        detail = f"{report.diagonal_dims} vs {report.condensed_dims}"
        if up_to < 3:
            detail += f"; degree {up_to + 1} needs {size ** ((up_to + 2) ** 2)} simplices, cap is {config.cap}"
        suite.check(f"Dold–Puppe for B_•(B(Z/{size})) through degree {up_to}", report.agrees, detail)


RUNNERS = {
    "linalg": suite_linalg,
    "simplicial": suite_simplicial,
    "bar": suite_bar,
    "em": suite_em,
    "cup": suite_cup,
    "naturality": suite_naturality,
    "hopf": suite_hopf,
    "dg": suite_dg,
}


def run_suites(config):
    """Run the named suite, or every suite for "all"; returns the CheckRecords."""
    names = SUITES if config.suite == "all" else (config.suite,)
    unknown = [name for name in names if name not in RUNNERS]
    if unknown:
        raise InvalidInput(f"unknown suite {unknown[0]}, expected one of {', '.join(SUITES)} or all")
    records = []
    for name in names:
        logger.info(f"running suite {name}{' with injected faults' if config.fault else ''}")
        RUNNERS[name](_Suite(name, records), config)
    failed = sum(not r.passed for r in records)
    logger.info(f"{len(records)} checks, {failed} failed")
    return records
