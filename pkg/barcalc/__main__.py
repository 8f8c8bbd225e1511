import argparse
import sys

import sympy

import barcalc.utils as utils
from barcalc.bar import iterated_bar, iterated_algebra_bar
from barcalc.config import RunConfig
from barcalc.cup import homology_circle_product, check_graded_ring_axioms
from barcalc.dg import dg_bar, dg_homology_dims
from barcalc.errors import BarcalcError, InvalidInput, EXIT_OK, EXIT_VERIFICATION
from barcalc.export import (result_document, write_document, write_complex, complex_document, canonical_json_bytes,
                            sha256_bytes)
from barcalc.rings import RingSpec, Coefficients, AugCommAlgebra
from barcalc.simplicial import homotopy_groups, homology, normalized_chains, linearize
from barcalc.verify import run_suites, SUITES

########
# Commands. Each returns (results, exit status).
########
def _finite_ring(config):
    spec = RingSpec.parse(config.ring)
    if not spec.is_finite:
        raise InvalidInput(f"{config.command} needs a finite ring, got {config.ring}")
    return spec.finite_ring()


def _render(groups, coefficients):
    if coefficients.field:
        return [g.dimension() for g in groups]
    return [str(g) for g in groups]


def cmd_em_homotopy(config, timings):
    spec = RingSpec.parse(config.ring)
    with utils.timed(timings, "build"):
        M = iterated_bar(spec, config.n, config.truncation, config.cap)
    with utils.timed(timings, "homotopy"):
        groups = homotopy_groups(M, config.max_degree)
    return {"groups": [str(g) for g in groups]}, EXIT_OK


def cmd_em_homology(config, timings):
    coefficients = Coefficients.parse(config.coeff)
    with utils.timed(timings, "build"):
        X = iterated_bar(RingSpec.parse(config.ring), config.n, config.truncation, config.cap).as_set()
    with utils.timed(timings, "homology"):
        groups = homology(X, coefficients, config.max_degree)
    key = "dims" if coefficients.field else "groups"
    return {"coefficients": str(coefficients), key: _render(groups, coefficients)}, EXIT_OK


def cmd_cup_table(config, timings):
    S = _finite_ring(config)
    coefficients = Coefficients.parse(config.coeff)
    if config.pair is None and not config.verify_axioms:
        raise InvalidInput("cup-table needs --pair, --verify-axioms or both")
    results, status = {}, EXIT_OK
    if config.pair is not None:
        (n, i), (m, j) = config.pair_degrees()
        with utils.timed(timings, "pairing"):
            pairing = homology_circle_product(S, coefficients, n, m, i, j, seed=config.seed, cap=config.cap)
        results["pairing"] = pairing.to_dict()
    if config.verify_axioms:
        with utils.timed(timings, "axioms"):
            report = check_graded_ring_axioms(S, config.nmax, config.pmax, config.cap, seed=config.seed)
        results["axioms"] = {
            "n_max": report.n_max,
            "p_max": report.p_max,
            "passed": report.passed,
            "checks": {name: {"checked": c.checked, "failed": c.failed, "witnesses": [repr(w) for w in c.witnesses]}
                       for name, c in report.axioms.items()},
            "measurements": report.measurements,
        }
        if not report.passed:
            status = EXIT_VERIFICATION
    return results, status


def cmd_hochschild(config, timings):
    if not config.algebra:
        raise InvalidInput("hochschild needs --algebra with a structure-constant file")
    A = AugCommAlgebra.from_json(config.algebra)
    with utils.timed(timings, "simplicial"):
        groups = homotopy_groups(iterated_algebra_bar(A, config.n, config.truncation, config.cap),
                                 config.max_degree)
    coefficients = Coefficients(A.modulus, sympy.isprime(A.modulus))
    results = {"algebra": A.name, "coefficients": str(coefficients)}
    results["dims" if coefficients.field else "groups"] = _render(groups, coefficients)
    # dg-side cross-check through iterated dg bars
    if coefficients.field and config.n >= 1:
        with utils.timed(timings, "dg"):
            D = A
            for _ in range(config.n):
                D = dg_bar(D, config.max_degree + 1)
            results["dg_dims"] = dg_homology_dims(D, A.modulus, config.max_degree)
    return results, EXIT_OK


def cmd_export_complex(config, timings):
    coefficients = Coefficients.parse(config.coeff)
    with utils.timed(timings, "chains"):
        X = iterated_bar(RingSpec.parse(config.ring), config.n, config.truncation, config.cap).as_set()
        C = normalized_chains(linearize(X, coefficients), config.max_degree)
    if config.output is None:
        sys.stdout.buffer.write(canonical_json_bytes(complex_document(C, str(coefficients)), sort_keys=False))
        return None, EXIT_OK
    path = write_complex(C, config.output, str(coefficients))
    return {"path": str(path), "ranks": C.ranks, "sha256": sha256_bytes(path.read_bytes())}, EXIT_OK


def cmd_verify(config, timings):
    with utils.timed(timings, "verify"):
        records = run_suites(config)
    failed = [r for r in records if not r.passed]
    results = {"passed": not failed, "checks": len(records), "failed": len(failed),
               "records": [r.to_dict() for r in records]}
    return results, EXIT_VERIFICATION if failed else EXIT_OK


COMMANDS = {
    "em-homotopy": cmd_em_homotopy,
    "em-homology": cmd_em_homology,
    "cup-table": cmd_cup_table,
    "hochschild": cmd_hochschild,
    "export-complex": cmd_export_complex,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="barcalc",
                                     description="Bar constructions, Eilenberg-MacLane objects and their products.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("-c", "--config", default=None, type=str, help="Load run configuration from YAML file")
        sub.add_argument("-v", "--verbose", default=1, action="count", help="Increase output verbosity")
        sub.add_argument("--ring", default=None, type=str, help="Ring: Z, Z/m, products 'Z/2 x Z/4' or table:PATH (default: Z/2)")
        sub.add_argument("--n", default=None, type=int, help="Bar iteration n (default: 1)")
        sub.add_argument("--m", default=None, type=int, help="Second bar iteration m (default: 1)")
        sub.add_argument("--coeff", default=None, type=str, help="Coefficients: Z, Z/m or Fp (default: Z)")
        sub.add_argument("--max-degree", dest="max_degree", default=None, type=int, help="Highest degree (default: 3)")
        sub.add_argument("--truncation", default=None, type=int, help="Highest stored level (default: max degree + 1)")
        sub.add_argument("--cap", default=None, type=int, help="Maximum simplices per enumerated level")
        sub.add_argument("--output", default=None, type=str, help="Write the result to this file")
        sub.add_argument("--seed", default=None, type=int, help="Seed for randomized sweeps (default: 0)")
        sub.add_argument("--pair", default=None, type=str, help="Homology degrees n,i:m,j for cup-table")
        sub.add_argument("--verify-axioms", dest="verify_axioms", default=None, action="store_true",
                         help="Check the graded ring axioms exhaustively")
        sub.add_argument("--nmax", default=None, type=int, help="Largest n + m for axiom checks (default: 2)")
        sub.add_argument("--pmax", default=None, type=int, help="Largest level for axiom checks (default: 2)")
        sub.add_argument("--algebra", default=None, type=str, help="Structure-constant JSON of an augmented algebra")
        sub.add_argument("--suite", default=None, type=str, choices=SUITES + ("all",), help="Verification suite (default: all)")
        sub.add_argument("--fault", default=None, action="store_true", help="Inject faults into verified inputs")
        sub.add_argument("--level-max", dest="level_max", default=None, type=int, help="Highest level for structure checks (default: 3)")
    return parser


def main(argv=None):
    # Parse commandline arguments
    args = build_parser().parse_args(argv)

    # Initialize logging
    log_level = 40 - (10 * args.verbose) if args.verbose > 0 else 0
    logger = utils.init_logger(log_level)
    if log_level <= 10:
        utils.log_arguments(vars(args))

    try:
        config = RunConfig.from_args(args)
        utils.seed(config.seed)

        timings = {}
        results, status = COMMANDS[config.command](config, timings)
        if results is None:
            return status

        # Emit result document
        document = result_document(config.command, config.inputs(), results, timings)
        if config.output and config.command != "export-complex":
            write_document(document, config.output)
            logger.info(f"Wrote {config.output}")
        else:
            sys.stdout.buffer.write(canonical_json_bytes(document, sort_keys=False))
        return status
    except BarcalcError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_status


if __name__ == "__main__":
    sys.exit(main())
