"""Command-line interface.

Exit codes: 0 success (or relation holds), 1 environment/I-O failure,
2 bad input, 3 the relation was checked and found violated.

Each command writes its JSON document to ``--out`` and a short summary to
stdout. Without ``--out`` the JSON goes to stdout and the summary to stderr.
"""

import argparse
import sys
import warnings

import numpy as np

from . import serialization as ser
from .exceptions import MubRelationError, NoConvergence
from .measure import empirical_post_state, post_measurement_state, sample_measurements
from .mub import MixtureWeights, generate_mub, perturb_basis_set, verify_mub
from .qmat import random_density
from .relation import (
    DirectionTriple,
    affine_fit_counterexample,
    tomographic_reconstruct,
    trial_states,
    verify_relation,
)

EXIT_OK = 0
EXIT_ENV = 1
EXIT_INPUT = 2
EXIT_VIOLATED = 3

DEFAULT_DIRS = "0,0,1,1,0,0,1,1,1"


class InputError(Exception):
    pass


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--{name} must be comma-separated numbers, got {text!r}")


def _weights(text, count):
    w = np.asarray(_floats(text, "weights"))
    if w.size != count:
        raise InputError(f"--weights needs {count} values, got {w.size}")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InputError(f"--weights must be nonnegative and sum to 1 (sum {w.sum():.12g})")
    return MixtureWeights(w / w.sum())


def _read(path):
    with open(path) as fh:
        return ser.loads(fh.read())


def _emit(doc, summary, out):
    text = ser.dumps(doc) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def cmd_gen_mub(args):
    mubs = generate_mub(args.dim)
    report = verify_mub(mubs, args.tol)
    summary = (f"dim={mubs.dim} bases={len(mubs)} is_mub={report.is_mub} "
               f"max_deviation={report.max_deviation:.6g} <= {args.tol:g}")
    _emit(ser.mubset_to_dict(mubs), summary, args.out)
    return EXIT_OK


def cmd_verify_relation(args):
    if args.bases:
        bases = ser.bases_from_dict(_read(args.bases))
    else:
        bases = generate_mub(args.dim).bases
    dim = bases[0].dim
    if args.dim is not None and args.dim != dim:
        raise InputError(f"--dim {args.dim} does not match bases of dimension {dim}")
    if args.perturb:
        bases = perturb_basis_set(bases, args.perturb, seed=[args.seed, 1])
    weights = _weights(args.weights, len(bases)) if args.weights else MixtureWeights.uniform(len(bases))
    trials = args.trials if args.trials is not None else max(100, 2 * dim * dim)
    if trials < 1:
        raise InputError("--trials must be >= 1")
    states = trial_states(dim, trials, seed=args.seed)
    report = verify_relation(states, bases, weights, tol=args.tol)
    summary = (f"dim={dim} trials={report.trials} lambda_fit={report.lambda_fit:.6f} "
               f"residual={report.residual:.6g} holds={report.holds} "
               f"universality_tested={report.universality_tested}")
    _emit(ser.relation_report_to_dict(report), summary, args.out)
    return EXIT_OK if report.holds else EXIT_VIOLATED


def cmd_counterexample(args):
    d = _floats(args.dirs, "dirs")
    if len(d) != 9:
        raise InputError(f"--dirs needs 9 values, got {len(d)}")
    dirs = DirectionTriple.from_vectors(np.reshape(d, (3, 3)))
    w = _floats(args.weights, "weights") if args.weights else [1 / 3] * 3
    if len(w) != 3 or min(w) < 0 or abs(sum(w) - 1.0) > 1e-9:
        raise InputError("--weights needs 3 nonnegative values summing to 1")
    w = np.asarray(w) / sum(w)
    rng = np.random.default_rng(args.seed)
    states = np.stack([random_density(2, "pure", rng) for _ in range(args.trials)])
    report = affine_fit_counterexample(dirs, w, states)
    doc = ser.affine_report_to_dict(report)
    doc["directions"] = dirs.directions.tolist()
    doc["weights"] = w.tolist()
    summary = (f"alpha={report.best_alpha:.6f} beta={report.best_beta:.6f} "
               f"worst_case_residual={report.worst_case_residual:.6g} "
               f"identity_residual={report.identity_residual:.3g}")
    _emit(doc, summary, args.out)
    return EXIT_OK


def cmd_sample(args):
    if args.shots < 1:
        raise InputError("--shots must be >= 1")
    if args.state:
        rho = ser.matrix_from_dict(_read(args.state))
    else:
        rho = random_density(args.dim, "pure", args.seed)
    mubs = generate_mub(rho.shape[0])
    record = sample_measurements(rho, mubs, args.shots, args.seed)
    empirical = empirical_post_state(record, mubs)
    exact = post_measurement_state(rho, mubs)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        estimate = tomographic_reconstruct(record.frequencies(), mubs)
    post_err = float(np.linalg.norm(empirical - exact))
    rec_err = float(np.linalg.norm(estimate - rho))
    doc = {
        "record": ser.record_to_dict(record),
        "state": ser.matrix_to_dict(rho),
        "empirical_post_state": ser.matrix_to_dict(empirical),
        "exact_post_state": ser.matrix_to_dict(exact),
        "reconstructed_state": ser.matrix_to_dict(estimate),
        "post_state_error": post_err,
        "reconstruction_error": rec_err,
    }
    summary = (f"dim={rho.shape[0]} shots={record.shots} post_state_error={post_err:.6g} "
               f"reconstruction_error={rec_err:.6g}")
    _emit(doc, summary, args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="mubrelation", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-mub", help="generate a complete MUB set for a prime dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_mub)

    p = sub.add_parser("verify-relation", help="scan random states for the post-measurement relation")
    p.add_argument("--dim", type=int)
    p.add_argument("--bases", help="MubSet JSON file to use instead of generated MUBs")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights")
    p.add_argument("--perturb", type=float, default=0.0, help="rotate the last basis by this angle")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_relation)

    p = sub.add_parser("counterexample", help="affine fit for qubit measurements along three directions")
    p.add_argument("--dirs", default=DEFAULT_DIRS, help="9 comma-separated reals (n1, n2, n3)")
    p.add_argument("--weights")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("sample", help="finite-shot measurement experiment and tomography")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", help="matrix JSON file with the input state")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-relation" and args.dim is None and not args.bases:
        parser.error("verify-relation needs --dim or --bases")
    try:
        return args.func(args)
    except (InputError, MubRelationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, NoConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
