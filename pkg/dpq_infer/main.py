"""
Command-line front end.

    dpq cost --history h.csv
    dpq infer --history h.csv --query q.json --method pc --gamma 0.01 --out p.csv

Exit status is 0 on success, 1 on usage errors and 2 on runtime errors.
"""
import argparse
import json
import math
import sys

from dpq_infer.algos.blue import chebyshev_delta, fit, reconstruct_cube
from dpq_infer.algos.interval import (
    claim_probability, confidence_of, credible_interval, tail_probability,
)
from dpq_infer.algos.posterior import load_posterior, posterior_of, save_posterior
from dpq_infer.data.cube import (
    load_cube, load_query, query_from_dict, sensitivity_of,
)
from dpq_infer.data.history import QueryHistory, load_history, save_history
from dpq_infer.privacy.ledger import BudgetLedger, allocate_budget, system_cost
from dpq_infer.privacy.mechanism import NoiseSource, answer_query
from dpq_infer.trainers.engine import INFERENCE_STREAM, QueryEngine
from dpq_infer.trainers.experiment import run_experiment, run_timing
from dpq_infer.utils.config import Config
from dpq_infer.utils.logging import format_value, logger
from dpq_infer.exceptions import ParseError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError("{}: error: {}".format(self.prog, message))


def _global_flags():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--cube')
    parser.add_argument('--history')
    parser.add_argument('--query')
    parser.add_argument('--gamma', type=float, default=Config.GAMMA)
    parser.add_argument('--samples', type=int)
    parser.add_argument('--epsilon', type=float)
    parser.add_argument('--delta', type=float)
    parser.add_argument('--bound', type=float)
    parser.add_argument('--method', choices=("pc", "mc", "auto"), default=Config.METHOD)
    parser.add_argument('--estimator', choices=("blue", "ols"), default=Config.ESTIMATOR)
    parser.add_argument('--out')
    return parser


def build_parser():
    common = _global_flags()
    parser = ArgumentParser(prog="dpq", description="Differentially private query answering "
                            "with inference over past answers.")
    verbs = parser.add_subparsers(dest="verb", metavar="verb", parser_class=ArgumentParser)

    p = verbs.add_parser('answer', parents=[common], help="one noisy answer from the cube")
    p.add_argument('--alpha', type=float, help="budget; allocated from epsilon/delta if unset")

    verbs.add_parser('estimate', parents=[common], help="best linear unbiased estimate")
    verbs.add_parser('infer', parents=[common], help="posterior mass vector of a query")

    p = verbs.add_parser('interval', parents=[common], help="credible interval of a posterior")
    p.add_argument('--posterior', help="posterior CSV written by `infer`")
    p.add_argument('--above', type=float, help="also print Pr(theta > ABOVE)")
    p.add_argument('--claim', type=float, nargs=2, metavar=("L", "U"),
                   help="also print Pr(L <= theta <= U)")

    p = verbs.add_parser('cost', parents=[common], help="per-cell privacy cost of a history")
    p.add_argument('--alpha', type=float, help="check admission of --query at this budget")

    p = verbs.add_parser('allocate', parents=[common], help="budget for a utility requirement")
    p.add_argument('--sensitivity', type=float)

    p = verbs.add_parser('serve-batch', parents=[common], help="serve a JSON-lines request file")
    p.add_argument('--requests', required=True)
    p.add_argument('--save-history')

    for name, text in (('bench', "run the serving experiment"),
                       ('timing', "running-time sweep")):
        p = verbs.add_parser(name, parents=[common], help=text)
        p.add_argument('--config', help="JSON config file")
        p.add_argument('--preset', choices=("unbounded", "bounded"))
    return parser


def _require(args, *names):
    missing = ["--" + n.replace("_", "-") for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("{} requires {}".format(args.verb, ", ".join(missing)))


def _print_row(*values):
    print(",".join(format_value(v) for v in values))


def _history_and_query(args):
    _require(args, 'history', 'query')
    history = load_history(args.history)
    query, requirement = load_query(args.query, n=history.n)
    return history, query, requirement


def _inference_params(args):
    return dict(gamma=args.gamma, samples=args.samples)


def cmd_answer(args):
    _require(args, 'cube', 'query')
    cube = load_cube(args.cube)
    query, requirement = load_query(args.query, n=cube.n)
    alpha = args.alpha
    if alpha is None:
        epsilon = args.epsilon or (requirement and requirement.epsilon)
        delta = args.delta or (requirement and requirement.delta)
        if not epsilon or not delta:
            raise UsageError("answer requires --alpha or epsilon and delta")
        alpha = allocate_budget(sensitivity_of(query), epsilon, delta)
    noisy = answer_query(cube, query, alpha, NoiseSource(args.seed))
    _print_row("answer", noisy)
    _print_row("alpha", alpha)
    if args.out:
        history = load_history(args.history) if args.history else QueryHistory.empty(cube.n)
        save_history(history.append(query, noisy, alpha), args.out)


def cmd_estimate(args):
    history, query, requirement = _history_and_query(args)
    weights = fit(history, query, args.estimator)
    _print_row("estimate", weights.point_estimate)
    _print_row("variance", weights.variance)
    epsilon = args.epsilon or (requirement and requirement.epsilon)
    if epsilon:
        _print_row("chebyshev_delta", chebyshev_delta(weights.variance, epsilon))
    _print_row("x_hat", *reconstruct_cube(history, args.estimator))


def _posterior_from_args(args):
    history, query, requirement = _history_and_query(args)
    weights = fit(history, query, args.estimator)
    source = NoiseSource(args.seed).spawn(INFERENCE_STREAM).spawn(0)
    posterior = posterior_of(weights, history, args.method, _inference_params(args), source)
    return posterior, requirement


def cmd_infer(args):
    posterior, _ = _posterior_from_args(args)
    if args.out:
        save_posterior(posterior, args.out, _inference_params(args))
    _print_row("center", posterior.center_value)
    _print_row("method", posterior.method)
    _print_row("length", len(posterior.mass))
    _print_row("loss", posterior.loss)


def cmd_interval(args):
    requirement = None
    if args.posterior:
        posterior = load_posterior(args.posterior)
    else:
        posterior, requirement = _posterior_from_args(args)
    delta = args.delta or (requirement and requirement.delta)
    if not delta:
        raise UsageError("interval requires --delta")
    lower, upper = credible_interval(posterior, delta)
    _print_row("L", lower)
    _print_row("U", upper)
    _print_row("confidence", confidence_of(posterior, lower - 0.5, upper + 0.5))
    if args.above is not None:
        _print_row("above", tail_probability(posterior, args.above))
    if args.claim is not None:
        _print_row("claim", claim_probability(posterior, *args.claim))


def cmd_cost(args):
    _require(args, 'history')
    history = load_history(args.history)
    per_cell, alpha_bar = system_cost(history)
    _print_row("B", *per_cell)
    _print_row("alpha_bar", alpha_bar)
    if args.query is not None:
        _require(args, 'alpha')
        query, _ = load_query(args.query, n=history.n)
        ledger = BudgetLedger.from_history(history, args.bound or math.inf)
        admission = ledger.admit(query, args.alpha)
        _print_row("admitted", str(admission.admitted).lower())
        _print_row("excess", admission.excess)


def cmd_allocate(args):
    sensitivity = args.sensitivity
    requirement = None
    if args.query is not None:
        query, requirement = load_query(args.query)
        sensitivity = sensitivity_of(query)
    if sensitivity is None:
        raise UsageError("allocate requires --query or --sensitivity")
    epsilon = args.epsilon or (requirement and requirement.epsilon)
    delta = args.delta or (requirement and requirement.delta)
    if not epsilon or not delta:
        raise UsageError("allocate requires epsilon and delta")
    _print_row("alpha", allocate_budget(sensitivity, epsilon, delta))


def _read_requests(path, n):
    requests = []
    with open(path, "r") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except ValueError as e:
                raise ParseError("invalid JSON: {}".format(e), path, lineno)
            try:
                query, requirement = query_from_dict(payload, n=n, require_utility=True)
            except ParseError as e:
                raise ParseError(str(e), path, lineno)
            requests.append((query, requirement))
    return requests


def cmd_serve_batch(args):
    _require(args, 'cube')
    cube = load_cube(args.cube)
    history = load_history(args.history) if args.history else QueryHistory.empty(cube.n)
    config = Config(seed=args.seed, bound=args.bound, method=args.method, gamma=args.gamma,
                    samples=args.samples, estimator=args.estimator, n=cube.n)
    requests = _read_requests(args.requests, cube.n)
    logger.set_log_tabular_only(True)
    if args.out:
        logger.add_tabular_output(args.out)
    try:
        engine = QueryEngine.from_config(cube, history, NoiseSource(args.seed), config)
        responses = engine.run_session(requests)
    finally:
        if args.out:
            logger.remove_tabular_output(args.out)
    if not args.out:
        for row in engine.run_log:
            _print_row(*row.values())
    if args.save_history:
        save_history(engine.history, args.save_history)
    _print_row("answered", sum(r.served_from != "rejected" for r in responses))
    _print_row("alpha_bar", engine.ledger.alpha_bar)


def _config_from_args(args):
    overrides = {}
    if args.config:
        with open(args.config, "r") as f:
            try:
                overrides = json.load(f)
            except ValueError as e:
                raise ParseError(str(e), args.config)
    if args.preset == "bounded":
        return Config.bounded(**overrides)
    if args.preset == "unbounded":
        return Config.unbounded(**overrides)
    return Config.from_dict(overrides)


def cmd_bench(args):
    config = _config_from_args(args)
    results = run_experiment(config, log_dir=args.out)
    _print_row("mode", "R_a", "R_i", "E")
    for mode, metrics in results.items():
        _print_row(mode, *metrics)


def cmd_timing(args):
    config = _config_from_args(args)
    rows = run_timing(config, log_dir=args.out)
    if rows:
        _print_row(*rows[0].keys())
    for row in rows:
        _print_row(*row.values())


COMMANDS = {
    'answer': cmd_answer,
    'estimate': cmd_estimate,
    'infer': cmd_infer,
    'interval': cmd_interval,
    'cost': cmd_cost,
    'allocate': cmd_allocate,
    'serve-batch': cmd_serve_batch,
    'bench': cmd_bench,
    'timing': cmd_timing,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verb is None:
            raise UsageError("a verb is required: {}".format(", ".join(COMMANDS)))
        COMMANDS[args.verb](args)
    except SystemExit as e:
        # --help
        return e.code or EXIT_OK
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        print("dpq: {}".format(e), file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
