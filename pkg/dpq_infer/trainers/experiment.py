"""
Experiment harness: the same request stream served with inference and by
the always-fresh baseline, plus running-time sweeps of the estimators.
"""
from collections import OrderedDict
import csv
import os.path as osp

import numpy as np
import gtimer as gt

from dpq_infer.algos.blue import fit
from dpq_infer.algos.monte_carlo import MonteCarlo
from dpq_infer.algos.probability_calculation import ProbabilityCalculation, pc_lengths
from dpq_infer.bench.metrics import compute_metrics, metrics_dict
from dpq_infer.bench.workload import (
    build_hier_history, generate_queries, generate_requirements, random_cube,
)
from dpq_infer.data.cube import LinearQuery, UtilityRequirement, true_answer
from dpq_infer.data.history import QueryHistory, save_history
from dpq_infer.privacy.mechanism import NoiseSource, answer_history
from dpq_infer.trainers.engine import BOOTSTRAP_STREAM, QueryEngine
from dpq_infer.utils import utils
from dpq_infer.utils.logging import logger

# NoiseSource children of the experiment root, next to the engine's
CUBE_STREAM = 3
QUERY_STREAM = 4
REQUIREMENT_STREAM = 5
TIMING_STREAM = 6


def build_workload(config, root):
    """:return: (cube, bootstrap history, [(query, requirement)])"""
    n = int(config.N)
    cube = random_cube(n, root.spawn(CUBE_STREAM), config.CUBE_MAX)
    if config.BOOTSTRAP_ALPHA:
        history = build_hier_history(cube, config.BOOTSTRAP_ALPHA, root.spawn(BOOTSTRAP_STREAM))
    else:
        history = QueryHistory.empty(n)
    queries = generate_queries(n, int(config.QUERIES), root.spawn(QUERY_STREAM))
    epsilons = generate_requirements(len(queries), config.EPSILON_RANGE,
                                     root.spawn(REQUIREMENT_STREAM))
    requests = [(q, UtilityRequirement(float(e), config.DELTA))
                for q, e in zip(queries, epsilons)]
    return cube, history, requests


def _modes(config):
    modes = [("inference", dict(infer=True, estimator="blue")),
             ("baseline", dict(infer=False, estimator="blue"))]
    if config.ESTIMATOR == "ols":
        modes.append(("ols", dict(infer=True, estimator="ols")))
    return modes


def run_mode(config, cube, history, requests, root, infer=True, estimator="blue",
             run_log_path=None):
    engine = QueryEngine.from_config(cube, history, root, config, simulate=True, infer=infer,
                                     weighting=estimator)
    if run_log_path is not None:
        logger.add_tabular_output(run_log_path)
    try:
        engine.run_session(requests)
    finally:
        if run_log_path is not None:
            logger.remove_tabular_output(run_log_path)
    return engine


def run_experiment(config, log_dir=None):
    """
    Serves one generated request stream once per mode.

    Writes run_log_<mode>.csv, metrics.csv, alpha_bar.csv and the final
    history of every mode into the log directory.
    :return: OrderedDict mode -> Metrics
    """
    log_dir = utils.setup_logger(
        exp_prefix=config.NAME,
        variant=config.to_dict(),
        log_dir=log_dir or config.LOG_DIR,
        log_tabular_only=True,
        seed=int(config.SEED),
    )
    root = NoiseSource(config.SEED)
    cube, history, requests = build_workload(config, root)
    truths = [true_answer(cube, q) for q, _ in requests]
    logger.log("{} requests over {} cells, bootstrap history of {} rows".format(
        len(requests), cube.n, history.m))

    results = OrderedDict()
    trajectories = OrderedDict()
    for mode, kwargs in _modes(config):
        gt.stamp('setup', unique=False)
        engine = run_mode(config, cube, history, requests, root,
                          run_log_path=osp.join(log_dir, "run_log_{}.csv".format(mode)),
                          **kwargs)
        results[mode] = compute_metrics(engine.run_log, truths)
        trajectories[mode] = engine.alpha_trajectory
        save_history(engine.history, osp.join(log_dir, "history_{}.csv".format(mode)))
        with logger.prefix("[{}] ".format(mode)):
            for key, value in engine.get_diagnostics().items():
                logger.log("{}: {}".format(key, value))
            for key, value in metrics_dict(results[mode]).items():
                logger.log("{}: {}".format(key, value))

    _write_metrics(osp.join(log_dir, "metrics.csv"), results)
    _write_trajectories(osp.join(log_dir, "alpha_bar.csv"), trajectories)
    return results


def _write_metrics(path, results):
    with open(path, "w", newline='') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["mode", "R_a", "R_i", "E"])
        for mode, m in results.items():
            writer.writerow([mode] + [repr(float(v)) for v in m])


def _write_trajectories(path, trajectories):
    modes = list(trajectories)
    with open(path, "w", newline='') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["qid"] + modes)
        for qid, values in enumerate(zip(*(trajectories[m] for m in modes))):
            writer.writerow([qid] + [repr(float(v)) for v in values])


def synthetic_history(n, m, max_sensitivity, source):
    """
    m >= n rows: the n unit rows followed by random integer rows with
    coefficients on {0..max_sensitivity}; budgets uniform on (0, 1].
    """
    gen = source.generator
    rows = [np.eye(n)[j] for j in range(n)]
    while len(rows) < m:
        row = gen.integers(0, max_sensitivity + 1, size=n).astype(np.float64)
        if row.any():
            rows.append(row)
    alphas = 1.0 - gen.random(m)
    cube = random_cube(n, source.spawn(0))
    return answer_history(cube, [LinearQuery(r) for r in rows], alphas, source.spawn(1))


def run_timing(config, log_dir=None):
    """
    Wall time of BLUE, PC and MC against history size m at fixed n.
    Writes timing.csv into the log directory.
    :return: list of row dicts
    """
    log_dir = utils.setup_logger(
        exp_prefix=config.NAME + "-timing",
        variant=config.to_dict(),
        log_dir=log_dir or config.LOG_DIR,
        log_tabular_only=True,
        seed=int(config.SEED),
        tensorboard=False,
    )
    root = NoiseSource(config.SEED).spawn(TIMING_STREAM)
    n = int(config.N)
    target = LinearQuery(np.ones(n))
    samples = int(config.SAMPLES or config.MIN_SAMPLE_SIZE)
    timing_path = osp.join(log_dir, "timing.csv")
    logger.add_tabular_output(timing_path)
    rows = []
    try:
        for i, m in enumerate(config.TIMING_SIZES):
            m = max(int(m), n)
            history = synthetic_history(n, m, int(config.TIMING_SENSITIVITY), root.spawn(i))
            times = gt.get_times().stamps.cum
            gt.stamp('timing setup', unique=False)
            weights = fit(history, target, config.ESTIMATOR)
            blue_time = _elapsed('timing blue')
            ProbabilityCalculation(config.GAMMA).noise_pmv(weights, history)
            gt.stamp('timing setup', unique=False)
            pc_time = _since(times, 'pc convolution') + _since(times, 'pc lengths')
            MonteCarlo(root.spawn(i).spawn(2), samples, min(samples, config.MIN_SAMPLE_SIZE)
                       ).noise_pmv(weights, history)
            gt.stamp('timing setup', unique=False)
            mc_time = _since(times, 'mc sampling') + _since(times, 'mc setup')
            row = OrderedDict([
                ('m', m),
                ('n', n),
                ('blue (s)', blue_time),
                ('pc (s)', pc_time),
                ('mc (s)', mc_time),
                ('pc max length', max(pc_lengths(weights, history, config.GAMMA))),
                ('mc samples', samples),
            ])
            rows.append(row)
            logger.record_dict(row)
            logger.dump_tabular(with_prefix=False, with_timestamp=False)
    finally:
        logger.remove_tabular_output(timing_path)
    return rows


def _elapsed(name):
    before = gt.get_times().stamps.cum.get(name, 0.0)
    gt.stamp(name, unique=False)
    return gt.get_times().stamps.cum[name] - before


def _since(previous, name):
    return gt.get_times().stamps.cum.get(name, 0.0) - previous.get(name, 0.0)
