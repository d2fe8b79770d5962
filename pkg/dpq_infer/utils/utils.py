import datetime
import json
import os
import os.path as osp
from collections import OrderedDict

import dateutil.tz
import numpy as np

from dpq_infer.utils.logging import LogEncoder, logger

RUNS_DIR = "experiments"


def summary_stats(name, values, with_range=True):
    """Mean and std (and max/min) of `values` keyed as '<name> Mean' etc."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return OrderedDict()
    stats = OrderedDict([
        ('{} Mean'.format(name), float(np.mean(values))),
        ('{} Std'.format(name), float(np.std(values))),
    ])
    if with_range:
        stats['{} Max'.format(name)] = float(np.max(values))
        stats['{} Min'.format(name)] = float(np.min(values))
    return stats


def run_name(prefix, seed=0):
    now = datetime.datetime.now(dateutil.tz.tzlocal())
    return "{}_{}_s{}".format(prefix, now.strftime('%Y_%m_%d_%H_%M_%S'), seed)


def make_run_dir(prefix, seed=0, base_dir=None):
    """Fresh directory <base_dir>/<prefix>/<prefix>_<timestamp>_s<seed>."""
    run_dir = osp.join(base_dir or RUNS_DIR, prefix, run_name(prefix, seed))
    if osp.exists(run_dir):
        logger.log("WARNING: run directory {} already exists".format(run_dir))
    os.makedirs(run_dir, exist_ok=True)
    return run_dir


def setup_logger(
        exp_prefix="dpq",
        variant=None,
        log_dir=None,
        seed=0,
        log_tabular_only=False,
        tensorboard=True,
        text_log_file="debug.log",
        variant_log_file="variant.json",
):
    """
    Points the logger at a run directory: text lines go to `text_log_file`,
    the variant (a config dict) is echoed and saved as JSON.

    Tabular outputs are added by the caller, one per run log.
    :param log_dir: Used as is when given, otherwise a fresh run directory.
    :param tensorboard: Mirror tabular scalars to a SummaryWriter in log_dir.
    :return: the log directory
    """
    if log_dir is None:
        log_dir = make_run_dir(exp_prefix, seed)
    else:
        os.makedirs(log_dir, exist_ok=True)

    logger.set_log_tabular_only(log_tabular_only)
    logger.add_text_output(osp.join(log_dir, text_log_file))
    if variant is not None:
        logger.log("Config: " + json.dumps(variant, sort_keys=True, cls=LogEncoder))
        logger.log_variant(osp.join(log_dir, variant_log_file), variant)
    if tensorboard:
        logger.set_snapshot_dir(log_dir)
    return log_dir
