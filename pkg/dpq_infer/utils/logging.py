"""
Process-wide run logger in the style of rllab's logger.
https://github.com/rll/rllab

Text lines are timestamped and echoed to stdout and every text file.
Tabular rows are collected key by key and written on `dump_tabular` to
every CSV output, printed as a table and mirrored to tensorboard.
"""
from collections import OrderedDict
from contextlib import contextmanager
import csv
import datetime
import json
import os
import sys

import dateutil.tz
import numpy as np
from tabulate import tabulate


def format_value(val):
    """Round-trip text for floats, "" for None, str() for everything else."""
    if isinstance(val, (float, np.floating)):
        return repr(float(val))
    if val is None:
        return ""
    return str(val)


class LogEncoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.integer, np.floating)):
            return o.item()
        return json.JSONEncoder.default(self, o)


def _ensure_parent(path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


class _CsvOutput(object):
    """One CSV file; its columns are the keys of the first row, in order."""

    def __init__(self, path):
        _ensure_parent(path)
        self.fd = open(path, "w", newline='')
        self.fieldnames = None

    def write(self, row, on_mismatch):
        if self.fieldnames is None:
            self.fieldnames = list(row)
            csv.writer(self.fd, lineterminator="\n").writerow(self.fieldnames)
        elif set(self.fieldnames) != set(row):
            on_mismatch(sorted(set(self.fieldnames) ^ set(row)))
        csv.DictWriter(self.fd, fieldnames=self.fieldnames, extrasaction="ignore",
                       lineterminator="\n").writerow(row)
        self.fd.flush()

    def close(self):
        self.fd.close()


class Logger(object):
    def __init__(self):
        self._prefixes = []
        self._tabular_prefixes = []
        self._row = []
        self._text_fds = OrderedDict()
        self._csv_outputs = OrderedDict()
        self._snapshot_dir = None
        self._writer = None
        self._step = 0
        self._log_tabular_only = False

    def reset(self):
        self.close()
        self.__init__()

    def close(self):
        for fd in self._text_fds.values():
            fd.close()
        for output in self._csv_outputs.values():
            output.close()
        if self._writer is not None:
            self._writer.close()

    def add_text_output(self, path):
        if path not in self._text_fds:
            _ensure_parent(path)
            self._text_fds[path] = open(path, "a")

    def add_tabular_output(self, path):
        if path not in self._csv_outputs:
            self._csv_outputs[path] = _CsvOutput(path)

    def remove_tabular_output(self, path):
        output = self._csv_outputs.pop(path, None)
        if output is not None:
            output.close()

    def set_snapshot_dir(self, dir_name):
        # lazy: pulls in torch
        from torch.utils.tensorboard import SummaryWriter

        if self._writer is not None:
            self._writer.close()
        self._snapshot_dir = dir_name
        self._writer = SummaryWriter(log_dir=dir_name)

    def set_log_tabular_only(self, log_tabular_only):
        self._log_tabular_only = log_tabular_only

    @contextmanager
    def prefix(self, text):
        self._prefixes.append(text)
        try:
            yield
        finally:
            self._prefixes.pop()

    @contextmanager
    def tabular_prefix(self, text):
        self._tabular_prefixes.append(text)
        try:
            yield
        finally:
            self._tabular_prefixes.pop()

    def log(self, s, with_prefix=True, with_timestamp=True):
        if with_prefix:
            s = ''.join(self._prefixes) + s
        if with_timestamp:
            now = datetime.datetime.now(dateutil.tz.tzlocal())
            s = "{} | {}".format(now.strftime('%Y-%m-%d %H:%M:%S.%f %Z'), s)
        if not self._log_tabular_only:
            print(s)
            sys.stdout.flush()
        for fd in self._text_fds.values():
            fd.write(s + '\n')
            fd.flush()

    def record_tabular(self, key, val):
        self._row.append((''.join(self._tabular_prefixes) + str(key), val))

    def record_dict(self, d, prefix=None):
        if prefix is None:
            for k, v in d.items():
                self.record_tabular(k, v)
            return
        with self.tabular_prefix(prefix):
            self.record_dict(d)

    def log_variant(self, path, variant):
        _ensure_parent(path)
        with open(path, "w") as f:
            json.dump(variant, f, indent=2, sort_keys=True, cls=LogEncoder)

    def _write_scalars(self, step):
        for key, val in self._row:
            if isinstance(val, (int, float, np.number)) and not isinstance(val, bool):
                self._writer.add_scalar(key, float(val), step)

    def dump_tabular(self, with_prefix=True, with_timestamp=True, step=None):
        """
        Writes the recorded row to every CSV output and prints it.

        :param step: tensorboard step; defaults to one past the last dump.
        """
        if not self._row:
            return
        step = self._step if step is None else step
        self._step = step + 1
        if self._writer is not None:
            self._write_scalars(step)

        row = OrderedDict((k, format_value(v)) for k, v in self._row)
        if not self._log_tabular_only:
            for line in tabulate(list(row.items())).split('\n'):
                self.log(line, with_prefix=with_prefix, with_timestamp=with_timestamp)
        for path, output in self._csv_outputs.items():
            output.write(row, lambda keys, path=path: self.log(
                "Warning: CSV key mismatch in {}: {}".format(path, keys)))
        del self._row[:]


logger = Logger()
