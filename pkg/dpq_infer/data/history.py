from collections import OrderedDict, namedtuple
import csv
import hashlib
import io

import numpy as np

from dpq_infer.data.cube import LinearQuery, decode_text, sensitivity_of
from dpq_infer.exceptions import ContractError, ParseError, ShapeError

HistoryRecord = namedtuple(
    'HistoryRecord',
    'query noisy_answer alpha sensitivity',
)


def _frozen(values, dtype=np.float64):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class QueryHistory(object):
    """
    Past noisy answers y = Hx + N(alpha./S), stored as aligned arrays.

    Histories are immutable; `append` returns a new history that shares
    nothing writable with the old one.
    """

    def __init__(self, H, y, alpha, sensitivity=None):
        H = np.asarray(H, dtype=np.float64)
        if H.ndim != 2:
            raise ShapeError("history matrix must be 2-D, got shape {}".format(H.shape))
        m, n = H.shape
        if n < 1:
            raise ShapeError("history must cover at least one cell")
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
        if y.size != m or alpha.size != m:
            raise ShapeError(
                "history has {} rows but {} answers and {} budgets".format(m, y.size, alpha.size))
        if np.any(alpha <= 0):
            raise ContractError("every history budget must be positive")
        derived = np.array([sensitivity_of(row) for row in H]) if m else np.zeros(0)
        if sensitivity is not None:
            sensitivity = np.asarray(sensitivity, dtype=np.float64).reshape(-1)
            if sensitivity.size != m:
                raise ShapeError("history has {} rows but {} sensitivities".format(
                    m, sensitivity.size))
            if not np.array_equal(sensitivity, derived):
                bad = int(np.flatnonzero(sensitivity != derived)[0])
                raise ContractError(
                    "row {} records sensitivity {} but its coefficients give {}".format(
                        bad, sensitivity[bad], derived[bad]))
        self._H = _frozen(H)
        self._y = _frozen(y)
        self._alpha = _frozen(alpha)
        self._sensitivity = _frozen(derived)

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((0, n)), [], [])

    @property
    def H(self):
        return self._H

    @property
    def y(self):
        return self._y

    @property
    def alpha(self):
        return self._alpha

    @property
    def sensitivity(self):
        return self._sensitivity

    @property
    def m(self):
        return self._H.shape[0]

    @property
    def n(self):
        return self._H.shape[1]

    def __len__(self):
        return self.m

    def __getitem__(self, i):
        return HistoryRecord(
            query=LinearQuery(self._H[i]),
            noisy_answer=float(self._y[i]),
            alpha=float(self._alpha[i]),
            sensitivity=float(self._sensitivity[i]),
        )

    def __iter__(self):
        for i in range(self.m):
            yield self[i]

    @property
    def rows(self):
        return list(self)

    def append(self, query, noisy_answer, alpha):
        if query.n != self.n:
            raise ShapeError("query over {} cells appended to a history over {} cells".format(
                query.n, self.n))
        return QueryHistory(
            np.vstack([self._H, query.coefficients[None, :]]),
            np.append(self._y, noisy_answer),
            np.append(self._alpha, alpha),
        )

    def rank(self, rel_tol=1e-10):
        if self.m == 0:
            return 0
        return int(np.linalg.matrix_rank(self._H, tol=rel_tol * np.abs(self._H).max()
                                         * max(self._H.shape)))

    def fingerprint(self):
        """Stable digest of the history contents."""
        digest = hashlib.sha256()
        for arr in (self._H, self._y, self._alpha):
            digest.update(np.ascontiguousarray(arr).tobytes())
        return digest.hexdigest()

    def get_diagnostics(self):
        return OrderedDict([
            ('size', self.m),
            ('cells', self.n),
            ('total alpha', float(self._alpha.sum())),
        ])

    def get_snapshot(self):
        return dict(H=self._H, y=self._y, alpha=self._alpha, sensitivity=self._sensitivity)

    def __eq__(self, other):
        return (isinstance(other, QueryHistory)
                and self._H.shape == other._H.shape
                and np.array_equal(self._H, other._H)
                and np.array_equal(self._y, other._y)
                and np.array_equal(self._alpha, other._alpha))

    def __repr__(self):
        return "QueryHistory(m={}, n={})".format(self.m, self.n)


def history_header(n):
    return ["alpha", "sensitivity", "y"] + ["q_{}".format(j) for j in range(n)]


def _fmt(value):
    # repr() is the shortest string that round-trips a float exactly
    return repr(float(value))


def dump_history(history, f):
    """Writes the history CSV `alpha,sensitivity,y,q_0,...,q_{n-1}`."""
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(history_header(history.n))
    for i in range(history.m):
        writer.writerow(
            [_fmt(history.alpha[i]), _fmt(history.sensitivity[i]), _fmt(history.y[i])]
            + [_fmt(q) for q in history.H[i]]
        )


def save_history(history, path):
    with open(path, "w") as f:
        dump_history(history, f)


def load_history(source):
    if isinstance(source, str):
        with open(source, "rb") as f:
            return _parse_history(decode_text(f.read(), source), source)
    path = getattr(source, "name", None)
    return _parse_history(decode_text(source.read(), path), path)


def _parse_history(text, path):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("history file is empty", path)
    header = [h.strip() for h in header]
    n = len(header) - 3
    if n < 1 or header != history_header(n):
        raise ParseError(
            "history header must be alpha,sensitivity,y,q_0,...,q_{n-1}", path, 1)
    alpha, sensitivity, y, H = [], [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != n + 3:
            raise ParseError("expected {} fields, got {}".format(n + 3, len(row)), path, lineno)
        try:
            values = [float(v) for v in row]
        except ValueError as e:
            raise ParseError(str(e), path, lineno)
        if values[0] <= 0:
            raise ParseError("budget {} is not positive".format(values[0]), path, lineno)
        row_q = values[3:]
        try:
            derived = sensitivity_of(row_q)
        except ValueError as e:
            raise ParseError(str(e), path, lineno)
        if derived != values[1]:
            raise ParseError(
                "sensitivity {} does not match max |q| = {}".format(values[1], derived),
                path, lineno)
        alpha.append(values[0])
        sensitivity.append(values[1])
        y.append(values[2])
        H.append(row_q)
    if not H:
        return QueryHistory.empty(n)
    return QueryHistory(np.array(H), y, alpha, sensitivity)
