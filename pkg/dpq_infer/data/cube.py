"""
Count cubes, linear counting queries and utility requirements.

A cube is the flattened vector x of cell counts; a query is a dense
coefficient row Q over the same cells, answered as the dot product Q.x.
"""
import json

import numpy as np

from dpq_infer.exceptions import (
    ContractError, DegenerateQueryError, ParseError, ShapeError,
)


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class CountCube(object):
    """Nonnegative integer cell counts in row-major cell order."""

    def __init__(self, counts):
        counts = np.asarray(counts)
        if counts.ndim != 1 or counts.size == 0:
            raise ShapeError("cube needs at least one cell, got shape {}".format(counts.shape))
        if not np.all(np.equal(np.mod(counts, 1), 0)):
            raise ContractError("cube counts must be integers")
        if np.any(counts < 0):
            raise ContractError("cube counts must be nonnegative")
        self._counts = _frozen(counts, np.int64)

    @property
    def counts(self):
        return self._counts

    @property
    def n(self):
        return self._counts.size

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, CountCube) and np.array_equal(self._counts, other._counts)

    def __repr__(self):
        return "CountCube({})".format(self._counts.tolist())


class LinearQuery(object):
    """Dense coefficient row of a linear counting query.

    Constant terms are not representable; the file loader rejects them.
    """

    def __init__(self, coefficients):
        coefficients = np.asarray(coefficients, dtype=np.float64)
        if coefficients.ndim != 1 or coefficients.size == 0:
            raise ShapeError(
                "query needs a nonempty coefficient row, got shape {}".format(coefficients.shape))
        if not np.all(np.isfinite(coefficients)):
            raise ContractError("query coefficients must be finite")
        self._coefficients = _frozen(coefficients, np.float64)

    @property
    def coefficients(self):
        return self._coefficients

    @property
    def n(self):
        return self._coefficients.size

    @property
    def sensitivity(self):
        return sensitivity_of(self)

    def __len__(self):
        return self.n

    def __mul__(self, scale):
        return LinearQuery(self._coefficients * scale)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.n != other.n:
            raise ShapeError("cannot add queries over {} and {} cells".format(self.n, other.n))
        return LinearQuery(self._coefficients + other._coefficients)

    def __eq__(self, other):
        return (isinstance(other, LinearQuery)
                and np.array_equal(self._coefficients, other._coefficients))

    def __hash__(self):
        return hash(self._coefficients.tobytes())

    def __repr__(self):
        return "LinearQuery({})".format(self._coefficients.tolist())


class UtilityRequirement(object):
    """A 1 - delta credible interval no longer than 2 * epsilon."""

    def __init__(self, epsilon, delta):
        if not epsilon > 0:
            raise ContractError("epsilon must be positive, got {}".format(epsilon))
        if not 0 < delta < 1:
            raise ContractError("delta must lie in (0, 1), got {}".format(delta))
        self.epsilon = float(epsilon)
        self.delta = float(delta)

    @property
    def confidence(self):
        return 1.0 - self.delta

    def __repr__(self):
        return "UtilityRequirement(epsilon={}, delta={})".format(self.epsilon, self.delta)


def sensitivity_of(query):
    """Returns max_j |Q_j|, the L1 sensitivity of a linear counting query."""
    coefficients = np.asarray(getattr(query, "coefficients", query), dtype=np.float64)
    sensitivity = float(np.max(np.abs(coefficients))) if coefficients.size else 0.0
    if sensitivity == 0.0:
        raise DegenerateQueryError("query has no nonzero coefficient")
    return sensitivity


def true_answer(cube, query):
    if cube.n != query.n:
        raise ShapeError("query over {} cells applied to a cube of {} cells".format(
            query.n, cube.n))
    return float(np.dot(query.coefficients, cube.counts))


def decode_text(data, path=None):
    """UTF-8 text of `data`; undecodable bytes raise ParseError at their line."""
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8")
    except UnicodeDecodeError as e:
        lineno = bytes(data[:e.start]).count(b"\n") + 1
        raise ParseError("invalid UTF-8: {}".format(e.reason), path, lineno)


def _read_text(source):
    if isinstance(source, (bytes, bytearray)):
        return decode_text(source), None
    if isinstance(source, str):
        with open(source, "rb") as f:
            return decode_text(f.read(), source), source
    path = getattr(source, "name", None)
    return decode_text(source.read(), path), path


def load_cube(source):
    """
    Parses a cube file: one nonnegative integer per line, cell index is
    the line number minus one.

    :param source: A path, bytes, or a readable text/binary stream.
    :return: CountCube
    """
    text, path = _read_text(source)
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    counts = []
    for lineno, line in enumerate(lines, start=1):
        token = line.strip()
        if not token:
            raise ParseError("blank line inside cube file", path, lineno)
        try:
            value = int(token)
        except ValueError:
            raise ParseError("count {!r} is not an integer".format(token), path, lineno)
        if value < 0:
            raise ParseError("count {} is negative".format(value), path, lineno)
        counts.append(value)
    if not counts:
        raise ParseError("cube file is empty", path)
    return CountCube(counts)


def dump_cube(cube, f):
    for count in cube.counts:
        f.write("{}\n".format(int(count)))


def load_query(source, n=None, require_utility=False):
    """
    Parses a query file: {"coefficients": [...], "epsilon": e, "delta": d}.

    Sparse coefficient objects ({"index": value, ...}) are densified when
    `n` is given.

    :return: (LinearQuery, UtilityRequirement or None)
    """
    text, path = _read_text(source)
    try:
        payload = json.loads(text)
    except ValueError as e:
        raise ParseError("invalid JSON: {}".format(e), path, getattr(e, "lineno", None))
    return query_from_dict(payload, n=n, require_utility=require_utility, path=path)


def query_from_dict(payload, n=None, require_utility=False, path=None):
    if not isinstance(payload, dict) or "coefficients" not in payload:
        raise ParseError("query object needs a 'coefficients' field", path)
    if "constant" in payload:
        raise ParseError(
            "constant terms do not change a linear query's sensitivity or its noise; "
            "remove 'constant' and add it to the released answer instead", path)
    coefficients = payload["coefficients"]
    if isinstance(coefficients, dict):
        if n is None:
            raise ParseError("sparse coefficients need the cube size", path)
        dense = np.zeros(n)
        for key, value in coefficients.items():
            index = int(key)
            if not 0 <= index < n:
                raise ParseError("cell index {} outside 0..{}".format(index, n - 1), path)
            dense[index] = value
        coefficients = dense
    try:
        query = LinearQuery(coefficients)
    except (TypeError, ValueError) as e:
        raise ParseError(str(e), path)
    if n is not None and query.n != n:
        raise ShapeError("query has {} coefficients, cube has {} cells".format(query.n, n))
    try:
        sensitivity_of(query)
    except DegenerateQueryError as e:
        raise ParseError(str(e), path)

    requirement = None
    if "epsilon" in payload or "delta" in payload:
        try:
            requirement = UtilityRequirement(payload["epsilon"], payload["delta"])
        except (KeyError, ContractError) as e:
            raise ParseError("bad utility requirement: {}".format(e), path)
    elif require_utility:
        raise ParseError("query file needs 'epsilon' and 'delta'", path)
    return query, requirement
