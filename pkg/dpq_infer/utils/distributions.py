"""
Probability mass vectors: distributions discretized onto unit bins.

A vector of odd length L = 2h + 1 holds the mass of offsets -h..h; the
bin of offset o is the half-open interval (o - 1/2, o + 1/2]. Mass that
falls outside the bins is the vector's truncation loss, 1 - sum(masses).
"""
from collections import OrderedDict
import csv
import io
import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from dpq_infer.exceptions import ContractError, ParseError

MASS_TOL = 1e-12


class ProbabilityMassVector(object):

    def __init__(self, masses, check=True):
        masses = np.array(masses, dtype=np.float64).reshape(-1)
        if masses.size % 2 != 1:
            raise ContractError("mass vector length must be odd, got {}".format(masses.size))
        if check:
            if np.any(masses < -MASS_TOL) or np.any(masses > 1 + MASS_TOL):
                raise ContractError("masses must lie in [0, 1]")
            if masses.sum() > 1 + 1e-9:
                raise ContractError("masses sum to {} > 1".format(masses.sum()))
        masses.setflags(write=False)
        self._masses = masses

    @classmethod
    def point(cls):
        return cls([1.0])

    @property
    def masses(self):
        return self._masses

    @property
    def half(self):
        return (self._masses.size - 1) // 2

    @property
    def offsets(self):
        return np.arange(-self.half, self.half + 1)

    @property
    def total(self):
        return math.fsum(self._masses)

    @property
    def loss(self):
        return max(0.0, 1.0 - self.total)

    @property
    def peak(self):
        return float(self._masses.max())

    def reflect(self):
        """Mass vector of -Z."""
        return ProbabilityMassVector(self._masses[::-1], check=False)

    def padded(self, length):
        """Zero-pads both ends to an odd `length`, keeping offset 0 centered."""
        if length < len(self) or (length - len(self)) % 2:
            raise ContractError("cannot pad length {} to {}".format(len(self), length))
        pad = (length - len(self)) // 2
        return np.pad(self._masses, (pad, pad))

    def mean(self):
        return float(np.dot(self.offsets, self._masses) / self.total)

    def std(self):
        mu = self.mean()
        return float(np.sqrt(np.dot((self.offsets - mu) ** 2, self._masses) / self.total))

    def get_diagnostics(self):
        return OrderedDict([
            ('length', len(self)),
            ('mass', self.total),
            ('loss', self.loss),
            ('peak', self.peak),
        ])

    def __len__(self):
        return self._masses.size

    def __getitem__(self, i):
        return self._masses[i]

    def __eq__(self, other):
        return (isinstance(other, ProbabilityMassVector)
                and np.array_equal(self._masses, other._masses))

    def __repr__(self):
        return "ProbabilityMassVector(length={}, mass={:.6g})".format(len(self), self.total)


def _as_masses(v):
    return v.masses if isinstance(v, ProbabilityMassVector) else np.asarray(v, dtype=np.float64)


def convolve(u, v):
    """
    Mass vector of the sum of two independent discretized variables.

    Output bin i accumulates u[j] v[i - j] over ascending j with Kahan
    compensation. The loop runs once per bin of `u`, each pass over all of
    `v`, so the work is |u| |v| plus a per-pass overhead proportional to |u|.
    A running convolution passes its accumulated vector as `u`.
    """
    a, b = _as_masses(u), _as_masses(v)
    out_len = a.size + b.size - 1
    total = np.zeros(out_len)
    comp = np.zeros(out_len)
    term = np.empty(b.size)
    acc = np.empty(b.size)
    for j in np.flatnonzero(a):
        t = total[j:j + b.size]
        c = comp[j:j + b.size]
        np.multiply(a[j], b, out=term)
        term -= c
        np.add(t, term, out=acc)
        np.subtract(acc, t, out=c)
        c -= term
        t[...] = acc
    return ProbabilityMassVector(total, check=False)


def convolve_all(vectors, order="ascending"):
    """
    Folds `convolve` over the vectors, the running result first.

    The multiply-adds sum to the same total in any order, but the number of
    passes is the sum of the intermediate lengths, which shortest-first
    minimizes. "descending" and "given" exist for timing comparisons.
    """
    vectors = list(vectors)
    if not vectors:
        return ProbabilityMassVector.point()
    if order == "ascending":
        vectors = sorted(vectors, key=len)
    elif order == "descending":
        vectors = sorted(vectors, key=len, reverse=True)
    elif order != "given":
        raise ContractError("unknown convolution order {!r}".format(order))
    result = vectors[0]
    for v in vectors[1:]:
        result = convolve(result, v)
    if not isinstance(result, ProbabilityMassVector):
        result = ProbabilityMassVector(result)
    return result


def laplace_pmv(alpha, sensitivity, coefficient, length):
    """
    Discretizes coefficient * N(alpha/sensitivity), a Laplace variable of
    scale |coefficient| sensitivity / alpha, onto `length` unit bins.

    The two tails beyond the outer bin edges, exp(-alpha length / (2 |c| S))
    in total, are dropped.
    """
    if length < 1 or length % 2 != 1:
        raise ContractError("length must be a positive odd integer, got {}".format(length))
    if coefficient == 0:
        if length != 1:
            raise ContractError("a zero coefficient contributes a point mass of length 1")
        return ProbabilityMassVector.point()
    if not alpha > 0 or not sensitivity > 0:
        raise ContractError("alpha and sensitivity must be positive")
    scale = abs(coefficient) * sensitivity / alpha
    half = (length - 1) // 2
    right = np.empty(half + 1)
    right[0] = -math.expm1(-0.5 / scale)
    # Pr(o - 1/2 < Z <= o + 1/2) = 1/2 exp(-(o - 1/2)/b) (1 - exp(-1/b)) for o >= 1
    o = np.arange(1, half + 1)
    right[1:] = -0.5 * np.exp(-(o - 0.5) / scale) * math.expm1(-1.0 / scale)
    masses = np.concatenate([right[:0:-1], right])
    return ProbabilityMassVector(masses, check=False)


def laplace_pmv_loss(alpha, sensitivity, coefficient, length):
    if coefficient == 0:
        return 0.0
    return math.exp(-alpha * length / (2.0 * abs(coefficient) * sensitivity))


def pmv_error(u, reference):
    """Sum of squared bin differences after centered zero-padding."""
    u = u if isinstance(u, ProbabilityMassVector) else ProbabilityMassVector(u, check=False)
    reference = (reference if isinstance(reference, ProbabilityMassVector)
                 else ProbabilityMassVector(reference, check=False))
    length = max(len(u), len(reference))
    diff = u.padded(length) - reference.padded(length)
    return float(np.dot(diff, diff))


def mc_error_bound(u, sample_size):
    """Expected squared error of an m_s-sample histogram: |u| max(u)(1 - max(u)) / (m_s - 1)."""
    peak = u.peak
    return len(u) * peak * (1.0 - peak) / (sample_size - 1)


def _bilateral_gamma_scalar(count, alpha, z, rtol):
    az = abs(z)
    upper = 60.0 + 10.0 * count
    if count == 1:
        integral = -math.expm1(-upper)
    else:
        def kernel(v):
            return v ** (count - 1) * (az + v / (2.0 * alpha)) ** (count - 1) * math.exp(-v)
        integral = integrate.quad(kernel, 0.0, upper, epsrel=rtol, epsabs=0.0, limit=200)[0]
    log_prefactor = (count * math.log(alpha) - count * math.log(2.0)
                     - 2.0 * gammaln(count) - alpha * az)
    return math.exp(log_prefactor) * integral


def bilateral_gamma_pdf(count, alpha, z, rtol=1e-8):
    """
    Density at z of the sum of `count` iid Laplace(rate alpha) variables,
    by adaptive quadrature of its one-dimensional integral representation.
    """
    if count < 1 or int(count) != count:
        raise ContractError("count must be a positive integer, got {}".format(count))
    if not alpha > 0:
        raise ContractError("alpha must be positive, got {}".format(alpha))
    count = int(count)
    if np.ndim(z) == 0:
        return _bilateral_gamma_scalar(count, alpha, float(z), rtol)
    z = np.asarray(z, dtype=np.float64)
    return np.array([_bilateral_gamma_scalar(count, alpha, float(v), rtol)
                     for v in z.reshape(-1)]).reshape(z.shape)


def dump_pmv(pmv, f):
    """Writes `offset,mass` rows, offsets ascending, offset 0 at the center bin."""
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(["offset", "mass"])
    for offset, mass in zip(pmv.offsets, pmv.masses):
        writer.writerow([int(offset), repr(float(mass))])


def load_pmv(source):
    if isinstance(source, str):
        with open(source, "r") as f:
            text, path = f.read(), source
    else:
        text, path = source.read(), getattr(source, "name", None)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["offset", "mass"]:
        raise ParseError("mass vector header must be offset,mass", path, 1)
    offsets, masses = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            offsets.append(float(row[0]))
            masses.append(float(row[1]))
        except (ValueError, IndexError) as e:
            raise ParseError(str(e), path, lineno)
    if len(masses) % 2 != 1:
        raise ParseError("mass vector length must be odd, got {}".format(len(masses)), path)
    steps = np.diff(offsets)
    if steps.size and not np.allclose(steps, 1.0):
        raise ParseError("offsets must ascend in unit steps", path)
    if offsets[0] != -(len(offsets) - 1) / 2:
        raise ParseError("offsets must be centered on 0, first offset is {:g}".format(
            offsets[0]), path)
    return ProbabilityMassVector(masses)
