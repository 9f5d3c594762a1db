"""Feasible sets given as convex hulls of indexed atom families.

Atoms are indexed from 0. A feasible point is carried as a
:class:`WeightedPoint`: a sparse map from atom index to strictly positive
weight together with the dense coordinates ``sum_i u_i z^i``.

Two kinds of domain are provided:

* :class:`ScaledSimplex` -- ``{x >= 0 : <a, x> = tau}`` whose atoms are
  ``(tau / a_i) e^i``. Atom values ``<g, z^i>`` cost one coordinate of ``g``.
* :class:`ExplicitAtoms` -- an arbitrary finite list of atoms (rows of a
  matrix). Atoms need not be affinely independent.
"""
import csv
import math

import numpy as np

from .errors import AtomFileError, DomainError

#: weights at or below this are dropped after a transfer
PRUNE_THRESHOLD = 1e-14
#: renormalize when the weight sum drifts further than this from one
_RENORM_SLACK = 1e-13
#: exact pairwise diameter scan up to this many atoms
_PAIRWISE_LIMIT = 10_000


class WeightedPoint:
    """A feasible point stored as a sparse convex combination of atoms.

    Parameters
    ----------
    weights : dict
        Atom index -> weight. Only strictly positive weights are kept.
    point : ndarray
        Cached coordinates ``sum_i weights[i] * z^i``.
    """

    __slots__ = ("weights", "point")

    def __init__(self, weights, point):
        self.weights = {int(i): float(w) for i, w in weights.items() if w > 0.0}
        self.point = np.asarray(point, dtype=float)

    @property
    def support(self):
        """Sorted indices with positive weight."""
        return sorted(self.weights)

    def eps_support(self, eps):
        """Sorted indices with weight ``>= eps``."""
        return sorted(i for i, w in self.weights.items() if w >= eps)

    def dense_weights(self, n):
        u = np.zeros(n)
        for i, w in self.weights.items():
            u[i] = w
        return u

    def copy(self):
        return WeightedPoint(dict(self.weights), self.point.copy())

    def __repr__(self):
        body = ", ".join(f"{i}: {self.weights[i]:.6g}" for i in self.support)
        return f"WeightedPoint({{{body}}})"


class DiameterBound(float):
    """Upper bound ``B`` on ``||z^i - z^j||`` over all atom pairs.

    ``exact`` tells whether the value is the true maximum pairwise distance.
    """

    def __new__(cls, value, exact=True):
        if value < 0:
            raise DomainError("diameter bound must be nonnegative")
        obj = super().__new__(cls, value)
        obj.exact = exact
        return obj

    @property
    def value(self):
        return float(self)


class AtomicDomain:
    """Base class: subclasses provide ``n``, ``dim`` and the atom primitives."""

    n: int
    dim: int

    def _check_index(self, i):
        if not 0 <= i < self.n:
            raise DomainError(f"atom index {i} out of range [0, {self.n})")

    def _check_gradient(self, g):
        g = np.asarray(g, dtype=float)
        if g.shape != (self.dim,):
            raise DomainError(f"gradient has shape {g.shape}, expected ({self.dim},)")
        return g

    # -- oracles -----------------------------------------------------------

    def atom(self, i):
        raise NotImplementedError

    def atom_values(self, g):
        """``<g, z^i>`` for every atom, as an array of length ``n``."""
        raise NotImplementedError

    def lazy_atom_values(self, oracle, x):
        """Per-iterate lazy evaluator of ``<f'(x), z^i>`` charging ``oracle``."""
        raise NotImplementedError

    def lmo(self, g):
        """Linear minimization oracle.

        Returns ``(j, <g, z^j>)`` with ``j`` minimizing ``<g, z^i>``;
        ties go to the lowest index.
        """
        vals = self.atom_values(self._check_gradient(g))
        j = int(np.argmin(vals))
        return j, float(vals[j])

    def away_index(self, g, weights, eps=0.0):
        """Supported atom maximizing ``<g, z^i>``.

        The search set is ``{i : weights[i] >= eps}`` when ``eps > 0`` and
        the positive support otherwise. Returns ``None`` if the search set
        is empty. Ties go to the lowest index.
        """
        g = self._check_gradient(g)
        if eps > 0:
            cand = sorted(i for i, w in weights.items() if w >= eps)
        else:
            cand = sorted(i for i, w in weights.items() if w > 0)
        if not cand:
            return None
        best, best_val = None, -math.inf
        for i in cand:
            v = self.atom_value(g, i)
            if v > best_val:
                best, best_val = i, v
        return best, best_val

    def atom_value(self, g, i):
        return float(np.dot(g, self.atom(i)))

    # -- weights -----------------------------------------------------------

    def reconstruct(self, weights):
        """Dense coordinates ``sum_i u_i z^i`` for a weight map or WeightedPoint."""
        if isinstance(weights, WeightedPoint):
            weights = weights.weights
        x = np.zeros(self.dim)
        for i in sorted(weights):
            x += weights[i] * self.atom(i)
        return x

    def weights_of(self, x):
        raise DomainError(
            f"{type(self).__name__} cannot recover weights from coordinates; "
            "build the point from explicit weights instead"
        )

    def point_from_weights(self, weights):
        """Validate a weight map and return the corresponding WeightedPoint."""
        w = {}
        for i, val in weights.items():
            i = int(i)
            self._check_index(i)
            if val < 0:
                raise DomainError(f"negative weight {val} at atom {i}")
            if val > 0:
                w[i] = float(val)
        total = math.fsum(w.values())
        if not w or abs(total - 1.0) > 1e-9:
            raise DomainError(f"weights must sum to 1, got {total}")
        w = {i: v / total for i, v in w.items()}
        return WeightedPoint(w, self.reconstruct(w))

    def vertex_point(self, i):
        self._check_index(i)
        return WeightedPoint({i: 1.0}, self.atom(i).copy())

    def barycenter(self):
        """Equal weights on every atom."""
        w = {i: 1.0 / self.n for i in range(self.n)}
        return WeightedPoint(w, self.reconstruct(w))

    def transfer(self, wp, i, j, step):
        """Move ``step`` weight from atom ``i`` to atom ``j`` in place.

        This is the pairwise update ``x <- x + step (z^j - z^i)``. Requires
        ``0 < step <= u_i``.
        """
        u = wp.weights
        ui = u.get(i, 0.0)
        if step > ui * (1 + 1e-12) or step <= 0:
            raise DomainError(f"transfer of {step} exceeds weight {ui} at atom {i}")
        rest = ui - step
        if rest <= PRUNE_THRESHOLD:
            del u[i]
        else:
            u[i] = rest
        u[j] = u.get(j, 0.0) + step
        self._move_point(wp, i, j, step)
        self._renormalize(wp)

    def blend(self, wp, j, step):
        """Conditional-gradient update ``x <- (1 - step) x + step z^j`` in place."""
        if not 0 < step <= 1:
            raise DomainError(f"blend step {step} outside (0, 1]")
        keep = 1.0 - step
        u = wp.weights
        for s in list(u):
            w = u[s] * keep
            if w <= PRUNE_THRESHOLD:
                del u[s]
            else:
                u[s] = w
        u[j] = u.get(j, 0.0) + step
        wp.point = keep * wp.point + step * self.atom(j)
        self._renormalize(wp)

    def _move_point(self, wp, i, j, step):
        wp.point += step * (self.atom(j) - self.atom(i))

    def _renormalize(self, wp):
        total = math.fsum(wp.weights.values())
        if abs(total - 1.0) > _RENORM_SLACK:
            wp.weights = {s: w / total for s, w in wp.weights.items()}
            wp.point = self.reconstruct(wp.weights)

    def check_weighted_point(self, wp, sum_tol=1e-12, point_tol=1e-9):
        """Raise DomainError unless ``wp`` satisfies the WeightedPoint invariants."""
        for i, w in wp.weights.items():
            self._check_index(i)
            if not w > 0:
                raise DomainError(f"nonpositive stored weight {w} at atom {i}")
        total = math.fsum(wp.weights.values())
        if abs(total - 1.0) > sum_tol:
            raise DomainError(f"weights sum to {total!r}")
        err = float(np.max(np.abs(wp.point - self.reconstruct(wp.weights)), initial=0.0))
        if err > point_tol:
            raise DomainError(f"cached point differs from weights by {err:.3e}")

    def diameter(self):
        raise NotImplementedError


class ScaledSimplex(AtomicDomain):
    """``{x in R^m_+ : <a, x> = tau}`` with atoms ``(tau / a_i) e^i``.

    Weights are unique on a simplex: ``u_i = a_i x_i / tau``.
    """

    def __init__(self, a, tau):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if a.ndim != 1 or a.size < 1:
            raise DomainError("a must be a nonempty vector")
        if not np.all(a > 0):
            raise DomainError("all a_i must be positive")
        if not tau > 0:
            raise DomainError("tau must be positive")
        self.a = a
        self.a.setflags(write=False)
        self.tau = float(tau)
        self.n = self.dim = a.size
        # atom i is radii[i] * e^i
        self.radii = self.tau / a
        self.radii.setflags(write=False)

    @classmethod
    def standard(cls, m, tau=1.0):
        return cls(np.ones(m), tau)

    def __repr__(self):
        return f"ScaledSimplex(m={self.n}, tau={self.tau:g})"

    def atom(self, i):
        self._check_index(i)
        z = np.zeros(self.dim)
        z[i] = self.radii[i]
        return z

    def atom_value(self, g, i):
        return float(g[i] * self.radii[i])

    def atom_values(self, g):
        return np.asarray(g, dtype=float) * self.radii

    def lazy_atom_values(self, oracle, x):
        return _CoordinateAtomValues(self, oracle, x)

    def reconstruct(self, weights):
        if isinstance(weights, WeightedPoint):
            weights = weights.weights
        x = np.zeros(self.dim)
        for i, w in weights.items():
            x[i] = w * self.radii[i]
        return x

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        if np.any(x < -tol * self.radii):
            return False
        return abs(float(np.dot(self.a, x)) - self.tau) <= tol * self.tau

    def weights_of(self, x):
        """Unique weights ``u_s = a_s x_s / tau`` of a feasible point."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"point has shape {x.shape}, expected ({self.dim},)")
        neg = np.flatnonzero(x < -1e-12 * self.radii)
        if neg.size:
            raise DomainError(f"negative coordinate at index {int(neg[0])}: {x[neg[0]]}")
        slack = abs(float(np.dot(self.a, x)) - self.tau)
        if slack > 1e-9 * self.tau:
            raise DomainError(f"<a, x> misses tau by {slack:.3e}")
        u = np.clip(self.a * x / self.tau, 0.0, None)
        u /= math.fsum(u)
        w = {int(i): float(u[i]) for i in np.flatnonzero(u)}
        return WeightedPoint(w, self.reconstruct(w))

    def _move_point(self, wp, i, j, step):
        u = wp.weights
        wp.point[i] = u.get(i, 0.0) * self.radii[i]
        wp.point[j] = u[j] * self.radii[j]

    def diameter(self):
        if self.n == 1:
            return DiameterBound(0.0)
        top = np.sort(self.radii)[-2:]
        return DiameterBound(float(np.hypot(top[0], top[1])))


class ExplicitAtoms(AtomicDomain):
    """Convex hull of an explicit list of atoms (one atom per row)."""

    def __init__(self, atoms):
        atoms = np.array(atoms, dtype=float, ndmin=2)
        if atoms.ndim != 2 or atoms.shape[0] < 1 or atoms.shape[1] < 1:
            raise DomainError("atoms must be a nonempty 2-D array")
        if not np.all(np.isfinite(atoms)):
            raise DomainError("atoms must be finite")
        self.atoms = atoms
        self.atoms.setflags(write=False)
        self.n, self.dim = atoms.shape

    def __repr__(self):
        return f"ExplicitAtoms(n={self.n}, dim={self.dim})"

    def atom(self, i):
        self._check_index(i)
        return self.atoms[i]

    def atom_values(self, g):
        return self.atoms @ np.asarray(g, dtype=float)

    def lazy_atom_values(self, oracle, x):
        return _GradientAtomValues(self, oracle, x)

    def reconstruct(self, weights):
        if isinstance(weights, WeightedPoint):
            weights = weights.weights
        idx = sorted(weights)
        if not idx:
            return np.zeros(self.dim)
        w = np.array([weights[i] for i in idx])
        return w @ self.atoms[idx]

    def diameter(self):
        if self.n == 1:
            return DiameterBound(0.0)
        if self.n <= _PAIRWISE_LIMIT:
            sq = np.einsum("ij,ij->i", self.atoms, self.atoms)
            best = 0.0
            for start in range(0, self.n, 512):
                block = self.atoms[start:start + 512]
                d2 = sq[start:start + 512, None] + sq[None, :] - 2.0 * block @ self.atoms.T
                best = max(best, float(d2.max()))
            return DiameterBound(math.sqrt(max(best, 0.0)))
        center = self.atoms.mean(axis=0)
        radius = float(np.max(np.linalg.norm(self.atoms - center, axis=1)))
        return DiameterBound(2.0 * radius, exact=False)


class _CoordinateAtomValues:
    """Lazy ``<f'(x), z^i>`` on a scaled simplex: one partial derivative each."""

    def __init__(self, domain, oracle, x):
        self.domain = domain
        self.oracle = oracle
        self.x = x
        self.n = domain.n
        self._cache = {}

    def __getitem__(self, i):
        v = self._cache.get(i)
        if v is None:
            v = self.oracle.partial(self.x, i) * self.domain.radii[i]
            self._cache[i] = v
        return v

    def __len__(self):
        return self.n

    def __contains__(self, i):
        return i in self._cache

    def evaluated(self):
        return dict(self._cache)


class _GradientAtomValues:
    """Lazy atom values for explicit atoms: one full gradient per iterate."""

    def __init__(self, domain, oracle, x):
        self.domain = domain
        self.oracle = oracle
        self.x = x
        self.n = domain.n
        self._grad = None
        self._cache = {}

    def __getitem__(self, i):
        v = self._cache.get(i)
        if v is None:
            if self._grad is None:
                self._grad = self.oracle.gradient(self.x)
            v = float(np.dot(self._grad, self.domain.atoms[i]))
            self._cache[i] = v
        return v

    def __len__(self):
        return self.n

    def __contains__(self, i):
        return i in self._cache

    def evaluated(self):
        return dict(self._cache)


def load_atoms_csv(path):
    """Read an :class:`ExplicitAtoms` domain from a CSV file.

    One atom per row. A first row that does not parse as numbers is taken
    as a header. Blank lines are skipped.
    """
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                if not rows and width is None:
                    width = len(row)
                    continue
                for col, cell in enumerate(row, start=1):
                    try:
                        float(cell)
                    except ValueError:
                        raise AtomFileError(f"cannot parse {cell!r} as a number",
                                            row=lineno, column=col) from None
            if width is None:
                width = len(values)
            if len(values) != width:
                raise AtomFileError(f"expected {width} columns, found {len(values)}",
                                    row=lineno)
            rows.append(values)
    if not rows:
        raise AtomFileError(f"no atoms found in {path}")
    return ExplicitAtoms(rows)
