"""Finite-type Cartan, root and weight combinatorics.

Conventions: simple roots are numbered as in the standard (Bourbaki)
tables.  The symmetric bilinear form on the weight lattice is rescaled by
the minimal positive integer making all products (mu, nu) integral, so no
fractional powers of q ever appear downstream.  After rescaling,
d_i = (alpha_i, alpha_i)/2 and (omega_i, alpha_j) = delta_ij d_j.
"""

from fractions import Fraction


class RootDataError(ValueError):
    pass


_TYPES = ("A", "B", "C", "D", "E6", "E7", "E8", "F4", "G2")


def cartan_matrix(cartan_type, rank):
    """Cartan matrix a_ij for the given finite type, Bourbaki numbering."""
    t = cartan_type
    if t == "A" and rank >= 1:
        pairs = [(i, i + 1) for i in range(rank - 1)]
        special = {}
    elif t == "B" and rank >= 2:
        pairs = [(i, i + 1) for i in range(rank - 1)]
        special = {(rank - 1, rank - 2): -2}   # alpha_r short
    elif t == "C" and rank >= 2:
        pairs = [(i, i + 1) for i in range(rank - 1)]
        special = {(rank - 2, rank - 1): -2}   # alpha_r long
    elif t == "D" and rank >= 3:
        pairs = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
        special = {}
    elif t in ("E6", "E7", "E8"):
        n = int(t[1])
        if rank != n:
            raise RootDataError("type %s requires rank %d" % (t, n))
        # chain 1-3-4-5-...-n with node 2 attached to node 4
        pairs = [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, n - 1)]
        special = {}
    elif t == "F4" and rank == 4:
        pairs = [(0, 1), (1, 2), (2, 3)]
        special = {(2, 1): -2}
    elif t == "G2" and rank == 2:
        pairs = [(0, 1)]
        special = {(0, 1): -3}
    else:
        raise RootDataError("invalid type/rank (%s, %s)" % (cartan_type, rank))
    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for (i, j) in pairs:
        a[i][j] = -1
        a[j][i] = -1
    for (i, j), v in special.items():
        a[i][j] = v
    return a


def _symmetrizers(a):
    """Minimal positive integers d_i with d_i a_ij = d_j a_ji."""
    r = len(a)
    d = [None] * r
    for start in range(r):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(r):
                if a[i][j] and i != j and d[j] is None:
                    d[j] = d[i] * Fraction(a[i][j], a[j][i])
                    stack.append(j)
    lcm_den = 1
    for x in d:
        lcm_den = lcm_den * x.denominator // _gcd(lcm_den, x.denominator)
    ints = [int(x * lcm_den) for x in d]
    g = 0
    for x in ints:
        g = _gcd(g, x)
    return [x // g for x in ints]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _mat_inverse(a):
    """Exact inverse of an integer matrix, as Fractions."""
    n = len(a)
    m = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col])
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [row[n:] for row in m]


class WeightVec:
    """Weight lattice element in fundamental-weight coordinates."""

    __slots__ = ("rs", "omega")

    def __init__(self, rs, omega):
        self.rs = rs
        self.omega = tuple(omega)

    def alpha_coords(self):
        """Coordinates in the simple-root basis (exact rationals)."""
        return self.rs.alpha_coords(self.omega)

    def __add__(self, other):
        return WeightVec(self.rs, tuple(a + b for a, b in zip(self.omega, other.omega)))

    def __sub__(self, other):
        return WeightVec(self.rs, tuple(a - b for a, b in zip(self.omega, other.omega)))

    def __neg__(self):
        return WeightVec(self.rs, tuple(-a for a in self.omega))

    def __eq__(self, other):
        return isinstance(other, WeightVec) and self.omega == other.omega

    def __hash__(self):
        return hash(self.omega)

    def is_dominant(self):
        return all(c >= 0 for c in self.omega)

    def __repr__(self):
        return "WeightVec%s" % (self.omega,)


class RootSystem:
    """Cartan data, rescaled integral form, and the positive roots.

    positive_roots are integer coordinate vectors in the simple-root basis.
    """

    def __init__(self, cartan_type, rank):
        if cartan_type not in _TYPES:
            raise RootDataError("unknown Cartan type %r" % (cartan_type,))
        self.cartan_type = cartan_type
        self.rank = rank
        self.cartan = tuple(tuple(row) for row in cartan_matrix(cartan_type, rank))
        d_std = _symmetrizers(self.cartan)
        ainv = _mat_inverse(self.cartan)
        # (omega_i, omega_j) = d_i * (A^{-1})_ij before rescaling
        form_std = [[d_std[i] * ainv[i][j] for j in range(rank)] for i in range(rank)]
        scale = 1
        for row in form_std:
            for x in row:
                den = Fraction(x).denominator
                scale = scale * den // _gcd(scale, den)
        self.form_weights = tuple(tuple(int(form_std[i][j] * scale) for j in range(rank))
                                  for i in range(rank))
        self.d = tuple(di * scale for di in d_std)
        self._ainv = ainv
        self.positive_roots = self._positive_roots()
        for i in range(rank):
            for j in range(rank):
                assert self.d[i] * self.cartan[i][j] == self.d[j] * self.cartan[j][i]

    # --- positive roots by string closure -------------------------------

    def _positive_roots(self):
        roots = {tuple(1 if j == i else 0 for j in range(self.rank))
                 for i in range(self.rank)}
        changed = True
        while changed:
            changed = False
            for beta in list(roots):
                for i in range(self.rank):
                    pairing = sum(beta[j] * self.cartan[i][j] for j in range(self.rank))
                    down = 0
                    cur = list(beta)
                    while True:
                        cur[i] -= 1
                        if tuple(cur) in roots:
                            down += 1
                        else:
                            break
                    # string rule: beta + alpha_i is a root iff down > <beta, alpha_i^vee>
                    if down - pairing > 0:
                        up = list(beta)
                        up[i] += 1
                        t = tuple(up)
                        if t not in roots:
                            roots.add(t)
                            changed = True
        return tuple(sorted(roots, key=lambda b: (sum(b), b)))

    # --- coordinates and the bilinear form ------------------------------

    def alpha_coords(self, omega_coords):
        return tuple(sum(self._ainv[j][k] * omega_coords[k] for k in range(self.rank))
                     for j in range(self.rank))

    def weight(self, omega_coords):
        return WeightVec(self, omega_coords)

    def fundamental_weight(self, i):
        return WeightVec(self, tuple(int(j == i) for j in range(self.rank)))

    def zero_weight(self):
        return WeightVec(self, (0,) * self.rank)

    def root_weight(self, beta):
        """A root (simple-root coords) as a WeightVec."""
        om = tuple(sum(self.cartan[k][j] * beta[j] for j in range(self.rank))
                   for k in range(self.rank))
        return WeightVec(self, om)

    def inner(self, mu, nu):
        """Rescaled integral form on omega-coordinate tuples."""
        fw = self.form_weights
        total = 0
        for i, a in enumerate(mu):
            if a:
                row = fw[i]
                total += a * sum(b * row[j] for j, b in enumerate(nu) if b)
        return total

    def inner_weights(self, mu, nu):
        return self.inner(mu.omega, nu.omega)

    def inner_alpha(self, mu_omega, j):
        """(mu, alpha_j) = d_j * mu_j for mu in omega-coordinates."""
        return self.d[j] * mu_omega[j]

    def root_norms(self):
        return [self.inner(self.root_weight(b).omega, self.root_weight(b).omega)
                for b in self.positive_roots]

    def __repr__(self):
        return "RootSystem(%s, %d)" % (self.cartan_type, self.rank)


def build_root_system(cartan_type, rank):
    return RootSystem(cartan_type, rank)


# --- orderings -----------------------------------------------------------

def lex_compare(mu, nu):
    """The total ordering on the weight lattice: compare the first nonzero
    simple-root coordinate of the difference.  Returns -1, 0 or 1."""
    da = [a - b for a, b in zip(mu.alpha_coords(), nu.alpha_coords())]
    for x in da:
        if x > 0:
            return 1
        if x < 0:
            return -1
    return 0


def dominance_compare(mu, nu):
    """Dominance: mu >= nu iff mu - nu is a nonnegative integral combination
    of simple roots.  Returns 'equal', '>=', '<=' or 'incomparable'."""
    da = [a - b for a, b in zip(mu.alpha_coords(), nu.alpha_coords())]
    if all(x == 0 for x in da):
        return "equal"
    if all(x.denominator == 1 for x in da):
        if all(x >= 0 for x in da):
            return ">="
        if all(x <= 0 for x in da):
            return "<="
    return "incomparable"


def compare_orders(mu, nu):
    """Both orderings at once: (dominance, lex) with lex in '<', '>', '='."""
    c = lex_compare(mu, nu)
    return dominance_compare(mu, nu), ("<" if c < 0 else ">" if c > 0 else "=")


# --- parabolic data ------------------------------------------------------

class ParabolicData:
    """Data of the crossed node s: S = all nodes except s, the set of
    positive roots outside the Levi, and its cardinality M."""

    def __init__(self, rs, s):
        if not 1 <= s <= rs.rank:
            raise RootDataError("node s=%d out of range 1..%d" % (s, rs.rank))
        self.rs = rs
        self.s = s
        self.s_index = s - 1
        self.levi_nodes = tuple(i for i in range(rs.rank) if i != s - 1)
        self.lambda_weight = rs.fundamental_weight(s - 1)
        comp = [b for b in rs.positive_roots if b[s - 1] >= 1]
        self.complement_roots = tuple(comp)
        self.M = len(comp)
        self.irreducible = all(b[s - 1] == 1 for b in comp)

    def __repr__(self):
        return "ParabolicData(%s, s=%d, M=%d)" % (self.rs, self.s, self.M)


def parabolic(rs, s):
    return ParabolicData(rs, s)


# --- Weyl dimension formula ----------------------------------------------

def weyl_dim(rs, mu):
    """dim V(mu) by the Weyl dimension formula (characters for generic q
    agree with the classical ones)."""
    if not mu.is_dominant():
        raise RootDataError("weight %r is not dominant" % (mu,))
    rho = tuple(1 for _ in range(rs.rank))
    num = 1
    den = 1
    for beta in rs.positive_roots:
        bw = rs.root_weight(beta).omega
        lam_rho = tuple(a + b for a, b in zip(mu.omega, rho))
        num *= rs.inner(lam_rho, bw)
        den *= rs.inner(rho, bw)
    q, r = divmod(num, den)
    assert r == 0
    return q
