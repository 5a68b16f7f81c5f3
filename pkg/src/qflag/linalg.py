"""Sparse exact linear algebra over Q(q).

Vectors are dicts mapping arbitrary hashable coordinates to nonzero
QRational entries.  SpanSolver keeps an incrementally reduced row space
and can express later vectors in terms of the inserted spanning set,
which covers rank computation, membership tests, nullspaces and solving
in one mechanism.
"""

from .scalars import Q_ONE, QRational


def vec_add_scaled(target, src, coeff):
    """target += coeff * src, in place, dropping zeros."""
    if not coeff:
        return target
    for k, v in src.items():
        w = target.get(k)
        if w is None:
            target[k] = coeff * v
        else:
            w = w + coeff * v
            if w:
                target[k] = w
            else:
                del target[k]
    return target


def vec_scale(v, coeff):
    if coeff.is_one():
        return dict(v)
    return {k: coeff * x for k, x in v.items()}


def _pivot_key(vec):
    # deterministic pivot choice: prefer short entries, break ties by key repr
    best = None
    for k, v in vec.items():
        score = (len(v.num.c) + len(v.den.c), repr(k))
        if best is None or score < best[0]:
            best = (score, k)
    return best[1]


class SpanSolver:
    """Row space with tracked combinations.

    insert(vec, tag) reduces vec against the current rows.  If a nonzero
    residual remains it becomes a new pivot row and insert returns True.
    Otherwise insert returns False and .last_combination holds the
    coefficients {tag: coeff} expressing vec over previously inserted
    tagged rows (only when track=True).
    """

    def __init__(self, track=False):
        self.rows = {}          # pivot key -> (vector, combination dict)
        self.track = track
        self.last_combination = None

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec, combo=None):
        v = dict(vec)
        while v:
            piv = None
            for k in v:
                if k in self.rows:
                    piv = k
                    break
            if piv is None:
                break
            row, rcombo = self.rows[piv]
            c = v[piv] / row[piv]
            vec_add_scaled(v, row, -c)
            v.pop(piv, None)
            if combo is not None:
                vec_add_scaled(combo, rcombo, -c)
        return v

    def insert(self, vec, tag=None):
        combo = {tag: Q_ONE} if self.track else None
        v = self.reduce(vec, combo)
        if not v:
            if self.track:
                self.last_combination = {t: -c for t, c in combo.items()
                                         if t != tag and c}
            return False
        piv = _pivot_key(v)
        self.rows[piv] = (v, combo if combo is not None else {})
        self.last_combination = None
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    def express(self, vec):
        """Coefficients over inserted tags, or None if vec is outside."""
        if not self.track:
            raise ValueError("SpanSolver built without track=True")
        combo = {}
        v = self.reduce(dict(vec), combo)
        if v:
            return None
        return {t: -c for t, c in combo.items() if c}


# --- fraction-free vector helpers -----------------------------------------


def _int_gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def clear_denominators(vec):
    """Scale a dict vector so every entry is a Laurent polynomial (den 1);
    the overall factor is dropped (vectors are used up to scalars)."""
    from .scalars import QRational
    dens = []
    seen = set()
    for v in vec.values():
        if not v.den.is_one() and v.den not in seen:
            seen.add(v.den)
            dens.append(v.den)
    if not dens:
        return vec
    m = dens[0]
    for d in dens[1:]:
        m = m * d
    scale = QRational.from_laurent(m)
    return {k: v * scale for k, v in vec.items()}


def strip_int_content(vec):
    """Divide all (denominator-free) entries by the gcd of their integer
    coefficients and shift out a common power of q."""
    from .scalars import LaurentPoly, QRational
    g = 0
    shift = None
    for v in vec.values():
        for c in v.num.c.values():
            g = _int_gcd(g, c)
        m = v.num.min_exp()
        shift = m if shift is None else min(shift, m)
    if not vec or (g == 1 and not shift):
        return vec
    if g == 0:
        return vec
    out = {}
    for k, v in vec.items():
        out[k] = QRational.from_laurent(
            LaurentPoly._raw({e - shift: c // g for e, c in v.num.c.items()}))
    return out


def strip_poly_content(vec):
    """Divide denominator-free entries by the gcd of the entry polynomials
    (content included) and shift out a common power of q."""
    from .scalars import LaurentPoly, QRational, _list_gcd, _list_divexact
    if not vec:
        return vec
    vals = list(vec.values())
    shift = min(v.num.min_exp() for v in vals)
    _lo, g = vals[0].num.to_list()
    for v in vals[1:]:
        if len(g) == 1 and g[0] == 1:
            break
        g = _list_gcd(g, v.num.to_list()[1])
    if len(g) == 1 and g[0] == 1:
        if not shift:
            return vec
        return {k: QRational.q_power(-shift) * v for k, v in vec.items()}
    out = {}
    for k, v in vec.items():
        lo, lst = v.num.to_list()
        out[k] = QRational.from_laurent(
            LaurentPoly.from_list(lo - shift, _list_divexact(lst, g)))
    return out


def ff_reduce(blocks_row_lookup, vec, full_content_every=4):
    """Fraction-free reduction of a denominator-free vector against rows
    (pivot -> row dict with denominator-free entries).  The returned
    residual is only defined up to a nonzero scalar."""
    v = vec
    steps = 0
    while v:
        piv = None
        for k in v:
            row = blocks_row_lookup(k)
            if row is not None:
                piv = k
                break
        if piv is None:
            break
        row = blocks_row_lookup(piv)
        a = row[piv]
        b = v[piv]
        out = {}
        for k, x in v.items():
            if k == piv:
                continue
            out[k] = a * x
        for k, y in row.items():
            if k == piv:
                continue
            w = out.get(k)
            t = b * y
            if w is None:
                out[k] = -t
            else:
                w = w - t
                if w:
                    out[k] = w
                else:
                    del out[k]
        v = out
        steps += 1
        if v:
            if steps % full_content_every == 0:
                v = strip_poly_content(v)
            else:
                v = strip_int_content(v)
    return v


def solve_linear(rows, rhs):
    """Solve sum_j x_j * rows[j] = rhs exactly.

    rows: list of sparse dict vectors, rhs: sparse dict vector.
    Returns the coefficient list, or None if rhs is not in the span.
    Assumes the rows are linearly independent.
    """
    solver = SpanSolver(track=True)
    for j, r in enumerate(rows):
        fresh = solver.insert(dict(r), tag=j)
        if not fresh:
            raise ValueError("solve_linear: dependent rows")
    combo = solver.express(rhs)
    if combo is None:
        return None
    from .scalars import Q_ZERO
    return [combo.get(j, Q_ZERO) for j in range(len(rows))]


def invert_dense(mat):
    """Exact inverse of a square matrix given as a list of row dicts keyed
    by column index 0..n-1.  Raises ValueError if singular."""
    n = len(mat)
    aug = []
    for i, row in enumerate(mat):
        r = dict(row)
        r[("id", i)] = Q_ONE
        aug.append(r)
    used = [False] * n
    pivot_row = {}
    for col in range(n):
        piv, best = None, None
        for i in range(n):
            if used[i]:
                continue
            v = aug[i].get(col)
            if v:
                score = len(v.num.c) + len(v.den.c)
                if best is None or score < best:
                    best, piv = score, i
        if piv is None:
            raise ValueError("singular matrix")
        used[piv] = True
        pivot_row[col] = piv
        pv = aug[piv][col]
        if not pv.is_one():
            pinv = pv.inv()
            aug[piv] = {k: pinv * v for k, v in aug[piv].items()}
        for i in range(n):
            if i != piv and col in aug[i]:
                c = aug[i][col]
                vec_add_scaled(aug[i], aug[piv], -c)
                aug[i].pop(col, None)
    # augmented row with pivot at col encodes row `col` of the inverse
    inv = [dict() for _ in range(n)]
    for col, i in pivot_row.items():
        for k, v in aug[i].items():
            if isinstance(k, tuple) and k[0] == "id":
                inv[col][k[1]] = v
    return inv
