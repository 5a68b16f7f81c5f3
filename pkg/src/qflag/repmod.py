"""Finite dimensional type-1 modules with exact action matrices.

Modules are built weight space by weight space going down from the
highest weight: candidate vectors F_i(basis vector above) are ranked by
the contravariant form, whose Gram matrices are themselves computed
recursively from data at already-built weights, and the radical is
dropped.  No normal form in the enveloping algebra is ever needed.

Action matrices are column-sparse dicts: mat[col] = {row: coefficient},
so mat applied to the basis vector ``col`` is the stored column.
"""

from .scalars import Q_ONE, Q_ZERO, QRational, q_binomial, q_int, q_power
from .linalg import SpanSolver, vec_add_scaled
from .rootdata import WeightVec, weyl_dim


class ModuleError(ValueError):
    pass


def mat_apply(cols, vec):
    out = {}
    for c, coeff in vec.items():
        col = cols.get(c)
        if col:
            vec_add_scaled(out, col, coeff)
    return out


def mat_compose(a_cols, b_cols):
    """Composition a . b on column-sparse matrices."""
    out = {}
    for col, bc in b_cols.items():
        v = mat_apply(a_cols, bc)
        if v:
            out[col] = v
    return out


def mat_is_zero(cols):
    return not any(cols.values())


class ModuleRep:
    """A type-1 module: weight-tagged ordered basis plus sparse E/F actions.

    K_i acts diagonally by q^{(wt, alpha_i)}; the first basis vector of a
    constructed highest weight module is the highest weight vector.
    """

    def __init__(self, rs, weights, e_cols, f_cols, words=None):
        self.rs = rs
        self.weights = list(weights)      # omega-coordinate tuples
        self.e_cols = e_cols              # per node: {col: {row: coeff}}
        self.f_cols = f_cols
        self.words = words                # F-word generating each basis vector
        self.dim = len(self.weights)

    def weight(self, i):
        return WeightVec(self.rs, self.weights[i])

    def k_eigenvalue(self, node, i, power=1):
        return q_power(power * self.rs.inner_alpha(self.weights[i], node))

    def act_gen(self, gen, vec):
        """gen is ('E', i), ('F', i) or ('K', i, power)."""
        kind = gen[0]
        if kind == "E":
            return mat_apply(self.e_cols[gen[1]], vec)
        if kind == "F":
            return mat_apply(self.f_cols[gen[1]], vec)
        if kind == "K":
            node, power = gen[1], gen[2]
            rs = self.rs
            return {i: q_power(power * rs.inner_alpha(self.weights[i], node)) * v
                    for i, v in vec.items()}
        raise ModuleError("unknown generator %r" % (gen,))

    def act_word(self, word, vec):
        """Left action of a generator word; the rightmost letter acts first."""
        for gen in reversed(word):
            vec = self.act_gen(gen, vec)
            if not vec:
                return {}
        return vec

    def apply_e_word(self, nodes, vec):
        for i in reversed(nodes):
            vec = mat_apply(self.e_cols[i], vec)
            if not vec:
                return {}
        return vec

    def apply_f_word(self, nodes, vec):
        for i in reversed(nodes):
            vec = mat_apply(self.f_cols[i], vec)
            if not vec:
                return {}
        return vec

    def weight_set(self):
        return set(self.weights)

    def character(self):
        ch = {}
        for w in self.weights:
            ch[w] = ch.get(w, 0) + 1
        return ch


def matrix_coefficient(module, f, v, word):
    """Exact scalar f(word . v) for a covector f and vector v (dicts)."""
    out = module.act_word(word, v)
    total = Q_ZERO
    for i, c in f.items():
        w = out.get(i)
        if w:
            total = total + c * w
    return total


# --- highest weight module construction ----------------------------------


def highest_weight_module(rs, mu):
    """The irreducible module with dominant highest weight mu.

    Basis vectors are tagged with the F-word that generates them and are
    ordered by lexicographically decreasing weight (generation order on
    ties), so index 0 is the highest weight vector.
    """
    if not mu.is_dominant():
        raise ModuleError("highest weight %r is not dominant" % (mu,))
    r = rs.rank
    d = rs.d
    top = mu.omega

    basis_at = {top: [()]}            # weight -> list of generating words
    gram_at = {top: [[Q_ONE]]}
    e_at = {}                          # (j, wt) -> {col: {row: c}} into wt+a_j
    f_at = {}                          # (i, wt) -> {col: {row: c}} from wt+a_i into wt
    for j in range(r):
        e_at[(j, top)] = {}

    def wt_plus(wt, i, sign=1):
        return tuple(c + sign * rs.cartan[k][i] for k, c in enumerate(wt))

    frontier = [top]
    while frontier:
        children = set()
        for wt in frontier:
            for i in range(r):
                children.add(wt_plus(wt, i, -1))
        next_frontier = []
        for nu in sorted(children):
            cands = []
            for i in range(r):
                parent = wt_plus(nu, i, +1)
                if parent in basis_at:
                    for p in range(len(basis_at[parent])):
                        cands.append((i, p, parent))
            if not cands:
                continue
            # E_j(candidate) expressed over basis at nu + alpha_j, via
            # E_j F_i x = F_i E_j x + delta_ij [ <wt x, alpha_i^vee> ] x
            e_of_cand = []
            for (i, p, parent) in cands:
                row = {}
                for j in range(r):
                    ej = e_at.get((j, parent), {}).get(p, {})
                    vec = {}
                    if ej:
                        # F_i from parent + alpha_j down into nu + alpha_j
                        fmat = f_at.get((i, wt_plus(nu, j, +1)), {})
                        for t, c in ej.items():
                            col = fmat.get(t)
                            if col:
                                vec_add_scaled(vec, col, c)
                    if i == j:
                        scal = q_int(parent[i], d[i])
                        if scal:
                            w = vec.get(p, Q_ZERO) + scal
                            if w:
                                vec[p] = w
                            elif p in vec:
                                del vec[p]
                    if vec:
                        row[j] = vec
                e_of_cand.append(row)
            # candidate Gram matrix via <F_i x, c> = <x, E_i c>
            n = len(cands)
            gram = [[Q_ZERO] * n for _ in range(n)]
            for a, (i, p, parent) in enumerate(cands):
                gpar = gram_at[parent]
                for b in range(n):
                    vec = e_of_cand[b].get(i)
                    if not vec:
                        continue
                    s = Q_ZERO
                    for t, c in vec.items():
                        g = gpar[p][t]
                        if g:
                            s = s + c * g
                    gram[a][b] = s
            # greedy rank selection on Gram rows
            solver = SpanSolver(track=True)
            selected = []
            expr = {}                  # candidate index -> combo over selected
            for a in range(n):
                rowvec = {b: gram[a][b] for b in range(n) if gram[a][b]}
                if solver.insert(rowvec, tag=a):
                    expr[a] = {a: Q_ONE}
                    selected.append(a)
                else:
                    expr[a] = solver.last_combination
            if not selected:
                continue
            sel_pos = {a: k for k, a in enumerate(selected)}
            basis_at[nu] = [(cands[a][0],) + basis_at[cands[a][2]][cands[a][1]]
                            for a in selected]
            gram_at[nu] = [[gram[a][b] for b in selected] for a in selected]
            # F matrices from each parent weight into nu
            for a, (i, p, parent) in enumerate(cands):
                col = {sel_pos[t]: c for t, c in expr[a].items() if c}
                key = (i, nu)
                f_at.setdefault(key, {})
                if p in f_at[key]:
                    raise ModuleError("duplicate candidate")
                if col:
                    f_at[key][p] = col
            # E matrices out of nu, columns indexed by selected candidates
            for j in range(r):
                cols = {}
                for k, a in enumerate(selected):
                    vec = e_of_cand[a].get(j)
                    if vec:
                        cols[k] = dict(vec)
                e_at[(j, nu)] = cols
            next_frontier.append(nu)
        frontier = next_frontier

    # global ordering: lexicographically decreasing weight, then generation
    entries = []
    for wt, words in basis_at.items():
        key = rs.alpha_coords(wt)
        for loc, word in enumerate(words):
            entries.append((tuple(-x for x in key), loc, wt, word))
    entries.sort(key=lambda t: (t[0], t[1]))
    index_of = {}
    weights, words = [], []
    for gi, (_, loc, wt, word) in enumerate(entries):
        index_of[(wt, loc)] = gi
        weights.append(wt)
        words.append(word)

    e_cols = [dict() for _ in range(r)]
    f_cols = [dict() for _ in range(r)]
    for (j, wt), cols in e_at.items():
        up = wt_plus(wt, j, +1)
        for c, col in cols.items():
            gc = index_of[(wt, c)]
            e_cols[j][gc] = {index_of[(up, t)]: v for t, v in col.items()}
    for (i, nu), cols in f_at.items():
        parent = wt_plus(nu, i, +1)
        for p, col in cols.items():
            gc = index_of[(parent, p)]
            f_cols[i][gc] = {index_of[(nu, t)]: v for t, v in col.items()}

    mod = ModuleRep(rs, weights, e_cols, f_cols, words=words)
    mod.gram_by_weight = {wt: gram_at[wt] for wt in basis_at}
    return mod


# --- duals and tensor products --------------------------------------------


def dual_module(module):
    """Dual with index-paired basis: f_i is the covector dual to v_i.

    Actions through the antipode: (u f)(x) = f(kappa(u) x).
    """
    rs = module.rs
    n = module.dim
    weights = [tuple(-c for c in w) for w in module.weights]
    e_cols = [dict() for _ in range(rs.rank)]
    f_cols = [dict() for _ in range(rs.rank)]
    for i in range(rs.rank):
        for b, col in module.e_cols[i].items():
            scal = q_power(-rs.inner_alpha(module.weights[b], i))
            for j, v in col.items():
                e_cols[i].setdefault(j, {})[b] = -scal * v
        for b, col in module.f_cols[i].items():
            scal = q_power(rs.inner_alpha(module.weights[b], i) - 2 * rs.d[i])
            for j, v in col.items():
                f_cols[i].setdefault(j, {})[b] = -scal * v
    return ModuleRep(rs, weights, e_cols, f_cols)


def tensor_module(v_mod, w_mod):
    """v_mod tensor w_mod with basis (a, b) -> a * dim(W) + b, actions via
    the coproduct."""
    rs = v_mod.rs
    nw = w_mod.dim
    weights = []
    for a in range(v_mod.dim):
        wa = v_mod.weights[a]
        for b in range(nw):
            weights.append(tuple(x + y for x, y in zip(wa, w_mod.weights[b])))
    e_cols = [dict() for _ in range(rs.rank)]
    f_cols = [dict() for _ in range(rs.rank)]
    for i in range(rs.rank):
        ev, fv = v_mod.e_cols[i], v_mod.f_cols[i]
        ew, fw = w_mod.e_cols[i], w_mod.f_cols[i]
        for a in range(v_mod.dim):
            ka = q_power(-rs.inner_alpha(v_mod.weights[a], i))
            cola_e = ev.get(a)
            cola_f = fv.get(a)
            for b in range(nw):
                idx = a * nw + b
                kb = q_power(rs.inner_alpha(w_mod.weights[b], i))
                ecol = {}
                if cola_e:
                    for a2, c in cola_e.items():
                        ecol[a2 * nw + b] = c * kb
                colb = ew.get(b)
                if colb:
                    for b2, c in colb.items():
                        key = a * nw + b2
                        w = ecol.get(key, Q_ZERO) + c
                        if w:
                            ecol[key] = w
                        elif key in ecol:
                            del ecol[key]
                if ecol:
                    e_cols[i][idx] = ecol
                fcol = {}
                if cola_f:
                    for a2, c in cola_f.items():
                        fcol[a2 * nw + b] = c
                colbf = fw.get(b)
                if colbf:
                    for b2, c in colbf.items():
                        key = a * nw + b2
                        w = fcol.get(key, Q_ZERO) + c * ka
                        if w:
                            fcol[key] = w
                        elif key in fcol:
                            del fcol[key]
                if fcol:
                    f_cols[i][idx] = fcol
    return ModuleRep(rs, weights, e_cols, f_cols)


# --- structural checks -----------------------------------------------------


def serre_matrices(module):
    """All q-Serre relation operators for E and for F; exact zero matrices
    iff the module carries a genuine action."""
    rs = module.rs
    out = []
    for i in range(rs.rank):
        for j in range(rs.rank):
            if i == j:
                continue
            n = 1 - rs.cartan[i][j]
            for cols, _name in ((module.e_cols, "E"), (module.f_cols, "F")):
                acc = {}
                xi, xj = cols[i], cols[j]
                for k in range(n + 1):
                    term = {c: {c: Q_ONE} for c in range(module.dim)}
                    for _ in range(k):
                        term = mat_compose(xi, term)
                    term = mat_compose(xj, term)
                    for _ in range(n - k):
                        term = mat_compose(xi, term)
                    coeff = q_binomial(n, k, rs.d[i])
                    if k % 2:
                        coeff = -coeff
                    for c, col in term.items():
                        tgt = acc.setdefault(c, {})
                        vec_add_scaled(tgt, col, coeff)
                for c in list(acc):
                    if not acc[c]:
                        del acc[c]
                out.append(((_name, i, j), acc))
    return out


def commutator_check(module):
    """[E_i, F_j] = delta_ij (K_i - K_i^{-1})/(q_i - q_i^{-1}) exactly."""
    rs = module.rs
    for i in range(rs.rank):
        for j in range(rs.rank):
            lhs = mat_compose(module.e_cols[i], module.f_cols[j])
            rhs = mat_compose(module.f_cols[j], module.e_cols[i])
            for c in range(module.dim):
                diff = dict(lhs.get(c, {}))
                vec_add_scaled(diff, rhs.get(c, {}), -Q_ONE)
                if i == j:
                    want = q_int(module.weights[c][i], rs.d[i])
                    got = diff.pop(c, Q_ZERO)
                    if got != want:
                        return False
                if diff:
                    return False
    return True


# --- restriction to the Levi ------------------------------------------------


def decompose_under_K(module, parab):
    """Isotypic data of the restriction to the Levi subalgebra of the
    crossed node: list of (highest weight, multiplicity, dimension)."""
    rs = module.rs
    nodes = parab.levi_nodes
    by_weight = {}
    for idx, w in enumerate(module.weights):
        by_weight.setdefault(w, []).append(idx)
    singulars = []
    for wt, members in sorted(by_weight.items()):
        solver = SpanSolver(track=True)
        for c in members:
            img = {}
            for j in nodes:
                col = module.e_cols[j].get(c)
                if col:
                    for rrow, v in col.items():
                        img[(j, rrow)] = v
            if not solver.insert(img, tag=c):
                combo = solver.last_combination
                vec = {c: Q_ONE}
                for t, co in combo.items():
                    vec[t] = -co
                singulars.append((wt, {k: v for k, v in vec.items() if v}))
    comps = []
    for wt, vec in singulars:
        span = SpanSolver()
        frontier = [vec]
        span.insert(dict(vec))
        while frontier:
            nxt = []
            for v in frontier:
                for j in nodes:
                    w = mat_apply(module.f_cols[j], v)
                    if w and span.insert(dict(w)):
                        nxt.append(w)
            frontier = nxt
        comps.append((wt, span.rank))
    grouped = {}
    for wt, dim in comps:
        key = (wt, dim)
        grouped[key] = grouped.get(key, 0) + 1
    out = [(WeightVec(rs, wt), mult, dim) for (wt, dim), mult in grouped.items()]
    out.sort(key=lambda t: (tuple(-x for x in t[0].alpha_coords()), t[2]))
    return out


# --- extending module maps from a cyclic vector -----------------------------


def extend_module_map(src, tgt, cyclic_vec, cyclic_img):
    """The unique module map src -> tgt with cyclic_vec -> cyclic_img,
    as column-sparse matrix over the source basis.  Requires cyclic_vec
    to generate src; raises ModuleError otherwise."""
    rs = src.rs
    gens = ([("E", i) for i in range(rs.rank)] + [("F", i) for i in range(rs.rank)])
    solver = SpanSolver(track=True)
    images = []
    frontier = []
    if solver.insert(dict(cyclic_vec), tag=0):
        images.append(cyclic_img)
        frontier.append((cyclic_vec, cyclic_img))
    while frontier and solver.rank < src.dim:
        nxt = []
        for vec, img in frontier:
            for g in gens:
                nv = src.act_gen(g, vec)
                if not nv:
                    continue
                tag = len(images)
                if solver.insert(dict(nv), tag=tag):
                    nimg = tgt.act_gen(g, img)
                    images.append(nimg)
                    nxt.append((nv, nimg))
                if solver.rank == src.dim:
                    break
        frontier = nxt
    if solver.rank < src.dim:
        raise ModuleError("vector does not generate the source module")
    cols = {}
    for k in range(src.dim):
        combo = solver.express({k: Q_ONE})
        col = {}
        for t, c in combo.items():
            vec_add_scaled(col, images[t], c)
        if col:
            cols[k] = col
    return cols
