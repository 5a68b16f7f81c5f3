"""The quantized flag manifold coordinate algebra in the direct-limit model.

A level-n element is a coefficient matrix X over pairs (I, J): it stands
for the functional u |-> sum X_IJ f_I(u_(1) v_top) v_J(u_(2) f_bot) on
the quantized enveloping algebra, where v_top and f_bot are the highest
weight vector of V(n lambda) and its dual vector.  Multiplication pushes
a product of levels m and n into level m+n through the triple

    (Cartan embedding) x (middle braiding swap) x (dual Cartan embedding),

which is the unique module map matching the canonical cyclic vectors, so
products are exact and no normal ordering is ever required.

Levels are only ever raised (by multiplying with the level-1 expression
of 1); equality is tested after raising both operands to a common level.
"""

from .scalars import Q_ONE, Q_ZERO, QRational, q_power
from .linalg import (SpanSolver, clear_denominators, ff_reduce, invert_dense,
                     solve_linear, strip_int_content, strip_poly_content,
                     vec_add_scaled)
from .rootdata import WeightVec, ParabolicData
from .repmod import (ModuleRep, dual_module, extend_module_map,
                     highest_weight_module, mat_apply, tensor_module)
from .braiding import PairingTable, braiding, variant_matrices


class FlagAlgebraError(ValueError):
    pass


class StabilizationError(FlagAlgebraError):
    """Filtration dimensions failed to stabilize within the level bound."""


class FlagContext:
    """All cached data attached to one irreducible parabolic: the level
    modules V(n lambda), their duals, the braiding variants and the
    multiplication tensors."""

    def __init__(self, parab):
        self.parab = parab
        self.rs = parab.rs
        self.lam = parab.lambda_weight
        self.ll = self.rs.inner_weights(self.lam, self.lam)
        self.pairing = PairingTable(self.rs)
        self._levels = {}
        self._duals = {}
        self._tensors = {}
        self._psi = {}
        self._variants = None
        self._unit = None
        self._products = {}
        self._phi = {}
        self._ract = {}
        self._block_sizes = {}
        self.N = self.level_module(1).dim

    # --- module caches ----------------------------------------------------

    def level_module(self, n):
        if n not in self._levels:
            if n == 0:
                rs = self.rs
                self._levels[0] = ModuleRep(rs, [(0,) * rs.rank],
                                            [dict() for _ in range(rs.rank)],
                                            [dict() for _ in range(rs.rank)],
                                            words=[()])
            else:
                mu = WeightVec(self.rs, tuple(n * c for c in self.lam.omega))
                self._levels[n] = highest_weight_module(self.rs, mu)
        return self._levels[n]

    def dual_level(self, n):
        if n not in self._duals:
            self._duals[n] = dual_module(self.level_module(n))
        return self._duals[n]

    def model_tensor(self, n):
        """V(n lambda) (x) V(n lambda)^* as a module; the evaluation model."""
        if n not in self._tensors:
            self._tensors[n] = tensor_module(self.level_module(n),
                                             self.dual_level(n))
        return self._tensors[n]

    def variants(self):
        if self._variants is None:
            self._variants = variant_matrices(self.level_module(1),
                                              self.dual_level(1),
                                              pairing=self.pairing)
        return self._variants

    def unit_matrix(self):
        """The level-1 matrix of 1: q^{(l,l)} C_ij with C from rg_inv."""
        if self._unit is None:
            rg_inv = self.variants()["rg_inv"]
            scale = q_power(self.ll)
            mat = {}
            for (k, l), (i, j), v in rg_inv.nonzeros():
                if k == l:
                    key = (i, j)
                    val = mat.get(key, Q_ZERO) + scale * v
                    if val:
                        mat[key] = val
                    elif key in mat:
                        del mat[key]
            self._unit = mat
        return self._unit

    def level_one_index(self):
        """Indices of the level sets I_(k) of V(lambda): k is the crossed
        coordinate of lambda - wt(v_i)."""
        V = self.level_module(1)
        si = self.parab.s_index
        out = {}
        for i in range(V.dim):
            diff = tuple(a - b for a, b in zip(self.lam.omega, V.weights[i]))
            k = self.rs.alpha_coords(diff)[si]
            assert k.denominator == 1
            out.setdefault(int(k), []).append(i)
        return out

    # --- multiplication ----------------------------------------------------

    def psi(self, m, n):
        """Contraction tensors (P_rows, S_rows, Q_rows) pushing a product
        of levels m and n into level m+n."""
        key = (m, n)
        if key in self._psi:
            return self._psi[key]
        vm, vn = self.level_module(m), self.level_module(n)
        vmn = self.level_module(m + n)
        # Cartan embedding via the recorded generating words
        tmn = tensor_module(vm, vn)
        nw = vn.dim
        p_rows = {}
        for idx in range(vmn.dim):
            img = tmn.apply_f_word(vmn.words[idx], {0: Q_ONE})
            for flat, c in img.items():
                p_rows.setdefault((flat // nw, flat % nw), {})[idx] = c
        # dual Cartan embedding from the lowest-weight cyclic vector
        dm, dn = self.dual_level(m), self.dual_level(n)
        dmn = self.dual_level(m + n)
        tdual = tensor_module(dm, dn)
        q_cols = extend_module_map(dmn, tdual, {0: Q_ONE}, {0: Q_ONE})
        q_rows = {}
        ndn = dn.dim
        for j, col in q_cols.items():
            for flat, c in col.items():
                q_rows.setdefault((flat // ndn, flat % ndn), {})[j] = c
        # middle swap, normalized to fix the cyclic vector exactly
        sw = braiding(vn, dm, pairing=self.pairing)
        scale = q_power(m * n * self.ll)
        s_rows = {}
        for (cp, bp), ins in sw.rows.items():
            s_rows[(cp, bp)] = [(bc, scale * v) for bc, v in ins]
        assert s_rows[(0, 0)] == [((0, 0), Q_ONE)] or \
            dict(s_rows[(0, 0)])[(0, 0)] == Q_ONE
        self._psi[key] = (p_rows, s_rows, q_rows)
        return self._psi[key]

    def multiply_mats(self, xmat, m, ymat, n):
        if m == 0:
            scal = xmat.get((0, 0), Q_ZERO)
            return {k: scal * v for k, v in ymat.items()} if scal else {}
        if n == 0:
            scal = ymat.get((0, 0), Q_ZERO)
            return {k: scal * v for k, v in xmat.items()} if scal else {}
        p_rows, s_rows, q_rows = self.psi(m, n)
        mid = {}
        for (a, cp), xv in xmat.items():
            for (bp, dd), yv in ymat.items():
                ins = s_rows.get((cp, bp))
                if not ins:
                    continue
                xy = xv * yv
                for (b, c), sv in ins:
                    key = (a, b, c, dd)
                    val = mid.get(key, Q_ZERO) + xy * sv
                    if val:
                        mid[key] = val
                    elif key in mid:
                        del mid[key]
        out = {}
        for (a, b, c, dd), w in mid.items():
            pr = p_rows.get((a, b))
            if not pr:
                continue
            qr = q_rows.get((c, dd))
            if not qr:
                continue
            for idx, pv in pr.items():
                wp = w * pv
                for j, qv in qr.items():
                    key = (idx, j)
                    val = out.get(key, Q_ZERO) + wp * qv
                    if val:
                        out[key] = val
                    elif key in out:
                        del out[key]
        return out

    def raise_mat(self, mat, level, steps=1):
        for _ in range(steps):
            mat = self.multiply_mats(mat, level, self.unit_matrix(), 1)
            level += 1
        return mat

    def gen_product(self, i, j, k, l):
        """Cached level-2 matrix of z_ij z_kl."""
        key = (i, j, k, l)
        if key not in self._products:
            self._products[key] = self.multiply_mats({(i, j): Q_ONE}, 1,
                                                     {(k, l): Q_ONE}, 1)
        return self._products[key]

    # --- degrees ------------------------------------------------------------

    def degree_key(self, module, i, j):
        """Q-degree of the basis pair: wt(v_j) - wt(v_i), alpha coords."""
        diff = tuple(a - b for a, b in
                     zip(module.weights[j], module.weights[i]))
        return tuple(int(x) for x in self.rs.alpha_coords(diff))

    def level_block_sizes(self, n):
        if n in self._block_sizes:
            return self._block_sizes[n]
        module = self.level_module(n)
        counts = {}
        for w in module.weights:
            counts[w] = counts.get(w, 0) + 1
        sizes = {}
        for wi, ci in counts.items():
            for wj, cj in counts.items():
                diff = tuple(a - b for a, b in zip(wj, wi))
                key = tuple(int(x) for x in self.rs.alpha_coords(diff))
                sizes[key] = sizes.get(key, 0) + ci * cj
        self._block_sizes[n] = sizes
        return sizes

    # --- the antiautomorphism ------------------------------------------------

    def phi_pair(self, n):
        """Matrices (A, B) of the weight duality map on level n and its
        inverse: A sends the dual basis into V(n lambda), pinned by
        (E-word . f_bot)(A f) = (-1)^{word length} f(F-word . v_top)."""
        if n in self._phi:
            return self._phi[n]
        V, D = self.level_module(n), self.dual_level(n)
        rs = self.rs
        # raising words spanning the dual from its lowest vector, carrying
        # the mirrored lowering word applied to the highest vector of V
        solver2 = SpanSolver(track=True)
        rows2 = []
        frontier = [({0: Q_ONE}, {0: Q_ONE}, 0)]
        solver2.insert({0: Q_ONE}, tag=0)
        rows2.append(({0: Q_ONE}, {0: Q_ONE}, 0))
        while frontier and solver2.rank < D.dim:
            nxt = []
            for vec, fvec, ln in frontier:
                for i in range(rs.rank):
                    nv = D.act_gen(("E", i), vec)
                    if nv and solver2.insert(dict(nv), tag=len(rows2)):
                        nf = V.act_gen(("F", i), fvec)
                        rows2.append((nv, nf, ln + 1))
                        nxt.append((nv, nf, ln + 1))
            frontier = nxt
        if solver2.rank < D.dim:
            raise FlagAlgebraError("duality map: dual module not spanned")
        cols_t = [dict() for _ in range(V.dim)]
        for ridx, (cov, _f, _l) in enumerate(rows2):
            for t, c in cov.items():
                cols_t[t][ridx] = c
        a_cols = {}
        for fidx in range(D.dim):
            rhs = {}
            for ridx, (_cov, fvec, ln) in enumerate(rows2):
                val = fvec.get(fidx)
                if val:
                    rhs[ridx] = -val if ln % 2 else val
            sol = solve_linear(cols_t, rhs)
            if sol is None:
                raise FlagAlgebraError("duality map is inconsistent")
            col = {t: sol[t] for t in range(V.dim) if sol[t]}
            a_cols[fidx] = col
        amat = [dict(a_cols.get(c, {})) for c in range(D.dim)]
        rows_m = [dict() for _ in range(V.dim)]
        for c, col in a_cols.items():
            for rr, v in col.items():
                rows_m[rr][c] = v
        binv = invert_dense(rows_m)
        b_cols = {}
        for rr, row in enumerate(binv):
            for c, v in row.items():
                b_cols.setdefault(c, {})[rr] = v
        self._phi[n] = (a_cols, b_cols)
        return self._phi[n]

    def right_action_matrix(self, level, gen):
        """Transposed model action of kappa^{-1}(gen): composing a
        coefficient functional with it realizes the right action."""
        key = (level, gen)
        if key not in self._ract:
            kind = gen[0]
            if kind == "K":
                word = [("K", gen[1], -gen[2])]
                sign = Q_ONE
            elif kind == "E":
                word = [("K", gen[1], -1), ("E", gen[1])]
                sign = -Q_ONE
            else:
                word = [("F", gen[1]), ("K", gen[1], 1)]
                sign = -Q_ONE
            model = self.model_tensor(level)
            nd = self.dual_level(level).dim
            trans = {}
            for a in range(self.level_module(level).dim):
                for b in range(nd):
                    vec = model.act_word(word, {a * nd + b: Q_ONE})
                    for flat, c in vec.items():
                        trans.setdefault((flat // nd, flat % nd), {})[(a, b)] = sign * c
            self._ract[key] = trans
        return self._ract[key]

    def phi_mat(self, mat, n):
        """phi on a level-n coefficient matrix: z_{f v} -> z_{dual(v) prim(f)}."""
        if n == 0:
            return dict(mat)
        a_cols, b_cols = self.phi_pair(n)
        out = {}
        for (i, j), x in mat.items():
            bi = b_cols.get(j, {})
            ai = a_cols.get(i, {})
            for bb, bv in bi.items():
                xb = x * bv
                for aa, av in ai.items():
                    key = (bb, aa)
                    val = out.get(key, Q_ZERO) + xb * av
                    if val:
                        out[key] = val
                    elif key in out:
                        del out[key]
        return out


class FlagElement:
    """An element of the coordinate algebra at a fixed level."""

    __slots__ = ("ctx", "level", "mat")

    def __init__(self, ctx, level, mat):
        self.ctx = ctx
        self.level = level
        self.mat = {k: v for k, v in mat.items() if v}

    def __mul__(self, other):
        return FlagElement(self.ctx, self.level + other.level,
                           self.ctx.multiply_mats(self.mat, self.level,
                                                  other.mat, other.level))

    def scaled(self, coeff):
        return FlagElement(self.ctx, self.level,
                           {k: coeff * v for k, v in self.mat.items()})

    def raise_to(self, target):
        if target < self.level:
            raise FlagAlgebraError("cannot lower a level-%d element to %d"
                                   % (self.level, target))
        if target == self.level:
            return self
        return FlagElement(self.ctx, target,
                           self.ctx.raise_mat(self.mat, self.level,
                                              target - self.level))

    def __add__(self, other):
        lvl = max(self.level, other.level)
        a, b = self.raise_to(lvl), other.raise_to(lvl)
        mat = dict(a.mat)
        vec_add_scaled(mat, b.mat, Q_ONE)
        return FlagElement(self.ctx, lvl, mat)

    def __sub__(self, other):
        lvl = max(self.level, other.level)
        a, b = self.raise_to(lvl), other.raise_to(lvl)
        mat = dict(a.mat)
        vec_add_scaled(mat, b.mat, -Q_ONE)
        return FlagElement(self.ctx, lvl, mat)

    def __eq__(self, other):
        if not isinstance(other, FlagElement):
            return NotImplemented
        lvl = max(self.level, other.level)
        return self.raise_to(lvl).mat == other.raise_to(lvl).mat

    def counit(self):
        return self.mat.get((0, 0), Q_ZERO)

    def evaluate_on_word(self, word):
        """Value of the functional on a word in the generators
        ('E', i), ('F', i), ('K', i, power)."""
        model = self.ctx.model_tensor(self.level)
        vec = model.act_word(word, {0: Q_ONE})
        nd = self.ctx.dual_level(self.level).dim
        total = Q_ZERO
        for flat, c in vec.items():
            x = self.mat.get((flat // nd, flat % nd))
            if x:
                total = total + c * x
        return total

    def right_k_action(self, gen):
        """Right module-algebra action of a Levi generator; gen is
        ('K', i, power), ('E', j) or ('F', j) with j in the Levi."""
        ctx = self.ctx
        if gen[0] in ("E", "F") and gen[1] == ctx.parab.s_index:
            raise FlagAlgebraError("generator %r is not in the Levi" % (gen,))
        trans = ctx.right_action_matrix(self.level, gen)
        out = {}
        for key, x in self.mat.items():
            row = trans.get(key)
            if row:
                vec_add_scaled(out, row, x)
        return FlagElement(ctx, self.level, out)

    def phi(self):
        return FlagElement(self.ctx, self.level,
                           self.ctx.phi_mat(self.mat, self.level))

    def degree(self):
        """Q-degree if homogeneous, else None."""
        degs = {self.ctx.degree_key(self.ctx.level_module(self.level), i, j)
                for (i, j) in self.mat}
        return degs.pop() if len(degs) == 1 else None

    def __repr__(self):
        return "FlagElement(level=%d, %d terms)" % (self.level, len(self.mat))


def flag_context(rs, s):
    parab = ParabolicData(rs, s)
    return FlagContext(parab)


def generator_z(ctx, i, j):
    if not (0 <= i < ctx.N and 0 <= j < ctx.N):
        raise FlagAlgebraError("generator index out of range")
    return FlagElement(ctx, 1, {(i, j): Q_ONE})


def unit_element(ctx, level=1):
    e = FlagElement(ctx, 1, ctx.unit_matrix())
    return e.raise_to(level) if level > 1 else e


def y_element(ctx, i, j):
    """Counit-normalized generator z_ij - eps(z_ij) 1 at level 1."""
    mat = {(i, j): Q_ONE}
    if i == 0 and j == 0:
        mat = dict(mat)
        vec_add_scaled(mat, ctx.unit_matrix(), -Q_ONE)
    return FlagElement(ctx, 1, mat)


# --- relation verification ---------------------------------------------------


def _joint_span_vectors(modules_seeds):
    """BFS the direct sum of cyclic modules; returns the spanned family as
    tuples of vectors (one per module), starting from the seed tuple."""
    gens = []
    rs = modules_seeds[0][0].rs
    for i in range(rs.rank):
        gens.append(("E", i))
        gens.append(("F", i))
        gens.append(("K", i, 1))
    solver = SpanSolver()
    seed = tuple(dict(s) for _, s in modules_seeds)
    mods = [m for m, _ in modules_seeds]

    def flatten(tup):
        out = {}
        for pos, vec in enumerate(tup):
            for k, v in vec.items():
                out[(pos, k)] = v
        return out

    spanned = [seed]
    solver.insert(flatten(seed))
    frontier = [seed]
    while frontier:
        nxt = []
        for tup in frontier:
            for g in gens:
                new = tuple(m.act_gen(g, vec) for m, vec in zip(mods, tup))
                if any(new) and solver.insert(flatten(new)):
                    spanned.append(new)
                    nxt.append(new)
        frontier = nxt
    return spanned


def _apply_functional(func, vec):
    total = Q_ZERO
    for k, c in vec.items():
        x = func.get(k)
        if x:
            total = total + c * x
    return total


def verify_relations(ctx, variants=None):
    """Checks every defining relation instance of the coordinate algebra as
    an exact identity: the reordering rules as level-2 identities over all
    index tuples, the covector-sector relation against the top-component
    embedding, the mixed reordering rule and the expression of 1 as
    functional identities.  Returns {family: (instances, failures)}."""
    if variants is None:
        variants = ctx.variants()
    N = ctx.N
    qll = q_power(ctx.ll)
    qll_inv = q_power(-ctx.ll)
    rh, rh_inv = variants["rh"], variants["rh_inv"]
    rc, rc_inv = variants["rc"], variants["rc_inv"]
    ra = variants["ra"]
    rg_inv = variants["rg_inv"]
    report = {}

    fams = ["eq_projl1", "eq_projr1", "eq_projl2", "eq_projr2", "eq_refleq"]
    fails = {f: [] for f in fams}
    count = 0
    rng = range(N)
    for i in rng:
        for j in rng:
            for k in rng:
                for l in rng:
                    count += 1
                    core = {}
                    for (p, t), v in ra.rows.get((j, k), ()):
                        vec_add_scaled(core, ctx.gen_product(i, p, t, l), v)
                    lhs1 = {}
                    for (n, m), v1 in rh.rows.get((i, j), ()):
                        for (p, t), v2 in ra.rows.get((m, k), ()):
                            vec_add_scaled(lhs1, ctx.gen_product(n, p, t, l),
                                           v1 * v2)
                    lhs2 = {}
                    for (n, m), v1 in rh_inv.rows.get((i, j), ()):
                        for (p, t), v2 in ra.rows.get((m, k), ()):
                            vec_add_scaled(lhs2, ctx.gen_product(n, p, t, l),
                                           v1 * v2)
                    rhs1 = {}
                    for (m, t), v1 in rc.rows.get((k, l), ()):
                        for (n, p), v2 in ra.rows.get((j, m), ()):
                            vec_add_scaled(rhs1, ctx.gen_product(i, n, p, t),
                                           v1 * v2)
                    rhs2 = {}
                    for (m, t), v1 in rc_inv.rows.get((k, l), ()):
                        for (n, p), v2 in ra.rows.get((j, m), ()):
                            vec_add_scaled(rhs2, ctx.gen_product(i, n, p, t),
                                           v1 * v2)
                    tup = (i, j, k, l)
                    d = dict(lhs1)
                    vec_add_scaled(d, core, -qll)
                    if d:
                        fails["eq_projl1"].append(tup)
                    d = dict(rhs1)
                    vec_add_scaled(d, core, -qll)
                    if d:
                        fails["eq_projr1"].append(tup)
                    d = dict(lhs2)
                    vec_add_scaled(d, core, -qll_inv)
                    if d:
                        fails["eq_projl2"].append(tup)
                    d = dict(rhs2)
                    vec_add_scaled(d, core, -qll_inv)
                    if d:
                        fails["eq_projr2"].append(tup)
                    d = dict(lhs2)
                    vec_add_scaled(d, rhs2, -Q_ONE)
                    if d:
                        fails["eq_refleq"].append(tup)
    for f in fams:
        report[f] = (count, fails[f])

    # covector-sector relation: the functional (f_i f_j) composed with the
    # top-component embedding equals its braiding reordering
    vmod = ctx.level_module(1)
    p_rows, _s, _q = ctx.psi(1, 1)
    ccount, cfails = 0, []
    emb_cols = {}
    for (a, b), row in p_rows.items():
        for idx, c in row.items():
            emb_cols.setdefault(idx, {})[(a, b)] = c
    dim2 = ctx.level_module(2).dim
    for i in rng:
        for j in rng:
            ccount += 1
            func = {(i, j): Q_ONE}
            for (k, l), v in rh.rows.get((i, j), ()):
                key = (k, l)
                val = func.get(key, Q_ZERO) - qll_inv * v
                if val:
                    func[key] = val
                elif key in func:
                    del func[key]
            ok = all(not _apply_functional(func, emb_cols.get(idx, {}))
                     for idx in range(dim2))
            if not ok:
                cfails.append((i, j))
    report["c_lamlam"] = (ccount, cfails)

    # mixed reordering and the expression of 1: functional identities over
    # a joint spanning family of the two level-1 evaluation models
    dual1 = ctx.dual_level(1)
    model_vf = ctx.model_tensor(1)                      # V (x) V*
    model_fv = tensor_module(dual1, vmod)               # V* (x) V
    nd = dual1.dim
    spanned = _joint_span_vectors([(model_fv, {0: Q_ONE}),
                                   (model_vf, {0: Q_ONE})])
    mcount, mfails = 0, []
    for i in rng:
        for j in rng:
            mcount += 1
            lhs_func = {i * nd + j: Q_ONE}
            rhs_func = {}
            for (k, l), v in rg_inv.rows.get((i, j), ()):
                rhs_func[k * nd + l] = qll * v
            for vec_fv, vec_vf in spanned:
                if _apply_functional(lhs_func, vec_fv) != \
                        _apply_functional(rhs_func, vec_vf):
                    mfails.append((i, j))
                    break
    report["c_lamclam"] = (mcount, mfails)

    unit_func = {a * nd + b: v for (a, b), v in ctx.unit_matrix().items()}
    eps_func = {a * nd + a: Q_ONE for a in range(vmod.dim)}
    sfails = []
    for vec_fv, vec_vf in spanned:
        if _apply_functional(unit_func, vec_vf) != \
                _apply_functional(eps_func, vec_fv):
            sfails.append("unit")
            break
    report["eq_spur"] = (1, sfails)
    return report


# --- filtration machinery ----------------------------------------------------


_SHADOW_PRIME = (1 << 61) - 1
_SHADOW_POINT = 0x243F6A8885A308D3 % _SHADOW_PRIME


class GradedSpan:
    """Row space of homogeneous level-L matrices, blocked by Q-degree.

    Rank bookkeeping is exact but cheap: every vector is first reduced in
    a shadow copy over a prime field at a fixed evaluation point.  A
    nonzero shadow residual proves independence outright (the evaluated
    pivot minor of the accepted rows is invertible, so any dependence
    would specialize).  Vectors with zero shadow residual are held back
    and certified symbolically in finalize(): most of them sit in blocks
    that the accepted rows already fill completely, where dependence is
    automatic and no symbolic work is needed at all."""

    def __init__(self, ctx, level):
        self.ctx = ctx
        self.level = level
        self.module = ctx.level_module(level)
        self.sizes = ctx.level_block_sizes(level)
        self.blocks = {}
        self.finalized = False

    def _block(self, deg):
        blk = self.blocks.get(deg)
        if blk is None:
            blk = {"shadow": {}, "sel": [], "pending": [], "rref": None,
                   "rank": None, "size": self.sizes.get(deg, 0)}
            self.blocks[deg] = blk
        return blk

    def degree_of(self, mat):
        it = iter(mat)
        return self.ctx.degree_key(self.module, *next(it))

    def rank_of(self, deg):
        blk = self.blocks.get(deg)
        if blk is None:
            return 0
        return blk["rank"] if blk["rank"] is not None else len(blk["sel"])

    @staticmethod
    def _eval_vec(mat):
        p = _SHADOW_PRIME
        out = {}
        for k, v in mat.items():
            e = v.evaluate_mod(_SHADOW_POINT, p)
            if e is None:
                return None
            if e:
                out[k] = e
        return out

    @staticmethod
    def _shadow_reduce(shadow, vec):
        p = _SHADOW_PRIME
        v = dict(vec)
        while v:
            piv = None
            for k in v:
                if k in shadow:
                    piv = k
                    break
            if piv is None:
                break
            row = shadow[piv]
            c = v.pop(piv)
            for k, x in row.items():
                if k == piv:
                    continue
                w = (v.get(k, 0) - c * x) % p
                if w:
                    v[k] = w
                elif k in v:
                    del v[k]
        return v

    def insert(self, mat, deg=None):
        """True if the vector is certainly new; False means it was either
        proven dependent (full block) or held for certification."""
        if not mat:
            return False
        if deg is None:
            deg = self.degree_of(mat)
        blk = self._block(deg)
        if len(blk["sel"]) >= blk["size"]:
            return False
        ev = self._eval_vec(mat)
        if ev is not None:
            res = self._shadow_reduce(blk["shadow"], ev)
            if res:
                p = _SHADOW_PRIME
                piv = next(iter(res))
                inv = pow(res[piv], p - 2, p)
                blk["shadow"][piv] = {k: (x * inv) % p for k, x in res.items()}
                blk["sel"].append(mat)
                if len(blk["sel"]) >= blk["size"]:
                    blk["pending"] = []
                return True
        blk["pending"].append(mat)
        return False

    def finalize(self):
        """Certify all held vectors; returns the promoted (vec, deg) pairs
        that turned out to be independent after all."""
        promoted = []
        for deg, blk in self.blocks.items():
            if blk["rank"] is not None:
                continue
            if len(blk["sel"]) >= blk["size"]:
                blk["pending"] = []
                blk["rank"] = blk["size"]
                continue
            rref = {}
            for vec in blk["sel"]:
                v = strip_int_content(clear_denominators(vec))
                v = ff_reduce(rref.get, v)
                assert v, "certified-independent row collapsed"
                v = strip_poly_content(v)
                piv = min(v, key=lambda kk: (len(v[kk].num.c), kk))
                rref[piv] = v
            rank = len(blk["sel"])
            for vec in blk["pending"]:
                v = strip_int_content(clear_denominators(vec))
                v = ff_reduce(rref.get, v)
                if v:
                    v = strip_poly_content(v)
                    piv = min(v, key=lambda kk: (len(v[kk].num.c), kk))
                    rref[piv] = v
                    rank += 1
                    promoted.append((vec, deg))
            blk["pending"] = []
            blk["rref"] = rref
            blk["rank"] = rank
        self.finalized = True
        return promoted

    def reduce(self, mat, deg=None):
        """Exact residual of mat against the certified span."""
        if not mat:
            return {}
        assert self.finalized
        if deg is None:
            deg = self.degree_of(mat)
        blk = self.blocks.get(deg)
        if blk is None:
            return dict(mat)
        if blk["rank"] >= blk["size"]:
            return {}
        v = dict(mat)
        rref = blk["rref"]
        while v:
            piv = None
            for kk in v:
                if kk in rref:
                    piv = kk
                    break
            if piv is None:
                break
            row = rref[piv]
            c = v[piv] / row[piv]
            vec_add_scaled(v, row, -c)
            v.pop(piv, None)
        return v

    def added_rank(self, mats):
        """Exact rank the mats add on top of this certified span."""
        assert self.finalized
        shadow = {}
        count = 0
        for mat in mats:
            if not mat:
                continue
            deg = self.degree_of(mat)
            blk = self.blocks.get(deg)
            if blk is not None and blk["rank"] >= blk["size"]:
                continue
            v = self.reduce(mat, deg)
            if not v:
                continue
            v = strip_int_content(clear_denominators(v))
            sub = shadow.setdefault(deg, {})
            v = ff_reduce(sub.get, v)
            if v:
                v = strip_poly_content(v)
                piv = min(v, key=lambda kk: (len(v[kk].num.c), kk))
                sub[piv] = v
                count += 1
        return count


class FiltrationReport:
    """Exact dimensions of the counit-filtration quotients.

    quotient_dims[a] = dim B/(B^+)^{a+1}; gr_dims[a] = the graded piece;
    d_blocks[(a, b)] = dim D^{a,b}; stabilization[j] = level at which the
    power-j ideal stabilized.
    """

    def __init__(self, M):
        self.M = M
        self.quotient_dims = {}
        self.gr_dims = {}
        self.d_blocks = {}
        self.stabilization = {}

    def __repr__(self):
        return ("FiltrationReport(M=%d, quotients=%r, gr=%r, D=%r, stab=%r)"
                % (self.M, self.quotient_dims, self.gr_dims,
                   self.d_blocks, self.stabilization))


def _level_basis_elements(ctx, n):
    """All basis matrices of the level-n model as (mat, degree key)."""
    if n == 0:
        return [({(0, 0): Q_ONE}, tuple([0] * ctx.rs.rank))]
    module = ctx.level_module(n)
    out = []
    for i in range(module.dim):
        for j in range(module.dim):
            out.append(({(i, j): Q_ONE}, ctx.degree_key(module, i, j)))
    return out


def _y_generators(ctx):
    out = []
    module = ctx.level_module(1)
    for i in range(ctx.N):
        for j in range(ctx.N):
            mat = {(i, j): Q_ONE}
            if i == 0 and j == 0:
                mat = dict(mat)
                vec_add_scaled(mat, ctx.unit_matrix(), -Q_ONE)
            if mat:
                out.append((mat, ctx.degree_key(module, i, j)))
    return out


def _relevant_degrees(ctx, k):
    """Degree support of products of at most k counit-normalized
    generators."""
    zero = tuple([0] * ctx.rs.rank)
    gen_degs = {d for _, d in _y_generators(ctx)}
    out = {zero}
    layer = {zero}
    for _ in range(k):
        layer = {tuple(a + b for a, b in zip(d, g))
                 for d in layer for g in gen_degs}
        out |= layer
    return out


def ideal_power_span(ctx, j, level, relevant=None, w_basis=None):
    """Span of the level-`level` image of the j-th power of the counit
    ideal: products (j-fold y-monomials) x (level-(level-j) model basis).
    If `relevant` is given, only those degree blocks are materialized.
    Returns (GradedSpan, basis list) where the basis list is the inserted
    independent product matrices with their degrees."""
    if w_basis is None:
        w_basis = [({(0, 0): Q_ONE}, tuple([0] * ctx.rs.rank))]
        lvl = 0
        ygens = _y_generators(ctx)
        for _ in range(j):
            span = GradedSpan(ctx, lvl + 1)
            csizes = ctx.level_block_sizes(lvl + 1)
            nxt = []
            for wmat, wdeg in w_basis:
                for ymat, ydeg in ygens:
                    deg = tuple(a + b for a, b in zip(wdeg, ydeg))
                    if span.rank_of(deg) >= csizes.get(deg, 0):
                        continue
                    prod = ctx.multiply_mats(wmat, lvl, ymat, 1)
                    if prod and span.insert(prod, deg):
                        nxt.append((prod, deg))
            nxt.extend(span.finalize())
            w_basis = nxt
            lvl += 1
    span = GradedSpan(ctx, level)
    basis = []
    tail = level - j
    if tail == 0:
        for wmat, wdeg in w_basis:
            if relevant is not None and wdeg not in relevant:
                continue
            if span.insert(wmat, wdeg):
                basis.append((wmat, wdeg))
        basis.extend(span.finalize())
        return span, basis, w_basis
    sizes = ctx.level_block_sizes(level)
    elements = _level_basis_elements(ctx, tail)
    for wmat, wdeg in w_basis:
        for emat, edeg in elements:
            deg = tuple(a + b for a, b in zip(wdeg, edeg))
            if relevant is not None and deg not in relevant:
                continue
            if span.rank_of(deg) >= sizes.get(deg, 0):
                continue
            prod = ctx.multiply_mats(wmat, j, emat, tail)
            if prod and span.insert(prod, deg):
                basis.append((prod, deg))
    basis.extend(span.finalize())
    return span, basis, w_basis


def filtration_dims(ctx, k, max_level=6):
    """Dimensions of B/(B^+)^{a+1} for a <= k, the graded pieces, and the
    D-block dimensions, inside level truncations escalated until the
    reported numbers repeat for two consecutive levels."""
    report = FiltrationReport(ctx.parab.M)
    spans_at = {}
    for a in range(0, k + 1):
        j = a + 1
        relevant = _relevant_degrees(ctx, a)
        vals = []
        w_basis = None
        level = j
        while True:
            if level > max_level:
                raise StabilizationError(
                    "power %d not stabilized within level %d" % (j, max_level))
            span, _basis, w_basis = ideal_power_span(ctx, j, level,
                                                     relevant=relevant,
                                                     w_basis=w_basis)
            sizes = ctx.level_block_sizes(level)
            val = sum(sizes.get(d, 0) - span.rank_of(d) for d in relevant)
            vals.append(val)
            spans_at[j] = (span, level)
            if len(vals) >= 2 and vals[-1] == vals[-2]:
                report.stabilization[j] = level
                break
            level += 1
        report.quotient_dims[a] = vals[-1]
    for a in range(0, k + 1):
        prev = report.quotient_dims[a - 1] if a else 0
        report.gr_dims[a] = report.quotient_dims[a] - prev
    # D-blocks: spans of the distinguished monomial classes
    lvl1 = ctx.level_one_index().get(1, [])
    for kk in range(1, k + 1):
        span, at_level = spans_at[kk + 1]
        for a in range(kk + 1):
            b = kk - a
            mats = []
            for combo in _index_words(lvl1, b):
                for combo2 in _index_words(lvl1, a):
                    mat, lv = None, 0
                    for jj in combo:
                        nm = {(0, jj): Q_ONE}
                        mat = nm if mat is None else \
                            ctx.multiply_mats(mat, lv, nm, 1)
                        lv += 1
                    for ll in combo2:
                        nm = {(ll, 0): Q_ONE}
                        mat = nm if mat is None else \
                            ctx.multiply_mats(mat, lv, nm, 1)
                        lv += 1
                    mat = ctx.raise_mat(mat, lv, at_level - lv)
                    mats.append(mat)
            report.d_blocks[(a, b)] = span.added_rank(mats)
    return report


def _index_words(indices, length):
    if length == 0:
        return [()]
    out = []
    for w in _index_words(indices, length - 1):
        for i in indices:
            out.append(w + (i,))
    return out


def gr_bplus_presentation(ctx, max_level=6):
    """Generator count and quadratic relation space of the positive graded
    subalgebra: the kernel of multiplication on the distinguished degree-one
    classes, mod the cube of the counit ideal."""
    lvl1 = ctx.level_one_index().get(1, [])
    M = len(lvl1)
    relevant = _relevant_degrees(ctx, 2)
    vals = []
    level = 3
    w_basis = None
    while True:
        if level > max_level:
            raise StabilizationError("cube not stabilized within level bound")
        span, _b, w_basis = ideal_power_span(ctx, 3, level, relevant=relevant,
                                             w_basis=w_basis)
        sizes = ctx.level_block_sizes(level)
        val = sum(sizes.get(d, 0) - span.rank_of(d) for d in relevant)
        vals.append(val)
        if len(vals) >= 2 and vals[-1] == vals[-2]:
            break
        level += 1
    solver = SpanSolver(track=True)
    relations = []
    for j1 in lvl1:
        for j2 in lvl1:
            prod = ctx.gen_product(0, j1, 0, j2)
            mat = ctx.raise_mat(prod, 2, level - 2)
            red = span.reduce(mat) if mat else {}
            if not solver.insert(red, tag=(j1, j2)):
                combo = {(j1, j2): Q_ONE}
                for t, c in (solver.last_combination or {}).items():
                    combo[t] = -c
                relations.append({kk: v for kk, v in combo.items() if v})
    return M, relations


def cotangent_module(ctx, max_level=6):
    """K-isotypic decomposition of the cotangent space: the counit ideal
    modulo its square, as a right module over the Levi.

    Returns (components, phi_exchanges) where each component is a dict
    with dimension, degree multiset, tangent-space highest weight and the
    sign of the paired tangent space's degrees."""
    relevant = _relevant_degrees(ctx, 1)
    vals, level, w_basis = [], 2, None
    while True:
        if level > max_level:
            raise StabilizationError("square not stabilized within level bound")
        span, _b, w_basis = ideal_power_span(ctx, 2, level, relevant=relevant,
                                             w_basis=w_basis)
        sizes = ctx.level_block_sizes(level)
        val = sum(sizes.get(d, 0) - span.rank_of(d) for d in relevant)
        vals.append(val)
        if len(vals) >= 2 and vals[-1] == vals[-2]:
            break
        level += 1
    module = ctx.level_module(1)
    classes = {}
    solver = SpanSolver(track=True)
    basis_tags = []
    for i in range(ctx.N):
        for j in range(ctx.N):
            if i == 0 and j == 0:
                continue
            ymat = {(i, j): Q_ONE}
            mat = ctx.raise_mat(ymat, 1, level - 1)
            red = span.reduce(mat)
            classes[(i, j)] = red
            if red and solver.insert(dict(red), tag=(i, j)):
                basis_tags.append((i, j))
    dim = len(basis_tags)

    def coords(red):
        combo = solver.express(red)
        return {basis_tags.index(t): c for t, c in combo.items()} \
            if combo else None

    nodes = ctx.parab.levi_nodes
    acts = {}
    reps = {t: classes[t] for t in basis_tags}
    for gen in ([("E", jn) for jn in nodes] + [("F", jn) for jn in nodes]):
        cols = {}
        for bi, t in enumerate(basis_tags):
            el = FlagElement(ctx, level, reps[t]).right_k_action(gen)
            red = span.reduce(el.mat) if el.mat else {}
            if red:
                col = coords(red)
                if col is None:
                    raise FlagAlgebraError("square ideal not K-stable")
                cols[bi] = col
        acts[gen] = cols
    deg_of = {bi: ctx.degree_key(module, *t) for bi, t in enumerate(basis_tags)}

    # split into components: spans generated from the joint kernel of the
    # degree-raising operators (right action by F_j raises the degree)
    fgens = [("F", jn) for jn in nodes]
    egens = [("E", jn) for jn in nodes]
    sing_solver = SpanSolver(track=True)
    singulars = []
    for bi in range(dim):
        img = {}
        for g in fgens:
            col = acts[g].get(bi)
            if col:
                for rr, v in col.items():
                    img[(g, rr)] = v
        if not sing_solver.insert(img, tag=bi):
            vec = {bi: Q_ONE}
            for t, c in (sing_solver.last_combination or {}).items():
                vec[t] = vec.get(t, Q_ZERO) - c
            singulars.append({kk: v for kk, v in vec.items() if v})
    components = []
    for vec in singulars:
        comp_span = SpanSolver()
        comp_span.insert(dict(vec))
        members = [vec]
        frontier = [vec]
        while frontier:
            nxt = []
            for v in frontier:
                for g in egens + fgens:
                    w = {}
                    for bi, c in v.items():
                        col = acts[g].get(bi)
                        if col:
                            vec_add_scaled(w, col, c)
                    if w and comp_span.insert(dict(w)):
                        members.append(w)
                        nxt.append(w)
            frontier = nxt
        degs = sorted({deg_of[bi] for m in members for bi in m})
        sign = "-" if _lex_positive(degs[0]) else "+"
        tangent_hw = _tangent_highest_weight(ctx, degs)
        components.append({
            "dimension": comp_span.rank,
            "degrees": degs,
            "sign": sign,
            "tangent_highest_weight": tangent_hw,
            "members": members,
        })
    components.sort(key=lambda c: c["sign"])
    # phi exchanges the two distinguished spans
    phi_ok = True
    for comp in components:
        other = [c for c in components if c is not comp]
        target = SpanSolver()
        for oc in other:
            for m in oc["members"]:
                target.insert(dict(m))
        for m in comp["members"]:
            rep = {}
            for bi, c in m.items():
                vec_add_scaled(rep, reps[basis_tags[bi]], c)
            el = FlagElement(ctx, level, rep).phi()
            red = span.reduce(el.mat) if el.mat else {}
            cvec = coords(red)
            if cvec is None or (cvec and not target.contains(cvec)):
                phi_ok = False
    return components, phi_ok


def _lex_positive(deg):
    for x in deg:
        if x > 0:
            return True
        if x < 0:
            return False
    return False


def _tangent_highest_weight(ctx, degs):
    """Highest weight of the paired tangent space: minus the unique
    dominance-minimal degree of the cotangent component."""
    rs = ctx.rs
    best = None
    for m in degs:
        if all(all(x - y >= 0 for x, y in zip(d, m)) for d in degs):
            best = m
            break
    if best is None:
        return None
    om = rs.root_weight(best).omega
    return WeightVec(rs, tuple(-c for c in om))
