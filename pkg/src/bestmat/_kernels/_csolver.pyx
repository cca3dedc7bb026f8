# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled CDCL solver core mirroring :mod:`bestmat.cdcl`.

Same algorithms as the pure solver -- two-watched-literal propagation,
first-UIP learning with minimisation, Luby restarts, LBD deletion, block-order
branching with phase saving, blocking-clause enumeration -- with the clause
database held in flat C++ vectors.  The PSD-criterion theory runs natively
(``psd=(n, eps)``); an arbitrary Python callback is also supported for parity
with the pure solver.
"""

from cython.operator cimport dereference as deref
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libc.math cimport cos, sin
from libc.stdint cimport uint64_t

import time as _time

from bestmat.cdcl import Result, SolveStats, luby


cdef extern from "<math.h>":
    double M_PI


ctypedef const double* _dptr


cdef inline int iabs(int x) noexcept nogil:
    if x < 0:
        return -x
    return x


cdef inline int widx(int lit) noexcept nogil:
    return 2 * iabs(lit) + (lit < 0)


# role subsets ordered by size; -1 terminated, 5 slots per row
cdef int[75] _SUBSETS = [
    0, -1, 0, 0, 0,   1, -1, 0, 0, 0,   2, -1, 0, 0, 0,   3, -1, 0, 0, 0,
    0, 1, -1, 0, 0,   0, 2, -1, 0, 0,   0, 3, -1, 0, 0,
    1, 2, -1, 0, 0,   1, 3, -1, 0, 0,   2, 3, -1, 0, 0,
    0, 1, 2, -1, 0,   0, 1, 3, -1, 0,   0, 2, 3, -1, 0,   1, 2, 3, -1, 0,
    0, 1, 2, 3, -1,
]


cdef class Solver:
    """Drop-in counterpart of :class:`bestmat.cdcl.Solver`.

    ``psd=(n, eps)`` enables the built-in PSD-criterion theory over the first
    four blocks (roles A, B, C skew, D symmetric), replacing the Python
    callback on the hot path.
    """

    cdef int num_vars
    cdef vector[signed char] assign
    cdef vector[int] level
    cdef vector[int] reason          # clause id or -1
    cdef vector[int] trail
    cdef vector[int] trail_lim
    cdef vector[vector[int]] watches   # interleaved (clause id, blocker lit)
    cdef vector[int] arena           # clause literals, flat
    cdef vector[int] c_off
    cdef vector[int] c_size
    cdef vector[int] c_lbd
    cdef vector[int] c_pos           # circular new-watch search start
    cdef vector[char] c_learned
    cdef vector[char] c_dead
    cdef vector[double] activity
    cdef double var_inc, var_decay
    cdef vector[signed char] saved_phase
    cdef vector[vector[int]] blocks
    cdef int qhead
    cdef bint _ok
    cdef int max_learnts
    cdef int live_learnts
    cdef vector[char] seen           # analysis scratch
    cdef vector[int] touched         # scratch cleanup list
    cdef vector[int] conf_tmp        # current conflict clause literals
    cdef object theory               # python callback or None

    # native PSD theory
    cdef bint psd_on
    cdef int psd_n, psd_S
    cdef double psd_limit
    cdef vector[double] ctab, stab
    cdef vector[unordered_map[uint64_t, size_t]] psd_cache
    cdef vector[double] psd_store

    # counters
    cdef long long n_conflicts, n_decisions, n_props, n_restarts
    cdef long long n_theory, n_deleted

    cdef int restart_unit
    cdef double learnt_growth

    def __init__(self, int num_vars, clauses=(), blocks=None, theory=None,
                 psd=None, double var_decay=0.95, int restart_unit=64,
                 int max_learnts=4000, double learnt_growth=1.0):
        cdef int v, j
        self.num_vars = num_vars
        self.theory = theory
        self.restart_unit = restart_unit
        self.learnt_growth = learnt_growth
        self.assign.assign(num_vars + 1, 0)
        self.level.assign(num_vars + 1, 0)
        self.reason.assign(num_vars + 1, -1)
        self.watches.resize(2 * num_vars + 2)
        self.activity.assign(num_vars + 1, 0.0)
        self.var_inc = 1.0
        self.var_decay = var_decay
        self.saved_phase.assign(num_vars + 1, 1)
        self.seen.assign(num_vars + 1, 0)
        self.qhead = 0
        self._ok = True
        self.max_learnts = max_learnts
        self.live_learnts = 0

        covered = set()
        block_list = []
        if blocks:
            for blk in blocks:
                block_list.append(list(blk))
                covered.update(blk)
        rest = [v for v in range(1, num_vars + 1) if v not in covered]
        if rest:
            block_list.append(rest)
        self.blocks.resize(len(block_list))
        for j in range(len(block_list)):
            for v in block_list[j]:
                self.blocks[j].push_back(v)

        self.psd_on = False
        if psd is not None:
            self._init_psd(int(psd[0]), float(psd[1]))

        for c in clauses:
            self.add_clause(c)

    cdef void _init_psd(self, int n, double eps) except *:
        cdef int t
        if self.blocks.size() < 4:
            raise ValueError("PSD theory needs the four role blocks")
        for t in range(4):
            if self.blocks[t].size() != <size_t>((n - 1) // 2):
                raise ValueError("role blocks inconsistent with n")
        if (n - 1) // 2 > 62:
            raise ValueError("order too large for the native PSD cache")
        self.psd_on = True
        self.psd_n = n
        self.psd_S = n // 2 + 1
        self.psd_limit = 4.0 * n + eps
        self.ctab.resize(n)
        self.stab.resize(n)
        for t in range(n):
            self.ctab[t] = cos(2.0 * M_PI * t / n)
            self.stab[t] = sin(2.0 * M_PI * t / n)
        self.psd_cache.resize(4)

    # -- assignment primitives ------------------------------------------------

    cdef inline int _value(self, int lit) noexcept nogil:
        cdef int v = self.assign[iabs(lit)]
        if lit > 0:
            return v
        return -v

    @property
    def decision_level(self):
        return self.trail_lim.size()

    @property
    def ok(self):
        return self._ok

    @property
    def stats(self):
        return SolveStats(
            conflicts=self.n_conflicts, decisions=self.n_decisions,
            propagations=self.n_props, restarts=self.n_restarts,
            theory_clauses=self.n_theory, deleted=self.n_deleted,
        )

    cdef bint _enqueue(self, int lit, int reason_cid) noexcept nogil:
        cdef int val = self._value(lit)
        cdef int var
        if val != 0:
            return val > 0
        var = iabs(lit)
        cdef signed char sval = 1
        if lit < 0:
            sval = -1
        self.assign[var] = sval
        self.level[var] = <int>self.trail_lim.size()
        self.reason[var] = reason_cid
        self.trail.push_back(lit)
        return True

    cdef void _backtrack(self, int target) noexcept nogil:
        cdef int limit, i, var
        if <int>self.trail_lim.size() <= target:
            return
        limit = self.trail_lim[target]
        for i in range(<int>self.trail.size() - 1, limit - 1, -1):
            var = iabs(self.trail[i])
            self.saved_phase[var] = self.assign[var]
            self.assign[var] = 0
            self.reason[var] = -1
        self.trail.resize(limit)
        self.trail_lim.resize(target)
        if self.qhead > limit:
            self.qhead = limit

    # -- clause management ----------------------------------------------------

    cdef int _attach(self, vector[int]& lits, bint learned) noexcept nogil:
        """Store a clause of >= 2 literals; watch the first two."""
        cdef int cid = <int>self.c_off.size()
        cdef size_t k
        self.c_off.push_back(<int>self.arena.size())
        self.c_size.push_back(<int>lits.size())
        self.c_lbd.push_back(0)
        self.c_pos.push_back(2)
        cdef char lflag = 1 if learned else 0
        self.c_learned.push_back(lflag)
        self.c_dead.push_back(0)
        for k in range(lits.size()):
            self.arena.push_back(lits[k])
        if lits.size() >= 2:
            self.watches[widx(lits[0])].push_back(cid)
            self.watches[widx(lits[0])].push_back(lits[1])
            self.watches[widx(lits[1])].push_back(cid)
            self.watches[widx(lits[1])].push_back(lits[0])
        if learned:
            self.live_learnts += 1
        return cid

    def add_clause(self, lits, learned=False):
        """Attach a clause after root-level simplification (as in the pure
        solver); returns nothing useful, sets ``ok`` False on refutation."""
        cdef vector[int] vec
        cdef int l
        if not self._ok:
            return
        if not learned:
            uniq = sorted(set(int(x) for x in lits), key=abs)
            su = set(uniq)
            if any(-l in su for l in uniq):
                return  # tautology
            if any(self._value(l) == 1 and self.level[iabs(l)] == 0
                   for l in uniq):
                return  # satisfied at root
            kept = [l for l in uniq
                    if not (self._value(l) == -1 and self.level[iabs(l)] == 0)]
        else:
            kept = [int(x) for x in lits]
        for l in kept:
            if not 1 <= abs(l) <= self.num_vars:
                raise ValueError(f"literal {l} out of range")
        if not kept:
            self._ok = False
            return
        if len(kept) == 1:
            if not self._enqueue(kept[0], -1):
                self._ok = False
            return
        for l in kept:
            vec.push_back(l)
        self._attach(vec, learned)

    cdef void _reduce_db(self):
        cdef vector[int] deletable
        cdef int v, cid, i, w
        cdef size_t k
        cdef vector[char] locked
        locked.assign(self.c_off.size(), 0)
        for v in range(1, self.num_vars + 1):
            if self.reason[v] >= 0:
                locked[self.reason[v]] = 1
        for cid in range(<int>self.c_off.size()):
            if (self.c_learned[cid] and not self.c_dead[cid]
                    and self.c_size[cid] > 2 and self.c_lbd[cid] > 2
                    and not locked[cid]):
                deletable.push_back(cid)
        if deletable.empty():
            return
        # sort by LBD ascending; drop the worse half
        cdef list dl = [(self.c_lbd[deletable[k]], deletable[k])
                        for k in range(deletable.size())]
        dl.sort()
        cdef int start = len(dl) // 2
        for i in range(start, len(dl)):
            cid = dl[i][1]
            self.c_dead[cid] = 1
            self.live_learnts -= 1
            self.n_deleted += 1
        for w in range(<int>self.watches.size()):
            k = 0
            while k < self.watches[w].size():
                if self.c_dead[self.watches[w][k]]:
                    self.watches[w][k + 1] = self.watches[w].back()
                    self.watches[w].pop_back()
                    self.watches[w][k] = self.watches[w].back()
                    self.watches[w].pop_back()
                else:
                    k += 2
        cdef int live = 0
        for cid in range(<int>self.c_off.size()):
            if not self.c_dead[cid]:
                live += 1
        if <int>self.c_off.size() > 2 * live:
            self._gc()

    cdef void _gc(self) noexcept nogil:
        """Compact the clause arena, dropping dead clauses and remapping
        clause ids in the watch lists and reason array.  Without this the
        metadata vectors grow with every clause ever learned and the scan
        in ``_reduce_db`` turns quadratic over a long search."""
        cdef vector[int] remap
        cdef vector[int] new_arena, new_off, new_size, new_lbd, new_pos
        cdef vector[char] new_learned, new_dead
        cdef int cid, v, w, off, k, nid
        cdef size_t j
        remap.assign(self.c_off.size(), -1)
        for cid in range(<int>self.c_off.size()):
            if self.c_dead[cid]:
                continue
            nid = <int>new_off.size()
            remap[cid] = nid
            new_off.push_back(<int>new_arena.size())
            new_size.push_back(self.c_size[cid])
            new_lbd.push_back(self.c_lbd[cid])
            new_pos.push_back(self.c_pos[cid])
            new_learned.push_back(self.c_learned[cid])
            new_dead.push_back(0)
            off = self.c_off[cid]
            for k in range(self.c_size[cid]):
                new_arena.push_back(self.arena[off + k])
        for v in range(1, self.num_vars + 1):
            if self.reason[v] >= 0:
                self.reason[v] = remap[self.reason[v]]
        for w in range(<int>self.watches.size()):
            j = 0
            while j < self.watches[w].size():
                nid = remap[self.watches[w][j]]
                if nid < 0:
                    self.watches[w][j + 1] = self.watches[w].back()
                    self.watches[w].pop_back()
                    self.watches[w][j] = self.watches[w].back()
                    self.watches[w].pop_back()
                else:
                    self.watches[w][j] = nid
                    j += 2
        self.arena.swap(new_arena)
        self.c_off.swap(new_off)
        self.c_size.swap(new_size)
        self.c_lbd.swap(new_lbd)
        self.c_pos.swap(new_pos)
        self.c_learned.swap(new_learned)
        self.c_dead.swap(new_dead)

    # -- propagation ----------------------------------------------------------

    cdef int _propagate(self) noexcept nogil:
        """Unit propagation to fixpoint; returns conflict clause id or -1."""
        cdef int lit, fals, w, i, j, cid, off, sz, tmp, pos
        cdef int* L
        cdef vector[int]* wl
        cdef bint moved
        while self.qhead < <int>self.trail.size():
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.n_props += 1
            fals = -lit
            w = widx(fals)
            wl = &self.watches[w]
            i = 0
            while i < <int>wl[0].size():
                # blocker already true: clause satisfied, skip the arena
                if self._value(wl[0][i + 1]) == 1:
                    i += 2
                    continue
                cid = wl[0][i]
                off = self.c_off[cid]
                sz = self.c_size[cid]
                L = &self.arena[off]
                if L[0] == fals:
                    L[0] = L[1]
                    L[1] = fals
                if self._value(L[0]) == 1:
                    wl[0][i + 1] = L[0]
                    i += 2
                    continue
                # circular search for a replacement watch, resuming where
                # the previous visit stopped: long learned clauses would
                # otherwise rescan the same falsified prefix every time
                moved = False
                pos = self.c_pos[cid]
                if pos >= sz:
                    pos = 2
                for j in range(sz - 2):
                    if self._value(L[pos]) != -1:
                        tmp = L[1]
                        L[1] = L[pos]
                        L[pos] = tmp
                        self.c_pos[cid] = pos + 1
                        self.watches[widx(L[1])].push_back(cid)
                        self.watches[widx(L[1])].push_back(L[0])
                        wl = &self.watches[w]  # push may move our own list
                        wl[0][i + 1] = wl[0].back()
                        wl[0].pop_back()
                        wl[0][i] = wl[0].back()
                        wl[0].pop_back()
                        moved = True
                        break
                    pos += 1
                    if pos >= sz:
                        pos = 2
                if moved:
                    continue
                if self._value(L[0]) == -1:
                    return cid
                self._enqueue(L[0], cid)
                wl[0][i + 1] = L[0]
                i += 2
        return -1

    # -- conflict analysis ----------------------------------------------------

    cdef void _bump(self, int var) noexcept nogil:
        cdef int v
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.num_vars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    cdef void _analyze(self, vector[int]& conflict, vector[int]& learned,
                       int* back_level) noexcept nogil:
        cdef int counter = 0, lit = 0, var, q, index, current, k, j
        cdef bint have_lit = False, first = True
        cdef int cid = -1
        cdef int off, sz, best
        learned.clear()
        learned.push_back(0)  # placeholder for the asserting literal
        self.touched.clear()
        index = <int>self.trail.size()
        current = <int>self.trail_lim.size()
        while True:
            if first:
                off = 0
                sz = <int>conflict.size()
            else:
                off = self.c_off[cid]
                sz = self.c_size[cid]
            for k in range(sz):
                if first:
                    q = conflict[k]
                else:
                    q = self.arena[off + k]
                if have_lit and q == lit:
                    continue
                var = iabs(q)
                if not self.seen[var] and self.level[var] > 0:
                    self.seen[var] = 1
                    self.touched.push_back(var)
                    self._bump(var)
                    if self.level[var] >= current:
                        counter += 1
                    else:
                        learned.push_back(q)
            first = False
            while True:
                index -= 1
                lit = self.trail[index]
                have_lit = True
                if self.seen[iabs(lit)]:
                    break
            counter -= 1
            if counter == 0:
                break
            cid = self.reason[iabs(lit)]
            self.seen[iabs(lit)] = 0
        learned[0] = -lit

        # minimisation: drop literals implied by the rest
        cdef size_t src = 1, dst = 1
        cdef bint red
        cdef int r
        while src < learned.size():
            q = learned[src]
            r = self.reason[iabs(q)]
            red = False
            if r >= 0:
                red = True
                off = self.c_off[r]
                sz = self.c_size[r]
                for k in range(sz):
                    j = self.arena[off + k]
                    var = iabs(j)
                    if var != iabs(q) and not self.seen[var] and \
                            self.level[var] != 0:
                        red = False
                        break
            if not red:
                learned[dst] = q
                dst += 1
            src += 1
        learned.resize(dst)

        if learned.size() == 1:
            back_level[0] = 0
        else:
            best = 0
            for k in range(1, <int>learned.size()):
                if self.level[iabs(learned[k])] > best:
                    best = self.level[iabs(learned[k])]
            back_level[0] = best
            for k in range(1, <int>learned.size()):
                if self.level[iabs(learned[k])] == best:
                    q = learned[1]
                    learned[1] = learned[k]
                    learned[k] = q
                    break
        # clear scratch flags
        for k in range(<int>self.touched.size()):
            self.seen[self.touched[k]] = 0

    cdef int _clause_lbd(self, vector[int]& lits) noexcept nogil:
        cdef int count = 0, k, j, lv
        cdef bint dup
        cdef int[64] seenlv
        for k in range(<int>lits.size()):
            lv = self.level[iabs(lits[k])]
            dup = False
            for j in range(count):
                if seenlv[j] == lv:
                    dup = True
                    break
            if not dup and count < 64:
                seenlv[count] = lv
                count += 1
        return count

    cdef bint _learn_from(self, vector[int]& conflict) noexcept nogil:
        cdef vector[int] learned
        cdef int back = 0
        cdef int cid
        self.n_conflicts += 1
        if self.trail_lim.size() == 0:
            self._ok = False
            return False
        self._analyze(conflict, learned, &back)
        self._backtrack(back)
        if learned.size() == 1:
            self._enqueue(learned[0], -1)
        else:
            cid = self._attach(learned, True)
            self.c_lbd[cid] = self._clause_lbd(learned)
            self._enqueue(learned[0], cid)
        self.var_inc /= self.var_decay
        return True

    # -- theory ---------------------------------------------------------------

    cdef size_t _role_psd(self, int ri, uint64_t key,
                          signed char* phases, int h) noexcept nogil:
        """Offset of the completed row's PSD vector in ``psd_store``,
        computing and caching it on a miss.  (Offsets stay valid across
        the reallocations that invalidate raw pointers.)

        The half-row structure collapses the DFT: a skew row has real
        part 1 at every frequency, a symmetric row imaginary part 0, so
        one trig table and h terms suffice instead of n.
        """
        cdef unordered_map[uint64_t, size_t].iterator it
        it = self.psd_cache[ri].find(key)
        if it != self.psd_cache[ri].end():
            return deref(it).second
        cdef int n = self.psd_n, S = self.psd_S
        cdef int j, k
        cdef double acc
        cdef size_t base = self.psd_store.size()
        self.psd_store.resize(base + S)
        if ri == 3:
            for k in range(S):
                acc = 1.0
                for j in range(1, h + 1):
                    acc += 2.0 * phases[j - 1] * self.ctab[(j * k) % n]
                self.psd_store[base + k] = acc * acc
        else:
            for k in range(S):
                acc = 0.0
                for j in range(1, h + 1):
                    acc += phases[j - 1] * self.stab[(j * k) % n]
                self.psd_store[base + k] = 1.0 + 4.0 * acc * acc
        if self.psd_cache[ri].size() > (1 << 18):
            self.psd_cache[ri].clear()
            # keep the store; stale rows are only wasted space
        self.psd_cache[ri][key] = base
        return base

    cdef bint _psd_check(self) noexcept nogil:
        """Native PSD criterion; stages a conflict in ``conf_tmp``.

        Returns True when a violated subset was found; sets ``ok`` False
        on a root-level violation.
        """
        cdef int h = (self.psd_n - 1) // 2
        cdef bint[4] complete
        cdef uint64_t[4] keys
        cdef size_t[4] psd_off
        cdef _dptr[4] psds
        cdef signed char[64] phases
        cdef int ri, j, v, k, s, lt
        cdef uint64_t key
        cdef bint any_complete = False
        for ri in range(4):
            complete[ri] = True
            key = 0
            for j in range(h):
                v = self.blocks[ri][j]
                if self.assign[v] == 0:
                    complete[ri] = False
                    break
                if self.assign[v] > 0:
                    key |= (<uint64_t>1) << j
            keys[ri] = key
            if complete[ri]:
                any_complete = True
        if not any_complete:
            return False
        for ri in range(4):
            if complete[ri]:
                for j in range(h):
                    v = self.blocks[ri][j]
                    if self.assign[v] > 0:
                        phases[j] = 1
                    else:
                        phases[j] = -1
                psd_off[ri] = self._role_psd(ri, keys[ri], phases, h)
        # resolve pointers only after every row is cached: computing one
        # row may reallocate the store
        for ri in range(4):
            if complete[ri]:
                psds[ri] = &self.psd_store[psd_off[ri]]
        cdef double total
        cdef bint bad, skip
        cdef vector[int] lits
        for s in range(15):
            skip = False
            for k in range(5):
                ri = _SUBSETS[5 * s + k]
                if ri < 0:
                    break
                if not complete[ri]:
                    skip = True
                    break
            if skip:
                continue
            bad = False
            for j in range(self.psd_S):
                total = 0.0
                for k in range(5):
                    ri = _SUBSETS[5 * s + k]
                    if ri < 0:
                        break
                    total += psds[ri][j]
                if total > self.psd_limit:
                    bad = True
                    break
            if bad:
                lits.clear()
                for k in range(5):
                    ri = _SUBSETS[5 * s + k]
                    if ri < 0:
                        break
                    for j in range(h):
                        v = self.blocks[ri][j]
                        lt = v
                        if self.assign[v] > 0:
                            lt = -v
                        lits.push_back(lt)
                return self._stage_theory_conflict(lits)
        return False

    cdef bint _stage_theory_conflict(self, vector[int]& lits) noexcept nogil:
        """Backtrack to the clause's max level and stage it in ``conf_tmp``.

        Theory conflicts are ephemeral: they are analysed like ordinary
        conflicts but never stored -- the criterion regenerates them on
        demand, and keeping thousands of block-wide clauses would swamp
        the watch lists.  Returns True when a conflict is staged; a
        root-level violation sets ``ok`` False instead.
        """
        cdef int max_level = 0, k, lv
        self.n_theory += 1
        if lits.empty():
            self._ok = False
            return False
        for k in range(<int>lits.size()):
            lv = self.level[iabs(lits[k])]
            if lv > max_level:
                max_level = lv
        if max_level == 0:
            self._ok = False
            return False
        self._backtrack(max_level)
        self.conf_tmp.swap(lits)
        return True

    cdef bint _theory_check(self) except? False:
        """Stage a theory conflict in ``conf_tmp``; True when one exists."""
        cdef vector[int] lits
        cdef int l
        if self.psd_on:
            return self._psd_check()
        if self.theory is None:
            return False
        model = {iabs(l): self.assign[iabs(l)] > 0 for l in self.trail}
        clause = self.theory(model)
        if clause is None:
            return False
        py_lits = list(clause)
        for l in py_lits:
            if not 1 <= abs(l) <= self.num_vars or self._value(l) != -1:
                raise ValueError(
                    f"theory clause literal {l} is not falsified by the assignment"
                )
        for l in py_lits:
            lits.push_back(l)
        return self._stage_theory_conflict(lits)

    # -- branching ------------------------------------------------------------

    cdef int _decide(self) noexcept nogil:
        cdef int b, k, v, best
        for b in range(<int>self.blocks.size()):
            best = 0
            for k in range(<int>self.blocks[b].size()):
                v = self.blocks[b][k]
                if self.assign[v] == 0 and (
                        best == 0 or self.activity[v] > self.activity[best]):
                    best = v
            if best != 0:
                if self.saved_phase[best] >= 0:
                    return best
                return -best
        return 0

    # -- main search ----------------------------------------------------------

    def solve(self, time_limit=None, conflict_limit=None):
        """Search for a model; UNKNOWN on timeout or conflict budget."""
        cdef int cid, lit, off, k
        cdef bint have_conflict
        cdef long long start_conflicts = self.n_conflicts
        cdef long long restart_conflicts = 0, restart_budget
        cdef long long climit = -1 if conflict_limit is None else conflict_limit
        cdef double deadline = -1.0
        cdef int tick = 0
        if not self._ok:
            return Result.UNSAT
        if time_limit is not None:
            deadline = _time.monotonic() + time_limit
        restart_budget = self.restart_unit * luby(self.n_restarts + 1)
        while True:
            cid = self._propagate()
            if cid >= 0:
                have_conflict = True
                self.conf_tmp.clear()
                off = self.c_off[cid]
                for k in range(self.c_size[cid]):
                    self.conf_tmp.push_back(self.arena[off + k])
            elif self._ok:
                if self.psd_on:
                    have_conflict = self._psd_check()
                else:
                    have_conflict = self._theory_check()
            else:
                have_conflict = False
            if have_conflict or not self._ok:
                if not self._ok or not self._learn_from(self.conf_tmp):
                    return Result.UNSAT
                restart_conflicts += 1
                if self.live_learnts > self.max_learnts:
                    self._reduce_db()
                    self.max_learnts = <int>(self.max_learnts
                                             * self.learnt_growth)
                continue
            tick += 1
            if deadline >= 0.0 and (tick & 255) == 0 and \
                    _time.monotonic() > deadline:
                return Result.UNKNOWN
            if climit >= 0 and self.n_conflicts - start_conflicts >= climit:
                return Result.UNKNOWN
            if restart_conflicts >= restart_budget:
                self.n_restarts += 1
                restart_budget = self.restart_unit * luby(self.n_restarts + 1)
                restart_conflicts = 0
                self._backtrack(0)
                continue
            lit = self._decide()
            if lit == 0:
                return Result.SAT
            self.n_decisions += 1
            self.trail_lim.push_back(<int>self.trail.size())
            self._enqueue(lit, -1)

    def model(self):
        """Current total assignment (valid right after SAT)."""
        return {v: self.assign[v] > 0 for v in range(1, self.num_vars + 1)}

    def enumerate_all(self, block_vars, on_model=None, limit=None,
                      time_limit=None):
        """All models projected to ``block_vars`` via blocking clauses;
        returns (models, status) exactly like the pure solver."""
        deadline = None if time_limit is None else _time.monotonic() + time_limit
        models = []
        while True:
            remaining = None if deadline is None else deadline - _time.monotonic()
            if remaining is not None and remaining <= 0:
                return models, Result.UNKNOWN
            res = self.solve(time_limit=remaining)
            if res is not Result.SAT:
                return models, res
            full = self.model()
            projected = {v: full[v] for v in block_vars}
            models.append(projected)
            if on_model is not None:
                on_model(projected)
            if limit is not None and len(models) >= limit:
                return models, Result.SAT
            blocking = [(-v if full[v] else v) for v in block_vars]
            self._backtrack(0)
            self.add_clause(blocking, learned=False)
            if not self._ok:
                return models, Result.UNSAT
