"""Genus-0 invariant reconstruction by associativity relations.

The engine computes arbitrary genus-0 invariants I_beta(g1...gn) of a
TargetDatum whose cohomology is generated by divisors. The only inputs are
the two-point/one-point base cases carried by the datum; everything else is
reconstructed from the associativity (WDVV) equations of the genus-0
potential:

    S(i,j,k,l) = S(i,l,j,k),  where
    S(p,q,r,s) = sum over beta1 + beta2 = beta (both nonzero effective),
                 partitions A|B of the extra insertions, and basis e of
                   I_beta1(Tp,Tq,Te,A) * I_beta2(T_e^,Tr,Ts,B)
               + I_beta(Tp,Tq,(Tr cup Ts),extras)
               + I_beta(Tr,Ts,(Tp cup Tq),extras)

with T_e^ the pairing-dual of T_e. The two beta=0 collapses of the split sum
are the cup-product terms written explicitly above.

Invariants are canonicalized first: divisor insertions are stripped (each
multiplies by its intersection number with beta), fundamental-class
insertions kill the invariant, and the dimension count must balance; what
remains is a key (beta, sorted non-divisor indices). Keys are grouped into
stages (beta, n): both factors of every split term live at componentwise
smaller classes, and the collapsed terms stay at beta with at most n
insertions, so solving stages in order of (class, then n) is well-founded and
every stage reduces to an exact linear system in its own keys.

Stage solving is tiered. Tier 1 solves just the closure of the requested keys
under the primary equation harvest (for each key, each choice of one
insertion t, a pair u,v from the rest, and a divisor decomposition of t).
Tier 2 widens to every admissible key of the stage with the same per-key
harvest; tier 3 additionally harvests every frame (divisor, j, k, l) over
every admissible extras multiset. A stage that remains underdetermined after
tier 3 raises: reconstruction guarantees solvability, so that is a fatal
invariant violation, as is any inconsistent equation. The tier actually used
is recorded per stage for diagnostics.

All arithmetic is exact; results are bit-identical for any thread count
because worker threads never solve stages (they abort on a memo miss; the
missing prerequisites are then resolved serially and the batch retried), and
equation results are always consumed in submission order.
"""

from __future__ import annotations

import json
import sys
import threading
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .chow import TargetDatum, hilb_datum
from .rationals import RAT_ONE, RAT_ZERO, binom, rat_from_parts


class EngineError(Exception):
    """Base class for engine failures."""


class UnderdeterminedStage(EngineError):
    """A stage's harvested equations left requested keys unsolved.

    Reconstruction from two-point invariants guarantees a unique solution,
    so this signals a bug (or an impossible request), never a soft failure.
    """


class InconsistentSystem(EngineError):
    """Exact elimination found 0 = c with c != 0, or a memo value conflict.

    Signals corrupted base cases, a broken multiplication table, or a bad
    cache file; never raised on healthy data.
    """


class CacheFormatError(EngineError):
    """A cache file failed schema or consistency validation."""


class _MissingKey(Exception):
    """Internal: strict-mode value lookup hit an unsolved prerequisite."""

    def __init__(self, key):
        self.key = key


@dataclass
class LinearForm:
    """An affine form sum(coeff * unknown) + constant over invariant keys."""

    terms: dict = field(default_factory=dict)
    constant: object = RAT_ZERO

    def is_zero(self) -> bool:
        return not self.terms and self.constant == 0


class MemoStore:
    """Exact values by canonical key, with per-entry provenance.

    Provenance is one of ``base-case``, ``solved``, ``loaded``. An entry is
    never overwritten with a different value; a conflicting write raises
    InconsistentSystem. Reads are safe from any thread; writes happen only
    on the solving thread.
    """

    def __init__(self):
        self._values: dict = {}
        self._tags: dict = {}

    def get(self, key):
        return self._values.get(key)

    def set(self, key, value, tag: str) -> None:
        old = self._values.get(key)
        if old is not None:
            if old != value:
                raise InconsistentSystem(
                    f"memo conflict at {key}: {old} vs {value}"
                )
            return
        self._values[key] = value
        self._tags[key] = tag

    def provenance(self, key):
        return self._tags.get(key)

    def items(self):
        return self._values.items()

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, key) -> bool:
        return key in self._values


class ExactLinearSolver:
    """Incremental exact Gaussian elimination over invariant keys.

    Rows are kept fully reduced against each other; a row whose free part
    empties out becomes a solved value and is substituted everywhere. Pivot
    choice (largest key) and substitution are order-independent, so the
    solved values do not depend on equation arrival order beyond the math.
    """

    def __init__(self):
        self.rows: dict = {}    # pivot key -> (terms dict, constant)
        self.solved: dict = {}  # key -> exact value
        self._uses: dict = {}   # free key -> set of pivot keys using it

    def add(self, terms: dict, const) -> None:
        """Insert the equation sum(terms * x) + const = 0."""
        acc: dict = {}
        c = const
        stack = list(terms.items())
        while stack:
            k, coef = stack.pop()
            if coef == 0:
                continue
            if k in self.solved:
                c += coef * self.solved[k]
                continue
            row = self.rows.get(k)
            if row is not None:
                rterms, rconst = row
                c += coef * rconst
                stack.extend((k2, coef * c2) for k2, c2 in rterms.items())
                continue
            acc[k] = acc.get(k, RAT_ZERO) + coef
        acc = {k: v for k, v in acc.items() if v != 0}
        if not acc:
            if c != 0:
                raise InconsistentSystem(f"0 = {c} from a harvested equation")
            return
        pivot = max(acc)
        pc = acc.pop(pivot)
        rterms = {k: -(v / pc) for k, v in acc.items()}
        rconst = -(c / pc)
        for p in tuple(self._uses.get(pivot, ())):
            self._substitute(p, pivot, rterms, rconst)
        self.rows[pivot] = (rterms, rconst)
        for k in rterms:
            self._uses.setdefault(k, set()).add(pivot)
        self._promote()

    def _substitute(self, p, key, kterms, kconst) -> None:
        """Replace x_key by its expansion inside row p."""
        pterms, pconst = self.rows[p]
        coef = pterms.pop(key)
        self._uses[key].discard(p)
        pconst = pconst + coef * kconst
        for k2, c2 in kterms.items():
            nv = pterms.get(k2, RAT_ZERO) + coef * c2
            if nv == 0:
                if k2 in pterms:
                    del pterms[k2]
                    self._uses[k2].discard(p)
            else:
                if k2 not in pterms:
                    self._uses.setdefault(k2, set()).add(p)
                pterms[k2] = nv
        self.rows[p] = (pterms, pconst)

    def _promote(self) -> None:
        queue = [p for p, (t, _) in self.rows.items() if not t]
        while queue:
            p = queue.pop()
            if p not in self.rows:
                continue
            t, c = self.rows.pop(p)
            if t:
                continue
            self.solved[p] = c
            for r in tuple(self._uses.get(p, ())):
                rterms, rconst = self.rows[r]
                coef = rterms.pop(p)
                self._uses[p].discard(r)
                self.rows[r] = (rterms, rconst + coef * c)
                if not rterms:
                    queue.append(r)
            self._uses.pop(p, None)


class _StageState:
    """Per-stage solving state kept alive across solve calls.

    A stage may be visited many times (each sibling key triggers a visit);
    the solver, the set of harvested keys, and the queue of generated but
    not yet consumed equations all persist, so each equation is built at
    most once per engine.
    """

    __slots__ = ("solver", "seen", "lead_expanded", "full_expanded",
                 "pending", "tier", "tier2_done", "tier3_done")

    def __init__(self):
        self.solver = ExactLinearSolver()
        self.seen = set()           # specs generated
        self.lead_expanded = set()  # keys given their leading specs
        self.full_expanded = set()  # keys given every primary spec
        self.pending = deque()
        self.tier = 1
        self.tier2_done = False
        self.tier3_done = False


class Engine:
    """Reconstruction engine over one TargetDatum, with a persistent memo.

    ``threads`` caps the workers used to harvest equations inside a stage;
    results are bit-identical for every value, including one.
    """

    def __init__(self, datum: TargetDatum | None = None, threads: int = 1):
        self.datum = datum if datum is not None else hilb_datum()
        self.memo = MemoStore()
        self.threads = max(1, int(threads))
        self.stage_tiers: dict = {}
        self._budgets: dict = {}
        self._partition_cache: dict = {}
        self._stage_state: dict = {}
        self._tl = threading.local()
        d = self.datum
        self._codims = d.codims
        self._weights = d.weights
        self._dual = d.dual
        self._cup_terms = d.cup_terms
        self._decomp = d.decompositions
        # split-sum diagonal: (e, dual, both codims), degenerate ends dropped
        self._epairs = tuple(
            (e, d.dual[e], d.codims[e], d.codims[d.dual[e]])
            for e in range(d.basis_size)
            if d.codims[e] != 0 and d.codims[d.dual[e]] != 0
        )
        # For each non-divisor t, the decomposition row whose divisor product
        # contains t itself: the frame built on that row isolates keys holding
        # t against keys whose top indices are strictly smaller.  When the
        # row's second slot rho is itself a divisor, the frame's second family
        # of collapsed terms loses an insertion to the divisor axiom and lands
        # in an earlier stage, so the frame is safe for any fourth slot; that
        # case is marked with vkill = None.  Otherwise the frame is only safe
        # when the fourth slot holds an insertion whose product with the row
        # divisor vanishes, erasing the second family outright.
        self._lead_rows = {}
        for t in d.nondivisors:
            for dv, rho, _c in d.decompositions[t]:
                if any(m == t for m, _cm in d.cup_terms[dv][rho]):
                    if d.codims[rho] >= 2:
                        vkill = frozenset(
                            x for x in d.nondivisors if not d.cup_terms[dv][x]
                        )
                    else:
                        vkill = None
                    self._lead_rows[t] = (dv, rho, vkill)
                    break
            else:  # pragma: no cover - decomposition sums exactly to t
                raise EngineError(f"no self-supporting row for index {t}")
        if sys.getrecursionlimit() < 30000:
            sys.setrecursionlimit(30000)

    # ------------------------------------------------------------------
    # canonicalization
    # ------------------------------------------------------------------

    def _budget(self, cls) -> int:
        b = self._budgets.get(cls)
        if b is None:
            b = self.datum.weight_budget(cls)
            self._budgets[cls] = b
        return b

    def _canon(self, cls, idxs):
        """Canonicalize a basis-index monomial: returns (ins, mult) or None.

        Divisors are stripped into the integer multiplier, a fundamental
        class or a dimension mismatch kills the monomial, the rest is
        sorted. ``None`` means the monomial contributes zero.
        """
        codims = self._codims
        weights = self._weights
        mult = 1
        bare = []
        w = 0
        for e in idxs:
            c = codims[e]
            if c == 0:
                return None
            if c == 1:
                t = self.datum.inter(e, cls)
                if t == 0:
                    return None
                mult *= t
            else:
                bare.append(e)
                w += weights[e]
        if w != self._budget(cls):
            return None
        bare.sort()
        return tuple(bare), mult

    def normalize(self, cls, insertions) -> LinearForm:
        """Expand insertions multilinearly into canonical keys.

        ``insertions`` may mix basis indices (ints) and cohomology vectors.
        The class must be effective and nonzero; degree-0 invariants exist
        only inside equation building, never as keys.
        """
        self._check_class(cls)
        combos = [((), RAT_ONE)]
        for ins in insertions:
            if isinstance(ins, int):
                pairs = ((ins, RAT_ONE),)
            else:
                pairs = tuple((e, c) for e, c in enumerate(ins) if c != 0)
            combos = [
                (idx + (e,), c * ce) for idx, c in combos for e, ce in pairs
            ]
        terms: dict = {}
        for idxs, c in combos:
            canon = self._canon(cls, idxs)
            if canon is None:
                continue
            ins_t, mult = canon
            key = (cls, ins_t)
            terms[key] = terms.get(key, RAT_ZERO) + c * mult
        return LinearForm({k: v for k, v in terms.items() if v != 0}, RAT_ZERO)

    def _check_class(self, cls) -> None:
        if not self.datum.effective(cls):
            raise ValueError(f"class {cls} is not effective")
        if self.datum.is_zero_class(cls):
            raise ValueError("the zero class carries no invariant keys")

    # ------------------------------------------------------------------
    # values
    # ------------------------------------------------------------------

    def base_case(self, key):
        """Hardcoded value for a canonical key, or None if not a base case."""
        cls, ins = key
        return self.datum.base_case(cls, ins)

    def value_of(self, key):
        """Exact value of a canonical admissible key, solving stages on demand."""
        v = self.memo.get(key)
        if v is not None:
            return v
        b = self.base_case(key)
        if b is not None:
            self.memo.set(key, b, "base-case")
            return b
        if getattr(self._tl, "strict", False):
            raise _MissingKey(key)
        cls, ins = key
        self._solve_for(cls, len(ins), (key,))
        return self.memo.get(key)

    def invariant(self, cls, insertions):
        """I_cls(insertions): canonicalize, then resolve every key."""
        cls = tuple(cls)
        form = self.normalize(cls, insertions)
        total = RAT_ZERO
        for key, coeff in sorted(form.terms.items()):
            total += coeff * self.value_of(key)
        return total

    def solve_stage(self, cls, n: int) -> None:
        """Resolve every admissible key of stage (cls, n) into the memo."""
        cls = tuple(cls)
        self._check_class(cls)
        for key in self._stage_keys(cls, n):
            self.value_of(key)

    # ------------------------------------------------------------------
    # equation building
    # ------------------------------------------------------------------

    def build_equation(self, cls, frame, extras) -> LinearForm:
        """One associativity relation as an affine form in current-stage keys.

        The current stage is (cls, len(extras) + 3); every key outside it is
        resolved to its exact value (solving earlier stages as needed), and
        by construction no key of a later stage can occur. Frames with equal
        second and fourth entries give the zero form.
        """
        cls = tuple(cls)
        self._check_class(cls)
        frame = self._check_frame(frame)
        extras = tuple(sorted(extras))
        if any(self._codims[e] < 2 for e in extras):
            raise ValueError("extras must be non-divisor basis indices")
        terms, const = self._build(cls, frame, extras, len(extras) + 3)
        return LinearForm(terms, const)

    def wdvv_residual(self, cls, frame, extras):
        """Value of a fully resolved associativity relation; always zero."""
        cls = tuple(cls)
        self._check_class(cls)
        frame = self._check_frame(frame)
        _, const = self._build(cls, frame, tuple(sorted(extras)), None)
        return const

    def _check_frame(self, frame):
        frame = tuple(frame)
        if len(frame) != 4:
            raise ValueError("a frame has exactly four basis indices")
        for e in frame:
            if not 0 <= e < self.datum.basis_size or self._codims[e] == 0:
                raise ValueError(f"frame entry {e} is not a positive-codimension index")
        return frame

    def _build(self, cls, frame, extras, stage_n):
        """Assemble S(i,j,k,l) - S(i,l,j,k) over the memo and stage unknowns."""
        i, j, k, l = frame
        if j == l:
            return {}, RAT_ZERO
        datum = self.datum
        codims = self._codims
        weights = self._weights
        dual = self._dual
        cup_terms = self._cup_terms
        memo_get = self.memo.get
        groups = self._partition_groups(extras)
        terms: dict = {}
        const = RAT_ZERO

        for (p, q, r, s), sign in (((i, j, k, l), RAT_ONE), ((i, l, j, k), -RAT_ONE)):
            # collapsed degree-0 terms: I(x, y, (u cup v), extras)
            for x, y, u, v in ((p, q, r, s), (r, s, p, q)):
                for m, cm in cup_terms[u][v]:
                    canon = self._canon(cls, (x, y, m) + extras)
                    if canon is None:
                        continue
                    ins_t, mult = canon
                    coeff = sign * cm * mult
                    key = (cls, ins_t)
                    if stage_n is not None and len(ins_t) == stage_n:
                        v_known = memo_get(key)
                        if v_known is None:
                            terms[key] = terms.get(key, RAT_ZERO) + coeff
                            continue
                        const += coeff * v_known
                    else:
                        if stage_n is not None and len(ins_t) > stage_n:
                            raise AssertionError(
                                f"key {key} outside stage (cls={cls}, n={stage_n})"
                            )
                        const += coeff * self.value_of(key)

            # split terms over beta1 + beta2 = cls, both nonzero effective
            kept1 = tuple(x for x in (p, q) if codims[x] >= 2)
            div1 = tuple(x for x in (p, q) if codims[x] == 1)
            kept2 = tuple(x for x in (r, s) if codims[x] >= 2)
            div2 = tuple(x for x in (r, s) if codims[x] == 1)
            w1 = sum(weights[x] for x in kept1)
            w2 = sum(weights[x] for x in kept2)
            memo_vals = self.memo._values
            value_of = self.value_of
            inter = datum.inter
            for b1, b2 in datum.splits(cls):
                m1 = 1
                for x in div1:
                    m1 *= inter(x, b1)
                if m1 == 0:
                    continue
                m2 = 1
                for x in div2:
                    m2 *= inter(x, b2)
                if m2 == 0:
                    continue
                bud1 = self._budget(b1)
                bud2 = self._budget(b2)
                for e, eh, ce, ceh in self._epairs:
                    if ce == 1:
                        t = inter(e, b1)
                        if t == 0:
                            continue
                        me1, add1 = m1 * t, kept1
                        w_a = bud1 - w1
                    else:
                        me1, add1 = m1, kept1 + (e,)
                        w_a = bud1 - w1 - weights[e]
                    if ceh == 1:
                        t = inter(eh, b2)
                        if t == 0:
                            continue
                        me2, add2 = m2 * t, kept2
                        w_b_need = bud2 - w2
                    else:
                        me2, add2 = m2, kept2 + (eh,)
                        w_b_need = bud2 - w2 - weights[eh]
                    grp = groups.get(w_a)
                    if grp is None:
                        continue
                    scale = sign * me1 * me2
                    for a_part, b_part, w_b, mult in grp:
                        if w_b != w_b_need:
                            continue
                        key1 = (b1, tuple(sorted(a_part + add1)))
                        v1 = memo_vals.get(key1)
                        if v1 is None:
                            v1 = value_of(key1)
                        if v1 == 0:
                            continue
                        key2 = (b2, tuple(sorted(b_part + add2)))
                        v2 = memo_vals.get(key2)
                        if v2 is None:
                            v2 = value_of(key2)
                        if v2 == 0:
                            continue
                        const += scale * mult * v1 * v2

        return {k: v for k, v in terms.items() if v != 0}, const

    def _partition_groups(self, extras):
        """Partitions A|B of an insertion multiset, grouped by weight of A.

        Returns {w(A): [(A, B, w(B), multiplicity), ...]} where multiplicity
        counts the ways to pick A among the labeled copies of equal classes.
        """
        cached = self._partition_cache.get(extras)
        if cached is not None:
            return cached
        weights = self._weights
        items = sorted(Counter(extras).items())
        combos = [((), (), 0, 0, 1)]
        for e, m in items:
            nxt = []
            for a_p, b_p, wa, wb, mu in combos:
                for take in range(m + 1):
                    nxt.append(
                        (
                            a_p + (e,) * take,
                            b_p + (e,) * (m - take),
                            wa + weights[e] * take,
                            wb + weights[e] * (m - take),
                            mu * binom(m, take),
                        )
                    )
            combos = nxt
        groups: dict = {}
        for a_p, b_p, wa, wb, mu in combos:
            groups.setdefault(wa, []).append((a_p, b_p, wb, mu))
        self._partition_cache[extras] = groups
        return groups

    # ------------------------------------------------------------------
    # stage solving
    # ------------------------------------------------------------------

    def solve_stage(self, cls, n) -> None:
        """Solve every admissible key of stage (cls, n) into the memo."""
        cls = tuple(cls)
        self._check_class(cls)
        keys = tuple(
            k for k in self._stage_keys(cls, n) if self.memo.get(k) is None
        )
        if keys:
            self._solve_for(cls, n, keys)

    def _solve_for(self, cls, n, requested) -> None:
        if n < 3:
            raise UnderdeterminedStage(
                f"stage (cls={cls}, n={n}) reached the solver; base cases "
                "and dimension vanishing must cover every key with n <= 2"
            )
        st = self._stage_state.get((cls, n))
        if st is None:
            st = _StageState()
            self._stage_state[(cls, n)] = st
        solver = st.solver
        memo = self.memo
        need = [k for k in requested if k not in memo and k not in solver.solved]
        done = not need
        if not done:
            self._harvest_closure(cls, st, need, lead=True)
            done = self._drain(cls, n, st, need)
        if not done:
            self._harvest_closure(cls, st, need, lead=False)
            done = self._drain(cls, n, st, need)
        if not done and not st.tier2_done:
            st.tier2_done = True
            st.tier = max(st.tier, 2)
            rest = [
                k for k in self._stage_keys(cls, n)
                if k not in memo and k not in solver.solved
            ]
            self._harvest_closure(cls, st, rest, lead=False)
            done = self._drain(cls, n, st, need)
        if not done and not st.tier3_done:
            st.tier3_done = True
            st.tier = max(st.tier, 3)
            for spec in self._tier3_specs(cls, n):
                if spec not in st.seen:
                    st.seen.add(spec)
                    st.pending.append(spec)
            done = self._drain(cls, n, st, need)
        for key, val in sorted(solver.solved.items()):
            memo.set(key, val, "solved")
        if st.tier > self.stage_tiers.get((cls, n), 0):
            self.stage_tiers[(cls, n)] = st.tier
        if not done:
            missing = [k for k in requested if memo.get(k) is None]
            raise UnderdeterminedStage(
                f"stage (cls={cls}, n={n}) underdetermined after tier 3; "
                f"unsolved: {missing[:5]}{'...' if len(missing) > 5 else ''}"
            )

    def _drain(self, cls, n, st, need) -> bool:
        """Consume pending equations until the needed keys are solved.

        Unconsumed equations stay queued for later visits. The threaded
        path builds in parallel but consumes strictly in submission order,
        so solver contents match the serial path equation for equation.
        """
        solver = st.solver
        memo = self.memo

        def satisfied() -> bool:
            solved = solver.solved
            return all(k in solved or k in memo for k in need)

        if satisfied():
            return True
        pend = st.pending
        if self.threads == 1:
            while pend:
                frame, extras = pend.popleft()
                terms, const = self._build(cls, frame, extras, n)
                if terms or const != 0:
                    solver.add(terms, const)
                    if satisfied():
                        return True
            return satisfied()
        while pend:
            batch = list(pend)
            pend.clear()
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                futures = [
                    pool.submit(self._build_strict, cls, frame, extras, n)
                    for frame, extras in batch
                ]
                results = [f.result() for f in futures]
            gap = None
            for idx, res in enumerate(results):
                if isinstance(res, _MissingKey):
                    gap = idx
                    break
                terms, const = res
                if terms or const != 0:
                    solver.add(terms, const)
                    if satisfied():
                        pend.extendleft(reversed(batch[idx + 1:]))
                        return True
            if gap is None:
                continue
            # Resolve only the first gap's key: the serial path would meet
            # exactly this key next, so the memo stays bit-identical across
            # thread counts. Later speculative results are discarded and
            # their specs requeued.
            pend.extendleft(reversed(batch[gap:]))
            self.value_of(results[gap].key)
        return satisfied()

    def _build_strict(self, cls, frame, extras, n):
        self._tl.strict = True
        try:
            return self._build(cls, frame, extras, n)
        except _MissingKey as exc:
            return exc
        finally:
            self._tl.strict = False

    # -- harvesting ------------------------------------------------------

    def _harvest_closure(self, cls, st, seeds, lead: bool) -> None:
        """Expand seeds through the key graph, queueing primary equations.

        In lead mode each key contributes only the frames built on its
        three largest insertions; the full mode enumerates every choice.
        Keys already valued (memo) or eliminated (stage solver) terminate
        the walk; keys expanded at the same depth before are skipped.
        """
        memo = self.memo
        solved = st.solver.solved
        expanded = st.lead_expanded if lead else st.full_expanded
        seen = st.seen
        per_key = []
        frontier = deque(sorted(set(seeds)))
        while frontier:
            key = frontier.popleft()
            if key in expanded:
                continue
            expanded.add(key)
            mine = []
            for spec in self._key_specs(key, lead):
                if spec not in seen:
                    seen.add(spec)
                    mine.append(spec)
                for nb in self._spec_unknowns(cls, spec):
                    if nb not in expanded and nb not in memo and nb not in solved:
                        frontier.append(nb)
            if mine:
                per_key.append(mine)
        # interleave specs across keys (consecutive specs of one key are
        # mostly dependent) and jump ahead of backlog from earlier visits
        fresh = []
        col = 0
        while per_key:
            nxt = []
            for mine in per_key:
                fresh.append(mine[col])
                if col + 1 < len(mine):
                    nxt.append(mine)
            per_key = nxt
            col += 1
        st.pending.extendleft(reversed(fresh))

    def _key_specs(self, key, lead: bool):
        """Primary equation specs whose unknowns include the key, in order."""
        _, ins = key
        decomp = self._decomp
        specs = []
        if lead:
            # Triangular frame: take the largest insertion t, the row of its
            # decomposition whose product contains t, and fill the last two
            # slots from the remaining insertions.  A frame is accepted only
            # when its second family of same-stage unknowns is ruled out —
            # either the row's rho is a divisor (the family drops a stage) or
            # the fourth slot erases it (vkill) — so every other key the
            # equation touches carries strictly fewer copies of the top
            # indices and the stage solves by pure substitution.  Keys built
            # solely from insertions with non-divisor rows and no erasing
            # partner fall back to the largest-t frame anyway; the handful of
            # forward references it creates resolve by one extra round of
            # substitution inside the same harvested closure.
            lead_rows = self._lead_rows
            fallback = None
            for t in sorted(set(ins), reverse=True):
                dv, rho, vkill = lead_rows[t]
                i = ins.index(t)
                rest = ins[:i] + ins[i + 1 :]
                if vkill is None:
                    j = 0
                else:
                    v = next((x for x in rest if x in vkill), None)
                    if v is None:
                        if fallback is None:
                            w = next((x for x in rest if x != rho), None)
                            if w is not None:
                                jw = rest.index(w)
                                remw = rest[:jw] + rest[jw + 1 :]
                                fallback = ((dv, rho, remw[0], w), remw[1:])
                        continue
                    j = rest.index(v)
                rem = rest[:j] + rest[j + 1 :]
                specs.append(((dv, rho, rem[0], rest[j]), rem[1:]))
                return specs
            if fallback is not None:
                specs.append(fallback)
            return specs
        counts = Counter(ins)
        for t in sorted(counts):
            rest = list(ins)
            rest.remove(t)
            rest_counts = Counter(rest)
            for u in sorted(rest_counts):
                after_u = rest_counts.copy()
                after_u[u] -= 1
                for v in sorted(x for x in after_u if after_u[x] > 0):
                    extras_list = list(rest)
                    extras_list.remove(u)
                    extras_list.remove(v)
                    extras = tuple(extras_list)
                    for d, rho, _c in decomp[t]:
                        if rho == v:
                            continue
                        specs.append(((d, rho, u, v), extras))
        return specs

    def _spec_unknowns(self, cls, spec):
        """Current-stage keys that _build would keep symbolic for this spec."""
        (d, rho, u, v), extras = spec
        cup_terms = self._cup_terms
        out = set()
        for m, _cm in cup_terms[d][rho]:
            out.add((cls, _merged(extras, (u, v, m))))
        if self._codims[rho] >= 2:
            for m, _cm in cup_terms[d][v]:
                out.add((cls, _merged(extras, (rho, u, m))))
        return sorted(out)

    def _stage_keys(self, cls, n):
        """All admissible keys of stage (cls, n), sorted."""
        budget = self._budget(cls)
        nond = self.datum.nondivisors
        weights = self._weights
        out = []

        def rec(pos, left, wleft, acc):
            if left == 0:
                if wleft == 0:
                    out.append((cls, tuple(acc)))
                return
            if pos >= len(nond):
                return
            e = nond[pos]
            w = weights[e]
            # take k copies of e
            max_k = left
            for k in range(max_k + 1):
                wk = w * k
                if wk > wleft:
                    break
                rec(pos + 1, left - k, wleft - wk, acc + [e] * k)

        rec(0, n, budget, [])
        return sorted(out)

    def _tier3_specs(self, cls, n):
        """Exhaustive harvest: every divisor-led frame over every extras multiset."""
        specs = []
        nond = self.datum.nondivisors
        weights = self._weights
        budget = self._budget(cls)
        for d in self.datum.divisors:
            for j in nond:
                for k in nond:
                    for l in nond:
                        if j == l:
                            continue
                        w_e = budget - 1 - weights[j] - weights[k] - weights[l]
                        if w_e < 0:
                            continue
                        for extras in self._extras_multisets(n - 3, w_e):
                            specs.append(((d, j, k, l), extras))
        return specs

    def _extras_multisets(self, size, weight):
        nond = self.datum.nondivisors
        weights = self._weights
        out = []

        def rec(pos, left, wleft, acc):
            if left == 0:
                if wleft == 0:
                    out.append(tuple(acc))
                return
            if pos >= len(nond):
                return
            e = nond[pos]
            w = weights[e]
            for k in range(left + 1):
                wk = w * k
                if wk > wleft:
                    break
                rec(pos + 1, left - k, wleft - wk, acc + [e] * k)

        rec(0, size, weight, [])
        return out

    # ------------------------------------------------------------------
    # cache persistence
    # ------------------------------------------------------------------

    def save_cache(self, path) -> int:
        """Write the memo store as deterministic JSON; returns entry count."""
        if self.datum.rank != 2:
            raise CacheFormatError(
                "cache schema is defined for the two-parameter target only"
            )
        entries = []
        for (cls, ins), val in sorted(self.memo.items()):
            entries.append(
                {
                    "a": cls[0],
                    "b": cls[1],
                    "ins": list(ins),
                    "num": str(val.numerator),
                    "den": str(val.denominator),
                }
            )
        payload = {"target": self.datum.name, "entries": entries}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, separators=(",", ":"), sort_keys=True)
            fh.write("\n")
        return len(entries)

    def load_cache(self, path) -> int:
        """Load and validate a cache file into the memo; returns entry count.

        Every entry must be canonical and dimension-admissible; entries the
        base cases can derive must match them exactly. A value conflicting
        with one already in the memo raises InconsistentSystem.
        """
        with open(path, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise CacheFormatError(f"not valid JSON: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("target") != self.datum.name:
            raise CacheFormatError(
                f"cache target {payload.get('target')!r} does not match "
                f"{self.datum.name!r}"
            )
        entries = payload.get("entries")
        if not isinstance(entries, list):
            raise CacheFormatError("cache entries must be a list")
        count = 0
        for entry in entries:
            try:
                cls = (int(entry["a"]), int(entry["b"]))
                ins = tuple(int(x) for x in entry["ins"])
                val = rat_from_parts(entry["num"], entry["den"])
            except (KeyError, TypeError, ValueError) as exc:
                raise CacheFormatError(f"malformed entry {entry!r}") from exc
            if not self.datum.effective(cls) or self.datum.is_zero_class(cls):
                raise CacheFormatError(f"entry class {cls} is not admissible")
            if tuple(sorted(ins)) != ins or any(
                self._codims[e] < 2 for e in ins if 0 <= e < self.datum.basis_size
            ) or any(not 0 <= e < self.datum.basis_size for e in ins):
                raise CacheFormatError(f"entry insertions {ins} not canonical")
            if sum(self._weights[e] for e in ins) != self._budget(cls):
                raise CacheFormatError(
                    f"entry ({cls}, {ins}) violates the dimension count"
                )
            derivable = self.datum.base_case(cls, ins)
            if derivable is not None and derivable != val:
                raise InconsistentSystem(
                    f"cache entry ({cls}, {ins}) = {val} contradicts base "
                    f"case {derivable}"
                )
            self.memo.set((cls, ins), val, "loaded")
            count += 1
        return count

    # ------------------------------------------------------------------
    # diagnostics
    # ------------------------------------------------------------------

    def tier_report(self) -> dict:
        """Stages solved so far and the highest harvest tier each needed."""
        return dict(self.stage_tiers)


def _merged(sorted_tuple, small):
    return tuple(sorted(sorted_tuple + tuple(small)))
