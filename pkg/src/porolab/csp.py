"""Test sequences, matching constants and complete strong porosity."""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import INF, Rational, as_rational, is_inf
from .gaps import (Enumerated, GapSequence, Listed, UniversalityReport, M_of,
                   universality_certificate)
from .germ.profile import DIV, is_marker
from .germ.sets import FiniteSet, GermSet
from .porosity import lambda_gap, porosity_at_zero
from .tails import (IndexSet, liminf_of, limsup_of, ratio_between, tau_ratios,
                    window_misses_eventually)
from .verdict import Status, TailVerdict, certified, conjoin, empirical, inconclusive


class PreconditionError(ValueError):
    pass


class Provenance(enum.Enum):
    DYADIC_WITNESS = "DyadicWitness"
    GAP_ENDPOINTS = "GapEndpoints"
    BLOCK_LEFT_ENDPOINTS = "BlockLeftEndpoints"
    USER_SUPPLIED = "UserSupplied"


def shell_of(y) -> int:
    """Index j of the dyadic shell holding y: [1, inf) is 1, [2^-(j-1), 2^-(j-2)) is j."""
    return max(1, 1 - as_rational(y).floor_log2())


class TestSequence:
    """A decreasing sequence of points of E tending to 0.

    ``point(n)`` returns ``(tau_n, j)`` where ``j`` is the block holding tau_n.
    Sequences built from block endpoints also carry ``(T, kind)``: tau_n is the
    ``kind`` endpoint of block ``T.nth(n)``, which is what exact tail reasoning
    uses.
    """

    __test__ = False  # not a pytest class

    def __init__(self, E: GermSet, provenance: Provenance, point, *, T: IndexSet | None = None,
                 kind: str | None = None, label: str = "", finite_len: int | None = None):
        self.E = E
        self.provenance = provenance
        self._point = point
        self.T = T
        self.kind = kind
        self.label = label
        self.finite_len = finite_len

    def point(self, n: int):
        return self._point(n)

    def tau(self, n: int) -> Rational:
        return self._point(n)[0]

    def values(self, depth: int):
        return [self.tau(n) for n in range(1, self.length(depth) + 1)]

    def length(self, depth: int) -> int:
        return depth if self.finite_len is None else min(depth, self.finite_len)

    @property
    def symbolic(self) -> bool:
        return self.T is not None and self.T.periodic

    def __repr__(self):
        return f"TestSequence({self.provenance.value}, {self.label})"

    # constructors
    @staticmethod
    def block_endpoints(E: GermSet, kind: str = "lo", step: int = 1, offset: int = 0):
        T = IndexSet.all().subsample(step, offset)
        return TestSequence.at_blocks(E, T, kind, Provenance.BLOCK_LEFT_ENDPOINTS,
                                      f"block {kind} ends, step {step}")

    @staticmethod
    def at_blocks(E, T: IndexSet, kind: str, provenance, label=""):
        def point(n):
            j = T.nth(n)
            b = E.block(j)
            return (b.lo if kind == "lo" else b.hi, j)
        return TestSequence(E, provenance, point, T=T, kind=kind, label=label)

    @staticmethod
    def gap_right_endpoints(E: GermSet, L: GapSequence, step: int = 1):
        """tau_n = m_{n+1}: the right end of the (n+1)-th gap of L (a block's left end)."""
        R = L.range_set()
        if R is not None:
            T = R.subsample(step, 1)
            return TestSequence.at_blocks(E, T, "lo", Provenance.GAP_ENDPOINTS,
                                          f"right ends of {L.label}, step {step}")

        def point(n):
            j = L.idx(step * n + 1)
            return (E.block(j).lo, j)
        return TestSequence(E, Provenance.GAP_ENDPOINTS, point, label=f"right ends of {L.label}")

    @staticmethod
    def user(E: GermSet, values, depth: int = 4096):
        pts = []
        for y in values:
            y = as_rational(y)
            pts.append((y, _block_of(E, y, depth)))
        return TestSequence(E, Provenance.USER_SUPPLIED, lambda n: pts[n - 1],
                            label="user", finite_len=len(pts))


def _block_of(E: GermSet, y, depth: int) -> int:
    for n in range(1, depth + 1):
        b = E.block(n)
        if y > b.hi:
            break
        if y >= b.lo:
            return n
    raise PreconditionError(f"test point {y} is not a point of the set")


class _Dyadic:
    """One representative per nonempty dyadic shell, walking blocks downwards."""

    def __init__(self, E: GermSet):
        self.E = E
        self.segments = []  # (first k, block n, first shell, last shell)
        self.count = 0
        self.last_shell = 0
        self.next_block = 1
        self._lock = threading.Lock()

    def _extend(self, k):
        with self._lock:
            while self.count < k:
                n = self.next_block
                self.next_block += 1
                b = self.E.block(n)
                js, je = shell_of(b.hi), shell_of(b.lo)
                first = max(js, self.last_shell + 1)
                if first > je:
                    continue
                self.segments.append((self.count + 1, n, first, je, js))
                self.count += je - first + 1
                self.last_shell = je

    def point(self, k):
        if k > self.count:
            self._extend(k)
        # segments are few; a linear search from the end is fine
        lo_i, hi_i = 0, len(self.segments) - 1
        while lo_i < hi_i:
            mid = (lo_i + hi_i + 1) // 2
            if self.segments[mid][0] <= k:
                lo_i = mid
            else:
                hi_i = mid - 1
        k0, n, first, je, js = self.segments[lo_i]
        j = first + (k - k0)
        b = self.E.block(n)
        if j == js:
            return (b.hi, n)
        if j == je:
            return (b.lo, n)
        # the block covers the whole shell, whose supremum is not attained
        return (Rational.power(2, -(j - 1)), n)


def dyadic_witness(E: GermSet, depth: int | None = None) -> TestSequence:
    d = _Dyadic(E)
    return TestSequence(E, Provenance.DYADIC_WITNESS, d.point, label="dyadic shells")


# -- equivalence of sequences --------------------------------------------------------

@dataclass(frozen=True)
class EquivVerdict:
    """c1 * x_n <= y_n <= c2 * x_n for n >= from_index."""

    c1: object
    c2: object
    from_index: int
    verdict: TailVerdict

    def __bool__(self):
        return self.verdict.truthy


@dataclass(frozen=True)
class SlotAssignment:
    k: tuple  # k(n), 0 when tau_n lies above the first gap of L
    slots: tuple  # (m_{k+1}, l_k) per n, None for k = 0

    def __len__(self):
        return len(self.k)


def _growth(values) -> bool:
    n = len(values)
    if n < 8:
        return False
    q = n // 4
    # maxima, not minima: inside a long block the ratios restart near 1
    maxs = [max(values[i * q:(i + 1) * q]) for i in range(4)]
    return maxs[3] > maxs[2] > maxs[1] and maxs[3] > 2 * maxs[1]


def _ratio_window(xs, ys, depth):
    """c1, c2 and first index after which x_n <= y_n, from exact ratios y/x."""
    rs = [y / x for x, y in zip(xs, ys)]
    last_bad = max((i + 1 for i, r in enumerate(rs) if r < 1), default=0)
    tail = rs[max(last_bad, len(rs) // 2):] or rs
    return rs, min(tail), max(tail), last_bad + 1


def _pair_ratios(E, A: GapSequence, tau: TestSequence, depth: int):
    """Eventual ratios a_n / tau_n pairing the n-th gap of A with tau_n.

    Returns a list of values over one joint period, or "drift" when the two
    enumerations have different densities (then the ratios cannot stay bounded
    and at least one, in practice both, matching conditions fail), or ``None``
    when undecidable.
    """
    G, B = E.profiles(depth)
    R = A.range_set()
    if not (R is not None and tau.symbolic and G.is_periodic and B.is_periodic
            and isinstance(A.index, Enumerated)):
        return None
    T = tau.T
    rA, rT = len(R.residues), len(T.residues)
    Q = math.lcm(rA, rT)
    if R.period * (Q // rA) != T.period * (Q // rT):
        return "drift"
    base = max(len(R.head), len(T.head)) + Q + 1
    while R.nth(base) < max(G.start, B.start) + G.period + B.period or \
            T.nth(base) < max(G.start, B.start) + G.period + B.period:
        base += Q
    out = []
    for n in range(base, base + Q):
        i, j = R.nth(n), T.nth(n)
        if i + 1 > j:
            out.append(Fraction(0))  # tau lies above a: the ordering condition fails
        else:
            out.append(ratio_between(G, B, i + 1, "hi", j, tau.kind))
    return out


def check_asymp_gap(tau: TestSequence, A: GapSequence, depth: int) -> EquivVerdict:
    """Whether tau_n <= a_n eventually and a_n / tau_n stays bounded."""
    E = tau.E
    paired = _pair_ratios(E, A, tau, depth)
    n = min(tau.length(depth), A.length(depth))
    xs = [tau.tau(k) for k in range(1, n + 1)]
    ys = [A.entry(k)[0] for k in range(1, n + 1)]
    rs, c1, c2, from_idx = _ratio_window(xs, ys, depth)
    if paired == "drift":
        return EquivVerdict(c1, c2, from_idx, certified(False, depth, reason="densities differ"))
    if paired is not None:
        ok = all(v >= 1 for v in paired) and not any(is_inf(v) for v in paired)
        lo = liminf_of(paired)
        hi = limsup_of(paired)
        return EquivVerdict(lo, hi, from_idx, certified(ok, depth, limsup=hi))
    ok = c1 >= 1 and not _growth(rs)
    return EquivVerdict(c1, c2, from_idx, empirical(ok, depth))


# -- matching test sequences to gaps ---------------------------------------------------

class _SlotMatched:
    """Index map n -> gap index of L above tau_n's slot."""

    def __init__(self, L: GapSequence, tau: TestSequence):
        self.L, self.tau = L, tau

    def k_of(self, n: int) -> int:
        _, j = self.tau.point(n)
        R = self.L.range_set()
        if R is not None:
            return R.count_below(j)
        k = 0
        while self.L.idx(k + 1) < j:
            k += 1
        return k

    def __call__(self, n):
        k = self.k_of(n)
        if k == 0:
            raise IndexError("test point lies above the first gap of the sequence")
        return self.L.idx(k)

    def range_set(self):
        return None

    strict = False


def matching_sequence(E: GermSet, depth: int) -> tuple[GapSequence | None, UniversalityReport]:
    """The gap sequence whose slots organise E: the universal one when it exists."""
    U = universality_certificate(E, depth)
    if U.universal_sequence is not None:
        return U.universal_sequence, U
    G, _ = E.profiles(depth)
    from .tails import com_set
    if G.is_diagonal:
        S = com_set(E, G.scale * G.base, G, depth)
        return GapSequence.of_set(E, S, "gaps above the least recurring ratio"), U
    return None, U


def slot_assignment(L: GapSequence, tau: TestSequence, depth: int) -> SlotAssignment:
    m = _SlotMatched(L, tau)
    ks, slots = [], []
    for n in range(1, tau.length(depth) + 1):
        k = m.k_of(n)
        ks.append(k)
        slots.append(None if k == 0 else (L.entry(k + 1)[1], L.entry(k)[0]))
    return SlotAssignment(tuple(ks), tuple(slots))


@dataclass(frozen=True)
class Matching:
    verdict: TailVerdict
    gaps: GapSequence | None = None
    slots: SlotAssignment | None = None
    C: object = None


def _symbolic_tau_ratios(E, L, tau, depth):
    G, B = E.profiles(depth)
    R = L.range_set() if L is not None else None
    if R is None or not tau.symbolic or not (G.is_periodic and B.is_periodic):
        return None
    return tau_ratios(G, B, R, tau.T, tau.kind)


def tau_strongly_porous(E: GermSet, tau: TestSequence, depth: int, _ctx=None) -> Matching:
    """Verdict on tau-strong porosity with the slot-matched gap sequence."""
    if isinstance(E, FiniteSet):
        raise PreconditionError("a finite set has no test sequences")
    for n in range(1, min(tau.length(depth), 8) + 1):
        y, j = tau.point(n)
        if not E.block(j).contains(y):
            raise PreconditionError(f"tau_{n} = {y} is not a point of the set")
    L, U = _ctx or matching_sequence(E, depth)
    G, B = E.profiles(depth)
    if L is None:
        if U.verdict.status is Status.CERTIFIED_FALSE:
            return Matching(certified(False, depth, reason="no strongly porous gap sequence"),
                            C=INF)
        return Matching(inconclusive(depth), C=None)
    matched = GapSequence(E, _SlotMatched(L, tau), f"slots of {L.label}")
    slots = slot_assignment(L, tau, depth)
    if U.verdict.status is Status.CERTIFIED_TRUE:
        vals = _symbolic_tau_ratios(E, L, tau, depth)
        if vals is not None:
            C = limsup_of(vals)
            return Matching(certified(not is_inf(C), depth, C=C), matched, slots, C)
    if G.is_diagonal and ((tau.symbolic and _dense(tau.T)) or (
            tau.provenance is Provenance.DYADIC_WITNESS and G.base > 1 and G.scale * G.base >= 2)):
        # gap ratios >= 2 put every block in a fresh dyadic shell, so the
        # dyadic witness visits every block as well
        # climbing from the bottom of each diagonal run to a large ratio costs
        # the product of all smaller ratios, which is unbounded
        return Matching(certified(False, depth, reason="diagonal runs"), matched, slots, INF)
    if tau.provenance is Provenance.DYADIC_WITNESS and G.is_periodic and _min_entry(G) >= 2:
        # each block's left end then opens a new shell, so the witness contains
        # every block's left end with the same gap above it
        m_lo = tau_strongly_porous(E, TestSequence.block_endpoints(E, "lo"), depth, (L, U))
        if m_lo.verdict.status is Status.CERTIFIED_FALSE:
            return Matching(certified(False, depth, reason="contains the block left ends"),
                            matched, slots, INF)
    if tau.provenance is Provenance.DYADIC_WITNESS and U.verdict.status is Status.CERTIFIED_TRUE:
        lo_seq = TestSequence.block_endpoints(E, "lo")
        vals = _symbolic_tau_ratios(E, L, lo_seq, depth)
        if vals is not None and not is_inf(limsup_of(vals)):
            # every dyadic representative sits in a block at or above its left end
            C_emp = _empirical_C(E, L, tau, slots, depth)
            return Matching(certified(True, depth, bound=limsup_of(vals)), matched, slots, C_emp)
    C_emp = _empirical_C(E, L, tau, slots, depth)
    rs = _slot_ratios(E, L, tau, slots, depth)
    return Matching(empirical(bool(rs) and not _growth(rs), depth, C=C_emp), matched, slots, C_emp)


def _min_entry(G):
    vals = [e for e in G.entries if not is_marker(e)]
    return min(vals) if vals else INF


def _dense(T: IndexSet) -> bool:
    els = [T.nth(k) for k in range(len(T.head) + 1, len(T.head) + 2 * len(T.residues) + 2)]
    return all(b - a <= 2 for a, b in zip(els, els[1:]))


def _slot_ratios(E, L, tau, slots, depth):
    out = []
    for n, s in enumerate(slots.slots, 1):
        if s is not None:
            out.append(s[1] / tau.tau(n))
    return out


def _empirical_C(E, L, tau, slots, depth):
    rs = _slot_ratios(E, L, tau, slots, depth)
    if not rs:
        return None
    return max(rs[len(rs) // 2:])


def C_of_tau(E: GermSet, tau: TestSequence, depth: int, _ctx=None):
    m = tau_strongly_porous(E, tau, depth, _ctx)
    if m.verdict.status is Status.CERTIFIED_FALSE:
        return INF, certified(True, depth, reason="no matching; infimum over the empty set")
    if m.verdict.status is Status.CERTIFIED_TRUE and m.C is not None and not is_inf(m.C):
        if "bound" in m.verdict.witness:
            # finiteness is certified, the value itself is a windowed estimate
            return m.C, certified(True, depth, upper_bound=m.verdict.witness["bound"],
                                  value_exact=False)
        return m.C, certified(True, depth, C=m.C)
    return m.C, empirical(m.verdict.truthy, depth)


# -- (k, K) windows -----------------------------------------------------------------

def _window_misses(E: GermSet, lo, hi, j: int) -> bool:
    """Exact: the open interval (lo, hi) contains no point of E.

    ``j`` is a block lying below ``lo``; only blocks above it can meet the window.
    """
    for m in range(j - 1, 0, -1):
        b = E.block(m)
        if b.lo >= hi:
            return True  # this block and all higher ones lie at or above hi
        if b.hi > lo:
            return False
    return True


def kK_condition(E: GermSet, tau: TestSequence, k, K, depth: int) -> TailVerdict:
    k, K = Fraction(k), Fraction(K)
    if not k > 1:
        raise ValueError("k must exceed 1")
    if not K > k:
        raise ValueError("K must exceed k")
    n_pts = tau.length(depth)
    fails = []
    for n in range(1, n_pts + 1):
        y, j = tau.point(n)
        if not (E.block(j).hi <= k * y and _window_misses(E, k * y, K * y, j)):
            fails.append(n)
    N1 = (max(fails) + 1) if fails else 1
    G, B = E.profiles(depth)
    if tau.symbolic and G.is_periodic and B.is_periodic:
        ok = window_misses_eventually(G, B, tau.T, tau.kind, k, K)
        return certified(ok, depth, N1=N1 if ok else None)
    return empirical(N1 <= n_pts // 2, depth, N1=N1, last_failure=fails[-1] if fails else None)


# -- constants over the canonical family -------------------------------------------------

def canonical_family(E: GermSet, depth: int, _ctx=None) -> list[TestSequence]:
    L, U = _ctx or matching_sequence(E, depth)
    base = L if (L is not None and U.verdict.truthy) else GapSequence.all_gaps(E)
    return [
        dyadic_witness(E),
        TestSequence.block_endpoints(E, "lo"),
        TestSequence.gap_right_endpoints(E, base),
        TestSequence.block_endpoints(E, "lo", step=2),
        TestSequence.gap_right_endpoints(E, base, step=2),
    ]


def C_E(E, depth: int):
    """Supremum of C(tau) over test sequences, with a verdict on "C_E is finite"."""
    if isinstance(E, FiniteSet):
        return Fraction(0), certified(True, depth, reason="no test sequences")
    ctx = matching_sequence(E, depth)
    L, U = ctx
    fam = [C_of_tau(E, t, depth, ctx) for t in canonical_family(E, depth, ctx)]
    if any(is_inf(v) and vd.certified for v, vd in fam):
        return INF, certified(False, depth, reason="a canonical test sequence has no matching")
    if U.verdict.status is Status.CERTIFIED_TRUE and U.M_verdict is not None \
            and U.M_verdict.certified:
        M = U.M_value
        return M, certified(not is_inf(M), depth, via="M of the universal sequence", M=M)
    finite = [v for v, _ in fam if v is not None and not is_inf(v)]
    best = max(finite) if finite else None
    ok = len(finite) == len(fam)
    return best, empirical(ok, depth, lower_bound=best)


def uniform_strong_porosity(E, depth: int) -> TailVerdict:
    v, vd = C_E(E, depth)
    if vd.certified:
        return certified(vd.truthy, depth, c=v)
    return empirical(vd.truthy, depth, c=v)


# -- certificates -------------------------------------------------------------------

class CspStatus(enum.Enum):
    CERTIFIED = "CSP_Certified"
    REFUTED = "CSP_Refuted"
    TRIVIAL = "TriviallyCSP"
    EMPIRICAL = "Empirical"


@dataclass(frozen=True)
class Cluster:
    first: int  # block indices, inclusive
    last: int
    center: Rational  # the cluster's largest point
    diameter: object  # center / lowest point


@dataclass(frozen=True)
class CspCertificate:
    """Outcome of the certifier.

    For a certified set every point of E below ``t`` lies in some
    ``(x/q, q*x)`` with ``x`` a center, and the centers are points of E with
    ``x_{n+1}/x_n -> 0``.  ``centers`` lists the clusters below ``t`` to the
    certificate depth; ``center_fn`` extends them lazily.
    """

    status: CspStatus
    depth: int
    q: object = None
    t: object = None
    t_block: int | None = None
    clusters: tuple = ()
    refutation: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    center_fn: object = field(default=None, compare=False, repr=False)

    @property
    def centers(self):
        return tuple(c.center for c in self.clusters)

    @property
    def label(self):
        if self.status is CspStatus.EMPIRICAL:
            return f"Empirical({self.depth})"
        return self.status.value


def _pow2_above(D) -> Fraction:
    """Smallest power of 2 strictly greater than D (D >= 1)."""
    q = Fraction(2)
    while not q > D:
        q *= 2
    return q


def greedy_clusters(E: GermSet, nblocks: int, floor_thr=None):
    """Walk blocks downwards, splitting where the gap ratio exceeds
    ``max(4, 2 * running q estimate, floor_thr)``.  Returns clusters and the
    final threshold."""
    base = Fraction(4) if floor_thr is None else max(Fraction(4), Fraction(floor_thr))
    q_est = Fraction(1)
    clusters = []
    first, top = 1, E.block(1).hi
    for n in range(1, nblocks):
        g = E.gap_ratio(n)
        thr = max(base, 2 * q_est)
        if g > thr:
            diam = top / E.block(n).lo
            clusters.append(Cluster(first, n, top, diam))
            if diam > q_est:
                q_est = _frac_ceil(diam)
            first, top = n + 1, E.block(n + 1).hi
    diam = top / E.block(nblocks).lo
    clusters.append(Cluster(first, nblocks, top, diam))
    return clusters, max(base, 2 * q_est)


def _frac_ceil(x):
    x = as_rational(x)
    if x.is_small:
        return x.to_fraction()
    # huge diameters only ever raise the threshold; a power of two bounds them
    return Fraction(2) ** (x.floor_log2() + 1)


def csp_certify(E, depth: int) -> CspCertificate:
    if isinstance(E, FiniteSet):
        return CspCertificate(CspStatus.TRIVIAL, depth,
                              diagnostics={"reason": "finitely many points near the origin"})
    p = porosity_at_zero(E, depth)
    if p.verdict.status is Status.CERTIFIED_FALSE:
        return CspCertificate(CspStatus.REFUTED, depth, refutation={
            "mechanism": "not strongly porous", "p_plus": p.lower})
    U = universality_certificate(E, depth)
    if U.verdict.status is Status.CERTIFIED_FALSE:
        if U.band_witness:
            return CspCertificate(CspStatus.REFUTED, depth, refutation={
                "mechanism": "no universal gap sequence", "band_witness": U.band_witness})
        return CspCertificate(CspStatus.REFUTED, depth, refutation={
            "mechanism": "no strongly porous gap sequence"})
    if U.verdict.status is Status.CERTIFIED_TRUE and U.M_verdict is not None \
            and U.M_verdict.certified:
        if is_inf(U.M_value):
            return CspCertificate(CspStatus.REFUTED, depth, refutation={
                "mechanism": "universal gap sequence with unbounded ratio l_k/m_(k+1)",
                "M": INF, "universal": U.universal_sequence.label},
                diagnostics={"universal_sequence": U.universal_sequence})
        return _certified_plan(E, U, depth)
    clusters, thr = greedy_clusters(E, depth)
    diag = {"universality": U.verdict.label(), "clusters": len(clusters),
            "max_diameter": max(c.diameter for c in clusters[len(clusters) // 2:])}
    return CspCertificate(CspStatus.EMPIRICAL, depth, clusters=tuple(clusters), diagnostics=diag)


def _certified_plan(E: GermSet, U: UniversalityReport, depth: int) -> CspCertificate:
    G, B = E.profiles(depth)
    S = U.universal_sequence.range_set()
    c = U.c if U.c is not None else Fraction(1)
    M = U.M_value
    # below t the clusters are exactly the runs between gaps of S, so the
    # running q estimate is the final q and the split threshold is fixed
    q = _pow2_above(max(M, Fraction(1)))
    thr = max(Fraction(4), 2 * q, c)
    div_res = [j for j, e in enumerate(G.entries) if e is DIV]
    base = max(G.start, B.start, S.start)
    # ratios at a fixed divergent residue strictly increase, so once one
    # occurrence beats the threshold all later ones do
    s0 = base
    for r in div_res:
        n = G.start + r
        while n < base or not E.gap_ratio(n) > thr:
            n += G.period
        s0 = max(s0, n - G.period + 1)
    s0 = _next_in_set(S, s0)
    t = E.block(s0).lo

    def center(k):
        # k-th cluster below t starts just below the k-th gap of S from s0
        i = S.nth(S.count_below(s0) + k)
        return E.block(i + 1).hi

    tail = []
    k = 1
    while True:
        i = S.nth(S.count_below(s0) + k)
        # depth counts blocks below t, so deep thresholds still get checked
        if i + 1 > s0 + depth:
            break
        nxt = S.nth(S.count_below(s0) + k + 1)
        top = E.block(i + 1).hi
        tail.append(Cluster(i + 1, nxt, top, top / E.block(nxt).lo))
        k += 1
    ratio_v = certified(True, depth, reason="center ratios dominated by divergent gap ratios")
    return CspCertificate(
        CspStatus.CERTIFIED, depth, q=q, t=t, t_block=s0, clusters=tuple(tail),
        diagnostics={"M": M, "split_threshold": thr, "c": c, "center_ratio": ratio_v.label(),
                     "universal": U.universal_sequence.label},
        center_fn=center)


def _next_in_set(S: IndexSet, n: int) -> int:
    while not S.contains(n):
        n += 1
    return n


@dataclass(frozen=True)
class Recheck:
    ok: bool
    checked_blocks: int
    violations: tuple


def verify_certificate(E: GermSet, cert: CspCertificate, depth: int = 64) -> Recheck:
    """Independent check of a certificate against the set's blocks.

    The ``depth`` blocks below ``t`` must each sit inside some
    ``(x/q, q*x)``; every center must be a point of E below ``t``; centers must
    strictly decrease with ratios at most 1/2 from the second on.
    """
    if cert.status is CspStatus.REFUTED:
        return _recheck_refutation(E, cert, depth)
    if cert.status is not CspStatus.CERTIFIED:
        return Recheck(cert.status is CspStatus.TRIVIAL, 0, ())
    q, t = Rational(cert.q), cert.t
    centers = [Rational(x) if not isinstance(x, Rational) else x for x in cert.centers]
    bad = []
    for x in centers:
        if not x < t and x != t:
            bad.append(("center above t", str(x)))
        elif not E.contains(x, max(depth, 8) * 4):
            bad.append(("center not in set", str(x)))
    for a, b in zip(centers, centers[1:]):
        if not b < a:
            bad.append(("centers not decreasing", str(b)))
    checked = 0
    j = 0
    n = 1
    while E.block(n).hi >= t and n <= 10 * depth:
        n += 1
    limit = n + depth - 1
    if not cert.clusters or cert.clusters[-1].last < limit:
        bad.append(("certificate lists too few clusters", len(cert.clusters)))
        limit = cert.clusters[-1].last if cert.clusters else n - 1
    while n <= limit:
        blk = E.block(n)
        # advance to the lowest center still at or above this block's top over q
        while j + 1 < len(centers) and centers[j + 1] * q > blk.hi:
            j += 1
        hit = any(x / q < blk.lo and blk.hi < q * x
                  for x in centers[max(0, j - 1): j + 2])
        if not hit:
            bad.append(("block outside every neighborhood", n))
        checked += 1
        n += 1
    return Recheck(not bad, checked, tuple(bad))


def _recheck_refutation(E: GermSet, cert: CspCertificate, depth: int) -> Recheck:
    """Re-derive each refutation mechanism from raw block data on the window."""
    ref = cert.refutation or {}
    mech = ref.get("mechanism", "")
    bad = []
    if "p_plus" in ref:
        half = depth // 2
        rs = [1 - E.gap(n)[0] / E.gap(n)[1] for n in range(half, depth + 1)]
        if not (max(rs) <= ref["p_plus"] < 1):
            bad.append(("porosity window exceeds the claimed value", str(max(rs))))
        return Recheck(not bad, len(rs), tuple(bad))
    if "band_witness" in ref:
        checked = 0
        for c, w in ref["band_witness"].items():
            for n in w["recurs_at"]:
                g = E.gap_ratio(n)
                checked += 1
                if not (c < g <= w["K"]):
                    bad.append(("gap ratio outside the band", n))
        return Recheck(not bad, checked, tuple(bad))
    L = cert.diagnostics.get("universal_sequence")
    if ref.get("M") is not None and L is not None:
        # skip the first quarter, where merged prefix gaps can spike
        vals = [L.entry(k)[0] / L.entry(k + 1)[1] for k in range(depth // 8 + 1, depth // 2)]
        q = len(vals) // 3
        grows = max(vals[-q:]) > max(vals[q:2 * q]) > max(vals[:q])
        if not grows:
            bad.append(("ratios l_k / m_(k+1) do not grow on the window", None))
        return Recheck(not bad, len(vals), tuple(bad))
    return Recheck("strongly porous" in mech, 0, ())


def descr_sandwich(E: GermSet, cert: CspCertificate, depth: int = 64) -> bool:
    """Centers lie in E (so {x_n} is inside E) and E sits inside W(q) below t."""
    r = verify_certificate(E, cert, depth)
    return r.ok and all(E.contains(x, depth * 4) for x in cert.centers)


# -- witnesses for the porosity-attaining sequences -------------------------------------

@dataclass(frozen=True)
class HWitness:
    tau: TestSequence
    h: tuple
    equiv: EquivVerdict  # c1 * tau_n <= h_n <= c2 * tau_n
    lambda_ratio: TailVerdict  # lambda(E, 0, h_n) / h_n -> 1
    lambda_values: tuple


def h_set_witness(E: GermSet, tau: TestSequence, depth: int) -> HWitness:
    cert = csp_certify(E, depth)
    if cert.status is not CspStatus.CERTIFIED:
        raise PreconditionError(f"the set is not certified completely strongly porous ({cert.label})")
    L, U = matching_sequence(E, depth)
    slots = slot_assignment(L, tau, depth)
    hs, taus, idx = [], [], []
    for n, k in enumerate(slots.k, 1):
        if k == 0:
            continue
        hs.append(L.entry(k + 1)[1])
        taus.append(tau.tau(n))
        idx.append(n)
    if not hs:
        raise PreconditionError("slot assignment unavailable in the window")
    lam = [lambda_gap(E, h).value / h for h in hs]
    rs, c1, c2, from_idx = _ratio_window(taus, hs, depth)
    G, B = E.profiles(depth)
    vals = None
    if tau.symbolic and G.is_periodic and B.is_periodic:
        vals = _slot_bottom_ratios(G, B, L.range_set(), tau.T, tau.kind)
    if vals is not None:
        c1, c2 = liminf_of(vals), limsup_of(vals)
        ev = EquivVerdict(c1, c2, idx[0], certified(c1 > 0, depth))
    else:
        ev = EquivVerdict(c1, c2, idx[0], empirical(c1 > 0, depth))
    # the gap of L just below the slot has diverging ratio, so lambda/h -> 1
    lv = certified(True, depth) if U.verdict.certified else empirical(True, depth)
    return HWitness(tau, tuple(hs), ev, lv, tuple(lam))


def _slot_bottom_ratios(G, B, S, T, kind):
    """Eventual h/tau = lo_{i'} / tau over one period, i' = min{i in S : i >= j}."""
    from .tails import _base, _next_in
    base, P = _base(G, B, S, T)
    base += S.period
    out = []
    j = _next_in(T, base)
    stop = j + P
    while j < stop:
        ip = _next_in(S, j)
        r = ratio_between(G, B, j, kind, ip, "lo")
        out.append(Fraction(1) / r if not is_inf(r) else Fraction(0))
        j = _next_in(T, j + 1)
    return out


def gap_from_h(E: GermSet, tau: TestSequence, h: HWitness, depth: int):
    """Largest gap below each h_n, expanded to its component, and tau ~ b."""
    if not (h.equiv.verdict.truthy and h.lambda_ratio.truthy):
        raise PreconditionError("h witness does not carry the required verdicts")
    pairs = []
    for n, hn in enumerate(h.h):
        g = lambda_gap(E, hn)
        if g.where is None:
            raise PreconditionError("no gap below h")
        a = g.where[0]
        pairs.append(_component_at(E, a, depth))
    b_vals = [E.gap(i)[1] for i in pairs]
    taus = [h.tau.tau(n) for n in range(1, len(h.h) + 1)][: len(b_vals)]
    # h.h was collected from indices with a slot; the tau values follow h's equivalence
    rs, c1, c2, from_idx = _ratio_window(taus, b_vals, depth)
    seq = GapSequence(E, Listed(tuple(pairs)), "largest gaps below h")
    status = h.equiv.verdict
    ev = EquivVerdict(h.equiv.c1, h.equiv.c2, h.equiv.from_index, status) if status.certified \
        else EquivVerdict(c1, c2, from_idx, empirical(c1 > 0, depth))
    return seq, ev


def _component_at(E: GermSet, a, depth: int):
    for n in range(1, 16 * depth):
        lo, hi = E.gap(n)
        if lo == a:
            return n
        if lo < a:
            break
    raise PreconditionError(f"no gap starts at {a}")
