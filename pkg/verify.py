"""
Invariant suite for heavy/light Chow ring computations.

Builds a list of named checks over one weight vector or over every heavy/light
profile up to a size bound, and runs them one after another or in a process
pool.
"""

import itertools
import logging
import multiprocessing as mp
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from fractions import Fraction
from typing import List, Optional

import numpy as np

from hassettcore.check import Check, CheckResult
from hassettcore.chow import (
    GradedBasis,
    heavy_light_presentation,
    multiply,
    pairing_rank,
    relation_spans_agree,
    torsion_check,
)
from hassettcore.common import (
    DEFAULT_SEED,
    EXHAUSTIVE_MAX_N,
    RANDOM_MATRIX_COUNT,
    RANDOM_POINT_COUNT,
    RANDOM_SUBSET_COUNT,
    SUPPORT_MAX_N,
    VERIFY_LEVEL_MAX_N,
)
from hassettcore.fan import (
    ambient_dimension,
    build_fan,
    chain_of_flats_fan,
    projection_report,
    sample_points,
    special_points,
    support_disagreements,
    torus_dimension,
    unimodularity_check,
)
from hassettcore.keel import keel_iso_check, pullback
from hassettcore.linalg import ExactMatrix, determinant, rank, smith_normal_form
from hassettcore.matroid import (
    all_flats,
    closure,
    flat_edges,
    flats_by_closure,
    is_connected_edge_set,
    is_flat,
    matroid_rank,
    one_connected_flats,
    reduced_weight_graph,
)
from hassettcore.weights import (
    HeavyLightProfile,
    WeightInstance,
    WeightVector,
    canonical_epsilon,
    canonical_form,
    classify,
    heavy_light_profiles,
)

logger = logging.getLogger(__name__)

LEVELS = tuple(VERIFY_LEVEL_MAX_N)


def _format_time(seconds: float) -> str:
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, seconds = divmod(int(seconds), 60)
    if minutes < 60:
        return f"{minutes}m{seconds}s"
    hours, minutes = divmod(minutes, 60)
    return f"{hours}h{minutes}m"


class ProgressBar:
    """
    Suite progress on stderr: checks done, the n currently being checked and
    the number of failures so far. The line ends when the last check reports.
    """

    def __init__(self, total: int, prefix: str = 'Verifying:', length: int = 30, stream=None):
        self.total = max(total, 1)
        self.prefix = prefix
        self.length = length
        self.stream = stream or sys.stderr
        self.start_time = time.time()
        self.done = 0
        self.failed = 0

    def update(self, result: Optional[CheckResult] = None, n: Optional[int] = None):
        self.done += 1
        if result is not None and not result.passed:
            self.failed += 1

        filled = self.length * self.done // self.total
        bar = '#' * filled + '.' * (self.length - filled)
        elapsed = time.time() - self.start_time
        eta = elapsed * (self.total / self.done - 1)
        size = f" n={n}" if n is not None else ""

        self.stream.write(
            f'\r{self.prefix} [{bar}] {self.done}/{self.total}{size} | {self.failed} failed'
            f' | {_format_time(elapsed)} elapsed, {_format_time(eta)} left'
        )
        self.stream.flush()
        if self.done >= self.total:
            self.stream.write('\n')


def _random_subset(rng, items):
    return [item for item in items if rng.random() < 0.5]


# weights

def check_canonical_form(p: HeavyLightProfile):
    w = canonical_form(p)
    q = classify(w)
    eps = canonical_epsilon(p.m, p.n)
    ok = (q.m, q.n) == (p.m, p.n) and (p.n - p.m) * eps < 1
    return ok, f"classify(canonical_form) has m={q.m}, n={q.n}"


def check_permutation_invariance(p: HeavyLightProfile, seed: int = DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    w = canonical_form(p)
    for _ in range(5):
        order = [int(i) for i in rng.permutation(p.n)]
        permuted = WeightVector(tuple(w.entries[i] for i in order))
        q = classify(permuted)
        expected_heavy = tuple(sorted(order.index(i) + 1 for i in range(p.m)))
        if q.heavy != expected_heavy:
            return False, f"permutation {order} gave heavy={list(q.heavy)}"
    return True, ""


# exact_linalg

def _random_matrices(max_size: int, seed: int, square: bool = False):
    rng = np.random.default_rng(seed)
    for _ in range(RANDOM_MATRIX_COUNT):
        rows = int(rng.integers(1, max_size + 1))
        cols = rows if square else int(rng.integers(1, max_size + 1))
        yield [[int(x) for x in row] for row in rng.integers(-3, 4, size=(rows, cols))]


def check_linalg_rank_transpose(max_size: int, seed: int = DEFAULT_SEED):
    for data in _random_matrices(max_size, seed):
        m = ExactMatrix(data)
        if rank(m) != rank(m.transpose()):
            return False, f"rank {rank(m)} but transpose rank {rank(m.transpose())} for {data}"
    return True, f"{RANDOM_MATRIX_COUNT} matrices up to {max_size}x{max_size}"


def check_linalg_rank_scaling(max_size: int, seed: int = DEFAULT_SEED):
    rng = np.random.default_rng(seed + 1)
    for data in _random_matrices(max_size, seed):
        order = [int(i) for i in rng.permutation(len(data))]
        scales = [Fraction(int(rng.integers(1, 6)) * int(rng.choice([-1, 1])), int(rng.integers(1, 6)))
                  for _ in data]
        moved = [[scales[i] * x for x in data[i]] for i in order]
        if rank(ExactMatrix(moved)) != rank(ExactMatrix(data)):
            return False, f"row scaling and permutation changed the rank of {data}"
    return True, ""


def check_linalg_snf_determinant(max_size: int, seed: int = DEFAULT_SEED):
    for data in _random_matrices(max_size, seed, square=True):
        m = ExactMatrix(data)
        factors = smith_normal_form(m)
        det = determinant(m)
        if any(b % a for a, b in zip(factors, factors[1:])):
            return False, f"invariant factors {factors} are not a divisor chain"
        product = 1
        for f in factors:
            product *= f
        if det == 0:
            if len(factors) == len(data):
                return False, f"singular matrix {data} has full-rank Smith form"
        elif product != abs(det):
            return False, f"invariant factors {factors} multiply to {product}, |det| = {abs(det)}"
    return True, ""


def linalg_checks(level: str = "fast", seed: int = DEFAULT_SEED) -> List[Check]:
    """Exact linear algebra laws on seeded random integer matrices."""
    size = VERIFY_LEVEL_MAX_N[level]
    return [
        Check(f"linalg.rank_transpose size<={size}", size, check_linalg_rank_transpose, (size, seed)),
        Check(f"linalg.rank_scaling size<={size}", size, check_linalg_rank_scaling, (size, seed)),
        Check(f"linalg.snf_determinant size<={size}", size, check_linalg_snf_determinant, (size, seed)),
    ]


# graph_matroid

def check_flat_labels(p: HeavyLightProfile):
    g = reduced_weight_graph(p)
    for s in one_connected_flats(g):
        edges = flat_edges(g, s)
        if matroid_rank(g, edges) != len(s) - 1 or not is_flat(g, edges):
            return False, f"F_{list(s)} is not a closed flat of rank |S| - 1"
        if not is_connected_edge_set(edges):
            return False, f"F_{list(s)} is disconnected"
    return True, ""


def check_matroid_axioms(p: HeavyLightProfile, seed: int = DEFAULT_SEED):
    g = reduced_weight_graph(p)
    rng = np.random.default_rng(seed)
    for _ in range(RANDOM_SUBSET_COUNT):
        a = frozenset(_random_subset(rng, g.edges))
        b = frozenset(_random_subset(rng, g.edges))
        cl_a = closure(g, a)
        if not a <= cl_a or closure(g, cl_a) != cl_a:
            return False, f"closure not extensive or idempotent on {sorted(a)}"
        if not cl_a <= closure(g, a | b):
            return False, f"closure not monotone on {sorted(a)}"
        if matroid_rank(g, a | b) + matroid_rank(g, a & b) > matroid_rank(g, a) + matroid_rank(g, b):
            return False, f"rank not submodular on {sorted(a)}, {sorted(b)}"
    if matroid_rank(g, g.edges) != p.n - 2:
        return False, "rank of the ground set is not n - 2"
    return True, ""


def check_flat_bijection(p: HeavyLightProfile):
    g = reduced_weight_graph(p)
    by_closure = flats_by_closure(g)
    connected = {
        e for e in by_closure if e and e != g.edge_set and is_connected_edge_set(e)
    }
    labelled = {flat_edges(g, s) for s in one_connected_flats(g)}
    if connected != labelled:
        return False, f"{len(connected)} connected flats by closure, {len(labelled)} labels"
    partitions = {f.edges for f in all_flats(g)}
    if partitions != set(by_closure):
        return False, f"{len(partitions)} flats from partitions, {len(by_closure)} by closure"
    return True, f"{len(by_closure)} flats"


# fan

def check_fan_structure(p: HeavyLightProfile):
    fan = build_fan(p)
    if fan.dimension != p.n - 3:
        return False, f"top cone dimension {fan.dimension}, expected {p.n - 3}"
    if len(fan.rays) != len(one_connected_flats(reduced_weight_graph(p))):
        return False, "ray count differs from the number of flat labels"
    if ambient_dimension(p) != torus_dimension(p):
        return False, f"ambient dimension {ambient_dimension(p)} != torus dimension {torus_dimension(p)}"
    for cone in fan.all_cones():
        if rank(fan.ray_matrix(cone)) != len(cone):
            return False, f"cone {cone} is not simplicial"
        for face in itertools.combinations(cone, len(cone) - 1):
            if face and not fan.spans_cone(face):
                return False, f"face {face} of {cone} is missing"
    return True, f"f-vector {fan.f_vector}"


def check_unimodularity(p: HeavyLightProfile):
    return unimodularity_check(build_fan(p))


def check_support_equality(p: HeavyLightProfile, seed: int = DEFAULT_SEED):
    nested = build_fan(p)
    chains = chain_of_flats_fan(p)
    points = special_points(nested) + special_points(chains)
    points += sample_points([nested, chains], RANDOM_POINT_COUNT, seed)
    disagreements = support_disagreements(nested, chains, points)
    return not disagreements, f"{len(disagreements)} of {len(points)} points disagree"


def check_projection(p: HeavyLightProfile):
    report = projection_report(p)
    detail = (
        f"killed {len(report.killed)} rays, injective={report.injective}, "
        f"rays_match={report.rays_match}, bad cones {len(report.bad_cones)}"
    )
    return report.ok, detail


# chow

def _random_divisor(basis: GradedBasis, rng):
    size = len(basis.presentation.generators)
    return basis.class_of(1, {(g,): int(rng.integers(-2, 3)) for g in range(size)})


def check_presentation_coherence(p: HeavyLightProfile):
    pres = heavy_light_presentation(p)
    fan = build_fan(p)
    if pres.generators != list(fan.rays):
        return False, "generators differ from rays"
    no_cone = {
        frozenset(pair)
        for pair in itertools.combinations(fan.rays, 2)
        if not fan.spans_cone(pair)
    }
    if no_cone != {frozenset(pair) for pair in pres.sr_pairs}:
        return False, "Stanley-Reisner pairs differ from pairs spanning no cone"
    return True, f"{len(pres.generators)} generators, {len(pres.sr_pairs)} SR pairs"


def check_hilbert(p: HeavyLightProfile, expected: Optional[List[int]] = None):
    pres = heavy_light_presentation(p)
    h = GradedBasis(pres).hilbert_function()
    if h != h[::-1] or h[0] != 1 or h[-1] != 1:
        return False, f"Hilbert function {h} is not symmetric with unit ends"
    pairs = ambient_dimension(p) + 1
    relation_rank = rank(ExactMatrix(pres.linear_relations))
    if relation_rank != pairs - 1 or h[1] != len(pres.generators) - (pairs - 1):
        return False, f"relation rank {relation_rank}, expected {pairs - 1}"
    if expected is not None and h != list(expected):
        return False, f"Hilbert function {h}, expected {list(expected)}"
    return True, f"h = {h}"


def check_relation_spans(p: HeavyLightProfile):
    return relation_spans_agree(p)


def check_ring_laws(p: HeavyLightProfile, seed: int = DEFAULT_SEED):
    basis = GradedBasis(heavy_light_presentation(p))
    generators = [basis.generator(label) for label in basis.presentation.generators]
    unit = basis.unit()
    for x in generators:
        if multiply(unit, x) != x:
            return False, "unit law fails"
    if basis.top_degree < 2:
        return True, "top degree below 2"
    for x, y in itertools.combinations(generators, 2):
        if multiply(x, y) != multiply(y, x):
            return False, "multiplication is not commutative"
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b, c = (_random_divisor(basis, rng) for _ in range(3))
        if multiply(a, b + c) != multiply(a, b) + multiply(a, c):
            return False, "multiplication is not distributive"
        if basis.top_degree >= 3 and multiply(multiply(a, b), c) != multiply(a, multiply(b, c)):
            return False, "multiplication is not associative"
    return True, ""


def check_pairing(p: HeavyLightProfile):
    basis = GradedBasis(heavy_light_presentation(p))
    h = basis.hilbert_function()
    d = basis.top_degree
    ranks = [pairing_rank(basis, k) for k in range(d + 1)]
    expected = [min(h[k], h[d - k]) for k in range(d + 1)]
    return ranks == expected, f"pairing ranks {ranks}"


def check_torsion(p: HeavyLightProfile):
    basis = GradedBasis(heavy_light_presentation(p))
    free = [torsion_check(basis, k) for k in range(basis.top_degree + 1)]
    return all(free), f"torsion-free by degree: {free}"


def check_pullback(p: HeavyLightProfile):
    result = pullback(p)
    ok = result.is_injective and result.subring_ranks == result.hilbert
    return ok, f"image ranks {result.image_ranks}, subring ranks {result.subring_ranks}, h = {result.hilbert}"


def check_keel_iso(n: int):
    return keel_iso_check(n)


def check_expected_f_vector(p: HeavyLightProfile, expected: List[int]):
    f_vector = build_fan(p).f_vector
    return f_vector == list(expected), f"f-vector {f_vector}, expected {list(expected)}"


def profile_checks(p: HeavyLightProfile, level: str = "fast", seed: int = DEFAULT_SEED) -> List[Check]:
    """Every invariant that applies to one heavy/light profile."""
    tag = f"({p.weights.to_text()})"
    checks = [
        Check(f"weights.canonical_form {tag}", p.n, check_canonical_form, (p,)),
        Check(f"weights.permutation {tag}", p.n, check_permutation_invariance, (p, seed)),
        Check(f"matroid.flat_labels {tag}", p.n, check_flat_labels, (p,)),
        Check(f"matroid.axioms {tag}", p.n, check_matroid_axioms, (p, seed)),
        Check(f"fan.structure {tag}", p.n, check_fan_structure, (p,)),
        Check(f"fan.unimodular {tag}", p.n, check_unimodularity, (p,)),
        Check(f"chow.coherence {tag}", p.n, check_presentation_coherence, (p,)),
        Check(f"chow.hilbert {tag}", p.n, check_hilbert, (p,)),
        Check(f"chow.relation_spans {tag}", p.n, check_relation_spans, (p,)),
    ]
    if p.n <= EXHAUSTIVE_MAX_N:
        checks += [
            Check(f"matroid.flat_bijection {tag}", p.n, check_flat_bijection, (p,)),
            Check(f"chow.ring_laws {tag}", p.n, check_ring_laws, (p, seed)),
            Check(f"chow.pairing {tag}", p.n, check_pairing, (p,)),
            Check(f"chow.torsion {tag}", p.n, check_torsion, (p,)),
            Check(f"chow.pullback {tag}", p.n, check_pullback, (p,)),
        ]
        if p.m < p.n:
            checks.append(Check(f"fan.projection {tag}", p.n, check_projection, (p,)))
    if p.n <= SUPPORT_MAX_N[level]:
        checks.append(Check(f"fan.support {tag}", p.n, check_support_equality, (p, seed)))
    return checks


def instance_checks(instance: WeightInstance) -> List[Check]:
    """Expected values recorded in an instance file."""
    p = instance.profile
    checks = []
    if instance.hilbert is not None:
        checks.append(Check(f"instance.hilbert {instance.name}", p.n, check_hilbert, (p, instance.hilbert)))
    if instance.f_vector is not None:
        checks.append(
            Check(f"instance.f_vector {instance.name}", p.n, check_expected_f_vector, (p, instance.f_vector))
        )
    return checks


def build_checks(
    profile: Optional[HeavyLightProfile] = None,
    level: str = "fast",
    seed: int = DEFAULT_SEED,
    instance: Optional[WeightInstance] = None,
) -> List[Check]:
    """
    Assemble the suite.

    Args:
        profile: check only this profile (and Keel's ring of the same n); every
            profile up to the level's bound when omitted
        level: 'fast' or 'full'
        seed: seed for every pseudo-random choice
        instance: optional instance with expected values

    Returns:
        List[Check]: sorted so small instances run first
    """
    if level not in VERIFY_LEVEL_MAX_N:
        raise ValueError(f"Unknown level: {level}")
    if instance is not None and profile is None:
        profile = instance.profile

    if profile is not None:
        profiles = [profile]
        keel_sizes = [profile.n] if profile.n <= EXHAUSTIVE_MAX_N else []
    else:
        max_n = VERIFY_LEVEL_MAX_N[level]
        profiles = heavy_light_profiles(max_n)
        keel_sizes = list(range(4, min(max_n, EXHAUSTIVE_MAX_N) + 1))

    checks = [c for p in profiles for c in profile_checks(p, level, seed)]
    checks += [Check(f"keel.iso n={n}", n, check_keel_iso, (n,)) for n in keel_sizes]
    checks += linalg_checks(level, seed)
    if instance is not None:
        checks += instance_checks(instance)
    return sorted(checks)


def _execute(check: Check) -> CheckResult:
    return check.execute()


class VerificationSuite:
    """
    Runs a list of checks with progress output.

    Strategies:
    - Standard: checks run in order in this process
    - Parallel: checks are distributed over a process pool
    """

    def __init__(self, checks: List[Check], show_progress: bool = True):
        self.checks = checks
        self.show_progress = show_progress

    def run_standard(self) -> List[CheckResult]:
        progress = ProgressBar(len(self.checks)) if self.show_progress else None
        results = []
        for check in self.checks:
            results.append(check.execute())
            if progress:
                progress.update(results[-1], n=check.n)
        return results

    def run_parallel(self) -> List[CheckResult]:
        progress = ProgressBar(len(self.checks)) if self.show_progress else None
        results: List[Optional[CheckResult]] = [None] * len(self.checks)
        with ProcessPoolExecutor() as executor:
            futures = {executor.submit(_execute, check): i for i, check in enumerate(self.checks)}
            for future in as_completed(futures):
                index = futures[future]
                results[index] = future.result()
                if progress:
                    progress.update(results[index], n=self.checks[index].n)
        return results

    def run(self, method: str = 'auto') -> List[CheckResult]:
        """
        Run every check.

        Args:
            method: 'standard', 'parallel' or 'auto'

        Returns:
            List[CheckResult]: in the order of the checks
        """
        if method == 'auto':
            if len(self.checks) > 20 and mp.cpu_count() > 1:
                method = 'parallel'
            else:
                method = 'standard'

        if method == 'standard':
            return self.run_standard()
        elif method == 'parallel':
            return self.run_parallel()
        else:
            raise ValueError(f"Unknown method: {method}")


def format_report(results: List[CheckResult]) -> List[str]:
    """Deterministic report lines: one per check, then a summary."""
    lines = []
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        detail = f": {result.detail}" if result.detail else ""
        lines.append(f"{status} {result.name}{detail}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed} passed, {failed} failed")
    return lines


if __name__ == "__main__":
    suite = VerificationSuite(build_checks(level="fast"))
    outcome = suite.run(method="auto")
    print("\n".join(format_report(outcome)))
    sys.exit(0 if all(r.passed for r in outcome) else 3)
