"""Instance generation, seeded experiments, statistics, and reports.

Every experiment is reproducible from its config: per-trial randomness is
derived from ``(master seed, stream name, trial index)`` via
``numpy.random.SeedSequence``, aggregation uses compensated summation, and
report files are byte-stable for identical configs.

Competitive ratios compare the algorithm's expected value against the
exact offline optimum of the same instance.  For a fixed instance the
mean of ``ALG / OPT`` over arrival randomness is reported; when instances
are resampled per trial, the per-trial minimum is also tracked as a
worst-case proxy.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .graphs import WeightedGraph
from . import edge as edge_mod
from . import hypergraph as hyper_mod
from . import ordinal as ordinal_mod
from . import vertex as vertex_mod

ALGORITHMS = ("vertex", "vertex-ordinal-greedy", "edge", "hypergraph", "ordinal")
FAMILIES = ("uniform-complete", "sparse-random", "star", "disjoint-pairs",
            "hard-ordinal", "hypergraph-random")

JITTER_SCALE = 1e-9


@dataclass(frozen=True)
class InstanceFamily:
    """A named instance distribution plus its size/weight parameters.

    Discrete-weight families (star, disjoint-pairs) add a seeded jitter
    below ``1e-9`` so weight ties have probability zero; the jitter scale
    is recorded on the generated instance info.
    """

    kind: str
    n: int = 0
    m: int = 0
    d: int = 2
    density: float = 0.5
    m_aux: int = 0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise InputError(f"unknown family {self.kind!r}; choose from {FAMILIES}")


@dataclass
class GeneratedInstance:
    family: InstanceFamily
    seed: int
    payload: object
    jitter: float = 0.0


def _rng_for(family: InstanceFamily, seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed), 0xFA111)))


def generate_instance(family: InstanceFamily, seed) -> GeneratedInstance:
    """Deterministic instance for ``(family, seed)``."""
    rng = _rng_for(family, seed)
    kind = family.kind
    if kind == "uniform-complete":
        n = family.n
        if n < 2:
            raise InputError("uniform-complete needs n >= 2")
        W = np.triu(rng.random((n, n)), 1)
        g = WeightedGraph(n, [(u, v, float(W[u, v])) for u in range(n) for v in range(u + 1, n)])
        return GeneratedInstance(family, seed, g)
    if kind == "sparse-random":
        n = family.n
        if n < 2:
            raise InputError("sparse-random needs n >= 2")
        if not 0 < family.density <= 1:
            raise InputError("density must lie in (0, 1]")
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < family.density:
                    edges.append((u, v, float(rng.random())))
        if not edges:
            edges = [(0, 1, float(rng.random()))]
        return GeneratedInstance(family, seed, WeightedGraph(n, edges))
    if kind == "star":
        n = family.n
        if n < 2:
            raise InputError("star needs n >= 2")
        jit = rng.random(n - 1) * JITTER_SCALE
        edges = [(0, i, float(i + jit[i - 1])) for i in range(1, n)]
        return GeneratedInstance(family, seed, WeightedGraph(n, edges), JITTER_SCALE)
    if kind == "disjoint-pairs":
        n = family.n
        if n < 2 or n % 2:
            raise InputError("disjoint-pairs needs even n >= 2")
        jit = rng.random(n // 2) * JITTER_SCALE
        edges = [(2 * i, 2 * i + 1, float(i + 1 + jit[i])) for i in range(n // 2)]
        return GeneratedInstance(family, seed, WeightedGraph(n, edges), JITTER_SCALE)
    if kind == "hard-ordinal":
        if family.n < 2:
            raise InputError("hard-ordinal needs n >= 2")
        return GeneratedInstance(family, seed, family.n)
    if kind == "hypergraph-random":
        m, r, d = family.m, family.n, family.d
        if m < 1 or r < 1:
            raise InputError("hypergraph-random needs m >= 1 online and n >= 1 offline")
        edges = []
        seen = set()
        for v in range(m):
            for _ in range(int(rng.integers(1, 4))):
                size = int(rng.integers(1, d + 1))
                S = frozenset(int(x) for x in rng.choice(r, size=min(size, r), replace=False))
                if (v, S) in seen:
                    continue
                seen.add((v, S))
                edges.append((v, S, float(rng.random()) + 1e-3))
        H = hyper_mod.BipartiteHypergraph(m, r, d, edges)
        return GeneratedInstance(family, seed, H)
    raise InputError(f"unhandled family {kind}")


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    family: InstanceFamily
    trials: int
    seed: int
    k: int | None = None          # vertex exploration length
    ell: int | None = None        # ordinal threshold cutoff
    oracle: str = "exact"
    inner_trials: int = 200
    resample: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.trials < 1:
            raise InputError("trials must be positive")
        if self.oracle not in ("exact", "mc"):
            raise InputError("oracle must be 'exact' or 'mc'")


@dataclass
class RatioEstimate:
    mean_ratio: float
    stderr: float
    ci_lo: float
    ci_hi: float
    trials: int
    min_ratio: float

    @classmethod
    def from_ratios(cls, ratios: np.ndarray) -> "RatioEstimate":
        r = np.asarray(ratios, dtype=float)
        mean = math.fsum(r.tolist()) / len(r)
        if len(r) > 1:
            var = math.fsum(((x - mean) ** 2 for x in r.tolist())) / (len(r) - 1)
            se = math.sqrt(var / len(r))
        else:
            se = 0.0
        return cls(mean, se, mean - 1.96 * se, mean + 1.96 * se, len(r), float(r.min()))


def _trial_seed(master: int, stream: str, index: int) -> np.random.SeedSequence:
    # crc32 keeps the stream-name component stable across processes
    return np.random.SeedSequence((int(master), zlib.crc32(stream.encode()), int(index)))


def run_experiment(cfg: ExperimentConfig) -> tuple[RatioEstimate, list[dict]]:
    """Run the configured experiment; returns the estimate and report rows."""
    if cfg.algorithm in ("vertex", "vertex-ordinal-greedy"):
        est = _run_vertex(cfg)
    elif cfg.algorithm == "edge":
        est = _run_edge(cfg)
    elif cfg.algorithm == "hypergraph":
        est = _run_hyper(cfg)
    else:
        est = _run_ordinal(cfg)
    fam = cfg.family
    k_or_l = cfg.k if cfg.algorithm.startswith("vertex") else cfg.ell
    if k_or_l is None:
        k_or_l = ""
    row = {
        "algorithm": cfg.algorithm,
        "family": fam.kind,
        "n": fam.n,
        "m": fam.m,
        "d": fam.d,
        "k_or_l": k_or_l,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "mean_ratio": est.mean_ratio,
        "stderr": est.stderr,
        "ci_lo": est.ci_lo,
        "ci_hi": est.ci_hi,
    }
    return est, [row]


def _run_vertex(cfg: ExperimentConfig) -> RatioEstimate:
    greedy = cfg.algorithm == "vertex-ordinal-greedy"
    fam = cfg.family
    if cfg.resample:
        ratios = np.empty(cfg.trials)
        for i in range(cfg.trials):
            gi = generate_instance(fam, int(np.random.default_rng(_trial_seed(cfg.seed, "inst", i)).integers(2**31)))
            inst, opt = _vertex_payload(gi, fam)
            w = _vertex_weights(inst, fam, cfg, trials=1, seed=_trial_seed(cfg.seed, "run", i), greedy=greedy)
            ratios[i] = w[0] / opt
        return RatioEstimate.from_ratios(ratios)
    gi = generate_instance(fam, cfg.seed)
    inst, opt = _vertex_payload(gi, fam)
    w = _vertex_weights(inst, fam, cfg, trials=cfg.trials, seed=_trial_seed(cfg.seed, "run", 0), greedy=greedy)
    return RatioEstimate.from_ratios(w / opt)


def _vertex_payload(gi: GeneratedInstance, fam: InstanceFamily):
    if not isinstance(gi.payload, WeightedGraph):
        raise InputError(f"family {fam.kind} does not generate vertex-arrival graphs")
    base = vertex_mod.VertexInstance(gi.payload)
    opt = base.optimum()
    if opt <= 0:
        raise InputError("instance optimum must be positive for ratio estimation")
    return base, opt


def _vertex_weights(base, fam, cfg, trials, seed, greedy):
    if fam.m_aux > 0:
        if greedy:
            raise InputError("padded fast path covers the exact step matching only")
        return vertex_mod.padded_matched_weight_batch(base, fam.m_aux, cfg.k, trials, seed)
    return vertex_mod.matched_weight_batch(base, cfg.k, trials, seed, greedy=greedy)


def _run_edge(cfg: ExperimentConfig) -> RatioEstimate:
    gi = generate_instance(cfg.family, cfg.seed)
    if not isinstance(gi.payload, WeightedGraph):
        raise InputError(f"family {cfg.family.kind} does not generate graphs")
    inst = edge_mod.EdgeInstance(gi.payload)
    opt = inst.offline_optimum()
    if cfg.oracle == "exact":
        oracle = edge_mod.exact_oracle(inst)
    else:
        oracle = edge_mod.monte_carlo_oracle(
            inst, trials=cfg.inner_trials * 10, inner_trials=cfg.inner_trials,
            seed=_trial_seed(cfg.seed, "oracle", 0),
        )
    org = np.random.default_rng(_trial_seed(cfg.seed, "orders", 0))
    crg = np.random.default_rng(_trial_seed(cfg.seed, "coins", 0))
    ratios = np.empty(cfg.trials)
    for i in range(cfg.trials):
        order = org.permutation(inst.m)
        trace = edge_mod.run_edge_algorithm(inst, order.tolist(), oracle, crg)
        ratios[i] = trace.total_weight / opt
    return RatioEstimate.from_ratios(ratios)


def _run_hyper(cfg: ExperimentConfig) -> RatioEstimate:
    gi = generate_instance(cfg.family, cfg.seed)
    if not isinstance(gi.payload, hyper_mod.BipartiteHypergraph):
        raise InputError(f"family {cfg.family.kind} does not generate hypergraphs")
    H = gi.payload
    opt = H.optimum_weight()
    if opt <= 0:
        raise InputError("instance optimum must be positive")
    if cfg.oracle == "exact":
        oracle = hyper_mod.exact_oracle(H)
    else:
        oracle = hyper_mod.monte_carlo_oracle(
            H, trials=cfg.inner_trials * 10, inner_trials=cfg.inner_trials,
            seed=_trial_seed(cfg.seed, "oracle", 0),
        )
    org = np.random.default_rng(_trial_seed(cfg.seed, "orders", 0))
    crg = np.random.default_rng(_trial_seed(cfg.seed, "coins", 0))
    ratios = np.empty(cfg.trials)
    for i in range(cfg.trials):
        order = org.permutation(H.m)
        trace = hyper_mod.run_hypergraph_algorithm(H, order.tolist(), oracle, crg)
        ratios[i] = trace.total_weight / opt
    return RatioEstimate.from_ratios(ratios)


def _run_ordinal(cfg: ExperimentConfig) -> RatioEstimate:
    n = cfg.family.n
    ell = cfg.ell if cfg.ell is not None else n // 2
    pol = ordinal_mod.threshold_policy(n, ell)
    est = ordinal_mod.simulate_ordinal(pol, cfg.trials, _trial_seed(cfg.seed, "ordinal", 0))
    mean = est.estimate
    se = est.stderr
    return RatioEstimate(mean, se, mean - 1.96 * se, mean + 1.96 * se, cfg.trials, mean)


# ---------------------------------------------------------------------------
# Reports.
# ---------------------------------------------------------------------------

REPORT_COLUMNS = ("algorithm", "family", "n", "m", "d", "k_or_l", "trials", "seed",
                  "mean_ratio", "stderr", "ci_lo", "ci_hi")


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(rows: Sequence[dict], fmt: str, path: str) -> None:
    """CSV (exact 12-column header) or JSON mirror; byte-stable."""
    if fmt not in ("csv", "json"):
        raise InputError("format must be 'csv' or 'json'")
    for row in rows:
        missing = set(REPORT_COLUMNS) - set(row)
        if missing:
            raise InputError(f"report row missing fields {sorted(missing)}")
    if fmt == "csv":
        lines = [",".join(REPORT_COLUMNS)]
        for row in rows:
            lines.append(",".join(_cell(row[c]) for c in REPORT_COLUMNS))
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(
            [{c: row[c] for c in REPORT_COLUMNS} for row in rows],
            indent=2, sort_keys=True,
        ) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)


def rows_from_json(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        rows = json.load(fh)
    if not isinstance(rows, list):
        raise InputError("report JSON must be a list of rows")
    return rows


# ---------------------------------------------------------------------------
# Invariant suite (the CLI `verify` subcommand).
# ---------------------------------------------------------------------------

def verify_invariants(fast: bool = True) -> list[tuple[str, bool, str]]:
    """Self-contained invariant battery; each entry is (name, ok, detail)."""
    from . import schedules
    results: list[tuple[str, bool, str]] = []

    def add(name, ok, detail=""):
        results.append((name, bool(ok), detail))

    kmax = 120 if fast else 500
    worst = 0.0
    for k in range(3, kmax + 1):
        for t in range(k, kmax + 1):
            worst = max(worst, abs(vertex_mod.p_recursive(k, t) - vertex_mod.p_closed(k, t)))
    add("p-recursive-vs-closed", worst <= 1e-12, f"max err {worst:.2e} (k,t <= {kmax})")

    mmax = 1000 if fast else 10000
    err = schedules.alpha_identity_max_error(1, mmax)
    add("alpha-recursive-vs-closed", err <= 1e-12, f"max err {err:.2e} (m <= {mmax})")
    worst = max(schedules.hyper_identity_max_error(d, 1, mmax) for d in range(2, 7))
    add("hyper-alpha-identities", worst <= 1e-12, f"max err {worst:.2e} (d=2..6, m <= {mmax})")

    bad = 0
    for m in range(4, 10**6 if not fast else 10**4, 97):
        if schedules.edge_telescope_coefficient(m) <= 0.25:
            bad += 1
    add("edge-telescope-coefficient", bad == 0, "> 1/4 on sampled horizons")

    bad = []
    for d in range(2, 7):
        for m in range(20, 2001, 91):
            try:
                c = schedules.hyper_coefficient(m, d)
            except InputError:
                continue
            if c < schedules.hyper_limit(d):
                bad.append((m, d))
    add("hyper-coefficient-floor", not bad, f"violations: {bad[:3]}")

    rng = np.random.default_rng(20240817)
    worstgap = np.inf
    for rep in range(4 if fast else 20):
        m = int(rng.integers(2, 7))
        nv = int(rng.integers(3, 7))
        edges = []
        for u in range(nv):
            for v in range(u + 1, nv):
                if rng.random() < 0.7:
                    edges.append((u, v, float(rng.random()) + 1e-3))
        if len(edges) < 2:
            continue
        inst = edge_mod.EdgeInstance(WeightedGraph(nv, edges[:7]))
        gap, _ = edge_mod.availability_floor(inst)
        worstgap = min(worstgap, gap)
    add("edge-availability-floor", worstgap >= -1e-12, f"min(x - alpha) = {worstgap:.2e}")

    r = ordinal_mod.optimal_threshold(1000)
    add("ordinal-ceiling-n1000",
        0.4125 <= r.value <= 0.4175 and 470 <= r.l_star <= 530,
        f"l*={r.l_star}, value={r.value:.6f}")

    g_ok = True
    for rep in range(10):
        pol = ordinal_mod.OrdinalPolicy.from_list(rng.random(30).tolist())
        g = ordinal_mod.gradient(pol)
        h = 1e-6
        for i in (2, 15, 30):
            c = list(pol.c[1:])
            cp = list(c); cp[i - 1] += h
            cm = list(c); cm[i - 1] -= h
            fd = (ordinal_mod.objective(ordinal_mod.OrdinalPolicy.from_list(cp))
                  - ordinal_mod.objective(ordinal_mod.OrdinalPolicy.from_list(cm))) / (2 * h)
            fd *= math.comb(30, 2)
            if abs(fd - g[i]) > 1e-5:
                g_ok = False
    add("ordinal-gradient-fd", g_ok, "spot checks at n=30")

    return results
