"""Experiment protocols: modeling, classification, noise and fault studies.

Every run is a pure function of its configuration: training points, test
points, noise and fault draws all come from explicitly seeded generators, so
repeating a run reproduces it bit for bit.  Reports carry the matching
reference value from the source tables where one exists.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import benchmarks, crossbar, network
from .benchmarks import (
    CLASSIFICATION,
    FAULT,
    NOISE_FVU,
    OUTPUT_RANGE,
    TABLE1,
    TABLE3,
    gen_classification_dataset,
    gen_uniform_samples,
)
from .crossbar import MemristorParams
from .errors import ConstantActual, LengthMismatch, UnknownDatasetId
from .fuzzy import triangular_matrix, universe_from_count
from .network import InputGroup, NetworkConfig, NetworkState, WeightFaults

NOISE_SEED_OFFSET = 500_000
FAULT_SEED_OFFSET = 900_000
CLASS_TEST_SEED_OFFSET = 10_000
DEFAULT_TEST_SEED = 977

REPORT_COLUMNS = [
    "function_or_dataset", "n_train", "n_test", "seed", "p", "alpha", "threshold",
    "nx", "ny", "nz", "n_minterms", "fvu_or_rate", "paper_reference_value",
    "runtime_ms",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run; exactly one of function / dataset is set."""

    function: str | None = None          # g1..g5 for regression studies
    dataset: int | None = None           # 1..4 for classification studies
    n_train: int = 225
    n_test: int = 10_000
    seed: int = 1
    test_seed: int = DEFAULT_TEST_SEED   # fixed by default so runs are comparable
    p: int = 7
    alpha: float = 5e-4
    threshold: float | None = None       # None: table default for the target
    nx: int | None = None
    ny: int | None = None
    nz: int | None = None
    input_hs_scale: float = 10.0         # input half support, in grid resolutions at 225 samples
    input_hs_shrink_exp: float = 0.1     # support shrinks as (225/n_train)^exp
    output_hs_mult: float = 3.0          # output half support, in output resolutions
    noise_variance: float = 0.0
    fault_fraction: float = 0.0
    fault_seed: int | None = None
    backend: str = "ideal"               # "ideal" | "crossbar"
    device: MemristorParams = field(default_factory=MemristorParams)

    def __post_init__(self):
        if (self.function is None) == (self.dataset is None):
            raise ValueError("set exactly one of function / dataset")
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError("need n_train >= 1 and n_test >= 1")
        if self.noise_variance < 0:
            raise ValueError("noise variance must be >= 0")
        if not 0.0 <= self.fault_fraction <= 1.0:
            raise ValueError("fault fraction must lie in [0, 1]")
        if self.backend not in ("ideal", "crossbar"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class ExperimentReport:
    kind: str                            # modeling | classification | noise | fault
    label: str
    n_train: int
    n_test: int
    seed: int
    p: int
    alpha: float
    threshold: float
    nx: int
    ny: int
    nz: int
    n_minterms: int
    fvu_or_rate: float
    paper_reference: float | None = None
    runtime_ms: float | None = None
    backend: str = "ideal"
    n_unactivated: int = 0               # test points predicted as the midpoint
    per_class_counts: tuple | None = None
    n_unclassified: int = 0
    all_faulted: bool = False

    def csv_row(self, with_runtime: bool = False) -> list:
        rt = "" if (self.runtime_ms is None or not with_runtime) else repr(self.runtime_ms)
        ref = "" if self.paper_reference is None else repr(self.paper_reference)
        return [self.label, self.n_train, self.n_test, self.seed, self.p,
                repr(self.alpha), repr(self.threshold), self.nx, self.ny, self.nz,
                self.n_minterms, repr(self.fvu_or_rate), ref, rt]


def fvu(predicted, actual) -> float:
    """Fraction of variance unexplained: sum sq error over sum sq deviation."""
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape or p.ndim != 1 or p.size < 2:
        raise LengthMismatch(f"need two equal-length vectors of >= 2 points, "
                             f"got {p.shape} vs {a.shape}")
    denom = float(((a - a.mean()) ** 2).sum())
    if denom == 0.0:
        raise ConstantActual("reference values are constant; FVU is undefined")
    return float(((a - p) ** 2).sum()) / denom


def input_half_support(cfg: ExperimentConfig, resolution: float) -> float:
    """Default fuzzification width: wide at 225 samples, shrinking gently."""
    return cfg.input_hs_scale * (225.0 / cfg.n_train) ** cfg.input_hs_shrink_exp * resolution


def _network_config(cfg: ExperimentConfig):
    """Resolve universes, supports and threshold for a regression run."""
    ref = TABLE1.get(cfg.function, {})
    nx = cfg.nx if cfg.nx is not None else ref.get("nx", 100)
    ny = cfg.ny if cfg.ny is not None else ref.get("ny", 100)
    nz = cfg.nz if cfg.nz is not None else ref.get("nz", 101)
    threshold = cfg.threshold if cfg.threshold is not None else ref.get("threshold", 0.1)
    lo, hi = OUTPUT_RANGE[cfg.function]
    ux = universe_from_count(0.0, 1.0, nx)
    uy = universe_from_count(0.0, 1.0, ny)
    uz = universe_from_count(lo, hi, nz)
    groups = (
        InputGroup("x", ux, input_half_support(cfg, ux.resolution)),
        InputGroup("y", uy, input_half_support(cfg, uy.resolution)),
    )
    return NetworkConfig(
        groups=groups, output_universe=uz, p=cfg.p, alpha=cfg.alpha,
        novelty_threshold=threshold,
        output_half_support=cfg.output_hs_mult * uz.resolution,
    )


def _training_data(cfg: ExperimentConfig, net_cfg: NetworkConfig):
    """Seeded training points and clipped targets, with optional Gaussian noise."""
    pts = gen_uniform_samples(cfg.n_train, cfg.seed)
    targets = benchmarks.eval_benchmark(cfg.function, pts[:, 0], pts[:, 1])
    if cfg.noise_variance > 0.0:
        nrng = np.random.default_rng(cfg.seed + NOISE_SEED_OFFSET)
        sd = math.sqrt(cfg.noise_variance)
        pts = np.clip(pts + nrng.normal(0.0, sd, pts.shape), 0.0, 1.0)
        targets = targets + nrng.normal(0.0, sd, targets.shape)
    uz = net_cfg.output_universe
    return pts, np.clip(targets, uz.lo, uz.hi)


def _train(cfg: ExperimentConfig, net_cfg: NetworkConfig, pts, targets) -> NetworkState:
    faults = None
    if cfg.fault_fraction > 0.0:
        seed = cfg.fault_seed if cfg.fault_seed is not None else cfg.seed + FAULT_SEED_OFFSET
        faults = WeightFaults.draw(
            seed, [g.universe.count for g in net_cfg.groups],
            net_cfg.output_universe.count, capacity=cfg.n_train,
            fraction=cfg.fault_fraction, out_scale=net_cfg.alpha,
            memristance_ratio=cfg.device.r_off / cfg.device.r_on,
        )
    state = NetworkState(net_cfg, faults=faults)
    mats = [triangular_matrix(g.universe, pts[:, i], g.half_support)
            for i, g in enumerate(net_cfg.groups)]

    def samples():
        for k in range(cfg.n_train):
            yield ([network.MembershipVector(g.universe, mats[i][k])
                    for i, g in enumerate(net_cfg.groups)], targets[k])

    network.train_dataset(state, samples())
    return state


def _evaluate_regression(cfg: ExperimentConfig, net_cfg: NetworkConfig, state: NetworkState):
    """FVU on a fresh test set; unactivated points score as the output midpoint."""
    test = gen_uniform_samples(cfg.n_test, cfg.test_seed)
    actual = benchmarks.eval_benchmark(cfg.function, test[:, 0], test[:, 1])
    mats = [triangular_matrix(g.universe, test[:, i], g.half_support)
            for i, g in enumerate(net_cfg.groups)]
    if cfg.backend == "crossbar":
        cb1, cb2, mapping = _map_with_faults(cfg, state)
        pred, activated = crossbar.crossbar_infer_crisp_batch(cb1, cb2, mapping, mats)
    else:
        pred, activated = network.infer_crisp_batch(state, mats)
    uz = net_cfg.output_universe
    pred = np.where(activated, pred, (uz.lo + uz.hi) / 2.0)
    return fvu(pred, actual), int((~activated).sum())


def _map_with_faults(cfg: ExperimentConfig, state: NetworkState):
    """Program the trained state onto crossbars, carrying over any fault plan."""
    params = cfg.device
    n_v = state.n_minterms
    counts = [g.universe.count for g in state.config.groups]
    cb1 = crossbar.Crossbar(n_v, sum(counts), params)
    cb2 = crossbar.Crossbar(state.config.output_universe.count, n_v, params)
    if state.faults is not None:
        w_span = cb1.r_f / params.r_on - cb1.r_f / params.r_off
        start = 0
        in_mask = np.zeros((n_v, sum(counts)), dtype=bool)
        in_stuck = np.zeros((n_v, sum(counts)))
        for g, n in enumerate(counts):
            in_mask[:, start:start + n] = state.faults.in_masks[g][:n_v]
            in_stuck[:, start:start + n] = state.faults.in_stuck[g][:n_v]
            start += n
        cb1.fault_mask = in_mask
        cb1.x = np.where(in_mask, crossbar._x_for_weight(in_stuck * w_span, params, cb1.r_f), 0.0)
        out_mask = state.faults.out_mask[:, :n_v]
        out_stuck = state.faults.out_stuck[:, :n_v]
        w_max = float(state.w_out.max())
        s_out = w_span / w_max if w_max > 0 else 1.0
        cb2.fault_mask = out_mask.copy()
        cb2.x = np.where(out_mask,
                         crossbar._x_for_weight(np.minimum(out_stuck * s_out, w_span), params, cb2.r_f),
                         0.0)
    cb1, cb2, mapping = crossbar.map_network(state, params, cb1=cb1, cb2=cb2)
    return cb1, cb2, mapping


def run_modeling(cfg: ExperimentConfig) -> ExperimentReport:
    """Single-pass training on one benchmark function, scored by FVU."""
    t0 = time.perf_counter()
    net_cfg = _network_config(cfg)
    pts, targets = _training_data(cfg, net_cfg)
    state = _train(cfg, net_cfg, pts, targets)
    score, n_dead = _evaluate_regression(cfg, net_cfg, state)
    kind = "modeling"
    ref = TABLE1[cfg.function]["fvu"] if cfg.n_train == 225 else \
        TABLE3.get(cfg.function, {}).get(cfg.n_train, (None,))[0]
    if cfg.noise_variance > 0.0:
        kind, ref = "noise", NOISE_FVU.get(cfg.function)
    if cfg.fault_fraction > 0.0:
        kind, ref = "fault", FAULT.get(cfg.function, {}).get("fvu")
    return ExperimentReport(
        kind=kind, label=cfg.function, n_train=cfg.n_train, n_test=cfg.n_test,
        seed=cfg.seed, p=cfg.p, alpha=cfg.alpha,
        threshold=net_cfg.novelty_threshold,
        nx=net_cfg.groups[0].universe.count, ny=net_cfg.groups[1].universe.count,
        nz=net_cfg.output_universe.count, n_minterms=state.n_minterms,
        fvu_or_rate=score, paper_reference=ref,
        runtime_ms=(time.perf_counter() - t0) * 1e3, backend=cfg.backend,
        n_unactivated=n_dead,
        all_faulted=(cfg.fault_fraction >= 1.0),
    )


def run_noise(cfg: ExperimentConfig) -> ExperimentReport:
    """Modeling run with noisy training data (clean test set)."""
    return run_modeling(cfg)


def run_fault(cfg: ExperimentConfig) -> ExperimentReport:
    """Modeling run with a fraction of weight cells stuck at random values.

    Faults are drawn over the full provisioned capacity before training and
    excluded from every write; with fraction 1.0 the run still completes and
    the report flags the all-faulted condition.
    """
    return run_modeling(cfg)


def run_classification(cfg: ExperimentConfig) -> ExperimentReport:
    """Two-class study: one output neuron per class, singleton targets."""
    if cfg.dataset not in CLASSIFICATION:
        raise UnknownDatasetId(f"classification dataset id must be 1..4, got {cfg.dataset}")
    t0 = time.perf_counter()
    ref = CLASSIFICATION[cfg.dataset]
    nx = cfg.nx if cfg.nx is not None else ref["nx"]
    ny = cfg.ny if cfg.ny is not None else ref["ny"]
    threshold = cfg.threshold if cfg.threshold is not None else 0.35
    ux = universe_from_count(0.0, 1.0, nx)
    uy = universe_from_count(0.0, 1.0, ny)
    uz = universe_from_count(0.0, 1.0, 2)
    net_cfg = NetworkConfig(
        groups=(InputGroup("x", ux, input_half_support(cfg, ux.resolution)),
                InputGroup("y", uy, input_half_support(cfg, uy.resolution))),
        output_universe=uz, p=cfg.p, alpha=cfg.alpha, novelty_threshold=threshold,
        output_half_support=0.0,
    )
    pts, labels = gen_classification_dataset(cfg.dataset, cfg.n_train, cfg.seed)
    state = _train(cfg, net_cfg, pts, labels.astype(np.float64))
    test_pts, test_labels = gen_classification_dataset(
        cfg.dataset, cfg.n_test, cfg.seed + CLASS_TEST_SEED_OFFSET)
    mats = [triangular_matrix(g.universe, test_pts[:, i], g.half_support)
            for i, g in enumerate(net_cfg.groups)]
    predicted = network.classify_batch(state, mats)
    correct = predicted == test_labels
    rate = 100.0 * float(correct.mean())
    counts = tuple(int((test_labels == c).sum()) for c in (0, 1))
    return ExperimentReport(
        kind="classification", label=f"set{cfg.dataset}", n_train=cfg.n_train,
        n_test=cfg.n_test, seed=cfg.seed, p=cfg.p, alpha=cfg.alpha,
        threshold=threshold, nx=nx, ny=ny, nz=2, n_minterms=state.n_minterms,
        fvu_or_rate=rate, paper_reference=ref["rate"],
        runtime_ms=(time.perf_counter() - t0) * 1e3, backend=cfg.backend,
        per_class_counts=counts, n_unclassified=int((predicted == -1).sum()),
    )


# --- suite definitions --------------------------------------------------------


def paper_modeling_config(fn: str, **overrides) -> ExperimentConfig:
    """Table-pinned configuration for one benchmark function."""
    if fn not in TABLE1:
        raise UnknownDatasetId(f"unknown benchmark function {fn!r}")
    return ExperimentConfig(function=fn, **overrides)


def paper_classification_config(ds: int, **overrides) -> ExperimentConfig:
    if ds not in CLASSIFICATION:
        raise UnknownDatasetId(f"classification dataset id must be 1..4, got {ds}")
    overrides.setdefault("n_train", CLASSIFICATION[ds]["n_train"])
    overrides.setdefault("n_test", 2000)
    return ExperimentConfig(dataset=ds, **overrides)


def suite_jobs(seed: int = 1, backend: str = "ideal") -> dict:
    """All table reproductions keyed by table name, in fixed row order."""
    common = {"seed": seed, "backend": backend}
    jobs = {
        "table1": [("modeling", paper_modeling_config(fn, **common))
                   for fn in ("g1", "g2", "g3", "g4", "g5")],
        "table3": [("modeling", paper_modeling_config(fn, n_train=700, **common))
                   for fn in ("g1", "g3", "g5")],
        "classification": [("classification", paper_classification_config(ds, **common))
                           for ds in (1, 2, 3, 4)],
        "noise": [("noise", paper_modeling_config(fn, noise_variance=0.01, **common))
                  for fn in ("g1", "g2", "g3", "g4", "g5")],
        "fault": [("fault", paper_modeling_config(fn, fault_fraction=0.2, **common))
                  for fn in ("g1", "g2", "g3", "g4", "g5")],
    }
    return jobs


def run_job(kind: str, cfg: ExperimentConfig) -> ExperimentReport:
    if kind == "classification":
        return run_classification(cfg)
    return run_modeling(cfg)


def surface_grid(cfg: ExperimentConfig, state: NetworkState, n_side: int = 101):
    """(x, y, predicted, actual) rows over a regular grid, for plot emission."""
    net_cfg = state.config
    axis = np.linspace(0.0, 1.0, n_side)
    xx, yy = np.meshgrid(axis, axis)
    flat = np.stack([xx.ravel(), yy.ravel()], axis=1)
    actual = benchmarks.eval_benchmark(cfg.function, flat[:, 0], flat[:, 1])
    mats = [triangular_matrix(g.universe, flat[:, i], g.half_support)
            for i, g in enumerate(net_cfg.groups)]
    pred, activated = network.infer_crisp_batch(state, mats)
    uz = net_cfg.output_universe
    pred = np.where(activated, pred, (uz.lo + uz.hi) / 2.0)
    return np.stack([flat[:, 0], flat[:, 1], pred, actual], axis=1)


def rebuild_trained_state(cfg: ExperimentConfig) -> NetworkState:
    """Train and return the network for a regression config (no evaluation)."""
    net_cfg = _network_config(cfg)
    pts, targets = _training_data(cfg, net_cfg)
    return _train(cfg, net_cfg, pts, targets)
