"""The online active-learning loop with pluggable sampling agents.

Per arriving document the configured agent picks or discards; picks are
labeled by the (possibly error-prone) simulated annotator and appended to
the training set. Every update_freq picks the classifier is refit from
scratch and both machine f1 (held-out test set) and human f1 (all picks so
far) are recorded. Seeded runs are fully independent and may execute in
parallel (capped by the ORIS_THREADS environment variable).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .corpus import LabelSpace, shuffle_stream
from .dqn import decide
from .encoder import LastSeenTracker, encode_state
from .learner import f1_macro, fit, human_f1, predict, predict_proba
from .oracle import DecayModel, OracleState
from .reward import DISCARD, PICK, PickMemory, RewardConfig

AGENT_KINDS = ("random", "uncertainty", "diversity", "oris")

CSV_HEADER = ["run_id", "budget_exhausted", "machine_f1_macro", "human_f1_macro",
              "picks", "oracle_errors"]


@dataclass
class HarnessConfig:
    labels: LabelSpace
    agent: str = "random"
    budget: int = 500
    update_freq: int = 25
    seeds: tuple = (1, 2, 3, 4, 5)
    oracle: DecayModel = field(default_factory=DecayModel)
    reward: RewardConfig = field(default_factory=RewardConfig)
    k: int = 3
    dt_scale: float = 1.0
    pick_prob: float | None = None  # None -> budget / stream length
    theta0: float = 0.5
    diversity_cap: int = 5000
    learner_epochs: int = 50
    learner_batch: int = 32
    learner_lr: float = 0.1

    def __post_init__(self):
        if self.agent not in AGENT_KINDS:
            raise ValueError(f"unknown agent {self.agent!r}, expected one of {AGENT_KINDS}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if not 0 < self.update_freq <= self.budget:
            raise ValueError(
                f"update frequency must be in (0, budget]; got f={self.update_freq}, B={self.budget}"
            )
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.pick_prob is not None and not 0.0 <= self.pick_prob <= 1.0:
            raise ValueError(f"pick_prob must be in [0, 1], got {self.pick_prob}")
        if not 0.0 < self.theta0 <= 1.0:
            raise ValueError(f"theta0 must be in (0, 1], got {self.theta0}")
        if self.diversity_cap < 1:
            raise ValueError("diversity_cap must be >= 1")


@dataclass
class RecordRow:
    run_id: int
    budget_exhausted: int
    machine_f1_macro: float
    human_f1_macro: float
    picks: int
    oracle_errors: int


@dataclass
class ExperimentRecord:
    rows: list[RecordRow]
    partial_runs: list[int]  # run ids whose stream ended before the budget


def random_decide(rng, pick_prob: float) -> int:
    """Bernoulli(pick_prob) pick."""
    if not 0.0 <= pick_prob <= 1.0:
        raise ValueError(f"pick probability must be in [0, 1], got {pick_prob}")
    return PICK if rng.random() < pick_prob else DISCARD


def uncertainty_decide(clf, emb, b: int, budget: int, theta0: float) -> int:
    """Pick when the classifier's normalized prediction entropy reaches a
    threshold that decays linearly from theta0 to 0 as the budget is spent.
    Before the first fit, always pick.
    """
    if clf is None:
        return PICK
    probs = predict_proba(clf, emb)
    nonzero = probs[probs > 0]
    entropy = float(-(nonzero * np.log2(nonzero)).sum()) / math.log2(len(probs))
    return PICK if entropy >= theta0 * (1.0 - b / budget) else DISCARD


def diversity_select(docs, budget: int, linkage_method: str = "average",
                     cap: int = 5000) -> list[int]:
    """Offline selection: average-linkage agglomerative clustering of the
    embeddings into `budget` clusters, keeping the document nearest each
    cluster mean (ties broken toward the lowest id). Deterministic.

    Corpora larger than `cap` are thinned to evenly spaced positions first.
    """
    if len(docs) < budget:
        raise ValueError(f"need at least {budget} documents, got {len(docs)}")
    pool = docs
    if cap and len(docs) > cap:
        keep = np.unique(np.linspace(0, len(docs) - 1, cap).round().astype(int))
        pool = [docs[i] for i in keep]
    X = np.stack([d.embedding for d in pool])
    assignment = fcluster(linkage(X, method=linkage_method, metric="euclidean"),
                          t=budget, criterion="maxclust")
    ids = np.array([d.id for d in pool])
    selected = []
    for cluster in np.unique(assignment):
        members = np.where(assignment == cluster)[0]
        center = X[members].mean(axis=0)
        dists = np.linalg.norm(X[members] - center, axis=1)
        order = np.lexsort((ids[members], dists))
        selected.append(int(ids[members][order[0]]))
    return sorted(selected)


@dataclass
class _RunResult:
    run_id: int
    rows: list[RecordRow]
    completed: bool


def _single_run(train_docs, test_docs, cfg: HarnessConfig, net, diversity_ids,
                run_id: int, seed) -> _RunResult:
    labels = cfg.labels
    num_classes = len(labels)
    oracle_ss, agent_ss, fit_ss = np.random.SeedSequence(seed).spawn(3)
    oracle_state = OracleState(cfg.oracle, labels, seed=oracle_ss)
    tracker = LastSeenTracker(num_classes, cfg.k)
    memory = PickMemory(cfg.reward.m, num_classes)
    agent_rng = np.random.default_rng(agent_ss)
    fit_rng = np.random.default_rng(fit_ss)
    pick_prob = cfg.pick_prob
    if pick_prob is None:
        pick_prob = min(1.0, cfg.budget / len(train_docs))

    test_X = np.stack([d.embedding for d in test_docs])
    test_y = np.array([d.true_class for d in test_docs])

    training_set = []
    picked_true: list[int] = []
    picked_emitted: list[int] = []
    clf = None
    b = 0
    errors = 0
    rows: list[RecordRow] = []

    for doc in shuffle_stream(train_docs, seed):
        if cfg.agent == "random":
            action = random_decide(agent_rng, pick_prob)
        elif cfg.agent == "uncertainty":
            action = uncertainty_decide(clf, doc.embedding, b, cfg.budget, cfg.theta0)
        elif cfg.agent == "diversity":
            action = PICK if doc.id in diversity_ids else DISCARD
        else:
            action = decide(net, encode_state(doc.embedding, tracker, cfg.dt_scale))
        if action == PICK:
            emitted = oracle_state.annotate(doc)
            b += 1
            if emitted != doc.true_class:
                errors += 1
            training_set.append((doc.embedding, emitted))
            picked_true.append(doc.true_class)
            picked_emitted.append(emitted)
            memory.push(emitted)
            tracker.record_emission(emitted)
            if b % cfg.update_freq == 0:
                clf = fit(training_set, labels, seed=int(fit_rng.integers(2 ** 31)),
                          epochs=cfg.learner_epochs, batch_size=cfg.learner_batch,
                          lr=cfg.learner_lr)
                machine = f1_macro(test_y, predict(clf, test_X), labels)
                human = human_f1(picked_true, picked_emitted, labels)
                rows.append(RecordRow(run_id, b, machine, human, b, errors))
        oracle_state.advance_step()
        tracker.advance_step()
        if b >= cfg.budget:
            break
    return _RunResult(run_id=run_id, rows=rows, completed=b >= cfg.budget)


def run_experiment(train_docs, test_docs, cfg: HarnessConfig, net=None) -> ExperimentRecord:
    """Run one seeded experiment per cfg.seeds entry and merge the records.

    The test set must be disjoint from the stream. Runs whose stream ends
    before the budget is exhausted are flagged in partial_runs.
    """
    if not train_docs:
        raise ValueError("empty training stream")
    if not test_docs:
        raise ValueError("empty test set")
    if cfg.agent == "oris" and net is None:
        raise ValueError("the oris agent requires a trained network")
    train_ids = {d.id for d in train_docs}
    if any(d.id in train_ids for d in test_docs):
        raise ValueError("test set overlaps the training stream")

    diversity_ids = frozenset(
        diversity_select(train_docs, cfg.budget, cap=cfg.diversity_cap)
    ) if cfg.agent == "diversity" else frozenset()

    jobs = list(enumerate(cfg.seeds))
    workers = max(1, int(os.environ.get("ORIS_THREADS", "1")))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda job: _single_run(train_docs, test_docs, cfg, net, diversity_ids, *job),
                jobs,
            ))
    else:
        results = [
            _single_run(train_docs, test_docs, cfg, net, diversity_ids, run_id, seed)
            for run_id, seed in jobs
        ]
    rows = [row for res in results for row in res.rows]
    partial = [res.run_id for res in results if not res.completed]
    return ExperimentRecord(rows=rows, partial_runs=partial)


def write_record(record: ExperimentRecord, path) -> None:
    """Deterministic CSV: sorted by (run_id, budget_exhausted), floats at 6 decimals."""
    rows = sorted(record.rows, key=lambda r: (r.run_id, r.budget_exhausted))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([
                r.run_id,
                r.budget_exhausted,
                f"{r.machine_f1_macro:.6f}",
                f"{r.human_f1_macro:.6f}",
                r.picks,
                r.oracle_errors,
            ])


def read_record(path) -> ExperimentRecord:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for rec in reader:
            rows.append(RecordRow(
                run_id=int(rec[0]),
                budget_exhausted=int(rec[1]),
                machine_f1_macro=float(rec[2]),
                human_f1_macro=float(rec[3]),
                picks=int(rec[4]),
                oracle_errors=int(rec[5]),
            ))
    return ExperimentRecord(rows=rows, partial_runs=[])


AGGREGATE_HEADER = ["budget_exhausted", "n_runs",
                    "machine_f1_macro_mean", "machine_f1_macro_std",
                    "human_f1_macro_mean", "human_f1_macro_std"]


def aggregate_records(records) -> list[dict]:
    """Mean and (population) standard deviation per evaluation interval,
    pooled over every row of every record."""
    by_interval: dict[int, list[RecordRow]] = {}
    for record in records:
        for row in record.rows:
            by_interval.setdefault(row.budget_exhausted, []).append(row)
    out = []
    for b in sorted(by_interval):
        machine = np.array([r.machine_f1_macro for r in by_interval[b]])
        human = np.array([r.human_f1_macro for r in by_interval[b]])
        out.append({
            "budget_exhausted": b,
            "n_runs": len(by_interval[b]),
            "machine_f1_macro_mean": float(machine.mean()),
            "machine_f1_macro_std": float(machine.std()),
            "human_f1_macro_mean": float(human.mean()),
            "human_f1_macro_std": float(human.std()),
        })
    return out


def write_aggregate(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_HEADER)
        for r in rows:
            writer.writerow([
                r["budget_exhausted"],
                r["n_runs"],
                f"{r['machine_f1_macro_mean']:.6f}",
                f"{r['machine_f1_macro_std']:.6f}",
                f"{r['human_f1_macro_mean']:.6f}",
                f"{r['human_f1_macro_std']:.6f}",
            ])
