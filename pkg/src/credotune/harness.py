"""Experiment orchestration for credo-shaped multi-agent learning.

Two learners per agent run at different time scales. The behavioral
Q-learner acts every step and learns from its credo-based reward; the credo
policy (in ``tuning`` mode) moves the agent's credo one lattice step at each
batch boundary, rewarded by the mean per-episode reward of the batch.

Every random stream is derived from ``(master_seed, labels)`` so a trial is a
pure function of its config and index.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import io
import random
import zipfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from credotune.config import ExperimentConfig, config_to_dict
from credotune.credo_core import CredoVector, TeamStructure, redistribution_matrix
from credotune.credo_policy import CredoLatticePoint, CredoPolicy, apply_move
from credotune.envs import make_env
from credotune.learners import QLearner
from credotune.metrics import RoleCensus, classify_roles, confidence_interval, inverse_gini

log = logging.getLogger(__name__)

TIMESERIES_HEADER = ["trial", "batch", "mean_pop_reward", "equality", "agent_id", "apples", "cleans", "psi", "phi", "omega"]


def derive_seed(master_seed: int, labels: Sequence) -> int:
    """Stable 64-bit seed for the named stream ``labels`` under ``master_seed``.

    BLAKE2b over the JSON encoding of ``[master_seed, *labels]``, so the value
    is identical across machines and Python versions.
    """
    if not labels:
        raise ValueError("derive_seed needs at least one label")
    payload = json.dumps([int(master_seed), *labels], separators=(",", ":")).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def stream_labels(trial: int, num_agents: int) -> list[tuple]:
    labels = [("trial", trial, "env")]
    for i in range(num_agents):
        labels.append(("trial", trial, "agent", i, "behavior"))
        labels.append(("trial", trial, "agent", i, "credo"))
    return labels


@dataclass
class TrialRecord:
    trial: int
    seed: int
    mean_pop_reward: list[float] = field(default_factory=list)
    equality: list[float] = field(default_factory=list)
    apples: list[list[int]] = field(default_factory=list)
    cleans: list[list[int]] = field(default_factory=list)
    credos: list[list[tuple[float, float, float]]] = field(default_factory=list)
    max_conservation_error: float = 0.0
    behavior_q: np.ndarray | None = None
    credo_q: np.ndarray | None = None

    @property
    def num_batches(self) -> int:
        return len(self.mean_pop_reward)

    def tail(self) -> slice:
        """Final quartile of batches (at least one)."""
        return slice(self.num_batches - max(1, self.num_batches // 4), self.num_batches)

    def final_reward(self) -> float:
        return float(np.mean(self.mean_pop_reward[self.tail()]))

    def final_equality(self) -> float:
        return float(np.mean(self.equality[self.tail()]))

    def role_census(self, dominance_ratio: float = 3.0) -> RoleCensus:
        tail = self.tail()
        apples = np.sum(self.apples[tail], axis=0)
        cleans = np.sum(self.cleans[tail], axis=0)
        return classify_roles(apples.tolist(), cleans.tolist(), dominance_ratio)


def run_trial(config: ExperimentConfig, trial_index: int, checkpoint_dir: Path | None = None) -> TrialRecord:
    n = config.num_agents
    structure = TeamStructure.consecutive(n, config.team_size)
    env = make_env(config.env, n)
    desc = env.descriptor
    master = config.master_seed
    env_stream = random.Random(derive_seed(master, ("trial", trial_index, "env")))
    learners = [
        QLearner(
            desc.observation_space_size,
            desc.num_actions,
            config.learner,
            random.Random(derive_seed(master, ("trial", trial_index, "agent", i, "behavior"))),
        )
        for i in range(n)
    ]
    tuning = config.credo_mode == "tuning"
    res = config.credo_policy.resolution
    policies = [
        CredoPolicy(config.credo_policy, random.Random(derive_seed(master, ("trial", trial_index, "agent", i, "credo"))))
        for i in range(n)
    ] if tuning else []
    credos = [CredoVector.of(c) for c in config.credo_list()]
    points = [CredoLatticePoint.from_credo(c, res) for c in credos] if tuning else []
    pending: list[tuple | None] = [None] * n

    record = TrialRecord(trial=trial_index, seed=derive_seed(master, ("trial", trial_index)))
    E = config.episodes_per_batch

    for batch in range(config.total_batches):
        mix = redistribution_matrix(structure, credos).tolist()
        env.set_credos([c.as_tuple() for c in credos])
        env_tot = [0.0] * n
        credo_tot = [0.0] * n
        apples = [0] * n
        cleans = [0] * n
        for _ in range(E):
            obs = env.reset(env_stream.getrandbits(64))
            done = False
            while not done:
                actions = [learners[i].select_action(obs[i]) for i in range(n)]
                step = env.step(actions)
                rewards = step.rewards
                done = step.done
                flags = step.river_cleans
                if any(rewards):
                    shaped = [sum(m * r for m, r in zip(row, rewards)) for row in mix]
                    for i in range(n):
                        env_tot[i] += rewards[i]
                        credo_tot[i] += shaped[i]
                        if flags is not None and rewards[i] > 0:
                            apples[i] += 1
                else:
                    shaped = rewards
                if flags is not None and any(flags):
                    for i in range(n):
                        cleans[i] += flags[i]
                nxt = step.observations
                for i in range(n):
                    learners[i].learn(obs[i], actions[i], shaped[i], nxt[i], done)
                obs = nxt

        record.max_conservation_error = max(record.max_conservation_error, abs(sum(credo_tot) - sum(env_tot)))
        record.mean_pop_reward.append(sum(env_tot) / (n * E))
        record.equality.append(inverse_gini(credo_tot))
        record.apples.append(apples)
        record.cleans.append(cleans)
        record.credos.append([c.as_tuple() for c in credos])

        if tuning:
            source = credo_tot if config.credo_policy.batch_reward_source == "credo" else env_tot
            last = batch == config.total_batches - 1
            for i in range(n):
                batch_reward = source[i] / E
                if pending[i] is not None:
                    prev, move = pending[i]
                    policies[i].update(prev, move, batch_reward, points[i])
                if last:
                    continue
                move = policies[i].select(points[i])
                pending[i] = (points[i], move)
                points[i] = apply_move(points[i], move)
            credos = [p.credo() for p in points]

        if checkpoint_dir is not None and config.checkpoint_every and (batch + 1) % config.checkpoint_every == 0:
            _save_checkpoint(checkpoint_dir / f"trial_{trial_index}_batch_{batch + 1}.npz", learners, policies)
        log.debug("trial %d batch %d reward %.3f", trial_index, batch, record.mean_pop_reward[-1])

    record.behavior_q = np.stack([l.q_table() for l in learners])
    record.credo_q = np.stack([p.q for p in policies]) if tuning else np.zeros((0, 0, 0))
    return record


def _save_checkpoint(path: Path, learners, policies) -> None:
    _write_npz(path, {
        "behavior_q": np.stack([l.q_table() for l in learners]),
        "credo_q": np.stack([p.q for p in policies]) if policies else np.zeros((0, 0, 0)),
    })


def _write_npz(path: Path, arrays: dict[str, np.ndarray]) -> None:
    """``np.savez_compressed`` equivalent with fixed zip timestamps, so reruns are byte-identical."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for name, arr in arrays.items():
            buf = io.BytesIO()
            np.save(buf, arr)
            info = zipfile.ZipInfo(f"{name}.npy", date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, buf.getvalue())


def _run_trial_job(args) -> TrialRecord:
    config, k, checkpoint_dir = args
    return run_trial(config, k, checkpoint_dir)


def summarize(config: ExperimentConfig, records: list[TrialRecord]) -> dict:
    """Across-trial aggregates: per-batch mean and 95% half-width, final-quartile stats, role census."""
    rewards = np.array([r.mean_pop_reward for r in records])
    equality = np.array([r.equality for r in records])

    def per_batch(a: np.ndarray) -> dict:
        pairs = [confidence_interval(a[:, b]) for b in range(a.shape[1])]
        return {"mean": [m for m, _ in pairs], "ci95": [h for _, h in pairs]}

    finals = [r.final_reward() for r in records]
    final_eq = [r.final_equality() for r in records]
    reward_mean, reward_hw = confidence_interval(finals)
    eq_mean, eq_hw = confidence_interval(final_eq)
    return {
        "config": config_to_dict(config),
        "seeds": {str(r.trial): r.seed for r in records},
        "aggregate": {"mean_pop_reward": per_batch(rewards), "equality": per_batch(equality)},
        "final": {
            "reward_median": float(np.median(finals)),
            "reward_mean": reward_mean,
            "reward_ci95": reward_hw,
            "equality_median": float(np.median(final_eq)),
            "equality_mean": eq_mean,
            "equality_ci95": eq_hw,
        },
        "trials": [
            {
                "trial": r.trial,
                "seed": r.seed,
                "final_reward": r.final_reward(),
                "final_equality": r.final_equality(),
                "max_conservation_error": r.max_conservation_error,
                "final_credos": [list(c) for c in r.credos[-1]],
                "role_census": r.role_census().to_dict(),
            }
            for r in records
        ],
    }


def run_experiment(
    config: ExperimentConfig, jobs: int = 1, checkpoint_dir: Path | None = None
) -> tuple[list[TrialRecord], dict]:
    work = [(config, k, checkpoint_dir) for k in range(config.trials)]
    if jobs > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, config.trials)) as pool:
            records = list(pool.map(_run_trial_job, work))
    else:
        records = [_run_trial_job(w) for w in work]
    return records, summarize(config, records)


def write_timeseries(path: Path, records: list[TrialRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_HEADER)
        for r in records:
            for b in range(r.num_batches):
                for i, credo in enumerate(r.credos[b]):
                    w.writerow([
                        r.trial, b, repr(r.mean_pop_reward[b]), repr(r.equality[b]), i,
                        r.apples[b][i], r.cleans[b][i], *(repr(float(x)) for x in credo),
                    ])


def write_outputs(out_dir: Path, records: list[TrialRecord], summary: dict) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_timeseries(out_dir / "timeseries.csv", records)
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for r in records:
        _write_npz(out_dir / "checkpoints" / f"trial_{r.trial}.npz", {"behavior_q": r.behavior_q, "credo_q": r.credo_q})


def load_checkpoint(path: Path) -> dict[str, np.ndarray]:
    with np.load(path) as data:
        return {k: data[k] for k in data.files}


def final_quartile_reward(series: Sequence[float]) -> float:
    k = max(1, len(series) // 4)
    return float(np.mean(series[-k:]))



__all__ = [
    "TIMESERIES_HEADER",
    "TrialRecord",
    "derive_seed",
    "load_checkpoint",
    "run_experiment",
    "run_trial",
    "stream_labels",
    "summarize",
    "write_outputs",
    "write_timeseries",
]
