"""Flat dotted-key configuration files and the fully-defaulted experiment config.

Format: one `section.key = value` per line; `#` starts a comment. Lists are
comma-separated. Every key is optional — an empty file yields the default
experiment — and unknown keys are rejected with every problem reported at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .corpus import LabelSpace
from .dqn import AgentConfig
from .harness import AGENT_KINDS, HarnessConfig
from .oracle import DECAY_KINDS, DecayModel
from .reward import RewardConfig


class ConfigError(ValueError):
    """Carries every validation problem found in one parse."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


def _parse_int(raw):
    return int(raw)


def _parse_float(raw):
    return float(raw)


def _parse_str(raw):
    return raw


def _parse_str_list(raw):
    items = [part.strip() for part in raw.split(",") if part.strip()]
    if not items:
        raise ValueError("empty list")
    return items


def _parse_int_list(raw):
    return [int(part) for part in _parse_str_list(raw)]


def _parse_float_or_auto(raw):
    if raw.lower() == "auto":
        return None
    return float(raw)


def _parse_int_or_auto(raw):
    if raw.lower() == "auto":
        return None
    return int(raw)


def _parse_choice(options):
    def parse(raw):
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return raw
    return parse


# key -> (parser, default)
_SCHEMA = {
    "data.train": (_parse_str, None),
    "data.test": (_parse_str, None),
    "data.rl_train": (_parse_str, None),
    "data.vectors": (_parse_str, None),
    "data.classes": (_parse_str_list, ["c0", "c1", "c2", "c3", "c4"]),
    "seeds": (_parse_int_list, [1, 2, 3, 4, 5]),
    "oracle.kind": (_parse_choice(DECAY_KINDS), "sigmoid"),
    "oracle.alpha": (_parse_float, 0.3),
    "oracle.beta": (_parse_float, 9.0),
    "encoder.k": (_parse_int, 3),
    "encoder.dt_scale": (_parse_float, 1.0),
    "reward.rho": (_parse_float, 5.0),
    "reward.delta": (_parse_float, 8.0),
    "reward.lambda": (_parse_float, 0.01),
    "reward.m": (_parse_int, 10),
    "agent.gamma": (_parse_float, 0.99),
    "agent.tau": (_parse_float, 0.005),
    "agent.minibatch": (_parse_int, 512),
    "agent.budget": (_parse_int, 500),
    "agent.episodes": (_parse_int, 10000),
    "agent.replay_capacity": (_parse_int, 50000),
    "agent.warmup": (_parse_int_or_auto, None),
    "agent.lr": (_parse_float, 1e-4),
    "agent.eps_start": (_parse_float, 0.9),
    "agent.eps_end": (_parse_float, 0.05),
    "agent.eps_decay": (_parse_float, 5e-4),
    "agent.hidden": (_parse_int_list, [256, 256]),
    "harness.agent": (_parse_choice(AGENT_KINDS), "random"),
    "harness.budget": (_parse_int, 500),
    "harness.update_freq": (_parse_int, 25),
    "harness.runs": (_parse_int, 5),
    "harness.pick_prob": (_parse_float_or_auto, None),
    "harness.theta0": (_parse_float, 0.5),
    "harness.diversity_cap": (_parse_int, 5000),
    "learner.epochs": (_parse_int, 50),
    "learner.batch": (_parse_int, 32),
    "learner.lr": (_parse_float, 0.1),
    "synth.train_per_class": (_parse_int_list, []),
    "synth.test_per_class": (_parse_int_list, []),
    "synth.rl_per_class": (_parse_int_list, []),
    "synth.dim": (_parse_int, 8),
    "synth.sep": (_parse_float, 5.0),
    "synth.seed": (_parse_int, 7),
}


@dataclass
class ExperimentConfig:
    """Validated union of every module's settings plus data paths and seeds."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def seeds(self):
        return list(self.values["seeds"])

    @property
    def classes(self):
        return list(self.values["data.classes"])

    def label_space(self) -> LabelSpace:
        return LabelSpace(self.classes)

    def decay_model(self) -> DecayModel:
        return DecayModel(kind=self.values["oracle.kind"],
                          alpha=self.values["oracle.alpha"],
                          beta=self.values["oracle.beta"])

    def reward_config(self) -> RewardConfig:
        return RewardConfig(rho=self.values["reward.rho"],
                            delta=self.values["reward.delta"],
                            lam=self.values["reward.lambda"],
                            m=self.values["reward.m"])

    def agent_config(self) -> AgentConfig:
        return AgentConfig(
            gamma=self.values["agent.gamma"],
            tau=self.values["agent.tau"],
            minibatch=self.values["agent.minibatch"],
            budget=self.values["agent.budget"],
            episodes=self.values["agent.episodes"],
            replay_capacity=self.values["agent.replay_capacity"],
            warmup=self.values["agent.warmup"],
            lr=self.values["agent.lr"],
            eps_start=self.values["agent.eps_start"],
            eps_end=self.values["agent.eps_end"],
            eps_decay=self.values["agent.eps_decay"],
            hidden=tuple(self.values["agent.hidden"]),
        )

    def harness_config(self, agent: str | None = None) -> HarnessConfig:
        return HarnessConfig(
            labels=self.label_space(),
            agent=agent if agent is not None else self.values["harness.agent"],
            budget=self.values["harness.budget"],
            update_freq=self.values["harness.update_freq"],
            seeds=tuple(self.seeds),
            oracle=self.decay_model(),
            reward=self.reward_config(),
            k=self.values["encoder.k"],
            dt_scale=self.values["encoder.dt_scale"],
            pick_prob=self.values["harness.pick_prob"],
            theta0=self.values["harness.theta0"],
            diversity_cap=self.values["harness.diversity_cap"],
            learner_epochs=self.values["learner.epochs"],
            learner_batch=self.values["learner.batch"],
            learner_lr=self.values["learner.lr"],
        )


def _read_pairs(path):
    pairs = []
    problems = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                problems.append(f"line {lineno}: expected 'key = value', got {body!r}")
                continue
            key, raw = body.split("=", 1)
            pairs.append((lineno, key.strip(), raw.strip()))
    return pairs, problems


def parse_config(path) -> ExperimentConfig:
    """Parse and validate a config file; every invalid key/value is listed
    in the raised ConfigError. Missing keys take their defaults.
    """
    pairs, problems = _read_pairs(path)
    values = {key: default for key, (_, default) in _SCHEMA.items()}
    explicit = set()
    for lineno, key, raw in pairs:
        if key not in _SCHEMA:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in explicit:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        parser, _ = _SCHEMA[key]
        try:
            values[key] = parser(raw)
        except ValueError as exc:
            reason = str(exc) or "unparseable value"
            problems.append(f"line {lineno}: bad value for {key}: {raw!r} ({reason})")
            continue
        explicit.add(key)

    # Reconcile run count and seed list.
    if "seeds" in explicit and "harness.runs" not in explicit:
        values["harness.runs"] = len(values["seeds"])
    elif "harness.runs" in explicit and "seeds" not in explicit:
        if values["harness.runs"] >= 1:
            values["seeds"] = list(range(1, values["harness.runs"] + 1))
    if values["harness.runs"] != len(values["seeds"]):
        problems.append(
            f"harness.runs={values['harness.runs']} does not match {len(values['seeds'])} seeds"
        )
    if not values["seeds"]:
        problems.append("seeds must be nonempty")

    cfg = ExperimentConfig(values=values)
    # Constraint validation is delegated to the component configs.
    for build in (cfg.label_space, cfg.decay_model, cfg.reward_config,
                  cfg.agent_config, cfg.harness_config):
        try:
            build()
        except ConfigError:
            raise
        except ValueError as exc:
            problems.append(str(exc))
    for key in ("learner.epochs", "learner.batch"):
        if values[key] < 1:
            problems.append(f"{key} must be >= 1, got {values[key]}")
    if values["learner.lr"] <= 0:
        problems.append(f"learner.lr must be > 0, got {values['learner.lr']}")
    if values["synth.sep"] < 0:
        problems.append(f"synth.sep must be >= 0, got {values['synth.sep']}")
    if values["synth.dim"] < 1:
        problems.append(f"synth.dim must be >= 1, got {values['synth.dim']}")

    if problems:
        raise ConfigError(problems)
    return cfg


def default_config() -> ExperimentConfig:
    return ExperimentConfig(values={key: default for key, (_, default) in _SCHEMA.items()})
