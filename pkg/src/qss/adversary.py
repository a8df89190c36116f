"""Attack scenarios as channel hooks plus empirical detection/leakage stats.

Every runner follows the same recipe: build a ring channel with the attack
hook(s) installed, run independently seeded shots, and distill the per-shot
transcripts into an AttackReport. "Information gain" claims are measured as
the total-variation distance between the adversary's observation
distributions under two forced shadow hypotheses; "detected" means the run
ended in any abort.

With `active=False` no hook is installed and the runner reproduces the
honest shot series bit for bit, which the control tests rely on.
"""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from typing import Iterable

import numpy as np
from scipy.stats import chisquare

from .protocol import (
    Channel,
    HookContext,
    ProtocolInstance,
    ProtocolTranscript,
    TRANSMITTED,
    VERDICT_ABORT_HASH,
)
from .qudit import QuditState, apply_copy, apply_iqft, measure

ADVERSARY_REGISTER = "E"

ATTACK_KINDS = (
    "intercept_resend",
    "intercept_iqft",
    "entangle_measure",
    "forgery",
    "collusion_probe",
)


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    hop_index: int = 0
    player_id: int | None = None
    shots: int = 8192
    seed: int = 0
    active: bool = True
    # Two shadow values to condition the leakage statistic on; None skips it.
    hypotheses: tuple[int, int] | None = None
    # Forgery only: pin the fake shadows instead of drawing them per shot.
    fake_shadow: int | None = None
    fake_hash_shadow: int | None = None
    # Collusion only: colluders disturb the ring (Fourier-basis intercept).
    escalate: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")


@dataclass(frozen=True)
class AttackReport:
    kind: str
    shots: int
    outcome_histogram: dict
    detection_rate: float
    ancilla_abort_rate: float
    hash_abort_rate: float
    leakage: float | None
    chi2_pvalue: float | None
    extra: dict = dataclass_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "shots": self.shots,
            "outcome_histogram": {_key(k): v for k, v in sorted(self.outcome_histogram.items())},
            "detection_rate": self.detection_rate,
            "ancilla_abort_rate": self.ancilla_abort_rate,
            "hash_abort_rate": self.hash_abort_rate,
            "leakage": self.leakage,
            "chi2_pvalue": self.chi2_pvalue,
            "extra": self.extra,
        }


def _key(k) -> str:
    return ",".join(str(v) for v in k) if isinstance(k, tuple) else str(k)


def shot_seeds(seed: int | np.random.SeedSequence, shots: int) -> list[np.random.SeedSequence]:
    """Independent per-shot seed sequences; shared by honest and attack series."""
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return root.spawn(shots)


def run_shot_series(
    instance: ProtocolInstance,
    shots: int,
    seed: int | np.random.SeedSequence,
    channel: Channel | None = None,
    per_shot=None,
) -> list[ProtocolTranscript]:
    """Run `shots` independent executions. `per_shot(instance, rng)` may swap
    in a mutated instance (e.g. a forged shadow) before each run."""
    out = []
    for child in shot_seeds(seed, shots):
        rng = np.random.default_rng(child)
        inst = per_shot(instance, rng) if per_shot is not None else instance
        out.append(inst.run(channel=channel, rng=rng))
    return out


def series_digest(transcripts: Iterable[ProtocolTranscript]) -> str:
    """Stable fingerprint of a transcript series; lets tests check that two
    runs (e.g. a disabled attack and the honest baseline) agree shot for shot."""
    h = hashlib.sha1()
    for tr in transcripts:
        h.update(
            f"{tr.verdict}|{tr.f0}|{tr.g0}|{tr.ancilla}|"
            f"{tr.shadows_secret}|{tr.shadows_hash}\n".encode()
        )
    return h.hexdigest()


def tv_distance(counts_a: Counter, counts_b: Counter, total_a: int, total_b: int) -> float:
    """Total-variation distance between two empirical distributions."""
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(
        abs(counts_a.get(k, 0) / total_a - counts_b.get(k, 0) / total_b) for k in keys
    )


def uniformity_pvalue(counts: Counter, d: int) -> float:
    """Chi-square p-value against the uniform distribution on [0, d)."""
    observed = np.array([counts.get(v, 0) for v in range(d)])
    return float(chisquare(observed).pvalue)


def _measure_resend_hook(state: QuditState, rng: np.random.Generator, ctx: HookContext) -> QuditState:
    out = measure(state, TRANSMITTED, rng)
    ctx.record({"value": out.value})
    return out.post_state


def _fourier_intercept_hook(state: QuditState, rng: np.random.Generator, ctx: HookContext) -> QuditState:
    state = apply_iqft(state, TRANSMITTED)
    out = measure(state, TRANSMITTED, rng)
    ctx.record({"value": out.value})
    return out.post_state


def _entangle_hook(state: QuditState, rng: np.random.Generator, ctx: HookContext) -> QuditState:
    return apply_copy(state, TRANSMITTED, ADVERSARY_REGISTER)


def _probe_ancilla_hook(state: QuditState, rng: np.random.Generator, ctx: HookContext) -> QuditState:
    out = measure(state, ADVERSARY_REGISTER, rng)
    ctx.record({"value": out.value})
    return out.post_state


def _secret_pass_values(transcript: ProtocolTranscript) -> list[int]:
    return [payload["value"] for pass_name, _, payload in transcript.hook_events if pass_name == "secret"]


def _summarize(
    kind: str,
    shots: int,
    transcripts: Iterable[ProtocolTranscript],
    observations: Counter,
    leakage: float | None,
    chi2_pvalue: float | None,
    extra: dict,
) -> AttackReport:
    transcripts = list(transcripts)
    n = len(transcripts)
    detected = sum(1 for tr in transcripts if not tr.accepted)
    ancilla = sum(1 for tr in transcripts if tr.ancilla and tr.ancilla[0] != 0)
    hashes = sum(1 for tr in transcripts if tr.verdict == VERDICT_ABORT_HASH)
    extra = {**extra, "series_digest": series_digest(transcripts)}
    return AttackReport(
        kind=kind,
        shots=shots,
        outcome_histogram=dict(observations),
        detection_rate=detected / n,
        ancilla_abort_rate=ancilla / n,
        hash_abort_rate=hashes / n,
        leakage=leakage,
        chi2_pvalue=chi2_pvalue,
        extra=extra,
    )


def _validate_hop(instance: ProtocolInstance, hop_index: int) -> None:
    if instance.t < 2:
        raise ValueError("interception needs at least one hop (t >= 2)")
    if not 0 <= hop_index < instance.t:
        raise ValueError(f"hop_index {hop_index} out of range for t={instance.t}")


def _flat_observations(transcripts) -> Counter:
    return Counter(v for tr in transcripts for v in _secret_pass_values(tr))


def _conditioned_leakage(
    instance: ProtocolInstance,
    spec: AttackSpec,
    channel: Channel,
    position: int,
    collect,
) -> tuple[float, list[Counter]]:
    """Re-run the series with one player's shadow forced to each hypothesis
    value (all else fixed) and return the TV distance between the two
    observation distributions."""
    histograms = []
    for salt, value in enumerate(spec.hypotheses, start=1):
        forced = instance.with_shadow(position, value)
        series = run_shot_series(forced, spec.shots, _salted_seed(spec.seed, salt), channel)
        histograms.append(collect(series))
    return tv_distance(histograms[0], histograms[1], spec.shots, spec.shots), histograms


def _intercept_attack(instance: ProtocolInstance, spec: AttackSpec, hook) -> AttackReport:
    channel = None
    if spec.active:
        _validate_hop(instance, spec.hop_index)
        channel = Channel.ring(instance.t, hooks={spec.hop_index: hook})
    transcripts = run_shot_series(instance, spec.shots, spec.seed, channel)
    observations = _flat_observations(transcripts)
    leakage = None
    extra: dict = {"hop_index": spec.hop_index}
    if spec.active and spec.hypotheses is not None:
        leakage, histograms = _conditioned_leakage(
            instance, spec, channel, 1, _flat_observations
        )
        extra["hypotheses"] = list(spec.hypotheses)
        extra["hypothesis_histograms"] = [
            {_key(k): v for k, v in sorted(h.items())} for h in histograms
        ]
    chi2 = uniformity_pvalue(observations, instance.modulus.d) if spec.active else None
    return _summarize(spec.kind, spec.shots, transcripts, observations, leakage, chi2, extra)


def run_intercept_resend(instance: ProtocolInstance, spec: AttackSpec) -> AttackReport:
    """Measure T in the computational basis at one hop and forward the
    collapsed state. The outcome is uniform and carries nothing about s1."""
    return _intercept_attack(instance, spec, _measure_resend_hook)


def run_intercept_iqft(instance: ProtocolInstance, spec: AttackSpec) -> AttackReport:
    """Apply the inverse QFT to T before measuring, hoping to undo the
    reconstructor's transform. Entanglement with H leaves the outcome uniform;
    the collapsed T no longer matches H, so the later uncopy trips the
    ancilla check."""
    return _intercept_attack(instance, spec, _fourier_intercept_hook)


def run_entangle_measure(instance: ProtocolInstance, spec: AttackSpec) -> AttackReport:
    """Simplified entangle-measure model: copy T onto a private register at
    one hop, forward T untouched, and measure the private register after the
    reconstructor's uncopy."""
    channel = None
    if spec.active:
        _validate_hop(instance, spec.hop_index)
        channel = Channel.ring(
            instance.t,
            hooks={spec.hop_index: _entangle_hook},
            post_uncopy=_probe_ancilla_hook,
            ancilla_register=ADVERSARY_REGISTER,
        )
    transcripts = run_shot_series(instance, spec.shots, spec.seed, channel)
    observations = _flat_observations(transcripts)
    leakage = None
    extra: dict = {"hop_index": spec.hop_index}
    if spec.active and spec.hypotheses is not None:
        leakage, _ = _conditioned_leakage(instance, spec, channel, 1, _flat_observations)
        extra["hypotheses"] = list(spec.hypotheses)
    chi2 = uniformity_pvalue(observations, instance.modulus.d) if spec.active else None
    return _summarize(spec.kind, spec.shots, transcripts, observations, leakage, chi2, extra)


def run_forgery(instance: ProtocolInstance, spec: AttackSpec) -> AttackReport:
    """One player runs the secret pass with a fake shadow (uniform over the
    wrong values unless pinned). Detection happens at the hash comparison;
    shots accepted despite a wrong shadow are counted as residual collisions."""
    position = spec.player_id if spec.player_id is not None else min(2, instance.t)
    if not 1 <= position <= instance.t:
        raise ValueError(f"player position {position} out of range for t={instance.t}")
    d = instance.modulus.d
    true_value = instance.shadows_secret[position - 1]

    def forge(inst: ProtocolInstance, rng: np.random.Generator) -> ProtocolInstance:
        if spec.fake_shadow is not None:
            fake = spec.fake_shadow
        else:
            # Uniform over Z_d minus the true value.
            fake = (true_value + 1 + int(rng.integers(d - 1))) % d
        inst = inst.with_shadow(position, fake)
        if spec.fake_hash_shadow is not None:
            inst = inst.with_shadow(position, spec.fake_hash_shadow, "hash")
        return inst

    per_shot = forge if spec.active else None
    transcripts = run_shot_series(instance, spec.shots, spec.seed, None, per_shot)
    observations = Counter(tr.f0 for tr in transcripts)
    forged = [tr for tr in transcripts if tr.shadows_secret[position - 1] != true_value]
    residual = sum(1 for tr in forged if tr.accepted)
    extra = {
        "target_position": position,
        "true_shadow": true_value,
        "residual_collision_shots": residual,
    }
    return _summarize(spec.kind, spec.shots, transcripts, observations, None, None, extra)


def run_collusion_probe(instance: ProtocolInstance, spec: AttackSpec) -> AttackReport:
    """The neighbours of player P_e pool what crosses their hands: each
    measures T while holding it. Their joint view is compared under two
    forced values of P_e's shadow. With escalate=True the first colluder
    intercepts in the Fourier basis instead, which disturbs the ring the
    same way the plain intercept attack does."""
    t = instance.t
    position = spec.player_id if spec.player_id is not None else t - 1
    if not 3 <= position <= t - 1:
        raise ValueError(
            f"collusion probe needs a middle player with two participant "
            f"neighbours: 3 <= e <= t-1, got e={position}, t={t}"
        )
    first_hook = _fourier_intercept_hook if spec.escalate else _measure_resend_hook
    hooks = {position - 2: first_hook, position - 1: _measure_resend_hook}
    channel = Channel.ring(t, hooks=hooks) if spec.active else None

    def joint(transcripts: list[ProtocolTranscript]) -> Counter:
        return Counter(tuple(_secret_pass_values(tr)) for tr in transcripts)

    transcripts = run_shot_series(instance, spec.shots, spec.seed, channel)
    observations = joint(transcripts) if spec.active else Counter()
    leakage = None
    extra: dict = {"middle_position": position, "colluders": [position - 1, position + 1]}
    if spec.active and spec.hypotheses is not None:
        leakage, _ = _conditioned_leakage(instance, spec, channel, position, joint)
        extra["hypotheses"] = list(spec.hypotheses)
    return _summarize(spec.kind, spec.shots, transcripts, observations, leakage, None, extra)


def run_attack(instance: ProtocolInstance, spec: AttackSpec) -> AttackReport:
    runner = {
        "intercept_resend": run_intercept_resend,
        "intercept_iqft": run_intercept_iqft,
        "entangle_measure": run_entangle_measure,
        "forgery": run_forgery,
        "collusion_probe": run_collusion_probe,
    }[spec.kind]
    return runner(instance, spec)


def _salted_seed(seed: int, salt: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, salt])
